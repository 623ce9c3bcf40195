//! CSV artifacts and the run manifest.
//!
//! Floats are written in shortest round-trip form, so every file parses back
//! to exactly the in-memory values.

use super::config::SimConfig;
use super::HarnessError;
use crate::metrics::{BerPoint, CcdfCurve, EeRecord, Scheme};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

pub const BER_FILE: &str = "ber.csv";
pub const EE_FILE: &str = "ee.csv";
pub const PAPR_FILE: &str = "papr_ccdf.csv";
pub const MANIFEST_FILE: &str = "manifest.toml";
pub const PLOT_SCRIPT_FILE: &str = "plot_figures.py";

pub const BER_HEADER: &str = "scheme,snr_db,bits_sent,bit_errors,ber";
pub const EE_HEADER: &str =
    "scheme,snr_db,ber,se_ideal_bps_hz,se_eff_bps_hz,p_total_mw,bandwidth_hz,ee_bits_per_joule";
pub const PAPR_HEADER: &str = "scheme,papr0_db,ccdf";

/// One row of `papr_ccdf.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcdfRow {
    pub scheme: Scheme,
    pub papr0_db: f64,
    pub ccdf: f64,
}

pub fn ccdf_rows(curves: &[(Scheme, CcdfCurve)]) -> Vec<CcdfRow> {
    curves
        .iter()
        .flat_map(|(scheme, c)| {
            c.thresholds_db
                .iter()
                .zip(&c.probabilities)
                .map(move |(&t, &p)| CcdfRow {
                    scheme: *scheme,
                    papr0_db: t,
                    ccdf: p,
                })
        })
        .collect()
}

/// Everything a run may emit. Absent parts produce no file.
#[derive(Debug, Clone, Default)]
pub struct RunOutputs {
    pub ber: Option<Vec<BerPoint>>,
    pub ee: Option<Vec<EeRecord>>,
    pub papr: Option<Vec<(Scheme, CcdfCurve)>>,
}

fn io_err(path: &Path, source: impl std::fmt::Display) -> HarnessError {
    HarnessError::Io {
        path: path.display().to_string(),
        message: source.to_string(),
    }
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| HarnessError::Runtime(format!("csv encoding: {e}")))?;
    }
    w.into_inner().map_err(|e| HarnessError::Runtime(format!("csv encoding: {e}")))
}

pub fn from_csv<T: DeserializeOwned>(bytes: &[u8]) -> Result<Vec<T>, HarnessError> {
    csv::Reader::from_reader(bytes)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| HarnessError::Runtime(format!("csv decoding: {e}")))
}

/// Reads a CSV artifact back into records.
pub fn read_csv<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>, HarnessError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    from_csv(&bytes)
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Provenance record written next to the CSVs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub tool_version: String,
    pub timestamp: String,
    /// File name → lowercase hex SHA-256.
    pub checksums: BTreeMap<String, String>,
    pub config: SimConfig,
}

impl RunManifest {
    /// Renders the manifest as a TOML document; the `[config]` table is the
    /// full config echo.
    pub fn render(&self) -> String {
        let mut out = String::from("# mdofdm run manifest\n");
        out.push_str(&format!("tool_version = {:?}\n", self.tool_version));
        out.push_str(&format!("timestamp = {:?}\n\n[checksums]\n", self.timestamp));
        for (file, sum) in &self.checksums {
            out.push_str(&format!("{file:?} = \"sha256:{sum}\"\n"));
        }
        out.push_str("\n[config]\n");
        out.push_str(&self.config.to_document());
        out
    }

    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let bad = |m: String| HarnessError::Runtime(format!("malformed manifest: {m}"));
        let table: toml::Table = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        let string = |key: &str| {
            table
                .get(key)
                .and_then(|v| v.as_str())
                .map(str::to_owned)
                .ok_or_else(|| bad(format!("missing {key}")))
        };
        let mut checksums = BTreeMap::new();
        if let Some(sums) = table.get("checksums").and_then(|v| v.as_table()) {
            for (file, v) in sums {
                let sum = v
                    .as_str()
                    .and_then(|s| s.strip_prefix("sha256:"))
                    .ok_or_else(|| bad(format!("checksum for {file}")))?;
                checksums.insert(file.clone(), sum.to_owned());
            }
        }
        let config = table
            .get("config")
            .and_then(|v| v.as_table())
            .ok_or_else(|| bad("missing [config]".into()))?;
        let config = SimConfig::from_document(&toml::to_string(config).map_err(|e| bad(e.to_string()))?)?;
        Ok(Self {
            tool_version: string("tool_version")?,
            timestamp: string("timestamp")?,
            checksums,
            config,
        })
    }

    /// Files in `dir` whose current checksum does not match the manifest.
    pub fn verify(&self, dir: impl AsRef<Path>) -> Result<Vec<String>, HarnessError> {
        let mut mismatched = Vec::new();
        for (file, sum) in &self.checksums {
            let path = dir.as_ref().join(file);
            let bytes = fs::read(&path).map_err(|e| io_err(&path, e))?;
            if &sha256_hex(&bytes) != sum {
                mismatched.push(file.clone());
            }
        }
        Ok(mismatched)
    }
}

fn plot_script(outputs: &RunOutputs) -> String {
    let mut s = String::from(
        "#!/usr/bin/env python3\n\
         # Plots the CSVs in this directory. Requires pandas and matplotlib.\n\
         import pathlib\n\
         import matplotlib.pyplot as plt\n\
         import pandas as pd\n\n\
         here = pathlib.Path(__file__).resolve().parent\n\n",
    );
    if outputs.ber.is_some() {
        s.push_str(
            "ber = pd.read_csv(here / \"ber.csv\")\n\
             fig, ax = plt.subplots()\n\
             for scheme, g in ber.groupby(\"scheme\"):\n    \
                 ax.semilogy(g.snr_db, g.ber.where(g.ber > 0), marker=\"o\", label=scheme)\n\
             ax.set(xlabel=\"SNR (dB)\", ylabel=\"BER\")\n\
             ax.grid(True, which=\"both\")\n\
             ax.legend()\n\
             fig.savefig(here / \"ber.png\", dpi=150)\n\n",
        );
    }
    if outputs.ee.is_some() {
        s.push_str(
            "ee = pd.read_csv(here / \"ee.csv\")\n\
             fig, ax = plt.subplots()\n\
             for scheme, g in ee.groupby(\"scheme\"):\n    \
                 ax.plot(g.snr_db, g.ee_bits_per_joule, marker=\"o\", label=scheme)\n\
             ax.set(xlabel=\"SNR (dB)\", ylabel=\"EE (bits/J)\")\n\
             ax.grid(True)\n\
             ax.legend()\n\
             fig.savefig(here / \"ee.png\", dpi=150)\n\n",
        );
    }
    if outputs.papr.is_some() {
        s.push_str(
            "ccdf = pd.read_csv(here / \"papr_ccdf.csv\")\n\
             fig, ax = plt.subplots()\n\
             for scheme, g in ccdf.groupby(\"scheme\"):\n    \
                 ax.semilogy(g.papr0_db, g.ccdf.where(g.ccdf > 0), label=scheme)\n\
             ax.set(xlabel=\"PAPR0 (dB)\", ylabel=\"P(PAPR > PAPR0)\")\n\
             ax.grid(True, which=\"both\")\n\
             ax.legend()\n\
             fig.savefig(here / \"papr_ccdf.png\", dpi=150)\n",
        );
    }
    s
}

/// Writes the CSVs present in `outputs` (plus the optional plotting script)
/// into `out_dir`, then the manifest covering them.
pub fn write_outputs(
    out_dir: impl AsRef<Path>,
    cfg: &SimConfig,
    outputs: &RunOutputs,
    with_plot_script: bool,
) -> Result<RunManifest, HarnessError> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut files: Vec<(&str, Vec<u8>)> = Vec::new();
    if let Some(ber) = &outputs.ber {
        files.push((BER_FILE, to_csv(ber)?));
    }
    if let Some(ee) = &outputs.ee {
        files.push((EE_FILE, to_csv(ee)?));
    }
    if let Some(papr) = &outputs.papr {
        files.push((PAPR_FILE, to_csv(&ccdf_rows(papr))?));
    }
    if with_plot_script {
        files.push((PLOT_SCRIPT_FILE, plot_script(outputs).into_bytes()));
    }
    let mut checksums = BTreeMap::new();
    for (name, bytes) in &files {
        let path: PathBuf = dir.join(name);
        fs::write(&path, bytes).map_err(|e| io_err(&path, e))?;
        checksums.insert(name.to_string(), sha256_hex(bytes));
    }
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        checksums,
        config: cfg.clone(),
    };
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, manifest.render()).map_err(|e| io_err(&path, e))?;
    Ok(manifest)
}
