//! Simulation configuration.
//!
//! The document is flat TOML: one `key = value` per line, typed values and
//! `#` comments. Every key is optional; omitted keys take the defaults listed
//! in [`SimConfig::default`]. See `docs/config.md` for the key reference.

use crate::metrics::{LinkConfig, PaprReduce, PowerModel, Scheme};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid {field}: {constraint}")]
    Invalid { field: &'static str, constraint: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn invalid(field: &'static str, constraint: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field,
        constraint: constraint.into(),
    }
}

/// Parses `LO:STEP:HI` into the inclusive grid `LO, LO+STEP, …, HI`.
pub fn parse_range(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let [lo, step, hi] = parts.as_slice() else {
        return Err(format!("{spec:?} is not of the form LO:STEP:HI"));
    };
    let parse = |s: &str| s.parse::<f64>().map_err(|e| format!("{s:?}: {e}"));
    let (lo, step, hi) = (parse(lo)?, parse(step)?, parse(hi)?);
    if !(lo.is_finite() && step.is_finite() && hi.is_finite()) {
        return Err(format!("{spec:?} has non-finite bounds"));
    }
    if step <= 0.0 || hi < lo {
        return Err(format!("{spec:?} needs STEP > 0 and HI >= LO"));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    if n > 100_000 {
        return Err(format!("{spec:?} has too many points"));
    }
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

/// Either an explicit list or a `LO:STEP:HI` string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Grid {
    List(Vec<f64>),
    Range(String),
}

impl Grid {
    fn resolve(self, field: &'static str) -> Result<Vec<f64>, ConfigError> {
        match self {
            Grid::List(v) => Ok(v),
            Grid::Range(s) => parse_range(&s).map_err(|e| invalid(field, e)),
        }
    }
}

/// On-disk document. Field names are the config keys.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDocument {
    schemes: Option<Vec<Scheme>>,
    n_tx: Option<usize>,
    n_rx: Option<usize>,
    n_sc: Option<usize>,
    modulation_order: Option<usize>,
    rho_tx: Option<f64>,
    rho_rx: Option<f64>,
    snr_grid_db: Option<Grid>,
    n_symbols_per_point: Option<usize>,
    early_stop_errors: Option<u64>,
    papr_oversampling: Option<usize>,
    papr_n_symbols: Option<usize>,
    papr_thresholds_db: Option<Grid>,
    papr_reduce: Option<PaprReduce>,
    p_rf_mw: Option<f64>,
    p_mmse_proc_mw: Option<f64>,
    p_sel_proc_mw: Option<f64>,
    bandwidth_hz: Option<f64>,
    seed: Option<u64>,
    normalize_total_tx_power: Option<bool>,
}

/// Fully resolved and validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub schemes: Vec<Scheme>,
    pub n_tx: usize,
    /// Receive antennas. When unset, MMSE uses `n_tx` and MD uses 1; when set
    /// it applies to every scheme.
    pub n_rx: Option<usize>,
    pub n_sc: usize,
    pub modulation_order: usize,
    pub rho_tx: f64,
    pub rho_rx: f64,
    pub snr_grid_db: Vec<f64>,
    pub n_symbols_per_point: usize,
    /// Stop a BER point early once this many bit errors are seen.
    pub early_stop_errors: Option<u64>,
    pub papr_oversampling: usize,
    /// PAPR samples collected per scheme.
    pub papr_n_symbols: usize,
    pub papr_thresholds_db: Vec<f64>,
    pub papr_reduce: PaprReduce,
    pub power_model: PowerModel,
    pub bandwidth_hz: f64,
    pub seed: u64,
    pub normalize_total_tx_power: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            schemes: vec![Scheme::Mmse, Scheme::Md],
            n_tx: 4,
            n_rx: None,
            n_sc: 64,
            modulation_order: 4,
            rho_tx: 0.0,
            rho_rx: 0.0,
            snr_grid_db: parse_range("0:2:20").expect("valid literal"),
            // 7813 QPSK symbols on 64 subcarriers is just over 10⁶ bits per
            // point for a single stream.
            n_symbols_per_point: 7813,
            early_stop_errors: None,
            papr_oversampling: 4,
            papr_n_symbols: 100_000,
            papr_thresholds_db: parse_range("4:0.25:13").expect("valid literal"),
            papr_reduce: PaprReduce::PerAntenna,
            power_model: PowerModel::default(),
            bandwidth_hz: 1e6,
            seed: 42,
            normalize_total_tx_power: false,
        }
    }
}

impl SimConfig {
    /// Parses a config document, applying defaults and validating.
    pub fn from_document(text: &str) -> Result<Self, ConfigError> {
        let doc: ConfigDocument = toml::from_str(text).map_err(|e| {
            let (line, column) = e
                .span()
                .map(|s| line_col(text, s.start))
                .unwrap_or((0, 0));
            ConfigError::Parse {
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        let d = SimConfig::default();
        let cfg = SimConfig {
            schemes: doc.schemes.unwrap_or(d.schemes),
            n_tx: doc.n_tx.unwrap_or(d.n_tx),
            n_rx: doc.n_rx,
            n_sc: doc.n_sc.unwrap_or(d.n_sc),
            modulation_order: doc.modulation_order.unwrap_or(d.modulation_order),
            rho_tx: doc.rho_tx.unwrap_or(d.rho_tx),
            rho_rx: doc.rho_rx.unwrap_or(d.rho_rx),
            snr_grid_db: match doc.snr_grid_db {
                Some(g) => g.resolve("snr_grid_db")?,
                None => d.snr_grid_db,
            },
            n_symbols_per_point: doc.n_symbols_per_point.unwrap_or(d.n_symbols_per_point),
            early_stop_errors: doc.early_stop_errors,
            papr_oversampling: doc.papr_oversampling.unwrap_or(d.papr_oversampling),
            papr_n_symbols: doc.papr_n_symbols.unwrap_or(d.papr_n_symbols),
            papr_thresholds_db: match doc.papr_thresholds_db {
                Some(g) => g.resolve("papr_thresholds_db")?,
                None => d.papr_thresholds_db,
            },
            papr_reduce: doc.papr_reduce.unwrap_or(d.papr_reduce),
            power_model: PowerModel {
                p_rf_mw: doc.p_rf_mw.unwrap_or(d.power_model.p_rf_mw),
                p_mmse_proc_mw: doc.p_mmse_proc_mw.unwrap_or(d.power_model.p_mmse_proc_mw),
                p_sel_proc_mw: doc.p_sel_proc_mw.unwrap_or(d.power_model.p_sel_proc_mw),
            },
            bandwidth_hz: doc.bandwidth_hz.unwrap_or(d.bandwidth_hz),
            seed: doc.seed.unwrap_or(d.seed),
            normalize_total_tx_power: doc.normalize_total_tx_power.unwrap_or(d.normalize_total_tx_power),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Serializes every key explicitly, so the document reloads to an equal
    /// config regardless of future default changes.
    pub fn to_document(&self) -> String {
        let doc = ConfigDocument {
            schemes: Some(self.schemes.clone()),
            n_tx: Some(self.n_tx),
            n_rx: self.n_rx,
            n_sc: Some(self.n_sc),
            modulation_order: Some(self.modulation_order),
            rho_tx: Some(self.rho_tx),
            rho_rx: Some(self.rho_rx),
            snr_grid_db: Some(Grid::List(self.snr_grid_db.clone())),
            n_symbols_per_point: Some(self.n_symbols_per_point),
            early_stop_errors: self.early_stop_errors,
            papr_oversampling: Some(self.papr_oversampling),
            papr_n_symbols: Some(self.papr_n_symbols),
            papr_thresholds_db: Some(Grid::List(self.papr_thresholds_db.clone())),
            papr_reduce: Some(self.papr_reduce),
            p_rf_mw: Some(self.power_model.p_rf_mw),
            p_mmse_proc_mw: Some(self.power_model.p_mmse_proc_mw),
            p_sel_proc_mw: Some(self.power_model.p_sel_proc_mw),
            bandwidth_hz: Some(self.bandwidth_hz),
            seed: Some(self.seed),
            normalize_total_tx_power: Some(self.normalize_total_tx_power),
        };
        toml::to_string(&doc).expect("flat document always serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schemes.is_empty() {
            return Err(invalid("schemes", "at least one scheme is required"));
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                return Err(invalid("schemes", format!("{s} listed twice")));
            }
        }
        if self.n_tx == 0 {
            return Err(invalid("n_tx", "must be at least 1"));
        }
        if let Some(n_rx) = self.n_rx {
            if n_rx == 0 {
                return Err(invalid("n_rx", "must be at least 1"));
            }
            if n_rx != 1 && self.schemes.contains(&Scheme::Md) {
                return Err(invalid("n_rx", "md requires n_rx = 1"));
            }
        }
        if !self.n_sc.is_power_of_two() {
            return Err(invalid("n_sc", format!("{} is not a power of two", self.n_sc)));
        }
        if !matches!(self.modulation_order, 4 | 16 | 64) {
            return Err(invalid(
                "modulation_order",
                format!("{} not in {{4, 16, 64}}", self.modulation_order),
            ));
        }
        for (field, rho) in [("rho_tx", self.rho_tx), ("rho_rx", self.rho_rx)] {
            if !(0.0..1.0).contains(&rho) {
                return Err(invalid(field, format!("{rho} must lie in [0, 1)")));
            }
        }
        if self.snr_grid_db.is_empty() {
            return Err(invalid("snr_grid_db", "grid is empty"));
        }
        if self.snr_grid_db.iter().any(|v| !v.is_finite()) {
            return Err(invalid("snr_grid_db", "values must be finite"));
        }
        if self.n_symbols_per_point == 0 {
            return Err(invalid("n_symbols_per_point", "must be at least 1"));
        }
        if self.early_stop_errors == Some(0) {
            return Err(invalid("early_stop_errors", "must be at least 1 when set"));
        }
        if !matches!(self.papr_oversampling, 1 | 2 | 4 | 8) {
            return Err(invalid(
                "papr_oversampling",
                format!("{} not in {{1, 2, 4, 8}}", self.papr_oversampling),
            ));
        }
        if self.papr_n_symbols == 0 {
            return Err(invalid("papr_n_symbols", "must be at least 1"));
        }
        if self.papr_thresholds_db.is_empty() {
            return Err(invalid("papr_thresholds_db", "grid is empty"));
        }
        if self
            .papr_thresholds_db
            .windows(2)
            .any(|w| !(w[0] < w[1]))
            || self.papr_thresholds_db.iter().any(|v| !v.is_finite())
        {
            return Err(invalid("papr_thresholds_db", "must be finite and strictly ascending"));
        }
        for (field, v) in [
            ("p_rf_mw", self.power_model.p_rf_mw),
            ("p_mmse_proc_mw", self.power_model.p_mmse_proc_mw),
            ("p_sel_proc_mw", self.power_model.p_sel_proc_mw),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(field, format!("{v} must be finite and non-negative")));
            }
        }
        if !(self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite()) {
            return Err(invalid("bandwidth_hz", "must be positive and finite"));
        }
        Ok(())
    }

    /// Link parameters used for `scheme`.
    pub fn link(&self, scheme: Scheme) -> LinkConfig {
        LinkConfig {
            n_tx: self.n_tx,
            n_rx: self.n_rx.unwrap_or(match scheme {
                Scheme::Mmse => self.n_tx,
                Scheme::Md => 1,
            }),
            n_sc: self.n_sc,
            modulation_order: self.modulation_order,
            rho_tx: self.rho_tx,
            rho_rx: self.rho_rx,
            normalize_total_tx_power: self.normalize_total_tx_power,
            papr_oversampling: self.papr_oversampling,
        }
    }
}

/// Reads and validates the config at `path`.
pub fn load_config(path: impl AsRef<Path>) -> Result<SimConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    SimConfig::from_document(&text)
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}
