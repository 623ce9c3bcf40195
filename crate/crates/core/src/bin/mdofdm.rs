use clap::{Parser, Subcommand};
use mdofdm::harness::{
    ee_from_ber, load_config, parse_range, run_ber_sweep, run_papr, write_outputs, ConfigError, HarnessError,
    RunOutputs, SimConfig,
};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

/// BER, PAPR and energy-efficiency sweeps for MMSE MIMO-OFDM and
/// antenna-selection OFDM.
#[derive(Debug, Parser)]
#[command(name = "mdofdm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Configuration file (flat TOML). Defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Master seed; overrides the config file.
    #[arg(long, global = true, env = "MDOFDM_SEED", value_name = "N")]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out", value_name = "DIR")]
    out: PathBuf,

    /// Worker threads (default: one per core).
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    /// SNR grid in dB as LO:STEP:HI; overrides the config file.
    #[arg(long, global = true, value_name = "LO:STEP:HI")]
    snr: Option<String>,

    /// Also write a matplotlib script that plots the CSVs.
    #[arg(long, global = true)]
    plot_script: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// BER vs. SNR (ber.csv).
    Ber,
    /// Energy efficiency vs. SNR (ee.csv, plus the underlying ber.csv).
    Ee,
    /// PAPR CCDF (papr_ccdf.csv).
    Papr,
    /// All of the above.
    All,
}

fn resolve_config(cli: &Cli) -> Result<SimConfig, HarnessError> {
    let mut cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => SimConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(snr) = &cli.snr {
        cfg.snr_grid_db = parse_range(snr).map_err(|constraint| ConfigError::Invalid {
            field: "--snr",
            constraint,
        })?;
    }
    if cli.workers == Some(0) {
        return Err(ConfigError::Invalid {
            field: "--workers",
            constraint: "must be at least 1".into(),
        }
        .into());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), HarnessError> {
    let cfg = resolve_config(cli)?;
    let start = Instant::now();
    let mut outputs = RunOutputs::default();
    if matches!(cli.command, Command::Ber | Command::Ee | Command::All) {
        let ber = run_ber_sweep(&cfg, cli.workers)?;
        if matches!(cli.command, Command::Ee | Command::All) {
            outputs.ee = Some(ee_from_ber(&cfg, &ber)?);
        }
        outputs.ber = Some(ber);
    }
    if matches!(cli.command, Command::Papr | Command::All) {
        outputs.papr = Some(run_papr(&cfg, cli.workers)?);
    }
    let manifest = write_outputs(&cli.out, &cfg, &outputs, cli.plot_script)?;
    for file in manifest.checksums.keys() {
        eprintln!("wrote {}", cli.out.join(file).display());
    }
    eprintln!("done in {:.1} s", start.elapsed().as_secs_f64());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
