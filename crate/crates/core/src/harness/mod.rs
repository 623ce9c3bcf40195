//! Configuration, sweeps and artifact output.

mod config;
mod output;
mod sweep;

pub use config::{load_config, parse_range, ConfigError, SimConfig};
pub use output::{
    ccdf_rows, from_csv, read_csv, to_csv, write_outputs, CcdfRow, RunManifest, RunOutputs, BER_FILE, BER_HEADER,
    EE_FILE, EE_HEADER, MANIFEST_FILE, PAPR_FILE, PAPR_HEADER, PLOT_SCRIPT_FILE,
};
pub use sweep::{ee_from_ber, papr_samples, run_ber_sweep, run_ee_sweep, run_papr, with_workers};

use crate::metrics::MetricsError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Runtime(String),
}

impl HarnessError {
    /// Process exit code: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Metrics(MetricsError::Config(_)) => 2,
            _ => 1,
        }
    }
}
