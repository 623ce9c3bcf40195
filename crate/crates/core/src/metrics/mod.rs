//! Figures of merit: Monte Carlo BER, PAPR and its CCDF, power consumption
//! and energy efficiency, plus closed-form and quadrature baselines used to
//! check the simulator.
//!
//! SNR convention used throughout: `noise_var = E_s / SNR` is the total
//! complex noise variance per receive antenna and also the MMSE regularizer.

mod ber;
mod oracle;
mod papr;
mod power;

pub use ber::{noise_var_from_snr, run_ber_point, run_ber_point_until, BerPoint};
pub use oracle::{analytic_rayleigh_qpsk_ber, analytic_selection_ber, binomial_sigma, q_function};
pub use papr::{collect_papr_samples, compute_papr, estimate_ccdf, CcdfCurve, Papr, PaprReduce};
pub use power::{effective_se, energy_efficiency, ideal_se, total_power, EeRecord, PowerModel};

use crate::channel::{ChannelConfig, ChannelError};
use crate::numerics::NumericsError;
use crate::transceiver::TransceiverError;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("PAPR undefined for an all-zero waveform")]
    UndefinedPapr,
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Transceiver(#[from] TransceiverError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Transceiver chain under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// MMSE-equalized spatial multiplexing.
    Mmse,
    /// Per-subcarrier transmit antenna selection.
    Md,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::Mmse, Scheme::Md];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Mmse => "mmse",
            Scheme::Md => "md",
        }
    }

    /// Label used when deriving random streams.
    pub fn stream_label(self) -> u64 {
        match self {
            Scheme::Mmse => 0,
            Scheme::Md => 1,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "mmse" => Ok(Scheme::Mmse),
            "md" => Ok(Scheme::Md),
            other => Err(format!("unknown scheme {other:?} (expected mmse or md)")),
        }
    }
}

/// Physical-layer parameters of one chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConfig {
    pub n_tx: usize,
    pub n_rx: usize,
    pub n_sc: usize,
    pub modulation_order: usize,
    pub rho_tx: f64,
    pub rho_rx: f64,
    /// Scale MMSE symbols by `1/√n_tx` so both chains radiate equal power.
    pub normalize_total_tx_power: bool,
    pub papr_oversampling: usize,
}

impl LinkConfig {
    /// The reference setup: 4 transmit antennas, QPSK, 64 subcarriers, with
    /// four receive antennas for MMSE and one for MD.
    pub fn reference(scheme: Scheme) -> Self {
        Self {
            n_tx: 4,
            n_rx: match scheme {
                Scheme::Mmse => 4,
                Scheme::Md => 1,
            },
            n_sc: 64,
            modulation_order: 4,
            rho_tx: 0.0,
            rho_rx: 0.0,
            normalize_total_tx_power: false,
            papr_oversampling: 4,
        }
    }

    pub fn channel_config(&self) -> ChannelConfig {
        ChannelConfig {
            n_tx: self.n_tx,
            n_rx: self.n_rx,
            n_sc: self.n_sc,
            rho_tx: self.rho_tx,
            rho_rx: self.rho_rx,
        }
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.modulation_order.trailing_zeros() as usize
    }

    /// Information bits carried by one OFDM symbol.
    pub fn bits_per_ofdm_symbol(&self, scheme: Scheme) -> usize {
        let streams = match scheme {
            Scheme::Mmse => self.n_tx,
            Scheme::Md => 1,
        };
        streams * self.n_sc * self.bits_per_symbol()
    }

    pub fn validate(&self, scheme: Scheme) -> Result<(), MetricsError> {
        if scheme == Scheme::Md && self.n_rx != 1 {
            return Err(MetricsError::Config("md requires n_rx = 1".into()));
        }
        if !matches!(self.modulation_order, 4 | 16 | 64) {
            return Err(MetricsError::Config(format!(
                "modulation_order {} not in {{4, 16, 64}}",
                self.modulation_order
            )));
        }
        if !matches!(self.papr_oversampling, 1 | 2 | 4 | 8) {
            return Err(MetricsError::Config(format!(
                "papr_oversampling {} not in {{1, 2, 4, 8}}",
                self.papr_oversampling
            )));
        }
        self.channel_config().validate()?;
        Ok(())
    }
}
