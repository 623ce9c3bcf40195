//! Link-level Monte Carlo simulation of two MIMO-OFDM transceiver chains:
//! MMSE-equalized spatial multiplexing and per-subcarrier transmit antenna
//! selection ("MD-OFDM"). The crate produces BER-vs-SNR curves, PAPR CCDFs
//! and power / energy-efficiency figures.
//!
//! Layering, bottom up:
//!
//! * [`numerics`]: complex linear algebra, DFTs, QAM, random streams.
//! * [`channel`]: Kronecker-correlated Rayleigh channel per subcarrier.
//! * [`transceiver`]: both transmit/receive chains and waveform synthesis.
//! * [`metrics`]: BER engine, PAPR/CCDF, power and energy models, oracles.
//! * [`harness`]: configuration, sweeps, CSV output and run manifests.

// `!(x > 0.0)` style checks are intentional: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod harness;
pub mod metrics;
pub mod numerics;
pub mod transceiver;

pub use num_complex::Complex64;
