//! The two transmit/receive chains.
//!
//! * MMSE spatial multiplexing: every antenna sends its own symbol on every
//!   subcarrier and the receiver applies `(HᴴH + σ²I)⁻¹Hᴴ` per subcarrier.
//! * MD-OFDM: each subcarrier is sent from the single antenna with the largest
//!   column gain `‖h_j‖²`, and a one-antenna receiver divides by the selected
//!   channel coefficient.
//!
//! Channel state is assumed perfectly known on both sides. The signal model is
//! per subcarrier in the frequency domain, so no cyclic prefix is inserted.

use crate::channel::ChannelRealization;
use crate::numerics::{solve_hermitian, unitary_idft, ComplexMatrix, ComplexVector, NumericsError, RandomStream};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransceiverError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Frequency-domain transmit grid, one row per antenna and one column per
/// subcarrier. Column `k` is the transmit vector `x_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TxFrame {
    grid: ComplexMatrix,
}

impl TxFrame {
    pub fn n_tx(&self) -> usize {
        self.grid.rows()
    }

    pub fn n_sc(&self) -> usize {
        self.grid.cols()
    }

    pub fn grid(&self) -> &ComplexMatrix {
        &self.grid
    }

    pub fn symbol(&self, antenna: usize, k: usize) -> Complex64 {
        self.grid[(antenna, k)]
    }

    /// Transmit vector of subcarrier `k`.
    pub fn column(&self, k: usize) -> ComplexVector {
        self.grid.column(k)
    }

    /// Frequency-domain symbols radiated by `antenna`.
    pub fn antenna_row(&self, antenna: usize) -> &[Complex64] {
        let n = self.n_sc();
        &self.grid.entries()[antenna * n..(antenna + 1) * n]
    }
}

/// Chosen transmit antenna per subcarrier (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionMap(pub Vec<usize>);

impl SelectionMap {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn antenna(&self, k: usize) -> usize {
        self.0[k]
    }
}

/// Per-antenna time-domain samples of one OFDM symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeDomainWaveform {
    pub oversampling: usize,
    pub per_antenna: Vec<Vec<Complex64>>,
}

/// Spatial-multiplexing frame: all `n_tx` antennas active on all subcarriers.
/// Symbols pass through unscaled.
pub fn mmse_build_tx(grid: &ComplexMatrix, n_tx: usize, n_sc: usize) -> Result<TxFrame, TransceiverError> {
    if grid.rows() != n_tx || grid.cols() != n_sc {
        return Err(TransceiverError::Shape(format!(
            "symbol grid is {}x{}, expected {n_tx}x{n_sc}",
            grid.rows(),
            grid.cols()
        )));
    }
    Ok(TxFrame { grid: grid.clone() })
}

/// Index of the column with the largest squared norm; ties go to the lowest
/// index.
pub fn select_antenna(h: &ComplexMatrix) -> usize {
    let mut best = 0;
    let mut best_gain = f64::NEG_INFINITY;
    for j in 0..h.cols() {
        let gain = h.column_norm_sqr(j);
        if gain > best_gain {
            best_gain = gain;
            best = j;
        }
    }
    best
}

/// Runs [`select_antenna`] on every subcarrier.
pub fn select_antennas(channel: &ChannelRealization) -> SelectionMap {
    SelectionMap(channel.per_subcarrier.iter().map(select_antenna).collect())
}

/// One-hot frame: subcarrier `k` carries `symbols[k]` on antenna
/// `selection[k]` only.
pub fn md_build_tx(symbols: &[Complex64], selection: &SelectionMap, n_tx: usize) -> Result<TxFrame, TransceiverError> {
    if symbols.len() != selection.len() || symbols.is_empty() {
        return Err(TransceiverError::Shape(format!(
            "{} symbols for {} selections",
            symbols.len(),
            selection.len()
        )));
    }
    if let Some((k, &j)) = selection.0.iter().enumerate().find(|(_, &j)| j >= n_tx) {
        return Err(TransceiverError::Shape(format!(
            "subcarrier {k} selects antenna {j}, only {n_tx} available"
        )));
    }
    let mut grid = ComplexMatrix::zeros(n_tx, symbols.len());
    for (k, (&s, &j)) in symbols.iter().zip(&selection.0).enumerate() {
        grid[(j, k)] = s;
    }
    Ok(TxFrame { grid })
}

/// `y_k = H_k x_k + n_k` for every subcarrier, with `n_k` i.i.d.
/// CN(0, `noise_var`). Returns the `n_rx × n_sc` received grid.
pub fn apply_channel(
    frame: &TxFrame,
    channel: &ChannelRealization,
    noise_var: f64,
    stream: &mut RandomStream,
) -> Result<ComplexMatrix, TransceiverError> {
    if channel.n_sc() != frame.n_sc() {
        return Err(TransceiverError::Shape(format!(
            "channel has {} subcarriers, frame has {}",
            channel.n_sc(),
            frame.n_sc()
        )));
    }
    if !(noise_var >= 0.0) || !noise_var.is_finite() {
        return Err(TransceiverError::Parameter(format!("noise variance {noise_var}")));
    }
    let n_rx = channel.subcarrier(0).rows();
    let sigma = noise_var.sqrt();
    let mut out = ComplexMatrix::zeros(n_rx, frame.n_sc());
    for k in 0..frame.n_sc() {
        let h = channel.subcarrier(k);
        let y = h.mul_vec(&frame.column(k))?;
        for (r, v) in y.iter().enumerate() {
            out[(r, k)] = if noise_var > 0.0 {
                v + stream.complex_gaussian() * sigma
            } else {
                *v
            };
        }
    }
    Ok(out)
}

/// Linear MMSE estimate `(HᴴH + σ²I)⁻¹ Hᴴ y`, computed with a Hermitian
/// solve rather than an explicit inverse.
pub fn mmse_equalize(h: &ComplexMatrix, y: &[Complex64], noise_var: f64) -> Result<ComplexVector, TransceiverError> {
    if !(noise_var >= 0.0) {
        return Err(TransceiverError::Parameter(format!("noise variance {noise_var}")));
    }
    if y.len() != h.rows() {
        return Err(TransceiverError::Shape(format!(
            "received vector has {} entries, channel has {} rows",
            y.len(),
            h.rows()
        )));
    }
    let h_adj = h.adjoint();
    let mut gram = h_adj.matmul(h)?;
    for i in 0..gram.rows() {
        gram[(i, i)] += noise_var;
    }
    let rhs = h_adj.mul_vec(y)?;
    let rhs = ComplexMatrix::from_row_major(rhs.len(), 1, rhs.into_inner())?;
    let x = solve_hermitian(&gram, &rhs)?;
    Ok(ComplexVector(x.entries().to_vec()))
}

/// Scalar zero-forcing `y / h`. A zero channel yields the zero symbol.
pub fn md_equalize(h: Complex64, y: Complex64) -> Complex64 {
    if h == ZERO {
        ZERO
    } else {
        y / h
    }
}

/// Zero-pads each antenna's `n_sc` bins to `oversampling · n_sc` (occupied
/// band in the low bins) and applies the unitary inverse DFT.
pub fn synthesize_waveform(frame: &TxFrame, oversampling: usize) -> Result<TimeDomainWaveform, TransceiverError> {
    if !matches!(oversampling, 1 | 2 | 4 | 8) {
        return Err(TransceiverError::Parameter(format!(
            "oversampling factor {oversampling} not in {{1, 2, 4, 8}}"
        )));
    }
    let n = frame.n_sc() * oversampling;
    let per_antenna = (0..frame.n_tx())
        .map(|a| {
            let mut padded = vec![ZERO; n];
            padded[..frame.n_sc()].copy_from_slice(frame.antenna_row(a));
            unitary_idft(&padded)
        })
        .collect();
    Ok(TimeDomainWaveform {
        oversampling,
        per_antenna,
    })
}
