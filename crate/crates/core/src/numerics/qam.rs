//! Gray-labelled square M-QAM with unit average symbol energy.
//!
//! Labels are split per axis: the first `log2(M)/2` bits (MSB first) choose the
//! in-phase level and the remaining bits choose the quadrature level. On each
//! axis the Gray code of the level index runs from the most positive amplitude
//! to the most negative one, so for QPSK the label `00` sits at `(1+j)/√2`.
//!
//! Constellation index and label value coincide: point `i` carries the bits of
//! `i` written MSB first.

use super::NumericsError;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct QamConstellation {
    order: usize,
    bits_per_symbol: usize,
    points: Vec<Complex64>,
}

fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

impl QamConstellation {
    /// Builds the constellation for `order ∈ {4, 16, 64}`.
    pub fn new(order: usize) -> Result<Self, NumericsError> {
        if !matches!(order, 4 | 16 | 64) {
            return Err(NumericsError::UnsupportedOrder(order));
        }
        let bits_per_symbol = order.trailing_zeros() as usize;
        let bits_per_axis = bits_per_symbol / 2;
        let levels = 1usize << bits_per_axis;
        // Average energy of the unnormalized grid {±1, ±3, …} is 2(M−1)/3.
        let scale = (3.0 / (2.0 * (order as f64 - 1.0))).sqrt();

        // amplitude_of_label[g] = amplitude whose Gray label is g.
        let mut amplitude_of_label = vec![0.0; levels];
        for idx in 0..levels {
            amplitude_of_label[gray(idx)] = (levels as f64 - 1.0 - 2.0 * idx as f64) * scale;
        }
        let points = (0..order)
            .map(|label| {
                let i_label = label >> bits_per_axis;
                let q_label = label & (levels - 1);
                Complex64::new(amplitude_of_label[i_label], amplitude_of_label[q_label])
            })
            .collect();
        Ok(Self {
            order,
            bits_per_symbol,
            points,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    /// Points indexed by label value.
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Bit label of point `index`, MSB first.
    pub fn label_bits(&self, index: usize) -> Vec<u8> {
        (0..self.bits_per_symbol)
            .rev()
            .map(|b| ((index >> b) & 1) as u8)
            .collect()
    }

    /// Maps each `log2(M)`-bit group to its constellation point.
    pub fn modulate(&self, bits: &[u8]) -> Result<Vec<Complex64>, NumericsError> {
        if !bits.len().is_multiple_of(self.bits_per_symbol) {
            return Err(NumericsError::Shape(format!(
                "{} bits is not a multiple of {} bits per symbol",
                bits.len(),
                self.bits_per_symbol
            )));
        }
        Ok(bits
            .chunks_exact(self.bits_per_symbol)
            .map(|group| {
                let label = group.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
                self.points[label]
            })
            .collect())
    }

    /// Index of the nearest point; ties go to the lowest index.
    pub fn nearest(&self, symbol: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = (symbol - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Hard-decision demodulation to bits.
    pub fn demodulate(&self, symbols: &[Complex64]) -> Vec<u8> {
        let mut out = Vec::with_capacity(symbols.len() * self.bits_per_symbol);
        for &s in symbols {
            let idx = self.nearest(s);
            for b in (0..self.bits_per_symbol).rev() {
                out.push(((idx >> b) & 1) as u8);
            }
        }
        out
    }
}

/// Modulates `bits` with `constellation`.
pub fn gray_qam_modulate(bits: &[u8], constellation: &QamConstellation) -> Result<Vec<Complex64>, NumericsError> {
    constellation.modulate(bits)
}

/// Hard-decision demodulation of `symbols`.
pub fn gray_qam_demodulate(symbols: &[Complex64], constellation: &QamConstellation) -> Vec<u8> {
    constellation.demodulate(symbols)
}
