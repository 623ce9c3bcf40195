use super::{LinkConfig, MetricsError, Scheme};
use crate::channel::KroneckerChannel;
use crate::numerics::{ComplexMatrix, NumericsError, QamConstellation, RandomStream};
use crate::transceiver::{
    apply_channel, md_build_tx, md_equalize, mmse_build_tx, mmse_equalize, select_antennas, TransceiverError,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Bit error count for one (scheme, SNR) point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerPoint {
    pub scheme: Scheme,
    pub snr_db: f64,
    pub bits_sent: u64,
    pub bit_errors: u64,
    pub ber: f64,
}

impl BerPoint {
    pub fn new(scheme: Scheme, snr_db: f64, bits_sent: u64, bit_errors: u64) -> Self {
        Self {
            scheme,
            snr_db,
            bits_sent,
            bit_errors,
            ber: bit_errors as f64 / bits_sent as f64,
        }
    }
}

/// `E_s / 10^(snr_db / 10)`. An infinite SNR gives zero noise.
pub fn noise_var_from_snr(snr_db: f64, symbol_energy: f64) -> f64 {
    symbol_energy / 10f64.powf(snr_db / 10.0)
}

// Redraws allowed when a noiseless MMSE channel comes out rank deficient.
const MAX_CHANNEL_REDRAWS: usize = 64;

struct SymbolSim<'a> {
    scheme: Scheme,
    link: &'a LinkConfig,
    channel: KroneckerChannel,
    qam: QamConstellation,
    noise_var: f64,
}

impl SymbolSim<'_> {
    /// Simulates one OFDM symbol and returns `(bits, bit_errors)`.
    fn run(&self, stream: &mut RandomStream) -> Result<(u64, u64), MetricsError> {
        let bits = stream.bits(self.link.bits_per_ofdm_symbol(self.scheme));
        let symbols = self.qam.modulate(&bits)?;
        let estimates = match self.scheme {
            Scheme::Mmse => self.mmse(&symbols, stream)?,
            Scheme::Md => self.md(&symbols, stream)?,
        };
        let decided = self.qam.demodulate(&estimates);
        let errors = bits.iter().zip(&decided).filter(|(a, b)| a != b).count();
        Ok((bits.len() as u64, errors as u64))
    }

    fn mmse(&self, symbols: &[Complex64], stream: &mut RandomStream) -> Result<Vec<Complex64>, MetricsError> {
        let LinkConfig { n_tx, n_sc, .. } = *self.link;
        let amp = if self.link.normalize_total_tx_power {
            1.0 / (n_tx as f64).sqrt()
        } else {
            1.0
        };
        // Serial-to-parallel: symbol k·n_tx + j goes to antenna j on subcarrier k.
        let grid = ComplexMatrix::from_fn(n_tx, n_sc, |j, k| symbols[k * n_tx + j] * amp);
        let frame = mmse_build_tx(&grid, n_tx, n_sc)?;
        let mut redraws = 0;
        'draw: loop {
            let h = self.channel.realize(stream);
            let y = apply_channel(&frame, &h, self.noise_var, stream)?;
            let mut out = Vec::with_capacity(symbols.len());
            for k in 0..n_sc {
                let h_eff = h.subcarrier(k).scale(Complex64::new(amp, 0.0));
                let yk: Vec<Complex64> = (0..y.rows()).map(|r| y[(r, k)]).collect();
                match mmse_equalize(&h_eff, &yk, self.noise_var) {
                    Ok(x) => out.extend_from_slice(&x),
                    Err(TransceiverError::Numerics(NumericsError::Singular { .. }))
                        if self.noise_var == 0.0 && redraws < MAX_CHANNEL_REDRAWS =>
                    {
                        redraws += 1;
                        continue 'draw;
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            return Ok(out);
        }
    }

    fn md(&self, symbols: &[Complex64], stream: &mut RandomStream) -> Result<Vec<Complex64>, MetricsError> {
        let h = self.channel.realize(stream);
        let selection = select_antennas(&h);
        let frame = md_build_tx(symbols, &selection, self.link.n_tx)?;
        let y = apply_channel(&frame, &h, self.noise_var, stream)?;
        Ok((0..self.link.n_sc)
            .map(|k| md_equalize(h.subcarrier(k)[(0, selection.antenna(k))], y[(0, k)]))
            .collect())
    }
}

fn prepare<'a>(scheme: Scheme, link: &'a LinkConfig, snr_db: f64, n_symbols: usize) -> Result<SymbolSim<'a>, MetricsError> {
    link.validate(scheme)?;
    if n_symbols == 0 {
        return Err(MetricsError::Config("n_ofdm_symbols must be at least 1".into()));
    }
    if snr_db.is_nan() {
        return Err(MetricsError::Domain("SNR is NaN".into()));
    }
    Ok(SymbolSim {
        scheme,
        link,
        channel: KroneckerChannel::new(link.channel_config())?,
        qam: QamConstellation::new(link.modulation_order)?,
        noise_var: noise_var_from_snr(snr_db, 1.0),
    })
}

fn run_range(sim: &SymbolSim<'_>, stream: &RandomStream, range: std::ops::Range<usize>) -> Result<(u64, u64), MetricsError> {
    range
        .into_par_iter()
        .map(|i| sim.run(&mut stream.fork(i as u64)))
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))
}

/// Runs `n_symbols` OFDM symbols through the full chain at `snr_db`, with a
/// fresh channel per symbol. Symbol `i` draws from `stream.fork(i)`, so the
/// result does not depend on how the work is spread over threads.
///
/// `snr_db = +∞` runs the chain noiselessly.
pub fn run_ber_point(
    scheme: Scheme,
    link: &LinkConfig,
    snr_db: f64,
    n_symbols: usize,
    stream: &RandomStream,
) -> Result<BerPoint, MetricsError> {
    let sim = prepare(scheme, link, snr_db, n_symbols)?;
    let (bits, errors) = run_range(&sim, stream, 0..n_symbols)?;
    Ok(BerPoint::new(scheme, snr_db, bits, errors))
}

/// Symbols per block when early stopping is enabled.
const EARLY_STOP_BLOCK: usize = 256;

/// Like [`run_ber_point`], but stops at the first block boundary where at
/// least `min_errors` bit errors have been seen. `n_symbols` is the cap.
pub fn run_ber_point_until(
    scheme: Scheme,
    link: &LinkConfig,
    snr_db: f64,
    n_symbols: usize,
    min_errors: u64,
    stream: &RandomStream,
) -> Result<BerPoint, MetricsError> {
    let sim = prepare(scheme, link, snr_db, n_symbols)?;
    let (mut bits, mut errors) = (0, 0);
    let mut start = 0;
    while start < n_symbols && errors < min_errors {
        let end = (start + EARLY_STOP_BLOCK).min(n_symbols);
        let (b, e) = run_range(&sim, stream, start..end)?;
        bits += b;
        errors += e;
        start = end;
    }
    Ok(BerPoint::new(scheme, snr_db, bits, errors))
}
