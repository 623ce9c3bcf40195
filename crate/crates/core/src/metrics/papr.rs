use super::{LinkConfig, MetricsError, Scheme};
use crate::channel::KroneckerChannel;
use crate::numerics::{ComplexMatrix, QamConstellation, RandomStream};
use crate::transceiver::{md_build_tx, mmse_build_tx, select_antennas, synthesize_waveform, TxFrame};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Papr {
    pub linear: f64,
    pub db: f64,
}

/// Peak-to-average power ratio of one sample sequence.
pub fn compute_papr(samples: &[Complex64]) -> Result<Papr, MetricsError> {
    let (peak, total) = samples
        .iter()
        .map(|v| v.norm_sqr())
        .fold((0.0f64, 0.0f64), |(p, t), e| (p.max(e), t + e));
    if samples.is_empty() || total == 0.0 {
        return Err(MetricsError::UndefinedPapr);
    }
    let linear = peak / (total / samples.len() as f64);
    Ok(Papr {
        linear,
        db: 10.0 * linear.log10(),
    })
}

/// How per-antenna PAPR values of one OFDM symbol become CCDF samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PaprReduce {
    /// One sample per antenna carrying any energy.
    #[default]
    PerAntenna,
    /// One sample per symbol: the worst active antenna.
    MaxOverAntennas,
}

fn build_frame(
    scheme: Scheme,
    link: &LinkConfig,
    channel: &KroneckerChannel,
    qam: &QamConstellation,
    stream: &mut RandomStream,
) -> Result<TxFrame, MetricsError> {
    let bits = stream.bits(link.bits_per_ofdm_symbol(scheme));
    let symbols = qam.modulate(&bits)?;
    Ok(match scheme {
        Scheme::Mmse => {
            let grid = ComplexMatrix::from_fn(link.n_tx, link.n_sc, |j, k| symbols[k * link.n_tx + j]);
            mmse_build_tx(&grid, link.n_tx, link.n_sc)?
        }
        Scheme::Md => {
            let h = channel.realize(stream);
            md_build_tx(&symbols, &select_antennas(&h), link.n_tx)?
        }
    })
}

/// PAPR samples (dB) from `n_symbols` random OFDM symbols, oversampled by
/// `link.papr_oversampling`. Symbol `i` uses `stream.fork(i)`; the output is
/// in symbol order, antennas ascending within a symbol.
pub fn collect_papr_samples(
    scheme: Scheme,
    link: &LinkConfig,
    n_symbols: usize,
    reduce: PaprReduce,
    stream: &RandomStream,
) -> Result<Vec<f64>, MetricsError> {
    link.validate(scheme)?;
    let channel = KroneckerChannel::new(link.channel_config())?;
    let qam = QamConstellation::new(link.modulation_order)?;
    let per_symbol: Vec<Vec<f64>> = (0..n_symbols)
        .into_par_iter()
        .map(|i| {
            let mut s = stream.fork(i as u64);
            let frame = build_frame(scheme, link, &channel, &qam, &mut s)?;
            let wave = synthesize_waveform(&frame, link.papr_oversampling)?;
            let values: Vec<f64> = wave
                .per_antenna
                .iter()
                .filter(|x| x.iter().any(|v| v.norm_sqr() > 0.0))
                .map(|x| compute_papr(x).map(|p| p.db))
                .collect::<Result<_, _>>()?;
            Ok(match reduce {
                PaprReduce::PerAntenna => values,
                PaprReduce::MaxOverAntennas => values.into_iter().reduce(f64::max).into_iter().collect(),
            })
        })
        .collect::<Result<_, MetricsError>>()?;
    Ok(per_symbol.into_iter().flatten().collect())
}

/// Empirical `P(PAPR > threshold)` at each threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct CcdfCurve {
    pub thresholds_db: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl CcdfCurve {
    /// Lowest threshold whose probability is at or below `p`, linearly
    /// interpolated between grid points.
    pub fn crossing_db(&self, p: f64) -> Option<f64> {
        let idx = self.probabilities.iter().position(|&q| q <= p)?;
        if idx == 0 {
            return Some(self.thresholds_db[0]);
        }
        let (t0, t1) = (self.thresholds_db[idx - 1], self.thresholds_db[idx]);
        let (p0, p1) = (self.probabilities[idx - 1], self.probabilities[idx]);
        Some(t0 + (t1 - t0) * (p0 - p) / (p0 - p1))
    }
}

/// Fraction of `samples_db` strictly above each threshold.
pub fn estimate_ccdf(samples_db: &[f64], thresholds_db: &[f64]) -> Result<CcdfCurve, MetricsError> {
    if samples_db.is_empty() {
        return Err(MetricsError::Domain("no PAPR samples".into()));
    }
    if samples_db.iter().chain(thresholds_db).any(|v| v.is_nan()) {
        return Err(MetricsError::Domain("NaN in PAPR samples or thresholds".into()));
    }
    if thresholds_db.windows(2).any(|w| w[0] >= w[1]) {
        return Err(MetricsError::Domain("thresholds must be strictly ascending".into()));
    }
    let mut sorted = samples_db.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let probabilities = thresholds_db
        .iter()
        .map(|&t| (sorted.len() - sorted.partition_point(|&v| v <= t)) as f64 / n)
        .collect();
    Ok(CcdfCurve {
        thresholds_db: thresholds_db.to_vec(),
        probabilities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn papr_examples() {
        let flat: Vec<Complex64> = (0..16).map(|i| Complex64::from_polar(2.0, i as f64)).collect();
        assert!((compute_papr(&flat).unwrap().linear - 1.0).abs() < 1e-12);
        let p = compute_papr(&[c(0.0), c(2.0), c(0.0), c(0.0)]).unwrap();
        assert_eq!(p.linear, 4.0);
        assert!((p.db - 6.0206).abs() < 1e-4);
        assert_eq!(compute_papr(&[c(0.0); 4]), Err(MetricsError::UndefinedPapr));
        assert_eq!(compute_papr(&[]), Err(MetricsError::UndefinedPapr));
    }

    #[test]
    fn ccdf_examples() {
        let curve = estimate_ccdf(&[1.0, 2.0, 3.0], &[0.0, 2.0, 5.0]).unwrap();
        assert_eq!(curve.probabilities, vec![1.0, 1.0 / 3.0, 0.0]);
        assert!(estimate_ccdf(&[], &[1.0]).is_err());
        assert!(estimate_ccdf(&[1.0], &[2.0, 1.0]).is_err());
    }

    #[test]
    fn crossing_interpolates() {
        let curve = CcdfCurve {
            thresholds_db: vec![0.0, 1.0, 2.0],
            probabilities: vec![1.0, 0.5, 0.0],
        };
        assert_eq!(curve.crossing_db(0.25), Some(1.5));
        assert_eq!(curve.crossing_db(1.0), Some(0.0));
    }

    #[test]
    fn sample_counts() {
        let s = RandomStream::new(2, &[]);
        let md1 = LinkConfig {
            n_tx: 1,
            ..LinkConfig::reference(Scheme::Md)
        };
        assert_eq!(collect_papr_samples(Scheme::Md, &md1, 10, PaprReduce::PerAntenna, &s).unwrap().len(), 10);
        let mmse = LinkConfig::reference(Scheme::Mmse);
        assert_eq!(collect_papr_samples(Scheme::Mmse, &mmse, 10, PaprReduce::PerAntenna, &s).unwrap().len(), 40);
        assert_eq!(
            collect_papr_samples(Scheme::Mmse, &mmse, 10, PaprReduce::MaxOverAntennas, &s).unwrap().len(),
            10
        );
    }
}
