//! Experiment orchestration. All sweeps run inside a rayon pool sized by the
//! caller; every random draw is keyed by its position in the experiment, so
//! outputs are identical for any worker count.

use super::config::SimConfig;
use super::HarnessError;
use crate::metrics::{
    collect_papr_samples, estimate_ccdf, ideal_se, run_ber_point, run_ber_point_until, total_power, BerPoint,
    CcdfCurve, EeRecord, PaprReduce, Scheme,
};
use crate::numerics::RandomStream;

const BER_TAG: u64 = 1;
const PAPR_TAG: u64 = 2;

/// Runs `f` inside a pool of `workers` threads (`None`: rayon's default).
pub fn with_workers<T: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> Result<T, HarnessError> + Send,
) -> Result<T, HarnessError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| HarnessError::Runtime(format!("cannot start worker pool: {e}")))?;
    pool.install(f)
}

/// One [`BerPoint`] per (scheme, SNR), schemes in config order.
pub fn run_ber_sweep(cfg: &SimConfig, workers: Option<usize>) -> Result<Vec<BerPoint>, HarnessError> {
    cfg.validate()?;
    with_workers(workers, || {
        let mut out = Vec::with_capacity(cfg.schemes.len() * cfg.snr_grid_db.len());
        for &scheme in &cfg.schemes {
            let link = cfg.link(scheme);
            for (i, &snr) in cfg.snr_grid_db.iter().enumerate() {
                let stream = RandomStream::new(cfg.seed, &[BER_TAG, scheme.stream_label(), i as u64]);
                let point = match cfg.early_stop_errors {
                    Some(min_errors) => {
                        run_ber_point_until(scheme, &link, snr, cfg.n_symbols_per_point, min_errors, &stream)?
                    }
                    None => run_ber_point(scheme, &link, snr, cfg.n_symbols_per_point, &stream)?,
                };
                out.push(point);
            }
        }
        Ok(out)
    })
}

/// Energy-efficiency records derived from simulated BER points.
pub fn ee_from_ber(cfg: &SimConfig, points: &[BerPoint]) -> Result<Vec<EeRecord>, HarnessError> {
    points
        .iter()
        .map(|p| {
            let link = cfg.link(p.scheme);
            let p_total = total_power(p.scheme, &cfg.power_model, link.n_tx, link.n_rx, link.n_sc);
            let se = ideal_se(p.scheme, link.n_tx, link.modulation_order);
            Ok(EeRecord::new(p.scheme, p.snr_db, p.ber, se, p_total, cfg.bandwidth_hz)?)
        })
        .collect()
}

/// BER sweep followed by the energy-efficiency model.
pub fn run_ee_sweep(cfg: &SimConfig, workers: Option<usize>) -> Result<Vec<EeRecord>, HarnessError> {
    let points = run_ber_sweep(cfg, workers)?;
    ee_from_ber(cfg, &points)
}

/// Upper bound on PAPR samples one OFDM symbol can yield.
fn max_samples_per_symbol(cfg: &SimConfig, scheme: Scheme) -> usize {
    match (cfg.papr_reduce, scheme) {
        (PaprReduce::MaxOverAntennas, _) => 1,
        (PaprReduce::PerAntenna, Scheme::Mmse) => cfg.n_tx,
        (PaprReduce::PerAntenna, Scheme::Md) => cfg.n_tx.min(cfg.n_sc),
    }
}

/// Exactly `cfg.papr_n_symbols` PAPR samples (dB) for `scheme`.
///
/// Symbols are generated in batches until enough samples exist; the tail of
/// the last batch is dropped.
pub fn papr_samples(cfg: &SimConfig, scheme: Scheme) -> Result<Vec<f64>, HarnessError> {
    let link = cfg.link(scheme);
    let base = RandomStream::new(cfg.seed, &[PAPR_TAG, scheme.stream_label()]);
    let target = cfg.papr_n_symbols;
    let per_symbol = max_samples_per_symbol(cfg, scheme);
    let mut samples = Vec::with_capacity(target + per_symbol);
    let mut batch = 0u64;
    while samples.len() < target {
        let n = (target - samples.len()).div_ceil(per_symbol);
        let stream = base.fork(batch);
        samples.extend(collect_papr_samples(scheme, &link, n, cfg.papr_reduce, &stream)?);
        batch += 1;
    }
    samples.truncate(target);
    Ok(samples)
}

/// CCDF per scheme on the configured threshold grid.
pub fn run_papr(cfg: &SimConfig, workers: Option<usize>) -> Result<Vec<(Scheme, CcdfCurve)>, HarnessError> {
    cfg.validate()?;
    with_workers(workers, || {
        cfg.schemes
            .iter()
            .map(|&scheme| {
                let samples = papr_samples(cfg, scheme)?;
                Ok((scheme, estimate_ccdf(&samples, &cfg.papr_thresholds_db)?))
            })
            .collect()
    })
}
