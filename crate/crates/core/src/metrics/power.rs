use super::{MetricsError, Scheme};
use serde::{Deserialize, Serialize};

/// Power-consumption coefficients, all in milliwatts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerModel {
    /// Static draw of one RF chain.
    pub p_rf_mw: f64,
    /// MMSE processing, per subcarrier per `n_tx³`.
    pub p_mmse_proc_mw: f64,
    /// Antenna selection processing, per subcarrier per antenna.
    pub p_sel_proc_mw: f64,
}

impl Default for PowerModel {
    /// 80 mW per RF chain; processing coefficients chosen so that the 4×4
    /// MMSE and 4×1 MD links on 64 subcarriers draw 864 mW and 404 mW.
    fn default() -> Self {
        Self {
            p_rf_mw: 80.0,
            p_mmse_proc_mw: 224.0 / 4096.0,
            p_sel_proc_mw: 4.0 / 256.0,
        }
    }
}

impl PowerModel {
    pub fn validate(&self) -> Result<(), MetricsError> {
        for (name, v) in [
            ("p_rf_mw", self.p_rf_mw),
            ("p_mmse_proc_mw", self.p_mmse_proc_mw),
            ("p_sel_proc_mw", self.p_sel_proc_mw),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(MetricsError::Config(format!("{name} = {v} must be finite and non-negative")));
            }
        }
        Ok(())
    }
}

/// Total power in mW.
///
/// MMSE: `P_RF·(n_tx + n_rx) + P_MMSE·n_sc·n_tx³`.
/// MD: `P_RF·(n_tx + 1) + P_SEL·n_sc·n_tx`; the receive side always counts
/// one RF chain, so `n_rx_rf` is ignored.
pub fn total_power(scheme: Scheme, model: &PowerModel, n_tx: usize, n_rx_rf: usize, n_sc: usize) -> f64 {
    let nt = n_tx as f64;
    let nsc = n_sc as f64;
    match scheme {
        Scheme::Mmse => model.p_rf_mw * (nt + n_rx_rf as f64) + model.p_mmse_proc_mw * nsc * nt.powi(3),
        Scheme::Md => model.p_rf_mw * (nt + 1.0) + model.p_sel_proc_mw * nsc * nt,
    }
}

/// Ideal spectral efficiency in bit/s/Hz: one stream per antenna for MMSE,
/// a single stream for MD.
pub fn ideal_se(scheme: Scheme, n_tx: usize, modulation_order: usize) -> f64 {
    let streams = match scheme {
        Scheme::Mmse => n_tx as f64,
        Scheme::Md => 1.0,
    };
    streams * (modulation_order as f64).log2()
}

/// `ideal_se · (1 − ber)`.
pub fn effective_se(scheme: Scheme, n_tx: usize, modulation_order: usize, ber: f64) -> Result<f64, MetricsError> {
    if !(0.0..=1.0).contains(&ber) {
        return Err(MetricsError::Domain(format!("ber {ber} outside [0, 1]")));
    }
    Ok(ideal_se(scheme, n_tx, modulation_order) * (1.0 - ber))
}

/// Bits per joule: `se_eff · bandwidth / (p_total_mw / 1000)`.
pub fn energy_efficiency(se_eff: f64, bandwidth_hz: f64, p_total_mw: f64) -> Result<f64, MetricsError> {
    if !(p_total_mw > 0.0) {
        return Err(MetricsError::Domain(format!("total power {p_total_mw} mW must be positive")));
    }
    Ok(se_eff * bandwidth_hz / (p_total_mw / 1000.0))
}

/// Energy-efficiency figures for one (scheme, SNR) point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EeRecord {
    pub scheme: Scheme,
    pub snr_db: f64,
    pub ber: f64,
    #[serde(rename = "se_ideal_bps_hz")]
    pub se_ideal: f64,
    #[serde(rename = "se_eff_bps_hz")]
    pub se_eff: f64,
    pub p_total_mw: f64,
    pub bandwidth_hz: f64,
    #[serde(rename = "ee_bits_per_joule")]
    pub ee_bits_per_joule: f64,
}

impl EeRecord {
    pub fn new(
        scheme: Scheme,
        snr_db: f64,
        ber: f64,
        se_ideal: f64,
        p_total_mw: f64,
        bandwidth_hz: f64,
    ) -> Result<Self, MetricsError> {
        if !(0.0..=1.0).contains(&ber) {
            return Err(MetricsError::Domain(format!("ber {ber} outside [0, 1]")));
        }
        let se_eff = se_ideal * (1.0 - ber);
        Ok(Self {
            scheme,
            snr_db,
            ber,
            se_ideal,
            se_eff,
            p_total_mw,
            bandwidth_hz,
            ee_bits_per_joule: energy_efficiency(se_eff, bandwidth_hz, p_total_mw)?,
        })
    }
}
