//! Closed-form and quadrature BER baselines for Gray-coded QPSK over flat
//! Rayleigh fading. Per-bit SNR is `γ_b = (E_s / noise_var) / 2`.

use libm::erfc;

/// Gaussian tail probability `Q(x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

fn per_bit_snr(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0) / 2.0
}

/// Average QPSK bit error probability over Rayleigh fading,
/// `½(1 − √(γ_b / (1 + γ_b)))`.
pub fn analytic_rayleigh_qpsk_ber(snr_db: f64) -> f64 {
    let g = per_bit_snr(snr_db);
    if g.is_infinite() {
        return 0.0;
    }
    // Same expression rearranged to avoid cancellation at high SNR.
    let root = (g / (1.0 + g)).sqrt();
    0.5 / ((1.0 + g) * (1.0 + root))
}

const SIMPSON_INTERVALS: usize = 20_000;

/// QPSK bit error probability with `branches`-fold selection combining of
/// i.i.d. Rayleigh branches, by numerical integration of `Q(√(2γ))` against
/// the selected-branch SNR density
/// `f(γ) = (L/γ̄) e^{−γ/γ̄} (1 − e^{−γ/γ̄})^{L−1}`.
pub fn analytic_selection_ber(snr_db: f64, branches: usize) -> f64 {
    assert!(branches >= 1, "selection needs at least one branch");
    let mean = per_bit_snr(snr_db);
    if mean == 0.0 {
        return 0.5;
    }
    if mean.is_infinite() {
        return 0.0;
    }
    let l = branches as f64;
    // With γ = t², Q(√(2γ)) = erfc(t)/2 and dγ = 2t dt; the integrand is
    // smooth at the origin.
    let integrand = |t: f64| {
        let e = (-t * t / mean).exp();
        0.5 * erfc(t) * (2.0 * t * l / mean) * e * (1.0 - e).powi(branches as i32 - 1)
    };
    // erfc(6.5) ≈ 4e-20 and e^{-45} ≈ 3e-20 bound the neglected tail.
    let upper = (45.0 * mean).sqrt().min(6.5);
    let h = upper / SIMPSON_INTERVALS as f64;
    let mut sum = integrand(0.0) + integrand(upper);
    for i in 1..SIMPSON_INTERVALS {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * integrand(i as f64 * h);
    }
    sum * h / 3.0
}

/// Binomial standard deviation `√(p(1 − p)/n)`.
pub fn binomial_sigma(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limits() {
        assert_eq!(analytic_rayleigh_qpsk_ber(f64::INFINITY), 0.0);
        assert_eq!(analytic_rayleigh_qpsk_ber(f64::NEG_INFINITY), 0.5);
        assert_eq!(analytic_selection_ber(f64::NEG_INFINITY, 3), 0.5);
        assert_eq!(analytic_selection_ber(f64::INFINITY, 3), 0.0);
        assert!(analytic_rayleigh_qpsk_ber(200.0) < 1e-19);
    }

    #[test]
    fn q_function_values() {
        assert!((q_function(0.0) - 0.5).abs() < 1e-15);
        let q1 = q_function(1.0);
        assert!((q1 - 0.158_655_253_931_457_05).abs() < 1e-12, "{q1}");
    }

    #[test]
    fn single_branch_matches_closed_form() {
        for snr in [-5.0, 0.0, 5.0, 10.0, 20.0, 30.0] {
            let a = analytic_rayleigh_qpsk_ber(snr);
            let b = analytic_selection_ber(snr, 1);
            assert!((a - b).abs() < 1e-6 * a.max(1e-3), "snr {snr}: {a} vs {b}");
        }
    }

    #[test]
    fn diversity_ordering() {
        for snr in [1.0, 6.0, 12.0] {
            let b1 = analytic_selection_ber(snr, 1);
            let b2 = analytic_selection_ber(snr, 2);
            let b4 = analytic_selection_ber(snr, 4);
            assert!(b4 < b2 && b2 < b1);
        }
    }
}
