//! Unitary discrete Fourier transforms.
//!
//! Both directions are scaled by `1/√N`, so the pair is energy preserving.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use std::cell::RefCell;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn transform(input: &[Complex64], direction: FftDirection) -> Vec<Complex64> {
    let n = input.len();
    if n == 0 {
        return Vec::new();
    }
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction));
    let mut buf = input.to_vec();
    fft.process(&mut buf);
    let scale = 1.0 / (n as f64).sqrt();
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

/// `x[n] = (1/√N) Σ_k X[k] e^{+j2πnk/N}`.
pub fn unitary_idft(spectrum: &[Complex64]) -> Vec<Complex64> {
    transform(spectrum, FftDirection::Inverse)
}

/// `X[k] = (1/√N) Σ_n x[n] e^{−j2πnk/N}`.
pub fn unitary_dft(samples: &[Complex64]) -> Vec<Complex64> {
    transform(samples, FftDirection::Forward)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn impulse_maps_to_constant() {
        let mut x = vec![Complex64::new(0.0, 0.0); 8];
        x[0] = Complex64::new(1.0, 0.0);
        let y = unitary_idft(&x);
        for v in &y {
            assert!((v - Complex64::new(1.0 / 8f64.sqrt(), 0.0)).norm() < 1e-15);
        }
        let back = unitary_dft(&y);
        assert!((back[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(back[1..].iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn empty_input() {
        assert!(unitary_dft(&[]).is_empty());
    }
}
