//! Kronecker-correlated Rayleigh MIMO channel, drawn independently for each
//! subcarrier: `H_k = L_rx · G_k · L_txᴴ` with `G_k` i.i.d. CN(0, 1) and
//! `L_tx`, `L_rx` the Cholesky factors of uniform correlation matrices.
//!
//! Subcarriers are independent; there is no tapped-delay-line structure
//! coupling neighbouring bins.

use crate::numerics::{cholesky_lower, ComplexMatrix, NumericsError, RandomStream};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("invalid channel configuration: {0}")]
    Config(String),
    #[error("correlation coefficient {0} outside [0, 1]")]
    Domain(f64),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    pub n_tx: usize,
    pub n_rx: usize,
    pub n_sc: usize,
    pub rho_tx: f64,
    pub rho_rx: f64,
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.n_tx == 0 || self.n_rx == 0 {
            return Err(ChannelError::Config("antenna counts must be at least 1".into()));
        }
        if !self.n_sc.is_power_of_two() {
            return Err(ChannelError::Config(format!(
                "n_sc = {} is not a power of two",
                self.n_sc
            )));
        }
        for (name, rho) in [("rho_tx", self.rho_tx), ("rho_rx", self.rho_rx)] {
            if !(0.0..1.0).contains(&rho) {
                return Err(ChannelError::Config(format!("{name} = {rho} must lie in [0, 1)")));
            }
        }
        Ok(())
    }
}

/// One channel draw: an `n_rx × n_tx` matrix per subcarrier.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub per_subcarrier: Vec<ComplexMatrix>,
}

impl ChannelRealization {
    pub fn n_sc(&self) -> usize {
        self.per_subcarrier.len()
    }

    pub fn subcarrier(&self, k: usize) -> &ComplexMatrix {
        &self.per_subcarrier[k]
    }
}

/// `R = (1 − ρ)·I + ρ·J`.
pub fn uniform_correlation(n: usize, rho: f64) -> Result<ComplexMatrix, ChannelError> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(ChannelError::Domain(rho));
    }
    if n == 0 {
        return Err(ChannelError::Config("correlation size must be at least 1".into()));
    }
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        Complex64::new(if r == c { 1.0 } else { rho }, 0.0)
    }))
}

/// Channel generator with precomputed correlation factors.
#[derive(Debug, Clone)]
pub struct KroneckerChannel {
    config: ChannelConfig,
    // None when the factor is the identity.
    l_rx: Option<ComplexMatrix>,
    l_tx_h: Option<ComplexMatrix>,
}

impl KroneckerChannel {
    pub fn new(config: ChannelConfig) -> Result<Self, ChannelError> {
        config.validate()?;
        let l_rx = (config.rho_rx != 0.0)
            .then(|| cholesky_lower(&uniform_correlation(config.n_rx, config.rho_rx)?).map_err(ChannelError::from))
            .transpose()?;
        let l_tx_h = (config.rho_tx != 0.0)
            .then(|| {
                cholesky_lower(&uniform_correlation(config.n_tx, config.rho_tx)?)
                    .map(|l| l.adjoint())
                    .map_err(ChannelError::from)
            })
            .transpose()?;
        Ok(Self { config, l_rx, l_tx_h })
    }

    pub fn config(&self) -> &ChannelConfig {
        &self.config
    }

    /// Draws one realization, consuming `n_sc · n_rx · n_tx` Gaussians.
    pub fn realize(&self, stream: &mut RandomStream) -> ChannelRealization {
        let ChannelConfig { n_tx, n_rx, n_sc, .. } = self.config;
        let per_subcarrier = (0..n_sc)
            .map(|_| {
                let mut h = ComplexMatrix::from_fn(n_rx, n_tx, |_, _| stream.complex_gaussian());
                if let Some(l_rx) = &self.l_rx {
                    h = l_rx.matmul(&h).expect("shapes fixed by config");
                }
                if let Some(l_tx_h) = &self.l_tx_h {
                    h = h.matmul(l_tx_h).expect("shapes fixed by config");
                }
                h
            })
            .collect();
        ChannelRealization { per_subcarrier }
    }
}

/// Convenience wrapper: validates `cfg`, factors both correlations and draws
/// one realization.
pub fn generate_channel(cfg: &ChannelConfig, stream: &mut RandomStream) -> Result<ChannelRealization, ChannelError> {
    Ok(KroneckerChannel::new(*cfg)?.realize(stream))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n_tx: usize, n_rx: usize, rho_tx: f64, rho_rx: f64) -> ChannelConfig {
        ChannelConfig {
            n_tx,
            n_rx,
            n_sc: 8,
            rho_tx,
            rho_rx,
        }
    }

    #[test]
    fn uniform_correlation_values() {
        assert_eq!(uniform_correlation(4, 0.0).unwrap(), ComplexMatrix::identity(4));
        let r = uniform_correlation(3, 0.5).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(r[(i, j)].re, if i == j { 1.0 } else { 0.5 });
                assert_eq!(r[(i, j)].im, 0.0);
            }
        }
        let j = uniform_correlation(2, 1.0).unwrap();
        assert!(j.entries().iter().all(|v| *v == Complex64::new(1.0, 0.0)));
        assert!(cholesky_lower(&j).is_err());
        assert_eq!(uniform_correlation(2, 1.5), Err(ChannelError::Domain(1.5)));
        assert_eq!(uniform_correlation(2, -0.1), Err(ChannelError::Domain(-0.1)));
    }

    #[test]
    fn uncorrelated_channel_is_raw_draw() {
        let c = cfg(3, 2, 0.0, 0.0);
        let h = generate_channel(&c, &mut RandomStream::new(5, &[1])).unwrap();
        let mut s = RandomStream::new(5, &[1]);
        for k in 0..c.n_sc {
            for r in 0..2 {
                for t in 0..3 {
                    assert_eq!(h.subcarrier(k)[(r, t)], s.complex_gaussian());
                }
            }
        }
    }

    #[test]
    fn shape_and_determinism() {
        let c = cfg(4, 2, 0.3, 0.6);
        let a = generate_channel(&c, &mut RandomStream::new(11, &[])).unwrap();
        let b = generate_channel(&c, &mut RandomStream::new(11, &[])).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n_sc(), 8);
        assert!(a.per_subcarrier.iter().all(|h| h.rows() == 2 && h.cols() == 4));
        assert!(a
            .per_subcarrier
            .iter()
            .all(|h| h.entries().iter().all(|v| v.re.is_finite() && v.im.is_finite())));
    }

    #[test]
    fn rejects_invalid_configs() {
        assert!(KroneckerChannel::new(cfg(4, 1, 1.0, 0.0)).is_err());
        assert!(KroneckerChannel::new(cfg(4, 1, 0.0, 1.0)).is_err());
        assert!(KroneckerChannel::new(cfg(0, 1, 0.0, 0.0)).is_err());
        let mut c = cfg(2, 2, 0.0, 0.0);
        c.n_sc = 48;
        assert!(KroneckerChannel::new(c).is_err());
    }
}
