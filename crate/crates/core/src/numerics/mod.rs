//! Numerical building blocks shared by the rest of the simulator: small dense
//! complex linear algebra, unitary DFTs, Gray-coded QAM and keyed random
//! streams.

mod dft;
mod linalg;
mod qam;
mod random;

pub use dft::{unitary_dft, unitary_idft};
pub use linalg::{cholesky_lower, solve_hermitian, ComplexMatrix, ComplexVector};
pub use num_complex::Complex64 as ComplexScalar;
pub use qam::{gray_qam_demodulate, gray_qam_modulate, QamConstellation};
pub use random::{sample_complex_gaussian, RandomStream};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("matrix is not positive definite: pivot {pivot} is {value:e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("singular system: pivot {pivot} is {value:e}")]
    Singular { pivot: usize, value: f64 },
    #[error("unsupported QAM order {0} (expected 4, 16 or 64)")]
    UnsupportedOrder(usize),
}
