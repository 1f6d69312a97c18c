//! Dense complex linear algebra: Hermitian eigendecomposition, SVD,
//! positivity tests, Kronecker products and partial traces.

mod eig;
mod matrix;
mod ops;
mod svd;

pub use eig::{hermitian_eig, HermitianEig, MAX_SWEEPS, OFF_DIAGONAL_RTOL};
pub use matrix::{ComplexMatrix, ONE, ZERO};
pub use ops::{
    is_psd, kron, kron_capped, partial_trace, Factor, PsdVerdict, DEFAULT_KRON_CAP, DEFAULT_PSD_TOL,
};
pub use svd::{svd, SingularDecomposition};

pub(crate) use matrix::{dot, vec_norm};
