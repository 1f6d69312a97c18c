use serde::Serialize;

use super::eig::jacobi;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Default relative tolerance for positivity verdicts.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

/// Largest row or column count `kron` will produce by default.
pub const DEFAULT_KRON_CAP: usize = 4096;

/// Outcome of a positive-semidefiniteness test, with its spectral witness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsdVerdict {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub hermitian_deviation: f64,
}

/// Tests `A ≥ 0`: Hermitian within `tol` and `λ_min ≥ −tol·max(1, λ_max)`.
///
/// The minimum eigenvalue of the Hermitian part is always reported, also
/// when the Hermiticity check fails.
pub fn is_psd(a: &ComplexMatrix, tol: f64) -> Result<PsdVerdict> {
    a.ensure_square()?;
    let hermitian_deviation = a.hermitian_deviation();
    let eig = jacobi(a.hermitian_part())?;
    let min_eigenvalue = eig.min_eigenvalue();
    let max_eigenvalue = eig.max_eigenvalue();
    let is_psd = hermitian_deviation <= tol && min_eigenvalue >= -tol * max_eigenvalue.max(1.0);
    Ok(PsdVerdict {
        is_psd,
        min_eigenvalue,
        max_eigenvalue,
        hermitian_deviation,
    })
}

/// Kronecker product with the default dimension cap.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron_capped(a, b, DEFAULT_KRON_CAP)
}

/// Kronecker product `A ⊗ B`, indexed as `(A ⊗ B)[i·p + k, j·q + l] = A[i,j]·B[k,l]`
/// for `B` of shape `p x q`.
pub fn kron_capped(a: &ComplexMatrix, b: &ComplexMatrix, cap: usize) -> Result<ComplexMatrix> {
    let rows = a.rows().saturating_mul(b.rows());
    let cols = a.cols().saturating_mul(b.cols());
    let dim = rows.max(cols);
    if dim > cap {
        return Err(Error::DimensionOverflow { dim, cap });
    }
    let (p, q) = b.shape();
    Ok(ComplexMatrix::from_fn(rows, cols, |r, c| {
        a[(r / p, c / q)] * b[(r % p, c % q)]
    }))
}

/// Which tensor factor to trace out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Factor {
    First,
    Second,
}

/// Partial trace over one factor of `C^{d1} ⊗ C^{d2}`.
///
/// Uses the same index layout as [`kron`]: row `i·d2 + p` pairs basis vector
/// `i` of the first factor with `p` of the second. Tracing the first factor of
/// a Choi block matrix sums its diagonal blocks; tracing the second replaces
/// every block by its trace.
pub fn partial_trace(
    c: &ComplexMatrix,
    dim_first: usize,
    dim_second: usize,
    traced: Factor,
) -> Result<ComplexMatrix> {
    let n = c.ensure_square()?;
    if dim_first == 0 || dim_second == 0 || dim_first.checked_mul(dim_second) != Some(n) {
        return Err(Error::DimensionMismatch(format!(
            "partial trace over {dim_first} x {dim_second} on a {n}x{n} matrix"
        )));
    }
    let (d1, d2) = (dim_first, dim_second);
    Ok(match traced {
        Factor::First => ComplexMatrix::from_fn(d2, d2, |p, q| {
            (0..d1).map(|i| c[(i * d2 + p, i * d2 + q)]).sum()
        }),
        Factor::Second => ComplexMatrix::from_fn(d1, d1, |i, j| {
            (0..d2).map(|p| c[(i * d2 + p, j * d2 + p)]).sum()
        }),
    })
}
