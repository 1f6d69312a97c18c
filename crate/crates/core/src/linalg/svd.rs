//! Thin singular value decomposition `g = Σ σ_i k_i h_i^∨`.

use num_complex::Complex64;

use super::eig::{fix_phase, jacobi};
use super::matrix::{dot, vec_norm, ComplexMatrix};
use crate::error::Result;

/// Singular values below this fraction of `σ_1` get their left vector from the
/// complement of the already-determined left vectors instead of `A h / σ`.
const LEFT_VECTOR_RCOND: f64 = 1e-13;

/// Ordered singular values with left/right orthonormal factors.
#[derive(Debug, Clone)]
pub struct SingularDecomposition {
    /// `σ_1 ≥ σ_2 ≥ … ≥ 0`, `min(rows, cols)` of them.
    pub singular_values: Vec<f64>,
    /// Left vectors `k_i` as columns (`rows x r`).
    pub left: ComplexMatrix,
    /// Right vectors `h_i` as columns (`cols x r`).
    pub right: ComplexMatrix,
}

impl SingularDecomposition {
    pub fn rank(&self, rtol: f64) -> usize {
        let top = self.singular_values.first().copied().unwrap_or(0.0);
        self.singular_values
            .iter()
            .filter(|&&s| s > rtol * top.max(f64::MIN_POSITIVE))
            .count()
    }

    /// Partial sum `g_m = Σ_{i<m} σ_i k_i h_i^∨`.
    pub fn truncated(&self, m: usize) -> ComplexMatrix {
        let rows = self.left.rows();
        let cols = self.right.rows();
        let m = m.min(self.singular_values.len());
        ComplexMatrix::from_fn(rows, cols, |i, j| {
            (0..m)
                .map(|k| self.left[(i, k)] * self.right[(j, k)].conj() * self.singular_values[k])
                .sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.truncated(self.singular_values.len())
    }
}

/// Computes the thin SVD through the Hermitian eigensolver.
///
/// Right vectors are eigenvectors of `A^*A`; singular values are recomputed
/// as `‖A h_i‖` and left vectors as `A h_i / σ_i`, which pairs phases
/// consistently. Left vectors for (numerically) zero singular values are
/// completed from the eigenvectors of `A A^*`.
pub fn svd(a: &ComplexMatrix) -> Result<SingularDecomposition> {
    if a.rows() < a.cols() {
        let t = svd(&a.adjoint())?;
        return Ok(SingularDecomposition {
            singular_values: t.singular_values,
            left: t.right,
            right: t.left,
        });
    }
    let (rows, cols) = a.shape();
    let gram = a.adjoint_mul(a)?.hermitian_part();
    let right_eig = jacobi(gram)?;

    let mut pairs: Vec<(f64, Vec<Complex64>, Vec<Complex64>)> = (0..cols)
        .map(|k| {
            let h = right_eig.eigenvector(k);
            let ah = a.mul_vec(&h).expect("shape checked");
            (vec_norm(&ah), ah, h)
        })
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));

    let sigma_max = pairs.first().map(|p| p.0).unwrap_or(0.0);
    let cutoff = LEFT_VECTOR_RCOND * sigma_max;

    let mut singular_values = Vec::with_capacity(cols);
    let mut right = ComplexMatrix::zeros(cols, cols);
    let mut lefts: Vec<Option<Vec<Complex64>>> = Vec::with_capacity(cols);
    let mut accepted: Vec<Vec<Complex64>> = Vec::with_capacity(cols);

    for (k, (sigma, ah, h)) in pairs.into_iter().enumerate() {
        singular_values.push(sigma);
        right.set_col(k, &h);
        if sigma > cutoff && sigma > 0.0 {
            let mut u: Vec<Complex64> = ah.iter().map(|z| z / sigma).collect();
            orthogonalize(&mut u, &accepted);
            let nrm = vec_norm(&u);
            for z in u.iter_mut() {
                *z /= nrm;
            }
            accepted.push(u.clone());
            lefts.push(Some(u));
        } else {
            lefts.push(None);
        }
    }

    if lefts.iter().any(Option::is_none) {
        let outer = jacobi(a.matmul(&a.adjoint())?.hermitian_part())?;
        // Smallest eigenvalues of A A^* first: those span the null space of A^*.
        let mut candidates: Vec<Vec<Complex64>> =
            (0..rows).rev().map(|k| outer.eigenvector(k)).collect();
        for slot in lefts.iter_mut().filter(|s| s.is_none()) {
            let u = complete_basis(&accepted, &mut candidates);
            accepted.push(u.clone());
            *slot = Some(u);
        }
    }

    let mut left = ComplexMatrix::zeros(rows, cols);
    for (k, u) in lefts.into_iter().enumerate() {
        left.set_col(k, &u.expect("all left vectors assigned"));
    }
    Ok(SingularDecomposition {
        singular_values,
        left,
        right,
    })
}

/// Two passes of modified Gram-Schmidt against an orthonormal set.
fn orthogonalize(u: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(u, b);
            for (x, y) in u.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
    }
}

/// Picks the candidate with the largest component orthogonal to `basis`.
fn complete_basis(
    basis: &[Vec<Complex64>],
    candidates: &mut Vec<Vec<Complex64>>,
) -> Vec<Complex64> {
    let mut best: Option<(f64, usize, Vec<Complex64>)> = None;
    for (idx, c) in candidates.iter().enumerate() {
        let mut r = c.clone();
        orthogonalize(&mut r, basis);
        let n = vec_norm(&r);
        if best.as_ref().is_none_or(|b| n > b.0 + 1e-12) {
            best = Some((n, idx, r));
        }
    }
    let (n, idx, mut r) = best.expect("candidate set is non-empty");
    candidates.remove(idx);
    for z in r.iter_mut() {
        *z /= n;
    }
    fix_phase(&mut r);
    r
}
