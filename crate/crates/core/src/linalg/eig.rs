//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

/// Sweeps before the solver gives up.
pub const MAX_SWEEPS: usize = 100;

/// Stop once the off-diagonal Frobenius mass drops below this fraction of `‖A‖_F`.
pub const OFF_DIAGONAL_RTOL: f64 = 1e-14;

/// Spectral decomposition `A = V Λ V^*` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Real eigenvalues, sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in eigenvalue order.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.col(k)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `V Λ V^*`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * v[(j, k)].conj() * self.eigenvalues[k])
                .sum()
        })
    }
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// The input must satisfy `‖A − A^*‖_max ≤ tol`; the Hermitian part of `A` is
/// what gets diagonalized. Eigenvalues come back sorted descending, and each
/// eigenvector has its first entry of modulus above `1e-12` made real and
/// non-negative, so results are deterministic for a fixed input.
pub fn hermitian_eig(a: &ComplexMatrix, tol: f64) -> Result<HermitianEig> {
    a.ensure_square()?;
    let deviation = a.hermitian_deviation();
    if !(deviation <= tol) {
        return Err(Error::NotHermitian { deviation, tol });
    }
    jacobi(a.hermitian_part())
}

/// Diagonalizes an exactly Hermitian working copy in place.
pub(crate) fn jacobi(mut a: ComplexMatrix) -> Result<HermitianEig> {
    let n = a.ensure_square()?;
    let mut v = ComplexMatrix::identity(n);
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
    }

    let scale = a.frobenius_norm();
    let threshold = OFF_DIAGONAL_RTOL * scale;
    let mut converged = false;
    let mut off = off_diagonal_mass(&a);

    for _ in 0..MAX_SWEEPS {
        if off == 0.0 || off < threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        off = off_diagonal_mass(&a);
    }
    if !converged && !(off == 0.0 || off < threshold) {
        return Err(Error::NoConvergence {
            sweeps: MAX_SWEEPS,
            off_diagonal: off,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&x, &y| diag[y].total_cmp(&diag[x]));

    let eigenvalues = order.iter().map(|&k| diag[k]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.col(src);
        fix_phase(&mut col);
        eigenvectors.set_col(dst, &col);
    }
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_mass(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation annihilating `a[p,q]`.
///
/// The pivot `β = |β| e^{iφ}` is first rotated to the real axis by a diagonal
/// phase, then a real symmetric rotation finishes the job. The combined
/// unitary on the `(p, q)` plane is
/// `G = [[c, s], [-s e^{-iφ}, c e^{-iφ}]]`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let beta = a[(p, q)];
    let b = beta.norm();
    if b == 0.0 {
        return;
    }
    let alpha = a[(p, p)].re;
    let gamma = a[(q, q)].re;
    let phase = (beta / b).conj(); // e^{-iφ}

    let tau = (gamma - alpha) / (2.0 * b);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = phase * (-s);
    let g_qq = phase * c;

    let n = a.rows();
    // A <- A G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    // A <- G^* A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(alpha - t * b, 0.0);
    a[(q, q)] = Complex64::new(gamma + t * b, 0.0);

    // V <- V G
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Makes the first entry with modulus above `1e-12` real and non-negative.
pub(crate) fn fix_phase(col: &mut [Complex64]) {
    if let Some(z) = col.iter().copied().find(|z| z.norm() > 1e-12) {
        let rot = z.conj() / z.norm();
        for x in col.iter_mut() {
            *x *= rot;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::ONE;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let e = hermitian_eig(&ComplexMatrix::identity(2), 1e-12).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0]);
    }

    #[test]
    fn diagonal_is_sorted_descending() {
        let e = hermitian_eig(&ComplexMatrix::from_real_diag(&[-1.0, 3.0]), 1e-12).unwrap();
        assert_eq!(e.eigenvalues, vec![3.0, -1.0]);
        // eigenvector for 3 is e_2
        assert!((e.eigenvector(0)[1] - ONE).norm() < 1e-15);
    }

    #[test]
    fn two_by_two_with_imaginary_coupling() {
        // det([[2-λ, i], [-i, 2-λ]]) = (2-λ)^2 - 1 → λ ∈ {3, 1}
        let a = ComplexMatrix::from_vec(
            2,
            2,
            vec![c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)],
        )
        .unwrap();
        let e = hermitian_eig(&a, 1e-12).unwrap();
        assert!((e.eigenvalues[0] - 3.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
        assert!(e.reconstruct().max_abs_diff(&a) < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian_and_non_square() {
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            hermitian_eig(&a, 1e-9),
            Err(Error::NotHermitian { .. })
        ));
        let b = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            hermitian_eig(&b, 1e-9),
            Err(Error::NonSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn phase_convention_first_significant_entry_nonnegative() {
        let a = ComplexMatrix::from_vec(
            2,
            2,
            vec![c(1.0, 0.0), c(0.0, 2.0), c(0.0, -2.0), c(-1.0, 0.0)],
        )
        .unwrap();
        let e = hermitian_eig(&a, 1e-12).unwrap();
        for k in 0..2 {
            let col = e.eigenvector(k);
            let first = col.iter().find(|z| z.norm() > 1e-12).unwrap();
            assert!(first.im.abs() < 1e-15 && first.re > 0.0);
        }
    }

    #[test]
    fn zero_matrix_converges_immediately() {
        let e = hermitian_eig(&ComplexMatrix::zeros(3, 3), 1e-12).unwrap();
        assert_eq!(e.eigenvalues, vec![0.0; 3]);
    }
}
