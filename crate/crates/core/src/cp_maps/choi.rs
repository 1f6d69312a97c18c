use num_complex::Complex64;

use super::kraus::KrausMap;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, is_psd, partial_trace, ComplexMatrix, Factor};

/// Default relative eigenvalue cutoff for Kraus extraction.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// The block matrix `L_{n,m}(μ) = [P_m μ(k_i k_j^∨) P_m]_{i,j<n}`.
///
/// Block `(i, j)` is `m x m` and occupies rows `i·m..(i+1)·m`, columns
/// `j·m..(j+1)·m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiBlockMatrix {
    n: usize,
    m: usize,
    matrix: ComplexMatrix,
}

impl ChoiBlockMatrix {
    pub fn new(n: usize, m: usize, matrix: ComplexMatrix) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::DimensionMismatch(format!(
                "Choi levels must be positive, got n={n}, m={m}"
            )));
        }
        let dim = n * m;
        if matrix.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix for n={n}, m={m} must be {dim}x{dim}, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { n, m, matrix })
    }

    /// Assembles the block matrix from a block function.
    pub fn from_blocks(
        n: usize,
        m: usize,
        mut block: impl FnMut(usize, usize) -> Result<ComplexMatrix>,
    ) -> Result<Self> {
        let mut matrix = ComplexMatrix::zeros(n * m, n * m);
        for i in 0..n {
            for j in 0..n {
                let b = block(i, j)?;
                if b.shape() != (m, m) {
                    return Err(Error::DimensionMismatch(format!(
                        "block ({i}, {j}) is {}x{}, expected {m}x{m}",
                        b.rows(),
                        b.cols()
                    )));
                }
                for p in 0..m {
                    for q in 0..m {
                        matrix[(i * m + p, j * m + q)] = b[(p, q)];
                    }
                }
            }
        }
        Self::new(n, m, matrix)
    }

    /// Input truncation level.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Output truncation level.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Block `(i, j)`, i.e. `P_m μ(k_i k_j^∨) P_m`.
    pub fn block(&self, i: usize, j: usize) -> ComplexMatrix {
        self.matrix
            .submatrix(i * self.m, j * self.m, self.m, self.m)
    }

    /// The principal sub-block matrix at levels `n' ≤ n`, `m' ≤ m`.
    pub fn restrict(&self, n: usize, m: usize) -> Result<Self> {
        if n > self.n || m > self.m {
            return Err(Error::OracleLevelUnsupported(format!(
                "levels ({n}, {m}) from a Choi matrix at ({}, {})",
                self.n, self.m
            )));
        }
        Self::from_blocks(n, m, |i, j| Ok(self.block(i, j).submatrix(0, 0, m, m)))
    }

    /// `[tr P_m μ(k_i k_j^∨) P_m]_{i,j}`, the partial trace over the output factor.
    pub fn trace_matrix(&self) -> ComplexMatrix {
        partial_trace(&self.matrix, self.n, self.m, Factor::Second).expect("dimensions are n·m")
    }

    /// Applies the represented map: `μ(X) = Σ_{i,j} X_ij μ(k_i k_j^∨)`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != (self.n, self.n) {
            return Err(Error::DimensionMismatch(format!(
                "input is {}x{}, Choi matrix has input level {}",
                x.rows(),
                x.cols(),
                self.n
            )));
        }
        let m = self.m;
        Ok(ComplexMatrix::from_fn(m, m, |p, q| {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..self.n {
                for j in 0..self.n {
                    s += x[(i, j)] * self.matrix[(i * m + p, j * m + q)];
                }
            }
            s
        }))
    }
}

/// Extracts Kraus operators from a positive Choi block matrix.
///
/// Eigenpairs `(λ_l, f_l)` with `λ_l > rank_tol·λ_max` give
/// `A_l = √λ_l · unflatten(f_l)` where `A_l[p, i] = f_l[i·m + p]`, sorted by
/// descending eigenvalue. Numerically null eigenvectors are dropped, so the
/// operator count is the numerical rank. A zero Choi matrix yields a single
/// zero operator.
pub fn kraus_from_choi(c: &ChoiBlockMatrix, rank_tol: f64) -> Result<KrausMap> {
    let verdict = is_psd(&c.matrix, rank_tol)?;
    if !verdict.is_psd {
        return Err(Error::NotPsd {
            min_eigenvalue: verdict.min_eigenvalue,
        });
    }
    let (n, m) = (c.n, c.m);
    let eig = hermitian_eig(&c.matrix, f64::INFINITY)?;
    let lambda_max = eig.max_eigenvalue();
    let cutoff = rank_tol * lambda_max;
    let mut operators = Vec::new();
    for (l, &lambda) in eig.eigenvalues.iter().enumerate() {
        if !(lambda > cutoff) || lambda <= 0.0 {
            break;
        }
        let f = eig.eigenvector(l);
        let s = lambda.sqrt();
        operators.push(ComplexMatrix::from_fn(m, n, |p, i| f[i * m + p] * s));
    }
    if operators.is_empty() {
        operators.push(ComplexMatrix::zeros(m, n));
    }
    KrausMap::new(n, m, operators)
}
