use num_complex::Complex64;

use super::choi::ChoiBlockMatrix;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ZERO};

/// A map `a ↦ Σ A_i a A_i^∨` given by its Kraus operators.
///
/// Every operator is `dim_out x dim_in`. Maps of this form are completely
/// positive by construction, which is why non-CP maps (the transpose, say)
/// can only be expressed through a Choi-backed or builtin oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausMap {
    dim_in: usize,
    dim_out: usize,
    operators: Vec<ComplexMatrix>,
}

impl KrausMap {
    pub fn new(dim_in: usize, dim_out: usize, operators: Vec<ComplexMatrix>) -> Result<Self> {
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::DimensionMismatch(format!(
                "Kraus map dimensions must be positive, got {dim_in} -> {dim_out}"
            )));
        }
        if operators.is_empty() {
            return Err(Error::DimensionMismatch(
                "Kraus map needs at least one operator".into(),
            ));
        }
        for (k, a) in operators.iter().enumerate() {
            if a.shape() != (dim_out, dim_in) {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator {k} is {}x{}, expected {dim_out}x{dim_in}",
                    a.rows(),
                    a.cols()
                )));
            }
        }
        Ok(Self {
            dim_in,
            dim_out,
            operators,
        })
    }

    /// Infers dimensions from the first operator.
    pub fn from_operators(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let (dim_out, dim_in) = operators.first().map(ComplexMatrix::shape).ok_or_else(|| {
            Error::DimensionMismatch("Kraus map needs at least one operator".into())
        })?;
        Self::new(dim_in, dim_out, operators)
    }

    /// The identity channel on `C^dim`.
    pub fn identity(dim: usize) -> Self {
        Self {
            dim_in: dim,
            dim_out: dim,
            operators: vec![ComplexMatrix::identity(dim)],
        }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// `Σ A_i X A_i^∨`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::DimensionMismatch(format!(
                "input is {}x{}, map expects {}x{}",
                x.rows(),
                x.cols(),
                self.dim_in,
                self.dim_in
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for a in &self.operators {
            let ax = a.matmul(x)?;
            out = out.try_add(&ax.matmul(&a.adjoint())?)?;
        }
        Ok(out)
    }

    /// The trace dual `c ↦ Σ A_i^∨ c A_i`, as a Kraus map with swapped dimensions.
    pub fn dual(&self) -> KrausMap {
        KrausMap {
            dim_in: self.dim_out,
            dim_out: self.dim_in,
            operators: self.operators.iter().map(ComplexMatrix::adjoint).collect(),
        }
    }

    /// `Σ A_i^∨ A_i`; at most the identity for subchannels, equal to it for channels.
    pub fn kraus_sum(&self) -> ComplexMatrix {
        let mut s = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for a in &self.operators {
            s = s
                .try_add(&a.adjoint_mul(a).expect("operator shapes validated"))
                .expect("same shape");
        }
        s
    }

    /// Multiplies the map by `c ≥ 0` (operators scale by `√c`).
    pub fn scaled(&self, c: f64) -> Result<KrausMap> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::BadParams(format!(
                "scale factor must be finite and >= 0, got {c}"
            )));
        }
        Ok(KrausMap {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            operators: self
                .operators
                .iter()
                .map(|a| a.scale_real(c.sqrt()))
                .collect(),
        })
    }

    /// Block `(i, j)` of the Choi matrix, `Σ_l A_l e_i e_j^∨ A_l^∨`, compressed to level `m`.
    pub(crate) fn choi_block(&self, i: usize, j: usize, m: usize) -> ComplexMatrix {
        let mut block = ComplexMatrix::zeros(m, m);
        for a in &self.operators {
            for p in 0..m {
                let api = a[(p, i)];
                if api == ZERO {
                    continue;
                }
                for q in 0..m {
                    block[(p, q)] += api * a[(q, j)].conj();
                }
            }
        }
        block
    }
}

/// Choi block matrix `[μ(k_i k_j^∨)]` of a Kraus map.
///
/// With `f_l[i·m + p] = A_l[p, i]` this is `Σ_l f_l f_l^*`.
pub fn choi_from_kraus(k: &KrausMap) -> ChoiBlockMatrix {
    let (n, m) = (k.dim_in, k.dim_out);
    let mut c = ComplexMatrix::zeros(n * m, n * m);
    for a in &k.operators {
        let f: Vec<Complex64> = (0..n * m).map(|r| a[(r % m, r / m)]).collect();
        for (r, &fr) in f.iter().enumerate() {
            if fr == ZERO {
                continue;
            }
            for (s, fs) in f.iter().enumerate() {
                c[(r, s)] += fr * fs.conj();
            }
        }
    }
    ChoiBlockMatrix::new(n, m, c).expect("dimensions are n·m by construction")
}
