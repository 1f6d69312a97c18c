use std::fmt;

use num_complex::Complex64;

use super::choi::ChoiBlockMatrix;
use super::kraus::KrausMap;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Parameterized families of maps with closed-form action on matrix units.
///
/// All indices are zero-based here; `S` is the unilateral shift `e_k ↦ e_{k+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BuiltinFamily {
    /// `μ(a) = a`.
    Identity,
    /// `μ(a) = a^T`; positive but not completely positive.
    Transpose,
    /// `μ(a) = tr(a)·I/d` on a `d`-dimensional output.
    Depolarize,
    /// `μ(a) = S a S^∨`, a trace-preserving channel.
    ShiftIsometry,
    /// `μ(a) = S^∨ a S`, a strict subchannel (it annihilates `e_1 e_1^∨`).
    CoshiftSubchannel,
    /// `μ(e_i e_j^∨) = γ^{(i+j)/2} e_i e_j^∨`, the single-Kraus map `diag(γ^{k/2})`.
    DiagonalDamping { gamma: f64 },
}

impl BuiltinFamily {
    pub fn name(&self) -> &'static str {
        match self {
            BuiltinFamily::Identity => "identity",
            BuiltinFamily::Transpose => "transpose",
            BuiltinFamily::Depolarize => "depolarize",
            BuiltinFamily::ShiftIsometry => "shift-isometry",
            BuiltinFamily::CoshiftSubchannel => "coshift-subchannel",
            BuiltinFamily::DiagonalDamping { .. } => "diagonal-damping",
        }
    }
}

/// A builtin family together with its declared dimensions (`None` = unbounded).
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltinMap {
    pub family: BuiltinFamily,
    pub dim_in: Option<usize>,
    pub dim_out: Option<usize>,
}

impl BuiltinMap {
    fn block(&self, i: usize, j: usize, m: usize) -> ComplexMatrix {
        let unit_if_inside = |p: usize, q: usize, w: f64| {
            let mut b = ComplexMatrix::zeros(m, m);
            if p < m && q < m {
                b[(p, q)] = Complex64::new(w, 0.0);
            }
            b
        };
        match self.family {
            BuiltinFamily::Identity => unit_if_inside(i, j, 1.0),
            BuiltinFamily::Transpose => unit_if_inside(j, i, 1.0),
            BuiltinFamily::Depolarize => {
                let d = self.dim_out.expect("depolarize requires a finite output") as f64;
                if i == j {
                    ComplexMatrix::identity(m).scale_real(1.0 / d)
                } else {
                    ComplexMatrix::zeros(m, m)
                }
            }
            BuiltinFamily::ShiftIsometry => unit_if_inside(i + 1, j + 1, 1.0),
            BuiltinFamily::CoshiftSubchannel => {
                if i == 0 || j == 0 {
                    ComplexMatrix::zeros(m, m)
                } else {
                    unit_if_inside(i - 1, j - 1, 1.0)
                }
            }
            BuiltinFamily::DiagonalDamping { gamma } => {
                unit_if_inside(i, j, gamma.powf((i + j) as f64 / 2.0))
            }
        }
    }

    fn exact_trace(&self, i: usize, j: usize) -> Complex64 {
        let v = if i != j {
            0.0
        } else {
            match self.family {
                BuiltinFamily::CoshiftSubchannel if i == 0 => 0.0,
                BuiltinFamily::DiagonalDamping { gamma } => gamma.powi(i as i32),
                _ => 1.0,
            }
        };
        Complex64::new(v, 0.0)
    }
}

/// A map that can be evaluated on matrix units at any supported truncation.
///
/// `evaluate(i, j, m)` returns `P_m μ(k_i k_j^∨) P_m` as an `m x m` matrix.
/// Evaluations are deterministic and form a projective family: the level-`m'`
/// value is the leading block of the level-`m` value for `m' ≤ m`.
#[derive(Debug, Clone, PartialEq)]
pub enum MapOracle {
    Kraus(KrausMap),
    Choi(ChoiBlockMatrix),
    Builtin(BuiltinMap),
}

impl MapOracle {
    /// Input dimension, `None` when the family is defined on every level.
    pub fn input_dim(&self) -> Option<usize> {
        match self {
            MapOracle::Kraus(k) => Some(k.dim_in()),
            MapOracle::Choi(c) => Some(c.n()),
            MapOracle::Builtin(b) => b.dim_in,
        }
    }

    pub fn output_dim(&self) -> Option<usize> {
        match self {
            MapOracle::Kraus(k) => Some(k.dim_out()),
            MapOracle::Choi(c) => Some(c.m()),
            MapOracle::Builtin(b) => b.dim_out,
        }
    }

    pub fn check_levels(&self, n: usize, m: usize) -> Result<()> {
        if n == 0 || m == 0 {
            return Err(Error::OracleLevelUnsupported(format!(
                "levels must be positive, got n={n}, m={m}"
            )));
        }
        if let Some(d) = self.input_dim().filter(|&d| n > d) {
            return Err(Error::OracleLevelUnsupported(format!(
                "input level {n} exceeds input dimension {d}"
            )));
        }
        if let Some(d) = self.output_dim().filter(|&d| m > d) {
            return Err(Error::OracleLevelUnsupported(format!(
                "output level {m} exceeds output dimension {d}"
            )));
        }
        Ok(())
    }

    /// `P_m μ(k_i k_j^∨) P_m` for zero-based `i, j`.
    pub fn evaluate(&self, i: usize, j: usize, m: usize) -> Result<ComplexMatrix> {
        self.check_levels(i.max(j) + 1, m)?;
        Ok(match self {
            MapOracle::Kraus(k) => k.choi_block(i, j, m),
            MapOracle::Choi(c) => c.block(i, j).submatrix(0, 0, m, m),
            MapOracle::Builtin(b) => b.block(i, j, m),
        })
    }

    /// `tr μ(k_i k_j^∨)` over the whole output space, when known in closed form.
    pub fn exact_trace(&self, i: usize, j: usize) -> Option<Complex64> {
        match self {
            MapOracle::Builtin(b) => Some(b.exact_trace(i, j)),
            _ => None,
        }
    }

    /// `P_m μ(x) P_m` for a square `x` supported on the first `x.rows()` basis vectors.
    pub fn apply(&self, x: &ComplexMatrix, m: usize) -> Result<ComplexMatrix> {
        let d = x.ensure_square()?;
        self.check_levels(d.max(1), m)?;
        if let MapOracle::Kraus(k) = self {
            if d == k.dim_in() && m == k.dim_out() {
                return k.apply(x);
            }
        }
        let mut out = ComplexMatrix::zeros(m, m);
        for i in 0..d {
            for j in 0..d {
                let xij = x[(i, j)];
                if xij == crate::linalg::ZERO {
                    continue;
                }
                out = out.try_add(&self.evaluate(i, j, m)?.scale(xij))?;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for MapOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dim = |d: Option<usize>| d.map_or_else(|| "inf".to_string(), |d| d.to_string());
        match self {
            MapOracle::Kraus(k) => write!(
                f,
                "kraus({} operators, {} -> {})",
                k.len(),
                k.dim_in(),
                k.dim_out()
            ),
            MapOracle::Choi(c) => write!(f, "choi(n={}, m={})", c.n(), c.m()),
            MapOracle::Builtin(b) => {
                write!(f, "{}", b.family.name())?;
                if let BuiltinFamily::DiagonalDamping { gamma } = b.family {
                    write!(f, "(gamma={gamma})")?;
                }
                write!(f, " [{} -> {}]", dim(b.dim_in), dim(b.dim_out))
            }
        }
    }
}

impl From<KrausMap> for MapOracle {
    fn from(k: KrausMap) -> Self {
        MapOracle::Kraus(k)
    }
}

impl From<ChoiBlockMatrix> for MapOracle {
    fn from(c: ChoiBlockMatrix) -> Self {
        MapOracle::Choi(c)
    }
}

impl From<BuiltinMap> for MapOracle {
    fn from(b: BuiltinMap) -> Self {
        MapOracle::Builtin(b)
    }
}

/// Assembles `L_{n,m}(μ) = [P_m μ(k_i k_j^∨) P_m]_{i,j<n}` from `n²` oracle calls.
pub fn choi_from_oracle(o: &MapOracle, n: usize, m: usize) -> Result<ChoiBlockMatrix> {
    o.check_levels(n, m)?;
    if let MapOracle::Choi(c) = o {
        return c.restrict(n, m);
    }
    ChoiBlockMatrix::from_blocks(n, m, |i, j| o.evaluate(i, j, m))
}
