//! Coordinate truncations `P_n g P_n`, Schatten norms and the residual
//! schedules used as finite evidence of trace-class convergence.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{svd, ComplexMatrix};

/// Agreement required between the direct residual norm and the
/// singular-value tail formula in [`svd_tail_norm`].
pub const TAIL_FORMULA_RTOL: f64 = 1e-9;

/// Schatten exponent `p ∈ [1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchattenExponent {
    Finite(f64),
    Infinity,
}

impl SchattenExponent {
    pub const TRACE: Self = SchattenExponent::Finite(1.0);
    pub const FROBENIUS: Self = SchattenExponent::Finite(2.0);
    pub const OPERATOR: Self = SchattenExponent::Infinity;

    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(SchattenExponent::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(SchattenExponent::Finite(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    /// Norm of a sequence of singular values.
    pub fn norm_of(&self, singular_values: &[f64]) -> f64 {
        let top = singular_values.iter().copied().fold(0.0, f64::max);
        match *self {
            SchattenExponent::Infinity => top,
            _ if top == 0.0 => 0.0,
            SchattenExponent::Finite(1.0) => singular_values.iter().sum(),
            SchattenExponent::Finite(2.0) => {
                singular_values.iter().map(|s| s * s).sum::<f64>().sqrt()
            }
            // scaled by σ_max so large p does not overflow
            SchattenExponent::Finite(p) => {
                top * singular_values
                    .iter()
                    .map(|s| (s / top).powf(p))
                    .sum::<f64>()
                    .powf(1.0 / p)
            }
        }
    }
}

impl fmt::Display for SchattenExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchattenExponent::Finite(p) => write!(f, "{p}"),
            SchattenExponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for SchattenExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(SchattenExponent::Infinity),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| Error::InvalidExponent(f64::NAN))?;
                Self::new(p)
            }
        }
    }
}

impl Serialize for SchattenExponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SchattenExponent::Finite(p) => serializer.serialize_f64(*p),
            SchattenExponent::Infinity => serializer.serialize_str("inf"),
        }
    }
}

/// `P_n g P_n`, kept at the ambient dimension (zero outside the leading `n x n` block).
pub fn compress(g: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    let dim = g.ensure_square()?;
    if n > dim {
        return Err(Error::TruncationTooLarge { level: n, dim });
    }
    Ok(ComplexMatrix::from_fn(dim, dim, |i, j| {
        if i < n && j < n {
            g[(i, j)]
        } else {
            crate::linalg::ZERO
        }
    }))
}

/// `‖g‖_p = (Σ σ_i^p)^{1/p}`, or `σ_1` for `p = ∞`.
pub fn schatten_norm(g: &ComplexMatrix, p: SchattenExponent) -> Result<f64> {
    if p == SchattenExponent::FROBENIUS {
        // identical to Σσ² but free of eigensolver error
        return Ok(g.frobenius_norm());
    }
    Ok(p.norm_of(&svd(g)?.singular_values))
}

/// `‖P_n g P_n − g‖_p`.
pub fn truncation_residual(g: &ComplexMatrix, p: SchattenExponent, n: usize) -> Result<f64> {
    let c = compress(g, n)?;
    schatten_norm(&c.try_sub(g)?, p)
}

/// `‖g − g_m‖_p` for the rank-`m` SVD partial sum `g_m`.
///
/// Computed from the residual matrix and cross-checked against the tail
/// `(Σ_{j>m} σ_j^p)^{1/p}`; disagreement beyond `1e-9·max(1, tail)` is
/// reported as [`Error::TailFormulaViolation`].
pub fn svd_tail_norm(g: &ComplexMatrix, p: SchattenExponent, m: usize) -> Result<f64> {
    let d = svd(g)?;
    let r = d.singular_values.len();
    if m > r {
        return Err(Error::TruncationTooLarge { level: m, dim: r });
    }
    let residual = g.try_sub(&d.truncated(m))?;
    let direct = p.norm_of(&svd(&residual)?.singular_values);
    let tail = p.norm_of(&d.singular_values[m..]);
    if !((direct - tail).abs() <= TAIL_FORMULA_RTOL * tail.max(1.0)) {
        return Err(Error::TailFormulaViolation { direct, tail });
    }
    Ok(direct)
}

/// `diag(2^{-1}, …, 2^{-dim})`: a trace-class operator with geometric
/// singular-value decay whose truncation residuals are known in closed form.
pub fn geometric_decay_operator(dim: usize) -> ComplexMatrix {
    let d: Vec<f64> = (1..=dim).map(|k| 0.5f64.powi(k as i32)).collect();
    ComplexMatrix::from_real_diag(&d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualPoint {
    pub level: usize,
    pub residual: f64,
}

/// Truncation residuals `‖P_n g P_n − g‖_p` along a schedule of levels.
pub fn residual_schedule(
    g: &ComplexMatrix,
    p: SchattenExponent,
    levels: &[usize],
) -> Result<Vec<ResidualPoint>> {
    levels
        .iter()
        .map(|&level| {
            Ok(ResidualPoint {
                level,
                residual: truncation_residual(g, p, level)?,
            })
        })
        .collect()
}

/// Residuals `‖μ(P_n g P_n) − μ(g)‖_p` of a linear map along a schedule.
pub fn image_residual_schedule<F>(
    map: F,
    g: &ComplexMatrix,
    p: SchattenExponent,
    levels: &[usize],
) -> Result<Vec<ResidualPoint>>
where
    F: Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
{
    let full = map(g)?;
    levels
        .iter()
        .map(|&level| {
            let image = map(&compress(g, level)?)?;
            Ok(ResidualPoint {
                level,
                residual: schatten_norm(&image.try_sub(&full)?, p)?,
            })
        })
        .collect()
}

/// Smallest `N` with `‖P_n g P_n − g‖_p ≤ eps` for every `n ≥ N` up to `dim(g)`.
pub fn convergence_level(g: &ComplexMatrix, p: SchattenExponent, eps: f64) -> Result<usize> {
    let dim = g.ensure_square()?;
    let mut level = dim;
    for n in (0..dim).rev() {
        if truncation_residual(g, p, n)? <= eps {
            level = n;
        } else {
            break;
        }
    }
    Ok(level)
}
