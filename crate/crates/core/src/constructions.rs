//! Map builders: the trace-out construction from a unitary dilation and the
//! catalogue of builtin oracles.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::cp_maps::{BuiltinFamily, BuiltinMap, KrausMap, MapOracle};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, is_psd, kron, partial_trace, ComplexMatrix, Factor, DEFAULT_PSD_TOL,
};
use crate::random;

pub const UNITARITY_TOL: f64 = 1e-10;
pub const STATE_TRACE_TOL: f64 = 1e-12;
pub const PROJECTION_TOL: f64 = 1e-10;
/// Environment eigenvalues at or below this are not given Kraus operators.
pub const ENVIRONMENT_CUTOFF: f64 = 1e-12;

/// A unitary `U` on `K ⊗ H`, an environment state `b` on `H` and an
/// orthogonal projection `Q` on `K`. `K` is the first tensor factor.
#[derive(Debug, Clone, PartialEq)]
pub struct DilationSpec {
    pub dim_k: usize,
    pub dim_h: usize,
    pub u: ComplexMatrix,
    pub b: ComplexMatrix,
    pub q: ComplexMatrix,
}

impl DilationSpec {
    /// Checks shapes, `U^*U = I`, `b ≥ 0` with `tr b = 1`, and `Q² = Q = Q^*`.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDilation(msg));
        let (dk, dh) = (self.dim_k, self.dim_h);
        if dk == 0 || dh == 0 {
            return bad(format!(
                "dimensions must be positive, got dim_K={dk}, dim_H={dh}"
            ));
        }
        let d = dk * dh;
        if self.u.shape() != (d, d) {
            return bad(format!(
                "U must be {d}x{d}, got {}x{}",
                self.u.rows(),
                self.u.cols()
            ));
        }
        if self.b.shape() != (dh, dh) {
            return bad(format!(
                "b must be {dh}x{dh}, got {}x{}",
                self.b.rows(),
                self.b.cols()
            ));
        }
        if self.q.shape() != (dk, dk) {
            return bad(format!(
                "Q must be {dk}x{dk}, got {}x{}",
                self.q.rows(),
                self.q.cols()
            ));
        }

        let unitarity = self
            .u
            .adjoint_mul(&self.u)?
            .max_abs_diff(&ComplexMatrix::identity(d));
        if !(unitarity <= UNITARITY_TOL) {
            return bad(format!("U is not unitary: ‖U^*U − I‖_max = {unitarity:e}"));
        }

        let tr = self.b.trace();
        if !((tr - Complex64::new(1.0, 0.0)).norm() <= STATE_TRACE_TOL) {
            return bad(format!("b must have unit trace, got {tr}"));
        }
        let psd = is_psd(&self.b, DEFAULT_PSD_TOL)?;
        if !psd.is_psd {
            return bad(format!(
                "b is not positive semidefinite: min eigenvalue {:e}, Hermitian deviation {:e}",
                psd.min_eigenvalue, psd.hermitian_deviation
            ));
        }

        let q_herm = self.q.hermitian_deviation();
        let q_idem = self.q.matmul(&self.q)?.max_abs_diff(&self.q);
        if !(q_herm <= PROJECTION_TOL && q_idem <= PROJECTION_TOL) {
            return bad(format!(
                "Q is not an orthogonal projection: ‖Q − Q^*‖_max = {q_herm:e}, ‖Q² − Q‖_max = {q_idem:e}"
            ));
        }
        Ok(())
    }

    /// Orthonormal basis `k̂_p` of the range of `Q`.
    pub fn projected_basis(&self) -> Result<Vec<Vec<Complex64>>> {
        let eig = hermitian_eig(&self.q, f64::INFINITY)?;
        Ok((0..self.dim_k)
            .filter(|&k| eig.eigenvalues[k] > 0.5)
            .map(|k| eig.eigenvector(k))
            .collect())
    }

    /// Eigenpairs `(λ_r, φ_r)` of `b` with `λ_r > 1e-12`.
    pub fn environment_spectrum(&self) -> Result<Vec<(f64, Vec<Complex64>)>> {
        let eig = hermitian_eig(&self.b, f64::INFINITY)?;
        Ok((0..self.dim_h)
            .filter(|&r| eig.eigenvalues[r] > ENVIRONMENT_CUTOFF)
            .map(|r| (eig.eigenvalues[r], eig.eigenvector(r)))
            .collect())
    }

    /// The intermediate `e = (Q⊗I) U (a⊗b) U^* (Q⊗I)` on `K ⊗ H`.
    pub fn evolved_state(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.validate()?;
        let qi = kron(&self.q, &ComplexMatrix::identity(self.dim_h))?;
        let c = self
            .u
            .matmul(&kron(a, &self.b)?)?
            .matmul(&self.u.adjoint())?;
        qi.matmul(&c)?.matmul(&qi)
    }

    /// `μ(a) = tr_K̂(e)`, computed by partial trace rather than through Kraus operators.
    pub fn apply_by_trace_out(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        let e = self.evolved_state(a)?;
        partial_trace(&e, self.dim_k, self.dim_h, Factor::First)
    }
}

/// Kraus form of `a ↦ tr_K̂((Q⊗I) U (a⊗b) U^* (Q⊗I))`, a map from `K` to `H`.
///
/// Operators are indexed by a basis vector `k̂_p` of the range of `Q` and an
/// eigenpair `(λ_r, φ_r)` of `b`:
/// `A_{p,r} x = √λ_r (k̂_p^∨ ⊗ I_H) U (x ⊗ φ_r)`. Ordering is `p`-major, both
/// indices following descending eigenvalues.
pub fn traceout_channel(spec: &DilationSpec) -> Result<KrausMap> {
    spec.validate()?;
    let basis = spec.projected_basis()?;
    if basis.is_empty() {
        return Err(Error::InvalidDilation(
            "Q has rank zero; the trace-out map vanishes".into(),
        ));
    }
    let env = spec.environment_spectrum()?;
    let (dk, dh) = (spec.dim_k, spec.dim_h);
    let u = &spec.u;

    let mut operators = Vec::with_capacity(basis.len() * env.len());
    for khat in &basis {
        for (lambda, phi) in &env {
            let s = lambda.sqrt();
            let a = ComplexMatrix::from_fn(dh, dk, |h, k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (t, kt) in khat.iter().enumerate() {
                    let kt = kt.conj();
                    if kt.norm() == 0.0 {
                        continue;
                    }
                    for (sidx, ph) in phi.iter().enumerate() {
                        acc += kt * u[(t * dh + h, k * dh + sidx)] * ph;
                    }
                }
                acc * s
            });
            operators.push(a);
        }
    }
    KrausMap::new(dk, dh, operators)
}

/// Named numeric parameters of a builtin map.
pub type BuiltinParams = BTreeMap<String, f64>;

/// Names accepted by [`builtin_oracle`].
pub const BUILTIN_NAMES: [&str; 7] = [
    "identity",
    "transpose",
    "depolarize",
    "shift-isometry",
    "coshift-subchannel",
    "diagonal-damping",
    "random-kraus",
];

/// Builds a builtin oracle by name.
///
/// Dimensions are `(dim_in, dim_out)`, `None` meaning the unbounded family.
/// `random-kraus` takes integer `seed` and `k` (default 2) and produces a
/// trace-preserving Kraus-backed oracle; `diagonal-damping` takes
/// `gamma ∈ (0, 1]`.
pub fn builtin_oracle(
    name: &str,
    params: &BuiltinParams,
    dims: (Option<usize>, Option<usize>),
) -> Result<MapOracle> {
    let (dim_in, dim_out) = dims;
    if dim_in == Some(0) || dim_out == Some(0) {
        return Err(Error::BadParams("dimensions must be positive".into()));
    }
    let allow = |allowed: &[&str]| -> Result<()> {
        match params.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::BadParams(format!(
                "`{name}` does not take parameter `{k}`"
            ))),
            None => Ok(()),
        }
    };
    let same_dims = || -> Result<()> {
        if dim_in != dim_out {
            return Err(Error::BadParams(format!(
                "`{name}` needs equal input and output dimensions, got {dim_in:?} -> {dim_out:?}"
            )));
        }
        Ok(())
    };

    let family = match name {
        "identity" => {
            allow(&[])?;
            same_dims()?;
            BuiltinFamily::Identity
        }
        "transpose" => {
            allow(&[])?;
            same_dims()?;
            BuiltinFamily::Transpose
        }
        "depolarize" | "depolarize-to-maximally-mixed" => {
            allow(&[])?;
            if dim_out.is_none() {
                return Err(Error::BadParams(
                    "`depolarize` needs a finite output dimension".into(),
                ));
            }
            BuiltinFamily::Depolarize
        }
        "shift-isometry" => {
            allow(&[])?;
            if let Some(dout) = dim_out {
                match dim_in {
                    Some(din) if dout > din => {}
                    _ => {
                        return Err(Error::BadParams(format!(
                            "`shift-isometry` with output dimension {dout} needs input dimension < {dout}"
                        )))
                    }
                }
            }
            BuiltinFamily::ShiftIsometry
        }
        "coshift-subchannel" => {
            allow(&[])?;
            if let Some(dout) = dim_out {
                match dim_in {
                    Some(din) if dout + 1 >= din => {}
                    _ => {
                        return Err(Error::BadParams(format!(
                            "`coshift-subchannel` with output dimension {dout} needs input dimension ≤ {}",
                            dout + 1
                        )))
                    }
                }
            }
            BuiltinFamily::CoshiftSubchannel
        }
        "diagonal-damping" => {
            allow(&["gamma"])?;
            same_dims()?;
            let gamma = *params
                .get("gamma")
                .ok_or_else(|| Error::BadParams("`diagonal-damping` needs `gamma`".into()))?;
            if !(gamma > 0.0 && gamma <= 1.0) {
                return Err(Error::BadParams(format!(
                    "gamma must lie in (0, 1], got {gamma}"
                )));
            }
            BuiltinFamily::DiagonalDamping { gamma }
        }
        "random-kraus" => {
            allow(&["seed", "k"])?;
            let (Some(din), Some(dout)) = (dim_in, dim_out) else {
                return Err(Error::BadParams(
                    "`random-kraus` needs finite dimensions".into(),
                ));
            };
            let seed = integer_param(params, "seed", 0)?;
            let k = integer_param(params, "k", 2)?;
            if k == 0 {
                return Err(Error::BadParams("`k` must be positive".into()));
            }
            let map = random::random_channel(din, dout, k as usize, &mut random::seeded_rng(seed))?;
            return Ok(MapOracle::Kraus(map));
        }
        other => return Err(Error::UnknownBuiltin(other.to_string())),
    };
    Ok(MapOracle::Builtin(BuiltinMap {
        family,
        dim_in,
        dim_out,
    }))
}

fn integer_param(params: &BuiltinParams, key: &str, default: u64) -> Result<u64> {
    match params.get(key) {
        None => Ok(default),
        Some(&v) if v >= 0.0 && v.fract() == 0.0 && v < 2f64.powi(53) => Ok(v as u64),
        Some(&v) => Err(Error::BadParams(format!(
            "`{key}` must be a non-negative integer, got {v}"
        ))),
    }
}
