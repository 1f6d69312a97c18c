//! Certification of completely positive maps on truncated operator spaces.
//!
//! A map `μ` between (truncations of) trace-class operator spaces is tested
//! through the ladder of Choi block matrices
//! `L_{n,m}(μ) = [P_m μ(k_i k_j^∨) P_m]_{i,j≤n}`: complete positivity holds iff
//! every `L_n` is positive, and the subchannel and channel properties reduce
//! to the trace functionals `tr μ(k_i k_j^∨)`. Positive Choi matrices are
//! turned back into Kraus operators constructively.
//!
//! Modules:
//! - [`linalg`]: dense complex kernels (Jacobi eigensolver, SVD, PSD test,
//!   Kronecker product, partial trace).
//! - [`truncation`]: `P_n g P_n`, Schatten norms and convergence residuals.
//! - [`cp_maps`]: Kraus, Choi and oracle representations.
//! - [`certification`]: CP / subchannel / channel verdicts.
//! - [`constructions`]: trace-out dilations and builtin map families.
//! - [`random`]: seeded generators for tests and builtins.

// `!(x <= tol)` is used deliberately so that NaN fails every check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certification;
pub mod constructions;
pub mod cp_maps;
pub mod error;
pub mod linalg;
pub mod random;
pub mod truncation;

pub use error::{Error, Result};
pub use num_complex::Complex64;
