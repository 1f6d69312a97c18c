//! Seeded random matrices, maps and dilations.
//!
//! Everything is driven by a caller-supplied RNG; [`seeded_rng`] gives a
//! ChaCha stream that is reproducible across platforms.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::constructions::DilationSpec;
use crate::cp_maps::KrausMap;
use crate::error::{Error, Result};
use crate::linalg::{dot, hermitian_eig, vec_norm, ComplexMatrix};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. standard complex Gaussian entries (`E|z|² = 1`).
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    gaussian_matrix(dim, dim, rng).hermitian_part()
}

/// Haar-like unitary: modified Gram-Schmidt on a Gaussian matrix.
///
/// Gram-Schmidt leaves the triangular factor with a positive real diagonal,
/// which is the phase normalization that makes the distribution unitarily
/// invariant.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        let g = gaussian_matrix(dim, dim, rng);
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
        let mut degenerate = false;
        for j in 0..dim {
            let mut v = g.col(j);
            for _ in 0..2 {
                for q in &cols {
                    let c = dot(&v, q);
                    for (x, y) in v.iter_mut().zip(q) {
                        *x -= c * y;
                    }
                }
            }
            let n = vec_norm(&v);
            if n < 1e-8 {
                degenerate = true;
                break;
            }
            v.iter_mut().for_each(|x| *x /= n);
            cols.push(v);
        }
        if !degenerate {
            let mut u = ComplexMatrix::zeros(dim, dim);
            for (j, c) in cols.iter().enumerate() {
                u.set_col(j, c);
            }
            return u;
        }
    }
}

/// Random density matrix `G G^* / tr(G G^*)` of the given rank.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
    let g = gaussian_matrix(dim, rank.clamp(1, dim), rng);
    let gg = g.matmul(&g.adjoint()).expect("conformal");
    let t = gg.trace().re;
    gg.scale_real(1.0 / t).hermitian_part()
}

/// Random PSD matrix `G G^*` (unnormalized).
pub fn random_psd<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = gaussian_matrix(dim, dim, rng);
    g.matmul(&g.adjoint()).expect("conformal").hermitian_part()
}

/// Orthogonal projection onto a random `rank`-dimensional subspace.
pub fn random_projection<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
    let u = random_unitary(dim, rng);
    let v = u.submatrix(0, 0, dim, rank.min(dim));
    v.matmul(&v.adjoint()).expect("conformal").hermitian_part()
}

/// Kraus map with `count` Gaussian operators scaled by `1/√(dim_in·count)`.
///
/// Completely positive but not normalized in any way.
pub fn random_kraus<R: Rng + ?Sized>(
    dim_in: usize,
    dim_out: usize,
    count: usize,
    rng: &mut R,
) -> Result<KrausMap> {
    if count == 0 {
        return Err(Error::BadParams(
            "Kraus operator count must be positive".into(),
        ));
    }
    let s = 1.0 / ((dim_in * count) as f64).sqrt();
    let ops = (0..count)
        .map(|_| gaussian_matrix(dim_out, dim_in, rng).scale_real(s))
        .collect();
    KrausMap::new(dim_in, dim_out, ops)
}

/// Random trace-preserving channel: a Gaussian Kraus list renormalized by
/// `(Σ A_i^∨ A_i)^{-1/2}` on the right.
pub fn random_channel<R: Rng + ?Sized>(
    dim_in: usize,
    dim_out: usize,
    count: usize,
    rng: &mut R,
) -> Result<KrausMap> {
    let raw = random_kraus(dim_in, dim_out, count, rng)?;
    let eig = hermitian_eig(&raw.kraus_sum(), f64::INFINITY)?;
    if !(eig.min_eigenvalue() > 1e-12) {
        return Err(Error::BadParams(format!(
            "{count} operators of shape {dim_out}x{dim_in} cannot form a channel"
        )));
    }
    let v = &eig.eigenvectors;
    let inv_sqrt = ComplexMatrix::from_fn(dim_in, dim_in, |i, j| {
        (0..dim_in)
            .map(|k| v[(i, k)] * v[(j, k)].conj() / eig.eigenvalues[k].sqrt())
            .sum()
    });
    let ops = raw
        .operators()
        .iter()
        .map(|a| a.matmul(&inv_sqrt))
        .collect::<Result<Vec<_>>>()?;
    KrausMap::new(dim_in, dim_out, ops)
}

/// Random dilation with Haar unitary, full-rank environment state and a
/// random projection of rank `q_rank` on `K`.
pub fn random_dilation<R: Rng + ?Sized>(
    dim_k: usize,
    dim_h: usize,
    q_rank: usize,
    rng: &mut R,
) -> DilationSpec {
    let env_rank = rng.random_range(1..=dim_h);
    DilationSpec {
        dim_k,
        dim_h,
        u: random_unitary(dim_k * dim_h, rng),
        b: random_density(dim_h, env_rank, rng),
        q: random_projection(dim_k, q_rank, rng),
    }
}
