use choicert_core::linalg::{
    hermitian_eig, is_psd, kron, partial_trace, svd, ComplexMatrix, Factor,
};
use choicert_core::random::{gaussian_matrix, random_hermitian, seeded_rng};
use choicert_core::truncation::{
    compress, geometric_decay_operator, schatten_norm, svd_tail_norm, truncation_residual,
    SchattenExponent,
};
use proptest::prelude::*;

const EXPONENTS: [SchattenExponent; 3] = [
    SchattenExponent::TRACE,
    SchattenExponent::FROBENIUS,
    SchattenExponent::OPERATOR,
];

fn unitary_defect(v: &ComplexMatrix) -> f64 {
    v.adjoint_mul(v)
        .unwrap()
        .max_abs_diff(&ComplexMatrix::identity(v.cols()))
}

/// `√h` for a PSD `h`, through its eigendecomposition.
///
/// Rounding-level eigenvalues are zeroed first: `√1e-16 = 1e-8` would
/// otherwise dominate the comparison for rank-deficient `h`.
fn psd_sqrt(h: &ComplexMatrix) -> ComplexMatrix {
    let eig = hermitian_eig(h, 1e-9).unwrap();
    let floor = 1e-12 * eig.max_eigenvalue().max(0.0);
    let roots: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| if l > floor { l.sqrt() } else { 0.0 })
        .collect();
    let v = &eig.eigenvectors;
    v.matmul(&ComplexMatrix::from_real_diag(&roots))
        .unwrap()
        .matmul(&v.adjoint())
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hermitian_eig_reconstructs(dim in 1usize..=32, seed in any::<u64>()) {
        let a = random_hermitian(dim, &mut seeded_rng(seed));
        let eig = hermitian_eig(&a, 1e-12).unwrap();
        let err = eig.reconstruct().max_abs_diff(&a);
        prop_assert!(err <= 1e-10 * a.max_abs().max(1.0), "reconstruction error {err:e}");
        prop_assert!(unitary_defect(&eig.eigenvectors) <= 1e-10);
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn svd_reconstructs_and_is_adjoint_invariant(
        rows in 1usize..=32,
        cols in 1usize..=32,
        seed in any::<u64>(),
    ) {
        let a = gaussian_matrix(rows, cols, &mut seeded_rng(seed));
        let d = svd(&a).unwrap();
        let scale = a.max_abs().max(1.0);
        prop_assert!(d.reconstruct().max_abs_diff(&a) <= 1e-10 * scale);
        prop_assert!(unitary_defect(&d.left) <= 1e-10);
        prop_assert!(unitary_defect(&d.right) <= 1e-10);
        prop_assert!(d.singular_values.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(d.singular_values.iter().all(|&s| s >= 0.0));

        let dt = svd(&a.adjoint()).unwrap();
        prop_assert_eq!(d.singular_values.len(), dt.singular_values.len());
        for (x, y) in d.singular_values.iter().zip(&dt.singular_values) {
            prop_assert!((x - y).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn svd_of_low_rank_products(
        rows in 1usize..=12,
        cols in 1usize..=12,
        rank in 1usize..=4,
        seed in any::<u64>(),
    ) {
        let mut rng = seeded_rng(seed);
        let a = gaussian_matrix(rows, rank, &mut rng)
            .matmul(&gaussian_matrix(rank, cols, &mut rng))
            .unwrap();
        let d = svd(&a).unwrap();
        prop_assert!(d.reconstruct().max_abs_diff(&a) <= 1e-10 * a.max_abs().max(1.0));
        prop_assert!(unitary_defect(&d.left) <= 1e-10);
        prop_assert!(d.rank(1e-10) <= rank.min(rows).min(cols));
    }

    #[test]
    fn partial_trace_preserves_trace(d1 in 1usize..=6, d2 in 1usize..=6, seed in any::<u64>()) {
        let c = gaussian_matrix(d1 * d2, d1 * d2, &mut seeded_rng(seed));
        let t = c.trace();
        for f in [Factor::First, Factor::Second] {
            let r = partial_trace(&c, d1, d2, f).unwrap();
            prop_assert!((r.trace() - t).norm() <= 1e-12 * (1.0 + t.norm()) * (d1 * d2) as f64);
        }
    }

    #[test]
    fn partial_trace_of_products(d1 in 1usize..=5, d2 in 1usize..=5, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let a = gaussian_matrix(d1, d1, &mut rng);
        let b = gaussian_matrix(d2, d2, &mut rng);
        let ab = kron(&a, &b).unwrap();
        let first = partial_trace(&ab, d1, d2, Factor::First).unwrap();
        let second = partial_trace(&ab, d1, d2, Factor::Second).unwrap();
        prop_assert!(first.max_abs_diff(&b.scale(a.trace())) <= 1e-12 * 10.0 * d1 as f64);
        prop_assert!(second.max_abs_diff(&a.scale(b.trace())) <= 1e-12 * 10.0 * d2 as f64);
    }

    #[test]
    fn gram_matrices_are_psd(rows in 1usize..=16, cols in 1usize..=16, seed in any::<u64>()) {
        let b = gaussian_matrix(rows, cols, &mut seeded_rng(seed));
        let g = b.matmul(&b.adjoint()).unwrap();
        let v = is_psd(&g, 1e-9).unwrap();
        prop_assert!(v.is_psd, "min eigenvalue {:e}", v.min_eigenvalue);
        let shifted = g.scale_real(-1.0).try_sub(&ComplexMatrix::identity(rows)).unwrap();
        prop_assert!(!is_psd(&shifted, 1e-9).unwrap().is_psd);
    }

    #[test]
    fn schatten_norms_of_adjoint_and_modulus(
        rows in 1usize..=10,
        cols in 1usize..=10,
        seed in any::<u64>(),
    ) {
        let g = gaussian_matrix(rows, cols, &mut seeded_rng(seed));
        let modulus = psd_sqrt(&g.matmul(&g.adjoint()).unwrap());
        for p in EXPONENTS {
            let n = schatten_norm(&g, p).unwrap();
            prop_assert!((schatten_norm(&g.adjoint(), p).unwrap() - n).abs() <= 1e-9 * n.max(1.0));
            prop_assert!((schatten_norm(&modulus, p).unwrap() - n).abs() <= 1e-9 * n.max(1.0));
        }
        let frob = g.frobenius_norm();
        let n2 = schatten_norm(&g, SchattenExponent::FROBENIUS).unwrap();
        prop_assert!((n2 - frob).abs() <= 1e-12 * frob.max(1.0));
        let n1 = schatten_norm(&g, SchattenExponent::TRACE).unwrap();
        let ninf = schatten_norm(&g, SchattenExponent::OPERATOR).unwrap();
        prop_assert!(ninf <= n2 + 1e-12 && n2 <= n1 + 1e-12);
    }

    #[test]
    fn operator_norm_bounds_products(dim in 1usize..=10, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let a = gaussian_matrix(dim, dim, &mut rng);
        let g = gaussian_matrix(dim, dim, &mut rng);
        let a_op = schatten_norm(&a, SchattenExponent::OPERATOR).unwrap();
        for p in EXPONENTS {
            let bound = a_op * schatten_norm(&g, p).unwrap() + 1e-9;
            prop_assert!(schatten_norm(&a.matmul(&g).unwrap(), p).unwrap() <= bound);
            prop_assert!(schatten_norm(&g.matmul(&a).unwrap(), p).unwrap() <= bound);
        }
    }

    #[test]
    fn tail_formula_holds_for_every_rank_cut(
        rows in 1usize..=10,
        cols in 1usize..=10,
        p in prop_oneof![Just(1.0), Just(1.5), Just(2.0), Just(3.0), Just(f64::INFINITY)],
        seed in any::<u64>(),
    ) {
        let g = gaussian_matrix(rows, cols, &mut seeded_rng(seed));
        let p = if p.is_finite() { SchattenExponent::new(p).unwrap() } else { SchattenExponent::OPERATOR };
        for m in 0..=rows.min(cols) {
            prop_assert!(svd_tail_norm(&g, p, m).is_ok());
        }
        prop_assert!(svd_tail_norm(&g, p, rows.min(cols)).unwrap() <= 1e-9);
    }

    #[test]
    fn projections_have_unit_norm(dim in 1usize..=16) {
        let id = ComplexMatrix::identity(dim);
        for n in 1..=dim {
            let pn = compress(&id, n).unwrap();
            prop_assert_eq!(schatten_norm(&pn, SchattenExponent::OPERATOR).unwrap(), 1.0);
        }
    }

    #[test]
    fn residual_vanishes_at_full_level(dim in 1usize..=10, seed in any::<u64>()) {
        let g = gaussian_matrix(dim, dim, &mut seeded_rng(seed));
        for p in EXPONENTS {
            prop_assert_eq!(truncation_residual(&g, p, dim).unwrap(), 0.0);
        }
    }
}

#[test]
fn geometric_residuals_match_tail_sums() {
    let dim = 40;
    let g = geometric_decay_operator(dim);
    for n in 0..=dim {
        // p = 1: Σ_{k>n} 2^{-k}; p = ∞: 2^{-(n+1)}
        let tail: f64 = (n + 1..=dim).map(|k| 0.5f64.powi(k as i32)).sum();
        let r1 = truncation_residual(&g, SchattenExponent::TRACE, n).unwrap();
        assert!((r1 - tail).abs() <= 1e-12, "n={n}: {r1} vs {tail}");
        let rinf = truncation_residual(&g, SchattenExponent::OPERATOR, n).unwrap();
        let expect = if n < dim {
            0.5f64.powi(n as i32 + 1)
        } else {
            0.0
        };
        assert!((rinf - expect).abs() <= 1e-15);
    }
}

#[test]
fn convergence_holds_past_every_schedule_level() {
    let g = geometric_decay_operator(24);
    for eps in [1e-1, 1e-3, 1e-6] {
        let big_n =
            choicert_core::truncation::convergence_level(&g, SchattenExponent::TRACE, eps).unwrap();
        for n in big_n..=24 {
            assert!(truncation_residual(&g, SchattenExponent::TRACE, n).unwrap() <= eps);
        }
        if big_n > 0 {
            assert!(truncation_residual(&g, SchattenExponent::TRACE, big_n - 1).unwrap() > eps);
        }
    }
}
