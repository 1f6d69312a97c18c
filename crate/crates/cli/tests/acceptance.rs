//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use choicert_cli::mapfile::{BuiltinDoc, MapFile};
use choicert_core::certification::{
    certify_channel, certify_cp, certify_subchannel, crosscheck_dual_cp, trace_matrix, DEFAULT_TOL,
};
use choicert_core::constructions::{builtin_oracle, traceout_channel};
use choicert_core::cp_maps::{choi_from_kraus, kraus_from_choi, KrausMap, MapOracle};
use choicert_core::linalg::{hermitian_eig, ComplexMatrix};
use choicert_core::random::{gaussian_matrix, random_dilation, random_kraus, seeded_rng};
use choicert_core::truncation::{
    geometric_decay_operator, schatten_norm, svd_tail_norm, truncation_residual, SchattenExponent,
};
use rand::Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// 200 seeded Kraus maps with `dim_in, dim_out ≤ 8` and at most 5 operators.
fn kraus_corpus() -> Vec<KrausMap> {
    let mut rng = seeded_rng(0xC0_4B05);
    (0..200)
        .map(|_| {
            let din = rng.random_range(1..=8);
            let dout = rng.random_range(1..=8);
            let count = rng.random_range(1..=5);
            random_kraus(din, dout, count, &mut rng).expect("positive count")
        })
        .collect()
}

fn full_schedule(k: &KrausMap) -> Vec<usize> {
    (1..=k.dim_in().max(k.dim_out())).collect()
}

fn transpose_rejection() -> Check {
    let o =
        builtin_oracle("transpose", &BTreeMap::new(), (None, None)).map_err(|e| e.to_string())?;
    let r = certify_cp(&o, &[2, 3, 4], DEFAULT_TOL).map_err(|e| e.to_string())?;
    ensure(!r.passed(), || "transpose passed the CP ladder".into())?;
    ensure(r.verdicts.cp.witness_level == Some(2), || {
        format!("witness level {:?}", r.verdicts.cp.witness_level)
    })?;
    for l in &r.levels {
        // SWAP on the level-2 subspace has spectrum {1, 1, 1, -1}; larger levels add ±1 pairs
        ensure(
            !l.choi_psd && (l.choi_min_eigenvalue + 1.0).abs() <= 1e-9,
            || {
                format!(
                    "level {}: psd={}, min eigenvalue {}",
                    l.level, l.choi_psd, l.choi_min_eigenvalue
                )
            },
        )?;
    }
    Ok("fails at levels 2, 3, 4 with min eigenvalue -1".into())
}

fn cp_necessity(corpus: &[KrausMap]) -> Check {
    let mut worst = f64::INFINITY;
    for (idx, k) in corpus.iter().enumerate() {
        let r = certify_cp(&MapOracle::Kraus(k.clone()), &full_schedule(k), DEFAULT_TOL)
            .map_err(|e| format!("map {idx}: {e}"))?;
        let min = r
            .levels
            .iter()
            .map(|l| l.choi_min_eigenvalue)
            .fold(f64::INFINITY, f64::min);
        worst = worst.min(min);
        ensure(r.passed() && min >= -1e-9, || {
            format!("map {idx}: min eigenvalue {min:e}")
        })?;
    }
    Ok(format!(
        "{} maps pass, smallest Choi eigenvalue {worst:.3e}",
        corpus.len()
    ))
}

fn kraus_round_trip(corpus: &[KrausMap]) -> Check {
    let mut worst = 0.0f64;
    for (idx, k) in corpus.iter().enumerate() {
        let c = choi_from_kraus(k);
        let extracted = kraus_from_choi(&c, 1e-10).map_err(|e| format!("map {idx}: {e}"))?;
        let err = choi_from_kraus(&extracted)
            .matrix()
            .max_abs_diff(c.matrix());
        worst = worst.max(err);
        ensure(err <= 1e-9, || {
            format!("map {idx}: reconstruction error {err:e}")
        })?;
    }
    Ok(format!("max reconstruction error {worst:.3e}"))
}

fn duality(corpus: &[KrausMap]) -> Check {
    for (idx, k) in corpus.iter().enumerate() {
        ensure(crosscheck_dual_cp(k, 1e-9), || {
            format!("map {idx} failed the dual cross-check")
        })?;
    }
    Ok(format!("{} maps, 10 pairings each", corpus.len()))
}

fn subchannel_characterization() -> Check {
    let none = BTreeMap::new();
    let coshift =
        builtin_oracle("coshift-subchannel", &none, (None, None)).map_err(|e| e.to_string())?;
    let schedule = [2, 4, 8, 16];
    for &n in &schedule {
        let m = trace_matrix(&coshift, n).map_err(|e| e.to_string())?;
        let expected = ComplexMatrix::from_real_diag(
            &(0..n)
                .map(|i| if i == 0 { 0.0 } else { 1.0 })
                .collect::<Vec<_>>(),
        );
        let err = m.max_abs_diff(&expected);
        ensure(err <= 1e-12, || {
            format!("M_{n} differs from diag(0,1,...,1) by {err:e}")
        })?;
    }
    let sub = certify_subchannel(&coshift, &schedule, DEFAULT_TOL).map_err(|e| e.to_string())?;
    ensure(sub.passed(), || "coshift failed the subchannel test".into())?;
    let ch = certify_channel(&coshift, &schedule, DEFAULT_TOL).map_err(|e| e.to_string())?;
    let v = ch.verdicts.channel.as_ref().expect("channel verdict");
    ensure(
        !ch.passed() && (v.max_deviation - 1.0).abs() <= 1e-12 && v.max_deviation_entry == (1, 1),
        || format!("channel verdict {v:?}"),
    )?;

    let doubled = KrausMap::identity(4)
        .scaled(2.0)
        .map_err(|e| e.to_string())?;
    let r = certify_subchannel(&MapOracle::Kraus(doubled), &[1, 2, 3, 4], DEFAULT_TOL)
        .map_err(|e| e.to_string())?;
    let excess = r
        .verdicts
        .subchannel
        .as_ref()
        .expect("subchannel verdict")
        .max_excess;
    ensure(!r.passed() && (excess - 1.0).abs() <= 1e-9, || {
        format!("2·identity excess {excess}")
    })?;
    Ok("coshift M_n = diag(0,1,...,1), channel deviation 1 at (1,1); 2·identity excess 1".into())
}

fn traceout_construction() -> Check {
    let mut rng = seeded_rng(0x7ACE);
    let (mut full, mut partial) = (0, 0);
    let mut worst_dev = 0.0f64;
    for idx in 0..50 {
        let dim_k = rng.random_range(1..=4);
        let dim_h = rng.random_range(1..=4);
        let q_rank = if idx % 2 == 0 || dim_k == 1 {
            dim_k
        } else {
            rng.random_range(1..dim_k)
        };
        let spec = random_dilation(dim_k, dim_h, q_rank, &mut rng);
        let k = traceout_channel(&spec).map_err(|e| format!("spec {idx}: {e}"))?;
        let schedule: Vec<usize> = (1..=dim_k.max(dim_h)).collect();
        let r = certify_subchannel(&MapOracle::Kraus(k.clone()), &schedule, 1e-8)
            .map_err(|e| e.to_string())?;
        ensure(r.passed(), || format!("spec {idx}: not a subchannel"))?;
        let sum = k.kraus_sum();
        if q_rank == dim_k {
            full += 1;
            let dev = schatten_norm(
                &sum.try_sub(&ComplexMatrix::identity(dim_k)).unwrap(),
                SchattenExponent::OPERATOR,
            )
            .map_err(|e| e.to_string())?;
            worst_dev = worst_dev.max(dev);
            ensure(dev <= 1e-8, || {
                format!("spec {idx}: ‖Σ A^*A − I‖ = {dev:e}")
            })?;
        } else {
            partial += 1;
            let top = hermitian_eig(&sum.hermitian_part(), f64::INFINITY)
                .map_err(|e| e.to_string())?
                .max_eigenvalue();
            ensure(top <= 1.0 + 1e-8, || {
                format!("spec {idx}: λ_max(Σ A^*A) = {top}")
            })?;
        }
    }
    Ok(format!(
        "{full} full projections (max deviation {worst_dev:.2e}), {partial} partial"
    ))
}

fn schatten_suite() -> Check {
    let mut rng = seeded_rng(0x5C4A);
    let exps = [
        SchattenExponent::TRACE,
        SchattenExponent::FROBENIUS,
        SchattenExponent::OPERATOR,
    ];
    for idx in 0..100 {
        let rows = rng.random_range(1..=12);
        let cols = rng.random_range(1..=12);
        let g = gaussian_matrix(rows, cols, &mut rng);
        for p in exps {
            for m in 0..=rows.min(cols) {
                svd_tail_norm(&g, p, m).map_err(|e| format!("matrix {idx}, p={p}, m={m}: {e}"))?;
            }
        }
    }

    let g = geometric_decay_operator(64);
    for n in [2, 4, 8] {
        let r = truncation_residual(&g, SchattenExponent::TRACE, n).map_err(|e| e.to_string())?;
        let expected = 0.5f64.powi(n as i32);
        ensure((r - expected).abs() <= 1e-12, || {
            format!("level {n}: residual {r} vs {expected}")
        })?;
    }

    for idx in 0..100 {
        let dim = rng.random_range(1..=10);
        let a = gaussian_matrix(dim, dim, &mut rng);
        let g = gaussian_matrix(dim, dim, &mut rng);
        let a_op = schatten_norm(&a, SchattenExponent::OPERATOR).map_err(|e| e.to_string())?;
        for p in exps {
            let bound = a_op * schatten_norm(&g, p).map_err(|e| e.to_string())? + 1e-9;
            let ag = schatten_norm(&a.matmul(&g).unwrap(), p).map_err(|e| e.to_string())?;
            let ga = schatten_norm(&g.matmul(&a).unwrap(), p).map_err(|e| e.to_string())?;
            ensure(ag.max(ga) <= bound, || {
                format!("pair {idx}, p={p}: {} > {bound}", ag.max(ga))
            })?;
        }
    }
    Ok("tail formula on 100 matrices, geometric residuals 2^-n, product bound on 100 pairs".into())
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_choicert"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn write_builtin(
    dir: &Path,
    name: &str,
    params: &[(&str, f64)],
    dims: (Option<usize>, Option<usize>),
) -> String {
    let doc = MapFile::Builtin(BuiltinDoc {
        name: name.to_string(),
        params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        dim_in: dims.0,
        dim_out: dims.1,
    });
    let path = dir.join(format!("{name}.json"));
    doc.write(&path).expect("temp dir is writable");
    path.display().to_string()
}

/// Builtin name, parameters, dimensions, expected exit code in channel mode.
type GoldenCase = (
    &'static str,
    &'static [(&'static str, f64)],
    (Option<usize>, Option<usize>),
    i32,
);

fn cli_golden() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let cases: [GoldenCase; 7] = [
        ("identity", &[], (None, None), 0),
        ("transpose", &[], (None, None), 1),
        ("depolarize", &[], (Some(4), Some(3)), 0),
        ("shift-isometry", &[], (None, None), 0),
        ("coshift-subchannel", &[], (None, None), 1),
        ("diagonal-damping", &[("gamma", 0.5)], (None, None), 1),
        ("random-kraus", &[("k", 3.0)], (Some(3), Some(4)), 0),
    ];
    for (name, params, dims, expected) in cases {
        let path = write_builtin(d, name, params, dims);
        let args = [
            "certify",
            path.as_str(),
            "--mode",
            "channel",
            "--schedule",
            "1,2,4",
            "--format",
            "json",
            "--seed",
            "17",
        ];
        let (c1, o1) = run_cli(&args);
        let (c2, o2) = run_cli(&args);
        ensure(c1 == expected && c2 == expected, || {
            format!("{name}: exit codes {c1}, {c2}, expected {expected}")
        })?;
        ensure(o1 == o2, || {
            format!("{name}: json output differs between runs")
        })?;
        let v: serde_json::Value =
            serde_json::from_slice(&o1).map_err(|e| format!("{name}: {e}"))?;
        for key in [
            "mode",
            "map",
            "schedule",
            "levels",
            "verdicts",
            "tolerances",
        ] {
            ensure(v.get(key).is_some(), || {
                format!("{name}: report lacks `{key}`")
            })?;
        }
        ensure(
            v["verdicts"]["channel"]["pass"] == serde_json::json!(expected == 0),
            || format!("{name}: channel verdict disagrees with exit code"),
        )?;
    }

    let malformed: [(&str, &str); 6] = [
        ("truncated.json", r#"{"type": "builtin", "name": "#),
        (
            "unknown_field.json",
            r#"{"type":"builtin","name":"identity","colour":"red"}"#,
        ),
        ("unknown_type.json", r#"{"type":"lindblad","dim":2}"#),
        (
            "unknown_builtin.json",
            r#"{"type":"builtin","name":"frobnicate"}"#,
        ),
        (
            "bad_payload.json",
            r#"{"type":"kraus","dim_in":2,"dim_out":2,"operators":[{"rows":2,"cols":2,"data":[[1,0]]}]}"#,
        ),
        (
            "complex_string.json",
            r#"{"type":"choi","n":1,"m":1,"matrix":{"rows":1,"cols":1,"data":["1+0i"]}}"#,
        ),
    ];
    for (file, body) in malformed {
        let path = d.join(file);
        std::fs::write(&path, body).map_err(|e| e.to_string())?;
        let (code, _) = run_cli(&["certify", path.to_str().unwrap()]);
        ensure(code == 2, || format!("{file}: exit {code}, expected 2"))?;
    }
    let missing = d.join("absent.json");
    let (code, _) = run_cli(&["certify", missing.to_str().unwrap()]);
    ensure(code == 2, || format!("missing file: exit {code}"))?;
    Ok("7 builtins byte-stable with expected exit codes; 7 malformed inputs exit 2".into())
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: Box<dyn Fn() -> Check>,
}

fn main() {
    let corpus = std::rc::Rc::new(kraus_corpus());
    let (c2, c3, c4) = (corpus.clone(), corpus.clone(), corpus);
    let criteria = vec![
        Criterion {
            id: 1,
            name: "transpose rejection",
            budget: Duration::from_secs(1),
            run: Box::new(transpose_rejection),
        },
        Criterion {
            id: 2,
            name: "CP necessity",
            budget: Duration::from_secs(30),
            run: Box::new(move || cp_necessity(&c2)),
        },
        Criterion {
            id: 3,
            name: "Kraus round trip",
            budget: Duration::from_secs(30),
            run: Box::new(move || kraus_round_trip(&c3)),
        },
        Criterion {
            id: 4,
            name: "duality",
            budget: Duration::from_secs(30),
            run: Box::new(move || duality(&c4)),
        },
        Criterion {
            id: 5,
            name: "subchannel characterization",
            budget: Duration::from_secs(5),
            run: Box::new(subchannel_characterization),
        },
        Criterion {
            id: 6,
            name: "trace-out construction",
            budget: Duration::from_secs(60),
            run: Box::new(traceout_construction),
        },
        Criterion {
            id: 7,
            name: "Schatten/truncation suite",
            budget: Duration::from_secs(30),
            run: Box::new(schatten_suite),
        },
        Criterion {
            id: 8,
            name: "CLI golden tests",
            budget: Duration::from_secs(5),
            run: Box::new(cli_golden),
        },
    ];

    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if elapsed <= c.budget => (true, d),
            Ok(d) => (
                false,
                format!("{d}; took {elapsed:.2?}, budget {:?}", c.budget),
            ),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {} [{}]: {} ({:.3}s) {}",
            c.id,
            c.name,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            detail
        );
    }
    println!(
        "acceptance: {}/{} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
