//! Decision procedures on truncation ladders: complete positivity through
//! `L_n(μ) ≥ 0`, the subchannel bound `M_n ≤ I_n`, trace preservation
//! `tr μ(k_i k_j^∨) = δ_ij`, and the dual-map cross-check.
//!
//! A finite schedule that passes is evidence, not proof, for the
//! infinite-dimensional statement; a failure at any level is conclusive.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::cp_maps::{choi_from_kraus, choi_from_oracle, KrausMap, MapOracle};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, is_psd, ComplexMatrix};
use crate::random;

pub const DEFAULT_SCHEDULE: [usize; 5] = [2, 4, 8, 16, 32];
pub const DEFAULT_TOL: f64 = 1e-9;

/// Number of random `(a, b)` pairs [`crosscheck_dual_cp`] samples.
pub const DUAL_PAIRING_SAMPLES: usize = 10;
const DUAL_PAIRING_SEED: u64 = 0x5eed_d0a1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Cp,
    Subchannel,
    Channel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative PSD tolerance for `L_n`.
    pub psd: f64,
    /// Allowed excess of `λ_max(M_n)` over 1.
    pub subchannel: f64,
    /// Allowed `|tr μ(k_i k_j^∨) − δ_ij|`.
    pub trace: f64,
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Self {
            psd: tol,
            subchannel: tol,
            trace: tol,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::uniform(DEFAULT_TOL)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelResult {
    /// Schedule entry.
    pub level: usize,
    /// Input truncation actually used (clamped to a finite input dimension).
    pub input_level: usize,
    /// Output truncation actually used.
    pub output_level: usize,
    pub choi_min_eigenvalue: f64,
    pub choi_max_eigenvalue: f64,
    pub choi_psd: bool,
    /// `λ_max(M_n) − 1`.
    pub subchannel_max_excess: f64,
    /// `max_{i,j} |tr μ(k_i k_j^∨) − δ_ij|` over the input level.
    pub trace_preservation_max_dev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CpVerdict {
    pub pass: bool,
    /// First level whose Choi matrix is not PSD.
    pub witness_level: Option<usize>,
    pub witness_min_eigenvalue: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubchannelVerdict {
    pub pass: bool,
    pub max_excess: f64,
    /// Level attaining `max_excess`.
    pub max_excess_level: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelVerdict {
    pub pass: bool,
    pub max_deviation: f64,
    /// One-based `(i, j)` of the largest trace deviation.
    pub max_deviation_entry: (usize, usize),
    /// Output truncation used for trace functionals; `None` when exact traces were supplied.
    pub trace_output_level: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdicts {
    pub cp: CpVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subchannel: Option<SubchannelVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificationReport {
    pub mode: Mode,
    pub map: String,
    pub schedule: Vec<usize>,
    pub levels: Vec<LevelResult>,
    pub verdicts: Verdicts,
    pub tolerances: Tolerances,
}

impl CertificationReport {
    /// Verdict for the requested mode.
    pub fn passed(&self) -> bool {
        match self.mode {
            Mode::Cp => self.verdicts.cp.pass,
            Mode::Subchannel => self.verdicts.subchannel.as_ref().is_some_and(|v| v.pass),
            Mode::Channel => self.verdicts.channel.as_ref().is_some_and(|v| v.pass),
        }
    }
}

pub fn certify_cp(o: &MapOracle, schedule: &[usize], tol: f64) -> Result<CertificationReport> {
    certify(o, schedule, Tolerances::uniform(tol), Mode::Cp)
}

pub fn certify_subchannel(
    o: &MapOracle,
    schedule: &[usize],
    tol: f64,
) -> Result<CertificationReport> {
    certify(o, schedule, Tolerances::uniform(tol), Mode::Subchannel)
}

pub fn certify_channel(o: &MapOracle, schedule: &[usize], tol: f64) -> Result<CertificationReport> {
    certify(o, schedule, Tolerances::uniform(tol), Mode::Channel)
}

/// Maps a schedule entry to `(input level, output level)`.
///
/// Each side is clamped to its finite dimension, so maps between spaces of
/// different dimension are tested on the mixed matrices `L_{n,m}`. A level
/// beyond every finite dimension adds nothing and is rejected.
pub fn level_pair(o: &MapOracle, level: usize) -> Result<(usize, usize)> {
    if level == 0 {
        return Err(Error::OracleLevelUnsupported("level 0".into()));
    }
    let (din, dout) = (o.input_dim(), o.output_dim());
    if let (Some(a), Some(b)) = (din, dout) {
        if level > a.max(b) {
            return Err(Error::OracleLevelUnsupported(format!(
                "level {level} exceeds map dimensions {a} -> {b}"
            )));
        }
    }
    Ok((
        din.map_or(level, |d| level.min(d)),
        dout.map_or(level, |d| level.min(d)),
    ))
}

fn validate_schedule(schedule: &[usize]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::EmptySchedule("certification schedule".into()));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadParams(format!(
            "schedule must be strictly ascending, got {schedule:?}"
        )));
    }
    Ok(())
}

/// `M_n = [tr P_m μ(k_i k_j^∨) P_m]_{i,j}` at the truncation a schedule level maps to.
pub fn trace_matrix(o: &MapOracle, level: usize) -> Result<ComplexMatrix> {
    let (n, m) = level_pair(o, level)?;
    Ok(choi_from_oracle(o, n, m)?.trace_matrix())
}

/// `[tr μ(k_i k_j^∨)]_{i,j<n}`, from closed-form traces when the oracle has
/// them and otherwise from blocks truncated at output level `m`.
pub fn trace_functionals(o: &MapOracle, n: usize, m: usize) -> Result<ComplexMatrix> {
    let mut t = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            t[(i, j)] = match o.exact_trace(i, j) {
                Some(v) => v,
                None => o.evaluate(i, j, m)?.trace(),
            };
        }
    }
    Ok(t)
}

/// Runs the certification ladder and assembles a report.
///
/// Every per-level field is always computed; verdicts are filled up to the
/// requested mode. A channel verdict also requires the subchannel verdict,
/// so a channel pass always implies a subchannel pass.
pub fn certify(
    o: &MapOracle,
    schedule: &[usize],
    tolerances: Tolerances,
    mode: Mode,
) -> Result<CertificationReport> {
    validate_schedule(schedule)?;
    let pairs = schedule
        .iter()
        .map(|&l| level_pair(o, l))
        .collect::<Result<Vec<_>>>()?;

    let top_in = pairs.iter().map(|p| p.0).max().expect("non-empty schedule");
    let top_level = *schedule.last().expect("non-empty schedule");
    let trace_level = o.output_dim().unwrap_or(top_level);
    let exact = o.exact_trace(0, 0).is_some();
    let traces = trace_functionals(o, top_in, trace_level)?;

    let mut levels = Vec::with_capacity(schedule.len());
    for (&level, &(n, m)) in schedule.iter().zip(&pairs) {
        let choi = choi_from_oracle(o, n, m)?;
        let psd = is_psd(choi.matrix(), tolerances.psd)?;
        let excess = max_eigenvalue(&choi.trace_matrix())? - 1.0;
        let (dev, _) = max_trace_deviation(&traces, n);
        levels.push(LevelResult {
            level,
            input_level: n,
            output_level: m,
            choi_min_eigenvalue: psd.min_eigenvalue,
            choi_max_eigenvalue: psd.max_eigenvalue,
            choi_psd: psd.is_psd,
            subchannel_max_excess: excess,
            trace_preservation_max_dev: dev,
        });
    }

    let witness = levels.iter().find(|l| !l.choi_psd);
    let cp = CpVerdict {
        pass: witness.is_none(),
        witness_level: witness.map(|l| l.level),
        witness_min_eigenvalue: witness.map(|l| l.choi_min_eigenvalue),
    };

    let subchannel = (mode != Mode::Cp).then(|| {
        let worst = levels
            .iter()
            .max_by(|a, b| a.subchannel_max_excess.total_cmp(&b.subchannel_max_excess))
            .expect("non-empty");
        SubchannelVerdict {
            pass: cp.pass
                && levels
                    .iter()
                    .all(|l| l.subchannel_max_excess <= tolerances.subchannel),
            max_excess: worst.subchannel_max_excess,
            max_excess_level: worst.level,
        }
    });

    let channel = (mode == Mode::Channel).then(|| {
        let (max_deviation, (i, j)) = max_trace_deviation(&traces, top_in);
        ChannelVerdict {
            pass: cp.pass
                && max_deviation <= tolerances.trace
                && subchannel.as_ref().is_some_and(|s| s.pass),
            max_deviation,
            max_deviation_entry: (i + 1, j + 1),
            trace_output_level: (!exact).then_some(trace_level),
        }
    });

    Ok(CertificationReport {
        mode,
        map: o.to_string(),
        schedule: schedule.to_vec(),
        levels,
        verdicts: Verdicts {
            cp,
            subchannel,
            channel,
        },
        tolerances,
    })
}

fn max_eigenvalue(h: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eig(&h.hermitian_part(), f64::INFINITY)?.max_eigenvalue())
}

fn max_trace_deviation(traces: &ComplexMatrix, n: usize) -> (f64, (usize, usize)) {
    let mut best = (0.0, (0, 0));
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            let d = (traces[(i, j)] - Complex64::new(delta, 0.0)).norm();
            if d > best.0 {
                best = (d, (i, j));
            }
        }
    }
    best
}

/// Evidence that the dual of a CP map is CP.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualCheck {
    pub dual_choi_min_eigenvalue: f64,
    pub dual_choi_psd: bool,
    /// Largest `|tr(μ^∨(b)·a) − tr(b·μ(a))|` over the sample.
    pub max_pairing_error: f64,
    pub samples: usize,
    pub passed: bool,
}

/// Checks the Choi matrix of `dual(K)` for positivity and the trace pairing
/// `tr(μ^∨(b)·a) = tr(b·μ(a))` on `samples` random Gaussian pairs.
pub fn dual_crosscheck<R: Rng + ?Sized>(
    k: &KrausMap,
    tol: f64,
    samples: usize,
    rng: &mut R,
) -> Result<DualCheck> {
    let dual = k.dual();
    let psd = is_psd(choi_from_kraus(&dual).matrix(), tol)?;
    let mut max_pairing_error: f64 = 0.0;
    for _ in 0..samples {
        let a = random::gaussian_matrix(k.dim_in(), k.dim_in(), rng);
        let b = random::gaussian_matrix(k.dim_out(), k.dim_out(), rng);
        let lhs = dual.apply(&b)?.matmul(&a)?.trace();
        let rhs = b.matmul(&k.apply(&a)?)?.trace();
        max_pairing_error = max_pairing_error.max((lhs - rhs).norm());
    }
    Ok(DualCheck {
        dual_choi_min_eigenvalue: psd.min_eigenvalue,
        dual_choi_psd: psd.is_psd,
        max_pairing_error,
        samples,
        passed: psd.is_psd && max_pairing_error <= tol,
    })
}

/// [`dual_crosscheck`] with a fixed seed and [`DUAL_PAIRING_SAMPLES`] pairs;
/// failures are logged with their witness.
pub fn crosscheck_dual_cp(k: &KrausMap, tol: f64) -> bool {
    let mut rng = random::seeded_rng(DUAL_PAIRING_SEED);
    match dual_crosscheck(k, tol, DUAL_PAIRING_SAMPLES, &mut rng) {
        Ok(check) if check.passed => true,
        Ok(check) => {
            log::warn!(
                "dual cross-check failed: dual Choi min eigenvalue {:e}, max pairing error {:e}",
                check.dual_choi_min_eigenvalue,
                check.max_pairing_error
            );
            false
        }
        Err(e) => {
            log::warn!("dual cross-check failed: {e}");
            false
        }
    }
}
