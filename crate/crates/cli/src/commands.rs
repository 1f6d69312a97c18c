use std::fmt::Write as _;
use std::path::Path;

use choicert_core::certification::{
    certify, CertificationReport, Mode, Tolerances, DEFAULT_SCHEDULE,
};
use choicert_core::constructions::traceout_channel;
use choicert_core::cp_maps::{choi_from_kraus, kraus_from_choi, MapOracle};
use choicert_core::linalg::ComplexMatrix;
use choicert_core::truncation::{
    geometric_decay_operator, image_residual_schedule, residual_schedule, schatten_norm,
    ResidualPoint, SchattenExponent,
};
use choicert_core::Error;
use serde::Serialize;

use crate::mapfile::{Document, Loaded, MapFile};
use crate::{Cli, CliError, Command, Format, ModeArg, EXIT_FAIL, EXIT_PASS};

type CmdResult = Result<(i32, String), CliError>;

pub fn dispatch(cli: &Cli) -> CmdResult {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(CliError::Usage(format!(
            "--tol must be positive, got {}",
            cli.tol
        )));
    }
    if !(cli.rank_tol >= 0.0 && cli.rank_tol.is_finite()) {
        return Err(CliError::Usage(format!(
            "--rank-tol must be non-negative, got {}",
            cli.rank_tol
        )));
    }
    match &cli.command {
        Command::Certify { input, mode } => cmd_certify(cli, input, *mode),
        Command::ExtractKraus { input, output } => cmd_extract_kraus(cli, input, output),
        Command::Convergence { input, p, probe } => {
            cmd_convergence(cli, input, p, probe.as_deref())
        }
        Command::BuildTraceout { input, output } => cmd_build_traceout(cli, input, output),
    }
}

/// Powers of two below a finite dimension followed by the dimension itself;
/// the fixed default ladder when nothing bounds the levels.
pub fn default_schedule(dim: Option<usize>) -> Vec<usize> {
    match dim {
        None => DEFAULT_SCHEDULE.to_vec(),
        Some(d) => {
            let mut s: Vec<usize> = DEFAULT_SCHEDULE
                .iter()
                .copied()
                .filter(|&l| l < d)
                .collect();
            s.push(d);
            s
        }
    }
}

fn map_dimension(o: &MapOracle) -> Option<usize> {
    match (o.input_dim(), o.output_dim()) {
        (Some(a), Some(b)) => Some(a.max(b)),
        _ => None,
    }
}

fn schedule_for(cli: &Cli, dim: Option<usize>) -> Vec<usize> {
    cli.schedule
        .clone()
        .unwrap_or_else(|| default_schedule(dim))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn expect_kind(doc: &MapFile, kind: &str, command: &str) -> Result<(), CliError> {
    if doc.kind() != kind {
        return Err(CliError::Usage(format!(
            "{command} needs a `{kind}` document, got `{}`",
            doc.kind()
        )));
    }
    Ok(())
}

fn load_oracle(cli: &Cli, doc: &MapFile) -> Result<MapOracle, CliError> {
    Ok(match doc.load(cli.seed)? {
        Loaded::Map(o) => o,
        Loaded::Dilation(spec) => MapOracle::Kraus(traceout_channel(&spec)?),
    })
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_certify(cli: &Cli, input: &Path, mode: ModeArg) -> CmdResult {
    let doc = MapFile::read(input)?;
    let oracle = load_oracle(cli, &doc)?;
    let schedule = schedule_for(cli, map_dimension(&oracle));
    let mode = match mode {
        ModeArg::Cp => Mode::Cp,
        ModeArg::Subchannel => Mode::Subchannel,
        ModeArg::Channel => Mode::Channel,
    };
    let report = certify(&oracle, &schedule, Tolerances::uniform(cli.tol), mode)?;
    let code = if report.passed() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    };
    let out = match cli.format {
        Format::Json => to_json(&report),
        Format::Text => render_certification(&report),
    };
    Ok((code, out))
}

pub fn render_certification(r: &CertificationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "map:   {}", r.map);
    let mode = match r.mode {
        Mode::Cp => "cp",
        Mode::Subchannel => "subchannel",
        Mode::Channel => "channel",
    };
    let _ = writeln!(s, "mode:  {mode}");
    let _ = writeln!(
        s,
        "{:>6} {:>4} {:>4} {:>13} {:>13} {:>4} {:>13} {:>13}",
        "level", "n", "m", "min_eig", "max_eig", "psd", "excess", "trace_dev"
    );
    for l in &r.levels {
        let _ = writeln!(
            s,
            "{:>6} {:>4} {:>4} {:>13.5e} {:>13.5e} {:>4} {:>13.5e} {:>13.5e}",
            l.level,
            l.input_level,
            l.output_level,
            l.choi_min_eigenvalue,
            l.choi_max_eigenvalue,
            if l.choi_psd { "yes" } else { "no" },
            l.subchannel_max_excess,
            l.trace_preservation_max_dev
        );
    }
    let cp = &r.verdicts.cp;
    match (cp.witness_level, cp.witness_min_eigenvalue) {
        (Some(level), Some(ev)) => {
            let _ = writeln!(
                s,
                "cp:         FAIL (level {level}, min eigenvalue {ev:.6e})"
            );
        }
        _ => {
            let _ = writeln!(s, "cp:         PASS");
        }
    }
    if let Some(v) = &r.verdicts.subchannel {
        let _ = writeln!(
            s,
            "subchannel: {} (max excess {:.6e} at level {})",
            pass_fail(v.pass),
            v.max_excess,
            v.max_excess_level
        );
    }
    if let Some(v) = &r.verdicts.channel {
        let _ = write!(
            s,
            "channel:    {} (max trace deviation {:.6e} at ({}, {})",
            pass_fail(v.pass),
            v.max_deviation,
            v.max_deviation_entry.0,
            v.max_deviation_entry.1
        );
        match v.trace_output_level {
            Some(m) => {
                let _ = writeln!(s, ", traces truncated at {m})");
            }
            None => {
                let _ = writeln!(s, ", exact traces)");
            }
        }
    }
    s
}

#[derive(Debug, Serialize)]
struct ExtractReport {
    status: &'static str,
    n: usize,
    m: usize,
    rank_tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    operators: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reconstruction_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_eigenvalue: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<String>,
}

fn cmd_extract_kraus(cli: &Cli, input: &Path, output: &Path) -> CmdResult {
    let doc = MapFile::read(input)?;
    expect_kind(&doc, "choi", "extract-kraus")?;
    let Loaded::Map(MapOracle::Choi(choi)) = doc.load(cli.seed)? else {
        unreachable!("choi documents load as Choi oracles");
    };
    let mut report = ExtractReport {
        status: "ok",
        n: choi.n(),
        m: choi.m(),
        rank_tol: cli.rank_tol,
        operators: None,
        reconstruction_error: None,
        min_eigenvalue: None,
        output: None,
    };
    let code = match kraus_from_choi(&choi, cli.rank_tol) {
        Ok(k) => {
            let rebuilt = choi_from_kraus(&k);
            report.operators = Some(k.len());
            report.reconstruction_error = Some(rebuilt.matrix().max_abs_diff(choi.matrix()));
            MapFile::from_kraus(&k).write(output)?;
            report.output = Some(output.display().to_string());
            EXIT_PASS
        }
        Err(Error::NotPsd { min_eigenvalue }) => {
            report.status = "not_psd";
            report.min_eigenvalue = Some(min_eigenvalue);
            EXIT_FAIL
        }
        Err(e) => return Err(e.into()),
    };
    let out = match cli.format {
        Format::Json => to_json(&report),
        Format::Text => {
            let mut s = format!("choi:  n={}, m={}\n", report.n, report.m);
            match (report.operators, report.reconstruction_error) {
                (Some(count), Some(err)) => {
                    let _ = writeln!(s, "kraus operators:      {count}");
                    let _ = writeln!(s, "reconstruction error: {err:.6e}");
                    let _ = writeln!(s, "written to {}", output.display());
                }
                _ => {
                    let _ = writeln!(
                        s,
                        "NOT PSD: min eigenvalue {:.6e}",
                        report.min_eigenvalue.unwrap_or(f64::NAN)
                    );
                }
            }
            s
        }
    };
    Ok((code, out))
}

#[derive(Debug, Serialize)]
struct ConvergenceReport {
    p: SchattenExponent,
    input: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    map: Option<String>,
    dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    output_level: Option<usize>,
    levels: Vec<ResidualPoint>,
    warnings: Vec<String>,
}

fn read_probe(path: &Path) -> Result<ComplexMatrix, CliError> {
    match Document::read(path)? {
        Document::Matrix(m) => m.to_matrix("probe"),
        Document::Map(d) => Err(CliError::Usage(format!(
            "--probe must be a bare matrix, got a `{}` document",
            d.kind()
        ))),
    }
}

fn cmd_convergence(cli: &Cli, input: &Path, p: &str, probe: Option<&Path>) -> CmdResult {
    let p: SchattenExponent = p.parse()?;
    let mut report = match Document::read(input)? {
        Document::Matrix(m) => {
            if probe.is_some() {
                return Err(CliError::Usage("--probe only applies to map inputs".into()));
            }
            let g = m.to_matrix("input")?;
            let dim = g.ensure_square()?;
            let levels = schedule_for(cli, Some(dim));
            ConvergenceReport {
                p,
                input: "operator",
                map: None,
                dim,
                output_level: None,
                levels: residual_schedule(&g, p, &levels)?,
                warnings: Vec::new(),
            }
        }
        Document::Map(doc) => {
            let oracle = load_oracle(cli, &doc)?;
            let g = match probe {
                Some(path) => read_probe(path)?,
                None => {
                    let dim = oracle
                        .input_dim()
                        .or_else(|| cli.schedule.as_ref().and_then(|s| s.last().copied()))
                        .unwrap_or(*DEFAULT_SCHEDULE.last().expect("non-empty"));
                    geometric_decay_operator(dim)
                }
            };
            let dim = g.ensure_square()?;
            // one extra output level holds the image of every builtin family
            let m = oracle.output_dim().unwrap_or(dim + 1);
            let levels = schedule_for(cli, Some(dim));
            let points = image_residual_schedule(|x| oracle.apply(x, m), &g, p, &levels)?;
            ConvergenceReport {
                p,
                input: "map",
                map: Some(oracle.to_string()),
                dim,
                output_level: Some(m),
                levels: points,
                warnings: Vec::new(),
            }
        }
    };
    for w in report.levels.windows(2) {
        if w[1].residual > w[0].residual + cli.tol {
            report.warnings.push(format!(
                "residual rises from {:.6e} at level {} to {:.6e} at level {}",
                w[0].residual, w[0].level, w[1].residual, w[1].level
            ));
        }
    }
    let out = match cli.format {
        Format::Json => to_json(&report),
        Format::Text => {
            let mut s = String::new();
            if let Some(map) = &report.map {
                let _ = writeln!(s, "map:   {map}");
            }
            let _ = writeln!(s, "p:     {}", report.p);
            let _ = writeln!(s, "{:>6} {:>15}", "level", "residual");
            for pt in &report.levels {
                let _ = writeln!(s, "{:>6} {:>15.8e}", pt.level, pt.residual);
            }
            for w in &report.warnings {
                let _ = writeln!(s, "WARN: {w}");
            }
            s
        }
    };
    Ok((EXIT_PASS, out))
}

#[derive(Debug, Serialize)]
struct TraceoutSummary {
    dim_in: usize,
    dim_out: usize,
    operators: usize,
    /// `‖Σ A_i^∨ A_i − I‖_∞`.
    kraus_sum_deviation: f64,
    kraus_sum_max_eigenvalue: f64,
    subchannel: bool,
    channel: bool,
    output: String,
}

fn cmd_build_traceout(cli: &Cli, input: &Path, output: &Path) -> CmdResult {
    let doc = MapFile::read(input)?;
    expect_kind(&doc, "dilation", "build-traceout")?;
    let Loaded::Dilation(spec) = doc.load(cli.seed)? else {
        unreachable!("dilation documents load as dilations");
    };
    let k = traceout_channel(&spec)?;
    let sum = k.kraus_sum();
    let deviation = schatten_norm(
        &sum.try_sub(&ComplexMatrix::identity(k.dim_in()))?,
        SchattenExponent::OPERATOR,
    )?;
    let max_eig = choicert_core::linalg::hermitian_eig(&sum.hermitian_part(), f64::INFINITY)?
        .max_eigenvalue();
    let oracle = MapOracle::Kraus(k.clone());
    let schedule = schedule_for(cli, map_dimension(&oracle));
    let report = certify(
        &oracle,
        &schedule,
        Tolerances::uniform(cli.tol),
        Mode::Channel,
    )?;
    MapFile::from_kraus(&k).write(output)?;

    let summary = TraceoutSummary {
        dim_in: k.dim_in(),
        dim_out: k.dim_out(),
        operators: k.len(),
        kraus_sum_deviation: deviation,
        kraus_sum_max_eigenvalue: max_eig,
        subchannel: report.verdicts.subchannel.as_ref().is_some_and(|v| v.pass),
        channel: report.passed(),
        output: output.display().to_string(),
    };
    let code = if summary.subchannel {
        EXIT_PASS
    } else {
        EXIT_FAIL
    };
    let out = match cli.format {
        Format::Json => to_json(&summary),
        Format::Text => {
            let kind = if summary.channel {
                "channel"
            } else if summary.subchannel {
                "subchannel"
            } else {
                "neither"
            };
            format!(
                "trace-out map {} -> {}\nkraus operators:        {}\n‖Σ A^*A − I‖_∞:          {:.6e}\nλ_max(Σ A^*A):          {:.6e}\nverdict:                {kind}\nwritten to {}\n",
                summary.dim_in,
                summary.dim_out,
                summary.operators,
                summary.kraus_sum_deviation,
                summary.kraus_sum_max_eigenvalue,
                summary.output
            )
        }
    };
    Ok((code, out))
}
