//! Subcommand implementations.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use hypflow_core::oracle::{
    circle_radial_function, fd_curvature, random_convex_curves, stationary_residual, CircleSpec,
};
use hypflow_core::{
    curvature_profile, fit_decay_rate, linear_model, monotonicity_report, resume, run, summarize,
    FlowConfig, FlowEngine, Mode, RadialCurve, RunOutcome,
};
use hypflow_core::flow::run::run_with_engine;
use hypflow_core::geometry::{ChebyshevTerms, CurveFields};

use crate::config::{parse_str, ScenarioConfig, EFFECTIVE_CONFIG_FILE};
use crate::io::{read_snapshot, snapshot_stem, write_json, write_series_csv, write_snapshot, SERIES_FILE, SUMMARY_FILE};
use crate::summary::{build_summary, RunSummary};
use crate::svg::write_svg;

#[derive(Debug)]
pub struct RunArtifacts {
    pub outcome: RunOutcome,
    pub summary: RunSummary,
    pub out_dir: PathBuf,
}

impl RunArtifacts {
    pub fn exit_code(&self) -> i32 {
        self.summary.exit_code
    }
}

fn write_artifacts(
    scenario: &ScenarioConfig,
    outcome: RunOutcome,
    effective_config: &str,
) -> Result<RunArtifacts> {
    let out = &scenario.out;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    fs::write(out.join(EFFECTIVE_CONFIG_FILE), effective_config)?;
    let flow = &scenario.flow;
    let summary = build_summary(&outcome, flow.alpha, flow.mode)?;
    if scenario.emit_csv {
        write_series_csv(&out.join(SERIES_FILE), &outcome.series)?;
        for snap in &outcome.snapshots {
            write_snapshot(out, snap, flow, &outcome.reference)?;
        }
    }
    if scenario.emit_json {
        write_json(&out.join(SUMMARY_FILE), &summary)?;
    }
    if scenario.emit_svg {
        let limit = Some(summary.limit.predicted_rho_inf);
        for snap in &outcome.snapshots {
            let path = out.join(format!("{}.svg", snapshot_stem(snap.step)));
            write_svg(&path, &snap.curve, limit)?;
        }
    }
    Ok(RunArtifacts {
        outcome,
        summary,
        out_dir: out.clone(),
    })
}

pub fn cmd_run(scenario: &ScenarioConfig) -> Result<RunArtifacts> {
    let initial = scenario
        .init
        .build(scenario.flow.n)
        .with_context(|| format!("building initial curve `{}`", scenario.init))?;
    let outcome = run(&scenario.flow, initial)?;
    write_artifacts(scenario, outcome, &scenario.render())
}

/// Runs several scenarios on separate threads. Output directories must be distinct.
pub fn cmd_run_batch(scenarios: &[ScenarioConfig]) -> Result<Vec<Result<RunArtifacts>>> {
    let mut seen = BTreeSet::new();
    for s in scenarios {
        if !seen.insert(&s.out) {
            bail!("two scenarios write to {}", s.out.display());
        }
    }
    Ok(std::thread::scope(|scope| {
        let handles: Vec<_> = scenarios
            .iter()
            .map(|s| scope.spawn(move || cmd_run(s)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(anyhow::anyhow!("scenario thread panicked"))))
            .collect()
    }))
}

/// Continues from a snapshot written by `run`. `alpha`, `mode` and `n` must not change.
pub fn cmd_resume(snapshot_csv: &Path, overrides: &[String]) -> Result<RunArtifacts> {
    let (curve, meta) = read_snapshot(snapshot_csv)?;
    let default_out = snapshot_csv
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .join("resumed");
    let base = ScenarioConfig {
        flow: meta.config.clone(),
        init: crate::config::InitSpec::CanonicalExample,
        out: default_out,
        emit_csv: true,
        emit_json: true,
        emit_svg: true,
    };
    let origin = crate::io::sidecar_path(snapshot_csv).display().to_string();
    let scenario = parse_str(&base.render(), &origin, overrides)?;
    let f = &scenario.flow;
    if f.alpha != meta.alpha || f.mode != meta.mode || f.n != meta.n {
        bail!(
            "resume cannot change alpha, mode or n (snapshot has alpha = {}, mode = {}, n = {})",
            meta.alpha,
            meta.mode,
            meta.n
        );
    }
    if f.t_end <= meta.t {
        bail!("t_end = {} does not lie after the snapshot time {}", f.t_end, meta.t);
    }
    let outcome = resume(f, meta.t, meta.step, curve, meta.reference)?;
    let effective = scenario
        .render()
        .lines()
        .map(|l| {
            if l.starts_with("init ") {
                format!("# init: resumed from {} at t = {}", snapshot_csv.display(), meta.t)
            } else {
                l.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
        + "\n";
    write_artifacts(&scenario, outcome, &effective)
}

pub fn cmd_render(curve_csv: &Path, svg: &Path, limit_radius: Option<f64>) -> Result<()> {
    let curve = crate::io::read_curve_csv(curve_csv)?;
    write_svg(svg, &curve, limit_radius)
}

/// Deliberate defects that `verify` must detect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Injection {
    /// Runs the flow backwards in time.
    FlipRhsSign,
    /// Uses the reversed Chebyshev ordering.
    TransposeChebyshev,
}

impl std::str::FromStr for Injection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "flip-rhs-sign" => Ok(Injection::FlipRhsSign),
            "transpose-chebyshev" => Ok(Injection::TransposeChebyshev),
            other => Err(format!(
                "unknown injection `{other}` (expected flip-rhs-sign or transpose-chebyshev)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut s = String::new();
        for c in &self.checks {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            s.push_str(&format!("{:width$}  {verdict}  {}\n", c.name, c.detail));
        }
        s
    }
}

const ALPHAS: [f64; 3] = [-0.5, -1.0, -2.0];
const MODES: [Mode; 2] = [Mode::AreaPreserving, Mode::LengthPreserving];

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn flow_run(config: FlowConfig, initial: RadialCurve, injection: Option<Injection>) -> hypflow_core::Result<RunOutcome> {
    let mut engine = FlowEngine::new(config)?;
    if injection == Some(Injection::FlipRhsSign) {
        engine = engine.with_reversed_sign();
    }
    run_with_engine(engine, initial)
}

fn check_stationarity(injection: Option<Injection>) -> Result<Check> {
    let mut worst = 0.0f64;
    for &alpha in &ALPHAS {
        for &mode in &MODES {
            for &r in &[0.1, 1.0, 2.23] {
                worst = worst.max(stationary_residual(r, alpha, mode, 64)?);
            }
        }
    }
    let config = FlowConfig::new(-1.0, Mode::AreaPreserving, 64)?.with_t_end(0.2);
    let outcome = flow_run(config, RadialCurve::circle(64, 1.0)?, injection)?;
    let drift = outcome
        .final_state
        .curve
        .rho()
        .iter()
        .fold(0.0f64, |m, r| m.max((r - 1.0).abs()));
    Ok(check(
        "circle-stationarity",
        worst < 1e-12 && drift < 1e-8 && outcome.reason.is_success(),
        format!("max |rho_t| = {worst:.2e}, drift after t = 0.2: {drift:.2e}"),
    ))
}

fn example_runs(injection: Option<Injection>) -> Result<Vec<(Mode, RunOutcome)>> {
    MODES
        .iter()
        .map(|&mode| {
            let config = FlowConfig::new(-1.0, mode, 64)?.with_t_end(1.0);
            Ok((mode, flow_run(config, RadialCurve::canonical_example(64)?, injection)?))
        })
        .collect()
}

fn check_conservation(runs: &[(Mode, RunOutcome)]) -> Check {
    let mut passed = true;
    let mut details = Vec::new();
    for (mode, outcome) in runs {
        let rows = outcome.series.rows();
        let drift = |q: fn(&hypflow_core::SeriesRow) -> f64| {
            rows.iter()
                .map(|r| ((q(r) - q(&rows[0])) / q(&rows[0])).abs())
                .fold(0.0f64, f64::max)
        };
        let d = match mode {
            Mode::AreaPreserving => drift(|r| r.area),
            Mode::LengthPreserving => drift(|r| r.length),
        };
        // A run that breaks down, or one whose monotone quantities turn, is not
        // conserving anything meaningful even if the preserved integral holds.
        let ok = outcome.reason.is_success()
            && d < 1e-6
            && monotonicity_report(&outcome.series, *mode).passed();
        passed &= ok;
        details.push(format!("{mode}: {:?}, drift {d:.2e}", outcome.reason));
    }
    check("conservation", passed, details.join("; "))
}

fn check_monotonicity(runs: &[(Mode, RunOutcome)]) -> Check {
    let mut passed = true;
    let mut details = Vec::new();
    for (mode, outcome) in runs {
        let report = monotonicity_report(&outcome.series, *mode);
        let worst = report
            .verdicts
            .iter()
            .map(|v| v.max_violation)
            .fold(0.0f64, f64::max);
        passed &= report.passed() && outcome.reason.is_success() && outcome.series.len() > 1;
        details.push(format!("{mode}: worst violation {worst:.2e}"));
    }
    check("monotonicity", passed, details.join("; "))
}

fn check_gauss_bonnet(curves: &[RadialCurve]) -> Check {
    let worst = curves
        .iter()
        .map(|c| {
            let s = summarize(c);
            (s.total_curvature - 2.0 * PI - s.area).abs() / (2.0 * PI + s.area)
        })
        .fold(0.0f64, f64::max);
    check(
        "gauss-bonnet",
        worst < 1e-8,
        format!("{} curves, worst relative residual {worst:.2e}", curves.len()),
    )
}

fn check_chebyshev(curves: &[RadialCurve], injection: Option<Injection>) -> Result<Check> {
    let sign = if injection == Some(Injection::TransposeChebyshev) { -1.0 } else { 1.0 };
    let mut worst = f64::INFINITY;
    for c in curves {
        let fields = CurveFields::new(c);
        for &alpha in &ALPHAS {
            let terms = ChebyshevTerms::new(&fields, alpha)?;
            worst = worst.min(sign * terms.gap() / terms.scale());
        }
    }
    let example = ChebyshevTerms::new(
        &CurveFields::new(&RadialCurve::canonical_example(128)?),
        -1.0,
    )?;
    let strict = sign * example.gap() / example.scale();
    Ok(check(
        "chebyshev",
        worst >= -1e-12 && strict > 1e-6,
        format!("min normalised gap {worst:.2e}, example {strict:.2e}"),
    ))
}

fn check_linear_rate(injection: Option<Injection>) -> Result<Check> {
    let (rho_inf, eps, n) = (1.0, 1e-3, 64);
    let initial = RadialCurve::from_fn(n, |t| rho_inf + eps * (2.0 * t).cos())?;
    let config = FlowConfig::new(-1.0, Mode::AreaPreserving, n)?.with_t_end(6.0);
    let outcome = flow_run(config, initial, injection)?;
    let predicted = linear_model(-1.0, rho_inf)?.lambda(2);
    let fit = fit_decay_rate(&outcome.series, 2, (0.5, 6.0));
    Ok(match fit {
        Ok(fit) => {
            let rel = (fit.rate - predicted).abs() / predicted;
            check(
                "linear-rate",
                outcome.reason.is_success() && rel < 0.05 && fit.r_squared > 0.999,
                format!("mode 2 rate {:.6} vs {predicted:.6} (rel {rel:.2e})", fit.rate),
            )
        }
        Err(e) => check("linear-rate", false, format!("{:?}: {e}", outcome.reason)),
    })
}

fn check_isometry() -> Result<Check> {
    let s = summarize(&circle_radial_function(&CircleSpec::new(1.0, 0.3)?, 128)?);
    let err = (s.length - 2.0 * PI * 1f64.sinh())
        .abs()
        .max((s.area - 2.0 * PI * (1f64.cosh() - 1.0)).abs())
        .max((s.kappa_max - 1.0 / 1f64.tanh()).abs());
    Ok(check(
        "isometry",
        err < 1e-10,
        format!("off-centre circle vs closed form: {err:.2e}"),
    ))
}

fn check_fd_order() -> Result<Check> {
    let errors = [32usize, 64, 128, 256]
        .iter()
        .map(|&n| {
            let c = RadialCurve::canonical_example(n)?;
            Ok(fd_curvature(&c)
                .iter()
                .zip(curvature_profile(&c))
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
        })
        .collect::<hypflow_core::Result<Vec<f64>>>()?;
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let last = *orders.last().expect("three ratios");
    Ok(check(
        "fd-order",
        (1.8..=2.2).contains(&last),
        format!("observed orders {orders:.3?}"),
    ))
}

pub fn cmd_verify(injection: Option<Injection>) -> Result<VerifyReport> {
    let curves = random_convex_curves(2024, 200, 128, 5)?;
    let runs = example_runs(injection)?;
    Ok(VerifyReport {
        checks: vec![
            check_stationarity(injection)?,
            check_conservation(&runs),
            check_monotonicity(&runs),
            check_gauss_bonnet(&curves),
            check_chebyshev(&curves, injection)?,
            check_linear_rate(injection)?,
            check_isometry()?,
            check_fd_order()?,
        ],
    })
}
