//! End-to-end acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::thread;
use std::time::Instant;

use hypflow_cli::commands::{cmd_resume, cmd_run};
use hypflow_cli::config::parse_str;
use hypflow_cli::io::snapshot_stem;
use hypflow_core::diagnostics::evolution::curvature_time_derivative;
use hypflow_core::geometry::{ChebyshevTerms, CurveFields};
use hypflow_core::oracle::{fd_curvature, linearized_evolution, random_convex_curves};
use hypflow_core::{
    curvature_profile, fit_decay_rate, fourier_modes, linear_model, monotonicity_report, run,
    summarize, ConservedReference, FlowConfig, FlowEngine, GeometricSummary, Mode, RadialCurve,
    RunOutcome, StopReason,
};

const MODES: [Mode; 2] = [Mode::AreaPreserving, Mode::LengthPreserving];
const ALPHAS: [f64; 3] = [-0.5, -1.0, -2.0];

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

/// Lowest `min κ − min(min κ(0), 1)` over the recorded rows of a run.
fn convexity_margin(outcome: &RunOutcome) -> f64 {
    let rows = outcome.series.rows();
    let floor = rows[0].kappa_min.min(1.0);
    rows.iter().map(|r| r.kappa_min - floor).fold(f64::INFINITY, f64::min)
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn circle_stationarity(margins: &mut Vec<(String, f64)>) -> Verdict {
    let mut worst = 0.0f64;
    let mut slowest = 0.0f64;
    let mut ok = true;
    for alpha in ALPHAS {
        for mode in MODES {
            let start = Instant::now();
            let config = FlowConfig::new(alpha, mode, 128).unwrap().with_t_end(1.0);
            let outcome = run(&config, RadialCurve::circle(128, 1.0).unwrap()).unwrap();
            slowest = slowest.max(start.elapsed().as_secs_f64());
            ok &= outcome.reason == StopReason::ReachedTEnd;
            // Row extremes are refined between samples, so they bound every sample.
            for row in outcome.series.rows() {
                worst = worst.max((row.rho_min - 1.0).abs()).max((row.rho_max - 1.0).abs());
            }
            worst = worst.max(max_abs(outcome.final_state.curve.rho().iter().map(|r| r - 1.0)));
            margins.push((format!("circle alpha={alpha} {mode}"), convexity_margin(&outcome)));
        }
    }
    verdict(
        ok && worst < 1e-8 && slowest < 5.0,
        format!("max |rho - 1| = {worst:.2e} over 6 runs, slowest {slowest:.2}s"),
    )
}

/// `I₀(1) = Σ 1/(4^k (k!)²)`.
fn bessel_i0_at_one() -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..30 {
        term /= 4.0 * (k * k) as f64;
        sum += term;
    }
    sum
}

fn conservation(runs: &[(Mode, RunOutcome)]) -> Verdict {
    let mut ok = true;
    let mut details = Vec::new();
    for (mode, outcome) in runs {
        let rows = outcome.series.rows();
        let (name, drift) = match mode {
            Mode::AreaPreserving => ("A", max_abs(rows.iter().map(|r| (r.area - rows[0].area) / rows[0].area))),
            Mode::LengthPreserving => (
                "L",
                max_abs(rows.iter().map(|r| (r.length - rows[0].length) / rows[0].length)),
            ),
        };
        ok &= drift < 1e-6 && outcome.reason.is_success();
        details.push(format!("{mode}: max rel {name} drift {drift:.2e} over {} rows", rows.len()));
    }
    verdict(ok, details.join("; "))
}

fn monotonicity(runs: &[(Mode, RunOutcome)]) -> Verdict {
    let mut ok = true;
    let mut details = Vec::new();
    for (mode, outcome) in runs {
        let report = monotonicity_report(&outcome.series, *mode);
        ok &= report.passed();
        for v in &report.verdicts {
            details.push(format!("{mode} {}: {:.1e}/{:.1e}", v.quantity, v.max_violation, v.tolerance));
        }
    }
    verdict(ok, details.join("; "))
}

fn limit_shape(runs: &[(Mode, RunOutcome)]) -> Verdict {
    // ρ₀ = 2 + cos θ encloses 2π(cosh 2 · I₀(1) − 1).
    let a0_oracle = 2.0 * PI * (2f64.cosh() * bessel_i0_at_one() - 1.0);
    let mut ok = true;
    let mut details = Vec::new();
    for (mode, outcome) in runs {
        let reference = outcome.reference;
        let a0_err = (reference.initial_area - a0_oracle).abs();
        let rho_inf = reference.limit_radius(*mode).unwrap();
        let last = outcome.series.last().unwrap();
        let (name, value, target) = match mode {
            Mode::AreaPreserving => ("L", last.length, 2.0 * PI * rho_inf.sinh()),
            Mode::LengthPreserving => ("A", last.area, 2.0 * PI * (rho_inf.cosh() - 1.0)),
        };
        let rel = (value - target).abs() / target;
        ok &= outcome.reason == StopReason::Converged
            && last.deficit < 1e-10
            && rel < 1e-4
            && a0_err < 1e-10;
        details.push(format!(
            "{mode}: {:?} at t={:.1}, Delta={:.1e}, rho_inf={rho_inf:.6}, {name} rel err {rel:.1e}",
            outcome.reason, outcome.final_state.t, last.deficit
        ));
    }
    details.push(format!("A0 = {a0_oracle:.6} (quadrature vs series {:.1e})", {
        (runs[0].1.reference.initial_area - a0_oracle).abs()
    }));
    verdict(ok, details.join("; "))
}

fn exponential_rate(margins: &mut Vec<(String, f64)>) -> Verdict {
    let (rho_inf, eps, n) = (1.0, 1e-3, 128);
    let mut ok = true;
    let mut details = Vec::new();
    for mode in MODES {
        let start = Instant::now();
        let initial = RadialCurve::from_fn(n, |t| rho_inf * (1.0 + eps * (2.0 * t).cos())).unwrap();
        let config = FlowConfig::new(-1.0, mode, n).unwrap().with_t_end(8.0);
        let outcome = run(&config, initial).unwrap();
        let predicted = linear_model(-1.0, rho_inf).unwrap().lambda(2);
        let fit = fit_decay_rate(&outcome.series, 2, (0.5, 8.0)).unwrap();
        let rel = (fit.rate - predicted).abs() / predicted;
        let secs = start.elapsed().as_secs_f64();
        ok &= rel < 0.05 && fit.r_squared > 0.999 && secs < 30.0;
        details.push(format!(
            "{mode}: rate {:.6} vs 3/cosh^2(1) = {predicted:.6} (rel {rel:.1e}, r2 {:.8}, {secs:.1}s)",
            fit.rate, fit.r_squared
        ));
        margins.push((format!("perturbed circle {mode}"), convexity_margin(&outcome)));
    }
    verdict(ok, details.join("; "))
}

fn convexity(margins: &[(String, f64)]) -> Verdict {
    let (name, worst) = margins
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .cloned()
        .unwrap();
    verdict(
        worst >= -1e-6,
        format!("{} runs, smallest margin {worst:.2e} ({name})", margins.len()),
    )
}

fn evolution_consistency(runs: &[(Mode, RunOutcome)]) -> Verdict {
    let (mode, outcome) = &runs[0];
    let engine = FlowEngine::new(FlowConfig::new(-1.0, *mode, outcome.final_state.curve.len()).unwrap()).unwrap();
    let mut ok = true;
    let mut details = Vec::new();
    // Probe at recorded snapshots of the run, in the frame the run used.
    for snap in outcome.snapshots.iter().filter(|s| s.t > 0.0).take(3) {
        let state = engine.state_at(snap.curve.clone(), snap.t, snap.step).unwrap();
        let delta = 0.25 * engine.adaptive_dt(&state).unwrap();
        let s1 = engine.step(&state, delta).unwrap();
        let s2 = engine.step(&s1, delta).unwrap();
        let fd: Vec<f64> = (0..state.kappa.len())
            .map(|j| (s2.kappa[j] - state.kappa[j]) / (2.0 * delta))
            .collect();
        let predicted = curvature_time_derivative(&s1.curve, -1.0, *mode).unwrap();
        let rel = max_abs(fd.iter().zip(&predicted).map(|(a, b)| a - b)) / max_abs(predicted.iter().copied());
        ok &= rel < 1e-3;
        details.push(format!("t={:.2}: rel {rel:.1e}", s1.t));
    }
    verdict(ok && details.len() == 3, details.join("; "))
}

fn property_suites() -> Verdict {
    let curves = random_convex_curves(20240601, 200, 128, 5).unwrap();
    let mut gb = 0.0f64;
    let mut cheb = f64::INFINITY;
    for c in &curves {
        let s = summarize(c);
        gb = gb.max((s.total_curvature - 2.0 * PI - s.area).abs() / (2.0 * PI + s.area));
        let fields = CurveFields::new(c);
        for alpha in ALPHAS {
            let terms = ChebyshevTerms::new(&fields, alpha).unwrap();
            cheb = cheb.min(terms.gap() / terms.scale());
        }
    }
    let errors: Vec<f64> = [32usize, 64, 128, 256]
        .iter()
        .map(|&n| {
            let c = RadialCurve::canonical_example(n).unwrap();
            max_abs(fd_curvature(&c).iter().zip(curvature_profile(&c)).map(|(a, b)| a - b))
        })
        .collect();
    let order = (errors[2] / errors[3]).log2();
    verdict(
        gb < 1e-8 && cheb >= -1e-12 && (1.8..=2.2).contains(&order),
        format!("GB residual {gb:.1e}, min gap/scale {cheb:.1e}, fd order {order:.3}"),
    )
}

fn oracle_equivalence() -> Verdict {
    let (eps, n) = (1e-4, 128);
    let mut worst = 0.0f64;
    for mode in MODES {
        for k in [2usize, 3] {
            let initial = RadialCurve::from_fn(n, |t| 1.0 + eps * (k as f64 * t).cos()).unwrap();
            let rho_inf = ConservedReference::from_curve(&initial).limit_radius(mode).unwrap();
            let model = linear_model(-1.0, rho_inf).unwrap();
            let engine = FlowEngine::new(FlowConfig::new(-1.0, mode, n).unwrap()).unwrap();
            let mut state = engine.state_at(initial, 0.0, 0).unwrap();
            let a0 = [(k, eps)].into_iter().collect();
            for t in [0.1, 0.5, 1.0] {
                state = engine.advance_to(state, t).unwrap();
                let measured = fourier_modes(&state.curve, k)[k];
                let expected = linearized_evolution(&a0, &model, t)[&k];
                worst = worst.max((measured - expected).abs() / expected);
            }
        }
    }
    verdict(worst < 1e-3, format!("modes 2, 3, both modes, worst rel error {worst:.2e}"))
}

fn same_summary(a: &GeometricSummary, b: &GeometricSummary) -> f64 {
    [
        (a.length, b.length),
        (a.area, b.area),
        (a.deficit, b.deficit),
        (a.kappa_min, b.kappa_min),
        (a.kappa_max, b.kappa_max),
        (a.w_max, b.w_max),
        (a.total_curvature, b.total_curvature),
        (a.rho_min, b.rho_min),
        (a.rho_max, b.rho_max),
    ]
    .iter()
    .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    names
}

fn determinism() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let base = "alpha = -1\nmode = area\ninit = example\nn = 128\nsnapshot_interval = 1\n";
    let scenario = |t_end: &str, out: &str| {
        let overrides = [format!("t_end={t_end}"), format!("out={}", tmp.path().join(out).display())];
        parse_str(base, "acceptance.cfg", &overrides).unwrap()
    };
    let first = cmd_run(&scenario("1", "first")).unwrap();
    let snap = tmp
        .path()
        .join("first")
        .join(format!("{}.csv", snapshot_stem(first.outcome.snapshots.last().unwrap().step)));
    let resumed = cmd_resume(&snap, &["t_end=2".into(), format!("out={}", tmp.path().join("resumed").display())]).unwrap();
    let straight = cmd_run(&scenario("2", "straight")).unwrap();
    let gap = same_summary(&resumed.summary.final_summary, &straight.summary.final_summary);

    let cfg = tmp.path().join("repeat.cfg");
    fs::write(&cfg, format!("{base}t_end = 2\n")).unwrap();
    for out in ["rep1", "rep2"] {
        let status = Command::new(env!("CARGO_BIN_EXE_hypflow"))
            .args(["run", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(tmp.path().join(out))
            .output()
            .unwrap()
            .status;
        assert!(status.success());
    }
    let (d1, d2) = (tmp.path().join("rep1"), tmp.path().join("rep2"));
    let names = files(&d1);
    let compared: Vec<&String> = names
        .iter()
        .filter(|n| n.ends_with(".csv") || n.ends_with(".svg"))
        .collect();
    let identical = names == files(&d2)
        && compared
            .iter()
            .all(|n| fs::read(d1.join(n)).unwrap() == fs::read(d2.join(n)).unwrap());
    verdict(
        gap < 1e-8 && identical && compared.len() > 2,
        format!(
            "resume vs straight max diff {gap:.1e}; {} csv/svg files byte-identical: {identical}",
            compared.len()
        ),
    )
}

fn example_run(mode: Mode) -> RunOutcome {
    let config = FlowConfig::new(-1.0, mode, 256).unwrap();
    run(&config, RadialCurve::canonical_example(256).unwrap()).unwrap()
}

fn main() -> ExitCode {
    let start = Instant::now();
    let handles: Vec<_> = MODES
        .iter()
        .map(|&mode| thread::spawn(move || (mode, example_run(mode))))
        .collect();

    let mut margins = Vec::new();
    let mut results: Vec<(u8, &str, Verdict)> = Vec::new();
    results.push((1, "circle stationarity", circle_stationarity(&mut margins)));
    let rate = exponential_rate(&mut margins);
    let properties = property_suites();
    let oracle = oracle_equivalence();
    let determinism = determinism();

    let runs: Vec<(Mode, RunOutcome)> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    for (mode, outcome) in &runs {
        margins.push((format!("example {mode}"), convexity_margin(outcome)));
    }
    results.push((2, "conservation", conservation(&runs)));
    results.push((3, "monotonicity", monotonicity(&runs)));
    results.push((4, "limit shape", limit_shape(&runs)));
    results.push((5, "exponential rate", rate));
    results.push((6, "convexity preservation", convexity(&margins)));
    results.push((7, "evolution-equation consistency", evolution_consistency(&runs)));
    results.push((8, "property suites", properties));
    results.push((9, "oracle equivalence", oracle));
    results.push((10, "determinism", determinism));

    println!("\nacceptance suite ({:.1}s)", start.elapsed().as_secs_f64());
    let mut failed = 0;
    for (id, name, v) in &results {
        let tag = if v.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {id:>2} {name}: {}", v.detail);
        failed += usize::from(!v.passed);
    }
    println!("{} passed, {failed} failed\n", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
