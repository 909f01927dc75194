//! CSV and JSON artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use hypflow_core::{
    ConservedReference, DiagnosticsSeries, FlowConfig, RadialCurve, SeriesRow, Snapshot,
};

pub const SERIES_FILE: &str = "series.csv";
pub const SUMMARY_FILE: &str = "summary.json";

/// 17 significant digits: enough to recover every `f64` exactly.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_number(field: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .with_context(|| format!("`{field}` is not a number"))
}

pub fn write_series_csv(path: &Path, series: &DiagnosticsSeries) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(hypflow_core::series_header(series.k_max()))?;
    for row in series.rows() {
        w.write_record(row.values().into_iter().map(format_number))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_series_csv(path: &Path) -> Result<DiagnosticsSeries> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let fixed = hypflow_core::diagnostics::series::FIXED_COLUMNS.len();
    if header.len() <= fixed {
        bail!("{}: header has too few columns", path.display());
    }
    let k_max = header.len() - fixed - 1;
    if header != hypflow_core::series_header(k_max) {
        bail!("{}: unexpected header {:?}", path.display(), header);
    }
    let mut series = DiagnosticsSeries::new(k_max);
    for (i, record) in r.records().enumerate() {
        let record = record?;
        let values = record
            .iter()
            .map(parse_number)
            .collect::<Result<Vec<f64>>>()
            .with_context(|| format!("{}: row {}", path.display(), i + 1))?;
        series.push(SeriesRow::from_values(&values)?)?;
    }
    Ok(series)
}

/// Sidecar written next to each `curve_<step>.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub t: f64,
    pub step: u64,
    pub alpha: f64,
    pub mode: hypflow_core::Mode,
    pub n: usize,
    pub reference: ConservedReference,
    pub config: FlowConfig,
}

pub fn snapshot_stem(step: u64) -> String {
    format!("curve_{step:08}")
}

pub fn write_curve_csv(path: &Path, curve: &RadialCurve) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["theta", "rho"])?;
    for (j, rho) in curve.rho().iter().enumerate() {
        w.write_record([format_number(curve.theta(j)), format_number(*rho)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_curve_csv(path: &Path) -> Result<RadialCurve> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != ["theta", "rho"] {
        bail!("{}: expected columns theta,rho", path.display());
    }
    let mut rho = Vec::new();
    let mut theta = Vec::new();
    for record in r.records() {
        let record = record?;
        theta.push(parse_number(record.get(0).context("missing theta column")?)?);
        rho.push(parse_number(record.get(1).context("missing rho column")?)?);
    }
    let curve = RadialCurve::new(rho).with_context(|| format!("{}", path.display()))?;
    // The grid is implicit in the sample count; reject files on any other grid.
    if let Some(j) = (0..curve.len()).find(|&j| (theta[j] - curve.theta(j)).abs() > 1e-12) {
        bail!("{}: row {} is not on the uniform grid", path.display(), j + 1);
    }
    Ok(curve)
}

pub fn sidecar_path(curve_csv: &Path) -> PathBuf {
    curve_csv.with_extension("json")
}

pub fn write_snapshot(
    dir: &Path,
    snapshot: &Snapshot,
    config: &FlowConfig,
    reference: &ConservedReference,
) -> Result<PathBuf> {
    let csv_path = dir.join(format!("{}.csv", snapshot_stem(snapshot.step)));
    write_curve_csv(&csv_path, &snapshot.curve)?;
    let meta = SnapshotMeta {
        t: snapshot.t,
        step: snapshot.step,
        alpha: config.alpha,
        mode: config.mode,
        n: config.n,
        reference: *reference,
        config: config.clone(),
    };
    write_json(&sidecar_path(&csv_path), &meta)?;
    Ok(csv_path)
}

pub fn read_snapshot(curve_csv: &Path) -> Result<(RadialCurve, SnapshotMeta)> {
    let curve = read_curve_csv(curve_csv)?;
    let side = sidecar_path(curve_csv);
    let text = fs::read_to_string(&side).with_context(|| format!("reading {}", side.display()))?;
    let meta: SnapshotMeta =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", side.display()))?;
    if meta.n != curve.len() {
        bail!(
            "{} declares n = {} but the curve has {} samples",
            side.display(),
            meta.n,
            curve.len()
        );
    }
    Ok((curve, meta))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
