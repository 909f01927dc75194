//! Flat `key = value` scenario files.
//!
//! ```text
//! # comment
//! alpha = -1
//! mode = area
//! init = offcircle r=1.2 d=0.3
//! ```

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use hypflow_core::oracle::{circle_radial_function, CircleSpec};
use hypflow_core::{FlowConfig, Mode, RadialCurve};

pub const DEFAULT_N: usize = 128;
pub const DEFAULT_OUT: &str = "out";
pub const EFFECTIVE_CONFIG_FILE: &str = "config.effective.txt";

/// Where a configuration line came from, for error messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Line { file: String, line: usize },
    Override,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line { file, line } => write!(f, "{file}:{line}"),
            Origin::Override => f.write_str("--override"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("{origin}: unknown key `{key}`")]
    UnknownKey { origin: Origin, key: String },
    #[error("{origin}: key `{key}` given twice")]
    DuplicateKey { origin: Origin, key: String },
    #[error("{origin}: expected `key = value`, got `{text}`")]
    Syntax { origin: Origin, text: String },
    #[error("{origin}: invalid value for `{key}`: {reason}")]
    Value {
        origin: Origin,
        key: String,
        reason: String,
    },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
}

/// Initial curve of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    /// `ρ₀ = 2 + cos θ`.
    CanonicalExample,
    Circle { r: f64 },
    OffCircle { r: f64, d: f64 },
    /// `ρ₀ = a0 + Σ (a_k cos kθ + b_k sin kθ)`.
    Fourier {
        a0: f64,
        cos: Vec<(usize, f64)>,
        sin: Vec<(usize, f64)>,
    },
}

impl InitSpec {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut words = text.split_whitespace();
        let kind = words.next().ok_or("empty initial-curve spec")?;
        let mut params: Vec<(String, f64)> = Vec::new();
        for w in words {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| format!("expected `name=value`, got `{w}`"))?;
            let v: f64 = v
                .parse()
                .map_err(|_| format!("`{v}` is not a number (in `{w}`)"))?;
            if params.iter().any(|(p, _)| p == k) {
                return Err(format!("parameter `{k}` given twice"));
            }
            params.push((k.to_string(), v));
        }
        let take = |name: &str, params: &[(String, f64)]| {
            params
                .iter()
                .find(|(k, _)| k == name)
                .map(|(_, v)| *v)
                .ok_or_else(|| format!("`{kind}` needs `{name}=<value>`"))
        };
        let only = |allowed: &[&str], params: &[(String, f64)]| {
            match params.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
                Some((k, _)) => Err(format!("`{kind}` does not take `{k}`")),
                None => Ok(()),
            }
        };
        match kind {
            "example" => {
                only(&[], &params)?;
                Ok(InitSpec::CanonicalExample)
            }
            "circle" => {
                only(&["r"], &params)?;
                Ok(InitSpec::Circle {
                    r: take("r", &params)?,
                })
            }
            "offcircle" => {
                only(&["r", "d"], &params)?;
                Ok(InitSpec::OffCircle {
                    r: take("r", &params)?,
                    d: take("d", &params)?,
                })
            }
            "fourier" => {
                let mut a0 = None;
                let (mut cos, mut sin) = (Vec::new(), Vec::new());
                for (k, v) in &params {
                    let index = |prefix: &str| -> Result<Option<usize>, String> {
                        match k.strip_prefix(prefix) {
                            Some(rest) => rest
                                .parse::<usize>()
                                .map(Some)
                                .map_err(|_| format!("bad mode index in `{k}`")),
                            None => Ok(None),
                        }
                    };
                    if k == "a0" {
                        a0 = Some(*v);
                    } else if let Some(i) = index("a")? {
                        cos.push((i, *v));
                    } else if let Some(i) = index("b")? {
                        if i == 0 {
                            return Err("`b0` is not a Fourier coefficient".into());
                        }
                        sin.push((i, *v));
                    } else {
                        return Err(format!("`fourier` does not take `{k}`"));
                    }
                }
                Ok(InitSpec::Fourier {
                    a0: a0.ok_or("`fourier` needs `a0=<value>`")?,
                    cos,
                    sin,
                })
            }
            other => Err(format!(
                "unknown initial curve `{other}` (expected example, circle, offcircle or fourier)"
            )),
        }
    }

    pub fn build(&self, n: usize) -> hypflow_core::Result<RadialCurve> {
        match self {
            InitSpec::CanonicalExample => RadialCurve::canonical_example(n),
            InitSpec::Circle { r } => RadialCurve::circle(n, *r),
            InitSpec::OffCircle { r, d } => circle_radial_function(&CircleSpec::new(*r, *d)?, n),
            InitSpec::Fourier { a0, cos, sin } => RadialCurve::from_fn(n, |t| {
                let c: f64 = cos.iter().map(|&(k, a)| a * (k as f64 * t).cos()).sum();
                let s: f64 = sin.iter().map(|&(k, b)| b * (k as f64 * t).sin()).sum();
                a0 + c + s
            }),
        }
    }
}

impl fmt::Display for InitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitSpec::CanonicalExample => f.write_str("example"),
            InitSpec::Circle { r } => write!(f, "circle r={r}"),
            InitSpec::OffCircle { r, d } => write!(f, "offcircle r={r} d={d}"),
            InitSpec::Fourier { a0, cos, sin } => {
                write!(f, "fourier a0={a0}")?;
                for (k, a) in cos {
                    write!(f, " a{k}={a}")?;
                }
                for (k, b) in sin {
                    write!(f, " b{k}={b}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub flow: FlowConfig,
    pub init: InitSpec,
    pub out: PathBuf,
    pub emit_csv: bool,
    pub emit_json: bool,
    pub emit_svg: bool,
}

const KEYS: [&str; 16] = [
    "alpha",
    "mode",
    "n",
    "cfl_safety",
    "t_end",
    "blowup_kappa",
    "convexity_floor",
    "convergence_deficit",
    "recenter_trigger",
    "snapshot_interval",
    "k_max",
    "init",
    "out",
    "emit_csv",
    "emit_json",
    "emit_svg",
];

/// Keys accepted by scenario files and `--override`.
pub fn known_keys() -> &'static [&'static str] {
    &KEYS
}

/// Raw entries before defaults are applied.
#[derive(Debug, Default, Clone)]
struct Entries {
    items: Vec<(String, String, Origin)>,
}

impl Entries {
    fn get(&self, key: &str) -> Option<&(String, String, Origin)> {
        self.items.iter().rev().find(|(k, _, _)| k == key)
    }
}

fn split_entry(text: &str, origin: &Origin) -> Result<(String, String), ConfigError> {
    let (k, v) = text.split_once('=').ok_or_else(|| ConfigError::Syntax {
        origin: origin.clone(),
        text: text.to_string(),
    })?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() {
        return Err(ConfigError::Syntax {
            origin: origin.clone(),
            text: text.to_string(),
        });
    }
    if !known_keys().contains(&k) {
        return Err(ConfigError::UnknownKey {
            origin: origin.clone(),
            key: k.to_string(),
        });
    }
    Ok((k.to_string(), v.to_string()))
}

fn parse_entries(text: &str, file: &str) -> Result<Entries, ConfigError> {
    let mut entries = Entries::default();
    let mut seen = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let origin = Origin::Line {
            file: file.to_string(),
            line: i + 1,
        };
        let (k, v) = split_entry(line, &origin)?;
        if !seen.insert(k.clone()) {
            return Err(ConfigError::DuplicateKey { origin, key: k });
        }
        entries.items.push((k, v, origin));
    }
    Ok(entries)
}

fn value_error(key: &str, origin: &Origin, reason: impl Into<String>) -> ConfigError {
    ConfigError::Value {
        origin: origin.clone(),
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn parse_f64(key: &str, value: &str, origin: &Origin) -> Result<f64, ConfigError> {
    value
        .parse::<f64>()
        .map_err(|_| value_error(key, origin, format!("`{value}` is not a number")))
}

fn parse_usize(key: &str, value: &str, origin: &Origin) -> Result<usize, ConfigError> {
    value
        .parse::<usize>()
        .map_err(|_| value_error(key, origin, format!("`{value}` is not a non-negative integer")))
}

fn parse_bool(key: &str, value: &str, origin: &Origin) -> Result<bool, ConfigError> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(value_error(key, origin, format!("`{value}` is not a boolean"))),
    }
}

fn build(entries: &Entries) -> Result<ScenarioConfig, ConfigError> {
    let required = |key: &'static str| entries.get(key).ok_or(ConfigError::Missing(key));

    let (_, alpha_text, alpha_origin) = required("alpha")?;
    let alpha = parse_f64("alpha", alpha_text, alpha_origin)?;
    if !(alpha < 0.0) {
        return Err(value_error("alpha", alpha_origin, "alpha must be negative"));
    }
    let (_, mode_text, mode_origin) = required("mode")?;
    let mode: Mode = mode_text
        .parse()
        .map_err(|e: String| value_error("mode", mode_origin, e))?;
    let n = match entries.get("n") {
        Some((k, v, o)) => {
            let n = parse_usize(k, v, o)?;
            hypflow_core::geometry::validate_grid_size(n)
                .map_err(|e| value_error(k, o, e.to_string()))?;
            n
        }
        None => DEFAULT_N,
    };
    let mut flow = FlowConfig::new(alpha, mode, n).map_err(|e| ConfigError::Invalid(e.to_string()))?;

    for (key, value, origin) in &entries.items {
        let f = || parse_f64(key, value, origin);
        match key.as_str() {
            "cfl_safety" => flow.cfl_safety = f()?,
            "t_end" => flow.t_end = f()?,
            "blowup_kappa" => flow.blowup_kappa = f()?,
            "convexity_floor" => flow.convexity_floor = f()?,
            "convergence_deficit" => flow.convergence_deficit = f()?,
            "recenter_trigger" => flow.recenter_trigger = f()?,
            "snapshot_interval" => flow.snapshot_interval = f()?,
            "k_max" => flow.k_max = parse_usize(key, value, origin)?,
            _ => {}
        }
    }
    if let Err(e) = flow.validate() {
        // Point at the offending line where the error names a key.
        let named = match &e {
            hypflow_core::Error::InvalidParameter { name, .. } => entries.get(name),
            _ => None,
        };
        return Err(match named {
            Some((k, _, o)) => value_error(k, o, e.to_string()),
            None => ConfigError::Invalid(e.to_string()),
        });
    }

    let (_, init_text, init_origin) = required("init")?;
    let init = InitSpec::parse(init_text).map_err(|e| value_error("init", init_origin, e))?;
    if let Err(e) = init.build(n) {
        return Err(value_error("init", init_origin, e.to_string()));
    }

    let flag = |key: &str| -> Result<bool, ConfigError> {
        match entries.get(key) {
            Some((k, v, o)) => parse_bool(k, v, o),
            None => Ok(true),
        }
    };
    Ok(ScenarioConfig {
        flow,
        init,
        out: entries
            .get("out")
            .map(|(_, v, _)| PathBuf::from(v))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        emit_csv: flag("emit_csv")?,
        emit_json: flag("emit_json")?,
        emit_svg: flag("emit_svg")?,
    })
}

/// Parses scenario text, then applies `overrides` (each `key=value`, later wins).
pub fn parse_str(text: &str, file: &str, overrides: &[String]) -> Result<ScenarioConfig, ConfigError> {
    let mut entries = parse_entries(text, file)?;
    for o in overrides {
        let (k, v) = split_entry(o, &Origin::Override)?;
        entries.items.push((k, v, Origin::Override));
    }
    build(&entries)
}

pub fn parse_config(path: &Path, overrides: &[String]) -> Result<ScenarioConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_str(&text, &path.display().to_string(), overrides)
}

impl ScenarioConfig {
    /// Every key with its effective value, in a form `parse_str` accepts.
    pub fn render(&self) -> String {
        let f = &self.flow;
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        line("alpha", f.alpha.to_string());
        line("mode", f.mode.to_string());
        line("n", f.n.to_string());
        line("cfl_safety", f.cfl_safety.to_string());
        line("t_end", f.t_end.to_string());
        line("blowup_kappa", f.blowup_kappa.to_string());
        line("convexity_floor", f.convexity_floor.to_string());
        line("convergence_deficit", f.convergence_deficit.to_string());
        line("recenter_trigger", f.recenter_trigger.to_string());
        line("snapshot_interval", f.snapshot_interval.to_string());
        line("k_max", f.k_max.to_string());
        line("init", self.init.to_string());
        line("out", self.out.display().to_string());
        line("emit_csv", self.emit_csv.to_string());
        line("emit_json", self.emit_json.to_string());
        line("emit_svg", self.emit_svg.to_string());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ScenarioConfig, ConfigError> {
        parse_str(text, "test.cfg", &[])
    }

    #[test]
    fn minimal_file_gets_defaults() {
        let c = parse("alpha=-1\nmode=area\ninit=example\n").unwrap();
        assert_eq!(c.flow, FlowConfig::new(-1.0, Mode::AreaPreserving, DEFAULT_N).unwrap());
        assert_eq!(c.init, InitSpec::CanonicalExample);
        assert!(c.emit_csv && c.emit_json && c.emit_svg);
        assert_eq!(c.out, PathBuf::from(DEFAULT_OUT));
    }

    #[test]
    fn positive_alpha_is_rejected_with_location() {
        let err = parse("mode = area\nalpha = 0.5\ninit = example").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("alpha must be negative"), "{msg}");
        assert!(msg.contains("test.cfg:2"), "{msg}");
    }

    #[test]
    fn unknown_duplicate_and_malformed_lines() {
        let err = parse("alpha=-1\nmode=area\ninit=example\nbeta=2").unwrap_err();
        assert!(matches!(err, ConfigError::UnknownKey { ref key, .. } if key == "beta"));
        assert!(err.to_string().contains("test.cfg:4"));
        let err = parse("alpha=-1\nalpha=-2\nmode=area\ninit=example").unwrap_err();
        assert!(matches!(err, ConfigError::DuplicateKey { .. }));
        assert!(matches!(parse("alpha -1"), Err(ConfigError::Syntax { .. })));
        let err = parse("alpha=-1\nmode=area\ninit=example\nn=100").unwrap_err();
        assert!(err.to_string().contains("`n`"), "{err}");
        let err = parse("alpha=-1\nmode=area\ninit=example\nt_end=soon").unwrap_err();
        assert!(err.to_string().contains("test.cfg:4"), "{err}");
        assert!(matches!(parse("alpha=-1\nmode=area"), Err(ConfigError::Missing("init"))));
    }

    #[test]
    fn comments_blank_lines_and_overrides() {
        let text = "# scenario\n\nalpha = -0.5 # exponent\nmode = length\ninit = circle r=1\n";
        let c = parse_str(text, "x", &["t_end=2".into(), "n=64".into()]).unwrap();
        assert_eq!(c.flow.alpha, -0.5);
        assert_eq!(c.flow.mode, Mode::LengthPreserving);
        assert_eq!(c.flow.t_end, 2.0);
        assert_eq!(c.flow.n, 64);
        assert_eq!(c.init.build(64).unwrap(), RadialCurve::circle(64, 1.0).unwrap());
        let err = parse_str(text, "x", &["bogus=1".into()]).unwrap_err();
        assert!(err.to_string().starts_with("--override"), "{err}");
    }

    #[test]
    fn init_specs() {
        assert_eq!(
            InitSpec::parse("offcircle r=1 d=0.3").unwrap(),
            InitSpec::OffCircle { r: 1.0, d: 0.3 }
        );
        let f = InitSpec::parse("fourier a0=2 a1=1 b2=0.1").unwrap();
        let c = f.build(32).unwrap();
        let t = c.theta(3);
        assert!((c.rho()[3] - (2.0 + t.cos() + 0.1 * (2.0 * t).sin())).abs() < 1e-15);
        assert!(InitSpec::parse("circle").is_err());
        assert!(InitSpec::parse("circle r=1 d=2").is_err());
        assert!(InitSpec::parse("square r=1").is_err());
        assert!(InitSpec::OffCircle { r: 1.0, d: 2.0 }.build(32).is_err());
        for text in ["example", "circle r=1.5", "offcircle r=1 d=0.25", "fourier a0=2 a1=1 b2=0.1"] {
            assert_eq!(InitSpec::parse(text).unwrap().to_string(), text);
        }
    }

    #[test]
    fn rendered_config_parses_back() {
        let c = parse("alpha=-2\nmode=length\ninit=offcircle r=1 d=0.5\nt_end=3.5\nemit_svg=false").unwrap();
        assert_eq!(parse(&c.render()).unwrap(), c);
    }
}
