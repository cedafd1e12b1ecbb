//! JSON experiment configuration: parsing, unknown-key detection,
//! per-kind defaults and range checks.

use crate::manifold::{
    make_circle, make_complex_exponential, make_gaussian_pulse, make_line_segment, ModelRef, DEFAULT_PULSE_WIDTH,
};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    EmbedDemo,
    EmbeddingSweep,
    Recovery,
    ToolboxSuite,
    Bounds,
    Certificate,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::EmbedDemo => "embed-demo",
            ExperimentKind::EmbeddingSweep => "embedding-sweep",
            ExperimentKind::Recovery => "recovery",
            ExperimentKind::ToolboxSuite => "toolbox-suite",
            ExperimentKind::Bounds => "bounds",
            ExperimentKind::Certificate => "certificate",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn default_kappa() -> f64 {
    1.0
}
fn default_circle_n() -> usize {
    256
}
fn default_pulse_n() -> usize {
    1024
}
fn default_pulse_sigma() -> f64 {
    DEFAULT_PULSE_WIDTH
}
fn default_f_c() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ManifoldSpec {
    Circle {
        #[serde(default = "default_kappa")]
        kappa: f64,
        #[serde(default = "default_circle_n")]
        n: usize,
    },
    GaussianPulse {
        #[serde(default = "default_pulse_sigma")]
        sigma: f64,
        #[serde(default = "default_pulse_n")]
        n: usize,
    },
    ComplexExponential {
        #[serde(default = "default_f_c")]
        f_c: usize,
    },
    LineSegment {
        #[serde(default = "default_circle_n")]
        n: usize,
    },
}

impl ManifoldSpec {
    pub fn build(&self) -> crate::Result<ModelRef> {
        Ok(match *self {
            ManifoldSpec::Circle { kappa, n } => Arc::new(make_circle(kappa, n)?),
            ManifoldSpec::GaussianPulse { sigma, n } => Arc::new(make_gaussian_pulse(sigma, n)?),
            ManifoldSpec::ComplexExponential { f_c } => Arc::new(make_complex_exponential(f_c)?),
            ManifoldSpec::LineSegment { n } => Arc::new(make_line_segment(n)?),
        })
    }

    fn keys(type_name: &str) -> Option<&'static [&'static str]> {
        Some(match type_name {
            "circle" => &["type", "kappa", "n"],
            "gaussian-pulse" => &["type", "sigma", "n"],
            "complex-exponential" => &["type", "f_c"],
            "line-segment" => &["type", "n"],
            _ => return None,
        })
    }
}

/// Experiment configuration. Fields a kind does not use stay `None`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<ExperimentKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifold: Option<ManifoldSpec>,
    /// Number of measurements M.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Values of M for a sweep.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_m: Option<Vec<usize>>,
    /// Intrinsic dimension K for the bound calculators.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub volume: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    /// ‖n‖ of additive measurement noise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
    /// ‖x − x*‖ of off-manifold recovery signals.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Manifold sample size.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Secant budget for distortion measurements.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub secants: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair_budget: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub properties: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub net_delta: Option<f64>,
    /// Explicit chaining levels summed before the geometric remainder.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adversarial_m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adversarial_trials: Option<usize>,
    /// Minimum Monte Carlo pass rate for the probabilistic bounds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

const TOP_LEVEL_KEYS: &[&str] = &[
    "kind",
    "manifold",
    "m",
    "sweep_m",
    "k",
    "tau",
    "volume",
    "epsilon",
    "rho",
    "noise",
    "offset",
    "seed",
    "trials",
    "samples",
    "secants",
    "grid",
    "tol",
    "pair_budget",
    "properties",
    "net_delta",
    "truncation",
    "adversarial_m",
    "adversarial_trials",
    "pass_rate",
    "out",
];

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_PROPERTIES: [&str; 8] = ["A.2", "A.4", "A.5", "A.6", "A.8", "A.9", "A.10", "A.11"];

/// One problem in a config file; line and column are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    pub line: usize,
    pub column: usize,
    pub field: String,
    pub message: String,
}

#[derive(Debug, Error)]
pub struct ConfigError {
    pub origin: String,
    pub issues: Vec<ConfigIssue>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}:{}:{}: ", self.origin, issue.line, issue.column)?;
            if !issue.field.is_empty() {
                write!(f, "{}: ", issue.field)?;
            }
            f.write_str(&issue.message)?;
        }
        Ok(())
    }
}

/// Position of `"key":` in `text`, searching from byte `from`.
fn locate_key(text: &str, key: &str, from: usize) -> Option<usize> {
    let needle = format!("\"{key}\"");
    let mut start = from;
    while let Some(off) = text.get(start..)?.find(&needle) {
        let at = start + off;
        let rest = text[at + needle.len()..].trim_start();
        if rest.starts_with(':') {
            return Some(at);
        }
        start = at + needle.len();
    }
    None
}

fn line_col(text: &str, byte: usize) -> (usize, usize) {
    let before = &text[..byte];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(byte, |nl| byte - nl - 1) + 1;
    (line, col)
}

struct Issues<'a> {
    text: &'a str,
    list: Vec<ConfigIssue>,
}

impl Issues<'_> {
    /// Record a problem anchored at `field` (dotted for nested keys).
    fn push(&mut self, field: &str, message: impl Into<String>) {
        let mut pos = Some(0);
        for part in field.split('.') {
            pos = pos.and_then(|p| locate_key(self.text, part, p));
        }
        let (line, column) = pos.map_or((1, 1), |p| line_col(self.text, p));
        self.list.push(ConfigIssue {
            line,
            column,
            field: field.to_string(),
            message: message.into(),
        });
    }
}

/// Read and fully resolve a config file for `kind`.
pub fn validate_config(path: &Path, kind: ExperimentKind) -> Result<ExperimentConfig, ConfigError> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        origin: origin.clone(),
        issues: vec![ConfigIssue {
            line: 1,
            column: 1,
            field: String::new(),
            message: format!("cannot read config: {e}"),
        }],
    })?;
    parse_config(&text, &origin, kind)
}

/// Parse, check and default a config document.
pub fn parse_config(text: &str, origin: &str, kind: ExperimentKind) -> Result<ExperimentConfig, ConfigError> {
    let fail = |issues: Vec<ConfigIssue>| ConfigError {
        origin: origin.to_string(),
        issues,
    };
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| {
        fail(vec![ConfigIssue {
            line: e.line().max(1),
            column: e.column().max(1),
            field: String::new(),
            message: format!("malformed JSON: {e}"),
        }])
    })?;
    let mut issues = Issues { text, list: Vec::new() };
    let Some(obj) = value.as_object() else {
        issues.push("", "config must be a JSON object");
        return Err(fail(issues.list));
    };
    for key in obj.keys() {
        if !TOP_LEVEL_KEYS.contains(&key.as_str()) {
            issues.push(key, "unknown key");
        }
    }
    if let Some(m) = obj.get("manifold").and_then(|v| v.as_object()) {
        if let Some(keys) = m.get("type").and_then(|t| t.as_str()).and_then(ManifoldSpec::keys) {
            for key in m.keys() {
                if !keys.contains(&key.as_str()) {
                    issues.push(&format!("manifold.{key}"), "unknown key");
                }
            }
        }
    }
    if !issues.list.is_empty() {
        return Err(fail(issues.list));
    }

    let mut de = serde_json::Deserializer::from_str(text);
    let raw: ExperimentConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let text = inner.to_string();
        // serde_json appends the position, which the anchor already carries.
        let message = match text.rfind(" at line ") {
            Some(i) => text[..i].to_string(),
            None => text,
        };
        fail(vec![ConfigIssue {
            line: inner.line().max(1),
            column: inner.column().max(1),
            field: if path == "." { String::new() } else { path },
            message,
        }])
    })?;
    if let Some(k) = raw.kind {
        if k != kind {
            issues.push("kind", format!("config is for {k}, but {kind} was requested"));
            return Err(fail(issues.list));
        }
    }
    let resolved = resolve(raw, kind);
    check_ranges(&resolved, &mut issues);
    if issues.list.is_empty() {
        Ok(resolved)
    } else {
        Err(fail(issues.list))
    }
}

fn resolve(raw: ExperimentConfig, kind: ExperimentKind) -> ExperimentConfig {
    use ExperimentKind::*;
    let circle = || ManifoldSpec::Circle {
        kappa: default_kappa(),
        n: default_circle_n(),
    };
    let mut c = ExperimentConfig {
        kind: Some(kind),
        seed: Some(raw.seed.unwrap_or(DEFAULT_SEED)),
        out: raw.out.clone(),
        ..Default::default()
    };
    match kind {
        EmbedDemo => {
            c.manifold = Some(raw.manifold.unwrap_or(ManifoldSpec::GaussianPulse {
                sigma: default_pulse_sigma(),
                n: default_pulse_n(),
            }));
            c.m = Some(raw.m.unwrap_or(3));
            c.samples = Some(raw.samples.unwrap_or(1024));
        }
        EmbeddingSweep => {
            c.manifold = Some(raw.manifold.unwrap_or_else(circle));
            c.sweep_m = Some(raw.sweep_m.unwrap_or_else(|| vec![8, 32, 128]));
            c.trials = Some(raw.trials.unwrap_or(20));
            c.samples = Some(raw.samples.unwrap_or(2000));
            c.secants = Some(raw.secants.unwrap_or(10_000));
            c.epsilon = Some(raw.epsilon.unwrap_or(1.0 / 3.0));
        }
        Recovery => {
            c.manifold = Some(raw.manifold.unwrap_or_else(circle));
            c.m = Some(raw.m.unwrap_or(64));
            c.offset = Some(raw.offset.unwrap_or(0.05));
            c.noise = Some(raw.noise.unwrap_or(0.01));
            c.trials = Some(raw.trials.unwrap_or(100));
            c.samples = Some(raw.samples.unwrap_or(2000));
            c.secants = Some(raw.secants.unwrap_or(10_000));
            c.epsilon = Some(raw.epsilon.unwrap_or(1.0 / 3.0));
            c.grid = Some(raw.grid.unwrap_or(crate::recovery::DEFAULT_GRID));
            c.tol = Some(raw.tol.unwrap_or(crate::recovery::DEFAULT_TOLERANCE));
            c.pass_rate = Some(raw.pass_rate.unwrap_or(0.95));
            c.adversarial_m = Some(raw.adversarial_m.unwrap_or(16));
            c.adversarial_trials = Some(raw.adversarial_trials.unwrap_or(50));
        }
        ToolboxSuite => {
            c.manifold = Some(raw.manifold.unwrap_or(ManifoldSpec::Circle { kappa: 1.0, n: 3 }));
            c.samples = Some(raw.samples.unwrap_or(2000));
            c.pair_budget = Some(raw.pair_budget.unwrap_or(20_000));
            c.properties = Some(
                raw.properties
                    .unwrap_or_else(|| DEFAULT_PROPERTIES.iter().map(|s| s.to_string()).collect()),
            );
        }
        Bounds => {
            c.k = Some(raw.k.unwrap_or(1));
            c.tau = Some(raw.tau.unwrap_or(1.0));
            c.volume = Some(raw.volume.unwrap_or(2.0 * std::f64::consts::PI));
            c.epsilon = Some(raw.epsilon.unwrap_or(1.0 / 3.0));
            c.rho = Some(raw.rho.unwrap_or(0.01));
        }
        Certificate => {
            c.k = Some(raw.k.unwrap_or(1));
            c.tau = Some(raw.tau.unwrap_or(1.0));
            c.volume = Some(raw.volume.unwrap_or(100.0));
            c.epsilon = Some(raw.epsilon.unwrap_or(1.0 / 3.0));
            c.rho = Some(raw.rho.unwrap_or(0.1));
            c.m = raw.m;
            c.truncation = Some(raw.truncation.unwrap_or(crate::measurement::DEFAULT_TRUNCATION));
            c.manifold = Some(raw.manifold.unwrap_or(ManifoldSpec::Circle { kappa: 1.0, n: 2 }));
            c.samples = Some(raw.samples.unwrap_or(4000));
            c.net_delta = Some(raw.net_delta.unwrap_or(0.1));
        }
    }
    c
}

fn check_ranges(c: &ExperimentConfig, issues: &mut Issues<'_>) {
    let positive = |issues: &mut Issues<'_>, field: &str, v: Option<f64>| {
        if let Some(v) = v {
            if !(v > 0.0 && v.is_finite()) {
                issues.push(field, format!("must be positive and finite, got {v}"));
            }
        }
    };
    let at_least = |issues: &mut Issues<'_>, field: &str, v: Option<usize>, min: usize| {
        if let Some(v) = v {
            if v < min {
                issues.push(field, format!("must be >= {min}, got {v}"));
            }
        }
    };
    if let Some(spec) = &c.manifold {
        if let Err(e) = spec.build() {
            issues.push("manifold", e.to_string());
        }
    }
    at_least(issues, "m", c.m, 1);
    at_least(issues, "k", c.k, 1);
    at_least(issues, "trials", c.trials, 1);
    at_least(issues, "samples", c.samples, 2);
    at_least(issues, "secants", c.secants, 1);
    at_least(issues, "grid", c.grid, crate::recovery::MIN_GRID);
    at_least(issues, "pair_budget", c.pair_budget, 1);
    at_least(issues, "adversarial_m", c.adversarial_m, 1);
    if let Some(list) = &c.sweep_m {
        if list.is_empty() {
            issues.push("sweep_m", "must not be empty");
        }
        if list.contains(&0) {
            issues.push("sweep_m", "entries must be >= 1");
        }
    }
    positive(issues, "tau", c.tau);
    positive(issues, "volume", c.volume);
    positive(issues, "tol", c.tol);
    positive(issues, "net_delta", c.net_delta);
    if let Some(e) = c.epsilon {
        if !(e > 0.0 && e <= 1.0 / 3.0) {
            issues.push("epsilon", format!("must lie in (0, 1/3], got {e}"));
        }
    }
    if let Some(r) = c.rho {
        if !(r > 0.0 && r < 1.0) {
            issues.push("rho", format!("must lie in (0, 1), got {r}"));
        }
    }
    for (field, v) in [("noise", c.noise), ("offset", c.offset)] {
        if let Some(v) = v {
            if !(v >= 0.0 && v.is_finite()) {
                issues.push(field, format!("must be finite and >= 0, got {v}"));
            }
        }
    }
    if let Some(p) = c.pass_rate {
        if !(0.0..=1.0).contains(&p) {
            issues.push("pass_rate", format!("must lie in [0, 1], got {p}"));
        }
    }
    if let Some(props) = &c.properties {
        for p in props {
            if p.parse::<crate::geometry::PropertyId>().is_err() {
                issues.push("properties", format!("unknown property id {p:?}"));
            }
        }
    }
    if c.kind == Some(ExperimentKind::Recovery) {
        match c.manifold {
            Some(ManifoldSpec::Circle { kappa, n }) => {
                if let Some(off) = c.offset {
                    if off >= kappa {
                        issues.push("offset", format!("must be below the circle radius {kappa}"));
                    }
                }
                if let Some(m) = c.adversarial_m {
                    if m >= n {
                        issues.push("adversarial_m", format!("must be below N = {n}"));
                    }
                }
            }
            _ => issues.push("manifold", "recovery trials run on a circle"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, kind: ExperimentKind) -> Result<ExperimentConfig, ConfigError> {
        parse_config(text, "cfg.json", kind)
    }

    #[test]
    fn minimal_embed_demo_is_defaulted() {
        let c = parse("{}", ExperimentKind::EmbedDemo).unwrap();
        assert_eq!(c.seed, Some(1));
        assert_eq!(c.m, Some(3));
        assert_eq!(
            c.manifold,
            Some(ManifoldSpec::GaussianPulse { sigma: 0.05, n: 1024 })
        );
        let c = parse(r#"{"manifold": {"type": "gaussian-pulse"}}"#, ExperimentKind::EmbedDemo).unwrap();
        assert_eq!(c.manifold, Some(ManifoldSpec::GaussianPulse { sigma: 0.05, n: 1024 }));
    }

    #[test]
    fn negative_m_names_the_field() {
        let err = parse("{\n  \"m\": -3\n}", ExperimentKind::EmbedDemo).unwrap_err();
        assert_eq!(err.issues.len(), 1);
        assert_eq!(err.issues[0].field, "m");
        assert_eq!(err.issues[0].line, 2);
        assert!(err.to_string().starts_with("cfg.json:2:"));
    }

    #[test]
    fn unknown_keys_are_itemized() {
        let text = "{\n  \"seed\": 2,\n  \"bogus\": 1,\n  \"manifold\": {\"type\": \"circle\", \"radius\": 2},\n  \"other\": true\n}";
        let err = parse(text, ExperimentKind::Recovery).unwrap_err();
        let fields: Vec<_> = err.issues.iter().map(|i| (i.field.as_str(), i.line)).collect();
        assert_eq!(fields, vec![("bogus", 3), ("other", 5), ("manifold.radius", 4)]);
        assert_eq!(err.to_string().lines().count(), 3);
    }

    #[test]
    fn sweep_list_round_trips() {
        let c = parse(r#"{"sweep_m": [8, 32, 128]}"#, ExperimentKind::EmbeddingSweep).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back.sweep_m, Some(vec![8, 32, 128]));
        assert_eq!(back, c);
    }

    #[test]
    fn semantic_errors_are_anchored() {
        let err = parse("{\"epsilon\": 0.5,\n\"m\": 0}", ExperimentKind::Recovery).unwrap_err();
        let fields: Vec<_> = err.issues.iter().map(|i| (i.field.as_str(), i.line)).collect();
        assert!(fields.contains(&("epsilon", 1)));
        assert!(fields.contains(&("m", 2)));
        let err = parse(r#"{"kind": "bounds"}"#, ExperimentKind::Recovery).unwrap_err();
        assert_eq!(err.issues[0].field, "kind");
        let err = parse(r#"{"manifold": {"type": "line-segment"}}"#, ExperimentKind::Recovery).unwrap_err();
        assert_eq!(err.issues[0].field, "manifold");
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = parse("{\n \"m\": ,\n}", ExperimentKind::Bounds).unwrap_err();
        assert_eq!(err.issues[0].line, 2);
    }
}
