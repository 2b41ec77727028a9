//! JSON simulation configs.
//!
//! ```json
//! {
//!   "points": [[0, 0], [1, 0], [0, 1]],
//!   "t": [0.2, "1/3", 0.4],
//!   "iterations": 50,
//!   "tolerances": { "stationary": 1e-9 },
//!   "output": { "format": "csv", "path": "trace.csv" }
//! }
//! ```
//!
//! `points` may be replaced by a generator:
//! `{"generator": {"kind": "regular_polygon", "p": 5, "radius": 1}}` or
//! `{"generator": {"kind": "random", "p": 5, "d": 2, "seed": 7}}`. A random
//! generator without a seed takes it from `BARYPOLY_SEED`.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::affine::{AffinePoint, PointFamily};
use crate::barypolygonal::ParamVector;
use crate::derived::Tolerances;

pub const SEED_ENV: &str = "BARYPOLY_SEED";
pub const DEFAULT_ITERATIONS: usize = 50;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid config:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Some(Self::Csv),
            "json" => Some(Self::Json),
            "svg" => Some(Self::Svg),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
            Self::Svg => "svg",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub format: OutputFormat,
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointsSource {
    Explicit(Vec<Vec<f64>>),
    RegularPolygon { p: usize, radius: f64 },
    Random { p: usize, d: usize, seed: u64 },
}

impl PointsSource {
    pub fn rows(&self) -> Vec<Vec<f64>> {
        match self {
            Self::Explicit(rows) => rows.clone(),
            Self::RegularPolygon { p, radius } => regular_polygon(*p, *radius),
            Self::Random { p, d, seed } => random_rows(*p, *d, *seed),
        }
    }
}

/// Vertices of a regular `p`-gon of the given circumradius centred at the
/// origin, first vertex on the positive x axis.
pub fn regular_polygon(p: usize, radius: f64) -> Vec<Vec<f64>> {
    (0..p)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / p as f64;
            vec![radius * theta.cos(), radius * theta.sin()]
        })
        .collect()
}

/// `p` points uniform in `[-1, 1]^d`.
pub fn random_rows(p: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..p).map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()).collect()
}

/// Seed from `BARYPOLY_SEED`, if set. A malformed value is an error.
pub fn seed_from_env() -> Result<Option<u64>, String> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| format!("{SEED_ENV} must be an unsigned 64-bit integer, got {s:?}")),
        Err(_) => Ok(None),
    }
}

/// A validated simulation setup.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub points: PointsSource,
    pub family: PointFamily,
    pub t: ParamVector,
    pub iterations: usize,
    pub tolerances: Tolerances,
    pub output: Option<OutputSpec>,
}

impl SimulationConfig {
    /// JSON form that [`parse_config`] reads back to an equal config.
    pub fn to_json(&self) -> String {
        let points = match &self.points {
            PointsSource::Explicit(rows) => ("points", json!(rows)),
            PointsSource::RegularPolygon { p, radius } => {
                ("generator", json!({"kind": "regular_polygon", "p": p, "radius": radius}))
            }
            PointsSource::Random { p, d, seed } => {
                ("generator", json!({"kind": "random", "p": p, "d": d, "seed": seed}))
            }
        };
        let mut obj = Map::new();
        obj.insert(points.0.into(), points.1);
        obj.insert("t".into(), json!(self.t.as_slice()));
        obj.insert("iterations".into(), json!(self.iterations));
        obj.insert("tolerances".into(), serde_json::to_value(self.tolerances).unwrap());
        if let Some(out) = &self.output {
            let mut o = Map::new();
            o.insert("format".into(), json!(out.format.as_str()));
            if let Some(path) = &out.path {
                o.insert("path".into(), json!(path));
            }
            obj.insert("output".into(), Value::Object(o));
        }
        serde_json::to_string_pretty(&Value::Object(obj)).unwrap()
    }
}

/// Parses a number or a string holding a decimal or an integer fraction
/// `a/b`. Fractions are divided once, so `"1/61"` is the float nearest 1/61.
pub fn parse_real(v: &Value) -> Result<f64, String> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| format!("{n} is not representable")),
        Value::String(s) => parse_real_str(s),
        other => Err(format!("expected a number or a fraction string, got {other}")),
    }
}

pub fn parse_real_str(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: i64 = num.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let d: i64 = den.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        if d == 0 {
            return Err(format!("zero denominator in {s:?}"));
        }
        const EXACT: i64 = 1 << 53;
        if n.abs() > EXACT || d.abs() > EXACT {
            return Err(format!("fraction terms of {s:?} exceed 2^53"));
        }
        Ok(n as f64 / d as f64)
    } else {
        s.parse::<f64>().map_err(|_| format!("{s:?} is not a number"))
    }
}

/// Accumulates every validation failure instead of stopping at the first.
#[derive(Default)]
struct Issues(Vec<String>);

impl Issues {
    fn push(&mut self, msg: impl Into<String>) {
        self.0.push(msg.into());
    }
}

fn parse_rows(v: &Value, issues: &mut Issues) -> Option<Vec<Vec<f64>>> {
    let Some(arr) = v.as_array() else {
        issues.push("points: expected an array of coordinate rows");
        return None;
    };
    let mut rows = Vec::with_capacity(arr.len());
    let mut ok = true;
    for (i, row) in arr.iter().enumerate() {
        let Some(cells) = row.as_array() else {
            issues.push(format!("points[{i}]: expected an array of coordinates"));
            ok = false;
            continue;
        };
        let mut coords = Vec::with_capacity(cells.len());
        for (j, c) in cells.iter().enumerate() {
            match parse_real(c) {
                Ok(x) if x.is_finite() => coords.push(x),
                Ok(x) => {
                    issues.push(format!("points[{i}][{j}]: coordinate {x} is not finite"));
                    ok = false;
                }
                Err(e) => {
                    issues.push(format!("points[{i}][{j}]: {e}"));
                    ok = false;
                }
            }
        }
        rows.push(coords);
    }
    ok.then_some(rows)
}

fn get_usize(obj: &Map<String, Value>, key: &str, ctx: &str, issues: &mut Issues) -> Option<usize> {
    match obj.get(key) {
        None => {
            issues.push(format!("{ctx}: missing \"{key}\""));
            None
        }
        Some(v) => match v.as_u64() {
            Some(n) => Some(n as usize),
            None => {
                issues.push(format!("{ctx}.{key}: expected a non-negative integer"));
                None
            }
        },
    }
}

fn parse_generator(v: &Value, issues: &mut Issues) -> Option<PointsSource> {
    let Some(obj) = v.as_object() else {
        issues.push("generator: expected an object");
        return None;
    };
    match obj.get("kind").and_then(Value::as_str) {
        Some("regular_polygon") => {
            let p = get_usize(obj, "p", "generator", issues);
            let radius = match obj.get("radius") {
                None => Some(1.0),
                Some(r) => match parse_real(r) {
                    Ok(x) if x > 0.0 && x.is_finite() => Some(x),
                    _ => {
                        issues.push("generator.radius: expected a positive number");
                        None
                    }
                },
            };
            Some(PointsSource::RegularPolygon { p: p?, radius: radius? })
        }
        Some("random") => {
            let p = get_usize(obj, "p", "generator", issues);
            let d = get_usize(obj, "d", "generator", issues);
            let seed = match obj.get("seed") {
                Some(s) => match s.as_u64() {
                    Some(x) => Some(x),
                    None => {
                        issues.push("generator.seed: expected an unsigned 64-bit integer");
                        None
                    }
                },
                None => match seed_from_env() {
                    Ok(s) => Some(s.unwrap_or(0)),
                    Err(e) => {
                        issues.push(e);
                        None
                    }
                },
            };
            if d == Some(0) {
                issues.push("generator.d: dimension must be at least 1");
            }
            Some(PointsSource::Random { p: p?, d: d.filter(|&d| d > 0)?, seed: seed? })
        }
        Some(other) => {
            issues.push(format!("generator.kind: unknown generator {other:?}"));
            None
        }
        None => {
            issues.push("generator.kind: missing");
            None
        }
    }
}

/// Shape, range and distinctness checks shared by JSON and flag input.
fn validate_family(rows: &[Vec<f64>], tol: f64, issues: &mut Issues) -> Option<PointFamily> {
    if rows.len() < 2 {
        issues.push(format!("points: need at least 2 points, got {}", rows.len()));
        return None;
    }
    let d = rows[0].len();
    let mut ok = true;
    if d == 0 {
        issues.push("points: dimension must be at least 1");
        ok = false;
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != d {
            issues.push(format!("points[{i}]: dimension mismatch, expected {d}, got {}", r.len()));
            ok = false;
        }
    }
    if !ok {
        return None;
    }
    let pts: Vec<AffinePoint> = rows.iter().map(|r| AffinePoint::new(r.clone()).unwrap()).collect();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if pts[i].distance(&pts[j]) <= tol {
                issues.push(format!("points not distinct: points[{i}] and points[{j}] coincide"));
                ok = false;
            }
        }
    }
    if !ok {
        return None;
    }
    PointFamily::with_tolerance(pts, tol).ok()
}

fn validate_t(t: &[f64], p: Option<usize>, issues: &mut Issues) -> Option<ParamVector> {
    let mut ok = true;
    for (k, &x) in t.iter().enumerate() {
        if !(x > 0.0 && x < 1.0) {
            issues.push(format!("t[{k}] = {x}: parameter out of open interval (0, 1)"));
            ok = false;
        }
    }
    if t.len() < 2 {
        issues.push(format!("t: need at least 2 parameters, got {}", t.len()));
        ok = false;
    }
    if let Some(p) = p {
        if p != t.len() {
            issues.push(format!("t: length {} does not match the {p} points", t.len()));
            ok = false;
        }
    }
    if ok {
        ParamVector::new(t.to_vec()).ok()
    } else {
        None
    }
}

/// Validates already-decoded pieces. Used by [`parse_config`] and by the
/// CLI flag path. `None` for `points` or `t` means missing, unless `prior`
/// already explains why.
pub fn build_config(
    points: Option<PointsSource>,
    t: Option<Vec<f64>>,
    iterations: usize,
    tolerances: Tolerances,
    output: Option<OutputSpec>,
    mut prior: Vec<String>,
) -> Result<SimulationConfig, ConfigError> {
    let mut issues = Issues(std::mem::take(&mut prior));
    let rows = points.as_ref().map(PointsSource::rows);
    let family = rows.as_ref().and_then(|r| validate_family(r, tolerances.distinctness, &mut issues));
    let p = rows.as_ref().map(Vec::len);
    let t = match t {
        Some(t) => validate_t(&t, p, &mut issues),
        None => {
            if !issues.0.iter().any(|m| m.starts_with('t')) {
                issues.push("t: missing");
            }
            None
        }
    };
    if points.is_none() && !issues.0.iter().any(|m| m.starts_with("points") || m.starts_with("generator")) {
        issues.push("points: missing (give \"points\" or \"generator\")");
    }
    if !issues.0.is_empty() {
        return Err(ConfigError::Invalid(issues.0));
    }
    Ok(SimulationConfig {
        points: points.unwrap(),
        family: family.unwrap(),
        t: t.unwrap(),
        iterations,
        tolerances,
        output,
    })
}

fn parse_tolerances(v: Option<&Value>, issues: &mut Issues) -> Tolerances {
    let mut tol = Tolerances::default();
    let Some(v) = v else { return tol };
    let Some(obj) = v.as_object() else {
        issues.push("tolerances: expected an object");
        return tol;
    };
    for (key, val) in obj {
        let slot = match key.as_str() {
            "stationary" => &mut tol.stationary,
            "periodic" => &mut tol.periodic,
            "regularity" => &mut tol.regularity,
            "root_residual" => &mut tol.root_residual,
            "alpha_tie" => &mut tol.alpha_tie,
            "distinctness" => &mut tol.distinctness,
            _ => {
                issues.push(format!("tolerances.{key}: unknown tolerance"));
                continue;
            }
        };
        match parse_real(val) {
            Ok(x) if x >= 0.0 && x.is_finite() => *slot = x,
            _ => issues.push(format!("tolerances.{key}: expected a non-negative number")),
        }
    }
    tol
}

fn parse_output(v: Option<&Value>, issues: &mut Issues) -> Option<OutputSpec> {
    let obj = v?.as_object();
    let Some(obj) = obj else {
        issues.push("output: expected an object");
        return None;
    };
    let format = match obj.get("format").and_then(Value::as_str) {
        Some(f) => match OutputFormat::parse(f) {
            Some(f) => f,
            None => {
                issues.push(format!("output.format: unknown format {f:?}"));
                return None;
            }
        },
        None => OutputFormat::Csv,
    };
    let path = match obj.get("path") {
        None => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => {
            issues.push("output.path: expected a string");
            return None;
        }
    };
    Some(OutputSpec { format, path })
}

/// Parses and validates a JSON config, reporting every failure found.
pub fn parse_config(text: &str) -> Result<SimulationConfig, ConfigError> {
    let root: Value = serde_json::from_str(text).map_err(|e| ConfigError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let Some(obj) = root.as_object() else {
        return Err(ConfigError::Invalid(vec!["config root must be a JSON object".into()]));
    };
    let mut issues = Issues::default();
    const KNOWN: [&str; 6] = ["points", "generator", "t", "iterations", "tolerances", "output"];
    for key in obj.keys() {
        if !KNOWN.contains(&key.as_str()) {
            issues.push(format!("{key}: unknown field"));
        }
    }

    let points = match (obj.get("points"), obj.get("generator")) {
        (Some(_), Some(_)) => {
            issues.push("points: give either \"points\" or \"generator\", not both");
            None
        }
        (Some(rows), None) => parse_rows(rows, &mut issues).map(PointsSource::Explicit),
        (None, Some(g)) => parse_generator(g, &mut issues),
        (None, None) => None,
    };

    let t = match obj.get("t") {
        None => None,
        Some(Value::Array(items)) => {
            let mut out = Vec::with_capacity(items.len());
            let mut ok = true;
            for (k, item) in items.iter().enumerate() {
                match parse_real(item) {
                    Ok(x) => {
                        if !ok && !(x > 0.0 && x < 1.0) {
                            issues.push(format!("t[{k}] = {x}: parameter out of open interval (0, 1)"));
                        }
                        out.push(x);
                    }
                    Err(e) => {
                        issues.push(format!("t[{k}]: {e}"));
                        ok = false;
                    }
                }
            }
            ok.then_some(out)
        }
        Some(_) => {
            issues.push("t: expected an array");
            None
        }
    };

    let iterations = match obj.get("iterations") {
        None => DEFAULT_ITERATIONS,
        Some(v) => v.as_u64().map(|n| n as usize).unwrap_or_else(|| {
            issues.push("iterations: expected a non-negative integer");
            DEFAULT_ITERATIONS
        }),
    };
    let tolerances = parse_tolerances(obj.get("tolerances"), &mut issues);
    let output = parse_output(obj.get("output"), &mut issues);

    build_config(points, t, iterations, tolerances, output, issues.0)
}
