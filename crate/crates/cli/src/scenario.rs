//! Scenario files: JSON with sparse expression tables.
//!
//! All indices are 0-based; the fifth direction is index 4. Loading happens
//! in two passes. Serde checks the shape (with a JSON pointer on failure),
//! then every expression is parsed and every index range-checked.

use std::collections::BTreeMap;
use std::path::Path;

use fivevec_core::connection::Connection;
use fivevec_core::expr::ParseError;
use fivevec_core::gauge::GaugeField;
use fivevec_core::linalg::{ComplexMatrix, RealMatrix};
use fivevec_core::npo::{self, NpoFields, SuGenerators};
use fivevec_core::pentavec::{BasisDescriptor, BasisKind, LiftConvention, MetricField, Xi};
use fivevec_core::sampling::ChartBox;
use fivevec_core::{parse, ComplexExpression, Expression, DIM5};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema violation at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("bad expression in {entry} at {pointer}: {source}")]
    Expression {
        pointer: String,
        entry: String,
        source: ParseError,
    },
}

impl ScenarioError {
    /// JSON pointer of the offending value, when there is one.
    pub fn pointer(&self) -> Option<&str> {
        match self {
            ScenarioError::Schema { pointer, .. } | ScenarioError::Expression { pointer, .. } => {
                Some(pointer)
            }
            _ => None,
        }
    }
}

fn schema(pointer: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Schema {
        pointer: pointer.into(),
        message: message.into(),
    }
}

// Raw file shape.

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(default = "default_name")]
    name: String,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_points")]
    points: usize,
    chart: RawChart,
    #[serde(default)]
    basis: RawBasis,
    #[serde(default)]
    lift: RawLift,
    #[serde(default)]
    metric: Option<RawMetric>,
    #[serde(default)]
    connection: RawConnection,
    #[serde(default)]
    gauge: Option<RawGauge>,
    #[serde(default)]
    npo: Option<RawNpo>,
    #[serde(default)]
    tolerances: Tolerances,
}

fn default_name() -> String {
    "unnamed".to_string()
}

fn default_points() -> usize {
    16
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChart {
    min: [f64; 4],
    max: [f64; 4],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBasis {
    #[serde(default = "default_kind")]
    kind: RawKind,
    #[serde(default = "default_xi")]
    xi: i8,
}

fn default_kind() -> RawKind {
    RawKind::NormalizedRegular
}

fn default_xi() -> i8 {
    -1
}

impl Default for RawBasis {
    fn default() -> Self {
        Self {
            kind: default_kind(),
            xi: default_xi(),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum RawKind {
    Standard,
    Regular,
    NormalizedRegular,
    General,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum RawLift {
    #[default]
    Reversible,
    Irreversible,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMetric {
    diagonal: [String; 4],
    #[serde(default)]
    off_diagonal: Vec<RawMetricEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMetricEntry {
    row: usize,
    col: usize,
    expr: String,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConnection {
    #[serde(default)]
    levi_civita: bool,
    #[serde(default)]
    entries: Vec<RawConnectionEntry>,
}

/// `H^upper_{lower dir}`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConnectionEntry {
    upper: usize,
    lower: usize,
    dir: usize,
    expr: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGauge {
    n: usize,
    #[serde(default)]
    theta: Vec<RawComplexEntry>,
    #[serde(default)]
    entries: Vec<RawGaugeEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComplexEntry {
    row: usize,
    col: usize,
    re: String,
    #[serde(default = "zero_text")]
    im: String,
}

/// `B^row_{col dir}`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGaugeEntry {
    row: usize,
    col: usize,
    dir: usize,
    re: String,
    #[serde(default = "zero_text")]
    im: String,
}

fn zero_text() -> String {
    "0".to_string()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNpo {
    n: usize,
    g: f64,
    #[serde(default)]
    ca: Vec<RawSuEntry>,
    #[serde(default)]
    c0: Vec<RawDirEntry>,
    #[serde(default)]
    x: Vec<RawXEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSuEntry {
    a: usize,
    dir: usize,
    expr: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDirEntry {
    dir: usize,
    expr: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawXEntry {
    j: usize,
    dir: usize,
    re: String,
    #[serde(default = "zero_text")]
    im: String,
}

/// Default tolerance per identity class plus per-check overrides.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_algebraic")]
    pub algebraic: f64,
    #[serde(default = "default_first")]
    pub first_derivative: f64,
    #[serde(default = "default_second")]
    pub second_derivative: f64,
    #[serde(default)]
    pub checks: BTreeMap<String, f64>,
}

fn default_algebraic() -> f64 {
    1e-12
}

fn default_first() -> f64 {
    1e-10
}

fn default_second() -> f64 {
    1e-9
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            algebraic: default_algebraic(),
            first_derivative: default_first(),
            second_derivative: default_second(),
            checks: BTreeMap::new(),
        }
    }
}

// Validated scenario.

#[derive(Debug, Clone)]
pub struct GaugeSector {
    pub field: GaugeField,
    /// Hermitian form `θ_{ij}`; the identity when the file gives none.
    pub theta: ComplexMatrix,
}

#[derive(Debug, Clone)]
pub struct NpoSector {
    pub fields: NpoFields,
    pub gens: SuGenerators,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub points: usize,
    pub chart: ChartBox,
    pub basis: BasisDescriptor,
    pub lift: LiftConvention,
    pub metric: MetricField,
    pub connection: Connection,
    pub gauge: Option<GaugeSector>,
    pub npo: Option<NpoSector>,
    pub tolerances: Tolerances,
}

pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    from_str(&text)
}

pub fn from_str(text: &str) -> Result<Scenario, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawScenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = pointer_of(e.path());
        let inner = e.into_inner();
        if inner.is_data() {
            let message = inner.to_string();
            let message = strip_position(&message);
            let pointer = match named_field(message) {
                Some(field) => format!("{pointer}/{}", escape(field)),
                None => pointer,
            };
            schema(pointer, message)
        } else {
            ScenarioError::Syntax {
                line: inner.line(),
                column: inner.column(),
                message: strip_position(&inner.to_string()).to_string(),
            }
        }
    })?;
    compile(raw)
}

fn escape(segment: &str) -> String {
    segment.replace('~', "~0").replace('/', "~1")
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for segment in path.iter() {
        out.push('/');
        match segment {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&escape(key)),
            Segment::Enum { variant } => out.push_str(&escape(variant)),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

/// serde_json appends " at line L column C"; the pointer replaces it.
fn strip_position(message: &str) -> &str {
    match message.rfind(" at line ") {
        Some(k) => &message[..k],
        None => message,
    }
}

/// Field named by a missing-field message. serde reports the enclosing
/// object, so the name is appended to the pointer.
fn named_field(message: &str) -> Option<&str> {
    message.strip_prefix("missing field `")?.split('`').next()
}

fn expr(text: &str, pointer: String, entry: impl FnOnce() -> String) -> Result<Expression, ScenarioError> {
    parse(text).map_err(|source| ScenarioError::Expression {
        pointer,
        entry: entry(),
        source,
    })
}

fn in_range(value: usize, bound: usize, pointer: String) -> Result<(), ScenarioError> {
    if value < bound {
        Ok(())
    } else {
        Err(schema(pointer, format!("index {value} out of range 0..{bound}")))
    }
}

fn compile(raw: RawScenario) -> Result<Scenario, ScenarioError> {
    for mu in 0..4 {
        let (lo, hi) = (raw.chart.min[mu], raw.chart.max[mu]);
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(schema(
                format!("/chart/max/{mu}"),
                format!("chart range [{lo}, {hi}] is empty or not finite"),
            ));
        }
    }
    if raw.points == 0 {
        return Err(schema("/points", "at least one sample point is required"));
    }
    let xi = match raw.basis.xi {
        1 => Xi::Plus,
        -1 => Xi::Minus,
        other => return Err(schema("/basis/xi", format!("xi must be 1 or -1, got {other}"))),
    };
    let kind = match raw.basis.kind {
        RawKind::Standard => BasisKind::Standard,
        RawKind::Regular => BasisKind::Regular,
        RawKind::NormalizedRegular => BasisKind::NormalizedRegular,
        RawKind::General => BasisKind::General,
    };
    let basis = BasisDescriptor::new(kind, xi);
    let lift = match raw.lift {
        RawLift::Reversible => LiftConvention::Reversible,
        RawLift::Irreversible => LiftConvention::Irreversible,
    };

    let metric = match &raw.metric {
        None => MetricField::minkowski(),
        Some(m) => compile_metric(m)?,
    };
    let connection = compile_connection(&raw.connection, &metric, basis)?;
    let gauge = raw.gauge.as_ref().map(compile_gauge).transpose()?;
    let npo = raw.npo.as_ref().map(compile_npo).transpose()?;

    for (name, tol) in [
        ("algebraic", raw.tolerances.algebraic),
        ("first_derivative", raw.tolerances.first_derivative),
        ("second_derivative", raw.tolerances.second_derivative),
    ] {
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(schema(format!("/tolerances/{name}"), "tolerance must be finite and non-negative"));
        }
    }
    for (check, tol) in &raw.tolerances.checks {
        if !(tol.is_finite() && *tol >= 0.0) {
            return Err(schema(
                format!("/tolerances/checks/{}", escape(check)),
                "tolerance must be finite and non-negative",
            ));
        }
    }

    Ok(Scenario {
        name: raw.name,
        seed: raw.seed,
        points: raw.points,
        chart: ChartBox::new(raw.chart.min, raw.chart.max),
        basis,
        lift,
        metric,
        connection,
        gauge,
        npo,
        tolerances: raw.tolerances,
    })
}

fn compile_metric(m: &RawMetric) -> Result<MetricField, ScenarioError> {
    let mut g4 = RealMatrix::zeros(4, 4);
    for (mu, text) in m.diagonal.iter().enumerate() {
        let e = expr(text, format!("/metric/diagonal/{mu}"), || format!("g_{mu}{mu}"))?;
        g4.set(mu, mu, e);
    }
    for (k, entry) in m.off_diagonal.iter().enumerate() {
        let at = format!("/metric/off_diagonal/{k}");
        in_range(entry.row, 4, format!("{at}/row"))?;
        in_range(entry.col, 4, format!("{at}/col"))?;
        if entry.row == entry.col {
            return Err(schema(format!("{at}/col"), "diagonal entries belong in /metric/diagonal"));
        }
        let e = expr(&entry.expr, format!("{at}/expr"), || {
            format!("metric entry {k} (g_{}{})", entry.row, entry.col)
        })?;
        g4.set(entry.row, entry.col, e.clone());
        g4.set(entry.col, entry.row, e);
    }
    Ok(MetricField::from_spacetime(&g4))
}

fn compile_connection(
    raw: &RawConnection,
    metric: &MetricField,
    basis: BasisDescriptor,
) -> Result<Connection, ScenarioError> {
    let mut h = if raw.levi_civita {
        Connection::levi_civita(metric, basis)
    } else {
        Connection::zero(basis)
    };
    for (k, entry) in raw.entries.iter().enumerate() {
        let at = format!("/connection/entries/{k}");
        in_range(entry.upper, DIM5, format!("{at}/upper"))?;
        in_range(entry.lower, DIM5, format!("{at}/lower"))?;
        in_range(entry.dir, DIM5, format!("{at}/dir"))?;
        let e = expr(&entry.expr, format!("{at}/expr"), || {
            format!("connection entry {k} (H^{}_{}{})", entry.upper, entry.lower, entry.dir)
        })?;
        // Entries add to the Levi-Civita part when both are given.
        let sum = h.get(entry.upper, entry.lower, entry.dir) + &e;
        h.set(entry.upper, entry.lower, entry.dir, sum);
    }
    Ok(h)
}

fn complex(
    re: &str,
    im: &str,
    at: &str,
    entry: impl Fn() -> String,
) -> Result<ComplexExpression, ScenarioError> {
    Ok(ComplexExpression::new(
        expr(re, format!("{at}/re"), &entry)?,
        expr(im, format!("{at}/im"), &entry)?,
    ))
}

fn compile_gauge(raw: &RawGauge) -> Result<GaugeSector, ScenarioError> {
    let n = raw.n;
    if n == 0 {
        return Err(schema("/gauge/n", "gauge dimension must be positive"));
    }
    let mut theta = if raw.theta.is_empty() {
        ComplexMatrix::identity(n)
    } else {
        ComplexMatrix::zeros(n, n)
    };
    for (k, entry) in raw.theta.iter().enumerate() {
        let at = format!("/gauge/theta/{k}");
        in_range(entry.row, n, format!("{at}/row"))?;
        in_range(entry.col, n, format!("{at}/col"))?;
        let z = complex(&entry.re, &entry.im, &at, || {
            format!("theta entry {k} (θ_{}{})", entry.row, entry.col)
        })?;
        theta.set(entry.row, entry.col, z);
    }
    let mut field = GaugeField::zero(n);
    for (k, entry) in raw.entries.iter().enumerate() {
        let at = format!("/gauge/entries/{k}");
        in_range(entry.row, n, format!("{at}/row"))?;
        in_range(entry.col, n, format!("{at}/col"))?;
        in_range(entry.dir, DIM5, format!("{at}/dir"))?;
        let z = complex(&entry.re, &entry.im, &at, || {
            format!("gauge entry {k} (B^{}_{}{})", entry.row, entry.col, entry.dir)
        })?;
        let sum = field.get(entry.row, entry.col, entry.dir) + &z;
        field.set(entry.row, entry.col, entry.dir, sum);
    }
    Ok(GaugeSector { field, theta })
}

fn compile_npo(raw: &RawNpo) -> Result<NpoSector, ScenarioError> {
    let n = raw.n;
    let gens = npo::su_generators(n).map_err(|e| schema("/npo/n", e.to_string()))?;
    if !raw.g.is_finite() {
        return Err(schema("/npo/g", "coupling must be finite"));
    }
    let mut fields = NpoFields::zero(n, raw.g);
    for (k, entry) in raw.ca.iter().enumerate() {
        let at = format!("/npo/ca/{k}");
        in_range(entry.a, gens.count(), format!("{at}/a"))?;
        in_range(entry.dir, DIM5, format!("{at}/dir"))?;
        let e = expr(&entry.expr, format!("{at}/expr"), || {
            format!("npo entry ca/{k} (C^{}_{})", entry.a, entry.dir)
        })?;
        fields.ca[entry.a][entry.dir] = &fields.ca[entry.a][entry.dir] + &e;
    }
    for (k, entry) in raw.c0.iter().enumerate() {
        let at = format!("/npo/c0/{k}");
        in_range(entry.dir, DIM5, format!("{at}/dir"))?;
        let e = expr(&entry.expr, format!("{at}/expr"), || {
            format!("npo entry c0/{k} (C0_{})", entry.dir)
        })?;
        fields.c0[entry.dir] = &fields.c0[entry.dir] + &e;
    }
    for (k, entry) in raw.x.iter().enumerate() {
        let at = format!("/npo/x/{k}");
        in_range(entry.j, n, format!("{at}/j"))?;
        in_range(entry.dir, DIM5, format!("{at}/dir"))?;
        let z = complex(&entry.re, &entry.im, &at, || {
            format!("npo entry x/{k} (X_{}{})", entry.j, entry.dir)
        })?;
        fields.x[entry.j][entry.dir] = &fields.x[entry.j][entry.dir] + &z;
    }
    Ok(NpoSector { fields, gens })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"chart": {"min": [-1, -1, -1, -1], "max": [1, 1, 1, 1]}}"#;

    #[test]
    fn minimal_scenario_uses_defaults() {
        let s = from_str(MINIMAL).unwrap();
        assert_eq!(s.points, 16);
        assert!(s.gauge.is_none() && s.npo.is_none());
        assert_eq!(s.tolerances, Tolerances::default());
    }

    #[test]
    fn missing_chart_points_at_chart() {
        let err = from_str(r#"{"seed": 3}"#).unwrap_err();
        assert_eq!(err.pointer(), Some("/chart"));
    }

    #[test]
    fn nested_type_error_points_into_the_array() {
        let err = from_str(r#"{"chart": {"min": [0, 0, "a", 0], "max": [1, 1, 1, 1]}}"#).unwrap_err();
        assert_eq!(err.pointer(), Some("/chart/min/2"));
    }

    #[test]
    fn unknown_field_is_named() {
        let err = from_str(r#"{"chart": {"min": [0,0,0,0], "max": [1,1,1,1]}, "colour": 1}"#).unwrap_err();
        assert_eq!(err.pointer(), Some("/colour"));
    }

    #[test]
    fn out_of_range_index_is_rejected() {
        let text = r#"{"chart": {"min": [0,0,0,0], "max": [1,1,1,1]},
            "connection": {"entries": [{"upper": 5, "lower": 0, "dir": 0, "expr": "1"}]}}"#;
        let err = from_str(text).unwrap_err();
        assert_eq!(err.pointer(), Some("/connection/entries/0/upper"));
    }
}
