//! Run files: a frame or fusion frame plus the tasks to run on it.

use std::fmt;

use retrieval_core::fusion::FusionFrame;
use retrieval_core::scalar::{parse_rational, simplest_within, to_f64, Mode, Rational, DEFAULT_EPS};
use retrieval_core::sequences::VectorSequenceRule;
use retrieval_core::{Frame, Matrix, SubspaceBasis, WeightedSubspace};
use serde::Deserialize;
use serde_json::{Map, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// JSON path of the offending node, `$` for the document.
    pub path: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl ParseError {
    fn at(path: &str, message: impl Into<String>) -> Self {
        Self {
            path: path.to_string(),
            line: None,
            column: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            _ => write!(f, "at {}: {}", self.path, self.message),
        }
    }
}

impl std::error::Error for ParseError {}

type Parsed<T> = Result<T, ParseError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    Yes,
    No,
    Undecided,
    Pass,
    Fail,
    Error,
    Found,
    NotFound,
}

impl Expect {
    fn parse(s: &str, path: &str) -> Parsed<Self> {
        Ok(match s {
            "yes" => Expect::Yes,
            "no" => Expect::No,
            "undecided" => Expect::Undecided,
            "pass" => Expect::Pass,
            "fail" => Expect::Fail,
            "error" => Expect::Error,
            "found" => Expect::Found,
            "not-found" => Expect::NotFound,
            other => return Err(ParseError::at(path, format!("unknown expectation `{other}`"))),
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Expect::Yes => "yes",
            Expect::No => "no",
            Expect::Undecided => "undecided",
            Expect::Pass => "pass",
            Expect::Fail => "fail",
            Expect::Error => "error",
            Expect::Found => "found",
            Expect::NotFound => "not-found",
        }
    }

    /// Whether a task outcome string satisfies the expectation.
    pub fn matches(self, outcome: &str) -> bool {
        outcome
            == match self {
                Expect::Yes => "CertifiedYes",
                Expect::No => "CertifiedNo",
                Expect::Undecided => "Undecided",
                Expect::Pass => "pass",
                Expect::Fail => "fail",
                Expect::Error => "error",
                Expect::Found => "found",
                Expect::NotFound => "not-found",
            }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theorem {
    /// Independent `n`-sets doing norm retrieval are orthogonal.
    Tt,
    /// With `m ≥ 2n − 1`, full spark frames do phase retrieval, and phase
    /// retrieval forces `m ≥ 2n − 1`.
    FullSparkPr,
    SOperator,
    Normalization,
    SignCondition,
    Invariance,
}

impl Theorem {
    pub const ALL: [Theorem; 6] = [
        Theorem::Tt,
        Theorem::FullSparkPr,
        Theorem::SOperator,
        Theorem::Normalization,
        Theorem::SignCondition,
        Theorem::Invariance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::Tt => "TT",
            Theorem::FullSparkPr => "full-spark-pr",
            Theorem::SOperator => "s-operator",
            Theorem::Normalization => "normalization",
            Theorem::SignCondition => "sign-condition",
            Theorem::Invariance => "invariance",
        }
    }

    fn default_samples(self) -> usize {
        match self {
            Theorem::Tt => 500,
            Theorem::FullSparkPr => 200,
            Theorem::SOperator => 1000,
            Theorem::Normalization => 1000,
            Theorem::SignCondition => 200,
            Theorem::Invariance => 100,
        }
    }
}

/// `X` (columns), images `T x_j` (columns) and `ε`.
#[derive(Clone, Debug, PartialEq)]
pub struct SOperatorParams {
    pub x: Matrix<f64>,
    pub images: Matrix<f64>,
    pub epsilon: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TaskKind {
    Analyze,
    Pr,
    Nr,
    Spark,
    FullSpark,
    Bounds,
    FusionNr,
    FusionPrFalsify {
        samples: usize,
    },
    SignCondition,
    PerturbNrStability {
        samples: usize,
    },
    Density {
        samples: usize,
        grid: u64,
    },
    SOperator(SOperatorParams),
    Normalization {
        psi: Frame,
        a: f64,
        b: f64,
    },
    FinitelyFullSpark {
        rule: VectorSequenceRule,
        coords: Vec<usize>,
        truncation: usize,
    },
    PairSumsCp {
        n: usize,
    },
    BesselProbe {
        n: usize,
    },
    VerifyTheorem {
        theorem: Theorem,
        samples: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Task {
    /// Name as written in the input.
    pub name: String,
    pub kind: TaskKind,
    pub expect: Option<Expect>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub name: Option<String>,
    pub mode: Mode,
    pub trials: usize,
    pub seed: u64,
    pub jobs: usize,
    pub max_members: usize,
    pub frame: Option<Frame>,
    pub fusion: Option<FusionFrame>,
    pub tasks: Vec<Task>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    #[allow(dead_code)]
    description: Option<String>,
    #[serde(default)]
    mode: Option<String>,
    #[serde(default)]
    eps: Option<f64>,
    #[serde(default)]
    trials: Option<usize>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    jobs: Option<usize>,
    #[serde(default)]
    max_subset_bits: Option<usize>,
    #[serde(default)]
    dim: Option<usize>,
    #[serde(default)]
    frame: Option<Value>,
    #[serde(default)]
    fusion: Option<Value>,
    #[serde(default)]
    tasks: Vec<Value>,
}

pub const DEFAULT_TRIALS: usize = 10_000;

/// Parses a run file. Syntax errors carry line and column; semantic errors
/// carry the JSON path of the offending node.
pub fn parse_input(text: &str) -> Parsed<RunConfig> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| ParseError {
        path: "$".into(),
        line: Some(e.line()),
        column: Some(e.column()),
        message: e.to_string(),
    })?;
    let mode = match raw.mode.as_deref() {
        None | Some("exact") => Mode::Exact,
        Some("float") => Mode::Float {
            eps: raw.eps.unwrap_or(DEFAULT_EPS),
        },
        Some(other) => return Err(ParseError::at("$.mode", format!("unknown mode `{other}`"))),
    };
    if let Some(eps) = raw.eps {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(ParseError::at("$.eps", "eps must be positive"));
        }
    }
    let defaults = retrieval_core::SearchOptions::default();
    let frame = raw
        .frame
        .as_ref()
        .map(|v| parse_frame(v, raw.dim, mode, "$.frame"))
        .transpose()?;
    let fusion = raw
        .fusion
        .as_ref()
        .map(|v| parse_fusion(v, raw.dim, mode, "$.fusion"))
        .transpose()?;
    let tasks = raw
        .tasks
        .iter()
        .enumerate()
        .map(|(i, t)| parse_task(t, mode, &format!("$.tasks[{i}]")))
        .collect::<Parsed<Vec<_>>>()?;
    Ok(RunConfig {
        name: raw.name,
        mode,
        trials: raw.trials.unwrap_or(DEFAULT_TRIALS),
        seed: raw.seed.unwrap_or(0),
        jobs: raw.jobs.unwrap_or(1).max(1),
        max_members: raw.max_subset_bits.unwrap_or(defaults.max_members),
        frame,
        fusion,
        tasks,
    })
}

fn core_error(path: &str, e: retrieval_core::Error) -> ParseError {
    ParseError::at(path, e.to_string())
}

/// Exact scalars are strings (`"3"`, `"-2/7"`, `"0.25"`) or JSON integers.
/// Float mode also takes JSON numbers, snapped to the simplest rational
/// within `eps`.
pub fn parse_scalar(v: &Value, mode: Mode, path: &str) -> Parsed<Rational> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| core_error(path, e)),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                return Ok(Rational::from_integer(i.into()));
            }
            match mode {
                Mode::Exact => Err(ParseError::at(
                    path,
                    format!("non-integer number {n} in exact mode; write it as a string"),
                )),
                Mode::Float { eps } => n
                    .as_f64()
                    .and_then(|x| simplest_within(x, eps))
                    .ok_or_else(|| ParseError::at(path, format!("malformed scalar `{n}`"))),
            }
        }
        other => Err(ParseError::at(path, format!("malformed scalar `{other}`"))),
    }
}

fn parse_float(v: &Value, path: &str) -> Parsed<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| ParseError::at(path, "malformed number")),
        Value::String(s) => parse_rational(s).map(|r| to_f64(&r)).map_err(|e| core_error(path, e)),
        _ => Err(ParseError::at(path, "expected a number")),
    }
}

fn array<'a>(v: &'a Value, path: &str) -> Parsed<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| ParseError::at(path, "expected an array"))
}

fn object<'a>(v: &'a Value, path: &str, allowed: &[&str]) -> Parsed<&'a Map<String, Value>> {
    let m = v
        .as_object()
        .ok_or_else(|| ParseError::at(path, "expected an object"))?;
    if let Some(k) = m.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(ParseError::at(path, format!("unknown field `{k}`")));
    }
    Ok(m)
}

fn field<'a>(m: &'a Map<String, Value>, key: &str, path: &str) -> Parsed<&'a Value> {
    m.get(key)
        .ok_or_else(|| ParseError::at(path, format!("missing field `{key}`")))
}

/// Rows of scalars, all of length `dim` (inferred from the first row when
/// `dim` is absent).
fn parse_rows(v: &Value, dim: Option<usize>, mode: Mode, path: &str) -> Parsed<Vec<Vec<Rational>>> {
    let rows = array(v, path)?;
    let mut width = dim;
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            let rp = format!("{path}[{i}]");
            let entries = array(r, &rp)?;
            let w = *width.get_or_insert(entries.len());
            if entries.len() != w {
                return Err(ParseError::at(
                    &rp,
                    format!("ragged row: expected {w} entries, found {}", entries.len()),
                ));
            }
            entries
                .iter()
                .enumerate()
                .map(|(j, x)| parse_scalar(x, mode, &format!("{rp}[{j}]")))
                .collect()
        })
        .collect()
}

fn parse_frame(v: &Value, dim: Option<usize>, mode: Mode, path: &str) -> Parsed<Frame> {
    let m = object(v, path, &["vectors"])?;
    let vp = format!("{path}.vectors");
    let vectors = parse_rows(field(m, "vectors", path)?, dim, mode, &vp)?;
    if vectors.is_empty() {
        return Err(ParseError::at(&vp, "empty family"));
    }
    let n = dim.or_else(|| vectors.first().map(Vec::len)).unwrap_or(0);
    Frame::new(n, vectors).map_err(|e| core_error(&vp, e))
}

fn parse_fusion(v: &Value, dim: Option<usize>, mode: Mode, path: &str) -> Parsed<FusionFrame> {
    let m = object(v, path, &["subspaces"])?;
    let sp = format!("{path}.subspaces");
    let subspaces = array(field(m, "subspaces", path)?, &sp)?;
    if subspaces.is_empty() {
        return Err(ParseError::at(&sp, "empty family"));
    }
    let mut n = dim;
    let mut members = Vec::new();
    for (i, s) in subspaces.iter().enumerate() {
        let ip = format!("{sp}[{i}]");
        let o = object(s, &ip, &["basis", "weight"])?;
        let bp = format!("{ip}.basis");
        let rows = parse_rows(field(o, "basis", &ip)?, n, mode, &bp)?;
        let d = *n.get_or_insert_with(|| rows.first().map_or(0, Vec::len));
        if d == 0 {
            return Err(ParseError::at(&bp, "cannot infer the ambient dimension"));
        }
        let basis = SubspaceBasis::from_columns(d, rows).map_err(|e| core_error(&bp, e))?;
        let weight = match o.get("weight") {
            Some(w) => parse_scalar(w, mode, &format!("{ip}.weight"))?,
            None => Rational::from_integer(1.into()),
        };
        members.push(WeightedSubspace::new(basis, weight).map_err(|e| core_error(&ip, e))?);
    }
    FusionFrame::new(n.unwrap_or(0), members).map_err(|e| core_error(&sp, e))
}

fn usize_param(m: &Map<String, Value>, key: &str, default: usize, path: &str) -> Parsed<usize> {
    match m.get(key) {
        None => Ok(default),
        Some(v) => v
            .as_u64()
            .and_then(|x| usize::try_from(x).ok())
            .ok_or_else(|| ParseError::at(&format!("{path}.{key}"), "expected a non-negative integer")),
    }
}

fn float_matrix(v: &Value, path: &str) -> Parsed<Matrix<f64>> {
    let cols = array(v, path)?;
    let cols = cols
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let cp = format!("{path}[{i}]");
            array(c, &cp)?
                .iter()
                .enumerate()
                .map(|(j, x)| parse_float(x, &format!("{cp}[{j}]")))
                .collect::<Parsed<Vec<f64>>>()
        })
        .collect::<Parsed<Vec<_>>>()?;
    let n = cols.first().map_or(0, Vec::len);
    Matrix::from_columns(n, &cols).map_err(|e| core_error(path, e))
}

fn parse_rule(m: &Map<String, Value>, mode: Mode, path: &str) -> Parsed<VectorSequenceRule> {
    let rp = format!("{path}.rule");
    let name = field(m, "rule", path)?
        .as_str()
        .ok_or_else(|| ParseError::at(&rp, "expected a string"))?;
    Ok(match name {
        "Canonical" => VectorSequenceRule::Canonical,
        "PairSums" => VectorSequenceRule::PairSums,
        "PowersOfTwoFamily" => VectorSequenceRule::PowersOfTwoFamily(usize_param(m, "n", 0, path)?),
        "ExplicitList" => VectorSequenceRule::ExplicitList(parse_rows(
            field(m, "list", path)?,
            None,
            mode,
            &format!("{path}.list"),
        )?),
        other => return Err(ParseError::at(&rp, format!("unknown rule `{other}`"))),
    })
}

const TASK_NAMES: &str = "analyze, pr, nr, spark, full-spark, bounds, fusion-nr, fusion-pr-falsify, \
sign-condition, perturb-nr-stability, density, s-operator, normalization, finitely-full-spark, \
pair-sums-cp, bessel-probe, verify-theorem:<name>";

fn parse_task(v: &Value, mode: Mode, path: &str) -> Parsed<Task> {
    let empty = Map::new();
    let (name, params) = match v {
        Value::String(s) => (s.as_str(), &empty),
        Value::Object(m) => {
            let name = field(m, "task", path)?
                .as_str()
                .ok_or_else(|| ParseError::at(&format!("{path}.task"), "expected a string"))?;
            (name, m)
        }
        _ => return Err(ParseError::at(path, "expected a task name or object")),
    };
    let allowed: &[&str] = match name {
        "fusion-pr-falsify" | "perturb-nr-stability" => &["samples"],
        "density" => &["samples", "grid"],
        "s-operator" => &["x", "images", "epsilon"],
        "normalization" => &["psi", "a", "b"],
        "finitely-full-spark" => &["rule", "n", "list", "coords", "truncation"],
        "pair-sums-cp" | "bessel-probe" => &["n"],
        n if n.starts_with("verify-theorem:") => &["samples"],
        _ => &[],
    };
    let mut keys = vec!["task", "expect"];
    keys.extend_from_slice(allowed);
    if let Some(k) = params.keys().find(|k| !keys.contains(&k.as_str())) {
        return Err(ParseError::at(path, format!("unknown field `{k}` for task `{name}`")));
    }
    let expect = params
        .get("expect")
        .map(|e| {
            let ep = format!("{path}.expect");
            Expect::parse(e.as_str().ok_or_else(|| ParseError::at(&ep, "expected a string"))?, &ep)
        })
        .transpose()?;
    let kind = match name {
        "analyze" => TaskKind::Analyze,
        "pr" => TaskKind::Pr,
        "nr" => TaskKind::Nr,
        "spark" => TaskKind::Spark,
        "full-spark" => TaskKind::FullSpark,
        "bounds" => TaskKind::Bounds,
        "fusion-nr" => TaskKind::FusionNr,
        "fusion-pr-falsify" => TaskKind::FusionPrFalsify {
            samples: usize_param(params, "samples", 100, path)?,
        },
        "sign-condition" => TaskKind::SignCondition,
        "perturb-nr-stability" => TaskKind::PerturbNrStability {
            samples: usize_param(params, "samples", 200, path)?,
        },
        "density" => TaskKind::Density {
            samples: usize_param(params, "samples", 200, path)?,
            grid: usize_param(params, "grid", 1000, path)? as u64,
        },
        "s-operator" => TaskKind::SOperator(SOperatorParams {
            x: float_matrix(field(params, "x", path)?, &format!("{path}.x"))?,
            images: float_matrix(field(params, "images", path)?, &format!("{path}.images"))?,
            epsilon: parse_float(field(params, "epsilon", path)?, &format!("{path}.epsilon"))?,
        }),
        "normalization" => TaskKind::Normalization {
            psi: parse_frame(
                &serde_json::json!({ "vectors": field(params, "psi", path)? }),
                None,
                mode,
                &format!("{path}.psi"),
            )?,
            a: parse_float(field(params, "a", path)?, &format!("{path}.a"))?,
            b: parse_float(field(params, "b", path)?, &format!("{path}.b"))?,
        },
        "finitely-full-spark" => {
            let cp = format!("{path}.coords");
            let coords = array(field(params, "coords", path)?, &cp)?
                .iter()
                .map(|c| {
                    c.as_u64()
                        .map(|x| x as usize)
                        .ok_or_else(|| ParseError::at(&cp, "expected integers"))
                })
                .collect::<Parsed<Vec<_>>>()?;
            TaskKind::FinitelyFullSpark {
                rule: parse_rule(params, mode, path)?,
                coords,
                truncation: usize_param(params, "truncation", 16, path)?,
            }
        }
        "pair-sums-cp" => TaskKind::PairSumsCp {
            n: usize_param(params, "n", 3, path)?,
        },
        "bessel-probe" => TaskKind::BesselProbe {
            n: usize_param(params, "n", 16, path)?,
        },
        other => match other.strip_prefix("verify-theorem:") {
            Some(t) => {
                let theorem = Theorem::ALL
                    .into_iter()
                    .find(|x| x.name() == t)
                    .ok_or_else(|| ParseError::at(path, format!("unknown theorem suite `{t}`")))?;
                TaskKind::VerifyTheorem {
                    theorem,
                    samples: usize_param(params, "samples", theorem.default_samples(), path)?,
                }
            }
            None => {
                return Err(ParseError::at(
                    path,
                    format!("unknown task `{other}`; expected one of {TASK_NAMES}"),
                ))
            }
        },
    };
    Ok(Task {
        name: name.to_string(),
        kind,
        expect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_documents() {
        let c =
            parse_input(r#"{"mode":"exact","dim":3,"frame":{"vectors":[["1","0","0"],["0","1","0"],["1","-1","0"]]}}"#)
                .unwrap();
        assert_eq!(c.frame.unwrap().len(), 3);
        let c =
            parse_input(r#"{"fusion":{"subspaces":[{"basis":[["0","1","0"],["0","0","1"]],"weight":"1"}]}}"#).unwrap();
        assert_eq!(c.fusion.unwrap().ambient_dim(), 3);
    }

    #[test]
    fn errors_carry_locations() {
        let e = parse_input(r#"{"frame":{"vectors":[["1","1/0"]]}}"#).unwrap_err();
        assert_eq!(e.path, "$.frame.vectors[0][1]");
        assert!(e.message.contains("zero denominator"));
        let e = parse_input(r#"{"frame":{"vectors":[]}}"#).unwrap_err();
        assert!(e.message.contains("empty family"), "{e}");
        let e = parse_input(r#"{"frame":{"vectors":[["1","2"],["3"]]}}"#).unwrap_err();
        assert!(e.message.contains("ragged"));
        let e = parse_input("{\n \"tasks\": [\"nope\"]}").unwrap_err();
        assert!(e.message.contains("unknown task"));
        let e = parse_input("{\n \"tasks\": [").unwrap_err();
        assert_eq!(e.line, Some(2));
        let e = parse_input(r#"{"frame":{"vectors":[[0.5]]}}"#).unwrap_err();
        assert!(e.message.contains("exact mode"));
    }

    #[test]
    fn float_numbers_snap() {
        let c = parse_input(r#"{"mode":"float","frame":{"vectors":[[0.6, 1]]}}"#).unwrap();
        assert_eq!(c.frame.unwrap().vector(0)[0], Rational::new(3.into(), 5.into()));
    }

    #[test]
    fn task_objects() {
        let c = parse_input(r#"{"tasks":["nr",{"task":"density","samples":5,"expect":"pass"},"verify-theorem:TT"]}"#)
            .unwrap();
        assert_eq!(c.tasks[1].kind, TaskKind::Density { samples: 5, grid: 1000 });
        assert_eq!(c.tasks[1].expect, Some(Expect::Pass));
        assert_eq!(
            c.tasks[2].kind,
            TaskKind::VerifyTheorem {
                theorem: Theorem::Tt,
                samples: 500
            }
        );
        assert!(parse_input(r#"{"tasks":[{"task":"nr","samples":3}]}"#).is_err());
    }
}
