//! JSON form of certificates. Scalars are written as `p/q` strings so that
//! a certificate read back from a report is the exact object that was found.

use retrieval_core::frame::{DependencyWitness, NrFailWitness, PrFailWitness};
use retrieval_core::fusion::{NrNo, NrYes, PrFalsification, SignCondition};
use retrieval_core::scalar::{format_rational, parse_rational, Rational};
use retrieval_core::{Frame, FusionFrame};
use serde_json::{json, Map, Value};

#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    Dependency(DependencyWitness),
    PrFail(PrFailWitness),
    NrFail(NrFailWitness),
    FrameTight(Rational),
    FusionYes(NrYes),
    FusionNo(NrNo),
    /// Exact pair `a, b` with `⟨P_i a, b⟩ = 0` for every member.
    FusionPrPair {
        a: Vec<Rational>,
        b: Vec<Rational>,
    },
    SignCondition(SignCondition),
}

/// What a certificate is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Frame,
    Fusion,
}

impl Certificate {
    pub fn target(&self) -> Target {
        match self {
            Certificate::Dependency(_)
            | Certificate::PrFail(_)
            | Certificate::NrFail(_)
            | Certificate::FrameTight(_) => Target::Frame,
            _ => Target::Fusion,
        }
    }

    pub fn from_pr_falsification(w: &PrFalsification) -> Option<Self> {
        match w {
            PrFalsification::Exact { a, b, .. } => Some(Certificate::FusionPrPair {
                a: a.clone(),
                b: b.clone(),
            }),
            PrFalsification::FloatConfidence { .. } => None,
        }
    }

    /// Exact re-check; `None` when the certificate has no compact check
    /// (`rank-one-frame`) or its target is missing.
    pub fn verify(&self, frame: Option<&Frame>, fusion: Option<&FusionFrame>) -> Option<bool> {
        match self {
            Certificate::Dependency(w) => frame.map(|f| w.verify(f)),
            Certificate::PrFail(w) => frame.map(|f| w.verify(f)),
            Certificate::NrFail(w) => frame.map(|f| w.verify(f)),
            Certificate::FrameTight(a) => {
                frame.map(|f| retrieval_core::frame::tightness_constant(f).as_ref() == Some(a))
            }
            Certificate::FusionYes(y) => fusion.and_then(|ff| y.check(ff)),
            Certificate::FusionNo(w) => fusion.map(|ff| w.verify(ff)),
            Certificate::FusionPrPair { a, b } => fusion.map(|ff| {
                PrFalsification::Exact {
                    sample: 0,
                    subset: Vec::new(),
                    a: a.clone(),
                    b: b.clone(),
                }
                .check(ff)
                    == Some(true)
            }),
            Certificate::SignCondition(s) => fusion.map(|ff| s.verify(ff)),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Certificate::Dependency(w) => json!({
                "kind": "dependency",
                "subset": w.subset,
                "coefficients": vector(&w.coefficients),
            }),
            Certificate::PrFail(w) => json!({
                "kind": "pr-fail",
                "subset": w.subset,
                "a": vector(&w.a),
                "b": vector(&w.b),
                "x": vector(&w.x()),
                "y": vector(&w.y()),
            }),
            Certificate::NrFail(w) => json!({
                "kind": "nr-fail",
                "subset": w.subset,
                "x": vector(&w.x),
                "y": vector(&w.y),
                "u": vector(&w.u),
                "v": vector(&w.v),
            }),
            Certificate::FrameTight(a) => json!({ "kind": "frame-tight", "a": format_rational(a) }),
            Certificate::FusionYes(y) => match y {
                NrYes::Tight(a) => json!({ "kind": "fusion-tight", "a": format_rational(a) }),
                NrYes::IndicatorRowSpace(c) => {
                    json!({ "kind": "indicator-row-space", "coefficients": vector(c) })
                }
                NrYes::ProjectionSpan(c) => {
                    json!({ "kind": "projection-span", "coefficients": vector(c) })
                }
                NrYes::RankOneFrame => json!({ "kind": "rank-one-frame" }),
            },
            Certificate::FusionNo(w) => match w {
                NrNo::SquaredPair {
                    kernel,
                    u_sq,
                    v_sq,
                    roots,
                } => {
                    let mut m = Map::new();
                    m.insert("kind".into(), json!("squared-pair"));
                    m.insert("kernel".into(), vector(kernel));
                    m.insert("u_sq".into(), vector(u_sq));
                    m.insert("v_sq".into(), vector(v_sq));
                    if let Some((u, v)) = roots {
                        m.insert("u".into(), vector(u));
                        m.insert("v".into(), vector(v));
                    }
                    Value::Object(m)
                }
                NrNo::Pair { subset, x, y, u, v } => json!({
                    "kind": "fusion-pair",
                    "subset": subset,
                    "x": vector(x),
                    "y": vector(y),
                    "u": vector(u),
                    "v": vector(v),
                }),
                NrNo::SpanGap { x, u, v } => json!({
                    "kind": "span-gap",
                    "x": vector(x),
                    "u": vector(u),
                    "v": vector(v),
                }),
            },
            Certificate::FusionPrPair { a, b } => {
                json!({ "kind": "fusion-pr-pair", "a": vector(a), "b": vector(b) })
            }
            Certificate::SignCondition(s) => {
                json!({ "kind": "sign-condition", "epsilons": s.epsilons, "k": s.k })
            }
        }
    }

    pub fn from_json(v: &Value) -> Result<Self, String> {
        let kind = v
            .get("kind")
            .and_then(Value::as_str)
            .ok_or("certificate without kind")?;
        Ok(match kind {
            "dependency" => Certificate::Dependency(DependencyWitness {
                subset: indices(v, "subset")?,
                coefficients: rationals(v, "coefficients")?,
            }),
            "pr-fail" => Certificate::PrFail(PrFailWitness {
                subset: indices(v, "subset")?,
                a: rationals(v, "a")?,
                b: rationals(v, "b")?,
            }),
            "nr-fail" => Certificate::NrFail(NrFailWitness {
                subset: indices(v, "subset")?,
                x: rationals(v, "x")?,
                y: rationals(v, "y")?,
                u: rationals(v, "u")?,
                v: rationals(v, "v")?,
            }),
            "frame-tight" => Certificate::FrameTight(scalar(v, "a")?),
            "fusion-tight" => Certificate::FusionYes(NrYes::Tight(scalar(v, "a")?)),
            "indicator-row-space" => Certificate::FusionYes(NrYes::IndicatorRowSpace(rationals(v, "coefficients")?)),
            "projection-span" => Certificate::FusionYes(NrYes::ProjectionSpan(rationals(v, "coefficients")?)),
            "rank-one-frame" => Certificate::FusionYes(NrYes::RankOneFrame),
            "squared-pair" => {
                let roots = match (v.get("u"), v.get("v")) {
                    (Some(_), Some(_)) => Some((rationals(v, "u")?, rationals(v, "v")?)),
                    _ => None,
                };
                Certificate::FusionNo(NrNo::SquaredPair {
                    kernel: rationals(v, "kernel")?,
                    u_sq: rationals(v, "u_sq")?,
                    v_sq: rationals(v, "v_sq")?,
                    roots,
                })
            }
            "fusion-pair" => Certificate::FusionNo(NrNo::Pair {
                subset: indices(v, "subset")?,
                x: rationals(v, "x")?,
                y: rationals(v, "y")?,
                u: rationals(v, "u")?,
                v: rationals(v, "v")?,
            }),
            "span-gap" => Certificate::FusionNo(NrNo::SpanGap {
                x: rationals(v, "x")?,
                u: rationals(v, "u")?,
                v: rationals(v, "v")?,
            }),
            "fusion-pr-pair" => Certificate::FusionPrPair {
                a: rationals(v, "a")?,
                b: rationals(v, "b")?,
            },
            "sign-condition" => Certificate::SignCondition(SignCondition {
                epsilons: v
                    .get("epsilons")
                    .and_then(Value::as_array)
                    .ok_or("missing epsilons")?
                    .iter()
                    .map(|e| e.as_i64().and_then(|x| i8::try_from(x).ok()).ok_or("bad epsilon"))
                    .collect::<Result<_, _>>()?,
                k: v.get("k").and_then(Value::as_i64).ok_or("missing k")?,
            }),
            other => return Err(format!("unknown certificate kind `{other}`")),
        })
    }
}

pub fn vector(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(format_rational(x))).collect())
}

fn scalar(v: &Value, key: &str) -> Result<Rational, String> {
    let s = v
        .get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| format!("missing `{key}`"))?;
    parse_rational(s).map_err(|e| e.to_string())
}

fn rationals(v: &Value, key: &str) -> Result<Vec<Rational>, String> {
    v.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| format!("missing `{key}`"))?
        .iter()
        .map(|x| {
            let s = x.as_str().ok_or_else(|| format!("`{key}` entries must be strings"))?;
            parse_rational(s).map_err(|e| e.to_string())
        })
        .collect()
}

fn indices(v: &Value, key: &str) -> Result<Vec<usize>, String> {
    v.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| format!("missing `{key}`"))?
        .iter()
        .map(|x| {
            x.as_u64()
                .map(|i| i as usize)
                .ok_or_else(|| format!("bad index in `{key}`"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use retrieval_core::scalar::{int, ratio};

    #[test]
    fn round_trip() {
        let certs = [
            Certificate::NrFail(NrFailWitness {
                subset: vec![0],
                x: vec![int(0), int(1)],
                y: vec![int(1), int(-1)],
                u: vec![int(1), int(0)],
                v: vec![int(-1), int(2)],
            }),
            Certificate::FusionYes(NrYes::ProjectionSpan(vec![ratio(1, 2), int(-3)])),
            Certificate::FusionNo(NrNo::SquaredPair {
                kernel: vec![int(1), int(1), int(-1)],
                u_sq: vec![int(1), int(1), int(0)],
                v_sq: vec![int(0), int(0), int(1)],
                roots: Some((vec![int(1), int(1), int(0)], vec![int(0), int(0), int(1)])),
            }),
            Certificate::SignCondition(SignCondition {
                epsilons: vec![1, -1],
                k: 1,
            }),
        ];
        for c in certs {
            assert_eq!(Certificate::from_json(&c.to_json()).unwrap(), c);
        }
    }
}
