//! JSON documents for spaces, credences and measures, and number formatting
//! for reports.
//!
//! Float mode writes numbers with 17 significant digits; rational mode writes
//! exact values as `"n/d"` strings.

use std::str::FromStr;

use serde::Deserialize;
use serde_json::{json, Map, Number, Value as Json};
use thiserror::Error;

use crate::coherence::{Certificate, CoherenceVerdict, LambdaRepresentation};
use crate::credence::{Credence, CredenceRule};
use crate::dominance::{DominanceVerdict, ProjectionResult, PythagoreanRecord, Score};
use crate::families::StabilityFact;
use crate::error::CredalError;
use crate::inaccuracy::{ConvexGenerator, ExtReal, GeneratorKind, InaccuracyMeasure, SeriesStatus, SeriesVerdict, WeightRule, Weights};
use crate::opinion_space::{Family, OpinionSpace, World};
use crate::scalar::{format_rational, parse_rational, rational_from_f64, NumericMode, Rational, Scalar, Value};

#[derive(Debug, Error)]
pub enum DocError {
    /// Malformed document; `location` is a line/column or a field path.
    #[error("{location}: {message}")]
    Parse { location: String, message: String },
    /// Well-formed document describing an invalid object.
    #[error(transparent)]
    Invalid(#[from] CredalError),
}

fn parse_err<T>(location: &str, message: impl Into<String>) -> Result<T, DocError> {
    Err(DocError::Parse { location: location.into(), message: message.into() })
}

fn from_json_str<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T, DocError> {
    serde_json::from_str(text).map_err(|e| DocError::Parse {
        location: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum SpaceKindDoc {
    Explicit,
    Tails,
    InitialSegments,
    Partition,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceDoc {
    kind: SpaceKindDoc,
    worlds: Option<Vec<u64>>,
    propositions: Option<Json>,
    truncation: Option<usize>,
    /// Label of the added point of a compactified family.
    star: Option<String>,
}

pub fn parse_space(text: &str) -> Result<OpinionSpace, DocError> {
    space_from_doc(from_json_str(text)?)
}

fn space_from_json(v: Json) -> Result<OpinionSpace, DocError> {
    let doc: SpaceDoc = serde_json::from_value(v)
        .map_err(|e| DocError::Parse { location: "/space".into(), message: e.to_string() })?;
    space_from_doc(doc)
}

fn space_from_doc(doc: SpaceDoc) -> Result<OpinionSpace, DocError> {
    let space = match doc.kind {
        SpaceKindDoc::Explicit => {
            let Some(worlds) = doc.worlds else { return parse_err("/worlds", "explicit spaces list their worlds") };
            let Some(props) = doc.propositions else {
                return parse_err("/propositions", "explicit spaces list their propositions");
            };
            let props: Vec<Vec<u64>> = serde_json::from_value(props).map_err(|e| DocError::Parse {
                location: "/propositions".into(),
                message: format!("expected arrays of integer world labels: {e}"),
            })?;
            OpinionSpace::explicit(worlds, props)?
        }
        kind => {
            if doc.worlds.is_some() {
                return parse_err("/worlds", "symbolic families have the naturals as worlds");
            }
            let family = match kind {
                SpaceKindDoc::Tails => Family::TailSets,
                SpaceKindDoc::InitialSegments => Family::InitialSegments,
                _ => Family::CountablePartition { cells: partition_cells(doc.propositions.as_ref())? },
            };
            if !matches!(family, Family::CountablePartition { .. }) && doc.propositions.is_some() {
                return parse_err("/propositions", "only partitions take family parameters");
            }
            OpinionSpace::symbolic(family)?
        }
    };
    let space = match doc.truncation {
        Some(k) => space.with_truncation(k)?,
        None => space,
    };
    match doc.star {
        None => Ok(space),
        Some(label) => {
            let compact = space.compactify()?.space;
            if compact.star() == Some(label.as_str()) {
                Ok(compact)
            } else {
                parse_err("/star", format!("`{label}` is not the added point of this family"))
            }
        }
    }
}

fn partition_cells(props: Option<&Json>) -> Result<Option<usize>, DocError> {
    let Some(p) = props else { return Ok(None) };
    let cells = p.get("family_params").and_then(|f| f.get("cells"));
    match cells {
        None | Some(Json::Null) if p.get("family_params").is_some() => Ok(None),
        Some(Json::Number(n)) => match n.as_u64() {
            Some(m) => Ok(Some(m as usize)),
            None => parse_err("/propositions/family_params/cells", "expected a positive integer"),
        },
        _ => parse_err("/propositions", "expected {\"family_params\": {\"cells\": m}}"),
    }
}

pub fn space_to_json(space: &OpinionSpace) -> Json {
    let mut m = Map::new();
    m.insert("kind".into(), json!(space.kind().as_str()));
    if let Some(e) = space.as_explicit() {
        m.insert("worlds".into(), json!(e.worlds()));
        let props: Vec<Vec<u64>> = e.propositions().iter().map(|p| p.iter().copied().collect()).collect();
        m.insert("propositions".into(), json!(props));
    } else {
        if let Some(Family::CountablePartition { cells: Some(c) }) = space.family() {
            m.insert("propositions".into(), json!({ "family_params": { "cells": c } }));
        }
        m.insert("truncation".into(), json!(space.truncation_default()));
        if let Some(s) = space.star() {
            m.insert("star".into(), json!(s));
        }
    }
    Json::Object(m)
}

/// Where a credence document says its space lives.
#[derive(Clone, Debug)]
pub enum SpaceRef {
    Path(String),
    Inline(OpinionSpace),
}

#[derive(Clone, Debug)]
pub struct CredenceDoc {
    pub credence: Credence,
    pub space: Option<SpaceRef>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CredenceDocRaw {
    space: Option<Json>,
    values: Json,
}

/// An exact rational from a JSON number (its decimal text) or an `"n/d"` string.
fn number_at(v: &Json, location: &str) -> Result<Rational, DocError> {
    let parsed = match v {
        Json::Number(n) => {
            let text = n.to_string();
            parse_rational(&text).or_else(|| text.parse::<f64>().ok().and_then(rational_from_f64))
        }
        Json::String(s) => parse_rational(s),
        _ => None,
    };
    match parsed {
        Some(r) => Ok(r),
        None => parse_err(location, format!("expected a number or \"n/d\" string, got {v}")),
    }
}

fn f64_param(params: &Json, key: &str) -> Result<f64, DocError> {
    match params.get(key) {
        Some(v) => Ok(number_at(v, &format!("/values/params/{key}"))?.to_f64()),
        None => parse_err(&format!("/values/params/{key}"), "missing parameter"),
    }
}

pub fn parse_credence(text: &str) -> Result<CredenceDoc, DocError> {
    let raw: CredenceDocRaw = from_json_str(text)?;
    let space = match raw.space {
        None | Some(Json::Null) => None,
        Some(Json::String(p)) => Some(SpaceRef::Path(p)),
        Some(v @ Json::Object(_)) => Some(SpaceRef::Inline(space_from_json(v)?)),
        Some(_) => return parse_err("/space", "expected a path or an inline space document"),
    };
    let credence = match &raw.values {
        Json::Array(items) => {
            let values = items
                .iter()
                .enumerate()
                .map(|(i, v)| number_at(v, &format!("/values/{i}")))
                .collect::<Result<Vec<_>, _>>()?;
            Credence::from_rationals(values)?
        }
        Json::Object(o) => {
            let Some(Json::String(rule)) = o.get("rule") else {
                return parse_err("/values/rule", "expected inv_sqrt, zero, geometric or const");
            };
            let params = o.get("params").cloned().unwrap_or(Json::Object(Map::new()));
            let rule = match rule.as_str() {
                "inv_sqrt" => CredenceRule::InvSqrt {
                    scale: if params.get("scale").is_some() { f64_param(&params, "scale")? } else { 1.0 },
                },
                "zero" => CredenceRule::Zero,
                "geometric" => CredenceRule::Geometric { scale: f64_param(&params, "scale")?, ratio: f64_param(&params, "ratio")? },
                "const" => CredenceRule::Const { value: f64_param(&params, "value")? },
                other => return parse_err("/values/rule", format!("unknown rule `{other}`")),
            };
            let c = Credence::rule(rule)?;
            match o.get("declared_limit") {
                None | Some(Json::Null) => {}
                Some(v) => {
                    let declared = number_at(v, "/values/declared_limit")?.to_f64();
                    if c.limit().is_some_and(|l| (l - declared).abs() > 1e-12) {
                        return Err(CredalError::InvalidCredence(format!(
                            "declared limit {declared} disagrees with the rule's limit {:?}",
                            c.limit()
                        ))
                        .into());
                    }
                }
            }
            c
        }
        _ => return parse_err("/values", "expected an array or a rule object"),
    };
    Ok(CredenceDoc { credence, space })
}

pub fn credence_to_json(c: &Credence, fmt: &NumberFormat) -> Json {
    match c {
        Credence::Finite { exact, approx } => {
            let vals: Vec<Json> = match fmt.mode {
                NumericMode::Rational => exact.iter().map(|r| json!(format_rational(r))).collect(),
                NumericMode::Float => approx.iter().map(|x| fmt.float(*x)).collect(),
            };
            json!({ "values": vals })
        }
        Credence::Rule(r) => {
            let params = match r {
                CredenceRule::InvSqrt { scale } => json!({ "scale": fmt.float(*scale) }),
                CredenceRule::Geometric { scale, ratio } => json!({ "scale": fmt.float(*scale), "ratio": fmt.float(*ratio) }),
                CredenceRule::Const { value } => json!({ "value": fmt.float(*value) }),
                CredenceRule::Zero | CredenceRule::Custom { .. } => json!({}),
            };
            let limit = c.limit().map_or(Json::Null, |l| fmt.float(l));
            json!({ "values": { "rule": r.name(), "params": params, "declared_limit": limit } })
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureDoc {
    name: Option<String>,
    generator: Option<Json>,
    weights: Option<Json>,
}

pub fn parse_measure(text: &str) -> Result<InaccuracyMeasure, DocError> {
    let doc: MeasureDoc = from_json_str(text)?;
    let name = doc.name.clone().unwrap_or_else(|| "custom".into());
    if doc.generator.is_none() && doc.weights.is_none() {
        return match name.as_str() {
            "brier" => Ok(InaccuracyMeasure::brier()),
            "generalized_brier" => Ok(InaccuracyMeasure::generalized_brier()),
            "walsh" => Ok(InaccuracyMeasure::walsh()),
            _ => parse_err("/generator", "missing generator (or use the name brier, generalized_brier or walsh)"),
        };
    }
    let Some(g) = doc.generator else { return parse_err("/generator", "missing generator") };
    let generator = parse_generator(&g)?;
    let weights = match doc.weights {
        None => Weights::unit(),
        Some(w) => parse_weights(&w)?,
    };
    Ok(InaccuracyMeasure::new(name, generator, weights))
}

fn parse_generator(g: &Json) -> Result<ConvexGenerator, DocError> {
    let Some(Json::String(kind)) = g.get("kind") else {
        return parse_err("/generator/kind", "expected quadratic, shifted_entropy or tabulated");
    };
    let mut gen = match kind.as_str() {
        "quadratic" => ConvexGenerator::quadratic(),
        "shifted_entropy" => ConvexGenerator::shifted_entropy(),
        "tabulated" => match g.get("slopes") {
            None => ConvexGenerator::tabulated_default(),
            Some(Json::Array(s)) => {
                let slopes = s
                    .iter()
                    .enumerate()
                    .map(|(i, v)| number_at(v, &format!("/generator/slopes/{i}")))
                    .collect::<Result<Vec<_>, _>>()?;
                ConvexGenerator::tabulated(slopes)?
            }
            Some(_) => return parse_err("/generator/slopes", "expected an array"),
        },
        other => return parse_err("/generator/kind", format!("unknown generator `{other}`")),
    };
    if let Some(shift) = g.get("shift") {
        let Some([a, b]) = shift.as_array().map(Vec::as_slice) else {
            return parse_err("/generator/shift", "expected [a, b]");
        };
        gen = gen.with_linear_shift(number_at(a, "/generator/shift/0")?, number_at(b, "/generator/shift/1")?);
    }
    Ok(gen)
}

fn parse_weights(w: &Json) -> Result<Weights, DocError> {
    let Some(Json::String(rule)) = w.get("rule") else {
        return parse_err("/weights/rule", "expected const, geometric or list");
    };
    let params = w.get("params").cloned().unwrap_or(Json::Object(Map::new()));
    let num = |key: &str| -> Result<f64, DocError> {
        match params.get(key) {
            Some(v) => Ok(number_at(v, &format!("/weights/params/{key}"))?.to_f64()),
            None => parse_err(&format!("/weights/params/{key}"), "missing parameter"),
        }
    };
    let rule = match rule.as_str() {
        "const" => WeightRule::Const { value: if params.get("value").is_some() { num("value")? } else { 1.0 } },
        "geometric" => WeightRule::Geometric { scale: num("scale")?, ratio: num("ratio")? },
        "list" => {
            let Some(Json::Array(vals)) = params.get("values") else {
                return parse_err("/weights/params/values", "expected an array");
            };
            let values = vals
                .iter()
                .enumerate()
                .map(|(i, v)| Ok(number_at(v, &format!("/weights/params/values/{i}"))?.to_f64()))
                .collect::<Result<Vec<_>, DocError>>()?;
            WeightRule::List { values }
        }
        other => return parse_err("/weights/rule", format!("unknown weight rule `{other}`")),
    };
    Ok(Weights::new(rule)?)
}

pub fn measure_to_json(m: &InaccuracyMeasure, fmt: &NumberFormat) -> Json {
    let mut g = Map::new();
    g.insert("kind".into(), json!(m.generator.name()));
    if let GeneratorKind::Tabulated { slopes } = m.generator.kind() {
        g.insert("slopes".into(), Json::Array(slopes.iter().map(|s| fmt.rational(s)).collect()));
    }
    let (a, b) = m.generator.shift();
    if *a != Rational::zero() || *b != Rational::zero() {
        g.insert("shift".into(), json!([fmt.rational(a), fmt.rational(b)]));
    }
    let weights = match m.weights.rule() {
        WeightRule::Const { value } => json!({ "rule": "const", "params": { "value": fmt.float(*value) } }),
        WeightRule::Geometric { scale, ratio } => {
            json!({ "rule": "geometric", "params": { "scale": fmt.float(*scale), "ratio": fmt.float(*ratio) } })
        }
        WeightRule::List { values } => {
            json!({ "rule": "list", "params": { "values": values.iter().map(|v| fmt.float(*v)).collect::<Vec<_>>() } })
        }
    };
    json!({ "name": m.name, "generator": Json::Object(g), "weights": weights })
}

/// `%.17g`: shortest fixed or scientific rendering with 17 significant digits.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("exponent");
    let (sign, mant) = match mant.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mant),
    };
    let digits: String = mant.chars().filter(|c| *c != '.').collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    if (-5..17).contains(&exp) {
        if exp >= 0 {
            let int_len = exp as usize + 1;
            if digits.len() <= int_len {
                format!("{sign}{digits}{}", "0".repeat(int_len - digits.len()))
            } else {
                format!("{sign}{}.{}", &digits[..int_len], &digits[int_len..])
            }
        } else {
            format!("{sign}0.{}{digits}", "0".repeat((-exp - 1) as usize))
        }
    } else {
        let (head, tail) = digits.split_at(1);
        if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NumberFormat {
    pub mode: NumericMode,
}

impl NumberFormat {
    pub fn new(mode: NumericMode) -> Self {
        NumberFormat { mode }
    }

    /// A float as a JSON number; non-finite values become `null`.
    pub fn float(&self, x: f64) -> Json {
        if !x.is_finite() {
            return Json::Null;
        }
        Json::Number(Number::from_str(&format_g17(x)).expect("valid JSON number"))
    }

    pub fn rational(&self, r: &Rational) -> Json {
        match self.mode {
            NumericMode::Rational => json!(format_rational(r)),
            NumericMode::Float => self.float(r.to_f64()),
        }
    }

    pub fn value(&self, v: &Value) -> Json {
        match v {
            Value::Exact(r) => self.rational(r),
            Value::Float(x) => self.float(*x),
        }
    }

    pub fn ext(&self, x: ExtReal) -> Json {
        match x {
            ExtReal::Finite(v) => json!({ "value": self.float(v) }),
            ExtReal::PosInf => json!({ "inf": true }),
        }
    }

    pub fn series(&self, v: &SeriesVerdict) -> Json {
        match v.status {
            SeriesStatus::ConvergedTo(x) => json!({ "value": self.float(x) }),
            SeriesStatus::DivergesToInfinity => json!({ "inf": true }),
            SeriesStatus::PartialSum { value, k, .. } => json!({ "partial": self.float(value), "K": k }),
        }
    }
}

pub fn world_to_json(w: &World) -> Json {
    match w {
        World::Nat(n) => json!(n),
        World::Star(s) => json!(s),
    }
}

pub fn lambda_to_json(rep: &LambdaRepresentation, fmt: &NumberFormat) -> Json {
    let weights: Vec<Json> = rep
        .weights
        .iter()
        .map(|w| {
            json!({
                "atom": w.atom,
                "world": w.representative.as_ref().map_or(Json::Null, world_to_json),
                "weight": fmt.value(&w.weight),
            })
        })
        .collect();
    json!({ "weights": weights, "tail_mass": fmt.value(&rep.tail_mass), "residual": fmt.value(&rep.residual) })
}

pub fn coherence_to_json(v: &CoherenceVerdict, fmt: &NumberFormat) -> Json {
    let certificate = match &v.certificate {
        None => Json::Null,
        Some(Certificate::Separating { coefficients, offset, margin }) => json!({
            "kind": "separating",
            "coefficients": coefficients.iter().map(|(i, h)| json!([i, fmt.value(h)])).collect::<Vec<_>>(),
            "offset": fmt.value(offset),
            "margin": fmt.value(margin),
        }),
        Some(Certificate::PartialMeasure(p)) => json!({
            "kind": "partial_measure",
            "phis": p.phis,
            "psis": p.psis,
            "lhs_sum": fmt.rational(&p.lhs_sum),
            "rhs_sum": fmt.rational(&p.rhs_sum),
        }),
    };
    json!({
        "status": v.status,
        "coherent": v.is_coherent(),
        "witness": v.witness.as_ref().map_or(Json::Null, |w| lambda_to_json(w, fmt)),
        "certificate": certificate,
        "note": v.note,
    })
}

fn score_to_json(s: &Score, fmt: &NumberFormat) -> Json {
    match s {
        Score::Finite(v) => json!({ "value": fmt.value(v) }),
        Score::Infinite => json!({ "inf": true }),
        Score::Unresolved { partial, k } => json!({ "partial": fmt.float(*partial), "K": k }),
    }
}

pub fn dominance_to_json(v: &DominanceVerdict, fmt: &NumberFormat) -> Json {
    let per_atom: Vec<Json> = v
        .per_atom
        .iter()
        .map(|a| {
            json!({
                "atom": a.atom,
                "world": a.representative.as_ref().map_or(Json::Null, world_to_json),
                "score_c": score_to_json(&a.score_c, fmt),
                "score_d": score_to_json(&a.score_d, fmt),
                "comparison": a.order,
            })
        })
        .collect();
    json!({
        "verdict": v.relation,
        "per_atom": per_atom,
        "min_margin": v.min_margin.map_or(Json::Null, |m| fmt.float(m)),
        "truncation": v.truncation,
    })
}

pub fn pythagorean_to_json(r: &PythagoreanRecord, fmt: &NumberFormat) -> Json {
    let per_atom: Vec<Json> = r
        .per_atom
        .iter()
        .map(|a| json!({ "atom": a.atom, "lhs": fmt.float(a.lhs), "rhs": fmt.float(a.rhs), "slack": fmt.value(&a.slack) }))
        .collect();
    json!({
        "per_atom": per_atom,
        "worst_slack": fmt.float(r.worst_slack),
        "exact": r.exact,
        "holds": r.holds,
        "gap_consistent": r.gap_consistent,
        "gap_below_vertices": r.gap_below_vertices,
    })
}

pub fn projection_to_json(pr: &ProjectionResult, fmt: &NumberFormat) -> Json {
    json!({
        "pi_c": credence_to_json(&pr.pi, fmt)["values"].clone(),
        "lambda": lambda_to_json(&pr.lambda, fmt),
        "gap": fmt.value(&pr.gap),
        "converged": pr.converged,
        "iterations": pr.iterations,
        "final_decrease": fmt.float(pr.final_decrease),
        "fw_gap": fmt.float(pr.fw_gap),
        "method": pr.method,
        "truncation": pr.truncation,
        "pythagorean": pythagorean_to_json(&pr.pythagorean, fmt),
        "pythagorean_worst_slack": fmt.float(pr.pythagorean.worst_slack),
    })
}

pub fn stability_to_json(facts: &[StabilityFact], fmt: &NumberFormat) -> Json {
    let facts: Vec<Json> = facts
        .iter()
        .map(|f| {
            let witnesses: Vec<Json> = f
                .witnesses
                .iter()
                .map(|w| {
                    json!({
                        "c": credence_to_json(&w.c, fmt)["values"].clone(),
                        "d": credence_to_json(&w.d, fmt)["values"].clone(),
                        "base_relation": w.base_relation,
                        "lifted_relation": w.lifted_relation,
                        "lifted_expected_inaccuracy": fmt.float(w.lifted_expected_inaccuracy),
                        "argument": w.argument,
                    })
                })
                .collect();
            json!({
                "space_kind": f.family,
                "property": f.property,
                "status": f.status,
                "source": f.source,
                "witnesses": witnesses,
                "candidates_searched": f.candidates_searched,
            })
        })
        .collect();
    Json::Array(facts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    #[test]
    fn g17_matches_printf() {
        let cases = [
            (0.1, "0.10000000000000001"),
            (0.5, "0.5"),
            (0.08, "0.080000000000000002"),
            (1.0, "1"),
            (3.0, "3"),
            (-2.5, "-2.5"),
            (1e-7, "9.9999999999999995e-8"),
            (1e20, "1e20"),
            (123456.75, "123456.75"),
            (0.0, "0"),
        ];
        for (x, want) in cases {
            assert_eq!(format_g17(x), want, "{x}");
            assert_eq!(format_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn space_documents_round_trip() {
        let text = r#"{"kind": "explicit", "worlds": [1, 2], "propositions": [[1], [2]]}"#;
        let s = parse_space(text).unwrap();
        assert_eq!(parse_space(&space_to_json(&s).to_string()).unwrap(), s);
        let p = parse_space(r#"{"kind": "partition", "propositions": {"family_params": {"cells": 4}}, "truncation": 9}"#)
            .unwrap();
        assert_eq!(p.family(), Some(Family::CountablePartition { cells: Some(4) }));
        assert_eq!(parse_space(&space_to_json(&p).to_string()).unwrap(), p);
        let t = parse_space(r#"{"kind": "tails", "truncation": 16}"#).unwrap();
        assert_eq!(t.truncation_default(), 16);
        let c = t.compactify().unwrap().space;
        assert_eq!(parse_space(&space_to_json(&c).to_string()).unwrap(), c);
    }

    #[test]
    fn malformed_documents_report_locations() {
        let e = parse_space("{\"kind\": \"explicit\",\n \"worlds\": [1.5]}").unwrap_err();
        assert!(matches!(&e, DocError::Parse { location, .. } if location.starts_with("line 2")), "{e}");
        let e = parse_space(r#"{"kind": "explicit", "worlds": [1]}"#).unwrap_err();
        assert!(matches!(&e, DocError::Parse { location, .. } if location == "/propositions"));
        let e = parse_space(r#"{"kind": "cube"}"#).unwrap_err();
        assert!(matches!(e, DocError::Parse { .. }));
    }

    #[test]
    fn credence_decimals_are_read_exactly() {
        let d = parse_credence(r#"{"values": [0.7, "1/3", 1]}"#).unwrap();
        assert_eq!(d.credence.exact_values(3).unwrap(), vec![rational(7, 10), rational(1, 3), rational(1, 1)]);
        let bad = parse_credence(r#"{"values": [1.2]}"#).unwrap_err();
        assert!(matches!(bad, DocError::Invalid(CredalError::InvalidCredence(_))));
        let r = parse_credence(r#"{"space": "tails.json", "values": {"rule": "inv_sqrt", "params": {}, "declared_limit": 0}}"#)
            .unwrap();
        assert!(matches!(r.space, Some(SpaceRef::Path(ref p)) if p == "tails.json"));
        assert_eq!(r.credence.limit(), Some(0.0));
        let f = NumberFormat::new(NumericMode::Rational);
        assert_eq!(credence_to_json(&d.credence, &f), json!({ "values": ["7/10", "1/3", "1/1"] }));
    }

    #[test]
    fn measure_documents() {
        let m = parse_measure(r#"{"name": "brier"}"#).unwrap();
        assert_eq!(m.weights.sup_bound(), 1.0);
        let w = parse_measure(
            r#"{"name": "w", "generator": {"kind": "quadratic"}, "weights": {"rule": "geometric", "params": {"scale": 1, "ratio": 0.5}}}"#,
        )
        .unwrap();
        assert_eq!(w.weights.weight(1), 0.5);
        let f = NumberFormat::new(NumericMode::Float);
        let t = parse_measure(r#"{"generator": {"kind": "tabulated"}}"#).unwrap();
        let again = parse_measure(&measure_to_json(&t, &f).to_string()).unwrap();
        assert_eq!(again.generator.curvature_bounds(), t.generator.curvature_bounds());
        assert!(parse_measure(r#"{"weights": {"rule": "const", "params": {"value": 0}}, "generator": {"kind": "quadratic"}}"#)
            .is_err());
    }

    #[test]
    fn score_shapes() {
        let f = NumberFormat::new(NumericMode::Float);
        assert_eq!(f.ext(ExtReal::PosInf), json!({ "inf": true }));
        assert_eq!(f.ext(ExtReal::Finite(0.5)).to_string(), r#"{"value":0.5}"#);
    }
}
