//! JSON documents read and written by the command line.
//!
//! Reports are assembled as [`serde_json::Value`] trees, whose objects keep
//! keys sorted, and every float is rounded to 12 significant digits before
//! serialisation. Identical inputs therefore give byte-identical output.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::axioms::{ValidationReport, Violation, Witness};
use crate::engine::{
    CaseEvaluation, CertificateWitness, ContractivityCertificate, EngineError, FixedPointResult,
    OrbitTrace, SelfMap,
};
use crate::space::{
    MetricSpace, PartialMetricSpace, PartialNMetricSpace, Point, SpaceError,
};
use crate::topology::{BasisVerdict, Inclusion, SeparationClass, TopologyComparison};

#[derive(Debug, Error)]
pub enum DocError {
    #[error("{message} at line {line}, column {column} (field `{path}`)")]
    Syntax {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub points: Vec<String>,
    pub n: usize,
    pub entries: Vec<EntryDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDoc {
    pub multiset: Vec<String>,
    pub value: f64,
}

/// `{"points": [..], "entries": [{"pair": [x, y], "value": v}, ..]}`, one
/// entry per unordered pair including `(x, x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialMetricDoc {
    pub points: Vec<String>,
    pub entries: Vec<PairEntryDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairEntryDoc {
    pub pair: [String; 2],
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub map: BTreeMap<String, String>,
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T, DocError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let parsed: Result<T, _> = serde_path_to_error::deserialize(&mut de);
    let value = parsed.map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        DocError::Syntax {
            path,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    de.end().map_err(|e| DocError::Syntax {
        path: ".".into(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ok(value)
}

pub fn parse_space_doc(text: &str) -> Result<SpaceDoc, DocError> {
    parse(text)
}

pub fn load_space(text: &str) -> Result<PartialNMetricSpace, DocError> {
    let doc = parse_space_doc(text)?;
    Ok(PartialNMetricSpace::build(
        doc.points,
        doc.n,
        doc.entries.into_iter().map(|e| (e.multiset, e.value)),
    )?)
}

pub fn load_partial_metric(text: &str) -> Result<PartialMetricSpace, DocError> {
    let doc: PartialMetricDoc = parse(text)?;
    Ok(PartialMetricSpace::build(
        doc.points,
        doc.entries.into_iter().map(|e| (e.pair, e.value)),
    )?)
}

pub fn load_map(space: &PartialNMetricSpace, text: &str) -> Result<SelfMap, DocError> {
    let doc: MapDoc = parse(text)?;
    Ok(SelfMap::from_names(space, &doc.map)?)
}

/// Accepts a JSON array of names or whitespace-separated names.
pub fn parse_sequence(text: &str) -> Result<Vec<String>, DocError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        parse(text)
    } else {
        Ok(text.split_whitespace().map(str::to_owned).collect())
    }
}

/// Canonical document: stored point order, entries in multiset rank order.
pub fn space_doc(space: &PartialNMetricSpace) -> SpaceDoc {
    SpaceDoc {
        points: space.names().to_vec(),
        n: space.n(),
        entries: space
            .entries()
            .map(|(m, value)| EntryDoc {
                multiset: names(space, &m),
                value,
            })
            .collect(),
    }
}

pub fn space_json(space: &PartialNMetricSpace) -> Value {
    let doc = space_doc(space);
    json!({
        "points": doc.points,
        "n": doc.n,
        "entries": doc.entries.iter().map(|e| json!({
            "multiset": e.multiset,
            "value": num(e.value),
        })).collect::<Vec<_>>(),
    })
}

/// Rounds to 12 significant digits; non-finite values become `null`.
pub fn num(v: f64) -> Value {
    if !v.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    // avoid a stray "-0.0"
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

fn opt_num(v: Option<f64>) -> Value {
    v.map_or(Value::Null, num)
}

/// Pretty JSON with a trailing newline.
pub fn render(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values always serialise");
    s.push('\n');
    s
}

pub fn name(space: &PartialNMetricSpace, p: Point) -> String {
    space.name(p).to_owned()
}

pub fn names(space: &PartialNMetricSpace, ps: &[Point]) -> Vec<String> {
    ps.iter().map(|&p| name(space, p)).collect()
}

fn witness_json(space: &PartialNMetricSpace, w: &Witness) -> Value {
    match w {
        Witness::Pair { x, y } => json!({"kind": "pair", "x": name(space, *x), "y": name(space, *y)}),
        Witness::Single { x, bound } => {
            json!({"kind": "single", "x": name(space, *x), "bound": num(*bound)})
        }
        Witness::Triangle {
            multiset,
            distinguished,
            via,
        } => json!({
            "kind": "triangle",
            "multiset": names(space, multiset),
            "distinguished": name(space, *distinguished),
            "via": name(space, *via),
        }),
        Witness::Permutation { tuple, permuted } => json!({
            "kind": "permutation",
            "tuple": names(space, tuple),
            "permuted": names(space, permuted),
        }),
    }
}

pub fn violation_json(space: &PartialNMetricSpace, v: &Violation) -> Value {
    json!({
        "axiom": v.axiom.tag(),
        "witness": witness_json(space, &v.witness),
        "lhs": num(v.lhs),
        "rhs": num(v.rhs),
    })
}

pub fn validation_json(space: &PartialNMetricSpace, report: &ValidationReport) -> Value {
    let counts: Map<String, Value> = report
        .counts
        .iter()
        .map(|(a, c)| (a.tag().to_owned(), json!(c)))
        .collect();
    json!({
        "profile": report.profile.tag(),
        "passed": report.passed(),
        "tolerance": num(report.tolerance),
        "checked": counts,
        "violations_total": report.violations_total,
        "violations": report.violations.iter().map(|v| violation_json(space, v)).collect::<Vec<_>>(),
    })
}

pub fn metric_json(space: &PartialNMetricSpace, metric: &MetricSpace) -> Value {
    let mut distances = Map::new();
    for x in space.points() {
        let row: Map<String, Value> = space
            .points()
            .map(|y| (name(space, y), num(metric.distance(x, y))))
            .collect();
        distances.insert(name(space, x), Value::Object(row));
    }
    let violations: Vec<Value> = metric
        .check_axioms(crate::space::DEFAULT_TOL)
        .iter()
        .map(|v| {
            json!({
                "axiom": v.axiom,
                "points": names(space, &v.points),
                "lhs": num(v.lhs),
                "rhs": num(v.rhs),
            })
        })
        .collect();
    json!({
        "points": space.names(),
        "distance": distances,
        "metric_axioms_hold": violations.is_empty(),
        "metric_violations": violations,
    })
}

pub fn separation_json(space: &PartialNMetricSpace, sep: &SeparationClass) -> Value {
    json!({
        "is_t0": sep.is_t0,
        "is_t1": sep.is_t1,
        "witnesses": sep.witnesses.iter().map(|w| json!({
            "x": name(space, w.x),
            "y": name(space, w.y),
            "eps_x": num(w.eps_x),
            "eps_y": num(w.eps_y),
        })).collect::<Vec<_>>(),
    })
}

pub fn basis_json(space: &PartialNMetricSpace, basis: &BasisVerdict) -> Value {
    json!({
        "trials": basis.trials,
        "passed": basis.passed(),
        "counterexample": basis.counterexample.as_ref().map(|c| json!({
            "center": name(space, c.center),
            "radius": num(c.radius),
            "member": name(space, c.member),
            "inner_radius": num(c.inner_radius),
            "escaped": name(space, c.escaped),
        })),
    })
}

pub fn comparison_json(space: &PartialNMetricSpace, cmp: &TopologyComparison) -> Value {
    json!({
        "passed": cmp.passed(),
        "radii": cmp.radii.iter().map(|r| num(*r)).collect::<Vec<_>>(),
        "checked": cmp.checked,
        "counterexample": cmp.counterexample.as_ref().map(|c| json!({
            "center": name(space, c.center),
            "radius": num(c.radius),
            "inclusion": match c.inclusion {
                Inclusion::ShrunkenIntoMetric => "shrunken_ball_in_metric_ball",
                Inclusion::MetricIntoBall => "metric_ball_in_ball",
            },
            "offending": name(space, c.offending),
        })),
    })
}

pub fn orbit_json(space: &PartialNMetricSpace, t: &OrbitTrace) -> Value {
    json!({
        "start": name(space, t.start),
        "terms": names(space, &t.terms),
        "cycle_entry": t.cycle_entry,
        "cycle_length": t.cycle_length,
        "step_values": t.step_values.iter().map(|v| num(*v)).collect::<Vec<_>>(),
    })
}

pub fn cases_json(cases: &[CaseEvaluation]) -> Value {
    Value::Array(
        cases
            .iter()
            .map(|c| {
                json!({
                    "case": c.case.tag(),
                    "holds": c.holds(),
                    "failing": c.failing.iter().map(|f| f.tag()).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

pub fn certificate_json(c: &ContractivityCertificate) -> Value {
    let witnesses: Vec<Value> = c
        .witnesses
        .iter()
        .map(|w| match w {
            CertificateWitness::LowerBound {
                step,
                self_distance,
            } => json!({"kind": "lower_bound", "step": step, "self_distance": num(*self_distance)}),
            CertificateWitness::Decay { step, value, bound } => {
                json!({"kind": "decay", "step": step, "value": num(*value), "bound": num(*bound)})
            }
            CertificateWitness::Pair { m1, m2, lhs, rhs } => {
                json!({"kind": "pair", "m1": m1, "m2": m2, "lhs": num(*lhs), "rhs": num(*rhs)})
            }
            CertificateWitness::Domain { m1, m2, t } => {
                json!({"kind": "domain", "m1": m1, "m2": m2, "t": num(*t)})
            }
        })
        .collect();
    json!({
        "kind": c.kind.tag(),
        "r": num(c.r),
        "c_estimate": opt_num(c.c_estimate),
        "lambda": opt_num(c.lambda),
        "prefix_length": c.prefix_length,
        "holds_on_prefix": c.holds_on_prefix,
        "witnesses": witnesses,
    })
}

pub fn fixed_point_json(space: &PartialNMetricSpace, r: &FixedPointResult) -> Value {
    json!({
        "status": "fixed_point",
        "fixed_point": name(space, r.fixed_point),
        "self_distance_at_fp": num(r.self_distance_at_fp),
        "iterations": r.iterations,
        "r": num(r.r),
        "theorem_case": r.theorem_case.tag(),
        "cases": cases_json(&r.cases),
        "certificate": r.certificate.as_ref().map(certificate_json),
        "orbit": orbit_json(space, &r.orbit),
    })
}

pub fn engine_error_json(space: &PartialNMetricSpace, e: &EngineError) -> Value {
    let (status, detail) = match e {
        EngineError::NotCauchy { spread } => ("not_cauchy", json!({"spread": num(*spread)})),
        EngineError::NoSpecialLimit { r } => ("no_special_limit", json!({"r": num(*r)})),
        EngineError::OrbitTruncated { steps } => ("orbit_truncated", json!({"steps": steps})),
        EngineError::HypothesesUnsatisfied(cases) => {
            ("hypotheses_unsatisfied", json!({"cases": cases_json(cases)}))
        }
        EngineError::TheoremContradicted { case, detail } => (
            "theorem_contradicted",
            json!({"case": case.tag(), "detail": detail}),
        ),
        EngineError::CertificateFailed(c) => {
            ("certificate_failed", json!({"certificate": certificate_json(c)}))
        }
        EngineError::UniquenessViolation(found) => {
            ("uniqueness_violation", json!({"points": names(space, found)}))
        }
        EngineError::InvalidSpace(p) => ("invalid_space", json!({"profile": p.tag()})),
        EngineError::InvalidLambda(l) => ("invalid_lambda", json!({"lambda": num(*l)})),
        EngineError::Space(_) | EngineError::MapSize { .. } => ("input_error", Value::Null),
    };
    json!({
        "status": status,
        "message": e.to_string(),
        "detail": detail,
    })
}
