//! JSON and text renderings of computation results.
//!
//! Every renderer builds a `serde_json::Value`; the text form flattens it into
//! aligned `key  value` lines. Object keys are sorted, so both forms are
//! deterministic for a fixed seed.

use serde_json::{json, Value};

use crate::approx::{BJDecision, CertificateCheck, DistanceResult, SingerCertificate};
use crate::derivatives::{GateauxPair, SmoothnessReport, SufficiencyReport};
use crate::io::scalar_json;
use crate::linops::DiagonalAction;
use crate::normcalc::{JointAttainment, NormResult};
use crate::spaces::{Field, Vector};
use crate::theorems::{CheckReport, SuiteReport};

pub fn vector_json(v: &Vector) -> Value {
    let field = v.space().field;
    Value::Array(v.entries().iter().map(|&z| scalar_json(z, field)).collect())
}

fn diag_json(z: &DiagonalAction, field: Field) -> Value {
    Value::Array(z.z.iter().map(|&c| scalar_json(c, field)).collect())
}

pub fn norm_json(r: &NormResult) -> Value {
    json!({
        "value": r.value,
        "method": r.method.to_string(),
        "residual": r.residual,
        "starts_used": r.starts_used,
        "complete": r.complete,
        "witnesses": r.witnesses.iter().map(vector_json).collect::<Vec<_>>(),
    })
}

pub fn distance_json(r: &DistanceResult, field: Field) -> Value {
    json!({
        "value": r.value,
        "minimizer_z": diag_json(&r.minimizer_z, field),
        "residual_norm": norm_json(&r.inner_norm),
        "lower_bound": r.lower_bound,
        "convexity_gap": r.convexity_gap,
        "evaluations": r.evaluations,
    })
}

pub fn certificate_json(c: &SingerCertificate, check: &CertificateCheck, field: Field) -> Value {
    json!({
        "h": c.h,
        "value": c.value,
        "z": diag_json(&c.z, field),
        "annihilation_residual": c.annihilation_residual,
        "weight_sum_error": c.weight_sum_error,
        "entries": c.entries.iter().map(|e| json!({
            "t": e.t,
            "x": vector_json(&e.x),
            "f": e.f.iter().map(|&z| scalar_json(z, field)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "verification": {
            "valid": check.valid,
            "failures": check.failures,
            "annihilation_residual": check.annihilation_residual,
            "weight_sum_error": check.weight_sum_error,
            "norming_margin": check.norming_margin,
        },
    })
}

/// `check` is the independent re-verification of `d.certificate`.
pub fn bj_json(d: &BJDecision, check: Option<&CertificateCheck>, field: Field) -> Value {
    let certificate = match (&d.certificate, check) {
        (Some(c), Some(k)) => certificate_json(c, k, field),
        _ => Value::Null,
    };
    json!({
        "orthogonal": d.orthogonal,
        "margin": d.margin,
        "norm": d.norm,
        "distance": distance_json(&d.distance, field),
        "certificate": certificate,
        "certificate_error": d.certificate_error,
    })
}

pub fn gateaux_json(g: &GateauxPair) -> Value {
    serde_json::to_value(g).unwrap_or(Value::Null)
}

pub fn smoothness_json(r: &SmoothnessReport) -> Value {
    json!({
        "smooth": r.smooth,
        "attainment_orbits": r.attainment_orbits,
        "witness": r.witness.as_ref().map(vector_json),
        "codomain_point_smooth": r.codomain_point_smooth,
        "search_complete": r.search_complete,
        "caveat": r.caveat,
    })
}

pub fn joint_json(j: &JointAttainment) -> Value {
    json!({
        "nonempty": j.nonempty,
        "margin": j.margin,
        "epsilon": j.epsilon,
        "witness": j.witness.as_ref().map(vector_json),
        "component_norms": j.component_norms,
    })
}

pub fn sufficiency_json(r: &SufficiencyReport) -> Value {
    json!({
        "joint_attainment": joint_json(&r.joint),
        "components": r.components.iter().map(smoothness_json).collect::<Vec<_>>(),
        "tuple": smoothness_json(&r.tuple),
        "all_components_smooth": r.all_components_smooth,
        "implication_holds": r.implication_holds,
        "converse_fails": r.converse_fails,
    })
}

pub fn check_json(r: &CheckReport) -> Value {
    json!({
        "theorem": r.theorem.as_str(),
        "instance": r.instance,
        "status": r.status.to_string(),
        "codomains": if r.equal_codomains { "equal" } else { "heterogeneous" },
        "hypotheses": r.hypotheses,
        "conclusions": r.conclusions,
        "witnesses": r.witnesses.iter().map(vector_json).collect::<Vec<_>>(),
        "notes": r.notes,
    })
}

pub fn suite_json(r: &SuiteReport) -> Value {
    json!({
        "seed": r.seed,
        "summary": r.summary,
        "reports": r.reports.iter().map(check_json).collect::<Vec<_>>(),
    })
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Array(items) if items.iter().all(|x| !x.is_object()) => {
            let parts: Vec<String> = items.iter().map(scalar_text).collect();
            format!("[{}]", parts.join(", "))
        }
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(items) if items.iter().any(Value::is_object) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        other => out.push((prefix.to_string(), scalar_text(other))),
    }
}

/// Aligned `key  value` lines for any rendered value.
pub fn to_text(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    let mut s = String::new();
    for (k, x) in rows {
        let pad = width - k.chars().count();
        s.push_str(&format!("{k}{}  {x}\n", " ".repeat(pad)));
    }
    s
}

fn check_line(r: &CheckReport) -> String {
    let failed: Vec<&str> = r
        .conclusions
        .iter()
        .filter(|c| !c.holds && !c.informational)
        .map(|c| c.name.as_str())
        .collect();
    let unmet: Vec<&str> = r.hypotheses.iter().filter(|h| !h.satisfied).map(|h| h.name.as_str()).collect();
    let mut line = format!("{:<20} {:<28} {:<9}", r.theorem.as_str(), r.instance, r.status.to_string());
    if !unmet.is_empty() {
        line.push_str(&format!(" unmet={}", unmet.join(",")));
    }
    if !failed.is_empty() {
        line.push_str(&format!(" failed={}", failed.join(",")));
    }
    line
}

/// One line per report followed by the totals.
pub fn suite_text(r: &SuiteReport) -> String {
    let mut s = String::new();
    for rep in &r.reports {
        s.push_str(&check_line(rep));
        s.push('\n');
    }
    let m = &r.summary;
    s.push_str(&format!(
        "seed {}: {} holds, {} vacuous ({} with true conclusions), {} violated; codomains equal {} / heterogeneous {}\n",
        r.seed, m.holds, m.vacuous, m.vacuous_but_true, m.violated, m.equal_codomain_reports, m.heterogeneous_codomain_reports
    ));
    s
}
