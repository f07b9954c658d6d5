//! JSON instance files.
//!
//! ```json
//! { "field": "real", "domain": {"dim": 2, "p": 2}, "outer_p": "inf",
//!   "T": [{"codomain": {"dim": 2, "p": "inf"}, "matrix": [[1, 0], [0, 1]]}],
//!   "S": [{"codomain": {"dim": 2, "p": "inf"}, "matrix": [[0, 1], [1, 0]]}] }
//! ```
//!
//! Complex entries are `[re, im]` pairs. Errors name the JSON path of the
//! offending value, e.g. `$.T[1].matrix[0][2]`.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::linops::{Matrix, Operator, OperatorTuple};
use crate::spaces::{Exponent, Field, LpSpace, C64};
use crate::theorems::{Instance, InstanceMeta};

fn err(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{path}: {msg}"))
}

fn field_of<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| err(&format!("{path}.{key}"), "missing"))
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| err(path, "expected an object"))
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    v.as_u64().map(|n| n as usize).ok_or_else(|| err(path, "expected a nonnegative integer"))
}

fn parse_exponent(v: &Value, path: &str) -> Result<Exponent> {
    match v {
        Value::String(s) if s == "inf" => Ok(Exponent::Infinity),
        Value::Number(n) => {
            let p = n.as_f64().ok_or_else(|| err(path, "not a finite number"))?;
            Exponent::new(p).map_err(|_| err(path, format!("exponent {p} is not in [1, ∞]")))
        }
        _ => Err(err(path, "expected a number or \"inf\"")),
    }
}

fn parse_space(v: &Value, field: Field, path: &str) -> Result<LpSpace> {
    let obj = as_object(v, path)?;
    let dim = as_usize(field_of(obj, "dim", path)?, &format!("{path}.dim"))?;
    let p = parse_exponent(field_of(obj, "p", path)?, &format!("{path}.p"))?;
    LpSpace::new(dim, p, field).map_err(|e| err(path, e))
}

fn parse_scalar(v: &Value, field: Field, path: &str) -> Result<C64> {
    match (v, field) {
        (Value::Number(n), _) => {
            n.as_f64().map(|x| C64::new(x, 0.0)).ok_or_else(|| err(path, "not a finite number"))
        }
        (Value::Array(pair), Field::Complex) if pair.len() == 2 => {
            let re = pair[0].as_f64().ok_or_else(|| err(&format!("{path}[0]"), "expected a number"))?;
            let im = pair[1].as_f64().ok_or_else(|| err(&format!("{path}[1]"), "expected a number"))?;
            Ok(C64::new(re, im))
        }
        (Value::Array(_), Field::Real) => Err(err(path, "complex entry in a real instance")),
        _ => Err(err(path, "expected a number or an [re, im] pair")),
    }
}

fn parse_operator(v: &Value, domain: LpSpace, path: &str) -> Result<Operator> {
    let obj = as_object(v, path)?;
    let codomain = parse_space(field_of(obj, "codomain", path)?, domain.field, &format!("{path}.codomain"))?;
    let mpath = format!("{path}.matrix");
    let rows = field_of(obj, "matrix", path)?.as_array().ok_or_else(|| err(&mpath, "expected an array of rows"))?;
    if rows.len() != codomain.dim {
        return Err(err(&mpath, format!("has {} rows but the codomain has dimension {}", rows.len(), codomain.dim)));
    }
    let mut data = Vec::with_capacity(codomain.dim * domain.dim);
    for (i, row) in rows.iter().enumerate() {
        let rpath = format!("{mpath}[{i}]");
        let row = row.as_array().ok_or_else(|| err(&rpath, "expected an array"))?;
        if row.len() != domain.dim {
            return Err(err(&rpath, format!("has {} entries but the domain has dimension {}", row.len(), domain.dim)));
        }
        for (j, x) in row.iter().enumerate() {
            data.push(parse_scalar(x, domain.field, &format!("{rpath}[{j}]"))?);
        }
    }
    let m = Matrix::new(codomain.dim, domain.dim, data).map_err(|e| err(&mpath, e))?;
    Operator::new(m, domain, codomain).map_err(|e| err(path, e))
}

fn parse_tuple(v: &Value, domain: LpSpace, outer: Exponent, path: &str) -> Result<OperatorTuple> {
    let items = v.as_array().ok_or_else(|| err(path, "expected an array of operators"))?;
    if items.is_empty() {
        return Err(err(path, "needs at least one operator"));
    }
    let ops = items
        .iter()
        .enumerate()
        .map(|(i, o)| parse_operator(o, domain, &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    OperatorTuple::new(ops, outer).map_err(|e| err(path, e))
}

/// Parse an instance document. A missing `S` means `𝒮 = 0`.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: Value = serde_json::from_str(text).map_err(|e| err("$", format!("invalid JSON: {e}")))?;
    let root = as_object(&doc, "$")?;
    let field = match root.get("field") {
        None => Field::Real,
        Some(Value::String(s)) if s == "real" => Field::Real,
        Some(Value::String(s)) if s == "complex" => Field::Complex,
        Some(_) => return Err(err("$.field", "expected \"real\" or \"complex\"")),
    };
    let domain = parse_space(field_of(root, "domain", "$")?, field, "$.domain")?;
    let outer = match root.get("outer_p") {
        None => Exponent::TWO,
        Some(v) => parse_exponent(v, "$.outer_p")?,
    };
    let t = parse_tuple(field_of(root, "T", "$")?, domain, outer, "$.T")?;
    let mut inst = match root.get("S") {
        None | Some(Value::Null) => Instance::without_direction(t),
        Some(v) => {
            let s = parse_tuple(v, domain, outer, "$.S")?;
            if s.d() != t.d() {
                return Err(err("$.S", format!("has {} operators but T has {}", s.d(), t.d())));
            }
            for (i, (a, b)) in t.components().iter().zip(s.components()).enumerate() {
                if a.codomain() != b.codomain() {
                    return Err(err(&format!("$.S[{i}].codomain"), "differs from the codomain of T"));
                }
            }
            Instance::new(t, s).map_err(|e| err("$.S", e))?
        }
    };
    let mut meta = InstanceMeta { generator: "file".into(), ..Default::default() };
    if let Some(v) = root.get("seed") {
        meta.seed = Some(v.as_u64().ok_or_else(|| err("$.seed", "expected a nonnegative integer"))?);
    }
    if let Some(Value::Object(m)) = root.get("meta") {
        if let Some(Value::String(g)) = m.get("generator") {
            meta.generator = g.clone();
        }
    }
    inst.meta = meta;
    Ok(inst)
}

pub(crate) fn exponent_json(p: Exponent) -> Value {
    match p {
        Exponent::Infinity => json!("inf"),
        p => json!(p.value()),
    }
}

pub(crate) fn scalar_json(z: C64, field: Field) -> Value {
    match field {
        Field::Real => json!(z.re),
        Field::Complex => json!([z.re, z.im]),
    }
}

fn tuple_json(t: &OperatorTuple) -> Value {
    let field = t.field();
    Value::Array(
        t.components()
            .iter()
            .map(|op| {
                let m = op.matrix();
                let rows: Vec<Value> = (0..m.rows())
                    .map(|i| Value::Array(m.row(i).iter().map(|&z| scalar_json(z, field)).collect()))
                    .collect();
                json!({
                    "codomain": {"dim": op.codomain().dim, "p": exponent_json(op.codomain().p)},
                    "matrix": rows,
                })
            })
            .collect(),
    )
}

/// The instance document for `inst`.
pub fn instance_to_json(inst: &Instance) -> Value {
    let domain = inst.t.domain();
    let mut doc = json!({
        "field": match domain.field { Field::Real => "real", Field::Complex => "complex" },
        "domain": {"dim": domain.dim, "p": exponent_json(domain.p)},
        "outer_p": exponent_json(inst.t.outer()),
        "T": tuple_json(&inst.t),
        "S": tuple_json(&inst.s),
        "meta": {"generator": inst.meta.generator},
    });
    if let Some(seed) = inst.meta.seed {
        doc["seed"] = json!(seed);
    }
    doc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theorems::golden_counterexample;

    #[test]
    fn round_trip() {
        let g = golden_counterexample();
        let text = serde_json::to_string(&instance_to_json(&g)).unwrap();
        let back = parse_instance(&text).unwrap();
        assert_eq!(back.t, g.t);
        assert_eq!(back.s, g.s);
        assert_eq!(back.meta.generator, "golden");
    }

    #[test]
    fn errors_name_the_path() {
        let bad = r#"{"domain": {"dim": 2, "p": 2}, "T": [
            {"codomain": {"dim": 1, "p": "inf"}, "matrix": [[1, 2]]},
            {"codomain": {"dim": 1, "p": "inf"}, "matrix": [[1, "x"]]}]}"#;
        let e = parse_instance(bad).unwrap_err().to_string();
        assert!(e.contains("$.T[1].matrix[0][1]"), "{e}");
        let bad = r#"{"domain": {"dim": 2, "p": 0.5}, "T": []}"#;
        assert!(parse_instance(bad).unwrap_err().to_string().contains("$.domain.p"));
        let bad = r#"{"domain": {"dim": 2, "p": 2}, "T": [{"codomain": {"dim": 2, "p": 2}, "matrix": [[1, 0]]}]}"#;
        assert!(parse_instance(bad).unwrap_err().to_string().contains("$.T[0].matrix"));
        assert!(parse_instance("{").unwrap_err().to_string().contains("invalid JSON"));
        let complex_in_real = r#"{"domain": {"dim": 1, "p": 2}, "T": [{"codomain": {"dim": 1, "p": 2}, "matrix": [[[1, 2]]]}]}"#;
        assert!(parse_instance(complex_in_real).unwrap_err().to_string().contains("$.T[0].matrix[0][0]"));
    }

    #[test]
    fn complex_entries() {
        let doc = r#"{"field": "complex", "domain": {"dim": 1, "p": "inf"}, "outer_p": 1,
            "T": [{"codomain": {"dim": 1, "p": 1}, "matrix": [[[0, 2]]]}]}"#;
        let inst = parse_instance(doc).unwrap();
        assert_eq!(inst.t.component(0).matrix().get(0, 0), C64::new(0.0, 2.0));
        assert!(inst.s.is_zero());
        assert!(inst.t.outer().is_one());
    }
}
