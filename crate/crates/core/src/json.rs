//! JSON encodings of instances, reports and fuzz results.
//!
//! Integers are written as plain JSON numbers of any length. The schemas for
//! every document live in `crates/core/schema/`.

use std::str::FromStr;

use num_bigint::BigInt;
use serde_json::{json, Map, Number, Value};

use crate::congruence::{ArgConvention, CongruenceInstance, SolvabilityReport};
use crate::error::{Error, Result};
use crate::fuzz::{FuzzReport, FuzzSummary, Outcome};

pub(crate) fn number(v: impl ToString) -> Value {
    Value::Number(Number::from_str(&v.to_string()).expect("decimal integer"))
}

pub fn instance_to_json(inst: &CongruenceInstance) -> Value {
    let mut m = Map::new();
    m.insert(
        "a".into(),
        Value::Array(inst.coefficients().iter().map(number).collect()),
    );
    m.insert("b".into(), number(inst.b()));
    m.insert("n".into(), number(inst.n()));
    m.insert("s".into(), number(inst.s()));
    m.insert(
        "t".into(),
        Value::Array(inst.restrictions().iter().map(number).collect()),
    );
    Value::Object(m)
}

/// The `count` command's report object. `oracle_count` is included when the
/// oracle was consulted.
pub fn report_to_json(
    inst: &CongruenceInstance,
    report: &SolvabilityReport,
    convention: ArgConvention,
    oracle_count: Option<u128>,
) -> Value {
    let mut m = Map::new();
    m.insert("count".into(), number(&report.count));
    m.insert("solvable".into(), Value::Bool(report.solvable));
    m.insert(
        "reason".into(),
        Value::String(report.reason.as_str().into()),
    );
    m.insert(
        "derived_d".into(),
        Value::Array(report.derived_d.iter().map(number).collect()),
    );
    m.insert(
        "convention".into(),
        Value::String(convention.as_str().into()),
    );
    m.insert("verified".into(), Value::Bool(report.verified));
    if let Some(o) = oracle_count {
        m.insert("oracle_count".into(), number(o));
    }
    m.insert("instance".into(), instance_to_json(inst));
    Value::Object(m)
}

fn outcome_to_json(o: &Outcome) -> Value {
    match o {
        Outcome::Count(c) => number(c),
        Outcome::Error(e) => json!({ "error": e }),
    }
}

pub fn fuzz_report_to_json(r: &FuzzReport) -> Value {
    let counts = |m: &std::collections::BTreeMap<String, Outcome>| {
        Value::Object(
            m.iter()
                .map(|(k, v)| (k.clone(), outcome_to_json(v)))
                .collect(),
        )
    };
    let mut m = Map::new();
    m.insert("instance".into(), instance_to_json(&r.instance));
    m.insert("oracle_count".into(), number(r.oracle_count));
    m.insert("formula_counts".into(), counts(&r.formula_counts));
    m.insert("alternate_counts".into(), counts(&r.alternate_counts));
    m.insert("agree".into(), Value::Bool(r.agree));
    m.insert("elapsed_ns".into(), number(r.elapsed.as_nanos()));
    Value::Object(m)
}

pub fn fuzz_summary_to_json(s: &FuzzSummary) -> Value {
    let rows: Vec<Value> = s
        .rows
        .iter()
        .map(|r| {
            json!({
                "formula": r.formula,
                "s": r.s,
                "required": r.required,
                "checked": r.checked,
                "agreed": r.agreed,
                "rate": r.rate(),
            })
        })
        .collect();
    json!({
        "instances": s.instances,
        "disagreements": s.disagreements,
        "all_agree": s.all_agree(),
        "agreement": rows,
    })
}

fn integer(v: &Value, field: &str) -> Result<BigInt> {
    match v {
        Value::Number(n) => BigInt::from_str(&n.to_string())
            .map_err(|_| Error::field(field, format!("expected an integer, got {n}"))),
        other => Err(Error::field(
            field,
            format!("expected an integer, got {other}"),
        )),
    }
}

fn unsigned(v: &Value, field: &str) -> Result<u128> {
    let i = integer(v, field)?;
    u128::try_from(&i)
        .map_err(|_| Error::field(field, format!("expected a positive integer, got {i}")))
}

fn integer_list(v: &Value, field: &str) -> Result<Vec<BigInt>> {
    match v {
        Value::Array(items) => items
            .iter()
            .enumerate()
            .map(|(i, x)| integer(x, &format!("{field}[{i}]")))
            .collect(),
        // single values broadcast to k = 1
        other => Ok(vec![integer(other, field)?]),
    }
}

fn required<'a>(obj: &'a Map<String, Value>, key: &str, prefix: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::field(format!("{prefix}{key}"), "missing field"))
}

fn with_prefix(e: Error, prefix: &str) -> Error {
    match e {
        Error::InvalidField { field, message } => Error::InvalidField {
            field: format!("{prefix}{field}"),
            message,
        },
        other => other,
    }
}

/// Parses one instance object, reporting problems by field name.
pub fn instance_from_json(v: &Value) -> Result<CongruenceInstance> {
    instance_from_json_at(v, "")
}

fn instance_from_json_at(v: &Value, prefix: &str) -> Result<CongruenceInstance> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::field(prefix.trim_end_matches('.'), "expected an object"))?;
    for key in obj.keys() {
        if !["a", "b", "n", "s", "t"].contains(&key.as_str()) {
            return Err(Error::field(format!("{prefix}{key}"), "unknown field"));
        }
    }
    let p = |f: &str| format!("{prefix}{f}");
    let a = integer_list(required(obj, "a", prefix)?, &p("a"))?;
    let b = integer(required(obj, "b", prefix)?, &p("b"))?;
    let n = unsigned(required(obj, "n", prefix)?, &p("n"))?;
    let s = unsigned(required(obj, "s", prefix)?, &p("s"))?;
    let s = u32::try_from(s).map_err(|_| Error::field(p("s"), "too large"))?;
    let t = integer_list(required(obj, "t", prefix)?, &p("t"))?
        .iter()
        .enumerate()
        .map(|(i, x)| {
            u128::try_from(x).map_err(|_| {
                Error::field(
                    p(&format!("t[{i}]")),
                    format!("expected a positive integer, got {x}"),
                )
            })
        })
        .collect::<Result<Vec<_>>>()?;
    CongruenceInstance::new(a, b, n, s, t).map_err(|e| with_prefix(e, prefix))
}

/// Parses an instance file: a single instance object or an array of them.
pub fn parse_instance_file(text: &str) -> Result<Vec<CongruenceInstance>> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| Error::field("file", format!("invalid JSON: {e}")))?;
    match &v {
        Value::Array(items) => {
            if items.is_empty() {
                return Err(Error::field("file", "no instances"));
            }
            items
                .iter()
                .enumerate()
                .map(|(i, item)| instance_from_json_at(item, &format!("[{i}].")))
                .collect()
        }
        _ => Ok(vec![instance_from_json(&v)?]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::count_general;

    #[test]
    fn report_bytes() {
        let inst = CongruenceInstance::from_ints(&[1, 1], 3, 4, 1, &[1, 2]).unwrap();
        let report = count_general(&inst).unwrap();
        let text = report_to_json(&inst, &report, ArgConvention::Power, None).to_string();
        assert_eq!(
            text,
            r#"{"count":1,"solvable":true,"reason":"OK","derived_d":[1,1],"convention":"power","verified":true,"instance":{"a":[1,1],"b":3,"n":4,"s":1,"t":[1,2]}}"#
        );
    }

    #[test]
    fn huge_integers_stay_exact() {
        let big = "123456789012345678901234567890123456789";
        let inst = instance_from_json(
            &serde_json::from_str(&format!(r#"{{"a":[{big}],"b":{big},"n":6,"s":3,"t":[2]}}"#))
                .unwrap(),
        )
        .unwrap();
        assert_eq!(inst.coefficients()[0].to_string(), big);
        let back = instance_to_json(&inst).to_string();
        assert!(back.contains(big));
    }

    #[test]
    fn field_level_errors() {
        let err = parse_instance_file(r#"{"a":[1,2],"b":0,"n":6,"s":1,"t":[1,4]}"#).unwrap_err();
        assert_eq!(err.to_string(), "t[1]: 4 does not divide n = 6");
        let err = parse_instance_file(
            r#"[{"a":[1],"b":0,"n":6,"s":1,"t":[1]},{"a":[1],"b":"x","n":6,"s":1,"t":[1]}]"#,
        )
        .unwrap_err();
        assert_eq!(err.to_string(), r#"[1].b: expected an integer, got "x""#);
        let err = parse_instance_file(r#"{"a":[1],"n":6,"s":1,"t":[1]}"#).unwrap_err();
        assert_eq!(err.to_string(), "b: missing field");
        let err = parse_instance_file(r#"{"a":[1],"b":1,"n":6,"s":1,"t":[1],"x":2}"#).unwrap_err();
        assert_eq!(err.to_string(), "x: unknown field");
        assert!(parse_instance_file("[]").is_err());
        assert!(parse_instance_file("{").is_err());
    }

    #[test]
    fn single_values_broadcast() {
        let v = parse_instance_file(r#"{"a":2,"b":4,"n":6,"s":1,"t":1}"#).unwrap();
        assert_eq!(v[0].k(), 1);
    }
}
