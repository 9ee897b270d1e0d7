//! JSON rendering of classes, functions and check records.
//!
//! Cone-indexed maps are emitted in graded order: by cone dimension (so
//! cycle dimension descending), then lexicographically by ray indices.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Map, Value};
use toric_csm::chow::CycleClass;
use toric_csm::constructible::ConstructibleFunction;
use toric_csm::fan::Cone;
use toric_csm::suites::{CheckRecord, Evidence};

/// Integers that fit in an `i64` become JSON numbers, larger ones strings.
pub fn number(n: &BigInt) -> Value {
    n.to_i64().map(Value::from).unwrap_or_else(|| Value::String(n.to_string()))
}

fn cone_map<'a>(terms: impl Iterator<Item = (&'a Cone, &'a BigInt)>) -> Value {
    let mut terms: Vec<_> = terms.collect();
    terms.sort_by(|a, b| a.0.cmp(b.0));
    let map: Map<String, Value> = terms.into_iter().map(|(c, v)| (c.key(), number(v))).collect();
    Value::Object(map)
}

pub fn class_json(class: &CycleClass) -> Value {
    json!({ "fan": class.fan().name(), "class": cone_map(class.terms()) })
}

pub fn function_json(phi: &ConstructibleFunction) -> Value {
    json!({ "fan": phi.fan().name(), "values": cone_map(phi.support()) })
}

pub fn evidence_json(e: &Evidence) -> Value {
    match e {
        Evidence::Class(c) => class_json(c),
        Evidence::Function(f) => function_json(f),
        Evidence::Scalar(n) => json!({ "scalar": number(n) }),
        Evidence::None => json!({}),
    }
}

fn optional(n: &Option<BigInt>) -> Value {
    n.as_ref().map(number).unwrap_or(Value::Null)
}

pub fn record_json(r: &CheckRecord) -> Value {
    json!({
        "check": r.check,
        "instance": r.instance,
        "pass": r.pass,
        "lhs": evidence_json(&r.lhs),
        "rhs": evidence_json(&r.rhs),
        "degree_lhs": optional(&r.degree_lhs),
        "degree_rhs": optional(&r.degree_rhs),
    })
}

#[derive(Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Summary of one invocation, written with `--report`.
#[derive(Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub results: Vec<Value>,
    pub exit_status: i32,
}

impl RunReport {
    pub fn new(command: Vec<String>, digests: &BTreeMap<String, String>, results: Vec<Value>, exit_status: i32) -> Self {
        let inputs =
            digests.iter().map(|(path, sha256)| InputDigest { path: path.clone(), sha256: sha256.clone() }).collect();
        RunReport { command, inputs, results, exit_status }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;
    use toric_csm::csm::csm_class;
    use toric_csm::fan::Fan;

    #[test]
    fn classes_render_in_graded_order() {
        let fan = Arc::new(Fan::projective_space(2));
        let one = ConstructibleFunction::constant(fan, BigInt::from(1));
        let rendered = class_json(&csm_class(&one).unwrap()).to_string();
        assert_eq!(
            rendered,
            r#"{"fan":"P2","class":{"":1,"0":1,"1":1,"2":1,"0,1":1,"0,2":1,"1,2":1}}"#
        );
    }

    #[test]
    fn large_integers_become_strings() {
        let big = BigInt::from(i64::MAX) * 4;
        assert_eq!(number(&big), Value::String(big.to_string()));
        assert_eq!(number(&BigInt::from(-7)), Value::from(-7));
    }
}
