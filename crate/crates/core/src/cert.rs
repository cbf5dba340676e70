//! The JSON certificate envelope shared by every check.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::lattice::Functional;

pub const CERT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Verified,
    Refuted,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Lattice reduction over the integers.
    ExactHnf,
    /// Howell-form span computation over `Z/p^t`.
    Modular,
    /// Closed-form integer arithmetic, no lattice involved.
    ExactInteger,
}

/// `{"verdict", "backend", "params", "witness", "version"}`. The claim being
/// certified is `params.claim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub backend: Backend,
    pub params: Value,
    pub witness: Value,
    pub version: u32,
}

impl Certificate {
    pub fn new(claim: &str, verdict: Verdict, backend: Backend, params: Value, witness: Value) -> Self {
        let mut obj = Map::new();
        obj.insert("claim".into(), Value::String(claim.into()));
        if let Value::Object(rest) = params {
            obj.extend(rest);
        }
        Self { verdict, backend, params: Value::Object(obj), witness, version: CERT_VERSION }
    }

    pub fn claim(&self) -> &str {
        self.params.get("claim").and_then(Value::as_str).unwrap_or("")
    }

    /// Appends a free-form note to `witness.notes`.
    pub fn note(mut self, text: impl Into<String>) -> Self {
        push_str(&mut self.witness, "notes", text.into());
        self
    }

    pub fn warn(mut self, text: impl Into<String>) -> Self {
        push_str(&mut self.witness, "warnings", text.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(s)?;
        if c.version != CERT_VERSION {
            return Err(Error::MalformedCertificate(format!("unsupported version {}", c.version)));
        }
        Ok(c)
    }
}

fn push_str(target: &mut Value, key: &str, text: String) {
    if !target.is_object() {
        *target = json!({});
    }
    let obj = target.as_object_mut().unwrap();
    let list = obj.entry(key).or_insert_with(|| Value::Array(vec![]));
    if let Value::Array(items) = list {
        items.push(Value::String(text));
    }
}

/// Process exit status for a batch of certificates: 0 when all verified,
/// 1 when anything was refuted, 2 otherwise.
pub fn exit_code<'a>(certs: impl IntoIterator<Item = &'a Certificate>) -> i32 {
    let mut all_verified = true;
    for c in certs {
        match c.verdict {
            Verdict::Refuted => return 1,
            Verdict::Unknown => all_verified = false,
            Verdict::Verified => {}
        }
    }
    if all_verified {
        0
    } else {
        2
    }
}

/// Exact integers travel as decimal strings.
pub fn big(x: &BigInt) -> Value {
    Value::String(x.to_string())
}

pub fn bigs(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(big).collect())
}

pub fn big_rows(rows: &[Vec<BigInt>]) -> Value {
    Value::Array(rows.iter().map(|r| bigs(r)).collect())
}

pub fn functional_json(f: &Functional<BigInt>) -> Value {
    json!({ "weights": bigs(&f.weights), "modulus": big(&f.modulus) })
}

/// Records a strict or non-strict inequality with both sides.
pub fn inequality(name: &str, lhs: &BigInt, op: &str, rhs: &BigInt, holds: bool) -> Value {
    json!({ "name": name, "lhs": big(lhs), "op": op, "rhs": big(rhs), "holds": holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_shape() {
        let c = Certificate::new("demo", Verdict::Unknown, Backend::Modular, json!({"p": 3}), json!({})).note("hello");
        let v: Value = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(v["verdict"], "unknown");
        assert_eq!(v["backend"], "modular");
        assert_eq!(v["params"]["claim"], "demo");
        assert_eq!(v["version"], 1);
        assert_eq!(v["witness"]["notes"][0], "hello");
        assert_eq!(Certificate::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn exit_codes() {
        let mk = |v| Certificate::new("x", v, Backend::ExactInteger, json!({}), json!({}));
        assert_eq!(exit_code(&[mk(Verdict::Verified)]), 0);
        assert_eq!(exit_code(&[mk(Verdict::Verified), mk(Verdict::Refuted)]), 1);
        assert_eq!(exit_code(&[mk(Verdict::Unknown)]), 2);
        assert_eq!(exit_code(&[mk(Verdict::Verified), mk(Verdict::Unknown)]), 2);
    }
}
