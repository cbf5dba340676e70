//! Level-function and Schwarz-genus bounds, all in exact integers.
//!
//! `v_(p,k)(m)` is the least `n` admitting a `Z_p`-equivariant map
//! `L^m(p^(k-1)) -> S^(2n-1)`. Only bounds are computable here: the lower
//! bound `ceil((m-1)/p^(k-1)) + 1`, and the exact value `(m-2)/p + 2` for
//! odd `p`, `k = 2`, `m = 2 (mod p)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cert::{big, Backend, Certificate, Verdict};
use crate::elschain::ParamFamily;
use crate::error::{Error, Result};
use crate::scalar::{ceil_div, pow, Scalar};

/// `ceil((m - 1) / p^(k - 1)) + 1`.
pub fn level_lower_bound<T: Scalar>(p: &T, k: u32, m: &T) -> T {
    assert!(k >= 1, "k must be positive");
    let denom = pow(p, (k - 1) as u64);
    ceil_div(&(m.clone() - T::one()), &denom) + T::one()
}

/// Why an exact level value is unavailable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NotApplicable {
    EvenPrime,
    WrongResidue,
}

impl NotApplicable {
    pub fn reason(self) -> &'static str {
        match self {
            Self::EvenPrime => "needs odd p",
            Self::WrongResidue => "needs m = 2 (mod p)",
        }
    }
}

/// `v_(p,2)(m) = (m - 2)/p + 2` for odd `p` and `m = 2 (mod p)`.
pub fn meyer_exact<T: Scalar>(p: &T, m: &T) -> Result<T, NotApplicable> {
    let two = T::one() + T::one();
    if *p == two {
        return Err(NotApplicable::EvenPrime);
    }
    let (q, r) = (m.clone() - two.clone()).div_mod_floor(p);
    if !r.is_zero() {
        return Err(NotApplicable::WrongResidue);
    }
    Ok(q + two)
}

/// `ceil((m - 1)/p) + 1`, a lower bound for `Sg(pi^m_k)` independent of `k`.
pub fn schwarz_lower<T: Scalar>(p: &T, m: &T) -> T {
    level_lower_bound(p, 2, m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    LevelLower,
    MeyerExact,
    SchwarzLower,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub p: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(serialize_with = "ser_big")]
    pub m: BigInt,
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_opt_big")]
    pub value: Option<BigInt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

fn ser_big<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_opt_big<S: serde::Serializer>(x: &Option<BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

fn validate(p: u64, m: &BigInt) -> Result<()> {
    if !crate::scalar::is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    if !m.is_positive() {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    Ok(())
}

pub fn bound_reports(p: u64, k: u32, m: &BigInt) -> Result<Vec<BoundReport>> {
    validate(p, m)?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let pb = BigInt::from(p);
    let applicable = |kind, k, value: BigInt| BoundReport {
        kind,
        p,
        k,
        m: m.clone(),
        applicable: true,
        value: Some(value),
        reason: None,
    };
    let meyer = match meyer_exact(&pb, m) {
        Ok(v) => applicable(BoundKind::MeyerExact, Some(2), v),
        Err(na) => BoundReport {
            kind: BoundKind::MeyerExact,
            p,
            k: Some(2),
            m: m.clone(),
            applicable: false,
            value: None,
            reason: Some(na.reason().into()),
        },
    };
    Ok(vec![
        applicable(BoundKind::LevelLower, Some(k), level_lower_bound(&pb, k, m)),
        meyer,
        applicable(BoundKind::SchwarzLower, None, schwarz_lower(&pb, m)),
    ])
}

pub fn bounds_certificate(p: u64, k: u32, m: &BigInt) -> Result<Certificate> {
    let reports = bound_reports(p, k, m)?;
    let params = json!({ "p": p, "k": k, "m": big(m) });
    let witness = json!({
        "reports": serde_json::to_value(&reports)?,
        "notes": ["the Schwarz genus itself is open; only bounds are reported"],
    });
    Ok(Certificate::new("genus-bounds", Verdict::Verified, Backend::ExactInteger, params, witness))
}

/// Refutes an essential map `L^m(p^(k+1)) -> L^n(p^k)` when
/// `n < ceil((m-1)/p) + 1`. Never returns "verified": existence would need
/// the exact genus.
pub fn refute_essential_map(p: u64, k: u32, m: &BigInt, n: &BigInt) -> Result<Certificate> {
    validate(p, m)?;
    if k == 0 || !n.is_positive() {
        return Err(Error::InvalidArgument("k and n must be positive".into()));
    }
    let bound = schwarz_lower(&BigInt::from(p), m);
    let refuted = n < &bound;
    let params = json!({ "p": p, "k": k, "m": big(m), "n": big(n) });
    let witness = json!({
        "inequality": { "name": "n < ceil((m-1)/p)+1", "lhs": big(n), "op": "<", "rhs": big(&bound), "holds": refuted },
        "schwarz_lower": big(&bound),
    });
    let verdict = if refuted { Verdict::Refuted } else { Verdict::Unknown };
    let mut c = Certificate::new("essential-map", verdict, Backend::ExactInteger, params, witness);
    if !refuted {
        c = c.note("bound not exceeded; existence of the map is not decided");
    }
    Ok(c)
}

fn ratio_pow(p: u64, e: i64) -> BigRational {
    let base = pow(&BigInt::from(p), e.unsigned_abs());
    if e >= 0 {
        BigRational::from_integer(base)
    } else {
        BigRational::new(BigInt::one(), base)
    }
}

fn ratio_str(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn link(name: &str, lhs: &BigRational, op: &str, rhs: &BigRational) -> (bool, Value) {
    let holds = match op {
        ">=" => lhs >= rhs,
        ">" => lhs > rhs,
        _ => unreachable!(),
    };
    (holds, json!({ "name": name, "lhs": ratio_str(lhs), "op": op, "rhs": ratio_str(rhs), "holds": holds }))
}

/// Evaluates, for stages `i > j`, the chain
/// `n_j >= ceil((n_i - 1)/p^(k_i - k_j)) + 1 >= p^(k_i - k_0)/p^(k_i - k_j) + 1 > p^(k_j - k_0)`
/// and reports the first link that fails. When `k_i - k_j = 1` and the exact
/// level value is known, `n_j >= v_(p,2)(n_i)` is checked first.
pub fn remark_consistency(family: &ParamFamily, i: u64, j: u64) -> Result<Certificate> {
    if i <= j {
        return Err(Error::Precondition(format!("need i > j, got i = {i}, j = {j}")));
    }
    let p = family.p;
    let (s0, si, sj) = (family.stage(0)?, family.stage(i)?, family.stage(j)?);
    let (k0, ki, kj) = (s0.k as i64, si.k as i64, sj.k as i64);
    let nj = BigRational::from_integer(sj.n.clone());

    let mut links = Vec::new();
    if ki - kj == 1 {
        if let Ok(v) = meyer_exact(&BigInt::from(p), &si.n) {
            links.push(link("n_j >= v_(p,2)(n_i)", &nj, ">=", &BigRational::from_integer(v)));
        }
    }
    let level = (BigRational::from_integer(&si.n - 1) / ratio_pow(p, ki - kj)).ceil() + BigRational::one();
    links.push(link("n_j >= ceil((n_i-1)/p^(k_i-k_j))+1", &nj, ">=", &level));
    let middle = ratio_pow(p, ki - k0) / ratio_pow(p, ki - kj) + BigRational::one();
    links.push(link("ceil((n_i-1)/p^(k_i-k_j))+1 >= p^(k_i-k_0)/p^(k_i-k_j)+1", &level, ">=", &middle));
    links.push(link("p^(k_i-k_0)/p^(k_i-k_j)+1 > p^(k_j-k_0)", &middle, ">", &ratio_pow(p, kj - k0)));

    let first = links.iter().position(|(ok, _)| !ok);
    let verdict = if first.is_none() { Verdict::Verified } else { Verdict::Refuted };
    let mut params = family.to_json();
    params["i"] = json!(i);
    params["j"] = json!(j);
    let witness = json!({
        "stages": { "k0": s0.k, "k_i": si.k, "n_i": big(&si.n), "k_j": sj.k, "n_j": big(&sj.n) },
        "links": links.into_iter().map(|(_, v)| v).collect::<Vec<_>>(),
        "first_violated": first,
    });
    Ok(Certificate::new("remark-chain", verdict, Backend::ExactInteger, params, witness))
}
