//! Parameter families `i -> (k_i, n_i)` for candidate essential lens
//! sequences, their growth audit, and finite-stage cup-length certificates.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::cert::{big, inequality, Backend, Certificate, Verdict};
use crate::error::{Error, Result};
use crate::lensring::{pullback, Generator, LensParams, LensRing};
use crate::membership::{decide_nonzero, shifted_power_mod, BackendChoice, Decision, ProofOptions};
use crate::scalar::{is_prime_u64, pow};

pub const ODD_PRIME_WARNING: &str = "p = 2 accepted, but the sequence problem is posed for odd primes";

pub const FINITE_STAGE_NOTE: &str = "finite-stage statement: nonvanishing in K^0 of the inverse limit \
     follows only through the colimit argument, which is not machine-checked here";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BuiltinFamily {
    /// `k_i = i + 1`, `n_i = p^i + 1`.
    F1,
    /// `k_i = i + 1`, `n_i = p^i + 2`.
    F2,
    /// `k_i = 2^i`, `n_i = p^(2^i - 1) + 1`.
    F3,
    /// `k_i = i`, `n_i = 3 p^i - (p + ... + p^(i-1)) + 1`.
    Cor,
}

impl BuiltinFamily {
    pub fn name(self) -> &'static str {
        match self {
            Self::F1 => "f1",
            Self::F2 => "f2",
            Self::F3 => "f3",
            Self::Cor => "cor",
        }
    }
}

impl FromStr for BuiltinFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f1" => Ok(Self::F1),
            "f2" => Ok(Self::F2),
            "f3" => Ok(Self::F3),
            "cor" => Ok(Self::Cor),
            _ => Err(Error::UnknownFamily(s.into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySource {
    Builtin(BuiltinFamily),
    /// Row `i` holds `(k_i, n_i)`.
    Table(Vec<(u64, BigInt)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub k: u64,
    pub n: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamFamily {
    pub p: u64,
    pub source: FamilySource,
}

fn p_pow(p: u64, e: u64) -> BigInt {
    pow(&BigInt::from(p), e)
}

/// `p + p^2 + ... + p^(i-1)`.
fn geometric_tail(p: u64, i: u64) -> BigInt {
    (1..i).map(|s| p_pow(p, s)).sum()
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime_u64(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

pub fn builtin_family(name: &str, p: u64) -> Result<ParamFamily> {
    let which = BuiltinFamily::from_str(name)?;
    check_prime(p)?;
    Ok(ParamFamily { p, source: FamilySource::Builtin(which) })
}

impl ParamFamily {
    pub fn from_table(p: u64, rows: Vec<(u64, BigInt)>) -> Result<Self> {
        check_prime(p)?;
        for (i, (_, n)) in rows.iter().enumerate() {
            if !n.is_positive() {
                return Err(Error::FamilyParse { line: i, msg: format!("n_{i} must be positive") });
            }
        }
        Ok(Self { p, source: FamilySource::Table(rows) })
    }

    /// Parses `p=<prime>` followed by lines `<i> <k_i> <n_i>`, indices
    /// contiguous from 0. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = None;
        let mut rows = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::FamilyParse { line: lineno + 1, msg };
            if p.is_none() {
                let value = line
                    .split_once('=')
                    .filter(|(key, _)| key.trim() == "p")
                    .map(|(_, v)| v)
                    .ok_or_else(|| err("expected header p=<prime>".into()))?;
                p = Some(value.trim().parse::<u64>().map_err(|e| err(e.to_string()))?);
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(err(format!("expected `<i> <k_i> <n_i>`, got {line:?}")));
            }
            let i: usize = fields[0].parse().map_err(|_| err(format!("bad index {:?}", fields[0])))?;
            if i != rows.len() {
                return Err(err(format!("index {i} out of order, expected {}", rows.len())));
            }
            let k: u64 = fields[1].parse().map_err(|_| err(format!("bad k {:?}", fields[1])))?;
            let n: BigInt = fields[2].parse().map_err(|_| err(format!("bad n {:?}", fields[2])))?;
            if !n.is_positive() {
                return Err(err("n_i must be positive".into()));
            }
            rows.push((k, n));
        }
        let p = p.ok_or(Error::FamilyParse { line: 0, msg: "missing header p=<prime>".into() })?;
        Self::from_table(p, rows)
    }

    pub fn name(&self) -> &str {
        match &self.source {
            FamilySource::Builtin(b) => b.name(),
            FamilySource::Table(_) => "table",
        }
    }

    /// Number of stages, `None` for the infinite builtin families.
    pub fn len(&self) -> Option<usize> {
        match &self.source {
            FamilySource::Builtin(_) => None,
            FamilySource::Table(rows) => Some(rows.len()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn stage(&self, i: u64) -> Result<Stage> {
        let p = self.p;
        match &self.source {
            FamilySource::Table(rows) => rows
                .get(i as usize)
                .map(|(k, n)| Stage { k: *k, n: n.clone() })
                .ok_or_else(|| Error::InvalidArgument(format!("table family has no stage {i}"))),
            FamilySource::Builtin(b) => Ok(match b {
                BuiltinFamily::F1 => Stage { k: i + 1, n: p_pow(p, i) + 1 },
                BuiltinFamily::F2 => Stage { k: i + 1, n: p_pow(p, i) + 2 },
                BuiltinFamily::F3 => {
                    if i >= 63 {
                        return Err(Error::TooLarge(format!("f3 stage {i}: k = 2^{i}")));
                    }
                    let k = 1u64 << i;
                    Stage { k, n: p_pow(p, k - 1) + 1 }
                }
                BuiltinFamily::Cor => Stage { k: i, n: 3 * p_pow(p, i) - geometric_tail(p, i) + 1 },
            }),
        }
    }

    /// Parameter block for certificates; tables are embedded in full.
    pub fn to_json(&self) -> Value {
        match &self.source {
            FamilySource::Builtin(b) => json!({ "family": b.name(), "p": self.p }),
            FamilySource::Table(rows) => json!({
                "family": "table",
                "p": self.p,
                "table": rows.iter().map(|(k, n)| json!([k.to_string(), n.to_string()])).collect::<Vec<_>>(),
            }),
        }
    }

    /// Inverse of [`ParamFamily::to_json`].
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::MalformedCertificate(m.into());
        let p = v["p"].as_u64().ok_or_else(|| bad("family p"))?;
        match v["family"].as_str().ok_or_else(|| bad("family name"))? {
            "table" => {
                let rows = v["table"]
                    .as_array()
                    .ok_or_else(|| bad("family table"))?
                    .iter()
                    .map(|r| {
                        let k = r[0].as_str().and_then(|s| s.parse().ok()).ok_or_else(|| bad("table k"))?;
                        let n = r[1].as_str().and_then(|s| s.parse().ok()).ok_or_else(|| bad("table n"))?;
                        Ok((k, n))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::from_table(p, rows)
            }
            name => builtin_family(name, p),
        }
    }

    fn warn_if_even(&self, c: Certificate) -> Certificate {
        if self.p == 2 {
            c.warn(ODD_PRIME_WARNING)
        } else {
            c
        }
    }
}

impl fmt::Display for ParamFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (p = {})", self.name(), self.p)
    }
}

/// `p^(a - b)` compared as `lhs > p^(a-b)` without leaving the integers:
/// for `a < b` this is `lhs * p^(b-a) > 1`.
fn exceeds_power(lhs: &BigInt, p: u64, a: u64, b: u64) -> (bool, BigInt, BigInt) {
    if a >= b {
        let rhs = p_pow(p, a - b);
        (lhs > &rhs, lhs.clone(), rhs)
    } else {
        let scaled = lhs * p_pow(p, b - a);
        (scaled > BigInt::one(), scaled, BigInt::one())
    }
}

/// Checks `k_i` strictly increasing and `n_i > p^(k_i - k_0)` for every
/// `0 <= i <= horizon`, listing each stage and the first violation.
pub fn check_growth(family: &ParamFamily, horizon: u64) -> Result<Certificate> {
    if horizon == 0 {
        return Err(Error::Precondition("horizon must be at least 1".into()));
    }
    let p = family.p;
    let k0 = family.stage(0)?.k;
    let mut stages = Vec::new();
    let mut first_violation = Value::Null;
    let mut prev_k: Option<u64> = None;
    for i in 0..=horizon {
        let s = family.stage(i)?;
        let increasing = prev_k.is_none_or(|pk| s.k > pk);
        let (dominates, lhs, rhs) = exceeds_power(&s.n, p, s.k, k0);
        let mut entry = json!({
            "i": i,
            "k": s.k,
            "n": big(&s.n),
            "growth": inequality("n_i > p^(k_i - k_0)", &lhs, ">", &rhs, dominates),
        });
        if let Some(pk) = prev_k {
            entry["increasing"] = inequality("k_i > k_(i-1)", &BigInt::from(s.k), ">", &BigInt::from(pk), increasing);
        }
        if first_violation.is_null() && !(increasing && dominates) {
            let failing = if increasing { entry["growth"].clone() } else { entry["increasing"].clone() };
            first_violation = json!({ "i": i, "inequality": failing });
        }
        stages.push(entry);
        prev_k = Some(s.k);
    }
    let verdict = if first_violation.is_null() { Verdict::Verified } else { Verdict::Refuted };
    let mut params = family.to_json();
    params["horizon"] = json!(horizon);
    let witness = json!({ "stages": stages, "first_violation": first_violation });
    let c = Certificate::new("els-growth", verdict, Backend::ExactInteger, params, witness);
    Ok(family.warn_if_even(c))
}

fn to_u32(x: u64, what: &str) -> Result<u32> {
    u32::try_from(x).map_err(|_| Error::TooLarge(format!("{what} = {x}")))
}

fn to_usize(x: &BigInt, what: &str) -> Result<usize> {
    x.to_usize().ok_or_else(|| Error::TooLarge(format!("{what} = {x}")))
}

/// Options for [`certify_cup_length`]; `t` defaults to `k_(i+j) - k_i`.
#[derive(Clone, Copy, Debug, Default)]
pub struct CupOptions {
    pub proof: ProofOptions,
}

/// Finite-stage witness that `(eta_(k_i) - 1)^m` survives at stage `i + j`:
/// the pullback `(eta^(p^(k_(i+j) - k_i)) - 1)^m` is nonzero in
/// `K^0(L^(n_(i+j))(p^(k_(i+j))))`, and the membership hypotheses
/// `m < p^(k_i)`, `m p^(k_(i+j) - k_i) < n_(i+j)` hold.
pub fn certify_cup_length(family: &ParamFamily, i: u64, m: u64, j: u64, opts: &CupOptions) -> Result<Certificate> {
    if j == 0 {
        return Err(Error::Precondition("j must be at least 1".into()));
    }
    if m == 0 {
        return Err(Error::Precondition("m must be positive".into()));
    }
    let p = family.p;
    let s0 = family.stage(0)?;
    let si = family.stage(i)?;
    let sd = family.stage(i + j)?;
    if si.k < s0.k || sd.k < si.k {
        return Err(Error::Precondition("k must be non-decreasing along the family".into()));
    }
    let mb = BigInt::from(m);
    let cap = p_pow(p, si.k - s0.k);
    if mb >= cap {
        return Err(Error::Precondition(format!("m = {m} is not below p^(k_i - k_0) = {cap}")));
    }
    let delta = sd.k - si.k;
    let p_ki = p_pow(p, si.k);
    let lhs2 = &mb * p_pow(p, delta);
    let h1 = inequality("m < p^(k_i)", &mb, "<", &p_ki, mb < p_ki);
    let h2 = inequality("m*p^(k_(i+j)-k_i) < n_(i+j)", &lhs2, "<", &sd.n, lhs2 < sd.n);
    let hyp_ok = mb < p_ki && lhs2 < sd.n;

    // m < p^(k_i - k_0) with m >= 1 forces k_i >= 1.
    let src = LensParams::new(p, to_u32(si.k, "k_i")?, to_usize(&si.n, "n_i")?)?;
    let dst = LensParams::new(p, to_u32(sd.k, "k_(i+j)")?, to_usize(&sd.n, "n_(i+j)")?)?;
    let t = match opts.proof.modulus_exponent {
        Some(t) => t,
        None => to_u32(delta.max(1), "t")?,
    };
    let mut notes = Vec::new();
    let budget = opts.proof.budget_bits;
    let exact = |ring: &Arc<LensRing>| {
        let image = match LensRing::new(src, budget) {
            Ok(src_ring) => pullback(&src_ring, ring, &src_ring.generator(Generator::Sigma))?,
            Err(Error::BudgetExceeded { .. }) => {
                let shift = p_pow(p, delta).to_u64().ok_or_else(|| Error::TooLarge("p^delta".into()))?;
                ring.generator(Generator::Eta).pow(shift).sub(&ring.one())?
            }
            Err(e) => return Err(e),
        };
        Ok(image.pow(m))
    };
    let decision =
        decide_nonzero(&dst, t, &opts.proof, exact, |t| shifted_power_mod(p, delta, m, dst.n, t), &mut notes)?;

    let mut params = family.to_json();
    params["i"] = json!(i);
    params["m"] = json!(m);
    params["j"] = json!(j);
    if opts.proof.modulus_exponent.is_some() {
        params["t"] = json!(t);
    }
    let (verdict, backend, mut w) = match decision {
        Decision::Nonzero(b, w) if hyp_ok => (Verdict::Verified, b, w),
        Decision::Nonzero(b, w) => {
            notes.push("element is nonzero at this stage but a membership hypothesis fails".into());
            (Verdict::Unknown, b, w)
        }
        Decision::Zero(w) => (Verdict::Refuted, Backend::ExactHnf, w),
        Decision::Inconclusive(b, w) => {
            if opts.proof.backend != BackendChoice::Modular {
                return Err(Error::BudgetExceeded { required: dst.required_bits(u64::MAX), allowed: budget });
            }
            (Verdict::Unknown, b, w)
        }
    };
    w["stage_ring"] = json!({ "p": p, "k": dst.k, "n": dst.n });
    w["source_ring"] = json!({ "p": p, "k": si.k, "n": big(&si.n) });
    w["k0"] = json!(s0.k);
    w["exponent_shift"] = json!(delta);
    w["hypotheses"] = json!([h1, h2]);
    w["cup_length_lower_bound"] = big(&(cap - 1));
    let mut c = Certificate::new("els-cup-length", verdict, backend, params, w).note(FINITE_STAGE_NOTE);
    for n in notes {
        c = c.note(n);
    }
    Ok(family.warn_if_even(c))
}

/// Audits the closed-form family `k_i = i`, `n_i = 3p^i - sum_(s=1)^(i-1) p^s + 1`
/// with `m = n_(i+1) + 1`: the congruence `m = 2 (mod p)`, the value
/// `(m - 2)/p + 2` against `n_i`, and against `3p^i - sum p^s - 1`.
pub fn corollary_check(p: u64, horizon: u64, start: u64) -> Result<Certificate> {
    check_prime(p)?;
    if p == 2 {
        return Err(Error::Precondition("corollary audit needs an odd prime".into()));
    }
    if horizon == 0 {
        return Err(Error::Precondition("horizon must be at least 1".into()));
    }
    let family = builtin_family("cor", p)?;
    let pb = BigInt::from(p);
    let mut stages = Vec::new();
    let mut violations = Vec::new();
    for i in start..=horizon.max(start) {
        let ni = family.stage(i)?.n;
        let next = family.stage(i + 1)?.n;
        let m: BigInt = next + 1;
        let residue = m.mod_floor(&pb);
        let congruent = residue == BigInt::from(2 % p);
        let (q, r) = (&m - BigInt::from(2)).div_mod_floor(&pb);
        let value = q + 2;
        let closed = 3 * p_pow(p, i) - geometric_tail(p, i) - 1;
        let holds = congruent && value <= ni;
        if !holds {
            violations.push(json!(i));
        }
        stages.push(json!({
            "i": i,
            "n_i": big(&ni),
            "m": big(&m),
            "m_mod_p": big(&residue),
            "congruent": congruent,
            "value": big(&value),
            "exact_division": r.is_zero(),
            "value_le_n_i": value <= ni,
            "value_eq_n_i": value == ni,
            "closed_form": big(&closed),
            "value_eq_closed_form": value == closed,
        }));
    }
    let verdict = if violations.is_empty() { Verdict::Verified } else { Verdict::Refuted };
    let params = json!({ "p": p, "horizon": horizon, "start_index": start });
    let witness = json!({ "stages": stages, "violations": violations });
    Ok(Certificate::new("els-corollary", verdict, Backend::ExactInteger, params, witness))
}
