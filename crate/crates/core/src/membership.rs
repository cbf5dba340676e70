//! Ideal membership in `K^0(L^n(p^k))`: exact lattice reduction, the
//! modular Howell-form test over `Z/p^t`, and the non-membership
//! certificate for `(x^(p^(k-l)) - 1)^m`.

use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::cert::{big, bigs, functional_json, inequality, Backend, Certificate, Verdict};
use crate::error::{Error, Result};
use crate::lattice::{hermite_normal_form, howell_form, separating_functional, Functional, Matrix};
use crate::lensring::{LensParams, LensRing, RingElement, DEFAULT_BUDGET_BITS};
use crate::padic::binomial_row_mod;
use crate::poly::SparsePoly;
use crate::scalar::pow;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BackendChoice {
    Exact,
    Modular,
    #[default]
    Auto,
}

impl FromStr for BackendChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "modular" => Ok(Self::Modular),
            "auto" => Ok(Self::Auto),
            _ => Err(Error::InvalidArgument(format!("unknown backend {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ProofOptions {
    pub backend: BackendChoice,
    /// Overrides the default modulus exponent `t`.
    pub modulus_exponent: Option<u32>,
    pub budget_bits: u64,
}

impl Default for ProofOptions {
    fn default() -> Self {
        Self { backend: BackendChoice::Auto, modulus_exponent: None, budget_bits: DEFAULT_BUDGET_BITS }
    }
}

pub const P2_WARNING: &str =
    "p = 2: the ring presentation is used as stated, but the lens-sequence setting assumes an odd prime";

/// Outcome of testing a vector against the ideal reduced modulo `p^t`.
#[derive(Clone, Debug)]
pub struct ModularOutcome {
    pub modulus: BigInt,
    pub residue: Vec<BigInt>,
    /// Present iff the vector is outside the span mod `p^t`.
    pub functional: Option<Functional<BigInt>>,
}

/// Howell-form membership of `coeffs mod p^t` in the ideal reduced mod `p^t`.
/// A separating functional with modulus `p^t` is attached on failure.
pub fn modular_membership(params: &LensParams, coeffs: &[BigInt], t: u32) -> ModularOutcome {
    assert!(t >= 1);
    let n = params.n;
    let modulus = params.prime_power(t);
    let gens = params.generators_mod(t);
    let howell = howell_form(&gens, n, &modulus);
    let target: Vec<BigInt> = coeffs.iter().map(|c| c.mod_floor(&modulus)).collect();
    let residue = howell.reduce(&target);
    let functional = if residue.iter().all(Zero::is_zero) {
        None
    } else {
        // Basis of lattice + p^t Z^n: the lifted Howell rows plus p^t e_i.
        let mut rows = howell.rows.clone();
        for i in 0..n {
            let mut e = vec![BigInt::zero(); n];
            e[i] = modulus.clone();
            rows.push(e);
        }
        let hnf = hermite_normal_form(&Matrix::from_rows(rows, n));
        debug_assert_eq!(hnf.rank(), n);
        let f = separating_functional(&hnf.basis, &target).expect("outside the span mod p^t");
        let scale = modulus.clone() / &f.modulus;
        Some(Functional {
            weights: f.weights.iter().map(|w| (w * &scale).mod_floor(&modulus)).collect(),
            modulus: modulus.clone(),
        })
    };
    ModularOutcome { modulus, residue, functional }
}

fn ring_params_json(params: &LensParams) -> Value {
    json!({ "p": params.p, "k": params.k, "n": params.n })
}

fn with_p2_warning(c: Certificate, p: u64) -> Certificate {
    if p == 2 {
        c.warn(P2_WARNING)
    } else {
        c
    }
}

/// Membership test modulo `p^t`: "refuted" (not a member, also over `Z`) or
/// "unknown" (member mod `p^t`, no conclusion over `Z`).
pub fn member_mod(ring: &LensRing, a: &RingElement, t: u32) -> Certificate {
    member_mod_params(&ring.params(), a.coeffs(), t)
}

pub fn member_mod_params(params: &LensParams, coeffs: &[BigInt], t: u32) -> Certificate {
    let out = modular_membership(params, coeffs, t);
    let mut p = ring_params_json(params);
    p["element"] = bigs(coeffs);
    p["t"] = json!(t);
    let (verdict, witness) = match &out.functional {
        Some(f) => (
            Verdict::Refuted,
            json!({ "modulus": big(&out.modulus), "residue": bigs(&out.residue), "functional": functional_json(f) }),
        ),
        None => (
            Verdict::Unknown,
            json!({ "modulus": big(&out.modulus), "residue": bigs(&out.residue),
                    "notes": ["member modulo p^t; no conclusion over Z"] }),
        ),
    };
    with_p2_warning(Certificate::new("ideal-membership", verdict, Backend::Modular, p, witness), params.p)
}

/// Exact membership: "verified" with the integer combination of `y^i f`, or
/// "refuted" with the normal form and a separating functional.
pub fn member_exact(ring: &LensRing, a: &RingElement) -> Certificate {
    let params = ring.params();
    let mut p = ring_params_json(&params);
    p["element"] = bigs(a.coeffs());
    let (verdict, witness) = match ring.ideal_combination(a.coeffs()) {
        Some(c) => (Verdict::Verified, json!({ "combination": bigs(&c) })),
        None => {
            let f = ring.separating_functional(a.coeffs()).expect("non-member has a functional");
            let nf = ring.normal_form_coeffs(a.coeffs());
            (Verdict::Refuted, json!({ "normal_form": bigs(&nf), "functional": functional_json(&f) }))
        }
    };
    with_p2_warning(Certificate::new("ideal-membership", verdict, Backend::ExactHnf, p, witness), params.p)
}

/// Coefficients of `c * d` truncated to `n` terms, reduced mod `modulus`.
pub(crate) fn mul_trunc_mod(a: &[BigInt], b: &[BigInt], n: usize, modulus: &BigInt) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out.iter().map(|c| c.mod_floor(modulus)).collect()
}

/// `((y + 1)^(p^e) - 1)^m mod (y^n, p^t)`.
pub fn shifted_power_mod(p: u64, e: u64, m: u64, n: usize, t: u32) -> Vec<BigInt> {
    let modulus = pow(&BigInt::from(p), t as u64);
    let mut base = binomial_row_mod(&pow(&BigInt::from(p), e), n, p, t);
    if let Some(c0) = base.first_mut() {
        *c0 = BigInt::zero();
    }
    let mut acc = vec![BigInt::zero(); n];
    acc[0] = BigInt::one().mod_floor(&modulus);
    let mut m = m;
    while m > 0 {
        if m & 1 == 1 {
            acc = mul_trunc_mod(&acc, &base, n, &modulus);
        }
        m >>= 1;
        if m > 0 {
            base = mul_trunc_mod(&base, &base, n, &modulus);
        }
    }
    acc
}

/// `(x^(p^e) - 1)^m` as an element of `ring`, via the substitution `y = x - 1`.
pub fn shifted_power(ring: &Arc<LensRing>, e: u64, m: u64) -> Result<RingElement> {
    let s = pow(&BigInt::from(ring.p()), e);
    let s = num_traits::ToPrimitive::to_u64(&s).ok_or_else(|| Error::TooLarge(s.to_string()))?;
    let base = SparsePoly::from_terms([(s, BigInt::one()), (0, -BigInt::one())]);
    Ok(ring.from_x_poly(&base.pow(m)))
}

/// How a nonzero-ness question was settled.
pub(crate) enum Decision {
    /// Outside the ideal; the witness proves it.
    Nonzero(Backend, Value),
    /// Inside the ideal, with the integer combination.
    Zero(Value),
    Inconclusive(Backend, Value),
}

/// Decides whether an element of `K^0(L^n(p^k))` is nonzero, according to
/// `opts`. `exact` builds the element in an exact ring; `modular` returns its
/// coefficients mod `p^t`.
pub(crate) fn decide_nonzero(
    params: &LensParams,
    t: u32,
    opts: &ProofOptions,
    exact: impl Fn(&Arc<LensRing>) -> Result<RingElement>,
    modular: impl Fn(u32) -> Vec<BigInt>,
    notes: &mut Vec<String>,
) -> Result<Decision> {
    let run_modular = || {
        let coeffs = modular(t);
        let out = modular_membership(params, &coeffs, t);
        let mut w = json!({
            "modulus_exponent": t,
            "modulus": big(&out.modulus),
            "element_mod": bigs(&coeffs),
            "residue": bigs(&out.residue),
        });
        match out.functional {
            Some(f) => {
                w["functional"] = functional_json(&f);
                Decision::Nonzero(Backend::Modular, w)
            }
            None => Decision::Inconclusive(Backend::Modular, w),
        }
    };
    let run_exact = |notes: &mut Vec<String>| -> Result<Option<Decision>> {
        let ring = match LensRing::new(*params, opts.budget_bits) {
            Ok(r) => r,
            Err(Error::BudgetExceeded { required, allowed }) => {
                notes.push(format!("exact ring needs {required} bits, budget {allowed}; exact backend skipped"));
                return Ok(None);
            }
            Err(e) => return Err(e),
        };
        let a = exact(&ring)?;
        Ok(Some(match ring.separating_functional(a.coeffs()) {
            Some(f) => Decision::Nonzero(
                Backend::ExactHnf,
                json!({
                    "element": bigs(a.coeffs()),
                    "normal_form": bigs(&ring.normal_form_coeffs(a.coeffs())),
                    "functional": functional_json(&f),
                }),
            ),
            None => {
                let c = ring.ideal_combination(a.coeffs()).expect("member has a combination");
                Decision::Zero(json!({ "element": bigs(a.coeffs()), "combination": bigs(&c) }))
            }
        }))
    };
    match opts.backend {
        BackendChoice::Modular => Ok(run_modular()),
        BackendChoice::Exact => match run_exact(notes)? {
            Some(d) => Ok(d),
            None => {
                notes.push("fell back to the modular backend".into());
                Ok(run_modular())
            }
        },
        BackendChoice::Auto => {
            let d = run_modular();
            if !matches!(d, Decision::Inconclusive(..)) {
                return Ok(d);
            }
            notes.push(format!("modular test at t = {t} inconclusive; trying exact backend"));
            Ok(run_exact(notes)?.unwrap_or(d))
        }
    }
}

/// Certifies that `(x^(p^(k-l)) - 1)^m` is not in `<x^(p^k) - 1, (x - 1)^n>`
/// whenever `m < p^l` and `m p^(k-l) < n`.
///
/// With the hypotheses in place the modular backend works at `t = k - l` by
/// default: mod `p` the element is `y^(m p^(k-l))` and the ideal is
/// `<y^(p^k), y^n>`, so any `t >= 1` separates. When a hypothesis fails the
/// verdict is "unknown" and the failing inequality is named.
pub fn verify_ideal_prop(p: u64, k: u32, l: u32, m: u64, n: usize, opts: &ProofOptions) -> Result<Certificate> {
    if l < 1 || k <= l {
        return Err(Error::Precondition(format!("need k > l >= 1, got k = {k}, l = {l}")));
    }
    if m == 0 {
        return Err(Error::Precondition("m must be positive".into()));
    }
    let params = LensParams::new(p, k, n)?;
    let t = opts.modulus_exponent.unwrap_or(k - l);
    if t == 0 {
        return Err(Error::Precondition("modulus exponent t must be positive".into()));
    }
    let pb = BigInt::from(p);
    let mb = BigInt::from(m);
    let p_l = pow(&pb, l as u64);
    let lhs2 = &mb * pow(&pb, (k - l) as u64);
    let nb = BigInt::from(n);
    let h1 = inequality("m < p^l", &mb, "<", &p_l, mb < p_l);
    let h2 = inequality("m*p^(k-l) < n", &lhs2, "<", &nb, lhs2 < nb);
    let hyp_ok = mb < p_l && lhs2 < nb;
    let mut pj = json!({ "p": p, "k": k, "l": l, "m": m, "n": n });
    if opts.modulus_exponent.is_some() {
        pj["t"] = json!(t);
    }
    if !hyp_ok {
        let violated: Vec<Value> = [h1.clone(), h2.clone()].into_iter().filter(|h| h["holds"] == false).collect();
        let w = json!({ "hypotheses": [h1, h2], "violated": violated });
        let c = Certificate::new("prop-ideal", Verdict::Unknown, Backend::ExactInteger, pj, w);
        return Ok(with_p2_warning(c, p));
    }
    let e = (k - l) as u64;
    let mut notes = Vec::new();
    let decision = decide_nonzero(
        &params,
        t,
        opts,
        |ring| shifted_power(ring, e, m),
        |t| shifted_power_mod(p, e, m, n, t),
        &mut notes,
    )?;
    let (verdict, backend, mut w) = match decision {
        Decision::Nonzero(b, w) => (Verdict::Verified, b, w),
        Decision::Zero(w) => (Verdict::Refuted, Backend::ExactHnf, w),
        Decision::Inconclusive(b, w) => (Verdict::Unknown, b, w),
    };
    w["hypotheses"] = json!([h1, h2]);
    let mut c = Certificate::new("prop-ideal", verdict, backend, pj, w);
    for note in notes {
        c = c.note(note);
    }
    Ok(with_p2_warning(c, p))
}
