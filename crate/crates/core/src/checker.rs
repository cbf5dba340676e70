//! Independent certificate checker.
//!
//! Re-derives every claim from the certificate's parameters with its own
//! small integer routines (binomials, truncated products, triangular
//! division) and re-checks the attached witness. Nothing here calls into the
//! polynomial, lattice or ring modules that produced the certificate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::cert::{Certificate, Verdict, CERT_VERSION};

type Check<T = ()> = std::result::Result<T, String>;

/// Validates a certificate; the error lists what failed.
pub fn check_certificate(cert: &Certificate) -> Check {
    if cert.version != CERT_VERSION {
        return Err(format!("unsupported version {}", cert.version));
    }
    let claim = cert.params["claim"].as_str().ok_or("params.claim missing")?;
    let ctx = Ctx { params: &cert.params, witness: &cert.witness, verdict: cert.verdict };
    match claim {
        "prop-ideal" => ctx.prop_ideal(),
        "ideal-membership" => ctx.membership(),
        "ring-info" => ctx.ring_info(),
        "ring-power" => ctx.ring_power(),
        "invariant-factors" => ctx.invariant_factors(),
        "genus-bounds" => ctx.genus_bounds(),
        "essential-map" => ctx.essential_map(),
        "remark-chain" => ctx.remark_chain(),
        "els-growth" => ctx.growth(),
        "els-cup-length" => ctx.cup_length(),
        "els-corollary" => ctx.corollary(),
        other => Err(format!("unknown claim {other:?}")),
    }
}

/// Parses and validates one certificate from JSON text.
pub fn check_json(text: &str) -> Check {
    let cert: Certificate = serde_json::from_str(text).map_err(|e| format!("unreadable certificate: {e}"))?;
    check_certificate(&cert)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn int(v: &Value) -> Check<BigInt> {
    match v {
        Value::String(s) => s.parse().map_err(|_| format!("not an integer: {s:?}")),
        Value::Number(n) => n.to_string().parse().map_err(|_| format!("not an integer: {n}")),
        _ => Err(format!("expected integer, got {v}")),
    }
}

fn ints(v: &Value) -> Check<Vec<BigInt>> {
    v.as_array().ok_or_else(|| format!("expected list, got {v}"))?.iter().map(int).collect()
}

fn small(v: &Value, what: &str) -> Check<u64> {
    int(v)?.to_u64().ok_or_else(|| format!("{what} out of range"))
}

fn ipow(p: u64, e: u64) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn binom(top: &BigInt, j: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..j {
        acc = acc * (top - i) / (i + 1);
    }
    acc
}

/// `y^i ((y+1)^(p^k) - 1) mod y^n` for `i = 0..n-2`, all `n` coordinates.
fn ideal_gens(p: u64, k: u64, n: usize) -> Vec<Vec<BigInt>> {
    let top = ipow(p, k);
    let row: Vec<BigInt> = (0..n as u64).map(|j| binom(&top, j)).collect();
    (0..n.saturating_sub(1))
        .map(|i| {
            let mut g = vec![BigInt::zero(); n];
            g[i + 1..n].clone_from_slice(&row[1..n - i]);
            g
        })
        .collect()
}

fn trunc_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len();
    let mut out = vec![BigInt::zero(); n];
    for i in 0..n {
        for j in 0..n - i {
            out[i + j] += &a[i] * &b[j];
        }
    }
    out
}

/// `((y+1)^(p^e) - 1)^m mod y^n` by plain repeated multiplication.
fn shifted_power(p: u64, e: u64, m: u64, n: usize) -> Vec<BigInt> {
    let top = ipow(p, e);
    let base: Vec<BigInt> = (0..n as u64).map(|j| if j == 0 { BigInt::zero() } else { binom(&top, j) }).collect();
    let mut acc = vec![BigInt::zero(); n];
    acc[0] = BigInt::one();
    for _ in 0..m {
        acc = trunc_mul(&acc, &base);
    }
    acc
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn vanishes(x: &BigInt, modulus: &BigInt) -> bool {
    if modulus.is_zero() {
        x.is_zero()
    } else {
        x.mod_floor(modulus).is_zero()
    }
}

/// A functional vanishing on every generator but not on `a` proves `a` is
/// outside the lattice they span.
fn check_functional(f: &Value, gens: &[Vec<BigInt>], a: &[BigInt]) -> Check {
    let w = ints(&f["weights"])?;
    let modulus = int(&f["modulus"])?;
    ensure(w.len() == a.len(), || "functional has wrong length".into())?;
    for (i, g) in gens.iter().enumerate() {
        ensure(vanishes(&dot(&w, g), &modulus), || format!("functional does not vanish on generator {i}"))?;
    }
    ensure(!vanishes(&dot(&w, a), &modulus), || "functional vanishes on the element".into())
}

fn check_combination(c: &Value, gens: &[Vec<BigInt>], a: &[BigInt]) -> Check {
    let c = ints(c)?;
    ensure(c.len() == gens.len(), || "combination has wrong length".into())?;
    let mut sum = vec![BigInt::zero(); a.len()];
    for (ci, g) in c.iter().zip(gens) {
        for (s, x) in sum.iter_mut().zip(g) {
            *s += ci * x;
        }
    }
    ensure(sum == a, || "combination does not reproduce the element".into())
}

/// Membership in the span of the generators by forward division: generator
/// `i` starts at coordinate `i + 1` with leading coefficient `p^k`.
fn in_ideal(p: u64, k: u64, d: &[BigInt]) -> bool {
    let n = d.len();
    if !d[0].is_zero() {
        return false;
    }
    let gens = ideal_gens(p, k, n);
    let lead = ipow(p, k);
    let mut rest = d.to_vec();
    for (i, g) in gens.iter().enumerate() {
        let (q, r) = rest[i + 1].div_rem(&lead);
        if !r.is_zero() {
            return false;
        }
        for (x, y) in rest.iter_mut().zip(g) {
            *x -= &q * y;
        }
    }
    rest.iter().all(Zero::is_zero)
}

fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| !m[r][c].is_zero()) else { return BigInt::zero() };
        if piv != c {
            m.swap(piv, c);
            sign = -sign;
        }
        for r in c + 1..n {
            for j in c + 1..n {
                m[r][j] = (&m[r][j] * &m[c][c] - &m[r][c] * &m[c][j]) / &prev;
            }
        }
        prev = m[c][c].clone();
    }
    sign * prev
}

fn matmul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let cols = b.first().map_or(0, Vec::len);
    a.iter().map(|row| (0..cols).map(|j| row.iter().zip(b).map(|(x, br)| x * &br[j]).sum()).collect()).collect()
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_ceil(b)
}

/// `(k_i, n_i)` of a family, re-derived from the closed forms.
fn family_stage(params: &Value, i: u64) -> Check<(u64, BigInt)> {
    let p = small(&params["p"], "p")?;
    let name = params["family"].as_str().ok_or("family missing")?;
    Ok(match name {
        "f1" => (i + 1, ipow(p, i) + 1),
        "f2" => (i + 1, ipow(p, i) + 2),
        "f3" => {
            let k = 1u64.checked_shl(i as u32).ok_or("f3 stage too large")?;
            (k, ipow(p, k - 1) + 1)
        }
        "cor" => (i, 3 * ipow(p, i) - (1..i).map(|s| ipow(p, s)).sum::<BigInt>() + 1),
        "table" => {
            let row = params["table"].get(i as usize).ok_or_else(|| format!("table lacks stage {i}"))?;
            (small(&row[0], "k")?, int(&row[1])?)
        }
        other => return Err(format!("unknown family {other:?}")),
    })
}

fn verdict_is(actual: Verdict, expected: Verdict) -> Check {
    ensure(actual == expected, || format!("verdict {actual:?} but the data implies {expected:?}"))
}

struct Ctx<'a> {
    params: &'a Value,
    witness: &'a Value,
    verdict: Verdict,
}

impl Ctx<'_> {
    fn u(&self, key: &str) -> Check<u64> {
        small(&self.params[key], key)
    }

    fn prime(&self) -> Check<u64> {
        let p = self.u("p")?;
        ensure(is_prime(p), || format!("p = {p} is not prime"))?;
        Ok(p)
    }

    /// Shared tail of the nonzero-ness claims: the witness must match the
    /// verdict for the recomputed element.
    fn nonzero_witness(&self, p: u64, k: u64, n: usize, element: &[BigInt], positive: bool) -> Check {
        let gens = ideal_gens(p, k, n);
        let w = self.witness;
        let proven_nonzero = match w.get("functional") {
            Some(f) => {
                check_functional(f, &gens, element)?;
                true
            }
            None => false,
        };
        if let Some(nf) = w.get("normal_form") {
            let nf = ints(nf)?;
            let diff: Vec<BigInt> = element.iter().zip(&nf).map(|(a, b)| a - b).collect();
            ensure(nf.len() == n && in_ideal(p, k, &diff), || "normal form is not congruent to the element".into())?;
        }
        match self.verdict {
            Verdict::Verified => {
                ensure(proven_nonzero, || "verified without a separating functional".into())?;
                ensure(positive, || "verified although a hypothesis fails".into())
            }
            Verdict::Refuted => check_combination(&w["combination"], &gens, element),
            Verdict::Unknown => {
                ensure(!(proven_nonzero && positive), || "witness proves the claim; should be verified".into())
            }
        }
    }

    fn prop_ideal(&self) -> Check {
        let p = self.prime()?;
        let (k, l, m, n) = (self.u("k")?, self.u("l")?, self.u("m")?, self.u("n")? as usize);
        ensure(k > l && l >= 1, || "need k > l >= 1".into())?;
        let h1 = BigInt::from(m) < ipow(p, l);
        let h2 = BigInt::from(m) * ipow(p, k - l) < BigInt::from(n);
        if !(h1 && h2) {
            verdict_is(self.verdict, Verdict::Unknown)?;
            let named: Vec<&str> = self.witness["violated"]
                .as_array()
                .ok_or("violated list missing")?
                .iter()
                .filter_map(|v| v["name"].as_str())
                .collect();
            let mut expected = vec![];
            if !h1 {
                expected.push("m < p^l");
            }
            if !h2 {
                expected.push("m*p^(k-l) < n");
            }
            return ensure(named == expected, || format!("violated inequalities {named:?}, expected {expected:?}"));
        }
        let element = shifted_power(p, k - l, m, n);
        self.nonzero_witness(p, k, n, &element, true)
    }

    fn membership(&self) -> Check {
        let p = self.prime()?;
        let (k, n) = (self.u("k")?, self.u("n")? as usize);
        let element = ints(&self.params["element"])?;
        ensure(element.len() == n, || "element has wrong length".into())?;
        let gens = ideal_gens(p, k, n);
        match self.verdict {
            Verdict::Verified => check_combination(&self.witness["combination"], &gens, &element),
            Verdict::Refuted => check_functional(&self.witness["functional"], &gens, &element),
            Verdict::Unknown => Ok(()),
        }
    }

    fn ring_info(&self) -> Check {
        let p = self.prime()?;
        let (k, n) = (self.u("k")?, self.u("n")? as usize);
        let top = ipow(p, k);
        let relation = ints(&self.witness["relation"])?;
        let expected: Vec<BigInt> =
            (0..n as u64).map(|j| if j == 0 { BigInt::zero() } else { binom(&top, j) }).collect();
        ensure(relation == expected, || "relation polynomial differs".into())?;
        let hnf: Vec<Vec<BigInt>> =
            self.witness["hnf"].as_array().ok_or("hnf missing")?.iter().map(ints).collect::<Check<_>>()?;
        let dim = n - 1;
        ensure(hnf.len() == dim, || "hnf must have n - 1 rows".into())?;
        for (i, row) in hnf.iter().enumerate() {
            ensure(row.len() == dim, || "hnf row length".into())?;
            ensure(row[..i].iter().all(Zero::is_zero) && row[i].is_positive(), || {
                format!("hnf row {i} not in echelon form")
            })?;
            for (r, above) in hnf[..i].iter().enumerate() {
                ensure(!above[i].is_negative() && above[i] < row[i], || format!("hnf entry ({r},{i}) not reduced"))?;
            }
        }
        // Every generator reduces to zero against the basis.
        for (gi, g) in ideal_gens(p, k, n).iter().enumerate() {
            let mut v = g[1..].to_vec();
            for (i, row) in hnf.iter().enumerate() {
                let (q, r) = v[i].div_rem(&row[i]);
                ensure(r.is_zero(), || format!("generator {gi} not in the hnf lattice"))?;
                for (x, y) in v.iter_mut().zip(row) {
                    *x -= &q * y;
                }
            }
        }
        let det: BigInt = hnf.iter().enumerate().map(|(i, r)| r[i].clone()).product();
        ensure(det == ipow(p, k * dim as u64), || "hnf determinant differs from p^(k(n-1))".into())?;
        ensure(int(&self.witness["det"])? == det, || "reported determinant differs".into())?;
        verdict_is(self.verdict, Verdict::Verified)
    }

    fn ring_power(&self) -> Check {
        let p = self.prime()?;
        let (k, n) = (self.u("k")?, self.u("n")? as usize);
        let base = ints(&self.params["base"])?;
        let e = int(&self.params["exponent"])?;
        ensure(!e.is_negative(), || "negative exponent".into())?;
        let result = ints(&self.witness["result"])?;
        ensure(base.len() == n && result.len() == n, || "length mismatch".into())?;
        // det * Z^(n-1) lies in the ideal, so positive-degree coordinates may be
        // reduced mod det throughout.
        let det = ipow(p, k * (n as u64 - 1));
        let reduce = |v: Vec<BigInt>| -> Vec<BigInt> {
            v.into_iter().enumerate().map(|(i, x)| if i == 0 { x } else { x.mod_floor(&det) }).collect()
        };
        let mut acc = vec![BigInt::zero(); n];
        acc[0] = BigInt::one();
        let mut sq = reduce(base);
        for i in 0..e.bits() {
            if e.bit(i) {
                acc = reduce(trunc_mul(&acc, &sq));
            }
            sq = reduce(trunc_mul(&sq, &sq));
        }
        let diff: Vec<BigInt> = acc.iter().zip(&result).map(|(a, b)| a - b).collect();
        ensure(in_ideal(p, k, &diff), || "result is not congruent to the power".into())?;
        verdict_is(self.verdict, Verdict::Verified)
    }

    fn invariant_factors(&self) -> Check {
        let p = self.prime()?;
        let (k, n) = (self.u("k")?, self.u("n")? as usize);
        let gens: Vec<Vec<BigInt>> = ideal_gens(p, k, n).into_iter().map(|g| g[1..].to_vec()).collect();
        let factors = ints(&self.witness["factors"])?;
        let mats = |key: &str| -> Check<Vec<Vec<BigInt>>> {
            self.witness[key].as_array().ok_or(format!("{key} missing"))?.iter().map(ints).collect()
        };
        let (left, right) = (mats("left")?, mats("right")?);
        let dim = n - 1;
        ensure(left.len() == dim && right.len() == dim, || "transform size".into())?;
        ensure(bareiss_det(left.clone()).abs().is_one(), || "left transform not unimodular".into())?;
        ensure(bareiss_det(right.clone()).abs().is_one(), || "right transform not unimodular".into())?;
        let d = matmul(&matmul(&left, &gens), &right);
        for (i, row) in d.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let want = if i == j { factors.get(i).cloned().unwrap_or_default() } else { BigInt::zero() };
                ensure(*x == want, || format!("entry ({i},{j}) of left*G*right is {x}, expected {want}"))?;
            }
        }
        ensure(factors.iter().all(Signed::is_positive), || "factors must be positive".into())?;
        ensure(factors.windows(2).all(|w| w[1].is_multiple_of(&w[0])), || {
            "factors do not form a divisor chain".into()
        })?;
        verdict_is(self.verdict, Verdict::Verified)
    }

    fn genus_bounds(&self) -> Check {
        let p = self.prime()?;
        let k = self.u("k")?;
        let m = int(&self.params["m"])?;
        let pb = BigInt::from(p);
        for r in self.witness["reports"].as_array().ok_or("reports missing")? {
            let kind = r["kind"].as_str().unwrap_or("");
            let expected = match kind {
                "level-lower" => Some(ceil_div(&(&m - 1), &ipow(p, k - 1)) + 1),
                "schwarz-lower" => Some(ceil_div(&(&m - 1), &pb) + 1),
                "meyer-exact" => {
                    let (q, rem) = (&m - BigInt::from(2)).div_mod_floor(&pb);
                    (p != 2 && rem.is_zero()).then(|| q + 2)
                }
                _ => return Err(format!("unknown bound kind {kind:?}")),
            };
            let got = r.get("value").filter(|v| !v.is_null()).map(int).transpose()?;
            ensure(got == expected, || format!("{kind}: reported {got:?}, expected {expected:?}"))?;
            ensure(r["applicable"].as_bool() == Some(expected.is_some()), || format!("{kind}: applicability"))?;
        }
        verdict_is(self.verdict, Verdict::Verified)
    }

    fn essential_map(&self) -> Check {
        let p = self.prime()?;
        let (m, n) = (int(&self.params["m"])?, int(&self.params["n"])?);
        let bound = ceil_div(&(&m - 1), &BigInt::from(p)) + 1;
        ensure(int(&self.witness["schwarz_lower"])? == bound, || "bound differs".into())?;
        verdict_is(self.verdict, if n < bound { Verdict::Refuted } else { Verdict::Unknown })
    }

    fn remark_chain(&self) -> Check {
        let p = self.prime()?;
        let (i, j) = (self.u("i")?, self.u("j")?);
        ensure(i > j, || "need i > j".into())?;
        let (k0, _) = family_stage(self.params, 0)?;
        let (ki, ni) = family_stage(self.params, i)?;
        let (kj, nj) = family_stage(self.params, j)?;
        // Fractions as (numerator, positive denominator).
        let frac_pow = |e: i64| -> (BigInt, BigInt) {
            let x = ipow(p, e.unsigned_abs());
            if e >= 0 {
                (x, BigInt::one())
            } else {
                (BigInt::one(), x)
            }
        };
        let ge = |a: &(BigInt, BigInt), b: &(BigInt, BigInt)| &a.0 * &b.1 >= &b.0 * &a.1;
        let (ki, kj, k0) = (ki as i64, kj as i64, k0 as i64);
        let (dn, dd) = frac_pow(ki - kj);
        let level = (ceil_div(&((&ni - 1) * &dd), &dn) + 1, BigInt::one());
        let (an, ad) = frac_pow(ki - k0);
        let middle = (&an * &dd + &ad * &dn, &ad * &dn);
        let low = frac_pow(kj - k0);
        let nj = (nj, BigInt::one());
        let mut holds = Vec::new();
        if ki - kj == 1 && p != 2 {
            let (q, r) = (&ni.clone() - BigInt::from(2)).div_mod_floor(&BigInt::from(p));
            if r.is_zero() {
                holds.push(ge(&nj, &(q + 2, BigInt::one())));
            }
        }
        holds.push(ge(&nj, &level));
        holds.push(ge(&level, &middle));
        holds.push(!ge(&low, &middle));
        let first = holds.iter().position(|h| !h);
        let reported = self.witness["first_violated"].as_u64().map(|x| x as usize);
        ensure(reported == first, || format!("first violated link {reported:?}, expected {first:?}"))?;
        verdict_is(self.verdict, if first.is_none() { Verdict::Verified } else { Verdict::Refuted })
    }

    fn growth(&self) -> Check {
        let p = self.prime()?;
        let horizon = self.u("horizon")?;
        let (k0, _) = family_stage(self.params, 0)?;
        let mut first = None;
        let mut prev = None;
        for i in 0..=horizon {
            let (k, n) = family_stage(self.params, i)?;
            let increasing = prev.is_none_or(|pk| k > pk);
            let dominates = if k >= k0 { n > ipow(p, k - k0) } else { n * ipow(p, k0 - k) > BigInt::one() };
            if first.is_none() && !(increasing && dominates) {
                first = Some(i);
            }
            prev = Some(k);
        }
        let reported = self.witness["first_violation"]["i"].as_u64();
        ensure(reported == first, || format!("first violation {reported:?}, expected {first:?}"))?;
        verdict_is(self.verdict, if first.is_none() { Verdict::Verified } else { Verdict::Refuted })
    }

    fn cup_length(&self) -> Check {
        let p = self.prime()?;
        let (i, m, j) = (self.u("i")?, self.u("m")?, self.u("j")?);
        let (k0, _) = family_stage(self.params, 0)?;
        let (ki, _) = family_stage(self.params, i)?;
        let (kd, nd) = family_stage(self.params, i + j)?;
        ensure(j >= 1 && ki >= k0 && kd >= ki, || "stage order".into())?;
        ensure(BigInt::from(m) < ipow(p, ki - k0), || "m is not below p^(k_i - k_0)".into())?;
        let delta = kd - ki;
        let positive = BigInt::from(m) < ipow(p, ki) && BigInt::from(m) * ipow(p, delta) < nd;
        let n = nd.to_usize().ok_or("n_(i+j) too large")?;
        let element = shifted_power(p, delta, m, n);
        self.nonzero_witness(p, kd, n, &element, positive)
    }

    fn corollary(&self) -> Check {
        let p = self.prime()?;
        ensure(p != 2, || "corollary audit needs odd p".into())?;
        let (horizon, start) = (self.u("horizon")?, self.u("start_index")?);
        let pb = BigInt::from(p);
        let n_at = |i: u64| 3 * ipow(p, i) - (1..i).map(|s| ipow(p, s)).sum::<BigInt>() + 1;
        let stages = self.witness["stages"].as_array().ok_or("stages missing")?;
        let mut any_violation = false;
        let indices: Vec<u64> = (start..=horizon.max(start)).collect();
        ensure(stages.len() == indices.len(), || "stage count".into())?;
        for (st, &i) in stages.iter().zip(&indices) {
            let ni = n_at(i);
            let m: BigInt = n_at(i + 1) + 1;
            let congruent = m.mod_floor(&pb) == BigInt::from(2);
            let value = (&m - BigInt::from(2)).div_floor(&pb) + 2;
            let closed = 3 * ipow(p, i) - (1..i).map(|s| ipow(p, s)).sum::<BigInt>() - 1;
            ensure(int(&st["value"])? == value && int(&st["n_i"])? == ni, || format!("stage {i} values"))?;
            ensure(st["congruent"].as_bool() == Some(congruent), || format!("stage {i} congruence"))?;
            ensure(st["value_eq_n_i"].as_bool() == Some(value == ni), || format!("stage {i} equality flag"))?;
            ensure(st["value_eq_closed_form"].as_bool() == Some(value == closed), || {
                format!("stage {i} closed form flag")
            })?;
            any_violation |= !(congruent && value <= ni);
        }
        verdict_is(self.verdict, if any_violation { Verdict::Refuted } else { Verdict::Verified })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_and_ideal_helpers() {
        let m = vec![vec![BigInt::from(2), BigInt::from(1)], vec![BigInt::from(1), BigInt::from(1)]];
        assert_eq!(bareiss_det(m), BigInt::one());
        let d: Vec<BigInt> = [0, 4, 6].iter().map(|&x| BigInt::from(x)).collect();
        assert!(in_ideal(2, 2, &d));
        let d: Vec<BigInt> = [0, 2, 1].iter().map(|&x| BigInt::from(x)).collect();
        assert!(!in_ideal(2, 2, &d));
        assert_eq!(shifted_power(2, 1, 1, 3), vec![BigInt::zero(), BigInt::from(2), BigInt::one()]);
    }
}
