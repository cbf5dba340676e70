//! The ring `K^0(L^n(p^k))` in the basis `1, y, ..., y^(n-1)` with `y = eta - 1`.
//!
//! Relations: `y^n = 0` and `f(y) = (y + 1)^(p^k) - 1 = 0`. After truncation
//! the ideal `<f>` in `Z[y]/y^n` is the integer span of `y^i * f` for
//! `0 <= i <= n - 2`; it sits inside the coordinates `y^1 .. y^(n-1)`, is
//! triangular there with diagonal `p^k`, and has covolume `p^(k(n-1))`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    hermite_normal_form, separating_functional, smith_normal_form, solve_upper_left, Functional, Hnf, Matrix, Snf,
};
use crate::padic::binomial_row_mod;
use crate::poly::SparsePoly;
use crate::scalar::{is_prime_u64, pow};

/// Default size cap for exact rings, in bits.
pub const DEFAULT_BUDGET_BITS: u64 = 1 << 20;

/// The triple `(p, k, n)` naming `L^n(p^k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LensParams {
    pub p: u64,
    pub k: u32,
    pub n: usize,
}

impl LensParams {
    pub fn new(p: u64, k: u32, n: usize) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::InvalidArgument("k must be positive".into()));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        Ok(Self { p, k, n })
    }

    /// `p^k`, the order of the fundamental group.
    pub fn order(&self) -> BigInt {
        pow(&BigInt::from(self.p), self.k as u64)
    }

    /// `p^t`.
    pub fn prime_power(&self, t: u32) -> BigInt {
        pow(&BigInt::from(self.p), t as u64)
    }

    /// Bits needed to hold the relation coefficients exactly: `n` times the
    /// largest bit length among `C(p^k, j)`, `j < n`. Stops early, returning
    /// a lower bound, once `limit` is exceeded.
    pub fn required_bits(&self, limit: u64) -> u64 {
        let top = self.order();
        let mut acc = BigInt::one();
        let mut widest = 1u64;
        for j in 0..self.n as u64 {
            let jb = BigInt::from(j);
            if jb > top {
                break;
            }
            widest = widest.max(acc.bits());
            if widest.saturating_mul(self.n as u64) > limit {
                break;
            }
            acc = acc * (&top - &jb) / (jb + 1);
        }
        widest.saturating_mul(self.n as u64)
    }

    /// Ideal generators `y^i f mod y^n` reduced modulo `p^t`, in coordinates
    /// `y^0 .. y^(n-1)`. Works without forming the exact binomials.
    pub fn generators_mod(&self, t: u32) -> Vec<Vec<BigInt>> {
        let n = self.n;
        let row = binomial_row_mod(&self.order(), n, self.p, t);
        (0..n.saturating_sub(1))
            .map(|i| {
                let mut g = vec![BigInt::zero(); n];
                g[i + 1..n].clone_from_slice(&row[1..n - i]);
                g
            })
            .collect()
    }
}

impl fmt::Display for LensParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L^{}({}^{})", self.n, self.p, self.k)
    }
}

/// The ideal `<f>` as a lattice in the coordinates `y^1 .. y^(n-1)`.
#[derive(Clone, Debug)]
pub struct IdealLattice {
    /// Row `i` is `y^i f mod y^n`.
    pub gens: Matrix<BigInt>,
    pub hnf: Hnf<BigInt>,
    pub det: BigInt,
}

#[derive(Debug)]
pub struct LensRing {
    params: LensParams,
    relation: SparsePoly<BigInt>,
    lattice: IdealLattice,
}

/// Builds `K^0(L^n(p^k))` with the default size budget.
pub fn make_ring(p: u64, k: u32, n: usize) -> Result<Arc<LensRing>> {
    LensRing::new(LensParams::new(p, k, n)?, DEFAULT_BUDGET_BITS)
}

impl LensRing {
    pub fn new(params: LensParams, budget_bits: u64) -> Result<Arc<Self>> {
        let required = params.required_bits(budget_bits);
        if required > budget_bits {
            return Err(Error::BudgetExceeded { required, allowed: budget_bits });
        }
        let n = params.n;
        let order = params.order().to_u64_checked()?;
        let relation = SparsePoly::from_terms([(order, BigInt::one()), (0, -BigInt::one())]).shift_to_y_trunc(n as u64);
        let dense = relation.to_dense(n);
        let dim = n - 1;
        let rows: Vec<Vec<BigInt>> = (0..dim)
            .map(|i| {
                let mut r = vec![BigInt::zero(); dim];
                for j in 1..n - i {
                    r[i + j - 1] = dense[j].clone();
                }
                r
            })
            .collect();
        let gens = Matrix::from_rows(rows, dim);
        let hnf = hermite_normal_form(&gens);
        let det = hnf.determinant();
        Ok(Arc::new(Self { params, relation, lattice: IdealLattice { gens, hnf, det } }))
    }

    pub fn params(&self) -> LensParams {
        self.params
    }

    pub fn p(&self) -> u64 {
        self.params.p
    }

    pub fn k(&self) -> u32 {
        self.params.k
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    /// `f(y) = (y + 1)^(p^k) - 1 mod y^n`.
    pub fn relation(&self) -> &SparsePoly<BigInt> {
        &self.relation
    }

    pub fn lattice(&self) -> &IdealLattice {
        &self.lattice
    }

    pub fn zero(self: &Arc<Self>) -> RingElement {
        RingElement { ring: self.clone(), coeffs: vec![BigInt::zero(); self.n()] }
    }

    pub fn one(self: &Arc<Self>) -> RingElement {
        self.element(vec![BigInt::one()])
    }

    pub fn generator(self: &Arc<Self>, which: Generator) -> RingElement {
        match which {
            Generator::Eta => self.element(vec![BigInt::one(), BigInt::one()]),
            Generator::Sigma => self.element(vec![BigInt::zero(), BigInt::one()]),
        }
    }

    /// Element with the given `y`-coefficients; entries past `y^(n-1)` are
    /// dropped since `y^n = 0`. The coefficients are stored as given.
    pub fn element(self: &Arc<Self>, mut coeffs: Vec<BigInt>) -> RingElement {
        coeffs.resize(self.n(), BigInt::zero());
        RingElement { ring: self.clone(), coeffs }
    }

    pub fn from_y_poly(self: &Arc<Self>, a: &SparsePoly<BigInt>) -> RingElement {
        self.element(a.to_dense(self.n()))
    }

    pub fn from_x_poly(self: &Arc<Self>, a: &SparsePoly<BigInt>) -> RingElement {
        self.from_y_poly(&a.shift_to_y_trunc(self.n() as u64))
    }

    /// Canonical representative of `coeffs` modulo the ideal.
    pub fn normal_form_coeffs(&self, coeffs: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(coeffs.len(), self.n());
        let mut out = vec![coeffs[0].clone()];
        out.extend(self.lattice.hnf.reduce(&coeffs[1..]));
        out
    }

    /// Integer weights `c` with `coeffs = sum c_i y^i f`, if the element is in
    /// the ideal.
    pub fn ideal_combination(&self, coeffs: &[BigInt]) -> Option<Vec<BigInt>> {
        if !coeffs[0].is_zero() {
            return None;
        }
        let c = solve_upper_left(&self.lattice.gens, &coeffs[1..]);
        c.iter().all(|x| x.is_integer()).then(|| c.into_iter().map(|x| x.to_integer()).collect())
    }

    /// A functional in coordinates `y^0 .. y^(n-1)` vanishing on the ideal
    /// but not on `coeffs`, if `coeffs` is outside the ideal.
    pub fn separating_functional(&self, coeffs: &[BigInt]) -> Option<Functional<BigInt>> {
        if !coeffs[0].is_zero() {
            let mut weights = vec![BigInt::zero(); self.n()];
            weights[0] = BigInt::one();
            return Some(Functional { weights, modulus: BigInt::zero() });
        }
        separating_functional(&self.lattice.gens, &coeffs[1..]).map(|f| f.pad_front(1))
    }

    pub fn smith(&self) -> Snf<BigInt> {
        smith_normal_form(&self.lattice.gens)
    }

    /// Invariant factors of the reduced group `Z^(n-1) / lattice`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.smith().invariant_factors()
    }

    /// Whether `eta -> eta^(p^(dst.k - src.k))` respects `y^(src.n) = 0`,
    /// i.e. defines a ring map `src -> dst`.
    pub fn pullback_is_well_defined(src: &Arc<Self>, dst: &Arc<Self>) -> Result<bool> {
        check_pullback(src, dst)?;
        let image = pullback_poly(src, dst, &SparsePoly::monomial(BigInt::one(), src.n() as u64))?;
        Ok(dst.from_y_poly(&image).is_zero())
    }
}

fn check_pullback(src: &LensRing, dst: &LensRing) -> Result<()> {
    if src.p() != dst.p() {
        return Err(Error::PrimeMismatch(src.p(), dst.p()));
    }
    if dst.k() < src.k() {
        return Err(Error::PullbackDirection { src: src.k() as u64, dst: dst.k() as u64 });
    }
    Ok(())
}

/// Image of a `y`-polynomial of `src` in `dst`, truncated to `y^(dst.n)`.
fn pullback_poly(src: &LensRing, dst: &LensRing, a: &SparsePoly<BigInt>) -> Result<SparsePoly<BigInt>> {
    let t = pow(&BigInt::from(src.p()), (dst.k() - src.k()) as u64).to_u64_checked()?;
    Ok(a.shift_from_y().substitute_power(t)?.shift_to_y_trunc(dst.n() as u64))
}

/// The map induced by `Z/p^(dst.k) -> Z/p^(src.k)`, `eta_src -> eta_dst^(p^(dst.k - src.k))`.
///
/// The input is first brought to normal form, so the result depends only on
/// the coset of `a`. It is a ring homomorphism exactly when
/// [`LensRing::pullback_is_well_defined`] holds.
pub fn pullback(src: &Arc<LensRing>, dst: &Arc<LensRing>, a: &RingElement) -> Result<RingElement> {
    check_pullback(src, dst)?;
    a.expect_ring(src)?;
    let nf = SparsePoly::from_dense(&a.normal_form().coeffs);
    let image = pullback_poly(src, dst, &nf)?;
    Ok(dst.from_y_poly(&image).normal_form())
}

trait ToU64Checked {
    fn to_u64_checked(&self) -> Result<u64>;
}

impl ToU64Checked for BigInt {
    fn to_u64_checked(&self) -> Result<u64> {
        num_traits::ToPrimitive::to_u64(self).ok_or_else(|| Error::TooLarge(self.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    /// The line bundle `eta`, i.e. `1 + y`.
    Eta,
    /// `eta - 1 = y`.
    Sigma,
}

impl FromStr for Generator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eta" => Ok(Self::Eta),
            "sigma" => Ok(Self::Sigma),
            _ => Err(Error::InvalidArgument(format!("unknown generator {s:?}"))),
        }
    }
}

/// Coset representative in `K^0(L^n(p^k))`: `coeffs[i]` multiplies `y^i`.
#[derive(Clone, Debug)]
pub struct RingElement {
    ring: Arc<LensRing>,
    coeffs: Vec<BigInt>,
}

impl PartialEq for RingElement {
    /// Equality in the ring, i.e. of normal forms.
    fn eq(&self, other: &Self) -> bool {
        self.ring.params == other.ring.params
            && self.ring.normal_form_coeffs(&self.coeffs) == self.ring.normal_form_coeffs(&other.coeffs)
    }
}

impl Eq for RingElement {}

impl RingElement {
    pub fn ring(&self) -> &Arc<LensRing> {
        &self.ring
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    fn expect_ring(&self, ring: &LensRing) -> Result<()> {
        if self.ring.params != ring.params {
            return Err(Error::RingMismatch(self.ring.params.to_string(), ring.params.to_string()));
        }
        Ok(())
    }

    fn with(&self, coeffs: Vec<BigInt>) -> Self {
        Self { ring: self.ring.clone(), coeffs }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        other.expect_ring(&self.ring)?;
        Ok(self.with(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect()).normal_form())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        other.expect_ring(&self.ring)?;
        Ok(self.with(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect()).normal_form())
    }

    pub fn neg(&self) -> Self {
        self.with(self.coeffs.iter().map(|a| -a).collect()).normal_form()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        self.with(self.coeffs.iter().map(|a| a * c).collect()).normal_form()
    }

    /// Truncated product, reduced to normal form.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        other.expect_ring(&self.ring)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.coeffs.len();
        let mut out = vec![BigInt::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        self.with(out).normal_form()
    }

    /// `self^m`; `self^0` is `1`.
    pub fn pow(&self, mut m: u64) -> Self {
        let mut acc = self.ring.one();
        let mut sq = self.normal_form();
        while m > 0 {
            if m & 1 == 1 {
                acc = acc.mul_unchecked(&sq);
            }
            m >>= 1;
            if m > 0 {
                sq = sq.mul_unchecked(&sq);
            }
        }
        acc
    }

    pub fn pow_big(&self, m: &BigInt) -> Result<Self> {
        if m.is_negative() {
            return Err(Error::InvalidArgument("negative exponent".into()));
        }
        let mut acc = self.ring.one();
        let mut sq = self.normal_form();
        let bits = m.bits();
        for i in 0..bits {
            if m.bit(i) {
                acc = acc.mul_unchecked(&sq);
            }
            if i + 1 < bits {
                sq = sq.mul_unchecked(&sq);
            }
        }
        Ok(acc)
    }

    pub fn normal_form(&self) -> Self {
        self.with(self.ring.normal_form_coeffs(&self.coeffs))
    }

    pub fn is_zero(&self) -> bool {
        self.ring.normal_form_coeffs(&self.coeffs).iter().all(Zero::is_zero)
    }

    /// In the reduced K-theory, the ideal generated by `y`.
    pub fn is_reduced(&self) -> bool {
        self.coeffs[0].is_zero()
    }

    pub fn to_y_poly(&self) -> SparsePoly<BigInt> {
        SparsePoly::from_dense(&self.coeffs)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}
