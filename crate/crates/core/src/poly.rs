//! Sparse univariate polynomials with exact integer coefficients.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{from_u64, Scalar};

/// A polynomial stored as exponent -> nonzero coefficient, ascending by exponent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparsePoly<T> {
    terms: BTreeMap<u64, T>,
}

impl<T: Scalar> Default for SparsePoly<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Scalar> SparsePoly<T> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::monomial(c, 0)
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::monomial(T::one(), 1)
    }

    pub fn monomial(c: T, exp: u64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Self { terms }
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs; repeated
    /// exponents are summed.
    pub fn from_terms<I: IntoIterator<Item = (u64, T)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Dense constructor, `coeffs[i]` is the coefficient of `x^i`.
    pub fn from_dense(coeffs: &[T]) -> Self {
        Self::from_terms(coeffs.iter().cloned().enumerate().map(|(i, c)| (i as u64, c)))
    }

    /// Dense coefficient vector of length `len`, dropping terms of degree `>= len`.
    pub fn to_dense(&self, len: usize) -> Vec<T> {
        let mut out = vec![T::zero(); len];
        for (&e, c) in self.terms.range(..len as u64) {
            out[e as usize] = c.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u64> {
        self.terms.keys().next_back().copied()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exp: u64) -> T {
        self.terms.get(&exp).cloned().unwrap_or_else(T::zero)
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (u64, &T)> + '_ {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    fn add_term(&mut self, exp: u64, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&e, c) in &other.terms {
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(&e, c)| (e, -c.clone())).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::from_terms(self.terms.iter().map(|(&e, a)| (e, a.clone() * c)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&ea, ca) in &self.terms {
            for (&eb, cb) in &other.terms {
                let e = ea.checked_add(eb).expect("exponent overflow");
                out.add_term(e, ca.clone() * cb);
            }
        }
        out
    }

    /// `self^e` by repeated squaring; `pow(0)` is `1`.
    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one();
        let mut sq = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        acc
    }

    /// Drops every term of degree `>= n`.
    pub fn truncate(&self, n: u64) -> Self {
        Self { terms: self.terms.range(..n).map(|(&e, c)| (e, c.clone())).collect() }
    }

    /// Product modulo `x^n`.
    pub fn mul_trunc(&self, other: &Self, n: u64) -> Self {
        let mut out = Self::zero();
        for (&ea, ca) in self.terms.range(..n) {
            for (&eb, cb) in other.terms.range(..n - ea) {
                out.add_term(ea + eb, ca.clone() * cb);
            }
        }
        out
    }

    /// `self^e` modulo `x^n`.
    pub fn pow_trunc(&self, mut e: u64, n: u64) -> Self {
        let mut acc = Self::one().truncate(n);
        let mut sq = self.truncate(n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_trunc(&sq, n);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul_trunc(&sq, n);
            }
        }
        acc
    }

    /// The substitution `x -> x^t`.
    pub fn substitute_power(&self, t: u64) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidArgument("substitute_power needs t >= 1".into()));
        }
        Ok(Self {
            terms: self.terms.iter().map(|(&e, c)| (e.checked_mul(t).expect("exponent overflow"), c.clone())).collect(),
        })
    }

    /// Taylor shift `a(x + c)`, truncated to degrees `< limit` when given.
    pub fn taylor_shift(&self, c: &T, limit: Option<u64>) -> Self {
        let mut out = Self::zero();
        if limit == Some(0) {
            return out;
        }
        for (&d, coeff) in &self.terms {
            let top = match limit {
                Some(n) => d.min(n - 1),
                None => d,
            };
            let mut binom = T::one();
            let cpow = powers_desc(c, d, top);
            for j in 0..=top {
                out.add_term(j, coeff.clone() * &binom * &cpow[j as usize]);
                binom = binom * from_u64::<T>(d - j) / from_u64::<T>(j + 1);
            }
        }
        out
    }

    /// `a(y + 1)`: rewrites a polynomial in `x` in the variable `y = x - 1`.
    pub fn shift_to_y(&self) -> Self {
        self.taylor_shift(&T::one(), None)
    }

    /// `a(y + 1) mod y^n`, without materialising the dense high-degree part.
    pub fn shift_to_y_trunc(&self, n: u64) -> Self {
        self.taylor_shift(&T::one(), Some(n))
    }

    /// `a(x - 1)`: inverse of [`SparsePoly::shift_to_y`].
    pub fn shift_from_y(&self) -> Self {
        self.taylor_shift(&-T::one(), None)
    }

    /// Renders as `c0 + c1*v^1 + ...` in ascending exponent order.
    pub fn display_in(&self, var: &str) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(&e, c)| if e == 0 { c.to_string() } else { format!("{c}*{var}^{e}") })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// `c^(d-j)` for `j = 0..=top`.
fn powers_desc<T: Scalar>(c: &T, d: u64, top: u64) -> Vec<T> {
    if c.is_one() {
        return vec![T::one(); top as usize + 1];
    }
    if *c == -T::one() {
        return (0..=top).map(|j| if (d - j).is_multiple_of(2) { T::one() } else { -T::one() }).collect();
    }
    (0..=top).map(|j| crate::scalar::pow(c, d - j)).collect()
}

impl<T: Scalar> fmt::Display for SparsePoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("x"))
    }
}

/// Exact `C(n, j)`; zero when `j > n`.
pub fn binomial<T: Scalar>(n: u64, j: u64) -> T {
    if j > n {
        return T::zero();
    }
    let j = j.min(n - j);
    let mut acc = T::one();
    for i in 0..j {
        acc = acc * from_u64::<T>(n - i) / from_u64::<T>(i + 1);
    }
    acc
}

/// Row `C(n, 0), ..., C(n, len - 1)`.
pub fn binomial_row<T: Scalar>(n: u64, len: usize) -> Vec<T> {
    let mut row = Vec::with_capacity(len);
    let mut acc = T::one();
    for j in 0..len as u64 {
        if j > n {
            row.push(T::zero());
            continue;
        }
        row.push(acc.clone());
        acc = acc * from_u64::<T>(n - j) / from_u64::<T>(j + 1);
    }
    row
}
