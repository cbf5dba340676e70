//! Scalar abstraction shared by the polynomial and lattice routines.
//!
//! Everything in this crate is exact integer arithmetic. The generic code is
//! written against [`Scalar`], which is satisfied by the signed primitive
//! integers and by [`num_bigint::BigInt`]. The K-theory layer always uses
//! `BigInt`; the fixed-width instantiations exist for cheap cross-checks.

use std::fmt::{Debug, Display};

use num_integer::Integer;
use num_traits::{FromPrimitive, NumRef, Signed, ToPrimitive};

/// An exact, signed Euclidean integer type.
pub trait Scalar: Integer + Signed + NumRef + Clone + Debug + Display + FromPrimitive + ToPrimitive {}
impl<T> Scalar for T where T: Integer + Signed + NumRef + Clone + Debug + Display + FromPrimitive + ToPrimitive {}

pub fn from_u64<T: Scalar>(v: u64) -> T {
    T::from_u64(v).expect("value does not fit the scalar type")
}

/// `base^exp` by repeated squaring.
pub fn pow<T: Scalar>(base: &T, mut exp: u64) -> T {
    let mut acc = T::one();
    let mut sq = base.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * &sq;
        }
        exp >>= 1;
        if exp > 0 {
            sq = sq.clone() * &sq;
        }
    }
    acc
}

/// Ceiling of `a / b` for `b > 0`.
pub fn ceil_div<T: Scalar>(a: &T, b: &T) -> T {
    debug_assert!(b.is_positive());
    a.div_ceil(b)
}

/// Least non-negative residue of `a` modulo `m > 0`.
pub fn modulo<T: Scalar>(a: &T, m: &T) -> T {
    a.mod_floor(m)
}

/// Exact p-adic valuation of a nonzero integer.
pub fn valuation<T: Scalar>(a: &T, p: &T) -> u64 {
    assert!(!a.is_zero(), "valuation of zero");
    let mut v = 0;
    let mut x = a.abs();
    loop {
        let (q, r) = x.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inverse_mod<T: Scalar>(a: &T, m: &T) -> Option<T> {
    let a = modulo(a, m);
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(modulo(&e.x, m))
    } else if m.is_one() {
        Some(T::zero())
    } else {
        None
    }
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powm = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        r
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powm(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
