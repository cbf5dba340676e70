//! Binomial coefficients modulo prime powers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::scalar::{inverse_mod, pow, valuation};

/// `C(top, j) mod p^t` for `j = 0..len`, without forming the exact
/// coefficients. The p-part of each factor is tracked as a valuation and
/// the unit part as a residue.
pub fn binomial_row_mod(top: &BigInt, len: usize, p: u64, t: u32) -> Vec<BigInt> {
    let pb = BigInt::from(p);
    let modulus = pow(&pb, t as u64);
    let mut out = Vec::with_capacity(len);
    let mut unit = BigInt::one();
    let mut val: i64 = 0;
    for j in 0..len {
        let jb = BigInt::from(j);
        if jb > *top {
            out.push(BigInt::zero());
            continue;
        }
        out.push(if val >= t as i64 {
            BigInt::zero()
        } else {
            (unit.clone() * pow(&pb, val as u64)).mod_floor(&modulus)
        });
        // C(top, j+1) = C(top, j) * (top - j) / (j + 1)
        let num = top - &jb;
        let den = jb + 1;
        if num.is_zero() {
            continue;
        }
        let vn = valuation(&num, &pb);
        let vd = valuation(&den, &pb);
        val += vn as i64 - vd as i64;
        let un = (num / pow(&pb, vn)).mod_floor(&modulus);
        let ud = (den / pow(&pb, vd)).mod_floor(&modulus);
        let inv = inverse_mod(&ud, &modulus).expect("unit part is invertible");
        unit = (unit * un * inv).mod_floor(&modulus);
    }
    out
}
