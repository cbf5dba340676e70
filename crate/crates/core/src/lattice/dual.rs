use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use crate::scalar::Scalar;

/// An integer linear form `v -> weights . v` together with a modulus.
///
/// It separates a vector from a lattice when it is `0 (mod modulus)` on
/// every lattice generator but not on the vector. `modulus == 0` means
/// exact equality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Functional<T> {
    pub weights: Vec<T>,
    pub modulus: T,
}

impl<T: Scalar> Functional<T> {
    pub fn eval(&self, v: &[T]) -> T {
        let s = self.weights.iter().zip(v).fold(T::zero(), |acc, (w, x)| acc + w.clone() * x);
        if self.modulus.is_zero() {
            s
        } else {
            s.mod_floor(&self.modulus)
        }
    }

    /// Prepends `count` zero weights.
    pub fn pad_front(mut self, count: usize) -> Self {
        let mut w = vec![T::zero(); count];
        w.append(&mut self.weights);
        self.weights = w;
        self
    }
}

/// Solves `c * basis = v` for an invertible upper-triangular `basis`.
pub fn solve_upper_left<T: Scalar>(basis: &Matrix<T>, v: &[T]) -> Vec<Ratio<T>> {
    let n = basis.nrows();
    assert_eq!(basis.ncols(), n);
    assert_eq!(v.len(), n);
    let mut c: Vec<Ratio<T>> = Vec::with_capacity(n);
    for (j, vj) in v.iter().enumerate() {
        let mut acc = Ratio::from_integer(vj.clone());
        for (i, ci) in c.iter().enumerate() {
            let b = basis.get(i, j);
            if !b.is_zero() {
                acc = acc - ci.clone() * Ratio::from_integer(b.clone());
            }
        }
        c.push(acc / Ratio::from_integer(basis.get(j, j).clone()));
    }
    c
}

/// For a full-rank upper-triangular basis `B` and a vector `v` outside its
/// row lattice, returns the functional `D * (v B^-1)_e` for the first
/// coordinate `e` where `v B^-1` is not integral, with `D` the least common
/// denominator of column `e` of `B^-1`. Returns `None` when `v` is in the
/// lattice.
pub fn separating_functional<T: Scalar>(basis: &Matrix<T>, v: &[T]) -> Option<Functional<T>> {
    let c = solve_upper_left(basis, v);
    let e = c.iter().position(|x| !x.is_integer())?;
    let n = basis.nrows();
    // Column e of B^-1 by back substitution; entries below e vanish.
    let mut w: Vec<Ratio<T>> = vec![Ratio::zero(); n];
    w[e] = Ratio::one() / Ratio::from_integer(basis.get(e, e).clone());
    for i in (0..e).rev() {
        let mut acc = Ratio::zero();
        for (l, wl) in w.iter().enumerate().take(e + 1).skip(i + 1) {
            let b = basis.get(i, l);
            if !b.is_zero() {
                acc = acc + Ratio::from_integer(b.clone()) * wl.clone();
            }
        }
        w[i] = -acc / Ratio::from_integer(basis.get(i, i).clone());
    }
    let denom = w.iter().fold(T::one(), |acc, x| acc.lcm(x.denom()));
    let weights = w.iter().map(|x| x.numer().clone() * (denom.clone() / x.denom().clone())).collect();
    Some(Functional { weights, modulus: denom })
}
