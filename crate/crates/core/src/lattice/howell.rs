use num_traits::Zero;

use crate::scalar::{inverse_mod, modulo, Scalar};

/// Howell normal form of a row span over `Z/N`.
///
/// Rows are in echelon form with pivots dividing `N`, entries above a pivot
/// reduced into `[0, pivot)`, and the Howell property holds: every span
/// element whose first `j` entries vanish is a combination of the rows
/// whose pivot column is at least `j`. Reduction of a vector against the
/// rows therefore decides span membership.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HowellForm<T> {
    pub modulus: T,
    pub ncols: usize,
    pub rows: Vec<Vec<T>>,
    pub pivots: Vec<usize>,
}

impl<T: Scalar> HowellForm<T> {
    /// Reduces `v` modulo `N` and against the span; the result is zero iff
    /// `v` lies in the span.
    pub fn reduce(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.ncols);
        let n = &self.modulus;
        let mut out: Vec<T> = v.iter().map(|x| modulo(x, n)).collect();
        for (row, &col) in self.rows.iter().zip(&self.pivots) {
            let q = out[col].div_floor(&row[col]);
            if q.is_zero() {
                continue;
            }
            for (o, r) in out.iter_mut().zip(row) {
                *o = modulo(&(o.clone() - q.clone() * r), n);
            }
        }
        out
    }

    pub fn contains(&self, v: &[T]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }
}

/// Unit `w` modulo `n` with `w * a == gcd(a, n) (mod n)`.
fn normalizing_unit<T: Scalar>(a: &T, n: &T) -> T {
    let g = a.gcd(n);
    let n_red = n.clone() / &g;
    let base = inverse_mod(&(a.clone() / &g), &n_red).expect("a/g is invertible mod n/g");
    let mut w = base;
    while !w.gcd(n).is_one() {
        w = w + &n_red;
    }
    modulo(&w, n)
}

/// Howell form of the rows of `gens` (each of length `ncols`) over `Z/modulus`.
pub fn howell_form<T: Scalar>(gens: &[Vec<T>], ncols: usize, modulus: &T) -> HowellForm<T> {
    assert!(*modulus > T::zero(), "modulus must be positive");
    let n = modulus;
    let reduce_row = |r: &mut Vec<T>| {
        for x in r.iter_mut() {
            *x = modulo(x, n);
        }
    };
    let mut a: Vec<Vec<T>> = gens
        .iter()
        .map(|g| {
            assert_eq!(g.len(), ncols);
            let mut r = g.clone();
            reduce_row(&mut r);
            r
        })
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for j in 0..ncols {
        if r >= a.len() {
            break;
        }
        for i in r + 1..a.len() {
            if a[i][j].is_zero() {
                continue;
            }
            let (x, y) = (a[r][j].clone(), a[i][j].clone());
            let e = x.extended_gcd(&y);
            let (s, t) = (e.x, e.y);
            let (u, v) = (-(y / &e.gcd), x / &e.gcd);
            let (top, bot): (Vec<T>, Vec<T>) = a[r]
                .iter()
                .zip(&a[i])
                .map(|(p, q)| {
                    (modulo(&(s.clone() * p + t.clone() * q), n), modulo(&(u.clone() * p + v.clone() * q), n))
                })
                .unzip();
            a[r] = top;
            a[i] = bot;
        }
        if a[r][j].is_zero() {
            continue;
        }
        let w = normalizing_unit(&a[r][j], n);
        if !w.is_one() {
            for x in a[r].iter_mut() {
                *x = modulo(&(x.clone() * &w), n);
            }
        }
        let piv = a[r][j].clone();
        for i in 0..r {
            let q = a[i][j].div_floor(&piv);
            if q.is_zero() {
                continue;
            }
            let (head, tail) = a.split_at_mut(r);
            for (x, p) in head[i].iter_mut().zip(&tail[0]) {
                *x = modulo(&(x.clone() - q.clone() * p), n);
            }
        }
        let ann = n.clone() / &piv;
        let mut extra: Vec<T> = a[r].iter().map(|x| modulo(&(x.clone() * &ann), n)).collect();
        if extra.iter().any(|x| !x.is_zero()) {
            reduce_row(&mut extra);
            a.push(extra);
        }
        pivots.push(j);
        r += 1;
    }
    a.truncate(r);
    HowellForm { modulus: n.clone(), ncols, rows: a, pivots }
}
