use num_traits::Zero;

use super::matrix::{sub_scaled, Matrix};
use crate::scalar::Scalar;

/// Row-style Hermite normal form: upper echelon, positive pivots, entries
/// above each pivot reduced into `[0, pivot)`. Zero rows are dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hnf<T> {
    pub basis: Matrix<T>,
    /// Pivot column of each basis row, strictly increasing.
    pub pivots: Vec<usize>,
}

impl<T: Scalar> Hnf<T> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_value(&self, i: usize) -> &T {
        self.basis.get(i, self.pivots[i])
    }

    /// Product of the pivots; the covolume when the lattice has full rank.
    pub fn determinant(&self) -> T {
        (0..self.rank()).fold(T::one(), |acc, i| acc * self.pivot_value(i))
    }

    /// Canonical coset representative of `v` modulo the lattice.
    pub fn reduce(&self, v: &[T]) -> Vec<T> {
        self.reduce_with_quotients(v).0
    }

    /// Like [`Hnf::reduce`], also returning the multipliers `q` with
    /// `v = sum q_i * basis_i + residue`.
    pub fn reduce_with_quotients(&self, v: &[T]) -> (Vec<T>, Vec<T>) {
        assert_eq!(v.len(), self.basis.ncols());
        let mut out = v.to_vec();
        let mut qs = Vec::with_capacity(self.rank());
        for (i, &col) in self.pivots.iter().enumerate() {
            let q = out[col].div_floor(self.pivot_value(i));
            sub_scaled(&mut out, self.basis.row(i), &q);
            qs.push(q);
        }
        (out, qs)
    }

    pub fn contains(&self, v: &[T]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }
}

/// Hermite normal form of the row lattice of `m`.
///
/// Pivoting is deterministic: within a column the row with the smallest
/// nonzero magnitude (first on ties) becomes the pivot and the others are
/// reduced against it until the column is clear.
pub fn hermite_normal_form<T: Scalar>(m: &Matrix<T>) -> Hnf<T> {
    let ncols = m.ncols();
    let mut a: Vec<Vec<T>> = m.rows().to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for j in 0..ncols {
        if r == a.len() {
            break;
        }
        loop {
            let best = (r..a.len()).filter(|&i| !a[i][j].is_zero()).min_by(|&x, &y| a[x][j].abs().cmp(&a[y][j].abs()));
            let Some(best) = best else { break };
            a.swap(r, best);
            let mut clear = true;
            for i in r + 1..a.len() {
                if a[i][j].is_zero() {
                    continue;
                }
                let q = a[i][j].clone() / a[r][j].clone();
                let (head, tail) = a.split_at_mut(i);
                sub_scaled(&mut tail[0], &head[r], &q);
                if !a[i][j].is_zero() {
                    clear = false;
                }
            }
            if clear {
                break;
            }
        }
        if a[r][j].is_zero() {
            continue;
        }
        if a[r][j].is_negative() {
            for x in a[r].iter_mut() {
                *x = -x.clone();
            }
        }
        pivots.push(j);
        r += 1;
    }
    a.truncate(r);
    // Bottom-up so that each row is reduced against already-reduced rows.
    for row in (0..r).rev() {
        for i in row + 1..r {
            let col = pivots[i];
            let q = a[row][col].div_floor(&a[i][col]);
            let (head, tail) = a.split_at_mut(i);
            sub_scaled(&mut head[row], &tail[0], &q);
        }
    }
    Hnf { basis: Matrix::from_rows(a, ncols), pivots }
}
