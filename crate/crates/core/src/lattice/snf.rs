use super::matrix::{sub_scaled, Matrix};
use crate::scalar::Scalar;

/// Smith normal form `left * input * right = diagonal` with unimodular
/// `left` and `right`.
#[derive(Clone, Debug)]
pub struct Snf<T> {
    pub diagonal: Matrix<T>,
    pub left: Matrix<T>,
    pub right: Matrix<T>,
}

impl<T: Scalar> Snf<T> {
    /// Nonzero diagonal entries `d1 | d2 | ...`.
    pub fn invariant_factors(&self) -> Vec<T> {
        let n = self.diagonal.nrows().min(self.diagonal.ncols());
        (0..n).map(|i| self.diagonal.get(i, i).clone()).take_while(|d| !d.is_zero()).collect()
    }
}

fn swap_cols<T>(rows: &mut [Vec<T>], a: usize, b: usize) {
    for r in rows {
        r.swap(a, b);
    }
}

fn col_sub_scaled<T: Scalar>(rows: &mut [Vec<T>], target: usize, src: usize, q: &T) {
    for r in rows {
        if !r[src].is_zero() {
            r[target] = r[target].clone() - q.clone() * &r[src];
        }
    }
}

fn row_sub<T: Scalar>(rows: &mut [Vec<T>], target: usize, src: usize, q: &T) {
    let (lo, hi) = (target.min(src), target.max(src));
    let (head, tail) = rows.split_at_mut(hi);
    if target < src {
        sub_scaled(&mut head[lo], &tail[0], q);
    } else {
        sub_scaled(&mut tail[0], &head[lo], q);
    }
}

pub fn smith_normal_form<T: Scalar>(m: &Matrix<T>) -> Snf<T> {
    let (nr, nc) = (m.nrows(), m.ncols());
    let mut a = m.rows().to_vec();
    let mut left = Matrix::identity(nr).into_rows();
    let mut right = Matrix::identity(nc).into_rows();

    for t in 0..nr.min(nc) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..nr {
                for j in t..nc {
                    if a[i][j].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return finish(a, left, right, nc);
            };
            a.swap(t, bi);
            left.swap(t, bi);
            swap_cols(&mut a, t, bj);
            swap_cols(&mut right, t, bj);

            let mut dirty = false;
            for i in t + 1..nr {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].clone() / a[t][t].clone();
                row_sub(&mut a, i, t, &q);
                row_sub(&mut left, i, t, &q);
                dirty |= !a[i][t].is_zero();
            }
            for j in t + 1..nc {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].clone() / a[t][t].clone();
                col_sub_scaled(&mut a, j, t, &q);
                col_sub_scaled(&mut right, j, t, &q);
                dirty |= !a[t][j].is_zero();
            }
            if dirty {
                continue;
            }
            // Divisibility: fold an offending row into row t and go again.
            let offender = (t + 1..nr).find(|&i| (t + 1..nc).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match offender {
                Some(i) => {
                    let minus_one = -T::one();
                    row_sub(&mut a, t, i, &minus_one);
                    row_sub(&mut left, t, i, &minus_one);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -x.clone();
            }
            for x in left[t].iter_mut() {
                *x = -x.clone();
            }
        }
    }
    finish(a, left, right, nc)
}

fn finish<T: Scalar>(a: Vec<Vec<T>>, left: Vec<Vec<T>>, right: Vec<Vec<T>>, nc: usize) -> Snf<T> {
    let nr = a.len();
    Snf { diagonal: Matrix::from_rows(a, nc), left: Matrix::from_rows(left, nr), right: Matrix::from_rows(right, nc) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(rows: &[&[i64]], expected: &[i64]) {
        let m = Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect(), rows[0].len());
        let s = smith_normal_form(&m);
        assert_eq!(s.invariant_factors(), expected);
        assert_eq!(s.left.mul(&m).mul(&s.right), s.diagonal);
    }

    #[test]
    fn small_cases() {
        check(&[&[4, 6], &[0, 4]], &[2, 8]);
        check(&[&[3, 3], &[0, 3]], &[3, 3]);
        check(&[&[2]], &[2]);
        check(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]], &[2, 6, 12]);
        check(&[&[0, 0], &[0, 0]], &[]);
        check(&[&[6, 4]], &[2]);
    }
}
