use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

/// U·A·V = D with U, V unimodular and D diagonal, d_1 | d_2 | ... and trailing zeros.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    /// Number of nonzero diagonal entries.
    pub rank: usize,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d.get(i, i).clone()).collect()
    }
}

struct Work {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
        self.v_inv.swap_rows(i, j);
    }

    /// row[dst] += q row[src]
    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        self.a.add_row(dst, src, q);
        self.u.add_row(dst, src, q);
        self.u_inv.add_col(src, dst, &-q);
    }

    /// col[dst] += q col[src]
    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        self.a.add_col(dst, src, q);
        self.v.add_col(dst, src, q);
        self.v_inv.add_row(src, dst, &-q);
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.u.negate_row(i);
        let n = self.u_inv.rows();
        for r in 0..n {
            let v = -self.u_inv.get(r, i);
            self.u_inv.set(r, i, v);
        }
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> Snf {
    let (m, n) = (a.rows(), a.cols());
    let mut w = Work {
        a: a.clone(),
        u: IntMatrix::identity(m),
        u_inv: IntMatrix::identity(m),
        v: IntMatrix::identity(n),
        v_inv: IntMatrix::identity(n),
    };
    let mut t = 0;
    while t < m.min(n) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                let x = w.a.get(i, j);
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < w.a.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let p = w.a.get(t, t).clone();
            for i in t + 1..m {
                let q = w.a.get(i, t) / &p;
                w.add_row(i, t, &-q);
            }
            for j in t + 1..n {
                let q = w.a.get(t, j) / &p;
                w.add_col(j, t, &-q);
            }
            // a remainder smaller than the pivot becomes the new pivot
            let mut smaller: Option<(usize, usize)> = None;
            for i in t + 1..m {
                if !w.a.get(i, t).is_zero() {
                    smaller = Some((i, t));
                }
            }
            for j in t + 1..n {
                if !w.a.get(t, j).is_zero() {
                    smaller = Some((t, j));
                }
            }
            if let Some((i, j)) = smaller {
                if i != t {
                    w.swap_rows(t, i);
                } else {
                    w.swap_cols(t, j);
                }
                continue;
            }
            let bad = (t + 1..m).flat_map(|i| (t + 1..n).map(move |j| (i, j))).find(|&(i, j)| !w.a.get(i, j).is_multiple_of(&p));
            match bad {
                Some((i, _)) => w.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if w.a.get(t, t).is_negative() {
            w.negate_row(t);
        }
        t += 1;
    }
    let rank = (0..m.min(n)).filter(|&i| !w.a.get(i, i).is_zero()).count();
    Snf { u: w.u, u_inv: w.u_inv, d: w.a, v: w.v, v_inv: w.v_inv, rank }
}

/// Rows spanning {x : x·A = 0}.
pub fn left_kernel(a: &IntMatrix) -> IntMatrix {
    let s = smith_normal_form(a);
    let idx: Vec<usize> = (s.rank..a.rows()).collect();
    s.u.select_rows(&idx)
}

/// Some integer x with x·A = y, if one exists.
pub fn solve_left(a: &IntMatrix, y: &[BigInt]) -> Option<Vec<BigInt>> {
    let s = smith_normal_form(a);
    // x A = y  <=>  (x U^{-1}) D = y V
    let w = s.v.left_apply(y);
    let mut z = vec![BigInt::zero(); a.rows()];
    for (j, wj) in w.iter().enumerate() {
        if j < s.rank {
            let d = s.d.get(j, j);
            if !wj.is_multiple_of(d) {
                return None;
            }
            z[j] = wj / d;
        } else if !wj.is_zero() {
            return None;
        }
    }
    Some(s.u.left_apply(&z))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: &IntMatrix) -> Snf {
        let s = smith_normal_form(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        assert_eq!(s.u_inv.mul(&s.d).mul(&s.v_inv), *a);
        assert!(s.u.is_unimodular() && s.v.is_unimodular());
        let diag = s.diagonal();
        for i in 0..diag.len() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert!(s.d.get(i, j).is_zero());
                }
            }
            if i + 1 < diag.len() && !diag[i].is_zero() {
                assert!(diag[i + 1].is_multiple_of(&diag[i]));
            }
        }
        s
    }

    #[test]
    fn diag_2_3_becomes_1_6() {
        let s = check(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn identity_and_zero() {
        let s = check(&IntMatrix::identity(3));
        assert_eq!(s.d, IntMatrix::identity(3));
        let s = check(&IntMatrix::from_rows(&[vec![0]]));
        assert_eq!(s.d, IntMatrix::from_rows(&[vec![0]]));
        assert_eq!(s.rank, 0);
    }

    #[test]
    fn rectangular_and_solve() {
        let a = IntMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16], vec![1, 1, 1]]);
        check(&a);
        let y: Vec<BigInt> = a.left_apply(&[1, 2, 0, -3].map(BigInt::from));
        let x = solve_left(&a, &y).unwrap();
        assert_eq!(a.left_apply(&x), y);
        let k = left_kernel(&a);
        assert!(k.mul(&a).is_zero());
    }
}
