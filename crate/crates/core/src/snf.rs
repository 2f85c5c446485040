//! Smith normal form of integer matrices, with unimodular transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;

/// `U · A · V = D` with `U`, `V` unimodular and `D` diagonal with
/// `d_1 | d_2 | … | d_r`, `d_i > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Smith {
    pub diagonal: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub rows: usize,
    pub cols: usize,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }

    /// Invariant factors larger than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.diagonal.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn from_i64(a: &[Vec<i64>]) -> IntMatrix {
    a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

struct Work {
    a: IntMatrix,
    u: IntMatrix,
    v: IntMatrix,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.u.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for r in &mut self.a {
            r.swap(i, j);
        }
        for r in &mut self.v {
            r.swap(i, j);
        }
    }

    /// row_dst -= f · row_src
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        for m in [&mut self.a, &mut self.u] {
            let s = m[src].clone();
            for (d, x) in m[dst].iter_mut().zip(&s) {
                *d -= f * x;
            }
        }
    }

    /// col_dst -= f · col_src
    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        for m in [&mut self.a, &mut self.v] {
            for r in m.iter_mut() {
                let s = r[src].clone();
                r[dst] -= f * s;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for m in [&mut self.a, &mut self.u] {
            for x in &mut m[i] {
                *x = -&*x;
            }
        }
    }
}

pub fn smith(a: &IntMatrix) -> Smith {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut w = Work { a: a.clone(), u: identity(rows), v: identity(cols) };
    let mut diagonal = Vec::new();
    for t in 0..rows.min(cols) {
        // Smallest nonzero entry of the trailing block as pivot.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !w.a[i][j].is_zero() && pivot.is_none_or(|(pi, pj)| w.a[i][j].abs() < w.a[pi][pj].abs()) {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if !w.a[i][t].is_zero() {
                    let f = w.a[i][t].div_floor(&w.a[t][t]);
                    w.add_row(i, t, &f);
                    if !w.a[i][t].is_zero() {
                        w.swap_rows(t, i);
                        dirty = true;
                    }
                }
            }
            for j in t + 1..cols {
                if !w.a[t][j].is_zero() {
                    let f = w.a[t][j].div_floor(&w.a[t][t]);
                    w.add_col(j, t, &f);
                    if !w.a[t][j].is_zero() {
                        w.swap_cols(t, j);
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            // Enforce divisibility of the trailing block by the pivot.
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !w.a[i][j].is_multiple_of(&w.a[t][t])));
            match bad {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    w.add_row(t, i, &minus_one);
                }
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
        diagonal.push(w.a[t][t].clone());
    }
    Smith { diagonal, u: w.u, v: w.v, rows, cols }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
        let n = b.first().map_or(0, Vec::len);
        a.iter()
            .map(|r| (0..n).map(|j| r.iter().zip(b).fold(BigInt::zero(), |acc, (x, row)| acc + x * &row[j])).collect())
            .collect()
    }

    fn check(a: &[Vec<i64>], expect: &[i64]) {
        let m = from_i64(a);
        let s = smith(&m);
        assert_eq!(s.diagonal, expect.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>());
        let d = mul(&mul(&s.u, &m), &s.v);
        for (i, row) in d.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let want = if i == j && i < s.rank() { s.diagonal[i].clone() } else { BigInt::zero() };
                assert_eq!(*x, want, "entry ({i},{j})");
            }
        }
        for w in s.diagonal.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
    }

    #[test]
    fn identity_block() {
        check(&[vec![1, 0], vec![0, 1]], &[1, 1]);
    }

    #[test]
    fn slice_weights_have_order_n() {
        // Columns (0,1) and (n,-1).
        for n in 1..=6 {
            let expect: Vec<i64> = vec![1, n];
            check(&[vec![0, n], vec![1, -1]], &expect);
        }
    }

    #[test]
    fn classic_example() {
        check(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]], &[2, 6, 12]);
    }

    #[test]
    fn rank_deficient_and_rectangular() {
        check(&[vec![2]], &[2]);
        check(&[vec![1, 2, 3], vec![2, 4, 6]], &[1]);
        check(&[vec![0, 0], vec![0, 0]], &[]);
        check(&[vec![4, 6]], &[2]);
        check(&[vec![4], vec![6], vec![10]], &[2]);
    }

    #[test]
    fn empty_matrix() {
        let s = smith(&vec![vec![]; 2]);
        assert_eq!(s.rank(), 0);
    }
}
