//! Smith normal form of integer matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// `U · E · V = D` with `U`, `V` unimodular and `D` diagonal, each diagonal
/// entry dividing the next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Smith {
    pub u: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
    /// The nonzero diagonal entries `d_0 | d_1 | …`, all positive.
    pub diagonal: Vec<BigInt>,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

struct Work {
    a: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.u.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in self.a.iter_mut().chain(self.v.iter_mut()) {
            row.swap(i, j);
        }
    }

    /// row_i -= q · row_j
    fn sub_row(&mut self, i: usize, j: usize, q: &BigInt) {
        for m in [&mut self.a, &mut self.u] {
            let src = m[j].clone();
            for (x, s) in m[i].iter_mut().zip(&src) {
                *x -= q * s;
            }
        }
    }

    /// col_i -= q · col_j
    fn sub_col(&mut self, i: usize, j: usize, q: &BigInt) {
        for row in self.a.iter_mut().chain(self.v.iter_mut()) {
            let s = row[j].clone();
            row[i] -= q * s;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for m in [&mut self.a, &mut self.u] {
            for x in m[i].iter_mut() {
                *x = -&*x;
            }
        }
    }
}

/// Computes the Smith normal form of the `rows × cols` matrix `e`.
pub fn smith_normal_form(e: &[Vec<i64>], cols: usize) -> Smith {
    let rows = e.len();
    let mut w = Work {
        a: e.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(),
        u: identity(rows),
        v: identity(cols),
    };
    let mut diagonal = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the remaining block becomes the pivot
            let pivot = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| !w.a[i][j].is_zero())
                .min_by_key(|&(i, j)| w.a[i][j].abs());
            let Some((pi, pj)) = pivot else {
                return Smith {
                    u: w.u,
                    v: w.v,
                    diagonal,
                };
            };
            w.swap_rows(t, pi);
            w.swap_cols(t, pj);
            let p = w.a[t][t].clone();
            let mut clean = true;
            for i in t + 1..rows {
                if !w.a[i][t].is_zero() {
                    let q = w.a[i][t].div_floor(&p);
                    w.sub_row(i, t, &q);
                    clean &= w.a[i][t].is_zero();
                }
            }
            for j in t + 1..cols {
                if !w.a[t][j].is_zero() {
                    let q = w.a[t][j].div_floor(&p);
                    w.sub_col(j, t, &q);
                    clean &= w.a[t][j].is_zero();
                }
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !w.a[i][j].is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    // bring the offending row into row t and reduce again
                    let minus_one = -BigInt::one();
                    w.sub_row(t, i, &minus_one);
                }
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
        diagonal.push(w.a[t][t].clone());
    }
    Smith {
        u: w.u,
        v: w.v,
        diagonal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
        let m = b.first().map_or(0, Vec::len);
        a.iter()
            .map(|row| (0..m).map(|j| row.iter().zip(b).map(|(x, r)| x * &r[j]).sum()).collect())
            .collect()
    }

    /// Determinant by cofactor expansion, for unimodularity checks.
    fn det(m: &[Vec<BigInt>]) -> BigInt {
        if m.is_empty() {
            return BigInt::one();
        }
        (0..m.len())
            .map(|j| {
                let minor: Vec<Vec<BigInt>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let s = if j % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                s * &m[0][j] * det(&minor)
            })
            .sum()
    }

    fn check(e: &[Vec<i64>], cols: usize) -> Smith {
        let s = smith_normal_form(e, cols);
        let big: Vec<Vec<BigInt>> = e.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let d = if e.is_empty() { vec![] } else { mul(&mul(&s.u, &big), &s.v) };
        for (i, row) in d.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let want = if i == j && i < s.rank() { s.diagonal[i].clone() } else { BigInt::zero() };
                assert_eq!(*x, want, "entry ({i},{j}) of U E V for {e:?}");
            }
        }
        assert_eq!(det(&s.u).abs(), BigInt::one());
        assert_eq!(det(&s.v).abs(), BigInt::one());
        for w in s.diagonal.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        s
    }

    #[test]
    fn examples() {
        let s = check(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]], 3);
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        let s = check(&[vec![1, 2, 0], vec![0, 0, 0]], 3);
        assert_eq!(s.rank(), 1);
        let s = check(&[vec![0, 0]], 2);
        assert_eq!(s.rank(), 0);
        // λ_a λ_b² = r: a single constraint of content 1
        let s = check(&[vec![1, 2]], 2);
        assert_eq!(s.diagonal, vec![BigInt::one()]);
    }

    proptest! {
        #[test]
        fn random_matrices(rows in 1usize..5, cols in 1usize..5, seed in proptest::collection::vec(-4i64..5, 25)) {
            let e: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| seed[i * 5 + j]).collect()).collect();
            check(&e, cols);
        }
    }
}
