//! Small dense matrices over `Q(i)` with exact Gaussian elimination.

use std::fmt;

use crate::scalars::GaussRational;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<GaussRational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![GaussRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, GaussRational::one());
        }
        m
    }

    /// Builds a matrix from rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<GaussRational>>) -> Option<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return None;
        }
        Some(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> GaussRational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &GaussRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: GaussRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[GaussRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<GaussRational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && *self == self.conj_transpose()
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(GaussRational::is_real)
    }

    pub fn mul(&self, other: &Matrix) -> Option<Matrix> {
        if self.cols != other.rows {
            return None;
        }
        Some(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols)
                .filter(|&k| !self.get(i, k).is_zero())
                .map(|k| self.get(i, k) * other.get(k, j))
                .sum()
        }))
    }

    /// `x^T · self` for a row vector `x`.
    pub fn left_apply(&self, x: &[GaussRational]) -> Vec<GaussRational> {
        (0..self.cols)
            .map(|j| {
                (0..self.rows)
                    .filter(|&i| !x[i].is_zero())
                    .map(|i| &x[i] * self.get(i, j))
                    .sum()
            })
            .collect()
    }

    /// Submatrix of the leading `k` rows and columns.
    pub fn leading(&self, k: usize) -> Matrix {
        Self::from_fn(k, k, |i, j| self.get(i, j).clone())
    }

    /// Row-reduces `self` in place, applying the same row operations to
    /// `aug` when given. Returns the pivot columns and the determinant factor
    /// (product of pivots times row-swap signs) of the square part.
    fn eliminate(&mut self, mut aug: Option<&mut Matrix>) -> (Vec<usize>, GaussRational) {
        let mut pivots = Vec::new();
        let mut det = GaussRational::one();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                det = GaussRational::zero();
                continue;
            };
            if p != r {
                self.swap_rows(p, r);
                if let Some(a) = aug.as_deref_mut() {
                    a.swap_rows(p, r);
                }
                det = -det;
            }
            let pivot = self.get(r, c).clone();
            det = &det * &pivot;
            let inv = pivot.inv().expect("nonzero pivot");
            self.scale_row(r, &inv);
            if let Some(a) = aug.as_deref_mut() {
                a.scale_row(r, &inv);
            }
            for i in 0..self.rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let f = self.get(i, c).clone();
                self.sub_row_multiple(i, r, &f);
                if let Some(a) = aug.as_deref_mut() {
                    a.sub_row_multiple(i, r, &f);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (pivots, det)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, f: &GaussRational) {
        for j in 0..self.cols {
            let v = self.get(r, j) * f;
            self.set(r, j, v);
        }
    }

    fn sub_row_multiple(&mut self, target: usize, src: usize, f: &GaussRational) {
        for j in 0..self.cols {
            if self.get(src, j).is_zero() {
                continue;
            }
            let v = self.get(target, j) - &(f * self.get(src, j));
            self.set(target, j, v);
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().eliminate(None).0.len()
    }

    pub fn determinant(&self) -> Option<GaussRational> {
        if !self.is_square() {
            return None;
        }
        let (pivots, det) = self.clone().eliminate(None);
        Some(if pivots.len() == self.rows { det } else { GaussRational::zero() })
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let mut work = self.clone();
        let mut inv = Matrix::identity(self.rows);
        let (pivots, _) = work.eliminate(Some(&mut inv));
        (pivots.len() == self.rows).then_some(inv)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}
