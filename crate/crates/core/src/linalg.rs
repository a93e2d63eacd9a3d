//! Dense matrices over GF(q): products, reduced row echelon form, null spaces
//! and inverses. Vectors are plain `&[Elem]` slices.

use crate::error::{Error, Result};
use crate::gf::{Elem, FieldCtx};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Elem>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix { rows: rows.len(), cols, data: rows.concat() }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Elem>]) -> Self {
        Self::from_rows(cols).transpose()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn mul(&self, f: &FieldCtx, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out[(i, j)], f.mul(a, other[(k, j)]));
                    out[(i, j)] = v;
                }
            }
        }
        out
    }

    /// `M v` for a column vector `v`.
    pub fn apply(&self, f: &FieldCtx, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows).map(|i| dot(f, self.row(i), v)).collect()
    }

    pub fn scale(&self, f: &FieldCtx, c: Elem) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f.mul(c, x)).collect() }
    }

    /// `x^T M y`.
    pub fn bilinear(&self, f: &FieldCtx, x: &[Elem], y: &[Elem]) -> Elem {
        let mut acc = 0;
        for (i, &xi) in x.iter().enumerate().take(self.rows) {
            if xi != 0 {
                acc = f.add(acc, f.mul(xi, dot(f, self.row(i), y)));
            }
        }
        acc
    }

    /// `B M B^T` where the rows of `basis` span a subspace: the Gram matrix of
    /// the restricted form.
    pub fn restrict(&self, f: &FieldCtx, basis: &Matrix) -> Matrix {
        basis.mul(f, self).mul(f, &basis.transpose())
    }

    pub fn rank(&self, f: &FieldCtx) -> usize {
        let mut m = self.clone();
        m.rref(f).len()
    }

    /// Reduces in place to reduced row echelon form and returns the pivot columns.
    /// Zero rows end up at the bottom.
    pub fn rref(&mut self, f: &FieldCtx) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self[(i, c)] != 0) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = f.inv(self[(r, c)]).expect("pivot is nonzero");
            for j in c..self.cols {
                self[(r, j)] = f.mul(inv, self[(r, j)]);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self[(i, c)];
                if factor == 0 {
                    continue;
                }
                for j in c..self.cols {
                    let v = f.sub(self[(i, j)], f.mul(factor, self[(r, j)]));
                    self[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Basis (in RREF order of the free columns) of `{ x : M x = 0 }`.
    pub fn nullspace(&self, f: &FieldCtx) -> Vec<Vec<Elem>> {
        let mut m = self.clone();
        let pivots = m.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![0; self.cols];
                v[fc] = 1;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(m[(r, fc)]);
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self, f: &FieldCtx) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch { expected: self.rows, got: self.cols });
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)];
            }
            aug[(i, n + i)] = 1;
        }
        let pivots = aug.rref(f);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::DivisionByZero);
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)];
            }
        }
        Ok(inv)
    }

    pub fn is_invertible(&self, f: &FieldCtx) -> bool {
        self.rows == self.cols && self.rank(f) == self.rows
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Elem;
    fn index(&self, (i, j): (usize, usize)) -> &Elem {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Elem {
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub fn dot(f: &FieldCtx, a: &[Elem], b: &[Elem]) -> Elem {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

pub fn add_vec(f: &FieldCtx, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    a.iter().zip(b).map(|(&x, &y)| f.add(x, y)).collect()
}

pub fn scale_vec(f: &FieldCtx, c: Elem, a: &[Elem]) -> Vec<Elem> {
    a.iter().map(|&x| f.mul(c, x)).collect()
}

/// `a + c b`.
pub fn axpy(f: &FieldCtx, a: &[Elem], c: Elem, b: &[Elem]) -> Vec<Elem> {
    a.iter().zip(b).map(|(&x, &y)| f.add(x, f.mul(c, y))).collect()
}

/// Coefficients `c` with `sum c_i rows_i = v`, if `v` lies in the row span.
pub fn solve_in_span(f: &FieldCtx, rows: &[Vec<Elem>], v: &[Elem]) -> Option<Vec<Elem>> {
    let k = rows.len();
    if k == 0 {
        return v.iter().all(|&x| x == 0).then(Vec::new);
    }
    // Columns are the spanning rows, augmented with v.
    let n = v.len();
    let mut m = Matrix::zeros(n, k + 1);
    for (j, r) in rows.iter().enumerate() {
        for i in 0..n {
            m[(i, j)] = r[i];
        }
    }
    for i in 0..n {
        m[(i, k)] = v[i];
    }
    let pivots = m.rref(f);
    if pivots.contains(&k) {
        return None;
    }
    let mut c = vec![0; k];
    for (r, &pc) in pivots.iter().enumerate() {
        c[pc] = m[(r, k)];
    }
    Some(c)
}
