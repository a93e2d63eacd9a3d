//! Points and subspaces of PG(n,q).
//!
//! A point is stored with its first nonzero coordinate equal to 1. Points are
//! indexed densely in lexicographic order of their normalized coordinates, so
//! `(0,…,0,1)` has index 0 and the points with leading coordinate 1 come last.
//! A subspace is stored as the reduced row echelon form of a basis, which makes
//! equal subspaces compare equal.

use crate::error::{Error, Result};
use crate::gf::{Elem, FieldCtx};
use crate::linalg::{self, Matrix};

/// A normalized homogeneous point of PG(n,q).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    coords: Vec<Elem>,
}

/// Number of points of PG(n,q), `(q^{n+1}-1)/(q-1)`.
pub fn point_count(n: usize, q: u32) -> usize {
    let q = q as usize;
    (0..=n).map(|i| q.pow(i as u32)).sum()
}

/// Scales `v` so that its first nonzero entry is 1; `None` for the zero vector.
pub fn normalize(f: &FieldCtx, v: &[Elem]) -> Option<Vec<Elem>> {
    let lead = *v.iter().find(|&&x| x != 0)?;
    if lead == 1 {
        return Some(v.to_vec());
    }
    let inv = f.inv(lead).ok()?;
    Some(linalg::scale_vec(f, inv, v))
}

/// Dense index of a normalized coordinate vector.
pub fn index_of(q: u32, coords: &[Elem]) -> usize {
    let n = coords.len() - 1;
    let k = coords.iter().position(|&x| x != 0).expect("nonzero vector");
    let q = q as usize;
    let offset: usize = (0..n - k).map(|i| q.pow(i as u32)).sum();
    let tail = coords[k + 1..].iter().fold(0usize, |acc, &c| acc * q + c as usize);
    offset + tail
}

impl ProjPoint {
    /// Normalizes an arbitrary nonzero vector.
    pub fn new(f: &FieldCtx, coords: &[Elem]) -> Result<Self> {
        if let Some(&bad) = coords.iter().find(|&&c| !f.is_valid(c)) {
            return Err(Error::InvalidElement(bad));
        }
        normalize(f, coords).map(|coords| ProjPoint { coords }).ok_or(Error::ZeroVector)
    }

    /// Wraps coordinates already known to be normalized.
    pub(crate) fn from_normalized(coords: Vec<Elem>) -> Self {
        debug_assert_eq!(coords.iter().find(|&&x| x != 0), Some(&1));
        ProjPoint { coords }
    }

    pub fn from_index(n: usize, q: u32, mut index: usize) -> Self {
        assert!(index < point_count(n, q), "point index out of range");
        let qs = q as usize;
        // Pivot position k owns q^{n-k} consecutive indices, starting from k = n.
        let mut k = n;
        loop {
            let block = qs.pow((n - k) as u32);
            if index < block {
                break;
            }
            index -= block;
            k -= 1;
        }
        let mut coords = vec![0; n + 1];
        coords[k] = 1;
        for pos in (k + 1..=n).rev() {
            coords[pos] = (index % qs) as Elem;
            index /= qs;
        }
        ProjPoint { coords }
    }

    pub fn coords(&self) -> &[Elem] {
        &self.coords
    }

    /// Projective dimension of the ambient space.
    pub fn ambient_dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn index(&self, q: u32) -> usize {
        index_of(q, &self.coords)
    }
}

/// All points of PG(n,q), sorted by index.
pub fn enumerate_points(n: usize, f: &FieldCtx) -> Vec<ProjPoint> {
    (0..point_count(n, f.q())).map(|i| ProjPoint::from_index(n, f.q(), i)).collect()
}

/// A subspace of PG(n,q), held as an RREF basis. The empty subspace has
/// projective dimension −1 and no basis rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    vector_dim: usize,
    basis: Vec<Vec<Elem>>,
}

impl Subspace {
    pub fn empty(vector_dim: usize) -> Self {
        Subspace { vector_dim, basis: Vec::new() }
    }

    pub fn whole(vector_dim: usize) -> Self {
        let basis = (0..vector_dim)
            .map(|i| {
                let mut e = vec![0; vector_dim];
                e[i] = 1;
                e
            })
            .collect();
        Subspace { vector_dim, basis }
    }

    /// Span of arbitrary vectors (zero vectors allowed).
    pub fn span(f: &FieldCtx, vector_dim: usize, vectors: &[Vec<Elem>]) -> Self {
        if vectors.is_empty() {
            return Self::empty(vector_dim);
        }
        let mut m = Matrix::from_rows(vectors);
        assert_eq!(m.cols(), vector_dim, "vector length");
        let rank = m.rref(f).len();
        Subspace { vector_dim, basis: m.to_rows().into_iter().take(rank).collect() }
    }

    pub fn from_points(f: &FieldCtx, pts: &[ProjPoint]) -> Self {
        assert!(!pts.is_empty(), "span of no points");
        let rows: Vec<Vec<Elem>> = pts.iter().map(|p| p.coords.clone()).collect();
        Self::span(f, rows[0].len(), &rows)
    }

    pub fn vector_dim(&self) -> usize {
        self.vector_dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn projdim(&self) -> isize {
        self.basis.len() as isize - 1
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<Elem>] {
        &self.basis
    }

    pub fn basis_matrix(&self) -> Matrix {
        if self.basis.is_empty() {
            return Matrix::zeros(0, self.vector_dim);
        }
        Matrix::from_rows(&self.basis)
    }

    pub fn contains_vector(&self, f: &FieldCtx, v: &[Elem]) -> bool {
        let mut r = v.to_vec();
        for row in &self.basis {
            let pivot = row.iter().position(|&x| x != 0).expect("basis rows are nonzero");
            let c = r[pivot];
            if c != 0 {
                for (x, &y) in r.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
        r.iter().all(|&x| x == 0)
    }

    pub fn contains_point(&self, f: &FieldCtx, p: &ProjPoint) -> bool {
        self.contains_vector(f, &p.coords)
    }

    pub fn contains(&self, f: &FieldCtx, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains_vector(f, v))
    }

    pub fn join(&self, f: &FieldCtx, other: &Subspace) -> Subspace {
        let rows: Vec<Vec<Elem>> = self.basis.iter().chain(&other.basis).cloned().collect();
        Self::span(f, self.vector_dim, &rows)
    }

    /// Linear equations cutting out the subspace: a basis of the vectors `w`
    /// with `b · w = 0` for every basis row `b`.
    pub fn annihilator(&self, f: &FieldCtx) -> Vec<Vec<Elem>> {
        if self.basis.is_empty() {
            return Subspace::whole(self.vector_dim).basis;
        }
        self.basis_matrix().nullspace(f)
    }

    pub fn meet(&self, f: &FieldCtx, other: &Subspace) -> Subspace {
        let eqs: Vec<Vec<Elem>> = self.annihilator(f).into_iter().chain(other.annihilator(f)).collect();
        if eqs.is_empty() {
            return Subspace::whole(self.vector_dim);
        }
        let sol = Matrix::from_rows(&eqs).nullspace(f);
        Self::span(f, self.vector_dim, &sol)
    }

    /// Vector `sum c_i b_i` for coefficients over the RREF basis.
    pub fn combine(&self, f: &FieldCtx, coeffs: &[Elem]) -> Vec<Elem> {
        let mut v = vec![0; self.vector_dim];
        for (c, row) in coeffs.iter().zip(&self.basis) {
            if *c != 0 {
                v = linalg::axpy(f, &v, *c, row);
            }
        }
        v
    }

    /// Coordinates of `v` with respect to the RREF basis, if `v` lies in the subspace.
    pub fn coordinates(&self, f: &FieldCtx, v: &[Elem]) -> Option<Vec<Elem>> {
        linalg::solve_in_span(f, &self.basis, v)
    }

    /// All points of the subspace, sorted by index.
    pub fn points(&self, f: &FieldCtx) -> Vec<ProjPoint> {
        let k = self.basis.len();
        if k == 0 {
            return Vec::new();
        }
        let mut pts: Vec<ProjPoint> = (0..point_count(k - 1, f.q()))
            .map(|i| {
                let c = ProjPoint::from_index(k - 1, f.q(), i);
                ProjPoint::from_normalized(self.combine(f, &c.coords))
            })
            .collect();
        pts.sort();
        pts
    }

    pub fn point_count(&self, q: u32) -> usize {
        match self.basis.len() {
            0 => 0,
            k => point_count(k - 1, q),
        }
    }
}

/// All subspaces of projective dimension `k` in PG(n,q), in canonical order.
///
/// Enumerates RREF matrices directly: a pivot set plus free entries to the
/// right of each pivot outside the pivot columns.
pub fn enumerate_subspaces(n: usize, k: usize, f: &FieldCtx) -> Vec<Subspace> {
    let dim = n + 1;
    let rank = k + 1;
    assert!(rank <= dim, "subspace larger than ambient space");
    let mut out = Vec::new();
    let mut pivots: Vec<usize> = (0..rank).collect();
    loop {
        let free: Vec<(usize, usize)> = (0..rank)
            .flat_map(|r| {
                let pv = pivots.clone();
                (pv[r] + 1..dim).filter(move |c| !pv.contains(c)).map(move |c| (r, c))
            })
            .collect();
        let combos = (f.q() as usize).pow(free.len() as u32);
        for mut code in 0..combos {
            let mut basis = vec![vec![0; dim]; rank];
            for (r, &p) in pivots.iter().enumerate() {
                basis[r][p] = 1;
            }
            for &(r, c) in &free {
                basis[r][c] = (code % f.q() as usize) as Elem;
                code /= f.q() as usize;
            }
            out.push(Subspace { vector_dim: dim, basis });
        }
        // Next pivot combination in lexicographic order.
        let mut i = rank;
        loop {
            if i == 0 {
                out.sort();
                return out;
            }
            i -= 1;
            if pivots[i] < dim - rank + i {
                break;
            }
        }
        pivots[i] += 1;
        for j in i + 1..rank {
            pivots[j] = pivots[j - 1] + 1;
        }
    }
}

/// All `(q^2+1)(q^2+q+1)` lines of PG(3,q).
pub fn enumerate_lines_pg3(f: &FieldCtx) -> Vec<Subspace> {
    enumerate_subspaces(3, 1, f)
}
