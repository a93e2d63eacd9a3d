//! Quadratic and alternating forms over GF(q), q odd.
//!
//! A quadratic form is stored through a symmetric Gram matrix `S` with
//! `f(x) = xᵀSx`; its polar form is `B(x,y) = f(x+y) − f(x) − f(y) = 2xᵀSy`.
//! Sections of a polar space by a subspace are classified by counting their
//! singular points against the closed formulas for cones over non-degenerate
//! polar spaces.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Elem, FieldCtx};
use crate::linalg::Matrix;
use crate::projgeom::{point_count, ProjPoint, Subspace};

/// The four polar space families handled here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PolarKind {
    /// Q+(2r−1,q)
    Hyperbolic,
    /// Q(2r,q)
    Parabolic,
    /// Q−(2r+1,q)
    Elliptic,
    /// W(2r−1,q)
    Symplectic,
}

impl PolarKind {
    pub fn symbol(self) -> &'static str {
        match self {
            PolarKind::Hyperbolic => "Q+",
            PolarKind::Parabolic => "Q",
            PolarKind::Elliptic => "Q-",
            PolarKind::Symplectic => "W",
        }
    }

    /// Whether the family lives in projective dimension `n`.
    pub fn fits_dimension(self, n: usize) -> bool {
        match self {
            PolarKind::Parabolic => n.is_multiple_of(2) && n >= 2,
            PolarKind::Hyperbolic | PolarKind::Symplectic => n % 2 == 1,
            PolarKind::Elliptic => n % 2 == 1,
        }
    }

    /// Rank r and parameter e of the polar space of this kind in PG(n,q).
    pub fn rank_and_parameter(self, n: usize) -> (usize, usize) {
        match self {
            PolarKind::Hyperbolic => (n.div_ceil(2), 0),
            PolarKind::Symplectic => (n.div_ceil(2), 1),
            PolarKind::Parabolic => (n / 2, 1),
            PolarKind::Elliptic => ((n - 1) / 2, 2),
        }
    }
}

impl fmt::Display for PolarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Number of points of a polar space of rank `r` and parameter `e`:
/// `(q^r − 1)(q^{r+e−1} + 1)/(q − 1)`.
pub fn polar_point_count(r: usize, e: usize, q: u32) -> usize {
    if r == 0 {
        return 0;
    }
    let q = q as usize;
    (q.pow(r as u32) - 1) * (q.pow((r + e - 1) as u32) + 1) / (q - 1)
}

/// Number of generators of a polar space of rank `r` and parameter `e`:
/// `∏_{i=0}^{r−1} (q^{i+e} + 1)`.
pub fn polar_generator_count(r: usize, e: usize, q: u32) -> usize {
    (0..r).map(|i| (q as usize).pow((i + e) as u32) + 1).product()
}

/// A space spec such as `Q-:5:3`: kind, projective dimension, field order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpaceSpec {
    pub kind: PolarKind,
    pub n: usize,
    pub q: u64,
}

impl SpaceSpec {
    pub fn new(kind: PolarKind, n: usize, q: u64) -> Result<Self> {
        if !kind.fits_dimension(n) {
            return Err(Error::IncompatibleDimension { kind: kind.symbol().into(), n });
        }
        Ok(SpaceSpec { kind, n, q })
    }

    pub fn rank_and_parameter(&self) -> (usize, usize) {
        self.kind.rank_and_parameter(self.n)
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.kind, self.n, self.q)
    }
}

impl FromStr for SpaceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let [kind, n, q] = parts.as_slice() else {
            return Err(Error::Parse(format!("space spec {s:?}: expected TYPE:projdim:q")));
        };
        let kind = match *kind {
            "Q+" => PolarKind::Hyperbolic,
            "Q" => PolarKind::Parabolic,
            "Q-" => PolarKind::Elliptic,
            "W" => PolarKind::Symplectic,
            other => return Err(Error::Parse(format!("unknown polar space type {other:?}"))),
        };
        let n = n.parse().map_err(|_| Error::Parse(format!("bad dimension {n:?}")))?;
        let q = q.parse().map_err(|_| Error::Parse(format!("bad field order {q:?}")))?;
        SpaceSpec::new(kind, n, q)
    }
}

impl Serialize for SpaceSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SpaceSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `f(x) = xᵀSx` with `S` symmetric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticForm {
    gram: Matrix,
}

impl QuadraticForm {
    pub fn from_gram(gram: Matrix) -> Result<Self> {
        if !gram.is_symmetric() {
            return Err(Error::BadConfiguration("Gram matrix is not symmetric".into()));
        }
        Ok(QuadraticForm { gram })
    }

    /// Builds `Σ c·X_i·X_j` from monomial terms `(i, j, c)`.
    pub fn from_terms(f: &FieldCtx, vector_dim: usize, terms: &[(usize, usize, Elem)]) -> Self {
        let half = f.inv(2 % f.p()).expect("odd characteristic");
        let mut gram = Matrix::zeros(vector_dim, vector_dim);
        for &(i, j, c) in terms {
            if i == j {
                gram[(i, i)] = f.add(gram[(i, i)], c);
            } else {
                let h = f.mul(half, c);
                gram[(i, j)] = f.add(gram[(i, j)], h);
                gram[(j, i)] = f.add(gram[(j, i)], h);
            }
        }
        QuadraticForm { gram }
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn vector_dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn eval(&self, f: &FieldCtx, p: &ProjPoint) -> Result<Elem> {
        self.check_dim(p.coords().len())?;
        Ok(self.value(f, p.coords()))
    }

    /// `xᵀSx` without a dimension check.
    #[inline]
    pub fn value(&self, f: &FieldCtx, x: &[Elem]) -> Elem {
        self.gram.bilinear(f, x, x)
    }

    /// The polar form `B(x,y) = 2xᵀSy`.
    pub fn polar(&self, f: &FieldCtx) -> BilinearForm {
        BilinearForm { matrix: self.gram.scale(f, f.from_int(2)), kind: BilinearKind::Symmetric }
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.vector_dim() {
            return Err(Error::DimensionMismatch { expected: self.vector_dim(), got });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BilinearKind {
    Symmetric,
    Alternating,
}

/// `B(x,y) = xᵀMy`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilinearForm {
    matrix: Matrix,
    kind: BilinearKind,
}

impl BilinearForm {
    pub fn new(f: &FieldCtx, matrix: Matrix, kind: BilinearKind) -> Result<Self> {
        let n = matrix.rows();
        if matrix.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: matrix.cols() });
        }
        let ok = match kind {
            BilinearKind::Symmetric => matrix.is_symmetric(),
            BilinearKind::Alternating => (0..n)
                .all(|i| matrix[(i, i)] == 0 && (0..i).all(|j| matrix[(i, j)] == f.neg(matrix[(j, i)]))),
        };
        if !ok {
            return Err(Error::BadConfiguration(format!("matrix is not {kind:?}")));
        }
        Ok(BilinearForm { matrix, kind })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn kind(&self) -> BilinearKind {
        self.kind
    }

    pub fn vector_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn is_nondegenerate(&self, f: &FieldCtx) -> bool {
        self.matrix.is_invertible(f)
    }

    pub fn pair(&self, f: &FieldCtx, p: &ProjPoint, r: &ProjPoint) -> Result<Elem> {
        for got in [p.coords().len(), r.coords().len()] {
            if got != self.vector_dim() {
                return Err(Error::DimensionMismatch { expected: self.vector_dim(), got });
            }
        }
        Ok(self.matrix.bilinear(f, p.coords(), r.coords()))
    }

    /// `A^⊥`, the points orthogonal to every point of `A`.
    pub fn perp(&self, f: &FieldCtx, a: &Subspace) -> Result<Subspace> {
        if !self.is_nondegenerate(f) {
            return Err(Error::DegenerateForm);
        }
        Ok(perp_with(f, &self.matrix, a))
    }
}

fn perp_with(f: &FieldCtx, m: &Matrix, a: &Subspace) -> Subspace {
    if a.is_empty() {
        return Subspace::whole(m.rows());
    }
    let eqs = a.basis_matrix().mul(f, m);
    Subspace::span(f, m.rows(), &eqs.nullspace(f))
}

/// The form defining a polar space: quadratic for Q±/Q, alternating for W.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Form {
    Quadratic(QuadraticForm),
    Alternating(BilinearForm),
}

impl Form {
    pub fn vector_dim(&self) -> usize {
        match self {
            Form::Quadratic(qf) => qf.vector_dim(),
            Form::Alternating(b) => b.vector_dim(),
        }
    }

    /// Bilinear form used for orthogonality.
    pub fn bilinear(&self, f: &FieldCtx) -> BilinearForm {
        match self {
            Form::Quadratic(qf) => qf.polar(f),
            Form::Alternating(b) => b.clone(),
        }
    }

    /// A matrix with the same orthogonality relation as the polar form
    /// (the Gram matrix itself for quadratic forms).
    pub fn orthogonality_matrix(&self) -> &Matrix {
        match self {
            Form::Quadratic(qf) => qf.gram(),
            Form::Alternating(b) => b.matrix(),
        }
    }

    #[inline]
    pub fn is_singular_vector(&self, f: &FieldCtx, x: &[Elem]) -> bool {
        match self {
            Form::Quadratic(qf) => qf.value(f, x) == 0,
            Form::Alternating(_) => true,
        }
    }

    #[inline]
    pub fn orthogonal(&self, f: &FieldCtx, x: &[Elem], y: &[Elem]) -> bool {
        self.orthogonality_matrix().bilinear(f, x, y) == 0
    }

    pub fn is_nondegenerate(&self, f: &FieldCtx) -> bool {
        self.orthogonality_matrix().is_invertible(f)
    }

    pub fn perp(&self, f: &FieldCtx, a: &Subspace) -> Result<Subspace> {
        if !self.is_nondegenerate(f) {
            return Err(Error::DegenerateForm);
        }
        Ok(perp_with(f, self.orthogonality_matrix(), a))
    }

    /// The form induced on a subspace, in coordinates of the subspace basis.
    pub fn restrict(&self, f: &FieldCtx, a: &Subspace) -> Form {
        let basis = a.basis_matrix();
        match self {
            Form::Quadratic(qf) => Form::Quadratic(QuadraticForm { gram: qf.gram.restrict(f, &basis) }),
            Form::Alternating(b) => Form::Alternating(BilinearForm {
                matrix: b.matrix.restrict(f, &basis),
                kind: BilinearKind::Alternating,
            }),
        }
    }

    /// Whether every pair of basis vectors is orthogonal and every basis
    /// vector (hence every vector) is singular.
    pub fn is_totally_singular(&self, f: &FieldCtx, a: &Subspace) -> bool {
        let b = a.basis();
        b.iter().all(|x| self.is_singular_vector(f, x))
            && (0..b.len()).all(|i| (0..i).all(|j| self.orthogonal(f, &b[i], &b[j])))
    }

    /// Singular points of a subspace (all of its points for alternating forms).
    pub fn singular_points(&self, f: &FieldCtx, a: &Subspace) -> Vec<ProjPoint> {
        a.points(f).into_iter().filter(|p| self.is_singular_vector(f, p.coords())).collect()
    }
}

/// The standard forms of Q+(n,q), Q(n,q), Q−(n,q) and W(n,q).
///
/// * Q+: `X₀X_n + X₁X_{n−1} + …`, which for n = 5 is the Klein quadric
///   `X₀X₅ + X₁X₄ + X₂X₃`.
/// * Q: `X₀X₁ + … + X_{n−2}X_{n−1} + X_n²`.
/// * Q−: `X₀X₁ + … + X_{n−3}X_{n−2} + X_{n−1}² − αX_n²`, α the smallest non-square.
/// * W: `X₀Y₁ − X₁Y₀ + … + X_{n−1}Y_n − X_nY_{n−1}`.
pub fn standard_form(f: &FieldCtx, kind: PolarKind, n: usize) -> Result<Form> {
    if !kind.fits_dimension(n) {
        return Err(Error::IncompatibleDimension { kind: kind.symbol().into(), n });
    }
    let d = n + 1;
    let form = match kind {
        PolarKind::Hyperbolic => {
            let terms: Vec<_> = (0..d / 2).map(|i| (i, n - i, 1)).collect();
            Form::Quadratic(QuadraticForm::from_terms(f, d, &terms))
        }
        PolarKind::Parabolic => {
            let mut terms: Vec<_> = (0..n / 2).map(|i| (2 * i, 2 * i + 1, 1)).collect();
            terms.push((n, n, 1));
            Form::Quadratic(QuadraticForm::from_terms(f, d, &terms))
        }
        PolarKind::Elliptic => {
            let mut terms: Vec<_> = (0..(n - 1) / 2).map(|i| (2 * i, 2 * i + 1, 1)).collect();
            terms.push((n - 1, n - 1, 1));
            terms.push((n, n, f.neg(f.nonsquare())));
            Form::Quadratic(QuadraticForm::from_terms(f, d, &terms))
        }
        PolarKind::Symplectic => {
            let mut m = Matrix::zeros(d, d);
            for i in 0..d / 2 {
                m[(2 * i, 2 * i + 1)] = 1;
                m[(2 * i + 1, 2 * i)] = f.neg(1);
            }
            Form::Alternating(BilinearForm::new(f, m, BilinearKind::Alternating)?)
        }
    };
    Ok(form)
}

/// Type of a section `A ∩ 𝒫`: a cone with vertex the radical of the induced
/// form and base a non-degenerate polar space of the given type in a
/// complement of projective dimension `base_dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionClass {
    /// Projective dimension of the radical (−1 when the section is non-degenerate).
    pub radical_dim: isize,
    pub base_type: PolarKind,
    pub base_dim: isize,
    /// Number of singular (isotropic) points in the section.
    pub points: usize,
}

impl SectionClass {
    pub fn is_nondegenerate(&self) -> bool {
        self.radical_dim == -1
    }

    /// Point count of a cone with this vertex and base.
    pub fn expected_points(&self, q: u32) -> usize {
        let vertex = vertex_points(self.radical_dim, q);
        let scale = (q as usize).pow((self.radical_dim + 1) as u32);
        vertex + scale * base_point_count(self.base_type, self.base_dim, q)
    }
}

fn vertex_points(radical_dim: isize, q: u32) -> usize {
    if radical_dim < 0 {
        0
    } else {
        point_count(radical_dim as usize, q)
    }
}

/// Points of a non-degenerate polar space of the given type in PG(t,q) (t ≥ −1).
fn base_point_count(kind: PolarKind, t: isize, q: u32) -> usize {
    if t < 0 {
        return 0;
    }
    let (r, e) = kind.rank_and_parameter(t as usize);
    polar_point_count(r, e, q)
}

/// Classifies `A ∩ 𝒫` by computing the radical of the induced form and
/// counting singular points.
pub fn classify_section(f: &FieldCtx, form: &Form, a: &Subspace) -> Result<SectionClass> {
    if a.is_empty() {
        return Ok(SectionClass { radical_dim: -1, base_type: PolarKind::Hyperbolic, base_dim: -1, points: 0 });
    }
    let gram = form.orthogonality_matrix().restrict(f, &a.basis_matrix());
    let radical_rank = gram.nullspace(f).len() as isize;
    let radical_dim = radical_rank - 1;
    let base_dim = a.projdim() - radical_rank;
    let q = f.q();

    if let Form::Alternating(_) = form {
        let class = SectionClass {
            radical_dim,
            base_type: PolarKind::Symplectic,
            base_dim,
            points: a.point_count(q),
        };
        return Ok(class);
    }

    let points = form.singular_points(f, a).len();
    let candidates: &[PolarKind] = if base_dim < 0 {
        &[PolarKind::Hyperbolic]
    } else if base_dim % 2 == 0 {
        &[PolarKind::Parabolic]
    } else {
        &[PolarKind::Hyperbolic, PolarKind::Elliptic]
    };
    candidates
        .iter()
        .map(|&base_type| SectionClass { radical_dim, base_type, base_dim, points })
        .find(|c| c.expected_points(q) == points)
        .ok_or_else(|| {
            Error::CountMismatch(format!(
                "section with radical dim {radical_dim}, base dim {base_dim} has {points} singular points"
            ))
        })
}
