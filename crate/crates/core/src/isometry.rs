//! Similarities of quadratic forms and their constructive extension.
//!
//! Matrices act on column vectors: the image of `x` is `Mx`, and `M` is a
//! similarity of the form with Gram matrix `S` when `MᵀSM = λS`.
//!
//! Isometries are built by completing orthogonal frames. A non-degenerate
//! form in odd characteristic has an orthogonal basis with values
//! `diag(1, …, 1, d)`, `d ∈ {1, ν}`; two forms are isometric exactly when
//! their `d` agree, and the basis change between the normalized frames is an
//! isometry.

use crate::error::{Error, Result};
use crate::forms::{classify_section, Form, PolarKind};
use crate::gf::{Elem, FieldCtx};
use crate::linalg::{self, Matrix};
use crate::pointset::PointSet;
use crate::polarspace::PolarSpace;
use crate::projgeom::{normalize, ProjPoint, Subspace};

/// An invertible matrix `M` with `MᵀSM = λS` for a fixed form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collineation {
    matrix: Matrix,
    multiplier: Elem,
}

impl Collineation {
    /// Fails with `NotSimilarity` unless `m` is a similarity of `form`.
    pub fn new(f: &FieldCtx, form: &Form, m: Matrix) -> Result<Self> {
        let multiplier = is_similarity(f, form, &m).ok_or(Error::NotSimilarity)?;
        Ok(Collineation { matrix: m, multiplier })
    }

    pub fn identity(dim: usize) -> Self {
        Collineation { matrix: Matrix::identity(dim), multiplier: 1 }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn multiplier(&self) -> Elem {
        self.multiplier
    }

    pub fn apply(&self, f: &FieldCtx, v: &[Elem]) -> Vec<Elem> {
        self.matrix.apply(f, v)
    }

    pub fn apply_point(&self, f: &FieldCtx, p: &ProjPoint) -> ProjPoint {
        ProjPoint::new(f, &self.apply(f, p.coords())).expect("invertible matrix")
    }

    pub fn apply_subspace(&self, f: &FieldCtx, a: &Subspace) -> Subspace {
        let images: Vec<Vec<Elem>> = a.basis().iter().map(|b| self.apply(f, b)).collect();
        Subspace::span(f, a.vector_dim(), &images)
    }

    /// Image index of every point of `space`.
    pub fn permutation(&self, space: &PolarSpace) -> Result<Vec<usize>> {
        let f = space.field();
        space
            .points()
            .iter()
            .map(|p| space.index_of(&self.apply_point(f, p)).ok_or(Error::NotSimilarity))
            .collect()
    }

    pub fn image_set(&self, space: &PolarSpace, s: &PointSet) -> Result<PointSet> {
        let perm = self.permutation(space)?;
        Ok(PointSet::from_indices(s.universe(), s.iter().map(|p| perm[p])))
    }
}

/// The multiplier `λ` with `MᵀSM = λS`, if `M` is an invertible similarity.
pub fn is_similarity(f: &FieldCtx, form: &Form, m: &Matrix) -> Option<Elem> {
    let s = form.orthogonality_matrix();
    if m.rows() != s.rows() || m.cols() != s.cols() || !m.is_invertible(f) {
        return None;
    }
    let t = m.transpose().mul(f, s).mul(f, m);
    let d = s.rows();
    let (i, j) = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).find(|&(i, j)| s[(i, j)] != 0)?;
    let lambda = f.div(t[(i, j)], s[(i, j)]).ok()?;
    (lambda != 0 && t == s.scale(f, lambda)).then_some(lambda)
}

fn require_quadratic(form: &Form) -> Result<&Matrix> {
    match form {
        Form::Quadratic(q) => Ok(q.gram()),
        Form::Alternating(_) => Err(Error::BadConfiguration("isometry extension needs a quadratic form".into())),
    }
}

fn gram_of(f: &FieldCtx, s: &Matrix, vs: &[Vec<Elem>]) -> Matrix {
    let rows: Vec<Vec<Elem>> = vs.iter().map(|x| vs.iter().map(|y| s.bilinear(f, x, y)).collect()).collect();
    Matrix::from_rows(&rows)
}

/// Orthogonal basis of `fixed^⊥`, normalized to values `(1, …, 1, d)` with
/// `d ∈ {1, ν}`. Returns the basis and `d` (1 for an empty complement).
fn normalized_complement(f: &FieldCtx, s: &Matrix, fixed: &[Vec<Elem>]) -> Result<(Vec<Vec<Elem>>, Elem)> {
    let dim = s.rows();
    // Current basis of the part still to be diagonalized.
    let mut rest: Vec<Vec<Elem>> = if fixed.is_empty() {
        Matrix::identity(dim).to_rows()
    } else {
        let eqs: Vec<Vec<Elem>> = fixed.iter().map(|u| s.apply(f, u)).collect();
        Matrix::from_rows(&eqs).nullspace(f)
    };
    let mut frame: Vec<Vec<Elem>> = Vec::new();
    while !rest.is_empty() {
        let w = anisotropic_vector(f, s, &rest).ok_or(Error::DegenerateSpan)?;
        let row: Vec<Elem> = rest.iter().map(|b| s.bilinear(f, &w, b)).collect();
        let coeffs = Matrix::from_rows(&[row]).nullspace(f);
        rest = coeffs
            .iter()
            .map(|c| c.iter().zip(&rest).fold(vec![0; dim], |acc, (&ci, b)| linalg::axpy(f, &acc, ci, b)))
            .collect();
        frame.push(w);
    }
    let values = |frame: &[Vec<Elem>], i: usize| s.bilinear(f, &frame[i], &frame[i]);
    let k = frame.len();
    for i in 0..k.saturating_sub(1) {
        let a = values(&frame, i);
        if let Some(r) = f.sqrt(a) {
            frame[i] = linalg::scale_vec(f, f.inv(r)?, &frame[i]);
            continue;
        }
        // a non-square: x = s·w_i + t·w_{i+1} with s²a + t²b = 1, and y ⊥ x.
        let b = values(&frame, i + 1);
        let (sc, tc) = f
            .elements()
            .find_map(|sc| {
                let rhs = f.div(f.sub(1, f.mul(f.mul(sc, sc), a)), b).ok()?;
                f.sqrt(rhs).map(|tc| (sc, tc))
            })
            .expect("a binary non-degenerate form represents 1");
        let x = linalg::axpy(f, &linalg::scale_vec(f, sc, &frame[i]), tc, &frame[i + 1]);
        let y = linalg::axpy(f, &linalg::scale_vec(f, f.mul(tc, b), &frame[i]), f.neg(f.mul(sc, a)), &frame[i + 1]);
        frame[i] = x;
        frame[i + 1] = y;
    }
    let mut d = 1;
    if k > 0 {
        let last = values(&frame, k - 1);
        let target = if f.is_square(last) { 1 } else { f.nonsquare() };
        let c = f.sqrt(f.div(target, last)?).expect("same square class");
        frame[k - 1] = linalg::scale_vec(f, c, &frame[k - 1]);
        d = target;
    }
    Ok((frame, d))
}

/// A vector of `span(basis)` with nonzero value, trying basis vectors and
/// then pairwise sums (one of these works when the span is non-degenerate).
fn anisotropic_vector(f: &FieldCtx, s: &Matrix, basis: &[Vec<Elem>]) -> Option<Vec<Elem>> {
    if let Some(b) = basis.iter().find(|b| s.bilinear(f, b, b) != 0) {
        return Some(b.clone());
    }
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let v = linalg::add_vec(f, &basis[i], &basis[j]);
            if s.bilinear(f, &v, &v) != 0 {
                return Some(v);
            }
        }
    }
    None
}

/// Extends the vector map `src[i] ↦ dst[i]` to an isometry of the whole
/// space. Both tuples must have equal Gram matrices and span non-degenerate
/// subspaces.
pub fn witt_extend_vectors(f: &FieldCtx, form: &Form, src: &[Vec<Elem>], dst: &[Vec<Elem>]) -> Result<Collineation> {
    let s = require_quadratic(form)?;
    let dim = s.rows();
    if src.len() != dst.len() {
        return Err(Error::DimensionMismatch { expected: src.len(), got: dst.len() });
    }
    if src.iter().chain(dst).any(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: src.iter().chain(dst).map(Vec::len).find(|&l| l != dim).unwrap() });
    }
    if gram_of(f, s, src) != gram_of(f, s, dst) {
        return Err(Error::GramMismatch);
    }
    for side in [src, dst] {
        if !side.is_empty() && Matrix::from_rows(side).rank(f) < side.len() {
            return Err(Error::DependentVectors);
        }
        if !gram_of(f, s, side).is_invertible(f) && !side.is_empty() {
            return Err(Error::DegenerateSpan);
        }
    }
    let (src_rest, d_src) = normalized_complement(f, s, src)?;
    let (dst_rest, d_dst) = normalized_complement(f, s, dst)?;
    if d_src != d_dst {
        return Err(Error::GramMismatch);
    }
    let from = Matrix::from_columns(&[src, &src_rest[..]].concat());
    let to = Matrix::from_columns(&[dst, &dst_rest[..]].concat());
    let m = to.mul(f, &from.inverse(f)?);
    let c = Collineation::new(f, form, m)?;
    debug_assert_eq!(c.multiplier, 1);
    Ok(c)
}

/// Point version of [`witt_extend_vectors`]: finds representatives of the
/// target points whose Gram matrix equals that of the source points.
pub fn witt_extend(f: &FieldCtx, form: &Form, pairs: &[(ProjPoint, ProjPoint)]) -> Result<Collineation> {
    let s = require_quadratic(form)?;
    let src: Vec<Vec<Elem>> = pairs.iter().map(|(a, _)| a.coords().to_vec()).collect();
    let dst: Vec<Vec<Elem>> = pairs.iter().map(|(_, b)| b.coords().to_vec()).collect();
    let target = gram_of(f, s, &src);
    let raw = gram_of(f, s, &dst);
    let mut scalars = Vec::with_capacity(pairs.len());
    if !fit_scalars(f, &target, &raw, &mut scalars) {
        return Err(Error::GramMismatch);
    }
    let dst: Vec<Vec<Elem>> = dst.iter().zip(&scalars).map(|(v, &c)| linalg::scale_vec(f, c, v)).collect();
    witt_extend_vectors(f, form, &src, &dst)
}

/// Scalars `c` with `c_i c_j raw[i][j] = target[i][j]`, chosen greedily
/// with backtracking.
fn fit_scalars(f: &FieldCtx, target: &Matrix, raw: &Matrix, chosen: &mut Vec<Elem>) -> bool {
    let i = chosen.len();
    if i == target.rows() {
        return true;
    }
    for c in f.elements().skip(1) {
        let fits = (0..i).all(|j| f.mul(f.mul(c, chosen[j]), raw[(i, j)]) == target[(i, j)])
            && f.mul(f.mul(c, c), raw[(i, i)]) == target[(i, i)];
        if fits {
            chosen.push(c);
            if fit_scalars(f, target, raw, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// An isometry `M` from `(V, a)` to `(V, b)`: `b(Mx) = a(x)`, that is
/// `MᵀS_bM = S_a`. Fails with `GramMismatch` when the forms are not
/// isometric.
pub fn isometry_between(f: &FieldCtx, a: &Form, b: &Form) -> Result<Matrix> {
    let (sa, sb) = (require_quadratic(a)?, require_quadratic(b)?);
    if sa.rows() != sb.rows() {
        return Err(Error::DimensionMismatch { expected: sa.rows(), got: sb.rows() });
    }
    let (fa, da) = normalized_complement(f, sa, &[])?;
    let (fb, db) = normalized_complement(f, sb, &[])?;
    if da != db {
        return Err(Error::GramMismatch);
    }
    let m = Matrix::from_columns(&fb).mul(f, &Matrix::from_columns(&fa).inverse(f)?);
    debug_assert_eq!(m.transpose().mul(f, sb).mul(f, &m), *sa);
    Ok(m)
}

/// Extends a similarity `phi` of `π^⊥` by the identity on `π`:
/// `x + y ↦ x + φ(y)` for `x ∈ π`, `y ∈ π^⊥`.
///
/// `phi` acts on coordinates with respect to the canonical basis of
/// `form.perp(pi)`. A multiplier that is a non-square is rejected; a square
/// multiplier is first scaled away.
pub fn block_extend(f: &FieldCtx, form: &Form, pi: &Subspace, phi: &Matrix) -> Result<Collineation> {
    let perp = form.perp(f, pi)?;
    if !pi.meet(f, &perp).is_empty() || pi.rank() + perp.rank() != form.vector_dim() {
        return Err(Error::NotDirectSum);
    }
    if phi.rows() != perp.rank() || phi.cols() != perp.rank() {
        return Err(Error::DimensionMismatch { expected: perp.rank(), got: phi.rows() });
    }
    let local = form.restrict(f, &perp);
    let lambda = is_similarity(f, &local, phi).ok_or(Error::NotSimilarity)?;
    let root = f.sqrt(lambda).ok_or(Error::NotSimilarity)?;
    let phi = phi.scale(f, f.inv(root)?);

    let k = pi.rank();
    let d = form.vector_dim();
    let mut block = Matrix::identity(d);
    for i in 0..phi.rows() {
        for j in 0..phi.cols() {
            block[(k + i, k + j)] = phi[(i, j)];
        }
    }
    let c = Matrix::from_columns(&[pi.basis(), perp.basis()].concat());
    let m = c.mul(f, &block).mul(f, &c.inverse(f)?);
    Collineation::new(f, form, m)
}

fn elliptic_section(f: &FieldCtx, form: &Form, a: &Subspace, projdim: isize) -> bool {
    a.projdim() == projdim
        && classify_section(f, form, a).is_ok_and(|c| c.is_nondegenerate() && c.base_type == PolarKind::Elliptic)
}

/// Singular vectors `u, v` spanning the hyperbolic line `l` (local
/// coordinates of a form `s`), scaled so that `uᵀSv = 1`.
fn hyperbolic_pair(f: &FieldCtx, local: &Form, l: &Subspace) -> Result<[Vec<Elem>; 2]> {
    let pts = local.singular_points(f, l);
    if pts.len() != 2 {
        return Err(Error::BadConfiguration(format!("expected a hyperbolic line, found {} singular points", pts.len())));
    }
    let s = local.orthogonality_matrix();
    let u = pts[0].coords().to_vec();
    let v = pts[1].coords().to_vec();
    let b = s.bilinear(f, &u, &v);
    Ok([u, linalg::scale_vec(f, f.inv(b)?, &v)])
}

/// A similarity of the ambient quadric that fixes the elliptic 3-space `pi`
/// pointwise and maps the elliptic 5-space `sigma1` onto `sigma2`, where
/// `pi = sigma1 ∩ sigma2`.
///
/// The map is the identity on `π` glued to an isometry of `π^⊥` that sends
/// the hyperbolic line `σ₁ ∩ π^⊥` onto `σ₂ ∩ π^⊥`.
pub fn map_elliptic_5space(
    f: &FieldCtx,
    form: &Form,
    pi: &Subspace,
    sigma1: &Subspace,
    sigma2: &Subspace,
) -> Result<Collineation> {
    let bad = |msg: &str| Error::BadConfiguration(msg.to_string());
    if form.vector_dim() != 8 || !form.is_nondegenerate(f) {
        return Err(bad("ambient space must be a non-degenerate quadric of PG(7,q)"));
    }
    if !elliptic_section(f, form, pi, 3) {
        return Err(bad("π is not an elliptic 3-space"));
    }
    if !elliptic_section(f, form, sigma1, 5) || !elliptic_section(f, form, sigma2, 5) {
        return Err(bad("σ₁ and σ₂ must be elliptic 5-spaces"));
    }
    if sigma1.meet(f, sigma2) != *pi && sigma1 != sigma2 {
        return Err(bad("π is not σ₁ ∩ σ₂"));
    }
    if !sigma1.contains(f, pi) || !sigma2.contains(f, pi) {
        return Err(bad("π is not contained in both 5-spaces"));
    }
    let perp = form.perp(f, pi)?;
    let local = form.restrict(f, &perp);
    let to_local = |l: &Subspace| -> Result<Subspace> {
        let coords: Vec<Vec<Elem>> = l
            .basis()
            .iter()
            .map(|b| perp.coordinates(f, b).ok_or_else(|| bad("line outside π^⊥")))
            .collect::<Result<_>>()?;
        Ok(Subspace::span(f, perp.rank(), &coords))
    };
    let l1 = to_local(&sigma1.meet(f, &perp))?;
    let l2 = to_local(&sigma2.meet(f, &perp))?;
    let src = hyperbolic_pair(f, &local, &l1)?;
    let dst = hyperbolic_pair(f, &local, &l2)?;
    let phi = witt_extend_vectors(f, &local, &src, &dst)?;
    let big = block_extend(f, form, pi, phi.matrix())?;

    if big.apply_subspace(f, sigma1) != *sigma2 {
        return Err(bad("extended map does not send σ₁ to σ₂"));
    }
    if pi.basis().iter().any(|b| big.apply(f, b) != *b) {
        return Err(bad("extended map moves a point of π"));
    }
    Ok(big)
}

/// Whether `m` fixes every point of `a` (as projective points).
pub fn fixes_pointwise(f: &FieldCtx, m: &Collineation, a: &Subspace) -> bool {
    a.points(f).iter().all(|p| normalize(f, &m.apply(f, p.coords())).as_deref() == Some(p.coords()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::standard_form;
    use crate::projgeom::enumerate_subspaces;

    fn field(q: u64) -> FieldCtx {
        FieldCtx::new(q).unwrap()
    }

    fn unit(d: usize, i: usize) -> Vec<Elem> {
        let mut v = vec![0; d];
        v[i] = 1;
        v
    }

    #[test]
    fn identity_and_scalars() {
        let f = field(5);
        let form = standard_form(&f, PolarKind::Hyperbolic, 5).unwrap();
        assert_eq!(is_similarity(&f, &form, &Matrix::identity(6)), Some(1));
        assert_eq!(is_similarity(&f, &form, &Matrix::identity(6).scale(&f, 2)), Some(4));
        assert_eq!(is_similarity(&f, &form, &Matrix::zeros(6, 6)), None);
        let mut swap = Matrix::identity(6);
        swap[(0, 0)] = 0;
        swap[(0, 1)] = 1;
        swap[(1, 1)] = 0;
        swap[(1, 0)] = 1;
        assert_eq!(is_similarity(&f, &form, &swap), None);
    }

    #[test]
    fn empty_extension_is_identity() {
        for (q, kind, n) in [(3, PolarKind::Elliptic, 3), (5, PolarKind::Hyperbolic, 7), (9, PolarKind::Parabolic, 4)] {
            let f = field(q);
            let form = standard_form(&f, kind, n).unwrap();
            let c = witt_extend(&f, &form, &[]).unwrap();
            assert_eq!(c, Collineation::identity(n + 1));
        }
    }

    #[test]
    fn hyperbolic_lines_of_q3_3_are_equivalent() {
        let f = field(3);
        let form = standard_form(&f, PolarKind::Elliptic, 3).unwrap();
        let lines: Vec<Subspace> = enumerate_subspaces(3, 1, &f)
            .into_iter()
            .filter(|l| form.singular_points(&f, l).len() == 2)
            .collect();
        assert_eq!(lines.len(), 45);
        let src = hyperbolic_pair(&f, &form, &lines[0]).unwrap();
        for l in &lines {
            let dst = hyperbolic_pair(&f, &form, l).unwrap();
            let c = witt_extend_vectors(&f, &form, &src, &dst).unwrap();
            assert_eq!(c.multiplier(), 1);
            assert_eq!(c.apply_subspace(&f, &lines[0]), *l);
        }
    }

    #[test]
    fn point_pairs_are_rescaled() {
        let f = field(3);
        let form = standard_form(&f, PolarKind::Elliptic, 3).unwrap();
        let pts = form.singular_points(&f, &Subspace::whole(4));
        // any ordered pair of distinct points maps to any other: the group is
        // 2-transitive on the 10 points
        let (a, b) = (&pts[0], &pts[1]);
        for c in &pts {
            for d in &pts {
                if c == d {
                    continue;
                }
                let m = witt_extend(&f, &form, &[(a.clone(), c.clone()), (b.clone(), d.clone())]).unwrap();
                assert_eq!(m.apply_point(&f, a), *c);
                assert_eq!(m.apply_point(&f, b), *d);
            }
        }
    }

    #[test]
    fn witt_rejects_bad_input() {
        let f = field(3);
        let form = standard_form(&f, PolarKind::Elliptic, 3).unwrap();
        let pts = form.singular_points(&f, &Subspace::whole(4));
        // singular point to a non-singular point
        let ns = ProjPoint::new(&f, &[0, 0, 1, 0]).unwrap();
        assert_eq!(witt_extend(&f, &form, &[(pts[0].clone(), ns)]), Err(Error::GramMismatch));
        // a single singular point spans a degenerate line... point
        assert_eq!(
            witt_extend(&f, &form, &[(pts[0].clone(), pts[1].clone())]),
            Err(Error::DegenerateSpan)
        );
        let mismatched = witt_extend_vectors(&f, &form, &[unit(4, 2)], &[unit(4, 0)]);
        assert_eq!(mismatched, Err(Error::GramMismatch));
    }

    #[test]
    fn isometry_between_forms() {
        let f = field(3);
        let a = standard_form(&f, PolarKind::Elliptic, 3).unwrap();
        let b = Form::Quadratic(crate::forms::QuadraticForm::from_terms(&f, 4, &[(0, 1, 1), (2, 2, 1), (3, 3, 1)]));
        let m = isometry_between(&f, &a, &b).unwrap();
        let (sa, sb) = (a.orthogonality_matrix(), b.orthogonality_matrix());
        assert_eq!(m.transpose().mul(&f, sb).mul(&f, &m), *sa);
        let hyp = standard_form(&f, PolarKind::Hyperbolic, 3).unwrap();
        assert_eq!(isometry_between(&f, &a, &hyp), Err(Error::GramMismatch));
    }

    /// π^⊥ = ⟨e0, e2+e5, e3+e4, e7⟩ carries `ad + b² + c²` in Q+(7,3).
    fn split_q7() -> (FieldCtx, Form, Subspace) {
        let f = field(3);
        let form = standard_form(&f, PolarKind::Hyperbolic, 7).unwrap();
        let pi = Subspace::span(&f, 8, &[
            unit(8, 1),
            unit(8, 6),
            vec![0, 0, 1, 0, 0, 2, 0, 0],
            vec![0, 0, 0, 1, 2, 0, 0, 0],
        ]);
        (f, form, pi)
    }

    #[test]
    fn block_extension_fixes_pi() {
        let (f, form, pi) = split_q7();
        let perp = form.perp(&f, &pi).unwrap();
        let local = form.restrict(&f, &perp);
        assert_eq!(
            classify_section(&f, &form, &perp).unwrap().base_type,
            PolarKind::Elliptic
        );
        assert_eq!(block_extend(&f, &form, &pi, &Matrix::identity(4)).unwrap(), Collineation::identity(8));

        let lpts = local.singular_points(&f, &Subspace::whole(4));
        let phi = witt_extend(&f, &local, &[(lpts[0].clone(), lpts[3].clone()), (lpts[1].clone(), lpts[7].clone())])
            .unwrap();
        assert_ne!(*phi.matrix(), Matrix::identity(4));
        let big = block_extend(&f, &form, &pi, phi.matrix()).unwrap();
        assert_eq!(big.multiplier(), 1);
        assert!(fixes_pointwise(&f, &big, &pi));
        let fixed_quadric: Vec<_> = form.singular_points(&f, &pi);
        assert_eq!(fixed_quadric.len(), 10);
        // the restriction to π^⊥ is φ again
        for (i, b) in perp.basis().iter().enumerate() {
            let image = perp.coordinates(&f, &big.apply(&f, b)).unwrap();
            assert_eq!(image, phi.matrix().column(i));
        }
        let space = PolarSpace::build(&"Q+:7:3".parse().unwrap()).unwrap();
        let mut perm = big.permutation(&space).unwrap();
        perm.sort_unstable();
        assert_eq!(perm, (0..1120).collect::<Vec<_>>());
    }

    #[test]
    fn block_extension_rejects_nonsquare_multiplier() {
        let (f, form, pi) = split_q7();
        let perp = form.perp(&f, &pi).unwrap();
        let local = form.restrict(&f, &perp);
        // (a, b, c, d) ↦ (−a, b+c, b−c, d) scales ad + b² + c² by −1
        let phi = Matrix::from_rows(&[vec![2, 0, 0, 0], vec![0, 1, 1, 0], vec![0, 1, 2, 0], vec![0, 0, 0, 1]]);
        assert_eq!(is_similarity(&f, &local, &phi), Some(2));
        assert_eq!(block_extend(&f, &form, &pi, &phi), Err(Error::NotSimilarity));
        // −I has multiplier 1: identity on π, −1 on π^⊥
        let minus = block_extend(&f, &form, &pi, &Matrix::identity(4).scale(&f, 2)).unwrap();
        assert!(fixes_pointwise(&f, &minus, &pi));
        assert!(perp.basis().iter().all(|b| minus.apply(&f, b) == linalg::scale_vec(&f, 2, b)));
        // a square multiplier is scaled away: 2φ₀ with φ₀ a similarity of multiplier 1
        let f5 = field(5);
        let form5 = standard_form(&f5, PolarKind::Hyperbolic, 7).unwrap();
        let pi5 = Subspace::span(&f5, 8, &[unit(8, 1), unit(8, 6), unit(8, 2), unit(8, 5)]);
        let scaled = block_extend(&f5, &form5, &pi5, &Matrix::identity(4).scale(&f5, 2)).unwrap();
        assert_eq!(scaled, Collineation::identity(8));
    }

    #[test]
    fn block_extension_needs_direct_sum() {
        let f = field(3);
        let form = standard_form(&f, PolarKind::Hyperbolic, 7).unwrap();
        let degenerate = Subspace::span(&f, 8, &[unit(8, 0), unit(8, 1), unit(8, 2), unit(8, 3)]);
        assert_eq!(block_extend(&f, &form, &degenerate, &Matrix::identity(4)), Err(Error::NotDirectSum));
    }

    #[test]
    fn elliptic_5space_map() {
        let (f, form, pi) = split_q7();
        let perp = form.perp(&f, &pi).unwrap();
        let lines: Vec<Subspace> = enumerate_subspaces(7, 1, &f)
            .into_iter()
            .filter(|l| perp.contains(&f, l) && form.singular_points(&f, l).len() == 2)
            .collect();
        let lines: Vec<Subspace> = std::iter::once(lines[0].clone())
            .chain(lines.iter().filter(|l| l.meet(&f, &lines[0]).is_empty()).take(3).cloned())
            .collect();
        let space = PolarSpace::build(&"Q+:7:3".parse().unwrap()).unwrap();
        let s1 = pi.join(&f, &lines[0]);
        assert_eq!(
            map_elliptic_5space(&f, &form, &pi, &s1, &s1).unwrap(),
            Collineation::identity(8)
        );
        for l in &lines[1..] {
            let s2 = pi.join(&f, l);
            let phi = map_elliptic_5space(&f, &form, &pi, &s1, &s2).unwrap();
            assert!(fixes_pointwise(&f, &phi, &pi));
            let q1 = space.section_points(&s1);
            let q2 = space.section_points(&s2);
            assert_eq!(q1.len(), 112);
            assert_eq!(phi.image_set(&space, &q1).unwrap(), q2);
        }
        let wrong = map_elliptic_5space(&f, &form, &s1, &pi, &pi);
        assert!(matches!(wrong, Err(Error::BadConfiguration(_))));
    }
}
