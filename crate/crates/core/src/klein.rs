//! The Klein correspondence between lines of PG(3,q) and points of the
//! quadric `X0X5 + X1X4 + X2X3 = 0`, the ovoids `O(f₁,f₂)` with their line
//! spreads `S(f₁,f₂)`, and line spreads with no tangents to an elliptic
//! quadric of PG(3,q).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{classify_section, standard_form, Form, PolarKind, QuadraticForm};
use crate::gf::{Elem, FieldCtx};
use crate::linalg::Matrix;
use crate::projgeom::{ProjPoint, Subspace};

/// A function `GF(q)² → GF(q)` stored as its value table, `x` major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldFn {
    q: u32,
    values: Vec<Elem>,
}

impl FieldFn {
    pub fn from_fn(f: &FieldCtx, g: impl Fn(Elem, Elem) -> Elem) -> Self {
        let q = f.q();
        let values = (0..q).flat_map(|x| (0..q).map(move |y| (x, y))).map(|(x, y)| g(x, y)).collect();
        FieldFn { q, values }
    }

    pub fn from_table(f: &FieldCtx, values: Vec<Elem>) -> Result<Self> {
        let q = f.q();
        if values.len() != (q * q) as usize {
            return Err(Error::DimensionMismatch { expected: (q * q) as usize, got: values.len() });
        }
        for &v in &values {
            f.check(v)?;
        }
        Ok(FieldFn { q, values })
    }

    pub fn zero(f: &FieldCtx) -> Self {
        Self::from_fn(f, |_, _| 0)
    }

    /// `a·x + b·y`.
    pub fn linear(f: &FieldCtx, a: Elem, b: Elem) -> Self {
        Self::from_fn(f, |x, y| f.add(f.mul(a, x), f.mul(b, y)))
    }

    pub fn eval(&self, x: Elem, y: Elem) -> Elem {
        self.values[(x * self.q + y) as usize]
    }

    pub fn values(&self) -> &[Elem] {
        &self.values
    }
}

/// Plücker coordinates `(p₁₂, p₄₂, p₁₄, p₂₃, p₁₃, p₃₄)` of the line `⟨u, v⟩`,
/// with `p_ij = u_i v_j − u_j v_i` and coordinates numbered from 1.
///
/// ```
/// use polarforge::gf::FieldCtx;
/// use polarforge::klein::{klein_form, plucker};
///
/// let f = FieldCtx::new(5).unwrap();
/// let p = plucker(&f, &[1, 0, 0, 0], &[0, 1, 0, 0]).unwrap();
/// assert_eq!(p.coords(), &[1, 0, 0, 0, 0, 0]);
/// assert!(klein_form(&f).is_singular_vector(&f, p.coords()));
/// ```
pub fn plucker(f: &FieldCtx, u: &[Elem], v: &[Elem]) -> Result<ProjPoint> {
    if u.len() != 4 || v.len() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: u.len().max(v.len()) });
    }
    let p = |i: usize, j: usize| f.sub(f.mul(u[i - 1], v[j - 1]), f.mul(u[j - 1], v[i - 1]));
    let coords = [p(1, 2), p(4, 2), p(1, 4), p(2, 3), p(1, 3), p(3, 4)];
    ProjPoint::new(f, &coords).map_err(|_| Error::DependentVectors)
}

/// Klein image of a line of PG(3,q).
pub fn line_to_klein(f: &FieldCtx, line: &Subspace) -> Result<ProjPoint> {
    match line.basis() {
        [u, v] if line.vector_dim() == 4 => plucker(f, u, v),
        _ => Err(Error::BadConfiguration("not a line of PG(3,q)".into())),
    }
}

/// The quadric of the Klein correspondence, `X0X5 + X1X4 + X2X3`.
pub fn klein_form(f: &FieldCtx) -> Form {
    standard_form(f, PolarKind::Hyperbolic, 5).expect("valid dimension")
}

/// `O(f₁,f₂)` together with the verdict of the pairwise ovoid condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KleinOvoid {
    /// `(1,x,y,f₁,f₂,−y·f₁−x·f₂)` for `(x,y)` in `x`-major order, then `(0,0,0,0,0,1)`.
    pub points: Vec<ProjPoint>,
    pub pair_condition: bool,
}

pub fn ovoid_from_f(f: &FieldCtx, f1: &FieldFn, f2: &FieldFn) -> KleinOvoid {
    let mut points = Vec::with_capacity(f.q() as usize * f.q() as usize + 1);
    for (x, y) in plane(f) {
        let (a, b) = (f1.eval(x, y), f2.eval(x, y));
        let last = f.neg(f.add(f.mul(y, a), f.mul(x, b)));
        points.push(ProjPoint::new(f, &[1, x, y, a, b, last]).expect("first coordinate is 1"));
    }
    points.push(ProjPoint::new(f, &[0, 0, 0, 0, 0, 1]).unwrap());
    KleinOvoid { points, pair_condition: all_pairs_ok(f, f1, f2) }
}

fn plane(f: &FieldCtx) -> impl Iterator<Item = (Elem, Elem)> {
    let q = f.q();
    (0..q).flat_map(move |x| (0..q).map(move |y| (x, y)))
}

fn all_pairs_ok(f: &FieldCtx, f1: &FieldFn, f2: &FieldFn) -> bool {
    let pts: Vec<_> = plane(f).collect();
    (0..pts.len()).into_par_iter().all(|i| {
        (i + 1..pts.len()).all(|j| pair_condition(f, f1, f2, pts[i], pts[j]).expect("distinct points"))
    })
}

/// `(x₁−x₂)(f₂(x₂,y₂)−f₂(x₁,y₁)) + (y₁−y₂)(f₁(x₂,y₂)−f₁(x₁,y₁)) ≠ 0`.
pub fn pair_condition(f: &FieldCtx, f1: &FieldFn, f2: &FieldFn, a: (Elem, Elem), b: (Elem, Elem)) -> Result<bool> {
    if a == b {
        return Err(Error::SamePoint);
    }
    let ((x1, y1), (x2, y2)) = (a, b);
    let t1 = f.mul(f.sub(x1, x2), f.sub(f2.eval(x2, y2), f2.eval(x1, y1)));
    let t2 = f.mul(f.sub(y1, y2), f.sub(f1.eval(x2, y2), f1.eval(x1, y1)));
    Ok(f.add(t1, t2) != 0)
}

/// The lines `ℓ_{x,y} = ⟨(1,0,−f₁,x), (0,1,f₂,y)⟩` in `x`-major order,
/// then `ℓ∞ = ⟨e₂, e₃⟩`. No spread property is checked.
pub fn spread_lines_from_f(f: &FieldCtx, f1: &FieldFn, f2: &FieldFn) -> Vec<Subspace> {
    let mut lines: Vec<Subspace> = plane(f)
        .map(|(x, y)| {
            let u = vec![1, 0, f.neg(f1.eval(x, y)), x];
            let v = vec![0, 1, f2.eval(x, y), y];
            Subspace::span(f, 4, &[u, v])
        })
        .collect();
    lines.push(Subspace::span(f, 4, &[vec![0, 0, 1, 0], vec![0, 0, 0, 1]]));
    lines
}

/// `S(f₁,f₂)`; fails with `NotAnOvoid` if the pair condition fails anywhere.
pub fn spread_from_f(f: &FieldCtx, f1: &FieldFn, f2: &FieldFn) -> Result<Spread> {
    if !all_pairs_ok(f, f1, f2) {
        return Err(Error::NotAnOvoid);
    }
    Spread::new(f, spread_lines_from_f(f, f1, f2)).map_err(|_| Error::NotAnOvoid)
}

/// `q²+1` pairwise disjoint lines covering PG(3,q).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spread {
    lines: Vec<Subspace>,
}

impl Spread {
    pub fn new(f: &FieldCtx, lines: Vec<Subspace>) -> Result<Self> {
        if !is_spread(f, &lines) {
            return Err(Error::BadConfiguration("lines do not partition PG(3,q)".into()));
        }
        Ok(Spread { lines })
    }

    pub fn lines(&self) -> &[Subspace] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }
}

/// Whether the lines partition the points of PG(3,q).
pub fn is_spread(f: &FieldCtx, lines: &[Subspace]) -> bool {
    let q = f.q() as usize;
    if lines.len() != q * q + 1 || lines.iter().any(|l| l.vector_dim() != 4 || l.rank() != 2) {
        return false;
    }
    let mut seen = vec![false; (q * q + 1) * (q + 1)];
    for l in lines {
        for p in l.points(f) {
            let i = p.index(f.q());
            if std::mem::replace(&mut seen[i], true) {
                return false;
            }
        }
    }
    true
}

/// The two coefficient functions `x + y` and `x + 2y` of the characteristic 3
/// construction.
pub fn char3_functions(f: &FieldCtx) -> Result<(FieldFn, FieldFn)> {
    if f.p() != 3 {
        return Err(Error::WrongCharacteristic { expected: 3, got: f.p() });
    }
    Ok((FieldFn::linear(f, 1, 1), FieldFn::linear(f, 1, 2)))
}

/// `S(x+y, x+2y)`, a spread for `q = 3^h` with `h` odd.
pub fn char3_spread(f: &FieldCtx) -> Result<Spread> {
    let (f1, f2) = char3_functions(f)?;
    spread_from_f(f, &f1, &f2)
}

/// `X0X1 + X2² + X3²`, elliptic when −1 is a non-square.
pub fn char3_census_form(f: &FieldCtx) -> Form {
    Form::Quadratic(QuadraticForm::from_terms(f, 4, &[(0, 1, 1), (2, 2, 1), (3, 3, 1)]))
}

/// `X0X1 + X2² − αX3²`, elliptic for a non-square `α`.
pub fn desarguesian_census_form(f: &FieldCtx, alpha: Elem) -> Form {
    Form::Quadratic(QuadraticForm::from_terms(f, 4, &[(0, 1, 1), (2, 2, 1), (3, 3, f.neg(alpha))]))
}

/// The column spaces of `(I₂ ; xI₂ + yA)` with `A = (0 α; 1 0)`, followed by
/// `(O ; I₂)`.
pub fn desarguesian_spread(f: &FieldCtx, alpha: Elem) -> Result<Spread> {
    if f.q() % 4 != 1 {
        return Err(Error::BadResidue(f.q() as u64));
    }
    f.check(alpha)?;
    if f.is_square(alpha) {
        return Err(Error::SquareAlpha(alpha));
    }
    let mut lines: Vec<Subspace> = plane(f)
        .map(|(x, y)| Subspace::span(f, 4, &[vec![1, 0, x, y], vec![0, 1, f.mul(alpha, y), x]]))
        .collect();
    lines.push(Subspace::span(f, 4, &[vec![0, 0, 1, 0], vec![0, 0, 0, 1]]));
    Spread::new(f, lines)
}

/// Numbers of spread lines meeting a quadric in 0, 1 and 2 points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub external: usize,
    pub tangent: usize,
    pub bisecant: usize,
}

/// Counts quadric points on each line of the spread. `form` must define an
/// elliptic quadric of PG(3,q).
pub fn spread_census(f: &FieldCtx, spread: &Spread, form: &Form) -> Result<Census> {
    let class = classify_section(f, form, &Subspace::whole(4))?;
    if form.vector_dim() != 4 || !class.is_nondegenerate() || class.base_type != PolarKind::Elliptic {
        return Err(Error::BadConfiguration("census form is not an elliptic quadric of PG(3,q)".into()));
    }
    let counts: Vec<usize> = spread.lines.par_iter().map(|l| form.singular_points(f, l).len()).collect();
    let mut census = Census { external: 0, tangent: 0, bisecant: 0 };
    for c in counts {
        match c {
            0 => census.external += 1,
            1 => census.tangent += 1,
            2 => census.bisecant += 1,
            _ => unreachable!("an elliptic quadric of PG(3,q) contains no line"),
        }
    }
    Ok(census)
}

/// `x⁴ + 2x²y² + y⁴ + x² + 2xy + 2y² + 2`.
pub fn curve_h(f: &FieldCtx, x: Elem, y: Elem) -> Elem {
    let (x2, y2) = (f.mul(x, x), f.mul(y, y));
    let terms = [
        f.mul(x2, x2),
        f.mul(2, f.mul(x2, y2)),
        f.mul(y2, y2),
        x2,
        f.mul(2, f.mul(x, y)),
        f.mul(2, y2),
        2,
    ];
    terms.iter().fold(0, |acc, &t| f.add(acc, t))
}

/// Whether the curve `H(x,y) = 0` has no point over GF(q), `q = 3^h`.
/// Over GF(q²) the curve splits as `(z² − (1−i))(t² − (1+i))` with
/// `t, z = x ± iy`, so points exist exactly when `4 | h`.
pub fn curve_has_no_roots(f: &FieldCtx) -> Result<bool> {
    if f.p() != 3 {
        return Err(Error::WrongCharacteristic { expected: 3, got: f.p() });
    }
    Ok(plane(f).all(|(x, y)| curve_h(f, x, y) != 0))
}

/// Matrix whose columns are the two basis vectors of a line.
pub fn line_matrix(line: &Subspace) -> Matrix {
    Matrix::from_columns(line.basis())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projgeom::enumerate_lines_pg3;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn field(q: u64) -> FieldCtx {
        FieldCtx::new(q).unwrap()
    }

    #[test]
    fn plucker_examples() {
        let f = field(3);
        assert_eq!(plucker(&f, &[1, 0, 0, 0], &[0, 1, 0, 0]).unwrap().coords(), &[1, 0, 0, 0, 0, 0]);
        assert_eq!(plucker(&f, &[0, 0, 1, 0], &[0, 0, 0, 1]).unwrap().coords(), &[0, 0, 0, 0, 0, 1]);
        assert_eq!(plucker(&f, &[1, 2, 0, 1], &[2, 1, 0, 2]), Err(Error::DependentVectors));
    }

    #[test]
    fn klein_is_a_bijection_at_q3() {
        let f = field(3);
        let form = klein_form(&f);
        let lines = enumerate_lines_pg3(&f);
        let images: BTreeSet<ProjPoint> = lines.iter().map(|l| line_to_klein(&f, l).unwrap()).collect();
        assert_eq!(images.len(), 130);
        assert!(images.iter().all(|p| form.is_singular_vector(&f, p.coords())));
        assert_eq!(form.singular_points(&f, &Subspace::whole(6)).len(), 130);
    }

    #[test]
    fn meeting_lines_give_perpendicular_points() {
        let f = field(3);
        let form = klein_form(&f);
        let lines = enumerate_lines_pg3(&f);
        let imgs: Vec<ProjPoint> = lines.iter().map(|l| line_to_klein(&f, l).unwrap()).collect();
        for i in (0..lines.len()).step_by(7) {
            for j in 0..lines.len() {
                let meet = !lines[i].meet(&f, &lines[j]).is_empty();
                assert_eq!(meet, form.orthogonal(&f, imgs[i].coords(), imgs[j].coords()));
            }
        }
    }

    proptest! {
        #[test]
        fn plucker_is_basis_independent(
            u in prop::collection::vec(0u32..9, 4),
            v in prop::collection::vec(0u32..9, 4),
            m in prop::collection::vec(0u32..9, 4),
        ) {
            let f = field(9);
            let (a, b, c, d) = (m[0], m[1], m[2], m[3]);
            let det = f.sub(f.mul(a, d), f.mul(b, c));
            prop_assume!(det != 0);
            if let Ok(p) = plucker(&f, &u, &v) {
                let u2: Vec<Elem> = (0..4).map(|i| f.add(f.mul(a, u[i]), f.mul(b, v[i]))).collect();
                let v2: Vec<Elem> = (0..4).map(|i| f.add(f.mul(c, u[i]), f.mul(d, v[i]))).collect();
                prop_assert_eq!(plucker(&f, &u2, &v2).unwrap(), p.clone());
                prop_assert!(klein_form(&f).is_singular_vector(&f, p.coords()));
            }
        }
    }

    #[test]
    fn char3_functions_give_an_ovoid() {
        let f = field(3);
        let (f1, f2) = char3_functions(&f).unwrap();
        let o = ovoid_from_f(&f, &f1, &f2);
        assert_eq!(o.points.len(), 10);
        assert!(o.pair_condition);
        let form = klein_form(&f);
        assert!(o.points.iter().all(|p| form.is_singular_vector(&f, p.coords())));
        let pairs: Vec<_> = plane(&f).collect();
        let mut checked = 0;
        for i in 0..9 {
            for j in i + 1..9 {
                let (a, b) = (pairs[i], pairs[j]);
                assert!(pair_condition(&f, &f1, &f2, a, b).unwrap());
                // the expression collapses to −((x₁−x₂)² + (y₁−y₂)²)
                let (dx, dy) = (f.sub(a.0, b.0), f.sub(a.1, b.1));
                assert_ne!(f.add(f.mul(dx, dx), f.mul(dy, dy)), 0);
                checked += 1;
            }
        }
        assert_eq!(checked, 36);
        assert_eq!(pair_condition(&f, &f1, &f2, (1, 1), (1, 1)), Err(Error::SamePoint));
    }

    #[test]
    fn degenerate_functions_fail() {
        let f = field(3);
        let z = FieldFn::zero(&f);
        assert!(!ovoid_from_f(&f, &z, &z).pair_condition);
        assert_eq!(spread_from_f(&f, &z, &z), Err(Error::NotAnOvoid));
        let x = FieldFn::linear(&f, 1, 0);
        assert!(!pair_condition(&f, &z, &x, (1, 0), (1, 2)).unwrap());
        assert!(pair_condition(&f, &z, &x, (1, 0), (2, 0)).unwrap());
    }

    #[test]
    fn spread_images_match_ovoid() {
        let f = field(3);
        let (f1, f2) = char3_functions(&f).unwrap();
        let spread = char3_spread(&f).unwrap();
        assert_eq!(spread.len(), 10);
        let images: BTreeSet<ProjPoint> = spread.lines().iter().map(|l| line_to_klein(&f, l).unwrap()).collect();
        let ovoid: BTreeSet<ProjPoint> = ovoid_from_f(&f, &f1, &f2).points.into_iter().collect();
        assert_eq!(images, ovoid);
        let inf = spread.lines().last().unwrap();
        assert_eq!(line_to_klein(&f, inf).unwrap().coords(), &[0, 0, 0, 0, 0, 1]);
    }

    /// Spread iff ovoid: random coefficient tables at q = 3.
    #[test]
    fn spread_iff_pairwise_noncollinear() {
        use rand::{Rng, SeedableRng};
        let f = field(3);
        let form = klein_form(&f);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut seen = [0usize; 2];
        for round in 0..400 {
            let (f1, f2) = if round % 4 == 0 {
                // perturb the known ovoid so both verdicts occur
                let (mut a, b) = char3_functions(&f).unwrap();
                let mut vals = a.values().to_vec();
                let k = rng.gen_range(1..9);
                vals[k] = rng.gen_range(0..3);
                a = FieldFn::from_table(&f, vals).unwrap();
                (a, b)
            } else {
                let mut table = || {
                    let mut v: Vec<Elem> = (0..9).map(|_| rng.gen_range(0..3)).collect();
                    v[0] = 0;
                    FieldFn::from_table(&f, v).unwrap()
                };
                (table(), table())
            };
            let o = ovoid_from_f(&f, &f1, &f2);
            let noncollinear = (0..10)
                .all(|i| (i + 1..10).all(|j| !form.orthogonal(&f, o.points[i].coords(), o.points[j].coords())));
            let lines = spread_lines_from_f(&f, &f1, &f2);
            assert_eq!(is_spread(&f, &lines), noncollinear);
            assert_eq!(o.pair_condition, noncollinear);
            seen[noncollinear as usize] += 1;
        }
        assert!(seen[0] > 0 && seen[1] > 0);
    }

    #[test]
    fn char3_census() {
        let f = field(3);
        let c = spread_census(&f, &char3_spread(&f).unwrap(), &char3_census_form(&f)).unwrap();
        assert_eq!(c, Census { external: 5, tangent: 0, bisecant: 5 });
        assert!(char3_spread(&field(5)).is_err());
        // −1 is a square in GF(9): the pair condition fails
        assert_eq!(char3_spread(&field(9)), Err(Error::NotAnOvoid));
    }

    #[test]
    fn char3_census_q27() {
        let f = field(27);
        let c = spread_census(&f, &char3_spread(&f).unwrap(), &char3_census_form(&f)).unwrap();
        assert_eq!(c, Census { external: 365, tangent: 0, bisecant: 365 });
    }

    #[test]
    fn desarguesian_census() {
        for (q, half) in [(5u64, 13usize), (9, 41), (13, 85)] {
            let f = field(q);
            let alpha = f.nonsquare();
            let s = desarguesian_spread(&f, alpha).unwrap();
            let c = spread_census(&f, &s, &desarguesian_census_form(&f, alpha)).unwrap();
            assert_eq!(c, Census { external: half, tangent: 0, bisecant: half }, "q = {q}");
            assert_eq!(c.tangent + 2 * c.bisecant, (q * q + 1) as usize);
        }
        let f = field(5);
        assert_eq!(f.nonsquare(), 2);
        let form = desarguesian_census_form(&f, 2);
        let inf = Subspace::span(&f, 4, &[vec![0, 0, 1, 0], vec![0, 0, 0, 1]]);
        assert!(form.singular_points(&f, &inf).is_empty());
        let zero = Subspace::span(&f, 4, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]]);
        assert_eq!(form.singular_points(&f, &zero).len(), 2);
        assert_eq!(desarguesian_spread(&field(3), 2), Err(Error::BadResidue(3)));
        assert_eq!(desarguesian_spread(&f, 4), Err(Error::SquareAlpha(4)));
    }

    #[test]
    fn census_rejects_non_elliptic_forms() {
        let f = field(5);
        let s = desarguesian_spread(&f, 2).unwrap();
        let hyp = standard_form(&f, PolarKind::Hyperbolic, 3).unwrap();
        assert!(spread_census(&f, &s, &hyp).is_err());
    }

    #[test]
    fn curve_roots() {
        assert!(curve_has_no_roots(&field(3)).unwrap());
        assert!(curve_has_no_roots(&field(27)).unwrap());
        // roots need square roots of 1 ± i, which first exist in GF(3⁴)
        assert!(curve_has_no_roots(&field(9)).unwrap());
        assert!(!curve_has_no_roots(&field(81)).unwrap());
        assert_eq!(curve_has_no_roots(&field(5)), Err(Error::WrongCharacteristic { expected: 3, got: 5 }));
    }

    /// A tangent ℓ_{x,y} of the char-3 spread corresponds to a root of H.
    #[test]
    fn tangents_are_curve_points() {
        for q in [3u64, 9, 27] {
            let f = field(q);
            let (f1, f2) = char3_functions(&f).unwrap();
            let form = char3_census_form(&f);
            let lines = spread_lines_from_f(&f, &f1, &f2);
            for ((x, y), l) in plane(&f).zip(&lines) {
                if (x, y) == (0, 0) {
                    continue;
                }
                let tangent = form.singular_points(&f, l).len() == 1;
                assert_eq!(tangent, curve_h(&f, x, y) == 0, "q = {q}, ({x},{y})");
            }
        }
    }
}
