//! A built polar space: its points, all generators, and point/generator
//! incidence as bitsets.
//!
//! Generators are enumerated depth-first over totally singular flags. A
//! generator G is reached only through its canonical sequence: `p₁ = min G`,
//! `p₂ = min(G ∖ ⟨p₁⟩)`, and so on. During the search each new point must be
//! the smallest point of the layer it adds, which makes every generator appear
//! exactly once. Counts are checked against the closed formulas before the
//! space is handed out.

use std::collections::HashSet;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forms::{
    classify_section, polar_generator_count, polar_point_count, standard_form, Form, PolarKind, SpaceSpec,
};
use crate::gf::{Elem, FieldCtx};
use crate::linalg;
use crate::pointset::PointSet;
use crate::projgeom::{self, point_count, ProjPoint, Subspace};

/// Size guards for [`PolarSpace`] construction.
#[derive(Debug, Clone, Copy)]
pub struct BuildOptions {
    pub max_points: usize,
    pub max_generators: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { max_points: 40_000, max_generators: 400_000 }
    }
}

/// Points, generators and incidences of a polar space.
///
/// ```
/// use polarforge::PolarSpace;
///
/// let w = PolarSpace::build(&"W:3:3".parse().unwrap()).unwrap();
/// assert_eq!((w.num_points(), w.num_generators(), w.generator_size()), (40, 40, 4));
/// let p = w.index_of_vector(&[0, 0, 1, 2]).unwrap();
/// assert_eq!(w.generators_on_point(p).len(), 4);
/// ```
#[derive(Debug, Clone)]
pub struct PolarSpace {
    field: Arc<FieldCtx>,
    form: Form,
    kind: PolarKind,
    n: usize,
    rank: usize,
    parameter: usize,
    points: Vec<ProjPoint>,
    /// Ambient point index → local index, `u32::MAX` for non-points.
    local: Vec<u32>,
    perp: Vec<FixedBitSet>,
    generators: Vec<Subspace>,
    incidence: Vec<FixedBitSet>,
    point_generators: Vec<Vec<u32>>,
}

/// Singular points of `form` in lexicographic order, and the map from
/// PG(n,q) point index to position in that list (`u32::MAX` off the form).
fn singular_points(f: &FieldCtx, form: &Form) -> (Vec<ProjPoint>, Vec<u32>) {
    let n = form.vector_dim() - 1;
    let ambient = point_count(n, f.q());
    let mut points = Vec::new();
    let mut local = vec![u32::MAX; ambient];
    for (idx, slot) in local.iter_mut().enumerate() {
        let p = ProjPoint::from_index(n, f.q(), idx);
        if form.is_singular_vector(f, p.coords()) {
            *slot = points.len() as u32;
            points.push(p);
        }
    }
    (points, local)
}

/// Number of points of the standard polar space, by enumeration of PG(n,q)
/// and without building generators.
pub fn count_points(spec: &SpaceSpec) -> Result<usize> {
    let f = FieldCtx::new(spec.q)?;
    let form = standard_form(&f, spec.kind, spec.n)?;
    if point_count(spec.n, f.q()) > 4_000_000 {
        return Err(Error::TooLarge(format!("PG({},{}) is too large to enumerate", spec.n, spec.q)));
    }
    Ok(singular_points(&f, &form).0.len())
}

impl PolarSpace {
    /// Builds the polar space of the standard form for `spec`.
    pub fn build(spec: &SpaceSpec) -> Result<Self> {
        Self::build_with(spec, &BuildOptions::default())
    }

    pub fn build_with(spec: &SpaceSpec, opts: &BuildOptions) -> Result<Self> {
        let field = Arc::new(FieldCtx::new(spec.q)?);
        let form = standard_form(&field, spec.kind, spec.n)?;
        Self::from_form(field, form, opts)
    }

    /// Builds the polar space of an arbitrary non-degenerate form. The type is
    /// recognised from the number of singular points.
    pub fn from_form(field: Arc<FieldCtx>, form: Form, opts: &BuildOptions) -> Result<Self> {
        let f = &*field;
        if !form.is_nondegenerate(f) {
            return Err(Error::DegenerateForm);
        }
        let dim = form.vector_dim();
        if dim < 2 {
            return Err(Error::IncompatibleDimension { kind: "polar space".into(), n: dim.saturating_sub(1) });
        }
        let n = dim - 1;
        let ambient = point_count(n, f.q());
        if ambient > 4_000_000 {
            return Err(Error::TooLarge(format!("PG({n},{}) has {ambient} points", f.q())));
        }

        let kind = classify_section(f, &form, &Subspace::whole(dim))?.base_type;
        let (rank, parameter) = kind.rank_and_parameter(n);
        if rank == 0 {
            return Err(Error::BadConfiguration("form has no singular points".into()));
        }
        let expected_points = polar_point_count(rank, parameter, f.q());
        let expected_gens = polar_generator_count(rank, parameter, f.q());
        if expected_points > opts.max_points || expected_gens > opts.max_generators {
            return Err(Error::TooLarge(format!(
                "{kind}({n},{}) has {expected_points} points and {expected_gens} generators",
                f.q()
            )));
        }

        let (points, local) = singular_points(f, &form);
        if points.len() != expected_points {
            return Err(Error::CountMismatch(format!(
                "{} singular points, expected {expected_points}",
                points.len()
            )));
        }

        let perp = perp_bitsets(f, &form, &points);
        let mut space = PolarSpace {
            field,
            form,
            kind,
            n,
            rank,
            parameter,
            points,
            local,
            perp,
            generators: Vec::new(),
            incidence: Vec::new(),
            point_generators: Vec::new(),
        };
        space.generators = space.enumerate_generators()?;
        space.build_incidence();
        space.self_check(expected_gens)?;
        Ok(space)
    }

    fn enumerate_generators(&self) -> Result<Vec<Subspace>> {
        let mut out = Vec::new();
        let mut all = FixedBitSet::with_capacity(self.points.len());
        all.insert_range(..);
        let mut basis = Vec::with_capacity(self.rank);
        self.extend_flag(&mut basis, &all, &mut out);
        out.sort();
        let unique: HashSet<&Subspace> = out.iter().collect();
        if unique.len() != out.len() {
            return Err(Error::CountMismatch("duplicate generator in enumeration".into()));
        }
        Ok(out)
    }

    fn extend_flag(&self, basis: &mut Vec<Vec<Elem>>, candidates: &FixedBitSet, out: &mut Vec<Subspace>) {
        let f = &*self.field;
        if basis.len() == self.rank {
            out.push(Subspace::span(f, self.n + 1, basis));
            return;
        }
        let current = Subspace::span(f, self.n + 1, basis);
        // All vectors of the current subspace, zero included.
        let span_vectors: Vec<Vec<Elem>> = (0..(f.q() as usize).pow(basis.len() as u32))
            .map(|mut code| {
                let coeffs: Vec<Elem> = (0..basis.len())
                    .map(|_| {
                        let c = (code % f.q() as usize) as Elem;
                        code /= f.q() as usize;
                        c
                    })
                    .collect();
                current.combine(f, &coeffs)
            })
            .collect();

        'next: for c in candidates.ones() {
            let pc = self.points[c].coords();
            let mut layer = Vec::with_capacity(span_vectors.len());
            for u in &span_vectors {
                let v = linalg::add_vec(f, pc, u);
                let norm = projgeom::normalize(f, &v).expect("c is outside the span");
                let idx = self.local[projgeom::index_of(f.q(), &norm)] as usize;
                if idx < c {
                    continue 'next;
                }
                layer.push(idx);
            }
            let mut next = candidates.clone();
            next.intersect_with(&self.perp[c]);
            next.remove_range(..c + 1);
            for idx in layer {
                next.set(idx, false);
            }
            basis.push(pc.to_vec());
            self.extend_flag(basis, &next, out);
            basis.pop();
        }
    }

    fn build_incidence(&mut self) {
        let f = &*self.field;
        let incidence: Vec<FixedBitSet> = self
            .generators
            .par_iter()
            .map(|g| {
                let mut bits = FixedBitSet::with_capacity(self.points.len());
                for p in g.points(f) {
                    bits.insert(self.local[p.index(f.q())] as usize);
                }
                bits
            })
            .collect();
        let mut point_generators = vec![Vec::new(); self.points.len()];
        for (g, bits) in incidence.iter().enumerate() {
            for p in bits.ones() {
                point_generators[p].push(g as u32);
            }
        }
        self.incidence = incidence;
        self.point_generators = point_generators;
    }

    fn self_check(&self, expected_gens: usize) -> Result<()> {
        if self.generators.len() != expected_gens {
            return Err(Error::CountMismatch(format!(
                "{} generators, expected {expected_gens}",
                self.generators.len()
            )));
        }
        let gen_size = self.generator_size();
        if let Some(bad) = self.incidence.iter().position(|b| b.count_ones(..) != gen_size) {
            return Err(Error::CountMismatch(format!("generator {bad} does not have {gen_size} points")));
        }
        let per_point = self.point_generators[0].len();
        if self.point_generators.iter().any(|g| g.len() != per_point) {
            return Err(Error::CountMismatch("points lie on different numbers of generators".into()));
        }
        if per_point * self.points.len() != gen_size * self.generators.len() {
            return Err(Error::CountMismatch("flag count identity fails".into()));
        }
        Ok(())
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    pub fn field_arc(&self) -> Arc<FieldCtx> {
        Arc::clone(&self.field)
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    pub fn kind(&self) -> PolarKind {
        self.kind
    }

    /// Projective dimension of the ambient space.
    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The parameter e: q^e + 1 generators pass through each (r−2)-space.
    pub fn parameter(&self) -> usize {
        self.parameter
    }

    pub fn spec(&self) -> SpaceSpec {
        SpaceSpec { kind: self.kind, n: self.n, q: self.field.q() as u64 }
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &ProjPoint {
        &self.points[i]
    }

    /// Local index of a point, if it belongs to the space.
    pub fn index_of(&self, p: &ProjPoint) -> Option<usize> {
        if p.ambient_dim() != self.n {
            return None;
        }
        let l = self.local[p.index(self.field.q())];
        (l != u32::MAX).then_some(l as usize)
    }

    /// Local index of the point spanned by a nonzero vector.
    pub fn index_of_vector(&self, v: &[Elem]) -> Option<usize> {
        let norm = projgeom::normalize(&self.field, v)?;
        self.index_of(&ProjPoint::from_normalized(norm))
    }

    pub fn generators(&self) -> &[Subspace] {
        &self.generators
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    /// Points per generator, `(q^r − 1)/(q − 1)`.
    pub fn generator_size(&self) -> usize {
        point_count(self.rank - 1, self.field.q())
    }

    pub fn incidence(&self, g: usize) -> &FixedBitSet {
        &self.incidence[g]
    }

    pub fn incidences(&self) -> &[FixedBitSet] {
        &self.incidence
    }

    pub fn generators_on_point(&self, p: usize) -> &[u32] {
        &self.point_generators[p]
    }

    /// `P^⊥ ∩ 𝒫` for the point with local index `p` (contains `p` itself).
    pub fn perp_of(&self, p: usize) -> &FixedBitSet {
        &self.perp[p]
    }

    /// Generators containing the totally singular subspace `a`.
    pub fn generators_through(&self, a: &Subspace) -> Result<Vec<usize>> {
        if a.vector_dim() != self.n + 1 {
            return Err(Error::DimensionMismatch { expected: self.n + 1, got: a.vector_dim() });
        }
        if !self.form.is_totally_singular(&self.field, a) {
            return Err(Error::NotSingular);
        }
        let members = self.section_points(a);
        Ok((0..self.generators.len())
            .filter(|&g| members.bits().is_subset(&self.incidence[g]))
            .collect())
    }

    /// Points of the space lying in `a`.
    pub fn section_points(&self, a: &Subspace) -> PointSet {
        let f = &*self.field;
        let eqs = a.annihilator(f);
        let bits: Vec<usize> = (0..self.points.len())
            .into_par_iter()
            .filter(|&i| eqs.iter().all(|e| linalg::dot(f, e, self.points[i].coords()) == 0))
            .collect();
        PointSet::from_indices(self.points.len(), bits)
    }
}

fn perp_bitsets(f: &FieldCtx, form: &Form, points: &[ProjPoint]) -> Vec<FixedBitSet> {
    let m = form.orthogonality_matrix();
    let duals: Vec<Vec<Elem>> = points.iter().map(|p| m.apply(f, p.coords())).collect();
    duals
        .par_iter()
        .map(|w| {
            let mut bits = FixedBitSet::with_capacity(points.len());
            for (j, p) in points.iter().enumerate() {
                if linalg::dot(f, w, p.coords()) == 0 {
                    bits.insert(j);
                }
            }
            bits
        })
        .collect()
}

/// A polar space induced on a subspace of a larger ambient space, with the
/// coordinate change back to the ambient space.
#[derive(Debug, Clone)]
pub struct EmbeddedSpace {
    pub space: PolarSpace,
    pub subspace: Subspace,
}

impl EmbeddedSpace {
    /// Requires the induced form on `subspace` to be non-degenerate.
    pub fn new(field: Arc<FieldCtx>, ambient_form: &Form, subspace: Subspace) -> Result<Self> {
        let restricted = ambient_form.restrict(&field, &subspace);
        let space = PolarSpace::from_form(field, restricted, &BuildOptions::default())?;
        Ok(EmbeddedSpace { space, subspace })
    }

    /// Ambient coordinates of a local point.
    pub fn to_ambient(&self, local: usize) -> ProjPoint {
        let f = self.space.field();
        let v = self.subspace.combine(f, self.space.point(local).coords());
        ProjPoint::new(f, &v).expect("basis rows are independent")
    }

    /// Local index of an ambient point, if it lies in the subspace and on the quadric.
    pub fn from_ambient(&self, p: &ProjPoint) -> Option<usize> {
        let c = self.subspace.coordinates(self.space.field(), p.coords())?;
        self.space.index_of_vector(&c)
    }
}
