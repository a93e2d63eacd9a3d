//! End-to-end constructions in Q+(7,q):
//!
//! * the glued (q+1)-ovoid: a (q+1)/2-ovoid `O₁` of one elliptic 5-space
//!   section `Q₁`, and the complement `O₂` in a second section `Q₂` of its
//!   image under a similarity fixing `Q₁ ∩ Q₂` pointwise;
//! * five pairwise disjoint 2-ovoids of Q+(7,3), one in each of five elliptic
//!   5-spaces through a common elliptic 3-space `σ`, spanned with the
//!   bisecants of a tangent-free spread of `σ^⊥`.
//!
//! Every step is checked on its own; no step relies on a previous claim.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{classify_section, PolarKind, SpaceSpec};
use crate::gf::{Elem, FieldCtx};
use crate::io::{subspace_rows, to_json, PointSetFile};
use crate::isometry::{isometry_between, map_elliptic_5space, Collineation};
use crate::klein::{char3_census_form, char3_spread, spread_census, Census};
use crate::ovoids::{find_m_ovoid, verify_m_ovoid, OvoidCertificate, SearchOptions};
use crate::pointset::PointSet;
use crate::polarspace::{EmbeddedSpace, PolarSpace};
use crate::projgeom::{enumerate_subspaces, point_count, ProjPoint, Subspace};

/// Options shared by the pipelines.
#[derive(Debug, Clone, Copy)]
#[derive(Default)]
pub struct PipelineOptions {
    pub search: SearchOptions,
    /// Permits `q > 3` for the glue construction.
    pub allow_stretch: bool,
}


/// A section of the ambient space by a subspace carrying a non-degenerate
/// form, with index maps in both directions.
pub struct Section {
    pub subspace: Subspace,
    pub embedded: EmbeddedSpace,
    to_ambient: Vec<usize>,
    from_ambient: Vec<Option<usize>>,
}

impl Section {
    pub fn new(space: &PolarSpace, subspace: Subspace) -> Result<Self> {
        let embedded = EmbeddedSpace::new(space.field_arc(), space.form(), subspace.clone())?;
        let to_ambient: Vec<usize> = (0..embedded.space.num_points())
            .map(|i| space.index_of(&embedded.to_ambient(i)).expect("section points lie on the quadric"))
            .collect();
        let mut from_ambient = vec![None; space.num_points()];
        for (local, &amb) in to_ambient.iter().enumerate() {
            from_ambient[amb] = Some(local);
        }
        Ok(Section { subspace, embedded, to_ambient, from_ambient })
    }

    pub fn local(&self) -> &PolarSpace {
        &self.embedded.space
    }

    /// All points of the section, as an ambient set.
    pub fn points(&self, ambient_size: usize) -> PointSet {
        PointSet::from_indices(ambient_size, self.to_ambient.iter().copied())
    }

    pub fn lift(&self, local: &PointSet, ambient_size: usize) -> PointSet {
        PointSet::from_indices(ambient_size, local.iter().map(|i| self.to_ambient[i]))
    }

    /// The part of an ambient set that lies in the section, in local indices.
    pub fn restrict(&self, ambient: &PointSet) -> PointSet {
        PointSet::from_indices(self.local().num_points(), ambient.iter().filter_map(|i| self.from_ambient[i]))
    }
}

fn is_elliptic(f: &FieldCtx, space: &PolarSpace, a: &Subspace) -> bool {
    classify_section(f, space.form(), a).is_ok_and(|c| c.is_nondegenerate() && c.base_type == PolarKind::Elliptic)
}

/// A deterministic elliptic 3-space: the hyperbolic line through the first
/// point and the first point not perpendicular to it, plus the first
/// anisotropic line of its perp in point-index order.
pub fn first_elliptic_3space(space: &PolarSpace) -> Result<Subspace> {
    let f = space.field();
    let form = space.form();
    let fail = || Error::ConfigurationFailed("no elliptic 3-space found".into());
    let p = space.point(0).clone();
    let r = (0..space.num_points()).find(|&j| !space.perp_of(0).contains(j)).ok_or_else(fail)?;
    let hyp = Subspace::from_points(f, &[p, space.point(r).clone()]);
    let rest = form.perp(f, &hyp)?;
    let n = space.ambient_dim();
    let candidates: Vec<ProjPoint> = (0..point_count(n, f.q()))
        .map(|i| ProjPoint::from_index(n, f.q(), i))
        .filter(|u| rest.contains_point(f, u) && !form.is_singular_vector(f, u.coords()))
        .collect();
    for (i, u) in candidates.iter().enumerate() {
        for v in &candidates[i + 1..] {
            if !form.orthogonal(f, u.coords(), v.coords()) {
                continue;
            }
            let line = Subspace::from_points(f, &[u.clone(), v.clone()]);
            if form.singular_points(f, &line).is_empty() {
                let pi = hyp.join(f, &line);
                if is_elliptic(f, space, &pi) {
                    return Ok(pi);
                }
            }
        }
    }
    Err(fail())
}

/// Lines of `container` (in its canonical local order) that meet the quadric
/// in exactly two points.
pub fn hyperbolic_lines_in(space: &PolarSpace, container: &Subspace) -> Vec<Subspace> {
    let f = space.field();
    enumerate_subspaces(container.rank() - 1, 1, f)
        .into_iter()
        .map(|l| {
            let rows: Vec<Vec<Elem>> = l.basis().iter().map(|c| container.combine(f, c)).collect();
            Subspace::span(f, container.vector_dim(), &rows)
        })
        .filter(|l| space.form().singular_points(f, l).len() == 2)
        .collect()
}

/// One inclusion in the disjointness argument, with a witness point when it fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InclusionCheck {
    pub claim: String,
    pub holds: bool,
    pub witness: Option<Vec<Elem>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjointReport {
    pub holds: bool,
    pub checks: Vec<InclusionCheck>,
}

/// Checks each step of why `O₁` and `O₂` are disjoint: `Φ(O₁)` and `O₂`
/// partition `Q₂`, `Φ` fixes `Q₁ ∩ Q₂`, hence `O₁ ∩ Q₂ ⊆ Φ(O₁)` misses `O₂`.
/// `perm` is the point permutation induced by `Φ`.
pub fn why_disjoint_check(
    space: &PolarSpace,
    perm: &[usize],
    o1: &PointSet,
    o2: &PointSet,
    q1: &PointSet,
    q2: &PointSet,
) -> DisjointReport {
    let n = space.num_points();
    let image = PointSet::from_indices(n, o1.iter().map(|p| perm[p]));
    let common = q1.intersection(q2);
    let witness = |bad: &PointSet| bad.iter().next().map(|p| space.point(p).coords().to_vec());
    let mut checks = Vec::new();
    let mut check = |claim: &str, bad: PointSet| {
        checks.push(InclusionCheck { claim: claim.into(), holds: bad.is_empty(), witness: witness(&bad) });
    };
    check("Φ(O₁) ⊆ Q₂", image.difference(q2));
    check("Φ(O₁) ∩ O₂ = ∅", image.intersection(o2));
    check("Q₂ ⊆ Φ(O₁) ∪ O₂", q2.difference(&image.union(o2)));
    check("O₁ ⊆ Q₁", o1.difference(q1));
    check("Φ fixes Q₁ ∩ Q₂ pointwise", PointSet::from_indices(n, common.iter().filter(|&p| perm[p] != p)));
    check("O₁ ∩ Q₂ ⊆ Φ(O₁)", o1.intersection(q2).difference(&image));
    check("O₁ ∩ O₂ = ∅", o1.intersection(o2));
    let holds = checks.iter().all(|c| c.holds);
    DisjointReport { holds, checks }
}

/// Chosen subspaces and the matrix of `Φ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlueManifest {
    pub space: SpaceSpec,
    pub modulus: Vec<u32>,
    pub pi: Vec<Vec<Elem>>,
    pub pi1: Vec<Vec<Elem>>,
    pub pi2: Vec<Vec<Elem>>,
    /// Rows of `M`; a point `x` maps to `Mx`.
    pub phi: Vec<Vec<Elem>>,
    pub phi_multiplier: Elem,
    pub common_points: usize,
    pub disjointness: DisjointReport,
    /// Whether the set arises from a 1-system is not examined.
    pub one_system_provenance: String,
}

pub struct GlueReport {
    pub q: u32,
    pub pi: Subspace,
    pub pi1: Subspace,
    pub pi2: Subspace,
    pub phi: Collineation,
    pub o1: PointSet,
    pub o2: PointSet,
    pub union: PointSet,
    /// `O₁` as a (q+1)/2-ovoid of `Q₁`.
    pub cert_o1: OvoidCertificate,
    /// `O₂` as a (q+1)/2-ovoid of `Q₂`.
    pub cert_o2: OvoidCertificate,
    /// `O₁ ∪ O₂` as a (q+1)-ovoid of Q+(7,q).
    pub cert_union: OvoidCertificate,
    pub disjointness: DisjointReport,
    pub common_points: usize,
    pub manifest: GlueManifest,
}

impl GlueReport {
    pub fn ok(&self) -> bool {
        let half = (self.q as usize).div_ceil(2);
        self.cert_o1.ok
            && self.cert_o1.m == Some(half)
            && self.cert_o2.ok
            && self.cert_o2.m == Some(half)
            && self.cert_union.ok
            && self.cert_union.m == Some(self.q as usize + 1)
            && self.disjointness.holds
    }

    /// File name and JSON contents of every artifact except the run manifest.
    pub fn files(&self, space: &PolarSpace) -> Vec<(String, String)> {
        let half = (self.q as usize).div_ceil(2);
        vec![
            ("o1.json".into(), to_json(&PointSetFile::for_ovoid(space, &self.o1, Some(half)))),
            ("o2.json".into(), to_json(&PointSetFile::for_ovoid(space, &self.o2, Some(half)))),
            ("union.json".into(), to_json(&PointSetFile::for_ovoid(space, &self.union, Some(self.q as usize + 1)))),
            ("cert_o1.json".into(), to_json(&self.cert_o1)),
            ("cert_o2.json".into(), to_json(&self.cert_o2)),
            ("cert_union.json".into(), to_json(&self.cert_union)),
            ("construction.json".into(), to_json(&self.manifest)),
        ]
    }
}

/// Builds Q+(7,q) and runs the glue construction in it.
pub fn glue_construct(q: u64, opts: &PipelineOptions) -> Result<(PolarSpace, GlueReport)> {
    if q != 3 && !opts.allow_stretch {
        return Err(Error::BadConfiguration(format!("q = {q} needs the stretch flag; only q = 3 is desk scale")));
    }
    if q.is_multiple_of(2) {
        return Err(Error::BadConfiguration("q must be odd".into()));
    }
    let space = PolarSpace::build_with(
        &SpaceSpec::new(PolarKind::Hyperbolic, 7, q)?,
        &crate::polarspace::BuildOptions { max_points: 100_000, max_generators: 1_000_000 },
    )?;
    let report = glue_in(&space, opts)?;
    Ok((space, report))
}

/// The glue construction in a given Q+(7,q).
pub fn glue_in(space: &PolarSpace, opts: &PipelineOptions) -> Result<GlueReport> {
    let f = space.field();
    let q = f.q();
    if space.kind() != PolarKind::Hyperbolic || space.ambient_dim() != 7 {
        return Err(Error::BadConfiguration(format!("glue needs Q+(7,q), got {}", space.spec())));
    }
    let n = space.num_points();
    let half = (q as usize).div_ceil(2);

    // (1) π, and π₁, π₂ = π ⊕ ℓᵢ for skew hyperbolic lines ℓᵢ of π^⊥.
    let pi = first_elliptic_3space(space)?;
    let perp = space.form().perp(f, &pi)?;
    let lines = hyperbolic_lines_in(space, &perp);
    let l1 = lines.first().ok_or_else(|| Error::ConfigurationFailed("π^⊥ has no hyperbolic line".into()))?;
    let l2 = lines
        .iter()
        .find(|l| l.meet(f, l1).is_empty())
        .ok_or_else(|| Error::ConfigurationFailed("no hyperbolic line skew to ℓ₁".into()))?;
    let pi1 = pi.join(f, l1);
    let pi2 = pi.join(f, l2);
    for (name, s) in [("π₁", &pi1), ("π₂", &pi2)] {
        if !is_elliptic(f, space, s) || s.projdim() != 5 {
            return Err(Error::ConfigurationFailed(format!("{name} is not an elliptic 5-space")));
        }
    }
    if pi1.meet(f, &pi2) != pi {
        return Err(Error::ConfigurationFailed("π₁ ∩ π₂ ≠ π".into()));
    }

    // (2) Φ fixing π pointwise with Φ(π₁) = π₂.
    let phi = map_elliptic_5space(f, space.form(), &pi, &pi1, &pi2)?;
    let perm = phi.permutation(space)?;

    // (3) O₁ in Q₁.
    let s1 = Section::new(space, pi1.clone())?;
    let s2 = Section::new(space, pi2.clone())?;
    let none = PointSet::empty(s1.local().num_points());
    let local_o1 = find_m_ovoid(s1.local(), half, &none, &none, &opts.search)
        .map_err(|e| Error::SearchFailed { index: 1, reason: e.to_string() })?;
    let o1 = s1.lift(&local_o1, n);

    // (4) O₂ = Q₂ ∖ Φ(O₁).
    let q1 = s1.points(n);
    let q2 = s2.points(n);
    let image = PointSet::from_indices(n, o1.iter().map(|p| perm[p]));
    if !image.is_subset(&q2) || phi.image_set(space, &q1)? != q2 {
        return Err(Error::DisjointnessFailure("Φ does not map Q₁ onto Q₂".into()));
    }
    let o2 = q2.difference(&image);

    // (5) disjointness and its mechanism.
    let disjointness = why_disjoint_check(space, &perm, &o1, &o2, &q1, &q2);
    if !disjointness.holds {
        let failed: Vec<&str> = disjointness.checks.iter().filter(|c| !c.holds).map(|c| c.claim.as_str()).collect();
        return Err(Error::DisjointnessFailure(failed.join("; ")));
    }

    // (6) certificates.
    let cert_o1 = verify_m_ovoid(s1.local(), &local_o1);
    let cert_o2 = verify_m_ovoid(s2.local(), &s2.restrict(&o2));
    let union = o1.union(&o2);
    let cert_union = verify_m_ovoid(space, &union);
    let common_points = q1.intersection(&q2).len();

    let manifest = GlueManifest {
        space: space.spec(),
        modulus: f.modulus().to_vec(),
        pi: subspace_rows(&pi),
        pi1: subspace_rows(&pi1),
        pi2: subspace_rows(&pi2),
        phi: phi.matrix().to_rows(),
        phi_multiplier: phi.multiplier(),
        common_points,
        disjointness: disjointness.clone(),
        one_system_provenance: "unverified".into(),
    };
    Ok(GlueReport {
        q,
        pi,
        pi1,
        pi2,
        phi,
        o1,
        o2,
        union,
        cert_o1,
        cert_o2,
        cert_union,
        disjointness,
        common_points,
        manifest,
    })
}

/// Chosen subspaces, the spread and the point pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyManifest {
    pub space: SpaceSpec,
    pub modulus: Vec<u32>,
    pub sigma: Vec<Vec<Elem>>,
    pub sigma_perp: Vec<Vec<Elem>>,
    /// Spread of `σ^⊥`, lines as canonical basis rows.
    pub spread: Vec<Vec<Vec<Elem>>>,
    pub census: Census,
    pub pis: Vec<Vec<Vec<Elem>>>,
    pub pairs: Vec<[Vec<Elem>; 2]>,
    pub pairwise_disjoint: bool,
    pub union_size: usize,
}

pub struct FamilyReport {
    pub sigma: Subspace,
    pub spread: Vec<Subspace>,
    pub census: Census,
    pub pis: Vec<Subspace>,
    pub pairs: Vec<[usize; 2]>,
    pub ovoids: Vec<PointSet>,
    /// Each `Oᵢ` as a 2-ovoid of Q+(7,3).
    pub certificates: Vec<OvoidCertificate>,
    pub pairwise_disjoint: bool,
    pub manifest: FamilyManifest,
}

impl FamilyReport {
    pub fn ok(&self) -> bool {
        self.pairwise_disjoint && self.certificates.iter().all(|c| c.ok && c.m == Some(2))
    }

    pub fn files(&self, space: &PolarSpace) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (i, (o, c)) in self.ovoids.iter().zip(&self.certificates).enumerate() {
            out.push((format!("o{}.json", i + 1), to_json(&PointSetFile::for_ovoid(space, o, Some(2)))));
            out.push((format!("cert_o{}.json", i + 1), to_json(c)));
        }
        out.push(("construction.json".into(), to_json(&self.manifest)));
        out
    }
}

/// Builds Q+(7,3) and the family of five pairwise disjoint 2-ovoids.
pub fn five_disjoint_2ovoids(opts: &PipelineOptions) -> Result<(PolarSpace, FamilyReport)> {
    let space = PolarSpace::build(&SpaceSpec::new(PolarKind::Hyperbolic, 7, 3)?)?;
    let report = family_in(&space, opts)?;
    Ok((space, report))
}

/// The five-ovoid construction inside a given Q+(7,3).
pub fn family_in(space: &PolarSpace, opts: &PipelineOptions) -> Result<FamilyReport> {
    let f = space.field();
    if space.spec() != SpaceSpec::new(PolarKind::Hyperbolic, 7, 3)? {
        return Err(Error::BadConfiguration(format!("the family lives in Q+(7,3), got {}", space.spec())));
    }
    let n = space.num_points();
    let cfg = |m: &str| Error::ConfigurationFailed(m.to_string());

    // (1) σ and σ^⊥, both elliptic.
    let sigma = first_elliptic_3space(space)?;
    let sigma_perp = space.form().perp(f, &sigma)?;
    if !is_elliptic(f, space, &sigma_perp) {
        return Err(cfg("σ^⊥ is not elliptic"));
    }

    // (2) tangent-free spread of σ^⊥, moved from X0X1+X2²+X3² by an isometry.
    let model = char3_spread(f)?;
    let model_form = char3_census_form(f);
    let local_form = space.form().restrict(f, &sigma_perp);
    let m = isometry_between(f, &model_form, &local_form)?;
    let spread: Vec<Subspace> = model
        .lines()
        .iter()
        .map(|l| {
            let rows: Vec<Vec<Elem>> = l.basis().iter().map(|b| sigma_perp.combine(f, &m.apply(f, b))).collect();
            Subspace::span(f, 8, &rows)
        })
        .collect();
    let local_spread = crate::klein::Spread::new(
        f,
        model.lines().iter().map(|l| {
            let rows: Vec<Vec<Elem>> = l.basis().iter().map(|b| m.apply(f, b)).collect();
            Subspace::span(f, 4, &rows)
        }).collect(),
    )?;
    let census = spread_census(f, &local_spread, &local_form)?;
    if census.tangent != 0 || census.bisecant != 5 {
        return Err(cfg("transported spread is not tangent-free"));
    }
    let bisecants: Vec<Subspace> =
        spread.iter().filter(|l| space.form().singular_points(f, l).len() == 2).cloned().collect();

    // (3) πᵢ = ⟨ℓᵢ, σ⟩, pairwise meeting in σ.
    let pis: Vec<Subspace> = bisecants.iter().map(|l| sigma.join(f, l)).collect();
    for (i, p) in pis.iter().enumerate() {
        if p.projdim() != 5 || !is_elliptic(f, space, p) {
            return Err(cfg(&format!("π{} is not an elliptic 5-space", i + 1)));
        }
        for q in &pis[i + 1..] {
            if p.meet(f, q) != sigma {
                return Err(cfg("two of the 5-spaces meet outside σ"));
            }
        }
    }

    // (4) consecutive pairs of the 10 quadric points of σ.
    let sigma_pts: Vec<usize> = space.section_points(&sigma).iter().collect();
    if sigma_pts.len() != 10 {
        return Err(cfg("σ does not meet the quadric in 10 points"));
    }
    let pairs: Vec<[usize; 2]> = sigma_pts.chunks(2).map(|c| [c[0], c[1]]).collect();

    // (5) a 2-ovoid of each section with Oᵢ ∩ σ = {Pᵢ, Rᵢ}.
    let sigma_set = PointSet::from_indices(n, sigma_pts.iter().copied());
    let ovoids: Vec<PointSet> = pis
        .par_iter()
        .zip(pairs.par_iter())
        .enumerate()
        .map(|(i, (pi, pair))| {
            let sec = Section::new(space, pi.clone())?;
            let include_amb = PointSet::from_indices(n, pair.iter().copied());
            let include = sec.restrict(&include_amb);
            let exclude = sec.restrict(&sigma_set.difference(&include_amb));
            let seed = opts.search.seed.wrapping_add(i as u64);
            let local = find_m_ovoid(sec.local(), 2, &include, &exclude, &SearchOptions { seed, ..opts.search })
                .map_err(|e| Error::SearchFailed { index: i + 1, reason: e.to_string() })?;
            Ok(sec.lift(&local, n))
        })
        .collect::<Result<_>>()?;

    // (6) certificates in Q+(7,3) and pairwise disjointness.
    let certificates: Vec<OvoidCertificate> = ovoids.iter().map(|o| verify_m_ovoid(space, o)).collect();
    let pairwise_disjoint = (0..5).all(|i| (i + 1..5).all(|j| ovoids[i].is_disjoint(&ovoids[j])));
    let union_size = ovoids.iter().fold(PointSet::empty(n), |acc, o| acc.union(o)).len();
    for (i, o) in ovoids.iter().enumerate() {
        if o.intersection(&sigma_set) != PointSet::from_indices(n, pairs[i]) {
            return Err(Error::SearchFailed { index: i + 1, reason: "ovoid meets σ outside its pair".into() });
        }
    }

    let manifest = FamilyManifest {
        space: space.spec(),
        modulus: f.modulus().to_vec(),
        sigma: subspace_rows(&sigma),
        sigma_perp: subspace_rows(&sigma_perp),
        spread: spread.iter().map(subspace_rows).collect(),
        census,
        pis: pis.iter().map(subspace_rows).collect(),
        pairs: pairs.iter().map(|&[a, b]| [space.point(a).coords().to_vec(), space.point(b).coords().to_vec()]).collect(),
        pairwise_disjoint,
        union_size,
    };
    Ok(FamilyReport { sigma, spread, census, pis, pairs, ovoids, certificates, pairwise_disjoint, manifest })
}

/// Union of the first `m/2` ovoids of the family, verified as an m-ovoid.
pub fn m_ovoids_q3(space: &PolarSpace, family: &FamilyReport, m: usize) -> Result<(PointSet, OvoidCertificate)> {
    if !matches!(m, 2 | 4 | 6 | 8 | 10) {
        return Err(Error::BadConfiguration(format!("m must be one of 2, 4, 6, 8, 10, got {m}")));
    }
    if !family.pairwise_disjoint {
        return Err(Error::NotDisjoint);
    }
    let set = family.ovoids[..m / 2]
        .iter()
        .try_fold(PointSet::empty(space.num_points()), |acc, o| crate::ovoids::union_disjoint(&acc, o))?;
    let cert = verify_m_ovoid(space, &set);
    Ok((set, cert))
}

/// Convenience for callers holding only a field.
pub fn field_arc(q: u64) -> Result<Arc<FieldCtx>> {
    Ok(Arc::new(FieldCtx::new(q)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;
    use std::sync::OnceLock;

    fn q7() -> &'static PolarSpace {
        static S: OnceLock<PolarSpace> = OnceLock::new();
        S.get_or_init(|| PolarSpace::build(&"Q+:7:3".parse().unwrap()).unwrap())
    }

    #[test]
    fn first_elliptic_3space_is_elliptic() {
        let s = q7();
        let pi = first_elliptic_3space(s).unwrap();
        assert_eq!(pi.projdim(), 3);
        assert_eq!(s.section_points(&pi).len(), 10);
        let perp = s.form().perp(s.field(), &pi).unwrap();
        assert_eq!(perp.projdim(), 3);
        assert!(is_elliptic(s.field(), s, &perp));
        // lines of an elliptic 3-space: 45 of its 130 lines are hyperbolic
        assert_eq!(hyperbolic_lines_in(s, &perp).len(), 45);
    }

    #[test]
    fn glue_q3() {
        let s = q7();
        let r = glue_in(s, &PipelineOptions::default()).unwrap();
        assert!(r.ok());
        assert_eq!((r.o1.len(), r.o2.len(), r.union.len()), (56, 56, 112));
        assert_eq!(r.common_points, 10);
        assert_eq!(r.cert_union.histogram, BTreeMap::from([(4, 2240)]));
        assert_eq!(r.pi1.meet(s.field(), &r.pi2).projdim(), 3);
        // the common 10 points split between O₁ and O₂
        let common = s.section_points(&r.pi);
        assert_eq!(r.o1.intersection(&common).len() + r.o2.intersection(&common).len(), 10);
    }

    #[test]
    fn disjointness_negative_control() {
        let s = q7();
        let r = glue_in(s, &PipelineOptions::default()).unwrap();
        let perm = r.phi.permutation(s).unwrap();
        let q1 = s.section_points(&r.pi1);
        let q2 = s.section_points(&r.pi2);
        let common = q1.intersection(&q2);
        // swap a point of O₂ for a common point that already lies in O₁
        let shared = r.o1.intersection(&common).iter().next().unwrap();
        let mut bad = r.o2.clone();
        let first = bad.iter().next().unwrap();
        bad.remove(first);
        bad.insert(shared);
        let rep = why_disjoint_check(s, &perm, &r.o1, &bad, &q1, &q2);
        assert!(!rep.holds);
        let last = rep.checks.last().unwrap();
        assert_eq!(last.witness.as_deref(), Some(s.point(shared).coords()));
    }

    #[test]
    fn identity_glue_is_consistent() {
        let s = q7();
        let r = glue_in(s, &PipelineOptions::default()).unwrap();
        let q1 = s.section_points(&r.pi1);
        let id: Vec<usize> = (0..s.num_points()).collect();
        let o2 = q1.difference(&r.o1);
        let rep = why_disjoint_check(s, &id, &r.o1, &o2, &q1, &q1);
        assert!(rep.holds);
    }

    #[test]
    fn stretch_gate() {
        assert!(matches!(glue_construct(5, &PipelineOptions::default()), Err(Error::BadConfiguration(_))));
    }

    #[test]
    fn five_disjoint_family() {
        let s = q7();
        let fam = family_in(s, &PipelineOptions::default()).unwrap();
        assert!(fam.ok());
        assert_eq!(fam.census, Census { external: 5, tangent: 0, bisecant: 5 });
        assert_eq!(fam.manifest.union_size, 280);
        for (i, o) in fam.ovoids.iter().enumerate() {
            assert_eq!(o.len(), 56);
            assert_eq!(fam.certificates[i].histogram, BTreeMap::from([(2, 2240)]));
        }
        for m in [2, 4, 6, 8, 10] {
            let (set, cert) = m_ovoids_q3(s, &fam, m).unwrap();
            assert_eq!(set.len(), 28 * m);
            assert!(cert.ok);
            assert_eq!(cert.histogram, BTreeMap::from([(m, 2240)]));
        }
        assert!(m_ovoids_q3(s, &fam, 3).is_err());
    }
}
