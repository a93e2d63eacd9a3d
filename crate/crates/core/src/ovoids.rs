//! m-ovoids: exhaustive verification, closure under complement and disjoint
//! union, the section patterns of elliptic and symplectic spaces, and a
//! propagating backtracking search.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{classify_section, PolarKind, SpaceSpec};
use crate::pointset::PointSet;
use crate::polarspace::PolarSpace;
use crate::projgeom::{enumerate_subspaces, Subspace};

/// Record of an exhaustive check of a point set against every generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OvoidCertificate {
    pub space: SpaceSpec,
    pub modulus: Vec<u32>,
    /// The constant intersection size, when there is one.
    pub m: Option<usize>,
    pub size: usize,
    /// `|generator ∩ set|` → number of generators.
    pub histogram: BTreeMap<usize, usize>,
    pub ok: bool,
    /// `|P^⊥ ∩ set|` for points of the set, when constant.
    pub perp_in: Option<usize>,
    /// `|P^⊥ ∩ set|` for points off the set, when constant.
    pub perp_out: Option<usize>,
}

/// Checks every generator. `ok` holds iff the intersection size is constant
/// and the set has the size an m-ovoid must have.
///
/// ```
/// use polarforge::ovoids::verify_m_ovoid;
/// use polarforge::{PointSet, PolarSpace};
///
/// let s = PolarSpace::build(&"Q+:3:3".parse().unwrap()).unwrap();
/// // The whole point set is a trivial (q+1)-ovoid.
/// let cert = verify_m_ovoid(&s, &PointSet::full(s.num_points()));
/// assert_eq!((cert.ok, cert.m, cert.size), (true, Some(4), 16));
/// ```
pub fn verify_m_ovoid(space: &PolarSpace, s: &PointSet) -> OvoidCertificate {
    assert_eq!(s.universe(), space.num_points(), "point set over a different space");
    let histogram = space
        .incidences()
        .par_iter()
        .fold(BTreeMap::new, |mut h: BTreeMap<usize, usize>, g| {
            *h.entry(s.count_in(g)).or_default() += 1;
            h
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });
    let m = (histogram.len() == 1).then(|| *histogram.keys().next().unwrap());
    let size = s.len();
    let ok = m.is_some_and(|m| size == m * ovoid_unit(space));
    let (perp_in, perp_out) = perp_constants(space, s);
    OvoidCertificate {
        space: space.spec(),
        modulus: space.field().modulus().to_vec(),
        m,
        size,
        histogram,
        ok,
        perp_in,
        perp_out,
    }
}

/// `q^{r+e−1} + 1`, the size of a 1-ovoid.
pub fn ovoid_unit(space: &PolarSpace) -> usize {
    (space.field().q() as usize).pow((space.rank() + space.parameter() - 1) as u32) + 1
}

fn perp_counts_raw(space: &PolarSpace, s: &PointSet) -> Vec<usize> {
    (0..space.num_points()).into_par_iter().map(|p| s.count_in(space.perp_of(p))).collect()
}

fn perp_constants(space: &PolarSpace, s: &PointSet) -> (Option<usize>, Option<usize>) {
    let counts = perp_counts_raw(space, s);
    let constant = |inside: bool| {
        let mut vals = (0..counts.len()).filter(|&p| s.contains(p) == inside).map(|p| counts[p]);
        let first = vals.next()?;
        vals.all(|v| v == first).then_some(first)
    };
    (constant(true), constant(false))
}

/// The two perp-intersection constants of an m-ovoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerpCounts {
    pub m: usize,
    /// `(m−1)(q^{r+e−2}+1)+1`; absent for the empty set.
    pub inside: Option<usize>,
    /// `m(q^{r+e−2}+1)`; absent when the set is everything.
    pub outside: Option<usize>,
}

/// Checks `|P^⊥ ∩ S|` at every point against the closed formulas.
pub fn perp_counts(space: &PolarSpace, s: &PointSet) -> Result<PerpCounts> {
    let cert = verify_m_ovoid(space, s);
    let m = match (cert.ok, cert.m) {
        (true, Some(m)) => m,
        _ => return Err(Error::PatternViolation("set is not an m-ovoid".into())),
    };
    let t = (space.field().q() as usize).pow((space.rank() + space.parameter() - 2) as u32) + 1;
    let expect_in = (m.max(1) - 1) * t + 1;
    let expect_out = m * t;
    let counts = perp_counts_raw(space, s);
    for (p, &c) in counts.iter().enumerate() {
        let expected = if s.contains(p) { expect_in } else { expect_out };
        if c != expected {
            return Err(Error::PatternViolation(format!("point {p}: |P^⊥ ∩ S| = {c}, expected {expected}")));
        }
    }
    Ok(PerpCounts {
        m,
        inside: (!s.is_empty()).then_some(expect_in),
        outside: (s.len() < space.num_points()).then_some(expect_out),
    })
}

pub fn complement(s: &PointSet) -> PointSet {
    s.complement()
}

pub fn union_disjoint(a: &PointSet, b: &PointSet) -> Result<PointSet> {
    if !a.is_disjoint(b) {
        return Err(Error::NotDisjoint);
    }
    Ok(a.union(b))
}

/// `x = |S ∩ A|` and `c = |A^⊥ ∩ S|` for one section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionPattern {
    pub x: usize,
    pub c: usize,
}

fn half_rank_n(space: &PolarSpace, kind: PolarKind) -> Result<usize> {
    let d = space.ambient_dim();
    if space.kind() != kind || d.is_multiple_of(2) || d < 3 {
        return Err(Error::BadConfiguration(format!("expected {kind}(2n+1,q), got {}", space.spec())));
    }
    Ok((d - 1) / 2)
}

fn verified_m(space: &PolarSpace, s: &PointSet) -> Result<usize> {
    let cert = verify_m_ovoid(space, s);
    match (cert.ok, cert.m) {
        (true, Some(m)) => Ok(m),
        _ => Err(Error::PatternViolation("set is not an m-ovoid".into())),
    }
}

fn pattern_with(
    space: &PolarSpace,
    s: &PointSet,
    m: usize,
    n: usize,
    a: &Subspace,
    kind: PolarKind,
    max_c: usize,
) -> Result<SectionPattern> {
    let f = space.field();
    if a.vector_dim() != space.ambient_dim() + 1 || a.projdim() != (2 * n - 1) as isize {
        return Err(Error::BadConfiguration(format!("section must have projective dimension {}", 2 * n - 1)));
    }
    let class = classify_section(f, space.form(), a)?;
    if !class.is_nondegenerate() || class.base_type != kind {
        return Err(Error::BadConfiguration(format!("section is not a non-degenerate {kind} space")));
    }
    let perp = space.form().perp(f, a)?;
    let x = s.intersection(&space.section_points(a)).len();
    let c = s.intersection(&space.section_points(&perp)).len();
    let rhs = (m as i64 - c as i64) * (f.q() as i64).pow(n as u32 - 1) + m as i64;
    if c > max_c || x as i64 != rhs {
        return Err(Error::PatternViolation(format!("x = {x}, c = {c}, but (m−c)q^(n−1)+m = {rhs}")));
    }
    Ok(SectionPattern { x, c })
}

/// Section of an m-ovoid of Q−(2n+1,q) by a non-degenerate elliptic
/// (2n−1)-space A; `c ∈ {0,1,2}` counts points of the line `A^⊥` in S and
/// `x = (m−c)q^{n−1} + m`.
pub fn section_pattern(space: &PolarSpace, s: &PointSet, a: &Subspace) -> Result<SectionPattern> {
    let n = half_rank_n(space, PolarKind::Elliptic)?;
    let m = verified_m(space, s)?;
    pattern_with(space, s, m, n, a, PolarKind::Elliptic, 2)
}

/// Section of an m-ovoid of W(2n+1,q) by a non-degenerate symplectic
/// (2n−1)-space; here `c ≤ q+1`.
pub fn symplectic_pattern(space: &PolarSpace, s: &PointSet, a: &Subspace) -> Result<SectionPattern> {
    let n = half_rank_n(space, PolarKind::Symplectic)?;
    let m = verified_m(space, s)?;
    let q = space.field().q() as usize;
    pattern_with(space, s, m, n, a, PolarKind::Symplectic, q + 1)
}

/// All non-degenerate sections of the same kind and projective dimension
/// `2n−1`, with their patterns. Verifies `s` once.
pub fn pattern_sweep(space: &PolarSpace, s: &PointSet) -> Result<Vec<(Subspace, SectionPattern)>> {
    let kind = space.kind();
    if !matches!(kind, PolarKind::Elliptic | PolarKind::Symplectic) {
        return Err(Error::BadConfiguration(format!("no section pattern for {kind}")));
    }
    let n = half_rank_n(space, kind)?;
    let m = verified_m(space, s)?;
    let max_c = if kind == PolarKind::Elliptic { 2 } else { space.field().q() as usize + 1 };
    let f = space.field();
    let candidates = enumerate_subspaces(space.ambient_dim(), 2 * n - 1, f);
    let mut out: Vec<(Subspace, SectionPattern)> = candidates
        .into_par_iter()
        .filter_map(|a| match classify_section(f, space.form(), &a) {
            Ok(c) if c.is_nondegenerate() && c.base_type == kind => Some(a),
            _ => None,
        })
        .map(|a| pattern_with(space, s, m, n, &a, kind, max_c).map(|p| (a, p)))
        .collect::<Result<_>>()?;
    out.sort();
    Ok(out)
}

impl PartialOrd for SectionPattern {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SectionPattern {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.x, self.c).cmp(&(other.x, other.c))
    }
}

/// All `(c, m)` with `m ≥ 1`, `0 ≤ c ≤ q+1` and `(m−c)q^{n−1} + m = 0`.
pub fn pattern_zero_cases(q: u64, n: u32) -> Vec<(u64, u64)> {
    let t = q.pow(n.saturating_sub(1));
    let mut out = Vec::new();
    for c in 0..=q + 1 {
        // m(t + 1) = c·t
        if (c * t).is_multiple_of(t + 1) {
            let m = c * t / (t + 1);
            if m >= 1 {
                out.push((c, m));
            }
        }
    }
    out
}

/// Search parameters for [`find_m_ovoid`].
#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    /// Maximum number of branching nodes.
    pub budget: u64,
    /// Seeds the point priority order.
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { budget: 100_000_000, seed: 0 }
    }
}

const UNDECIDED: u8 = 0;
const IN: u8 = 1;
const OUT: u8 = 2;

struct Search<'a> {
    space: &'a PolarSpace,
    m: u32,
    state: Vec<u8>,
    chosen: Vec<u32>,
    open: Vec<u32>,
    trail: Vec<usize>,
    rank: Vec<usize>,
    nodes: u64,
    budget: u64,
}

enum Outcome {
    Found,
    Infeasible,
    OutOfBudget,
}

impl<'a> Search<'a> {
    fn new(space: &'a PolarSpace, m: u32, seed: u64, budget: u64) -> Self {
        let mut order: Vec<usize> = (0..space.num_points()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut rank = vec![0; order.len()];
        for (r, &p) in order.iter().enumerate() {
            rank[p] = r;
        }
        Search {
            space,
            m,
            state: vec![UNDECIDED; space.num_points()],
            chosen: vec![0; space.num_generators()],
            open: vec![space.generator_size() as u32; space.num_generators()],
            trail: Vec::new(),
            rank,
            nodes: 0,
            budget,
        }
    }

    /// Assigns `p` and propagates the exact-count constraint to a fixpoint.
    fn assign(&mut self, p: usize, value: u8) -> bool {
        let mut stack = vec![(p, value)];
        while let Some((p, value)) = stack.pop() {
            match self.state[p] {
                UNDECIDED => {}
                s if s == value => continue,
                _ => return false,
            }
            self.state[p] = value;
            self.trail.push(p);
            for &g in self.space.generators_on_point(p) {
                let g = g as usize;
                self.open[g] -= 1;
                if value == IN {
                    self.chosen[g] += 1;
                }
            }
            // Counters of p are fully updated before any early exit, so
            // undo_to stays exact.
            for &g in self.space.generators_on_point(p) {
                let g = g as usize;
                let (c, o) = (self.chosen[g], self.open[g]);
                if c > self.m || c + o < self.m {
                    return false;
                }
                if o > 0 && (c == self.m || c + o == self.m) {
                    let forced = if c == self.m { OUT } else { IN };
                    for r in self.space.incidence(g).ones() {
                        if self.state[r] == UNDECIDED {
                            stack.push((r, forced));
                        }
                    }
                }
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let p = self.trail.pop().unwrap();
            let value = std::mem::replace(&mut self.state[p], UNDECIDED);
            for &g in self.space.generators_on_point(p) {
                let g = g as usize;
                self.open[g] += 1;
                if value == IN {
                    self.chosen[g] -= 1;
                }
            }
        }
    }

    /// Undecided point of highest priority on the open generator with the
    /// fewest undecided points.
    fn branch_point(&self) -> Option<usize> {
        let g = (0..self.open.len()).filter(|&g| self.open[g] > 0).min_by_key(|&g| (self.open[g], g))?;
        self.space
            .incidence(g)
            .ones()
            .filter(|&p| self.state[p] == UNDECIDED)
            .min_by_key(|&p| self.rank[p])
    }

    fn run(&mut self) -> Outcome {
        let Some(p) = self.branch_point() else {
            return Outcome::Found;
        };
        for value in [IN, OUT] {
            if self.nodes >= self.budget {
                return Outcome::OutOfBudget;
            }
            self.nodes += 1;
            let mark = self.trail.len();
            if self.assign(p, value) {
                match self.run() {
                    Outcome::Infeasible => {}
                    done => return done,
                }
            }
            self.undo_to(mark);
        }
        Outcome::Infeasible
    }
}

/// Backtracking search for an m-ovoid containing `include` and avoiding
/// `exclude`. The result is re-verified before it is returned.
///
/// `Err(Exhausted)` means the search space was covered without a solution;
/// `Err(BudgetExhausted)` means the node budget ran out first.
pub fn find_m_ovoid(
    space: &PolarSpace,
    m: usize,
    include: &PointSet,
    exclude: &PointSet,
    opts: &SearchOptions,
) -> Result<PointSet> {
    let n = space.num_points();
    if include.universe() != n || exclude.universe() != n {
        return Err(Error::DimensionMismatch { expected: n, got: include.universe().min(exclude.universe()) });
    }
    if !include.is_disjoint(exclude) {
        return Err(Error::NotDisjoint);
    }
    if m > space.generator_size() {
        return Err(Error::BadConfiguration(format!("m = {m} exceeds the generator size {}", space.generator_size())));
    }
    let mut search = Search::new(space, m as u32, opts.seed, opts.budget);
    let preset = include.iter().map(|p| (p, IN)).chain(exclude.iter().map(|p| (p, OUT)));
    for (p, value) in preset.collect::<Vec<_>>() {
        if !search.assign(p, value) {
            return Err(Error::Exhausted { nodes: 0 });
        }
    }
    match search.run() {
        Outcome::Found => {
            let set = PointSet::from_indices(n, (0..n).filter(|&p| search.state[p] == IN));
            let cert = verify_m_ovoid(space, &set);
            if !(cert.ok && cert.m == Some(m)) {
                return Err(Error::PatternViolation("search result failed verification".into()));
            }
            Ok(set)
        }
        Outcome::Infeasible => Err(Error::Exhausted { nodes: search.nodes }),
        Outcome::OutOfBudget => Err(Error::BudgetExhausted { nodes: search.nodes }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    fn q53() -> &'static PolarSpace {
        static S: OnceLock<PolarSpace> = OnceLock::new();
        S.get_or_init(|| PolarSpace::build(&"Q-:5:3".parse().unwrap()).unwrap())
    }

    fn two_ovoid() -> &'static PointSet {
        static O: OnceLock<PointSet> = OnceLock::new();
        O.get_or_init(|| {
            let s = q53();
            let none = PointSet::empty(s.num_points());
            find_m_ovoid(s, 2, &none, &none, &SearchOptions::default()).unwrap()
        })
    }

    /// Oracle: intersect each generator's point list with the set by hand.
    fn histogram_by_points(space: &PolarSpace, s: &PointSet) -> BTreeMap<usize, usize> {
        let f = space.field();
        let mut h = BTreeMap::new();
        for g in space.generators() {
            let k = g.points(f).iter().filter(|p| s.contains(space.index_of(p).unwrap())).count();
            *h.entry(k).or_default() += 1;
        }
        h
    }

    #[test]
    fn trivial_ovoids() {
        let s = q53();
        let empty = verify_m_ovoid(s, &PointSet::empty(112));
        assert!(empty.ok);
        assert_eq!(empty.m, Some(0));
        let full = verify_m_ovoid(s, &PointSet::full(112));
        assert!(full.ok);
        assert_eq!((full.m, full.size), (Some(4), 112));
    }

    #[test]
    fn found_two_ovoid_verifies() {
        let s = q53();
        let o = two_ovoid();
        let cert = verify_m_ovoid(s, o);
        assert!(cert.ok);
        assert_eq!(cert.size, 56);
        assert_eq!(cert.histogram, BTreeMap::from([(2, 280)]));
        assert_eq!(cert.histogram, histogram_by_points(s, o));
        assert_eq!((cert.perp_in, cert.perp_out), (Some(11), Some(20)));
    }

    #[test]
    fn perp_counts_match_formula() {
        let s = q53();
        let pc = perp_counts(s, two_ovoid()).unwrap();
        assert_eq!((pc.m, pc.inside, pc.outside), (2, Some(11), Some(20)));
        let e = perp_counts(s, &PointSet::empty(112)).unwrap();
        assert_eq!((e.inside, e.outside), (None, Some(0)));
        let mut broken = two_ovoid().clone();
        let first = broken.iter().next().unwrap();
        broken.remove(first);
        assert!(matches!(perp_counts(s, &broken), Err(Error::PatternViolation(_))));
    }

    #[test]
    fn closure_operations() {
        let s = q53();
        let o = two_ovoid();
        let c = complement(o);
        let cert = verify_m_ovoid(s, &c);
        assert!(cert.ok);
        assert_eq!((cert.m, cert.size), (Some(2), 56));
        let u = union_disjoint(o, &c).unwrap();
        assert_eq!(verify_m_ovoid(s, &u).m, Some(4));
        assert_eq!(union_disjoint(o, &PointSet::empty(112)).unwrap(), *o);
        assert_eq!(union_disjoint(o, o), Err(Error::NotDisjoint));
    }

    #[test]
    fn elliptic_sweep_hits_all_three_values() {
        let s = q53();
        let sweep = pattern_sweep(s, two_ovoid()).unwrap();
        assert!(!sweep.is_empty());
        let xs: std::collections::BTreeSet<usize> = sweep.iter().map(|(_, p)| p.x).collect();
        assert_eq!(xs, [2, 5, 8].into());
        for (a, p) in &sweep {
            assert_eq!(p.x, (2 - p.c) * 3 + 2);
            assert_eq!(section_pattern(s, two_ovoid(), a).unwrap(), *p);
        }
    }

    #[test]
    fn full_ovoid_forces_c_two() {
        let s = q53();
        let sweep = pattern_sweep(s, &PointSet::full(112)).unwrap();
        assert!(sweep.iter().all(|(_, p)| *p == SectionPattern { x: 10, c: 2 }));
    }

    #[test]
    fn section_pattern_rejects_bad_sections() {
        let s = q53();
        let g = s.generators()[0].clone();
        assert!(matches!(section_pattern(s, two_ovoid(), &g), Err(Error::BadConfiguration(_))));
        let w = PolarSpace::build(&"W:5:3".parse().unwrap()).unwrap();
        assert!(matches!(section_pattern(&w, &PointSet::empty(364), &g), Err(Error::BadConfiguration(_))));
    }

    #[test]
    fn symplectic_trivial_patterns() {
        let w = PolarSpace::build(&"W:5:3".parse().unwrap()).unwrap();
        let f = w.field();
        let a = enumerate_subspaces(5, 3, f)
            .into_iter()
            .find(|a| {
                let c = classify_section(f, w.form(), a).unwrap();
                c.is_nondegenerate() && c.base_type == PolarKind::Symplectic
            })
            .unwrap();
        let full = symplectic_pattern(&w, &PointSet::full(364), &a).unwrap();
        assert_eq!(full, SectionPattern { x: 40, c: 4 });
        let empty = symplectic_pattern(&w, &PointSet::empty(364), &a).unwrap();
        assert_eq!(empty, SectionPattern { x: 0, c: 0 });
    }

    /// Oracle: scan every (c, m) in a generous box for zeros of the pattern.
    fn zero_cases_by_scan(q: i64, n: u32) -> Vec<(u64, u64)> {
        let t = q.pow(n - 1);
        let mut out = Vec::new();
        for c in 0..=q + 1 {
            for m in 1..=10 * q {
                if (m - c) * t + m == 0 {
                    out.push((c as u64, m as u64));
                }
            }
        }
        out
    }

    #[test]
    fn zero_cases() {
        for q in [3u64, 5, 7, 9, 11] {
            assert_eq!(pattern_zero_cases(q, 2), vec![(q + 1, q)]);
            for n in 2..=5 {
                assert_eq!(pattern_zero_cases(q, n), zero_cases_by_scan(q as i64, n));
            }
            assert!(pattern_zero_cases(q, 3).is_empty());
            assert!(pattern_zero_cases(q, 4).is_empty());
        }
    }

    #[test]
    fn search_honours_constraints() {
        let s = q53();
        let f = s.field();
        let sigma = enumerate_subspaces(5, 3, f)
            .into_iter()
            .find(|a| {
                let c = classify_section(f, s.form(), a).unwrap();
                c.is_nondegenerate() && c.base_type == PolarKind::Elliptic
            })
            .unwrap();
        let pts = s.section_points(&sigma);
        assert_eq!(pts.len(), 10);
        let mut it = pts.iter();
        let include = PointSet::from_indices(112, [it.next().unwrap(), it.next().unwrap()]);
        let exclude = pts.difference(&include);
        let o = find_m_ovoid(s, 2, &include, &exclude, &SearchOptions::default()).unwrap();
        assert_eq!(o.intersection(&pts), include);
        assert!(verify_m_ovoid(s, &o).ok);
    }

    #[test]
    fn search_failure_modes() {
        let s = q53();
        let none = PointSet::empty(112);
        let one = PointSet::from_indices(112, [0]);
        assert_eq!(find_m_ovoid(s, 0, &one, &none, &SearchOptions::default()), Err(Error::Exhausted { nodes: 0 }));
        let r = find_m_ovoid(s, 2, &none, &none, &SearchOptions { budget: 1, seed: 0 });
        assert!(matches!(r, Err(Error::BudgetExhausted { .. })));
        assert_eq!(find_m_ovoid(s, 1, &one, &one, &SearchOptions::default()), Err(Error::NotDisjoint));
        // Q−(5,q) has no 1-ovoids
        assert!(matches!(
            find_m_ovoid(s, 1, &none, &none, &SearchOptions::default()),
            Err(Error::Exhausted { .. })
        ));
    }

    #[test]
    fn search_is_deterministic() {
        let s = q53();
        let none = PointSet::empty(112);
        let a = find_m_ovoid(s, 2, &none, &none, &SearchOptions { budget: u64::MAX, seed: 7 }).unwrap();
        let b = find_m_ovoid(s, 2, &none, &none, &SearchOptions { budget: u64::MAX, seed: 7 }).unwrap();
        assert_eq!(a, b);
    }
}
