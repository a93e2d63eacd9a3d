//! Cross-module properties: similarities preserve m-ovoids, files round-trip
//! pipeline output, and set algebra on m-ovoids behaves as it must.

use std::sync::OnceLock;

use polarforge::io::{from_json, to_json, PointSetFile};
use polarforge::isometry::{is_similarity, witt_extend};
use polarforge::ovoids::{complement, find_m_ovoid, union_disjoint, verify_m_ovoid, SearchOptions};
use polarforge::pipelines::{glue_in, PipelineOptions};
use polarforge::{Error, PointSet, PolarSpace};
use proptest::prelude::*;

fn q5() -> &'static PolarSpace {
    static S: OnceLock<PolarSpace> = OnceLock::new();
    S.get_or_init(|| PolarSpace::build(&"Q-:5:3".parse().unwrap()).unwrap())
}

fn two_ovoid(seed: u64) -> PointSet {
    let none = PointSet::empty(q5().num_points());
    find_m_ovoid(q5(), 2, &none, &none, &SearchOptions { seed, ..SearchOptions::default() }).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// An isometry sending one non-perpendicular point pair to another maps
    /// any 2-ovoid to a 2-ovoid.
    #[test]
    fn isometries_preserve_m_ovoids(seed in 0u64..1000, a in 0usize..112, c in 0usize..112, k in 0usize..1000) {
        let s = q5();
        let f = s.field();
        let non_perp = |p: usize| -> Vec<usize> { (0..s.num_points()).filter(|&j| !s.perp_of(p).contains(j)).collect() };
        let (na, nc) = (non_perp(a), non_perp(c));
        let (b, d) = (na[k % na.len()], nc[k % nc.len()]);
        let m = witt_extend(f, s.form(), &[(s.point(a).clone(), s.point(c).clone()), (s.point(b).clone(), s.point(d).clone())]).unwrap();
        prop_assert_eq!(is_similarity(f, s.form(), m.matrix()), Some(1));
        let o = two_ovoid(seed);
        let image = m.image_set(s, &o).unwrap();
        let cert = verify_m_ovoid(s, &image);
        prop_assert!(cert.ok);
        prop_assert_eq!(cert.m, Some(2));
    }

    /// The complement of an m-ovoid of Q−(5,3) is a (4−m)-ovoid.
    #[test]
    fn complements_are_ovoids(seed in 0u64..1000) {
        let o = two_ovoid(seed);
        let cert = verify_m_ovoid(q5(), &complement(&o));
        prop_assert_eq!(cert.m, Some(2));
        prop_assert_eq!(cert.size, 56);
    }

    /// Same seed, same set; the result is re-verified whatever the seed.
    #[test]
    fn search_is_a_function_of_the_seed(seed in 0u64..1000) {
        prop_assert_eq!(two_ovoid(seed), two_ovoid(seed));
    }
}

#[test]
fn disjoint_union_of_an_ovoid_and_its_complement_is_everything() {
    let o = two_ovoid(3);
    let all = union_disjoint(&o, &complement(&o)).unwrap();
    assert_eq!(all, PointSet::full(112));
    assert_eq!(verify_m_ovoid(q5(), &all).m, Some(4));
    assert_eq!(union_disjoint(&o, &o), Err(Error::NotDisjoint));
}

#[test]
fn glue_outputs_round_trip_through_files() {
    let space = PolarSpace::build(&"Q+:7:3".parse().unwrap()).unwrap();
    let report = glue_in(&space, &PipelineOptions::default()).unwrap();
    for (name, text) in report.files(&space) {
        if !name.starts_with('o') && name != "union.json" {
            continue;
        }
        let file: PointSetFile = from_json(&text).unwrap();
        let set = file.to_pointset(&space).unwrap();
        assert_eq!(to_json(&PointSetFile::for_ovoid(&space, &set, file.claimed_m)), text, "{name}");
        if name == "union.json" {
            assert_eq!(verify_m_ovoid(&space, &set).m, Some(4));
        }
    }
}

#[test]
fn constrained_search_respects_include_and_exclude() {
    let s = q5();
    let include = PointSet::from_indices(112, [0, 50]);
    let exclude = PointSet::from_indices(112, [1, 2, 3]);
    let o = find_m_ovoid(s, 2, &include, &exclude, &SearchOptions::default()).unwrap();
    assert!(include.is_subset(&o));
    assert!(o.is_disjoint(&exclude));
}
