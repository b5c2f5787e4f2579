//! Property tests of the relation algebra, Ext, multiplicities, doubling and
//! the file formats.

use std::collections::BTreeSet;

use cancov::canonical::{ext, star_expand_chain, star_expand_unchecked};
use cancov::cover::{
    delta_of, lebesgue_number, mult_along, mult_at, multiplicity, refines, star, Cover, Target,
};
use cancov::cylinder::double_cover;
use cancov::io::{relation_from_ids, relation_to_ids, CoverFile};
use cancov::metric::{validate_pack, DiscretePack, PointSet, Tolerances};
use cancov::relation::Relation;
use cancov::suite::random_end_separated;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn relation(n: usize) -> impl Strategy<Value = Relation> {
    proptest::collection::vec((0..n, 0..n), 0..n * n).prop_map(move |pairs| Relation::from_pairs(n, pairs).unwrap())
}

fn subset(n: usize) -> impl Strategy<Value = PointSet> {
    proptest::collection::btree_set(0..n, 0..=n)
}

/// A cover of `0..n`: random members plus singletons for anything missed.
fn cover(n: usize) -> impl Strategy<Value = Cover> {
    proptest::collection::vec(proptest::collection::btree_set(0..n, 1..=n), 1..6).prop_map(move |mut members| {
        let covered: PointSet = members.iter().flatten().copied().collect();
        members.extend((0..n).filter(|p| !covered.contains(p)).map(|p| BTreeSet::from([p])));
        Cover::new(n, (0..n).collect(), Target::All, members).unwrap()
    })
}

/// Points of a small integer grid with the Euclidean metric; the first
/// `boundary` points form the boundary.
fn grid_pack(n: usize, boundary: usize) -> impl Strategy<Value = DiscretePack> {
    proptest::sample::subsequence((0..16).collect::<Vec<i32>>(), n)
        .prop_shuffle()
        .prop_map(move |cells| {
            let pts: Vec<(i32, i32)> = cells.iter().map(|c| (c % 4, c / 4)).collect();
            let dist = pts
                .iter()
                .map(|a| pts.iter().map(|b| (((a.0 - b.0).pow(2) + (a.1 - b.1).pow(2)) as f64).sqrt()).collect())
                .collect();
            let ids = (0..n).map(|i| format!("p{i}")).collect();
            let mask = (0..n).map(|i| i < boundary).collect();
            validate_pack(ids, dist, mask, &Tolerances::default()).unwrap()
        })
}

fn diagonal_closure(e: &Relation) -> Relation {
    e.union(&e.inverse()).unwrap().union(&Relation::diagonal(e.universe())).unwrap()
}

proptest! {
    #[test]
    fn composition_is_associative(a in relation(6), b in relation(6), c in relation(6)) {
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inverse_reverses_composition(a in relation(6), b in relation(6)) {
        let left = a.compose(&b).unwrap().inverse();
        let right = b.inverse().compose(&a.inverse()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn image_distributes_over_union(e in relation(7), a in subset(7), b in subset(7)) {
        let both: PointSet = a.union(&b).copied().collect();
        let split: PointSet = e.image(&a).union(&e.image(&b)).copied().collect();
        prop_assert_eq!(e.image(&both), split);
    }

    #[test]
    fn image_of_composition(e in relation(6), f in relation(6), a in subset(6)) {
        prop_assert_eq!(e.compose(&f).unwrap().image(&a), e.image(&f.image(&a)));
    }

    #[test]
    fn push_forward_composes(e in relation(6), f in proptest::collection::vec(0usize..4, 6), g in proptest::collection::vec(0usize..3, 4)) {
        let gf: Vec<usize> = f.iter().map(|&x| g[x]).collect();
        let two_steps = e.push_forward(&f, 4).unwrap().push_forward(&g, 3).unwrap();
        prop_assert_eq!(e.push_forward(&gf, 3).unwrap(), two_steps);
    }

    #[test]
    fn star_is_delta_image(alpha in cover(8), s in subset(8)) {
        prop_assert_eq!(star(&alpha, &s), delta_of(&alpha).image(&s));
    }

    #[test]
    fn star_is_monotone(alpha in cover(8), s in subset(8), t in subset(8)) {
        let big: PointSet = s.union(&t).copied().collect();
        prop_assert!(star(&alpha, &s).is_subset(&star(&alpha, &big)));
    }

    #[test]
    fn mult_along_a_neighbourhood_dominates_mult(alpha in cover(8), e in relation(8)) {
        let e = diagonal_closure(&e);
        prop_assert!(mult_along(&alpha, &e) >= multiplicity(&alpha));
        prop_assert_eq!(mult_along(&alpha, &Relation::diagonal(8)), multiplicity(&alpha));
    }

    #[test]
    fn multiplicity_is_the_largest_count(alpha in cover(8)) {
        let brute = (0..8).map(|p| alpha.members().iter().filter(|u| u.contains(&p)).count()).max().unwrap();
        prop_assert_eq!(multiplicity(&alpha), brute);
        prop_assert!((0..8).all(|p| mult_at(&alpha, p) <= brute));
    }

    #[test]
    fn refinement_witness_verifies(alpha in cover(8), seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // shrink each member to a nonempty subset and keep coverage
        let mut members: Vec<PointSet> = alpha
            .members()
            .iter()
            .map(|u| {
                let keep: PointSet = u.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
                if keep.is_empty() { BTreeSet::from([*u.iter().next().unwrap()]) } else { keep }
            })
            .collect();
        let covered: PointSet = members.iter().flatten().copied().collect();
        members.extend((0..8).filter(|p| !covered.contains(p)).map(|p| BTreeSet::from([p])));
        let beta = Cover::new(8, (0..8).collect(), Target::All, members).unwrap();
        let w = refines(&beta, &alpha).unwrap();
        prop_assert!(w.verify(&beta, &alpha));
        prop_assert!(multiplicity(&beta) >= 1);
    }

    #[test]
    fn star_expansion_chain_holds(e in relation(8), beta in cover(8), gamma in cover(8)) {
        let e = diagonal_closure(&e);
        let alpha = star_expand_unchecked(&e, &beta, &gamma).unwrap();
        let (lhs, rhs) = star_expand_chain(&e, &beta, &gamma, &alpha).unwrap();
        prop_assert!(lhs <= rhs, "{} > {}", lhs, rhs);
        // every member of γ lies in the member it expands to
        prop_assert!(refines(&gamma, &alpha).is_ok());
    }

    #[test]
    fn lebesgue_number_is_a_guarantee(pack in grid_pack(7, 1), alpha in cover(7)) {
        let l = lebesgue_number(&pack, &alpha).unwrap();
        for mask in 1u32..(1 << 7) {
            let s: PointSet = (0..7).filter(|&p| mask >> p & 1 == 1).collect();
            if pack.diam(&s) < l {
                prop_assert!(alpha.members().iter().any(|u| s.is_subset(u)));
            }
        }
    }

    #[test]
    fn ext_properties(pack in grid_pack(10, 4), u1 in subset(4), u2 in subset(4)) {
        let boundary = pack.boundary_set();
        let (v1, v2) = (ext(&pack, &u1).unwrap(), ext(&pack, &u2).unwrap());
        let trace: PointSet = v1.intersection(&boundary).copied().collect();
        prop_assert_eq!(&trace, &u1);
        let both: PointSet = u1.intersection(&u2).copied().collect();
        let meet: PointSet = v1.intersection(&v2).copied().collect();
        prop_assert_eq!(ext(&pack, &both).unwrap(), meet.clone());
        prop_assert_eq!(u1.is_subset(&u2), v1.is_subset(&v2));
        prop_assert_eq!(both.is_empty(), meet.is_empty());
        prop_assert_eq!(ext(&pack, &boundary).unwrap(), pack.all_points());
    }

    #[test]
    fn generated_metrics_are_valid(pack in grid_pack(12, 3)) {
        for p in 0..pack.len() {
            prop_assert_eq!(pack.d(p, p), 0.0);
            for q in 0..pack.len() {
                prop_assert_eq!(pack.d(p, q), pack.d(q, p));
                for r in 0..pack.len() {
                    prop_assert!(pack.d(p, r) <= pack.d(p, q) + pack.d(q, r) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn doubling_keeps_multiplicity(seed in any::<u64>(), base in 1usize..4, k in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alpha = random_end_separated(&mut rng, base);
        let doubled = double_cover(&alpha, k).unwrap();
        prop_assert_eq!(doubled.multiplicity(), alpha.multiplicity());
        prop_assert!(doubled.straddler().is_none());
        prop_assert!(doubled.covers());
        prop_assert!(doubled.vertical_extent() <= 1.0 / k as f64 + 1e-12);
    }

    #[test]
    fn relation_and_cover_files_round_trip(pack in grid_pack(8, 2), e in relation(8), alpha in cover(8)) {
        prop_assert_eq!(relation_from_ids(&pack, &relation_to_ids(&pack, &e)).unwrap(), e);
        let json = serde_json::to_string(&CoverFile::from_cover(&pack, &alpha)).unwrap();
        let back = serde_json::from_str::<CoverFile>(&json).unwrap().into_cover(&pack).unwrap();
        prop_assert_eq!(back, alpha);
    }
}
