//! Exhaustive and randomized checks of the relation identities, the Ext
//! properties, the multiplicity-transfer lemmas and cover doubling.
//!
//! Every check compares the library against a direct evaluation of the
//! definitions on bitmasks, so the two computations share no code.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::canonical::ext;
use crate::cover::{lebesgue_number, mult_along, multiplicity, star, delta_of, Cover, Target};
use crate::cylinder::{double_cover, Cell, GridCover};
use crate::metric::{generate_pack, validate_pack, DiscretePack, PackKind, PointSet, Tolerances};
use crate::relation::Relation;

/// Pass count of one named check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckCount {
    pub name: String,
    pub instances: usize,
    pub failures: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl CheckCount {
    fn new(name: &str) -> Self {
        CheckCount {
            name: name.to_string(),
            instances: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }
}

/// Instance counts for [`verify_suite`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSizes {
    /// Random relations on up to 8 points.
    pub identity_random: usize,
    /// Every relation on this many points, with every pair of subsets.
    pub identity_exhaustive_points: usize,
    /// Random relations whose subsets are all enumerated, per size 4 and 5.
    pub identity_subset_relations: usize,
    /// Random packs of at most 12 points with every pair of boundary subsets.
    pub ext_small_packs: usize,
    /// Random subset pairs on larger packs.
    pub ext_random: usize,
    pub lemma_instances: usize,
    pub doubling_instances: usize,
}

impl Default for SuiteSizes {
    fn default() -> Self {
        SuiteSizes {
            identity_random: 10_000,
            identity_exhaustive_points: 3,
            identity_subset_relations: 200,
            ext_small_packs: 40,
            ext_random: 500,
            lemma_instances: 500,
            doubling_instances: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub seed: u64,
    pub checks: Vec<CheckCount>,
}

impl SuiteSummary {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.failures == 0 && c.instances > 0)
    }

    pub fn check(&self, name: &str) -> Option<&CheckCount> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Runs every check with the given seed.
pub fn verify_suite(seed: u64, sizes: &SuiteSizes) -> SuiteSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = identity_checks(&mut rng, sizes);
    checks.extend(ext_checks(&mut rng, sizes));
    checks.extend(lemma_checks(&mut rng, sizes));
    checks.push(doubling_check(&mut rng, sizes.doubling_instances));
    SuiteSummary { seed, checks }
}

type Mask = u64;

fn mask_of(s: &PointSet) -> Mask {
    s.iter().fold(0, |m, &p| m | 1 << p)
}

fn set_of(m: Mask, n: usize) -> PointSet {
    (0..n).filter(|&p| m >> p & 1 == 1).collect()
}

/// Pairs as a matrix: `m[p][q]` iff `(p, q) ∈ E`.
#[derive(Debug, Clone)]
struct Pairs {
    n: usize,
    m: Vec<Vec<bool>>,
}

impl Pairs {
    fn random<R: Rng>(rng: &mut R, n: usize) -> Self {
        let density = rng.gen_range(0.05..0.7);
        Pairs {
            n,
            m: (0..n).map(|_| (0..n).map(|_| rng.gen_bool(density)).collect()).collect(),
        }
    }

    fn from_code(n: usize, code: u64) -> Self {
        Pairs {
            n,
            m: (0..n).map(|p| (0..n).map(|q| code >> (p * n + q) & 1 == 1).collect()).collect(),
        }
    }

    fn relation(&self) -> Relation {
        let pairs = (0..self.n).flat_map(|p| (0..self.n).filter(move |&q| self.m[p][q]).map(move |q| (p, q)));
        Relation::from_pairs(self.n, pairs).expect("pairs inside the universe")
    }

    /// `E_x = {y : (y, x) ∈ E}`.
    fn ball(&self, x: usize) -> Mask {
        (0..self.n).filter(|&y| self.m[y][x]).fold(0, |m, y| m | 1 << y)
    }

    /// `E(A) = {y : (y, a) ∈ E for some a ∈ A}`.
    fn image(&self, a: Mask) -> Mask {
        (0..self.n)
            .filter(|&y| (0..self.n).any(|q| a >> q & 1 == 1 && self.m[y][q]))
            .fold(0, |m, y| m | 1 << y)
    }
}

fn random_mask<R: Rng>(rng: &mut R, n: usize) -> Mask {
    rng.gen_range(0..(1u64 << n))
}

fn random_family<R: Rng>(rng: &mut R, n: usize) -> Vec<Mask> {
    let count = rng.gen_range(1..=6);
    (0..count).map(|_| random_mask(rng, n).max(1 << rng.gen_range(0..n))).collect()
}

fn family_cover(n: usize, family: &[Mask]) -> Cover {
    let members: Vec<PointSet> = family.iter().map(|&m| set_of(m, n)).collect();
    let target = members.iter().flatten().copied().collect();
    Cover::new_dropping_empty(n, target, Target::Custom, members).expect("members inside their union")
}

/// `max_x #{U : U ∩ E_x ≠ ∅}`, straight from the definition.
fn mult_along_brute(family: &[Mask], e: &Pairs) -> usize {
    (0..e.n)
        .map(|x| family.iter().filter(|&&u| u & e.ball(x) != 0).count())
        .max()
        .unwrap_or(0)
}

fn mult_brute(family: &[Mask], n: usize) -> usize {
    (0..n)
        .map(|p| family.iter().filter(|&&u| u >> p & 1 == 1).count())
        .max()
        .unwrap_or(0)
}

/// The six set identities for one relation and family, with `subsets`
/// enumerating the pairs `(A, B)` to test.
fn identities_once(
    counts: &mut [CheckCount],
    e: &Pairs,
    f: &Pairs,
    family: &[Mask],
    map: &[usize],
    n_target: usize,
    subsets: &[(Mask, Mask)],
) {
    let n = e.n;
    let re = e.relation();
    let rf = f.relation();
    let inv = re.inverse();
    let alpha = family_cover(n, family);
    let delta = delta_of(&alpha);
    let images: Vec<Mask> = (0..1u64 << n).map(|a| mask_of(&re.image(&set_of(a, n)))).collect();

    for &(a, b) in subsets {
        // Δ(α)(A) = α(A)
        let star_oracle = family.iter().filter(|&&u| u & a != 0).fold(0, |m, &u| m | u);
        let lhs = mask_of(&delta.image(&set_of(a, n)));
        let rhs = mask_of(&star(&alpha, &set_of(a, n)));
        counts[0].record(lhs == star_oracle && rhs == star_oracle, || format!("A={a:b}"));
        // E(A) = ⋃ E_a
        let union = (0..n).filter(|&q| a >> q & 1 == 1).fold(0, |m, q| m | e.ball(q));
        counts[2].record(images[a as usize] == e.image(a) && images[a as usize] == union, || format!("A={a:b}"));
        // E(A) ∩ B ≠ ∅ iff A ∩ E⁻¹(B) ≠ ∅
        let back = mask_of(&inv.image(&set_of(b, n)));
        counts[3].record((images[a as usize] & b != 0) == (a & back != 0), || format!("A={a:b} B={b:b}"));
        // E(B) ⊆ A iff E ∩ (Z∖A)×B = ∅
        let contained = images[b as usize] & !a == 0;
        let empty = (0..n).all(|p| (0..n).all(|q| !(e.m[p][q] && a >> p & 1 == 0 && b >> q & 1 == 1)));
        counts[4].record(contained == empty, || format!("A={a:b} B={b:b}"));
    }
    // (E∘F)_x = E(F_x)
    let composed = re.compose(&rf).expect("same universe");
    for x in 0..n {
        let oracle = e.image(f.ball(x));
        counts[1].record(mask_of(composed.ball(x)) == oracle, || format!("x={x}"));
    }
    // (f×f(E))_{x′} = ⋃_{a ∈ f⁻¹(x′)} f(E_a) = f(E(f⁻¹(x′)))
    let pushed = re.push_forward(map, n_target).expect("map covers the universe");
    let fmap = |m: Mask| (0..n).filter(|&p| m >> p & 1 == 1).fold(0u64, |acc, p| acc | 1 << map[p]);
    for x in 0..n_target {
        let fiber = (0..n).filter(|&p| map[p] == x).fold(0u64, |m, p| m | 1 << p);
        let union = (0..n).filter(|&p| fiber >> p & 1 == 1).fold(0, |acc, p| acc | fmap(e.ball(p)));
        let via_image = fmap(e.image(fiber));
        counts[5].record(mask_of(pushed.ball(x)) == union && union == via_image, || format!("x′={x}"));
    }
}

fn identity_checks<R: Rng>(rng: &mut R, sizes: &SuiteSizes) -> Vec<CheckCount> {
    let mut counts: Vec<CheckCount> = [
        "delta_is_star",
        "compose_ball",
        "image_is_union_of_balls",
        "meet_via_inverse",
        "containment_via_pairs",
        "push_forward_ball",
    ]
    .iter()
    .map(|s| CheckCount::new(s))
    .collect();
    let all_pairs = |n: usize| -> Vec<(Mask, Mask)> {
        (0..1u64 << n).flat_map(|a| (0..1u64 << n).map(move |b| (a, b))).collect()
    };

    // every relation on a few points, every pair of subsets
    let n = sizes.identity_exhaustive_points;
    let subsets = all_pairs(n);
    for code in 0..1u64 << (n * n) {
        let e = Pairs::from_code(n, code);
        let f = Pairs::random(rng, n);
        let family = random_family(rng, n);
        let map: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        identities_once(&mut counts, &e, &f, &family, &map, n, &subsets);
    }
    // random relations on 4 and 5 points, every pair of subsets
    for n in [4, 5] {
        let subsets = all_pairs(n);
        for _ in 0..sizes.identity_subset_relations {
            let (e, f) = (Pairs::random(rng, n), Pairs::random(rng, n));
            let family = random_family(rng, n);
            let m = rng.gen_range(1..=n);
            let map: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
            identities_once(&mut counts, &e, &f, &family, &map, m, &subsets);
        }
    }
    // random instances on up to 8 points
    for _ in 0..sizes.identity_random {
        let n = rng.gen_range(1..=8);
        let (e, f) = (Pairs::random(rng, n), Pairs::random(rng, n));
        let family = random_family(rng, n);
        let m = rng.gen_range(1..=8);
        let map: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
        let subsets: Vec<(Mask, Mask)> = (0..4).map(|_| (random_mask(rng, n), random_mask(rng, n))).collect();
        identities_once(&mut counts, &e, &f, &family, &map, m, &subsets);
    }
    counts
}

/// Points on a small integer grid, so that distance ties are common.
fn random_grid_pack<R: Rng>(rng: &mut R, n: usize, side: i32, boundary: usize) -> DiscretePack {
    let mut cells: Vec<(i32, i32)> = (0..side).flat_map(|x| (0..side).map(move |y| (x, y))).collect();
    cells.shuffle(rng);
    cells.truncate(n);
    let dist = cells
        .iter()
        .map(|a| {
            cells
                .iter()
                .map(|b| (((a.0 - b.0).pow(2) + (a.1 - b.1).pow(2)) as f64).sqrt())
                .collect()
        })
        .collect();
    let ids = (0..n).map(|i| format!("p{i}")).collect();
    let mask = (0..n).map(|i| i < boundary).collect();
    validate_pack(ids, dist, mask, &Tolerances::default()).expect("euclidean distances")
}

/// `v(U)` straight from the definition.
fn ext_brute(pack: &DiscretePack, u: Mask) -> Mask {
    let boundary = pack.boundary();
    (0..pack.len())
        .filter(|&x| {
            let (mut near, mut far) = (f64::INFINITY, f64::INFINITY);
            for &y in boundary {
                if u >> y & 1 == 1 {
                    near = near.min(pack.d(x, y));
                } else {
                    far = far.min(pack.d(x, y));
                }
            }
            near < far
        })
        .fold(0, |m, x| m | 1 << x)
}

/// Properties a)–f) of Ext on the subset pairs `pairs`, plus triples for d).
fn ext_on_pack<R: Rng>(rng: &mut R, counts: &mut [CheckCount], pack: &DiscretePack, pairs: &[(Mask, Mask)]) {
    let n = pack.len();
    let bmask = mask_of(&pack.boundary_set());
    let all: Mask = if n == 64 { !0 } else { (1 << n) - 1 };
    let v = |u: Mask| mask_of(&ext(pack, &set_of(u, n)).expect("boundary subset"));
    let id = pack.ids().join(",");
    let mut seen = BTreeSet::new();
    for &(u1, u2) in pairs {
        for u in [u1, u2] {
            if seen.insert(u) {
                let vu = v(u);
                counts[0].record(vu == ext_brute(pack, u), || format!("{id}: U={u:b}"));
                counts[1].record(vu & bmask == u, || format!("{id}: U={u:b}"));
                counts[5].record((u == 0) == (vu == 0), || format!("{id}: U={u:b}"));
            }
        }
        let (v1, v2) = (v(u1), v(u2));
        counts[3].record((u1 & !u2 == 0) == (v1 & !v2 == 0), || format!("{id}: U1={u1:b} U2={u2:b}"));
        counts[4].record((u1 & u2 != 0) == (v1 & v2 != 0), || format!("{id}: U1={u1:b} U2={u2:b}"));
        counts[6].record(v(u1 & u2) == v1 & v2, || format!("{id}: U1={u1:b} U2={u2:b}"));
        let u3 = random_subset_of(rng, bmask);
        let v3 = v(u3);
        counts[4].record(
            (u1 & u2 & u3 != 0) == (v1 & v2 & v3 != 0),
            || format!("{id}: U1={u1:b} U2={u2:b} U3={u3:b}"),
        );
    }
    counts[2].record(v(bmask) == all && v(0) == 0, || format!("{id}: v(X) or v(∅)"));
}

fn random_subset_of<R: Rng>(rng: &mut R, of: Mask) -> Mask {
    let bits: Vec<u32> = (0..64).filter(|&b| of >> b & 1 == 1).collect();
    bits.iter().filter(|_| rng.gen_bool(0.5)).fold(0, |m, &b| m | 1 << b)
}

fn subsets_of(of: Mask) -> Vec<Mask> {
    // enumerate submasks of `of`
    let mut out = vec![0];
    let mut s = of;
    while s != 0 {
        out.push(s);
        s = (s - 1) & of;
    }
    out.sort_unstable();
    out
}

fn ext_checks<R: Rng>(rng: &mut R, sizes: &SuiteSizes) -> Vec<CheckCount> {
    let mut counts: Vec<CheckCount> = [
        "ext_matches_definition",
        "ext_trace_on_boundary",
        "ext_whole_and_empty",
        "ext_inclusion",
        "ext_meets",
        "ext_nonempty",
        "ext_intersection",
    ]
    .iter()
    .map(|s| CheckCount::new(s))
    .collect();

    let line3 = validate_pack(
        vec!["a".into(), "b".into(), "c".into()],
        vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]],
        vec![true, false, true],
        &Tolerances::default(),
    )
    .expect("line");
    let mut small = vec![
        line3,
        generate_pack(&PackKind::CountableExample { y_points: 3 }).expect("countable"),
        generate_pack(&PackKind::FiniteCylinder {
            base_points: 3,
            levels: 3,
            ratio: 0.5,
            spacing: 1.0,
        })
        .expect("finite cylinder"),
    ];
    for _ in 0..sizes.ext_small_packs {
        let n = rng.gen_range(3..=12);
        let b = rng.gen_range(1..=(n - 1).min(6));
        small.push(random_grid_pack(rng, n, 4, b));
    }
    for pack in &small {
        let subs = subsets_of(mask_of(&pack.boundary_set()));
        let pairs: Vec<(Mask, Mask)> = subs.iter().flat_map(|&a| subs.iter().map(move |&b| (a, b))).collect();
        ext_on_pack(rng, &mut counts, pack, &pairs);
    }
    for _ in 0..sizes.ext_random {
        let n = rng.gen_range(13..=30);
        let b = rng.gen_range(2..=12);
        let pack = random_grid_pack(rng, n, 6, b);
        let bmask = mask_of(&pack.boundary_set());
        let pair = (random_subset_of(rng, bmask), random_subset_of(rng, bmask));
        ext_on_pack(rng, &mut counts, &pack, &[pair]);
    }
    counts
}

fn lemma_checks<R: Rng>(rng: &mut R, sizes: &SuiteSizes) -> Vec<CheckCount> {
    let mut image = CheckCount::new("mult_of_image_cover");
    let mut image_plain = CheckCount::new("mult_of_image_cover_plain");
    let mut pullback = CheckCount::new("mult_of_pullback_cover");
    let mut shrinking = CheckCount::new("mult_of_shrunk_cover");
    let mut monotone = CheckCount::new("star_monotone");
    let mut lebesgue = CheckCount::new("lebesgue_guarantee");
    for _ in 0..sizes.lemma_instances {
        let n = rng.gen_range(2..=8);
        let (e, f) = (Pairs::random(rng, n), Pairs::random(rng, n));
        let family = random_family(rng, n);
        let alpha = family_cover(n, &family);
        let (re, rf) = (e.relation(), f.relation());

        // mult_F E(α) ≤ mult_{E⁻¹∘F} α and mult E(α) ≤ mult_{E⁻¹} α
        let pushed: Vec<Mask> = family.iter().map(|&u| e.image(u)).collect();
        let e_alpha = family_cover(n, &pushed);
        let chain = re.inverse().compose(&rf).expect("same universe");
        let (lhs, rhs) = (mult_along(&e_alpha, &rf), mult_along(&alpha, &chain));
        let inv_pairs = Pairs {
            n,
            m: (0..n).map(|p| (0..n).map(|q| e.m[q][p]).collect()).collect(),
        };
        let chain_pairs = Pairs {
            n,
            m: (0..n)
                .map(|y| (0..n).map(|x| inv_pairs.image(f.ball(x)) >> y & 1 == 1).collect())
                .collect(),
        };
        let brute = (mult_along_brute(&pushed, &f), mult_along_brute(&family, &chain_pairs));
        image.record(lhs <= rhs && (lhs, rhs) == brute, || format!("{lhs} vs {rhs}, brute {brute:?}"));
        let (lhs, rhs) = (multiplicity(&e_alpha), mult_along(&alpha, &re.inverse()));
        image_plain.record(
            lhs <= rhs && lhs == mult_brute(&pushed, n) && rhs == mult_along_brute(&family, &inv_pairs),
            || format!("{lhs} vs {rhs}"),
        );

        // mult_E f⁻¹(α) ≤ mult_{f×f(E)} α
        let m = rng.gen_range(1..=8);
        let map: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
        let target_family = random_family(rng, m);
        let pulled: Vec<Mask> = target_family
            .iter()
            .map(|&u| (0..n).filter(|&p| u >> map[p] & 1 == 1).fold(0, |acc, p| acc | 1 << p))
            .collect();
        let ffe = re.push_forward(&map, m).expect("map covers the universe");
        let (lhs, rhs) = (mult_along(&family_cover(n, &pulled), &re), mult_along(&family_cover(m, &target_family), &ffe));
        let ffe_pairs = Pairs {
            n: m,
            m: (0..m)
                .map(|a| (0..m).map(|b| (0..n).any(|p| (0..n).any(|q| e.m[p][q] && map[p] == a && map[q] == b))).collect())
                .collect(),
        };
        let brute = (mult_along_brute(&pulled, &e), mult_along_brute(&target_family, &ffe_pairs));
        pullback.record(lhs <= rhs && (lhs, rhs) == brute, || format!("{lhs} vs {rhs}, brute {brute:?}"));

        // φ : α ↠ β with φ(U) ⊆ U gives mult β ≤ mult α
        let shrunk: Vec<Mask> = family
            .iter()
            .map(|&u| random_subset_of(rng, u).max(u & u.wrapping_neg()))
            .collect();
        let beta = family_cover(n, &shrunk);
        shrinking.record(
            multiplicity(&beta) <= multiplicity(&alpha) && multiplicity(&beta) == mult_brute(&shrunk, n),
            || format!("{family:?} -> {shrunk:?}"),
        );

        // S ⊆ S′ gives α(S) ⊆ α(S′)
        let big = random_mask(rng, n);
        let small = random_subset_of(rng, big);
        let (a, b) = (star(&alpha, &set_of(small, n)), star(&alpha, &set_of(big, n)));
        monotone.record(a.is_subset(&b), || format!("S={small:b} S′={big:b}"));
    }
    // every subset of diameter below L lies in a member
    for _ in 0..sizes.lemma_instances / 5 {
        let n = rng.gen_range(2..=8);
        let pack = random_grid_pack(rng, n, 4, 1);
        let family = random_family(rng, n);
        let covering: Vec<Mask> = family
            .iter()
            .copied()
            .chain((0..n).map(|p| 1u64 << p).filter(|&s| family.iter().all(|&u| u & s == 0)))
            .collect();
        let members: Vec<PointSet> = covering.iter().map(|&m| set_of(m, n)).collect();
        let beta = Cover::new(n, pack.all_points(), Target::All, members).expect("covering family");
        let l = lebesgue_number(&pack, &beta).expect("covers");
        let ok = (1..1u64 << n).all(|s| {
            let set = set_of(s, n);
            pack.diam(&set) >= l || covering.iter().any(|&u| s & !u == 0)
        });
        lebesgue.record(ok, || format!("L={l} family={covering:?}"));
    }
    vec![image, image_plain, pullback, shrinking, monotone, lebesgue]
}

/// A random cover of `base × {0, 0.1, …, 1}` in which no member meets both
/// ends.
pub fn random_end_separated<R: Rng>(rng: &mut R, base: usize) -> GridCover {
    let levels: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let top = levels.len() - 1;
    let mut members: Vec<BTreeSet<Cell>> = Vec::new();
    for _ in 0..rng.gen_range(2..=6) {
        let lo = rng.gen_range(0..=top);
        let hi = rng.gen_range(lo..=top);
        let (lo, hi) = if lo == 0 && hi == top { (0, rng.gen_range(0..top)) } else { (lo, hi) };
        let columns: Vec<usize> = (0..base).filter(|_| rng.gen_bool(0.6)).collect();
        let m: BTreeSet<Cell> = columns.iter().flat_map(|&x| (lo..=hi).map(move |l| (x, l))).collect();
        if !m.is_empty() {
            members.push(m);
        }
    }
    // runs of uncovered cells per column, split so that none spans both ends
    for x in 0..base {
        let mut l = 0;
        while l <= top {
            if members.iter().any(|m| m.contains(&(x, l))) {
                l += 1;
                continue;
            }
            let mut run = BTreeSet::new();
            while l <= top && !members.iter().any(|m| m.contains(&(x, l))) && !(run.contains(&(x, 0)) && l == top) {
                run.insert((x, l));
                l += 1;
            }
            members.push(run);
        }
    }
    GridCover::new(base, levels, members).expect("cells inside the grid")
}

fn doubling_check<R: Rng>(rng: &mut R, instances: usize) -> CheckCount {
    let mut count = CheckCount::new("doubling");
    for _ in 0..instances {
        let alpha = random_end_separated(rng, 2);
        let k = rng.gen_range(1..=3);
        let gamma = double_cover(&alpha, k).expect("end-separated input");
        let ok = gamma.multiplicity() == alpha.multiplicity()
            && gamma.straddler().is_none()
            && gamma.covers()
            && gamma.vertical_extent() <= 1.0 / k as f64 + 1e-12;
        count.record(ok, || format!("k={k} alpha={:?}", alpha.members));
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let sizes = SuiteSizes {
            identity_random: 200,
            identity_exhaustive_points: 2,
            identity_subset_relations: 5,
            ext_small_packs: 3,
            ext_random: 20,
            lemma_instances: 50,
            doubling_instances: 10,
        };
        let summary = verify_suite(1, &sizes);
        for c in &summary.checks {
            assert_eq!(c.failures, 0, "{c:?}");
            assert!(c.instances > 0, "{}", c.name);
        }
    }

    #[test]
    fn submasks_are_enumerated() {
        assert_eq!(subsets_of(0b101), vec![0, 0b1, 0b100, 0b101]);
    }

    #[test]
    fn random_covers_are_end_separated() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let g = random_end_separated(&mut rng, 2);
            assert!(g.straddler().is_none());
            assert!(g.covers());
        }
    }
}
