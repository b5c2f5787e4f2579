//! Finite covers: multiplicities, mesh, stars, refinement witnesses,
//! Lebesgue numbers, uniformity verdicts and a dimension-at-scale oracle.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{DiscretePack, ModulusCurve, PackKind, PointId, PointSet, ScaleLadder};
use crate::relation::{ModulusVerdict, Relation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoverError {
    #[error("member {0} is empty")]
    EmptyMember(usize),
    #[error("member {member} contains point {point} outside the target")]
    OutsideTarget { member: usize, point: PointId },
    #[error("member {0} of the finer family lies in no member of the coarser one")]
    NotARefinement(usize),
    #[error("point {0} is not covered")]
    NotACover(PointId),
    #[error("covers live on different targets")]
    TargetMismatch,
}

/// Which part of a pack a cover is meant to cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Interior,
    Boundary,
    All,
    Custom,
}

/// A finite family of nonempty point sets inside a target set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    universe: usize,
    target: PointSet,
    tag: Target,
    members: Vec<PointSet>,
}

impl Cover {
    pub fn new(
        universe: usize,
        target: PointSet,
        tag: Target,
        members: Vec<PointSet>,
    ) -> Result<Self, CoverError> {
        for (i, m) in members.iter().enumerate() {
            if m.is_empty() {
                return Err(CoverError::EmptyMember(i));
            }
            if let Some(&p) = m.iter().find(|p| !target.contains(p)) {
                return Err(CoverError::OutsideTarget { member: i, point: p });
            }
        }
        Ok(Cover {
            universe,
            target,
            tag,
            members,
        })
    }

    /// Like [`Cover::new`] but silently drops empty members.
    pub fn new_dropping_empty(
        universe: usize,
        target: PointSet,
        tag: Target,
        members: Vec<PointSet>,
    ) -> Result<Self, CoverError> {
        Self::new(
            universe,
            target,
            tag,
            members.into_iter().filter(|m| !m.is_empty()).collect(),
        )
    }

    /// `{{p} : p ∈ target}`.
    pub fn singletons(universe: usize, target: &PointSet, tag: Target) -> Self {
        Cover {
            universe,
            target: target.clone(),
            tag,
            members: target.iter().map(|&p| BTreeSet::from([p])).collect(),
        }
    }

    /// `{target}`.
    pub fn whole(universe: usize, target: &PointSet, tag: Target) -> Self {
        Cover {
            universe,
            target: target.clone(),
            tag,
            members: vec![target.clone()],
        }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn target(&self) -> &PointSet {
        &self.target
    }

    pub fn tag(&self) -> Target {
        self.tag
    }

    pub fn members(&self) -> &[PointSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn union(&self) -> PointSet {
        self.members.iter().flatten().copied().collect()
    }

    /// Whether the members cover the whole target.
    pub fn covers(&self) -> bool {
        self.first_uncovered().is_none()
    }

    pub fn first_uncovered(&self) -> Option<PointId> {
        let u = self.union();
        self.target.iter().copied().find(|p| !u.contains(p))
    }

    /// Local finiteness has no content on a finite sample.
    pub fn is_locally_finite(&self) -> bool {
        true
    }

    /// The family `self ∪ other` on the same target.
    pub fn join(&self, other: &Cover) -> Result<Cover, CoverError> {
        if self.target != other.target {
            return Err(CoverError::TargetMismatch);
        }
        let mut members = self.members.clone();
        members.extend(other.members.iter().cloned());
        Ok(Cover { members, ..self.clone() })
    }
}

/// Number of members containing `p`.
pub fn mult_at(alpha: &Cover, p: PointId) -> usize {
    alpha.members.iter().filter(|u| u.contains(&p)).count()
}

/// Largest number of members sharing a point.
pub fn multiplicity(alpha: &Cover) -> usize {
    let mut counts = vec![0usize; alpha.universe];
    for u in &alpha.members {
        for &p in u {
            counts[p] += 1;
        }
    }
    counts.into_iter().max().unwrap_or(0)
}

/// A point of largest multiplicity (lowest id) with its multiplicity.
pub fn multiplicity_witness(alpha: &Cover) -> Option<(PointId, usize)> {
    let mut counts = vec![0usize; alpha.universe];
    for u in &alpha.members {
        for &p in u {
            counts[p] += 1;
        }
    }
    let best = *counts.iter().max()?;
    if best == 0 {
        return None;
    }
    counts.iter().position(|&c| c == best).map(|p| (p, best))
}

/// Number of members meeting `s`.
pub fn mult_on(alpha: &Cover, s: &PointSet) -> usize {
    alpha
        .members
        .iter()
        .filter(|u| !u.is_disjoint(s))
        .count()
}

/// `max_x mult_on(α, E_x)`.
pub fn mult_along(alpha: &Cover, e: &Relation) -> usize {
    (0..e.universe())
        .map(|x| mult_on(alpha, e.ball(x)))
        .max()
        .unwrap_or(0)
}

/// `max_p Σ_i mult_at(α_i, p)`.
pub fn common_multiplicity(covers: &[&Cover]) -> usize {
    let n = covers.iter().map(|c| c.universe).max().unwrap_or(0);
    let mut counts = vec![0usize; n];
    for c in covers {
        for u in &c.members {
            for &p in u {
                counts[p] += 1;
            }
        }
    }
    counts.into_iter().max().unwrap_or(0)
}

/// `max diam U`.
pub fn mesh(pack: &DiscretePack, alpha: &Cover) -> f64 {
    alpha
        .members
        .iter()
        .map(|u| pack.diam(u))
        .fold(0.0, f64::max)
}

/// `α(S) = ⋃ {U ∈ α : U ∩ S ≠ ∅}`.
pub fn star(alpha: &Cover, s: &PointSet) -> PointSet {
    let mut out = PointSet::new();
    for u in &alpha.members {
        if !u.is_disjoint(s) {
            out.extend(u.iter().copied());
        }
    }
    out
}

/// `Δ(α) = ⋃ U × U`.
pub fn delta_of(alpha: &Cover) -> Relation {
    let mut r = Relation::empty(alpha.universe);
    for u in &alpha.members {
        for &p in u {
            for &q in u {
                r.insert(p, q).expect("members lie in the universe");
            }
        }
    }
    r
}

/// For each member of the finer cover, the index of a coarser member
/// containing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementWitness {
    pub assignment: Vec<usize>,
}

impl RefinementWitness {
    /// Checks `V ⊆ assignment(V)` member by member.
    pub fn verify(&self, beta: &Cover, alpha: &Cover) -> bool {
        self.assignment.len() == beta.members.len()
            && beta
                .members
                .iter()
                .zip(&self.assignment)
                .all(|(v, &i)| alpha.members.get(i).is_some_and(|u| v.is_subset(u)))
    }
}

/// Witness that `β ≺ α`, assigning the lowest-index container.
pub fn refines(beta: &Cover, alpha: &Cover) -> Result<RefinementWitness, CoverError> {
    let mut assignment = Vec::with_capacity(beta.members.len());
    for (i, v) in beta.members.iter().enumerate() {
        match alpha.members.iter().position(|u| v.is_subset(u)) {
            Some(j) => assignment.push(j),
            None => return Err(CoverError::NotARefinement(i)),
        }
    }
    Ok(RefinementWitness { assignment })
}

/// `min_p max_{U∋p} d(p, target \ U)`, where an empty complement counts as
/// the diameter of the target.
pub fn lebesgue_number(pack: &DiscretePack, beta: &Cover) -> Result<f64, CoverError> {
    let cap = pack.diam(&beta.target);
    let mut best = f64::INFINITY;
    for &p in &beta.target {
        let mut local: Option<f64> = None;
        for u in beta.members.iter().filter(|u| u.contains(&p)) {
            let d = beta
                .target
                .iter()
                .filter(|q| !u.contains(q))
                .map(|&q| pack.d(p, q))
                .fold(f64::INFINITY, f64::min)
                .min(cap);
            local = Some(local.map_or(d, |l: f64| l.max(d)));
        }
        match local {
            Some(l) => best = best.min(l),
            None => return Err(CoverError::NotACover(p)),
        }
    }
    Ok(if best.is_finite() { best } else { cap })
}

/// Uniformity test of a cover of `X̂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformityVerdict {
    /// C0 modulus of `Δ(α)`; this curve decides the verdict.
    pub modulus: ModulusVerdict,
    /// `t ↦ max{diam U : U ⊆ B(X,t)}`, reported alongside.
    pub mesh_curve: ModulusCurve,
    /// Always true on finite samples.
    pub proper: bool,
    pub accept: bool,
}

/// Decay of `Δ(α)` towards the boundary: at `t`, the largest distance
/// between two points of a common member, one of them within `t` of `X`.
pub fn uniformity_verdict(
    pack: &DiscretePack,
    ladder: &ScaleLadder,
    alpha: &Cover,
    tol: f64,
) -> UniformityVerdict {
    let mut events = Vec::new();
    let mut meshes = Vec::with_capacity(alpha.members.len());
    for u in &alpha.members {
        let mut depth = 0.0f64;
        let mut diam = 0.0f64;
        for &p in u {
            let ecc = u.iter().map(|&q| pack.d(p, q)).fold(0.0, f64::max);
            events.push((pack.boundary_distance(p), ecc));
            depth = depth.max(pack.boundary_distance(p));
            diam = diam.max(ecc);
        }
        meshes.push((depth, diam));
    }
    let modulus = ModulusVerdict::from_events(pack, ladder, events, tol);
    let ts: Vec<f64> = modulus.curve.samples().iter().map(|s| s.0).collect();
    let mesh_curve = ModulusCurve::sample(&ts, |t| {
        meshes
            .iter()
            .filter(|(depth, _)| *depth < t)
            .map(|m| m.1)
            .fold(0.0, f64::max)
    })
    .expect("ladder radii are valid");
    UniformityVerdict {
        accept: modulus.accept,
        modulus,
        mesh_curve,
        proper: true,
    }
}

/// Whether `α` is canonical on a finite sample: it covers `X̂` and its
/// uniformity verdict accepts.
pub fn is_canonical(pack: &DiscretePack, ladder: &ScaleLadder, alpha: &Cover, tol: f64) -> bool {
    alpha.target() == &pack.interior_set()
        && alpha.covers()
        && alpha.is_locally_finite()
        && uniformity_verdict(pack, ladder, alpha, tol).accept
}

/// Known linear or cyclic order of a sample, used by [`dim_at_scale`].
#[derive(Debug, Clone, PartialEq)]
pub enum OrderHint {
    None,
    Line(Vec<PointId>),
    Circle(Vec<PointId>),
}

impl OrderHint {
    /// Order of the boundary sample of a generated pack, when it has one.
    pub fn for_boundary(pack: &DiscretePack) -> Self {
        let b = pack.boundary().to_vec();
        match pack.meta().kind {
            Some(PackKind::IntervalCylinder { .. }) | Some(PackKind::FiniteCylinder { .. }) => {
                OrderHint::Line(b)
            }
            Some(PackKind::CubeFace { ambient_dim: 2, .. }) => OrderHint::Line(b),
            Some(PackKind::CircleInDisk { .. }) => OrderHint::Circle(b),
            _ => OrderHint::None,
        }
    }
}

/// Dimension estimate at a fixed scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimAtScale {
    pub dim: usize,
    /// `false` means the value is only an upper bound.
    pub exact: bool,
}

/// Least `mult - 1` over covers of `points` with mesh `≤ ε` in which every
/// pair at distance `≤ ε/4` shares a member.
///
/// Exact when the answer is 0 or when an order hint lets a chain of windows
/// reach multiplicity 2; otherwise a greedy ball cover gives an upper bound.
pub fn dim_at_scale(pack: &DiscretePack, points: &[PointId], eps: f64, hint: &OrderHint) -> DimAtScale {
    let delta = eps / 4.0;
    if components(pack, points, delta)
        .iter()
        .all(|c| pack.diam(c) <= eps)
    {
        return DimAtScale { dim: 0, exact: true };
    }
    let chain = match hint {
        OrderHint::Line(seq) => window_chain(pack, seq, eps, delta, false),
        OrderHint::Circle(seq) => window_chain(pack, seq, eps, delta, true),
        OrderHint::None => None,
    };
    if let Some(mult) = chain {
        if mult == 2 {
            return DimAtScale { dim: 1, exact: true };
        }
    }
    let mut centres: Vec<PointId> = Vec::new();
    for &p in points {
        if centres.iter().all(|&c| pack.d(p, c) > delta) {
            centres.push(p);
        }
    }
    let members: Vec<PointSet> = centres
        .iter()
        .map(|&c| {
            points
                .iter()
                .copied()
                .filter(|&q| pack.d(c, q) <= eps / 2.0)
                .collect()
        })
        .collect();
    let mut counts = vec![0usize; pack.len()];
    for m in &members {
        for &p in m {
            counts[p] += 1;
        }
    }
    let mult = counts.into_iter().max().unwrap_or(1);
    DimAtScale {
        dim: mult.saturating_sub(1),
        exact: false,
    }
}

fn components(pack: &DiscretePack, points: &[PointId], delta: f64) -> Vec<PointSet> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &start in points {
        if !seen.insert(start) {
            continue;
        }
        let mut comp = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(p) = stack.pop() {
            for &q in points {
                if pack.d(p, q) <= delta && seen.insert(q) {
                    comp.insert(q);
                    stack.push(q);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Greedy chain of maximal windows along `seq`, each next window starting
/// at the first point within `delta` of the point after the previous
/// window. Returns the multiplicity when every close pair shares a window.
fn window_chain(pack: &DiscretePack, seq: &[PointId], eps: f64, delta: f64, cyclic: bool) -> Option<usize> {
    let n = seq.len();
    if n == 0 {
        return None;
    }
    let at = |i: usize| seq[i % n];
    // on a circle, run past the start so pairs across the seam share a window
    let total = if cyclic {
        n + 1 + (1..n).filter(|&j| pack.d(seq[0], seq[j]) <= delta).count()
    } else {
        n
    };
    let mut members: Vec<PointSet> = Vec::new();
    let mut start = 0;
    loop {
        let mut end = start;
        while end + 1 < total && (start..=end).all(|i| pack.d(at(i), at(end + 1)) <= eps) {
            end += 1;
        }
        members.push((start..=end).map(at).collect());
        if end + 1 >= total {
            break;
        }
        start = (start + 1..=end)
            .find(|&j| pack.d(at(j), at(end + 1)) <= delta)
            .unwrap_or(end + 1);
    }
    let mut counts = vec![0usize; pack.len()];
    for m in &members {
        for &p in m {
            counts[p] += 1;
        }
    }
    for (i, &p) in seq.iter().enumerate() {
        for &q in &seq[i + 1..] {
            if pack.d(p, q) <= delta && !members.iter().any(|m| m.contains(&p) && m.contains(&q)) {
                return None;
            }
        }
    }
    counts.into_iter().max()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{generate_pack, validate_pack, Tolerances};

    fn line_pack(n: usize) -> DiscretePack {
        // boundary = first n points on a line with unit gaps; one interior
        // point far away so the pack is valid.
        let mut rows = vec![vec![0.0; n + 1]; n + 1];
        for i in 0..n {
            for j in 0..n {
                rows[i][j] = (i as f64 - j as f64).abs();
            }
            rows[i][n] = 10.0 + i as f64;
            rows[n][i] = 10.0 + i as f64;
        }
        let mut mask = vec![true; n];
        mask.push(false);
        validate_pack(
            (0..=n).map(|i| format!("p{i}")).collect(),
            rows,
            mask,
            &Tolerances::default(),
        )
        .unwrap()
    }

    fn set(v: &[usize]) -> PointSet {
        v.iter().copied().collect()
    }

    fn cover(universe: usize, target: &[usize], members: &[&[usize]]) -> Cover {
        Cover::new(
            universe,
            set(target),
            Target::Custom,
            members.iter().map(|m| set(m)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn chain_of_pairs_has_multiplicity_two() {
        let a = cover(5, &[1, 2, 3, 4], &[&[1, 2], &[2, 3], &[3, 4]]);
        assert_eq!(multiplicity(&a), 2);
        assert_eq!(mult_along(&a, &Relation::diagonal(5)), 2);
        assert_eq!(multiplicity_witness(&a), Some((2, 2)));
    }

    #[test]
    fn common_multiplicity_cases() {
        let a = cover(5, &[1, 2, 3, 4], &[&[1, 2], &[2, 3], &[3, 4]]);
        assert_eq!(common_multiplicity(&[&a, &a]), 4);
        let s = Cover::singletons(5, &set(&[1, 2, 3]), Target::Custom);
        assert_eq!(common_multiplicity(&[&s, &s]), 2);
    }

    #[test]
    fn star_mesh_delta_on_extremes() {
        let pack = line_pack(4);
        let t = set(&[0, 1, 2, 3]);
        let s = Cover::singletons(5, &t, Target::Custom);
        assert_eq!(mesh(&pack, &s), 0.0);
        assert_eq!(star(&s, &set(&[1, 2])), set(&[1, 2]));
        let mut diag = Relation::empty(5);
        for p in 0..4 {
            diag.insert(p, p).unwrap();
        }
        assert_eq!(delta_of(&s), diag);
        let w = Cover::whole(5, &t, Target::Custom);
        assert_eq!(star(&w, &set(&[0])), t);
        assert_eq!(delta_of(&w), Relation::square(5, &t));
    }

    #[test]
    fn refinement_cases() {
        let a = cover(5, &[0, 1, 2, 3], &[&[0, 1], &[1, 2, 3]]);
        let s = Cover::singletons(5, &set(&[0, 1, 2, 3]), Target::Custom);
        let w = refines(&s, &a).unwrap();
        assert!(w.verify(&s, &a));
        assert_eq!(refines(&a, &a).unwrap().assignment, vec![0, 1]);
        let straddle = cover(5, &[0, 1, 2, 3], &[&[0, 2]]);
        assert_eq!(refines(&straddle, &a), Err(CoverError::NotARefinement(0)));
    }

    #[test]
    fn lebesgue_number_of_halves() {
        let pack = line_pack(4);
        let halves = cover(5, &[0, 1, 2, 3], &[&[0, 1], &[2, 3]]);
        assert_eq!(lebesgue_number(&pack, &halves).unwrap(), 1.0);
        let whole = Cover::whole(5, &set(&[0, 1, 2, 3]), Target::Custom);
        assert_eq!(lebesgue_number(&pack, &whole).unwrap(), 3.0);
        let partial = cover(5, &[0, 1, 2, 3], &[&[0, 1]]);
        assert_eq!(lebesgue_number(&pack, &partial), Err(CoverError::NotACover(2)));
    }

    #[test]
    fn uniformity_extremes_on_fixture() {
        let pack = generate_pack(&PackKind::FiniteCylinder {
            base_points: 1,
            levels: 4,
            ratio: 0.5,
            spacing: 1.0,
        })
        .unwrap();
        let ladder = ScaleLadder::new(&pack, vec![1.5, 0.6, 0.3, 0.1, 0.05]).unwrap();
        let interior = pack.interior_set();
        let s = Cover::singletons(pack.len(), &interior, Target::Interior);
        let v = uniformity_verdict(&pack, &ladder, &s, 0.05);
        assert!(v.accept);
        assert!(v.modulus.curve.samples().iter().all(|&(_, x)| x == 0.0));
        let w = Cover::whole(pack.len(), &interior, Target::Interior);
        let v = uniformity_verdict(&pack, &ladder, &w, 0.05);
        assert!(!v.accept);
        assert_eq!(v.modulus.value, 0.875);
        assert!(is_canonical(&pack, &ladder, &s, 0.05));
    }

    #[test]
    fn dim_at_scale_cases() {
        let pack = generate_pack(&PackKind::from_tag("finite_cylinder").unwrap()).unwrap();
        let b = pack.boundary().to_vec();
        assert_eq!(
            dim_at_scale(&pack, &b, 0.5, &OrderHint::None),
            DimAtScale { dim: 0, exact: true }
        );
        let pack = generate_pack(&PackKind::from_tag("interval_cylinder").unwrap()).unwrap();
        let b = pack.boundary().to_vec();
        assert_eq!(
            dim_at_scale(&pack, &b, 0.1, &OrderHint::for_boundary(&pack)),
            DimAtScale { dim: 1, exact: true }
        );
        let pack = generate_pack(&PackKind::from_tag("cube_face").unwrap()).unwrap();
        let b = pack.boundary().to_vec();
        assert!(!dim_at_scale(&pack, &b, 1.0, &OrderHint::for_boundary(&pack)).exact);
    }
}
