//! Relations on a pack: composition, inverse, balls, the C0 modulus and the
//! diagonal neighbourhoods `E_λ` and `E_{d,λ}`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cover::{Cover, CoverError, Target};
use crate::metric::{DiscretePack, MetricError, ModulusCurve, PointId, PointSet, ScaleLadder};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RelationError {
    #[error("relations live on universes of different sizes ({left} vs {right})")]
    PackMismatch { left: usize, right: usize },
    #[error("point {0} is outside the universe")]
    OutOfUniverse(PointId),
    #[error("lambda is {value} at the bottom of the ladder, above the tolerance {tol}")]
    LambdaNotDecaying { value: f64, tol: f64 },
    #[error("lambda spec: {0}")]
    BadLambda(String),
    #[error("point {0} has an empty ball")]
    NotCovering(PointId),
    #[error("relation is not symmetric")]
    NotSymmetric,
    #[error("relation misses the diagonal at {0}")]
    MissingDiagonal(PointId),
    #[error("the ball around {0} lies in no member of the cover")]
    PreconditionKEnotRefining(PointId),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

/// A set of ordered pairs over the points `0..n`, stored as the balls
/// `E_x = {y : (y,x) ∈ E}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    balls: Vec<PointSet>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation {
            balls: vec![BTreeSet::new(); n],
        }
    }

    pub fn from_pairs<I>(n: usize, pairs: I) -> Result<Self, RelationError>
    where
        I: IntoIterator<Item = (PointId, PointId)>,
    {
        let mut r = Self::empty(n);
        for (p, q) in pairs {
            r.insert(p, q)?;
        }
        Ok(r)
    }

    pub fn insert(&mut self, p: PointId, q: PointId) -> Result<(), RelationError> {
        let n = self.balls.len();
        for v in [p, q] {
            if v >= n {
                return Err(RelationError::OutOfUniverse(v));
            }
        }
        self.balls[q].insert(p);
        Ok(())
    }

    /// `{(p,p)}` over the whole universe.
    pub fn diagonal(n: usize) -> Self {
        Relation {
            balls: (0..n).map(|p| BTreeSet::from([p])).collect(),
        }
    }

    /// `S × S`.
    pub fn square(n: usize, set: &PointSet) -> Self {
        let mut r = Self::empty(n);
        for &q in set {
            r.balls[q] = set.clone();
        }
        r
    }

    pub fn universe(&self) -> usize {
        self.balls.len()
    }

    pub fn contains(&self, p: PointId, q: PointId) -> bool {
        self.balls.get(q).is_some_and(|b| b.contains(&p))
    }

    pub fn len(&self) -> usize {
        self.balls.iter().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.iter().all(BTreeSet::is_empty)
    }

    /// Pairs in lexicographic `(p, q)` order.
    pub fn pairs(&self) -> Vec<(PointId, PointId)> {
        let mut out: Vec<_> = self
            .balls
            .iter()
            .enumerate()
            .flat_map(|(q, b)| b.iter().map(move |&p| (p, q)))
            .collect();
        out.sort_unstable();
        out
    }

    /// `E_x`.
    pub fn ball(&self, x: PointId) -> &PointSet {
        &self.balls[x]
    }

    /// `E(K) = ⋃_{x∈K} E_x`.
    pub fn image<'a, I>(&self, k: I) -> PointSet
    where
        I: IntoIterator<Item = &'a PointId>,
    {
        let mut out = PointSet::new();
        for &x in k {
            out.extend(self.balls[x].iter().copied());
        }
        out
    }

    pub fn inverse(&self) -> Self {
        let mut r = Self::empty(self.universe());
        for (q, b) in self.balls.iter().enumerate() {
            for &p in b {
                r.balls[p].insert(q);
            }
        }
        r
    }

    /// `E∘F = {(x,z) : (x,y) ∈ E, (y,z) ∈ F}`, so `(E∘F)_z = E(F_z)`.
    pub fn compose(&self, other: &Relation) -> Result<Self, RelationError> {
        self.same_universe(other)?;
        Ok(Relation {
            balls: other.balls.iter().map(|fz| self.image(fz)).collect(),
        })
    }

    pub fn union(&self, other: &Relation) -> Result<Self, RelationError> {
        self.same_universe(other)?;
        Ok(Relation {
            balls: self
                .balls
                .iter()
                .zip(&other.balls)
                .map(|(a, b)| a | b)
                .collect(),
        })
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.universe() == other.universe()
            && self.balls.iter().zip(&other.balls).all(|(a, b)| a.is_subset(b))
    }

    pub fn is_symmetric(&self) -> bool {
        self.balls
            .iter()
            .enumerate()
            .all(|(q, b)| b.iter().all(|&p| self.balls[q].contains(&p) && self.balls[p].contains(&q)))
    }

    /// Whether `(p,p) ∈ E` for every `p` in `set`.
    pub fn contains_diagonal_on(&self, set: &PointSet) -> bool {
        set.iter().all(|&p| self.balls[p].contains(&p))
    }

    /// `f×f(E) = {(f(p), f(q))}` on a universe of size `n_target`.
    pub fn push_forward(&self, f: &[PointId], n_target: usize) -> Result<Self, RelationError> {
        if f.len() != self.universe() {
            return Err(RelationError::PackMismatch {
                left: f.len(),
                right: self.universe(),
            });
        }
        let mut r = Self::empty(n_target);
        for (p, q) in self.pairs() {
            r.insert(f[p], f[q])?;
        }
        Ok(r)
    }

    /// Points appearing in some pair.
    pub fn support(&self) -> PointSet {
        let mut out = PointSet::new();
        for (q, b) in self.balls.iter().enumerate() {
            if !b.is_empty() {
                out.insert(q);
                out.extend(b.iter().copied());
            }
        }
        out
    }

    fn same_universe(&self, other: &Relation) -> Result<(), RelationError> {
        if self.universe() == other.universe() {
            Ok(())
        } else {
            Err(RelationError::PackMismatch {
                left: self.universe(),
                right: other.universe(),
            })
        }
    }
}

/// Outcome of a decay test on a modulus curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusVerdict {
    pub curve: ModulusCurve,
    /// Point where the decay is read: the smallest interior boundary
    /// distance of the pack.
    pub t_eval: f64,
    pub value: f64,
    pub threshold: f64,
    pub nondecreasing: bool,
    pub accept: bool,
}

impl ModulusVerdict {
    /// Samples the step function `t ↦ max{value : key ≤ t}` given by
    /// `(key, value)` events, on [`verdict_grid`].
    pub(crate) fn from_events(
        pack: &DiscretePack,
        ladder: &ScaleLadder,
        mut events: Vec<(f64, f64)>,
        tol: f64,
    ) -> Self {
        events.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut prefix = Vec::with_capacity(events.len());
        let mut running = 0.0f64;
        for &(key, v) in &events {
            running = running.max(v);
            prefix.push((key, running));
        }
        let at = |t: f64| {
            let idx = prefix.partition_point(|&(key, _)| key <= t);
            if idx == 0 {
                0.0
            } else {
                prefix[idx - 1].1
            }
        };
        let t_eval = pack.floor();
        let ts = verdict_grid(pack, ladder);
        let curve = ModulusCurve::sample(&ts, at).expect("ladder radii are positive and distinct");
        let value = at(t_eval);
        let threshold = tol * pack.k_sup();
        let nondecreasing = curve.is_nondecreasing();
        ModulusVerdict {
            curve,
            t_eval,
            value,
            threshold,
            nondecreasing,
            accept: nondecreasing && value <= threshold,
        }
    }
}

/// Sample points for modulus curves: the ends of the ladder and every
/// interior depth in between. Curves built from pairs of sample points only
/// change at those depths, so this grid carries the same information as the
/// full ladder.
pub(crate) fn verdict_grid(pack: &DiscretePack, ladder: &ScaleLadder) -> Vec<f64> {
    let top = ladder.r(0);
    let bottom = ladder.r(ladder.last());
    let mut ts = vec![top];
    ts.extend(
        pack.depth_levels()
            .into_iter()
            .rev()
            .filter(|&t| t < top && t > bottom),
    );
    ts.push(bottom);
    ts
}

/// C0 modulus of `E`: at `t`, the largest `d(p,q)` over pairs with
/// `min(d(p,X), d(q,X)) ≤ t`.
pub fn c0_modulus(pack: &DiscretePack, ladder: &ScaleLadder, e: &Relation, tol: f64) -> ModulusVerdict {
    let events = e
        .pairs()
        .into_iter()
        .map(|(p, q)| {
            let key = pack.boundary_distance(p).min(pack.boundary_distance(q));
            (key, pack.d(p, q))
        })
        .collect();
    ModulusVerdict::from_events(pack, ladder, events, tol)
}

/// An increasing function `λ : (0, k] → (0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum LambdaSpec {
    /// `λ(t) = slope · t`.
    Linear { slope: f64 },
    /// `λ(t) = coef · t^exponent`.
    Power { coef: f64, exponent: f64 },
    /// `λ(t) = value`.
    Constant { value: f64 },
    /// Step interpolation of a sampled curve.
    Sampled { values: ModulusCurve },
}

impl Default for LambdaSpec {
    fn default() -> Self {
        LambdaSpec::Linear { slope: 0.5 }
    }
}

impl LambdaSpec {
    pub fn validate(&self) -> Result<(), RelationError> {
        let ok = match self {
            LambdaSpec::Linear { slope } => *slope > 0.0,
            LambdaSpec::Power { coef, exponent } => *coef > 0.0 && *exponent > 0.0,
            LambdaSpec::Constant { value } => *value > 0.0,
            LambdaSpec::Sampled { values } => {
                values.is_nondecreasing() && values.samples().iter().all(|&(_, v)| v > 0.0)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(RelationError::BadLambda(
                "lambda must be positive and nondecreasing".into(),
            ))
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            LambdaSpec::Linear { slope } => slope * t,
            LambdaSpec::Power { coef, exponent } => coef * t.powf(*exponent),
            LambdaSpec::Constant { value } => *value,
            LambdaSpec::Sampled { values } => values.step_value(t),
        }
    }

    /// The spec sampled on a ladder.
    pub fn to_curve(&self, ladder: &ScaleLadder) -> ModulusCurve {
        ModulusCurve::sample(ladder.radii(), |t| self.eval(t)).expect("ladder radii are valid")
    }
}

/// `{(p,q) ∈ X̂×X̂ : d(p,q) < λ(min(d(p,X), d(q,X)))}`.
pub fn diag_nbhd_from_lambda(pack: &DiscretePack, lambda: &LambdaSpec) -> Result<Relation, RelationError> {
    lambda.validate()?;
    Ok(threshold_relation(pack, |t| lambda.eval(t)))
}

fn threshold_relation(pack: &DiscretePack, bound: impl Fn(f64) -> f64) -> Relation {
    let mut r = Relation::empty(pack.len());
    let interior = pack.interior();
    for &p in interior {
        for &q in interior {
            let t = pack.boundary_distance(p).min(pack.boundary_distance(q));
            if pack.d(p, q) < bound(t) {
                r.balls[q].insert(p);
            }
        }
    }
    r
}

/// `E_{d,λ}` together with its design modulus `φ`.
#[derive(Debug, Clone)]
pub struct ControlledRelation {
    pub relation: Relation,
    /// `φ(t) = h(t) + λ(t) + h(t + λ(t))` on the ladder.
    pub phi: ModulusCurve,
}

/// `E_{d,λ} = {(p,q) ∈ X̂² : d(p,q) < φ(min(d(p,X), d(q,X)))}` with `φ`
/// read by step interpolation on the ladder.
pub fn controlled_e(
    pack: &DiscretePack,
    ladder: &ScaleLadder,
    lambda: &LambdaSpec,
    lambda_tol: f64,
) -> Result<ControlledRelation, RelationError> {
    lambda.validate()?;
    let bottom = lambda.eval(ladder.r(ladder.last()));
    let tol = lambda_tol * pack.k_sup();
    if bottom > tol {
        return Err(RelationError::LambdaNotDecaying { value: bottom, tol });
    }
    let h = |t: f64| pack.h_at(t).ok_or(MetricError::EmptyComplement(t));
    let mut samples = Vec::with_capacity(ladder.len());
    for &t in ladder.radii() {
        let l = lambda.eval(t);
        samples.push((t, h(t)? + l + h(t + l)?));
    }
    let phi = ModulusCurve::new(samples)?;
    let relation = threshold_relation(pack, |t| phi.step_value(t));
    Ok(ControlledRelation { relation, phi })
}

/// `Κ(E) = {E_x : x ∈ target}`.
pub fn ball_cover(e: &Relation, target: &PointSet, tag: Target) -> Result<Cover, RelationError> {
    let mut members = Vec::with_capacity(target.len());
    for &x in target {
        let b = e.ball(x);
        if b.is_empty() {
            return Err(RelationError::NotCovering(x));
        }
        members.push(b.clone());
    }
    let cover = Cover::new(e.universe(), target.clone(), tag, members)?;
    if let Some(p) = cover.first_uncovered() {
        return Err(RelationError::NotCovering(p));
    }
    Ok(cover)
}

/// `γ = {V_U : U ∈ α}` with `V_U = {x : E_x ⊆ U}`, empty members dropped.
pub fn shrink_cover(e: &Relation, alpha: &Cover) -> Result<Cover, RelationError> {
    let target = alpha.target();
    if !e.is_symmetric() {
        return Err(RelationError::NotSymmetric);
    }
    if let Some(&p) = target.iter().find(|&&p| !e.ball(p).contains(&p)) {
        return Err(RelationError::MissingDiagonal(p));
    }
    for &x in target {
        if !alpha.members().iter().any(|u| e.ball(x).is_subset(u)) {
            return Err(RelationError::PreconditionKEnotRefining(x));
        }
    }
    let members = alpha
        .members()
        .iter()
        .map(|u| {
            target
                .iter()
                .copied()
                .filter(|&x| e.ball(x).is_subset(u))
                .collect::<PointSet>()
        })
        .filter(|v| !v.is_empty())
        .collect();
    Ok(Cover::new(alpha.universe(), target.clone(), alpha.tag(), members)?)
}
