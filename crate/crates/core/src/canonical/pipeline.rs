use serde::{Deserialize, Serialize};

use crate::cover::{
    common_multiplicity, delta_of, mult_along, multiplicity, refines, star, uniformity_verdict,
    Cover, RefinementWitness, Target, UniformityVerdict,
};
use crate::metric::{annulus, DiscretePack, PointSet, ScaleLadder};
use crate::relation::{c0_modulus, Relation};

use super::alpha::{refine_subsequence, Subsequence};
use super::ext::ext_family;
use super::provider::Provider;
use super::CanonicalError;

fn require_uniform(
    pack: &DiscretePack,
    ladder: &ScaleLadder,
    cover: &Cover,
    tol: f64,
) -> Result<UniformityVerdict, CanonicalError> {
    let v = uniformity_verdict(pack, ladder, cover, tol);
    if v.accept {
        Ok(v)
    } else {
        Err(CanonicalError::NotUniform {
            value: v.modulus.value,
            threshold: v.modulus.threshold,
        })
    }
}

/// A canonical cover built to refine a given cover.
#[derive(Debug, Clone)]
pub struct CanonicalOutput {
    pub cover: Cover,
    pub ladder: ScaleLadder,
    pub subsequence: Vec<usize>,
    /// Witness that the input cover refines `cover`.
    pub witness: RefinementWitness,
}

/// Greedy boundary ball cover: centres taken in id order, each outside the
/// balls already chosen; members are the open balls of radius `r`.
fn boundary_balls(pack: &DiscretePack, r: f64) -> Vec<PointSet> {
    let mut centres: Vec<usize> = Vec::new();
    for &x in pack.boundary() {
        if centres.iter().all(|&c| pack.d(x, c) >= r) {
            centres.push(x);
        }
    }
    centres
        .iter()
        .map(|&c| {
            pack.boundary()
                .iter()
                .copied()
                .filter(|&x| pack.d(c, x) < r)
                .collect()
        })
        .collect()
}

/// A canonical cover refined by `γ`, built from boundary balls of radius
/// `k_sup / n` pushed out through `v` on the default ladder.
pub fn canonical_refining(pack: &DiscretePack, gamma: &Cover, tol: f64) -> Result<CanonicalOutput, CanonicalError> {
    let ladder = ScaleLadder::default_for(pack);
    require_uniform(pack, &ladder, gamma, tol)?;
    let all = pack.all_points();
    let betas = |k: usize| -> Result<Vec<PointSet>, CanonicalError> {
        if k == 0 {
            Ok(vec![all.clone()])
        } else {
            ext_family(pack, &boundary_balls(pack, pack.k_sup() / k as f64))
        }
    };
    let with_points = gamma.join(&Cover::singletons(pack.len(), gamma.target(), gamma.tag()))?;
    let sub = refine_subsequence(pack, &ladder, &betas, &with_points, tol)?;
    let witness = refines(gamma, &sub.alpha.cover)?;
    Ok(CanonicalOutput {
        cover: sub.alpha.cover,
        ladder,
        subsequence: sub.indices,
        witness,
    })
}

/// `{E(β(U)) : U ∈ γ}` without precondition checks.
pub fn star_expand_unchecked(e: &Relation, beta: &Cover, gamma: &Cover) -> Result<Cover, CanonicalError> {
    let members = gamma
        .members()
        .iter()
        .map(|u| e.image(&star(beta, u)))
        .collect();
    Ok(Cover::new_dropping_empty(
        beta.universe(),
        beta.target().clone(),
        beta.tag(),
        members,
    )?)
}

/// `α = E∘Δ(β)(γ)`, after checking that `E` is a symmetric C0 neighbourhood
/// of the diagonal and that `β` and `γ` are uniform.
pub fn star_expand(
    pack: &DiscretePack,
    ladder: &ScaleLadder,
    e: &Relation,
    beta: &Cover,
    gamma: &Cover,
    tol: f64,
) -> Result<Cover, CanonicalError> {
    if !e.is_symmetric() || !e.contains_diagonal_on(beta.target()) {
        return Err(CanonicalError::NotDiagonalNbhd);
    }
    let v = c0_modulus(pack, ladder, e, tol);
    if !v.accept {
        return Err(CanonicalError::NotC0 {
            value: v.value,
            threshold: v.threshold,
        });
    }
    require_uniform(pack, ladder, beta, tol)?;
    require_uniform(pack, ladder, gamma, tol)?;
    star_expand_unchecked(e, beta, gamma)
}

/// Both sides of `mult_E(α) ≤ mult_{Δ(β)∘E∘E}(γ)` for `α` the star
/// expansion of `γ`.
pub fn star_expand_chain(e: &Relation, beta: &Cover, gamma: &Cover, alpha: &Cover) -> Result<(usize, usize), CanonicalError> {
    let chain = delta_of(beta).compose(&e.compose(e)?)?;
    Ok((mult_along(alpha, e), mult_along(gamma, &chain)))
}

/// Shape of a ladder plus the rungs a run actually used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderSummary {
    pub rungs: usize,
    pub first: f64,
    pub last: f64,
    /// Radii at the chosen subsequence.
    pub used: Vec<f64>,
}

impl LadderSummary {
    pub fn new(ladder: &ScaleLadder, indices: &[usize]) -> Self {
        LadderSummary {
            rungs: ladder.len(),
            first: ladder.r(0),
            last: ladder.r(ladder.last()),
            used: indices.iter().map(|&n| ladder.r(n)).collect(),
        }
    }
}

/// Report of a minimal-multiplicity pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub pack: String,
    pub ladder: LadderSummary,
    pub subsequence: Vec<usize>,
    pub multiplicity: usize,
    pub bound_dim_plus_2: usize,
    pub naive_bound_2dim_plus_2: usize,
    /// Largest common multiplicity of consecutive boundary covers used.
    pub common_multiplicity_max: usize,
    pub witness_ok: bool,
    pub covers_interior: bool,
    pub completed_orphans: usize,
    pub uniformity_verdict: UniformityVerdict,
}

/// Output of [`minimal_canonical`].
#[derive(Debug, Clone)]
pub struct MinimalCanonical {
    pub cover: Cover,
    pub witness: RefinementWitness,
    pub boundary_covers: Vec<Cover>,
    pub subsequence: Subsequence,
    pub report: PipelineReport,
}

/// Canonical cover refined by `γ` with multiplicity at most `dim X + 2`.
///
/// Boundary covers from `provider` are pushed out through `v`, and the
/// subsequence recursion runs against `γ` joined with the singletons.
pub fn minimal_canonical(
    pack: &DiscretePack,
    ladder: Option<&ScaleLadder>,
    gamma: &Cover,
    provider: &Provider,
    tol: f64,
) -> Result<MinimalCanonical, CanonicalError> {
    let dim = pack.known_dim();
    if dim != Some(provider.dim()) {
        return Err(CanonicalError::ProviderMismatch {
            provider: provider.dim(),
            pack: dim,
        });
    }
    let ladder = ladder.cloned().unwrap_or_else(|| ScaleLadder::default_for(pack));
    require_uniform(pack, &ladder, gamma, tol)?;
    let betas = |k: usize| -> Result<Vec<PointSet>, CanonicalError> {
        let alpha = provider.cover(pack, k)?;
        ext_family(pack, alpha.members())
    };
    let with_points = gamma.join(&Cover::singletons(pack.len(), gamma.target(), gamma.tag()))?;
    let sub = refine_subsequence(pack, &ladder, &betas, &with_points, tol)?;

    // points left out by ties in v go to the first member of the deepest
    // annulus that holds them
    let sub_ladder = ladder.subladder(&sub.indices);
    let mut members: Vec<PointSet> = sub.alpha.cover.members().to_vec();
    let covered: PointSet = members.iter().flatten().copied().collect();
    let mut completed = 0;
    for &p in pack.interior() {
        if covered.contains(&p) {
            continue;
        }
        for n in (0..sub_ladder.annulus_count()).rev() {
            if annulus(pack, &sub_ladder, n)?.contains(&p) {
                if let Some(i) = sub.alpha.origin.iter().position(|o| o.0 == n) {
                    members[i].insert(p);
                    completed += 1;
                    break;
                }
            }
        }
    }
    let cover = Cover::new(pack.len(), pack.interior_set(), Target::Interior, members)?;
    let witness = refines(gamma, &cover)?;

    let boundary_covers = (0..sub.betas.len())
        .map(|k| provider.cover(pack, k))
        .collect::<Result<Vec<_>, _>>()?;
    let used = sub_ladder.annulus_count();
    let common_multiplicity_max = boundary_covers
        .windows(2)
        .take(used.saturating_sub(1).max(1))
        .map(|w| common_multiplicity(&[&w[0], &w[1]]))
        .max()
        .unwrap_or(0);
    let d = provider.dim() as usize;
    let report = PipelineReport {
        pack: pack
            .meta()
            .kind
            .as_ref()
            .map_or_else(|| "custom".to_string(), |k| k.tag().to_string()),
        ladder: LadderSummary::new(&ladder, &sub.indices),
        subsequence: sub.indices.clone(),
        multiplicity: multiplicity(&cover),
        bound_dim_plus_2: d + 2,
        naive_bound_2dim_plus_2: 2 * d + 2,
        common_multiplicity_max,
        witness_ok: witness.verify(gamma, &cover),
        covers_interior: cover.covers(),
        completed_orphans: completed,
        uniformity_verdict: uniformity_verdict(pack, &ladder, &cover, tol),
    };
    Ok(MinimalCanonical {
        cover,
        witness,
        boundary_covers,
        subsequence: sub,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{generate_pack, PackKind};
    use crate::relation::{ball_cover, controlled_e, LambdaSpec};

    fn gamma_for(pack: &DiscretePack, ladder: &ScaleLadder) -> Cover {
        let e = controlled_e(pack, ladder, &LambdaSpec::default(), 0.05).unwrap();
        ball_cover(&e.relation, &pack.interior_set(), Target::Interior).unwrap()
    }

    fn run(tag: &str) -> MinimalCanonical {
        let pack = generate_pack(&PackKind::from_tag(tag).unwrap()).unwrap();
        let ladder = ScaleLadder::default_for(&pack);
        let gamma = gamma_for(&pack, &ladder);
        let provider = Provider::for_dim(pack.known_dim().unwrap()).unwrap();
        minimal_canonical(&pack, Some(&ladder), &gamma, &provider, 0.05).unwrap()
    }

    #[test]
    fn finite_cylinder_reaches_two() {
        let out = run("finite_cylinder");
        assert_eq!(out.report.multiplicity, 2);
        assert!(out.report.witness_ok);
        assert!(out.report.covers_interior);
        assert!(out.report.uniformity_verdict.accept);
    }

    #[test]
    fn interval_cylinder_reaches_three() {
        let out = run("interval_cylinder");
        assert_eq!(out.report.multiplicity, 3);
        assert_eq!(out.report.naive_bound_2dim_plus_2, 4);
        assert!(out.report.multiplicity <= out.report.common_multiplicity_max);
        let v = &out.report.uniformity_verdict;
        assert!(v.accept, "{} > {} ; {:?}", v.modulus.value, v.modulus.threshold, out.report.subsequence);
    }

    #[test]
    fn circle_stays_within_three() {
        let out = run("circle_in_disk");
        assert!(out.report.multiplicity <= 3);
        assert!(out.report.witness_ok);
    }

    #[test]
    fn provider_must_match_dimension() {
        let pack = generate_pack(&PackKind::from_tag("finite_cylinder").unwrap()).unwrap();
        let ladder = ScaleLadder::default_for(&pack);
        let gamma = gamma_for(&pack, &ladder);
        assert!(matches!(
            minimal_canonical(&pack, Some(&ladder), &gamma, &Provider::IntervalDim1, 0.05),
            Err(CanonicalError::ProviderMismatch { .. })
        ));
    }

    #[test]
    fn canonical_refining_on_countable_example() {
        let pack = generate_pack(&PackKind::CountableExample { y_points: 5 }).unwrap();
        let s = Cover::singletons(pack.len(), &pack.interior_set(), Target::Interior);
        let out = canonical_refining(&pack, &s, 0.05).unwrap();
        assert!(out.witness.verify(&s, &out.cover));
        assert!(out.cover.covers());
        let whole = Cover::whole(pack.len(), &pack.interior_set(), Target::Interior);
        assert!(matches!(
            canonical_refining(&pack, &whole, 0.05),
            Err(CanonicalError::NotUniform { .. })
        ));
    }

    #[test]
    fn star_expand_trivial_cases() {
        let pack = generate_pack(&PackKind::from_tag("finite_cylinder").unwrap()).unwrap();
        let interior = pack.interior_set();
        let mut diag = Relation::empty(pack.len());
        for &p in &interior {
            diag.insert(p, p).unwrap();
        }
        let s = Cover::singletons(pack.len(), &interior, Target::Interior);
        let ladder = ScaleLadder::default_for(&pack);
        let out = star_expand(&pack, &ladder, &diag, &s, &s, 0.05).unwrap();
        assert_eq!(out.members(), s.members());
        let whole = Cover::whole(pack.len(), &interior, Target::Interior);
        let out = star_expand_unchecked(&diag, &s, &whole).unwrap();
        assert_eq!(out.members(), whole.members());
    }
}
