use crate::cover::{
    lebesgue_number, refines, star, uniformity_verdict, Cover, RefinementWitness, Target,
};
use crate::metric::{annulus, DiscretePack, PointSet, ScaleLadder};

use super::CanonicalError;

/// Output of [`build_alpha`]: the cover plus, per member, the annulus index
/// and the index of the family member it was cut from.
#[derive(Debug, Clone)]
pub struct BuiltAlpha {
    pub cover: Cover,
    pub origin: Vec<(usize, usize)>,
}

/// `α({β_n},{W_n}) = {U ∩ (W_n \ W̄_{n+2}) : U ∈ β_n}`, empty pieces dropped.
pub fn build_alpha(
    pack: &DiscretePack,
    ladder: &ScaleLadder,
    betas: &[Vec<PointSet>],
) -> Result<BuiltAlpha, CanonicalError> {
    let count = ladder.annulus_count();
    if betas.len() < count {
        return Err(CanonicalError::TooFewBetas {
            needed: count,
            got: betas.len(),
        });
    }
    let all = pack.all_points();
    if !betas.first().is_some_and(|b| b.iter().any(|u| all.is_subset(u))) {
        return Err(CanonicalError::Beta0NotWhole);
    }
    let boundary = pack.boundary_set();
    let mut members = Vec::new();
    let mut origin = Vec::new();
    for (n, beta) in betas.iter().enumerate().take(count) {
        let union: PointSet = beta.iter().flatten().copied().collect();
        if !boundary.is_subset(&union) {
            return Err(CanonicalError::BetaDoesNotCoverBoundary(n));
        }
        let ring = annulus(pack, ladder, n)?;
        for (j, u) in beta.iter().enumerate() {
            let piece: PointSet = u.intersection(&ring).copied().collect();
            if !piece.is_empty() {
                members.push(piece);
                origin.push((n, j));
            }
        }
    }
    let cover = Cover::new(pack.len(), pack.interior_set(), Target::Interior, members)?;
    Ok(BuiltAlpha { cover, origin })
}

/// Result of [`refine_subsequence`].
#[derive(Debug, Clone)]
pub struct Subsequence {
    /// Ladder indices `n_0 = 0 < n_1 < … < n_K`.
    pub indices: Vec<usize>,
    /// Families `β_0, …, β_K` consumed by the recursion.
    pub betas: Vec<Vec<PointSet>>,
    pub alpha: BuiltAlpha,
    /// Witness that the input cover refines `alpha`.
    pub witness: RefinementWitness,
}

/// Picks ladder indices so that `γ ≺ α({β_k},{W_{n_k}})`.
///
/// `betas(k)` yields `β_k`; `betas(0)` must contain the whole space.
pub fn refine_subsequence(
    pack: &DiscretePack,
    ladder: &ScaleLadder,
    betas: &dyn Fn(usize) -> Result<Vec<PointSet>, CanonicalError>,
    gamma: &Cover,
    tol: f64,
) -> Result<Subsequence, CanonicalError> {
    let verdict = uniformity_verdict(pack, ladder, gamma, tol);
    if !verdict.accept {
        return Err(CanonicalError::NotUniform {
            value: verdict.modulus.value,
            threshold: verdict.modulus.threshold,
        });
    }
    let last = ladder.last();
    let everything = pack.all_points();
    // (largest depth, diameter) per member of γ
    let shapes: Vec<(f64, f64)> = gamma
        .members()
        .iter()
        .map(|v| {
            let depth = v.iter().map(|&p| pack.boundary_distance(p)).fold(0.0, f64::max);
            (depth, pack.diam(v))
        })
        .collect();
    let l_n = |n: usize| {
        shapes
            .iter()
            .filter(|(depth, _)| *depth < ladder.r(n))
            .map(|s| s.1)
            .fold(0.0, f64::max)
    };
    let first_rung_below = |s: f64, from: usize| (from..=last).find(|&n| ladder.r(n) < s);

    let mut indices = vec![0usize];
    let mut collected = vec![betas(0)?];
    let mut k = 1;
    loop {
        let prev = indices[k - 1];
        let beta = betas(k)?;
        let union: PointSet = beta.iter().flatten().copied().collect();

        // W̄_m ⊆ ⋃β_k
        let uncovered_depth = everything
            .iter()
            .filter(|p| !union.contains(p))
            .map(|&p| pack.boundary_distance(p))
            .fold(f64::INFINITY, f64::min);
        let m = first_rung_below(uncovered_depth, 1).ok_or(CanonicalError::LadderExhausted {
            needed: last + 1,
            last,
        })?;

        // Lebesgue number of β_k ∪ {T X \ W̄_m}
        let mut family = beta.clone();
        let outside: PointSet = everything
            .iter()
            .copied()
            .filter(|&p| pack.boundary_distance(p) > ladder.r(m))
            .collect();
        if !outside.is_empty() {
            family.push(outside);
        }
        let family: Vec<PointSet> = family.into_iter().filter(|u| !u.is_empty()).collect();
        let cover = Cover::new(pack.len(), everything.clone(), Target::All, family)?;
        let big_l = lebesgue_number(pack, &cover)?;
        // L_n does not increase with n
        let (mut lo, mut hi) = (0, last + 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if l_n(mid) < big_l {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let m1 = lo;

        // W̄_{m''} misses γ(T X \ W_{n_{k-1}})
        let far: PointSet = everything
            .iter()
            .copied()
            .filter(|&p| pack.boundary_distance(p) >= ladder.r(prev))
            .collect();
        let reach = star(gamma, &far)
            .iter()
            .map(|&p| pack.boundary_distance(p))
            .fold(f64::INFINITY, f64::min);
        let m2 = first_rung_below(reach, 0).unwrap_or(last + 1);

        let next = (prev + 1).max(m + 1).max(m1).max(m2);
        if next > last {
            return Err(CanonicalError::LadderExhausted { needed: next, last });
        }
        indices.push(next);
        collected.push(beta);
        if k >= 2 && ladder.r(next) < pack.floor() {
            break;
        }
        k += 1;
    }

    let sub = ladder.subladder(&indices);
    let alpha = build_alpha(pack, &sub, &collected)?;
    let witness = refines(gamma, &alpha.cover).map_err(|e| match e {
        crate::cover::CoverError::NotARefinement(i) => CanonicalError::RefinementFailed(i),
        other => other.into(),
    })?;
    debug_assert!(witness.verify(gamma, &alpha.cover));
    Ok(Subsequence {
        indices,
        betas: collected,
        alpha,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::multiplicity;
    use crate::metric::{generate_pack, PackKind};

    /// Geometric ladder with ratio 0.3, which misses every sample depth.
    fn coarse(pack: &DiscretePack) -> ScaleLadder {
        let mut radii = vec![2.0 * pack.k_sup()];
        let mut r = pack.k_sup();
        while r >= pack.floor() {
            r *= 0.3;
            radii.push(r);
        }
        ScaleLadder::new(pack, radii).unwrap()
    }

    fn fixture() -> DiscretePack {
        generate_pack(&PackKind::FiniteCylinder {
            base_points: 1,
            levels: 4,
            ratio: 0.5,
            spacing: 1.0,
        })
        .unwrap()
    }

    #[test]
    fn whole_space_betas_give_annuli() {
        let pack = fixture();
        let ladder = ScaleLadder::new(&pack, vec![1.5, 0.6, 0.3, 0.1, 0.05]).unwrap();
        let whole = vec![pack.all_points()];
        let built = build_alpha(&pack, &ladder, &[whole.clone(), whole.clone(), whole]).unwrap();
        assert_eq!(built.cover.len(), 3);
        for (n, m) in built.cover.members().iter().enumerate() {
            assert_eq!(m, &annulus(&pack, &ladder, n).unwrap());
        }
        assert_eq!(multiplicity(&built.cover), 2);
        assert!(built.cover.covers());
    }

    #[test]
    fn missing_boundary_point_is_reported() {
        let pack = generate_pack(&PackKind::from_tag("finite_cylinder").unwrap()).unwrap();
        let ladder = coarse(&pack);
        let mut betas = vec![vec![pack.all_points()]; ladder.annulus_count()];
        betas[1] = vec![PointSet::from([0, 1])];
        assert_eq!(
            build_alpha(&pack, &ladder, &betas).unwrap_err(),
            CanonicalError::BetaDoesNotCoverBoundary(1)
        );
    }

    #[test]
    fn singletons_refine_any_subsequence() {
        let pack = generate_pack(&PackKind::from_tag("finite_cylinder").unwrap()).unwrap();
        let ladder = coarse(&pack);
        let gamma = Cover::singletons(pack.len(), &pack.interior_set(), Target::Interior);
        let all = pack.all_points();
        let betas = move |_k: usize| Ok(vec![all.clone()]);
        let sub = refine_subsequence(&pack, &ladder, &betas, &gamma, 0.05).unwrap();
        assert!(sub.witness.verify(&gamma, &sub.alpha.cover));
        assert!(sub.alpha.cover.covers());
        assert!(sub.indices.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn short_ladder_is_exhausted() {
        let pack = generate_pack(&PackKind::from_tag("finite_cylinder").unwrap()).unwrap();
        // three rungs: the recursion needs two steps past r_0 and a rung
        // for the Lebesgue-number condition, more than the ladder has
        let ladder = ScaleLadder::new(&pack, vec![2.0, 0.2, pack.floor() / 2.0]).unwrap();
        let gamma = Cover::singletons(pack.len(), &pack.interior_set(), Target::Interior);
        let all = pack.all_points();
        let betas = move |_k: usize| Ok(vec![all.clone()]);
        assert!(matches!(
            refine_subsequence(&pack, &ladder, &betas, &gamma, 0.05),
            Err(CanonicalError::LadderExhausted { .. })
        ));
    }
}
