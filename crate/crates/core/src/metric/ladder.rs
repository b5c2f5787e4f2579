use serde::{Deserialize, Serialize};

use super::pack::{DiscretePack, PointSet};
use super::MetricError;

/// Strictly decreasing radii `r_0 > r_1 > … > r_m` realizing the
/// neighbourhoods `W_n = {p : d(p,X) < r_n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScaleLadder {
    radii: Vec<f64>,
}

impl ScaleLadder {
    /// Checks the ladder against `pack`: strict decrease, `r_0 > k_sup`
    /// and `r_m` below every interior boundary distance.
    pub fn new(pack: &DiscretePack, radii: Vec<f64>) -> Result<Self, MetricError> {
        if radii.len() < 3 {
            return Err(MetricError::BadLadder(format!(
                "need at least 3 rungs, got {}",
                radii.len()
            )));
        }
        if radii.iter().any(|r| !r.is_finite() || *r <= 0.0) {
            return Err(MetricError::BadLadder("radii must be positive".into()));
        }
        if radii.windows(2).any(|w| w[1] >= w[0]) {
            return Err(MetricError::BadLadder("radii must strictly decrease".into()));
        }
        if radii[0] <= pack.k_sup() {
            return Err(MetricError::BadLadder(format!(
                "r_0 = {} does not exceed k_sup = {}",
                radii[0],
                pack.k_sup()
            )));
        }
        let last = *radii.last().unwrap();
        if last >= pack.floor() {
            return Err(MetricError::BadLadder(format!(
                "last rung {} is not below the sample floor {}",
                last,
                pack.floor()
            )));
        }
        Ok(ScaleLadder { radii })
    }

    /// `r_0 = 2 k`, then `r_n = k / 2n` down to the first rung under the
    /// sample floor. Rungs landing on a sample depth are nudged up slightly
    /// so the open and closed neighbourhoods never coincide on the sample.
    pub fn default_for(pack: &DiscretePack) -> Self {
        let k = pack.k_sup();
        let depths = pack.depth_levels();
        let nudge = |r: f64| {
            if depths.iter().any(|&v| (r - v).abs() <= 1e-12 * v.max(1.0)) {
                r * (1.0 + 1e-7)
            } else {
                r
            }
        };
        let mut radii = vec![2.0 * k];
        let mut n = 1u64;
        loop {
            let r = nudge(k / (2.0 * n as f64));
            radii.push(r);
            if r < pack.floor() {
                break;
            }
            n += 1;
        }
        ScaleLadder { radii }
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn r(&self, n: usize) -> f64 {
        self.radii[n]
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Index of the last rung.
    pub fn last(&self) -> usize {
        self.radii.len() - 1
    }

    /// Rungs at the given indices, which must be increasing.
    pub fn subladder(&self, indices: &[usize]) -> Self {
        ScaleLadder {
            radii: indices.iter().map(|&i| self.radii[i]).collect(),
        }
    }

    /// Number of annuli `n = 0..=m-2`.
    pub fn annulus_count(&self) -> usize {
        self.radii.len().saturating_sub(2)
    }
}

/// `{p ∈ X̂ : r_{n+2} < d(p,X) < r_n}`.
pub fn annulus(pack: &DiscretePack, ladder: &ScaleLadder, n: usize) -> Result<PointSet, MetricError> {
    if n + 2 >= ladder.len() {
        return Err(MetricError::IndexOutOfLadder {
            n,
            max: ladder.len() as isize - 3,
        });
    }
    let (hi, lo) = (ladder.r(n), ladder.r(n + 2));
    Ok(pack
        .interior()
        .iter()
        .copied()
        .filter(|&p| {
            let b = pack.boundary_distance(p);
            lo < b && b < hi
        })
        .collect())
}

/// Sampled function `t ↦ value` with strictly decreasing `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusCurve {
    samples: Vec<(f64, f64)>,
}

impl ModulusCurve {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self, MetricError> {
        if samples.is_empty() {
            return Err(MetricError::BadCurve("no samples".into()));
        }
        if samples.iter().any(|&(t, v)| !(t > 0.0) || !(v >= 0.0)) {
            return Err(MetricError::BadCurve(
                "t must be positive and values nonnegative".into(),
            ));
        }
        if samples.windows(2).any(|w| w[1].0 >= w[0].0) {
            return Err(MetricError::BadCurve("t must strictly decrease".into()));
        }
        Ok(ModulusCurve { samples })
    }

    /// Build from decreasing `ts` by evaluating `f` at each.
    pub fn sample(ts: &[f64], f: impl Fn(f64) -> f64) -> Result<Self, MetricError> {
        Self::new(ts.iter().map(|&t| (t, f(t))).collect())
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    /// Value at the smallest sample `t' ≥ t`; above the top sample, the top
    /// value.
    pub fn step_value(&self, t: f64) -> f64 {
        // samples are decreasing in t: find the last index with t_i >= t
        let idx = self.samples.partition_point(|&(ti, _)| ti >= t);
        if idx == 0 {
            self.samples[0].1
        } else {
            self.samples[idx - 1].1
        }
    }

    /// Value at the smallest sampled `t`.
    pub fn bottom_value(&self) -> f64 {
        self.samples.last().unwrap().1
    }

    /// Non-strict monotonicity: larger `t` never has a smaller value.
    pub fn is_nondecreasing(&self) -> bool {
        self.samples.windows(2).all(|w| w[0].1 >= w[1].1)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value\n");
        for (t, v) in &self.samples {
            out.push_str(&format!("{t},{v}\n"));
        }
        out
    }
}

/// `h` sampled on the ladder; `k_sup` wherever `t ≥ k_sup`.
pub fn h_profile(pack: &DiscretePack, ladder: &ScaleLadder) -> Result<ModulusCurve, MetricError> {
    let mut samples = Vec::with_capacity(ladder.len());
    for &t in ladder.radii() {
        let v = pack.h_at(t).ok_or(MetricError::EmptyComplement(t))?;
        samples.push((t, v));
    }
    ModulusCurve::new(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{generate_pack, PackKind};

    fn fixture() -> DiscretePack {
        generate_pack(&PackKind::FiniteCylinder {
            base_points: 1,
            levels: 4,
            ratio: 0.5,
            spacing: 1.0,
        })
        .unwrap()
    }

    fn fixture_ladder(pack: &DiscretePack) -> ScaleLadder {
        ScaleLadder::new(pack, vec![1.5, 0.6, 0.3, 0.1, 0.05]).unwrap()
    }

    fn levels_of(pack: &DiscretePack, set: &PointSet) -> Vec<f64> {
        set.iter().map(|&p| pack.boundary_distance(p)).collect()
    }

    #[test]
    fn h_matches_hand_values() {
        let pack = fixture();
        assert_eq!(pack.h_at(0.3), Some(0.5));
        assert_eq!(pack.h_at(1.2), Some(1.0));
        assert_eq!(pack.h_at(0.05), Some(0.125));
    }

    #[test]
    fn h_profile_is_monotone_and_capped() {
        let pack = fixture();
        let curve = h_profile(&pack, &fixture_ladder(&pack)).unwrap();
        assert!(curve.is_nondecreasing());
        assert_eq!(curve.samples()[0], (1.5, 1.0));
        assert_eq!(curve.bottom_value(), 0.125);
    }

    #[test]
    fn annuli_on_fixture() {
        let pack = fixture();
        let ladder = fixture_ladder(&pack);
        let a0 = annulus(&pack, &ladder, 0).unwrap();
        assert_eq!(levels_of(&pack, &a0), vec![1.0, 0.5]);
        let a1 = annulus(&pack, &ladder, 1).unwrap();
        assert_eq!(levels_of(&pack, &a1), vec![0.5, 0.25, 0.125]);
        assert!(matches!(
            annulus(&pack, &ladder, 3),
            Err(MetricError::IndexOutOfLadder { .. })
        ));
    }

    #[test]
    fn ladder_validation() {
        let pack = fixture();
        assert!(ScaleLadder::new(&pack, vec![1.0, 0.5, 0.1]).is_err());
        assert!(ScaleLadder::new(&pack, vec![1.5, 0.5, 0.2]).is_err());
        assert!(ScaleLadder::new(&pack, vec![1.5, 0.6, 0.6, 0.1]).is_err());
    }

    #[test]
    fn default_ladder_avoids_sample_depths() {
        let pack = fixture();
        let ladder = ScaleLadder::default_for(&pack);
        assert!(ScaleLadder::new(&pack, ladder.radii().to_vec()).is_ok());
        for r in ladder.radii() {
            assert!(!pack.depth_levels().contains(r));
        }
    }

    #[test]
    fn step_interpolation_reads_from_above() {
        let c = ModulusCurve::new(vec![(1.0, 3.0), (0.5, 2.0), (0.1, 1.0)]).unwrap();
        assert_eq!(c.step_value(0.3), 2.0);
        assert_eq!(c.step_value(0.5), 2.0);
        assert_eq!(c.step_value(2.0), 3.0);
        assert_eq!(c.step_value(0.01), 1.0);
    }
}
