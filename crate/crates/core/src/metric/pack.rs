use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::generate::PackKind;
use super::MetricError;

/// Index of a point inside a [`DiscretePack`].
pub type PointId = usize;

/// A finite set of point indices.
pub type PointSet = BTreeSet<PointId>;

/// Numerical knobs shared by every verdict in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Slack allowed in the triangle inequality when validating raw metrics.
    pub triangle: f64,
    /// C0 threshold, as a fraction of `k_sup`.
    pub c0: f64,
    /// Uniformity threshold, as a fraction of `k_sup`.
    pub uniformity: f64,
    /// Largest admissible value of a lambda spec at the bottom of the ladder,
    /// as a fraction of `k_sup`.
    pub lambda: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            triangle: 1e-9,
            c0: 0.05,
            uniformity: 0.05,
            lambda: 0.05,
        }
    }
}

/// Product layout of a pack generated as `X × levels`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderLayout {
    /// Decreasing levels in `(0, 1]`.
    pub levels: Vec<f64>,
    /// For every point: the boundary point below it and its level index.
    /// Boundary points map to themselves with `None`.
    pub cells: Vec<(PointId, Option<usize>)>,
}

/// Descriptive data carried alongside the metric.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PackMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<PackKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_dim: Option<u32>,
    /// Ambient coordinates, one row per point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<CylinderLayout>,
    /// Spacing of the boundary sample when it stands in for a continuum
    /// (0 when the boundary is exactly finite).
    #[serde(default)]
    pub base_spacing: f64,
}

/// A finite sample of a compactification pack: the boundary `X`, its
/// complement `X̂` and an explicit metric on the union.
#[derive(Debug, Clone)]
pub struct DiscretePack {
    ids: Vec<String>,
    dist: Vec<f64>,
    n: usize,
    boundary_mask: Vec<bool>,
    boundary: Vec<PointId>,
    interior: Vec<PointId>,
    bdist: Vec<f64>,
    nearest_boundary: Vec<PointId>,
    k_sup: f64,
    floor: f64,
    delta_res: f64,
    delta_dense: f64,
    h_steps: Vec<(f64, f64)>,
    meta: PackMeta,
}

/// Validate a raw distance matrix and boundary mask and build a pack.
pub fn validate_pack(
    raw_points: Vec<String>,
    raw_dist: Vec<Vec<f64>>,
    boundary_mask: Vec<bool>,
    tolerances: &Tolerances,
) -> Result<DiscretePack, MetricError> {
    let n = raw_points.len();
    if raw_dist.len() != n || raw_dist.iter().any(|row| row.len() != n) {
        return Err(MetricError::NotSquare);
    }
    if boundary_mask.len() != n {
        return Err(MetricError::MaskSize {
            expected: n,
            got: boundary_mask.len(),
        });
    }
    for p in 0..n {
        for q in 0..n {
            let v = raw_dist[p][q];
            if !v.is_finite() || v < 0.0 {
                return Err(MetricError::InvalidEntry { p, q, value: v });
            }
        }
        if raw_dist[p][p] != 0.0 {
            return Err(MetricError::NonzeroSelfDistance(p));
        }
    }
    for p in 0..n {
        for q in (p + 1)..n {
            if (raw_dist[p][q] - raw_dist[q][p]).abs() > tolerances.triangle {
                return Err(MetricError::AsymmetricDistance { p, q });
            }
        }
    }
    let mut worst: Option<(usize, usize, usize, f64)> = None;
    for p in 0..n {
        for q in 0..n {
            let dpq = raw_dist[p][q];
            for r in 0..n {
                let defect = dpq - raw_dist[p][r] - raw_dist[r][q];
                if defect > tolerances.triangle && worst.map_or(true, |w| defect > w.3) {
                    worst = Some((p, q, r, defect));
                }
            }
        }
    }
    if let Some((p, q, r, defect)) = worst {
        return Err(MetricError::TriangleViolation { p, q, r, defect });
    }
    let flat = raw_dist.into_iter().flatten().collect();
    DiscretePack::from_parts(raw_points, flat, boundary_mask, PackMeta::default())
}

impl DiscretePack {
    /// Assemble a pack from a flat row-major matrix whose metric axioms are
    /// already known to hold (generators, file loaders after validation).
    pub(crate) fn from_parts(
        ids: Vec<String>,
        dist: Vec<f64>,
        boundary_mask: Vec<bool>,
        meta: PackMeta,
    ) -> Result<Self, MetricError> {
        let n = ids.len();
        debug_assert_eq!(dist.len(), n * n);
        let boundary: Vec<PointId> = (0..n).filter(|&p| boundary_mask[p]).collect();
        let interior: Vec<PointId> = (0..n).filter(|&p| !boundary_mask[p]).collect();
        if boundary.is_empty() {
            return Err(MetricError::EmptySide("boundary"));
        }
        if interior.is_empty() {
            return Err(MetricError::EmptySide("interior"));
        }
        let mut bdist = vec![0.0; n];
        let mut nearest_boundary = vec![0; n];
        for p in 0..n {
            let (mut best, mut arg) = (f64::INFINITY, boundary[0]);
            for &x in &boundary {
                let d = dist[p * n + x];
                if d < best {
                    best = d;
                    arg = x;
                }
            }
            bdist[p] = best;
            nearest_boundary[p] = arg;
        }
        for &p in &interior {
            if bdist[p] <= 0.0 {
                return Err(MetricError::InteriorOnBoundary(p));
            }
        }
        let k_sup = interior.iter().map(|&p| bdist[p]).fold(0.0, f64::max);
        let floor = interior
            .iter()
            .map(|&p| bdist[p])
            .fold(f64::INFINITY, f64::min);
        let delta_res = (0..n)
            .map(|p| {
                (0..n)
                    .filter(|&q| q != p)
                    .map(|q| dist[p * n + q])
                    .fold(f64::INFINITY, f64::min)
            })
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max);
        let delta_dense = boundary
            .iter()
            .map(|&x| {
                interior
                    .iter()
                    .map(|&p| dist[x * n + p])
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);

        // h(t) only changes at the distinct boundary distances of interior
        // points, so tabulate it there with suffix minima per boundary point.
        let mut by_depth: Vec<PointId> = interior.clone();
        by_depth.sort_by(|a, b| bdist[*b].total_cmp(&bdist[*a]));
        let mut running: Vec<f64> = vec![f64::INFINITY; boundary.len()];
        let mut h_steps: Vec<(f64, f64)> = Vec::new();
        let mut i = 0;
        while i < by_depth.len() {
            let level = bdist[by_depth[i]];
            while i < by_depth.len() && bdist[by_depth[i]] == level {
                let p = by_depth[i];
                for (slot, &x) in running.iter_mut().zip(&boundary) {
                    *slot = slot.min(dist[x * n + p]);
                }
                i += 1;
            }
            h_steps.push((level, running.iter().copied().fold(0.0, f64::max)));
        }
        h_steps.reverse();

        Ok(DiscretePack {
            ids,
            dist,
            n,
            boundary_mask,
            boundary,
            interior,
            bdist,
            nearest_boundary,
            k_sup,
            floor,
            delta_res,
            delta_dense,
            h_steps,
            meta,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<PointId> {
        self.ids.iter().position(|s| s == id)
    }

    #[inline]
    pub fn d(&self, p: PointId, q: PointId) -> f64 {
        self.dist[p * self.n + q]
    }

    pub fn dist_row(&self, p: PointId) -> &[f64] {
        &self.dist[p * self.n..(p + 1) * self.n]
    }

    pub fn is_boundary(&self, p: PointId) -> bool {
        self.boundary_mask[p]
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary_mask
    }

    pub fn boundary(&self) -> &[PointId] {
        &self.boundary
    }

    pub fn interior(&self) -> &[PointId] {
        &self.interior
    }

    pub fn boundary_set(&self) -> PointSet {
        self.boundary.iter().copied().collect()
    }

    pub fn interior_set(&self) -> PointSet {
        self.interior.iter().copied().collect()
    }

    pub fn all_points(&self) -> PointSet {
        (0..self.n).collect()
    }

    /// `d(p, X)`.
    pub fn boundary_distance(&self, p: PointId) -> f64 {
        self.bdist[p]
    }

    /// Lowest-id boundary point realizing `d(p, X)`.
    pub fn nearest_boundary(&self, p: PointId) -> PointId {
        self.nearest_boundary[p]
    }

    /// `max_p d(p, X)`.
    pub fn k_sup(&self) -> f64 {
        self.k_sup
    }

    /// Smallest boundary distance realized by an interior sample point.
    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// Largest nearest-neighbour gap in the sample.
    pub fn delta_res(&self) -> f64 {
        self.delta_res
    }

    /// Largest distance from a boundary point to the interior sample.
    pub fn delta_dense(&self) -> f64 {
        self.delta_dense
    }

    /// Replaces the descriptive data; the metric is untouched.
    pub fn with_meta(mut self, meta: PackMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn meta(&self) -> &PackMeta {
        &self.meta
    }

    pub fn known_dim(&self) -> Option<u32> {
        self.meta.known_dim
    }

    /// `d(p, S)` with `d(p, ∅) = ∞`.
    pub fn dist_to_set<'a, I>(&self, p: PointId, set: I) -> f64
    where
        I: IntoIterator<Item = &'a PointId>,
    {
        set.into_iter()
            .map(|&q| self.d(p, q))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn diam<'a, I>(&self, set: I) -> f64
    where
        I: IntoIterator<Item = &'a PointId>,
        I::IntoIter: Clone,
    {
        let it = set.into_iter();
        let mut best = 0.0f64;
        for p in it.clone() {
            for q in it.clone() {
                best = best.max(self.d(*p, *q));
            }
        }
        best
    }

    /// `h(t) = max_{x∈X} d(x, {p : d(p,X) ≥ t})`, capped at `k_sup` for
    /// `t ≥ k_sup`. `None` when the outer set is empty below `k_sup`.
    pub fn h_at(&self, t: f64) -> Option<f64> {
        if t >= self.k_sup {
            return Some(self.k_sup);
        }
        let idx = self.h_steps.partition_point(|&(level, _)| level < t);
        self.h_steps.get(idx).map(|&(_, h)| h)
    }

    /// Points with `d(p, X) < r`.
    pub fn open_nbhd(&self, r: f64) -> PointSet {
        (0..self.n).filter(|&p| self.bdist[p] < r).collect()
    }

    /// Points with `d(p, X) ≤ r`.
    pub fn closed_nbhd(&self, r: f64) -> PointSet {
        (0..self.n).filter(|&p| self.bdist[p] <= r).collect()
    }

    /// Sorted distinct boundary distances of interior points.
    pub fn depth_levels(&self) -> Vec<f64> {
        self.h_steps.iter().map(|&(t, _)| t).collect()
    }

    /// Sub-pack on a subset of points, keeping ids and metric.
    pub fn restrict(&self, keep: &[PointId]) -> Result<DiscretePack, MetricError> {
        let m = keep.len();
        let mut dist = Vec::with_capacity(m * m);
        for &p in keep {
            for &q in keep {
                dist.push(self.d(p, q));
            }
        }
        let ids = keep.iter().map(|&p| self.ids[p].clone()).collect();
        let mask = keep.iter().map(|&p| self.boundary_mask[p]).collect();
        let meta = PackMeta {
            coords: self
                .meta
                .coords
                .as_ref()
                .map(|c| keep.iter().map(|&p| c[p].clone()).collect()),
            base_spacing: self.meta.base_spacing,
            known_dim: self.meta.known_dim,
            ..PackMeta::default()
        };
        DiscretePack::from_parts(ids, dist, mask, meta)
    }

    /// Raw matrix as nested rows (file export).
    pub fn dist_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|p| self.dist_row(p).to_vec()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line3(dac: f64) -> Result<DiscretePack, MetricError> {
        validate_pack(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![0.0, 1.0, dac],
                vec![1.0, 0.0, 1.0],
                vec![dac, 1.0, 0.0],
            ],
            vec![true, false, true],
            &Tolerances::default(),
        )
    }

    #[test]
    fn line3_is_valid() {
        let pack = line3(2.0).unwrap();
        assert_eq!(pack.k_sup(), 1.0);
        assert_eq!(pack.boundary_distance(1), 1.0);
        assert_eq!(pack.boundary_distance(0), 0.0);
        assert_eq!(pack.nearest_boundary(1), 0);
    }

    #[test]
    fn triangle_violation_reports_worst_triple() {
        match line3(5.0) {
            Err(MetricError::TriangleViolation { p, q, r, defect }) => {
                assert_eq!(r, 1);
                assert!((p == 0 && q == 2) || (p == 2 && q == 0));
                assert!((defect - 3.0).abs() < 1e-12);
            }
            other => panic!("expected TriangleViolation, got {other:?}"),
        }
    }

    #[test]
    fn all_boundary_is_rejected() {
        let err = validate_pack(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![true, true],
            &Tolerances::default(),
        )
        .unwrap_err();
        assert!(matches!(err, MetricError::EmptySide("interior")));
    }

    #[test]
    fn asymmetric_matrix_is_rejected() {
        let err = validate_pack(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 1.0], vec![2.0, 0.0]],
            vec![true, false],
            &Tolerances::default(),
        )
        .unwrap_err();
        assert!(matches!(err, MetricError::AsymmetricDistance { .. }));
    }

    #[test]
    fn mask_size_mismatch() {
        let err = validate_pack(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![true],
            &Tolerances::default(),
        )
        .unwrap_err();
        assert!(matches!(err, MetricError::MaskSize { .. }));
    }
}
