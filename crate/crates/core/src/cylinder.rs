//! Product constructions on `X × [0,1]`: the maps `f` and `g`, embeddings and
//! pulled-back covers, cover doubling, slab extraction and the lower-bound
//! harness `dim X ≤ mult α − 2`.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cover::{multiplicity, multiplicity_witness, star, uniformity_verdict, Cover, CoverError, Target};
use crate::metric::{
    CylinderLayout, DiscretePack, MetricError, PackMeta, PointId, PointSet, ScaleLadder,
};
use crate::relation::{controlled_e, LambdaSpec, Relation, RelationError};

/// Two levels closer than this are the same level.
const LEVEL_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CylinderError {
    #[error("pack is not an exact product X × levels with the sum metric: {0}")]
    NotACylinder(String),
    #[error("point {0} lies on the boundary")]
    BoundaryInput(PointId),
    #[error("point {0} is not a boundary point")]
    NotBoundaryPoint(PointId),
    #[error("no point lies at depth at least {0}")]
    EmptyOuterSet(f64),
    #[error("level {0} is not positive")]
    BadLevel(f64),
    #[error("member {0} meets both ends of the cylinder")]
    StraddlerPrecondition(usize),
    #[error("the number of copies must be at least 1")]
    BadCopies,
    #[error("slab bounds need 0 < delta2 < delta1 <= 1, got {delta1} and {delta2}")]
    BadDeltas { delta1: f64, delta2: f64 },
    #[error("no sample level lies in the slab")]
    SlabTooThin,
    #[error("embedding: {0}")]
    BadEmbedding(String),
    #[error("grid cover: {0}")]
    BadGrid(String),
    #[error("the lower bound is only asserted on cylindrical packs")]
    NonCylindricalPack,
    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Relation(#[from] RelationError),
}

/// A pack that is exactly `X × levels` with `d((x,t),(y,s)) = d_X(x,y) + |t−s|`.
#[derive(Debug, Clone)]
pub struct CylinderPack {
    pack: DiscretePack,
    layout: CylinderLayout,
    /// `(base, level index)` to point.
    grid: HashMap<(PointId, usize), PointId>,
}

impl CylinderPack {
    /// Checks the product structure and the sum metric on a laid-out pack.
    pub fn from_pack(pack: DiscretePack) -> Result<Self, CylinderError> {
        let layout = pack
            .meta()
            .layout
            .clone()
            .ok_or_else(|| CylinderError::NotACylinder("no layout".into()))?;
        if layout.cells.len() != pack.len() {
            return Err(CylinderError::NotACylinder("layout size".into()));
        }
        let mut grid = HashMap::new();
        for (p, &(z, l)) in layout.cells.iter().enumerate() {
            if !pack.is_boundary(z) {
                return Err(CylinderError::NotACylinder(format!("base of {p} is not a boundary point")));
            }
            match l {
                None if z != p => {
                    return Err(CylinderError::NotACylinder(format!("boundary point {p} has base {z}")));
                }
                None => {}
                Some(l) => {
                    if l >= layout.levels.len() || grid.insert((z, l), p).is_some() {
                        return Err(CylinderError::NotACylinder(format!("cell of {p} is repeated")));
                    }
                }
            }
        }
        if grid.len() != pack.boundary().len() * layout.levels.len() {
            return Err(CylinderError::NotACylinder("some cell is missing".into()));
        }
        let level = |p: PointId| layout.cells[p].1.map_or(0.0, |l| layout.levels[l]);
        for p in 0..pack.len() {
            for q in 0..pack.len() {
                let (zp, zq) = (layout.cells[p].0, layout.cells[q].0);
                let expected = pack.d(zp, zq) + (level(p) - level(q)).abs();
                if (pack.d(p, q) - expected).abs() > 1e-9 {
                    return Err(CylinderError::NotACylinder(format!(
                        "d({p},{q}) = {} but the sum metric gives {expected}",
                        pack.d(p, q)
                    )));
                }
            }
        }
        Ok(CylinderPack { pack, layout, grid })
    }

    /// The exact cylinder over the boundary of `host` at the given levels.
    pub fn over_boundary(host: &DiscretePack, levels: Vec<f64>) -> Result<Self, CylinderError> {
        if levels.is_empty()
            || levels.iter().any(|&t| !(t > 0.0))
            || levels.windows(2).any(|w| w[0] <= w[1])
        {
            return Err(CylinderError::NotACylinder("levels must be positive and decreasing".into()));
        }
        let base = host.boundary();
        let nb = base.len();
        let n = nb * (levels.len() + 1);
        let mut ids = Vec::with_capacity(n);
        let mut cells = Vec::with_capacity(n);
        let mut at = Vec::with_capacity(n);
        for (i, &z) in base.iter().enumerate() {
            ids.push(host.ids()[z].clone());
            cells.push((i, None));
            at.push((z, 0.0));
        }
        for (l, &t) in levels.iter().enumerate() {
            for (i, &z) in base.iter().enumerate() {
                ids.push(format!("{}@{l}", host.ids()[z]));
                cells.push((i, Some(l)));
                at.push((z, t));
            }
        }
        let mut dist = vec![0.0; n * n];
        for p in 0..n {
            for q in (p + 1)..n {
                let v = host.d(at[p].0, at[q].0) + (at[p].1 - at[q].1).abs();
                dist[p * n + q] = v;
                dist[q * n + p] = v;
            }
        }
        let mask = (0..n).map(|p| p < nb).collect();
        let meta = PackMeta {
            known_dim: host.known_dim(),
            layout: Some(CylinderLayout { levels, cells }),
            base_spacing: host.meta().base_spacing,
            ..PackMeta::default()
        };
        Self::from_pack(DiscretePack::from_parts(ids, dist, mask, meta)?)
    }

    pub fn pack(&self) -> &DiscretePack {
        &self.pack
    }

    /// Decreasing levels in `(0, 1]`.
    pub fn levels(&self) -> &[f64] {
        &self.layout.levels
    }

    /// Boundary point below `p`.
    pub fn base_of(&self, p: PointId) -> PointId {
        self.layout.cells[p].0
    }

    /// Level index of `p`, `None` on the boundary.
    pub fn level_index(&self, p: PointId) -> Option<usize> {
        self.layout.cells[p].1
    }

    /// Level of `p`, 0 on the boundary.
    pub fn level_of(&self, p: PointId) -> f64 {
        self.level_index(p).map_or(0.0, |l| self.layout.levels[l])
    }

    /// The point `(z, levels[l])`.
    pub fn point_at(&self, z: PointId, l: usize) -> Option<PointId> {
        self.grid.get(&(z, l)).copied()
    }

    /// Index of the smallest level `≥ t`.
    pub fn level_at_least(&self, t: f64) -> Option<usize> {
        self.layout.levels.iter().rposition(|&s| s >= t)
    }
}

/// `f(x) = (z, t)` with `t = d(x, X)` and `z` the nearest boundary point
/// (lowest id on ties).
pub fn f_map(pack: &DiscretePack, p: PointId) -> Result<(PointId, f64), CylinderError> {
    if pack.is_boundary(p) {
        return Err(CylinderError::BoundaryInput(p));
    }
    Ok((pack.nearest_boundary(p), pack.boundary_distance(p)))
}

/// `g(z, t)`: the point of depth at least `t` nearest to `z` (lowest id on
/// ties).
pub fn g_map(pack: &DiscretePack, z: PointId, t: f64) -> Result<PointId, CylinderError> {
    if !pack.is_boundary(z) {
        return Err(CylinderError::NotBoundaryPoint(z));
    }
    if !(t > 0.0) {
        return Err(CylinderError::BadLevel(t));
    }
    let mut best: Option<(f64, PointId)> = None;
    for &p in pack.interior() {
        if pack.boundary_distance(p) >= t {
            let d = pack.d(z, p);
            if best.is_none_or(|(b, _)| d < b) {
                best = Some((d, p));
            }
        }
    }
    best.map(|b| b.1).ok_or(CylinderError::EmptyOuterSet(t))
}

/// One sample of the `f∘g` round trip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundTrip {
    pub z: PointId,
    pub t: f64,
    pub image: (PointId, f64),
    /// `d_X(z, z′) + |t − t′|`.
    pub displacement: f64,
    /// `3·h(t)`.
    pub bound: f64,
}

/// `f(g(z,t))` for every boundary `z` and every `t` in `ts` with
/// `0 < t ≤ k_sup`.
pub fn round_trips(pack: &DiscretePack, ts: &[f64]) -> Result<Vec<RoundTrip>, CylinderError> {
    let mut out = Vec::new();
    for &t in ts.iter().filter(|&&t| t > 0.0 && t <= pack.k_sup()) {
        let h = pack.h_at(t).ok_or(MetricError::EmptyComplement(t))?;
        for &z in pack.boundary() {
            let image = f_map(pack, g_map(pack, z, t)?)?;
            out.push(RoundTrip {
                z,
                t,
                image,
                displacement: pack.d(z, image.0) + (t - image.1).abs(),
                bound: 3.0 * h,
            });
        }
    }
    Ok(out)
}

/// The cylinder `X × {depths of X̂}` receiving `f`, and `f` on every point
/// (boundary points go to themselves).
pub fn f_image(pack: &DiscretePack) -> Result<(CylinderPack, Vec<PointId>), CylinderError> {
    let levels: Vec<f64> = pack.depth_levels().into_iter().rev().collect();
    let cyl = CylinderPack::over_boundary(pack, levels)?;
    let base_index: HashMap<PointId, usize> =
        pack.boundary().iter().enumerate().map(|(i, &z)| (z, i)).collect();
    let levels = cyl.levels().to_vec();
    let mut map = Vec::with_capacity(pack.len());
    for p in 0..pack.len() {
        let i = base_index[&pack.nearest_boundary(p)];
        let q = if pack.is_boundary(p) {
            i
        } else {
            let t = pack.boundary_distance(p);
            let l = levels
                .iter()
                .position(|&s| (s - t).abs() <= LEVEL_EPS * s.max(1.0))
                .expect("depth is a level");
            cyl.point_at(i, l).expect("full grid")
        };
        map.push(q);
    }
    Ok((cyl, map))
}

/// `f×f(E)` on the image cylinder.
pub fn push_forward_f(pack: &DiscretePack, e: &Relation) -> Result<(CylinderPack, Relation), CylinderError> {
    let (cyl, map) = f_image(pack)?;
    let image = e.push_forward(&map, cyl.pack().len())?;
    Ok((cyl, image))
}

/// Largest distance from a point of the cylinder to the image of `f`,
/// against `h` at its level.
pub fn f_density_gaps(pack: &DiscretePack) -> Result<Vec<(PointId, f64, f64)>, CylinderError> {
    let (cyl, map) = f_image(pack)?;
    let image: PointSet = pack.interior().iter().map(|&p| map[p]).collect();
    let c = cyl.pack();
    let mut out = Vec::new();
    for &q in c.interior() {
        let gap = c.dist_to_set(q, &image);
        let t = cyl.level_of(q);
        let h = pack.h_at(t).ok_or(MetricError::EmptyComplement(t))?;
        out.push((q, gap, h));
    }
    Ok(out)
}

/// Injective `j : X × levels → T X` with `j(x,0) = x`.
#[derive(Debug, Clone)]
pub struct Embedding {
    domain: CylinderPack,
    host: DiscretePack,
    map: Vec<PointId>,
    distortion: f64,
}

impl Embedding {
    pub fn new(domain: CylinderPack, host: DiscretePack, map: Vec<PointId>) -> Result<Self, CylinderError> {
        let dp = domain.pack();
        if map.len() != dp.len() {
            return Err(CylinderError::BadEmbedding("map size".into()));
        }
        if map.iter().any(|&q| q >= host.len()) {
            return Err(CylinderError::BadEmbedding("image outside the host".into()));
        }
        if map.iter().collect::<BTreeSet<_>>().len() != map.len() {
            return Err(CylinderError::BadEmbedding("not injective".into()));
        }
        for &z in dp.boundary() {
            if !host.is_boundary(map[z]) || host.ids()[map[z]] != dp.ids()[z] {
                return Err(CylinderError::BadEmbedding(format!("base point {z} is not fixed")));
            }
        }
        for &p in dp.interior() {
            if host.is_boundary(map[p]) {
                return Err(CylinderError::BadEmbedding(format!("{p} lands on the boundary")));
            }
        }
        let mut distortion = 0.0f64;
        for p in 0..dp.len() {
            for q in 0..dp.len() {
                distortion = distortion.max((dp.d(p, q) - host.d(map[p], map[q])).abs());
            }
        }
        Ok(Embedding {
            domain,
            host,
            map,
            distortion,
        })
    }

    /// A cylinder embedded in itself.
    pub fn identity(cyl: &CylinderPack) -> Self {
        let n = cyl.pack().len();
        Embedding::new(cyl.clone(), cyl.pack().clone(), (0..n).collect()).expect("identity is an embedding")
    }

    /// The collar of a laid-out host: `(x, levels[l])` goes to the host
    /// point recorded at that cell.
    pub fn collar(host: &DiscretePack) -> Result<Self, CylinderError> {
        let layout = host
            .meta()
            .layout
            .as_ref()
            .ok_or_else(|| CylinderError::BadEmbedding("host has no layout".into()))?;
        let cells: HashMap<(PointId, Option<usize>), PointId> =
            layout.cells.iter().enumerate().map(|(p, &c)| (c, p)).collect();
        let domain = CylinderPack::over_boundary(host, layout.levels.clone())?;
        let base = host.boundary();
        let map = (0..domain.pack().len())
            .map(|p| {
                let z = base[domain.base_of(p)];
                cells
                    .get(&(z, domain.level_index(p)))
                    .copied()
                    .ok_or_else(|| CylinderError::BadEmbedding(format!("no host cell for {p}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Embedding::new(domain, host.clone(), map)
    }

    pub fn domain(&self) -> &CylinderPack {
        &self.domain
    }

    pub fn host(&self) -> &DiscretePack {
        &self.host
    }

    pub fn map(&self) -> &[PointId] {
        &self.map
    }

    /// Largest gap between the product metric and the host metric.
    pub fn distortion(&self) -> f64 {
        self.distortion
    }

    /// The domain with the host metric carried back, `d′(a,b) = d(j(a), j(b))`.
    pub fn transported(&self) -> Result<DiscretePack, CylinderError> {
        Ok(self.host.restrict(&self.map)?)
    }
}

/// `β = j⁻¹(α)`, empty preimages dropped.
pub fn pullback_cover(embedding: &Embedding, alpha: &Cover) -> Result<Cover, CylinderError> {
    let domain = embedding.domain().pack();
    let mut back: HashMap<PointId, PointId> = HashMap::new();
    for (p, &q) in embedding.map().iter().enumerate() {
        back.insert(q, p);
    }
    let members = alpha
        .members()
        .iter()
        .map(|u| u.iter().filter_map(|q| back.get(q).copied()).collect::<PointSet>())
        .collect();
    Ok(Cover::new_dropping_empty(
        domain.len(),
        domain.interior_set(),
        Target::Interior,
        members,
    )?)
}

/// A point of `X × [0,1]`: base index and level index.
pub type Cell = (usize, usize);

/// A cover of a grid `X × levels` with levels in `[0,1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCover {
    pub base: usize,
    /// Strictly increasing levels in `[0, 1]`.
    pub levels: Vec<f64>,
    pub members: Vec<BTreeSet<Cell>>,
}

impl GridCover {
    pub fn new(base: usize, levels: Vec<f64>, members: Vec<BTreeSet<Cell>>) -> Result<Self, CylinderError> {
        if levels.windows(2).any(|w| w[0] >= w[1]) || levels.iter().any(|&t| !(0.0..=1.0).contains(&t)) {
            return Err(CylinderError::BadGrid("levels must increase inside [0,1]".into()));
        }
        for (i, m) in members.iter().enumerate() {
            if m.is_empty() {
                return Err(CylinderError::BadGrid(format!("member {i} is empty")));
            }
            if m.iter().any(|&(x, l)| x >= base || l >= levels.len()) {
                return Err(CylinderError::BadGrid(format!("member {i} leaves the grid")));
            }
        }
        Ok(GridCover { base, levels, members })
    }

    pub fn mult_at(&self, c: Cell) -> usize {
        self.members.iter().filter(|m| m.contains(&c)).count()
    }

    pub fn multiplicity(&self) -> usize {
        let mut count: HashMap<Cell, usize> = HashMap::new();
        for m in &self.members {
            for &c in m {
                *count.entry(c).or_default() += 1;
            }
        }
        count.into_values().max().unwrap_or(0)
    }

    pub fn covers(&self) -> bool {
        let union: BTreeSet<Cell> = self.members.iter().flatten().copied().collect();
        union.len() == self.base * self.levels.len()
    }

    fn level_is(&self, l: usize, t: f64) -> bool {
        (self.levels[l] - t).abs() <= LEVEL_EPS
    }

    /// Whether member `i` meets `X × {t}`.
    pub fn meets(&self, i: usize, t: f64) -> bool {
        self.members[i].iter().any(|&(_, l)| self.level_is(l, t))
    }

    /// First member meeting both `X × {0}` and `X × {1}`.
    pub fn straddler(&self) -> Option<usize> {
        (0..self.members.len()).find(|&i| self.meets(i, 0.0) && self.meets(i, 1.0))
    }

    /// Largest level spread of a member.
    pub fn vertical_extent(&self) -> f64 {
        self.members
            .iter()
            .map(|m| {
                let ts = m.iter().map(|&(_, l)| self.levels[l]);
                ts.clone().fold(f64::NEG_INFINITY, f64::max) - ts.fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
}

/// Stacks `k` copies of `α` and `k` copies of its reflection on
/// `X × [0, 2k]`, joins the pieces that meet at the seams and rescales back
/// to `X × [0,1]`.
pub fn double_cover(alpha: &GridCover, k: usize) -> Result<GridCover, CylinderError> {
    if k == 0 {
        return Err(CylinderError::BadCopies);
    }
    if let Some(i) = alpha.straddler() {
        return Err(CylinderError::StraddlerPrecondition(i));
    }
    let scale = 2.0 * k as f64;
    let up = |t: f64, j: usize| (t + 2.0 * j as f64) / scale;
    let down = |t: f64, j: usize| (1.0 - t + 2.0 * j as f64 + 1.0) / scale;
    let mut levels: Vec<f64> = (0..k)
        .flat_map(|j| alpha.levels.iter().flat_map(move |&t| [up(t, j), down(t, j)]))
        .collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup_by(|a, b| (*a - *b).abs() <= LEVEL_EPS);
    let index = |t: f64| {
        let i = levels.partition_point(|&s| s < t - LEVEL_EPS);
        debug_assert!((levels[i] - t).abs() <= LEVEL_EPS);
        i
    };
    let lift = |u: &BTreeSet<Cell>, j: usize| -> BTreeSet<Cell> {
        u.iter().map(|&(x, l)| (x, index(up(alpha.levels[l], j)))).collect()
    };
    let reflect = |u: &BTreeSet<Cell>, j: usize| -> BTreeSet<Cell> {
        u.iter().map(|&(x, l)| (x, index(down(alpha.levels[l], j)))).collect()
    };

    let mut members = Vec::new();
    for (i, u) in alpha.members.iter().enumerate() {
        let (at0, at1) = (alpha.meets(i, 0.0), alpha.meets(i, 1.0));
        for j in 0..k {
            // copies that touch no inner seam stay as they are
            if !at1 && !(at0 && j >= 1) {
                members.push(lift(u, j));
            }
            if !at1 && !(at0 && j + 1 < k) {
                members.push(reflect(u, j));
            }
            // seam 2j+1: the copy and its reflection
            if at1 {
                let mut w = lift(u, j);
                w.extend(reflect(u, j));
                members.push(w);
            }
            // seam 2j+2: the reflection and the next copy
            if at0 && j + 1 < k {
                let mut w = reflect(u, j);
                w.extend(lift(u, j + 1));
                members.push(w);
            }
        }
    }
    GridCover::new(alpha.base, levels, members)
}

/// Restricts `α` to the levels in `[δ₂, δ₁]` and maps `t ↦ (δ₁ − t)/(δ₁ − δ₂)`,
/// so that `δ₁` lands on 0 and `δ₂` on 1.
pub fn slab_rescale(cyl: &CylinderPack, alpha: &Cover, delta1: f64, delta2: f64) -> Result<GridCover, CylinderError> {
    if !(0.0 < delta2 && delta2 < delta1 && delta1 <= 1.0) {
        return Err(CylinderError::BadDeltas { delta1, delta2 });
    }
    let inside: Vec<usize> = (0..cyl.levels().len())
        .filter(|&l| {
            let t = cyl.levels()[l];
            t <= delta1 + LEVEL_EPS && t >= delta2 - LEVEL_EPS
        })
        .collect();
    if inside.is_empty() {
        return Err(CylinderError::SlabTooThin);
    }
    // cylinder levels decrease, so rescaled levels increase along `inside`
    let levels: Vec<f64> = inside
        .iter()
        .map(|&l| ((delta1 - cyl.levels()[l]) / (delta1 - delta2)).clamp(0.0, 1.0))
        .collect();
    let slot: HashMap<usize, usize> = inside.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let base: HashMap<PointId, usize> =
        cyl.pack().boundary().iter().enumerate().map(|(i, &z)| (z, i)).collect();
    let members = alpha
        .members()
        .iter()
        .map(|u| {
            u.iter()
                .filter_map(|&p| {
                    let l = cyl.level_index(p)?;
                    Some((base[&cyl.base_of(p)], *slot.get(&l)?))
                })
                .collect::<BTreeSet<Cell>>()
        })
        .filter(|m| !m.is_empty())
        .collect();
    GridCover::new(cyl.pack().boundary().len(), levels, members)
}

/// Picks `(δ₁, δ₂)` for [`slab_rescale`]: `δ₁` is the deepest sample level
/// under the largest verdict-grid `t` where the mesh curve is below `eps`,
/// and `δ₂` is the deepest level above which the star of the `δ₁` slice
/// stays.
pub fn select_slab(
    cyl: &CylinderPack,
    ladder: &ScaleLadder,
    alpha: &Cover,
    eps: f64,
    tol: f64,
) -> Result<(f64, f64), CylinderError> {
    let verdict = uniformity_verdict(cyl.pack(), ladder, alpha, tol);
    let t = verdict
        .mesh_curve
        .samples()
        .iter()
        .find(|s| s.1 < eps)
        .map(|s| s.0)
        .ok_or(CylinderError::SlabTooThin)?;
    let l1 = cyl
        .levels()
        .iter()
        .position(|&s| s < t)
        .ok_or(CylinderError::SlabTooThin)?;
    let delta1 = cyl.levels()[l1];
    let slice: PointSet = cyl
        .pack()
        .interior()
        .iter()
        .copied()
        .filter(|&p| cyl.level_index(p) == Some(l1))
        .collect();
    let reach = star(alpha, &slice)
        .iter()
        .map(|&p| cyl.level_of(p))
        .fold(f64::INFINITY, f64::min);
    let delta2 = cyl
        .levels()
        .iter()
        .copied()
        .find(|&s| s < reach)
        .ok_or(CylinderError::SlabTooThin)?;
    Ok((delta1, delta2))
}

/// Outcome of [`lower_bound_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LowerBoundVerdict {
    /// `mult α ≥ dim X + 2`.
    Holds,
    /// `mult α < dim X + 2` but some ball of `E_{d,λ} ∪ N_res` lies in no
    /// member: the cover cuts the sample below its resolution.
    BelowResolution,
    /// `mult α < dim X + 2` for a cover meeting every discrete precondition.
    Refutation,
}

/// Serialized into experiment reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundCertificate {
    /// Id of a point of largest multiplicity.
    pub witness_point: Option<String>,
    pub mult_at_witness: usize,
    /// `dim X + 2`.
    pub bound: usize,
    pub verdict: LowerBoundVerdict,
}

/// Radius of `N_res`: 1.5 boundary spacings on continuum samples, 0 on exact
/// finite boundaries.
pub fn resolution_radius(pack: &DiscretePack) -> f64 {
    let continuum = pack.meta().kind.as_ref().is_some_and(|k| k.is_continuum_sample());
    if continuum {
        1.5 * pack.meta().base_spacing
    } else {
        0.0
    }
}

/// `E_{d,λ} ∪ N_res` with `N_res = {(p,q) ∈ X̂² : d(p,X) = d(q,X), d(p,q) ≤ ρ}`,
/// depths compared up to rounding.
/// Levels are sampled exactly and `E_{d,λ}` already joins adjacent ones, so
/// only the boundary direction needs the extra reach.
pub fn resolution_relation(
    pack: &DiscretePack,
    ladder: &ScaleLadder,
    lambda: &LambdaSpec,
    lambda_tol: f64,
) -> Result<Relation, CylinderError> {
    let e = controlled_e(pack, ladder, lambda, lambda_tol)?.relation;
    let rho = resolution_radius(pack);
    // depths computed from raw coordinates carry rounding noise
    let same_depth = 1e-9 * pack.k_sup();
    let interior = pack.interior();
    let mut pairs = Vec::new();
    for &p in interior {
        for &q in interior {
            if pack.d(p, q) <= rho && (pack.boundary_distance(p) - pack.boundary_distance(q)).abs() <= same_depth {
                pairs.push((p, q));
            }
        }
    }
    Ok(e.union(&Relation::from_pairs(pack.len(), pairs)?)?)
}

/// Asserts `mult α ≥ dim X + 2` for a covering, uniform `α` on a
/// cylindrical pack. `resolution` is [`resolution_relation`] for the pack.
pub fn lower_bound_check(
    pack: &DiscretePack,
    ladder: &ScaleLadder,
    alpha: &Cover,
    resolution: &Relation,
    tol: f64,
) -> Result<LowerBoundCertificate, CylinderError> {
    let kind = pack.meta().kind.as_ref().ok_or(CylinderError::NonCylindricalPack)?;
    if !kind.is_cylindrical() {
        return Err(CylinderError::NonCylindricalPack);
    }
    if alpha.target() != &pack.interior_set() || !alpha.covers() {
        return Err(CylinderError::PreconditionUnmet("the cover misses part of X̂".into()));
    }
    let verdict = uniformity_verdict(pack, ladder, alpha, tol);
    if !verdict.accept {
        return Err(CylinderError::PreconditionUnmet(format!(
            "uniformity rejected ({} > {})",
            verdict.modulus.value, verdict.modulus.threshold
        )));
    }
    let bound = kind.known_dim() as usize + 2;
    let (witness, mult) = multiplicity_witness(alpha).map_or((None, 0), |(p, m)| (Some(p), m));
    debug_assert_eq!(mult, multiplicity(alpha));
    let verdict = if mult >= bound {
        LowerBoundVerdict::Holds
    } else if pack
        .interior()
        .iter()
        .any(|&p| !alpha.members().iter().any(|u| resolution.ball(p).is_subset(u)))
    {
        LowerBoundVerdict::BelowResolution
    } else {
        LowerBoundVerdict::Refutation
    };
    Ok(LowerBoundCertificate {
        witness_point: witness.map(|p| pack.ids()[p].clone()),
        mult_at_witness: mult,
        bound,
        verdict,
    })
}

/// A random cover `{R(B) : B ∈ β}` for a block partition `β` of a laid-out
/// pack, with `R` the resolution relation. Levels are grouped into random
/// bands and each band is cut into runs of base points whose length scales
/// with the band's top level.
pub fn random_candidate<R: rand::Rng>(
    pack: &DiscretePack,
    resolution: &Relation,
    rng: &mut R,
) -> Result<Cover, CylinderError> {
    let layout = pack
        .meta()
        .layout
        .as_ref()
        .ok_or_else(|| CylinderError::NotACylinder("no layout".into()))?;
    let base: HashMap<PointId, usize> = pack.boundary().iter().enumerate().map(|(i, &z)| (z, i)).collect();
    let nb = base.len() as f64;
    let cut_rate = rng.gen_range(0.3..0.9);
    let mut band = vec![0usize; layout.levels.len()];
    for l in 1..band.len() {
        band[l] = band[l - 1] + usize::from(rng.gen_bool(cut_rate));
    }
    let bands = band.last().map_or(0, |b| b + 1);
    let runs: Vec<(usize, usize)> = (0..bands)
        .map(|b| {
            let top = band.iter().position(|&v| v == b).expect("band is used");
            let width = ((rng.gen_range(0.5..6.0) * layout.levels[top] * nb) as usize).max(1);
            (width, rng.gen_range(0..width))
        })
        .collect();
    let mut blocks: HashMap<(usize, usize), PointSet> = HashMap::new();
    for &p in pack.interior() {
        let (z, l) = layout.cells[p];
        let l = l.expect("interior cell has a level");
        let (width, offset) = runs[band[l]];
        blocks.entry((band[l], (base[&z] + offset) / width)).or_default().insert(p);
    }
    let mut keys: Vec<_> = blocks.keys().copied().collect();
    keys.sort_unstable();
    let members = keys.iter().map(|k| resolution.image(&blocks[k])).collect();
    Ok(Cover::new(pack.len(), pack.interior_set(), Target::Interior, members)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{generate_pack, validate_pack, PackKind, Tolerances};

    fn fixture() -> CylinderPack {
        CylinderPack::from_pack(
            generate_pack(&PackKind::FiniteCylinder {
                base_points: 1,
                levels: 4,
                ratio: 0.5,
                spacing: 1.0,
            })
            .unwrap(),
        )
        .unwrap()
    }

    fn line3() -> DiscretePack {
        validate_pack(
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]],
            vec![true, false, true],
            &Tolerances::default(),
        )
        .unwrap()
    }

    fn interval(levels: &[(f64, f64)]) -> BTreeSet<Cell> {
        levels.iter().map(|&(x, l)| (x as usize, l as usize)).collect()
    }

    #[test]
    fn f_is_the_identity_on_exact_cylinders() {
        let cyl = fixture();
        let p = cyl.point_at(0, 2).unwrap();
        assert_eq!(f_map(cyl.pack(), p).unwrap(), (0, 0.25));
    }

    #[test]
    fn f_breaks_ties_by_lowest_id() {
        let pack = line3();
        assert_eq!(f_map(&pack, 1).unwrap(), (0, 1.0));
        assert_eq!(f_map(&pack, 0).unwrap_err(), CylinderError::BoundaryInput(0));
    }

    #[test]
    fn g_picks_the_smallest_level_above() {
        let cyl = fixture();
        let p = g_map(cyl.pack(), 0, 0.3).unwrap();
        assert_eq!(cyl.level_of(p), 0.5);
        let top = g_map(cyl.pack(), 0, cyl.pack().k_sup()).unwrap();
        assert_eq!(cyl.level_of(top), 1.0);
        assert_eq!(g_map(cyl.pack(), 0, 1.5).unwrap_err(), CylinderError::EmptyOuterSet(1.5));
    }

    #[test]
    fn round_trips_stay_within_three_h() {
        let pack = generate_pack(&PackKind::IntervalCylinder {
            base_points: 9,
            levels: 5,
            ratio: 0.5,
        })
        .unwrap();
        let cyl = CylinderPack::from_pack(pack.clone()).unwrap();
        let ladder = ScaleLadder::default_for(&pack);
        for s in round_trips(&pack, ladder.radii()).unwrap() {
            assert!(s.displacement <= s.bound + 1e-12);
            let l = cyl.level_at_least(s.t).unwrap();
            assert_eq!(s.image, (s.z, cyl.levels()[l]));
        }
    }

    #[test]
    fn image_cylinder_of_a_cylinder_is_itself() {
        let cyl = fixture();
        let (image, map) = f_image(cyl.pack()).unwrap();
        assert_eq!(map, (0..cyl.pack().len()).collect::<Vec<_>>());
        assert_eq!(image.pack().ids(), cyl.pack().ids());
    }

    #[test]
    fn circle_collar_is_an_embedding() {
        let host = generate_pack(&PackKind::CircleInDisk {
            base_points: 12,
            levels: 3,
            ratio: 0.5,
        })
        .unwrap();
        assert!(CylinderPack::from_pack(host.clone()).is_err());
        let j = Embedding::collar(&host).unwrap();
        assert_eq!(j.map().len(), host.len());
        assert!(j.distortion() > 0.0);
        let alpha = Cover::singletons(host.len(), &host.interior_set(), Target::Interior);
        let beta = pullback_cover(&j, &alpha).unwrap();
        assert_eq!(beta.len(), alpha.len());
        assert!(beta.covers());
    }

    #[test]
    fn identity_pullback_is_the_same_cover() {
        let cyl = fixture();
        let pack = cyl.pack();
        let alpha = Cover::whole(pack.len(), &pack.interior_set(), Target::Interior);
        assert_eq!(pullback_cover(&Embedding::identity(&cyl), &alpha).unwrap(), alpha);
    }

    #[test]
    fn doubling_a_two_piece_cover() {
        let levels: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let alpha = GridCover::new(
            1,
            levels,
            vec![
                interval(&(0..=6).map(|l| (0.0, l as f64)).collect::<Vec<_>>()),
                interval(&(4..=10).map(|l| (0.0, l as f64)).collect::<Vec<_>>()),
            ],
        )
        .unwrap();
        let gamma = double_cover(&alpha, 1).unwrap();
        let spans: Vec<(f64, f64)> = gamma
            .members
            .iter()
            .map(|m| {
                let ts: Vec<f64> = m.iter().map(|&(_, l)| gamma.levels[l]).collect();
                (ts[0], *ts.last().unwrap())
            })
            .collect();
        let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
        let mut expected: Vec<(f64, f64)> = vec![(0.0, 0.3), (0.2, 0.8), (0.7, 1.0)];
        let mut got = spans.clone();
        got.sort_by(|a, b| a.0.total_cmp(&b.0));
        expected.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert_eq!(got.len(), 3);
        for (g, e) in got.iter().zip(&expected) {
            assert!(close(g.0, e.0) && close(g.1, e.1), "{got:?}");
        }
        assert_eq!(gamma.multiplicity(), 2);
        assert!(gamma.covers());
    }

    #[test]
    fn straddlers_are_rejected() {
        let alpha = GridCover::new(1, vec![0.0, 1.0], vec![interval(&[(0.0, 0.0), (0.0, 1.0)])]).unwrap();
        assert_eq!(double_cover(&alpha, 1).unwrap_err(), CylinderError::StraddlerPrecondition(0));
    }

    #[test]
    fn slab_of_the_annuli_cover() {
        let cyl = fixture();
        let pack = cyl.pack();
        let ladder = ScaleLadder::new(pack, vec![1.5, 0.6, 0.3, 0.1]).unwrap();
        let members = (0..ladder.annulus_count())
            .map(|n| crate::metric::annulus(pack, &ladder, n).unwrap())
            .collect();
        let alpha = Cover::new(pack.len(), pack.interior_set(), Target::Interior, members).unwrap();
        let slab = slab_rescale(&cyl, &alpha, 0.6, 0.1).unwrap();
        assert_eq!(slab.members.len(), 2);
        assert_eq!(slab.multiplicity(), 2);
        assert!(slab.straddler().is_none());
        assert_eq!(
            slab_rescale(&cyl, &alpha, 0.1, 0.6).unwrap_err(),
            CylinderError::BadDeltas { delta1: 0.1, delta2: 0.6 }
        );
        assert_eq!(slab_rescale(&cyl, &alpha, 0.9, 0.6).unwrap_err(), CylinderError::SlabTooThin);
    }

    #[test]
    fn countable_example_is_not_cylindrical() {
        let pack = generate_pack(&PackKind::CountableExample { y_points: 5 }).unwrap();
        let ladder = ScaleLadder::default_for(&pack);
        let alpha = Cover::singletons(pack.len(), &pack.interior_set(), Target::Interior);
        let res = Relation::diagonal(pack.len());
        assert_eq!(
            lower_bound_check(&pack, &ladder, &alpha, &res, 0.05).unwrap_err(),
            CylinderError::NonCylindricalPack
        );
    }

    #[test]
    fn whole_interior_is_not_a_candidate() {
        let pack = generate_pack(&PackKind::from_tag("finite_cylinder").unwrap()).unwrap();
        let ladder = ScaleLadder::default_for(&pack);
        let alpha = Cover::whole(pack.len(), &pack.interior_set(), Target::Interior);
        let res = Relation::diagonal(pack.len());
        assert!(matches!(
            lower_bound_check(&pack, &ladder, &alpha, &res, 0.05),
            Err(CylinderError::PreconditionUnmet(_))
        ));
    }

    #[test]
    fn singletons_are_below_resolution() {
        let pack = generate_pack(&PackKind::IntervalCylinder {
            base_points: 9,
            levels: 6,
            ratio: 0.5,
        })
        .unwrap();
        let ladder = ScaleLadder::default_for(&pack);
        let res = resolution_relation(&pack, &ladder, &LambdaSpec::default(), 0.05).unwrap();
        let alpha = Cover::singletons(pack.len(), &pack.interior_set(), Target::Interior);
        let cert = lower_bound_check(&pack, &ladder, &alpha, &res, 0.05).unwrap();
        assert_eq!(cert.verdict, LowerBoundVerdict::BelowResolution);
        assert_eq!(cert.bound, 3);
    }
}
