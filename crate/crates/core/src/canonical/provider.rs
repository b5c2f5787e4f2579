use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::cover::{common_multiplicity, mesh, multiplicity, Cover, Target};
use crate::metric::{DiscretePack, PackKind, PointId, PointSet};

use super::CanonicalError;

/// Covers `α_0 = {X}, α_1, …` of the boundary with shrinking mesh.
#[derive(Debug, Clone)]
pub struct CoverSequence {
    pub covers: Vec<Cover>,
    pub mesh_targets: Vec<f64>,
    pub common_mult_bound: usize,
}

impl CoverSequence {
    /// Checks `α_0 = {X}`, the mesh schedule and the common multiplicity of
    /// consecutive covers.
    pub fn validate(&self, pack: &DiscretePack) -> Result<(), CanonicalError> {
        let boundary = pack.boundary_set();
        match self.covers.first() {
            Some(c) if c.members() == [boundary.clone()] => {}
            _ => return Err(CanonicalError::Provider("first cover must be {X}".into())),
        }
        for (i, c) in self.covers.iter().enumerate() {
            if !c.covers() || c.target() != &boundary {
                return Err(CanonicalError::Provider(format!("cover {i} does not cover X")));
            }
            if mesh(pack, c) > self.mesh_targets[i] {
                return Err(CanonicalError::Provider(format!(
                    "cover {i} has mesh {} above {}",
                    mesh(pack, c),
                    self.mesh_targets[i]
                )));
            }
        }
        for (i, w) in self.covers.windows(2).enumerate() {
            let cm = common_multiplicity(&[&w[0], &w[1]]);
            if cm > self.common_mult_bound {
                return Err(CanonicalError::Provider(format!(
                    "covers {i} and {} have common multiplicity {cm} above {}",
                    i + 1,
                    self.common_mult_bound
                )));
            }
        }
        Ok(())
    }

    pub fn max_multiplicity(&self) -> usize {
        self.covers.iter().map(multiplicity).max().unwrap_or(0)
    }
}

/// Source of boundary covers for dimensions without a built-in provider.
pub trait CoverSequenceSource: Send + Sync {
    fn name(&self) -> &str;
    /// Dimension of the boundary this source is built for.
    fn dim(&self) -> u32;
    /// `α_i` for `i ≥ 1`, with mesh at most `eps`.
    fn cover(&self, pack: &DiscretePack, i: usize, eps: f64) -> Result<Vec<PointSet>, CanonicalError>;
}

/// Where the boundary covers of the pipeline come from.
#[derive(Clone)]
pub enum Provider {
    /// Partitions into blocks of diameter at most `ε_i`.
    FiniteDim0,
    /// Overlapping half-open arcs along an interval or a circle.
    IntervalDim1,
    Plugin(Arc<dyn CoverSequenceSource>),
}

impl fmt::Debug for Provider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provider::Plugin(p) => write!(f, "Plugin({})", p.name()),
            other => f.write_str(other.tag()),
        }
    }
}

impl Provider {
    pub fn tag(&self) -> &'static str {
        match self {
            Provider::FiniteDim0 => "finite_dim0",
            Provider::IntervalDim1 => "interval_dim1",
            Provider::Plugin(_) => "plugin",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "finite_dim0" => Some(Provider::FiniteDim0),
            "interval_dim1" => Some(Provider::IntervalDim1),
            _ => None,
        }
    }

    /// The built-in provider for a boundary dimension.
    pub fn for_dim(dim: u32) -> Option<Self> {
        match dim {
            0 => Some(Provider::FiniteDim0),
            1 => Some(Provider::IntervalDim1),
            _ => None,
        }
    }

    pub fn dim(&self) -> u32 {
        match self {
            Provider::FiniteDim0 => 0,
            Provider::IntervalDim1 => 1,
            Provider::Plugin(p) => p.dim(),
        }
    }

    /// Consecutive common multiplicity the provider guarantees.
    pub fn common_mult_bound(&self) -> usize {
        self.dim() as usize + 2
    }

    /// `ε_i = k_sup · 2^-i`.
    pub fn mesh_target(pack: &DiscretePack, i: usize) -> f64 {
        pack.k_sup() * 0.5f64.powi(i as i32)
    }

    /// `α_i` as a boundary cover.
    pub fn cover(&self, pack: &DiscretePack, i: usize) -> Result<Cover, CanonicalError> {
        let boundary = pack.boundary_set();
        if i == 0 {
            return Ok(Cover::whole(pack.len(), &boundary, Target::Boundary));
        }
        let eps = Self::mesh_target(pack, i);
        let members = match self {
            Provider::FiniteDim0 => blocks(pack, eps),
            Provider::IntervalDim1 => ArcGeometry::for_pack(pack)?.cover(i),
            Provider::Plugin(p) => p.cover(pack, i, eps)?,
        };
        Ok(Cover::new_dropping_empty(pack.len(), boundary, Target::Boundary, members)?)
    }

    /// `α_0, …, α_{count-1}`, validated.
    pub fn sequence(&self, pack: &DiscretePack, count: usize) -> Result<CoverSequence, CanonicalError> {
        let covers = (0..count).map(|i| self.cover(pack, i)).collect::<Result<Vec<_>, _>>()?;
        // α_0 = {X} is exempt from the schedule
        let mut mesh_targets: Vec<f64> = (0..count).map(|i| Self::mesh_target(pack, i)).collect();
        if let Some(first) = mesh_targets.first_mut() {
            *first = first.max(pack.diam(&pack.boundary_set()));
        }
        let seq = CoverSequence {
            covers,
            mesh_targets,
            common_mult_bound: self.common_mult_bound(),
        };
        seq.validate(pack)?;
        if matches!(self, Provider::IntervalDim1) && seq.covers.iter().skip(1).any(|c| multiplicity(c) > 2) {
            return Err(CanonicalError::Provider("an arc cover has multiplicity above 2".into()));
        }
        Ok(seq)
    }
}

/// Greedy partition of the boundary into blocks of diameter `≤ eps`,
/// scanning points in id order.
fn blocks(pack: &DiscretePack, eps: f64) -> Vec<PointSet> {
    let mut out: Vec<PointSet> = Vec::new();
    for &x in pack.boundary() {
        match out
            .iter_mut()
            .find(|b| b.iter().all(|&y| pack.d(x, y) <= eps))
        {
            Some(b) => {
                b.insert(x);
            }
            None => out.push(PointSet::from([x])),
        }
    }
    out
}

/// Arc covers of a one-dimensional boundary.
///
/// Level `i` uses arcs `[o_i + j s_i, o_i + j s_i + ℓ_i)` with
/// `ℓ_i = 4 s_i / 3`, so neighbouring arcs overlap on zones of width
/// `s_i / 3`. The step halves from one level to the next and the offset moves
/// back by `s_{i+1} / 3`, which puts the zones of level `i+1` strictly
/// between those of level `i`: no point lies in more than 3 arcs of two
/// consecutive levels.
struct ArcGeometry {
    /// Arc-length parameter of each boundary point.
    params: Vec<(PointId, f64)>,
    /// Circumference for a circle, `None` for an interval.
    period: Option<f64>,
    origin: f64,
    first_step: f64,
}

impl ArcGeometry {
    fn for_pack(pack: &DiscretePack) -> Result<Self, CanonicalError> {
        let coords = pack
            .meta()
            .coords
            .as_ref()
            .ok_or_else(|| CanonicalError::Provider("arc covers need coordinates".into()))?;
        let eps1 = Provider::mesh_target(pack, 1);
        let kind = pack.meta().kind.as_ref();
        let periodic = matches!(kind, Some(PackKind::CircleInDisk { .. }));
        let linear = matches!(
            kind,
            Some(PackKind::IntervalCylinder { .. })
                | Some(PackKind::FiniteCylinder { .. })
                | Some(PackKind::CubeFace { ambient_dim: 2, .. })
        );
        if !periodic && !linear {
            return Err(CanonicalError::ProviderMismatch {
                provider: 1,
                pack: pack.known_dim(),
            });
        }
        let params: Vec<(PointId, f64)> = pack
            .boundary()
            .iter()
            .map(|&x| {
                let c = &coords[x];
                let u = if periodic {
                    c[1].atan2(c[0]).rem_euclid(std::f64::consts::TAU) * c[0].hypot(c[1])
                } else {
                    c[0]
                };
                (x, u)
            })
            .collect();
        let low = params.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        // an irrational shift keeps arc ends off the (rational) sample
        let shift = (std::f64::consts::SQRT_2 - 1.0) / 7.0;
        if periodic {
            let radius = coords[pack.boundary()[0]][0].hypot(coords[pack.boundary()[0]][1]);
            let circumference = std::f64::consts::TAU * radius;
            let n1 = (4.0 * circumference / (3.0 * eps1)).ceil();
            let s1 = circumference / n1;
            Ok(ArcGeometry {
                params,
                period: Some(circumference),
                origin: shift * s1,
                first_step: s1,
            })
        } else {
            let s1 = 0.75 * eps1;
            Ok(ArcGeometry {
                params,
                period: None,
                origin: low - s1 * (0.5 + shift),
                first_step: s1,
            })
        }
    }

    fn level(&self, i: usize) -> (f64, f64) {
        let mut o = self.origin;
        let mut s = self.first_step;
        for _ in 1..i {
            s /= 2.0;
            o -= s / 3.0;
        }
        (o, s)
    }

    fn cover(&self, i: usize) -> Vec<PointSet> {
        let (o, s) = self.level(i);
        let len = 4.0 * s / 3.0;
        let mut arcs: BTreeMap<i64, PointSet> = BTreeMap::new();
        for &(x, u) in &self.params {
            match self.period {
                None => {
                    let hi = ((u - o) / s).floor() as i64;
                    for j in [hi - 1, hi] {
                        let start = o + j as f64 * s;
                        if start <= u && u < start + len {
                            arcs.entry(j).or_default().insert(x);
                        }
                    }
                }
                Some(c) => {
                    let n = (c / s).round() as i64;
                    let rel = (u - o).rem_euclid(c);
                    let hi = (rel / s).floor() as i64;
                    for j in [hi - 1, hi] {
                        let off = rel - j as f64 * s;
                        let off = if off >= c { off - c } else { off };
                        if (0.0..len).contains(&off) {
                            arcs.entry(j.rem_euclid(n)).or_default().insert(x);
                        }
                    }
                }
            }
        }
        arcs.into_values().collect()
    }
}
