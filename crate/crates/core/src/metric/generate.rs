use serde::{Deserialize, Serialize};

use super::pack::{CylinderLayout, DiscretePack, PackMeta};
use super::MetricError;

/// The families of example packs the crate can generate.
///
/// Cylinder families use geometric levels `ratio^l` and the sum metric
/// `d((x,t),(y,s)) = d_X(x,y) + |t - s|`; `circle_in_disk` is the flat
/// disk with its Euclidean metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum PackKind {
    /// Evenly spaced points on a line, times levels.
    FiniteCylinder {
        base_points: usize,
        levels: usize,
        ratio: f64,
        spacing: f64,
    },
    /// An evenly spaced sample of `[0,1]`, times levels.
    IntervalCylinder {
        base_points: usize,
        levels: usize,
        ratio: f64,
    },
    /// Unit circle sample inside the disk, at radii `1 - ratio^l`, `l ≥ 1`.
    CircleInDisk {
        base_points: usize,
        levels: usize,
        ratio: f64,
    },
    /// Grid on a face of `[0,1]^ambient_dim`, times levels along the normal.
    CubeFace {
        side_points: usize,
        levels: usize,
        ratio: f64,
        ambient_dim: usize,
    },
    /// `X = Y × {0}` and `X̂ = ⋃_m {y_1..y_m} × {1/m}` for a van der Corput
    /// sequence `y`.
    CountableExample { y_points: usize },
}

impl PackKind {
    pub fn tag(&self) -> &'static str {
        match self {
            PackKind::FiniteCylinder { .. } => "finite_cylinder",
            PackKind::IntervalCylinder { .. } => "interval_cylinder",
            PackKind::CircleInDisk { .. } => "circle_in_disk",
            PackKind::CubeFace { .. } => "cube_face",
            PackKind::CountableExample { .. } => "countable_example",
        }
    }

    /// Covering dimension of the boundary of the sampled family.
    pub fn known_dim(&self) -> u32 {
        match self {
            PackKind::FiniteCylinder { .. } | PackKind::CountableExample { .. } => 0,
            PackKind::IntervalCylinder { .. } | PackKind::CircleInDisk { .. } => 1,
            PackKind::CubeFace { ambient_dim, .. } => *ambient_dim as u32 - 1,
        }
    }

    /// Whether the family carries an embedded `X × [0,1]` fixing `X`.
    pub fn is_cylindrical(&self) -> bool {
        !matches!(self, PackKind::CountableExample { .. })
    }

    /// Whether the boundary sample stands in for a continuum.
    pub fn is_continuum_sample(&self) -> bool {
        matches!(
            self,
            PackKind::IntervalCylinder { .. } | PackKind::CircleInDisk { .. } | PackKind::CubeFace { .. }
        )
    }

    /// Default parameters for a family tag.
    pub fn from_tag(tag: &str) -> Option<Self> {
        Some(match tag {
            "finite_cylinder" => PackKind::FiniteCylinder {
                base_points: 3,
                levels: 12,
                ratio: 0.25,
                spacing: 1.0,
            },
            "interval_cylinder" => PackKind::IntervalCylinder {
                base_points: 65,
                levels: 12,
                ratio: 0.25,
            },
            "circle_in_disk" => PackKind::CircleInDisk {
                base_points: 64,
                levels: 10,
                ratio: 0.25,
            },
            "cube_face" => PackKind::CubeFace {
                side_points: 5,
                levels: 5,
                ratio: 0.5,
                ambient_dim: 3,
            },
            "countable_example" => PackKind::CountableExample { y_points: 5 },
            _ => return None,
        })
    }
}

struct Builder {
    ids: Vec<String>,
    coords: Vec<Vec<f64>>,
    boundary: Vec<bool>,
    cells: Vec<(usize, Option<usize>)>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            ids: Vec::new(),
            coords: Vec::new(),
            boundary: Vec::new(),
            cells: Vec::new(),
        }
    }

    fn push(&mut self, id: String, coord: Vec<f64>, boundary: bool, cell: (usize, Option<usize>)) {
        self.ids.push(id);
        self.coords.push(coord);
        self.boundary.push(boundary);
        self.cells.push(cell);
    }

    fn finish(
        self,
        metric: impl Fn(&[f64], &[f64]) -> f64,
        kind: &PackKind,
        levels: Vec<f64>,
        base_spacing: f64,
    ) -> Result<DiscretePack, MetricError> {
        let n = self.ids.len();
        let mut dist = vec![0.0; n * n];
        for p in 0..n {
            for q in (p + 1)..n {
                let d = metric(&self.coords[p], &self.coords[q]);
                dist[p * n + q] = d;
                dist[q * n + p] = d;
            }
        }
        let meta = PackMeta {
            kind: Some(kind.clone()),
            known_dim: Some(kind.known_dim()),
            coords: Some(self.coords),
            layout: Some(CylinderLayout {
                levels,
                cells: self.cells,
            }),
            base_spacing,
        };
        DiscretePack::from_parts(self.ids, dist, self.boundary, meta)
    }
}

fn check_ratio(ratio: f64) -> Result<(), MetricError> {
    if ratio > 0.0 && ratio < 1.0 {
        Ok(())
    } else {
        Err(MetricError::BadParams(format!("level ratio {ratio} not in (0,1)")))
    }
}

fn positive(name: &str, v: usize) -> Result<(), MetricError> {
    if v == 0 {
        Err(MetricError::BadParams(format!("{name} must be positive")))
    } else {
        Ok(())
    }
}

/// Sum metric on coordinates whose last entry is the level.
fn sum_metric(base: impl Fn(&[f64], &[f64]) -> f64) -> impl Fn(&[f64], &[f64]) -> f64 {
    move |a, b| {
        let k = a.len() - 1;
        base(&a[..k], &b[..k]) + (a[k] - b[k]).abs()
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Base points times levels; base coordinates come from `base`.
fn cylinder(
    base: &[Vec<f64>],
    levels: &[f64],
) -> Builder {
    let mut b = Builder::new();
    let nb = base.len();
    for (i, c) in base.iter().enumerate() {
        let mut coord = c.clone();
        coord.push(0.0);
        b.push(format!("x{i}"), coord, true, (i, None));
    }
    for (l, &t) in levels.iter().enumerate() {
        for (i, c) in base.iter().enumerate() {
            let mut coord = c.clone();
            coord.push(t);
            b.push(format!("x{i}@{l}"), coord, false, (i, Some(l)));
        }
    }
    debug_assert_eq!(b.ids.len(), nb * (levels.len() + 1));
    b
}

fn geometric(levels: usize, ratio: f64, first: i32) -> Vec<f64> {
    (0..levels as i32).map(|l| ratio.powi(l + first)).collect()
}

/// van der Corput sequence in base 2, starting at index 1.
fn van_der_corput(j: usize) -> f64 {
    let (mut n, mut denom, mut v) = (j, 1.0, 0.0);
    while n > 0 {
        denom *= 2.0;
        v += (n & 1) as f64 / denom;
        n >>= 1;
    }
    v
}

/// Generate a pack of the requested family.
pub fn generate_pack(kind: &PackKind) -> Result<DiscretePack, MetricError> {
    match *kind {
        PackKind::FiniteCylinder {
            base_points,
            levels,
            ratio,
            spacing,
        } => {
            positive("base_points", base_points)?;
            positive("levels", levels)?;
            check_ratio(ratio)?;
            if !(spacing > 0.0) {
                return Err(MetricError::BadParams("spacing must be positive".into()));
            }
            let base: Vec<Vec<f64>> = (0..base_points).map(|i| vec![i as f64 * spacing]).collect();
            let lv = geometric(levels, ratio, 0);
            cylinder(&base, &lv).finish(sum_metric(euclid), kind, lv, 0.0)
        }
        PackKind::IntervalCylinder {
            base_points,
            levels,
            ratio,
        } => {
            if base_points < 2 {
                return Err(MetricError::BadParams("interval needs at least 2 points".into()));
            }
            positive("levels", levels)?;
            check_ratio(ratio)?;
            let step = 1.0 / (base_points - 1) as f64;
            let base: Vec<Vec<f64>> = (0..base_points).map(|i| vec![i as f64 * step]).collect();
            let lv = geometric(levels, ratio, 0);
            cylinder(&base, &lv).finish(sum_metric(euclid), kind, lv, step)
        }
        PackKind::CircleInDisk {
            base_points,
            levels,
            ratio,
        } => {
            if base_points < 3 {
                return Err(MetricError::BadParams("circle needs at least 3 points".into()));
            }
            positive("levels", levels)?;
            check_ratio(ratio)?;
            let lv = geometric(levels, ratio, 1);
            let mut b = Builder::new();
            let angle = |i: usize| std::f64::consts::TAU * i as f64 / base_points as f64;
            for i in 0..base_points {
                let a = angle(i);
                b.push(format!("x{i}"), vec![a.cos(), a.sin()], true, (i, None));
            }
            for (l, &t) in lv.iter().enumerate() {
                for i in 0..base_points {
                    let (a, r) = (angle(i), 1.0 - t);
                    b.push(format!("x{i}@{l}"), vec![r * a.cos(), r * a.sin()], false, (i, Some(l)));
                }
            }
            let chord = 2.0 * (std::f64::consts::PI / base_points as f64).sin();
            b.finish(euclid, kind, lv, chord)
        }
        PackKind::CubeFace {
            side_points,
            levels,
            ratio,
            ambient_dim,
        } => {
            if side_points < 2 {
                return Err(MetricError::BadParams("face grid needs at least 2 points per side".into()));
            }
            if !(2..=3).contains(&ambient_dim) {
                return Err(MetricError::BadParams("ambient_dim must be 2 or 3".into()));
            }
            positive("levels", levels)?;
            check_ratio(ratio)?;
            let step = 1.0 / (side_points - 1) as f64;
            let base: Vec<Vec<f64>> = if ambient_dim == 2 {
                (0..side_points).map(|i| vec![i as f64 * step]).collect()
            } else {
                (0..side_points)
                    .flat_map(|i| (0..side_points).map(move |j| vec![i as f64 * step, j as f64 * step]))
                    .collect()
            };
            let lv = geometric(levels, ratio, 0);
            cylinder(&base, &lv).finish(sum_metric(euclid), kind, lv, step)
        }
        PackKind::CountableExample { y_points } => {
            positive("y_points", y_points)?;
            let ys: Vec<f64> = (1..=y_points).map(van_der_corput).collect();
            let lv: Vec<f64> = (1..=y_points).map(|m| 1.0 / m as f64).collect();
            let mut b = Builder::new();
            for (j, &y) in ys.iter().enumerate() {
                b.push(format!("y{j}"), vec![y, 0.0], true, (j, None));
            }
            for (l, &t) in lv.iter().enumerate() {
                for (j, &y) in ys.iter().enumerate().take(l + 1) {
                    b.push(format!("y{j}@{l}"), vec![y, t], false, (j, Some(l)));
                }
            }
            b.finish(sum_metric(euclid), kind, lv, 0.0)
        }
    }
}
