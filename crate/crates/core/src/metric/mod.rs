//! Finite compactification packs, scale ladders, the `h` profile and the
//! example-pack generators.

mod generate;
mod ladder;
mod pack;

pub use generate::{generate_pack, PackKind};
pub use ladder::{annulus, h_profile, ModulusCurve, ScaleLadder};
pub use pack::{
    validate_pack, CylinderLayout, DiscretePack, PackMeta, PointId, PointSet, Tolerances,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("distance matrix is not square")]
    NotSquare,
    #[error("boundary mask has {got} entries, expected {expected}")]
    MaskSize { expected: usize, got: usize },
    #[error("invalid distance {value} at ({p}, {q})")]
    InvalidEntry { p: usize, q: usize, value: f64 },
    #[error("point {0} has nonzero distance to itself")]
    NonzeroSelfDistance(usize),
    #[error("distance matrix is not symmetric at ({p}, {q})")]
    AsymmetricDistance { p: usize, q: usize },
    #[error("triangle inequality fails for d({p},{q}) via {r} by {defect}")]
    TriangleViolation {
        p: usize,
        q: usize,
        r: usize,
        defect: f64,
    },
    #[error("{0} side of the pack is empty")]
    EmptySide(&'static str),
    #[error("interior point {0} sits at distance 0 from the boundary")]
    InteriorOnBoundary(usize),
    #[error("ladder: {0}")]
    BadLadder(String),
    #[error("annulus index {n} is outside the ladder (largest valid index {max})")]
    IndexOutOfLadder { n: usize, max: isize },
    #[error("no sample point lies at boundary distance >= {0}")]
    EmptyComplement(f64),
    #[error("modulus curve: {0}")]
    BadCurve(String),
    #[error("generator parameters: {0}")]
    BadParams(String),
}
