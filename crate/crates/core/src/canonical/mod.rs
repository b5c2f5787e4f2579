//! Canonical covers: the Ext map, the annulus construction `α({β_n},{W_n})`,
//! the refinement subsequence, star expansion and the minimal-multiplicity
//! pipeline.

mod alpha;
mod ext;
mod pipeline;
mod provider;

pub use alpha::{build_alpha, refine_subsequence, BuiltAlpha, Subsequence};
pub use ext::{ext, ext_family};
pub use pipeline::{
    canonical_refining, minimal_canonical, star_expand, star_expand_chain, star_expand_unchecked,
    CanonicalOutput, LadderSummary, MinimalCanonical, PipelineReport,
};
pub use provider::{CoverSequence, CoverSequenceSource, Provider};

use thiserror::Error;

use crate::cover::CoverError;
use crate::metric::{MetricError, PointId};
use crate::relation::RelationError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CanonicalError {
    #[error("point {0} is not a boundary point")]
    NotBoundarySubset(PointId),
    #[error("family {0} does not cover the boundary")]
    BetaDoesNotCoverBoundary(usize),
    #[error("the first family must contain the whole space")]
    Beta0NotWhole,
    #[error("need {needed} families, got {got}")]
    TooFewBetas { needed: usize, got: usize },
    #[error("ladder exhausted: the recursion needs rung {needed} but the last rung is {last}")]
    LadderExhausted { needed: usize, last: usize },
    #[error("cover is not uniform: {value} exceeds {threshold} at the floor")]
    NotUniform { value: f64, threshold: f64 },
    #[error("relation is not C0: {value} exceeds {threshold} at the floor")]
    NotC0 { value: f64, threshold: f64 },
    #[error("relation must be symmetric and contain the diagonal")]
    NotDiagonalNbhd,
    #[error("built cover does not refine member {0} of the input")]
    RefinementFailed(usize),
    #[error("provider for dimension {provider} does not match pack dimension {pack:?}")]
    ProviderMismatch { provider: u32, pack: Option<u32> },
    #[error("provider: {0}")]
    Provider(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Relation(#[from] RelationError),
}
