//! Carrier graphs for Schottky groups, relaxed to critical points of length.

use thiserror::Error;

use crate::bound::BoundError;
use crate::graph::GraphError;
use crate::hyperbolic::GeometryError;
use crate::shortening::ShorteningError;

pub mod decorated;
pub mod group;
pub mod optimize;
pub mod scan;
pub mod stallings;

pub use decorated::{DecoratedEdge, DecoratedGraph, HalfEdge, Topology};
pub use group::{GroupPresentation, Letter, Word};
pub use optimize::{apply_shortening_move, relax, MoveOutcome, RelaxConfig, RelaxReport, VertexAngles, WhiteCertificate};
pub use scan::{girth_derived_radius, scan_theorem, ScanEntry, ScanReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RelaxError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Shortening(#[from] ShorteningError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("edge {edge} has zero length")]
    ZeroLengthEdge { edge: usize },
    #[error("edge labels do not generate the free group on the generators")]
    NotSurjective,
    #[error("{0}")]
    Precondition(String),
    #[error("seed {seed}: converged graph has an edge shorter than the bound\n{dump}")]
    Violation { seed: u64, dump: String },
}
