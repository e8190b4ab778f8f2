//! Carrier graphs in hyperbolic 3-space.
//!
//! The crate is organised bottom-up:
//!
//! - [`hyperbolic`] and [`isometry`]: the hyperboloid model of H³ and
//!   `SL(2, C)` isometries acting on it.
//! - [`shortening`]: the triod shortening move, its gain `Sh(c, φ)` and the
//!   constants controlling the gain for short segments.
//! - [`graph`]: finite metric graphs, girth, the greedy small-subgraph
//!   search and the tree-collapse construction.
//! - [`bound`]: the explicit lower bound on edge lengths with a checkable
//!   certificate.
//! - [`relax`]: equivariant carrier graphs for Schottky groups, relaxed to
//!   critical points of the length functional.
//! - [`verify`]: randomized property suites for the lemmas behind all of
//!   the above.

pub mod bound;
pub mod format;
pub mod graph;
pub mod hyperbolic;
pub mod isometry;
pub mod relax;
pub mod shortening;
pub mod verify;

pub use hyperbolic::{GeometryError, HPoint, HTangent};
pub use isometry::Isometry;
