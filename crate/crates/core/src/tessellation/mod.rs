//! Dual (regular) triangulations, Laguerre diagrams, skeletons and
//! deterministic fixtures in the plane.

mod dual;
pub mod fixtures;
mod laguerre;
mod render;
mod skeleton;

use thiserror::Error;

pub use dual::{build_dual, DualTriangulation, NearTie, Simplex};
pub use fixtures::{lattice_fixture, FixtureKind, LatticeMixture, ProductTiling, QRect};
pub use laguerre::{build_laguerre, default_frame, laguerre_brute_force, tessellate, Cell, EdgeLabel, LaguerreDiagram};
pub use render::{render_svg, Complex};
pub(crate) use crate::geometry::triangle_meets;
pub use skeleton::{
    capacity_hit, dual_skeleton, envelope_separation, laguerre_skeleton, skeleton_equal, Skeleton, SkeletonSegment,
    SKELETON_TOL,
};

#[derive(Debug, Error, PartialEq)]
pub enum TessellationError {
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("skeletons are restricted to different regions")]
    RegionMismatch,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
