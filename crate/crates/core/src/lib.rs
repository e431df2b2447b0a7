//! Simulation and verification toolkit for planar Poisson-Laguerre
//! tessellations: height densities and their fractional integrals, seeded
//! Poisson samplers, weighted Delaunay / Laguerre construction, couplings,
//! stabilization events and Monte Carlo estimators.

pub mod densities;
pub mod geometry;
pub mod quadrature;
pub mod special;

pub use densities::{ConvergenceFamily, DensityError, HeightDensity, MarkLaw};
pub use geometry::{Point, Rect, Segment, Shape, WeightedPoint};
pub mod rng;
pub mod sampling;
pub mod coupling;
pub mod tessellation;
pub mod stabilization;
pub mod estimators;

pub use coupling::{CoupledPair, CouplingError};
pub use estimators::{EstimatorError, ExperimentPlan, Mode};
pub use sampling::{PointConfiguration, Region};
pub use stabilization::{certify_window, Certificate, CertifyMode, StabError, StabRegion};
pub use tessellation::{DualTriangulation, LaguerreDiagram, Skeleton, TessellationError};
