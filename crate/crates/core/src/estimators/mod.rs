//! Monte Carlo estimators: coincidence probabilities, envelope
//! exceedances, capacity functionals, intensities and typical cells, and
//! the named convergence suites.

mod capacity;
mod coincidence;
mod envelope;
mod intensity;
mod plan;
pub mod stats;
mod suite;
mod window;

pub use capacity::{estimate_capacity, fixture_capacity, CapacityEstimate, CapacityRow};
pub use coincidence::{estimate_coincidence, CoincidenceEstimate, CoincidenceRow, ReplicateOutcome};
pub use envelope::{estimate_envelope, EnvelopeEstimate, EnvelopeRow};
pub use intensity::{
    estimate_intensities, fixture_intensities, fixture_typical_cells, typical_cell, CellRecord, IntensityEstimate,
    IntensityRow, TypicalCellSample, TypicalCellSummary,
};
pub use plan::{run_replicates, ExperimentPlan, Mode, RadiusRule};
pub use suite::{convergence_suite, write_csv, Scenario, SuiteConfig, SuiteReport};
pub use window::{envelope_sup, simulate_window, window_design, WindowDesign, WindowSample};

use crate::coupling::CouplingError;
use crate::densities::DensityError;
use crate::stabilization::StabError;
use crate::tessellation::TessellationError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Coupling(#[from] CouplingError),
    #[error(transparent)]
    Tessellation(#[from] TessellationError),
    #[error(transparent)]
    Stabilization(#[from] StabError),
    #[error("output error: {0}")]
    Io(String),
}
