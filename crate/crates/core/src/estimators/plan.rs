//! Experiment plans and replicate scheduling.

use super::EstimatorError;
use crate::coupling::{rn_schedule, ScheduleMode};
use crate::densities::ConvergenceFamily;
use crate::geometry::Rect;
use crate::rng::StreamKey;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "C1_dual")]
    C1Dual,
    #[serde(rename = "C1_laguerre")]
    C1Laguerre,
    #[serde(rename = "C2_dual")]
    C2Dual,
    #[serde(rename = "C2_laguerre_envelope")]
    C2LaguerreEnvelope,
}

impl Mode {
    pub fn schedule(self) -> ScheduleMode {
        match self {
            Mode::C1Dual | Mode::C1Laguerre => ScheduleMode::C1,
            Mode::C2Dual | Mode::C2LaguerreEnvelope => ScheduleMode::C2,
        }
    }

    pub fn is_dual(self) -> bool {
        matches!(self, Mode::C1Dual | Mode::C2Dual)
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::C1Dual => "C1_dual",
            Mode::C1Laguerre => "C1_laguerre",
            Mode::C2Dual => "C2_dual",
            Mode::C2LaguerreEnvelope => "C2_laguerre_envelope",
        }
    }
}

/// How the coupling radius `r_n` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum RadiusRule {
    Fixed { r: f64 },
    /// Block schedule up to `k_max` blocks.
    Schedule { k_max: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub scenario: String,
    pub family: ConvergenceFamily,
    pub mode: Mode,
    /// Window radius `R` of `B_R`.
    pub big_r: f64,
    pub n_grid: Vec<u64>,
    pub replicates: usize,
    pub seed: u64,
    pub radius: RadiusRule,
    /// Lower height level of the stabilization region in C1 modes; chosen
    /// automatically when absent.
    pub t: Option<f64>,
    /// Window for intensity and typical-cell estimation.
    pub window: Rect,
}

impl ExperimentPlan {
    pub fn new(scenario: &str, family: ConvergenceFamily, mode: Mode, big_r: f64, n_grid: Vec<u64>, replicates: usize, seed: u64) -> ExperimentPlan {
        ExperimentPlan {
            scenario: scenario.to_string(),
            family,
            mode,
            big_r,
            n_grid,
            replicates,
            seed,
            radius: RadiusRule::Fixed { r: big_r },
            t: None,
            window: Rect::new(0.0, 0.0, 10.0, 10.0),
        }
    }

    pub fn validate(&self) -> Result<(), EstimatorError> {
        let bad = |m: String| Err(EstimatorError::InvalidPlan(m));
        if self.replicates == 0 {
            return bad("replicates must be >= 1".into());
        }
        if !(self.big_r > 0.0 && self.big_r.is_finite()) {
            return bad(format!("R must be > 0, got {}", self.big_r));
        }
        if self.n_grid.is_empty() || self.n_grid.contains(&0) {
            return bad("n-grid must be non-empty with indices >= 1".into());
        }
        if let RadiusRule::Fixed { r } = self.radius {
            if !(r > 0.0 && r.is_finite()) {
                return bad(format!("coupling radius must be > 0, got {r}"));
            }
        }
        if let Some(t) = self.t {
            if !(t <= 0.0) {
                return bad(format!("t must be <= 0, got {t}"));
            }
        }
        if !(self.window.area() > 0.0) {
            return bad("window must have positive area".into());
        }
        let homogeneous_limit = self.family.limit_gamma().is_some();
        match self.mode {
            Mode::C2Dual | Mode::C2LaguerreEnvelope if !homogeneous_limit => {
                bad(format!("{} needs a Poisson-Voronoi limit", self.mode.name()))
            }
            Mode::C1Dual | Mode::C1Laguerre if homogeneous_limit => {
                bad(format!("{} needs a limit with a proper height density", self.mode.name()))
            }
            _ => Ok(()),
        }
    }

    /// `r_n` for every index of the grid.
    pub fn radii(&self) -> Result<Vec<f64>, EstimatorError> {
        match self.radius {
            RadiusRule::Fixed { r } => Ok(vec![r; self.n_grid.len()]),
            RadiusRule::Schedule { k_max } => {
                let n_max = *self.n_grid.iter().max().unwrap_or(&1);
                let s = rn_schedule(&self.family, self.mode.schedule(), n_max, k_max)?;
                Ok(self.n_grid.iter().map(|&n| s.r(n)).collect())
            }
        }
    }

    pub fn key(&self) -> StreamKey {
        StreamKey::new(self.seed)
    }
}

/// Runs `f(i)` for `i < n` on `workers` threads and returns the results in
/// index order.
pub fn run_replicates<T, F>(workers: usize, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if workers <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
        Err(_) => (0..n).map(f).collect(),
    }
}
