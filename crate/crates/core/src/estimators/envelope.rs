//! Exceedance frequencies of the envelope separation between coupled
//! Laguerre skeletons.

use super::coincidence::coupler_for;
use super::plan::{run_replicates, ExperimentPlan, Mode};
use super::stats::wilson;
use super::EstimatorError;
use crate::coupling::CoupledPair;
use crate::geometry::{Point, Rect, Shape, WeightedPoint};
use crate::stabilization::{event_hmax, event_hmin};
use crate::tessellation::{envelope_separation, laguerre_skeleton, tessellate, Skeleton};
use serde::{Deserialize, Serialize};

/// One row of the envelope CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeRow {
    pub scenario: String,
    pub n: u64,
    pub eps: f64,
    pub exceed_freq: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeEstimate {
    pub n: u64,
    pub r_n: f64,
    pub rows: Vec<EnvelopeRow>,
    /// Per-replicate separation; `None` when the replicate failed.
    pub separations: Vec<Option<f64>>,
    pub cert_rate: f64,
    pub errors: Vec<String>,
}

/// Extra radius around `B_R` kept for the neighbourhood side of the
/// separation.
const SKELETON_MARGIN: f64 = 1.0;

fn member(points: &[WeightedPoint], big_r: f64, r: f64) -> Result<(Skeleton, bool), EstimatorError> {
    let outer = big_r + SKELETON_MARGIN;
    let frame = Rect::new(-outer, -outer, outer, outer).expand(0.5);
    let (_, diagram) = tessellate(points, &frame)?;
    let cert = !points.is_empty()
        && event_hmax(points, big_r, (big_r + r).powi(2))?
        && event_hmin(points, 2.0 * (big_r + r), 0.0)?;
    Ok((laguerre_skeleton(&diagram, &Shape::disk(Point::ORIGIN, outer)), cert))
}

fn separation(pair: &CoupledPair, big_r: f64, r: f64) -> Result<(f64, bool), EstimatorError> {
    let (a, ca) = member(&pair.left.points, big_r, r)?;
    let (b, cb) = member(&pair.right.points, big_r, r)?;
    Ok((envelope_separation(&a, &b, &Shape::disk(Point::ORIGIN, big_r)), ca && cb))
}

/// For each `n` and `ε`: the frequency of `envelope_separation > ε` on
/// `B_R` between the Voronoi limit and the coupled member. A failed
/// replicate counts as an exceedance at every `ε`.
pub fn estimate_envelope(plan: &ExperimentPlan, eps_grid: &[f64], workers: usize) -> Result<Vec<EnvelopeEstimate>, EstimatorError> {
    plan.validate()?;
    if plan.mode != Mode::C2LaguerreEnvelope {
        return Err(EstimatorError::InvalidPlan("envelope estimation needs mode C2_laguerre_envelope".into()));
    }
    if eps_grid.iter().any(|e| !(*e >= 0.0)) {
        return Err(EstimatorError::InvalidPlan("eps values must be >= 0".into()));
    }
    let radii = plan.radii()?;
    let root = plan.key().child("envelope", 0);
    let mut out = Vec::new();
    for (&n, &r) in plan.n_grid.iter().zip(&radii) {
        let (coupler, _) = coupler_for(plan, n, r)?;
        let key = root.child("n", n);
        let res = run_replicates(workers, plan.replicates, |i| separation(&coupler.sample(key.child("rep", i as u64)), plan.big_r, r));
        let mut separations = Vec::new();
        let mut errors = Vec::new();
        let mut cert = 0;
        for x in res {
            match x {
                Ok((s, c)) => {
                    separations.push(Some(s));
                    cert += c as usize;
                }
                Err(e) => {
                    separations.push(None);
                    errors.push(e.to_string());
                }
            }
        }
        let m = plan.replicates;
        let rows = eps_grid
            .iter()
            .map(|&eps| {
                let k = separations.iter().filter(|s| s.is_none_or(|s| s > eps)).count();
                let (ci_lo, ci_hi) = wilson(k, m);
                EnvelopeRow { scenario: plan.scenario.clone(), n, eps, exceed_freq: k as f64 / m as f64, ci_lo, ci_hi }
            })
            .collect();
        out.push(EnvelopeEstimate { n, r_n: r, rows, separations, cert_rate: cert as f64 / m as f64, errors });
    }
    Ok(out)
}
