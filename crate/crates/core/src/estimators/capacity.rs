//! Empirical capacity functionals `T̂(C) = P̂(skeleton ∩ C ≠ ∅)`.

use super::plan::run_replicates;
use super::stats::wilson;
use super::window::{simulate_window, window_design};
use super::EstimatorError;
use crate::densities::HeightDensity;
use crate::geometry::{Rect, Shape};
use crate::rng::StreamKey;
use crate::tessellation::fixtures::{ProductTiling, QRect};
use crate::tessellation::{capacity_hit, laguerre_skeleton};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityRow {
    pub set: usize,
    pub hits: usize,
    pub replicates: usize,
    pub t_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityEstimate {
    pub rows: Vec<CapacityRow>,
    /// `hits[i][j]`: replicate `i` meets set `j`.
    pub hits: Vec<Vec<bool>>,
    pub uncertified: usize,
}

fn inside(window: &Rect, c: &Shape) -> bool {
    let b = c.bounds();
    b.min.x >= window.min.x && b.min.y >= window.min.y && b.max.x <= window.max.x && b.max.y <= window.max.y
}

fn rows(hits: &[Vec<bool>], sets: usize) -> Vec<CapacityRow> {
    let m = hits.len();
    (0..sets)
        .map(|j| {
            let k = hits.iter().filter(|h| h[j]).count();
            let (ci_lo, ci_hi) = wilson(k, m);
            CapacityRow { set: j, hits: k, replicates: m, t_hat: k as f64 / m.max(1) as f64, ci_lo, ci_hi }
        })
        .collect()
}

/// Capacity functional of the Laguerre skeleton of `η_f` on each test set.
/// Every set must lie inside `window`, which is simulated exactly.
pub fn estimate_capacity(
    f: &HeightDensity,
    sets: &[Shape],
    window: &Rect,
    replicates: usize,
    seed: u64,
    workers: usize,
) -> Result<CapacityEstimate, EstimatorError> {
    if replicates == 0 {
        return Err(EstimatorError::InvalidPlan("replicates must be >= 1".into()));
    }
    if let Some(j) = sets.iter().position(|c| !inside(window, c)) {
        return Err(EstimatorError::InvalidPlan(format!("test set {j} leaves the window")));
    }
    let design = window_design(f, window)?;
    let key = StreamKey::new(seed).child("capacity", 0);
    let region = Shape::rect(*window);
    let res = run_replicates(workers, replicates, |i| {
        simulate_window(f, &design, key.child("rep", i as u64)).map(|s| {
            let sk = laguerre_skeleton(&s.diagram, &region);
            (s.certified, sets.iter().map(|c| capacity_hit(&sk, c)).collect::<Vec<bool>>())
        })
    });
    let mut hits = Vec::with_capacity(replicates);
    let mut bad = 0;
    for r in res {
        let (ok, h) = r?;
        bad += (!ok) as usize;
        hits.push(h);
    }
    Ok(CapacityEstimate { rows: rows(&hits, sets.len()), hits, uncertified: bad })
}

/// Deterministic capacity of a product tiling's skeleton inside `frame`.
pub fn fixture_capacity(t: &ProductTiling, frame: &QRect, sets: &[Shape]) -> Vec<bool> {
    let d = t.to_diagram(frame);
    let sk = laguerre_skeleton(&d, &Shape::rect(frame.to_rect()));
    sets.iter().map(|c| capacity_hit(&sk, c)).collect()
}
