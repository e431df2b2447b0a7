//! Exact simulation of a tessellation inside a rectangular window.
//!
//! Heights are sampled up to a cap `T` in bands; a band starting at height
//! `b` is sampled on the certified rectangle grown by `sqrt(T - b)`. When
//! the lower power envelope stays below `T` on the certified rectangle,
//! no unsampled point can change the tessellation there. The only residual
//! error is the chance of a point below the lowest sampled height, which is
//! reported as `truncation_mass`.

use super::EstimatorError;
use crate::densities::HeightDensity;
use crate::geometry::{power, Rect, Shape, WeightedPoint};
use crate::rng::StreamKey;
use crate::sampling::sample_into;
use crate::densities::HeightSampler;
use crate::tessellation::{tessellate, DualTriangulation, LaguerreDiagram};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const BANDS: usize = 8;
/// Target for `π^{d/2} (I^{d/2+1} f)(T)` above the log-area term.
const COVER_TARGET: f64 = 12.0;
const TRUNCATION_TARGET: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowDesign {
    pub window: Rect,
    /// Rectangle on which the envelope is certified.
    pub certified: Rect,
    pub t_lo: f64,
    pub t_cap: f64,
    /// Band boundaries `t_lo = b_0 < … < b_K = t_cap`.
    pub bands: Vec<f64>,
    /// Expected number of relevant points below `t_lo`.
    pub truncation_mass: f64,
}

fn check_d(f: &HeightDensity) -> Result<(), EstimatorError> {
    if f.d != 2 {
        return Err(EstimatorError::InvalidPlan("window simulation is planar (d = 2)".into()));
    }
    Ok(())
}

/// Chooses the height cap, lower cut and certified margin for `f` on `window`.
pub fn window_design(f: &HeightDensity, window: &Rect) -> Result<WindowDesign, EstimatorError> {
    check_d(f)?;
    let (s_lo, _) = f.support();
    let area = window.area();
    // height below which one point per window area is expected
    let base = match f.cdf_inverse(1.0 / area) {
        Ok(y) if y.is_finite() => y.max(s_lo),
        _ if s_lo.is_finite() => s_lo,
        Err(e) => return Err(e.into()),
        Ok(_) => return Err(EstimatorError::InvalidPlan(format!("no base height for {}", f.label()))),
    };
    let mut step = 1.0;
    let mut t_cap = base + step;
    let certified = loop {
        let m = (t_cap - base).sqrt().max(1.0);
        let cert = window.expand(m);
        let cover = PI * f.frac_integral(2.0, t_cap)?;
        if cover >= COVER_TARGET + (1.0 + cert.area()).ln() {
            break cert;
        }
        step *= 2.0;
        if step > 1e8 {
            return Err(EstimatorError::InvalidPlan(format!("no height cap covers the window for {}", f.label())));
        }
        t_cap = base + step;
    };
    let mut lo = base.min(t_cap - 1.0);
    let (t_lo, truncation_mass) = loop {
        if lo <= s_lo {
            break (s_lo, 0.0);
        }
        let reach = certified.expand((t_cap - lo).sqrt());
        let mass = f.cdf(lo)? * reach.area();
        if mass <= TRUNCATION_TARGET || lo < -1e6 {
            break (lo, mass);
        }
        lo -= 1.0 + 0.5 * lo.abs();
    };
    let mut bands = vec![t_lo];
    for j in 1..BANDS {
        bands.push(t_cap - (t_cap - t_lo) * 2f64.powi(-(j as i32)));
    }
    bands.push(t_cap);
    Ok(WindowDesign { window: *window, certified, t_lo, t_cap, bands, truncation_mass })
}

#[derive(Clone, Debug)]
pub struct WindowSample {
    pub points: Vec<WeightedPoint>,
    pub dual: Option<DualTriangulation>,
    /// Diagram clipped to the certified rectangle.
    pub diagram: LaguerreDiagram,
    pub envelope_sup: f64,
    pub certified: bool,
}

/// Sup over the frame of the lower power envelope, read off the clipped
/// cells: power to a fixed site is convex, so it peaks at a cell vertex.
pub fn envelope_sup(points: &[WeightedPoint], diagram: &LaguerreDiagram) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for c in diagram.nonempty() {
        if let Ok(k) = points.binary_search_by_key(&c.id, |p| p.id) {
            for v in &c.vertices {
                best = best.max(power(*v, &points[k]));
            }
        }
    }
    if diagram.nonempty().next().is_none() {
        return f64::INFINITY;
    }
    best
}

pub fn simulate_window(f: &HeightDensity, design: &WindowDesign, key: StreamKey) -> Result<WindowSample, EstimatorError> {
    let mut points = Vec::new();
    for j in 0..design.bands.len() - 1 {
        let (lo, hi) = (design.bands[j], design.bands[j + 1]);
        let sampler = HeightSampler::new(f, lo, hi)?;
        let reach = Shape::rect(design.certified.expand((design.t_cap - lo).max(0.0).sqrt()));
        let n = points.len();
        sample_into(&sampler, &reach, n, &mut points, &mut key.child("band", j as u64).rng());
    }
    let (dual, diagram) = tessellate(&points, &design.certified)?;
    let sup = envelope_sup(&points, &diagram);
    Ok(WindowSample { certified: sup <= design.t_cap, envelope_sup: sup, points, dual, diagram })
}
