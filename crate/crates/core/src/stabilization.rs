//! Stabilization regions, the events ℋ^min, ℋ^max and ℰ, and the explicit
//! probability bounds for the first two.

use crate::densities::{DensityError, HeightDensity};
use crate::geometry::{power, Point, Rect, Segment, Shape, WeightedPoint};
use crate::sampling::Region;
use crate::special::kappa;
use crate::tessellation::{tessellate, triangle_meets, DualTriangulation};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StabError {
    #[error("configuration is empty")]
    EmptyConfiguration,
    #[error("parameters out of range: {0}")]
    OutOfRange(String),
    #[error(transparent)]
    Density(#[from] DensityError),
}

/// Space-height regions used by the stabilization arguments. Field names
/// follow the region parameters: `big_r` is the window radius `R`, `t_cap`
/// an upper power level `T`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum StabRegion {
    K0 { big_r: f64, r: f64, t: f64 },
    K1 { big_r: f64, r: f64 },
    K2 { big_r: f64, r: f64 },
    K3 { a: f64, t_cap: f64 },
    K4 { a: f64, t: f64 },
    /// Region of apex points `(w, q)`.
    K5 { r: f64, t: f64, big_r: f64 },
}

impl StabRegion {
    pub fn validate(&self) -> Result<(), StabError> {
        let bad = |m: &str| Err(StabError::OutOfRange(m.into()));
        match *self {
            StabRegion::K0 { big_r, r, t } => {
                if !(big_r > 0.0 && r > 0.0) {
                    return bad("K0 needs R, r > 0");
                }
                if !(t <= 0.0) {
                    return bad("K0 needs t <= 0");
                }
            }
            StabRegion::K1 { big_r, r } | StabRegion::K2 { big_r, r } => {
                if !(big_r > 0.0 && r > 0.0) {
                    return bad("need R, r > 0");
                }
            }
            StabRegion::K3 { a, .. } | StabRegion::K4 { a, .. } => {
                if !(a >= 0.0) {
                    return bad("need a >= 0");
                }
            }
            StabRegion::K5 { r, big_r, .. } => {
                if !(big_r > 0.0 && r > 0.0) {
                    return bad("K5 needs R, r > 0");
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, p: &WeightedPoint) -> bool {
        let (v, h) = (p.v.norm(), p.h);
        match *self {
            StabRegion::K0 { big_r, r, t } => {
                let top = (big_r + r).powi(2);
                h >= t && h <= top && v <= 2.0 * (top - t).sqrt()
            }
            StabRegion::K1 { big_r, r } => {
                let top = (big_r + r).powi(2);
                h >= -1.25 * top && h <= top && v <= 3.0 * (big_r + r)
            }
            StabRegion::K2 { big_r, r } => h >= 0.0 && h <= (big_r + r).powi(2) && v <= 2.0 * (big_r + r),
            StabRegion::K3 { a, t_cap } => h <= t_cap - a * a && v <= (t_cap - h).sqrt() - a,
            StabRegion::K4 { a, t } => h < t && v < a + (t - h).sqrt(),
            StabRegion::K5 { r, t, big_r } => h >= r * r / 2.0 + t && v <= big_r + (h - t).sqrt(),
        }
    }

    /// Disk-times-interval box of K0, K1 or K2, for sampling.
    pub fn bounding_region(&self) -> Option<Region> {
        let disk = |rad: f64| Shape::disk(Point::ORIGIN, rad);
        match *self {
            StabRegion::K0 { big_r, r, t } => {
                let top = (big_r + r).powi(2);
                Some(Region::new(disk(2.0 * (top - t).sqrt()), t, top))
            }
            StabRegion::K1 { big_r, r } => {
                let top = (big_r + r).powi(2);
                Some(Region::new(disk(3.0 * (big_r + r)), -1.25 * top, top))
            }
            StabRegion::K2 { big_r, r } => Some(Region::new(disk(2.0 * (big_r + r)), 0.0, (big_r + r).powi(2))),
            _ => None,
        }
    }
}

/// `inf_{w ∈ B_a} min_p pow(w, p) = min_p (max(|v| - a, 0))^2 + h`.
pub fn hmin_value(points: &[WeightedPoint], a: f64) -> Result<f64, StabError> {
    if points.is_empty() {
        return Err(StabError::EmptyConfiguration);
    }
    Ok(points.iter().map(|p| (p.v.norm() - a).max(0.0).powi(2) + p.h).fold(f64::INFINITY, f64::min))
}

/// ℋ^min(η, a, t): the lower power envelope stays at or above `t` on `B_a`.
pub fn event_hmin(points: &[WeightedPoint], a: f64, t: f64) -> Result<bool, StabError> {
    Ok(hmin_value(points, a)? >= t)
}

fn envelope(points: &[WeightedPoint], w: Point) -> f64 {
    points.iter().map(|p| power(w, p)).fold(f64::INFINITY, f64::min)
}

fn in_convex(poly: &[Point], z: Point) -> bool {
    let n = poly.len();
    (0..n).all(|k| {
        let (a, b) = (poly[k], poly[(k + 1) % n]);
        let c = (b - a).cross(z - a);
        c >= -1e-12 * (1.0 + (b - a).norm() * (z - a).norm())
    })
}

/// `sup_{w ∈ B_a} min_p pow(w, p)`, exact up to rounding: the supremum is
/// attained at a Laguerre vertex inside the disk, a crossing of a cell edge
/// with the circle, or the point of the circle farthest from a generator
/// inside that generator's cell.
pub fn hmax_value(points: &[WeightedPoint], a: f64) -> Result<f64, StabError> {
    if points.is_empty() {
        return Err(StabError::EmptyConfiguration);
    }
    if !(a > 0.0) {
        return Ok(envelope(points, Point::ORIGIN));
    }
    let frame = Rect::new(-2.0 * a, -2.0 * a, 2.0 * a, 2.0 * a);
    let (_, diagram) = tessellate(points, &frame).map_err(|e| StabError::OutOfRange(e.to_string()))?;
    let mut best = f64::NEG_INFINITY;
    for c in diagram.nonempty() {
        let site = points.iter().find(|p| p.id == c.id).expect("cell site");
        let mut cand: Vec<Point> = Vec::new();
        for (p, q, _) in c.edges() {
            if let Some((t0, t1)) = Segment::new(p, q).clip_disk(Point::ORIGIN, a) {
                let s = Segment::new(p, q);
                cand.push(s.at(t0));
                cand.push(s.at(t1));
            }
        }
        let n = site.v.norm();
        let far = if n > 0.0 { site.v * (-a / n) } else { Point::new(a, 0.0) };
        if in_convex(&c.vertices, far) {
            cand.push(far);
        }
        for w in cand {
            best = best.max(envelope(points, w));
        }
    }
    Ok(best)
}

/// ℋ^max(η, a, T): the lower power envelope stays at or below `T` on `B_a`.
pub fn event_hmax(points: &[WeightedPoint], a: f64, t_cap: f64) -> Result<bool, StabError> {
    Ok(hmax_value(points, a)? <= t_cap)
}

/// ℰ(η, R, r): every dual simplex meeting `B_R` has apex `(z, q)` with
/// `q <= (R + r)^2 - |z|^2`.
pub fn event_e(dual: &DualTriangulation, big_r: f64, r: f64) -> bool {
    let ball = Shape::disk(Point::ORIGIN, big_r);
    let top = (big_r + r).powi(2);
    dual.simplices.iter().all(|s| {
        let [p, q, w] = dual.corners(s);
        !triangle_meets(p, q, w, &ball) || s.apex.apex_h <= top - s.apex.apex_v.norm2()
    })
}

/// Explicit tail bounds for the envelope events.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "bound", rename_all = "snake_case")]
pub enum EventBound {
    /// Upper bound on `P(ℋ^max(η_f, a, T)^c)`; needs `T > 4a^2`.
    HmaxDensity { f: HeightDensity, a: f64, t_cap: f64 },
    /// Upper bound on `P(ℋ^min(η_f, a, t)^c)`.
    HminDensity { f: HeightDensity, a: f64, t: f64 },
    /// Upper bound on `P(ℋ^max(η^γ, a, T)^c)`; needs `T >= a^2`.
    HmaxHomogeneous { gamma: f64, d: u32, a: f64, t_cap: f64 },
}

pub fn event_bound(b: &EventBound) -> Result<f64, StabError> {
    match b {
        EventBound::HmaxDensity { f, a, t_cap } => {
            if !(*t_cap > 4.0 * a * a) {
                return Err(StabError::OutOfRange(format!("need T > 4a^2 (T={t_cap}, a={a})")));
            }
            let d = f.d as f64;
            let i = match f.frac_integral(d / 2.0 + 1.0, t_cap - 4.0 * a * a) {
                Ok(v) => v,
                Err(DensityError::DivergentIntegral) => f64::INFINITY,
                Err(e) => return Err(e.into()),
            };
            Ok((-(PI.powf(d / 2.0)) * 2f64.powf(-d) * i).exp())
        }
        EventBound::HminDensity { f, a, t } => {
            let d = f.d as f64;
            let hi = f.frac_integral(d / 2.0 + 1.0, *t)?;
            let one = f.frac_integral(1.0, *t)?;
            Ok(2f64.powf(d) * kappa(f.d) * (hi + a.powf(d) * one))
        }
        EventBound::HmaxHomogeneous { gamma, d, a, t_cap } => {
            if !(*t_cap >= a * a) {
                return Err(StabError::OutOfRange(format!("need T >= a^2 (T={t_cap}, a={a})")));
            }
            Ok((-gamma * kappa(*d) * (t_cap.sqrt() - a).powi(*d as i32)).exp())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CertifyMode {
    /// ℰ(η, R, r) ∩ ℋ^min(η, 2√((R+r)² - t), t).
    Dual { big_r: f64, r: f64, t: f64 },
    /// ℋ^max(η, R, (R+r)²) ∩ ℋ^min(η, 2√((R+r)² - t), t).
    Laguerre { big_r: f64, r: f64, t: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(rename = "Hmax")]
    pub hmax: bool,
    #[serde(rename = "Hmin")]
    pub hmin: bool,
    #[serde(rename = "E")]
    pub e: bool,
    pub certified: bool,
    /// First event of the mode's conjunction that failed.
    pub failed: Option<String>,
}

/// Evaluates all three events and certifies the window for `mode`. A
/// configuration without a dual triangulation has no simplex, so ℰ holds
/// vacuously.
pub fn certify_window(points: &[WeightedPoint], mode: CertifyMode) -> Result<Certificate, StabError> {
    let (CertifyMode::Dual { big_r, r, t } | CertifyMode::Laguerre { big_r, r, t }) = mode;
    StabRegion::K0 { big_r, r, t }.validate()?;
    let top = (big_r + r).powi(2);
    let hmin = event_hmin(points, 2.0 * (top - t).sqrt(), t)?;
    let hmax = event_hmax(points, big_r, top)?;
    let e = match crate::tessellation::build_dual(points) {
        Ok(d) => event_e(&d, big_r, r),
        Err(_) => true,
    };
    let (first, first_name) = match mode {
        CertifyMode::Dual { .. } => (e, "E"),
        CertifyMode::Laguerre { .. } => (hmax, "Hmax"),
    };
    let failed = if !first {
        Some(first_name.to_string())
    } else if !hmin {
        Some("Hmin".to_string())
    } else {
        None
    };
    Ok(Certificate { hmax, hmin, e, certified: failed.is_none(), failed })
}
