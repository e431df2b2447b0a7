//! Coincidence probabilities of coupled skeletons on `B_R`.

use super::plan::{run_replicates, ExperimentPlan, Mode};
use super::stats::wilson;
use super::EstimatorError;
use crate::coupling::{CoupledPair, DensityCoupling, VoronoiCoupling};
use crate::densities::{HeightDensity, HeightSampler};
use crate::geometry::{Point, Rect, Shape, WeightedPoint};
use crate::rng::StreamKey;
use crate::sampling::Region;
use crate::stabilization::{event_e, event_hmax, event_hmin, StabRegion};
use crate::tessellation::{
    build_dual, dual_skeleton, laguerre_skeleton, skeleton_equal, tessellate, Skeleton, TessellationError,
};
use serde::{Deserialize, Serialize};

/// One row of the coincidence CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceRow {
    pub scenario: String,
    pub n: u64,
    pub r_n: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub replicates: usize,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub cert_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicateOutcome {
    pub index: usize,
    pub equal: bool,
    /// Both members passed their stabilization certificate.
    pub certified: bool,
    /// The coupling drew a point on its region belonging to one member only.
    pub disagreed: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceEstimate {
    pub row: CoincidenceRow,
    /// Lower height level used by the certificates.
    pub t: f64,
    /// Expected number of unshared points on the coupling region.
    pub l1_bound: f64,
    pub outcomes: Vec<ReplicateOutcome>,
}

/// Expected number of points below `t` on `disk` under `f`.
fn low_mass(f: &HeightDensity, disk: &Shape, t: f64) -> Result<f64, EstimatorError> {
    Ok(HeightSampler::new(f, f64::NEG_INFINITY, t)?.mass() * disk.area())
}

fn k0_radius(big_r: f64, r: f64, t: f64) -> f64 {
    2.0 * ((big_r + r).powi(2) - t).sqrt()
}

/// Largest integer `t <= 0` with at most `tol` expected points below `t`
/// on the stabilization disk, for both densities.
pub(crate) fn auto_t(fs: [&HeightDensity; 2], big_r: f64, r: f64, tol: f64) -> Result<f64, EstimatorError> {
    let mut t = 0.0;
    while t > -1e4 {
        let disk = Shape::disk(Point::ORIGIN, k0_radius(big_r, r, t));
        let worst = low_mass(fs[0], &disk, t)?.max(low_mass(fs[1], &disk, t)?);
        if worst <= tol {
            return Ok(t);
        }
        t -= 1.0;
    }
    Err(EstimatorError::InvalidPlan("no lower height level keeps the tail below tolerance".into()))
}

pub(crate) enum Coupler {
    Density(DensityCoupling),
    Voronoi(VoronoiCoupling),
}

impl Coupler {
    pub(crate) fn sample(&self, key: StreamKey) -> CoupledPair {
        match self {
            Coupler::Density(c) => c.sample(key),
            Coupler::Voronoi(c) => c.sample(key),
        }
    }

    fn l1_bound(&self) -> f64 {
        match self {
            Coupler::Density(c) => c.l1_bound(),
            Coupler::Voronoi(c) => c.l1_bound(),
        }
    }
}

/// Coupler and certificate level `t` for index `n`.
pub(crate) fn coupler_for(plan: &ExperimentPlan, n: u64, r: f64) -> Result<(Coupler, f64), EstimatorError> {
    let f_n = plan.family.member(n)?;
    match plan.mode {
        Mode::C1Dual | Mode::C1Laguerre => {
            let f = plan.family.limit();
            let t = match plan.t {
                Some(t) => t,
                None => auto_t([&f, &f_n], plan.big_r, r, 0.01)?,
            };
            let k0 = StabRegion::K0 { big_r: plan.big_r, r, t };
            k0.validate()?;
            let region = k0.bounding_region().expect("K0 is a box");
            let below = Region::new(region.spatial, f64::NEG_INFINITY, t);
            Ok((Coupler::Density(DensityCoupling::new(&f, &f_n, region, vec![below])?), t))
        }
        Mode::C2Dual | Mode::C2LaguerreEnvelope => {
            let gamma = plan.family.limit_gamma().expect("validated");
            Ok((Coupler::Voronoi(VoronoiCoupling::new(gamma, &f_n, r)?), 0.0))
        }
    }
}

pub(crate) fn empty_skeleton(region: Shape) -> Skeleton {
    Skeleton { segments: Vec::new(), region }
}

/// Skeleton of one member on `B_R` together with its certificate.
fn member(points: &[WeightedPoint], mode: Mode, big_r: f64, r: f64, t: f64) -> Result<(Skeleton, bool), EstimatorError> {
    let ball = Shape::disk(Point::ORIGIN, big_r);
    let top = (big_r + r).powi(2);
    let hmin = event_hmin(points, k0_radius(big_r, r, t), t).unwrap_or(true);
    if mode.is_dual() {
        match build_dual(points) {
            Ok(d) => {
                let e = event_e(&d, big_r, r);
                Ok((dual_skeleton(&d, &ball), e && hmin))
            }
            Err(TessellationError::DegenerateConfiguration(_)) => Ok((empty_skeleton(ball), hmin)),
            Err(e) => Err(e.into()),
        }
    } else {
        let frame = Rect::new(-big_r, -big_r, big_r, big_r).expand(1.0);
        let (_, diagram) = tessellate(points, &frame)?;
        let hmax = !points.is_empty() && event_hmax(points, big_r, top)?;
        Ok((laguerre_skeleton(&diagram, &ball), hmax && hmin))
    }
}

fn compare(pair: &CoupledPair, mode: Mode, big_r: f64, r: f64, t: f64) -> Result<(bool, bool), EstimatorError> {
    let (a, ca) = member(&pair.left.points, mode, big_r, r, t)?;
    let (b, cb) = member(&pair.right.points, mode, big_r, r, t)?;
    Ok((skeleton_equal(&a, &b)?, ca && cb))
}

/// For each `n` of the plan: the fraction of coupled replicates whose
/// skeletons (dual or Laguerre, per mode) agree on `B_R`, with a Wilson
/// interval and the fraction certified by the stabilization events.
/// Replicate failures are recorded and count as disagreement.
pub fn estimate_coincidence(plan: &ExperimentPlan, workers: usize) -> Result<Vec<CoincidenceEstimate>, EstimatorError> {
    plan.validate()?;
    if plan.mode == Mode::C2LaguerreEnvelope {
        return Err(EstimatorError::InvalidPlan("coincidence needs C1_dual, C1_laguerre or C2_dual".into()));
    }
    let radii = plan.radii()?;
    let root = plan.key().child("coincidence", 0);
    let mut out = Vec::new();
    for (&n, &r) in plan.n_grid.iter().zip(&radii) {
        let (coupler, t) = coupler_for(plan, n, r)?;
        let key = root.child("n", n);
        let outcomes = run_replicates(workers, plan.replicates, |i| {
            let pair = coupler.sample(key.child("rep", i as u64));
            let disagreed = pair.diagnostics.disagreed;
            match compare(&pair, plan.mode, plan.big_r, r, t) {
                Ok((equal, certified)) => ReplicateOutcome { index: i, equal, certified, disagreed, error: None },
                Err(e) => ReplicateOutcome { index: i, equal: false, certified: false, disagreed, error: Some(e.to_string()) },
            }
        });
        let hits = outcomes.iter().filter(|o| o.equal).count();
        let cert = outcomes.iter().filter(|o| o.certified).count();
        let m = plan.replicates;
        let (ci_lo, ci_hi) = wilson(hits, m);
        out.push(CoincidenceEstimate {
            row: CoincidenceRow {
                scenario: plan.scenario.clone(),
                n,
                r_n: r,
                big_r: plan.big_r,
                replicates: m,
                p_hat: hits as f64 / m as f64,
                ci_lo,
                ci_hi,
                cert_rate: cert as f64 / m as f64,
            },
            t,
            l1_bound: coupler.l1_bound(),
            outcomes,
        });
    }
    Ok(out)
}
