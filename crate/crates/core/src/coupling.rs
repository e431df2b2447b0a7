//! Joint constructions of two Poisson processes that agree on a region with
//! high probability, and the radius schedules used with them.

use crate::densities::{kinks, l1_distance, ConvergenceFamily, DensityError, HeightDensity, HeightSampler, NumericCdf};
use crate::geometry::{Point, Shape, WeightedPoint};
use crate::rng::StreamKey;
use crate::sampling::{sample_into, uniform_in, poisson_count, PointConfiguration, Region, SamplingError};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CouplingError {
    #[error("intensity measure of the coupling region is infinite")]
    InfiniteMass,
    #[error("the limiting spatial intensity is zero")]
    ZeroMass,
    #[error(transparent)]
    Density(DensityError),
    #[error(transparent)]
    Sampling(SamplingError),
    #[error("io error: {0}")]
    Io(String),
}

impl From<DensityError> for CouplingError {
    fn from(e: DensityError) -> Self {
        match e {
            DensityError::DivergentIntegral => CouplingError::InfiniteMass,
            DensityError::ZeroMass => CouplingError::ZeroMass,
            other => CouplingError::Density(other),
        }
    }
}

impl From<SamplingError> for CouplingError {
    fn from(e: SamplingError) -> Self {
        match e {
            SamplingError::InfiniteMass => CouplingError::InfiniteMass,
            other => CouplingError::Sampling(other),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingDiagnostics {
    /// Expected number of points on the coupling region that belong to one
    /// member only.
    pub l1_bound: f64,
    pub disagreed: bool,
    pub region: Region,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoupledPair {
    pub left: PointConfiguration,
    pub right: PointConfiguration,
    /// Ids present in both members at the same location. For density
    /// couplings the heights agree as well; the Voronoi coupling re-marks
    /// the right member.
    pub shared_ids: Vec<usize>,
    pub diagnostics: CouplingDiagnostics,
}

impl CoupledPair {
    /// Writes `left.csv`, `right.csv` and `diagnostics.json` into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<(), CouplingError> {
        let io = |e: std::io::Error| CouplingError::Io(e.to_string());
        std::fs::create_dir_all(dir).map_err(io)?;
        self.left.write_csv(std::fs::File::create(dir.join("left.csv")).map_err(io)?)?;
        self.right.write_csv(std::fs::File::create(dir.join("right.csv")).map_err(io)?)?;
        let json = serde_json::to_string_pretty(&self.diagnostics).map_err(|e| CouplingError::Io(e.to_string()))?;
        std::fs::write(dir.join("diagnostics.json"), json).map_err(io)
    }
}

fn height_window(f: &HeightDensity, g: &HeightDensity, region: &Region) -> Option<(f64, f64)> {
    let (fa, fb) = f.effective_range();
    let (ga, gb) = g.effective_range();
    let lo = region.t_lo.max(fa.min(ga));
    let hi = region.t_hi.min(fb.max(gb));
    (hi > lo).then_some((lo, hi))
}

fn singular_points(fs: &[&HeightDensity]) -> Vec<(f64, f64)> {
    fs.iter()
        .filter_map(|f| f.lower_singularity().map(|e| (f.support().0, e)))
        .filter(|(x, _)| x.is_finite())
        .collect()
}

fn numeric_sampler<G>(g: G, lo: f64, hi: f64, breaks: &[f64], sing: &[(f64, f64)]) -> Result<Option<HeightSampler>, CouplingError>
where
    G: Fn(f64) -> f64 + Send + Sync + 'static,
{
    let cdf = NumericCdf::new(g, lo, hi, breaks, sing)?;
    Ok((cdf.total() > 0.0).then_some(HeightSampler::Numeric(cdf)))
}

/// Reusable coupling of `η_f` and `η_{f_n}` on a region `K` plus
/// independent exteriors.
///
/// On `K` both members contain a common process of intensity
/// `min(f, f_n)`; the left member adds `(f - f_n)^+` and the right member
/// `(f_n - f)^+`. The members therefore differ on `K` exactly when a
/// residual point is drawn, which happens with probability `1 - exp(-L1)`.
#[derive(Clone, Debug)]
pub struct DensityCoupling {
    f: HeightDensity,
    f_n: HeightDensity,
    region: Region,
    exterior: Vec<Region>,
    common: Option<HeightSampler>,
    left_residual: Option<HeightSampler>,
    right_residual: Option<HeightSampler>,
    ext_left: Vec<HeightSampler>,
    ext_right: Vec<HeightSampler>,
    l1: f64,
}

impl DensityCoupling {
    pub fn new(f: &HeightDensity, f_n: &HeightDensity, region: Region, exterior: Vec<Region>) -> Result<DensityCoupling, CouplingError> {
        if f.d != f_n.d {
            return Err(CouplingError::Density(DensityError::InvalidParameter("densities differ in d".into())));
        }
        let mut ext_left = Vec::new();
        let mut ext_right = Vec::new();
        for e in &exterior {
            ext_left.push(HeightSampler::new(f, e.t_lo, e.t_hi)?);
            ext_right.push(HeightSampler::new(f_n, e.t_lo, e.t_hi)?);
        }
        if ext_left.iter().chain(&ext_right).any(|s| !s.mass().is_finite()) {
            return Err(CouplingError::InfiniteMass);
        }
        let mut out = DensityCoupling {
            f: f.clone(),
            f_n: f_n.clone(),
            region,
            exterior,
            common: None,
            left_residual: None,
            right_residual: None,
            ext_left,
            ext_right,
            l1: 0.0,
        };
        if f == f_n {
            let s = HeightSampler::new(f, region.t_lo, region.t_hi)?;
            if !s.mass().is_finite() {
                return Err(CouplingError::InfiniteMass);
            }
            out.common = Some(s);
            return Ok(out);
        }
        if f.is_homogeneous() || f_n.is_homogeneous() {
            return Err(CouplingError::Density(DensityError::InvalidParameter(
                "density coupling needs proper height densities".into(),
            )));
        }
        let Some((lo, hi)) = height_window(f, f_n, &region) else {
            return Ok(out);
        };
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(CouplingError::InfiniteMass);
        }
        let mut breaks = kinks(f);
        breaks.extend(kinks(f_n));
        let sing = singular_points(&[f, f_n]);
        let (a, b) = (f.clone(), f_n.clone());
        out.common = numeric_sampler(move |h| a.eval(h).min(b.eval(h)), lo, hi, &breaks, &sing)?;
        let (a, b) = (f.clone(), f_n.clone());
        out.left_residual = numeric_sampler(move |h| (a.eval(h) - b.eval(h)).max(0.0), lo, hi, &breaks, &sing)?;
        let (a, b) = (f.clone(), f_n.clone());
        out.right_residual = numeric_sampler(move |h| (b.eval(h) - a.eval(h)).max(0.0), lo, hi, &breaks, &sing)?;
        out.l1 = region.spatial.area() * l1_distance(f, f_n, lo, hi)?;
        Ok(out)
    }

    /// `area(K) · ∫ |f - f_n|` over the height range of `K`.
    pub fn l1_bound(&self) -> f64 {
        self.l1
    }

    /// Probability that the members differ on `K`.
    pub fn disagreement_probability(&self) -> f64 {
        -(-self.l1).exp_m1()
    }

    fn residual_count(&self, s: &Option<HeightSampler>, key: StreamKey) -> usize {
        match s {
            Some(s) => poisson_count(self.region.spatial.area() * s.mass(), &mut key.rng()),
            None => 0,
        }
    }

    /// Whether the coupled pair drawn with `key` differs on `K`; agrees with
    /// `sample(key).diagnostics.disagreed` without drawing the common part.
    pub fn disagrees(&self, key: StreamKey) -> bool {
        self.residual_count(&self.left_residual, key.child("left_residual", 0)) > 0
            || self.residual_count(&self.right_residual, key.child("right_residual", 0)) > 0
    }

    pub fn sample(&self, key: StreamKey) -> CoupledPair {
        let spatial = self.region.spatial;
        let mut common = Vec::new();
        if let Some(s) = &self.common {
            sample_into(s, &spatial, 0, &mut common, &mut key.child("common", 0).rng());
        }
        let shared_ids: Vec<usize> = common.iter().map(|p| p.id).collect();
        let m = common.len();
        let mut left = common.clone();
        let mut right = common;
        if let Some(s) = &self.left_residual {
            sample_into(s, &spatial, m, &mut left, &mut key.child("left_residual", 0).rng());
        }
        if let Some(s) = &self.right_residual {
            sample_into(s, &spatial, m, &mut right, &mut key.child("right_residual", 0).rng());
        }
        let disagreed = left.len() > m || right.len() > m;
        let identical = self.f == self.f_n;
        let mut shared_ids = shared_ids;
        for (j, e) in self.exterior.iter().enumerate() {
            let n = left.len();
            sample_into(&self.ext_left[j], &e.spatial, n, &mut left, &mut key.child("left_exterior", j as u64).rng());
            if identical {
                shared_ids.extend(n..left.len());
                right.extend_from_slice(&left[n..]);
                continue;
            }
            let n = right.len();
            sample_into(&self.ext_right[j], &e.spatial, n, &mut right, &mut key.child("right_exterior", j as u64).rng());
        }
        let mut left = PointConfiguration::new(left, self.region);
        left.provenance.density = Some(self.f.label());
        left.provenance.seed = Some(key.seed);
        let mut right = PointConfiguration::new(right, self.region);
        right.provenance.density = Some(self.f_n.label());
        right.provenance.seed = Some(key.seed);
        CoupledPair {
            left,
            right,
            shared_ids,
            diagnostics: CouplingDiagnostics { l1_bound: self.l1, disagreed, region: self.region },
        }
    }
}

/// One-shot form of [`DensityCoupling`].
pub fn couple_densities(
    f: &HeightDensity,
    f_n: &HeightDensity,
    region: Region,
    exterior: Vec<Region>,
    key: StreamKey,
) -> Result<CoupledPair, CouplingError> {
    Ok(DensityCoupling::new(f, f_n, region, exterior)?.sample(key))
}

/// Coupling of a homogeneous process `η^γ` (weights zero) with `η_{f_n}`.
///
/// On `B_{3r}` the spatial parts share a common process of intensity
/// `min(γ, λ_n)` with `λ_n = (I¹f_n)(9r²/4)`; the right member's points
/// there get independent heights from `f_n` restricted to `[0, 9r²/4]`.
/// Outside, both members are sampled independently on the annulus
/// `3r < |v| <= outer` (heights up to `outer²` on the right), together
/// with the right member's points on `B_{3r}` above `9r²/4`.
#[derive(Clone, Debug)]
pub struct VoronoiCoupling {
    pub gamma: f64,
    pub r: f64,
    pub lambda_n: f64,
    pub outer: f64,
    f_n: HeightDensity,
    marks: HeightSampler,
    high: HeightSampler,
    annulus: HeightSampler,
}

/// Default outer radius of the truncated exterior, in units of `3r`.
pub const EXTERIOR_FACTOR: f64 = 4.0 / 3.0;

impl VoronoiCoupling {
    pub fn new(gamma: f64, f_n: &HeightDensity, r: f64) -> Result<VoronoiCoupling, CouplingError> {
        VoronoiCoupling::with_outer(gamma, f_n, r, EXTERIOR_FACTOR * 3.0 * r)
    }

    pub fn with_outer(gamma: f64, f_n: &HeightDensity, r: f64, outer: f64) -> Result<VoronoiCoupling, CouplingError> {
        if !(gamma > 0.0 && gamma.is_finite()) || !(r > 0.0 && r.is_finite()) || !(outer >= 3.0 * r) {
            return Err(CouplingError::Density(DensityError::InvalidParameter(format!(
                "need gamma > 0, r > 0 and outer >= 3r (gamma={gamma}, r={r}, outer={outer})"
            ))));
        }
        if f_n.support().0 < 0.0 {
            return Err(CouplingError::Density(DensityError::InvalidParameter(
                "heights must live on [0, inf)".into(),
            )));
        }
        let cap = 2.25 * r * r;
        let lambda_n = f_n.cdf(cap)?;
        if !(lambda_n > 0.0) {
            return Err(CouplingError::ZeroMass);
        }
        if !lambda_n.is_finite() {
            return Err(CouplingError::InfiniteMass);
        }
        let marks = HeightSampler::new(f_n, 0.0, cap)?;
        let high = HeightSampler::new(f_n, cap, outer * outer)?;
        let annulus = HeightSampler::new(f_n, 0.0, outer * outer)?;
        Ok(VoronoiCoupling { gamma, r, lambda_n, outer, f_n: f_n.clone(), marks, high, annulus })
    }

    pub fn window(&self) -> Shape {
        Shape::disk(Point::ORIGIN, 3.0 * self.r)
    }

    /// `|γ - λ_n| · area(B_{3r})`, the mean number of unshared points.
    pub fn l1_bound(&self) -> f64 {
        (self.gamma - self.lambda_n).abs() * self.window().area()
    }

    fn residual_count(&self, key: StreamKey) -> usize {
        poisson_count(self.l1_bound(), &mut key.child("spatial_residual", 0).rng())
    }

    pub fn disagrees(&self, key: StreamKey) -> bool {
        self.residual_count(key) > 0
    }

    pub fn sample(&self, key: StreamKey) -> CoupledPair {
        let disk = self.window();
        let common_rate = self.gamma.min(self.lambda_n);
        let mut rng = key.child("common", 0).rng();
        let n_common = poisson_count(common_rate * disk.area(), &mut rng);
        let spots: Vec<Point> = (0..n_common).map(|_| uniform_in(&disk, &mut rng)).collect();
        let n_res = self.residual_count(key);
        let mut rng = key.child("spatial_residual", 1).rng();
        let extra: Vec<Point> = (0..n_res).map(|_| uniform_in(&disk, &mut rng)).collect();

        let mut left: Vec<WeightedPoint> = spots.iter().enumerate().map(|(i, &v)| WeightedPoint::new(i, v, 0.0)).collect();
        let mut mark_rng = key.child("marks", 0).rng();
        let mut right: Vec<WeightedPoint> = spots
            .iter()
            .enumerate()
            .map(|(i, &v)| WeightedPoint::new(i, v, self.marks.quantile(rand::Rng::random(&mut mark_rng))))
            .collect();
        let target = if self.gamma > self.lambda_n { &mut left } else { &mut right };
        for v in extra {
            let id = target.len();
            let h = if self.gamma > self.lambda_n { 0.0 } else { self.marks.quantile(rand::Rng::random(&mut mark_rng)) };
            target.push(WeightedPoint::new(id, v, h));
        }
        let shared_ids: Vec<usize> = (0..n_common).collect();

        let ring = Shape::Annulus { center: Point::ORIGIN, inner: 3.0 * self.r, outer: self.outer };
        let mut rng = key.child("left_exterior", 0).rng();
        let n = poisson_count(self.gamma * ring.area(), &mut rng);
        for _ in 0..n {
            let id = left.len();
            left.push(WeightedPoint::new(id, uniform_in(&ring, &mut rng), 0.0));
        }
        let n0 = right.len();
        sample_into(&self.high, &disk, n0, &mut right, &mut key.child("right_exterior", 0).rng());
        let n0 = right.len();
        sample_into(&self.annulus, &ring, n0, &mut right, &mut key.child("right_exterior", 1).rng());

        let outer = Shape::disk(Point::ORIGIN, self.outer);
        let region = Region::new(disk, 0.0, 2.25 * self.r * self.r);
        let mut lc = PointConfiguration::new(left, Region::new(outer, 0.0, 0.0));
        lc.provenance.density = Some(format!("homogeneous({})", self.gamma));
        lc.provenance.seed = Some(key.seed);
        let mut rc = PointConfiguration::new(right, Region::new(outer, 0.0, self.outer * self.outer));
        rc.provenance.density = Some(self.f_n.label());
        rc.provenance.seed = Some(key.seed);
        CoupledPair {
            left: lc,
            right: rc,
            shared_ids,
            diagnostics: CouplingDiagnostics { l1_bound: self.l1_bound(), disagreed: n_res > 0, region },
        }
    }
}

pub fn couple_voronoi_limit(gamma: f64, f_n: &HeightDensity, r: f64, key: StreamKey) -> Result<CoupledPair, CouplingError> {
    Ok(VoronoiCoupling::new(gamma, f_n, r)?.sample(key))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScheduleMode {
    C1,
    C2,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleBlock {
    pub k: u32,
    /// First index `N_k` of the block.
    pub start: u64,
    pub r: f64,
    pub defect: f64,
    pub target: f64,
}

/// Block `k` could not reach its defect target for any grid index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleStall {
    pub k: u32,
    pub best_defect: f64,
    pub target: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RnSchedule {
    pub mode: ScheduleMode,
    pub n_grid: Vec<u64>,
    pub blocks: Vec<ScheduleBlock>,
    pub stall: Option<ScheduleStall>,
}

impl ScheduleMode {
    pub fn radius(self, k: u32) -> f64 {
        match self {
            ScheduleMode::C1 => (k as f64).sqrt() / 2.0,
            ScheduleMode::C2 => 2.0 * k as f64 / 3.0,
        }
    }

    pub fn target(self, k: u32, d: u32) -> f64 {
        let k = k as f64;
        match self {
            ScheduleMode::C1 => 2f64.powf(-k) * k.powf(-(d as f64) / 2.0),
            ScheduleMode::C2 => 2f64.powf(-k) * k.powf(-(d as f64)),
        }
    }
}

impl RnSchedule {
    /// `r_n`; indices before the first block use the `k = 1` radius.
    pub fn r(&self, n: u64) -> f64 {
        self.blocks.iter().rev().find(|b| b.start <= n).map_or(self.mode.radius(1), |b| b.r)
    }
}

/// Index grid: every `n <= 16`, then geometric steps of ratio 1.2.
pub fn schedule_grid(n_max: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=n_max.min(16)).collect();
    let mut x = 16.0f64;
    loop {
        x *= 1.2;
        let n = x.ceil() as u64;
        if n >= n_max {
            break;
        }
        out.push(n);
    }
    if n_max > 16 {
        out.push(n_max);
    }
    out
}

fn defect(family: &ConvergenceFamily, mode: ScheduleMode, n: u64, k: u32) -> Result<f64, CouplingError> {
    // indices below the family's admissible range never start a block
    let Ok(f_n) = family.member(n) else {
        return Ok(f64::INFINITY);
    };
    match mode {
        ScheduleMode::C1 => Ok(l1_distance(&f_n, &family.limit(), f64::NEG_INFINITY, k as f64)?),
        ScheduleMode::C2 => {
            let gamma = family.limit_gamma().ok_or_else(|| {
                CouplingError::Density(DensityError::InvalidParameter("C2 schedules need a homogeneous limit".into()))
            })?;
            let x = (k as f64).powi(2);
            Ok((gamma - f_n.cdf(x)?).abs())
        }
    }
}

/// Blocks `N_1 <= N_2 <= …` where `N_k` is the first grid index at or after
/// `N_{k-1}` whose defect meets the block target; stops at `k_max` or at the
/// first stall.
pub fn rn_schedule(family: &ConvergenceFamily, mode: ScheduleMode, n_max: u64, k_max: u32) -> Result<RnSchedule, CouplingError> {
    if mode == ScheduleMode::C1 && family.limit().is_homogeneous() {
        return Err(CouplingError::Density(DensityError::InvalidParameter(
            "C1 schedules need a proper limit density".into(),
        )));
    }
    let grid = schedule_grid(n_max);
    let mut blocks = Vec::new();
    let mut stall = None;
    let mut from = 0usize;
    'outer: for k in 1..=k_max {
        let target = mode.target(k, family.d);
        let mut best = f64::INFINITY;
        for (i, &n) in grid.iter().enumerate().skip(from) {
            let dv = defect(family, mode, n, k)?;
            best = best.min(dv);
            if dv <= target {
                blocks.push(ScheduleBlock { k, start: n, r: mode.radius(k), defect: dv, target });
                from = i;
                continue 'outer;
            }
        }
        stall = Some(ScheduleStall { k, best_defect: best, target });
        break;
    }
    Ok(RnSchedule { mode, n_grid: grid, blocks, stall })
}

/// `π (3r)^2`: area of the spatial coupling disk for radius `r`.
pub fn coupling_disk_area(r: f64) -> f64 {
    PI * 9.0 * r * r
}
