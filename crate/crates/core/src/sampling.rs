//! Poisson point process samplers on bounded space-height regions.

use crate::densities::{DensityError, HeightDensity, HeightSampler, MarkLaw};
use crate::geometry::{Point, Rect, Shape, WeightedPoint};
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error("intensity measure of the region is infinite")]
    InfiniteMass,
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error("csv error: {0}")]
    Csv(String),
}

/// A spatial shape times a height interval `[t_lo, t_hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub spatial: Shape,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl Region {
    pub fn new(spatial: Shape, t_lo: f64, t_hi: f64) -> Region {
        Region { spatial, t_lo, t_hi }
    }

    pub fn contains(&self, p: &WeightedPoint) -> bool {
        self.spatial.contains(p.v) && p.h >= self.t_lo && p.h <= self.t_hi
    }

    /// `Λ_f` of the region.
    pub fn mass(&self, f: &HeightDensity) -> Result<f64, SamplingError> {
        let s = HeightSampler::new(f, self.t_lo, self.t_hi).map_err(mass_err)?;
        Ok(self.spatial.area() * s.mass())
    }
}

fn mass_err(e: DensityError) -> SamplingError {
    match e {
        DensityError::DivergentIntegral => SamplingError::InfiniteMass,
        other => SamplingError::Density(other),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: Option<u64>,
    pub density: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointConfiguration {
    pub points: Vec<WeightedPoint>,
    pub region: Region,
    #[serde(default)]
    pub provenance: Provenance,
}

impl PointConfiguration {
    pub fn new(points: Vec<WeightedPoint>, region: Region) -> PointConfiguration {
        PointConfiguration { points, region, provenance: Provenance::default() }
    }

    /// Wraps bare points, using their bounding box as the region.
    pub fn from_points(points: Vec<WeightedPoint>) -> PointConfiguration {
        let mut r = Rect::new(f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in &points {
            r.min.x = r.min.x.min(p.v.x);
            r.min.y = r.min.y.min(p.v.y);
            r.max.x = r.max.x.max(p.v.x);
            r.max.y = r.max.y.max(p.v.y);
            lo = lo.min(p.h);
            hi = hi.max(p.h);
        }
        if points.is_empty() {
            r = Rect::new(0.0, 0.0, 0.0, 0.0);
            lo = 0.0;
            hi = 0.0;
        }
        PointConfiguration::new(points, Region::new(Shape::rect(r), lo, hi))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points inside `region`, keeping their ids.
    pub fn restrict(&self, region: &Region) -> PointConfiguration {
        PointConfiguration {
            points: self.points.iter().filter(|p| region.contains(p)).copied().collect(),
            region: *region,
            provenance: self.provenance.clone(),
        }
    }

    /// Writes the `id,x,y,h` CSV form. Floats use the shortest
    /// representation that parses back to the same value.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), SamplingError> {
        write_points_csv(&self.points, w)
    }

    pub fn read_csv<R: Read>(r: R) -> Result<PointConfiguration, SamplingError> {
        Ok(PointConfiguration::from_points(read_points_csv(r)?))
    }
}

pub fn write_points_csv<W: Write>(points: &[WeightedPoint], w: W) -> Result<(), SamplingError> {
    let mut out = csv::Writer::from_writer(w);
    let e = |e: csv::Error| SamplingError::Csv(e.to_string());
    out.write_record(["id", "x", "y", "h"]).map_err(e)?;
    for p in points {
        out.write_record([p.id.to_string(), p.v.x.to_string(), p.v.y.to_string(), p.h.to_string()]).map_err(e)?;
    }
    out.flush().map_err(|x| SamplingError::Csv(x.to_string()))
}

pub fn read_points_csv<R: Read>(r: R) -> Result<Vec<WeightedPoint>, SamplingError> {
    #[derive(Deserialize)]
    struct Row {
        id: usize,
        x: f64,
        y: f64,
        h: f64,
    }
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let headers = rdr.headers().map_err(|e| SamplingError::Csv(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["id", "x", "y", "h"] {
        return Err(SamplingError::Csv("expected header `id,x,y,h`".into()));
    }
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for row in rdr.deserialize::<Row>() {
        let row = row.map_err(|e| SamplingError::Csv(e.to_string()))?;
        if !(row.x.is_finite() && row.y.is_finite() && row.h.is_finite()) {
            return Err(SamplingError::Csv(format!("non-finite coordinate for id {}", row.id)));
        }
        if !seen.insert(row.id) {
            return Err(SamplingError::Csv(format!("duplicate id {}", row.id)));
        }
        out.push(WeightedPoint::new(row.id, Point::new(row.x, row.y), row.h));
    }
    Ok(out)
}

/// Uniform point in a shape of positive area.
pub fn uniform_in<R: Rng + ?Sized>(shape: &Shape, rng: &mut R) -> Point {
    match *shape {
        Shape::Disk { center, radius } => {
            let r = radius * rng.random::<f64>().sqrt();
            let th = 2.0 * PI * rng.random::<f64>();
            center + Point::new(r * th.cos(), r * th.sin())
        }
        Shape::Rect { rect } => {
            let x = rect.min.x + rect.width() * rng.random::<f64>();
            let y = rect.min.y + rect.height() * rng.random::<f64>();
            Point::new(x, y)
        }
        Shape::Annulus { center, inner, outer } => {
            let r2 = inner * inner + (outer * outer - inner * inner) * rng.random::<f64>();
            let th = 2.0 * PI * rng.random::<f64>();
            let r = r2.sqrt();
            center + Point::new(r * th.cos(), r * th.sin())
        }
        Shape::Point { at } => at,
    }
}

pub fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if !(mean > 0.0) {
        return 0;
    }
    Poisson::new(mean).map(|d| d.sample(rng) as usize).unwrap_or(0)
}

/// Homogeneous process of intensity `gamma` on `spatial`, all weights zero.
pub fn sample_homogeneous<R: Rng + ?Sized>(gamma: f64, spatial: &Shape, rng: &mut R) -> PointConfiguration {
    let n = poisson_count(gamma * spatial.area(), rng);
    let points = (0..n).map(|id| WeightedPoint::new(id, uniform_in(spatial, rng), 0.0)).collect();
    let mut c = PointConfiguration::new(points, Region::new(*spatial, 0.0, 0.0));
    c.provenance.density = Some(format!("homogeneous({gamma})"));
    c
}

/// Appends a Poisson sample of `sampler` on `spatial` to `out`, numbering
/// ids from `next_id`.
pub(crate) fn sample_into<R: Rng + ?Sized>(
    sampler: &HeightSampler,
    spatial: &Shape,
    next_id: usize,
    out: &mut Vec<WeightedPoint>,
    rng: &mut R,
) -> usize {
    let n = poisson_count(spatial.area() * sampler.mass(), rng);
    for k in 0..n {
        let v = uniform_in(spatial, rng);
        let h = sampler.quantile(rng.random::<f64>());
        out.push(WeightedPoint::new(next_id + k, v, h));
    }
    n
}

/// Poisson process with intensity `dv f(h) dh` on `region`.
pub fn sample_density<R: Rng + ?Sized>(
    f: &HeightDensity,
    region: &Region,
    rng: &mut R,
) -> Result<PointConfiguration, SamplingError> {
    let sampler = HeightSampler::new(f, region.t_lo, region.t_hi).map_err(mass_err)?;
    if !sampler.mass().is_finite() {
        return Err(SamplingError::InfiniteMass);
    }
    let mut points = Vec::new();
    sample_into(&sampler, &region.spatial, 0, &mut points, rng);
    let mut c = PointConfiguration::new(points, *region);
    c.provenance.density = Some(f.label());
    Ok(c)
}

/// Independent marking of a weight-zero configuration with marks drawn
/// from `q(n h) n`.
pub fn sample_marking<R: Rng + ?Sized>(
    base: &PointConfiguration,
    q: &MarkLaw,
    n: f64,
    rng: &mut R,
) -> Result<PointConfiguration, SamplingError> {
    if base.points.iter().any(|p| p.h != 0.0) {
        return Err(SamplingError::Density(DensityError::InvalidParameter("base weights must all be zero".into())));
    }
    let points: Vec<WeightedPoint> =
        base.points.iter().map(|p| WeightedPoint::new(p.id, p.v, q.quantile(rng.random::<f64>()) / n)).collect();
    let hi = points.iter().map(|p| p.h).fold(base.region.t_hi, f64::max);
    let mut c = PointConfiguration::new(points, Region::new(base.region.spatial, 0.0, hi));
    c.provenance = base.provenance.clone();
    Ok(c)
}
