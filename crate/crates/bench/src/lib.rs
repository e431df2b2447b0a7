//! Inputs shared by the criterion benches.

use poisson_laguerre::rng::StreamKey;
use poisson_laguerre::sampling::sample_density;
use poisson_laguerre::{HeightDensity, Rect, Region, Shape, WeightedPoint};

/// Side of a square window holding about `n` points of Beta(0.5) with
/// heights in `[0, 1]`.
pub fn side_for(n: usize) -> f64 {
    // mass per unit area of Beta(0.5) on [0, 1] is 10 / (4π^2)
    (n as f64 * 0.4 * std::f64::consts::PI.powi(2)).sqrt()
}

/// A seeded Beta(0.5) configuration of roughly `n` points.
pub fn beta_config(n: usize, seed: u64) -> (Vec<WeightedPoint>, Rect) {
    let f = HeightDensity::beta(2, 0.5).expect("valid beta");
    let s = side_for(n);
    let w = Rect::new(0.0, 0.0, s, s);
    let c = sample_density(&f, &Region::new(Shape::rect(w), 0.0, 1.0), &mut StreamKey::new(seed).child("bench", n as u64).rng())
        .expect("finite mass");
    (c.points, w)
}
