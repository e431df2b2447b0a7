//! The radial probability density
//! `g_{n,s}(x) = s^d f(s^2 - s^2|x|^2) / (π^{d/2} (I^{d/2} f)(s^2))` on the
//! unit ball.

use super::fractional::{riemann_liouville, Profile};
use super::{DensityError, HeightDensity};
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

fn check(f: &HeightDensity, s: f64) -> Result<f64, DensityError> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(DensityError::InvalidParameter(format!("s must be > 0, got {s}")));
    }
    if f.support().0 < 0.0 {
        return Err(DensityError::InvalidParameter("density must live on [0, inf)".into()));
    }
    let mass = f.frac_integral(f.d as f64 / 2.0, s * s)?;
    if !(mass > 0.0) {
        return Err(DensityError::ZeroMass);
    }
    Ok(mass)
}

/// `g_{n,s}(x)` for `x` in the closed unit ball of `R^d` (zero outside).
pub fn gns_density(f: &HeightDensity, s: f64, x: &[f64]) -> Result<f64, DensityError> {
    if x.len() != f.d as usize {
        return Err(DensityError::InvalidParameter("point dimension differs from d".into()));
    }
    if f.is_homogeneous() {
        return Err(DensityError::InvalidParameter("the limit law has no density on the ball".into()));
    }
    let mass = check(f, s)?;
    let r2: f64 = x.iter().map(|c| c * c).sum();
    if r2 > 1.0 {
        return Ok(0.0);
    }
    let d = f.d as f64;
    Ok(s.powf(d) / (PI.powf(d / 2.0) * mass) * f.eval(s * s * (1.0 - r2)))
}

/// `∫_0^t f(τ) (s^2 - τ)^{d/2-1} dτ / Γ(d/2)`, the unnormalised law of
/// `T = s^2 (1 - |Y|^2)`.
fn height_mass(f: &HeightDensity, s: f64, t: f64) -> Result<f64, DensityError> {
    let s2 = s * s;
    let alpha = f.d as f64 / 2.0;
    if f.d == 2 {
        return f.cdf(t.min(s2));
    }
    if t >= s2 {
        return f.frac_integral(alpha, s2);
    }
    if f.is_homogeneous() {
        return f.frac_integral(alpha, s2);
    }
    let lo = f.effective_range().0;
    let prof = Profile {
        g: |x: f64| f.eval(x),
        g_offset: |d: f64| f.eval_offset(d),
        lo,
        lower_exp: f.lower_singularity(),
        tail: None,
    };
    riemann_liouville(&prof, t, s2, alpha)
}

/// `P(|Y| <= r)` for `Y ~ g_{n,s}`.
pub fn gns_radial_cdf(f: &HeightDensity, s: f64, r: f64) -> Result<f64, DensityError> {
    let total = check(f, s)?;
    if r >= 1.0 {
        return Ok(1.0);
    }
    if r <= 0.0 {
        return Ok(0.0);
    }
    if f.is_homogeneous() {
        return Ok(0.0);
    }
    let s2 = s * s;
    let below = height_mass(f, s, s2 * (1.0 - r * r))?;
    Ok((1.0 - below / total).clamp(0.0, 1.0))
}

/// Draws one point with density `g_{n,s}`.
pub fn gns_sample<R: Rng + ?Sized>(f: &HeightDensity, s: f64, rng: &mut R) -> Result<Vec<f64>, DensityError> {
    let total = check(f, s)?;
    let d = f.d as usize;
    let s2 = s * s;
    let u: f64 = rng.random();
    let radius = if f.is_homogeneous() {
        1.0
    } else if f.d == 2 {
        let t = f.cdf_inverse(u * total)?.clamp(0.0, s2);
        (1.0 - t / s2).max(0.0).sqrt()
    } else {
        // bisection on the radial cdf in r
        let target = 1.0 - u;
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while hi - lo > 1e-10 {
            let m = 0.5 * (lo + hi);
            if 1.0 - height_mass(f, s, s2 * (1.0 - m * m))? / total < target {
                lo = m;
            } else {
                hi = m;
            }
        }
        0.5 * (lo + hi)
    };
    let mut dir: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let norm = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
    for c in dir.iter_mut() {
        *c *= radius / norm;
    }
    Ok(dir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use approx::assert_relative_eq;
    use rand::SeedableRng;

    #[test]
    fn normalises_for_beta() {
        let f = HeightDensity::beta(2, 0.5).unwrap();
        // polar integration of the radial profile
        let q = integrate(|r| 2.0 * PI * r * gns_density(&f, 1.0, &[r, 0.0]).unwrap(), 0.0, 1.0, 1e-12, 0.0).unwrap();
        assert_relative_eq!(q.value, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn beta_zero_second_moment() {
        // |Y|^2 ~ Beta(1, β+1) for d = 2, so E|Y|^2 = 1/2 when β = 0
        let f = HeightDensity::beta(2, 0.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let n = 40_000;
        let m: f64 = (0..n).map(|_| gns_sample(&f, 1.3, &mut rng).unwrap().iter().map(|c| c * c).sum::<f64>()).sum::<f64>() / n as f64;
        assert!((m - 0.5).abs() < 0.01, "{m}");
    }

    #[test]
    fn zero_mass_is_reported() {
        let t = super::super::Tabulated::new(0.0, f64::INFINITY, vec![5.0, 6.0], vec![1.0, 1.0]).unwrap();
        let f = HeightDensity::custom(2, t).unwrap();
        assert_eq!(gns_density(&f, 1.0, &[0.0, 0.0]), Err(DensityError::ZeroMass));
    }
}
