//! Gamma-function helpers and dimension constants.

use statrs::function::gamma::{gamma as stat_gamma, ln_gamma as stat_ln_gamma};
use std::f64::consts::PI;

pub fn gamma(x: f64) -> f64 {
    stat_gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    stat_ln_gamma(x)
}

/// `Γ(a) / Γ(b)` through log-gamma, safe for large arguments (a, b > 0).
pub fn gamma_ratio(a: f64, b: f64) -> f64 {
    if a < 100.0 && b < 100.0 {
        stat_gamma(a) / stat_gamma(b)
    } else {
        (stat_ln_gamma(a) - stat_ln_gamma(b)).exp()
    }
}

/// Volume of the unit ball in `R^d`.
pub fn kappa(d: u32) -> f64 {
    let h = d as f64 / 2.0;
    PI.powf(h) / stat_gamma(h + 1.0)
}

/// Cell intensity of the stationary Voronoi limit of the beta model:
/// `γ_d = π^{-d/2-1} Γ(d/2 + 1)`.
pub fn gamma_d(d: u32) -> f64 {
    let h = d as f64 / 2.0;
    stat_gamma(h + 1.0) / PI.powf(h + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constants() {
        assert_relative_eq!(kappa(2), PI, max_relative = 1e-15);
        assert_relative_eq!(kappa(3), 4.0 * PI / 3.0, max_relative = 1e-14);
        assert_relative_eq!(gamma_d(2), 0.101_321_183_642_337_77, max_relative = 1e-14);
        assert_relative_eq!(gamma_ratio(150.0, 149.0), 149.0, max_relative = 1e-11);
    }
}
