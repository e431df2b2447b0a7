//! Sequences `n ↦ f_n` of height densities together with their limits.

use super::{DensityError, HeightDensity, MarkLaw};
use crate::special::{gamma, gamma_d};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Tail parameters `(x_0, δ, M)` of the uniform moment condition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct C1Params {
    pub x0: f64,
    pub delta: f64,
    /// Known uniform bound on the tail moments, when one is available.
    pub bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyKind {
    /// `f_n = f_β` with `β_n = -1 + 1/n`, converging to Poisson-Voronoi at
    /// intensity `γ_d`.
    BetaToPv,
    /// Rescaled beta densities with `β_n = n`, converging to the Gaussian.
    RescaledBeta,
    /// Rescaled beta-prime densities with `β_n = n`, converging to the
    /// Gaussian. Defined for `n > d/2 + 1`.
    RescaledBetaPrime,
    /// `f_n(h) = γ n q(n h)`, converging to Poisson-Voronoi at intensity `γ`.
    Marked { gamma: f64, q: MarkLaw },
    /// `f_n = f` for every `n`.
    Constant { f: HeightDensity },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceFamily {
    pub kind: FamilyKind,
    pub d: u32,
}

impl ConvergenceFamily {
    pub fn new(kind: FamilyKind, d: u32) -> Result<ConvergenceFamily, DensityError> {
        if let FamilyKind::Constant { f } = &kind {
            if f.d != d {
                return Err(DensityError::InvalidParameter("family members must share d".into()));
            }
        }
        if let FamilyKind::Marked { gamma, q } = &kind {
            HeightDensity::marked(d, *gamma, q.clone(), 1.0)?;
        }
        Ok(ConvergenceFamily { kind, d })
    }

    pub fn beta_to_pv(d: u32) -> ConvergenceFamily {
        ConvergenceFamily { kind: FamilyKind::BetaToPv, d }
    }

    pub fn rescaled_beta(d: u32) -> ConvergenceFamily {
        ConvergenceFamily { kind: FamilyKind::RescaledBeta, d }
    }

    pub fn rescaled_beta_prime(d: u32) -> ConvergenceFamily {
        ConvergenceFamily { kind: FamilyKind::RescaledBetaPrime, d }
    }

    pub fn marked(d: u32, gamma: f64, q: MarkLaw) -> Result<ConvergenceFamily, DensityError> {
        ConvergenceFamily::new(FamilyKind::Marked { gamma, q }, d)
    }

    pub fn constant(f: HeightDensity) -> ConvergenceFamily {
        let d = f.d;
        ConvergenceFamily { kind: FamilyKind::Constant { f }, d }
    }

    /// The family's natural shape parameter at index `n` (β for the beta
    /// families, the mark scale for marked families).
    pub fn parameter(&self, n: u64) -> f64 {
        let n = n as f64;
        match self.kind {
            FamilyKind::BetaToPv => -1.0 + 1.0 / n,
            _ => n,
        }
    }

    /// Index `n` at which [`ConvergenceFamily::parameter`] equals `beta` for
    /// the beta-to-Voronoi family.
    pub fn index_for_beta(beta: f64) -> u64 {
        (1.0 / (beta + 1.0)).round() as u64
    }

    pub fn member(&self, n: u64) -> Result<HeightDensity, DensityError> {
        if n == 0 {
            return Err(DensityError::InvalidParameter("family index starts at 1".into()));
        }
        let p = self.parameter(n);
        match &self.kind {
            FamilyKind::BetaToPv => HeightDensity::beta(self.d, p),
            FamilyKind::RescaledBeta => HeightDensity::shifted_beta(self.d, p),
            FamilyKind::RescaledBetaPrime => HeightDensity::shifted_beta_prime(self.d, p),
            FamilyKind::Marked { gamma, q } => HeightDensity::marked(self.d, *gamma, q.clone(), p),
            FamilyKind::Constant { f } => Ok(f.clone()),
        }
    }

    pub fn limit(&self) -> HeightDensity {
        match &self.kind {
            FamilyKind::BetaToPv => HeightDensity { kind: super::DensityKind::Homogeneous { gamma: gamma_d(self.d) }, d: self.d },
            FamilyKind::RescaledBeta | FamilyKind::RescaledBetaPrime => HeightDensity::gaussian(self.d),
            FamilyKind::Marked { gamma, .. } => HeightDensity { kind: super::DensityKind::Homogeneous { gamma: *gamma }, d: self.d },
            FamilyKind::Constant { f } => f.clone(),
        }
    }

    /// Intensity `γ` of a Poisson-Voronoi limit.
    pub fn limit_gamma(&self) -> Option<f64> {
        self.limit().homogeneous_gamma()
    }

    pub fn c1_params(&self) -> Option<C1Params> {
        let hd = self.d as f64 / 2.0;
        match &self.kind {
            FamilyKind::RescaledBeta => Some(C1Params {
                x0: 0.0,
                delta: 1.0,
                bound: Some(((hd + 2.0) / PI).powf(hd + 1.0) * gamma(hd)),
            }),
            FamilyKind::RescaledBetaPrime => Some(C1Params { x0: 0.0, delta: 1.0, bound: None }),
            FamilyKind::Constant { f } if !f.is_homogeneous() => Some(C1Params { x0: 0.0, delta: 1.0, bound: None }),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            FamilyKind::BetaToPv => "beta_to_pv".into(),
            FamilyKind::RescaledBeta => "rescaled_beta".into(),
            FamilyKind::RescaledBetaPrime => "rescaled_beta_prime".into(),
            FamilyKind::Marked { .. } => "marked".into(),
            FamilyKind::Constant { f } => format!("constant[{}]", f.label()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_indices() {
        let fam = ConvergenceFamily::beta_to_pv(2);
        for (b, n) in [(-0.5, 2), (-0.9, 10), (-0.99, 100)] {
            assert_eq!(ConvergenceFamily::index_for_beta(b), n);
            assert!((fam.parameter(n) - b).abs() < 1e-15);
        }
        assert!(ConvergenceFamily::rescaled_beta_prime(2).member(2).is_err());
        assert!(ConvergenceFamily::rescaled_beta_prime(2).member(3).is_ok());
    }
}
