//! Height densities `f : E → [0, ∞)`, their fractional integrals, inverse
//! CDFs, and numeric diagnostics for admissibility and convergence.

mod cdf;
mod conditions;
mod custom;
mod family;
mod fractional;
mod gns;

use crate::quadrature::QuadError;
use crate::special::gamma_ratio;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

pub use cdf::{HeightSampler, NumericCdf};
pub use conditions::{
    check_c1, check_c2, is_admissible, l1_distance, tail_diagnostic, tail_moment, Admissibility, C1Report,
    C2Report, NotAdmissible, TailReport, TailRow, GROWTH_SLOPE_MIN,
};
pub(crate) use conditions::kinks;
pub use custom::Tabulated;
pub use family::{C1Params, ConvergenceFamily, FamilyKind};
pub use fractional::semigroup_check;
pub use gns::{gns_density, gns_radial_cdf, gns_sample};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("invalid density parameter: {0}")]
    InvalidParameter(String),
    #[error("fractional integral diverges")]
    DivergentIntegral,
    #[error("zero mass")]
    ZeroMass,
    #[error("quadrature failure: {0}")]
    Quadrature(#[from] QuadError),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

/// Law `q` of the unscaled marks in the marked family `f_n(h) = γ n q(n h)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum MarkLaw {
    /// Uniform on `[0, width]`.
    Uniform { width: f64 },
    /// Exponential with the given rate.
    Exponential { rate: f64 },
    /// Tabulated probability density on `[0, ∞)`.
    Table { table: Tabulated },
}

impl MarkLaw {
    fn validate(&self) -> Result<(), DensityError> {
        let bad = |m: &str| Err(DensityError::InvalidParameter(m.to_string()));
        match self {
            MarkLaw::Uniform { width } if !(*width > 0.0 && width.is_finite()) => bad("uniform width must be > 0"),
            MarkLaw::Exponential { rate } if !(*rate > 0.0 && rate.is_finite()) => bad("exponential rate must be > 0"),
            MarkLaw::Table { table } => {
                if table.range().0 < 0.0 {
                    return bad("mark table must live on [0, inf)");
                }
                if (table.total() - 1.0).abs() > 1e-6 {
                    return bad("mark table must integrate to 1");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn pdf(&self, u: f64) -> f64 {
        match self {
            MarkLaw::Uniform { width } => {
                if u > 0.0 && u <= *width {
                    1.0 / width
                } else {
                    0.0
                }
            }
            MarkLaw::Exponential { rate } => {
                if u > 0.0 {
                    rate * (-rate * u).exp()
                } else {
                    0.0
                }
            }
            MarkLaw::Table { table } => table.eval(u),
        }
    }

    pub fn cdf(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        match self {
            MarkLaw::Uniform { width } => (u / width).min(1.0),
            MarkLaw::Exponential { rate } => -(-rate * u).exp_m1(),
            MarkLaw::Table { table } => table.cdf(u),
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        match self {
            MarkLaw::Uniform { width } => p * width,
            MarkLaw::Exponential { rate } => -(-p).ln_1p() / rate,
            MarkLaw::Table { table } => table.cdf_inverse(p),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            MarkLaw::Uniform { width } => 0.5 * width,
            MarkLaw::Exponential { rate } => 1.0 / rate,
            MarkLaw::Table { table } => {
                let nodes = table.nodes();
                nodes
                    .windows(2)
                    .map(|w| crate::quadrature::gauss7(|x| x * table.eval(x), w[0], w[1]))
                    .sum()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensityKind {
    /// `c_{d+1,β} h^β` on `[0, ∞)`.
    Beta { beta: f64 },
    /// `c'_{d+1,β} (-h)^{-β}` on `(-∞, 0)`.
    BetaPrime { beta: f64 },
    /// `(2π)^{-d/2-1} e^{h/2}` on `R`.
    Gaussian,
    /// `c_{d+1,β}(2β)^{-d/2-1}(1 + h/(2β))^β` on `[-2β, ∞)`.
    ShiftedBeta { beta: f64 },
    /// `c'_{d+1,β}(2β)^{-d/2-1}(1 - h/(2β))^{-β}` on `(-∞, 2β)`.
    ShiftedBetaPrime { beta: f64 },
    /// `γ n q(n h)` on `[0, ∞)`.
    Marked { gamma: f64, q: MarkLaw, n: f64 },
    /// Homogeneous limit: all mass `γ` (per unit area) at height 0.
    Homogeneous { gamma: f64 },
    /// Tabulated density with explicit support.
    Custom { table: Tabulated },
    /// `λ^{d/2+1} f(λ h + c)`, the transformed density of the linear
    /// transformation identity.
    Affine { base: Box<DensityKind>, lambda: f64, shift: f64 },
}

/// A height density together with the ambient spatial dimension `d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightDensity {
    pub kind: DensityKind,
    pub d: u32,
}

/// `c_{d+1,β} = Γ(d/2+β+2) / (π^{d/2+1} Γ(β+1))`.
pub fn c_beta(d: u32, beta: f64) -> f64 {
    let h = d as f64 / 2.0;
    gamma_ratio(h + beta + 2.0, beta + 1.0) / PI.powf(h + 1.0)
}

/// `c'_{d+1,β} = Γ(β) / (π^{d/2+1} Γ(β-d/2-1))`.
pub fn c_beta_prime(d: u32, beta: f64) -> f64 {
    let h = d as f64 / 2.0;
    gamma_ratio(beta, beta - h - 1.0) / PI.powf(h + 1.0)
}

fn gaussian_const(d: u32) -> f64 {
    (2.0 * PI).powf(-(d as f64) / 2.0 - 1.0)
}

impl DensityKind {
    fn validate(&self, d: u32) -> Result<(), DensityError> {
        let bad = |m: String| Err(DensityError::InvalidParameter(m));
        let h = d as f64 / 2.0;
        match self {
            DensityKind::Beta { beta } if !(*beta > -1.0 && beta.is_finite()) => bad(format!("beta requires β > -1, got {beta}")),
            DensityKind::BetaPrime { beta } if !(*beta > h + 1.0 && beta.is_finite()) => {
                bad(format!("beta-prime requires β > d/2+1 = {}, got {beta}", h + 1.0))
            }
            DensityKind::ShiftedBeta { beta } if !(*beta > 0.0 && beta.is_finite()) => bad(format!("rescaled beta requires β > 0, got {beta}")),
            DensityKind::ShiftedBetaPrime { beta } if !(*beta > h + 1.0 && beta.is_finite()) => {
                bad(format!("rescaled beta-prime requires β > d/2+1 = {}, got {beta}", h + 1.0))
            }
            DensityKind::Marked { gamma, q, n } => {
                if !(*gamma > 0.0 && gamma.is_finite() && *n > 0.0 && n.is_finite()) {
                    return bad("marked family requires γ > 0 and n > 0".into());
                }
                q.validate()
            }
            DensityKind::Homogeneous { gamma } if !(*gamma > 0.0 && gamma.is_finite()) => bad("homogeneous intensity must be > 0".into()),
            DensityKind::Affine { base, lambda, shift } => {
                if !(*lambda > 0.0 && lambda.is_finite() && shift.is_finite()) {
                    return bad("affine map requires λ > 0 and finite shift".into());
                }
                if matches!(**base, DensityKind::Homogeneous { .. }) {
                    return bad("affine map of the homogeneous limit is not supported".into());
                }
                base.validate(d)
            }
            _ => Ok(()),
        }
    }

    /// Support `(inf E, sup E)`.
    fn support(&self) -> (f64, f64) {
        match self {
            DensityKind::Beta { .. } | DensityKind::Marked { .. } | DensityKind::Homogeneous { .. } => (0.0, f64::INFINITY),
            DensityKind::BetaPrime { .. } => (f64::NEG_INFINITY, 0.0),
            DensityKind::Gaussian => (f64::NEG_INFINITY, f64::INFINITY),
            DensityKind::ShiftedBeta { beta } => (-2.0 * beta, f64::INFINITY),
            DensityKind::ShiftedBetaPrime { beta } => (f64::NEG_INFINITY, 2.0 * beta),
            DensityKind::Custom { table } => table.support(),
            DensityKind::Affine { base, lambda, shift } => {
                let (a, b) = base.support();
                ((a - shift) / lambda, (b - shift) / lambda)
            }
        }
    }

    /// Interval outside of which the density is identically zero.
    fn effective_range(&self) -> (f64, f64) {
        match self {
            DensityKind::Custom { table } => {
                let (a, b) = table.support();
                let (p, q) = table.range();
                (a.max(p), b.min(q))
            }
            DensityKind::Marked { q: MarkLaw::Uniform { width }, n, .. } => (0.0, width / n),
            DensityKind::Affine { base, lambda, shift } => {
                let (a, b) = base.effective_range();
                ((a - shift) / lambda, (b - shift) / lambda)
            }
            _ => self.support(),
        }
    }

    fn eval(&self, d: u32, h: f64) -> f64 {
        let hd = d as f64 / 2.0;
        match self {
            DensityKind::Beta { beta } => {
                if h > 0.0 {
                    c_beta(d, *beta) * h.powf(*beta)
                } else {
                    0.0
                }
            }
            DensityKind::BetaPrime { beta } => {
                if h < 0.0 {
                    c_beta_prime(d, *beta) * (-h).powf(-beta)
                } else {
                    0.0
                }
            }
            DensityKind::Gaussian => gaussian_const(d) * (h / 2.0).exp(),
            DensityKind::ShiftedBeta { beta } => {
                if h > -2.0 * beta {
                    shifted_beta_const(d, *beta) * (1.0 + h / (2.0 * beta)).powf(*beta)
                } else {
                    0.0
                }
            }
            DensityKind::ShiftedBetaPrime { beta } => {
                if h < 2.0 * beta {
                    shifted_beta_prime_const(d, *beta) * (1.0 - h / (2.0 * beta)).powf(-beta)
                } else {
                    0.0
                }
            }
            DensityKind::Marked { gamma, q, n } => {
                if h > 0.0 {
                    gamma * n * q.pdf(n * h)
                } else {
                    0.0
                }
            }
            DensityKind::Homogeneous { .. } => 0.0,
            DensityKind::Custom { table } => table.eval(h),
            DensityKind::Affine { base, lambda, shift } => lambda.powf(hd + 1.0) * base.eval(d, lambda * h + shift),
        }
    }

    /// Density at `inf E + δ`, evaluated without forming `inf E + δ` where
    /// that would lose precision near a singular endpoint.
    fn eval_offset(&self, d: u32, delta: f64) -> f64 {
        let hd = d as f64 / 2.0;
        match self {
            DensityKind::ShiftedBeta { beta } => {
                if delta > 0.0 {
                    shifted_beta_const(d, *beta) * (delta / (2.0 * beta)).powf(*beta)
                } else {
                    0.0
                }
            }
            DensityKind::Affine { base, lambda, .. } => lambda.powf(hd + 1.0) * base.eval_offset(d, lambda * delta),
            _ => self.eval(d, self.support().0 + delta),
        }
    }

    /// Exponent `e` with `f(inf E + δ) ~ δ^e`, when negative.
    fn lower_singularity(&self) -> Option<f64> {
        match self {
            DensityKind::Beta { beta } | DensityKind::ShiftedBeta { beta } if *beta < 0.0 => Some(*beta),
            DensityKind::Affine { base, .. } => base.lower_singularity(),
            _ => None,
        }
    }

    /// Exponent `k` with `f(t) ~ |t|^k` as `t → -∞` (power-law tails only).
    fn tail_power(&self) -> Option<f64> {
        match self {
            DensityKind::BetaPrime { beta } | DensityKind::ShiftedBetaPrime { beta } => Some(-beta),
            DensityKind::Affine { base, .. } => base.tail_power(),
            _ => None,
        }
    }
}

fn shifted_beta_const(d: u32, beta: f64) -> f64 {
    let hd = d as f64 / 2.0;
    (c_beta(d, beta).ln() - (hd + 1.0) * (2.0 * beta).ln()).exp()
}

fn shifted_beta_prime_const(d: u32, beta: f64) -> f64 {
    let hd = d as f64 / 2.0;
    (c_beta_prime(d, beta).ln() - (hd + 1.0) * (2.0 * beta).ln()).exp()
}

impl HeightDensity {
    pub fn new(kind: DensityKind, d: u32) -> Result<HeightDensity, DensityError> {
        if d == 0 {
            return Err(DensityError::InvalidParameter("dimension d must be >= 1".into()));
        }
        kind.validate(d)?;
        Ok(HeightDensity { kind, d })
    }

    pub fn beta(d: u32, beta: f64) -> Result<HeightDensity, DensityError> {
        HeightDensity::new(DensityKind::Beta { beta }, d)
    }

    pub fn beta_prime(d: u32, beta: f64) -> Result<HeightDensity, DensityError> {
        HeightDensity::new(DensityKind::BetaPrime { beta }, d)
    }

    pub fn gaussian(d: u32) -> HeightDensity {
        HeightDensity { kind: DensityKind::Gaussian, d }
    }

    pub fn shifted_beta(d: u32, beta: f64) -> Result<HeightDensity, DensityError> {
        HeightDensity::new(DensityKind::ShiftedBeta { beta }, d)
    }

    pub fn shifted_beta_prime(d: u32, beta: f64) -> Result<HeightDensity, DensityError> {
        HeightDensity::new(DensityKind::ShiftedBetaPrime { beta }, d)
    }

    pub fn marked(d: u32, gamma: f64, q: MarkLaw, n: f64) -> Result<HeightDensity, DensityError> {
        HeightDensity::new(DensityKind::Marked { gamma, q, n }, d)
    }

    pub fn homogeneous(d: u32, gamma: f64) -> Result<HeightDensity, DensityError> {
        HeightDensity::new(DensityKind::Homogeneous { gamma }, d)
    }

    pub fn custom(d: u32, table: Tabulated) -> Result<HeightDensity, DensityError> {
        HeightDensity::new(DensityKind::Custom { table }, d)
    }

    /// `λ^{d/2+1} f(λ h + c)`.
    pub fn affine(&self, lambda: f64, shift: f64) -> Result<HeightDensity, DensityError> {
        HeightDensity::new(DensityKind::Affine { base: Box::new(self.kind.clone()), lambda, shift }, self.d)
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self.kind, DensityKind::Homogeneous { .. })
    }

    /// Intensity of the homogeneous limit, if this is one.
    pub fn homogeneous_gamma(&self) -> Option<f64> {
        match self.kind {
            DensityKind::Homogeneous { gamma } => Some(gamma),
            _ => None,
        }
    }

    pub fn support(&self) -> (f64, f64) {
        self.kind.support()
    }

    pub(crate) fn effective_range(&self) -> (f64, f64) {
        self.kind.effective_range()
    }

    pub fn eval(&self, h: f64) -> f64 {
        self.kind.eval(self.d, h)
    }

    pub(crate) fn eval_offset(&self, delta: f64) -> f64 {
        self.kind.eval_offset(self.d, delta)
    }

    pub(crate) fn lower_singularity(&self) -> Option<f64> {
        self.kind.lower_singularity()
    }

    pub(crate) fn tail_power(&self) -> Option<f64> {
        self.kind.tail_power()
    }

    /// Short textual descriptor used in reports.
    pub fn label(&self) -> String {
        fn kind_label(k: &DensityKind) -> String {
            match k {
                DensityKind::Beta { beta } => format!("beta({beta})"),
                DensityKind::BetaPrime { beta } => format!("beta_prime({beta})"),
                DensityKind::Gaussian => "gaussian".into(),
                DensityKind::ShiftedBeta { beta } => format!("rescaled_beta({beta})"),
                DensityKind::ShiftedBetaPrime { beta } => format!("rescaled_beta_prime({beta})"),
                DensityKind::Marked { gamma, q, n } => {
                    let ql = match q {
                        MarkLaw::Uniform { width } => format!("uniform({width})"),
                        MarkLaw::Exponential { rate } => format!("exponential({rate})"),
                        MarkLaw::Table { .. } => "table".into(),
                    };
                    format!("marked({gamma};{ql};{n})")
                }
                DensityKind::Homogeneous { gamma } => format!("homogeneous({gamma})"),
                DensityKind::Custom { .. } => "custom".into(),
                DensityKind::Affine { base, lambda, shift } => format!("affine({};{lambda};{shift})", kind_label(base)),
            }
        }
        kind_label(&self.kind)
    }
}

/// Free-function form of [`HeightDensity::eval`].
pub fn eval(f: &HeightDensity, h: f64) -> f64 {
    f.eval(h)
}

/// Free-function form of [`HeightDensity::frac_integral`].
pub fn frac_integral(f: &HeightDensity, alpha: f64, x: f64) -> Result<f64, DensityError> {
    f.frac_integral(alpha, x)
}
