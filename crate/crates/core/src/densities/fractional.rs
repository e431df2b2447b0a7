//! Riemann-Liouville fractional integrals `(I^α f)(x)`.

use super::{DensityError, DensityKind, HeightDensity, MarkLaw};
use crate::quadrature::{integrate, integrate_lower_tail, integrate_offset, QuadError, DEFAULT_REL_TOL};
use crate::special::{gamma, gamma_ratio};

fn quad_err(e: QuadError) -> DensityError {
    match e {
        QuadError::NotConverged { value, .. } if !value.is_finite() => DensityError::DivergentIntegral,
        other => DensityError::Quadrature(other),
    }
}

/// Shape information about an integrand on `(lo, up]`.
pub(crate) struct Profile<G, O> {
    pub g: G,
    /// `g` evaluated at `lo + δ` (only used when `lo` is finite).
    pub g_offset: O,
    pub lo: f64,
    /// `g(lo + δ) ~ δ^e` with `e < 0`.
    pub lower_exp: Option<f64>,
    /// `g(t) ~ |t|^k` as `t → -∞`; `None` for faster decay.
    pub tail: Option<f64>,
}

/// `Γ(α)^{-1} ∫_{lo}^{up} g(t) (x - t)^{α-1} dt` with `up <= x`.
pub(crate) fn riemann_liouville<G, O>(p: &Profile<G, O>, up: f64, x: f64, alpha: f64) -> Result<f64, DensityError>
where
    G: Fn(f64) -> f64,
    O: Fn(f64) -> f64,
{
    if !(up > p.lo) {
        return Ok(0.0);
    }
    let tol = DEFAULT_REL_TOL * 0.1;
    let kernel = |t: f64| if alpha == 1.0 { 1.0 } else { (x - t).powf(alpha - 1.0) };
    let singular_top = up == x && alpha < 1.0;
    let mid = if p.lo.is_finite() { p.lo + 0.5 * (up - p.lo) } else { up - 1.0f64.max(0.25 * up.abs()) };

    let left = if p.lo.is_finite() {
        let lo = p.lo;
        integrate_offset(|d| (p.g_offset)(d) * kernel(lo + d), mid - lo, p.lower_exp, tol).map_err(quad_err)?.value
    } else {
        let tail = match p.tail {
            Some(k) => {
                let k = k + alpha - 1.0;
                if k >= -1.0 {
                    return Err(DensityError::DivergentIntegral);
                }
                Some(k)
            }
            None => None,
        };
        integrate_lower_tail(|t| (p.g)(t) * kernel(t), mid, tail, tol).map_err(quad_err)?.value
    };

    let right = if singular_top {
        integrate_offset(|u| (p.g)(x - u) * u.powf(alpha - 1.0), x - mid, Some(alpha - 1.0), tol).map_err(quad_err)?.value
    } else {
        integrate(|t| (p.g)(t) * kernel(t), mid, up, tol, 0.0).map_err(quad_err)?.value
    };
    let v = (left + right) / gamma(alpha);
    if v.is_finite() {
        Ok(v.max(0.0))
    } else {
        Err(DensityError::DivergentIntegral)
    }
}

impl HeightDensity {
    /// `(I^α f)(x) = Γ(α)^{-1} ∫_{-∞}^x f(t) (x - t)^{α-1} dt`.
    ///
    /// Closed forms are used where available, adaptive quadrature otherwise.
    pub fn frac_integral(&self, alpha: f64, x: f64) -> Result<f64, DensityError> {
        if !(alpha > 0.0) {
            return Err(DensityError::InvalidParameter(format!("order α must be > 0, got {alpha}")));
        }
        if x.is_nan() {
            return Err(DensityError::InvalidParameter("x is NaN".into()));
        }
        if x <= self.support().0 {
            return Ok(0.0);
        }
        match closed_form(&self.kind, self.d, alpha, x) {
            Some(v) => v,
            None => self.frac_integral_numeric(alpha, x),
        }
    }

    /// Quadrature evaluation of `(I^α f)(x)`, bypassing closed forms.
    pub fn frac_integral_numeric(&self, alpha: f64, x: f64) -> Result<f64, DensityError> {
        if self.is_homogeneous() {
            return self.frac_integral(alpha, x);
        }
        let (elo, ehi) = self.effective_range();
        if x <= elo {
            return Ok(0.0);
        }
        let slo = self.support().0;
        if x >= self.support().1 && self.upper_blows_up() {
            return Err(DensityError::DivergentIntegral);
        }
        let up = x.min(ehi);
        let exact_lo = elo == slo;
        let prof = Profile {
            g: |t: f64| self.eval(t),
            g_offset: |d: f64| if exact_lo { self.eval_offset(d) } else { self.eval(elo + d) },
            lo: elo,
            lower_exp: if exact_lo { self.lower_singularity() } else { None },
            tail: self.tail_power(),
        };
        riemann_liouville(&prof, up, x, alpha)
    }

    /// True when `f` is not integrable at a finite upper support endpoint.
    fn upper_blows_up(&self) -> bool {
        fn go(k: &DensityKind) -> bool {
            match k {
                DensityKind::BetaPrime { .. } | DensityKind::ShiftedBetaPrime { .. } => true,
                DensityKind::Affine { base, .. } => go(base),
                _ => false,
            }
        }
        go(&self.kind)
    }
}

fn closed_form(kind: &DensityKind, d: u32, alpha: f64, x: f64) -> Option<Result<f64, DensityError>> {
    let hd = d as f64 / 2.0;
    Some(Ok(match kind {
        DensityKind::Beta { beta } => {
            if x <= 0.0 {
                0.0
            } else {
                super::c_beta(d, *beta) * gamma_ratio(beta + 1.0, beta + 1.0 + alpha) * x.powf(beta + alpha)
            }
        }
        DensityKind::BetaPrime { beta } => {
            if x >= 0.0 || alpha >= *beta {
                return Some(Err(DensityError::DivergentIntegral));
            }
            super::c_beta_prime(d, *beta) * gamma_ratio(beta - alpha, *beta) * (-x).powf(alpha - beta)
        }
        DensityKind::Gaussian => super::gaussian_const(d) * 2f64.powf(alpha) * (x / 2.0).exp(),
        DensityKind::ShiftedBeta { beta } => {
            let y = x + 2.0 * beta;
            if y <= 0.0 {
                0.0
            } else {
                let ln = super::shifted_beta_const(d, *beta).ln() - beta * (2.0 * beta).ln()
                    + (beta + alpha) * y.ln();
                ln.exp() * gamma_ratio(beta + 1.0, beta + 1.0 + alpha)
            }
        }
        DensityKind::ShiftedBetaPrime { beta } => {
            let y = 2.0 * beta - x;
            if y <= 0.0 || alpha >= *beta {
                return Some(Err(DensityError::DivergentIntegral));
            }
            let ln = super::shifted_beta_prime_const(d, *beta).ln() + beta * (2.0 * beta).ln() + (alpha - beta) * y.ln();
            ln.exp() * gamma_ratio(beta - alpha, *beta)
        }
        DensityKind::Marked { gamma: g, q, n } => match q {
            MarkLaw::Uniform { width } => {
                if x <= 0.0 {
                    0.0
                } else {
                    let m = x.min(width / n);
                    let diff = if alpha == 1.0 { m } else { x.powf(alpha) - (x - m).powf(alpha) };
                    g * n / (width * gamma(alpha + 1.0)) * diff
                }
            }
            MarkLaw::Exponential { rate } if alpha == 1.0 => {
                if x <= 0.0 {
                    0.0
                } else {
                    -g * (-rate * n * x).exp_m1()
                }
            }
            MarkLaw::Table { table } if alpha == 1.0 => g * table.cdf(n * x),
            _ => return None,
        },
        DensityKind::Homogeneous { gamma: g } => {
            if x <= 0.0 {
                0.0
            } else {
                g * x.powf(alpha - 1.0) / gamma(alpha)
            }
        }
        DensityKind::Custom { table } if alpha == 1.0 => table.cdf(x),
        DensityKind::Affine { base, lambda, shift } => {
            let inner = closed_form(base, d, alpha, lambda * x + shift)?;
            return Some(inner.map(|v| lambda.powf(hd + 1.0 - alpha) * v));
        }
        _ => return None,
    }))
}

/// Largest relative discrepancy of the semigroup identity
/// `I^α I^β f = I^{α+β} f` over `grid`, with the outer integral taken by
/// quadrature over the inner closed form.
pub fn semigroup_check(f: &HeightDensity, alpha: f64, beta: f64, grid: &[f64]) -> Result<f64, DensityError> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(DensityError::InvalidParameter("orders must be positive".into()));
    }
    let lo = f.support().0;
    let inner = |t: f64| f.frac_integral(beta, t).unwrap_or(f64::NAN);
    let lower_exp = if f.is_homogeneous() && beta < 1.0 {
        Some(beta - 1.0)
    } else {
        f.lower_singularity().map(|e| e + beta).filter(|e| *e < 0.0)
    };
    let prof = Profile {
        g: inner,
        g_offset: |d: f64| inner(lo + d),
        lo,
        lower_exp,
        tail: f.tail_power().map(|k| k + beta),
    };
    let mut worst = 0.0f64;
    for &x in grid {
        let rhs = f.frac_integral(alpha + beta, x)?;
        let lhs = riemann_liouville(&prof, x, x, alpha)?;
        worst = worst.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
    }
    Ok(worst)
}
