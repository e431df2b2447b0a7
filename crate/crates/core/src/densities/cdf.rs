//! Cumulative height distributions and inverse-CDF height sampling.

use super::{DensityError, DensityKind, HeightDensity};
use crate::quadrature::{gauss7, integrate, integrate_offset_abs};

impl HeightDensity {
    /// `F(h) = (I^1 f)(h)`, the height mass per unit area below `h`.
    pub fn cdf(&self, h: f64) -> Result<f64, DensityError> {
        self.frac_integral(1.0, h)
    }

    /// Inverse of [`HeightDensity::cdf`]: the height `h` with `F(h) = y`.
    pub fn cdf_inverse(&self, y: f64) -> Result<f64, DensityError> {
        if !(y >= 0.0) {
            return Err(DensityError::InvalidParameter(format!("cdf target must be >= 0, got {y}")));
        }
        inverse(&self.kind, self.d, y)
    }
}

fn inverse(kind: &DensityKind, d: u32, y: f64) -> Result<f64, DensityError> {
    let hd = d as f64 / 2.0;
    Ok(match kind {
        DensityKind::Beta { beta } => {
            let c = super::c_beta(d, *beta);
            (y * (beta + 1.0) / c).powf(1.0 / (beta + 1.0))
        }
        DensityKind::BetaPrime { beta } => {
            let c = super::c_beta_prime(d, *beta);
            -(y * (beta - 1.0) / c).powf(1.0 / (1.0 - beta))
        }
        DensityKind::Gaussian => 2.0 * (y / (2.0 * super::gaussian_const(d))).ln(),
        DensityKind::ShiftedBeta { beta } => {
            let ln_a = super::shifted_beta_const(d, *beta).ln() - beta * (2.0 * beta).ln() - (beta + 1.0).ln();
            ((y.ln() - ln_a) / (beta + 1.0)).exp() - 2.0 * beta
        }
        DensityKind::ShiftedBetaPrime { beta } => {
            let ln_b = super::shifted_beta_prime_const(d, *beta).ln() + beta * (2.0 * beta).ln() - (beta - 1.0).ln();
            2.0 * beta - ((y.ln() - ln_b) / (1.0 - beta)).exp()
        }
        DensityKind::Marked { gamma, q, n } => {
            let p = y / gamma;
            if p > 1.0 {
                return Err(DensityError::InvalidParameter("cdf target exceeds total mass".into()));
            }
            q.quantile(p) / n
        }
        DensityKind::Homogeneous { .. } => 0.0,
        DensityKind::Custom { table } => {
            if y > table.total() {
                return Err(DensityError::InvalidParameter("cdf target exceeds total mass".into()));
            }
            table.cdf_inverse(y)
        }
        DensityKind::Affine { base, lambda, shift } => (inverse(base, d, y / lambda.powf(hd))? - shift) / lambda,
    })
}

/// Draws heights from `f` restricted to `[lo, hi]` by inverse CDF.
#[derive(Clone, Debug)]
pub enum HeightSampler {
    Closed { f: HeightDensity, f_lo: f64, mass: f64 },
    Numeric(NumericCdf),
    /// All mass at a single height.
    Atom { h: f64, mass: f64 },
}

impl HeightSampler {
    pub fn new(f: &HeightDensity, lo: f64, hi: f64) -> Result<HeightSampler, DensityError> {
        if let Some(g) = f.homogeneous_gamma() {
            let mass = if lo <= 0.0 && 0.0 <= hi { g } else { 0.0 };
            return Ok(HeightSampler::Atom { h: 0.0, mass });
        }
        let (slo, shi) = f.support();
        let lo = lo.max(slo);
        let hi = hi.min(shi);
        if !(hi > lo) {
            return Ok(HeightSampler::Closed { f: f.clone(), f_lo: 0.0, mass: 0.0 });
        }
        let f_lo = f.cdf(lo)?;
        let f_hi = f.cdf(hi)?;
        if !f_hi.is_finite() {
            return Err(DensityError::DivergentIntegral);
        }
        Ok(HeightSampler::Closed { f: f.clone(), f_lo, mass: (f_hi - f_lo).max(0.0) })
    }

    /// Height mass per unit area.
    pub fn mass(&self) -> f64 {
        match self {
            HeightSampler::Closed { mass, .. } | HeightSampler::Atom { mass, .. } => *mass,
            HeightSampler::Numeric(c) => c.total(),
        }
    }

    /// Height at quantile `u ∈ [0, 1)` of the restricted law.
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            HeightSampler::Closed { f, f_lo, mass } => {
                let h = f.cdf_inverse(f_lo + u * mass).unwrap_or(f64::NAN);
                h
            }
            HeightSampler::Numeric(c) => c.quantile(u),
            HeightSampler::Atom { h, .. } => *h,
        }
    }
}

/// Tabulated CDF of a bounded, piecewise smooth density on `[a, b]`.
///
/// Masses are exact to quadrature tolerance on each cell; quantiles are
/// refined inside a cell by safeguarded Newton iteration.
#[derive(Clone)]
pub struct NumericCdf {
    knots: Vec<f64>,
    cum: Vec<f64>,
    values: Vec<f64>,
    g: std::sync::Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    singular: Vec<(f64, f64)>,
}

impl std::fmt::Debug for NumericCdf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NumericCdf").field("range", &self.range()).field("total", &self.total()).finish()
    }
}

const CELLS: usize = 1024;
// per-cell floor; residual densities of close pairs are tiny
const CELL_ABS_TOL: f64 = 1e-17;

impl NumericCdf {
    /// `breaks` are points where `g` may lose smoothness; `singular` lists
    /// `(location, exponent)` pairs where `g ~ |h - location|^exponent`.
    pub fn new<G>(g: G, a: f64, b: f64, breaks: &[f64], singular: &[(f64, f64)]) -> Result<NumericCdf, DensityError>
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(DensityError::InvalidParameter(format!("numeric cdf needs a finite interval, got [{a}, {b}]")));
        }
        let mut knots: Vec<f64> = (0..=CELLS).map(|k| a + (b - a) * k as f64 / CELLS as f64).collect();
        knots[CELLS] = b;
        knots.extend(breaks.iter().copied().filter(|x| *x > a && *x < b));
        knots.extend(singular.iter().map(|s| s.0).filter(|x| *x > a && *x < b));
        knots.sort_by(f64::total_cmp);
        knots.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (1.0 + y.abs()));
        let sing_at = |x: f64| singular.iter().find(|s| (s.0 - x).abs() <= 1e-14 * (1.0 + x.abs())).map(|s| s.1);
        let mut cum = vec![0.0];
        for w in knots.windows(2) {
            let (l, r) = (w[0], w[1]);
            let m = match (sing_at(l), sing_at(r)) {
                (Some(e), _) if e < 0.0 => integrate_offset_abs(|d| g(l + d), r - l, Some(e), 1e-11, CELL_ABS_TOL)?.value,
                (_, Some(e)) if e < 0.0 => integrate_offset_abs(|d| g(r - d), r - l, Some(e), 1e-11, CELL_ABS_TOL)?.value,
                _ => integrate(&g, l, r, 1e-11, CELL_ABS_TOL)?.value,
            };
            let prev = *cum.last().unwrap();
            cum.push(prev + m.max(0.0));
        }
        let values = knots.iter().map(|&x| g(x)).collect();
        let singular = singular.iter().copied().filter(|s| s.1 < 0.0).collect();
        Ok(NumericCdf { knots, cum, values, g: std::sync::Arc::new(g), singular })
    }

    pub fn total(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }

    /// `∫_a^x g`.
    pub fn cdf(&self, x: f64) -> f64 {
        let (a, b) = self.range();
        if x <= a {
            return 0.0;
        }
        if x >= b {
            return self.total();
        }
        let k = self.knots.partition_point(|&t| t <= x) - 1;
        self.cum[k] + self.partial(k, x)
    }

    fn sing_exp(&self, x: f64) -> Option<f64> {
        self.singular.iter().find(|s| s.0 == x).map(|s| s.1)
    }

    fn cell_singular(&self, k: usize) -> bool {
        self.sing_exp(self.knots[k]).is_some()
            || self.sing_exp(self.knots[k + 1]).is_some()
            || !self.values[k].is_finite()
            || !self.values[k + 1].is_finite()
    }

    fn partial(&self, k: usize, x: f64) -> f64 {
        let (l, r) = (self.knots[k], self.knots[k + 1]);
        let g = &self.g;
        if let Some(e) = self.sing_exp(l) {
            integrate_offset_abs(|d| g(l + d), x - l, Some(e), 1e-11, CELL_ABS_TOL).map(|q| q.value).unwrap_or(f64::NAN)
        } else if let Some(e) = self.sing_exp(r) {
            let tail = integrate_offset_abs(|d| g(r - d), r - x, Some(e), 1e-11, CELL_ABS_TOL).map(|q| q.value).unwrap_or(f64::NAN);
            (self.cum[k + 1] - self.cum[k]) - tail
        } else if self.cell_singular(k) {
            integrate(|t| g(t), l, x, 1e-11, CELL_ABS_TOL).map(|q| q.value).unwrap_or(f64::NAN)
        } else {
            gauss7(|t| g(t), l, x)
        }
    }

    /// Point `x` with `cdf(x) = u · total`.
    pub fn quantile(&self, u: f64) -> f64 {
        let target = u.clamp(0.0, 1.0) * self.total();
        let k = (self.cum.partition_point(|&c| c <= target)).clamp(1, self.knots.len() - 1) - 1;
        let (l, r) = (self.knots[k], self.knots[k + 1]);
        let need = target - self.cum[k];
        let cell = self.cum[k + 1] - self.cum[k];
        if cell <= 0.0 {
            return l;
        }
        let (mut lo, mut hi) = (l, r);
        let mut x = l + (r - l) * (need / cell).clamp(0.0, 1.0);
        let singular = self.cell_singular(k);
        for _ in 0..100 {
            let fx = self.partial(k, x) - need;
            if fx > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let gx = (self.g)(x);
            let mut next = if !singular && gx > 0.0 && gx.is_finite() { x - fx / gx } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 1e-12 * (r - l).max(1e-300) || hi - lo <= 1e-13 * (r - l) {
                return next;
            }
            x = next;
        }
        x
    }
}
