//! Adaptive Gauss-Kronrod (7/15) integration with power substitutions for
//! integrable endpoint singularities and semi-infinite ranges.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use thiserror::Error;

pub const DEFAULT_REL_TOL: f64 = 1e-9;
const MAX_PANELS: usize = 4000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("quadrature did not converge (value {value:e}, error estimate {error:e})")]
    NotConverged { value: f64, error: f64 },
    #[error("integrand returned a non-finite value")]
    NonFinite,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel, QuadError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kron * h;
    if !value.is_finite() {
        return Err(QuadError::NonFinite);
    }
    let error = ((kron - gauss) * h).abs();
    Ok(Panel { a, b, value, error })
}

/// `∫_a^b f` to the requested relative tolerance (absolute floor `abs_tol`).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<Quad, QuadError> {
    if a == b {
        return Ok(Quad { value: 0.0, error: 0.0 });
    }
    if a > b {
        let q = integrate(f, b, a, rel_tol, abs_tol)?;
        return Ok(Quad { value: -q.value, error: q.error });
    }
    let mut heap = BinaryHeap::new();
    let first = gk15(&f, a, b)?;
    let mut value = first.value;
    let mut error = first.error;
    heap.push(first);
    while error > abs_tol.max(rel_tol * value.abs()) {
        if heap.len() >= MAX_PANELS {
            return Err(QuadError::NotConverged { value, error });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // cannot split further in floating point
            heap.push(worst);
            return Err(QuadError::NotConverged { value, error });
        }
        let l = gk15(&f, worst.a, m)?;
        let r = gk15(&f, m, worst.b)?;
        value += l.value + r.value - worst.value;
        error += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
        if heap.len() % 64 == 0 {
            // re-sum to keep the running totals from drifting
            value = heap.iter().map(|p| p.value).sum();
            error = heap.iter().map(|p| p.error).sum();
        }
    }
    let value = heap.iter().map(|p| p.value).sum();
    Ok(Quad { value, error })
}

/// `∫_0^len g(δ) dδ` where `g` may behave like `δ^exp` at `δ = 0`
/// (`exp > -1`). A substitution `δ = len·s^p` with `p = 1/(1+exp)` removes
/// the algebraic singularity.
pub fn integrate_offset<F: Fn(f64) -> f64>(g: F, len: f64, exp: Option<f64>, rel_tol: f64) -> Result<Quad, QuadError> {
    integrate_offset_abs(g, len, exp, rel_tol, 0.0)
}

/// [`integrate_offset`] with an absolute error floor.
pub fn integrate_offset_abs<F: Fn(f64) -> f64>(
    g: F,
    len: f64,
    exp: Option<f64>,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Quad, QuadError> {
    if len <= 0.0 {
        return Ok(Quad { value: 0.0, error: 0.0 });
    }
    match exp {
        Some(e) if e < 0.0 => {
            if e <= -1.0 {
                return Err(QuadError::NotConverged { value: f64::INFINITY, error: f64::INFINITY });
            }
            let p = 1.0 / (1.0 + e);
            integrate(
                |s: f64| {
                    let d = len * s.powf(p);
                    if d == 0.0 {
                        return 0.0;
                    }
                    g(d) * len * p * s.powf(p - 1.0)
                },
                0.0,
                1.0,
                rel_tol,
                abs_tol,
            )
        }
        _ => integrate(g, 0.0, len, rel_tol, abs_tol),
    }
}

/// `∫_{-∞}^m g(t) dt`. `tail_power` is `k` when `g(t) ~ |t|^k` as
/// `t → -∞` (use `None` for faster-than-polynomial decay).
pub fn integrate_lower_tail<F: Fn(f64) -> f64>(
    g: F,
    m: f64,
    tail_power: Option<f64>,
    rel_tol: f64,
) -> Result<Quad, QuadError> {
    // t = m - (1/s - 1), dt = ds / s^2, s in (0, 1]
    let exp = match tail_power {
        Some(k) if k >= -1.0 => {
            return Err(QuadError::NotConverged { value: f64::INFINITY, error: f64::INFINITY })
        }
        Some(k) => Some(-k - 2.0),
        None => None,
    };
    integrate_offset(
        |s: f64| {
            let t = m - (1.0 / s - 1.0);
            if !t.is_finite() {
                return 0.0;
            }
            let v = g(t) / (s * s);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        1.0,
        exp,
        rel_tol,
    )
}

/// Gauss-Legendre rule with 7 nodes on `[a, b]`; exact for degree 13.
pub fn gauss7<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = WG[3] * f(c);
    for j in 0..3 {
        let dx = h * XGK[2 * j + 1];
        s += WG[j] * (f(c - dx) + f(c + dx));
    }
    s * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12, 0.0).unwrap();
        assert_relative_eq!(q.value, 0.0, epsilon = 1e-14);
        let q = integrate(|x| x.powi(6), -1.0, 1.0, 1e-12, 0.0).unwrap();
        assert_relative_eq!(q.value, 2.0 / 7.0, max_relative = 1e-14);
    }

    #[test]
    fn strong_endpoint_singularity() {
        // ∫_0^1 x^-0.99 = 100
        let q = integrate_offset(|d| d.powf(-0.99), 1.0, Some(-0.99), 1e-10).unwrap();
        assert_relative_eq!(q.value, 100.0, max_relative = 1e-10);
        let q = integrate_offset(|d| d.powf(-0.5) * (1.0 - d).exp(), 1.0, Some(-0.5), 1e-10).unwrap();
        // ∫_0^1 x^-1/2 e^{1-x} = e·√π·erf(1)
        let expect = std::f64::consts::E * std::f64::consts::PI.sqrt() * 0.842_700_792_949_714_9;
        assert_relative_eq!(q.value, expect, max_relative = 1e-10);
    }

    #[test]
    fn lower_tails() {
        let q = integrate_lower_tail(|t| (t / 2.0).exp(), 0.0, None, 1e-11).unwrap();
        assert_relative_eq!(q.value, 2.0, max_relative = 1e-11);
        // ∫_{-∞}^{-1} |t|^{-3} = 1/2
        let q = integrate_lower_tail(|t| t.abs().powi(-3), -1.0, Some(-3.0), 1e-11).unwrap();
        assert_relative_eq!(q.value, 0.5, max_relative = 1e-11);
        // ∫_{-∞}^{-1} |t|^{-1.5} = 2, slowly decaying tail
        let q = integrate_lower_tail(|t| t.abs().powf(-1.5), -1.0, Some(-1.5), 1e-11).unwrap();
        assert_relative_eq!(q.value, 2.0, max_relative = 1e-10);
        assert!(integrate_lower_tail(|t| t.abs().powf(-0.5), -1.0, Some(-0.5), 1e-9).is_err());
    }

    #[test]
    fn gauss7_degree_13() {
        assert_relative_eq!(gauss7(|x| x.powi(12), 0.0, 1.0), 1.0 / 13.0, max_relative = 1e-14);
    }
}
