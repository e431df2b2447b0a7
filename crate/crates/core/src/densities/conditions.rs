//! Finite-grid diagnostics: admissibility, the convergence conditions and
//! tail behaviour of density families.

use super::fractional::{riemann_liouville, Profile};
use super::{ConvergenceFamily, DensityError, DensityKind, HeightDensity};
use crate::quadrature::{integrate, integrate_lower_tail, integrate_offset_abs};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum NotAdmissible {
    /// The support is not of the form `[a, ∞)`, `(-∞, b)` or `R`.
    Domain { support: (f64, f64) },
    /// `(I^{d/2+1} f)(t)` is infinite at a probe `t`.
    Infinite { t: f64 },
    /// The growth of `(I^{d/2+1} f)(b - 1/n)` is too slow.
    Growth { slope: f64 },
    /// The density vanishes identically.
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Admissibility {
    Admissible,
    NotAdmissible(NotAdmissible),
}

/// Minimum log-log growth slope accepted as evidence of `n^ε` growth.
pub const GROWTH_SLOPE_MIN: f64 = 0.05;

/// Least-squares slope of `ln y` against `ln x`.
pub(crate) fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).filter(|(_, y)| **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return 0.0;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Decides admissibility. Catalog kinds short-circuit; custom tables are
/// checked numerically on `probes` and on the growth grid `n = 2..=64`.
pub fn is_admissible(f: &HeightDensity, probes: &[f64]) -> Admissibility {
    match &f.kind {
        DensityKind::Custom { .. } => {}
        DensityKind::Affine { base, .. } if matches!(**base, DensityKind::Custom { .. }) => {}
        _ => return Admissibility::Admissible,
    }
    let (a, b) = f.support();
    if a.is_finite() && b.is_finite() {
        return Admissibility::NotAdmissible(NotAdmissible::Domain { support: (a, b) });
    }
    let order = f.d as f64 / 2.0 + 1.0;
    let (elo, ehi) = f.effective_range();
    if !(ehi > elo) || f.frac_integral(1.0, ehi).map(|m| m <= 0.0).unwrap_or(false) {
        return Admissibility::NotAdmissible(NotAdmissible::Zero);
    }
    for &t in probes {
        if !(t > a && t < b) {
            continue;
        }
        match f.frac_integral(order, t) {
            Ok(v) if v.is_finite() => {}
            _ => return Admissibility::NotAdmissible(NotAdmissible::Infinite { t }),
        }
    }
    if b.is_finite() {
        let ns: Vec<f64> = (2..=64).map(|n| n as f64).collect();
        let mut vals = Vec::with_capacity(ns.len());
        for &n in &ns {
            match f.frac_integral(order, b - 1.0 / n) {
                Ok(v) if v.is_finite() => vals.push(v),
                _ => return Admissibility::NotAdmissible(NotAdmissible::Infinite { t: b - 1.0 / n }),
            }
        }
        // the asymptotic regime is read off the upper part of the grid
        let slope = loglog_slope(&ns[14..], &vals[14..]);
        if !(slope >= GROWTH_SLOPE_MIN) {
            return Admissibility::NotAdmissible(NotAdmissible::Growth { slope });
        }
    }
    Admissibility::Admissible
}

/// Breakpoints of a density where smoothness may fail.
pub(crate) fn kinks(f: &HeightDensity) -> Vec<f64> {
    let (a, b) = f.effective_range();
    let mut out: Vec<f64> = [a, b].into_iter().filter(|x| x.is_finite()).collect();
    if let DensityKind::Custom { table } = &f.kind {
        out.extend_from_slice(table.nodes());
    }
    out
}

// nearly equal densities cancel to a tiny integrand
const L1_ABS_TOL: f64 = 1e-15;

/// `∫_lo^hi |f - g|` (either bound may be infinite on the left).
pub fn l1_distance(f: &HeightDensity, g: &HeightDensity, lo: f64, hi: f64) -> Result<f64, DensityError> {
    if f == g || !(hi > lo) {
        return Ok(0.0);
    }
    if f.is_homogeneous() || g.is_homogeneous() {
        return Err(DensityError::InvalidParameter("L1 distance needs two proper densities".into()));
    }
    let (fa, fb) = f.effective_range();
    let (ga, gb) = g.effective_range();
    let lo = lo.max(fa.min(ga));
    let hi = hi.min(fb.max(gb));
    if !(hi > lo) {
        return Ok(0.0);
    }
    let diff = |t: f64| (f.eval(t) - g.eval(t)).abs();
    let mut breaks: Vec<f64> = kinks(f).into_iter().chain(kinks(g)).filter(|x| *x > lo && *x < hi).collect();
    let mut total = 0.0;
    let mut start = lo;
    if !lo.is_finite() {
        let first = breaks.iter().copied().fold(hi, f64::min);
        let m = first - 1.0f64.max(0.1 * first.abs());
        let tail = match (f.tail_power(), g.tail_power()) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (Some(a), None) | (None, Some(a)) => Some(a),
            (None, None) => None,
        };
        total += integrate_lower_tail(diff, m, tail, 1e-11)?.value;
        start = m;
    }
    breaks.push(start);
    breaks.push(hi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    // refine with sign changes of f - g on a grid inside every piece
    let mut pieces = Vec::new();
    for w in breaks.windows(2) {
        let (l, r) = (w[0], w[1]);
        let steps = 64;
        let s = |t: f64| f.eval(t) - g.eval(t);
        let mut prev_x = l;
        let mut prev = s(l + (r - l) * 1e-9);
        let mut cuts = vec![l];
        for k in 1..=steps {
            let x = if k == steps { r - (r - l) * 1e-9 } else { l + (r - l) * k as f64 / steps as f64 };
            let v = s(x);
            if v * prev < 0.0 {
                let (mut a, mut b) = (prev_x, x);
                for _ in 0..80 {
                    let m = 0.5 * (a + b);
                    if s(m) * prev < 0.0 {
                        b = m;
                    } else {
                        a = m;
                    }
                }
                cuts.push(0.5 * (a + b));
            }
            prev = v;
            prev_x = x;
        }
        cuts.push(r);
        pieces.extend(cuts.windows(2).map(|c| (c[0], c[1])));
    }
    let sing = |x: f64| {
        let mut e: Option<f64> = None;
        for h in [f, g] {
            if h.support().0 == x {
                if let Some(s) = h.lower_singularity() {
                    e = Some(e.map_or(s, |p: f64| p.min(s)));
                }
            }
        }
        e
    };
    for (l, r) in pieces {
        if !(r > l) {
            continue;
        }
        total += match sing(l) {
            Some(e) => integrate_offset_abs(|d| diff(l + d), r - l, Some(e), 1e-11, L1_ABS_TOL)?.value,
            None => integrate(diff, l, r, 1e-11, L1_ABS_TOL)?.value,
        };
    }
    Ok(total)
}

/// `∫_{-∞}^{x_0} |h|^{p} f(h) dh`.
pub fn tail_moment(f: &HeightDensity, p: f64, x0: f64) -> Result<f64, DensityError> {
    let lo = f.effective_range().0;
    let up = x0.min(f.effective_range().1);
    let exact_lo = lo == f.support().0;
    let prof = Profile {
        g: |t: f64| t.abs().powf(p) * f.eval(t),
        g_offset: |d: f64| (lo + d).abs().powf(p) * if exact_lo { f.eval_offset(d) } else { f.eval(lo + d) },
        lo,
        lower_exp: if exact_lo { f.lower_singularity() } else { None },
        tail: f.tail_power().map(|k| k + p),
    };
    riemann_liouville(&prof, up, x0.max(up), 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct C1Report {
    pub n_grid: Vec<u64>,
    pub x_grid: Vec<f64>,
    /// `l1[i][j] = ∫_{-∞}^{x_j} |f_{n_i} - f|`.
    pub l1: Vec<Vec<f64>>,
    /// `∫_{-∞}^{x_0} |h|^{d/2+δ} f_n(h) dh` per `n`.
    pub tail_moments: Vec<f64>,
    pub bound: Option<f64>,
    pub tail_slope: f64,
    /// Set when the tail moments exceed the known bound, or grow along the
    /// grid when no bound is known.
    pub violation: bool,
}

pub fn check_c1(family: &ConvergenceFamily, n_grid: &[u64], x_grid: &[f64]) -> Result<C1Report, DensityError> {
    let params = family
        .c1_params()
        .ok_or_else(|| DensityError::InvalidParameter(format!("family {} has no tail parameters", family.label())))?;
    let f = family.limit();
    let p = family.d as f64 / 2.0 + params.delta;
    let mut l1 = Vec::new();
    let mut tails = Vec::new();
    for &n in n_grid {
        let fnn = family.member(n)?;
        let row = x_grid.iter().map(|&x| l1_distance(&fnn, &f, f64::NEG_INFINITY, x)).collect::<Result<Vec<_>, _>>()?;
        l1.push(row);
        tails.push(tail_moment(&fnn, p, params.x0)?);
    }
    let ns: Vec<f64> = n_grid.iter().map(|&n| n as f64).collect();
    let slope = loglog_slope(&ns, &tails);
    let exceeds = params.bound.map_or(false, |b| tails.iter().any(|t| *t > b));
    Ok(C1Report {
        n_grid: n_grid.to_vec(),
        x_grid: x_grid.to_vec(),
        l1,
        tail_moments: tails,
        bound: params.bound,
        tail_slope: slope,
        // a known bound decides on its own; the slope test covers the rest
        violation: if params.bound.is_some() { exceeds } else { slope > GROWTH_SLOPE_MIN },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct C2Report {
    pub n_grid: Vec<u64>,
    pub x_grid: Vec<f64>,
    /// `values[i][j] = (I^1 f_{n_i})(x_j)`.
    pub values: Vec<Vec<f64>>,
    /// Limit value `(I^1 f)(x_j)`; the constant `γ` for Voronoi limits.
    pub limit: Vec<f64>,
    /// `|values - limit|`.
    pub deviation: Vec<Vec<f64>>,
}

pub fn check_c2(family: &ConvergenceFamily, n_grid: &[u64], x_grid: &[f64]) -> Result<C2Report, DensityError> {
    let f = family.limit();
    let limit = x_grid.iter().map(|&x| f.frac_integral(1.0, x)).collect::<Result<Vec<_>, _>>()?;
    let mut values = Vec::new();
    let mut deviation = Vec::new();
    for &n in n_grid {
        let fnn = family.member(n)?;
        let row = x_grid.iter().map(|&x| fnn.frac_integral(1.0, x)).collect::<Result<Vec<_>, _>>()?;
        deviation.push(row.iter().zip(&limit).map(|(v, l)| (v - l).abs()).collect());
        values.push(row);
    }
    Ok(C2Report { n_grid: n_grid.to_vec(), x_grid: x_grid.to_vec(), values, limit, deviation })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub n: u64,
    pub x: f64,
    /// `x^{d/2} (I^1 f_n)(-x)`.
    pub scaled_first: f64,
    /// `(I^{d/2+1} f_n)(-x)`.
    pub high_order: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub rows: Vec<TailRow>,
    /// Set when either column fails to decrease somewhere along the rows.
    pub non_decreasing: bool,
}

/// Tail table along `(n_k, x_k)`.
pub fn tail_diagnostic(family: &ConvergenceFamily, ns: &[u64], xs: &[f64]) -> Result<TailReport, DensityError> {
    if ns.len() != xs.len() {
        return Err(DensityError::InvalidParameter("n and x sequences differ in length".into()));
    }
    let hd = family.d as f64 / 2.0;
    let mut rows = Vec::new();
    for (&n, &x) in ns.iter().zip(xs) {
        let fnn = family.member(n)?;
        rows.push(TailRow {
            n,
            x,
            scaled_first: x.powf(hd) * fnn.frac_integral(1.0, -x)?,
            high_order: fnn.frac_integral(hd + 1.0, -x)?,
        });
    }
    let non_decreasing = rows.windows(2).any(|w| {
        let grows = |a: f64, b: f64| b >= a && b > 0.0;
        grows(w[0].scaled_first, w[1].scaled_first) || grows(w[0].high_order, w[1].high_order)
    });
    Ok(TailReport { rows, non_decreasing })
}
