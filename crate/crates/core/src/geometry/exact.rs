//! Double-double arithmetic and filtered sign predicates.
//!
//! Every predicate returns the (approximate) value together with a magnitude
//! scale so callers can apply the `1e-12 * scale` tie policy. The f64 fast
//! path is only trusted when the value clears a conservative forward error
//! bound; otherwise the expression is re-evaluated in double-double.

use super::{Point, WeightedPoint};

/// Relative threshold under which a residual is reported as a tie.
pub const TIE_TOL: f64 = 1e-12;

const ORIENT_FILTER: f64 = 1e-14;
const POWER_FILTER: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    #[inline]
    pub fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact difference of two doubles.
    #[inline]
    pub fn diff(a: f64, b: f64) -> Dd {
        let (s, e) = two_sum(a, -b);
        Dd { hi: s, lo: e }
    }

    #[inline]
    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[inline]
    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    #[inline]
    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Three-way classification of a residual under the tie policy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    /// Sign of `value` with ties declared when `|value| <= TIE_TOL * scale`.
    pub fn with_tolerance(value: f64, scale: f64) -> Sign {
        if value.abs() <= TIE_TOL * scale {
            Sign::Zero
        } else if value > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    /// Exact-as-computed sign, zero only for a vanishing value.
    pub fn of(value: f64) -> Sign {
        if value > 0.0 {
            Sign::Positive
        } else if value < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
}

/// Twice the signed area of (a, b, c); positive for counter-clockwise order.
pub fn orient2d(a: Point, b: Point, c: Point) -> (f64, f64) {
    let l = (b.x - a.x) * (c.y - a.y);
    let r = (b.y - a.y) * (c.x - a.x);
    let det = l - r;
    let scale = l.abs() + r.abs();
    if det.abs() > ORIENT_FILTER * scale {
        return (det, scale);
    }
    let bax = Dd::diff(b.x, a.x);
    let cay = Dd::diff(c.y, a.y);
    let bay = Dd::diff(b.y, a.y);
    let cax = Dd::diff(c.x, a.x);
    (bax.mul(cay).sub(bay.mul(cax)).value(), scale)
}

#[inline]
fn lift(p: &WeightedPoint, d: &WeightedPoint) -> (f64, f64, f64, f64) {
    let dx = p.v.x - d.v.x;
    let dy = p.v.y - d.v.y;
    let dh = p.h - d.h;
    (dx, dy, dx * dx + dy * dy + dh, dx * dx + dy * dy + dh.abs())
}

#[inline]
fn lift_dd(p: &WeightedPoint, d: &WeightedPoint) -> (Dd, Dd, Dd) {
    let dx = Dd::diff(p.v.x, d.v.x);
    let dy = Dd::diff(p.v.y, d.v.y);
    let dh = Dd::diff(p.h, d.h);
    (dx, dy, dx.mul(dx).add(dy.mul(dy)).add(dh))
}

/// Lifted power test of `d` against the triangle (a, b, c).
///
/// For a counter-clockwise triangle the value is positive exactly when `d`
/// lies strictly below the downward paraboloid through the three lifted
/// points, i.e. when `d` conflicts with the triangle.
pub fn power_test(
    a: &WeightedPoint,
    b: &WeightedPoint,
    c: &WeightedPoint,
    d: &WeightedPoint,
) -> (f64, f64) {
    let (adx, ady, alift, aperm) = lift(a, d);
    let (bdx, bdy, blift, bperm) = lift(b, d);
    let (cdx, cdy, clift, cperm) = lift(c, d);
    let bc = bdx * cdy - bdy * cdx;
    let ca = cdx * ady - cdy * adx;
    let ab = adx * bdy - ady * bdx;
    let det = alift * bc + blift * ca + clift * ab;
    let scale = aperm * ((bdx * cdy).abs() + (bdy * cdx).abs())
        + bperm * ((cdx * ady).abs() + (cdy * adx).abs())
        + cperm * ((adx * bdy).abs() + (ady * bdx).abs());
    if det.abs() > POWER_FILTER * scale {
        return (det, scale);
    }
    let (adx, ady, alift) = lift_dd(a, d);
    let (bdx, bdy, blift) = lift_dd(b, d);
    let (cdx, cdy, clift) = lift_dd(c, d);
    let bc = bdx.mul(cdy).sub(bdy.mul(cdx));
    let ca = cdx.mul(ady).sub(cdy.mul(adx));
    let ab = adx.mul(bdy).sub(ady.mul(bdx));
    let det = alift.mul(bc).add(blift.mul(ca)).add(clift.mul(ab));
    (det.value(), scale)
}

/// One-dimensional lifted test for a point collinear with the segment (a, b):
/// positive when `d` lies strictly below the lifted line through a and b.
pub fn power_test_collinear(a: &WeightedPoint, b: &WeightedPoint, d: &WeightedPoint) -> (f64, f64) {
    // Parametrise along the dominant axis of b - a.
    let use_x = (b.v.x - a.v.x).abs() >= (b.v.y - a.v.y).abs();
    let coord = |p: &WeightedPoint| if use_x { p.v.x } else { p.v.y };
    let la = |p: &WeightedPoint| Dd::from(p.v.x).mul(Dd::from(p.v.x)).add(Dd::from(p.v.y).mul(Dd::from(p.v.y))).add(Dd::from(p.h));
    let (ta, tb, td) = (coord(a), coord(b), coord(d));
    // lifted line at td: la + (lb - la) * (td - ta) / (tb - ta); compare with ld.
    // Multiply through by (tb - ta) to keep the evaluation division free.
    let span = Dd::diff(tb, ta);
    let off = Dd::diff(td, ta);
    let (fa, fb, fd) = (la(a), la(b), la(d));
    let line = fa.mul(span).add(fb.sub(fa).mul(off));
    let val = line.sub(fd.mul(span));
    let scale = (fa.hi.abs() + fb.hi.abs() + fd.hi.abs()) * span.hi.abs().max(off.hi.abs());
    let v = val.value();
    (if span.hi < 0.0 { -v } else { v }, scale)
}

/// Residual `pow(z, p) - q` evaluated in double-double, with its scale.
pub fn power_residual(z: Point, q: f64, p: &WeightedPoint) -> (f64, f64) {
    let dx = Dd::diff(p.v.x, z.x);
    let dy = Dd::diff(p.v.y, z.y);
    let r = dx.mul(dx).add(dy.mul(dy)).add(Dd::from(p.h)).sub(Dd::from(q));
    let d2 = dx.hi * dx.hi + dy.hi * dy.hi;
    (r.value(), d2 + p.h.abs() + q.abs())
}
