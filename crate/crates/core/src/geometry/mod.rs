//! Planar kernel: weighted points, power function, bisectors, paraboloid
//! apices and the emptiness predicate behind the dual tessellation.

pub mod exact;
mod shapes;

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

pub use exact::{Sign, TIE_TOL};
pub use shapes::{Rect, Segment, Shape};
pub(crate) use shapes::triangle_meets;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("coincident sites: the two points share a spatial location")]
    CoincidentSites,
    #[error("degenerate sites: spatial coordinates are affinely dependent")]
    DegenerateSites,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Point {
        Point { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Lexicographic comparison (x first, then y).
    pub fn lex_cmp(&self, o: &Point) -> std::cmp::Ordering {
        self.x.total_cmp(&o.x).then(self.y.total_cmp(&o.y))
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// A site `(v, h)`: location in the plane plus a weight (height).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedPoint {
    pub id: usize,
    pub v: Point,
    pub h: f64,
}

impl WeightedPoint {
    pub fn new(id: usize, v: Point, h: f64) -> WeightedPoint {
        WeightedPoint { id, v, h }
    }
}

/// Closed half-plane `{z : 2<z, normal> >= offset}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub normal: Point,
    pub offset: f64,
}

impl HalfPlane {
    /// Signed slack `2<z, normal> - offset`; nonnegative inside.
    pub fn slack(&self, z: Point) -> f64 {
        2.0 * z.dot(self.normal) - self.offset
    }

    pub fn contains(&self, z: Point) -> bool {
        self.slack(z) >= 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParaboloidSign {
    Down,
    Up,
}

/// Translate of the standard paraboloid `h = -|v|^2` (down) or `h = |v|^2`
/// (up) with apex `(apex_v, apex_h)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Paraboloid {
    pub apex_v: Point,
    pub apex_h: f64,
    pub sign: ParaboloidSign,
}

impl Paraboloid {
    pub fn down(apex_v: Point, apex_h: f64) -> Paraboloid {
        Paraboloid { apex_v, apex_h, sign: ParaboloidSign::Down }
    }

    /// Height of the paraboloid above `v`.
    pub fn height_at(&self, v: Point) -> f64 {
        let d = (v - self.apex_v).norm2();
        match self.sign {
            ParaboloidSign::Down => self.apex_h - d,
            ParaboloidSign::Up => self.apex_h + d,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Ball {
        Ball { center, radius }
    }

    pub fn contains(&self, p: Point) -> bool {
        (p - self.center).norm2() <= self.radius * self.radius
    }
}

/// Position of a weighted point relative to a downward paraboloid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    StrictlyBelow,
    On,
    StrictlyAbove,
}

/// `pow(w, (v, h)) = |w - v|^2 + h`.
pub fn power(w: Point, p: &WeightedPoint) -> f64 {
    (w - p.v).norm2() + p.h
}

/// Bisector of two sites, oriented so that the half-plane holds the side
/// where `p1` has the smaller power.
pub fn bisector(p1: &WeightedPoint, p2: &WeightedPoint) -> Result<HalfPlane, GeometryError> {
    if p1.v == p2.v {
        return Err(GeometryError::CoincidentSites);
    }
    // pow(z,p1) <= pow(z,p2)  <=>  2<z, v2 - v1> <= |v2|^2 - |v1|^2 + h2 - h1
    // Orientation: H+ = {2<z, v1 - v2> >= |v1|^2 - |v2|^2 + h1 - h2}.
    Ok(HalfPlane {
        normal: p1.v - p2.v,
        offset: p1.v.norm2() - p2.v.norm2() + p1.h - p2.h,
    })
}

/// Solves the 2x2 system `2 <u_j, z'> = rhs_j` for j = 2, 3, returning
/// `None` below the relative determinant threshold.
fn solve_translated(u2: Point, r2: f64, u3: Point, r3: f64) -> Option<Point> {
    let det = 4.0 * u2.cross(u3);
    let rows = (2.0 * u2.norm()) * (2.0 * u3.norm());
    if !(det.abs() > 1e-12 * rows) {
        return None;
    }
    // Cramer with rows (2 u2x, 2 u2y), (2 u3x, 2 u3y)
    let zx = (r2 * 2.0 * u3.y - r3 * 2.0 * u2.y) / det;
    let zy = (2.0 * u2.x * r3 - 2.0 * u3.x * r2) / det;
    Some(Point::new(zx, zy))
}

/// Downward paraboloid `h = -|v - z|^2 + q` through three weighted points.
pub fn apex_paraboloid(
    x1: &WeightedPoint,
    x2: &WeightedPoint,
    x3: &WeightedPoint,
) -> Result<Paraboloid, GeometryError> {
    let u2 = x2.v - x1.v;
    let u3 = x3.v - x1.v;
    let r2 = u2.norm2() + x2.h - x1.h;
    let r3 = u3.norm2() + x3.h - x1.h;
    let z = solve_translated(u2, r2, u3, r3).ok_or(GeometryError::DegenerateSites)?;
    Ok(Paraboloid::down(x1.v + z, x1.h + z.norm2()))
}

/// Circumscribed ball of three points.
pub fn circumball(y1: Point, y2: Point, y3: Point) -> Result<Ball, GeometryError> {
    let u2 = y2 - y1;
    let u3 = y3 - y1;
    let z = solve_translated(u2, u2.norm2(), u3, u3.norm2()).ok_or(GeometryError::DegenerateSites)?;
    Ok(Ball::new(y1 + z, z.norm()))
}

/// Classifies `p` against a downward paraboloid with the tie policy of
/// [`TIE_TOL`].
pub fn below_paraboloid(p: &WeightedPoint, pi: &Paraboloid) -> Side {
    debug_assert_eq!(pi.sign, ParaboloidSign::Down);
    let (r, scale) = exact::power_residual(pi.apex_v, pi.apex_h, p);
    match Sign::with_tolerance(r, scale) {
        Sign::Negative => Side::StrictlyBelow,
        Sign::Zero => Side::On,
        Sign::Positive => Side::StrictlyAbove,
    }
}
