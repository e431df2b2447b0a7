use super::{Ball, Point};
use serde::{Deserialize, Serialize};

/// Axis-aligned box `[min.x, max.x] x [min.y, max.y]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Rect {
        Rect { min: Point::new(x0, y0), max: Point::new(x1, y1) }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width().max(0.0) * self.height().max(0.0)
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.min.x + self.max.x), 0.5 * (self.min.y + self.max.y))
    }

    /// Radius of the smallest ball around the center containing the box.
    pub fn half_diagonal(&self) -> f64 {
        0.5 * self.width().hypot(self.height())
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    /// Membership in `[min, max)` on both axes; used for counting so that
    /// adjacent windows partition the plane.
    pub fn contains_half_open(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x < self.max.x && p.y >= self.min.y && p.y < self.max.y
    }

    /// Box scaled about its center by `factor`.
    pub fn inflate(&self, factor: f64) -> Rect {
        let c = self.center();
        let hw = 0.5 * self.width() * factor;
        let hh = 0.5 * self.height() * factor;
        Rect::new(c.x - hw, c.y - hh, c.x + hw, c.y + hh)
    }

    /// The rectangle grown by `m` on every side.
    pub fn expand(&self, m: f64) -> Rect {
        Rect::new(self.min.x - m, self.min.y - m, self.max.x + m, self.max.y + m)
    }

    pub fn around_ball(b: &Ball) -> Rect {
        Rect::new(
            b.center.x - b.radius,
            b.center.y - b.radius,
            b.center.x + b.radius,
            b.center.y + b.radius,
        )
    }

    /// Counter-clockwise corners starting at `min`.
    pub fn corners(&self) -> [Point; 4] {
        [
            self.min,
            Point::new(self.max.x, self.min.y),
            self.max,
            Point::new(self.min.x, self.max.y),
        ]
    }

    pub fn dist(&self, p: Point) -> f64 {
        let dx = (self.min.x - p.x).max(0.0).max(p.x - self.max.x);
        let dy = (self.min.y - p.y).max(0.0).max(p.y - self.max.y);
        dx.hypot(dy)
    }
}

/// Compact test sets and sampling windows in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Disk { center: Point, radius: f64 },
    Rect { rect: Rect },
    Annulus { center: Point, inner: f64, outer: f64 },
    Point { at: Point },
}

impl Shape {
    pub fn disk(center: Point, radius: f64) -> Shape {
        Shape::Disk { center, radius }
    }

    pub fn rect(rect: Rect) -> Shape {
        Shape::Rect { rect }
    }

    pub fn area(&self) -> f64 {
        match *self {
            Shape::Disk { radius, .. } => std::f64::consts::PI * radius * radius,
            Shape::Rect { rect } => rect.area(),
            Shape::Annulus { inner, outer, .. } => {
                std::f64::consts::PI * (outer * outer - inner * inner).max(0.0)
            }
            Shape::Point { .. } => 0.0,
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        match *self {
            Shape::Disk { center, radius } => (p - center).norm2() <= radius * radius,
            Shape::Rect { rect } => rect.contains(p),
            Shape::Annulus { center, inner, outer } => {
                let d2 = (p - center).norm2();
                d2 >= inner * inner && d2 <= outer * outer
            }
            Shape::Point { at } => p == at,
        }
    }

    /// Bounding box of the shape.
    pub fn bounds(&self) -> Rect {
        match *self {
            Shape::Disk { center, radius } | Shape::Annulus { center, outer: radius, .. } => {
                Rect::around_ball(&Ball::new(center, radius))
            }
            Shape::Rect { rect } => rect,
            Shape::Point { at } => Rect { min: at, max: at },
        }
    }

    /// Smallest distance from `p` to the shape.
    pub fn dist(&self, p: Point) -> f64 {
        match *self {
            Shape::Disk { center, radius } => ((p - center).norm() - radius).max(0.0),
            Shape::Rect { rect } => rect.dist(p),
            Shape::Annulus { center, inner, outer } => {
                let r = (p - center).norm();
                (r - outer).max(inner - r).max(0.0)
            }
            Shape::Point { at } => p.dist(at),
        }
    }
}

/// Straight segment between two points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Segment {
        Segment { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn at(&self, t: f64) -> Point {
        if t == 0.0 {
            self.a
        } else if t == 1.0 {
            self.b
        } else {
            self.a + (self.b - self.a) * t
        }
    }

    /// Parameter of the closest point to `p`, clamped to `[0, 1]`.
    pub fn project(&self, p: Point) -> f64 {
        let d = self.b - self.a;
        let l2 = d.norm2();
        if l2 == 0.0 {
            return 0.0;
        }
        ((p - self.a).dot(d) / l2).clamp(0.0, 1.0)
    }

    pub fn dist_to_point(&self, p: Point) -> f64 {
        self.at(self.project(p)).dist(p)
    }

    /// Parameter interval of the part inside a closed disk.
    pub fn clip_disk(&self, center: Point, radius: f64) -> Option<(f64, f64)> {
        let d = self.b - self.a;
        let f = self.a - center;
        let a = d.norm2();
        let c = f.norm2() - radius * radius;
        if a == 0.0 {
            return (c <= 0.0).then_some((0.0, 1.0));
        }
        let b = f.dot(d);
        let disc = b * b - a * c;
        if disc < 0.0 {
            return None;
        }
        let s = disc.sqrt();
        // numerically stable roots of a t^2 + 2 b t + c
        let q = -(b + b.signum() * s);
        let (mut t0, mut t1) = if q != 0.0 { (q / a, c / q) } else { (0.0, 0.0) };
        if t0 > t1 {
            std::mem::swap(&mut t0, &mut t1);
        }
        let lo = t0.max(0.0);
        let hi = t1.min(1.0);
        (lo <= hi).then_some((lo, hi))
    }

    /// Liang-Barsky clip against a closed box.
    pub fn clip_rect(&self, r: &Rect) -> Option<(f64, f64)> {
        let d = self.b - self.a;
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        for (p, q) in [
            (-d.x, self.a.x - r.min.x),
            (d.x, r.max.x - self.a.x),
            (-d.y, self.a.y - r.min.y),
            (d.y, r.max.y - self.a.y),
        ] {
            if p == 0.0 {
                if q < 0.0 {
                    return None;
                }
            } else {
                let t = q / p;
                if p < 0.0 {
                    lo = lo.max(t);
                } else {
                    hi = hi.min(t);
                }
            }
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Part of the segment inside a disk or box; `None` when empty.
    pub fn clip(&self, region: &Shape) -> Option<Segment> {
        let (lo, hi) = match *region {
            Shape::Disk { center, radius } => self.clip_disk(center, radius)?,
            Shape::Rect { rect } => self.clip_rect(&rect)?,
            Shape::Annulus { .. } | Shape::Point { .. } => {
                return self.intersects(region).then_some(*self);
            }
        };
        Some(Segment::new(self.at(lo), self.at(hi)))
    }

    pub fn intersects(&self, region: &Shape) -> bool {
        match *region {
            Shape::Disk { center, radius } => self.dist_to_point(center) <= radius,
            Shape::Rect { rect } => self.clip_rect(&rect).is_some(),
            Shape::Annulus { center, inner, outer } => {
                let far = (self.a - center).norm().max((self.b - center).norm());
                self.dist_to_point(center) <= outer && far >= inner
            }
            Shape::Point { at } => {
                let tol = 1e-12 * (1.0 + self.a.norm().max(self.b.norm()));
                self.dist_to_point(at) <= tol
            }
        }
    }

    /// Euclidean distance between two segments.
    pub fn dist_to_segment(&self, o: &Segment) -> f64 {
        if self.crosses(o) {
            return 0.0;
        }
        self.dist_to_point(o.a)
            .min(self.dist_to_point(o.b))
            .min(o.dist_to_point(self.a))
            .min(o.dist_to_point(self.b))
    }

    fn crosses(&self, o: &Segment) -> bool {
        let d1 = (self.b - self.a).cross(o.a - self.a);
        let d2 = (self.b - self.a).cross(o.b - self.a);
        let d3 = (o.b - o.a).cross(self.a - o.a);
        let d4 = (o.b - o.a).cross(self.b - o.a);
        ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
            && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    }
}

/// Whether the closed triangle (a, b, c) meets the region.
pub(crate) fn triangle_meets(a: Point, b: Point, c: Point, region: &Shape) -> bool {
    let inside = |p: Point| {
        let s1 = (b - a).cross(p - a);
        let s2 = (c - b).cross(p - b);
        let s3 = (a - c).cross(p - c);
        (s1 >= 0.0 && s2 >= 0.0 && s3 >= 0.0) || (s1 <= 0.0 && s2 <= 0.0 && s3 <= 0.0)
    };
    let edges = [Segment::new(a, b), Segment::new(b, c), Segment::new(c, a)];
    if edges.iter().any(|e| e.intersects(region)) {
        return true;
    }
    // No boundary crossing: either the region sits inside the triangle or
    // the triangle sits inside the region (caught above for disks/boxes).
    match *region {
        Shape::Disk { center, .. } => inside(center),
        Shape::Rect { rect } => inside(rect.min),
        Shape::Annulus { center, outer, .. } => {
            inside(center + Point::new(outer, 0.0)) || region.contains(a)
        }
        Shape::Point { at } => inside(at),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clip_disk_chord() {
        let s = Segment::new(Point::new(-2.0, 0.0), Point::new(2.0, 0.0));
        let c = s.clip(&Shape::disk(Point::ORIGIN, 1.0)).unwrap();
        assert_eq!(c.a, Point::new(-1.0, 0.0));
        assert_eq!(c.b, Point::new(1.0, 0.0));
        assert!(s.clip(&Shape::disk(Point::new(0.0, 3.0), 1.0)).is_none());
    }

    #[test]
    fn clip_rect_touching_corner_is_a_point() {
        let s = Segment::new(Point::new(-1.0, 0.0), Point::new(0.0, 0.0));
        let c = s.clip(&Shape::rect(Rect::new(0.0, 0.0, 2.0, 2.0))).unwrap();
        assert_eq!(c.length(), 0.0);
    }

    #[test]
    fn segment_distance() {
        let a = Segment::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0));
        let b = Segment::new(Point::new(0.0, 0.3), Point::new(1.0, 0.3));
        assert!((a.dist_to_segment(&b) - 0.3).abs() < 1e-15);
        let c = Segment::new(Point::new(0.5, -1.0), Point::new(0.5, 1.0));
        assert_eq!(a.dist_to_segment(&c), 0.0);
    }

    #[test]
    fn triangle_region_tests() {
        let (a, b, c) = (Point::new(0.0, 0.0), Point::new(4.0, 0.0), Point::new(0.0, 4.0));
        assert!(triangle_meets(a, b, c, &Shape::disk(Point::new(1.0, 1.0), 0.1)));
        assert!(!triangle_meets(a, b, c, &Shape::disk(Point::new(5.0, 5.0), 1.0)));
        assert!(triangle_meets(a, b, c, &Shape::disk(Point::new(1.0, 1.0), 100.0)));
    }
}
