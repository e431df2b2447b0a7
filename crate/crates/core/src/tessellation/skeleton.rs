//! Cell-boundary unions restricted to test regions, and their comparisons.

use super::dual::DualTriangulation;
use super::laguerre::{EdgeLabel, LaguerreDiagram};
use super::TessellationError;
use crate::geometry::{triangle_meets, Point, Segment, Shape};
use serde::{Deserialize, Serialize};

/// Endpoint tolerance of [`skeleton_equal`].
pub const SKELETON_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkeletonSegment {
    pub a: Point,
    pub b: Point,
    /// The two generators separated by (Laguerre) or joined by (dual) the
    /// segment, smaller id first.
    pub owners: [usize; 2],
}

impl SkeletonSegment {
    pub fn segment(&self) -> Segment {
        Segment::new(self.a, self.b)
    }

    fn canonical(mut self) -> SkeletonSegment {
        if self.b.lex_cmp(&self.a).is_lt() {
            std::mem::swap(&mut self.a, &mut self.b);
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Skeleton {
    pub segments: Vec<SkeletonSegment>,
    pub region: Shape,
}

impl Skeleton {
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.a.dist(s.b)).sum()
    }

    fn sorted(&self) -> Vec<SkeletonSegment> {
        let mut v: Vec<SkeletonSegment> = self.segments.iter().map(|s| s.canonical()).collect();
        v.sort_by(|p, q| {
            p.owners
                .cmp(&q.owners)
                .then(p.a.x.total_cmp(&q.a.x))
                .then(p.a.y.total_cmp(&q.a.y))
                .then(p.b.x.total_cmp(&q.b.x))
                .then(p.b.y.total_cmp(&q.b.y))
        });
        v
    }
}

fn min_length(s: &Segment) -> f64 {
    1e-12 * (1.0 + s.a.norm().max(s.b.norm()))
}

/// Cell boundaries between two generators, clipped to `region`. Frame
/// edges are not part of the skeleton.
pub fn laguerre_skeleton(diagram: &LaguerreDiagram, region: &Shape) -> Skeleton {
    let mut segments = Vec::new();
    for c in diagram.nonempty() {
        for (a, b, lab) in c.edges() {
            let EdgeLabel::Site(j) = lab else { continue };
            if j < c.id {
                continue;
            }
            if let Some(s) = Segment::new(a, b).clip(region) {
                if s.length() > min_length(&s) {
                    segments.push(SkeletonSegment { a: s.a, b: s.b, owners: [c.id, j] });
                }
            }
        }
    }
    Skeleton { segments, region: *region }
}

/// Edges of every dual simplex meeting `region`, unclipped.
pub fn dual_skeleton(dual: &DualTriangulation, region: &Shape) -> Skeleton {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for s in &dual.simplices {
        let [p, q, r] = dual.corners(s);
        if triangle_meets(p, q, r, region) {
            let [a, b, c] = s.ids;
            edges.extend([(a, b), (b, c), (a, c)]);
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let segments = edges
        .into_iter()
        .map(|(i, j)| SkeletonSegment {
            a: dual.point(i).unwrap().v,
            b: dual.point(j).unwrap().v,
            owners: [i, j],
        })
        .collect();
    Skeleton { segments, region: *region }
}

/// Owner-aware equality with endpoint tolerance [`SKELETON_TOL`].
pub fn skeleton_equal(a: &Skeleton, b: &Skeleton) -> Result<bool, TessellationError> {
    if a.region != b.region {
        return Err(TessellationError::RegionMismatch);
    }
    if a.len() != b.len() {
        return Ok(false);
    }
    let close = |p: Point, q: Point| (p.x - q.x).abs() <= SKELETON_TOL && (p.y - q.y).abs() <= SKELETON_TOL;
    Ok(a
        .sorted()
        .iter()
        .zip(b.sorted().iter())
        .all(|(s, t)| s.owners == t.owners && close(s.a, t.a) && close(s.b, t.b)))
}

/// `sup_{x ∈ s} dist(x, b)` for one segment, by branch and bound.
///
/// Distances to single segments are convex along `s`, so on a parameter
/// interval the envelope is bounded by the smallest endpoint maximum.
fn directed_sup(s: &Segment, b: &[Segment]) -> f64 {
    let dists = |p: Point| -> Vec<f64> { b.iter().map(|t| t.dist_to_point(p)).collect() };
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let d0 = dists(s.a);
    let d1 = dists(s.b);
    let mut best = min(&d0).max(min(&d1));
    let tol = 1e-12 * (1.0 + s.a.norm().max(s.b.norm()));
    let mut stack = vec![(0.0f64, 1.0f64, d0, d1)];
    let mut evals = 0usize;
    while let Some((t0, t1, g0, g1)) = stack.pop() {
        let ub = g0.iter().zip(&g1).map(|(x, y)| x.max(*y)).fold(f64::INFINITY, f64::min);
        if ub <= best + tol || evals > 200_000 {
            continue;
        }
        let tm = 0.5 * (t0 + t1);
        let gm = dists(s.at(tm));
        evals += 1;
        best = best.max(min(&gm));
        stack.push((t0, tm, g0, gm.clone()));
        stack.push((tm, t1, gm, g1));
    }
    best
}

fn clipped(s: &Skeleton, c: &Shape) -> Vec<Segment> {
    s.segments.iter().filter_map(|x| x.segment().clip(c)).collect()
}

/// Smallest `ε` such that each skeleton, restricted to `c`, lies in the
/// closed `ε`-neighbourhood of the other. Infinite when exactly one side
/// is empty on `c`.
pub fn envelope_separation(a: &Skeleton, b: &Skeleton, c: &Shape) -> f64 {
    let sa: Vec<Segment> = a.segments.iter().map(|x| x.segment()).collect();
    let sb: Vec<Segment> = b.segments.iter().map(|x| x.segment()).collect();
    let ca = clipped(a, c);
    let cb = clipped(b, c);
    let one = |from: &[Segment], to: &[Segment]| -> f64 {
        if from.is_empty() {
            return 0.0;
        }
        if to.is_empty() {
            return f64::INFINITY;
        }
        from.iter().map(|s| directed_sup(s, to)).fold(0.0, f64::max)
    };
    one(&ca, &sb).max(one(&cb, &sa))
}

/// Whether some segment of `s` meets `c`.
pub fn capacity_hit(s: &Skeleton, c: &Shape) -> bool {
    s.segments.iter().any(|x| x.segment().intersects(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sk(segs: &[(f64, f64, f64, f64)], region: Shape) -> Skeleton {
        Skeleton {
            segments: segs
                .iter()
                .enumerate()
                .map(|(k, &(a, b, c, d))| SkeletonSegment { a: Point::new(a, b), b: Point::new(c, d), owners: [k, k + 1] })
                .collect(),
            region,
        }
    }

    #[test]
    fn parallel_segments() {
        let r = Shape::disk(Point::ORIGIN, 5.0);
        let a = sk(&[(0.0, 0.0, 1.0, 0.0)], r);
        let b = sk(&[(0.0, 0.3, 1.0, 0.3)], r);
        assert!((envelope_separation(&a, &b, &r) - 0.3).abs() < 1e-12);
        assert_eq!(envelope_separation(&a, &a, &r), 0.0);
        assert!(!skeleton_equal(&a, &b).unwrap());
        assert!(skeleton_equal(&a, &a).unwrap());
    }

    #[test]
    fn ridge_maximum() {
        // distance from the x axis segment to two points above its ends
        let r = Shape::disk(Point::ORIGIN, 10.0);
        let a = sk(&[(0.0, 0.0, 2.0, 0.0)], r);
        let b = sk(&[(0.0, 1.0, 0.0, 1.0), (2.0, 1.0, 2.0, 1.0)], r);
        let e = envelope_separation(&a, &b, &r);
        // a-side sup is at x = 1: sqrt(2); b-side is 1
        assert!((e - 2f64.sqrt()).abs() < 1e-10, "{e}");
    }

    #[test]
    fn region_mismatch() {
        let a = sk(&[], Shape::disk(Point::ORIGIN, 1.0));
        let b = sk(&[], Shape::disk(Point::ORIGIN, 2.0));
        assert!(matches!(skeleton_equal(&a, &b), Err(TessellationError::RegionMismatch)));
        assert!(!capacity_hit(&a, &Shape::disk(Point::ORIGIN, 1.0)));
    }
}
