//! Brute-force reference constructions, independent of the library's
//! incremental algorithms.

use poisson_laguerre::densities::HeightSampler;
use poisson_laguerre::geometry::{Point, Rect, WeightedPoint};
use poisson_laguerre::HeightDensity;
use rand::Rng;

/// Lifted plane `z = a x + b y + c` through three sites, `z = |v|^2 + h`.
fn lifted_plane(p: &WeightedPoint, q: &WeightedPoint, r: &WeightedPoint) -> Option<(f64, f64, f64)> {
    let z = |w: &WeightedPoint| w.v.x * w.v.x + w.v.y * w.v.y + w.h;
    let (x1, y1, z1) = (p.v.x, p.v.y, z(p));
    let (x2, y2, z2) = (q.v.x - x1, q.v.y - y1, z(q) - z1);
    let (x3, y3, z3) = (r.v.x - x1, r.v.y - y1, z(r) - z1);
    let det = x2 * y3 - x3 * y2;
    let scale = (x2 * y3).abs() + (x3 * y2).abs();
    if det.abs() <= 1e-12 * scale {
        return None;
    }
    let a = (z2 * y3 - z3 * y2) / det;
    let b = (x2 * z3 - x3 * z2) / det;
    Some((a, b, z1 - a * x1 - b * y1))
}

/// Every id triple whose lifted plane has no site strictly below it, with
/// the smallest margin seen (to detect near ties in the sample).
pub fn dual_oracle(pts: &[WeightedPoint]) -> (Vec<[usize; 3]>, f64) {
    let n = pts.len();
    let mut out = Vec::new();
    let mut margin = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let Some((a, b, c)) = lifted_plane(&pts[i], &pts[j], &pts[k]) else { continue };
                let mut empty = true;
                let mut local = f64::INFINITY;
                for (m, p) in pts.iter().enumerate() {
                    if m == i || m == j || m == k {
                        continue;
                    }
                    let zp = p.v.x * p.v.x + p.v.y * p.v.y + p.h;
                    let plane = a * p.v.x + b * p.v.y + c;
                    let gap = (zp - plane) / (1.0 + zp.abs() + plane.abs());
                    local = local.min(gap.abs());
                    if gap < 0.0 {
                        empty = false;
                        break;
                    }
                }
                if empty {
                    margin = margin.min(local);
                    let mut ids = [pts[i].id, pts[j].id, pts[k].id];
                    ids.sort_unstable();
                    out.push(ids);
                }
            }
        }
    }
    out.sort_unstable();
    (out, margin)
}

/// Cell vertices of site `g` as all pairwise intersections of constraint
/// lines (bisectors against every other site, frame sides) that satisfy
/// every constraint.
pub fn cell_oracle(pts: &[WeightedPoint], g: usize, frame: &Rect) -> Vec<Point> {
    // constraint  n . z <= c
    let p = &pts[g];
    let mut cons: Vec<(Point, f64)> = vec![
        (Point::new(-1.0, 0.0), -frame.min.x),
        (Point::new(1.0, 0.0), frame.max.x),
        (Point::new(0.0, -1.0), -frame.min.y),
        (Point::new(0.0, 1.0), frame.max.y),
    ];
    for (m, q) in pts.iter().enumerate() {
        if m == g {
            continue;
        }
        // |z-p|^2 + hp <= |z-q|^2 + hq
        let nrm = Point::new(2.0 * (q.v.x - p.v.x), 2.0 * (q.v.y - p.v.y));
        let c = q.v.x * q.v.x + q.v.y * q.v.y + q.h - p.v.x * p.v.x - p.v.y * p.v.y - p.h;
        cons.push((nrm, c));
    }
    let mut out: Vec<Point> = Vec::new();
    for i in 0..cons.len() {
        for j in i + 1..cons.len() {
            let (n1, c1) = cons[i];
            let (n2, c2) = cons[j];
            let det = n1.x * n2.y - n1.y * n2.x;
            if det.abs() <= 1e-12 * (n1.norm() * n2.norm()) {
                continue;
            }
            let z = Point::new((c1 * n2.y - c2 * n1.y) / det, (n1.x * c2 - n2.x * c1) / det);
            let ok = cons.iter().all(|(n, c)| n.x * z.x + n.y * z.y <= c + 1e-9 * (1.0 + c.abs() + n.norm() * z.norm()));
            if ok && !out.iter().any(|w| w.dist(z) <= 1e-9) {
                out.push(z);
            }
        }
    }
    out
}

/// Whether two vertex sets agree up to `tol` in both directions.
pub fn same_vertex_set(a: &[Point], b: &[Point], tol: f64) -> bool {
    a.iter().all(|p| b.iter().any(|q| p.dist(*q) <= tol)) && b.iter().all(|p| a.iter().any(|q| p.dist(*q) <= tol))
}

/// Fixed-size configuration in `[0, side]^2` with heights from `f` on
/// `[lo, hi]`.
pub fn random_config<R: Rng>(f: &HeightDensity, lo: f64, hi: f64, n: usize, side: f64, rng: &mut R) -> Vec<WeightedPoint> {
    let s = HeightSampler::new(f, lo, hi).unwrap();
    (0..n)
        .map(|id| {
            let v = Point::new(side * rng.random::<f64>(), side * rng.random::<f64>());
            WeightedPoint::new(id, v, s.quantile(rng.random::<f64>()))
        })
        .collect()
}
