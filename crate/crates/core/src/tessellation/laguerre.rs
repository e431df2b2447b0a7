//! Laguerre (power) diagrams clipped to a rectangular frame.

use super::dual::{build_dual, DualTriangulation};
use super::TessellationError;
use crate::geometry::{apex_paraboloid, bisector, HalfPlane, Point, Rect, WeightedPoint};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// What lies across a cell edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeLabel {
    Frame,
    Site(usize),
}

/// Convex polygon, counter-clockwise. `labels[k]` belongs to the edge from
/// vertex `k` to vertex `k + 1`; `tags[k]` is the sorted id triple of the
/// dual simplex generating vertex `k`, when both adjacent edges are
/// bisectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub id: usize,
    pub vertices: Vec<Point>,
    pub labels: Vec<EdgeLabel>,
    pub tags: Vec<Option<[usize; 3]>>,
}

impl Cell {
    pub fn empty(id: usize) -> Cell {
        Cell { id, vertices: Vec::new(), labels: Vec::new(), tags: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 3
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        0.5 * (0..n).map(|k| self.vertices[k].cross(self.vertices[(k + 1) % n])).sum::<f64>()
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.vertices.len();
        (0..n).map(|k| self.vertices[k].dist(self.vertices[(k + 1) % n])).sum()
    }

    /// Lexicographically smallest vertex, the center convention for
    /// typical-cell statistics.
    pub fn lex_min(&self) -> Option<Point> {
        self.vertices.iter().copied().min_by(|a, b| a.lex_cmp(b))
    }

    pub fn touches_frame(&self) -> bool {
        self.labels.contains(&EdgeLabel::Frame)
    }

    /// Edges as `(start, end, label)`.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point, EdgeLabel)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |k| (self.vertices[k], self.vertices[(k + 1) % n], self.labels[k]))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaguerreDiagram {
    pub frame: Rect,
    /// One cell per generator, sorted by id; buried generators own an empty
    /// cell.
    pub cells: Vec<Cell>,
}

impl LaguerreDiagram {
    pub fn cell(&self, id: usize) -> Option<&Cell> {
        self.cells.binary_search_by_key(&id, |c| c.id).ok().map(|i| &self.cells[i])
    }

    pub fn nonempty(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| !c.is_empty())
    }

    pub fn total_area(&self) -> f64 {
        self.nonempty().map(Cell::area).sum()
    }

    /// Vertices not on the frame boundary, with the id triple of their
    /// simplex, deduplicated by tag.
    pub fn interior_vertices(&self) -> Vec<([usize; 3], Point)> {
        let mut out: Vec<([usize; 3], Point)> = self
            .nonempty()
            .flat_map(|c| c.tags.iter().zip(&c.vertices).filter_map(|(t, v)| t.map(|t| (t, *v))))
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out.dedup_by(|a, b| a.0 == b.0);
        out
    }
}

fn frame_polygon(frame: &Rect) -> (Vec<Point>, Vec<EdgeLabel>) {
    (frame.corners().to_vec(), vec![EdgeLabel::Frame; 4])
}

fn slack(hp: &HalfPlane, z: Point) -> f64 {
    let v = hp.slack(z);
    let scale = 2.0 * ((z.x * hp.normal.x).abs() + (z.y * hp.normal.y).abs()) + hp.offset.abs();
    if v.abs() <= 1e-13 * scale {
        0.0
    } else {
        v
    }
}

/// Sutherland-Hodgman step against one half-plane, carrying edge labels.
pub(crate) fn clip_labelled(
    verts: &[Point],
    labels: &[EdgeLabel],
    hp: &HalfPlane,
    lab: EdgeLabel,
) -> (Vec<Point>, Vec<EdgeLabel>) {
    let n = verts.len();
    let s: Vec<f64> = verts.iter().map(|&z| slack(hp, z)).collect();
    if s.iter().all(|&x| x >= 0.0) && s.iter().any(|&x| x > 0.0) {
        return (verts.to_vec(), labels.to_vec());
    }
    if s.iter().all(|&x| x <= 0.0) {
        return (Vec::new(), Vec::new());
    }
    let mut pv = Vec::with_capacity(n + 1);
    let mut pl = Vec::with_capacity(n + 1);
    for i in 0..n {
        let j = (i + 1) % n;
        let cut = |a: Point, b: Point, sa: f64, sb: f64| a + (b - a) * (sa / (sa - sb));
        if s[i] >= 0.0 {
            if s[j] < 0.0 {
                if s[i] > 0.0 {
                    pv.push(verts[i]);
                    pl.push(labels[i]);
                    pv.push(cut(verts[i], verts[j], s[i], s[j]));
                    pl.push(lab);
                } else {
                    pv.push(verts[i]);
                    pl.push(lab);
                }
            } else {
                pv.push(verts[i]);
                pl.push(labels[i]);
            }
        } else if s[j] > 0.0 {
            pv.push(cut(verts[i], verts[j], s[i], s[j]));
            pl.push(labels[i]);
        }
    }
    tidy(pv, pl)
}

/// Drops zero-length edges; returns an empty polygon below 3 vertices.
fn tidy(mut v: Vec<Point>, mut l: Vec<EdgeLabel>) -> (Vec<Point>, Vec<EdgeLabel>) {
    let mut k = 0;
    while v.len() >= 3 && k < v.len() {
        let j = (k + 1) % v.len();
        let tol = 1e-12 * (1.0 + v[k].x.abs().max(v[k].y.abs()));
        if (v[k].x - v[j].x).abs() <= tol && (v[k].y - v[j].y).abs() <= tol {
            v.remove(k);
            l.remove(k);
        } else {
            k += 1;
        }
    }
    if v.len() < 3 {
        return (Vec::new(), Vec::new());
    }
    (v, l)
}

fn tag_vertices(id: usize, labels: &[EdgeLabel]) -> Vec<Option<[usize; 3]>> {
    let n = labels.len();
    (0..n)
        .map(|k| match (labels[(k + n - 1) % n], labels[k]) {
            (EdgeLabel::Site(a), EdgeLabel::Site(b)) if a != b => {
                let mut t = [id, a, b];
                t.sort_unstable();
                Some(t)
            }
            _ => None,
        })
        .collect()
}

fn cell_against(p: &WeightedPoint, others: &mut dyn Iterator<Item = &WeightedPoint>, frame: &Rect) -> Cell {
    let (mut v, mut l) = frame_polygon(frame);
    for q in others {
        if q.id == p.id {
            continue;
        }
        let hp = match bisector(p, q) {
            Ok(hp) => hp,
            Err(_) => {
                // same location: the lower site (then the smaller id) wins
                if (q.h, q.id) < (p.h, p.id) {
                    return Cell::empty(p.id);
                }
                continue;
            }
        };
        (v, l) = clip_labelled(&v, &l, &hp, EdgeLabel::Site(q.id));
        if v.is_empty() {
            return Cell::empty(p.id);
        }
    }
    let tags = tag_vertices(p.id, &l);
    Cell { id: p.id, vertices: v, labels: l, tags }
}

/// Laguerre diagram of the generators of `dual`, clipping every cell by the
/// bisectors against its dual neighbours. Vertices generated by a dual
/// simplex are snapped to the simplex apex.
pub fn build_laguerre(dual: &DualTriangulation, frame: &Rect) -> LaguerreDiagram {
    let nbrs = dual.neighbours();
    let apex: HashMap<[usize; 3], Point> = dual.simplices.iter().map(|s| (s.ids, s.apex.apex_v)).collect();
    let cells = dual
        .points
        .iter()
        .map(|p| match nbrs.get(&p.id) {
            None => Cell::empty(p.id),
            Some(ns) => {
                let mut it = ns.iter().map(|&j| dual.point(j).expect("neighbour present"));
                let mut c = cell_against(p, &mut it, frame);
                for (t, v) in c.tags.iter().zip(c.vertices.iter_mut()) {
                    if let Some(z) = t.and_then(|t| apex.get(&t)) {
                        *v = *z;
                    }
                }
                c
            }
        })
        .collect();
    LaguerreDiagram { frame: *frame, cells }
}

/// Quadratic construction against all generators; handles every input
/// including fewer than three or collinear sites.
pub fn laguerre_brute_force(points: &[WeightedPoint], frame: &Rect) -> LaguerreDiagram {
    let mut pts = points.to_vec();
    pts.sort_by_key(|p| p.id);
    let cells = pts
        .iter()
        .map(|p| {
            let mut c = cell_against(p, &mut pts.iter(), frame);
            for (t, v) in c.tags.iter().zip(c.vertices.iter_mut()) {
                if let Some([a, b, d]) = *t {
                    let get = |i: usize| pts.iter().find(|q| q.id == i).unwrap();
                    if let Ok(par) = apex_paraboloid(get(a), get(b), get(d)) {
                        if par.apex_v.dist(*v) <= 1e-9 * (1.0 + v.norm()) {
                            *v = par.apex_v;
                        }
                    }
                }
            }
            c
        })
        .collect();
    LaguerreDiagram { frame: *frame, cells }
}

/// Dual and Laguerre diagram of arbitrary points. The dual is `None` when
/// the points do not span a triangle, in which case the diagram comes from
/// the quadratic construction.
pub fn tessellate(points: &[WeightedPoint], frame: &Rect) -> Result<(Option<DualTriangulation>, LaguerreDiagram), TessellationError> {
    match build_dual(points) {
        Ok(d) => {
            let l = build_laguerre(&d, frame);
            Ok((Some(d), l))
        }
        Err(TessellationError::DegenerateConfiguration(_)) => Ok((None, laguerre_brute_force(points, frame))),
        Err(e) => Err(e),
    }
}

/// Frame used for a sampling window: the window scaled by 1.2 about its
/// center.
pub fn default_frame(window: &Rect) -> Rect {
    window.inflate(1.2)
}
