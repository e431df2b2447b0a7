//! Regular (weighted Delaunay) triangulation by incremental insertion.

use super::TessellationError;
use crate::geometry::exact::{orient2d, power_test, power_test_collinear, Sign};
use crate::geometry::{apex_paraboloid, Paraboloid, Point, WeightedPoint};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

const GHOST: usize = usize::MAX;

/// A dual simplex: sorted generator ids plus the downward paraboloid through
/// the three lifted generators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Simplex {
    pub ids: [usize; 3],
    pub apex: Paraboloid,
}

/// Four generators found (within tolerance) on one downward paraboloid, or
/// a buried point lying on the paraboloid of its covering simplex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearTie {
    pub ids: [usize; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualTriangulation {
    /// Generators sorted by id.
    pub points: Vec<WeightedPoint>,
    /// Simplices sorted by id triple.
    pub simplices: Vec<Simplex>,
    pub near_ties: Vec<NearTie>,
}

impl DualTriangulation {
    pub fn point(&self, id: usize) -> Option<&WeightedPoint> {
        self.points.binary_search_by_key(&id, |p| p.id).ok().map(|i| &self.points[i])
    }

    pub fn has_near_ties(&self) -> bool {
        !self.near_ties.is_empty()
    }

    /// Corner locations of a simplex.
    pub fn corners(&self, s: &Simplex) -> [Point; 3] {
        s.ids.map(|i| self.point(i).expect("simplex id present").v)
    }

    /// Ids owning at least one simplex, sorted.
    pub fn extreme_ids(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.simplices.iter().flat_map(|s| s.ids).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Sorted dual neighbours of every extreme generator.
    pub fn neighbours(&self) -> HashMap<usize, Vec<usize>> {
        let mut out: HashMap<usize, Vec<usize>> = HashMap::new();
        for s in &self.simplices {
            let [a, b, c] = s.ids;
            for (x, y) in [(a, b), (b, c), (c, a)] {
                out.entry(x).or_default().push(y);
                out.entry(y).or_default().push(x);
            }
        }
        for v in out.values_mut() {
            v.sort_unstable();
            v.dedup();
        }
        out
    }

    /// Undirected edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .simplices
            .iter()
            .flat_map(|s| {
                let [a, b, c] = s.ids;
                [(a, b), (b, c), (a, c)]
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Clone, Copy, Debug)]
struct Tri {
    v: [usize; 3],
    /// `n[i]` lies across the edge opposite `v[i]`.
    n: [usize; 3],
    alive: bool,
}

struct Mesh<'a> {
    pts: &'a [WeightedPoint],
    tris: Vec<Tri>,
    free: Vec<usize>,
    stamp: Vec<u32>,
    epoch: u32,
    last: usize,
}

#[inline]
fn nx(i: usize) -> usize {
    (i + 1) % 3
}

#[inline]
fn pv(i: usize) -> usize {
    (i + 2) % 3
}

impl<'a> Mesh<'a> {
    fn loc(&self, i: usize) -> Point {
        self.pts[i].v
    }

    fn orient(&self, a: usize, b: usize, c: usize) -> f64 {
        orient2d(self.loc(a), self.loc(b), self.loc(c)).0
    }

    fn conflict(&self, t: usize, p: usize) -> bool {
        let tri = &self.tris[t];
        match tri.v.iter().position(|&x| x == GHOST) {
            Some(g) => {
                let (a, b) = (tri.v[nx(g)], tri.v[pv(g)]);
                let o = self.orient(a, b, p);
                if o != 0.0 {
                    return o > 0.0;
                }
                power_test_collinear(&self.pts[a], &self.pts[b], &self.pts[p]).0 > 0.0
            }
            None => {
                let [a, b, c] = tri.v.map(|i| &self.pts[i]);
                power_test(a, b, c, &self.pts[p]).0 > 0.0
            }
        }
    }

    fn alloc(&mut self, t: Tri) -> usize {
        if let Some(i) = self.free.pop() {
            self.tris[i] = t;
            self.stamp[i] = 0;
            i
        } else {
            self.tris.push(t);
            self.stamp.push(0);
            self.tris.len() - 1
        }
    }

    fn any_alive(&self) -> usize {
        self.tris.iter().position(|t| t.alive).expect("mesh is never empty")
    }

    /// Visibility walk towards `p`: returns a finite triangle containing
    /// `p` or a ghost triangle whose outer half-plane contains it.
    fn locate(&self, p: usize) -> usize {
        let mut t = if self.tris[self.last].alive { self.last } else { self.any_alive() };
        if self.tris[t].v.contains(&GHOST) {
            let g = self.tris[t].v.iter().position(|&x| x == GHOST).unwrap();
            t = self.tris[t].n[g];
        }
        let limit = 4 * self.tris.len() + 64;
        for step in 0..limit {
            let tri = self.tris[t];
            if tri.v.contains(&GHOST) {
                return t;
            }
            let mut moved = false;
            for k in 0..3 {
                let i = (k + step) % 3;
                if self.orient(tri.v[nx(i)], tri.v[pv(i)], p) < 0.0 {
                    t = tri.n[i];
                    moved = true;
                    break;
                }
            }
            if !moved {
                return t;
            }
        }
        // cycling walk: fall back to a scan
        (0..self.tris.len())
            .find(|&i| self.tris[i].alive && self.conflict(i, p))
            .unwrap_or(t)
    }

    fn seed(&self, t: usize, p: usize) -> Option<usize> {
        if self.conflict(t, p) {
            return Some(t);
        }
        let tri = self.tris[t];
        if tri.v.contains(&GHOST) {
            return None;
        }
        for i in 0..3 {
            if self.orient(tri.v[nx(i)], tri.v[pv(i)], p) == 0.0 && self.conflict(tri.n[i], p) {
                return Some(tri.n[i]);
            }
        }
        None
    }

    fn insert(&mut self, p: usize) {
        let start = self.locate(p);
        let Some(seed) = self.seed(start, p) else {
            return;
        };
        self.epoch += 1;
        let ep = self.epoch;
        let mut cavity = vec![seed];
        self.stamp[seed] = ep;
        let mut k = 0;
        while k < cavity.len() {
            let t = cavity[k];
            k += 1;
            for i in 0..3 {
                let u = self.tris[t].n[i];
                if self.stamp[u] != ep && self.conflict(u, p) {
                    self.stamp[u] = ep;
                    cavity.push(u);
                }
            }
        }
        // Keep the cavity star-shaped from p.
        loop {
            let mut grow = None;
            'scan: for &t in &cavity {
                let tri = self.tris[t];
                for i in 0..3 {
                    let u = tri.n[i];
                    if self.stamp[u] == ep {
                        continue;
                    }
                    let (a, b) = (tri.v[nx(i)], tri.v[pv(i)]);
                    if a != GHOST && b != GHOST && !self.tris[u].v.contains(&GHOST) && self.orient(p, a, b) <= 0.0 {
                        grow = Some(u);
                        break 'scan;
                    }
                }
            }
            match grow {
                Some(u) => {
                    self.stamp[u] = ep;
                    cavity.push(u);
                }
                None => break,
            }
        }
        // boundary: (outside triangle, edge start, edge end, old inside triangle)
        let mut boundary = Vec::new();
        for &t in &cavity {
            let tri = self.tris[t];
            for i in 0..3 {
                let u = tri.n[i];
                if self.stamp[u] != ep {
                    boundary.push((u, tri.v[nx(i)], tri.v[pv(i)], t));
                }
            }
        }
        for &t in &cavity {
            self.tris[t].alive = false;
            self.free.push(t);
        }
        let mut made: Vec<(usize, usize, usize)> = Vec::with_capacity(boundary.len());
        for &(out, a, b, old) in &boundary {
            let nt = self.alloc(Tri { v: [p, a, b], n: [out, GHOST, GHOST], alive: true });
            self.stamp[nt] = 0;
            let o = &mut self.tris[out];
            for j in 0..3 {
                if o.n[j] == old && o.v[j] != a && o.v[j] != b {
                    o.n[j] = nt;
                }
            }
            made.push((nt, a, b));
        }
        for &(nt, a, b) in &made {
            let across_b = made.iter().find(|m| m.1 == b).map(|m| m.0).expect("closed cavity boundary");
            let across_a = made.iter().find(|m| m.2 == a).map(|m| m.0).expect("closed cavity boundary");
            self.tris[nt].n[1] = across_b;
            self.tris[nt].n[2] = across_a;
        }
        self.last = made.iter().find(|m| m.1 != GHOST && m.2 != GHOST).map_or(made[0].0, |m| m.0);
    }

    fn finite(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.tris.len()).filter(|&i| self.tris[i].alive && !self.tris[i].v.contains(&GHOST))
    }

    fn ids(&self, v: [usize; 3]) -> [usize; 3] {
        let mut s = v.map(|i| self.pts[i].id);
        s.sort_unstable();
        s
    }

    /// Power-test residual class of the vertex of `u` opposite the edge
    /// shared with `t` (slot `i` of `t`).
    fn edge_sign(&self, t: usize, i: usize) -> Option<(usize, usize, Sign)> {
        let u = self.tris[t].n[i];
        if !self.tris[u].alive || self.tris[u].v.contains(&GHOST) {
            return None;
        }
        let tri = self.tris[t];
        let q = *self.tris[u].v.iter().find(|&&x| x != tri.v[nx(i)] && x != tri.v[pv(i)])?;
        let [a, b, c] = tri.v.map(|x| &self.pts[x]);
        let (val, scale) = power_test(a, b, c, &self.pts[q]);
        Some((u, q, Sign::with_tolerance(val, scale)))
    }

    /// Flips the edge opposite `t.v[i]`, shared with `u` whose far vertex is
    /// `q`, when the result is valid. Returns whether a flip happened.
    fn flip(&mut self, t: usize, i: usize, u: usize, q: usize) -> bool {
        let tt = self.tris[t];
        let (a, b, c) = (tt.v[i], tt.v[nx(i)], tt.v[pv(i)]);
        if self.orient(a, b, q) <= 0.0 || self.orient(a, q, c) <= 0.0 {
            return false;
        }
        let uu = self.tris[u];
        let j = uu.v.iter().position(|&x| x == q).unwrap();
        debug_assert_eq!(uu.v[nx(j)], c);
        let t_nb_b = tt.n[nx(i)];
        let t_nb_c = tt.n[pv(i)];
        let u_nb_c = uu.n[nx(j)];
        let u_nb_b = uu.n[pv(j)];
        self.tris[t] = Tri { v: [a, b, q], n: [u_nb_c, u, t_nb_c], alive: true };
        self.tris[u] = Tri { v: [a, q, c], n: [u_nb_b, t_nb_b, t], alive: true };
        for s in self.tris[u_nb_c].n.iter_mut() {
            if *s == u {
                *s = t;
            }
        }
        for s in self.tris[t_nb_b].n.iter_mut() {
            if *s == t {
                *s = u;
            }
        }
        true
    }

    /// Flips co-paraboloidal edges towards the lexicographically smallest
    /// pair of id triples.
    fn canonicalise(&mut self) {
        for _ in 0..64 {
            let mut changed = false;
            let tris: Vec<usize> = self.finite().collect();
            for t in tris {
                for i in 0..3 {
                    if !self.tris[t].alive || self.tris[t].v.contains(&GHOST) {
                        break;
                    }
                    let Some((u, q, Sign::Zero)) = self.edge_sign(t, i) else {
                        continue;
                    };
                    let tt = self.tris[t];
                    let (a, b, c) = (tt.v[i], tt.v[nx(i)], tt.v[pv(i)]);
                    let mut now = [self.ids([a, b, c]), self.ids([c, b, q])];
                    now.sort_unstable();
                    let mut alt = [self.ids([a, b, q]), self.ids([a, q, c])];
                    alt.sort_unstable();
                    if alt < now && self.flip(t, i, u, q) {
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }
}

/// Builds the regular triangulation of `points` (any order, unique ids).
pub fn build_dual(points: &[WeightedPoint]) -> Result<DualTriangulation, TessellationError> {
    let mut pts: Vec<WeightedPoint> = points.to_vec();
    pts.sort_by_key(|p| p.id);
    if pts.windows(2).any(|w| w[0].id == w[1].id) {
        return Err(TessellationError::InvalidInput("duplicate point ids".into()));
    }
    if pts.iter().any(|p| !(p.v.is_finite() && p.h.is_finite())) {
        return Err(TessellationError::InvalidInput("non-finite coordinates".into()));
    }
    if pts.len() < 3 {
        return Err(TessellationError::DegenerateConfiguration(format!("{} points; need at least 3", pts.len())));
    }
    let i0 = 0;
    let i1 = (1..pts.len()).find(|&i| pts[i].v != pts[i0].v);
    let i2 = i1.and_then(|i1| (i1 + 1..pts.len()).find(|&i| orient2d(pts[i0].v, pts[i1].v, pts[i].v).0 != 0.0));
    let (Some(mut i1), Some(mut i2)) = (i1, i2) else {
        return Err(TessellationError::DegenerateConfiguration("all points are collinear".into()));
    };
    if orient2d(pts[i0].v, pts[i1].v, pts[i2].v).0 < 0.0 {
        std::mem::swap(&mut i1, &mut i2);
    }
    let mut mesh = Mesh { pts: &pts, tris: Vec::new(), free: Vec::new(), stamp: Vec::new(), epoch: 0, last: 0 };
    let first = [i0, i1, i2];
    mesh.tris.push(Tri { v: first, n: [1, 2, 3], alive: true });
    for i in 0..3 {
        let (a, b) = (first[nx(i)], first[pv(i)]);
        mesh.tris.push(Tri { v: [b, a, GHOST], n: [GHOST; 3], alive: true });
    }
    mesh.stamp = vec![0; 4];
    for t in 1..4 {
        for s in 0..3 {
            let tri = mesh.tris[t];
            let (a, b) = (tri.v[nx(s)], tri.v[pv(s)]);
            mesh.tris[t].n[s] = (0..4)
                .find(|&o| o != t && mesh.tris[o].v.contains(&a) && mesh.tris[o].v.contains(&b))
                .unwrap();
        }
    }
    for p in 0..pts.len() {
        if !first.contains(&p) {
            mesh.insert(p);
        }
    }
    mesh.canonicalise();

    let mut near_ties = Vec::new();
    let finite: Vec<usize> = mesh.finite().collect();
    let mut used = vec![false; pts.len()];
    for &t in &finite {
        for &x in &mesh.tris[t].v {
            used[x] = true;
        }
        for i in 0..3 {
            if let Some((u, q, Sign::Zero)) = mesh.edge_sign(t, i) {
                if t < u {
                    let v = mesh.tris[t].v;
                    let mut ids = [pts[v[0]].id, pts[v[1]].id, pts[v[2]].id, pts[q].id];
                    ids.sort_unstable();
                    near_ties.push(NearTie { ids });
                }
            }
        }
    }
    for p in (0..pts.len()).filter(|&p| !used[p]) {
        let t = mesh.locate(p);
        let tri = mesh.tris[t];
        if tri.v.contains(&GHOST) {
            continue;
        }
        let [a, b, c] = tri.v.map(|x| &pts[x]);
        let (val, scale) = power_test(a, b, c, &pts[p]);
        if Sign::with_tolerance(val, scale) == Sign::Zero {
            let mut ids = [a.id, b.id, c.id, pts[p].id];
            ids.sort_unstable();
            near_ties.push(NearTie { ids });
        }
    }
    near_ties.sort_unstable_by_key(|t| t.ids);
    near_ties.dedup();

    let mut simplices = Vec::with_capacity(finite.len());
    for &t in &finite {
        let v = mesh.tris[t].v;
        let apex = apex_paraboloid(&pts[v[0]], &pts[v[1]], &pts[v[2]])
            .map_err(|_| TessellationError::DegenerateConfiguration("flat simplex in triangulation".into()))?;
        simplices.push(Simplex { ids: mesh.ids(v), apex });
    }
    simplices.sort_by_key(|s| s.ids);
    Ok(DualTriangulation { points: pts.clone(), simplices, near_ties })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wp(id: usize, x: f64, y: f64, h: f64) -> WeightedPoint {
        WeightedPoint::new(id, Point::new(x, y), h)
    }

    #[test]
    fn three_points_one_simplex() {
        let d = build_dual(&[wp(0, 0.0, 0.0, 0.3), wp(1, 1.0, 0.1, -2.0), wp(2, 0.2, 0.9, 5.0)]).unwrap();
        assert_eq!(d.simplices.len(), 1);
        assert_eq!(d.simplices[0].ids, [0, 1, 2]);
    }

    #[test]
    fn buried_centre() {
        let pts = [wp(0, 0.0, 0.0, 0.0), wp(1, 1.0, 0.0, 0.0), wp(2, 1.0, 1.0, 0.0), wp(3, 0.0, 1.0, 0.0), wp(4, 0.5, 0.5, 10.0)];
        let d = build_dual(&pts).unwrap();
        let ids: Vec<[usize; 3]> = d.simplices.iter().map(|s| s.ids).collect();
        assert_eq!(ids, vec![[0, 1, 2], [0, 2, 3]]);
        assert_eq!(d.near_ties.len(), 1);
        assert_eq!(d.extreme_ids(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn collinear_is_degenerate() {
        let pts: Vec<_> = (0..5).map(|i| wp(i, i as f64, 2.0 * i as f64, 0.0)).collect();
        assert!(matches!(build_dual(&pts), Err(TessellationError::DegenerateConfiguration(_))));
        assert!(matches!(build_dual(&pts[..2]), Err(TessellationError::DegenerateConfiguration(_))));
    }

    #[test]
    fn coincident_locations_keep_the_lower_site() {
        let pts = [wp(0, 0.0, 0.0, 0.0), wp(1, 2.0, 0.0, 0.0), wp(2, 0.0, 2.0, 0.0), wp(3, 0.0, 0.0, -1.0), wp(4, 2.0, 2.0, 0.5)];
        let d = build_dual(&pts).unwrap();
        assert!(!d.extreme_ids().contains(&0));
        assert!(d.extreme_ids().contains(&3));
    }
}
