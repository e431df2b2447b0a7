//! Deterministic rectangular tilings in exact rational arithmetic: shifted
//! dyadic lattices, two product tilings with equal typical cells, and the
//! lattice mixture whose cell intensity diverges.

use super::laguerre::{Cell, EdgeLabel, LaguerreDiagram};
use super::TessellationError;
use crate::geometry::{Point, Rect};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

pub type Q = Ratio<i64>;

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

fn floor_div(x: Q, p: Q) -> i64 {
    (x / p).floor().to_integer()
}

/// Closed box with rational corners.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QRect {
    pub x0: Q,
    pub y0: Q,
    pub x1: Q,
    pub y1: Q,
}

impl QRect {
    pub fn new(x0: Q, y0: Q, x1: Q, y1: Q) -> QRect {
        QRect { x0, y0, x1, y1 }
    }

    pub fn ints(x0: i64, y0: i64, x1: i64, y1: i64) -> QRect {
        QRect::new(Q::from(x0), Q::from(y0), Q::from(x1), Q::from(y1))
    }

    pub fn width(&self) -> Q {
        self.x1 - self.x0
    }

    pub fn height(&self) -> Q {
        self.y1 - self.y0
    }

    pub fn to_rect(&self) -> Rect {
        Rect::new(to_f64(self.x0), to_f64(self.y0), to_f64(self.x1), to_f64(self.y1))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FixtureKind {
    /// `U + 2^{-n} z + [0, 2^{-n}]^2` with `U = shift ∈ [0, 2^{-n})^2`.
    ShiftedLattice { n: u32, shift: (Q, Q) },
    /// Product tilings with breakpoints `0, 1/6, 1/3, 2/3` (variant 1) or
    /// `0, 1/3, 1/2, 5/6` (variant 2), period 1, shifted by `shift`.
    TwoTilings { variant: u8, shift: (Q, Q) },
}

/// A product tiling: the same periodic breakpoints on both axes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductTiling {
    /// Sorted breakpoints in `[0, period)`.
    pub breaks: Vec<Q>,
    pub period: Q,
    pub shift: (Q, Q),
}

const MAX_LEVEL: u32 = 24;

pub fn lattice_fixture(kind: &FixtureKind) -> Result<ProductTiling, TessellationError> {
    let in_unit = |s: Q, p: Q| s >= Q::from(0) && s < p;
    match kind {
        FixtureKind::ShiftedLattice { n, shift } => {
            if *n > MAX_LEVEL {
                return Err(TessellationError::InvalidInput(format!("lattice level {n} exceeds {MAX_LEVEL}")));
            }
            let p = Q::new(1, 1i64 << n);
            if !(in_unit(shift.0, p) && in_unit(shift.1, p)) {
                return Err(TessellationError::InvalidInput("shift outside the fundamental domain".into()));
            }
            Ok(ProductTiling { breaks: vec![Q::from(0)], period: p, shift: *shift })
        }
        FixtureKind::TwoTilings { variant, shift } => {
            let breaks = match variant {
                1 => vec![q(0, 1), q(1, 6), q(1, 3), q(2, 3)],
                2 => vec![q(0, 1), q(1, 3), q(1, 2), q(5, 6)],
                _ => return Err(TessellationError::InvalidInput(format!("unknown tiling variant {variant}"))),
            };
            let one = Q::from(1);
            if !(in_unit(shift.0, one) && in_unit(shift.1, one)) {
                return Err(TessellationError::InvalidInput("shift outside the fundamental domain".into()));
            }
            Ok(ProductTiling { breaks, period: one, shift: *shift })
        }
    }
}

impl ProductTiling {
    /// Breakpoints on one axis inside `[lo, hi]`, with the next one beyond
    /// each end.
    fn axis(&self, s: Q, lo: Q, hi: Q) -> Vec<Q> {
        let p = self.period;
        let mut out = Vec::new();
        let mut k = floor_div(lo - s, p) - 1;
        loop {
            for &b in &self.breaks {
                let x = s + b + p * Q::from(k);
                out.push(x);
            }
            if s + p * Q::from(k) > hi {
                break;
            }
            k += 1;
        }
        out.sort();
        out
    }

    /// Cell min-corners in `[lo, hi)` along one axis.
    fn count_axis(&self, s: Q, lo: Q, hi: Q) -> i64 {
        self.axis(s, lo, hi).into_iter().filter(|&x| x >= lo && x < hi).count() as i64
    }

    /// Cells whose lexicographically smallest vertex (the lower-left
    /// corner) lies in the half-open window; equals the vertex count for
    /// product tilings.
    pub fn count_centers(&self, w: &QRect) -> i64 {
        self.count_axis(self.shift.0, w.x0, w.x1) * self.count_axis(self.shift.1, w.y0, w.y1)
    }

    /// Cell intensity: centers per unit area.
    pub fn intensity(&self, w: &QRect) -> Q {
        Q::from(self.count_centers(w)) / (w.width() * w.height())
    }

    /// Cells meeting the closed window in positive area, unclipped.
    pub fn cells(&self, w: &QRect) -> Vec<QRect> {
        let xs = self.axis(self.shift.0, w.x0, w.x1);
        let ys = self.axis(self.shift.1, w.y0, w.y1);
        let mut out = Vec::new();
        for yy in ys.windows(2) {
            for xx in xs.windows(2) {
                if xx[1] > w.x0 && xx[0] < w.x1 && yy[1] > w.y0 && yy[0] < w.y1 {
                    out.push(QRect::new(xx[0], yy[0], xx[1], yy[1]));
                }
            }
        }
        out
    }

    /// Recentered cells `(width, height)` with center in the half-open
    /// window, sorted: the typical-cell multiset over that window.
    pub fn typical_cells(&self, w: &QRect) -> Vec<(Q, Q)> {
        let mut out: Vec<(Q, Q)> = self
            .cells(w)
            .into_iter()
            .filter(|c| c.x0 >= w.x0 && c.x0 < w.x1 && c.y0 >= w.y0 && c.y0 < w.y1)
            .map(|c| (c.width(), c.height()))
            .collect();
        out.sort();
        out
    }

    /// The tiling clipped to `frame` as a planar complex with grid
    /// adjacency labels.
    pub fn to_diagram(&self, frame: &QRect) -> LaguerreDiagram {
        let xs = clip_axis(self.axis(self.shift.0, frame.x0, frame.x1), frame.x0, frame.x1);
        let ys = clip_axis(self.axis(self.shift.1, frame.y0, frame.y1), frame.y0, frame.y1);
        let nx = xs.len() - 1;
        let ny = ys.len() - 1;
        let id = |i: usize, j: usize| j * nx + i;
        let mut cells = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let lab = |ok: bool, di: isize, dj: isize| {
                    if ok {
                        EdgeLabel::Site(id((i as isize + di) as usize, (j as isize + dj) as usize))
                    } else {
                        EdgeLabel::Frame
                    }
                };
                let p = |x: Q, y: Q| Point::new(to_f64(x), to_f64(y));
                cells.push(Cell {
                    id: id(i, j),
                    vertices: vec![p(xs[i], ys[j]), p(xs[i + 1], ys[j]), p(xs[i + 1], ys[j + 1]), p(xs[i], ys[j + 1])],
                    labels: vec![lab(j > 0, 0, -1), lab(i + 1 < nx, 1, 0), lab(j + 1 < ny, 0, 1), lab(i > 0, -1, 0)],
                    tags: vec![None; 4],
                });
            }
        }
        LaguerreDiagram { frame: frame.to_rect(), cells }
    }
}

fn clip_axis(v: Vec<Q>, lo: Q, hi: Q) -> Vec<Q> {
    let mut out: Vec<Q> = v.into_iter().filter(|&x| x > lo && x < hi).collect();
    out.insert(0, lo);
    out.push(hi);
    out
}

/// The mixture `𝒯_n`: the level-`n` lattice with probability `2^{-n}`,
/// otherwise the unit lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticeMixture {
    pub n: u32,
}

impl LatticeMixture {
    pub fn new(n: u32) -> Result<LatticeMixture, TessellationError> {
        if n == 0 || n > MAX_LEVEL {
            return Err(TessellationError::InvalidInput(format!("mixture level must be in 1..={MAX_LEVEL}")));
        }
        Ok(LatticeMixture { n })
    }

    pub fn fine_probability(&self) -> Q {
        Q::new(1, 1i64 << self.n)
    }

    fn parts(&self) -> [(Q, ProductTiling); 2] {
        let zero = (Q::from(0), Q::from(0));
        let p = self.fine_probability();
        let coarse = lattice_fixture(&FixtureKind::ShiftedLattice { n: 0, shift: zero }).unwrap();
        let fine = lattice_fixture(&FixtureKind::ShiftedLattice { n: self.n, shift: zero }).unwrap();
        [(Q::from(1) - p, coarse), (p, fine)]
    }

    /// Expected number of cell centers in `[0, 1)^2`.
    pub fn intensity(&self) -> Q {
        let unit = QRect::ints(0, 0, 1, 1);
        self.parts().iter().map(|(w, t)| *w * t.intensity(&unit)).sum()
    }

    /// Typical-cell law: `(side length, probability)` pairs.
    pub fn typical_cell_law(&self) -> Vec<(Q, Q)> {
        let unit = QRect::ints(0, 0, 1, 1);
        let gamma = self.intensity();
        self.parts()
            .iter()
            .map(|(w, t)| (t.period, *w * Q::from(t.count_centers(&unit)) / gamma))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_cell() {
        let t = lattice_fixture(&FixtureKind::ShiftedLattice { n: 0, shift: (q(0, 1), q(0, 1)) }).unwrap();
        let d = t.to_diagram(&QRect::ints(0, 0, 1, 1));
        assert_eq!(d.cells.len(), 1);
        assert_eq!(d.cells[0].area(), 1.0);
    }

    #[test]
    fn sixteen_per_unit_square() {
        for v in [1, 2] {
            let t = lattice_fixture(&FixtureKind::TwoTilings { variant: v, shift: (q(1, 7), q(2, 5)) }).unwrap();
            assert_eq!(t.count_centers(&QRect::ints(0, 0, 1, 1)), 16);
            assert_eq!(t.cells(&QRect::ints(0, 0, 1, 1)).len(), 25);
        }
    }

    #[test]
    fn bad_shift() {
        assert!(lattice_fixture(&FixtureKind::ShiftedLattice { n: 1, shift: (q(1, 2), q(0, 1)) }).is_err());
    }
}
