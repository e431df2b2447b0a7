//! Cell and vertex intensities and typical-cell samples.

use super::plan::run_replicates;
use super::stats::{mean_se, MeanSe};
use super::window::{simulate_window, window_design, WindowSample};
use super::EstimatorError;
use crate::densities::HeightDensity;
use crate::geometry::{Point, Rect};
use crate::rng::StreamKey;
use crate::tessellation::fixtures::{ProductTiling, QRect, Q};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One row of the intensities CSV. `se` is the standard error of
/// `gamma_0_hat`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntensityRow {
    pub density: String,
    pub window_area: f64,
    pub replicates: usize,
    pub gamma_d_hat: f64,
    pub gamma_0_hat: f64,
    pub se: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntensityEstimate {
    pub row: IntensityRow,
    /// Per-replicate cell and vertex densities of certified replicates.
    pub cells: MeanSe,
    pub vertices: MeanSe,
    pub uncertified: usize,
    pub truncation_mass: f64,
    pub warning: Option<String>,
}

fn in_window(w: &Rect, p: Point) -> bool {
    w.contains_half_open(p)
}

fn count_cells(s: &WindowSample, w: &Rect) -> usize {
    s.diagram.nonempty().filter(|c| c.lex_min().is_some_and(|p| in_window(w, p))).count()
}

fn count_vertices(s: &WindowSample, w: &Rect) -> usize {
    s.dual.as_ref().map_or(0, |d| d.simplices.iter().filter(|x| in_window(w, x.apex.apex_v)).count())
}

fn uncertified_warning(bad: usize, total: usize) -> Option<String> {
    (bad * 100 > total).then(|| format!("UncertifiedWindow: certificate failed in {bad} of {total} replicates"))
}

/// `γ̂_d` (cells per unit area, centred at the lexicographically smallest
/// vertex) and `γ̂_0` (vertices per unit area) of `𝓛(η_f)` on `window`.
/// Replicates whose envelope certificate fails are excluded and counted.
pub fn estimate_intensities(
    f: &HeightDensity,
    window: &Rect,
    replicates: usize,
    seed: u64,
    workers: usize,
) -> Result<IntensityEstimate, EstimatorError> {
    if replicates == 0 {
        return Err(EstimatorError::InvalidPlan("replicates must be >= 1".into()));
    }
    let design = window_design(f, window)?;
    let key = StreamKey::new(seed).child("intensities", 0);
    let outcomes = run_replicates(workers, replicates, |i| {
        simulate_window(f, &design, key.child("rep", i as u64))
            .map(|s| (s.certified, count_cells(&s, window), count_vertices(&s, window)))
    });
    let area = window.area();
    let mut cd = Vec::new();
    let mut c0 = Vec::new();
    let mut bad = 0;
    for o in outcomes {
        let (ok, nc, nv) = o?;
        if !ok {
            bad += 1;
            continue;
        }
        cd.push(nc as f64 / area);
        c0.push(nv as f64 / area);
    }
    let cells = mean_se(&cd);
    let vertices = mean_se(&c0);
    Ok(IntensityEstimate {
        row: IntensityRow {
            density: f.label(),
            window_area: area,
            replicates,
            gamma_d_hat: cells.mean,
            gamma_0_hat: vertices.mean,
            se: vertices.se,
        },
        cells,
        vertices,
        uncertified: bad,
        truncation_mass: design.truncation_mass,
        warning: uncertified_warning(bad, replicates),
    })
}

/// A cell with center in the window, recentred at its center.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub replicate: usize,
    pub area: f64,
    pub perimeter: f64,
    pub vertex_count: usize,
    pub vertices: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypicalCellSummary {
    pub cells: usize,
    pub area: MeanSe,
    pub perimeter: MeanSe,
    pub vertex_count: MeanSe,
    /// `(vertex count, number of cells)`, ascending.
    pub vertex_histogram: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypicalCellSample {
    /// Center convention: always `"lex_min"`.
    pub center: String,
    pub records: Vec<CellRecord>,
    /// Cells centred in the window that reach the certified frame.
    pub uncertified_cells: usize,
    pub uncertified_replicates: usize,
    pub summary: TypicalCellSummary,
    pub warning: Option<String>,
}

pub fn summarize(records: &[CellRecord]) -> TypicalCellSummary {
    let col = |g: fn(&CellRecord) -> f64| records.iter().map(g).collect::<Vec<f64>>();
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for r in records {
        *hist.entry(r.vertex_count).or_default() += 1;
    }
    TypicalCellSummary {
        cells: records.len(),
        area: mean_se(&col(|r| r.area)),
        perimeter: mean_se(&col(|r| r.perimeter)),
        vertex_count: mean_se(&col(|r| r.vertex_count as f64)),
        vertex_histogram: hist.into_iter().collect(),
    }
}

fn window_cells(s: &WindowSample, w: &Rect, replicate: usize) -> (Vec<CellRecord>, usize) {
    let mut out = Vec::new();
    let mut clipped = 0;
    for c in s.diagram.nonempty() {
        let Some(z) = c.lex_min() else { continue };
        if !in_window(w, z) {
            continue;
        }
        if c.touches_frame() {
            clipped += 1;
            continue;
        }
        out.push(CellRecord {
            replicate,
            area: c.area(),
            perimeter: c.perimeter(),
            vertex_count: c.vertices.len(),
            vertices: c.vertices.iter().map(|&v| v - z).collect(),
        });
    }
    (out, clipped)
}

/// Cells of `𝓛(η_f)` centred in `window`, pooled over replicates.
pub fn typical_cell(
    f: &HeightDensity,
    window: &Rect,
    replicates: usize,
    seed: u64,
    workers: usize,
) -> Result<TypicalCellSample, EstimatorError> {
    if replicates == 0 {
        return Err(EstimatorError::InvalidPlan("replicates must be >= 1".into()));
    }
    let design = window_design(f, window)?;
    let key = StreamKey::new(seed).child("typical_cell", 0);
    let outcomes = run_replicates(workers, replicates, |i| {
        simulate_window(f, &design, key.child("rep", i as u64)).map(|s| (s.certified, window_cells(&s, window, i)))
    });
    let mut records = Vec::new();
    let mut clipped = 0;
    let mut bad = 0;
    for o in outcomes {
        let (ok, (recs, c)) = o?;
        if !ok {
            bad += 1;
            continue;
        }
        records.extend(recs);
        clipped += c;
    }
    Ok(TypicalCellSample {
        center: "lex_min".into(),
        summary: summarize(&records),
        records,
        uncertified_cells: clipped,
        uncertified_replicates: bad,
        warning: uncertified_warning(bad, replicates),
    })
}

/// Exact `(γ_d, γ_0)` of a product tiling on a half-open window. Vertices
/// are counted from the rendered complex, independently of the cell count.
pub fn fixture_intensities(t: &ProductTiling, window: &QRect) -> (Q, Q) {
    let area = window.width() * window.height();
    let gamma_d = Q::from(t.count_centers(window)) / area;
    let grown = QRect::new(window.x0 - t.period, window.y0 - t.period, window.x1 + t.period, window.y1 + t.period);
    let mut verts: Vec<(Q, Q)> = t
        .cells(&grown)
        .iter()
        .flat_map(|c| [(c.x0, c.y0), (c.x1, c.y0), (c.x0, c.y1), (c.x1, c.y1)])
        .filter(|&(x, y)| x >= window.x0 && x < window.x1 && y >= window.y0 && y < window.y1)
        .collect();
    verts.sort();
    verts.dedup();
    (gamma_d, Q::from(verts.len() as i64) / area)
}

/// The exact typical-cell multiset `(width, height)` of a product tiling.
pub fn fixture_typical_cells(t: &ProductTiling, window: &QRect) -> Vec<(Q, Q)> {
    t.typical_cells(window)
}
