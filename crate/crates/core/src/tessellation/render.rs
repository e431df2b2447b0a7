//! JSON serialization of complexes and SVG rendering.

use super::dual::{DualTriangulation, NearTie, Simplex};
use super::laguerre::{Cell, LaguerreDiagram};
use super::skeleton::Skeleton;
use crate::geometry::{Rect, WeightedPoint};
use serde::{Deserialize, Serialize};
use std::fmt::Write;

/// Serializable form `{points, simplices, cells}` of a tessellated
/// configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Complex {
    pub points: Vec<WeightedPoint>,
    pub simplices: Vec<Simplex>,
    pub near_ties: Vec<NearTie>,
    pub frame: Rect,
    pub cells: Vec<Cell>,
}

impl Complex {
    pub fn new(points: &[WeightedPoint], dual: Option<&DualTriangulation>, diagram: &LaguerreDiagram) -> Complex {
        let mut points = points.to_vec();
        points.sort_by_key(|p| p.id);
        Complex {
            points,
            simplices: dual.map(|d| d.simplices.clone()).unwrap_or_default(),
            near_ties: dual.map(|d| d.near_ties.clone()).unwrap_or_default(),
            frame: diagram.frame,
            cells: diagram.cells.clone(),
        }
    }

    pub fn diagram(&self) -> LaguerreDiagram {
        LaguerreDiagram { frame: self.frame, cells: self.cells.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("complex serializes")
    }

    pub fn from_json(s: &str) -> Result<Complex, serde_json::Error> {
        serde_json::from_str(s)
    }
}

fn num(x: f64) -> String {
    let r = (x * 1e6).round() / 1e6;
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

/// Stroke-only SVG: one group per nonempty cell, optional dual edges and
/// skeleton overlay. The y axis points up.
pub fn render_svg(diagram: &LaguerreDiagram, dual: Option<&DualTriangulation>, skeleton: Option<&Skeleton>) -> String {
    let f = diagram.frame;
    let size = f.width().max(f.height()).max(1e-300);
    let stroke = size / 500.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="800" height="{}">"#,
        num(f.min.x),
        num(-f.max.y),
        num(f.width()),
        num(f.height()),
        (800.0 * f.height() / f.width().max(1e-300)).round()
    );
    let _ = writeln!(s, r#"<g transform="scale(1,-1)" fill="none" stroke-linejoin="round">"#);
    let _ = writeln!(
        s,
        r#"<rect x="{}" y="{}" width="{}" height="{}" stroke="gray" stroke-width="{}"/>"#,
        num(f.min.x),
        num(f.min.y),
        num(f.width()),
        num(f.height()),
        num(stroke)
    );
    for c in diagram.nonempty() {
        let mut d = String::new();
        for (k, v) in c.vertices.iter().enumerate() {
            let _ = write!(d, "{}{} {} ", if k == 0 { "M" } else { "L" }, num(v.x), num(v.y));
        }
        d.push('Z');
        let _ = writeln!(s, r#"<g id="cell-{}"><path d="{}" stroke="black" stroke-width="{}"/></g>"#, c.id, d, num(stroke));
    }
    if let Some(dual) = dual {
        let _ = writeln!(s, r#"<g id="dual" stroke="steelblue" stroke-width="{}">"#, num(stroke * 0.6));
        for (i, j) in dual.edges() {
            let (a, b) = (dual.point(i).unwrap().v, dual.point(j).unwrap().v);
            let _ = writeln!(s, r#"<path d="M{} {} L{} {}"/>"#, num(a.x), num(a.y), num(b.x), num(b.y));
        }
        let _ = writeln!(s, "</g>");
    }
    if let Some(sk) = skeleton {
        let _ = writeln!(s, r#"<g id="skeleton" stroke="firebrick" stroke-width="{}">"#, num(stroke * 2.0));
        for seg in &sk.segments {
            let _ = writeln!(s, r#"<path d="M{} {} L{} {}"/>"#, num(seg.a.x), num(seg.a.y), num(seg.b.x), num(seg.b.y));
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</g>\n</svg>\n");
    s
}
