//! Tabulated densities with linear interpolation.
//!
//! File format: a header `# support a b` (either bound may be `-inf`/`inf`)
//! followed by one `h value` pair per line. Other `#` lines are comments.

use super::DensityError;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableRepr", into = "TableRepr")]
pub struct Tabulated {
    lo: f64,
    hi: f64,
    h: Vec<f64>,
    v: Vec<f64>,
    cum: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    support: (f64, f64),
    h: Vec<f64>,
    v: Vec<f64>,
}

impl TryFrom<TableRepr> for Tabulated {
    type Error = DensityError;
    fn try_from(r: TableRepr) -> Result<Self, Self::Error> {
        Tabulated::new(r.support.0, r.support.1, r.h, r.v)
    }
}

impl From<Tabulated> for TableRepr {
    fn from(t: Tabulated) -> TableRepr {
        TableRepr { support: (t.lo, t.hi), h: t.h, v: t.v }
    }
}

impl Tabulated {
    pub fn new(lo: f64, hi: f64, h: Vec<f64>, v: Vec<f64>) -> Result<Tabulated, DensityError> {
        let bad = |m: &str| Err(DensityError::InvalidParameter(format!("custom table: {m}")));
        if !(lo < hi) {
            return bad("support must satisfy a < b");
        }
        if h.len() != v.len() || h.len() < 2 {
            return bad("need at least two (h, value) rows");
        }
        if h.windows(2).any(|w| !(w[0] < w[1])) {
            return bad("heights must be strictly increasing");
        }
        if h.iter().any(|x| !x.is_finite()) || v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return bad("entries must be finite and values nonnegative");
        }
        if h[0] < lo || *h.last().unwrap() > hi {
            return bad("table nodes must lie inside the support");
        }
        let mut cum = Vec::with_capacity(h.len());
        cum.push(0.0);
        for k in 1..h.len() {
            let prev = cum[k - 1];
            cum.push(prev + 0.5 * (h[k] - h[k - 1]) * (v[k] + v[k - 1]));
        }
        Ok(Tabulated { lo, hi, h, v, cum })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// First and last table node; the density vanishes outside.
    pub fn range(&self) -> (f64, f64) {
        (self.h[0], *self.h.last().unwrap())
    }

    pub fn total(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.h
    }

    fn segment(&self, x: f64) -> usize {
        match self.h.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(k) => k.min(self.h.len() - 2),
            Err(k) => k.saturating_sub(1).min(self.h.len() - 2),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (a, b) = self.range();
        if !(x >= a && x <= b) || x < self.lo || x > self.hi {
            return 0.0;
        }
        let k = self.segment(x);
        let t = (x - self.h[k]) / (self.h[k + 1] - self.h[k]);
        self.v[k] + t * (self.v[k + 1] - self.v[k])
    }

    /// `∫_{-∞}^x` of the interpolant (exact for the piecewise-linear model).
    pub fn cdf(&self, x: f64) -> f64 {
        let (a, b) = self.range();
        if x <= a {
            return 0.0;
        }
        if x >= b {
            return self.total();
        }
        let k = self.segment(x);
        let d = x - self.h[k];
        let slope = (self.v[k + 1] - self.v[k]) / (self.h[k + 1] - self.h[k]);
        self.cum[k] + d * (self.v[k] + 0.5 * slope * d)
    }

    /// Inverse of [`Tabulated::cdf`] for targets in `[0, total]`.
    pub fn cdf_inverse(&self, y: f64) -> f64 {
        let (a, b) = self.range();
        if y <= 0.0 {
            return a;
        }
        if y >= self.total() {
            return b;
        }
        let k = match self.cum.binary_search_by(|c| c.total_cmp(&y)) {
            Ok(k) => return self.h[k],
            Err(k) => k - 1,
        };
        let rem = y - self.cum[k];
        let slope = (self.v[k + 1] - self.v[k]) / (self.h[k + 1] - self.h[k]);
        let vk = self.v[k];
        // solve slope/2 d^2 + vk d = rem in the cancellation-free form
        let den = vk + (vk * vk + 2.0 * slope * rem).max(0.0).sqrt();
        let d = if den > 0.0 { 2.0 * rem / den } else { 0.0 };
        (self.h[k] + d).clamp(self.h[k], self.h[k + 1])
    }

    pub fn parse(text: &str) -> Result<Tabulated, DensityError> {
        let mut support = None;
        let mut h = Vec::new();
        let mut v = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| DensityError::Parse(format!("line {}: {m}", lineno + 1));
            if let Some(rest) = line.strip_prefix('#') {
                let mut it = rest.split_whitespace();
                if it.next() == Some("support") {
                    let a: f64 = it.next().ok_or_else(|| err("missing a"))?.parse().map_err(|_| err("bad a"))?;
                    let b: f64 = it.next().ok_or_else(|| err("missing b"))?.parse().map_err(|_| err("bad b"))?;
                    support = Some((a, b));
                }
                continue;
            }
            let mut it = line.split_whitespace();
            let x: f64 = it.next().ok_or_else(|| err("missing h"))?.parse().map_err(|_| err("bad h"))?;
            let y: f64 = it.next().ok_or_else(|| err("missing value"))?.parse().map_err(|_| err("bad value"))?;
            if it.next().is_some() {
                return Err(err("expected two columns"));
            }
            h.push(x);
            v.push(y);
        }
        let (a, b) = support.ok_or_else(|| DensityError::Parse("missing `# support a b` header".into()))?;
        Tabulated::new(a, b, h, v)
    }

    pub fn load(path: &Path) -> Result<Tabulated, DensityError> {
        let text = std::fs::read_to_string(path).map_err(|e| DensityError::Io(e.to_string()))?;
        Tabulated::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# support {} {}", self.lo, self.hi);
        for (x, y) in self.h.iter().zip(&self.v) {
            let _ = writeln!(s, "{x} {y}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn parse_and_interpolate() {
        let t = Tabulated::parse("# support -inf 0\n# comment\n-2 0\n-1 1\n0 1\n").unwrap();
        assert_eq!(t.support(), (f64::NEG_INFINITY, 0.0));
        assert_eq!(t.eval(-1.5), 0.5);
        assert_eq!(t.eval(-3.0), 0.0);
        assert_relative_eq!(t.total(), 1.5);
        assert_relative_eq!(t.cdf(-1.0), 0.5);
        for y in [0.01, 0.3, 0.5, 0.9, 1.4] {
            assert_relative_eq!(t.cdf(t.cdf_inverse(y)), y, max_relative = 1e-13);
        }
        assert_eq!(Tabulated::parse(&t.to_text()).unwrap(), t);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(Tabulated::parse("0 1\n1 1\n").is_err());
        assert!(Tabulated::parse("# support 0 1\n0 1\n0 1\n").is_err());
        assert!(Tabulated::parse("# support 0 1\n0 -1\n1 1\n").is_err());
        assert!(Tabulated::parse("# support 0 1\n0 1\n2 1\n").is_err());
    }
}
