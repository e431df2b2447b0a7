//! Named convergence suites bundling the estimators.

use super::capacity::estimate_capacity;
use super::coincidence::estimate_coincidence;
use super::envelope::estimate_envelope;
use super::intensity::{estimate_intensities, typical_cell, IntensityRow, TypicalCellSummary};
use super::plan::{ExperimentPlan, Mode, RadiusRule};
use super::stats::{ks_two_sample, normal_sf, z_test, MeanSe};
use super::{CapacityRow, CoincidenceRow, EnvelopeRow, EstimatorError};
use crate::densities::{ConvergenceFamily, HeightDensity, MarkLaw};
use crate::geometry::{Rect, Shape};
use crate::special::gamma_d;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    BetaToPv,
    BetaToGaussian,
    #[serde(rename = "betaprime_to_gaussian")]
    BetaPrimeToGaussian,
    MarkedToPv,
    Constant,
}

impl Scenario {
    pub const ALL: [Scenario; 5] =
        [Scenario::BetaToPv, Scenario::BetaToGaussian, Scenario::BetaPrimeToGaussian, Scenario::MarkedToPv, Scenario::Constant];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::BetaToPv => "beta_to_pv",
            Scenario::BetaToGaussian => "beta_to_gaussian",
            Scenario::BetaPrimeToGaussian => "betaprime_to_gaussian",
            Scenario::MarkedToPv => "marked_to_pv",
            Scenario::Constant => "constant",
        }
    }

    pub fn family(self) -> ConvergenceFamily {
        match self {
            Scenario::BetaToPv => ConvergenceFamily::beta_to_pv(2),
            Scenario::BetaToGaussian => ConvergenceFamily::rescaled_beta(2),
            Scenario::BetaPrimeToGaussian => ConvergenceFamily::rescaled_beta_prime(2),
            Scenario::MarkedToPv => {
                ConvergenceFamily::marked(2, 1.0, MarkLaw::Uniform { width: 1.0 }).expect("valid marked family")
            }
            Scenario::Constant => ConvergenceFamily::constant(HeightDensity::beta(2, 0.5).expect("valid beta")),
        }
    }

    pub fn default_grid(self) -> Vec<u64> {
        match self {
            // β = -0.5, -0.9, -0.99
            Scenario::BetaToPv => vec![2, 10, 100],
            Scenario::BetaToGaussian => vec![4, 16, 64],
            // heavy lower tails below β = 8 push the certificate level far down
            Scenario::BetaPrimeToGaussian => vec![8, 32, 128],
            Scenario::MarkedToPv => vec![1, 10, 100],
            Scenario::Constant => vec![1, 2, 3],
        }
    }

    pub fn mode(self) -> Mode {
        match self {
            Scenario::BetaToPv | Scenario::MarkedToPv => Mode::C2Dual,
            _ => Mode::C1Dual,
        }
    }
}

impl FromStr for Scenario {
    type Err = EstimatorError;

    fn from_str(s: &str) -> Result<Scenario, EstimatorError> {
        Scenario::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| EstimatorError::UnknownScenario(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Replicates per grid point for coincidence and envelope estimates.
    pub replicates: usize,
    /// Replicates for intensity, typical-cell and capacity estimates.
    pub intensity_replicates: usize,
    #[serde(rename = "R")]
    pub big_r: f64,
    /// Fixed coupling radius; by default `R` for Voronoi limits and the
    /// block schedule otherwise.
    pub radius: Option<f64>,
    pub n_grid: Option<Vec<u64>>,
    pub eps_grid: Vec<f64>,
    /// `[x0, y0, x1, y1]` of the intensity window.
    pub window: [f64; 4],
}

impl Default for SuiteConfig {
    fn default() -> SuiteConfig {
        SuiteConfig {
            seed: 0,
            replicates: 200,
            intensity_replicates: 100,
            big_r: 2.0,
            radius: None,
            n_grid: None,
            eps_grid: vec![0.05, 0.1, 0.2],
            window: [0.0, 0.0, 10.0, 10.0],
        }
    }
}

impl SuiteConfig {
    pub fn window_rect(&self) -> Rect {
        let [a, b, c, d] = self.window;
        Rect::new(a, b, c, d)
    }

    pub fn plan(&self, scenario: Scenario, mode: Mode) -> ExperimentPlan {
        let mut p = ExperimentPlan::new(
            scenario.name(),
            scenario.family(),
            mode,
            self.big_r,
            self.n_grid.clone().unwrap_or_else(|| scenario.default_grid()),
            self.replicates,
            self.seed,
        );
        p.window = self.window_rect();
        p.radius = match (self.radius, mode) {
            (Some(r), _) => RadiusRule::Fixed { r },
            (None, Mode::C1Dual | Mode::C1Laguerre) => RadiusRule::Schedule { k_max: 4 },
            // 3r >= 2(R + r) keeps the coupling disk over the stabilization region
            (None, _) => RadiusRule::Fixed { r: 2.0 * self.big_r },
        };
        p
    }
}

/// Scalar comparison between two estimates, or an estimate and a target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub name: String,
    pub left: f64,
    pub right: f64,
    pub se: f64,
    pub z: f64,
    pub p_value: f64,
    pub ks_p_value: Option<f64>,
    /// Not rejected at significance 0.01.
    pub consistent: bool,
}

impl Comparison {
    fn two_sample(name: &str, a: &MeanSe, b: &MeanSe, ks: Option<f64>) -> Comparison {
        let t = z_test(a, b);
        let consistent = t.p_value >= 0.01 && ks.is_none_or(|p| p >= 0.01);
        Comparison { name: name.into(), left: a.mean, right: b.mean, se: t.se, z: t.z, p_value: t.p_value, ks_p_value: ks, consistent }
    }

    fn against_target(name: &str, est: f64, se: f64, target: f64) -> Comparison {
        let z = if se > 0.0 { (est - target) / se } else { 0.0 };
        let p_value = 2.0 * normal_sf(z.abs());
        Comparison { name: name.into(), left: est, right: target, se, z, p_value, ks_p_value: None, consistent: p_value >= 0.01 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelledCapacity {
    pub model: String,
    pub rows: Vec<CapacityRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelledSummary {
    pub model: String,
    pub summary: TypicalCellSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub scenario: String,
    pub config: SuiteConfig,
    pub coincidence: Vec<CoincidenceRow>,
    pub envelope: Vec<EnvelopeRow>,
    pub intensities: Vec<IntensityRow>,
    pub capacity: Vec<LabelledCapacity>,
    pub typical_cells: Vec<LabelledSummary>,
    pub comparisons: Vec<Comparison>,
    pub warnings: Vec<String>,
}

/// Writes rows with a header line; an empty slice still yields the header
/// of `T` when `header` is given.
pub fn write_csv<T: Serialize>(rows: &[T], path: &Path, header: &str) -> Result<(), EstimatorError> {
    let io = |e: &dyn std::fmt::Display| EstimatorError::Io(format!("{}: {e}", path.display()));
    if rows.is_empty() {
        return std::fs::write(path, format!("{header}\n")).map_err(|e| io(&e));
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| io(&e))?;
    for r in rows {
        w.serialize(r).map_err(|e| io(&e))?;
    }
    w.flush().map_err(|e| io(&e))
}

pub const COINCIDENCE_HEADER: &str = "scenario,n,r_n,R,replicates,p_hat,ci_lo,ci_hi,cert_rate";
pub const INTENSITY_HEADER: &str = "density,window_area,replicates,gamma_d_hat,gamma_0_hat,se";
pub const ENVELOPE_HEADER: &str = "scenario,n,eps,exceed_freq,ci_lo,ci_hi";

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `coincidence.csv`, `envelope.csv`, `intensities.csv` and
    /// `report.json` in `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<(), EstimatorError> {
        std::fs::create_dir_all(dir).map_err(|e| EstimatorError::Io(e.to_string()))?;
        write_csv(&self.coincidence, &dir.join("coincidence.csv"), COINCIDENCE_HEADER)?;
        write_csv(&self.envelope, &dir.join("envelope.csv"), ENVELOPE_HEADER)?;
        write_csv(&self.intensities, &dir.join("intensities.csv"), INTENSITY_HEADER)?;
        std::fs::write(dir.join("report.json"), self.to_json() + "\n").map_err(|e| EstimatorError::Io(e.to_string()))
    }
}

struct ModelStats {
    label: String,
    vertices: MeanSe,
    areas: Vec<f64>,
    area: MeanSe,
}

fn model_stats(
    f: &HeightDensity,
    cfg: &SuiteConfig,
    salt: u64,
    workers: usize,
    report: &mut SuiteReport,
) -> Result<ModelStats, EstimatorError> {
    let w = cfg.window_rect();
    let seed = cfg.seed ^ salt;
    let est = estimate_intensities(f, &w, cfg.intensity_replicates, seed, workers)?;
    report.warnings.extend(est.warning.clone());
    report.intensities.push(est.row.clone());
    let tc = typical_cell(f, &w, cfg.intensity_replicates, seed, workers)?;
    report.warnings.extend(tc.warning.clone());
    report.typical_cells.push(LabelledSummary { model: f.label(), summary: tc.summary.clone() });
    Ok(ModelStats {
        label: f.label(),
        vertices: est.vertices,
        areas: tc.records.iter().map(|r| r.area).collect(),
        area: tc.summary.area,
    })
}

fn capacity_pair(
    a: &HeightDensity,
    b: &HeightDensity,
    cfg: &SuiteConfig,
    workers: usize,
    report: &mut SuiteReport,
) -> Result<(), EstimatorError> {
    let w = cfg.window_rect();
    let set = Shape::disk(w.center(), 0.05);
    let mut ests = Vec::new();
    for (k, f) in [a, b].into_iter().enumerate() {
        let e = estimate_capacity(f, std::slice::from_ref(&set), &w, cfg.intensity_replicates, cfg.seed ^ (0xca9 + k as u64), workers)?;
        report.capacity.push(LabelledCapacity { model: f.label(), rows: e.rows.clone() });
        ests.push(e.rows[0].clone());
    }
    let ms = |r: &CapacityRow| {
        let p = r.t_hat;
        MeanSe { n: r.replicates, mean: p, sd: (p * (1.0 - p)).sqrt(), se: (p * (1.0 - p) / r.replicates as f64).sqrt() }
    };
    report.comparisons.push(Comparison::two_sample("capacity_small_disk", &ms(&ests[0]), &ms(&ests[1]), None));
    Ok(())
}

/// Runs the scenario's coincidence (and, for `marked_to_pv`, envelope)
/// estimates on its grid, then compares intensities, typical cells and a
/// capacity value between the last family member and the limit.
pub fn convergence_suite(scenario: Scenario, cfg: &SuiteConfig, workers: usize) -> Result<SuiteReport, EstimatorError> {
    let mut report = SuiteReport {
        scenario: scenario.name().into(),
        config: cfg.clone(),
        coincidence: Vec::new(),
        envelope: Vec::new(),
        intensities: Vec::new(),
        capacity: Vec::new(),
        typical_cells: Vec::new(),
        comparisons: Vec::new(),
        warnings: Vec::new(),
    };
    let plan = cfg.plan(scenario, scenario.mode());
    for e in estimate_coincidence(&plan, workers)? {
        let errs = e.outcomes.iter().filter(|o| o.error.is_some()).count();
        if errs > 0 {
            report.warnings.push(format!("coincidence n={}: {errs} replicate(s) failed", e.row.n));
        }
        report.coincidence.push(e.row);
    }
    if scenario == Scenario::MarkedToPv {
        let plan = cfg.plan(scenario, Mode::C2LaguerreEnvelope);
        for e in estimate_envelope(&plan, &cfg.eps_grid, workers)? {
            if !e.errors.is_empty() {
                report.warnings.push(format!("envelope n={}: {} replicate(s) failed", e.n, e.errors.len()));
            }
            report.envelope.extend(e.rows);
        }
    }
    let family = scenario.family();
    let n_last = *plan.n_grid.iter().max().expect("validated grid");
    let member = family.member(n_last)?;
    let limit = family.limit();
    let a = model_stats(&member, cfg, 0x1, workers, &mut report)?;
    let b = model_stats(&limit, cfg, 0x2, workers, &mut report)?;
    report.comparisons.push(Comparison::two_sample(
        &format!("vertex_intensity[{} vs {}]", a.label, b.label),
        &a.vertices,
        &b.vertices,
        None,
    ));
    let (_, ks) = ks_two_sample(&a.areas, &b.areas);
    report.comparisons.push(Comparison::two_sample(
        &format!("typical_cell_area[{} vs {}]", a.label, b.label),
        &a.area,
        &b.area,
        Some(ks).filter(|p| p.is_finite()),
    ));
    if scenario == Scenario::BetaToPv {
        // two vertices per cell in a planar normal tessellation
        report.comparisons.push(Comparison::against_target("cell_intensity_vs_gamma_d", a.vertices.mean / 2.0, a.vertices.se / 2.0, gamma_d(2)));
        capacity_pair(&member, &limit, cfg, workers, &mut report)?;
    }
    Ok(report)
}
