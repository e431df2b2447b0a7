mod config;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use config::{CertifyKind, RunConfig};
use poisson_laguerre::densities::DensityError;
use poisson_laguerre::estimators::{convergence_suite, EstimatorError, Scenario};
use poisson_laguerre::rng::StreamKey;
use poisson_laguerre::sampling::{read_points_csv, sample_density, write_points_csv, SamplingError};
use poisson_laguerre::stabilization::StabError;
use poisson_laguerre::tessellation::{build_dual, build_laguerre, default_frame, render_svg, Complex, TessellationError};
use poisson_laguerre::{certify_window, CertifyMode, DualTriangulation, HeightDensity, Rect, Region, Shape, WeightedPoint};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "plt", version, about = "Poisson-Laguerre tessellations: sampling, tessellation, certificates and convergence experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config's `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Also write an SVG rendering (tessellate).
    #[arg(long, global = true)]
    svg: bool,
    /// Allow overwriting existing outputs.
    #[arg(long, global = true)]
    force: bool,
    /// Worker threads for experiments; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Sample a height-density Poisson process to `points.csv`.
    Sample,
    /// Build the dual and the Laguerre diagram of a points file to `complex.json`.
    Tessellate,
    /// Print the stabilization events of a points file as JSON.
    Certify,
    /// Run a named convergence scenario.
    Experiment,
    /// Render a complex JSON file to `render.svg`.
    Render,
}

/// Exit status 2 for usage and configuration problems, 3 for everything
/// that goes wrong while running.
enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

type Res<T> = Result<T, Failure>;

trait Classify<T> {
    fn usage(self) -> Res<T>;
    fn runtime(self) -> Res<T>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn usage(self) -> Res<T> {
        self.map_err(|e| Failure::Usage(e.into()))
    }
    fn runtime(self) -> Res<T> {
        self.map_err(|e| Failure::Runtime(e.into()))
    }
}

fn estimator_failure(e: EstimatorError) -> Failure {
    match e {
        EstimatorError::InvalidPlan(_) | EstimatorError::UnknownScenario(_) | EstimatorError::Density(DensityError::InvalidParameter(_)) => {
            Failure::Usage(e.into())
        }
        other => Failure::Runtime(other.into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("plt: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("plt: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> Res<()> {
    let path = cli.config.as_ref().ok_or_else(|| Failure::Usage(anyhow!("--config is required")))?;
    let cfg = RunConfig::load(path).usage()?;
    if cli.workers == 0 {
        return Err(Failure::Usage(anyhow!("--workers must be at least 1")));
    }
    match cli.cmd {
        Cmd::Sample => sample(cli, &cfg),
        Cmd::Tessellate => tessellate(cli, &cfg),
        Cmd::Certify => certify(cli, &cfg),
        Cmd::Experiment => experiment(cli, &cfg),
        Cmd::Render => render(cli, &cfg),
    }
}

fn seed(cli: &Cli, cfg: &RunConfig) -> Res<u64> {
    cli.seed.or(cfg.seed).ok_or_else(|| Failure::Usage(anyhow!("no seed: set `seed` in the config or pass --seed")))
}

/// Target path inside the output directory, refusing to clobber.
fn target(cli: &Cli, name: &str) -> Res<PathBuf> {
    std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display())).runtime()?;
    let p = cli.out.join(name);
    if p.exists() && !cli.force {
        return Err(Failure::Usage(anyhow!("{} exists; pass --force to overwrite", p.display())));
    }
    Ok(p)
}

fn write(p: &Path, body: &str) -> Res<()> {
    std::fs::write(p, body).with_context(|| format!("writing {}", p.display())).runtime()
}

fn rect(a: [f64; 4]) -> Res<Rect> {
    let [x0, y0, x1, y1] = a;
    if !(a.iter().all(|v| v.is_finite()) && x1 > x0 && y1 > y0) {
        return Err(Failure::Usage(anyhow!("rectangle {a:?} needs x0 < x1 and y0 < y1")));
    }
    Ok(Rect::new(x0, y0, x1, y1))
}

fn read_points(p: &Path) -> Res<Vec<WeightedPoint>> {
    let f = std::fs::File::open(p).with_context(|| format!("opening {}", p.display())).usage()?;
    read_points_csv(f).map_err(|e| Failure::Usage(anyhow!("{}: {e}", p.display())))
}

fn sample(cli: &Cli, cfg: &RunConfig) -> Res<()> {
    let s = RunConfig::section(&cfg.sample, "sample").usage()?;
    let seed = seed(cli, cfg)?;
    let f = HeightDensity::new(s.density.clone(), 2).usage()?;
    let [lo, hi] = s.heights;
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Failure::Usage(anyhow!("heights {:?} must satisfy lo <= hi", s.heights)));
    }
    let region = Region::new(Shape::rect(rect(s.window)?), lo, hi);
    let out = target(cli, "points.csv")?;
    let c = sample_density(&f, &region, &mut StreamKey::new(seed).child("sample", 0).rng()).map_err(|e| match e {
        SamplingError::InfiniteMass | SamplingError::Density(DensityError::InvalidParameter(_)) => Failure::Usage(e.into()),
        other => Failure::Runtime(other.into()),
    })?;
    let mut buf = Vec::new();
    write_points_csv(&c.points, &mut buf).runtime()?;
    std::fs::write(&out, buf).with_context(|| format!("writing {}", out.display())).runtime()?;
    eprintln!("plt: {} points from {} written to {}", c.len(), f.label(), out.display());
    Ok(())
}

fn bbox(points: &[WeightedPoint]) -> Rect {
    let mut r = Rect::new(f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        r.min.x = r.min.x.min(p.v.x);
        r.min.y = r.min.y.min(p.v.y);
        r.max.x = r.max.x.max(p.v.x);
        r.max.y = r.max.y.max(p.v.y);
    }
    r
}

fn tessellate(cli: &Cli, cfg: &RunConfig) -> Res<()> {
    let s = RunConfig::section(&cfg.tessellate, "tessellate").usage()?;
    let points = read_points(&cfg.resolve(&s.points))?;
    if points.len() < 3 {
        return Err(Failure::Usage(anyhow!("need at least 3 points, found {}", points.len())));
    }
    let dual = build_dual(&points).map_err(|e| match e {
        TessellationError::DegenerateConfiguration(_) | TessellationError::InvalidInput(_) => Failure::Usage(e.into()),
        other => Failure::Runtime(other.into()),
    })?;
    let frame = match s.frame {
        Some(a) => rect(a)?,
        None => default_frame(&bbox(&points)),
    };
    let json_path = target(cli, "complex.json")?;
    let svg_path = if cli.svg { Some(target(cli, "complex.svg")?) } else { None };
    let lag = build_laguerre(&dual, &frame);
    if dual.has_near_ties() {
        eprintln!("plt: warning: {} near ties resolved by id order", dual.near_ties.len());
    }
    write(&json_path, &(Complex::new(&points, Some(&dual), &lag).to_json() + "\n"))?;
    if let Some(p) = svg_path {
        write(&p, &render_svg(&lag, Some(&dual), None))?;
    }
    eprintln!("plt: {} simplices, {} nonempty cells", dual.simplices.len(), lag.nonempty().count());
    Ok(())
}

fn certify(_cli: &Cli, cfg: &RunConfig) -> Res<()> {
    let s = RunConfig::section(&cfg.certify, "certify").usage()?;
    let points = read_points(&cfg.resolve(&s.points))?;
    if points.is_empty() {
        return Err(Failure::Usage(anyhow!("{} holds no points", s.points.display())));
    }
    let mode = match s.mode {
        CertifyKind::Dual => CertifyMode::Dual { big_r: s.big_r, r: s.r, t: s.t },
        CertifyKind::Laguerre => CertifyMode::Laguerre { big_r: s.big_r, r: s.r, t: s.t },
    };
    let c = certify_window(&points, mode).map_err(|e| match e {
        StabError::OutOfRange(_) | StabError::EmptyConfiguration => Failure::Usage(e.into()),
        other => Failure::Runtime(other.into()),
    })?;
    println!("{}", serde_json::to_string(&c).runtime()?);
    Ok(())
}

const SUITE_FILES: [&str; 4] = ["coincidence.csv", "envelope.csv", "intensities.csv", "report.json"];

fn experiment(cli: &Cli, cfg: &RunConfig) -> Res<()> {
    let s = RunConfig::section(&cfg.experiment, "experiment").usage()?;
    let scenario: Scenario = s.scenario.parse().map_err(estimator_failure)?;
    let mut suite = s.suite.clone();
    suite.seed = seed(cli, cfg)?;
    for f in SUITE_FILES {
        target(cli, f)?;
    }
    let report = convergence_suite(scenario, &suite, cli.workers).map_err(estimator_failure)?;
    report.write_dir(&cli.out).map_err(estimator_failure)?;
    for w in &report.warnings {
        eprintln!("plt: warning: {w}");
    }
    eprintln!("plt: {} written to {}", scenario.name(), cli.out.display());
    Ok(())
}

fn render(cli: &Cli, cfg: &RunConfig) -> Res<()> {
    let s = RunConfig::section(&cfg.render, "render").usage()?;
    let p = cfg.resolve(&s.complex);
    let text = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display())).usage()?;
    let c = Complex::from_json(&text).with_context(|| format!("parsing {}", p.display())).usage()?;
    let out = target(cli, "render.svg")?;
    let dual = (!c.simplices.is_empty()).then(|| DualTriangulation {
        points: c.points.clone(),
        simplices: c.simplices.clone(),
        near_ties: c.near_ties.clone(),
    });
    write(&out, &render_svg(&c.diagram(), dual.as_ref(), None))
}
