//! The eleven acceptance criteria, one PASS/FAIL line each. With
//! `ACCEPTANCE_STRICT=1` the process exits non-zero when any criterion
//! fails; otherwise the summary line carries the verdict so that the rest
//! of a workspace test run still executes.

mod common;

use common::oracle::{cell_oracle, dual_oracle, random_config, same_vertex_set};
use poisson_laguerre::coupling::DensityCoupling;
use poisson_laguerre::densities::{gns_density, gns_sample, semigroup_check, ConvergenceFamily, DensityKind, Tabulated};
use poisson_laguerre::estimators::stats::{binomial_se, z_test};
use poisson_laguerre::estimators::{
    convergence_suite, estimate_coincidence, estimate_envelope, estimate_intensities, ExperimentPlan, Mode, RadiusRule,
    Scenario, SuiteConfig,
};
use poisson_laguerre::geometry::{Point, Rect, Shape};
use poisson_laguerre::quadrature::integrate;
use poisson_laguerre::rng::StreamKey;
use poisson_laguerre::sampling::{sample_density, sample_homogeneous, Region};
use poisson_laguerre::special::gamma_d;
use poisson_laguerre::stabilization::{event_hmax, event_hmin, event_bound, EventBound, StabRegion};
use poisson_laguerre::tessellation::fixtures::{lattice_fixture, FixtureKind, LatticeMixture, QRect, Q};
use poisson_laguerre::tessellation::{build_dual, build_laguerre, default_frame};
use poisson_laguerre::{HeightDensity, MarkLaw};
use std::time::Instant;

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: u32, name: &str, limit_s: f64, f: impl FnOnce() -> Outcome) -> bool {
    let t0 = Instant::now();
    let o = f();
    let secs = t0.elapsed().as_secs_f64();
    let pass = o.pass && secs <= limit_s;
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("{tag} criterion {id:>2} ({name}): {} [{secs:.1}s of {limit_s:.0}s]", o.detail);
    pass
}

fn oracle_equivalence() -> Outcome {
    let dens = [
        (HeightDensity::beta(2, 0.0).unwrap(), 0.0, 4.0),
        (HeightDensity::beta(2, 0.5).unwrap(), 0.0, 4.0),
        (HeightDensity::gaussian(2), -6.0, 2.0),
        (HeightDensity::marked(2, 1.0, MarkLaw::Uniform { width: 1.0 }, 1.0).unwrap(), 0.0, 1.0),
    ];
    let frame = default_frame(&Rect::new(0.0, 0.0, 10.0, 10.0));
    let mut bad = Vec::new();
    for rep in 0..200u64 {
        let mut rng = StreamKey::new(2024).child("acceptance_config", rep).rng();
        let (f, lo, hi) = &dens[(rep % 4) as usize];
        let n = 3 + (rep as usize * 13) % 38;
        let pts = random_config(f, *lo, *hi, n, 10.0, &mut rng);
        let Ok(dual) = build_dual(&pts) else {
            bad.push(format!("rep {rep}: construction failed"));
            continue;
        };
        let got: Vec<[usize; 3]> = dual.simplices.iter().map(|s| s.ids).collect();
        if got != dual_oracle(&pts).0 {
            bad.push(format!("rep {rep}: simplex sets differ"));
            continue;
        }
        let lag = build_laguerre(&dual, &frame);
        for (g, p) in pts.iter().enumerate() {
            let cell = lag.cell(p.id).unwrap();
            let want = cell_oracle(&pts, g, &frame);
            let ok = if cell.is_empty() { want.len() < 3 } else { same_vertex_set(&cell.vertices, &want, 1e-9) };
            if !ok {
                bad.push(format!("rep {rep}: cell {g} differs"));
            }
        }
    }
    Outcome { pass: bad.is_empty(), detail: format!("200 configurations, {} mismatches {:?}", bad.len(), bad.iter().take(3).collect::<Vec<_>>()) }
}

fn fractional_integrals() -> Outcome {
    let table = Tabulated::new(0.0, 3.0, vec![0.0, 1.0, 2.0, 3.0], vec![0.2, 1.0, 0.5, 0.0]).unwrap();
    let kinds: Vec<HeightDensity> = vec![
        HeightDensity::beta(2, 0.0).unwrap(),
        HeightDensity::beta(2, 0.5).unwrap(),
        HeightDensity::beta(2, -0.5).unwrap(),
        HeightDensity::beta_prime(2, 3.5).unwrap(),
        HeightDensity::gaussian(2),
        HeightDensity::shifted_beta(2, 4.0).unwrap(),
        HeightDensity::shifted_beta_prime(2, 5.0).unwrap(),
        HeightDensity::marked(2, 1.0, MarkLaw::Exponential { rate: 1.0 }, 2.0).unwrap(),
        HeightDensity::custom(2, table).unwrap(),
    ];
    let mut rng = StreamKey::new(77).rng();
    let mut worst_closed: f64 = 0.0;
    let mut worst_semi: f64 = 0.0;
    let mut compared = 0;
    for f in &kinds {
        let (lo, hi) = f.support();
        let a = if lo.is_finite() { lo } else { -6.0 };
        let b = if hi.is_finite() { hi } else { a.max(-6.0) + 8.0 };
        let xs: Vec<f64> = (0..20).map(|_| a + (b - a) * rand::Rng::random_range(&mut rng, 0.02..0.98)).collect();
        let closed_available = !matches!(f.kind, DensityKind::Custom { .. } | DensityKind::Marked { .. });
        if closed_available {
            for &x in &xs {
                for alpha in [1.0, 2.0] {
                    let c = f.frac_integral(alpha, x).unwrap();
                    let q = f.frac_integral_numeric(alpha, x).unwrap();
                    worst_closed = worst_closed.max((c - q).abs() / c.abs().max(1e-300));
                    compared += 1;
                }
            }
        }
        // d = 2: (1, d/2) and (d/2, 1) coincide with (1, 1)
        let grid: Vec<f64> = xs.iter().copied().take(5).collect();
        worst_semi = worst_semi.max(semigroup_check(f, 1.0, 1.0, &grid).unwrap());
        let f3 = HeightDensity::new(f.kind.clone(), 3).unwrap();
        for (al, be) in [(1.0, 1.0), (1.0, 1.5), (1.5, 1.0)] {
            worst_semi = worst_semi.max(semigroup_check(&f3, al, be, &grid).unwrap());
        }
    }
    Outcome {
        pass: worst_closed <= 1e-8 && worst_semi <= 1e-6,
        detail: format!("closed vs quadrature max rel {worst_closed:.2e} over {compared} values; semigroup max {worst_semi:.2e}"),
    }
}

fn event_bounds() -> Outcome {
    let reps = 10_000u64;
    let mut lines = Vec::new();
    let mut pass = true;
    let a = 1.0;
    for t_cap in [4.0, 9.0, 16.0] {
        let bound = event_bound(&EventBound::HmaxHomogeneous { gamma: 1.0, d: 2, a, t_cap }).unwrap();
        let disk = Shape::disk(Point::ORIGIN, a + f64::sqrt(t_cap));
        let key = StreamKey::new(41).child("hmax", t_cap as u64);
        let fails = (0..reps)
            .filter(|&i| {
                let c = sample_homogeneous(1.0, &disk, &mut key.child("rep", i).rng());
                !event_hmax(&c.points, a, t_cap).unwrap_or(false)
            })
            .count();
        let p = fails as f64 / reps as f64;
        let ok = p <= bound + 3.0 * binomial_se(bound, reps as usize);
        pass &= ok;
        lines.push(format!("Hmax T={t_cap}: {p:.4} vs {bound:.2e}"));
    }
    let f = HeightDensity::beta(2, 0.5).unwrap();
    for t in [0.1, 0.5] {
        let bound = event_bound(&EventBound::HminDensity { f: f.clone(), a, t }).unwrap();
        let region = Region::new(Shape::disk(Point::ORIGIN, a + f64::sqrt(t)), 0.0, t);
        let key = StreamKey::new(41).child("hmin", (t * 10.0) as u64);
        let fails = (0..reps)
            .filter(|&i| {
                let c = sample_density(&f, &region, &mut key.child("rep", i).rng()).unwrap();
                !c.points.is_empty() && !event_hmin(&c.points, a, t).unwrap()
            })
            .count();
        let p = fails as f64 / reps as f64;
        let ok = p <= bound + 3.0 * binomial_se(bound.min(1.0), reps as usize);
        pass &= ok;
        lines.push(format!("Hmin t={t}: {p:.4} vs {bound:.4}"));
    }
    Outcome { pass, detail: lines.join("; ") }
}

fn coupling_bound() -> Outcome {
    let reps = 10_000usize;
    let f = HeightDensity::gaussian(2);
    let region = StabRegion::K1 { big_r: 1.0, r: 2.0 }.bounding_region().unwrap();
    let mut pass = true;
    let mut lines = Vec::new();
    for beta in [4.0, 16.0, 64.0] {
        let f_n = HeightDensity::shifted_beta(2, beta).unwrap();
        let c = DensityCoupling::new(&f, &f_n, region, Vec::new()).unwrap();
        let l1 = c.l1_bound();
        let key = StreamKey::new(4).child("beta", beta as u64);
        let k = (0..reps).filter(|&i| c.disagrees(key.child("rep", i as u64))).count();
        let p = k as f64 / reps as f64;
        let b1 = l1.min(1.0);
        let b2 = 1.5 * l1;
        let ok = p <= b1 + 3.0 * binomial_se(b1, reps) && p <= b2 + 3.0 * binomial_se(b2.min(1.0), reps);
        pass &= ok;
        lines.push(format!("beta={beta}: freq {p:.4}, L1 {l1:.4}"));
    }
    Outcome { pass, detail: lines.join("; ") }
}

fn beta_to_pv_coincidence() -> Outcome {
    let fam = ConvergenceFamily::beta_to_pv(2);
    let grid: Vec<u64> = [-0.5, -0.9, -0.99].iter().map(|&b| ConvergenceFamily::index_for_beta(b)).collect();
    let mut plan = ExperimentPlan::new("beta_to_pv", fam, Mode::C2Dual, 2.0, grid, 2000, 5);
    plan.radius = RadiusRule::Fixed { r: 4.0 };
    let est = estimate_coincidence(&plan, 1).unwrap();
    let p: Vec<f64> = est.iter().map(|e| e.row.p_hat).collect();
    let se: Vec<f64> = p.iter().map(|&x| binomial_se(x, 2000)).collect();
    let trend = (1..p.len()).all(|k| p[k] >= p[k - 1] - (se[k].powi(2) + se[k - 1].powi(2)).sqrt());
    let last = *p.last().unwrap();
    let certs: Vec<f64> = est.iter().map(|e| e.row.cert_rate).collect();
    Outcome {
        pass: trend && last >= 0.8,
        detail: format!("p_hat {p:.4?} (cert {certs:.3?}), nondecreasing={trend}, p_hat(-0.99)={last:.4} needs >= 0.8"),
    }
}

fn pv_intensity() -> Outcome {
    let w = Rect::new(0.0, 0.0, 10.0, 10.0);
    let beta = estimate_intensities(&HeightDensity::beta(2, -0.99).unwrap(), &w, 500, 6, 1).unwrap();
    let pv = estimate_intensities(&HeightDensity::homogeneous(2, gamma_d(2)).unwrap(), &w, 500, 60, 1).unwrap();
    let t = z_test(&beta.vertices, &pv.vertices);
    Outcome {
        pass: t.p_value >= 0.01 && beta.uncertified == 0 && pv.uncertified == 0,
        detail: format!(
            "vertex intensity beta(-0.99) {:.5} vs PV(1/pi^2) {:.5}, z={:.3}, p={:.3}; cell intensity from vertices {:.5} vs {:.6}",
            beta.vertices.mean,
            pv.vertices.mean,
            t.z,
            t.p_value,
            beta.vertices.mean / 2.0,
            gamma_d(2)
        ),
    }
}

fn marked_envelope() -> Outcome {
    let fam = ConvergenceFamily::marked(2, 1.0, MarkLaw::Uniform { width: 1.0 }).unwrap();
    let mut plan = ExperimentPlan::new("marked_to_pv", fam, Mode::C2LaguerreEnvelope, 2.0, vec![1, 10, 100], 500, 7);
    plan.radius = RadiusRule::Fixed { r: 4.0 };
    let est = estimate_envelope(&plan, &[0.1], 1).unwrap();
    let freq: Vec<f64> = est.iter().map(|e| e.rows[0].exceed_freq).collect();
    let decreasing = freq.windows(2).all(|w| w[1] < w[0]);
    Outcome {
        pass: decreasing && freq[2] <= 0.2,
        detail: format!("exceedance at eps=0.1 for n=1,10,100: {freq:.4?}"),
    }
}

fn fixtures_exact() -> Outcome {
    let q = |n: i64, d: i64| Q::new(n, d);
    let unit = QRect::ints(0, 0, 1, 1);
    let big = QRect::ints(-3, -2, 5, 6);
    let mut ok = true;
    let mut multisets = Vec::new();
    for v in [1u8, 2] {
        for shift in [(q(0, 1), q(0, 1)), (q(1, 7), q(2, 5)), (q(5, 6), q(1, 3))] {
            let t = lattice_fixture(&FixtureKind::TwoTilings { variant: v, shift }).unwrap();
            ok &= t.intensity(&unit) == Q::from(16) && t.intensity(&big) == Q::from(16);
            if shift.0 == q(1, 7) {
                multisets.push(t.typical_cells(&big));
            }
        }
    }
    let same = multisets[0] == multisets[1];
    let mut mix_ok = true;
    for n in 1..=12u32 {
        let m = LatticeMixture::new(n).unwrap();
        let want = Q::from(1) - Q::new(1, 1i64 << n) + Q::from(1i64 << n);
        mix_ok &= m.intensity() == want;
    }
    Outcome {
        pass: ok && same && mix_ok,
        detail: format!("two_tilings intensity 16: {ok}; typical-cell multisets equal: {same}; mixture formula n=1..12: {mix_ok}"),
    }
}

fn gns_concentration() -> Outcome {
    let mut worst: f64 = 0.0;
    let norm = |f: &HeightDensity, s: f64| -> f64 {
        let g = |r: f64| 2.0 * std::f64::consts::PI * r * gns_density(f, s, &[r, 0.0]).unwrap();
        let mut cuts = vec![0.0, 1.0];
        if let DensityKind::Marked { n, .. } = f.kind {
            let k = 1.0 - 1.0 / (n * s * s);
            if k > 0.0 {
                cuts.insert(1, k.sqrt());
            }
        }
        cuts.windows(2).map(|w| integrate(g, w[0], w[1], 1e-12, 1e-14).unwrap().value).sum()
    };
    let q = MarkLaw::Uniform { width: 1.0 };
    worst = worst.max((norm(&HeightDensity::beta(2, 0.5).unwrap(), 1.0) - 1.0).abs());
    let mut means = Vec::new();
    for n in [1.0, 10.0, 100.0] {
        let f = HeightDensity::marked(2, 1.0, q.clone(), n).unwrap();
        worst = worst.max((norm(&f, 1.0) - 1.0).abs());
        let mut rng = StreamKey::new(9).child("gns", n as u64).rng();
        let m: f64 = (0..100_000)
            .map(|_| {
                let y = gns_sample(&f, 1.0, &mut rng).unwrap();
                1.0 - y.iter().map(|c| c * c).sum::<f64>().sqrt()
            })
            .sum::<f64>()
            / 1e5;
        means.push(m);
    }
    let decreasing = means.windows(2).all(|w| w[1] < w[0]);
    Outcome {
        pass: worst <= 1e-6 && decreasing && means[2] < 0.05,
        detail: format!("normalization error {worst:.2e}; E[1-|Y|] for n=1,10,100: {means:.5?}"),
    }
}

fn scaling_identity() -> Outcome {
    let lambda = 4.0;
    let f = HeightDensity::beta(2, 0.5).unwrap();
    let g = f.affine(lambda, 0.0).unwrap();
    let a = estimate_intensities(&f, &Rect::new(0.0, 0.0, 10.0, 10.0), 500, 10, 1).unwrap();
    // sqrt(λ)·𝓛(η_g) on [0,10]^2 is 𝓛(η_g) on [0,5]^2 scaled up
    let b = estimate_intensities(&g, &Rect::new(0.0, 0.0, 5.0, 5.0), 500, 11, 1).unwrap();
    let mut bs = b.vertices;
    bs.mean /= lambda;
    bs.se /= lambda;
    let t = z_test(&a.vertices, &bs);
    Outcome {
        pass: t.z.abs() <= 3.0,
        detail: format!("vertex intensity {:.5} vs rescaled {:.5}, z={:.3}", a.vertices.mean, bs.mean, t.z),
    }
}

fn reproducibility() -> Outcome {
    let cfg = SuiteConfig { replicates: 12, intensity_replicates: 4, seed: 11, ..SuiteConfig::default() };
    let dir = tempfile::tempdir().unwrap();
    let mut same = true;
    let mut files = 0;
    for s in Scenario::ALL {
        let mut outputs = Vec::new();
        for workers in [1usize, 3] {
            let out = dir.path().join(format!("{}_{workers}", s.name()));
            convergence_suite(s, &cfg, workers).unwrap().write_dir(&out).unwrap();
            let mut names: Vec<_> = std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().path()).collect();
            names.sort();
            outputs.push(names.iter().map(|p| (p.file_name().unwrap().to_owned(), std::fs::read(p).unwrap())).collect::<Vec<_>>());
        }
        files += outputs[0].len();
        same &= outputs[0] == outputs[1];
    }
    Outcome { pass: same, detail: format!("{files} files per worker count, byte-identical: {same}") }
}

fn main() {
    let results = [
        run(1, "tessellation oracle equivalence", 120.0, oracle_equivalence),
        run(2, "fractional-integral correctness", 60.0, fractional_integrals),
        run(3, "stabilization bound conformance", 300.0, event_bounds),
        run(4, "coupling bound", 300.0, coupling_bound),
        run(5, "beta to Voronoi coincidence trend", 900.0, beta_to_pv_coincidence),
        run(6, "vertex intensity vs Poisson-Voronoi", 600.0, pv_intensity),
        run(7, "marked envelope convergence", 600.0, marked_envelope),
        run(8, "deterministic fixtures", 10.0, fixtures_exact),
        run(9, "g_ns normalization and concentration", 60.0, gns_concentration),
        run(10, "linear transformation scaling", 300.0, scaling_identity),
        run(11, "reproducibility across workers", 60.0, reproducibility),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 && std::env::var_os("ACCEPTANCE_STRICT").is_some_and(|v| v == "1") {
        std::process::exit(1);
    }
}
