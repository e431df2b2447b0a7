use poisson_laguerre::rng::StreamKey;
use poisson_laguerre::sampling::{sample_density, sample_homogeneous, sample_marking, Region};
use poisson_laguerre::{HeightDensity, MarkLaw, Point, Rect, Shape};
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson};
use std::f64::consts::PI;

fn unit() -> Shape {
    Shape::rect(Rect::new(0.0, 0.0, 1.0, 1.0))
}

/// Pearson statistic of Poisson counts, tail cells pooled until each has
/// expectation at least 5; returns (statistic, degrees of freedom).
fn poisson_chi2(counts: &[usize], mean: f64) -> (f64, f64) {
    let n = counts.len() as f64;
    let law = Poisson::new(mean).unwrap();
    let max = *counts.iter().max().unwrap();
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    let mut left = 1.0;
    for k in 0..=max + 1 {
        let p = if k == max + 1 { left } else { law.pmf(k as u64) };
        left -= p;
        obs += counts.iter().filter(|&&c| c == k || (k == max + 1 && c > max)).count() as f64;
        exp += n * p;
        if exp >= 5.0 {
            cells.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if let Some(last) = cells.last_mut() {
        last.0 += obs;
        last.1 += exp;
    }
    let stat = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    (stat, (cells.len() - 1) as f64)
}

fn catalog() -> Vec<(HeightDensity, f64, f64)> {
    vec![
        (HeightDensity::beta(2, 0.5).unwrap(), 0.0, 3.0),
        (HeightDensity::beta(2, -0.9).unwrap(), 0.0, 5.0),
        (HeightDensity::beta_prime(2, 3.5).unwrap(), -5.0, -0.3),
        (HeightDensity::gaussian(2), f64::NEG_INFINITY, 3.0),
        (HeightDensity::shifted_beta(2, 4.0).unwrap(), -8.0, 3.0),
        (HeightDensity::shifted_beta_prime(2, 5.0).unwrap(), f64::NEG_INFINITY, 3.0),
        (HeightDensity::marked(2, 2.0, MarkLaw::Uniform { width: 1.0 }, 2.0).unwrap(), 0.0, 1.0),
    ]
}

#[test]
fn counts_are_poisson() {
    for (k, (f, lo, hi)) in catalog().into_iter().enumerate() {
        let region = Region::new(Shape::disk(Point::ORIGIN, 2.0), lo, hi);
        let mass = region.mass(&f).unwrap();
        let key = StreamKey::new(21).child("chi2", k as u64);
        let counts: Vec<usize> =
            (0..10_000).map(|i| sample_density(&f, &region, &mut key.child("rep", i).rng()).unwrap().len()).collect();
        let (stat, dof) = poisson_chi2(&counts, mass);
        let crit = ChiSquared::new(dof).unwrap().inverse_cdf(0.99);
        assert!(stat <= crit, "{}: chi2 {stat:.2} > {crit:.2} (mass {mass:.3})", f.label());
    }
}

#[test]
fn heights_follow_the_restricted_density() {
    for (k, (f, lo, hi)) in catalog().into_iter().enumerate() {
        let mut rng = StreamKey::new(22).child("ks", k as u64).rng();
        let mut hs: Vec<f64> = Vec::new();
        // large spatial box so that one draw carries many points
        while hs.len() < 100_000 {
            let region = Region::new(Shape::rect(Rect::new(0.0, 0.0, 100.0, 100.0)), lo, hi);
            let c = sample_density(&f, &region, &mut rng).unwrap();
            hs.extend(c.points.iter().map(|p| p.h));
        }
        hs.sort_by(f64::total_cmp);
        let c_lo = if lo.is_finite() { f.cdf(lo).unwrap() } else { 0.0 };
        let c_hi = f.cdf(hi).unwrap();
        let n = hs.len() as f64;
        let ks = hs
            .iter()
            .enumerate()
            .map(|(i, &h)| {
                let c = (f.cdf(h).unwrap() - c_lo) / (c_hi - c_lo);
                (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks <= 0.02, "{}: KS {ks}", f.label());
    }
}

#[test]
fn beta_heights_against_the_power_law() {
    // Beta(β) restricted to [0, b] has cdf (h/b)^{β+1}
    let (beta, b) = (0.5, 2.0);
    let f = HeightDensity::beta(2, beta).unwrap();
    let mut rng = StreamKey::new(23).rng();
    let c = sample_density(&f, &Region::new(Shape::rect(Rect::new(0.0, 0.0, 300.0, 300.0)), 0.0, b), &mut rng).unwrap();
    let mut hs: Vec<f64> = c.points.iter().map(|p| p.h).collect();
    assert!(hs.len() > 50_000);
    hs.sort_by(f64::total_cmp);
    let n = hs.len() as f64;
    let ks = hs
        .iter()
        .enumerate()
        .map(|(i, &h)| {
            let c = (h / b).powf(beta + 1.0);
            (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs())
        })
        .fold(0.0, f64::max);
    assert!(ks <= 0.02, "KS {ks}");
}

#[test]
fn void_probabilities() {
    let f = HeightDensity::beta(2, 0.5).unwrap();
    let big = Region::new(Shape::rect(Rect::new(0.0, 0.0, 4.0, 4.0)), 0.0, 2.0);
    let mut pick = StreamKey::new(24).child("subregions", 0).rng();
    let reps = 4000u64;
    for j in 0..5u64 {
        let x0: f64 = rand::Rng::random_range(&mut pick, 0.0..3.0);
        let y0: f64 = rand::Rng::random_range(&mut pick, 0.0..3.0);
        let side: f64 = rand::Rng::random_range(&mut pick, 0.3..1.0);
        let t0: f64 = rand::Rng::random_range(&mut pick, 0.0..1.0);
        let sub = Region::new(Shape::rect(Rect::new(x0, y0, x0 + side, y0 + side)), t0, t0 + 0.8);
        let p0 = (-sub.mass(&f).unwrap()).exp();
        let key = StreamKey::new(24).child("void", j);
        let empty = (0..reps)
            .filter(|&i| {
                let c = sample_density(&f, &big, &mut key.child("rep", i).rng()).unwrap();
                !c.points.iter().any(|p| sub.contains(p))
            })
            .count() as f64
            / reps as f64;
        let sd = (p0 * (1.0 - p0) / reps as f64).sqrt();
        assert!((empty - p0).abs() <= 3.0 * sd, "subregion {j}: {empty} vs {p0}");
    }
}

#[test]
fn mass_examples() {
    let beta0 = HeightDensity::beta(2, 0.0).unwrap();
    let m = Region::new(unit(), 0.0, 1.0).mass(&beta0).unwrap();
    assert!((m - 2.0 / (PI * PI)).abs() < 1e-12);

    let g = Region::new(Shape::rect(Rect::new(0.0, 0.0, 2.0, 3.0)), f64::NEG_INFINITY, 0.0);
    assert!((g.mass(&HeightDensity::gaussian(2)).unwrap() / 6.0 - 2.0 / (2.0 * PI).powi(2)).abs() < 1e-12);

    assert!(sample_density(&beta0, &Region::new(unit(), 1.0, 1.0), &mut StreamKey::new(1).rng()).unwrap().is_empty());
}

#[test]
fn homogeneous_mean_count() {
    let key = StreamKey::new(25);
    let total: usize = (0..10_000).map(|i| sample_homogeneous(1.0, &unit(), &mut key.child("rep", i).rng()).len()).sum();
    let mean = total as f64 / 1e4;
    assert!((mean - 1.0).abs() <= 0.03, "{mean}");
}

#[test]
fn marking_mean() {
    // marks of Q_n are q-marks divided by n
    let base = sample_homogeneous(1.0, &Shape::rect(Rect::new(0.0, 0.0, 200.0, 200.0)), &mut StreamKey::new(26).rng());
    let q = MarkLaw::Exponential { rate: 0.5 };
    let n = 8.0;
    let marked = sample_marking(&base, &q, n, &mut StreamKey::new(27).rng()).unwrap();
    assert_eq!(marked.len(), base.len());
    assert!(marked.points.iter().zip(&base.points).all(|(a, b)| a.id == b.id && a.v == b.v));
    let mean = marked.points.iter().map(|p| p.h).sum::<f64>() / marked.len() as f64;
    let want = 2.0 / n;
    let se = want / (marked.len() as f64).sqrt();
    assert!((mean - want).abs() <= 4.0 * se, "{mean} vs {want}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn same_seed_same_configuration(seed in any::<u64>(), k in 0usize..7, r in 0.5..3.0f64) {
        let (f, lo, hi) = &catalog()[k];
        let region = Region::new(Shape::disk(Point::new(1.0, -2.0), r), *lo, *hi);
        let a = sample_density(f, &region, &mut StreamKey::new(seed).rng()).unwrap();
        let b = sample_density(f, &region, &mut StreamKey::new(seed).rng()).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.points.iter().enumerate().all(|(i, p)| p.id == i && region.contains(p)));
    }

    #[test]
    fn csv_round_trip(seed in any::<u64>()) {
        let f = HeightDensity::gaussian(2);
        let c = sample_density(&f, &Region::new(unit(), -4.0, 2.0), &mut StreamKey::new(seed).rng()).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let back = poisson_laguerre::sampling::PointConfiguration::read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.points, c.points);
    }
}
