use poisson_laguerre::densities::{
    l1_distance,
    check_c1, check_c2, gns_radial_cdf, gns_sample, is_admissible, semigroup_check, tail_diagnostic, Admissibility,
};
use poisson_laguerre::rng::StreamKey;
use poisson_laguerre::{ConvergenceFamily, HeightDensity, MarkLaw};
use proptest::prelude::*;
use std::f64::consts::PI;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

// Riemann-Liouville integrals evaluated from the definitions with mpmath
// (30 digits) and frozen here.
#[test]
fn fractional_integrals_match_frozen_values() {
    let cases: Vec<(HeightDensity, f64, f64, f64)> = vec![
        (HeightDensity::beta(2, 0.0).unwrap(), 1.0, 1.0, 0.202642367284675542887758926419),
        (HeightDensity::beta(2, 0.5).unwrap(), 1.0, 2.0, 0.716448960313445328582367674416),
        (HeightDensity::beta(2, 0.5).unwrap(), 2.0, 2.0, 0.573159168250756262865894139533),
        (HeightDensity::beta(2, -0.5).unwrap(), 1.5, 0.7, 0.0942832391157124380580656969962),
        (HeightDensity::gaussian(2), 1.0, 0.0, 0.0506605918211688857219397316049),
        (HeightDensity::gaussian(2), 2.0, 1.0, 0.167050390643636168843944455657),
        (HeightDensity::beta_prime(2, 3.5).unwrap(), 1.0, -1.0, 0.151981775463506657165819194815),
        (HeightDensity::beta_prime(2, 3.5).unwrap(), 2.0, -2.0, 0.0358224480156722664291183837208),
        (HeightDensity::shifted_beta(2, 4.0).unwrap(), 2.0, 0.0, 0.10132118364233777144387946321),
        (HeightDensity::shifted_beta(2, 4.0).unwrap(), 1.0, -3.0, 0.0072470557910683945258054349334),
        (HeightDensity::shifted_beta_prime(2, 5.0).unwrap(), 1.0, 0.0, 0.0303963550927013314331638389629),
    ];
    for (f, alpha, x, want) in cases {
        let got = f.frac_integral(alpha, x).unwrap();
        assert!(rel(got, want) < 1e-10, "{} I^{alpha}({x}) = {got}, want {want}", f.label());
        let num = f.frac_integral_numeric(alpha, x).unwrap();
        assert!(rel(num, want) < 1e-8, "{} numeric {num}", f.label());
    }
}

#[test]
fn density_constants() {
    // c_{3,0} = Γ(3)/π^2 and the Gaussian constant (2π)^{-2}
    assert!(rel(HeightDensity::beta(2, 0.0).unwrap().eval(1.0), 2.0 / (PI * PI)) < 1e-14);
    assert!(rel(HeightDensity::gaussian(2).eval(0.0), 0.0253302959105844428609698658024) < 1e-14);
}

#[test]
fn semigroup_examples() {
    let b = HeightDensity::beta(2, 0.5).unwrap();
    assert!(semigroup_check(&b, 1.0, 1.0, &[0.5, 1.0, 2.0]).unwrap() <= 1e-6);
    let g = HeightDensity::gaussian(2);
    assert!(semigroup_check(&g, 1.0, 1.0, &[-3.0, 0.0, 2.0]).unwrap() <= 1e-6);
}

#[test]
fn admissibility_of_catalog_kinds() {
    assert_eq!(is_admissible(&HeightDensity::beta(2, 0.5).unwrap(), &[1.0]), Admissibility::Admissible);
    assert_eq!(is_admissible(&HeightDensity::beta_prime(2, 3.0).unwrap(), &[-1.0]), Admissibility::Admissible);
}

#[test]
fn c1_report_for_rescaled_beta() {
    let fam = ConvergenceFamily::rescaled_beta(2);
    let r = check_c1(&fam, &[4, 16, 64], &[-2.0, 0.0, 2.0]).unwrap();
    for j in 0..3 {
        assert!(r.l1[0][j] > r.l1[1][j] && r.l1[1][j] > r.l1[2][j], "column {j}: {:?}", r.l1);
    }
    // ((d/2+2)/π)^{d/2+1} Γ(d/2) with d = 2
    let bound = (3.0 / PI).powi(2);
    assert!(r.tail_moments.iter().all(|t| *t <= bound), "{:?}", r.tail_moments);
    assert!(!r.violation);

    let same = ConvergenceFamily::constant(HeightDensity::gaussian(2));
    let r = check_c1(&same, &[1, 2], &[0.0, 3.0]).unwrap();
    assert!(r.l1.iter().flatten().all(|v| *v == 0.0));
}

#[test]
fn c2_reports() {
    let fam = ConvergenceFamily::beta_to_pv(2);
    let ns: Vec<u64> = [-0.5, -0.9, -0.99].iter().map(|&b| ConvergenceFamily::index_for_beta(b)).collect();
    let r = check_c2(&fam, &ns, &[1.0]).unwrap();
    for (row, b) in r.values.iter().zip([-0.5, -0.9, -0.99]) {
        // (β+2)/π^2 at x = 1
        assert!(rel(row[0], (b + 2.0) / (PI * PI)) < 1e-9, "{row:?}");
    }
    assert!(r.deviation[0][0] > r.deviation[1][0] && r.deviation[1][0] > r.deviation[2][0]);

    let fam = ConvergenceFamily::marked(2, 1.5, MarkLaw::Uniform { width: 1.0 }).unwrap();
    let r = check_c2(&fam, &[1, 4, 16], &[0.1, 0.5]).unwrap();
    for (i, n) in [1.0f64, 4.0, 16.0].iter().enumerate() {
        for (j, x) in [0.1, 0.5].iter().enumerate() {
            let want = 1.5 * (n * x).min(1.0);
            assert!((r.values[i][j] - want).abs() < 1e-9, "n={n} x={x}: {}", r.values[i][j]);
        }
    }
}

#[test]
fn tail_diagnostics() {
    // x e^{-x/2} peaks at x = 2
    let ns = [2u64, 4, 8, 16];
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let gauss = ConvergenceFamily::constant(HeightDensity::gaussian(2));
    let t = tail_diagnostic(&gauss, &ns, &xs).unwrap();
    let c = (2.0 * PI).powi(-2);
    for row in &t.rows {
        // x * ∫_{-∞}^{-x} c e^{h/2} dh and 4c e^{-x/2}
        assert!(rel(row.scaled_first, row.x * 2.0 * c * (-row.x / 2.0).exp()) < 1e-9);
        assert!(rel(row.high_order, 4.0 * c * (-row.x / 2.0).exp()) < 1e-9);
    }
    assert!(!t.non_decreasing);

    let beta = ConvergenceFamily::constant(HeightDensity::beta(2, 0.5).unwrap());
    let t = tail_diagnostic(&beta, &ns, &xs).unwrap();
    assert!(t.rows.iter().all(|r| r.scaled_first == 0.0 && r.high_order == 0.0));

    let rb = ConvergenceFamily::rescaled_beta(2);
    let ns = [4u64, 8, 16, 32];
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let t = tail_diagnostic(&rb, &ns, &xs).unwrap();
    assert!(!t.non_decreasing, "{:?}", t.rows);
    for row in &t.rows {
        // trapezoid oracle on the member density over [-2n, -x]
        let f = rb.member(row.n).unwrap();
        let (a, b) = (-2.0 * row.n as f64, -row.x);
        let m = 20_000;
        let h = (b - a) / m as f64;
        let s: f64 = (0..=m).map(|k| f.eval(a + k as f64 * h) * if k == 0 || k == m { 0.5 } else { 1.0 }).sum::<f64>() * h;
        assert!(rel(row.scaled_first, row.x * s) < 1e-5, "{row:?} vs {}", row.x * s);
    }
}

#[test]
fn gns_matches_the_beta_radial_law() {
    // for f = Beta(β), 1 - |Y|^2 ~ Beta(β+1, 1), so P(|Y| <= r) = 1 - (1-r^2)^{β+1}
    let beta = 0.5;
    let f = HeightDensity::beta(2, beta).unwrap();
    let law = |r: f64| 1.0 - (1.0 - r * r).powf(beta + 1.0);
    for r in [0.1, 0.4, 0.8, 0.99] {
        assert!((gns_radial_cdf(&f, 1.0, r).unwrap() - law(r)).abs() < 1e-9);
    }
    let mut rng = StreamKey::new(3).child("gns_ks", 0).rng();
    let n = 100_000;
    let mut radii: Vec<f64> = (0..n)
        .map(|_| {
            let y = gns_sample(&f, 1.0, &mut rng).unwrap();
            (y[0] * y[0] + y[1] * y[1]).sqrt()
        })
        .collect();
    radii.sort_by(f64::total_cmp);
    let ks = radii
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let c = law(r);
            (c - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - c).abs())
        })
        .fold(0.0, f64::max);
    assert!(ks <= 0.02, "KS {ks}");
}

fn catalog() -> Vec<HeightDensity> {
    vec![
        HeightDensity::beta(2, 0.5).unwrap(),
        HeightDensity::beta(2, -0.7).unwrap(),
        HeightDensity::beta_prime(2, 3.5).unwrap(),
        HeightDensity::gaussian(2),
        HeightDensity::shifted_beta(2, 4.0).unwrap(),
        HeightDensity::shifted_beta_prime(2, 5.0).unwrap(),
        HeightDensity::marked(2, 1.0, MarkLaw::Exponential { rate: 2.0 }, 3.0).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    // for α < 1 the kernel can decrease (Beta(-0.7) with α = 1/2 goes like x^{-0.2})
    fn frac_integral_is_nondecreasing(k in 0usize..7, alpha in 1.0..3.0f64, mut xs in prop::collection::vec(-6.0..6.0f64, 2..8)) {
        let f = &catalog()[k];
        let (_, hi) = f.support();
        xs.retain(|x| *x < hi);
        xs.sort_by(f64::total_cmp);
        let vals: Vec<f64> = xs.iter().map(|&x| f.frac_integral(alpha, x).unwrap()).collect();
        for w in vals.windows(2) {
            prop_assert!(w[1] >= w[0] * (1.0 - 1e-12), "{} α={alpha}: {vals:?} at {xs:?}", f.label());
        }
    }

    #[test]
    fn cdf_inverse_round_trips(k in 0usize..7, u in 0.01..0.99f64) {
        let f = &catalog()[k];
        // a level inside the range of the cdf
        let y = u * f.cdf(f.support().1.min(2.0) - 1.0).unwrap();
        prop_assume!(y > 0.0);
        let h = f.cdf_inverse(y).unwrap();
        prop_assert!(rel(f.cdf(h).unwrap(), y) < 1e-7);
    }
}

#[test]
fn l1_between_nearly_equal_members() {
    // c·h^β on (0, 2]: closed form through the crossing point
    let prim = |c: f64, b: f64, x: f64| c * x.powf(b + 1.0) / (b + 1.0);
    for (a, b) in [(0.5, 0.5008672595084401), (0.5, 0.5 + 1e-6), (-0.3, -0.2999)] {
        let f = HeightDensity::beta(2, a).unwrap();
        let g = HeightDensity::beta(2, b).unwrap();
        let (ca, cb) = (f.eval(1.0), g.eval(1.0));
        assert!((f.eval(2.0) / ca - 2f64.powf(a)).abs() < 1e-12);
        let x: f64 = (cb / ca).powf(1.0 / (a - b));
        let x = x.clamp(0.0, 2.0);
        let want = (2.0 * (prim(ca, a, x) - prim(cb, b, x)) - (prim(ca, a, 2.0) - prim(cb, b, 2.0))).abs();
        let got = l1_distance(&f, &g, 0.0, 2.0).unwrap();
        assert!((got - want).abs() <= 1e-8 * want + 1e-14, "{a} {b}: {got} vs {want}");
        assert_eq!(got, l1_distance(&g, &f, 0.0, 2.0).unwrap());
    }
}
