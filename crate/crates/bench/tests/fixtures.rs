use poisson_laguerre_bench::{beta_config, side_for};

#[test]
fn configurations_are_seeded_and_sized() {
    let (a, w) = beta_config(500, 9);
    let (b, _) = beta_config(500, 9);
    assert_eq!(a, b);
    assert!((w.width() - side_for(500)).abs() < 1e-12);
    // Poisson(500): 5 standard deviations
    assert!((a.len() as f64 - 500.0).abs() < 5.0 * 500f64.sqrt(), "{}", a.len());
    assert!(a.iter().all(|p| w.contains(p.v) && (0.0..=1.0).contains(&p.h)));
}
