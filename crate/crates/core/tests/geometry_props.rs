use poisson_laguerre::geometry::{apex_paraboloid, below_paraboloid, bisector, circumball, power, Paraboloid, Side};
use poisson_laguerre::{Point, WeightedPoint};
use proptest::prelude::*;

fn pt() -> impl Strategy<Value = Point> {
    (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y)| Point::new(x, y))
}

fn wp(id: usize) -> impl Strategy<Value = WeightedPoint> {
    (pt(), -5.0..5.0f64).prop_map(move |(v, h)| WeightedPoint::new(id, v, h))
}

fn well_spread(a: Point, b: Point, c: Point) -> bool {
    (b - a).cross(c - a).abs() > 0.5
}

proptest! {
    #[test]
    fn power_dominates_weight(w in pt(), p in wp(0)) {
        let e = power(w, &p) - p.h;
        prop_assert!(e >= 0.0);
        prop_assert_eq!(power(p.v, &p) - p.h, 0.0);
        if w != p.v {
            prop_assert!(e > 0.0);
        }
    }

    #[test]
    fn bisector_boundary_has_equal_powers(p1 in wp(0), p2 in wp(1), s in -20.0..20.0f64) {
        prop_assume!(p1.v.dist(p2.v) > 1e-3);
        let hp = bisector(&p1, &p2).unwrap();
        // foot of the line 2<z, n> = offset, then walk along it
        let n = hp.normal;
        let foot = Point::new(n.x * hp.offset / (2.0 * n.norm2()), n.y * hp.offset / (2.0 * n.norm2()));
        let dir = Point::new(-n.y / n.norm(), n.x / n.norm());
        let z = Point::new(foot.x + s * dir.x, foot.y + s * dir.y);
        let a = power(z, &p1);
        let b = power(z, &p2);
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "{a} vs {b}");
        // the half-plane holds the side where p1 wins
        prop_assert!(hp.contains(p1.v) || power(p1.v, &p1) > power(p1.v, &p2));
    }

    #[test]
    fn apex_passes_through_its_points(a in wp(0), b in wp(1), c in wp(2)) {
        prop_assume!(well_spread(a.v, b.v, c.v));
        let pi = apex_paraboloid(&a, &b, &c).unwrap();
        for p in [a, b, c] {
            prop_assert_eq!(below_paraboloid(&p, &pi), Side::On);
        }
    }

    #[test]
    fn zero_weights_give_the_circumball(y1 in pt(), y2 in pt(), y3 in pt()) {
        prop_assume!(well_spread(y1, y2, y3));
        let w = |i, v| WeightedPoint::new(i, v, 0.0);
        let pi = apex_paraboloid(&w(0, y1), &w(1, y2), &w(2, y3)).unwrap();
        let ball = circumball(y1, y2, y3).unwrap();
        prop_assert!(pi.apex_v.dist(ball.center) <= 1e-8 * (1.0 + ball.center.norm()));
        prop_assert!((pi.apex_h - ball.radius.powi(2)).abs() <= 1e-8 * (1.0 + pi.apex_h));
    }

    #[test]
    fn translation_equivariance(a in wp(0), b in wp(1), c in wp(2), t in pt(), probe in wp(3)) {
        prop_assume!(well_spread(a.v, b.v, c.v));
        let sh = |p: WeightedPoint| WeightedPoint::new(p.id, p.v + t, p.h);
        let pi = apex_paraboloid(&a, &b, &c).unwrap();
        let pj = apex_paraboloid(&sh(a), &sh(b), &sh(c)).unwrap();
        let scale = 1.0 + pi.apex_v.norm() + t.norm();
        prop_assert!((pj.apex_v - t).dist(pi.apex_v) <= 1e-8 * scale);
        prop_assert!((pj.apex_h - pi.apex_h).abs() <= 1e-7 * (1.0 + pi.apex_h.abs()) * scale);
        let ball = circumball(a.v, b.v, c.v).unwrap();
        let moved = circumball(a.v + t, b.v + t, c.v + t).unwrap();
        prop_assert!((moved.center - t).dist(ball.center) <= 1e-8 * scale);
        prop_assert!((moved.radius - ball.radius).abs() <= 1e-8 * scale);
        let h1 = bisector(&a, &b).unwrap();
        let h2 = bisector(&sh(a), &sh(b)).unwrap();
        prop_assert!((h2.slack(probe.v + t) - h1.slack(probe.v)).abs() <= 1e-8 * scale * scale);
    }
}

#[test]
fn spec_examples() {
    // |z|^2 = |z - (2,0)|^2 + 2 reduces to 4x = 6
    let p1 = WeightedPoint::new(0, Point::new(0.0, 0.0), 0.0);
    let p2 = WeightedPoint::new(1, Point::new(2.0, 0.0), 2.0);
    let hp = bisector(&p1, &p2).unwrap();
    for y in [-3.0, 0.0, 7.5] {
        assert!(hp.slack(Point::new(1.5, y)).abs() < 1e-12);
    }

    let x = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)].map(|(a, b)| Point::new(a, b));
    let pi = apex_paraboloid(
        &WeightedPoint::new(0, x[0], 0.0),
        &WeightedPoint::new(1, x[1], 0.0),
        &WeightedPoint::new(2, x[2], 0.0),
    )
    .unwrap();
    // circumcentre of the right triangle is the hypotenuse midpoint
    assert!(pi.apex_v.dist(Point::new(0.5, 0.5)) < 1e-12);
    assert!((pi.apex_h - 0.5).abs() < 1e-12);

    let p = WeightedPoint::new(0, Point::new(2.0, 0.0), 0.0);
    assert_eq!(below_paraboloid(&p, &Paraboloid::down(Point::ORIGIN, 1.0)), Side::StrictlyAbove);
}
