use std::f64::consts::PI;

use berger::berger::{frame_at, metric_eval, S3Point};
use berger::h2r::{lorentz_dot, translation_along, H2RGeodesic, H2RPoint};
use berger::io::fmt17;
use berger::linalg::dist4;
use berger::polygon::build_polygon;
use berger::sampling::{random_point, random_tangent, rng};
use berger::surfaces::{alpha0, k_neck, t_half, tcal};
use berger::BergerParams;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = BergerParams> {
    (0.2f64..6.0, prop_oneof![-3.0f64..-0.1, 0.1f64..3.0]).prop_map(|(k, t)| BergerParams::new(k, t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frame_is_orthonormal(p in params(), seed in any::<u64>()) {
        let q = random_point(&mut rng(seed));
        let f = frame_at(&p, &q);
        let e = [f.e1, f.e2, f.xi];
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((metric_eval(&p, &e[i], &e[j]).unwrap() - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn metric_is_symmetric(p in params(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let q = random_point(&mut r);
        let (x, y) = (random_tangent(&mut r, &q), random_tangent(&mut r, &q));
        prop_assert!((metric_eval(&p, &x, &y).unwrap() - metric_eval(&p, &y, &x).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn polygon_closes(p in params(), f in 0.0f64..=1.0) {
        let poly = build_polygon(&p, f * PI / (2.0 * p.kappa().sqrt())).unwrap();
        prop_assert!(poly.closure_defect() < 1e-10);
    }

    #[test]
    fn polygon_rejects_long_lambda(p in params(), f in 1.01f64..4.0) {
        prop_assert!(build_polygon(&p, f * PI / (2.0 * p.kappa().sqrt())).is_err());
    }

    #[test]
    fn neck_constants_are_consistent(h in 0.51f64..10.0, c in 0.0f64..=1.0) {
        prop_assert!(k_neck(h, c) > 1.0);
        prop_assert!(t_half(h, c) > 0.0);
        let t = tcal(h, c);
        prop_assert!(t > 0.0 && t <= PI);
        prop_assert!((alpha0(h, c) * (c + 1.0) * (4.0 * h * h - 1.0) - 4.0 * h * PI).abs() < 1e-9 * h.powi(3));
    }

    #[test]
    fn translations_stay_on_hyperboloid(r0 in 0.0f64..1.5, th in 0.0f64..6.3, alpha in 0.1f64..1.5, s in -3.0f64..3.0, t in -3.0f64..3.0) {
        let g = H2RGeodesic::new(H2RPoint::polar(r0, th, 0.2), alpha, [0.3, -0.5, 0.8]).unwrap();
        let a = translation_along(&g, s).compose(&translation_along(&g, t));
        prop_assert!(a.max_diff(&translation_along(&g, s + t)) < 1e-9);
        let q = a.apply(&H2RPoint::polar(0.7, 1.0, -0.4));
        prop_assert!((lorentz_dot(&q.h2, &q.h2) + 1.0).abs() < 1e-9);
    }

    #[test]
    fn fmt17_round_trips(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn normalized_points_are_unit(v in prop::array::uniform4(-5.0f64..5.0)) {
        prop_assume!(v.iter().map(|x| x * x).sum::<f64>() > 1e-6);
        let p = S3Point::normalized(v);
        prop_assert!((dist4(p.coords(), &[0.0; 4]) - 1.0).abs() < 1e-14);
    }
}
