use lw6::tensor6::{mclf_boost, minkowski_dot, wedge, SixVector};
use proptest::prelude::*;

fn velocity(v: [f64; 5]) -> SixVector {
    let v2: f64 = v.iter().map(|x| x * x).sum();
    let gamma = (1.0 + v2).sqrt();
    SixVector::from_time_space(gamma, v)
}

fn spatial() -> impl Strategy<Value = [f64; 5]> {
    prop::array::uniform5(-3.0..3.0f64)
}

fn vector() -> impl Strategy<Value = SixVector> {
    prop::array::uniform6(-5.0..5.0f64).prop_map(SixVector::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn boost_preserves_metric(v in spatial()) {
        let map = mclf_boost(&velocity(v)).unwrap();
        prop_assert!(map.metric_defect() <= 1e-12 * (1.0 + velocity(v).time().powi(2)));
    }

    #[test]
    fn boost_preserves_dot(v in spatial(), a in vector(), b in vector()) {
        let map = mclf_boost(&velocity(v)).unwrap();
        let before = minkowski_dot(&a, &b);
        let after = minkowski_dot(&map.apply(&a), &map.apply(&b));
        let scale = a.euclid() * b.euclid() * velocity(v).time().powi(2);
        prop_assert!((before - after).abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn boost_takes_velocity_to_rest(v in spatial()) {
        let u = velocity(v);
        let rest = mclf_boost(&u).unwrap().apply(&u);
        prop_assert!((rest - SixVector::rest()).max_abs() <= 1e-12 * u.time().powi(2));
    }

    #[test]
    fn boost_inverse_round_trip(v in spatial(), a in vector()) {
        let map = mclf_boost(&velocity(v)).unwrap();
        let back = map.inverse().apply(&map.apply(&a));
        prop_assert!((back - a).max_abs() <= 1e-12 * a.euclid().max(1.0) * velocity(v).time().powi(2));
    }

    #[test]
    fn wedge_antisymmetric_and_covariant(v in spatial(), a in vector(), b in vector()) {
        prop_assert_eq!(wedge(&a, &b), -wedge(&b, &a));
        let map = mclf_boost(&velocity(v)).unwrap();
        let lhs = map.apply_antisym(&wedge(&a, &b));
        let rhs = wedge(&map.apply(&a), &map.apply(&b));
        let scale = a.euclid() * b.euclid() * velocity(v).time().powi(2);
        prop_assert!((lhs - rhs).max_abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn unnormalized_velocity_rejected(v in spatial(), eps in 1e-6..1e-2f64) {
        let mut u = velocity(v);
        u[0] += eps * u.time();
        prop_assert!(mclf_boost(&u).is_err());
    }
}
