use cocycle_core::matrix::{angle_dist, Mat2, ProjectiveArc, ARC_SLACK};
use proptest::prelude::*;
use std::f64::consts::PI;

fn arb_sl2() -> impl Strategy<Value = Mat2> {
    (0.0..PI, -3.0..3.0f64, 0.0..PI).prop_map(|(a, s, b)| Mat2::rotation(a) * Mat2::diag(s.exp(), (-s).exp()) * Mat2::rotation(b))
}

fn arb_mat() -> impl Strategy<Value = Mat2> {
    prop::array::uniform4(-5.0..5.0f64).prop_map(Mat2::from_array)
}

proptest! {
    #[test]
    fn singular_values_multiply_to_det(m in arb_mat()) {
        let s = m.svd();
        let det = m.det().abs();
        prop_assert!((s.sigma1 * s.sigma2 - det).abs() <= 1e-12 * det.max(s.sigma1 * s.sigma1));
        prop_assert!(s.sigma1 >= s.sigma2);
    }

    #[test]
    fn sl2_norm_equals_inverse_norm(m in arb_sl2()) {
        let inv = m.inverse().unwrap();
        prop_assert!((m.norm() - inv.norm()).abs() <= 1e-12 * m.norm());
        let full = m.min_growth_on_arc(&ProjectiveArc::full());
        prop_assert!((full - m.conorm()).abs() <= 1e-12 * m.norm());
    }

    #[test]
    fn arc_images_compose(m in arb_sl2(), n in arb_sl2(), c in 0.0..PI, h in 0.0..1.4f64) {
        let a = ProjectiveArc::new(c, h);
        let direct = a.image(&(m * n)).unwrap();
        let stepwise = a.image(&n).unwrap().image(&m).unwrap();
        let slack = 1e-9 * (m.norm() * n.norm()).powi(2);
        prop_assert!(angle_dist(direct.start(), stepwise.start()) <= slack);
        prop_assert!(angle_dist(direct.end(), stepwise.end()) <= slack);
    }

    #[test]
    fn inverse_image_round_trip(m in arb_sl2(), c in 0.0..PI, h in 0.01..1.4f64) {
        let a = ProjectiveArc::new(c, h);
        let back = a.image_outward(&m.inverse().unwrap()).unwrap().image_outward(&m).unwrap();
        // the round trip covers the original arc once the slack is removed
        prop_assume!(m.norm() < 8.0);
        prop_assert!(a.widened(-ARC_SLACK).is_inside(&back, 0.0));
    }

    #[test]
    fn min_growth_is_attained_on_the_arc(m in arb_sl2(), c in 0.0..PI, h in 0.0..1.5f64) {
        let a = ProjectiveArc::new(c, h);
        let bound = m.min_growth_on_arc(&a);
        for i in 0..=64 {
            let psi = c - h + 2.0 * h * i as f64 / 64.0;
            prop_assert!(m.growth_at(psi) >= bound * (1.0 - 1e-12));
        }
    }
}

#[test]
fn min_growth_matches_dense_sampling() {
    let m = Mat2::diag(4.0, 0.25);
    let arc = ProjectiveArc::new(0.0, PI / 6.0);
    let sampled = (0..=100_000)
        .map(|i| m.growth_at(-PI / 6.0 + PI / 3.0 * i as f64 / 100_000.0))
        .fold(f64::INFINITY, f64::min);
    assert!((m.min_growth_on_arc(&arc) - sampled).abs() < 1e-9);
    assert_eq!(Mat2::diag(2.0, 0.5).min_growth_on_arc(&ProjectiveArc::full()), 0.5);
}
