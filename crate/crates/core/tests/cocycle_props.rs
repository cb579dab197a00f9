use cocycle_core::cocycle::{CocycleSpec, ProductResult};
use cocycle_core::matrix::Mat2;
use cocycle_core::symbolic::{SymbolSequence, TransitionMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn window_spec(seed: u64, stretch: f64) -> CocycleSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = TransitionMatrix::full_shift(2);
    let entries: Vec<_> = q
        .admissible_words(3)
        .into_iter()
        .map(|w| {
            let s: f64 = rng.gen_range(-stretch..stretch);
            (w, Mat2::rotation(rng.gen_range(0.0..3.2)) * Mat2::diag(s.exp(), (-s).exp()))
        })
        .collect();
    CocycleSpec::locally_constant(q, (-1, 1), entries, 0.5).unwrap()
}

fn arb_point() -> impl Strategy<Value = SymbolSequence> {
    (
        prop::collection::vec(0usize..2, 1..4),
        prop::collection::vec(0usize..2, 0..30),
        prop::collection::vec(0usize..2, 1..4),
    )
        .prop_map(|(l, c, r)| SymbolSequence::new(l, -10, c, r).unwrap())
}

// |P - Q| measured at the scale of P
fn rel(p: &ProductResult, q: &ProductResult) -> f64 {
    let a = p.matrix;
    let b = q.matrix.scale((q.log_scale - p.log_scale).exp());
    (a - b).norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cocycle_identity(seed in 0u64..1000, x in arb_point(), m in 0i64..=40, n in 0i64..=40) {
        let spec = window_spec(seed, 0.6);
        let lhs = spec.product(&x, m + n).unwrap();
        let rhs = ProductResult::compose(&spec.product(&x.shift(n), m).unwrap(), &spec.product(&x, n).unwrap());
        prop_assert!(rel(&lhs, &rhs) <= 1e-10);
    }

    #[test]
    fn inverse_identity(seed in 0u64..1000, x in arb_point(), n in 0i64..=40) {
        let spec = window_spec(seed, 0.6);
        let back = spec.product(&x.shift(n), -n).unwrap();
        let inv = spec.product(&x, n).unwrap().inverse().unwrap();
        prop_assert!(rel(&back, &inv) <= 1e-10);
    }

    #[test]
    fn normalized_products_keep_determinant(seed in 0u64..1000, x in arb_point(), n in -200i64..200) {
        let spec = window_spec(seed, 0.6);
        let p = spec.product(&x, n).unwrap();
        prop_assert!((p.matrix.norm() - 1.0).abs() <= 1e-12);
        // det(true product) = 1 means det(matrix) = e^{-2 log_scale}; the
        // computed determinant of a unit-norm matrix carries absolute error ε
        let want = (-2.0 * p.log_scale).exp();
        prop_assert!((p.matrix.det() - want).abs() <= 1e-9 * want + 8.0 * f64::EPSILON);
    }

    #[test]
    fn recombined_matches_naive(seed in 0u64..1000, x in arb_point(), n in 0i64..=50) {
        let spec = window_spec(seed, 0.3);
        let mut naive = Mat2::IDENTITY;
        for k in 0..n {
            naive = spec.evaluate_at(&x, k).unwrap() * naive;
        }
        let got = spec.product(&x, n).unwrap().recombined();
        prop_assert!(got.relative_distance(&naive) <= 1e-10);
        prop_assert!((got.det() - 1.0).abs() <= 1e-8);
    }
}

#[test]
fn holder_estimate_examples() {
    let q = TransitionMatrix::full_shift(2);
    let c = CocycleSpec::constant(q.clone(), Mat2::rotation(0.4), 0.3).unwrap();
    assert_eq!(c.holder_estimate().constant, 0.0);
    let (m0, m1) = (Mat2::diag(2.0, 0.5), Mat2::rotation(0.4));
    let s = CocycleSpec::one_step(q, &[m0, m1], 0.3).unwrap();
    assert_eq!(s.holder_estimate().constant, (m0 - m1).norm());
}
