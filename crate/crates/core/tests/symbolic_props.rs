use cocycle_core::symbolic::{enumerate_periodic, SymbolSequence, TransitionMatrix};
use proptest::prelude::*;

fn arb_seq() -> impl Strategy<Value = SymbolSequence> {
    (
        prop::collection::vec(0usize..3, 1..4),
        -6i64..6,
        prop::collection::vec(0usize..3, 0..10),
        prop::collection::vec(0usize..3, 1..4),
    )
        .prop_map(|(l, s, c, r)| SymbolSequence::new(l, s, c, r).unwrap())
}

proptest! {
    #[test]
    fn bracket_takes_past_and_future(p in arb_seq(), x in arb_seq()) {
        prop_assume!(p.get(0) == x.get(0));
        let y = SymbolSequence::bracket(&p, &x).unwrap();
        for n in -30..=0 {
            prop_assert_eq!(y.get(n), p.get(n));
        }
        for n in 0..30 {
            prop_assert_eq!(y.get(n), x.get(n));
        }
    }

    #[test]
    fn shift_is_a_bijection(x in arb_seq(), k in -20i64..20) {
        prop_assert_eq!(x.shift(1).shift(-1), x.clone());
        prop_assert_eq!(x.shift(k).shift(-k), x.clone());
        for n in -10..10 {
            prop_assert_eq!(x.shift(k).get(n), x.get(n + k));
        }
    }

    #[test]
    fn distance_is_symmetric_and_separates(x in arb_seq(), y in arb_seq()) {
        prop_assert_eq!(x.distance(&y), y.distance(&x));
        prop_assert_eq!(x.distance(&y) == 0.0, x == y);
    }

    #[test]
    fn connecting_words_splice(a in 0usize..3, b in 0usize..3, seed in 0u64..50) {
        // a random irreducible 3-symbol shift: a 3-cycle plus random extra edges
        let mut rows = vec![vec![0u8; 3]; 3];
        for i in 0..3 {
            rows[i][(i + 1) % 3] = 1;
            for j in 0..3 {
                if (seed >> (3 * i + j)) & 1 == 1 {
                    rows[i][j] = 1;
                }
            }
        }
        let q = TransitionMatrix::new(&rows).unwrap();
        let c = q.connecting_word(a, b).unwrap();
        let mut w = vec![a];
        w.extend(&c);
        w.push(b);
        prop_assert!(q.admits_word(&w));
        prop_assert_eq!(Some(c.len() + 1), q.connectivity(a, b));
        let x = SymbolSequence::new(vec![a], 0, w.clone(), vec![b]);
        if q.allows(a, a) && q.allows(b, b) {
            prop_assert!(q.check_sequence(&x.unwrap()).is_ok());
        }
    }
}

#[test]
fn enumerated_orbits_have_exact_period() {
    for q in [TransitionMatrix::full_shift(2), TransitionMatrix::golden_mean(), TransitionMatrix::full_shift(3)] {
        for orbit in enumerate_periodic(&q, 8, usize::MAX).unwrap() {
            let base = orbit.base_point();
            let per = orbit.period() as i64;
            assert_eq!(base.shift(per), base);
            for k in 1..per {
                assert_ne!(base.shift(k), base, "{orbit}");
            }
            assert!(q.admits_cycle(orbit.word()));
        }
    }
}

#[test]
fn orbit_counts() {
    // primitive necklaces of the full 2-shift and the golden mean shift
    let full = enumerate_periodic(&TransitionMatrix::full_shift(2), 10, usize::MAX).unwrap();
    assert_eq!(full.len(), 2 + 1 + 2 + 3 + 6 + 9 + 18 + 30 + 56 + 99);
    let golden = enumerate_periodic(&TransitionMatrix::golden_mean(), 3, usize::MAX).unwrap();
    assert_eq!(golden.len(), 3);
}
