use proptest::prelude::*;
use winnowtc::corpus::SparseVector;
use winnowtc::model::{write_model, Algorithm, Classifier, HyperParams, Outcome};

fn algorithm() -> impl Strategy<Value = Algorithm> {
    prop_oneof![
        Just(Algorithm::PositiveWinnow),
        Just(Algorithm::BalancedWinnow),
        Just(Algorithm::Perceptron)
    ]
}

fn vector(n: u32) -> impl Strategy<Value = SparseVector> {
    proptest::collection::btree_map(0..n, 0.1f64..4.0, 0..12)
        .prop_map(|m| SparseVector::from_pairs(m.into_iter().collect()).unwrap())
}

fn history(n: u32) -> impl Strategy<Value = Vec<(SparseVector, bool)>> {
    proptest::collection::vec((vector(n), any::<bool>()), 0..40)
}

fn trained(alg: Algorithm, ranged: bool, hist: &[(SparseVector, bool)]) -> Classifier {
    let mut p = HyperParams::defaults(alg);
    if ranged {
        p = p.with_range(0.9, 1.1);
    }
    let mut c = Classifier::new(alg, p, 4.0, false, 30).unwrap();
    for (v, l) in hist {
        c.learn(v, *l);
    }
    c
}

proptest! {
    #[test]
    fn correct_outcome_leaves_state_untouched(
        alg in algorithm(), ranged in any::<bool>(), hist in history(30), v in vector(30), label in any::<bool>()
    ) {
        let mut c = trained(alg, ranged, &hist);
        let before = write_model(&c, None);
        if c.learn(&v, label) == Outcome::Correct {
            prop_assert_eq!(before, write_model(&c, None));
        }
    }

    #[test]
    fn updates_touch_only_active_features(
        alg in algorithm(), hist in history(30), v in vector(30), up in any::<bool>()
    ) {
        let mut c = trained(alg, false, &hist);
        let before: Vec<Option<f64>> = (0..30).map(|i| c.coefficient(i)).collect();
        if up { c.promote(&v) } else { c.demote(&v) }
        for i in 0..30u32 {
            if !v.contains(i) {
                prop_assert_eq!(before[i as usize].map(f64::to_bits), c.coefficient(i).map(f64::to_bits));
            }
        }
    }

    #[test]
    fn positive_winnow_weights_stay_positive(hist in history(30)) {
        let c = trained(Algorithm::PositiveWinnow, true, &hist);
        for i in 0..30 {
            prop_assert!(c.coefficient(i).unwrap() > 0.0);
        }
    }

    #[test]
    fn balanced_updates_move_coefficients_monotonically(hist in history(30), v in vector(30)) {
        let c = trained(Algorithm::BalancedWinnow, false, &hist);
        let mut up = c.clone();
        up.promote(&v);
        let mut down = c.clone();
        down.demote(&v);
        for id in v.ids() {
            let w = c.coefficient(id).unwrap();
            prop_assert!(up.coefficient(id).unwrap() > w);
            prop_assert!(down.coefficient(id).unwrap() < w);
        }
    }

    #[test]
    fn promote_then_demote_cancels_for_perceptron(hist in history(30), v in vector(30)) {
        let c = trained(Algorithm::Perceptron, false, &hist);
        let mut d = c.clone();
        d.promote(&v);
        d.demote(&v);
        for i in 0..30 {
            prop_assert!((c.coefficient(i).unwrap() - d.coefficient(i).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn score_is_linear_in_strength(alg in algorithm(), hist in history(30), v in vector(30), lambda in 0.01f64..100.0) {
        let c = trained(alg, false, &hist);
        let a = c.score(&v.scaled(lambda));
        let b = lambda * c.score(&v);
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
    }
}

#[test]
fn winnow_promote_demote_cancels_iff_alpha_beta_is_one() {
    let v = SparseVector::binary([3]);
    for (alpha, beta, cancels) in [(2.0, 0.5, true), (1.25, 0.8, true), (1.5, 0.5, false), (2.0, 0.25, false)] {
        for alg in [Algorithm::PositiveWinnow, Algorithm::BalancedWinnow] {
            let p = HyperParams {
                alpha,
                beta,
                ..HyperParams::defaults(alg)
            };
            let mut c = Classifier::new(alg, p, 4.0, false, 8).unwrap();
            let w0 = c.coefficient(3).unwrap();
            c.promote(&v);
            c.demote(&v);
            let same = (c.coefficient(3).unwrap() - w0).abs() < 1e-15;
            assert_eq!(same, cancels, "{alg} alpha={alpha} beta={beta}");
        }
    }
}
