use winnowtc::model::Algorithm;
use winnowtc::synth::{
    bound_classifier, filtering_benchmark, first_clean_run, gen_examples, length_variation_benchmark,
    mistake_bound_run, online_pass, SynthCorpusSpec, SynthTarget, TargetKind, TextCorpusSpec,
};

fn disjunction(n: u32, seed: u64) -> SynthTarget {
    SynthTarget::random(TargetKind::Disjunction, 5, n, seed).unwrap()
}

#[test]
fn balanced_mistakes_grow_slowly_with_dimension() {
    let spec = SynthCorpusSpec::new(5000, 10, 30, 100);
    let small = mistake_bound_run(Algorithm::BalancedWinnow, &disjunction(1000, 1), &spec).unwrap();
    let large = mistake_bound_run(Algorithm::BalancedWinnow, &disjunction(1_000_000, 1), &spec).unwrap();
    assert!(small <= 500, "{small}");
    assert!(large as f64 <= 2.5 * small as f64, "{small} -> {large}");
}

#[test]
fn perceptron_reaches_a_long_clean_run() {
    let target = disjunction(100, 3);
    let examples = gen_examples(&target, &SynthCorpusSpec::new(20_000, 5, 20, 4)).unwrap();
    let mut c = bound_classifier(Algorithm::Perceptron, 100).unwrap();
    let mistakes = online_pass(&mut c, &examples);
    let end = first_clean_run(&mistakes, 1000).expect("no clean run of 1000");
    assert!(mistakes[..end].iter().any(|&m| m));
}

#[test]
fn prefix_never_has_more_mistakes() {
    let target = disjunction(2000, 5);
    for alg in Algorithm::ALL {
        let mut last = 0;
        for len in [100, 500, 1000, 3000] {
            let m = mistake_bound_run(alg, &target, &SynthCorpusSpec::new(len, 10, 30, 6)).unwrap();
            assert!(m >= last, "{alg}: {last} then {m}");
            last = m;
        }
    }
}

#[test]
fn balanced_recovers_after_drift() {
    let n = 1000;
    let target = disjunction(n, 7).with_drift(4000, vec![11, 222, 333, 444, 555]).unwrap();
    let examples = gen_examples(&target, &SynthCorpusSpec::new(10_000, 10, 30, 8)).unwrap();
    let mut c = bound_classifier(Algorithm::BalancedWinnow, n).unwrap();
    let mistakes = online_pass(&mut c, &examples);
    let tail = &mistakes[8000..];
    let rate = tail.iter().filter(|&&m| m).count() as f64 / tail.len() as f64;
    assert!(rate < 0.05, "{rate}");
    // the swap itself is visible
    assert!(mistakes[4000..4500].iter().any(|&m| m));
}

#[test]
fn noise_free_labels_match_the_target() {
    for kind in [TargetKind::Disjunction, TargetKind::Conjunction, TargetKind::RofK { r: 2 }] {
        let target = SynthTarget::random(kind, 4, 50, 9).unwrap();
        let examples = gen_examples(&target, &SynthCorpusSpec::new(500, 3, 10, 10)).unwrap();
        for (v, label) in &examples {
            let hits = target.relevant.iter().filter(|&&f| v.contains(f)).count();
            let expected = match kind {
                TargetKind::Disjunction => hits > 0,
                TargetKind::Conjunction => hits == 4,
                TargetKind::RofK { r } => hits >= r,
            };
            assert_eq!(*label, expected);
            assert!(v.iter().all(|(_, s)| s == 1.0));
        }
        assert_eq!(examples, gen_examples(&target, &SynthCorpusSpec::new(500, 3, 10, 10)).unwrap());
    }
}

#[test]
fn noisy_labels_flip_at_roughly_the_requested_rate() {
    let target = disjunction(500, 11);
    let clean = gen_examples(&target, &SynthCorpusSpec::new(4000, 5, 15, 12)).unwrap();
    let mut spec = SynthCorpusSpec::new(4000, 5, 15, 12);
    spec.noise_rate = 0.1;
    let noisy = gen_examples(&target, &spec).unwrap();
    let flipped = noisy
        .iter()
        .filter(|(v, l)| *l != target.label(&target.relevant, v))
        .count() as f64;
    assert!((flipped / 4000.0 - 0.1).abs() < 0.02);
    assert_eq!(clean.len(), noisy.len());
}

#[test]
fn length_variation_directions() {
    let rows = length_variation_benchmark(&TextCorpusSpec::length_variation(1)).unwrap();
    let bep = |name: &str| rows.iter().find(|r| r.name == name).unwrap().macro_bep();
    assert!(bep("pw-norm") > bep("pw"), "{} vs {}", bep("pw-norm"), bep("pw"));
    assert!(bep("bw") > bep("pw"));
    assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r.macro_bep())));
}

#[test]
fn filtering_removes_most_features_without_hurting() {
    let b = filtering_benchmark(&TextCorpusSpec::with_seed(1)).unwrap();
    assert!(b.filtered_fraction >= 0.5, "{}", b.filtered_fraction);
    assert!(b.with_filter.macro_bep() >= b.without_filter.macro_bep() - 0.02);
}
