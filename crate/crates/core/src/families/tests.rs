use proptest::prelude::*;

use super::*;
use crate::inaccuracy::{ConvexGenerator, Weights};

fn quick(samples: usize, budget: usize) -> ReproduceOptions {
    ReproduceOptions { samples: Some(samples), budget, ..Default::default() }
}

#[test]
fn tails_example_passes() {
    let r = reproduce_example("ex4.1", &ReproduceOptions::default()).unwrap();
    assert!(r.all_assertions_pass, "{:#?}", r.assertions);
    assert!(r.assertion("score_infinite_everywhere").unwrap().details.contains("harmonic comparison"));
    assert_eq!(r.id, reproduce_example("tails-inv-sqrt", &ReproduceOptions::default()).unwrap().id);
}

#[test]
fn initial_segments_example_passes() {
    let r = reproduce_example("ex4.2", &ReproduceOptions::default()).unwrap();
    assert!(r.all_assertions_pass, "{:#?}", r.assertions);
    assert!(r.assertion("one_added_point").unwrap().pass);
}

#[test]
fn walsh_example_passes() {
    let r = reproduce_example("walsh", &quick(10, 0)).unwrap();
    assert!(r.all_assertions_pass, "{:#?}", r.assertions);
}

#[test]
fn partition_example_passes() {
    let r = reproduce_example("partition_theorem", &quick(4, 500)).unwrap();
    assert!(r.all_assertions_pass, "{:#?}", r.assertions);
}

#[test]
fn unknown_example_is_rejected() {
    let e = reproduce_example("ex9.9", &ReproduceOptions::default()).unwrap_err();
    assert_eq!(e.name(), "unknown-example");
}

#[test]
fn reports_are_deterministic_and_independent_of_jobs() {
    let a = reproduce_example("partition-bound", &quick(3, 200)).unwrap();
    let b = reproduce_example("partition-bound", &ReproduceOptions { jobs: 3, ..quick(3, 200) }).unwrap();
    assert_eq!(a, b);
    let s1 = walsh_samples(8, 6, 7, 1).unwrap();
    let s2 = walsh_samples(8, 6, 7, 4).unwrap();
    assert_eq!(s1, s2);
}

#[test]
fn partition_bound_constants() {
    let b = partition_bound(&InaccuracyMeasure::brier()).unwrap();
    assert_eq!((b.c, b.d, b.bound), (1.0, 2.0, 3.0));
    let w = partition_bound(&InaccuracyMeasure::walsh()).unwrap();
    assert_eq!((w.c, w.d, w.bound), (0.5, 1.0, 1.5));
    let shifted = InaccuracyMeasure::new(
        "shifted",
        ConvexGenerator::quadratic().with_linear_shift(crate::scalar::rational(1, 1), crate::scalar::rational(0, 1)),
        Weights::unit(),
    );
    assert_eq!(partition_bound(&shifted).unwrap_err().name(), "invalid-argument");
    assert!(Weights::new(crate::inaccuracy::WeightRule::Const { value: 0.0 }).is_err());
}

/// Brute-force score of a credence on a `k`-cell partition at world `j`
/// (`j == k` is the point in no cell), straight from the definition.
fn brute_score(c: &[f64], a: &[f64], j: usize) -> f64 {
    (0..c.len()).map(|i| a[i] * (if i == j { 1.0 } else { 0.0 } - c[i]).powi(2)).sum()
}

#[test]
fn fast_partition_scores_match_definition() {
    let mut rng = rng_for(1, 0);
    let g = ConvexGenerator::quadratic();
    for _ in 0..50 {
        let c = random_partition_credence(6, &mut rng);
        let a: Vec<f64> = (1..=6).map(|i| 0.5f64.powi(i)).collect();
        let s = partition_scores(&c, &g, &a);
        for (j, x) in s.iter().enumerate() {
            assert!((x - brute_score(&c, &a, j)).abs() < 1e-12);
        }
    }
}

#[test]
fn partition_bound_holds_on_sampled_credences() {
    for m in [InaccuracyMeasure::brier(), InaccuracyMeasure::walsh()] {
        let b = partition_bound(&m).unwrap();
        let a = m.weights.take(32).unwrap();
        let mut rng = rng_for(EXPERIMENT_SEED, 99);
        for _ in 0..1000 {
            let c = random_partition_credence(32, &mut rng);
            let s = partition_scores(&c, &m.generator, &a);
            assert!(s.iter().all(|x| *x <= b.bound));
            // the point in no cell carries Σ a_j (c_j φ'(c_j) - φ(c_j))
            let direct: f64 = c.iter().zip(&a).map(|(x, w)| w * (x * 2.0 * x - x * x)).sum();
            assert!((s[32] - direct).abs() < 1e-12);
        }
    }
}

#[test]
fn stability_registry_facts() {
    let m = InaccuracyMeasure::generalized_brier();
    let p = stability_report(&OpinionSpace::countable_partition(), &m, 10, 0).unwrap();
    assert_eq!(p.len(), 1);
    assert_eq!((p[0].property, p[0].status), (StabilityProperty::WStable, StabilityStatus::ProvenTrue));
    assert_eq!(p[0].source.as_deref(), Some("partition-w-stability"));

    let e = OpinionSpace::explicit(vec![1, 2], vec![vec![1]]).unwrap();
    let f = stability_report(&e, &m, 10, 0).unwrap();
    assert!(f.iter().all(|x| x.status == StabilityStatus::ProvenTrue));
    assert_eq!(f.len(), 2);
}

fn assert_witnesses_reverify(space: &OpinionSpace, facts: &[StabilityFact], m: &InaccuracyMeasure) {
    let comp = space.compactify().unwrap();
    for f in facts {
        for w in &f.witnesses {
            let base = compare(&w.c, &w.d, m, space, &DominanceOptions::default()).unwrap();
            assert_eq!(base.relation, Relation::StronglyDominates);
            let lifted = compare(&w.c, &w.d, m, &comp.space, &DominanceOptions::default()).unwrap();
            assert_eq!(lifted.relation, w.lifted_relation);
            assert!(!matches!(lifted.relation, Relation::StronglyDominates | Relation::WeaklyDominates));
            assert!(w.lifted_expected_inaccuracy.is_finite());
        }
    }
}

#[test]
fn tails_with_unit_weights_are_not_stable() {
    let m = InaccuracyMeasure::generalized_brier();
    let space = OpinionSpace::tail_sets();
    let facts = stability_report(&space, &m, 1000, EXPERIMENT_SEED).unwrap();
    assert_eq!(facts.len(), 2);
    for f in &facts {
        assert_eq!(f.status, StabilityStatus::ProvenFalseWitness);
        let w = &f.witnesses[0];
        assert_eq!(w.c.limit(), Some(1.0));
        assert_eq!(w.lifted_expected_inaccuracy, 0.0);
    }
    assert_witnesses_reverify(&space, &facts, &m);
}

#[test]
fn initial_segments_with_unit_weights_are_not_stable() {
    let m = InaccuracyMeasure::generalized_brier();
    let space = OpinionSpace::initial_segments();
    let facts = stability_report(&space, &m, 1000, EXPERIMENT_SEED).unwrap();
    assert!(facts.iter().all(|f| f.status == StabilityStatus::ProvenFalseWitness));
    assert_eq!(facts[0].witnesses[0].c.limit(), Some(0.0));
    assert_witnesses_reverify(&space, &facts, &m);
}

#[test]
fn summable_weights_leave_stability_unknown() {
    let facts = stability_report(&OpinionSpace::tail_sets(), &InaccuracyMeasure::walsh(), 200, 3).unwrap();
    assert!(facts.iter().all(|f| f.status == StabilityStatus::Unknown && f.witnesses.is_empty()));
    assert_eq!(facts[0].candidates_searched, 200);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// A countably coherent credence with finite expected inaccuracy is not
    /// weakly dominated: checked on truncated partitions against random
    /// candidates.
    #[test]
    fn coherent_partition_credences_resist_random_candidates(seed in any::<u64>()) {
        let s = partition_search(&InaccuracyMeasure::brier(), 8, 1, 300, seed, 1).unwrap();
        prop_assert_eq!(s[0].dominators, 0);
        prop_assert!(s[0].best_margin <= 0.0);
    }

    /// On a compact finite space no coherent credence is strongly dominated by
    /// any credence on a grid.
    #[test]
    fn compact_spaces_admit_no_strong_dominator(x in 0u32..=20, y in 0u32..=20) {
        let space = OpinionSpace::explicit(vec![1, 2, 3], vec![vec![1], vec![1, 2]]).unwrap();
        let c = Credence::from_f64s(vec![0.3, 0.6]).unwrap();
        let d = Credence::from_f64s(vec![x as f64 / 20.0, y as f64 / 20.0]).unwrap();
        let v = compare(&c, &d, &InaccuracyMeasure::brier(), &space, &DominanceOptions::rational()).unwrap();
        prop_assert!(!matches!(v.relation, Relation::StronglyDominates | Relation::WeaklyDominates));
    }
}
