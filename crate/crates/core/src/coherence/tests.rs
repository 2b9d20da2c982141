use std::collections::BTreeSet;

use proptest::prelude::*;

use super::*;
use crate::credence::CredenceRule;
use crate::scalar::rational;

fn partition3() -> OpinionSpace {
    OpinionSpace::explicit(vec![1, 2, 3], vec![vec![1], vec![2], vec![3]]).unwrap()
}

fn p_and_not_p() -> OpinionSpace {
    OpinionSpace::explicit(vec![1, 2], vec![vec![1], vec![2]]).unwrap()
}

fn exact(v: &[(i64, i64)]) -> Credence {
    Credence::from_rationals(v.iter().map(|(n, d)| rational(*n, *d)).collect()).unwrap()
}

/// Hull membership oracle for a 2-atom space: c lies on the segment between
/// the two valuation rows.
fn on_segment(c: &[Rational], a: &[bool], b: &[bool]) -> bool {
    let to = |x: bool| if x { Rational::one() } else { Rational::zero() };
    // find t with c = t a + (1 - t) b
    let mut t: Option<Rational> = None;
    for i in 0..c.len() {
        let (ai, bi) = (to(a[i]), to(b[i]));
        if ai == bi {
            if c[i] != ai {
                return false;
            }
        } else {
            let ti = (&c[i] - &bi) / (&ai - &bi);
            match &t {
                Some(t0) if *t0 != ti => return false,
                _ => t = Some(ti),
            }
        }
    }
    t.map_or(true, |t| t >= Rational::zero() && t <= Rational::one())
}

#[test]
fn partition_credence_is_its_own_witness() {
    let v = check_coherence(&exact(&[(1, 5), (3, 10), (1, 2)]), &partition3(), &CoherenceOptions::rational()).unwrap();
    assert_eq!(v.status, CoherenceStatus::Coherent);
    let w = v.witness.unwrap();
    assert_eq!(w.weight_of(0), 0.2);
    assert_eq!(w.weight_of(1), 0.3);
    assert_eq!(w.weight_of(2), 0.5);
}

#[test]
fn oversized_partition_credence_is_incoherent_with_certificate() {
    let c = exact(&[(1, 2), (3, 5), (1, 5)]);
    let space = partition3();
    let v = check_coherence(&c, &space, &CoherenceOptions::rational()).unwrap();
    assert_eq!(v.status, CoherenceStatus::Incoherent);
    assert_certificate_separates(&v, &c, &space);
}

fn assert_certificate_separates(v: &CoherenceVerdict, c: &Credence, space: &OpinionSpace) {
    let Some(Certificate::Separating { coefficients, offset, margin }) = &v.certificate else {
        panic!("missing certificate");
    };
    let (atoms, matrix) = space.build_quotient(1).unwrap();
    let h = |i: usize| {
        coefficients.iter().find(|(j, _)| *j == i).map_or(Rational::zero(), |(_, v)| v.exact().unwrap().clone())
    };
    let beta = offset.exact().unwrap().clone();
    for a in &atoms {
        let s: Rational =
            (1..=matrix.n_props()).filter(|i| matrix.entry(a.id, i - 1)).map(h).sum::<Rational>() + &beta;
        assert!(s <= Rational::zero(), "atom {} not separated", a.id);
    }
    let at_c: Rational =
        (1..=matrix.n_props()).map(|i| h(i) * c.exact_value(i).unwrap()).sum::<Rational>() + &beta;
    assert!(at_c > Rational::zero());
    assert_eq!(&at_c, margin.exact().unwrap());
}

#[test]
fn complement_pair_above_one_is_incoherent() {
    let c = exact(&[(3, 5), (1, 2)]);
    let space = p_and_not_p();
    let v = check_coherence(&c, &space, &CoherenceOptions::rational()).unwrap();
    let target: Vec<Rational> = c.exact_values(2).unwrap();
    assert!(!on_segment(&target, &[true, false], &[false, true]));
    assert_eq!(v.status, CoherenceStatus::Incoherent);
    assert_certificate_separates(&v, &c, &space);
    let f = check_coherence(&c, &space, &CoherenceOptions::default()).unwrap();
    assert_eq!(f.status, CoherenceStatus::Incoherent);
}

#[test]
fn length_mismatch_is_rejected() {
    let err = check_coherence(&exact(&[(1, 2)]), &partition3(), &CoherenceOptions::default()).unwrap_err();
    assert_eq!(err.name(), "invalid-argument");
}

#[test]
fn inverse_sqrt_on_tails_is_countably_coherent() {
    let c = Credence::rule(CredenceRule::InvSqrt { scale: 1.0 }).unwrap();
    let space = OpinionSpace::tail_sets();
    let v = check_countable_coherence(&c, &space, &CoherenceOptions::default()).unwrap();
    assert_eq!(v.status, CoherenceStatus::CountablyCoherent);
    let w = v.witness.unwrap();
    assert!((w.total() - 1.0).abs() < 1e-9);
    // lambda at world 0 is 1 - c(p_1)
    assert!((w.weight_of(0) - (1.0 - 0.5f64.sqrt())).abs() < 1e-15);
}

#[test]
fn zero_on_initial_segments_is_only_finitely_additive() {
    let c = Credence::rule(CredenceRule::Zero).unwrap();
    let space = OpinionSpace::initial_segments();
    let v = check_coherence(&c, &space, &CoherenceOptions::default()).unwrap();
    assert_eq!(v.status, CoherenceStatus::Coherent);
    let cc = check_countable_coherence(&c, &space, &CoherenceOptions::default()).unwrap();
    assert_eq!(cc.status, CoherenceStatus::Coherent);
    assert_eq!(cc.witness.unwrap().residual, Value::Exact(Rational::one()));

    // on the compactified space the escaping mass sits on the added point
    let star = space.compactify().unwrap().space;
    let cs = check_countable_coherence(&c, &star, &CoherenceOptions::default()).unwrap();
    assert_eq!(cs.status, CoherenceStatus::CountablyCoherent);
    let w = cs.witness.unwrap();
    let on_star: f64 =
        w.weights.iter().filter(|a| matches!(a.representative, Some(World::Star(_)))).map(|a| a.weight.to_f64()).sum();
    assert_eq!(on_star, 1.0);
}

#[test]
fn halving_credence_on_partition_is_countably_coherent() {
    let c = Credence::rule(CredenceRule::Geometric { scale: 1.0, ratio: 0.5 }).unwrap();
    let v = check_countable_coherence(&c, &OpinionSpace::countable_partition(), &CoherenceOptions::default()).unwrap();
    assert_eq!(v.status, CoherenceStatus::CountablyCoherent);
}

#[test]
fn partition_total_above_one_gets_prefix_certificate() {
    let c = Credence::rule(CredenceRule::Const { value: 0.3 }).unwrap();
    let v = check_coherence(&c, &OpinionSpace::countable_partition(), &CoherenceOptions::default()).unwrap();
    assert_eq!(v.status, CoherenceStatus::Incoherent);
    match v.certificate {
        Some(Certificate::Separating { coefficients, margin, .. }) => {
            assert_eq!(coefficients.len(), 4);
            assert!(margin.to_f64() > 0.0);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn rising_tail_credence_is_incoherent() {
    let c = exact(&[(1, 4), (1, 2)]);
    let v = check_coherence(&c, &OpinionSpace::tail_sets(), &CoherenceOptions::default()).unwrap();
    assert_eq!(v.status, CoherenceStatus::Incoherent);
    match v.certificate {
        Some(Certificate::Separating { coefficients, margin, .. }) => {
            assert_eq!(coefficients[0].0, 2);
            assert_eq!(margin, Value::Exact(rational(1, 4)));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn custom_rule_without_limit_is_undetermined() {
    let c = Credence::rule(CredenceRule::Custom {
        name: "slow".into(),
        f: std::sync::Arc::new(|n| 1.0 / (n as f64 + 1.0)),
        declared_limit: None,
    })
    .unwrap();
    let v = check_coherence(&c, &OpinionSpace::tail_sets(), &CoherenceOptions::default()).unwrap();
    assert_eq!(v.status, CoherenceStatus::Undetermined);
}

// ---- partial-measure oracle ------------------------------------------------

/// Literal union-of-intersections set `S^{m,k}` of a tuple: worlds lying in
/// the intersection of some `k+1` members with strictly increasing positions.
fn union_of_intersections(sets: &[BTreeSet<u64>], k: usize, worlds: &[u64]) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    let m = sets.len();
    if k + 1 > m {
        return out;
    }
    let mut idx: Vec<usize> = (0..=k).collect();
    loop {
        for w in worlds {
            if idx.iter().all(|&i| sets[i].contains(w)) {
                out.insert(*w);
            }
        }
        // next strictly increasing index sequence
        let mut pos = k as isize;
        while pos >= 0 && idx[pos as usize] == m - (k + 1) + pos as usize {
            pos -= 1;
        }
        if pos < 0 {
            break;
        }
        let p = pos as usize;
        idx[p] += 1;
        for j in p + 1..=k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out
}

fn literal_violations(c: &Credence, space: &OpinionSpace, len: usize) -> usize {
    let e = space.as_explicit().unwrap();
    let worlds = e.worlds();
    let mut items: Vec<BTreeSet<u64>> = vec![worlds.iter().copied().collect()];
    items.extend(e.propositions().iter().cloned());
    let mut values = vec![Rational::one()];
    values.extend(c.exact_values(e.propositions().len()).unwrap());
    let tuples = tarski::multisets(items.len(), len);
    let mut count = 0;
    for a in &tuples {
        for b in &tuples {
            let sa: Vec<_> = a.iter().map(|&i| items[i].clone()).collect();
            let sb: Vec<_> = b.iter().map(|&i| items[i].clone()).collect();
            let included = (0..a.len())
                .all(|k| union_of_intersections(&sa, k, worlds).is_subset(&union_of_intersections(&sb, k, worlds)));
            let lhs: Rational = a.iter().map(|&i| values[i].clone()).sum();
            let rhs: Rational = b.iter().map(|&i| values[i].clone()).sum();
            if included && lhs > rhs {
                count += 1;
            }
        }
    }
    count
}

#[test]
fn tarski_flags_complement_pair_over_one() {
    let space = p_and_not_p();
    let bad = exact(&[(3, 5), (1, 2)]);
    let v = check_partial_measure(&bad, &space, 2).unwrap();
    assert!(v.iter().any(|x| x.phis == vec![1, 2] && x.psis == vec![0] && x.lhs_sum == rational(11, 10)));
    assert_eq!(v.len(), literal_violations(&bad, &space, 2));
    let good = exact(&[(3, 5), (2, 5)]);
    assert!(check_partial_measure(&good, &space, 3).unwrap().is_empty());
    assert_eq!(literal_violations(&good, &space, 3), 0);
}

#[test]
fn tarski_whole_space_alone_has_no_violation() {
    let space = OpinionSpace::explicit(vec![1, 2], vec![vec![1, 2]]).unwrap();
    assert!(check_partial_measure(&exact(&[(1, 1)]), &space, 2).unwrap().is_empty());
}

#[test]
fn tarski_rejects_long_tuples() {
    let err = check_partial_measure(&exact(&[(1, 2), (1, 2)]), &p_and_not_p(), 6).unwrap_err();
    assert_eq!(err.name(), "invalid-argument");
}

fn small_space() -> impl Strategy<Value = OpinionSpace> {
    (1usize..=5, 1usize..=3).prop_flat_map(|(nw, np)| {
        prop::collection::vec(prop::collection::vec(any::<bool>(), nw), np).prop_map(move |masks| {
            let worlds: Vec<u64> = (0..nw as u64).collect();
            let props = masks
                .into_iter()
                .map(|m| m.into_iter().enumerate().filter(|(_, b)| *b).map(|(i, _)| i as u64).collect())
                .collect();
            OpinionSpace::explicit(worlds, props).unwrap()
        })
    })
}

fn fractions(n: usize) -> impl Strategy<Value = Credence> {
    prop::collection::vec((0i64..=10, 1i64..=10), n).prop_map(|v| {
        Credence::from_rationals(v.into_iter().map(|(a, b)| rational(a.min(b), b)).collect()).unwrap()
    })
}

fn space_and_credence() -> impl Strategy<Value = (OpinionSpace, Credence)> {
    small_space().prop_flat_map(|s| {
        let n = s.prop_count().unwrap();
        (Just(s), fractions(n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lp_agrees_with_tarski_and_literal_inclusions((space, c) in space_and_credence()) {
        let n = space.prop_count().unwrap();
        let lp = check_coherence(&c, &space, &CoherenceOptions::rational()).unwrap();
        let tarski = check_partial_measure(&c, &space, n + 1).unwrap();
        prop_assert_eq!(lp.is_coherent(), tarski.is_empty());
        prop_assert_eq!(PartialMeasureOracle::new(&space, n + 1).unwrap().holds(&c).unwrap(), tarski.is_empty());
        if n <= 2 {
            prop_assert_eq!(tarski.len(), literal_violations(&c, &space, n + 1));
        }
    }

    #[test]
    fn witnesses_reproduce_the_credence((space, c) in space_and_credence()) {
        let (_, matrix) = space.build_quotient(1).unwrap();
        for opts in [CoherenceOptions::rational(), CoherenceOptions::default()] {
            let v = check_coherence(&c, &space, &opts).unwrap();
            if let Some(w) = &v.witness {
                prop_assert!(witness_residual(&c, w, &matrix) <= DEFAULT_EPS_COH);
                prop_assert!(w.weights.iter().all(|a| a.weight.to_f64() >= 0.0));
                prop_assert!((w.total() - 1.0).abs() <= DEFAULT_EPS_COH);
            } else {
                prop_assert!(v.certificate.is_some());
            }
        }
    }

    #[test]
    fn float_and_exact_modes_agree((space, c) in space_and_credence()) {
        let a = check_coherence(&c, &space, &CoherenceOptions::rational()).unwrap();
        let b = check_coherence(&c, &space, &CoherenceOptions::default()).unwrap();
        prop_assert_eq!(a.status, b.status);
    }

    #[test]
    fn tail_rule_matches_truncated_lp(v in prop::collection::vec(0i64..=8, 1..=6)) {
        let k = v.len();
        let c = Credence::from_rationals(v.iter().map(|x| rational(*x, 8)).collect()).unwrap();
        // tails truncated at k: worlds 0..=k, p_i = {i..=k}
        let tails = OpinionSpace::explicit(
            (0..=k as u64).collect(),
            (1..=k as u64).map(|i| (i..=k as u64).collect()).collect(),
        ).unwrap();
        let lp = check_coherence(&c, &tails, &CoherenceOptions::rational()).unwrap();
        let rule = check_coherence(&c, &OpinionSpace::tail_sets(), &CoherenceOptions::rational()).unwrap();
        prop_assert_eq!(lp.is_coherent(), rule.is_coherent());

        let segs = OpinionSpace::explicit(
            (0..=k as u64 + 1).collect(),
            (1..=k as u64).map(|i| (0..=i).collect()).collect(),
        ).unwrap();
        let lp = check_coherence(&c, &segs, &CoherenceOptions::rational()).unwrap();
        let nondecreasing = v.windows(2).all(|w| w[0] <= w[1]);
        prop_assert_eq!(lp.is_coherent(), nondecreasing);
    }

    #[test]
    fn countable_coherence_implies_coherence(scale in 0.0f64..=1.0, ratio in 0.0f64..=1.0, which in 0usize..3) {
        let c = Credence::rule(CredenceRule::Geometric { scale, ratio }).unwrap();
        let space = [OpinionSpace::tail_sets(), OpinionSpace::initial_segments(), OpinionSpace::countable_partition()][which].clone();
        let cc = check_countable_coherence(&c, &space, &CoherenceOptions::default()).unwrap();
        if cc.status == CoherenceStatus::CountablyCoherent {
            let plain = check_coherence(&c, &space, &CoherenceOptions::default()).unwrap();
            prop_assert!(plain.is_coherent());
        }
    }
}
