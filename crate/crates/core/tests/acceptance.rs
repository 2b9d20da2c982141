//! Acceptance gate: each criterion prints one PASS/FAIL line with its timing;
//! the test fails if any criterion does.
//!
//! Run with `cargo test -p credal-core --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use credal_core::families::{partition_search, walsh_samples, EXPERIMENT_SEED};
use credal_core::{
    check_coherence, check_countable_coherence, compare, find_dominator, partition_bound,
    reproduce_example, CoherenceOptions, CoherenceStatus, ConvexGenerator, Credence, DominanceOptions, DominatorCase,
    ExtReal, InaccuracyMeasure, OpinionSpace, ReproduceOptions, Relation, Weights,
};

struct Outcome {
    pass: bool,
    details: String,
}

fn outcome(pass: bool, details: impl Into<String>) -> Outcome {
    Outcome { pass, details: details.into() }
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn tabulated() -> InaccuracyMeasure {
    InaccuracyMeasure::new("tabulated", ConvexGenerator::tabulated_default(), Weights::unit())
}

/// Explicit space with one world per signature; proposition `i` holds where bit `i` is set.
fn space_from_signatures(sigs: &[u32], n: usize) -> OpinionSpace {
    let worlds: Vec<u64> = (1..=sigs.len() as u64).collect();
    let props = (0..n)
        .map(|i| sigs.iter().zip(&worlds).filter(|(s, _)| *s >> i & 1 == 1).map(|(_, w)| *w).collect())
        .collect();
    OpinionSpace::explicit(worlds, props).unwrap()
}

fn fin(x: ExtReal) -> f64 {
    match x {
        ExtReal::Finite(v) => v,
        ExtReal::PosInf => f64::INFINITY,
    }
}

// Finite instances shared by criteria 1 and 2.

struct Instance {
    space: OpinionSpace,
    /// Distinct world signatures, used by the independent score oracle.
    rows: Vec<Vec<bool>>,
    c: Credence,
    values: Vec<f64>,
    measure: InaccuracyMeasure,
}

fn random_instance(rng: &mut ChaCha8Rng, index: usize) -> Instance {
    let n = rng.gen_range(1..=5usize);
    let nw = rng.gen_range(1..=16usize);
    let sigs: Vec<u32> = (0..nw).map(|_| rng.gen_range(0..1u32 << n)).collect();
    let space = space_from_signatures(&sigs, n);
    let mut rows: Vec<Vec<bool>> = sigs.iter().map(|s| (0..n).map(|i| s >> i & 1 == 1).collect()).collect();
    rows.sort();
    rows.dedup();
    // odd instances: random values (mostly incoherent); even: a random mixture
    // of the worlds rounded to twentieths, coherent or nearly so
    let exact: Vec<BigRational> = if index % 2 == 1 {
        (0..n).map(|_| rat(rng.gen_range(0..=20), 20)).collect()
    } else {
        let mut w: Vec<i64> = rows.iter().map(|_| rng.gen_range(0..=5)).collect();
        if w.iter().all(|x| *x == 0) {
            w[0] = 1;
        }
        let total: i64 = w.iter().sum();
        (0..n).map(|i| rat(rows.iter().zip(&w).filter(|(r, _)| r[i]).map(|(_, x)| x).sum(), total)).collect()
    };
    let c = Credence::from_rationals(exact).unwrap();
    let values = c.values(n);
    let measure = if index % 4 < 2 { InaccuracyMeasure::brier() } else { tabulated() };
    Instance { space, rows, c, values, measure }
}

fn oracle_scores(inst: &Instance, c: &[f64]) -> Vec<f64> {
    let w = vec![1.0; c.len()];
    inst.rows.iter().map(|r| fin(inst.measure.score_signature(c, &w, r))).collect()
}

/// Grid candidates (step 0.05) that weakly dominate `inst.c` by the float
/// oracle; each is then re-checked by the library in exact arithmetic.
fn grid_weak_dominators(inst: &Instance) -> (usize, usize) {
    let n = inst.values.len();
    let base = oracle_scores(inst, &inst.values);
    let total = 21usize.pow(n as u32);
    let (mut hits, mut confirmed) = (0, 0);
    let mut d = vec![0.0; n];
    for code in 0..total {
        let mut k = code;
        let mut idx = Vec::with_capacity(n);
        for x in d.iter_mut() {
            *x = (k % 21) as f64 / 20.0;
            idx.push((k % 21) as i64);
            k /= 21;
        }
        if d.iter().zip(&inst.values).all(|(a, b)| (a - b).abs() < 1e-12) {
            continue;
        }
        let s = oracle_scores(inst, &d);
        let no_worse = s.iter().zip(&base).all(|(a, b)| *a <= b + 1e-12);
        let better = s.iter().zip(&base).any(|(a, b)| *a < b - 1e-12);
        if no_worse && better {
            hits += 1;
            let cand = Credence::from_rationals(idx.iter().map(|i| rat(*i, 20)).collect()).unwrap();
            let v = compare(&inst.c, &cand, &inst.measure, &inst.space, &DominanceOptions::rational()).unwrap();
            if matches!(v.relation, Relation::StronglyDominates | Relation::WeaklyDominates) {
                confirmed += 1;
            }
        }
    }
    (hits, confirmed)
}

/// Criteria 1 and 2 share the projections.
fn finite_equivalence() -> (Outcome, Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(EXPERIMENT_SEED);
    let (mut incoherent, mut coherent, mut grid_checked) = (0, 0, 0);
    let mut failures = Vec::new();
    let mut worst_float_slack = f64::INFINITY;
    let mut worst_pyth = f64::INFINITY;
    let mut worst_oracle_pyth = f64::INFINITY;
    for index in 0..500 {
        let inst = random_instance(&mut rng, index);
        let v = check_coherence(&inst.c, &inst.space, &CoherenceOptions::rational()).unwrap();
        if v.is_coherent() {
            coherent += 1;
            if inst.values.len() <= 3 {
                grid_checked += 1;
                let (_, confirmed) = grid_weak_dominators(&inst);
                if confirmed > 0 {
                    failures.push(format!("instance {index}: coherent credence has {confirmed} grid dominators"));
                }
            }
            continue;
        }
        incoherent += 1;
        let r = find_dominator(&inst.c, &inst.measure, &inst.space, &DominanceOptions::rational()).unwrap();
        let exact = compare(&inst.c, &r.dominator, &inst.measure, &inst.space, &DominanceOptions::rational()).unwrap();
        let strict = exact.relation == Relation::StronglyDominates
            && exact.per_atom.iter().all(|a| a.order == credal_core::dominance::AtomOrder::Less);
        let dominator_coherent = check_coherence(&r.dominator, &inst.space, &CoherenceOptions::rational()).unwrap().is_coherent();
        let pi = r.dominator.values(inst.values.len());
        let (sc, sd) = (oracle_scores(&inst, &inst.values), oracle_scores(&inst, &pi));
        let slack = sc.iter().zip(&sd).map(|(a, b)| a - b).fold(f64::INFINITY, f64::min);
        worst_float_slack = worst_float_slack.min(slack);
        if !(strict && dominator_coherent && slack >= 1e-9) {
            failures.push(format!("instance {index}: strict={strict} coherent={dominator_coherent} slack={slack:e}"));
        }
        if let Some(pr) = &r.projection {
            worst_pyth = worst_pyth.min(pr.pythagorean.worst_slack);
            // independent check: I(c,w) >= I(pi,w) + D(pi,c) at every world
            let gap: f64 = pi.iter().zip(&inst.values).map(|(p, c)| fin(inst.measure.generator.divergence(*p, *c))).sum();
            for (a, b) in sc.iter().zip(&sd) {
                worst_oracle_pyth = worst_oracle_pyth.min(a - b - gap);
            }
        } else {
            failures.push(format!("instance {index}: dominator is not a projection ({:?})", r.case));
        }
    }
    let c1 = outcome(
        failures.is_empty() && incoherent > 0 && grid_checked > 0,
        format!(
            "{incoherent} incoherent strictly dominated in exact arithmetic (worst float slack {worst_float_slack:.3e}), \
             {coherent} coherent ({grid_checked} grid-searched) with no weak dominator{}",
            if failures.is_empty() { String::new() } else { format!("; failures: {:?}", &failures[..failures.len().min(3)]) }
        ),
    );
    let c2 = outcome(
        worst_pyth >= -1e-6 && worst_oracle_pyth >= -1e-6,
        format!("worst slack {worst_pyth:.3e} (library), {worst_oracle_pyth:.3e} (independent) over {incoherent} projections"),
    );
    (c1, c2)
}

fn example_report(id: &str, opts: &ReproduceOptions) -> Outcome {
    match reproduce_example(id, opts) {
        Ok(r) => {
            let failed: Vec<_> = r.assertions.iter().filter(|a| !a.pass).map(|a| format!("{}: {}", a.name, a.details)).collect();
            let names: Vec<_> = r.assertions.iter().map(|a| a.name.as_str()).collect();
            outcome(r.all_assertions_pass, if failed.is_empty() { names.join(", ") } else { failed.join("; ") })
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn tails_example() -> Outcome {
    let r = example_report("tails-inv-sqrt", &ReproduceOptions::default());
    let c = Credence::rule(credal_core::CredenceRule::InvSqrt { scale: 1.0 }).unwrap();
    let v = check_countable_coherence(&c, &OpinionSpace::tail_sets(), &CoherenceOptions::default()).unwrap();
    outcome(r.pass && v.status == CoherenceStatus::CountablyCoherent, r.details)
}

fn initial_segments_example() -> Outcome {
    let r = example_report("initial-segments-zero", &ReproduceOptions::default());
    let added = OpinionSpace::initial_segments().compactify().unwrap().added_points.len();
    outcome(r.pass && added == 1, format!("{}; added points {added}", r.details))
}

fn walsh() -> Outcome {
    match walsh_samples(16, 100, EXPERIMENT_SEED, jobs()) {
        Ok(s) => {
            let max = s.iter().map(|x| x.max_score).fold(0.0, f64::max);
            let dominated = s.iter().filter(|x| x.strongly_dominated).count();
            let margin = s.iter().filter_map(|x| x.min_margin).fold(f64::INFINITY, f64::min);
            outcome(
                s.len() == 100 && max <= 1.0 && dominated == 100,
                format!("max score {max:.6}, {dominated}/100 strongly dominated by projections, smallest margin {margin:.3e}"),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn partition() -> Outcome {
    let m = InaccuracyMeasure::brier();
    let b = partition_bound(&m).unwrap();
    let s = partition_search(&m, 32, 200, 10_000, EXPERIMENT_SEED, jobs()).unwrap();
    let dominators: usize = s.iter().map(|x| x.dominators).sum();
    let evaluations: usize = s.iter().map(|x| x.evaluations).sum();
    let max = s.iter().map(|x| x.max_score.max(x.outside_score)).fold(0.0, f64::max);
    let best = s.iter().map(|x| x.best_margin).fold(f64::NEG_INFINITY, f64::max);
    outcome(
        s.len() == 200 && dominators == 0 && (b.c, b.d) == (1.0, 2.0) && max <= b.bound && s.iter().all(|x| x.evaluations >= 10_000),
        format!(
            "{evaluations} candidate evaluations, 0 expected / {dominators} found weak dominators, best margin {best:.3e}; \
             C={} D={} bound {} vs max score {max:.6} (outside point included)",
            b.c, b.d, b.bound
        ),
    )
}

/// Credence vectors of length `n` whose entries share a denominator `d <= 10`.
fn credences_with_denominator_at_most_10(n: usize) -> Vec<Vec<BigRational>> {
    let mut out: Vec<Vec<BigRational>> = Vec::new();
    for d in 1..=10i64 {
        for code in 0..(d as usize + 1).pow(n as u32) {
            let mut k = code;
            out.push(
                (0..n)
                    .map(|_| {
                        let v = rat((k % (d as usize + 1)) as i64, d);
                        k /= d as usize + 1;
                        v
                    })
                    .collect(),
            );
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Sets of at most 6 distinct signatures over `n` propositions, one per orbit
/// under reordering the propositions.
fn signature_sets(n: usize) -> Vec<Vec<u32>> {
    let perms: Vec<Vec<usize>> = match n {
        1 => vec![vec![0]],
        2 => vec![vec![0, 1], vec![1, 0]],
        _ => vec![vec![0, 1, 2], vec![0, 2, 1], vec![1, 0, 2], vec![1, 2, 0], vec![2, 0, 1], vec![2, 1, 0]],
    };
    let permute = |s: u32, p: &[usize]| (0..n).map(|i| (s >> i & 1) << p[i]).sum::<u32>();
    let m = 1u32 << n;
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for mask in 1u32..(1 << m) {
        if mask.count_ones() > 6 {
            continue;
        }
        let sigs: Vec<u32> = (0..m).filter(|s| mask >> s & 1 == 1).collect();
        let canon = perms.iter().map(|p| sigs.iter().map(|s| 1u32 << permute(*s, p)).sum::<u32>()).min().unwrap();
        if seen.insert(canon) {
            out.push(sigs);
        }
    }
    out
}

fn lp_vs_tarski() -> Outcome {
    use credal_core::coherence::{check_on_matrix, PartialMeasureOracle};
    let mut work = Vec::new();
    for n in 1..=3usize {
        let credences = std::sync::Arc::new(credences_with_denominator_at_most_10(n));
        for sigs in signature_sets(n) {
            work.push((n, sigs, credences.clone()));
        }
    }
    let per = work.len().div_ceil(jobs());
    let results: Vec<(usize, Vec<String>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = work
            .chunks(per)
            .map(|chunk| {
                scope.spawn(move || {
                    let mut checked = 0;
                    let mut disagreements = Vec::new();
                    for (n, sigs, credences) in chunk {
                        let space = space_from_signatures(sigs, *n);
                        let (atoms, matrix) = space.build_quotient(1).unwrap();
                        let oracle = PartialMeasureOracle::new(&space, n + 1).unwrap();
                        for c in credences.iter() {
                            let cred = Credence::from_rationals(c.clone()).unwrap();
                            let lp = check_on_matrix(&cred, &atoms, &matrix, &CoherenceOptions::rational()).unwrap().is_coherent();
                            let tarski = oracle.holds(&cred).unwrap();
                            checked += 1;
                            if lp != tarski {
                                disagreements.push(format!("signatures {sigs:?} c {c:?}: lp {lp} tarski {tarski}"));
                            }
                        }
                    }
                    (checked, disagreements)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let checked: usize = results.iter().map(|r| r.0).sum();
    let bad: Vec<&String> = results.iter().flat_map(|r| &r.1).collect();
    outcome(
        bad.is_empty() && checked > 0,
        format!(
            "{checked} credences over {} spaces, {} disagreements{}",
            work.len(),
            bad.len(),
            bad.first().map_or(String::new(), |b| format!(" e.g. {b}"))
        ),
    )
}

fn propriety_and_divergence() -> Outcome {
    let gens = [ConvexGenerator::quadratic(), ConvexGenerator::tabulated_default(), ConvexGenerator::shifted_entropy()];
    let grid: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
    let (mut propriety, mut divergence, mut derivative) = (0usize, 0usize, 0usize);
    let mut worst_fd = 0.0f64;
    let mut failures = Vec::new();
    for g in &gens {
        // strict propriety: p ↦ p𝔡(1,y) + (1-p)𝔡(0,y) is uniquely minimised at y = p
        for (i, &p) in grid.iter().enumerate() {
            // with 0·∞ = 0 at the endpoints
            let term = |w: f64, x: f64, y: f64| if w == 0.0 { 0.0 } else { w * fin(g.divergence(x, y)) };
            let f = |y: f64| term(p, 1.0, y) + term(1.0 - p, 0.0, y);
            let at_p = f(p);
            for (j, &y) in grid.iter().enumerate() {
                propriety += 1;
                if i != j && !(f(y) > at_p) {
                    failures.push(format!("{} propriety p={p} y={y}", g.name()));
                }
            }
        }
        // 𝔡 ≥ 0 with equality exactly on the diagonal
        for (i, &x) in grid.iter().enumerate() {
            for (j, &y) in grid.iter().enumerate() {
                divergence += 1;
                let d = g.divergence(x, y);
                let ok = if i == j { d == ExtReal::Finite(0.0) } else { d > ExtReal::Finite(0.0) };
                if !ok {
                    failures.push(format!("{} divergence ({x},{y}) = {d:?}", g.name()));
                }
            }
        }
        if g.is_exact() {
            for i in 0..=20 {
                for j in 0..=20 {
                    let (x, y) = (rat(i, 20), rat(j, 20));
                    let d = g.divergence_exact(&x, &y).unwrap();
                    if (i == j) != d.is_zero() || d < BigRational::zero() {
                        failures.push(format!("{} exact divergence ({x},{y})", g.name()));
                    }
                }
            }
        }
        // φ' against centred differences on the interior grid
        let h = 1e-7;
        for &x in &grid[1..grid.len() - 1] {
            derivative += 1;
            let fd = (g.phi(x + h) - g.phi(x - h)) / (2.0 * h);
            let err = (fd - g.dphi(x)).abs();
            worst_fd = worst_fd.max(err);
            if err > 1e-6 {
                failures.push(format!("{} derivative at {x}: {err:e}", g.name()));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{} generators: {propriety} propriety, {divergence} divergence, {derivative} derivative points; worst |φ' - FD| {worst_fd:.2e}{}",
            gens.len(),
            failures.first().map_or(String::new(), |f| format!("; first failure {f}"))
        ),
    )
}

fn timed(f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let t = Instant::now();
    let o = f();
    (o, t.elapsed())
}

#[test]
fn acceptance() {
    let mut lines = Vec::new();
    let mut all = true;
    let mut report = |id: usize, name: &str, o: Outcome, elapsed: Duration, limit: Option<Duration>| {
        let in_time = limit.is_none_or(|l| elapsed < l);
        let pass = o.pass && in_time;
        all &= pass;
        let budget = limit.map_or(String::new(), |l| format!(" (limit {}s)", l.as_secs()));
        let line = format!(
            "{} criterion {id} {name}: {}; {:.2}s{budget}{}",
            if pass { "PASS" } else { "FAIL" },
            o.details,
            elapsed.as_secs_f64(),
            if in_time { "" } else { " OVER TIME" }
        );
        println!("{line}");
        lines.push(line);
    };

    let t = Instant::now();
    let (c1, c2) = finite_equivalence();
    let e = t.elapsed();
    report(1, "finite equivalence", c1, e, Some(Duration::from_secs(60)));
    report(2, "pythagorean inequality", c2, e, None);
    let (o, e) = timed(tails_example);
    report(3, "tails 1/sqrt(N+1)", o, e, Some(Duration::from_secs(5)));
    let (o, e) = timed(initial_segments_example);
    report(4, "initial segments zero", o, e, None);
    let (o, e) = timed(walsh);
    report(5, "walsh measure", o, e, None);
    let (o, e) = timed(partition);
    report(6, "partition bound", o, e, Some(Duration::from_secs(120)));
    let (o, e) = timed(lp_vs_tarski);
    report(7, "lp vs partial measure", o, e, None);
    let (o, e) = timed(propriety_and_divergence);
    report(8, "propriety and divergence", o, e, None);

    assert!(all, "acceptance failures:\n{}", lines.join("\n"));
}

#[test]
fn criterion_workloads_have_expected_size() {
    assert_eq!(credences_with_denominator_at_most_10(1).len(), 33);
    assert_eq!(signature_sets(3).len(), 74);
    let r = find_dominator(
        &Credence::from_f64s(vec![0.7, 0.7]).unwrap(),
        &InaccuracyMeasure::brier(),
        &space_from_signatures(&[1, 2], 2),
        &DominanceOptions::rational(),
    )
    .unwrap();
    assert_eq!(r.case, DominatorCase::Projection);
}
