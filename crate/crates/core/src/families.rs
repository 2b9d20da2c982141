//! Named countable constructions packaged as seeded, reproducible experiments,
//! the partition score bound, and a registry of stability facts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coherence::{check_coherence, check_countable_coherence, CoherenceOptions, CoherenceStatus};
use crate::credence::{Credence, CredenceRule};
use crate::dominance::{compare, find_dominator, project_coherent, DominanceOptions, DominatorCase, Relation};
use crate::error::{invalid_arg, CredalError, Result};
use crate::inaccuracy::{expected_inaccuracy, score_world, InaccuracyMeasure, SeriesPolicy, SeriesStatus};
use crate::opinion_space::{CompactnessVerdict, Family, OpinionSpace, World};
use crate::scalar::{rational_from_f64, Rational, Scalar};

pub const EXPERIMENT_SEED: u64 = 0xACC;
pub const EXPERIMENT_TRUNCATION: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    pub details: String,
}

impl Assertion {
    fn new(name: &str, pass: bool, details: impl Into<String>) -> Self {
        Assertion { name: name.into(), pass, details: details.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExampleReport {
    pub id: String,
    pub seed: u64,
    pub truncation: usize,
    pub assertions: Vec<Assertion>,
    pub all_assertions_pass: bool,
}

impl ExampleReport {
    fn new(id: &str, seed: u64, truncation: usize, assertions: Vec<Assertion>) -> Self {
        let all_assertions_pass = assertions.iter().all(|a| a.pass);
        ExampleReport { id: id.into(), seed, truncation, assertions, all_assertions_pass }
    }

    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExampleId {
    /// `c(p_n) = 1/sqrt(n+1)` on tail sets.
    TailsInvSqrt,
    /// `c ≡ 0` on initial segments.
    InitialSegmentsZero,
    Walsh,
    PartitionBound,
}

impl ExampleId {
    pub const ALL: [ExampleId; 4] =
        [ExampleId::TailsInvSqrt, ExampleId::InitialSegmentsZero, ExampleId::Walsh, ExampleId::PartitionBound];

    pub fn parse(id: &str) -> Result<Self> {
        Ok(match id {
            "ex4.1" | "tails-inv-sqrt" => ExampleId::TailsInvSqrt,
            "ex4.2" | "initial-segments-zero" => ExampleId::InitialSegmentsZero,
            "walsh" => ExampleId::Walsh,
            "partition_theorem" | "partition-bound" => ExampleId::PartitionBound,
            _ => return Err(CredalError::UnknownExample(id.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExampleId::TailsInvSqrt => "tails-inv-sqrt",
            ExampleId::InitialSegmentsZero => "initial-segments-zero",
            ExampleId::Walsh => "walsh",
            ExampleId::PartitionBound => "partition-bound",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReproduceOptions {
    pub seed: u64,
    pub truncation: usize,
    /// Random instances for the sampled experiments; `None` uses each default.
    pub samples: Option<usize>,
    /// Candidate evaluations per credence in adversarial searches.
    pub budget: usize,
    pub jobs: usize,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        ReproduceOptions { seed: EXPERIMENT_SEED, truncation: EXPERIMENT_TRUNCATION, samples: None, budget: 10_000, jobs: 1 }
    }
}

pub fn reproduce_example(id: &str, opts: &ReproduceOptions) -> Result<ExampleReport> {
    if opts.truncation < 2 {
        return invalid_arg("truncation must be at least 2");
    }
    match ExampleId::parse(id)? {
        ExampleId::TailsInvSqrt => tails_inv_sqrt(opts),
        ExampleId::InitialSegmentsZero => initial_segments_zero(opts),
        ExampleId::Walsh => walsh(opts),
        ExampleId::PartitionBound => partition_experiment(opts),
    }
}

/// Number of natural worlds at which divergence is checked.
const SAMPLED_WORLDS: u64 = 10;

fn tails_inv_sqrt(opts: &ReproduceOptions) -> Result<ExampleReport> {
    let space = OpinionSpace::tail_sets().with_truncation(opts.truncation)?;
    let c = Credence::rule(CredenceRule::InvSqrt { scale: 1.0 })?;
    let m = InaccuracyMeasure::generalized_brier();
    let mut out = Vec::new();

    let report = space.search_compactness_witness(opts.truncation)?;
    let verified = report.witness.as_ref().is_some_and(|w| space.verify_witness(w, opts.truncation));
    out.push(Assertion::new(
        "non_compact",
        report.verdict == CompactnessVerdict::NonCompactWitness && verified,
        format!("witness verified to depth {}", opts.truncation),
    ));

    let v = check_countable_coherence(&c, &space, &CoherenceOptions::default())?;
    out.push(Assertion::new("countably_coherent", v.status == CoherenceStatus::CountablyCoherent, format!("{:?}", v.status)));

    let policy = SeriesPolicy::default();
    let mut tags = Vec::new();
    let mut all_inf = true;
    for n in 0..SAMPLED_WORLDS {
        let s = score_world(&c, &m, &World::Nat(n), &space, &policy)?;
        all_inf &= s.is_infinite() && s.tag.as_deref() == Some("harmonic comparison");
        tags.push(s.tag.unwrap_or_default());
    }
    tags.dedup();
    out.push(Assertion::new(
        "score_infinite_everywhere",
        all_inf,
        format!("{SAMPLED_WORLDS} worlds, tags {tags:?}"),
    ));

    let r = find_dominator(&c, &m, &space, &DominanceOptions::default())?;
    out.push(Assertion::new(
        "omniscient_strong_dominator",
        r.case == DominatorCase::Omniscient && r.verdict.relation == Relation::StronglyDominates,
        format!("{:?} via {:?} over {} atoms", r.verdict.relation, r.case, r.verdict.per_atom.len()),
    ));
    Ok(ExampleReport::new(ExampleId::TailsInvSqrt.name(), opts.seed, opts.truncation, out))
}

fn initial_segments_zero(opts: &ReproduceOptions) -> Result<ExampleReport> {
    let space = OpinionSpace::initial_segments().with_truncation(opts.truncation)?;
    let c = Credence::rule(CredenceRule::Zero)?;
    let m = InaccuracyMeasure::generalized_brier();
    let copts = CoherenceOptions::default();
    let mut out = Vec::new();

    let v = check_countable_coherence(&c, &space, &copts)?;
    out.push(Assertion::new("coherent", v.is_coherent(), format!("{:?}", v.status)));
    let residual = v.witness.as_ref().map_or(f64::NAN, |w| w.residual.to_f64());
    out.push(Assertion::new(
        "not_countably_coherent",
        v.status == CoherenceStatus::Coherent && residual == 1.0,
        format!("mass on no world: {residual}"),
    ));

    let policy = SeriesPolicy::default();
    let all_inf = (0..SAMPLED_WORLDS)
        .map(|n| score_world(&c, &m, &World::Nat(n), &space, &policy))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .all(|s| s.is_infinite());
    out.push(Assertion::new("score_infinite_everywhere", all_inf, format!("{SAMPLED_WORLDS} worlds")));

    let comp = space.compactify()?;
    out.push(Assertion::new(
        "one_added_point",
        comp.added_points.len() == 1,
        format!("{} added", comp.added_points.len()),
    ));
    let star = World::Star(comp.space.star().unwrap_or_default().to_string());
    let valuation_zero = (1..=opts.truncation).all(|i| !comp.space.contains(i, &star));
    out.push(Assertion::new("added_point_valuation_zero", valuation_zero, "checked up to the truncation"));

    let lifted = check_countable_coherence(&c, &comp.space, &copts)?;
    let star_mass = lifted
        .witness
        .as_ref()
        .and_then(|w| w.weights.iter().find(|a| matches!(a.representative, Some(World::Star(_)))))
        .map_or(0.0, |a| a.weight.to_f64());
    out.push(Assertion::new(
        "lift_is_added_point_valuation",
        lifted.status == CoherenceStatus::CountablyCoherent && star_mass == 1.0,
        format!("{:?}, mass {star_mass} on the added point", lifted.status),
    ));
    Ok(ExampleReport::new(ExampleId::InitialSegmentsZero.name(), opts.seed, opts.truncation, out))
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs `f` on `0..n` over `jobs` threads; results come back in index order.
fn par_map<T: Send>(n: usize, jobs: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let jobs = jobs.clamp(1, n.max(1));
    if jobs == 1 {
        return (0..n).map(f).collect();
    }
    let mut out: Vec<Option<T>> = (0..n).map(|_| None).collect();
    std::thread::scope(|s| {
        let f = &f;
        let handles: Vec<_> = (0..jobs)
            .map(|j| s.spawn(move || (j..n).step_by(jobs).map(|i| (i, f(i))).collect::<Vec<_>>()))
            .collect();
        for h in handles {
            for (i, v) in h.join().expect("worker panicked") {
                out[i] = Some(v);
            }
        }
    });
    out.into_iter().map(|v| v.expect("filled")).collect()
}

pub const WALSH_TRUNCATION: usize = 16;
const WALSH_SAMPLES: usize = 100;

/// Outcome of dominating one random incoherent credence under Walsh's measure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WalshSample {
    pub index: usize,
    pub max_score: f64,
    pub strongly_dominated: bool,
    pub min_margin: Option<f64>,
}

/// Random incoherent credences on tail sets truncated at `k` propositions,
/// each paired with its projection under Walsh's measure.
pub fn walsh_samples(k: usize, samples: usize, seed: u64, jobs: usize) -> Result<Vec<WalshSample>> {
    let space = OpinionSpace::tail_sets().with_truncation(k)?;
    let m = InaccuracyMeasure::walsh();
    let policy = SeriesPolicy::default();
    let results = par_map(samples, jobs, |index| -> Result<WalshSample> {
        let mut rng = rng_for(seed, index as u64);
        let c = loop {
            let v: Vec<f64> = (0..k).map(|_| rng.gen::<f64>()).collect();
            // tail credences are coherent exactly when nonincreasing
            if v.windows(2).any(|w| w[1] > w[0]) {
                break Credence::from_f64s(v)?;
            }
        };
        let (atoms, _) = space.build_quotient(k)?;
        let mut max_score = 0.0f64;
        for a in &atoms {
            let s = score_world(&c, &m, a.representative.as_ref().expect("natural world"), &space, &policy)?;
            max_score = max_score.max(s.value().map_or(f64::INFINITY, |v| v.to_f64()));
        }
        let r = find_dominator(&c, &m, &space, &DominanceOptions::default())?;
        Ok(WalshSample {
            index,
            max_score,
            strongly_dominated: r.case == DominatorCase::Projection && r.verdict.relation == Relation::StronglyDominates,
            min_margin: r.verdict.min_margin,
        })
    });
    results.into_iter().collect()
}

fn walsh(opts: &ReproduceOptions) -> Result<ExampleReport> {
    let mut out = Vec::new();
    let m = InaccuracyMeasure::walsh();

    // (0.9, 0.9) on two cells, padded with zeros, is incoherent on a partition
    let space = OpinionSpace::countable_partition().with_truncation(opts.truncation)?;
    let mut v = vec![0.0; opts.truncation];
    v[0] = 0.9;
    v[1] = 0.9;
    let c = Credence::from_f64s(v)?;
    let r = find_dominator(&c, &m, &space, &DominanceOptions::default())?;
    out.push(Assertion::new(
        "padded_pair_dominated",
        r.verdict.relation == Relation::StronglyDominates,
        format!("{:?}, min margin {:?}", r.verdict.relation, r.verdict.min_margin),
    ));

    let n = opts.samples.unwrap_or(WALSH_SAMPLES);
    let samples = walsh_samples(WALSH_TRUNCATION, n, opts.seed, opts.jobs)?;
    let worst = samples.iter().map(|s| s.max_score).fold(0.0, f64::max);
    out.push(Assertion::new("scores_at_most_one", worst <= 1.0, format!("largest score {worst}")));
    let dominated = samples.iter().filter(|s| s.strongly_dominated).count();
    out.push(Assertion::new(
        "projections_strongly_dominate",
        dominated == n,
        format!("{dominated}/{n} at truncation {WALSH_TRUNCATION}"),
    ));
    Ok(ExampleReport::new(ExampleId::Walsh.name(), opts.seed, opts.truncation, out))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PartitionBound {
    /// `sup a · max_y 𝔡(1, y)`.
    #[serde(rename = "C")]
    pub c: f64,
    /// `sup a · φ'(1)`.
    #[serde(rename = "D")]
    pub d: f64,
    pub bound: f64,
}

/// Constants bounding every coherent credence's score on a partition,
/// including at the point lying in no cell.
pub fn partition_bound(m: &InaccuracyMeasure) -> Result<PartitionBound> {
    let g = &m.generator;
    if !g.is_normalized() {
        return invalid_arg(format!("{} is not normalized (φ(0) = φ'(0) = 0 required)", g.name()));
    }
    if !g.has_finite_derivatives() {
        return Err(CredalError::UnsupportedMeasure(format!("{} has an infinite endpoint derivative", g.name())));
    }
    let a = m.weights.sup_bound();
    // 𝔡(1, y) decreases in y, so its maximum sits at y = 0
    let c = a * g.divergence(1.0, 0.0).to_f64();
    let d = a * g.dphi(1.0);
    Ok(PartitionBound { c, d, bound: c + d })
}

/// Scores of `c` at every cell of a `k`-cell partition and, last, at the
/// point lying in no cell.
pub fn partition_scores(c: &[f64], g: &crate::inaccuracy::ConvexGenerator, a: &[f64]) -> Vec<f64> {
    let zero: Vec<f64> = c.iter().map(|&x| g.divergence(0.0, x).to_f64()).collect();
    let outside: f64 = a.iter().zip(&zero).map(|(w, z)| w * z).sum();
    let mut out: Vec<f64> =
        (0..c.len()).map(|j| outside - a[j] * zero[j] + a[j] * g.divergence(1.0, c[j]).to_f64()).collect();
    out.push(outside);
    out
}

fn partition_scores_exact(c: &[Rational], m: &InaccuracyMeasure, a: &[Rational]) -> Option<Vec<Rational>> {
    let g = &m.generator;
    let zero = c.iter().map(|x| g.divergence_exact(&Rational::zero(), x)).collect::<Option<Vec<_>>>()?;
    let outside: Rational = a.iter().zip(&zero).map(|(w, z)| w * z).sum();
    let mut out = Vec::with_capacity(c.len() + 1);
    for j in 0..c.len() {
        out.push(&outside - &a[j] * &zero[j] + &a[j] * g.divergence_exact(&Rational::one(), &c[j])?);
    }
    out.push(outside);
    Some(out)
}

/// A random coherent credence on `k` cells: a Dirichlet(1) draw over the cells
/// and the remainder.
pub fn random_partition_credence(k: usize, rng: &mut impl Rng) -> Vec<f64> {
    let e: Vec<f64> = (0..=k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = e.iter().sum();
    // round down so the float sum never exceeds one
    e[..k].iter().map(|x| ((x / total) * (1.0 - 1e-12)).max(0.0)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionSample {
    pub index: usize,
    pub evaluations: usize,
    /// Candidates that looked like weak dominators in floating point.
    pub float_hits: usize,
    /// Weak dominators confirmed exactly.
    pub dominators: usize,
    /// `max_d min_w (𝓘(c,w) - 𝓘(d,w))` over all candidates.
    pub best_margin: f64,
    pub max_score: f64,
    pub outside_score: f64,
}

/// Adversarial search for weak dominators of random coherent credences on a
/// `k`-cell partition.
pub fn partition_search(
    m: &InaccuracyMeasure,
    k: usize,
    samples: usize,
    budget: usize,
    seed: u64,
    jobs: usize,
) -> Result<Vec<PartitionSample>> {
    let a = m.weights.take(k)?;
    let aq = m.weights.take_exact(k)?;
    let space = OpinionSpace::countable_partition().with_truncation(k)?;
    let g = &m.generator;
    let results = par_map(samples, jobs, |index| -> Result<PartitionSample> {
        let mut rng = rng_for(seed, index as u64);
        let c = random_partition_credence(k, &mut rng);
        let sc = partition_scores(&c, g, &a);
        let cq: Vec<Rational> = c.iter().map(|x| rational_from_f64(*x).expect("finite")).collect();
        let sc_exact = partition_scores_exact(&cq, m, &aq);
        let mut sample = PartitionSample {
            index,
            evaluations: 0,
            float_hits: 0,
            dominators: 0,
            best_margin: f64::NEG_INFINITY,
            max_score: sc.iter().copied().fold(0.0, f64::max),
            outside_score: *sc.last().expect("outside atom"),
        };
        let test = |d: Vec<f64>, sample: &mut PartitionSample| {
            sample.evaluations += 1;
            let sd = partition_scores(&d, g, &a);
            let margin = sc.iter().zip(&sd).map(|(x, y)| x - y).fold(f64::INFINITY, f64::min);
            sample.best_margin = sample.best_margin.max(margin);
            let weak = sc.iter().zip(&sd).all(|(x, y)| y <= x) && sc.iter().zip(&sd).any(|(x, y)| y < x);
            if weak {
                sample.float_hits += 1;
                let dq: Vec<Rational> = d.iter().map(|x| rational_from_f64(*x).expect("finite")).collect();
                let confirmed = match (&sc_exact, partition_scores_exact(&dq, m, &aq)) {
                    (Some(x), Some(y)) => x.iter().zip(&y).all(|(p, q)| q <= p) && x.iter().zip(&y).any(|(p, q)| q < p),
                    _ => true,
                };
                if confirmed {
                    sample.dominators += 1;
                }
            }
        };
        let opts = DominanceOptions { max_iter: 2_000, ..Default::default() };
        while sample.evaluations < budget {
            let kind = sample.evaluations % 5;
            let d: Vec<f64> = match kind {
                0 => {
                    let sigma = [1e-1, 1e-2, 1e-3, 1e-4][rng.gen_range(0..4)];
                    c.iter().map(|x| (x + sigma * (rng.gen::<f64>() - 0.5)).clamp(0.0, 1.0)).collect()
                }
                1 => {
                    // move towards a random world (the last index is the outside point)
                    let j = rng.gen_range(0..=k);
                    let t = rng.gen::<f64>() * 0.2;
                    c.iter().enumerate().map(|(i, x)| (1.0 - t) * x + if i == j { t } else { 0.0 }).collect()
                }
                2 => {
                    let mut d = c.clone();
                    let i = rng.gen_range(0..k);
                    d[i] = (d[i] + (rng.gen::<f64>() - 0.5) * 1e-2).clamp(0.0, 1.0);
                    d
                }
                3 => (0..k).map(|_| rng.gen::<f64>() / k as f64).collect(),
                _ if sample.evaluations % 100 == 4 => {
                    // the projection of a perturbed copy is a coherent candidate
                    let p: Vec<f64> = c.iter().map(|x| (x + 0.05 * (rng.gen::<f64>() - 0.5)).clamp(0.0, 1.0)).collect();
                    let pr = project_coherent(&Credence::from_f64s(p)?, m, &space, &opts)?;
                    pr.pi.values(k)
                }
                _ => random_partition_credence(k, &mut rng),
            };
            test(d, &mut sample);
        }
        Ok(sample)
    });
    results.into_iter().collect()
}

const PARTITION_SAMPLES: usize = 200;

fn partition_experiment(opts: &ReproduceOptions) -> Result<ExampleReport> {
    let m = InaccuracyMeasure::brier();
    let b = partition_bound(&m)?;
    let n = opts.samples.unwrap_or(PARTITION_SAMPLES);
    let samples = partition_search(&m, opts.truncation, n, opts.budget, opts.seed, opts.jobs)?;
    let dominators: usize = samples.iter().map(|s| s.dominators).sum();
    let hits: usize = samples.iter().map(|s| s.float_hits).sum();
    let evals: usize = samples.iter().map(|s| s.evaluations).sum();
    let best = samples.iter().map(|s| s.best_margin).fold(f64::NEG_INFINITY, f64::max);
    let worst_score = samples.iter().map(|s| s.max_score).fold(0.0, f64::max);
    let worst_outside = samples.iter().map(|s| s.outside_score).fold(0.0, f64::max);
    let out = vec![
        Assertion::new(
            "no_weak_dominator",
            dominators == 0,
            format!("{n} credences, {evals} evaluations, {hits} float hits, best margin {best:e}"),
        ),
        Assertion::new(
            "score_bound_all_atoms",
            worst_score <= b.bound,
            format!("largest score {worst_score} <= C + D = {} + {}", b.c, b.d),
        ),
        Assertion::new(
            "score_bound_outside_point",
            worst_outside <= b.bound,
            format!("largest score at the point in no cell {worst_outside}"),
        ),
    ];
    Ok(ExampleReport::new(ExampleId::PartitionBound.name(), opts.seed, opts.truncation, out))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StabilityProperty {
    WStable,
    SStable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StabilityStatus {
    ProvenTrue,
    ProvenFalseWitness,
    Unknown,
}

/// A coherent `c` dominated by `d` on the base space whose lift `c*` is
/// certified undominated on the compactification.
#[derive(Clone, Debug)]
pub struct StabilityWitness {
    pub c: Credence,
    pub d: Credence,
    /// `compare(c, d)` on the base space.
    pub base_relation: Relation,
    /// `compare(c*, d*)` on the compactified space.
    pub lifted_relation: Relation,
    /// Expected inaccuracy of `c*` under its countably additive extension.
    pub lifted_expected_inaccuracy: f64,
    pub argument: String,
}

#[derive(Clone, Debug)]
pub struct StabilityFact {
    pub family: String,
    pub property: StabilityProperty,
    pub status: StabilityStatus,
    pub source: Option<String>,
    pub witnesses: Vec<StabilityWitness>,
    pub candidates_searched: usize,
}

fn fact(space: &OpinionSpace, property: StabilityProperty, status: StabilityStatus, source: &str) -> StabilityFact {
    StabilityFact {
        family: space.kind().as_str().to_string(),
        property,
        status,
        source: Some(source.to_string()),
        witnesses: Vec::new(),
        candidates_searched: 0,
    }
}

/// Known stability facts, plus a falsification search for families without
/// one. A witness is only reported when every step is certified: `c` has an
/// infinite score at every natural world by a uniform term test, `d` differs
/// from the eventual truth value nowhere, and `c*` is countably coherent with
/// finite expected inaccuracy, hence undominated.
pub fn stability_report(space: &OpinionSpace, m: &InaccuracyMeasure, budget: usize, seed: u64) -> Result<Vec<StabilityFact>> {
    use StabilityProperty::*;
    use StabilityStatus::*;
    let family = match space.family() {
        None => {
            return Ok(vec![
                fact(space, WStable, ProvenTrue, "finite-space-compact"),
                fact(space, SStable, ProvenTrue, "finite-space-compact"),
            ])
        }
        Some(f) => f,
    };
    if space.star().is_some() || matches!(family, Family::CountablePartition { cells: Some(_) }) {
        return Ok(vec![
            fact(space, WStable, ProvenTrue, "compact-space"),
            fact(space, SStable, ProvenTrue, "compact-space"),
        ]);
    }
    if matches!(family, Family::CountablePartition { cells: None }) {
        return Ok(vec![fact(space, WStable, ProvenTrue, "partition-w-stability")]);
    }
    m.require_countable()?;
    let eventual = matches!(family, Family::InitialSegments);
    let comp = space.compactify()?;
    let mut rng = rng_for(seed, 0);
    let mut witnesses = Vec::new();
    let mut searched = 0;
    for idx in 0..budget {
        searched += 1;
        let c = stability_candidate(idx, &mut rng)?;
        if let Some(w) = certify_witness(&c, eventual, space, &comp.space, m)? {
            witnesses.push(w);
            break;
        }
    }
    let strong = witnesses.iter().any(|w| w.base_relation == Relation::StronglyDominates);
    let mk = |property, found: bool| StabilityFact {
        family: space.kind().as_str().to_string(),
        property,
        status: if found { ProvenFalseWitness } else { Unknown },
        source: if found { Some("finite-expected-inaccuracy-lift".into()) } else { None },
        witnesses: if found { witnesses.clone() } else { Vec::new() },
        candidates_searched: searched,
    };
    Ok(vec![mk(WStable, !witnesses.is_empty()), mk(SStable, strong)])
}

/// Candidate coherent credences: a grid of constants first, then random rules.
fn stability_candidate(idx: usize, rng: &mut ChaCha8Rng) -> Result<Credence> {
    const GRID: usize = 8;
    let rule = if idx <= GRID {
        CredenceRule::Const { value: idx as f64 / GRID as f64 }
    } else {
        match rng.gen_range(0..4) {
            0 => CredenceRule::Const { value: rng.gen() },
            1 => CredenceRule::Geometric { scale: rng.gen(), ratio: rng.gen() },
            2 => CredenceRule::InvSqrt { scale: rng.gen() },
            _ => CredenceRule::Zero,
        }
    };
    Credence::rule(rule)
}

fn certify_witness(
    c: &Credence,
    eventual: bool,
    space: &OpinionSpace,
    compact: &OpinionSpace,
    m: &InaccuracyMeasure,
) -> Result<Option<StabilityWitness>> {
    let copts = CoherenceOptions::default();
    if !check_coherence(c, space, &copts)?.is_coherent() {
        return Ok(None);
    }
    // every tail term is at least inf(a) · 𝔡(b, lim c) > 0 at every natural world
    let Some(limit) = c.limit() else { return Ok(None) };
    let Some(a_min) = m.weights.lower_bound() else { return Ok(None) };
    let b = if eventual { 1.0 } else { 0.0 };
    if !(a_min * m.generator.divergence(b, limit).to_f64() > 0.0) {
        return Ok(None);
    }
    // d equals the eventual truth value everywhere, so each of its scores is a finite sum
    let d = Credence::rule(if eventual { CredenceRule::Const { value: 1.0 } } else { CredenceRule::Zero })?;

    let lifted = check_countable_coherence(c, compact, &copts)?;
    if lifted.status != CoherenceStatus::CountablyCoherent {
        return Ok(None);
    }
    let Some(rep) = lifted.witness else { return Ok(None) };
    let policy = SeriesPolicy::default();
    let e = expected_inaccuracy(c, m, &rep, compact, &policy)?;
    let SeriesStatus::ConvergedTo(value) = e.status else { return Ok(None) };

    let opts = DominanceOptions::default();
    let base_relation = compare(c, &d, m, space, &opts)?.relation;
    let lifted_relation = compare(c, &d, m, compact, &opts)?.relation;
    Ok(Some(StabilityWitness {
        c: c.clone(),
        d,
        base_relation,
        lifted_relation,
        lifted_expected_inaccuracy: value,
        argument: "c has infinite score at every natural world while d has finite score everywhere, so d strongly \
                   dominates c; c* is countably coherent with finite expected inaccuracy, so nothing weakly \
                   dominates c*"
            .into(),
    }))
}

#[cfg(test)]
mod tests;
