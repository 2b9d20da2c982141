//! Accuracy dominance: per-atom comparison of credences and construction of
//! coherent dominators by Bregman projection onto the hull of valuations.
//!
//! The projection is solved over λ (the atom simplex), so every iterate is
//! coherent by construction. Quadratic generators use Wolfe's min-norm-point
//! method, which is exact in rational mode; other generators use pairwise
//! Frank-Wolfe, after which λ is rationalised so that strictness can still be
//! checked exactly.

mod projection;

use serde::Serialize;

use crate::coherence::{check_coherence, finite_values, AtomWeight, CoherenceOptions, LambdaRepresentation};
use crate::credence::{Credence, CredenceRule};
use crate::error::{CredalError, Result};
use crate::inaccuracy::{score_countable, weights_for, ExtReal, GeneratorKind, InaccuracyMeasure, SeriesPolicy, SeriesStatus};
use crate::opinion_space::{Family, OpinionSpace, ValuationMatrix, World, WorldAtom};
use crate::scalar::{rational_from_f64, NumericMode, Rational, Scalar, Value};

use projection::{pairwise_frank_wolfe, wolfe, Separable, Solved};

pub const DEFAULT_PROJECTION_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DominanceOptions {
    pub mode: NumericMode,
    /// Frank-Wolfe gap at which the projection stops.
    pub tol: f64,
    pub max_iter: usize,
    pub series: SeriesPolicy,
    pub eps_coh: f64,
}

impl Default for DominanceOptions {
    fn default() -> Self {
        DominanceOptions {
            mode: NumericMode::Float,
            tol: DEFAULT_PROJECTION_TOL,
            max_iter: DEFAULT_MAX_ITER,
            series: SeriesPolicy::default(),
            eps_coh: crate::coherence::DEFAULT_EPS_COH,
        }
    }
}

impl DominanceOptions {
    pub fn rational() -> Self {
        DominanceOptions { mode: NumericMode::Rational, ..Default::default() }
    }

    fn coherence(&self) -> CoherenceOptions {
        CoherenceOptions { mode: self.mode, eps_coh: self.eps_coh, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    StronglyDominates,
    WeaklyDominates,
    NoDominance,
    IncomparableUnresolved,
}

/// An inaccuracy value as used in comparisons.
#[derive(Clone, Debug, PartialEq)]
pub enum Score {
    Finite(Value),
    Infinite,
    Unresolved { partial: f64, k: usize },
}

impl Score {
    pub fn to_f64(&self) -> f64 {
        match self {
            Score::Finite(v) => v.to_f64(),
            Score::Infinite => f64::INFINITY,
            Score::Unresolved { partial, .. } => *partial,
        }
    }

    fn from_ext(x: ExtReal) -> Self {
        match x {
            ExtReal::Finite(v) => Score::Finite(Value::Float(v)),
            ExtReal::PosInf => Score::Infinite,
        }
    }
}

/// How the candidate's score at an atom compares with the original's.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomOrder {
    Less,
    Equal,
    Greater,
    Unresolved,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AtomComparison {
    pub atom: usize,
    pub representative: Option<World>,
    pub score_c: Score,
    pub score_d: Score,
    pub order: AtomOrder,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DominanceVerdict {
    /// Relation of `d` to `c`.
    pub relation: Relation,
    pub per_atom: Vec<AtomComparison>,
    /// `min_w 𝓘(c,w) - 𝓘(d,w)` over atoms where both are finite.
    pub min_margin: Option<f64>,
    /// Set when only the atoms of a truncated quotient were compared.
    pub truncation: Option<usize>,
}

fn order_of(c: &Score, d: &Score) -> AtomOrder {
    use std::cmp::Ordering::*;
    match (c, d) {
        (Score::Unresolved { .. }, _) | (_, Score::Unresolved { .. }) => AtomOrder::Unresolved,
        (Score::Infinite, Score::Infinite) => AtomOrder::Equal,
        (Score::Infinite, Score::Finite(_)) => AtomOrder::Less,
        (Score::Finite(_), Score::Infinite) => AtomOrder::Greater,
        (Score::Finite(x), Score::Finite(y)) => {
            let ord = match (x, y) {
                (Value::Exact(a), Value::Exact(b)) => b.cmp(a),
                _ => y.to_f64().partial_cmp(&x.to_f64()).unwrap_or(Equal),
            };
            match ord {
                Less => AtomOrder::Less,
                Equal => AtomOrder::Equal,
                Greater => AtomOrder::Greater,
            }
        }
    }
}

fn verdict_from(per_atom: Vec<AtomComparison>, truncation: Option<usize>) -> DominanceVerdict {
    let orders: Vec<AtomOrder> = per_atom.iter().map(|a| a.order).collect();
    let relation = if orders.contains(&AtomOrder::Unresolved) {
        Relation::IncomparableUnresolved
    } else if orders.iter().all(|o| *o == AtomOrder::Less) {
        Relation::StronglyDominates
    } else if orders.iter().all(|o| *o != AtomOrder::Greater) && orders.contains(&AtomOrder::Less) {
        Relation::WeaklyDominates
    } else {
        Relation::NoDominance
    };
    let min_margin = per_atom
        .iter()
        .filter_map(|a| match (&a.score_c, &a.score_d) {
            (Score::Finite(x), Score::Finite(y)) => Some(x.to_f64() - y.to_f64()),
            _ => None,
        })
        .reduce(f64::min);
    DominanceVerdict { relation, per_atom, min_margin, truncation }
}

/// The finite problem behind a space: its quotient (truncated for countable
/// families) and matched weights.
pub(crate) struct Context {
    pub atoms: Vec<WorldAtom>,
    pub matrix: ValuationMatrix,
    pub n: usize,
    pub truncated: Option<usize>,
    pub weights: Vec<f64>,
    pub weights_exact: Vec<Rational>,
}

impl Context {
    pub(crate) fn new(space: &OpinionSpace, m: &InaccuracyMeasure) -> Result<Self> {
        let (k, truncated) = match (space.is_symbolic(), space.prop_count()) {
            (false, _) => (1, None),
            (true, Some(n)) => (n, None),
            (true, None) => (space.truncation_default(), Some(space.truncation_default())),
        };
        let (atoms, matrix) = space.build_quotient(k)?;
        let n = matrix.n_props();
        let weights = weights_for(m, space, n)?;
        let weights_exact = m.weights.take_exact(n)?;
        Ok(Context { atoms, matrix, n, truncated, weights, weights_exact })
    }

    pub(crate) fn values(&self, c: &Credence) -> Result<Vec<f64>> {
        if self.truncated.is_some() {
            Ok(c.values(self.n))
        } else {
            finite_values(c, self.n)
        }
    }

    /// Exact values; floats from rules are read as the binary rationals they are.
    pub(crate) fn exact_values(&self, c: &Credence) -> Result<Vec<Rational>> {
        let approx = self.values(c)?;
        Ok(match c.exact_values(self.n) {
            Some(v) => v,
            None => approx.iter().map(|x| rational_from_f64(*x).expect("finite")).collect(),
        })
    }

    fn rows_f64(&self) -> Vec<Vec<f64>> {
        self.matrix.rows().iter().map(|r| r.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()).collect()
    }

    fn rows_exact(&self) -> Vec<Vec<Rational>> {
        self.matrix
            .rows()
            .iter()
            .map(|r| r.iter().map(|&b| if b { Rational::one() } else { Rational::zero() }).collect())
            .collect()
    }

    /// Per-atom scores, exact when the mode and generator allow it.
    pub(crate) fn scores(&self, c: &Credence, m: &InaccuracyMeasure, mode: NumericMode) -> Result<Vec<Score>> {
        if mode == NumericMode::Rational && m.generator.is_exact() {
            let cq = self.exact_values(c)?;
            return Ok(self
                .matrix
                .rows()
                .iter()
                .map(|row| {
                    Score::Finite(Value::Exact(
                        m.score_signature_exact(&cq, &self.weights_exact, row).expect("exact generator"),
                    ))
                })
                .collect());
        }
        let cf = self.values(c)?;
        Ok(self.matrix.rows().iter().map(|row| Score::from_ext(m.score_signature(&cf, &self.weights, row))).collect())
    }
}

/// Compares `d` against `c` atom by atom. Countable families are compared at
/// the atoms of the default truncation using series verdicts.
pub fn compare(
    c: &Credence,
    d: &Credence,
    m: &InaccuracyMeasure,
    space: &OpinionSpace,
    opts: &DominanceOptions,
) -> Result<DominanceVerdict> {
    if space.is_symbolic() && space.prop_count().is_none() {
        let k = space.truncation_default();
        let atoms = sampled_atoms(space, k)?;
        let mut per_atom = Vec::with_capacity(atoms.len());
        for a in &atoms {
            let sc = series_score(c, m, a, space, &opts.series)?;
            let sd = series_score(d, m, a, space, &opts.series)?;
            let order = order_of(&sc, &sd);
            per_atom.push(AtomComparison { atom: a.id, representative: a.representative.clone(), score_c: sc, score_d: sd, order });
        }
        return Ok(verdict_from(per_atom, Some(k)));
    }
    let ctx = Context::new(space, m)?;
    compare_in(&ctx, c, d, m, opts.mode)
}

/// Quotient atoms at truncation `k`, plus the star point when the truncation
/// merges it with a natural world.
pub fn sampled_atoms(space: &OpinionSpace, k: usize) -> Result<Vec<WorldAtom>> {
    let (mut atoms, _) = space.build_quotient(k)?;
    if let Some(star) = space.star() {
        if !atoms.iter().any(|a| matches!(a.representative, Some(World::Star(_)))) {
            let star = World::Star(star.to_string());
            let signature = (1..=space.truncated_prop_count(k)).map(|i| space.contains(i, &star)).collect();
            atoms.push(WorldAtom { id: atoms.len(), signature, representative: Some(star) });
        }
    }
    Ok(atoms)
}

fn series_score(c: &Credence, m: &InaccuracyMeasure, a: &WorldAtom, space: &OpinionSpace, p: &SeriesPolicy) -> Result<Score> {
    let v = score_countable(c, m, a, space, p)?;
    Ok(match v.status {
        SeriesStatus::ConvergedTo(x) => Score::Finite(Value::Float(x)),
        SeriesStatus::DivergesToInfinity => Score::Infinite,
        SeriesStatus::PartialSum { value, k, .. } => Score::Unresolved { partial: value, k },
    })
}

fn compare_in(ctx: &Context, c: &Credence, d: &Credence, m: &InaccuracyMeasure, mode: NumericMode) -> Result<DominanceVerdict> {
    let sc = ctx.scores(c, m, mode)?;
    let sd = ctx.scores(d, m, mode)?;
    let per_atom = ctx
        .atoms
        .iter()
        .zip(sc.into_iter().zip(sd))
        .map(|(a, (x, y))| {
            let order = order_of(&x, &y);
            AtomComparison { atom: a.id, representative: a.representative.clone(), score_c: x, score_d: y, order }
        })
        .collect();
    Ok(verdict_from(per_atom, ctx.truncated))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PythagoreanAtom {
    pub atom: usize,
    /// `𝔇(v_w, c)`.
    pub lhs: f64,
    /// `gap + 𝔇(v_w, π_c)`.
    pub rhs: f64,
    #[serde(skip)]
    pub slack: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PythagoreanRecord {
    pub per_atom: Vec<PythagoreanAtom>,
    pub worst_slack: f64,
    pub exact: bool,
    pub holds: bool,
    /// The reported gap equals `𝔇(π_c, c)`.
    pub gap_consistent: bool,
    /// The gap is no larger than the distance to any valuation.
    pub gap_below_vertices: bool,
}

#[derive(Clone, Debug)]
pub struct ProjectionResult {
    pub pi: Credence,
    pub lambda: LambdaRepresentation,
    /// `𝔇(π_c, c)`, the distance from `c` to the coherent set.
    pub gap: Value,
    pub converged: bool,
    pub iterations: usize,
    pub final_decrease: f64,
    pub fw_gap: f64,
    pub method: &'static str,
    pub truncation: Option<usize>,
    pub pythagorean: PythagoreanRecord,
}

fn require_projectable(m: &InaccuracyMeasure) -> Result<()> {
    if m.generator.has_finite_derivatives() {
        Ok(())
    } else {
        Err(CredalError::UnsupportedMeasure(format!(
            "projection needs finite endpoint derivatives; {} has none",
            m.generator.name()
        )))
    }
}

/// The Bregman projection of `c` onto the coherent credences.
pub fn project_coherent(
    c: &Credence,
    m: &InaccuracyMeasure,
    space: &OpinionSpace,
    opts: &DominanceOptions,
) -> Result<ProjectionResult> {
    require_projectable(m)?;
    let ctx = Context::new(space, m)?;
    project_in(&ctx, c, m, opts)
}

fn project_in(ctx: &Context, c: &Credence, m: &InaccuracyMeasure, opts: &DominanceOptions) -> Result<ProjectionResult> {
    let cf = ctx.values(c)?;
    let scores: Vec<ExtReal> = ctx.matrix.rows().iter().map(|r| m.score_signature(&cf, &ctx.weights, r)).collect();
    if scores.iter().all(|s| !s.is_finite()) {
        return Err(CredalError::AllAtomsInfinite);
    }
    let exact = opts.mode == NumericMode::Rational && m.generator.is_exact();
    let quadratic = matches!(m.generator.kind(), GeneratorKind::Quadratic);

    let (lambda_q, lambda_f, solved_meta, method): (Option<Vec<Rational>>, Vec<f64>, Solved<()>, &'static str) =
        if quadratic && exact {
            let cq = ctx.exact_values(c)?;
            let pts: Vec<Vec<Rational>> =
                ctx.rows_exact().into_iter().map(|r| r.iter().zip(&cq).map(|(v, x)| v - x).collect()).collect();
            let s = wolfe(&pts, &ctx.weights_exact, opts.max_iter);
            let lf = s.lambda.iter().map(Scalar::to_f64).collect();
            (Some(s.lambda.clone()), lf, strip(&s), "wolfe")
        } else if quadratic {
            let pts: Vec<Vec<f64>> =
                ctx.rows_f64().into_iter().map(|r| r.iter().zip(&cf).map(|(v, x)| v - x).collect()).collect();
            let s = wolfe(&pts, &ctx.weights, opts.max_iter);
            (None, s.lambda.clone(), strip(&s), "wolfe")
        } else {
            let rows = ctx.rows_f64();
            let g = &m.generator;
            let dphi = |x: f64| g.dphi(x);
            let objective = |s: &[f64]| -> f64 {
                s.iter().zip(&cf).zip(&ctx.weights).map(|((x, y), a)| a * g.divergence(*x, *y).to_f64()).sum()
            };
            let start = (0..scores.len())
                .min_by(|&i, &j| scores[i].partial_cmp(&scores[j]).unwrap_or(std::cmp::Ordering::Equal))
                .expect("nonempty");
            let problem = Separable { rows: &rows, a: &ctx.weights, c: &cf, dphi: &dphi, objective: &objective };
            let s = pairwise_frank_wolfe(&problem, start, opts.tol, opts.max_iter);
            let lq = exact.then(|| rationalize(&s.lambda));
            (lq, s.lambda.clone(), strip(&s), "pairwise_frank_wolfe")
        };

    let (pi, gap, weights) = match &lambda_q {
        Some(lq) => {
            let cq = ctx.exact_values(c)?;
            let mut pq = vec![Rational::zero(); ctx.n];
            for (w, l) in lq.iter().enumerate() {
                if *l != Rational::zero() {
                    for (i, p) in pq.iter_mut().enumerate() {
                        if ctx.matrix.entry(w, i) {
                            *p += l;
                        }
                    }
                }
            }
            let gap = m.score_signature_exact_pair(&pq, &cq, &ctx.weights_exact).expect("exact generator");
            let weights = atom_weights(ctx, lq.iter().map(|l| (l.clone() != Rational::zero()).then(|| Value::Exact(l.clone()))));
            (Credence::from_rationals(pq)?, Value::Exact(gap), weights)
        }
        None => {
            let total: f64 = lambda_f.iter().map(|l| l.max(0.0)).sum();
            let lf: Vec<f64> = lambda_f.iter().map(|l| l.max(0.0) / total).collect();
            let mut pf = vec![0.0; ctx.n];
            for (w, l) in lf.iter().enumerate() {
                for (i, p) in pf.iter_mut().enumerate() {
                    if ctx.matrix.entry(w, i) {
                        *p += l;
                    }
                }
            }
            let pf: Vec<f64> = pf.into_iter().map(|x| x.clamp(0.0, 1.0)).collect();
            let gap: f64 = (0..ctx.n).map(|i| ctx.weights[i] * m.generator.divergence(pf[i], cf[i]).to_f64()).sum();
            let weights = atom_weights(ctx, lf.iter().map(|l| (*l > 0.0).then_some(Value::Float(*l))));
            (Credence::from_f64s(pf)?, Value::Float(gap), weights)
        }
    };
    let zero = if lambda_q.is_some() { Value::Exact(Rational::zero()) } else { Value::Float(0.0) };
    let lambda = LambdaRepresentation { weights, tail_mass: zero.clone(), residual: zero };
    let mut result = ProjectionResult {
        pi,
        lambda,
        gap,
        converged: solved_meta.converged,
        iterations: solved_meta.iterations,
        final_decrease: solved_meta.final_decrease,
        fw_gap: solved_meta.fw_gap,
        method,
        truncation: ctx.truncated,
        pythagorean: PythagoreanRecord {
            per_atom: Vec::new(),
            worst_slack: 0.0,
            exact: false,
            holds: false,
            gap_consistent: false,
            gap_below_vertices: false,
        },
    };
    result.pythagorean = pythagorean_in(ctx, c, &result, m, PYTHAGOREAN_TOL)?;
    Ok(result)
}

pub const PYTHAGOREAN_TOL: f64 = 1e-6;

fn strip<T>(s: &Solved<T>) -> Solved<()> {
    Solved { lambda: Vec::new(), iterations: s.iterations, converged: s.converged, final_decrease: s.final_decrease, fw_gap: s.fw_gap }
}

fn atom_weights(ctx: &Context, lam: impl Iterator<Item = Option<Value>>) -> Vec<AtomWeight> {
    lam.enumerate()
        .filter_map(|(w, l)| {
            l.map(|weight| AtomWeight { atom: ctx.atoms[w].id, representative: ctx.atoms[w].representative.clone(), weight })
        })
        .collect()
}

/// Exact simplex point nearest in spirit to a float one: clip, then renormalise.
fn rationalize(lambda: &[f64]) -> Vec<Rational> {
    let clipped: Vec<Rational> = lambda.iter().map(|l| rational_from_f64(l.max(0.0)).expect("finite")).collect();
    let total: Rational = clipped.iter().sum();
    clipped.into_iter().map(|l| l / &total).collect()
}

impl InaccuracyMeasure {
    /// `Σ a_i 𝔡(x_i, y_i)` for two credence vectors.
    pub fn divergence_exact_pair(&self, x: &[Rational], y: &[Rational], a: &[Rational]) -> Option<Rational> {
        let mut t = Rational::zero();
        for i in 0..x.len() {
            t += &a[i] * self.generator.divergence_exact(&x[i], &y[i])?;
        }
        Some(t)
    }

    fn score_signature_exact_pair(&self, x: &[Rational], y: &[Rational], a: &[Rational]) -> Option<Rational> {
        self.divergence_exact_pair(x, y, a)
    }
}

/// Checks `𝔇(v_w, c) >= gap + 𝔇(v_w, π_c) - tol` at every atom.
pub fn verify_pythagorean(
    c: &Credence,
    pr: &ProjectionResult,
    m: &InaccuracyMeasure,
    space: &OpinionSpace,
    tol: f64,
) -> Result<PythagoreanRecord> {
    let ctx = Context::new(space, m)?;
    pythagorean_in(&ctx, c, pr, m, tol)
}

fn pythagorean_in(ctx: &Context, c: &Credence, pr: &ProjectionResult, m: &InaccuracyMeasure, tol: f64) -> Result<PythagoreanRecord> {
    let exact = matches!(pr.gap, Value::Exact(_)) && m.generator.is_exact();
    let mut per_atom = Vec::with_capacity(ctx.atoms.len());
    let mut worst = f64::INFINITY;
    let (gap_consistent, gap_below_vertices);
    if exact {
        let cq = ctx.exact_values(c)?;
        let pq = ctx.exact_values(&pr.pi)?;
        let gap = pr.gap.exact().expect("exact gap").clone();
        let mut min_vertex: Option<Rational> = None;
        for (a, row) in ctx.atoms.iter().zip(ctx.matrix.rows()) {
            let lhs = m.score_signature_exact(&cq, &ctx.weights_exact, row).expect("exact");
            let rhs = &gap + m.score_signature_exact(&pq, &ctx.weights_exact, row).expect("exact");
            let slack = &lhs - &rhs;
            worst = worst.min(slack.to_f64());
            per_atom.push(PythagoreanAtom { atom: a.id, lhs: lhs.to_f64(), rhs: rhs.to_f64(), slack: Value::Exact(slack) });
            if min_vertex.as_ref().is_none_or(|v| lhs < *v) {
                min_vertex = Some(lhs);
            }
        }
        gap_consistent = m.divergence_exact_pair(&pq, &cq, &ctx.weights_exact) == Some(gap.clone());
        gap_below_vertices = min_vertex.is_none_or(|v| gap <= v);
    } else {
        let cf = ctx.values(c)?;
        let pf = ctx.values(&pr.pi)?;
        let gap = pr.gap.to_f64();
        let mut min_vertex = f64::INFINITY;
        for (a, row) in ctx.atoms.iter().zip(ctx.matrix.rows()) {
            let lhs = m.score_signature(&cf, &ctx.weights, row).to_f64();
            let rhs = gap + m.score_signature(&pf, &ctx.weights, row).to_f64();
            let slack = if lhs.is_infinite() { f64::INFINITY } else { lhs - rhs };
            worst = worst.min(slack);
            per_atom.push(PythagoreanAtom { atom: a.id, lhs, rhs, slack: Value::Float(slack) });
            min_vertex = min_vertex.min(lhs);
        }
        let direct: f64 = (0..ctx.n).map(|i| ctx.weights[i] * m.generator.divergence(pf[i], cf[i]).to_f64()).sum();
        gap_consistent = (direct - gap).abs() <= tol;
        gap_below_vertices = gap <= min_vertex + tol;
    }
    Ok(PythagoreanRecord { per_atom, worst_slack: worst, exact, holds: worst >= -tol, gap_consistent, gap_below_vertices })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DominatorCase {
    /// The input is coherent; it is returned unchanged.
    AlreadyCoherent,
    /// Every checked atom has infinite inaccuracy; an omniscient credence wins.
    Omniscient,
    Projection,
}

#[derive(Clone, Debug)]
pub struct DominatorReport {
    pub dominator: Credence,
    pub verdict: DominanceVerdict,
    pub case: DominatorCase,
    pub projection: Option<ProjectionResult>,
}

/// The omniscient credence of world 0 in a countable family.
fn omniscient_at_zero(family: Family) -> Credence {
    match family {
        Family::TailSets => Credence::Rule(CredenceRule::Zero),
        Family::InitialSegments => Credence::Rule(CredenceRule::Const { value: 1.0 }),
        Family::CountablePartition { .. } => Credence::from_f64s(vec![1.0]).expect("valid"),
    }
}

/// A coherent credence that dominates `c`, following the two cases: infinite
/// inaccuracy at every checked atom (an omniscient credence), or projection.
pub fn find_dominator(
    c: &Credence,
    m: &InaccuracyMeasure,
    space: &OpinionSpace,
    opts: &DominanceOptions,
) -> Result<DominatorReport> {
    if space.is_symbolic() && space.prop_count().is_none() {
        let family = space.family().expect("symbolic");
        let k = space.truncation_default();
        let atoms = sampled_atoms(space, k)?;
        let mut all_infinite = true;
        for a in &atoms {
            if !score_countable(c, m, a, space, &opts.series)?.is_infinite() {
                all_infinite = false;
                break;
            }
        }
        if all_infinite {
            let omni = omniscient_at_zero(family);
            let verdict = compare(c, &omni, m, space, opts)?;
            return Ok(DominatorReport { dominator: omni, verdict, case: DominatorCase::Omniscient, projection: None });
        }
        let coh = check_coherence(c, space, &opts.coherence())?;
        if coh.status == crate::coherence::CoherenceStatus::Undetermined {
            return Err(CredalError::Unresolved(coh.note.unwrap_or_else(|| "coherence undetermined".into())));
        }
        if coh.is_coherent() {
            let verdict = compare(c, c, m, space, opts)?;
            return Ok(DominatorReport { dominator: c.clone(), verdict, case: DominatorCase::AlreadyCoherent, projection: None });
        }
        return dominate_in(&Context::new(space, m)?, c, m, opts);
    }
    let ctx = Context::new(space, m)?;
    let coh = check_coherence(c, space, &opts.coherence())?;
    if coh.is_coherent() {
        let verdict = compare_in(&ctx, c, c, m, opts.mode)?;
        return Ok(DominatorReport { dominator: c.clone(), verdict, case: DominatorCase::AlreadyCoherent, projection: None });
    }
    dominate_in(&ctx, c, m, opts)
}

fn dominate_in(ctx: &Context, c: &Credence, m: &InaccuracyMeasure, opts: &DominanceOptions) -> Result<DominatorReport> {
    let cf = ctx.values(c)?;
    let all_infinite = ctx.matrix.rows().iter().all(|r| !m.score_signature(&cf, &ctx.weights, r).is_finite());
    if all_infinite {
        let omni = Credence::from_f64s(ctx.matrix.row(0).iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())?;
        let verdict = compare_in(ctx, c, &omni, m, opts.mode)?;
        return Ok(DominatorReport { dominator: omni, verdict, case: DominatorCase::Omniscient, projection: None });
    }
    require_projectable(m)?;
    let pr = project_in(ctx, c, m, opts)?;
    let verdict = compare_in(ctx, c, &pr.pi, m, opts.mode)?;
    Ok(DominatorReport { dominator: pr.pi.clone(), verdict, case: DominatorCase::Projection, projection: Some(pr) })
}
