//! Inaccuracy on countable spaces as a series with analytic verdicts.
//!
//! At a natural-number world the truth values `v_w(p_i)` are eventually
//! constant (`b` after index `i0`), so the tail terms are `a_i 𝔡(b, c_i)`.
//! Divergence is only asserted with a named comparison test; otherwise the
//! tail is bounded explicitly or the partial sum is reported as unresolved.

use serde::Serialize;

use crate::coherence::LambdaRepresentation;
use crate::credence::{Credence, CredenceRule};
use crate::error::{invalid_arg, Result};
use crate::opinion_space::{Family, OpinionSpace, World, WorldAtom};

use super::{weights_for, ExtReal, InaccuracyMeasure};

pub const DEFAULT_SERIES_TERMS: usize = 10_000;
pub const DEFAULT_SERIES_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesPolicy {
    /// Maximum number of terms summed.
    pub truncation: usize,
    /// Required bound on the neglected tail.
    pub tol: f64,
}

impl Default for SeriesPolicy {
    fn default() -> Self {
        SeriesPolicy { truncation: DEFAULT_SERIES_TERMS, tol: DEFAULT_SERIES_TOL }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesStatus {
    ConvergedTo(f64),
    DivergesToInfinity,
    PartialSum { value: f64, k: usize, unresolved: bool },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesVerdict {
    pub status: SeriesStatus,
    pub terms_used: usize,
    /// The comparison test behind the verdict.
    pub tag: Option<String>,
    /// Upper bound on the part of the series not summed.
    pub tail_bound: Option<f64>,
}

impl SeriesVerdict {
    fn converged(value: f64, terms: usize, tag: &str, tail_bound: f64) -> Self {
        SeriesVerdict {
            status: SeriesStatus::ConvergedTo(value),
            terms_used: terms,
            tag: Some(tag.into()),
            tail_bound: Some(tail_bound),
        }
    }

    fn diverges(terms: usize, tag: &str) -> Self {
        SeriesVerdict { status: SeriesStatus::DivergesToInfinity, terms_used: terms, tag: Some(tag.into()), tail_bound: None }
    }

    fn partial(value: f64, k: usize, tag: Option<&str>) -> Self {
        SeriesVerdict {
            status: SeriesStatus::PartialSum { value, k, unresolved: true },
            terms_used: k,
            tag: tag.map(Into::into),
            tail_bound: None,
        }
    }

    /// The resolved value, `None` for unresolved partial sums.
    pub fn value(&self) -> Option<ExtReal> {
        match self.status {
            SeriesStatus::ConvergedTo(v) => Some(ExtReal::Finite(v)),
            SeriesStatus::DivergesToInfinity => Some(ExtReal::PosInf),
            SeriesStatus::PartialSum { .. } => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.status == SeriesStatus::DivergesToInfinity
    }
}

/// Truth values at `world` are constant (`b`) for all indices past `i0`.
fn eventual_truth(space: &OpinionSpace, family: Family, world: &World) -> (bool, usize) {
    match world {
        World::Star(_) => (space.contains(1, world), 0),
        World::Nat(n) => {
            let n = *n as usize;
            match family {
                Family::TailSets => (false, n),
                Family::InitialSegments => (true, n.max(1) - 1),
                Family::CountablePartition { .. } => (false, n + 1),
            }
        }
    }
}

/// `𝓘(c,w)` for a quotient atom, using its representative world.
pub fn score_countable(
    c: &Credence,
    m: &InaccuracyMeasure,
    atom: &WorldAtom,
    space: &OpinionSpace,
    policy: &SeriesPolicy,
) -> Result<SeriesVerdict> {
    let Some(world) = &atom.representative else {
        return invalid_arg("atom has no representative world");
    };
    score_world(c, m, world, space, policy)
}

pub fn score_world(
    c: &Credence,
    m: &InaccuracyMeasure,
    world: &World,
    space: &OpinionSpace,
    policy: &SeriesPolicy,
) -> Result<SeriesVerdict> {
    if let Some(n) = space.prop_count() {
        // finitely many propositions: a plain sum
        let values = if space.is_symbolic() { c.values(n) } else { crate::coherence::finite_values(c, n)? };
        let weights = weights_for(m, space, n)?;
        let sig: Vec<bool> = (1..=n).map(|i| space.contains(i, world)).collect();
        return Ok(match m.score_signature(&values, &weights, &sig) {
            ExtReal::Finite(v) => SeriesVerdict::converged(v, n, "finite sum", 0.0),
            ExtReal::PosInf => SeriesVerdict::diverges(n, "infinite term"),
        });
    }
    m.require_countable()?;
    if m.weights.len().is_some() {
        return invalid_arg("list weights cannot cover countably many propositions");
    }
    let family = space.family().expect("symbolic space");
    let (b, i0) = eventual_truth(space, family, world);
    let g = &m.generator;
    let term = |i: usize| -> f64 {
        let v = if i <= i0 { space.contains(i, world) } else { b };
        m.weights.weight(i) * g.divergence(if v { 1.0 } else { 0.0 }, c.value(i)).to_f64()
    };
    let sum_to = |k: usize| -> f64 { (1..=k).map(term).sum() };
    let sup_d = g.sup_divergence().to_f64();
    let cap = policy.truncation.max(i0);

    // (i) summable weights: bounded terms, explicit tail bound
    if m.weights.is_summable() {
        let mut k = i0.max(1);
        while k < cap && sup_d * m.weights.tail_sum(k).unwrap_or(f64::INFINITY) > policy.tol {
            k = (k * 2).min(cap);
        }
        let bound = sup_d * m.weights.tail_sum(k).unwrap_or(f64::INFINITY);
        let value = sum_to(k);
        return Ok(if bound <= policy.tol {
            SeriesVerdict::converged(value, k, "summable weights", bound)
        } else {
            SeriesVerdict::partial(value, k, None)
        });
    }

    // weights bounded away from zero
    let a_inf = m.weights.lower_bound().expect("non-summable weights are bounded below");
    let Some(limit) = c.limit() else {
        return Ok(SeriesVerdict::partial(sum_to(cap), cap, None));
    };
    let target = if b { 1.0 } else { 0.0 };
    if limit != target {
        if matches!(c.as_rule(), Some(CredenceRule::Custom { .. })) {
            return Ok(SeriesVerdict::partial(sum_to(cap), cap, Some("declared limit")));
        }
        // terms tend to a_inf * 𝔡(b, L) > 0
        return Ok(SeriesVerdict::diverges(i0 + 1, "term test"));
    }
    let (kmin, kmax) = g.curvature_bounds();
    match c {
        Credence::Finite { .. } => {
            let k = i0.max(c.len().unwrap_or(0));
            Ok(SeriesVerdict::converged(sum_to(k), k, "finitely many nonzero terms", 0.0))
        }
        Credence::Rule(rule) => match rule {
            CredenceRule::Zero | CredenceRule::Const { .. } => {
                Ok(SeriesVerdict::converged(sum_to(i0), i0, "finitely many nonzero terms", 0.0))
            }
            CredenceRule::Geometric { scale, ratio } if *ratio >= 1.0 || *scale == 0.0 => {
                Ok(SeriesVerdict::converged(sum_to(i0), i0, "finitely many nonzero terms", 0.0))
            }
            CredenceRule::InvSqrt { scale } if *scale == 0.0 => {
                Ok(SeriesVerdict::converged(sum_to(i0), i0, "finitely many nonzero terms", 0.0))
            }
            CredenceRule::InvSqrt { .. } => {
                // b = 0 here: 𝔡(0, c_i) >= κ_min/2 · s²/(i+1)
                debug_assert!(!b && kmin > 0.0 && a_inf > 0.0);
                Ok(SeriesVerdict::diverges(i0 + 1, "harmonic comparison"))
            }
            CredenceRule::Geometric { scale, ratio } => {
                // b = 0 here: 𝔡(0, c_i) <= κ_max/2 · s² r^{2i}
                let a_sup = m.weights.sup_bound();
                let r2 = ratio * ratio;
                let bound = |k: usize| a_sup * kmax / 2.0 * scale * scale * r2.powi(k as i32 + 1) / (1.0 - r2);
                let mut k = i0.max(1);
                while k < cap && bound(k) > policy.tol {
                    k += 1;
                }
                let value = sum_to(k);
                Ok(if bound(k) <= policy.tol {
                    SeriesVerdict::converged(value, k, "geometric comparison", bound(k))
                } else {
                    SeriesVerdict::partial(value, k, None)
                })
            }
            CredenceRule::Custom { .. } => Ok(SeriesVerdict::partial(sum_to(cap), cap, None)),
        },
    }
}

/// `Σ_w λ_w 𝓘(c,w)` over the charged atoms of a λ-representation.
///
/// Mass beyond the listed atoms is bounded using the largest score such an
/// atom can have (partitions only); residual mass must be zero.
pub fn expected_inaccuracy(
    c: &Credence,
    m: &InaccuracyMeasure,
    rep: &LambdaRepresentation,
    space: &OpinionSpace,
    policy: &SeriesPolicy,
) -> Result<SeriesVerdict> {
    const NORM_TOL: f64 = 1e-9;
    if rep.weights.iter().any(|w| w.weight.to_f64() < 0.0) {
        return invalid_arg("λ weights must be nonnegative");
    }
    if (rep.total() - 1.0).abs() > NORM_TOL {
        return invalid_arg(format!("λ weights sum to {}, not 1", rep.total()));
    }
    if rep.residual.to_f64().abs() > NORM_TOL {
        return invalid_arg("the representation leaves mass on no world; compactify first");
    }
    let atoms = if space.is_symbolic() { None } else { Some(space.build_quotient(1)?.0) };
    let mut total = 0.0;
    let mut bound = 0.0;
    let mut terms = 0;
    for w in rep.weights.iter().filter(|w| w.weight.to_f64() > 0.0) {
        let world = match (&atoms, &w.representative) {
            (Some(atoms), _) => atoms[w.atom].representative.clone().expect("explicit atoms have worlds"),
            (None, Some(world)) => world.clone(),
            (None, None) => return invalid_arg("atom has no representative world"),
        };
        let v = score_world(c, m, &world, space, policy)?;
        terms = terms.max(v.terms_used);
        match v.status {
            SeriesStatus::DivergesToInfinity => return Ok(SeriesVerdict::diverges(terms, "charged atom with infinite score")),
            SeriesStatus::PartialSum { value, .. } => {
                return Ok(SeriesVerdict::partial(total + w.weight.to_f64() * value, terms, None));
            }
            SeriesStatus::ConvergedTo(x) => {
                total += w.weight.to_f64() * x;
                bound += w.weight.to_f64() * v.tail_bound.unwrap_or(0.0);
            }
        }
    }
    let tail = rep.tail_mass.to_f64();
    if tail > 0.0 {
        match space.family() {
            Some(Family::CountablePartition { .. }) => {
                // an unlisted world lies in at most one cell
                let base = score_all_false(c, m, space, policy)?;
                let Some(ExtReal::Finite(base)) = base.value() else {
                    return Ok(SeriesVerdict::partial(total, terms, None));
                };
                bound += tail * (base + m.weights.sup_bound() * m.generator.sup_divergence().to_f64());
            }
            _ => return Ok(SeriesVerdict::partial(total, terms, Some("unlisted mass"))),
        }
    }
    Ok(if bound <= policy.tol {
        SeriesVerdict::converged(total, terms, "charged atoms", bound)
    } else {
        SeriesVerdict::partial(total, terms, None)
    })
}

/// The score at a point lying in no proposition.
fn score_all_false(
    c: &Credence,
    m: &InaccuracyMeasure,
    space: &OpinionSpace,
    policy: &SeriesPolicy,
) -> Result<SeriesVerdict> {
    let base = space.compactify()?.space;
    let Some(star) = base.star() else {
        return invalid_arg("space has no point outside every proposition");
    };
    score_world(c, m, &World::Star(star.to_string()), &base, policy)
}
