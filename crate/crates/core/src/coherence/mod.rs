//! Coherence and countable coherence of credence functions.
//!
//! Finite spaces reduce to hull membership over the valuation rows, solved by
//! a phase-one simplex in exact or floating arithmetic. The symbolic families
//! use closed-form rules: tail sets need nonincreasing credences, initial
//! segments nondecreasing ones, partitions a total of at most one.

mod simplex;
pub mod tarski;

pub use simplex::{phase_one, Feasibility};
pub use tarski::{check_partial_measure, PartialMeasureOracle, PartialMeasureViolation};

use serde::Serialize;

use crate::credence::{Credence, Monotonicity, SeriesSum};
use crate::error::{invalid_arg, Result};
use crate::opinion_space::{Family, OpinionSpace, ValuationMatrix, World, WorldAtom};
use crate::scalar::{rational_from_f64, NumericMode, Rational, Scalar, Value};

pub const DEFAULT_EPS_COH: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherenceOptions {
    pub mode: NumericMode,
    pub eps_coh: f64,
    /// Number of symbolic propositions listed in witnesses.
    pub truncation: usize,
    /// Terms of a custom rule inspected before giving up.
    pub probe: usize,
}

impl Default for CoherenceOptions {
    fn default() -> Self {
        CoherenceOptions { mode: NumericMode::Float, eps_coh: DEFAULT_EPS_COH, truncation: 64, probe: 256 }
    }
}

impl CoherenceOptions {
    pub fn rational() -> Self {
        CoherenceOptions { mode: NumericMode::Rational, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoherenceStatus {
    Coherent,
    CountablyCoherent,
    Incoherent,
    /// A custom rule whose limit or trend could not be established.
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AtomWeight {
    pub atom: usize,
    pub representative: Option<World>,
    #[serde(skip)]
    pub weight: Value,
}

/// `c = sum_w lambda_w v_w` over listed atoms.
///
/// `tail_mass` is mass on genuine worlds beyond the listed atoms (symbolic
/// spaces only); `residual` is mass on no world at all, which is how a merely
/// finitely additive extension shows up.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaRepresentation {
    pub weights: Vec<AtomWeight>,
    pub tail_mass: Value,
    pub residual: Value,
}

impl LambdaRepresentation {
    pub fn total(&self) -> f64 {
        self.weights.iter().map(|w| w.weight.to_f64()).sum::<f64>() + self.tail_mass.to_f64() + self.residual.to_f64()
    }

    pub fn weight_of(&self, atom: usize) -> f64 {
        self.weights.iter().filter(|w| w.atom == atom).map(|w| w.weight.to_f64()).sum()
    }

    /// Point mass on one atom of a finite quotient.
    pub fn point_mass(atom: &WorldAtom) -> Self {
        LambdaRepresentation {
            weights: vec![AtomWeight {
                atom: atom.id,
                representative: atom.representative.clone(),
                weight: Value::Exact(Rational::one()),
            }],
            tail_mass: Value::Exact(Rational::zero()),
            residual: Value::Exact(Rational::zero()),
        }
    }
}

/// Why a credence is incoherent.
#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    /// `sum_i h_i v_w(p_i) + offset <= 0` for every atom while
    /// `sum_i h_i c(p_i) + offset = margin > 0`.
    Separating { coefficients: Vec<(usize, Value)>, offset: Value, margin: Value },
    PartialMeasure(PartialMeasureViolation),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoherenceVerdict {
    pub status: CoherenceStatus,
    pub witness: Option<LambdaRepresentation>,
    pub certificate: Option<Certificate>,
    pub note: Option<String>,
}

impl CoherenceVerdict {
    pub fn is_coherent(&self) -> bool {
        matches!(self.status, CoherenceStatus::Coherent | CoherenceStatus::CountablyCoherent)
    }

    fn incoherent(certificate: Certificate) -> Self {
        CoherenceVerdict { status: CoherenceStatus::Incoherent, witness: None, certificate: Some(certificate), note: None }
    }

    fn undetermined(note: impl Into<String>) -> Self {
        CoherenceVerdict { status: CoherenceStatus::Undetermined, witness: None, certificate: None, note: Some(note.into()) }
    }
}

/// Credence values for the first `n` propositions, rejecting length mismatches
/// on finite spaces.
pub(crate) fn finite_values(c: &Credence, n: usize) -> Result<Vec<f64>> {
    if let Some(len) = c.len() {
        if len != n {
            return invalid_arg(format!("credence has {len} values but the space has {n} propositions"));
        }
    }
    Ok(c.values(n))
}

pub(crate) fn finite_exact_values(c: &Credence, n: usize) -> Result<Vec<Rational>> {
    let vals = finite_values(c, n)?;
    Ok(match c.exact_values(n) {
        Some(v) => v,
        None => vals.iter().map(|x| rational_from_f64(*x).expect("finite")).collect(),
    })
}

/// Hull membership of `c` over the rows of `matrix`.
pub fn check_on_matrix(
    c: &Credence,
    atoms: &[WorldAtom],
    matrix: &ValuationMatrix,
    opts: &CoherenceOptions,
) -> Result<CoherenceVerdict> {
    let n = matrix.n_props();
    match opts.mode {
        NumericMode::Rational => {
            let target = finite_exact_values(c, n)?;
            Ok(hull_membership::<Rational>(atoms, matrix, &target, &Rational::zero()))
        }
        NumericMode::Float => {
            let target = finite_values(c, n)?;
            Ok(hull_membership::<f64>(atoms, matrix, &target, &opts.eps_coh))
        }
    }
}

fn hull_membership<T: Scalar>(
    atoms: &[WorldAtom],
    matrix: &ValuationMatrix,
    target: &[T],
    accept: &T,
) -> CoherenceVerdict {
    let n = matrix.n_props();
    let m = matrix.n_atoms();
    let mut a: Vec<Vec<T>> = (0..n)
        .map(|i| (0..m).map(|w| if matrix.entry(w, i) { T::one() } else { T::zero() }).collect())
        .collect();
    a.push(vec![T::one(); m]);
    let mut b: Vec<T> = target.to_vec();
    b.push(T::one());
    match phase_one(&a, &b, accept) {
        Feasibility::Feasible { x, .. } => {
            let mut x = x;
            if !T::is_exact() {
                let mut s = T::zero();
                for v in x.iter_mut() {
                    if v.is_negative_strict() {
                        *v = T::zero();
                    }
                    s = s.add(v);
                }
                for v in x.iter_mut() {
                    *v = v.div(&s);
                }
            }
            let weights = x
                .iter()
                .enumerate()
                .filter(|(_, v)| v.gt_eps() || (T::is_exact() && **v != T::zero()))
                .map(|(w, v)| AtomWeight { atom: atoms[w].id, representative: atoms[w].representative.clone(), weight: v.to_value() })
                .collect();
            CoherenceVerdict {
                status: CoherenceStatus::Coherent,
                witness: Some(LambdaRepresentation {
                    weights,
                    tail_mass: Scalar::to_value(&T::zero()),
                    residual: Scalar::to_value(&T::zero()),
                }),
                certificate: None,
                note: None,
            }
        }
        Feasibility::Infeasible { dual, .. } => {
            let coefficients: Vec<(usize, Value)> =
                dual[..n].iter().enumerate().filter(|(_, y)| **y != T::zero()).map(|(i, y)| (i + 1, y.to_value())).collect();
            let offset = dual[n].clone();
            let mut margin = offset.clone();
            for (i, y) in dual[..n].iter().enumerate() {
                margin = margin.add(&y.mul(&target[i]));
            }
            CoherenceVerdict::incoherent(Certificate::Separating {
                coefficients,
                offset: Scalar::to_value(&offset),
                margin: Scalar::to_value(&margin),
            })
        }
    }
}

/// Decides (finite-additivity) coherence of `c` on `space`.
pub fn check_coherence(c: &Credence, space: &OpinionSpace, opts: &CoherenceOptions) -> Result<CoherenceVerdict> {
    match space.family() {
        None => {
            let (atoms, matrix) = space.build_quotient(1)?;
            check_on_matrix(c, &atoms, &matrix, opts)
        }
        Some(Family::CountablePartition { cells: Some(m) }) => {
            let (atoms, matrix) = space.build_quotient(m)?;
            let finite = match c {
                Credence::Finite { .. } => c.clone(),
                Credence::Rule(_) => Credence::from_f64s(c.values(m))?,
            };
            check_on_matrix(&finite, &atoms, &matrix, opts)
        }
        Some(family) => symbolic_coherence(c, space, family, opts),
    }
}

/// Decides countable coherence. On finite spaces this coincides with coherence.
pub fn check_countable_coherence(
    c: &Credence,
    space: &OpinionSpace,
    opts: &CoherenceOptions,
) -> Result<CoherenceVerdict> {
    let mut verdict = check_coherence(c, space, opts)?;
    if verdict.status != CoherenceStatus::Coherent {
        return Ok(verdict);
    }
    let finite_quotient = !space.is_symbolic() || space.prop_count().is_some();
    let residual_zero = match &verdict.witness {
        Some(w) => match &w.residual {
            Value::Exact(r) => *r == Rational::zero(),
            Value::Float(x) => x.abs() <= opts.eps_coh,
        },
        None => false,
    };
    if finite_quotient || residual_zero {
        verdict.status = CoherenceStatus::CountablyCoherent;
    }
    Ok(verdict)
}

/// A λ-representation of a coherent credence, listing `truncation` atoms on
/// symbolic spaces.
pub fn lambda_representation(
    c: &Credence,
    space: &OpinionSpace,
    opts: &CoherenceOptions,
) -> Result<Option<LambdaRepresentation>> {
    Ok(check_coherence(c, space, opts)?.witness)
}

/// Exact values where the credence has them, floats otherwise.
struct Seq<'a> {
    c: &'a Credence,
    exact: bool,
}

impl Seq<'_> {
    fn at(&self, id: usize) -> Value {
        if self.exact {
            Value::Exact(self.c.exact_value(id).expect("exact credence"))
        } else {
            Value::Float(self.c.value(id))
        }
    }

    fn constant(&self, x: f64) -> Value {
        if self.exact {
            Value::Exact(rational_from_f64(x).expect("finite"))
        } else {
            Value::Float(x)
        }
    }
}

fn vsub(a: &Value, b: &Value) -> Value {
    match (a, b) {
        (Value::Exact(x), Value::Exact(y)) => Value::Exact(x - y),
        _ => Value::Float(a.to_f64() - b.to_f64()),
    }
}

fn first_pair(c: &Credence, limit: usize, rising: bool) -> Option<(usize, usize)> {
    (1..limit).find_map(|i| {
        let (a, b) = (c.value(i), c.value(i + 1));
        let hit = if rising { b > a } else { b < a };
        hit.then_some((i, i + 1))
    })
}

fn symbolic_coherence(
    c: &Credence,
    space: &OpinionSpace,
    family: Family,
    opts: &CoherenceOptions,
) -> Result<CoherenceVerdict> {
    let k = opts.truncation.max(1);
    let exact = matches!(c, Credence::Finite { .. }) || matches!(c, Credence::Rule(crate::credence::CredenceRule::Zero));
    let seq = Seq { c, exact };
    let star = space.star().map(|s| World::Star(s.to_string()));
    let scan = c.len().map_or(opts.probe.max(k), |l| l + 1);
    let eps = opts.eps_coh;

    match family {
        Family::TailSets | Family::InitialSegments => {
            let want_decreasing = family == Family::TailSets;
            let trend = c.monotonicity(scan);
            let ok = match trend {
                Monotonicity::Constant => true,
                Monotonicity::Nonincreasing => want_decreasing,
                Monotonicity::Nondecreasing => !want_decreasing,
                Monotonicity::Neither { .. } => false,
                Monotonicity::Unknown => {
                    return Ok(CoherenceVerdict::undetermined("custom rule: monotonicity cannot be established"));
                }
            };
            if !ok {
                // a pair moving the wrong way separates c from every atom
                let pair = first_pair(c, scan, want_decreasing);
                let (i, j) = match pair {
                    Some(p) => p,
                    None => return Ok(CoherenceVerdict::undetermined("trend violation not located within probe")),
                };
                let float_gap = (c.value(j) - c.value(i)).abs();
                if !exact && float_gap <= eps {
                    // within tolerance: fall through to the coherent branch
                } else {
                    let (hi, lo) = if want_decreasing { (j, i) } else { (i, j) };
                    let margin = vsub(&seq.at(hi), &seq.at(lo));
                    let one = seq.constant(1.0);
                    let minus = match &one {
                        Value::Exact(r) => Value::Exact(-r),
                        Value::Float(x) => Value::Float(-x),
                    };
                    return Ok(CoherenceVerdict::incoherent(Certificate::Separating {
                        coefficients: vec![(hi, one), (lo, minus)],
                        offset: seq.constant(0.0),
                        margin,
                    }));
                }
            }
            let Some(limit) = c.limit() else {
                return Ok(CoherenceVerdict::undetermined("custom rule without a declared limit"));
            };
            let limit_v = seq.constant(limit);
            let mut weights = Vec::new();
            let (tail_mass, residual_mass);
            if want_decreasing {
                // world 0 lies in no tail; world n lies in tails 1..=n
                for n in 0..=k {
                    let upper = if n == 0 { seq.constant(1.0) } else { seq.at(n) };
                    weights.push((World::Nat(n as u64), vsub(&upper, &seq.at(n + 1))));
                }
                tail_mass = vsub(&seq.at(k + 1), &limit_v);
                residual_mass = limit_v;
            } else {
                // worlds 0 and 1 lie in every segment; world n >= 2 in segments n..
                weights.push((World::Nat(0), seq.at(1)));
                for n in 2..=k {
                    weights.push((World::Nat(n as u64), vsub(&seq.at(n), &seq.at(n - 1))));
                }
                tail_mass = vsub(&limit_v, &seq.at(k));
                residual_mass = vsub(&seq.constant(1.0), &limit_v);
            }
            Ok(coherent_with(weights, tail_mass, residual_mass, star, &seq))
        }
        Family::CountablePartition { .. } => {
            let total = match c.sum() {
                SeriesSum::Finite(s) => Some(s),
                SeriesSum::Infinite => None,
                SeriesSum::Unknown => {
                    return Ok(CoherenceVerdict::undetermined("custom rule: the credence total is unknown"));
                }
            };
            let exact_total: Option<Rational> =
                if exact { c.exact_values(c.len().unwrap_or(0)).map(|v| v.into_iter().sum()) } else { None };
            let over = match (&exact_total, total) {
                (Some(t), _) => *t > Rational::one(),
                (None, Some(s)) => s > 1.0 + eps,
                (None, None) => true,
            };
            if over {
                // smallest prefix whose credences already exceed one
                let mut acc = seq.constant(0.0);
                let mut cut = None;
                let cap = c.len().unwrap_or(10_000_000);
                for i in 1..=cap {
                    acc = vadd(&acc, &seq.at(i));
                    let exceeds = match &acc {
                        Value::Exact(r) => *r > Rational::one(),
                        Value::Float(x) => *x > 1.0 + eps,
                    };
                    if exceeds {
                        cut = Some(i);
                        break;
                    }
                }
                let Some(cut) = cut else {
                    return Ok(CoherenceVerdict::undetermined("total exceeds one only in the limit"));
                };
                let one = seq.constant(1.0);
                let margin = vsub(&acc, &one);
                return Ok(CoherenceVerdict::incoherent(Certificate::Separating {
                    coefficients: (1..=cut).map(|i| (i, one.clone())).collect(),
                    offset: match &one {
                        Value::Exact(r) => Value::Exact(-r),
                        Value::Float(x) => Value::Float(-x),
                    },
                    margin,
                }));
            }
            let weights: Vec<(World, Value)> = (1..=k).map(|i| (World::Nat(i as u64 - 1), seq.at(i))).collect();
            let tail = match c.tail_sum(k) {
                SeriesSum::Finite(t) => t,
                _ => 0.0,
            };
            let tail_v = if exact { seq.constant(0.0) } else { Value::Float(tail) };
            let listed = weights.iter().fold(seq.constant(0.0), |a, (_, v)| vadd(&a, v));
            let residual = match (&exact_total, total) {
                (Some(t), _) => Value::Exact(Rational::one() - t),
                _ => Value::Float(1.0 - listed.to_f64() - tail),
            };
            Ok(coherent_with(weights, tail_v, residual, star, &seq))
        }
    }
}

fn vadd(a: &Value, b: &Value) -> Value {
    match (a, b) {
        (Value::Exact(x), Value::Exact(y)) => Value::Exact(x + y),
        _ => Value::Float(a.to_f64() + b.to_f64()),
    }
}

fn coherent_with(
    weights: Vec<(World, Value)>,
    tail_mass: Value,
    residual: Value,
    star: Option<World>,
    seq: &Seq<'_>,
) -> CoherenceVerdict {
    let mut listed: Vec<AtomWeight> = weights
        .into_iter()
        .enumerate()
        .map(|(i, (w, v))| AtomWeight { atom: i, representative: Some(w), weight: v })
        .collect();
    let residual = match star {
        // the added point absorbs the mass that escapes every world
        Some(s) => {
            listed.push(AtomWeight { atom: listed.len(), representative: Some(s), weight: residual });
            seq.constant(0.0)
        }
        None => residual,
    };
    let tail_mass = match tail_mass {
        Value::Float(x) if x.abs() < 1e-300 => Value::Float(0.0),
        v => v,
    };
    CoherenceVerdict {
        status: CoherenceStatus::Coherent,
        witness: Some(LambdaRepresentation { weights: listed, tail_mass, residual }),
        certificate: None,
        note: None,
    }
}

/// Checks `|c(p_i) - sum_w lambda_w v_w(p_i)| <= tol` on a finite quotient.
pub fn witness_residual(c: &Credence, rep: &LambdaRepresentation, matrix: &ValuationMatrix) -> f64 {
    let n = matrix.n_props();
    (0..n)
        .map(|i| {
            let mix: f64 = rep.weights.iter().filter(|w| matrix.entry(w.atom, i)).map(|w| w.weight.to_f64()).sum();
            (mix - c.value(i + 1)).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests;
