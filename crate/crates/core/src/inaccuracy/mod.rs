//! Weighted Bregman inaccuracy `𝓘(c,w) = Σ a_i 𝔡(v_w(p_i), c(p_i))` on finite
//! and countable opinion spaces.

mod generator;
mod series;
mod weights;

use std::cmp::Ordering;

use serde::Serialize;

pub use generator::{ConvexGenerator, DerivativeBounds, GeneratorKind};
pub use series::{expected_inaccuracy, score_countable, DEFAULT_SERIES_TERMS, DEFAULT_SERIES_TOL, score_world, SeriesPolicy, SeriesStatus, SeriesVerdict};
pub use weights::{WeightRule, Weights};

use crate::coherence::finite_values;
use crate::credence::Credence;
use crate::error::{invalid_arg, CredalError, Result};
use crate::opinion_space::{OpinionSpace, ValuationMatrix, WorldAtom};
use crate::scalar::Rational;

/// A nonnegative extended real.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

/// `{"value": x}` or `{"inf": true}`.
impl Serialize for ExtReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(1))?;
        match self {
            ExtReal::Finite(x) => map.serialize_entry("value", x)?,
            ExtReal::PosInf => map.serialize_entry("inf", &true)?,
        }
        map.end()
    }
}

impl ExtReal {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtReal::Finite(x) => *x,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    pub fn max(self, o: ExtReal) -> ExtReal {
        if self >= o {
            self
        } else {
            o
        }
    }
}

impl std::ops::Add for ExtReal {
    type Output = ExtReal;
    fn add(self, o: ExtReal) -> ExtReal {
        match (self, o) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::PosInf,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        match (self, o) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
            (ExtReal::PosInf, ExtReal::PosInf) => Some(Ordering::Equal),
            (ExtReal::PosInf, _) => Some(Ordering::Greater),
            (_, ExtReal::PosInf) => Some(Ordering::Less),
        }
    }
}

impl std::fmt::Display for ExtReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::PosInf => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InaccuracyMeasure {
    pub name: String,
    pub generator: ConvexGenerator,
    pub weights: Weights,
}

impl InaccuracyMeasure {
    pub fn new(name: impl Into<String>, generator: ConvexGenerator, weights: Weights) -> Self {
        InaccuracyMeasure { name: name.into(), generator, weights }
    }

    pub fn brier() -> Self {
        Self::new("brier", ConvexGenerator::quadratic(), Weights::unit())
    }

    pub fn generalized_brier() -> Self {
        Self::new("generalized_brier", ConvexGenerator::quadratic(), Weights::unit())
    }

    /// Squared error with weights `2^{-i}`.
    pub fn walsh() -> Self {
        Self::new("walsh", ConvexGenerator::quadratic(), Weights::halving())
    }

    /// Countable use needs bounded `𝔡`, i.e. finite endpoint derivatives.
    pub fn require_countable(&self) -> Result<()> {
        if !self.generator.has_finite_derivatives() {
            return Err(CredalError::UnsupportedMeasure(format!(
                "{} has an unbounded derivative and is admitted on finite spaces only",
                self.generator.name()
            )));
        }
        Ok(())
    }

    /// `Σ a_i 𝔡(v_i, c_i)` over a signature.
    pub fn score_signature(&self, c: &[f64], weights: &[f64], signature: &[bool]) -> ExtReal {
        let mut total = ExtReal::Finite(0.0);
        for i in 0..signature.len() {
            let v = if signature[i] { 1.0 } else { 0.0 };
            match self.generator.divergence(v, c[i]) {
                ExtReal::Finite(d) => total = total + ExtReal::Finite(weights[i] * d),
                ExtReal::PosInf => return ExtReal::PosInf,
            }
        }
        total
    }

    pub fn score_signature_exact(&self, c: &[Rational], weights: &[Rational], signature: &[bool]) -> Option<Rational> {
        let one = Rational::from_integer(1.into());
        let zero = Rational::from_integer(0.into());
        let mut total = zero.clone();
        for i in 0..signature.len() {
            let v = if signature[i] { &one } else { &zero };
            total += &weights[i] * self.generator.divergence_exact(v, &c[i])?;
        }
        Some(total)
    }
}

/// Weights matched to `n` propositions of `space`: lists must match exactly on
/// explicit spaces and cover the truncation on symbolic ones.
pub(crate) fn weights_for(m: &InaccuracyMeasure, space: &OpinionSpace, n: usize) -> Result<Vec<f64>> {
    if !space.is_symbolic() {
        if let Some(len) = m.weights.len() {
            if len != n {
                return invalid_arg(format!("{len} weights given for {n} propositions"));
            }
        }
    }
    m.weights.take(n)
}

/// `𝓘(c,w)` on a finite (or truncated) quotient atom.
pub fn score(c: &Credence, m: &InaccuracyMeasure, atom: &WorldAtom, space: &OpinionSpace) -> Result<ExtReal> {
    let n = atom.signature.len();
    if !space.is_symbolic() && space.prop_count() != Some(n) {
        return invalid_arg("atom signature does not match the space");
    }
    let values = if space.is_symbolic() { c.values(n) } else { finite_values(c, n)? };
    let weights = weights_for(m, space, n)?;
    Ok(m.score_signature(&values, &weights, &atom.signature))
}

/// Scores at every row of `matrix`.
pub fn atom_scores(c: &[f64], m: &InaccuracyMeasure, weights: &[f64], matrix: &ValuationMatrix) -> Vec<ExtReal> {
    matrix.rows().iter().map(|row| m.score_signature(c, weights, row)).collect()
}

/// `𝔡(x,y)` with range checks.
pub fn eval_divergence(g: &ConvexGenerator, x: f64, y: f64) -> Result<ExtReal> {
    for (name, v) in [("x", x), ("y", y)] {
        if !(0.0..=1.0).contains(&v) {
            return invalid_arg(format!("{name} = {v} lies outside [0,1]"));
        }
    }
    Ok(g.divergence(x, y))
}
