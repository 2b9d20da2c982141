//! Positive, bounded proposition weights `a_i` (numbered from 1).

use crate::error::{invalid_arg, Result};
use crate::scalar::{rational_from_f64, Rational};

#[derive(Clone, Debug, PartialEq)]
pub enum WeightRule {
    Const { value: f64 },
    /// `a_i = scale * ratio^i` with `0 < ratio <= 1`.
    Geometric { scale: f64, ratio: f64 },
    /// Finite spaces only.
    List { values: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Weights {
    rule: WeightRule,
}

impl Weights {
    pub fn new(rule: WeightRule) -> Result<Self> {
        let ok = match &rule {
            WeightRule::Const { value } => value.is_finite() && *value > 0.0,
            WeightRule::Geometric { scale, ratio } => {
                scale.is_finite() && *scale > 0.0 && *ratio > 0.0 && *ratio <= 1.0
            }
            WeightRule::List { values } => !values.is_empty() && values.iter().all(|v| v.is_finite() && *v > 0.0),
        };
        if !ok {
            return invalid_arg(format!("weights must be positive and bounded, got {rule:?}"));
        }
        Ok(Weights { rule })
    }

    pub fn unit() -> Self {
        Weights { rule: WeightRule::Const { value: 1.0 } }
    }

    /// `a_i = 2^{-i}`.
    pub fn halving() -> Self {
        Weights { rule: WeightRule::Geometric { scale: 1.0, ratio: 0.5 } }
    }

    pub fn rule(&self) -> &WeightRule {
        &self.rule
    }

    /// Number of weights for list rules.
    pub fn len(&self) -> Option<usize> {
        match &self.rule {
            WeightRule::List { values } => Some(values.len()),
            _ => None,
        }
    }

    pub fn weight(&self, i: usize) -> f64 {
        match &self.rule {
            WeightRule::Const { value } => *value,
            WeightRule::Geometric { scale, ratio } => scale * ratio.powi(i as i32),
            WeightRule::List { values } => values[i - 1],
        }
    }

    pub fn weight_exact(&self, i: usize) -> Rational {
        match &self.rule {
            WeightRule::Const { value } => rational_from_f64(*value).expect("finite"),
            WeightRule::Geometric { scale, ratio } => {
                let r = rational_from_f64(*ratio).expect("finite");
                let mut p = rational_from_f64(*scale).expect("finite");
                for _ in 0..i {
                    p *= &r;
                }
                p
            }
            WeightRule::List { values } => rational_from_f64(values[i - 1]).expect("finite"),
        }
    }

    /// The first `n` weights; list rules must cover them.
    pub fn take(&self, n: usize) -> Result<Vec<f64>> {
        self.check_len(n)?;
        Ok((1..=n).map(|i| self.weight(i)).collect())
    }

    pub fn take_exact(&self, n: usize) -> Result<Vec<Rational>> {
        self.check_len(n)?;
        Ok((1..=n).map(|i| self.weight_exact(i)).collect())
    }

    fn check_len(&self, n: usize) -> Result<()> {
        match self.len() {
            Some(len) if len < n => invalid_arg(format!("{len} weights given for {n} propositions")),
            _ => Ok(()),
        }
    }

    pub fn sup_bound(&self) -> f64 {
        match &self.rule {
            WeightRule::Const { value } => *value,
            WeightRule::Geometric { scale, ratio } => scale * ratio,
            WeightRule::List { values } => values.iter().copied().fold(0.0, f64::max),
        }
    }

    /// `inf_i a_i` when positive, i.e. when the weights do not decay.
    pub fn lower_bound(&self) -> Option<f64> {
        match &self.rule {
            WeightRule::Const { value } => Some(*value),
            WeightRule::Geometric { scale, ratio } if *ratio == 1.0 => Some(*scale),
            WeightRule::Geometric { .. } => None,
            WeightRule::List { values } => Some(values.iter().copied().fold(f64::INFINITY, f64::min)),
        }
    }

    /// `sum_i a_i` over the naturals when finite.
    pub fn sum(&self) -> Option<f64> {
        match &self.rule {
            WeightRule::Geometric { scale, ratio } if *ratio < 1.0 => Some(scale * ratio / (1.0 - ratio)),
            WeightRule::List { values } => Some(values.iter().sum()),
            _ => None,
        }
    }

    pub fn is_summable(&self) -> bool {
        self.sum().is_some()
    }

    /// `sum_{i > k} a_i` when finite.
    pub fn tail_sum(&self, k: usize) -> Option<f64> {
        match &self.rule {
            WeightRule::Geometric { scale, ratio } if *ratio < 1.0 => {
                Some(scale * ratio.powi(k as i32 + 1) / (1.0 - ratio))
            }
            WeightRule::List { values } => Some(values.iter().skip(k).sum()),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match &self.rule {
            WeightRule::Const { value } => format!("const {value}"),
            WeightRule::Geometric { scale, ratio } => format!("geometric {scale}*{ratio}^i"),
            WeightRule::List { values } => format!("list of {}", values.len()),
        }
    }
}
