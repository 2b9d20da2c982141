//! Credence functions: explicit finite vectors or closed-form rules on the naturals.

use std::fmt;
use std::sync::Arc;


use crate::error::{CredalError, Result};
use crate::scalar::{rational_from_f64, Rational, Scalar};

/// A credence given by a rule `N -> c(p_N)` on the propositions of a symbolic space.
#[derive(Clone)]
pub enum CredenceRule {
    /// `c(N) = scale / sqrt(N + 1)`.
    InvSqrt { scale: f64 },
    Zero,
    /// `c(N) = scale * ratio^N`.
    Geometric { scale: f64, ratio: f64 },
    Const { value: f64 },
    /// Library-only escape hatch; its analytic properties are unknown unless declared.
    Custom { name: String, f: Arc<dyn Fn(usize) -> f64 + Send + Sync>, declared_limit: Option<f64> },
}

impl fmt::Debug for CredenceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CredenceRule::InvSqrt { scale } => write!(f, "InvSqrt {{ scale: {scale} }}"),
            CredenceRule::Zero => f.write_str("Zero"),
            CredenceRule::Geometric { scale, ratio } => write!(f, "Geometric {{ scale: {scale}, ratio: {ratio} }}"),
            CredenceRule::Const { value } => write!(f, "Const {{ value: {value} }}"),
            CredenceRule::Custom { name, declared_limit, .. } => {
                write!(f, "Custom {{ name: {name:?}, declared_limit: {declared_limit:?} }}")
            }
        }
    }
}

impl CredenceRule {
    pub fn name(&self) -> &str {
        match self {
            CredenceRule::InvSqrt { .. } => "inv_sqrt",
            CredenceRule::Zero => "zero",
            CredenceRule::Geometric { .. } => "geometric",
            CredenceRule::Const { .. } => "const",
            CredenceRule::Custom { name, .. } => name,
        }
    }

    pub fn eval(&self, n: usize) -> f64 {
        match self {
            CredenceRule::InvSqrt { scale } => scale / ((n as f64) + 1.0).sqrt(),
            CredenceRule::Zero => 0.0,
            CredenceRule::Geometric { scale, ratio } => scale * ratio.powi(n.min(i32::MAX as usize) as i32),
            CredenceRule::Const { value } => *value,
            CredenceRule::Custom { f, .. } => f(n),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Monotonicity {
    Constant,
    Nonincreasing,
    Nondecreasing,
    /// `c(i) < c(j)` (first) or `c(i) > c(j)` witnessed at indices `(i, j)`, `i < j`.
    Neither { rises: (usize, usize), falls: (usize, usize) },
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SeriesSum {
    Finite(f64),
    Infinite,
    Unknown,
}

#[derive(Clone, Debug)]
pub enum Credence {
    /// Values for propositions `1..=len`; on symbolic spaces later propositions get 0.
    Finite { exact: Vec<Rational>, approx: Vec<f64> },
    Rule(CredenceRule),
}

fn check_unit(x: f64, what: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&x) || x.is_nan() {
        return Err(CredalError::InvalidCredence(format!("{what} = {x} lies outside [0,1]")));
    }
    Ok(())
}

impl Credence {
    pub fn from_f64s(values: Vec<f64>) -> Result<Self> {
        let mut exact = Vec::with_capacity(values.len());
        for (i, v) in values.iter().enumerate() {
            check_unit(*v, &format!("c(p_{})", i + 1))?;
            exact.push(rational_from_f64(*v).expect("finite"));
        }
        Ok(Credence::Finite { exact, approx: values })
    }

    pub fn from_rationals(values: Vec<Rational>) -> Result<Self> {
        for (i, v) in values.iter().enumerate() {
            if *v < Rational::zero() || *v > Rational::one() {
                return Err(CredalError::InvalidCredence(format!("c(p_{}) = {v} lies outside [0,1]", i + 1)));
            }
        }
        let approx = values.iter().map(Scalar::to_f64).collect();
        Ok(Credence::Finite { exact: values, approx })
    }

    pub fn rule(rule: CredenceRule) -> Result<Self> {
        match &rule {
            CredenceRule::InvSqrt { scale } => {
                if *scale < 0.0 || scale / 2f64.sqrt() > 1.0 {
                    return Err(CredalError::InvalidCredence(format!("inv_sqrt scale {scale} leaves [0,1]")));
                }
            }
            CredenceRule::Zero => {}
            CredenceRule::Geometric { scale, ratio } => {
                if *scale < 0.0 || !(0.0..=1.0).contains(ratio) || scale * ratio > 1.0 {
                    return Err(CredalError::InvalidCredence(format!(
                        "geometric(scale {scale}, ratio {ratio}) leaves [0,1]"
                    )));
                }
            }
            CredenceRule::Const { value } => check_unit(*value, "const")?,
            CredenceRule::Custom { f, .. } => {
                for n in 1..=256 {
                    check_unit(f(n), &format!("c(p_{n})"))?;
                }
            }
        }
        Ok(Credence::Rule(rule))
    }

    pub fn len(&self) -> Option<usize> {
        match self {
            Credence::Finite { approx, .. } => Some(approx.len()),
            Credence::Rule(_) => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// `c(p_id)` with `id` numbered from 1.
    pub fn value(&self, id: usize) -> f64 {
        match self {
            Credence::Finite { approx, .. } => approx.get(id.wrapping_sub(1)).copied().unwrap_or(0.0),
            Credence::Rule(r) => r.eval(id),
        }
    }

    pub fn exact_value(&self, id: usize) -> Option<Rational> {
        match self {
            Credence::Finite { exact, .. } => Some(exact.get(id.wrapping_sub(1)).cloned().unwrap_or_else(Rational::zero)),
            Credence::Rule(CredenceRule::Zero) => Some(Rational::zero()),
            Credence::Rule(_) => None,
        }
    }

    pub fn values(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|i| self.value(i)).collect()
    }

    pub fn exact_values(&self, n: usize) -> Option<Vec<Rational>> {
        (1..=n).map(|i| self.exact_value(i)).collect()
    }

    pub fn as_rule(&self) -> Option<&CredenceRule> {
        match self {
            Credence::Rule(r) => Some(r),
            Credence::Finite { .. } => None,
        }
    }

    /// Limit of `c(p_N)` as `N -> infinity`, when known analytically.
    pub fn limit(&self) -> Option<f64> {
        match self {
            Credence::Finite { .. } => Some(0.0),
            Credence::Rule(r) => match r {
                CredenceRule::InvSqrt { .. } | CredenceRule::Zero => Some(0.0),
                CredenceRule::Geometric { scale, ratio } => Some(if *ratio < 1.0 { 0.0 } else { *scale }),
                CredenceRule::Const { value } => Some(*value),
                CredenceRule::Custom { declared_limit, .. } => *declared_limit,
            },
        }
    }

    /// Monotonicity over all propositions. Custom rules are only inspected on
    /// the first `probe` terms, which can refute but never establish a trend.
    pub fn monotonicity(&self, probe: usize) -> Monotonicity {
        match self {
            Credence::Finite { exact, .. } => {
                let mut padded = exact.clone();
                padded.push(Rational::zero());
                exact_trend(&padded)
            }
            Credence::Rule(r) => match r {
                CredenceRule::Zero | CredenceRule::Const { .. } => Monotonicity::Constant,
                CredenceRule::InvSqrt { scale } | CredenceRule::Geometric { scale, .. } if *scale == 0.0 => {
                    Monotonicity::Constant
                }
                CredenceRule::Geometric { ratio, .. } if *ratio == 1.0 => Monotonicity::Constant,
                CredenceRule::InvSqrt { .. } | CredenceRule::Geometric { .. } => Monotonicity::Nonincreasing,
                CredenceRule::Custom { f, .. } => {
                    let vals: Vec<f64> = (1..=probe.max(2)).map(|n| f(n)).collect();
                    match float_trend(&vals) {
                        m @ Monotonicity::Neither { .. } => m,
                        _ => Monotonicity::Unknown,
                    }
                }
            },
        }
    }

    /// `sum_N c(p_N)` over all propositions.
    pub fn sum(&self) -> SeriesSum {
        match self {
            Credence::Finite { approx, .. } => SeriesSum::Finite(approx.iter().sum()),
            Credence::Rule(r) => match r {
                CredenceRule::Zero => SeriesSum::Finite(0.0),
                CredenceRule::Const { value } | CredenceRule::InvSqrt { scale: value } => {
                    if *value == 0.0 {
                        SeriesSum::Finite(0.0)
                    } else {
                        SeriesSum::Infinite
                    }
                }
                CredenceRule::Geometric { scale, ratio } => {
                    if *scale == 0.0 {
                        SeriesSum::Finite(0.0)
                    } else if *ratio < 1.0 {
                        SeriesSum::Finite(scale * ratio / (1.0 - ratio))
                    } else {
                        SeriesSum::Infinite
                    }
                }
                CredenceRule::Custom { .. } => SeriesSum::Unknown,
            },
        }
    }

    /// `sum_{N > k} c(p_N)`, the mass beyond a truncation.
    pub fn tail_sum(&self, k: usize) -> SeriesSum {
        match self {
            Credence::Finite { approx, .. } => SeriesSum::Finite(approx.iter().skip(k).sum()),
            Credence::Rule(CredenceRule::Geometric { scale, ratio }) if *ratio < 1.0 => {
                SeriesSum::Finite(scale * ratio.powi(k as i32 + 1) / (1.0 - ratio))
            }
            _ => match self.sum() {
                SeriesSum::Finite(_) => SeriesSum::Finite(0.0),
                other => other,
            },
        }
    }
}

fn exact_trend(v: &[Rational]) -> Monotonicity {
    let mut rise = None;
    let mut fall = None;
    for i in 0..v.len().saturating_sub(1) {
        if v[i + 1] > v[i] && rise.is_none() {
            rise = Some((i + 1, i + 2));
        }
        if v[i + 1] < v[i] && fall.is_none() {
            fall = Some((i + 1, i + 2));
        }
    }
    classify(rise, fall)
}

fn float_trend(v: &[f64]) -> Monotonicity {
    let mut rise = None;
    let mut fall = None;
    for i in 0..v.len().saturating_sub(1) {
        if v[i + 1] > v[i] && rise.is_none() {
            rise = Some((i + 1, i + 2));
        }
        if v[i + 1] < v[i] && fall.is_none() {
            fall = Some((i + 1, i + 2));
        }
    }
    classify(rise, fall)
}

fn classify(rise: Option<(usize, usize)>, fall: Option<(usize, usize)>) -> Monotonicity {
    match (rise, fall) {
        (None, None) => Monotonicity::Constant,
        (Some(_), None) => Monotonicity::Nondecreasing,
        (None, Some(_)) => Monotonicity::Nonincreasing,
        (Some(r), Some(f)) => Monotonicity::Neither { rises: r, falls: f },
    }
}
