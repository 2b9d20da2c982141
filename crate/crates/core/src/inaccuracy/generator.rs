//! Strictly convex generators `φ` on `[0,1]` and their one-dimensional
//! Bregman divergences `𝔡(x,y) = φ(x) - φ(y) - φ'(y)(x - y)`.

use serde::Serialize;

use crate::error::{invalid_arg, Result};
use crate::scalar::{Rational, Scalar};

use super::ExtReal;

#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorKind {
    /// `φ(x) = x²`.
    Quadratic,
    /// `φ(x) = x ln x + (1-x) ln(1-x)`; `φ'` is unbounded at both endpoints.
    ShiftedEntropy,
    /// `φ(0) = 0` and `φ'` piecewise linear through `slopes[k]` at `x = k/n`
    /// (`n = slopes.len() - 1`). Strictly increasing slopes make `φ` strictly
    /// convex; values are exact for rational arguments.
    Tabulated { slopes: Vec<Rational> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvexGenerator {
    kind: GeneratorKind,
    slopes_f: Vec<f64>,
    /// `φ` is the base function plus `shift.0 + shift.1 * x`.
    shift: (Rational, Rational),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DerivativeBounds {
    pub at_zero: f64,
    pub at_one: f64,
}

impl ConvexGenerator {
    pub fn quadratic() -> Self {
        Self::from_kind(GeneratorKind::Quadratic)
    }

    pub fn shifted_entropy() -> Self {
        Self::from_kind(GeneratorKind::ShiftedEntropy)
    }

    pub fn tabulated(slopes: Vec<Rational>) -> Result<Self> {
        if slopes.len() < 2 {
            return invalid_arg("a tabulated generator needs at least two slopes");
        }
        if slopes.windows(2).any(|w| w[0] >= w[1]) {
            return invalid_arg("tabulated slopes must be strictly increasing");
        }
        Ok(Self::from_kind(GeneratorKind::Tabulated { slopes }))
    }

    /// A fixed non-quadratic generator: slopes `0, 1, 3, 6, 10` at quarters,
    /// so `φ''` steps through `4, 8, 12, 16`.
    pub fn tabulated_default() -> Self {
        let s = [0, 1, 3, 6, 10].iter().map(|v| Rational::from_i64(*v)).collect();
        Self::tabulated(s).expect("valid slopes")
    }

    fn from_kind(kind: GeneratorKind) -> Self {
        let slopes_f = match &kind {
            GeneratorKind::Tabulated { slopes } => slopes.iter().map(Scalar::to_f64).collect(),
            _ => Vec::new(),
        };
        ConvexGenerator { kind, slopes_f, shift: (Rational::zero(), Rational::zero()) }
    }

    /// Adds the affine function `a + b x`; divergences are unchanged.
    pub fn with_linear_shift(mut self, a: Rational, b: Rational) -> Self {
        self.shift = (&self.shift.0 + a, &self.shift.1 + b);
        self
    }

    /// `(a, b)` in the added affine term `a + b x`.
    pub fn shift(&self) -> (&Rational, &Rational) {
        (&self.shift.0, &self.shift.1)
    }

    pub fn kind(&self) -> &GeneratorKind {
        &self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            GeneratorKind::Quadratic => "quadratic",
            GeneratorKind::ShiftedEntropy => "shifted_entropy",
            GeneratorKind::Tabulated { .. } => "tabulated",
        }
    }

    /// Whether `φ`, `φ'` and `𝔡` can be evaluated exactly at rationals.
    pub fn is_exact(&self) -> bool {
        !matches!(self.kind, GeneratorKind::ShiftedEntropy)
    }

    fn base_phi(&self, x: f64) -> f64 {
        match &self.kind {
            GeneratorKind::Quadratic => x * x,
            GeneratorKind::ShiftedEntropy => xlnx(x) + xlnx(1.0 - x),
            GeneratorKind::Tabulated { .. } => {
                let s = &self.slopes_f;
                let n = (s.len() - 1) as f64;
                let (k, t) = segment(x, s.len() - 1);
                let prefix: f64 = (0..k).map(|j| (s[j] + s[j + 1]) / (2.0 * n)).sum();
                prefix + s[k] * t + (s[k + 1] - s[k]) * n * t * t / 2.0
            }
        }
    }

    fn base_dphi(&self, x: f64) -> f64 {
        match &self.kind {
            GeneratorKind::Quadratic => 2.0 * x,
            GeneratorKind::ShiftedEntropy => {
                if x <= 0.0 {
                    f64::NEG_INFINITY
                } else if x >= 1.0 {
                    f64::INFINITY
                } else {
                    (x / (1.0 - x)).ln()
                }
            }
            GeneratorKind::Tabulated { .. } => {
                let s = &self.slopes_f;
                let n = (s.len() - 1) as f64;
                let (k, t) = segment(x, s.len() - 1);
                s[k] + (s[k + 1] - s[k]) * n * t
            }
        }
    }

    pub fn phi(&self, x: f64) -> f64 {
        self.base_phi(x) + self.shift.0.to_f64() + self.shift.1.to_f64() * x
    }

    /// `φ'(x)`, with the one-sided limits (possibly infinite) at the endpoints.
    pub fn dphi(&self, x: f64) -> f64 {
        self.base_dphi(x) + self.shift.1.to_f64()
    }

    fn base_phi_exact(&self, x: &Rational) -> Option<Rational> {
        match &self.kind {
            GeneratorKind::Quadratic => Some(x * x),
            GeneratorKind::ShiftedEntropy => None,
            GeneratorKind::Tabulated { slopes } => {
                let n = slopes.len() - 1;
                let nr = Rational::from_i64(n as i64);
                let (k, t) = segment_exact(x, n);
                let two = Rational::from_i64(2);
                let mut acc = Rational::zero();
                for j in 0..k {
                    acc += (&slopes[j] + &slopes[j + 1]) / (&two * &nr);
                }
                Some(acc + &slopes[k] * &t + (&slopes[k + 1] - &slopes[k]) * &nr * &t * &t / two)
            }
        }
    }

    fn base_dphi_exact(&self, x: &Rational) -> Option<Rational> {
        match &self.kind {
            GeneratorKind::Quadratic => Some(Rational::from_i64(2) * x),
            GeneratorKind::ShiftedEntropy => None,
            GeneratorKind::Tabulated { slopes } => {
                let n = slopes.len() - 1;
                let (k, t) = segment_exact(x, n);
                Some(&slopes[k] + (&slopes[k + 1] - &slopes[k]) * Rational::from_i64(n as i64) * t)
            }
        }
    }

    pub fn phi_exact(&self, x: &Rational) -> Option<Rational> {
        self.base_phi_exact(x).map(|v| v + &self.shift.0 + &self.shift.1 * x)
    }

    pub fn dphi_exact(&self, x: &Rational) -> Option<Rational> {
        self.base_dphi_exact(x).map(|v| v + &self.shift.1)
    }

    pub fn derivative_bounds(&self) -> DerivativeBounds {
        DerivativeBounds { at_zero: self.dphi(0.0), at_one: self.dphi(1.0) }
    }

    pub fn has_finite_derivatives(&self) -> bool {
        let b = self.derivative_bounds();
        b.at_zero.is_finite() && b.at_one.is_finite()
    }

    /// `φ(0) = φ'(0) = 0`.
    pub fn is_normalized(&self) -> bool {
        match (self.phi_exact(&Rational::zero()), self.dphi_exact(&Rational::zero())) {
            (Some(a), Some(b)) => a == Rational::zero() && b == Rational::zero(),
            _ => false,
        }
    }

    /// The same divergence with `φ(0) = φ'(0) = 0`.
    pub fn normalized(&self) -> Result<Self> {
        let zero = Rational::zero();
        match (self.phi_exact(&zero), self.dphi_exact(&zero)) {
            (Some(a), Some(b)) => Ok(self.clone().with_linear_shift(-a, -b)),
            _ => invalid_arg(format!("{} has an infinite derivative at 0 and cannot be normalized", self.name())),
        }
    }

    /// Infimum and supremum of `φ''` on `(0,1)`.
    pub fn curvature_bounds(&self) -> (f64, f64) {
        match &self.kind {
            GeneratorKind::Quadratic => (2.0, 2.0),
            GeneratorKind::ShiftedEntropy => (4.0, f64::INFINITY),
            GeneratorKind::Tabulated { .. } => {
                let s = &self.slopes_f;
                let n = (s.len() - 1) as f64;
                let k = s.windows(2).map(|w| (w[1] - w[0]) * n);
                let lo = k.clone().fold(f64::INFINITY, f64::min);
                (lo, k.fold(0.0, f64::max))
            }
        }
    }

    /// `𝔡(x,y)` in floating point; `+∞` when `φ'(y)` is infinite and `x != y`.
    pub fn divergence(&self, x: f64, y: f64) -> ExtReal {
        if x == y {
            return ExtReal::Finite(0.0);
        }
        match &self.kind {
            GeneratorKind::ShiftedEntropy => {
                if y <= 0.0 || y >= 1.0 {
                    return ExtReal::PosInf;
                }
                // Bernoulli relative entropy, the same quantity without cancellation
                let a = if x > 0.0 { x * (x / y).ln() } else { 0.0 };
                let b = if x < 1.0 { (1.0 - x) * ((1.0 - x) / (1.0 - y)).ln() } else { 0.0 };
                ExtReal::Finite((a + b).max(0.0))
            }
            GeneratorKind::Quadratic => ExtReal::Finite((x - y) * (x - y)),
            GeneratorKind::Tabulated { .. } => {
                let d = self.base_phi(x) - self.base_phi(y) - self.base_dphi(y) * (x - y);
                ExtReal::Finite(d.max(0.0))
            }
        }
    }

    pub fn divergence_exact(&self, x: &Rational, y: &Rational) -> Option<Rational> {
        if x == y {
            return Some(Rational::zero());
        }
        match &self.kind {
            GeneratorKind::Quadratic => Some((x - y) * (x - y)),
            GeneratorKind::ShiftedEntropy => None,
            GeneratorKind::Tabulated { .. } => {
                Some(self.base_phi_exact(x)? - self.base_phi_exact(y)? - self.base_dphi_exact(y)? * (x - y))
            }
        }
    }

    /// `max(𝔡(1,0), 𝔡(0,1))`, the largest value a term can take at a truth value.
    pub fn sup_divergence(&self) -> ExtReal {
        self.divergence(1.0, 0.0).max(self.divergence(0.0, 1.0))
    }
}

fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Segment index `k` with `x ∈ [k/n, (k+1)/n]` and offset `t = x - k/n`.
fn segment(x: f64, n: usize) -> (usize, f64) {
    let k = ((x * n as f64).floor() as usize).min(n - 1);
    (k, x - k as f64 / n as f64)
}

fn segment_exact(x: &Rational, n: usize) -> (usize, Rational) {
    let scaled = x * Rational::from_i64(n as i64);
    let k = scaled.floor().to_integer();
    let k: usize = k.try_into().unwrap_or(0).min(n - 1);
    (k, x - Rational::from_i64(k as i64) / Rational::from_i64(n as i64))
}
