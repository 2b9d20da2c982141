//! Tarski's partial-measure conditions as an independent coherence oracle.
//!
//! Tuples range over `F ∪ {W}` (index 0 is `W`, with value 1). A tuple
//! `(φ_0..φ_{m-1})` is included in `(ψ_0..ψ_{n-1})` when, for every `k < m`,
//! the worlds lying in at least `k+1` of the `φ`s also lie in at least `k+1`
//! of the `ψ`s. Per world this is `#φ(w) <= #ψ(w)`, which is what is tested.

use serde::Serialize;

use crate::credence::Credence;
use crate::error::{invalid_arg, Result};
use crate::opinion_space::{require_explicit, OpinionSpace};
use crate::scalar::Rational;

pub const MAX_TUPLE_LEN: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartialMeasureViolation {
    /// Proposition ids; `0` denotes the whole world set.
    pub phis: Vec<usize>,
    pub psis: Vec<usize>,
    #[serde(skip)]
    pub lhs_sum: Rational,
    #[serde(skip)]
    pub rhs_sum: Rational,
}

/// Nondecreasing tuples of `0..n_items` with length `1..=max_len`.
pub(crate) fn multisets(n_items: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if left == 0 {
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i, n, left - 1, cur, out);
            cur.pop();
        }
    }
    go(0, n_items, max_len, &mut cur, &mut out);
    out
}

/// The inclusion structure of a space, reusable across credences.
///
/// Which tuple pairs are included in one another depends only on the space;
/// a credence is then checked by comparing tuple sums.
#[derive(Clone, Debug)]
pub struct PartialMeasureOracle {
    n_props: usize,
    tuples: Vec<Vec<usize>>,
    /// `(a, b)` with tuple `a` included in tuple `b`, `a != b`.
    inclusions: Vec<(usize, usize)>,
}

impl PartialMeasureOracle {
    pub fn new(space: &OpinionSpace, max_tuple_len: usize) -> Result<Self> {
        if max_tuple_len == 0 || max_tuple_len > MAX_TUPLE_LEN {
            return invalid_arg(format!("tuple length must lie in 1..={MAX_TUPLE_LEN}, got {max_tuple_len}"));
        }
        let e = require_explicit(space)?;
        let n = e.propositions().len();
        // membership[item][world]; item 0 is W
        let worlds = e.worlds();
        let mut membership = vec![vec![true; worlds.len()]];
        for p in e.propositions() {
            membership.push(worlds.iter().map(|w| p.contains(w)).collect());
        }
        let tuples = multisets(n + 1, max_tuple_len);
        let counts: Vec<Vec<u32>> = tuples
            .iter()
            .map(|t| (0..worlds.len()).map(|w| t.iter().filter(|&&i| membership[i][w]).count() as u32).collect())
            .collect();
        let mut inclusions = Vec::new();
        for (a, ca) in counts.iter().enumerate() {
            for (b, cb) in counts.iter().enumerate() {
                if a != b && ca.iter().zip(cb).all(|(x, y)| x <= y) {
                    inclusions.push((a, b));
                }
            }
        }
        Ok(PartialMeasureOracle { n_props: n, tuples, inclusions })
    }

    /// Violations by `c`, in tuple order.
    pub fn violations(&self, c: &Credence) -> Result<Vec<PartialMeasureViolation>> {
        let sums = self.sums(c)?;
        Ok(self
            .inclusions
            .iter()
            .filter(|(a, b)| sums[*a] > sums[*b])
            .map(|&(a, b)| PartialMeasureViolation {
                phis: self.tuples[a].clone(),
                psis: self.tuples[b].clone(),
                lhs_sum: sums[a].clone(),
                rhs_sum: sums[b].clone(),
            })
            .collect())
    }

    /// Whether `c` satisfies every inequality; stops at the first violation.
    pub fn holds(&self, c: &Credence) -> Result<bool> {
        let values = self.values(c)?;
        if let Some(scaled) = common_denominator(&values) {
            let sums: Vec<i64> = self.tuples.iter().map(|t| t.iter().map(|&i| scaled[i]).sum()).collect();
            return Ok(self.inclusions.iter().all(|(a, b)| sums[*a] <= sums[*b]));
        }
        let sums = self.sums(c)?;
        Ok(self.inclusions.iter().all(|(a, b)| sums[*a] <= sums[*b]))
    }

    fn values(&self, c: &Credence) -> Result<Vec<Rational>> {
        let mut value = vec![Rational::from_integer(1.into())];
        value.extend(super::finite_exact_values(c, self.n_props)?);
        Ok(value)
    }

    fn sums(&self, c: &Credence) -> Result<Vec<Rational>> {
        let value = self.values(c)?;
        Ok(self.tuples.iter().map(|t| t.iter().map(|&i| value[i].clone()).sum()).collect())
    }
}

/// The values as integers over one common denominator, when that fits in `i64`
/// with room for tuple sums.
fn common_denominator(values: &[Rational]) -> Option<Vec<i64>> {
    let mut dens: Vec<i64> = values.iter().map(|v| v.denom().try_into().ok()).collect::<Option<_>>()?;
    dens.sort_unstable();
    dens.dedup();
    let d = dens.iter().try_fold(1i64, |acc, x| acc.checked_mul(*x))?;
    if d > i64::MAX / (4 * MAX_TUPLE_LEN as i64) {
        return None;
    }
    values
        .iter()
        .map(|v| {
            let num: i64 = v.numer().try_into().ok()?;
            let den: i64 = v.denom().try_into().ok()?;
            num.checked_mul(d / den)
        })
        .collect()
}

/// All violations of the partial-measure inequality among tuples of length at
/// most `max_tuple_len`. An empty result at length `|F| + 1` means `c`
/// extends to a finitely additive probability.
pub fn check_partial_measure(
    c: &Credence,
    space: &OpinionSpace,
    max_tuple_len: usize,
) -> Result<Vec<PartialMeasureViolation>> {
    PartialMeasureOracle::new(space, max_tuple_len)?.violations(c)
}
