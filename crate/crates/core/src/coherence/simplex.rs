//! Phase-one simplex for `A x = b, x >= 0` feasibility.
//!
//! Bland's rule keeps the exact instantiation finite. On infeasibility the
//! final simplex multipliers give `y` with `yᵀA <= 0` column-wise and
//! `yᵀb > 0`, a Farkas certificate.

use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub enum Feasibility<T> {
    Feasible { x: Vec<T>, infeasibility: T },
    Infeasible { dual: Vec<T>, infeasibility: T },
}

pub fn phase_one<T: Scalar>(a: &[Vec<T>], b: &[T], accept: &T) -> Feasibility<T> {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let width = n + m + 1;
    let rhs = n + m;

    let mut sign = vec![T::one(); m];
    let mut t: Vec<Vec<T>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        if b[i].is_negative_strict() {
            sign[i] = T::one().neg();
        }
        let mut row = vec![T::zero(); width];
        for j in 0..n {
            row[j] = a[i][j].mul(&sign[i]);
        }
        row[n + i] = T::one();
        row[rhs] = b[i].mul(&sign[i]);
        t.push(row);
    }
    // reduced costs: artificials cost 1, originals 0
    let mut r = vec![T::zero(); width];
    for j in 0..n {
        let mut s = T::zero();
        for row in &t {
            s = s.add(&row[j]);
        }
        r[j] = s.neg();
    }
    let mut total = T::zero();
    for row in &t {
        total = total.add(&row[rhs]);
    }
    r[rhs] = total.neg();
    t.push(r);

    let mut basis: Vec<usize> = (n..n + m).collect();
    let cap = 200 * (n + m) + 1000;
    for _ in 0..cap {
        let obj = &t[m];
        let Some(enter) = (0..n + m).find(|&j| obj[j].lt_neg_eps()) else { break };
        let mut leave: Option<(usize, T)> = None;
        for i in 0..m {
            if !t[i][enter].gt_eps() {
                continue;
            }
            let ratio = t[i][rhs].div(&t[i][enter]);
            let better = match &leave {
                None => true,
                Some((li, lr)) => match ratio.to_cmp(lr) {
                    std::cmp::Ordering::Less => true,
                    std::cmp::Ordering::Equal => basis[i] < basis[*li],
                    std::cmp::Ordering::Greater => false,
                },
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((p, _)) = leave else { break };
        pivot(&mut t, p, enter);
        basis[p] = enter;
    }

    let infeasibility = t[m][rhs].neg();
    if infeasibility.to_cmp(accept) != std::cmp::Ordering::Greater {
        let mut x = vec![T::zero(); n];
        for (i, &j) in basis.iter().enumerate() {
            if j < n {
                x[j] = t[i][rhs].clone();
            }
        }
        Feasibility::Feasible { x, infeasibility }
    } else {
        let dual = (0..m).map(|i| T::one().sub(&t[m][n + i]).mul(&sign[i])).collect();
        Feasibility::Infeasible { dual, infeasibility }
    }
}

fn pivot<T: Scalar>(t: &mut [Vec<T>], p: usize, q: usize) {
    let piv = t[p][q].clone();
    for v in t[p].iter_mut() {
        *v = v.div(&piv);
    }
    let prow = t[p].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == p || row[q] == T::zero() {
            continue;
        }
        let f = row[q].clone();
        for (v, pv) in row.iter_mut().zip(&prow) {
            if *pv != T::zero() {
                *v = v.sub(&f.mul(pv));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, Rational};

    fn q(n: i64) -> Rational {
        rational(n, 1)
    }

    #[test]
    fn finds_point_on_segment() {
        // x1 + x2 = 1, x1 = 3/10
        let a = vec![vec![q(1), q(0)], vec![q(1), q(1)]];
        let b = vec![rational(3, 10), q(1)];
        match phase_one(&a, &b, &Rational::from_i64(0)) {
            Feasibility::Feasible { x, .. } => assert_eq!(x, vec![rational(3, 10), rational(7, 10)]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_system_yields_farkas_certificate() {
        // points (1,0),(0,1); target (3/5, 1/2)
        let a = vec![vec![q(1), q(0)], vec![q(0), q(1)], vec![q(1), q(1)]];
        let b = vec![rational(3, 5), rational(1, 2), q(1)];
        match phase_one(&a, &b, &Rational::from_i64(0)) {
            Feasibility::Infeasible { dual, .. } => {
                for j in 0..2 {
                    let col: Rational = (0..3).map(|i| &dual[i] * &a[i][j]).sum();
                    assert!(col <= q(0));
                }
                let yb: Rational = (0..3).map(|i| &dual[i] * &b[i]).sum();
                assert!(yb > q(0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn float_path_agrees() {
        let a = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        assert!(matches!(phase_one(&a, &[0.6, 0.5, 1.0], &1e-9), Feasibility::Infeasible { .. }));
        assert!(matches!(phase_one(&a, &[0.6, 0.4, 1.0], &1e-9), Feasibility::Feasible { .. }));
    }
}
