//! Minimisers of `𝔇(s, c)` over the hull of valuation rows, in λ coordinates.

use crate::scalar::Scalar;

/// Outcome of an iterative solver in λ coordinates.
#[derive(Clone, Debug)]
pub(crate) struct Solved<T> {
    pub lambda: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
    /// Objective decrease achieved by the last step.
    pub final_decrease: f64,
    /// Frank-Wolfe duality gap at the returned point (zero for exact solves).
    pub fw_gap: f64,
}

fn inner<T: Scalar>(a: &[T], x: &[T], y: &[T]) -> T {
    let mut s = T::zero();
    for i in 0..a.len() {
        s = s.add(&a[i].mul(&x[i]).mul(&y[i]));
    }
    s
}

/// Solves `[G 1; 1ᵀ 0] [μ; ν] = [0; 1]`, the affine min-norm combination.
fn affine_min<T: Scalar>(gram: &[Vec<T>]) -> Option<Vec<T>> {
    let k = gram.len();
    let mut m: Vec<Vec<T>> = (0..=k)
        .map(|i| {
            let mut row = Vec::with_capacity(k + 2);
            for j in 0..=k {
                row.push(match (i < k, j < k) {
                    (true, true) => gram[i][j].clone(),
                    (false, false) => T::zero(),
                    _ => T::one(),
                });
            }
            row.push(if i == k { T::one() } else { T::zero() });
            row
        })
        .collect();
    let size = k + 1;
    for col in 0..size {
        let pivot = if T::is_exact() {
            (col..size).find(|&r| m[r][col] != T::zero())?
        } else {
            let p = (col..size).max_by(|&a, &b| m[a][col].abs().to_cmp(&m[b][col].abs()))?;
            if m[p][col].abs().to_f64() < 1e-14 {
                return None;
            }
            p
        };
        m.swap(col, pivot);
        let pv = m[col][col].clone();
        for v in m[col].iter_mut() {
            *v = v.div(&pv);
        }
        let prow = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != col && row[col] != T::zero() {
                let f = row[col].clone();
                for (v, p) in row.iter_mut().zip(&prow) {
                    *v = v.sub(&f.mul(p));
                }
            }
        }
    }
    Some((0..k).map(|i| m[i][size].clone()).collect())
}

/// Wolfe's minimum-norm-point algorithm in the inner product `Σ a_i x_i y_i`.
/// Exact for rational scalars; `points` are the rows shifted by `-c`.
pub(crate) fn wolfe<T: Scalar>(points: &[Vec<T>], a: &[T], max_iter: usize) -> Solved<T> {
    let n_pts = points.len();
    let norms: Vec<T> = points.iter().map(|p| inner(a, p, p)).collect();
    let start = (0..n_pts).min_by(|&i, &j| norms[i].to_cmp(&norms[j])).expect("at least one atom");
    let mut set = vec![start];
    let mut lam = vec![T::one()];
    let dim = a.len();
    let combine = |set: &[usize], lam: &[T]| -> Vec<T> {
        let mut x = vec![T::zero(); dim];
        for (k, &j) in set.iter().enumerate() {
            for i in 0..dim {
                x[i] = x[i].add(&lam[k].mul(&points[j][i]));
            }
        }
        x
    };
    let mut x = points[start].clone();
    let mut iterations = 0;
    let mut converged = false;
    let mut last = inner(a, &x, &x).to_f64();
    let mut final_decrease = 0.0;
    while iterations < max_iter {
        iterations += 1;
        let xx = inner(a, &x, &x);
        let dots: Vec<T> = points.iter().map(|p| inner(a, &x, p)).collect();
        let j = (0..n_pts).min_by(|&i, &k| dots[i].to_cmp(&dots[k])).expect("nonempty");
        // optimal iff <x, q_j - x> >= 0 for every point
        let slack = dots[j].sub(&xx);
        let tol = T::eps();
        if !slack.add(&tol).is_negative_strict() || set.contains(&j) {
            converged = true;
            break;
        }
        set.push(j);
        lam.push(T::zero());
        loop {
            let gram: Vec<Vec<T>> =
                set.iter().map(|&p| set.iter().map(|&q| inner(a, &points[p], &points[q])).collect()).collect();
            let Some(mu) = affine_min(&gram) else {
                // affinely dependent corral (rounding only): keep the current point
                set.pop();
                lam.pop();
                return Solved { lambda: scatter(n_pts, &set, &lam), iterations, converged: true, final_decrease, fw_gap: 0.0 };
            };
            let positive = |v: &T| if T::is_exact() { !v.is_negative_strict() && *v != T::zero() } else { v.gt_eps() };
            if mu.iter().all(positive) {
                lam = mu;
                break;
            }
            let mut theta: Option<T> = None;
            for k in 0..set.len() {
                if !positive(&mu[k]) {
                    let t = lam[k].div(&lam[k].sub(&mu[k]));
                    if theta.as_ref().is_none_or(|th| t.to_cmp(th) == std::cmp::Ordering::Less) {
                        theta = Some(t);
                    }
                }
            }
            let theta = theta.expect("some coefficient is nonpositive");
            for k in 0..set.len() {
                lam[k] = lam[k].add(&theta.mul(&mu[k].sub(&lam[k])));
            }
            let mut k = 0;
            let mut removed = false;
            while k < set.len() {
                let zero = if T::is_exact() { lam[k] == T::zero() } else { !lam[k].gt_eps() };
                if zero {
                    set.remove(k);
                    lam.remove(k);
                    removed = true;
                } else {
                    k += 1;
                }
            }
            if !removed {
                // rounding left every weight positive: drop the smallest
                let k = (0..lam.len()).min_by(|&i, &j| lam[i].to_cmp(&lam[j])).expect("nonempty");
                set.remove(k);
                lam.remove(k);
            }
            let s = lam.iter().fold(T::zero(), |acc, v| acc.add(v));
            lam = lam.iter().map(|v| v.div(&s)).collect();
        }
        x = combine(&set, &lam);
        let now = inner(a, &x, &x).to_f64();
        final_decrease = last - now;
        last = now;
    }
    Solved { lambda: scatter(n_pts, &set, &lam), iterations, converged, final_decrease, fw_gap: 0.0 }
}

fn scatter<T: Scalar>(n: usize, set: &[usize], lam: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); n];
    for (k, &j) in set.iter().enumerate() {
        out[j] = lam[k].clone();
    }
    out
}

/// Objective pieces for a separable Bregman projection in floating point.
pub(crate) struct Separable<'a> {
    pub rows: &'a [Vec<f64>],
    pub a: &'a [f64],
    pub c: &'a [f64],
    pub dphi: &'a dyn Fn(f64) -> f64,
    pub objective: &'a dyn Fn(&[f64]) -> f64,
}

/// Pairwise Frank-Wolfe with exact line search (bisection on the directional
/// derivative). Stops once the Frank-Wolfe gap is at most `tol`.
pub(crate) fn pairwise_frank_wolfe(p: &Separable<'_>, start: usize, tol: f64, max_iter: usize) -> Solved<f64> {
    let n_pts = p.rows.len();
    let dim = p.a.len();
    let dc: Vec<f64> = p.c.iter().map(|&x| (p.dphi)(x)).collect();
    let mut lam = vec![0.0; n_pts];
    lam[start] = 1.0;
    let mut s = p.rows[start].clone();
    let mut f = (p.objective)(&s);
    let mut iterations = 0;
    let mut converged = false;
    let mut final_decrease = 0.0;
    let mut fw_gap = f64::INFINITY;
    while iterations < max_iter {
        iterations += 1;
        let g: Vec<f64> = (0..dim).map(|i| p.a[i] * ((p.dphi)(s[i]) - dc[i])).collect();
        let gs: f64 = g.iter().zip(&s).map(|(x, y)| x * y).sum();
        let dots: Vec<f64> = p.rows.iter().map(|r| g.iter().zip(r).map(|(x, y)| x * y).sum()).collect();
        let t = (0..n_pts).min_by(|&i, &j| dots[i].total_cmp(&dots[j])).expect("nonempty");
        fw_gap = gs - dots[t];
        if fw_gap <= tol {
            converged = true;
            break;
        }
        let u = (0..n_pts)
            .filter(|&w| lam[w] > 0.0)
            .max_by(|&i, &j| dots[i].total_cmp(&dots[j]))
            .expect("active atom");
        if u == t {
            converged = fw_gap <= tol;
            break;
        }
        let d: Vec<f64> = (0..dim).map(|i| p.rows[t][i] - p.rows[u][i]).collect();
        let gmax = lam[u];
        let slope = |gamma: f64| -> f64 {
            (0..dim)
                .filter(|&i| d[i] != 0.0)
                .map(|i| p.a[i] * ((p.dphi)(s[i] + gamma * d[i]) - dc[i]) * d[i])
                .sum()
        };
        let gamma = if slope(gmax) <= 0.0 {
            gmax
        } else {
            let (mut lo, mut hi) = (0.0, gmax);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if slope(mid) <= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        if gamma <= 0.0 {
            break;
        }
        lam[t] += gamma;
        lam[u] = if gamma == gmax { 0.0 } else { lam[u] - gamma };
        for i in 0..dim {
            s[i] += gamma * d[i];
        }
        let nf = (p.objective)(&s);
        final_decrease = f - nf;
        f = nf;
    }
    Solved { lambda: lam, iterations, converged, final_decrease, fw_gap }
}
