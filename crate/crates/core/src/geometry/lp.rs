//! Max-min weighting of facet normals:
//!
//! maximize t  s.t.  sum_i alpha_i w_i[j] >= t for every j,  alpha >= 0,  sum alpha = 1.
//!
//! With `M >= max |w_i[j]|` and `u = t + M` this becomes a packing LP with
//! the origin feasible, `max u  s.t.  u - sum_i alpha_i (w_i[j] + M) <= 0,
//! sum alpha <= 1`, solved by a dense tableau simplex with Bland's rule.
//! Since every coefficient `w_i[j] + M` is nonnegative, scaling `alpha` up to
//! the simplex never lowers the objective.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpCertificate {
    pub alpha: Vec<f64>,
    pub t_star: f64,
}

impl LpCertificate {
    /// `sum_i alpha_i w_i`.
    pub fn combined(&self, normals: &[Vec<f64>]) -> Vec<f64> {
        combine(&self.alpha, normals)
    }
}

fn combine(alpha: &[f64], normals: &[Vec<f64>]) -> Vec<f64> {
    let d = normals.first().map_or(0, Vec::len);
    let mut out = vec![0.0; d];
    for (a, w) in alpha.iter().zip(normals) {
        out.iter_mut().zip(w).for_each(|(o, x)| *o += a * x);
    }
    out
}

const PIVOT_EPS: f64 = 1e-12;

/// Maximizes `c.x` subject to `A x <= b`, `x >= 0`, with `b >= 0`.
fn simplex_max(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let m = a.len();
    let n = c.len();
    let width = n + m + 1;
    // rows 0..m constraints, row m objective (reduced costs, negated)
    let mut t = vec![vec![0.0; width]; m + 1];
    for i in 0..m {
        t[i][..n].copy_from_slice(&a[i]);
        t[i][n + i] = 1.0;
        t[i][width - 1] = b[i];
    }
    for j in 0..n {
        t[m][j] = -c[j];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    loop {
        // Bland: lowest-index improving column
        let Some(col) = (0..n + m).find(|&j| t[m][j] < -PIVOT_EPS) else {
            break;
        };
        let mut row: Option<usize> = None;
        for i in 0..m {
            if t[i][col] > PIVOT_EPS {
                let ratio = t[i][width - 1] / t[i][col];
                row = match row {
                    None => Some(i),
                    Some(r) => {
                        let best = t[r][width - 1] / t[r][col];
                        if ratio < best - PIVOT_EPS
                            || ((ratio - best).abs() <= PIVOT_EPS && basis[i] < basis[r])
                        {
                            Some(i)
                        } else {
                            Some(r)
                        }
                    }
                };
            }
        }
        let Some(row) = row else {
            // unbounded; cannot happen for the bounded max-min LP
            break;
        };
        let pivot = t[row][col];
        t[row].iter_mut().for_each(|x| *x /= pivot);
        let pivot_row = t[row].clone();
        for (i, r) in t.iter_mut().enumerate() {
            if i != row && r[col] != 0.0 {
                let factor = r[col];
                r.iter_mut().zip(&pivot_row).for_each(|(x, p)| *x -= factor * p);
            }
        }
        basis[row] = col;
    }

    let mut x = vec![0.0; n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][width - 1].max(0.0);
        }
    }
    x
}

/// Solves the max-min LP over nonnegative, normalized weightings of
/// `normals`. Returns `t_star <= 0` when no weighting is positive in every
/// coordinate.
pub fn pareto_lp(normals: &[Vec<f64>]) -> LpCertificate {
    let n = normals.len();
    if n == 0 {
        return LpCertificate {
            alpha: Vec::new(),
            t_star: f64::NEG_INFINITY,
        };
    }
    let d = normals[0].len();
    let shift = normals
        .iter()
        .flat_map(|w| w.iter())
        .fold(1.0_f64, |m, x| m.max(x.abs()));

    // variables: alpha_0..alpha_{n-1}, u
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut a = Vec::with_capacity(d + 1);
    let mut b = Vec::with_capacity(d + 1);
    for j in 0..d {
        let mut row: Vec<f64> = normals.iter().map(|w| -(w[j] + shift)).collect();
        row.push(1.0);
        a.push(row);
        b.push(0.0);
    }
    let mut simplex_row = vec![1.0; n];
    simplex_row.push(0.0);
    a.push(simplex_row);
    b.push(1.0);

    let x = simplex_max(&c, &a, &b);
    let mut alpha: Vec<f64> = x[..n].to_vec();
    let total: f64 = alpha.iter().sum();
    if total > 0.0 {
        alpha.iter_mut().for_each(|v| *v /= total);
    } else {
        alpha = vec![1.0 / n as f64; n];
    }
    let t_star = combine(&alpha, normals)
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    LpCertificate { alpha, t_star }
}

/// A face is Pareto optimal iff some nonnegative combination of its normal
/// cone generators is strictly positive in every coordinate.
pub fn is_pareto_face(normals: &[Vec<f64>], eps_pos: f64) -> bool {
    pareto_lp(normals).t_star > eps_pos
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit(v: &[f64]) -> Vec<f64> {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter().map(|x| x / n).collect()
    }

    fn check_certificate(normals: &[Vec<f64>], cert: &LpCertificate) {
        assert!(cert.alpha.iter().all(|&a| a >= 0.0));
        assert!((cert.alpha.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        let min = cert.combined(normals).into_iter().fold(f64::INFINITY, f64::min);
        assert!((min - cert.t_star).abs() < 1e-9);
    }

    #[test]
    fn single_positive_normal() {
        let w = vec![unit(&[1.0, 1.0, 1.0])];
        let cert = pareto_lp(&w);
        assert!((cert.t_star - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!(is_pareto_face(&w, 1e-9));
        check_certificate(&w, &cert);
    }

    #[test]
    fn forced_zero_coordinate() {
        let w = vec![vec![1.0, -1.0, 0.0], vec![-1.0, 1.0, 0.0]];
        let cert = pareto_lp(&w);
        assert!(cert.t_star <= 0.0);
        assert!(!is_pareto_face(&w, 1e-9));
        check_certificate(&w, &cert);
    }

    #[test]
    fn mixed_normals() {
        let w = vec![vec![1.0, -0.5], vec![-0.5, 1.0]];
        let cert = pareto_lp(&w);
        assert!(cert.t_star >= 0.25 - 1e-12);
        check_certificate(&w, &cert);
        let axes = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!(is_pareto_face(&axes, 1e-9));
        let cert = pareto_lp(&axes);
        assert!((cert.alpha[0] - 0.5).abs() < 1e-12);
    }

    /// Bounds the game value from both sides by grid search: the primal grid
    /// over alpha gives a lower bound, the dual grid over coordinate weights
    /// an upper bound.
    fn grid_bounds(normals: &[Vec<f64>], steps: usize) -> (f64, f64) {
        fn compositions(dim: usize, total: usize) -> Vec<Vec<usize>> {
            if dim == 1 {
                return vec![vec![total]];
            }
            (0..=total)
                .flat_map(|k| {
                    compositions(dim - 1, total - k).into_iter().map(move |mut rest| {
                        rest.insert(0, k);
                        rest
                    })
                })
                .collect()
        }
        fn simplex_grid(dim: usize, steps: usize) -> Vec<Vec<f64>> {
            compositions(dim, steps)
                .into_iter()
                .map(|c| c.into_iter().map(|k| k as f64 / steps as f64).collect())
                .collect()
        }
        let n = normals.len();
        let d = normals[0].len();
        let lower = simplex_grid(n, steps)
            .iter()
            .map(|a| combine(a, normals).into_iter().fold(f64::INFINITY, f64::min))
            .fold(f64::NEG_INFINITY, f64::max);
        let upper = simplex_grid(d, steps)
            .iter()
            .map(|y| {
                normals
                    .iter()
                    .map(|w| w.iter().zip(y).map(|(a, b)| a * b).sum::<f64>())
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .fold(f64::INFINITY, f64::min);
        (lower, upper)
    }

    #[test]
    fn matches_grid_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let n = rng.random_range(1..4);
            let normals: Vec<Vec<f64>> = (0..n)
                .map(|_| unit(&(0..3).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect::<Vec<_>>()))
                .collect();
            let cert = pareto_lp(&normals);
            check_certificate(&normals, &cert);
            let (lo, hi) = grid_bounds(&normals, 60);
            assert!(cert.t_star >= lo - 1e-12, "{} < {lo}", cert.t_star);
            assert!(cert.t_star <= hi + 1e-12, "{} > {hi}", cert.t_star);
        }
    }
}
