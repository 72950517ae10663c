//! Leading algebraic eigenvalues of a sparse adjacency matrix by Lanczos
//! iteration with full reorthogonalisation.
//!
//! Used where only `λ₁` and `λ₂` are needed (second-eigenvalue sweeps at
//! sizes where a dense solve is out of reach). Energies always go through the
//! dense path.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dense::{symmetric_eigenvalues, tridiagonal_eigen};
use crate::error::{Error, Result};
use crate::graph_gen::Adjacency;
use crate::seed::{derive_seed, rng_from_seed, STREAM_LANCZOS};

/// Below this size the dense solver is cheaper and exact.
const DENSE_CUTOFF: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LanczosConfig {
    /// Krylov dimension cap; 0 means `n`.
    pub max_iter: usize,
    /// Converged when every wanted Ritz residual is below `tol · max(1, |θ₁|)`.
    pub tol: f64,
    pub check_every: usize,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        LanczosConfig {
            max_iter: 0,
            tol: 1e-9,
            check_every: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeadingEigenvalues {
    /// Largest `count` eigenvalues, descending.
    pub values: Vec<f64>,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, w);
            axpy(-c, q, w);
        }
    }
}

/// Largest `count` algebraic eigenvalues of `adj`.
///
/// The start vector is drawn from a stream derived from `seed`, so results
/// are reproducible. Exact eigenvalue multiplicities among the wanted values
/// are resolved through restarts after invariant-subspace breakdowns.
pub fn leading_eigenvalues(
    adj: &Adjacency,
    count: usize,
    seed: u64,
    cfg: &LanczosConfig,
) -> Result<LeadingEigenvalues> {
    let n = adj.n();
    let count = count.min(n);
    if count == 0 {
        return Ok(LeadingEigenvalues {
            values: Vec::new(),
            iterations: 0,
        });
    }
    let fail = |reason: String| Error::Eigensolver { seed, reason };

    if n <= DENSE_CUTOFF {
        let mut a = adj.to_dense();
        let w = symmetric_eigenvalues(&mut a, n).map_err(|info| fail(format!("dsyev info={info}")))?;
        return Ok(LeadingEigenvalues {
            values: w.iter().rev().take(count).copied().collect(),
            iterations: n,
        });
    }

    let max_iter = if cfg.max_iter == 0 { n } else { cfg.max_iter.min(n) };
    let check_every = cfg.check_every.max(1);
    let mut rng = rng_from_seed(derive_seed(seed, &[STREAM_LANCZOS]));
    let mut random_unit = |basis: &[Vec<f64>]| -> Option<Vec<f64>> {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        orthogonalize(&mut v, basis);
        let norm = dot(&v, &v).sqrt();
        (norm > 1e-8).then(|| v.iter().map(|x| x / norm).collect())
    };

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut current = random_unit(&basis).ok_or_else(|| fail("degenerate start vector".into()))?;
    let mut w = vec![0.0; n];
    let mut scale = 1.0f64;

    loop {
        adj.mul_vec(&current, &mut w);
        let a = dot(&current, &w);
        alpha.push(a);
        basis.push(current);
        // w already contains A q; full reorthogonalisation removes every
        // component along the basis, including α q and β q_prev.
        orthogonalize(&mut w, &basis);
        let b = dot(&w, &w).sqrt();
        scale = scale.max(a.abs()).max(b);
        let m = basis.len();
        let breakdown = b <= 1e-10 * scale;

        if m == n {
            // T is now similar to A.
            let (theta, _) = tridiagonal_eigen(&alpha, &beta)
                .map_err(|info| fail(format!("dstev info={info}")))?;
            return Ok(LeadingEigenvalues {
                values: theta.iter().rev().take(count).copied().collect(),
                iterations: m,
            });
        }

        // After a breakdown the Ritz values are exact but possibly
        // incomplete, so convergence is only judged on live blocks.
        if !breakdown && (m.is_multiple_of(check_every) || m >= max_iter) {
            let (theta, last_row) = tridiagonal_eigen(&alpha, &beta)
                .map_err(|info| fail(format!("dstev info={info}")))?;
            let top = theta[0].abs().max(theta[m - 1].abs()).max(1.0);
            let converged = m >= count
                && (0..count).all(|r| b * last_row[m - 1 - r].abs() <= cfg.tol * top);
            if converged {
                return Ok(LeadingEigenvalues {
                    values: theta.iter().rev().take(count).copied().collect(),
                    iterations: m,
                });
            }
            if m >= max_iter {
                return Err(fail(format!(
                    "Lanczos did not converge within {max_iter} iterations"
                )));
            }
        }

        if breakdown {
            // Invariant subspace: continue in its orthogonal complement.
            match random_unit(&basis) {
                Some(v) => {
                    beta.push(0.0);
                    current = v;
                }
                None => {
                    let (theta, _) = tridiagonal_eigen(&alpha, &beta)
                        .map_err(|info| fail(format!("dstev info={info}")))?;
                    return Ok(LeadingEigenvalues {
                        values: theta.iter().rev().take(count).copied().collect(),
                        iterations: m,
                    });
                }
            }
        } else {
            beta.push(b);
            current = w.iter().map(|x| x / b).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_gen::{generate_ppm, resolve_params};

    fn dense_top(adj: &Adjacency, count: usize) -> Vec<f64> {
        let mut a = adj.to_dense();
        let w = symmetric_eigenvalues(&mut a, adj.n()).unwrap();
        w.iter().rev().take(count).copied().collect()
    }

    #[test]
    fn matches_dense_on_planted_graphs() {
        for (k_ab, seed) in [(15.0, 1u64), (2.0, 2), (10.0, 3)] {
            let p = resolve_params(300, 10.0, k_ab).unwrap();
            let g = generate_ppm(&p, seed).unwrap();
            let lz = leading_eigenvalues(&g.adjacency, 2, seed, &LanczosConfig::default()).unwrap();
            let dn = dense_top(&g.adjacency, 2);
            for (x, y) in lz.values.iter().zip(&dn) {
                assert!((x - y).abs() < 1e-7, "{x} vs {y}");
            }
            assert!(lz.iterations < 300);
        }
    }

    #[test]
    fn repeated_top_eigenvalue_is_found_twice() {
        // two disjoint copies of K_40: λ₁ = λ₂ = 39
        let mut edges = Vec::new();
        for block in [0u32, 40] {
            for i in 0..40 {
                for j in (i + 1)..40 {
                    edges.push((block + i, block + j));
                }
            }
        }
        let adj = Adjacency::from_edges(80, &edges).unwrap();
        let lz = leading_eigenvalues(&adj, 2, 9, &LanczosConfig::default()).unwrap();
        assert!((lz.values[0] - 39.0).abs() < 1e-9);
        assert!((lz.values[1] - 39.0).abs() < 1e-9);
    }

    #[test]
    fn iteration_cap_reports_failure() {
        let p = resolve_params(400, 10.0, 10.0).unwrap();
        let g = generate_ppm(&p, 4).unwrap();
        let cfg = LanczosConfig {
            max_iter: 12,
            tol: 1e-14,
            check_every: 4,
        };
        assert!(matches!(
            leading_eigenvalues(&g.adjacency, 2, 4, &cfg),
            Err(Error::Eigensolver { seed: 4, .. })
        ));
    }

    #[test]
    fn empty_graph_is_all_zero() {
        let adj = Adjacency::from_edges(100, &[]).unwrap();
        let lz = leading_eigenvalues(&adj, 2, 1, &LanczosConfig::default()).unwrap();
        assert_eq!(lz.values, vec![0.0, 0.0]);
    }
}
