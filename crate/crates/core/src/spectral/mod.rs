//! Adjacency spectra, graph energy and bulk statistics.
//!
//! The full spectrum comes from a dense symmetric eigensolve, since the
//! energy `E(G) = Σ |λᵢ|` needs every eigenvalue. [`lanczos`] covers the
//! cheaper case where only the leading eigenvalues are wanted.

mod bulk;
pub mod dense;
pub mod lanczos;

pub use bulk::{bulk_stats, bulk_stats_with, BulkStats, Histogram, DEFAULT_BINS};
pub use dense::set_blas_threads;
pub use lanczos::{leading_eigenvalues, LanczosConfig, LeadingEigenvalues};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_gen::{Adjacency, GraphSample};

/// All `n` eigenvalues of an adjacency matrix plus derived scalars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Sorted descending by signed value.
    pub eigenvalues: Vec<f64>,
    pub energy: f64,
    /// Largest-magnitude eigenvalue.
    pub lambda1: f64,
    /// Second-largest signed eigenvalue.
    pub lambda2_alg: Option<f64>,
    /// Second entry of the magnitude ordering (ties go to the larger signed value).
    pub lambda2_mag: Option<f64>,
    pub n: usize,
    pub m: usize,
}

/// Tolerances for the trace and second-moment identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// `|Σλ| ≤ trace_rel · n · max|λ|`
    pub trace_rel: f64,
    /// `|Σλ² − 2m| ≤ moment_rel · (2m + 1)`
    pub moment_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            trace_rel: 1e-8,
            moment_rel: 1e-6,
        }
    }
}

/// Residuals of the spectral identities for one spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub trace: f64,
    pub trace_tol: f64,
    pub moment_error: f64,
    pub moment_tol: f64,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.trace.abs() <= self.trace_tol && self.moment_error.abs() <= self.moment_tol
    }
}

/// Magnitude ordering: by |λ| descending, ties toward the larger signed value.
fn magnitude_order(a: &f64, b: &f64) -> std::cmp::Ordering {
    b.abs().total_cmp(&a.abs()).then(b.total_cmp(a))
}

impl Spectrum {
    /// Builds a spectrum from unordered eigenvalues of a graph with `m` edges.
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>, m: usize) -> Self {
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        let n = eigenvalues.len();
        let energy = eigenvalues.iter().map(|x| x.abs()).sum();
        let mut by_magnitude = eigenvalues.clone();
        by_magnitude.sort_by(magnitude_order);
        Spectrum {
            energy,
            lambda1: by_magnitude.first().copied().unwrap_or(0.0),
            lambda2_alg: eigenvalues.get(1).copied(),
            lambda2_mag: by_magnitude.get(1).copied(),
            n,
            m,
            eigenvalues,
        }
    }

    /// `Σ λᵢ^p`.
    pub fn moment(&self, p: i32) -> f64 {
        self.eigenvalues.iter().map(|x| x.powi(p)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn identities(&self, tol: &Tolerances) -> IdentityCheck {
        IdentityCheck {
            trace: self.moment(1),
            trace_tol: tol.trace_rel * self.n as f64 * self.max_abs(),
            moment_error: self.moment(2) - 2.0 * self.m as f64,
            moment_tol: tol.moment_rel * (2.0 * self.m as f64 + 1.0),
        }
    }

    /// Fails with [`Error::Identity`] when the trace or moment identity is off.
    pub fn verify(&self, tol: &Tolerances, seed: u64) -> Result<()> {
        let check = self.identities(tol);
        if check.holds() {
            Ok(())
        } else {
            Err(Error::Identity {
                seed,
                reason: format!(
                    "trace {:e} (tol {:e}), second moment off by {:e} (tol {:e})",
                    check.trace, check.trace_tol, check.moment_error, check.moment_tol
                ),
            })
        }
    }
}

/// Full spectrum of the adjacency matrix of `adjacency`.
///
/// `seed` only labels a solver failure for reproduction.
pub fn spectrum_of(adjacency: &Adjacency, seed: u64) -> Result<Spectrum> {
    let n = adjacency.n();
    let mut a = adjacency.to_dense();
    let values = dense::symmetric_eigenvalues(&mut a, n).map_err(|info| Error::Eigensolver {
        seed,
        reason: format!("dsyev returned info = {info} for n = {n}"),
    })?;
    Ok(Spectrum::from_eigenvalues(values, adjacency.edge_count()))
}

/// Full spectrum of a generated graph.
pub fn full_spectrum(graph: &GraphSample) -> Result<Spectrum> {
    spectrum_of(&graph.adjacency, graph.seed).map_err(|e| match e {
        Error::Eigensolver { seed, reason } => Error::Eigensolver {
            seed,
            reason: format!(
                "{reason}; params n={} k={} k_ab={}",
                graph.params.n, graph.params.k, graph.params.k_ab
            ),
        },
        other => other,
    })
}

/// Graph energy `Σ |λᵢ|` (the nuclear norm of the adjacency matrix).
pub fn graph_energy(spectrum: &Spectrum) -> f64 {
    spectrum.energy
}
