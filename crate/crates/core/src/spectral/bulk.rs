use serde::{Deserialize, Serialize};

use super::Spectrum;
use crate::graph_gen::PpmParams;

pub const DEFAULT_BINS: usize = 101;

/// Equal-width eigenvalue histogram; `edges.len() == counts.len() + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    /// Bins spanning `[min, max]` of `values`. The last bin is closed on the
    /// right so every value lands somewhere.
    pub fn of(values: &[f64], bins: usize) -> Histogram {
        let bins = bins.max(1);
        let (mut lo, mut hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
        if values.is_empty() {
            (lo, hi) = (0.0, 0.0);
        }
        if hi <= lo {
            lo -= 0.5;
            hi += 0.5;
        }
        let width = (hi - lo) / bins as f64;
        let edges: Vec<f64> = (0..=bins)
            .map(|b| if b == bins { hi } else { lo + width * b as f64 })
            .collect();
        let mut counts = vec![0usize; bins];
        for &x in values {
            let b = (((x - lo) / width).floor() as isize).clamp(0, bins as isize - 1) as usize;
            counts[b] += 1;
        }
        Histogram { edges, counts }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BulkStats {
    /// Predicted semicircle edge `2σ√N`.
    pub bulk_edge_pred: f64,
    /// Eigenvalues strictly outside `±bulk_edge_pred`.
    pub outlier_count: usize,
    pub histogram: Histogram,
}

pub fn bulk_stats(spectrum: &Spectrum, params: &PpmParams) -> BulkStats {
    bulk_stats_with(spectrum, params.sigma2, DEFAULT_BINS)
}

/// Bulk statistics for an explicit entry variance `sigma2` and bin count.
pub fn bulk_stats_with(spectrum: &Spectrum, sigma2: f64, bins: usize) -> BulkStats {
    let bulk_edge_pred = 2.0 * (sigma2.max(0.0) * spectrum.n as f64).sqrt();
    BulkStats {
        bulk_edge_pred,
        outlier_count: spectrum
            .eigenvalues
            .iter()
            .filter(|x| x.abs() > bulk_edge_pred)
            .count(),
        histogram: Histogram::of(&spectrum.eigenvalues, bins),
    }
}
