//! Closed-form spectral predictions for the two-community planted-partition model.
//!
//! All energy formulas are large-`N` approximations built from a semicircle
//! bulk plus the outlier eigenvalues `λ₁ = k + 1` and, above the
//! detectability threshold, `λ₂ = x/2 + 2k/x` with `x = k_aa − k_ab`.
//!
//! At and below the threshold `x = 2√k` the predictions are frozen at their
//! threshold values (plateau convention), with `k` held fixed.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph_gen::PpmParams;

/// `8 / (3π)`: `∫|x| φ(x) dx` for a unit-variance semicircle.
pub const SEMICIRCLE_ABS_MEAN: f64 = 8.0 / (3.0 * PI);

/// `q √k`, the detectability threshold for `q` equal communities.
pub fn detectability_threshold(k: f64, q: u32) -> Result<f64> {
    if !(k.is_finite() && k > 0.0) {
        return Err(invalid(format!("k must be positive (got {k})")));
    }
    if q < 2 {
        return Err(invalid(format!("q must be at least 2 (got {q})")));
    }
    Ok(q as f64 * k.sqrt())
}

fn two_community_threshold(k: f64) -> f64 {
    2.0 * k.max(0.0).sqrt()
}

/// Strictly above the two-community threshold.
pub fn is_detectable(params: &PpmParams) -> bool {
    params.separation() > two_community_threshold(params.k)
}

/// `λ₂` outlier location for a separation `x` above threshold.
fn outlier_lambda2(k: f64, x: f64) -> f64 {
    0.5 * x + 2.0 * k / x
}

/// Predicted second-largest eigenvalue, `2√k` at and below the threshold.
pub fn lambda2_theory(params: &PpmParams) -> f64 {
    let k = params.k;
    if is_detectable(params) {
        outlier_lambda2(k, params.separation())
    } else {
        two_community_threshold(k)
    }
}

/// Semicircle bulk energy `N^{3/2} (8/3π) √σ²`.
pub fn bulk_energy(n: usize, sigma2: f64) -> f64 {
    (n as f64).powf(1.5) * SEMICIRCLE_ABS_MEAN * sigma2.max(0.0).sqrt()
}

/// ER energy `N^{3/2} (8/3π) √(p(1−p)) + k + 1` with `p = k/N`.
pub fn er_energy_theory(n: usize, k: f64) -> Result<f64> {
    let p = ensure_density(n, k)?;
    Ok(bulk_energy(n, p * (1.0 - p)) + k + 1.0)
}

/// Small-`p` expansion of the ER energy: `N (8/3π) √k (1 − k/2N) + k + 1`.
pub fn er_energy_small_p(n: usize, k: f64) -> Result<f64> {
    ensure_density(n, k)?;
    let n = n as f64;
    Ok(n * SEMICIRCLE_ABS_MEAN * k.sqrt() * (1.0 - k / (2.0 * n)) + k + 1.0)
}

fn ensure_density(n: usize, k: f64) -> Result<f64> {
    if n == 0 || !k.is_finite() || k < 0.0 || k > n as f64 {
        return Err(invalid(format!("need 0 <= k <= n (got n = {n}, k = {k})")));
    }
    Ok(k / n as f64)
}

/// Entry variance of the planted-partition model at fixed `(n, k)` and separation `x`.
fn planted_sigma2(n: usize, k: f64, x: f64) -> f64 {
    let n = n as f64;
    let p_aa = (k + 0.5 * x) / (n - 2.0);
    let p_ab = (k - 0.5 * x) / n;
    0.5 * p_aa * (1.0 - p_aa) + 0.5 * p_ab * (1.0 - p_ab)
}

/// Predicted planted-partition energy: exact-`p` bulk, `λ₁`, and `λ₂`.
///
/// Below threshold the value at `x = 2√k` (same `n`, `k`) is returned.
pub fn ppm_energy_theory(params: &PpmParams) -> f64 {
    let k = params.k;
    let lambda1 = k + 1.0;
    // ER parameters have zero separation and take the plateau branch.
    if is_detectable(params) {
        bulk_energy(params.n, params.sigma2) + lambda1 + lambda2_theory(params)
    } else {
        let thr = two_community_threshold(k);
        bulk_energy(params.n, planted_sigma2(params.n, k, thr)) + lambda1 + thr
    }
}

/// `σ² ≈ k/N − (k_aa² + k_ab²) / (2N²)`.
pub fn sigma2_small_p(n: usize, k_aa: f64, k_ab: f64) -> f64 {
    let n = n as f64;
    let k = 0.5 * (k_aa + k_ab);
    k / n - (k_aa * k_aa + k_ab * k_ab) / (2.0 * n * n)
}

/// `σ² ≈ k/N − k²/N² − x²/(4N²)`.
pub fn sigma2_small_p_separated(n: usize, k: f64, x: f64) -> f64 {
    let n = n as f64;
    k / n - k * k / (n * n) - x * x / (4.0 * n * n)
}

/// Small-`p` expansion of the planted-partition energy above threshold:
/// `N (8/3π) √k (1 − k/2N − x²/(8kN)) + λ₂ + k + 1`.
pub fn ppm_energy_small_p(params: &PpmParams) -> f64 {
    let n = params.n as f64;
    let k = params.k;
    let x = params.separation().max(two_community_threshold(k));
    let bulk = n * SEMICIRCLE_ABS_MEAN * k.sqrt() * (1.0 - k / (2.0 * n) - x * x / (8.0 * k * n));
    bulk + outlier_lambda2(k, x) + k + 1.0
}

/// `−√k (2 − 4/(3π))`: the shift between the expansion of the energy
/// difference at the threshold and zero.
pub fn threshold_offset(k: f64) -> f64 {
    -k.max(0.0).sqrt() * (2.0 - 4.0 / (3.0 * PI))
}

/// Large-`N` expansion of `E_PPM − E_ER`: `x/2 + 2k/x − x²/(3π√k)`.
fn delta_e_expansion(k: f64, x: f64) -> f64 {
    outlier_lambda2(k, x) - x * x / (3.0 * PI * k.sqrt())
}

/// Predicted PPM − ER energy difference in two conventions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaEnergy {
    /// The expansion itself, frozen at its threshold value below the
    /// threshold and zero when `k_aa = k_ab`.
    pub raw: f64,
    /// `raw` minus its threshold value, zero at and below the threshold.
    pub anchored: f64,
}

pub fn delta_e_theory(params: &PpmParams) -> DeltaEnergy {
    let k = params.k;
    let x = params.separation();
    if x == 0.0 || k <= 0.0 {
        return DeltaEnergy {
            raw: 0.0,
            anchored: 0.0,
        };
    }
    let thr = two_community_threshold(k);
    let at_threshold = delta_e_expansion(k, thr);
    if is_detectable(params) {
        let raw = delta_e_expansion(k, x);
        DeltaEnergy {
            raw,
            anchored: raw - at_threshold,
        }
    } else {
        DeltaEnergy {
            raw: at_threshold,
            anchored: 0.0,
        }
    }
}

/// Semicircle density of unscaled eigenvalues:
/// `√(4σ²N − x²) / (2π σ² N)` inside `|x| < 2√(σ²N)`.
pub fn wigner_density(x: f64, sigma2: f64, n: usize) -> f64 {
    let s = sigma2 * n as f64;
    let r2 = 4.0 * s - x * x;
    if s <= 0.0 || r2 <= 0.0 {
        0.0
    } else {
        r2.sqrt() / (2.0 * PI * s)
    }
}

/// Every closed-form prediction for one parameter point (two communities).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryPrediction {
    pub n: usize,
    pub k: f64,
    pub k_aa: f64,
    pub k_ab: f64,
    pub threshold: f64,
    pub detectable: bool,
    pub lambda1_pred: f64,
    pub lambda2_pred: f64,
    pub bulk_energy_pred: f64,
    pub er_energy_pred: f64,
    pub ppm_energy_pred: f64,
    pub delta_e_raw: f64,
    pub delta_e_anchored: f64,
    /// The convention compared against simulations: equal to `delta_e_anchored`.
    pub delta_e_pred: f64,
    pub offset_at_threshold: f64,
}

impl TheoryPrediction {
    pub fn evaluate(params: &PpmParams) -> Result<Self> {
        let delta = delta_e_theory(params);
        Ok(TheoryPrediction {
            n: params.n,
            k: params.k,
            k_aa: params.k_aa,
            k_ab: params.k_ab,
            threshold: two_community_threshold(params.k),
            detectable: is_detectable(params),
            lambda1_pred: params.k + 1.0,
            lambda2_pred: lambda2_theory(params),
            bulk_energy_pred: bulk_energy(params.n, params.sigma2),
            er_energy_pred: er_energy_theory(params.n, params.k)?,
            ppm_energy_pred: ppm_energy_theory(params),
            delta_e_raw: delta.raw,
            delta_e_anchored: delta.anchored,
            delta_e_pred: delta.anchored,
            offset_at_threshold: threshold_offset(params.k),
        })
    }

    /// Like [`TheoryPrediction::evaluate`] but rejects `q ≠ 2`: the energy
    /// formulas exist only for two communities.
    pub fn evaluate_for(params: &PpmParams, q: u32) -> Result<Self> {
        if q != 2 {
            return Err(invalid(format!(
                "energy predictions are only defined for q = 2 (got q = {q})"
            )));
        }
        Self::evaluate(params)
    }
}
