//! Seeded Monte Carlo sweeps over the community separation `k_aa − k_ab`.
//!
//! Every instantiation owns a seed derived from `(master_seed, stream,
//! grid index, rep)`, results are collected in task order, and aggregation
//! happens sequentially afterwards. Summaries are therefore bit-identical for
//! any worker count.

mod moments;
mod threshold;

pub use moments::Moments;
pub use threshold::{estimate_effective_threshold, PlateauReference};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph_gen::{generate_ppm_with, resolve_params, GraphSample, PpmParams, Sampler};
use crate::seed::{derive_seed, STREAM_BASELINE, STREAM_PLANTED};
use crate::spectral::{self, LanczosConfig, Tolerances};
use crate::theory::TheoryPrediction;

/// Largest tolerated fraction of failed instantiations.
pub const MAX_FAILURE_RATE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Full spectra; energies and ΔE only.
    Energy,
    /// Leading eigenvalues by Lanczos; `λ₂` only, no baseline.
    Lambda2,
    /// Full spectra; energies, ΔE and `λ₂`.
    Both,
}

impl SweepMode {
    pub fn wants_energy(self) -> bool {
        matches!(self, SweepMode::Energy | SweepMode::Both)
    }

    pub fn wants_lambda2(self) -> bool {
        matches!(self, SweepMode::Lambda2 | SweepMode::Both)
    }
}

/// Which ensemble ΔE is measured against.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    /// Planted-partition graphs at `k_ab = k` (the convention `ΔE(k_ab) =
    /// E(k_ab) − E(k_ab = k)`), with the same `(N − 2)` normalisation as the
    /// sweep itself.
    #[default]
    PlantedAtK,
    /// `G(N, k/N)`. Its mean degree differs from the planted graphs by
    /// `O(k/N)`, which biases ΔE by `O(√k)`.
    ErdosRenyi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub n: usize,
    pub k: f64,
    pub k_ab_grid: Vec<f64>,
    pub reps: usize,
    pub master_seed: u64,
    pub mode: SweepMode,
    #[serde(default)]
    pub sampler: Sampler,
    #[serde(default)]
    pub baseline: Baseline,
}

impl SweepSpec {
    /// Integer grid `0, 1, …, ⌊k⌋`.
    pub fn default_grid(k: f64) -> Vec<f64> {
        (0..=k.max(0.0).floor() as usize).map(|v| v as f64).collect()
    }

    /// Resolved parameters for every grid point, in grid order.
    pub fn validate(&self) -> Result<Vec<PpmParams>> {
        if self.reps == 0 {
            return Err(invalid("reps must be at least 1"));
        }
        if self.k_ab_grid.is_empty() {
            return Err(invalid("k_ab grid is empty"));
        }
        let params = self
            .k_ab_grid
            .iter()
            .map(|&k_ab| resolve_params(self.n, self.k, k_ab))
            .collect::<Result<Vec<_>>>()?;
        self.baseline_params()?;
        Ok(params)
    }

    fn baseline_params(&self) -> Result<PpmParams> {
        match self.baseline {
            Baseline::PlantedAtK => resolve_params(self.n, self.k, self.k),
            Baseline::ErdosRenyi => PpmParams::erdos_renyi(self.n, self.k),
        }
    }

    fn instance_seed(&self, grid_index: usize, rep: usize) -> u64 {
        derive_seed(self.master_seed, &[STREAM_PLANTED, grid_index as u64, rep as u64])
    }

    fn baseline_seed(&self, rep: usize) -> u64 {
        derive_seed(self.master_seed, &[STREAM_BASELINE, rep as u64])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExecConfig {
    /// Worker threads; 0 lets the pool pick.
    pub threads: usize,
    /// Threads inside each eigensolve.
    pub blas_threads: usize,
}

impl Default for ExecConfig {
    fn default() -> Self {
        ExecConfig {
            threads: 0,
            blas_threads: 1,
        }
    }
}

/// Per-instantiation observables.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Measurement {
    pub energy: Option<f64>,
    pub lambda2: Option<f64>,
}

/// Turns a graph into observables. Tests substitute failing implementations.
pub trait Measure: Sync {
    fn measure(&self, graph: &GraphSample, mode: SweepMode) -> Result<Measurement>;
}

/// Dense spectra (checked against the trace and moment identities) for
/// energy modes, Lanczos for `λ₂`-only sweeps.
#[derive(Debug, Clone, Copy, Default)]
pub struct SpectralMeasure {
    pub tolerances: Tolerances,
    pub lanczos: LanczosConfig,
}

impl Measure for SpectralMeasure {
    fn measure(&self, graph: &GraphSample, mode: SweepMode) -> Result<Measurement> {
        if mode == SweepMode::Lambda2 {
            let top = spectral::leading_eigenvalues(&graph.adjacency, 2, graph.seed, &self.lanczos)?;
            return Ok(Measurement {
                energy: None,
                lambda2: top.values.get(1).copied(),
            });
        }
        let spectrum = spectral::full_spectrum(graph)?;
        spectrum.verify(&self.tolerances, graph.seed)?;
        Ok(Measurement {
            energy: Some(spectrum.energy),
            lambda2: if mode.wants_lambda2() { spectrum.lambda2_alg } else { None },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    /// `None` for baseline instantiations.
    pub grid_index: Option<usize>,
    pub rep: usize,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceRecord {
    pub grid_index: usize,
    pub rep: usize,
    pub seed: u64,
    /// `None` when the instantiation failed.
    pub measurement: Option<Measurement>,
}

/// Raw per-instantiation results of a sweep, in task order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecords {
    pub instances: Vec<InstanceRecord>,
    /// Baseline energies by rep; empty when the mode has no energies.
    pub baseline: Vec<Option<f64>>,
    pub failures: Vec<FailureRecord>,
    pub attempted: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub k_ab: f64,
    pub separation: f64,
    pub mean_energy: Option<f64>,
    pub stderr_energy: Option<f64>,
    pub mean_lambda2: Option<f64>,
    pub stderr_lambda2: Option<f64>,
    pub mean_delta_e: Option<f64>,
    pub stderr_delta_e: Option<f64>,
    /// Successful instantiations at this point.
    pub count: usize,
    pub theory: TheoryPrediction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub spec: SweepSpec,
    pub points: Vec<PointSummary>,
    pub baseline_energy: Moments,
    pub effective_threshold: Option<f64>,
    pub failures: Vec<FailureRecord>,
    pub attempted: usize,
}

fn run_in_pool<T: Send>(exec: &ExecConfig, job: impl FnOnce() -> T + Send) -> Result<T> {
    spectral::set_blas_threads(exec.blas_threads.max(1));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(exec.threads)
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(job))
}

fn one_instance(
    params: &PpmParams,
    seed: u64,
    sampler: Sampler,
    mode: SweepMode,
    measure: &dyn Measure,
) -> Result<Measurement> {
    let graph = generate_ppm_with(params, seed, sampler)?;
    measure.measure(&graph, mode)
}

/// Runs every instantiation and returns raw records.
///
/// Invalid specs fail up front. Numerical failures are recorded and
/// excluded; if they exceed [`MAX_FAILURE_RATE`] of all attempts the sweep
/// aborts with [`Error::SweepAborted`].
pub fn run_sweep_records(
    spec: &SweepSpec,
    exec: &ExecConfig,
    measure: &dyn Measure,
) -> Result<SweepRecords> {
    let grid = spec.validate()?;
    let baseline_params = spec.baseline_params()?;
    let reps = spec.reps;
    let with_baseline = spec.mode.wants_energy();

    let tasks: Vec<(Option<usize>, usize)> = (0..grid.len())
        .flat_map(|g| (0..reps).map(move |r| (Some(g), r)))
        .chain((0..if with_baseline { reps } else { 0 }).map(|r| (None, r)))
        .collect();

    let outcomes: Vec<(u64, Result<Measurement>)> = run_in_pool(exec, || {
        tasks
            .par_iter()
            .map(|&(g, r)| match g {
                Some(g) => {
                    let seed = spec.instance_seed(g, r);
                    (seed, one_instance(&grid[g], seed, spec.sampler, spec.mode, measure))
                }
                None => {
                    let seed = spec.baseline_seed(r);
                    let mode = SweepMode::Energy;
                    (seed, one_instance(&baseline_params, seed, spec.sampler, mode, measure))
                }
            })
            .collect()
    })?;

    let mut records = SweepRecords {
        instances: Vec::with_capacity(grid.len() * reps),
        baseline: Vec::with_capacity(if with_baseline { reps } else { 0 }),
        failures: Vec::new(),
        attempted: tasks.len(),
    };
    for (&(g, rep), (seed, outcome)) in tasks.iter().zip(outcomes) {
        let measurement = match outcome {
            Ok(m) => Some(m),
            Err(e) if e.is_numerical() => {
                records.failures.push(FailureRecord {
                    grid_index: g,
                    rep,
                    seed,
                    message: e.to_string(),
                });
                None
            }
            Err(e) => return Err(e),
        };
        match g {
            Some(grid_index) => records.instances.push(InstanceRecord {
                grid_index,
                rep,
                seed,
                measurement,
            }),
            None => records.baseline.push(measurement.and_then(|m| m.energy)),
        }
    }

    let failed = records.failures.len();
    if failed as f64 > MAX_FAILURE_RATE * records.attempted as f64 {
        return Err(Error::SweepAborted {
            failed,
            attempted: records.attempted,
        });
    }
    Ok(records)
}

/// Aggregates raw records into per-grid-point statistics.
///
/// ΔE is averaged over rep-paired differences `E_ppm(g, r) − E_base(r)`;
/// since the two graphs are independent its standard error equals the
/// quadrature combination of the two ensembles' spreads.
pub fn summarize(spec: &SweepSpec, records: SweepRecords) -> Result<SweepSummary> {
    let grid = spec.validate()?;
    let baseline_energy: Moments = records.baseline.iter().flatten().copied().collect();

    let mut points = Vec::with_capacity(grid.len());
    for (g, params) in grid.iter().enumerate() {
        let mut energy = Moments::new();
        let mut lambda2 = Moments::new();
        let mut delta = Moments::new();
        let mut count = 0;
        for rec in records.instances.iter().filter(|r| r.grid_index == g) {
            let Some(m) = rec.measurement else { continue };
            count += 1;
            if let Some(e) = m.energy {
                energy.push(e);
                if let Some(Some(base)) = records.baseline.get(rec.rep) {
                    delta.push(e - base);
                }
            }
            if let Some(l) = m.lambda2 {
                lambda2.push(l);
            }
        }
        points.push(PointSummary {
            k_ab: params.k_ab,
            separation: params.separation(),
            mean_energy: energy.mean(),
            stderr_energy: energy.stderr(),
            mean_lambda2: lambda2.mean(),
            stderr_lambda2: lambda2.stderr(),
            mean_delta_e: delta.mean(),
            stderr_delta_e: delta.stderr(),
            count,
            theory: TheoryPrediction::evaluate(params)?,
        });
    }

    let mut summary = SweepSummary {
        spec: spec.clone(),
        points,
        baseline_energy,
        effective_threshold: None,
        failures: records.failures,
        attempted: records.attempted,
    };
    summary.effective_threshold = estimate_effective_threshold(&summary, PlateauReference::default());
    Ok(summary)
}

pub fn run_sweep_with(spec: &SweepSpec, exec: &ExecConfig, measure: &dyn Measure) -> Result<SweepSummary> {
    let records = run_sweep_records(spec, exec, measure)?;
    summarize(spec, records)
}

pub fn run_sweep(spec: &SweepSpec, exec: &ExecConfig) -> Result<SweepSummary> {
    run_sweep_with(spec, exec, &SpectralMeasure::default())
}

/// Baseline energies for reps `0..spec.reps`, exactly as used by
/// [`run_sweep`] for ΔE. Failed instantiations are `None`.
pub fn paired_er_baseline(spec: &SweepSpec, exec: &ExecConfig) -> Result<Vec<Option<f64>>> {
    let energy_only = SweepSpec {
        k_ab_grid: Vec::new(),
        mode: SweepMode::Energy,
        ..spec.clone()
    };
    if spec.reps == 0 {
        return Err(invalid("reps must be at least 1"));
    }
    let params = energy_only.baseline_params()?;
    let measure = SpectralMeasure::default();
    let outcomes: Vec<Result<Measurement>> = run_in_pool(exec, || {
        (0..spec.reps)
            .into_par_iter()
            .map(|r| {
                let seed = energy_only.baseline_seed(r);
                one_instance(&params, seed, spec.sampler, SweepMode::Energy, &measure)
            })
            .collect()
    })?;
    let mut energies = Vec::with_capacity(spec.reps);
    let mut failed = 0;
    for outcome in outcomes {
        match outcome {
            Ok(m) => energies.push(m.energy),
            Err(e) if e.is_numerical() => {
                failed += 1;
                energies.push(None);
            }
            Err(e) => return Err(e),
        }
    }
    if failed as f64 > MAX_FAILURE_RATE * spec.reps as f64 {
        return Err(Error::SweepAborted {
            failed,
            attempted: spec.reps,
        });
    }
    Ok(energies)
}
