//! Planted-partition and Erdős–Rényi graph ensembles, their adjacency
//! spectra and graph energy, closed-form large-`N` predictions, and seeded
//! Monte Carlo sweeps across the community-detectability transition.
//!
//! ```no_run
//! use graph_energy::{graph_gen, spectral, theory};
//!
//! let params = graph_gen::resolve_params(1000, 50.0, 25.0)?;
//! let graph = graph_gen::generate_ppm(&params, 7)?;
//! let spectrum = spectral::full_spectrum(&graph)?;
//! let predicted = theory::ppm_energy_theory(&params);
//! println!("E = {:.1} (theory {:.1})", spectrum.energy, predicted);
//! # Ok::<(), graph_energy::Error>(())
//! ```

// Links the system OpenBLAS that provides LAPACK.
extern crate openblas_src;

pub mod ensemble;
mod error;
pub mod graph_gen;
pub mod io;
pub mod seed;
pub mod spectral;
pub mod theory;

pub use error::{Error, Result};
pub use graph_gen::{generate_er, generate_ppm, resolve_params, Adjacency, GraphSample, PpmParams};
pub use spectral::{full_spectrum, Spectrum};
pub use theory::TheoryPrediction;

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
