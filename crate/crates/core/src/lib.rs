//! Cycle decompositions of non-equilibrium steady states.
//!
//! The pipeline runs from a finite Markov process to its steady-state flux
//! field, decomposes the field into non-negative weights on simple directed
//! cycles, maps the weighted cycles onto a cycle graph whose exchange fluxes
//! obey detailed balance, and evaluates currents, affinities and entropy
//! production on both levels.
//!
//! ```
//! use ness_core::prelude::*;
//!
//! let process = build_tasep(TasepConfig::new(2.0).unwrap());
//! let fluxes = process.steady_fluxes().unwrap();
//! let catalog = CycleCatalog::enumerate(&process.graph()).unwrap();
//! let d = decompose_default(&fluxes, &catalog).unwrap();
//! assert!(d.reconstruct_fluxes().max_abs_diff(&fluxes) < 1e-12);
//! ```

pub mod cycles;
pub mod decomposition;
pub mod error;
pub mod markov;
pub mod model;
pub mod observables;
pub mod report;
pub mod simulator;
pub mod tasep;
pub mod transform;

/// Numerical tolerances shared across modules.
pub mod tolerance {
    /// Residuals of linear identities (balance equations, reconstructions).
    pub const LINEAR: f64 = 1e-12;
    /// Derived log/ratio quantities.
    pub const DERIVED: f64 = 1e-10;
}

pub use error::{NessError, Result};

pub mod prelude {
    pub use crate::cycles::{cycle_counts, Cycle, CycleCatalog, CycleCounts, Digraph};
    pub use crate::decomposition::{
        db_current_split, decompose, decompose_default, enumerate_decompositions,
        sample_decompositions, CycleDecomposition, DbCurrentSplit, WeightedCycle,
        DEFAULT_MAX_ORDERINGS,
    };
    pub use crate::error::{NessError, Result};
    pub use crate::markov::{FluxField, MarkovProcess, ProbabilityDistribution, TimeKind};
    pub use crate::observables::{
        cycle_average, cycle_observable, entropy_production, entropy_production_cycles,
        flux_average, thermo_quantities, EdgeObservable, EntropyProduction, EvaluationPoint,
    };
    pub use crate::simulator::{
        empirical_fluxes, estimate_fluxes, project_kirchhoff, simulate, FluxEstimate, StopRule,
        Trajectory,
    };
    pub use crate::tasep::{build_tasep, tasep_analytic, tasep_sweep, Gait, TasepConfig};
    pub use crate::transform::{CycleGraph, CyclePotential};
}
