//! The tropical heat equation and its analysis.

mod analysis;
mod laplacian;
mod run;

pub use analysis::{
    check_global_equilibrium, divergence_report, in_stable_manifold, is_solution, DivergenceReport, EquilibriumCheck,
};
pub use laplacian::{heat_step, residuate, tarski_laplacian, Parallelism, Sweeper};
pub use run::{alpha_gradient, loss, rraggu, Epsilon, RunConfig, RunOutcome, RunStatus, Schedule, Trace, TraceRecord};
