//! Boundary-layer ansatz, reduced scan over the concentration radius, full
//! minimization, and parameter sweeps.

mod ansatz;
mod scan;
mod solver;
mod sweep;

pub use ansatz::{
    build_ansatz, default_exponents, scan_interval, tangent_direction, AnsatzSpec, Cutoff,
};
pub use scan::{
    amplitude_model_argmin, limit_context, model_argmin, model_phi, reduced_scan, tail_amplitude,
    LimitContext, ScanConfig, ScanResult,
};
pub use solver::{profile_fit, solve, SolveOptions, SolveReport, SolveStatus};
pub use sweep::{sweep, thread_cap, NodePolicy, SweepCell, SweepSpec, THREADS_ENV};
