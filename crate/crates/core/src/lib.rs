//! Simulation and stability analysis for the damped difference equation
//!
//! ```text
//! x[n+1] = c x[n] + f(x[n] - x[n-1]),   c in [0, 1),
//! ```
//!
//! driven by a catalog of feedback nonlinearities f with f(0) = 0.
//!
//! The crate provides:
//!
//! * exact simulation of the recursion and of its first-difference
//!   companion y[n+1] = c y[n] + f(y[n]) - f(y[n-1]) ([`dynamics`]),
//! * the nonlinearity catalog with declared sector/sign/slope metadata and
//!   numeric verification of the declarations ([`nonlinearity`]),
//! * closed-form global-attractivity and oscillation criteria over the
//!   (a, c) parameter plane ([`criteria`]),
//! * quadratic decrease certificates constructed from the criteria's
//!   feasibility windows and verified pointwise along orbits
//!   ([`lyapunov`]),
//! * finite-orbit classification and the linear comparison roots
//!   ([`classify`]),
//! * deterministic (a, c) sweeps, region maps, and randomized probing for
//!   counterexamples to the two open attractivity conjectures ([`sweep`]).
//!
//! Sweep cells are data-parallel; the `parallel` feature (on by default)
//! runs them on a rayon pool, with a sequential fallback compiled in
//! either way. Identical inputs produce identical outputs, bit for bit,
//! regardless of worker count.

pub mod classify;
pub mod criteria;
pub mod dynamics;
pub mod error;
pub mod lyapunov;
pub mod nonlinearity;
pub mod rng;
pub mod sweep;

pub use classify::{
    band_consistency, characteristic_roots, classify, sign_changes, CharacteristicRoots,
    ClassificationVerdict, ClassifyParams, LimitBehavior, Oscillation, Root, RootMode,
};
pub use criteria::{
    criterion_c1, criterion_c2, criterion_c3, criterion_thm2, criterion_thm3, evaluate_all,
    oscillation_band, oscillation_iff, CriterionId, CriterionReport, CriterionResult, Summary,
};
pub use dynamics::{
    difference_orbit, recurrence_residual, simulate, simulate_difference, OrbitKind,
    SimulationGuards, SystemSpec, Termination, Trajectory,
};
pub use error::{Error, Result};
pub use lyapunov::{
    make_certificate, trace, verify_certificate_on_orbit, verify_decrease, window_thm2,
    window_thm3, LyapunovCertificate, LyapunovTrace, RatioChoice, TheoremId, VerificationReport,
};
pub use nonlinearity::{Flags, Kind, NonlinearitySpec, PropertyRecord, SectorReport, SlopeAtZero};
pub use sweep::{
    export, probe_conjecture, run_sweep, Conjecture, ExportFormat, Family, InitialConditions,
    ProbeCandidate, ProbeReport, Range, SweepCell, SweepConfig, SweepResult,
};
