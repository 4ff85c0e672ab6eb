//! Simulation of the second order difference equation
//!
//! ```text
//! x[n+1] = c x[n] + f(x[n] - x[n-1]),   n = 1, 2, ...
//! ```
//!
//! with damping c in [0, 1), a catalog nonlinearity f, and real initial
//! values x0, x1, together with the companion first-difference recursion
//!
//! ```text
//! y[n+1] = c y[n] + f(y[n]) - f(y[n-1]),   n = 2, 3, ...
//! ```
//!
//! satisfied by y[n] = x[n] - x[n-1]. Runs terminate at a horizon, at a
//! divergence magnitude guard, or once a window of consecutive values sits
//! inside a convergence tolerance; the reason is recorded on the orbit, not
//! reported as an error. All arithmetic is plain f64 and every operation is
//! a pure function of its inputs, so identical inputs give bitwise
//! identical orbits.

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::nonlinearity::NonlinearitySpec;

/// One instance of the recursion: damping plus nonlinearity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemSpec {
    c: f64,
    nonlinearity: NonlinearitySpec,
}

impl SystemSpec {
    pub fn new(c: f64, nonlinearity: NonlinearitySpec) -> Result<Self> {
        if !c.is_finite() || !(0.0..1.0).contains(&c) {
            return Err(Error::InvalidDamping(c));
        }
        // All catalog kinds fix f(0) = 0; keep the check so the equilibrium
        // assumption cannot rot silently.
        if nonlinearity.evaluate(0.0) != 0.0 {
            return Err(Error::InvalidNonlinearity(format!(
                "{nonlinearity} does not vanish at 0"
            )));
        }
        Ok(Self { c, nonlinearity })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn nonlinearity(&self) -> &NonlinearitySpec {
        &self.nonlinearity
    }

    /// One step of the recursion: c x_curr + f(x_curr - x_prev).
    pub fn step(&self, x_prev: f64, x_curr: f64) -> f64 {
        self.c * x_curr + self.nonlinearity.evaluate(x_curr - x_prev)
    }

    /// One step of the difference recursion: c y_curr + f(y_curr) - f(y_prev).
    pub fn step_difference(&self, y_prev: f64, y_curr: f64) -> f64 {
        self.c * y_curr + self.nonlinearity.evaluate(y_curr)
            - self.nonlinearity.evaluate(y_prev)
    }
}

/// Termination guards for finite runs of an asymptotic statement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationGuards {
    /// Maximum number of orbit values.
    pub horizon: usize,
    /// |x| above this terminates the run as diverged.
    pub divergence_bound: f64,
    /// |x| at or below this counts toward the convergence window.
    pub convergence_tol: f64,
    /// Number of consecutive in-tolerance values declaring convergence.
    pub convergence_window: usize,
}

impl Default for SimulationGuards {
    fn default() -> Self {
        Self {
            horizon: 100_000,
            divergence_bound: 1e12,
            convergence_tol: 1e-9,
            convergence_window: 50,
        }
    }
}

impl SimulationGuards {
    pub fn validate(&self) -> Result<()> {
        if self.convergence_window < 2 {
            return Err(Error::InvalidGuards(format!(
                "convergence_window = {} must be >= 2",
                self.convergence_window
            )));
        }
        if self.horizon < self.convergence_window {
            return Err(Error::InvalidGuards(format!(
                "horizon = {} must be >= convergence_window = {}",
                self.horizon, self.convergence_window
            )));
        }
        if !self.convergence_tol.is_finite() || self.convergence_tol <= 0.0 {
            return Err(Error::InvalidGuards(format!(
                "convergence_tol = {} must be positive",
                self.convergence_tol
            )));
        }
        if !self.divergence_bound.is_finite() || self.divergence_bound <= self.convergence_tol {
            return Err(Error::InvalidGuards(format!(
                "divergence_bound = {} must be finite and exceed convergence_tol",
                self.divergence_bound
            )));
        }
        Ok(())
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    HorizonReached,
    Diverged,
    Converged,
}

/// Which recursion an orbit belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitKind {
    #[serde(rename = "x-orbit")]
    XOrbit,
    #[serde(rename = "y-orbit")]
    YOrbit,
}

impl OrbitKind {
    pub fn label(&self) -> &'static str {
        match self {
            OrbitKind::XOrbit => "x-orbit",
            OrbitKind::YOrbit => "y-orbit",
        }
    }
}

/// A finite orbit with its termination reason and generating system.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    values: Vec<f64>,
    kind: OrbitKind,
    termination: Termination,
    spec: SystemSpec,
}

impl Trajectory {
    /// Wrap externally produced values (analysis of hand-built or corrupted
    /// orbits). Requires at least 2 values.
    pub fn from_values(
        spec: SystemSpec,
        kind: OrbitKind,
        termination: Termination,
        values: Vec<f64>,
    ) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooShort { need: 2, got: values.len() });
        }
        Ok(Self { values, kind, termination, spec })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length >= 2 by construction
    }

    pub fn kind(&self) -> OrbitKind {
        self.kind
    }

    pub fn termination(&self) -> Termination {
        self.termination
    }

    pub fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    /// Index of the first value in the recursion's own numbering:
    /// x-orbits start at x0, y-orbits at y1.
    pub fn start_index(&self) -> usize {
        match self.kind {
            OrbitKind::XOrbit => 0,
            OrbitKind::YOrbit => 1,
        }
    }

    /// CSV with header `index,value`, indices in the recursion numbering.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "index,value")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{}", i + self.start_index(), v)?;
        }
        Ok(())
    }
}

impl Serialize for Trajectory {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Trajectory", 5)?;
        s.serialize_field("kind", &self.kind)?;
        s.serialize_field("c", &self.spec.c())?;
        s.serialize_field("nonlinearity", self.spec.nonlinearity())?;
        s.serialize_field("termination", &self.termination)?;
        s.serialize_field("values", &self.values)?;
        s.end()
    }
}

/// Shared guard loop: extends `values` with `next` until a guard fires.
fn run_guarded(
    spec: &SystemSpec,
    kind: OrbitKind,
    guards: &SimulationGuards,
    seeds: [f64; 2],
    next: impl Fn(&SystemSpec, f64, f64) -> f64,
) -> Result<Trajectory> {
    guards.validate()?;
    for s in seeds {
        if !s.is_finite() {
            return Err(Error::NonFinite(s));
        }
    }

    let mut values = Vec::with_capacity(guards.horizon.min(4096));
    values.extend_from_slice(&seeds);

    let mut in_tol = 0usize;
    let mut termination = None;
    for &v in &values {
        if v.abs() <= guards.convergence_tol {
            in_tol += 1;
        } else {
            in_tol = 0;
        }
    }
    if seeds.iter().any(|v| v.abs() > guards.divergence_bound) {
        termination = Some(Termination::Diverged);
    } else if in_tol >= guards.convergence_window {
        termination = Some(Termination::Converged);
    } else if values.len() >= guards.horizon {
        termination = Some(Termination::HorizonReached);
    }

    while termination.is_none() {
        let n = values.len();
        let v = next(spec, values[n - 2], values[n - 1]);
        values.push(v);
        if !v.is_finite() || v.abs() > guards.divergence_bound {
            termination = Some(Termination::Diverged);
            break;
        }
        if v.abs() <= guards.convergence_tol {
            in_tol += 1;
            if in_tol >= guards.convergence_window {
                termination = Some(Termination::Converged);
                break;
            }
        } else {
            in_tol = 0;
        }
        if values.len() >= guards.horizon {
            termination = Some(Termination::HorizonReached);
            break;
        }
    }

    Ok(Trajectory { values, kind, termination: termination.unwrap(), spec: spec.clone() })
}

/// Iterate x[n+1] = c x[n] + f(x[n] - x[n-1]) from (x0, x1).
pub fn simulate(
    spec: &SystemSpec,
    x0: f64,
    x1: f64,
    guards: &SimulationGuards,
) -> Result<Trajectory> {
    run_guarded(spec, OrbitKind::XOrbit, guards, [x0, x1], SystemSpec::step)
}

/// Iterate y[n+1] = c y[n] + f(y[n]) - f(y[n-1]) from (y1, y2).
pub fn simulate_difference(
    spec: &SystemSpec,
    y1: f64,
    y2: f64,
    guards: &SimulationGuards,
) -> Result<Trajectory> {
    run_guarded(spec, OrbitKind::YOrbit, guards, [y1, y2], SystemSpec::step_difference)
}

/// First-difference transform of an x-orbit: y[n] = x[n] - x[n-1].
/// One element shorter than the input.
pub fn difference_orbit(traj: &Trajectory) -> Result<Trajectory> {
    if traj.kind() != OrbitKind::XOrbit {
        return Err(Error::WrongOrbitKind { expected: "x-orbit", got: traj.kind().label() });
    }
    if traj.len() < 2 {
        return Err(Error::TooShort { need: 2, got: traj.len() });
    }
    let values = traj.values.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(Trajectory {
        values,
        kind: OrbitKind::YOrbit,
        termination: traj.termination,
        spec: traj.spec.clone(),
    })
}

/// Largest absolute defect of the orbit against its own recursion:
/// max over n of |x[n+1] - c x[n] - f(x[n] - x[n-1])| for x-orbits, and the
/// analogue of the difference recursion for y-orbits. Zero up to round-off
/// for any orbit produced by this module.
pub fn recurrence_residual(traj: &Trajectory) -> Result<f64> {
    if traj.len() < 3 {
        return Err(Error::TooShort { need: 3, got: traj.len() });
    }
    let v = &traj.values;
    let mut worst = 0.0f64;
    for n in 2..v.len() {
        let predicted = match traj.kind {
            OrbitKind::XOrbit => traj.spec.step(v[n - 2], v[n - 1]),
            OrbitKind::YOrbit => traj.spec.step_difference(v[n - 2], v[n - 1]),
        };
        worst = worst.max((v[n] - predicted).abs());
    }
    Ok(worst)
}
