//! Parameter-plane sweeps and conjecture probing.
//!
//! A sweep walks an (a, c) grid, evaluates every closed-form criterion at
//! each cell, simulates a batch of initial conditions there, and reports
//! where theory and simulation agree. Cells are independent work items:
//! with the `parallel` feature they are evaluated on a rayon pool, and
//! results are always assembled in grid order, so output bytes do not
//! depend on the worker count. Every random draw derives from the recorded
//! seed and the cell index, which makes whole runs reproducible.
//!
//! A cell is flagged VIOLATION only when a satisfied attractivity
//! criterion coexists with an orbit that fails to converge even after a
//! 10x horizon re-run — that would mean either an implementation bug or a
//! genuine counterexample, so the cell carries its reproduction data.
//!
//! The conjecture probes restrict the sweep to the gap where the
//! conjectured hypotheses hold (a < 1) but no criterion applies, and hunt
//! for non-convergent orbits there.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classify::{classify, ClassifyParams, Oscillation};
use crate::criteria::{evaluate_all, CriterionId, CriterionReport, Summary};
use crate::dynamics::{simulate, SimulationGuards, SystemSpec, Termination};
use crate::error::{Error, Result};
use crate::nonlinearity::{Kind, NonlinearitySpec};
use crate::rng::SplitMix64;

/// Inclusive linear range with a fixed number of samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Range {
    pub fn value(&self, i: usize) -> f64 {
        self.lo + (self.hi - self.lo) * i as f64 / (self.steps - 1) as f64
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !self.lo.is_finite() || !self.hi.is_finite() || self.lo > self.hi {
            return Err(Error::InvalidConfig(format!(
                "{name} range [{}, {}] must be finite and ordered",
                self.lo, self.hi
            )));
        }
        if self.steps < 2 {
            return Err(Error::InvalidConfig(format!(
                "{name} range needs at least 2 steps, got {}",
                self.steps
            )));
        }
        Ok(())
    }
}

/// A nonlinearity family parameterized by the swept sector bound `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Tanh,
    LinearNegative,
    LinearPositive,
    Ramp,
    Saturating { cap: f64 },
}

impl Family {
    pub fn instantiate(&self, a: f64) -> Result<NonlinearitySpec> {
        let kind = match *self {
            Family::Tanh => Kind::ScaledTanh { a },
            Family::LinearNegative => Kind::LinearNegative { a },
            Family::LinearPositive => Kind::LinearPositive { a },
            Family::Ramp => Kind::Ramp { a },
            Family::Saturating { cap } => Kind::BoundedSaturating { a, cap },
        };
        NonlinearitySpec::new(kind)
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::Tanh => write!(f, "tanh"),
            Family::LinearNegative => write!(f, "linneg"),
            Family::LinearPositive => write!(f, "linpos"),
            Family::Ramp => write!(f, "ramp"),
            Family::Saturating { cap } => write!(f, "sat:cap={cap}"),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "tanh" => Ok(Family::Tanh),
            "linneg" => Ok(Family::LinearNegative),
            "linpos" => Ok(Family::LinearPositive),
            "ramp" => Ok(Family::Ramp),
            other => {
                if let Some(body) = other.strip_prefix("sat:cap=") {
                    let cap: f64 = body.parse().map_err(|_| Error::Parse {
                        input: s.into(),
                        reason: format!("bad cap `{body}`"),
                    })?;
                    Ok(Family::Saturating { cap })
                } else {
                    Err(Error::Parse {
                        input: s.into(),
                        reason: "expected one of tanh, linneg, linpos, ramp, sat:cap=<v>".into(),
                    })
                }
            }
        }
    }
}

impl Serialize for Family {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Initial-condition sampling: a `grid_k` x `grid_k` lattice over
/// [-r, r]^2 plus `random_count` seeded uniform draws from the same square.
/// Either part may be empty (0), not both. The seed is always recorded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InitialConditions {
    pub r: f64,
    pub grid_k: usize,
    pub random_count: usize,
    pub seed: u64,
}

impl Default for InitialConditions {
    fn default() -> Self {
        // Large magnitudes included deliberately: attractivity is global.
        Self { r: 10.0, grid_k: 5, random_count: 20, seed: 0 }
    }
}

impl InitialConditions {
    fn validate(&self) -> Result<()> {
        if !self.r.is_finite() || self.r <= 0.0 {
            return Err(Error::InvalidConfig(format!("ic radius r = {} must be positive", self.r)));
        }
        if self.grid_k == 0 && self.random_count == 0 {
            return Err(Error::InvalidConfig("no initial conditions configured".into()));
        }
        Ok(())
    }

    /// The sample set for one cell. Deterministic in (seed, cell_index).
    pub fn points(&self, cell_index: u64) -> Vec<(f64, f64)> {
        let mut pts = Vec::with_capacity(self.grid_k * self.grid_k + self.random_count);
        let coord = |i: usize| {
            if self.grid_k == 1 {
                0.0
            } else {
                -self.r + 2.0 * self.r * i as f64 / (self.grid_k - 1) as f64
            }
        };
        for i in 0..self.grid_k {
            for j in 0..self.grid_k {
                pts.push((coord(i), coord(j)));
            }
        }
        let mut rng = SplitMix64::for_index(self.seed, cell_index);
        for _ in 0..self.random_count {
            let x0 = rng.uniform(-self.r, self.r);
            let x1 = rng.uniform(-self.r, self.r);
            pts.push((x0, x1));
        }
        pts
    }
}

fn default_parallelism() -> usize {
    0
}

/// Full sweep configuration; mirrors the JSON config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub a_range: Range,
    pub c_range: Range,
    pub family: Family,
    #[serde(default)]
    pub initial_conditions: InitialConditions,
    #[serde(default)]
    pub guards: SimulationGuards,
    /// Worker count hint: 0 = library default pool, 1 = sequential.
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.a_range.validate("a")?;
        self.c_range.validate("c")?;
        if self.a_range.lo <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "a range must start above 0, got {}",
                self.a_range.lo
            )));
        }
        if self.c_range.lo < 0.0 || self.c_range.hi >= 1.0 {
            return Err(Error::InvalidConfig(format!(
                "c range [{}, {}] must sit inside [0, 1)",
                self.c_range.lo, self.c_range.hi
            )));
        }
        self.initial_conditions.validate()?;
        self.guards.validate()?;
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.a_range.steps * self.c_range.steps
    }

    /// (a, c) for a linear cell index, a-major.
    pub fn cell_params(&self, index: usize) -> (f64, f64) {
        let ai = index / self.c_range.steps;
        let cj = index % self.c_range.steps;
        (self.a_range.value(ai), self.c_range.value(cj))
    }
}

/// Criterion verdicts condensed to the per-cell booleans the region maps
/// need.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellCriteria {
    pub c1: bool,
    pub c2: bool,
    pub c3: bool,
    pub thm2: bool,
    pub thm3: bool,
    pub summary: Summary,
}

impl CellCriteria {
    fn from_report(report: &CriterionReport) -> Self {
        let sat = |id| report.result(id).map(|r| r.satisfied).unwrap_or(false);
        Self {
            c1: sat(CriterionId::C1),
            c2: sat(CriterionId::C2),
            c3: sat(CriterionId::C3),
            thm2: sat(CriterionId::Thm2),
            thm3: sat(CriterionId::Thm3),
            summary: report.summary,
        }
    }
}

/// Orbit outcomes aggregated over a cell's initial conditions.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EmpiricalAggregate {
    pub orbits: usize,
    pub converged: usize,
    pub diverged: usize,
    pub horizon_reached: usize,
    pub oscillatory: usize,
    pub nonoscillatory: usize,
    pub undetermined: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Agreement {
    #[serde(rename = "consistent")]
    Consistent,
    #[serde(rename = "theory_silent")]
    TheorySilent,
    #[serde(rename = "VIOLATION")]
    Violation,
}

impl Agreement {
    pub fn label(&self) -> &'static str {
        match self {
            Agreement::Consistent => "consistent",
            Agreement::TheorySilent => "theory_silent",
            Agreement::Violation => "VIOLATION",
        }
    }
}

/// Reproduction data for a violating orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViolationWitness {
    pub x0: f64,
    pub x1: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub a: f64,
    pub c: f64,
    pub criteria: CellCriteria,
    pub empirical: EmpiricalAggregate,
    pub agreement: Agreement,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub violation: Option<ViolationWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub cells: Vec<SweepCell>,
    pub violation_count: usize,
}

impl SweepResult {
    pub fn has_violations(&self) -> bool {
        self.violation_count > 0
    }
}

/// Map `f` over 0..n, honoring the worker-count hint. Output order is the
/// index order regardless of scheduling.
fn map_indexed<T, F>(n: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if workers != 1 {
            if workers == 0 {
                return (0..n).into_par_iter().map(f).collect();
            }
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
                return pool.install(|| (0..n).into_par_iter().map(f).collect());
            }
        }
    }
    (0..n).map(f).collect()
}

/// Simulate one initial condition; when asked, re-run non-converged orbits
/// with a 10x horizon to filter slow convergence before treating them as
/// violations or counterexample candidates.
fn orbit_with_recheck(
    spec: &SystemSpec,
    x0: f64,
    x1: f64,
    guards: &SimulationGuards,
    recheck: bool,
) -> (crate::dynamics::Trajectory, Termination) {
    let t = simulate(spec, x0, x1, guards).expect("validated inputs");
    let mut effective = t.termination();
    if recheck && effective == Termination::HorizonReached {
        let extended = SimulationGuards { horizon: guards.horizon.saturating_mul(10), ..*guards };
        let t10 = simulate(spec, x0, x1, &extended).expect("validated inputs");
        effective = t10.termination();
    }
    (t, effective)
}

fn evaluate_cell(cfg: &SweepConfig, index: usize) -> SweepCell {
    let (a, c) = cfg.cell_params(index);
    let nl = cfg.family.instantiate(a).expect("validated config");
    let spec = SystemSpec::new(c, nl).expect("validated config");
    let report = evaluate_all(&spec);
    let criteria = CellCriteria::from_report(&report);

    let mut empirical = EmpiricalAggregate::default();
    let mut violation = None;
    let params = ClassifyParams::default();
    // Only proven cells can violate, so only they earn the 10x re-run.
    let recheck = criteria.summary == Summary::ProvenAttracting;
    for (x0, x1) in cfg.initial_conditions.points(index as u64) {
        let (orbit, effective) = orbit_with_recheck(&spec, x0, x1, &cfg.guards, recheck);
        empirical.orbits += 1;
        match orbit.termination() {
            Termination::Converged => empirical.converged += 1,
            Termination::Diverged => empirical.diverged += 1,
            Termination::HorizonReached => empirical.horizon_reached += 1,
        }
        match classify(&orbit, &params).oscillation {
            Oscillation::Oscillatory => empirical.oscillatory += 1,
            Oscillation::Nonoscillatory => empirical.nonoscillatory += 1,
            Oscillation::Undetermined => empirical.undetermined += 1,
        }
        if criteria.summary == Summary::ProvenAttracting
            && effective != Termination::Converged
            && violation.is_none()
        {
            violation = Some(ViolationWitness { x0, x1, seed: cfg.initial_conditions.seed });
        }
    }

    let agreement = match criteria.summary {
        Summary::ProvenAttracting => {
            if violation.is_some() {
                Agreement::Violation
            } else {
                Agreement::Consistent
            }
        }
        Summary::CounterexampleRegime => Agreement::Consistent,
        _ => Agreement::TheorySilent,
    };

    SweepCell { a, c, criteria, empirical, agreement, violation }
}

/// Evaluate every grid cell. Violations are flagged, never fatal.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let cells = map_indexed(cfg.cell_count(), cfg.parallelism, |i| evaluate_cell(cfg, i));
    let violation_count = cells.iter().filter(|c| c.agreement == Agreement::Violation).count();
    Ok(SweepResult { config: cfg.clone(), cells, violation_count })
}

// --- conjecture probing -----------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Conjecture {
    #[serde(rename = "conjecture1")]
    One,
    #[serde(rename = "conjecture2")]
    Two,
}

impl Conjecture {
    pub fn label(&self) -> &'static str {
        match self {
            Conjecture::One => "conjecture1",
            Conjecture::Two => "conjecture2",
        }
    }
}

impl std::str::FromStr for Conjecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" | "conjecture1" => Ok(Conjecture::One),
            "2" | "conjecture2" => Ok(Conjecture::Two),
            other => Err(Error::Parse {
                input: other.into(),
                reason: "expected 1 or 2".into(),
            }),
        }
    }
}

/// A non-convergent orbit in the conjecture gap, with everything needed to
/// replay it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeCandidate {
    pub a: f64,
    pub c: f64,
    pub x0: f64,
    pub x1: f64,
    pub seed: u64,
    pub termination: Termination,
    /// Termination of the 10x-horizon re-run that confirmed the candidate.
    pub rerun_termination: Termination,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub conjecture: Conjecture,
    pub family: Family,
    pub seed: u64,
    pub cells_total: usize,
    /// Cells skipped because some criterion already proves them.
    pub cells_proven: usize,
    /// Cells skipped because a lies outside (0, 1).
    pub cells_out_of_scope: usize,
    pub cells_probed: usize,
    pub orbits_run: usize,
    pub candidates: Vec<ProbeCandidate>,
    pub counterexample_found: bool,
}

struct ProbeCellOutcome {
    kind: ProbeCellKind,
    orbits: usize,
    candidates: Vec<ProbeCandidate>,
}

enum ProbeCellKind {
    OutOfScope,
    Proven,
    Probed,
}

/// Search the conjecture gap for non-convergent orbits.
///
/// The configured family must satisfy the conjecture's hypotheses
/// (sign-preserving with a global sector for the first, nonnegative with a
/// global sector for the second); anything else is rejected. Cells where
/// any criterion already proves attractivity are skipped as proven, cells
/// with a >= 1 as out of scope.
pub fn probe_conjecture(which: Conjecture, cfg: &SweepConfig) -> Result<ProbeReport> {
    cfg.validate()?;
    let probe_flags = cfg.family.instantiate(0.5f64.min(cfg.a_range.hi))?.properties().flags;
    match which {
        Conjecture::One => {
            if !(probe_flags.sign_preserving && probe_flags.globally_sectored) {
                return Err(Error::HypothesisViolation(format!(
                    "family `{}` is not sign preserving with a global sector (t f(t) >= 0 and |f(t)| <= a|t| required)",
                    cfg.family
                )));
            }
        }
        Conjecture::Two => {
            if !(probe_flags.nonnegative && probe_flags.globally_sectored) {
                return Err(Error::HypothesisViolation(format!(
                    "family `{}` is not nonnegative with a global sector (0 <= f(t) <= a|t| required)",
                    cfg.family
                )));
            }
        }
    }

    let outcomes = map_indexed(cfg.cell_count(), cfg.parallelism, |index| {
        let (a, c) = cfg.cell_params(index);
        if !(a > 0.0 && a < 1.0) {
            return ProbeCellOutcome { kind: ProbeCellKind::OutOfScope, orbits: 0, candidates: vec![] };
        }
        let nl = cfg.family.instantiate(a).expect("validated config");
        let spec = SystemSpec::new(c, nl).expect("validated config");
        let report = evaluate_all(&spec);
        if report.any_attractivity_satisfied() {
            return ProbeCellOutcome { kind: ProbeCellKind::Proven, orbits: 0, candidates: vec![] };
        }
        let mut orbits = 0;
        let mut candidates = Vec::new();
        for (x0, x1) in cfg.initial_conditions.points(index as u64) {
            orbits += 1;
            let (orbit, effective) = orbit_with_recheck(&spec, x0, x1, &cfg.guards, true);
            if effective != Termination::Converged {
                candidates.push(ProbeCandidate {
                    a,
                    c,
                    x0,
                    x1,
                    seed: cfg.initial_conditions.seed,
                    termination: orbit.termination(),
                    rerun_termination: effective,
                });
            }
        }
        ProbeCellOutcome { kind: ProbeCellKind::Probed, orbits, candidates }
    });

    let mut report = ProbeReport {
        conjecture: which,
        family: cfg.family,
        seed: cfg.initial_conditions.seed,
        cells_total: cfg.cell_count(),
        cells_proven: 0,
        cells_out_of_scope: 0,
        cells_probed: 0,
        orbits_run: 0,
        candidates: Vec::new(),
        counterexample_found: false,
    };
    for o in outcomes {
        match o.kind {
            ProbeCellKind::OutOfScope => report.cells_out_of_scope += 1,
            ProbeCellKind::Proven => report.cells_proven += 1,
            ProbeCellKind::Probed => report.cells_probed += 1,
        }
        report.orbits_run += o.orbits;
        report.candidates.extend(o.candidates);
    }
    report.counterexample_found = !report.candidates.is_empty();
    Ok(report)
}

// --- persistence -------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(Error::Parse {
                input: other.into(),
                reason: "expected csv or json".into(),
            }),
        }
    }
}

/// CSV with one row per cell. Booleans encode as 0/1, reals as shortest
/// round-trip decimals.
pub fn write_csv<W: Write>(result: &SweepResult, mut w: W) -> std::io::Result<()> {
    writeln!(
        w,
        "a,c,criterion_c1,criterion_c2,criterion_c3,criterion_thm2,criterion_thm3,\
         summary,empirical_converged,empirical_oscillatory,agreement"
    )?;
    for cell in &result.cells {
        let b = |x: bool| if x { 1 } else { 0 };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            cell.a,
            cell.c,
            b(cell.criteria.c1),
            b(cell.criteria.c2),
            b(cell.criteria.c3),
            b(cell.criteria.thm2),
            b(cell.criteria.thm3),
            cell.criteria.summary.label(),
            cell.empirical.converged,
            cell.empirical.oscillatory,
            cell.agreement.label(),
        )?;
    }
    Ok(())
}

pub fn write_json<W: Write, T: Serialize>(value: &T, mut w: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)
}

/// Write a sweep result to `path` in the chosen format.
pub fn export(result: &SweepResult, format: ExportFormat, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io { path: path.display().to_string(), source };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    let res = match format {
        ExportFormat::Csv => write_csv(result, &mut w),
        ExportFormat::Json => write_json(result, &mut w),
    };
    res.and_then(|_| w.flush()).map_err(io_err)
}
