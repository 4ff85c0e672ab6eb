//! Quadratic certificates for the difference recursion.
//!
//! Along any y-orbit, with positive weights beta and gamma, define
//!
//! ```text
//! V[n] = beta (y[n] - f(y[n-1]))^2 + gamma (f(y[n-1]))^2,   n >= 2.
//! ```
//!
//! For sector-bounded f the increment satisfies `dV[n] <= -A y[n]^2` with
//!
//! ```text
//! A = -gamma a^2 - (beta^2/gamma)(1 - c)^2 + beta (1 - c^2),
//! ```
//!
//! and A > 0 precisely when beta/gamma lies in the open interval with
//! endpoints (1 + c -+ sqrt((1 + c)^2 - 4 a^2)) / (2 (1 - c)) — nonempty
//! exactly when a < (1 + c)/2. For nonnegative sector-bounded f, once the
//! x-orbit settles on a positive tail the sharper bound y[n] < l f(y[n-1])
//! applies and any gamma/beta in (2 (1 - c) l, (1 - c^2)/a^2) gives
//! `dV[n] <= -B y[n]^2` with B = beta (1 - c^2) - gamma a^2 > 0; that
//! window is nonempty exactly when a^2 < (1 + c)/(2 l). Telescoping either
//! bound forces the convergence of sum y[n]^2.
//!
//! The weights are only constrained through their ratio, so certificates
//! are normalized: gamma = 1 for the sector form, beta = 1 for the
//! nonnegative form. The default ratio choice is the window midpoint,
//! which maximizes margin against round-off near the endpoints.

use serde::{Deserialize, Serialize};

use crate::criteria::thm3_ell;
use crate::dynamics::{difference_orbit, OrbitKind, Termination, Trajectory};
use crate::error::{Error, Result};

/// Which decrease argument a certificate instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TheoremId {
    /// Sector-bounded f, ratio window on beta/gamma.
    #[serde(rename = "THM2")]
    SectorBounded,
    /// Nonnegative sector-bounded f, ratio window on gamma/beta.
    #[serde(rename = "THM3")]
    NonnegativeTail,
}

impl TheoremId {
    fn label(&self) -> &'static str {
        match self {
            TheoremId::SectorBounded => "THM2",
            TheoremId::NonnegativeTail => "THM3",
        }
    }
}

/// Open feasibility window for beta/gamma: A(r) > 0 between the two roots
/// of (1-c)^2 r^2 - (1-c^2) r + a^2. `None` when a >= (1 + c)/2.
pub fn window_thm2(a: f64, c: f64) -> Option<(f64, f64)> {
    let disc = (1.0 + c) * (1.0 + c) - 4.0 * a * a;
    if disc <= 0.0 {
        return None;
    }
    let s = disc.sqrt();
    let denom = 2.0 * (1.0 - c);
    Some(((1.0 + c - s) / denom, (1.0 + c + s) / denom))
}

/// Open feasibility window for gamma/beta: (2 (1-c) l, (1-c^2)/a^2).
/// `None` exactly when the nonnegative-tail condition a^2 < (1+c)/(2l)
/// fails.
pub fn window_thm3(a: f64, c: f64) -> Option<(f64, f64)> {
    let lo = 2.0 * (1.0 - c) * thm3_ell(a, c);
    let hi = (1.0 - c * c) / (a * a);
    if lo < hi {
        Some((lo, hi))
    } else {
        None
    }
}

/// Weights and decrease constant drawn from a feasibility window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovCertificate {
    pub theorem: TheoremId,
    pub a: f64,
    pub c: f64,
    pub beta: f64,
    pub gamma: f64,
    /// A for the sector form, B for the nonnegative form.
    pub decrease_constant: f64,
    /// Window the defining ratio was drawn from.
    pub window: (f64, f64),
}

/// Point inside the feasibility window, as a fraction of its width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RatioChoice {
    Midpoint,
    /// Fraction in (0, 1): lo + fraction * (hi - lo).
    Fraction(f64),
}

impl RatioChoice {
    fn pick(&self, lo: f64, hi: f64) -> Result<f64> {
        let frac = match *self {
            RatioChoice::Midpoint => 0.5,
            RatioChoice::Fraction(f) => {
                if !(f > 0.0 && f < 1.0) {
                    return Err(Error::InvalidRatioChoice(f));
                }
                f
            }
        };
        Ok(lo + frac * (hi - lo))
    }
}

/// Decrease constant of the sector form at weights (beta, gamma).
pub fn decrease_constant_thm2(a: f64, c: f64, beta: f64, gamma: f64) -> f64 {
    -gamma * a * a - beta * beta / gamma * (1.0 - c) * (1.0 - c) + beta * (1.0 - c * c)
}

/// Construct a certificate from the chosen ratio inside the feasibility
/// window. Returns the typed infeasibility error when the window is empty.
pub fn make_certificate(
    a: f64,
    c: f64,
    theorem: TheoremId,
    ratio_choice: RatioChoice,
) -> Result<LyapunovCertificate> {
    match theorem {
        TheoremId::SectorBounded => {
            let (lo, hi) = window_thm2(a, c).ok_or(Error::InfeasibleWindow {
                theorem: theorem.label(),
                a,
                c,
            })?;
            let ratio = ratio_choice.pick(lo, hi)?;
            let (beta, gamma) = (ratio, 1.0);
            let decrease_constant = decrease_constant_thm2(a, c, beta, gamma);
            Ok(LyapunovCertificate { theorem, a, c, beta, gamma, decrease_constant, window: (lo, hi) })
        }
        TheoremId::NonnegativeTail => {
            let (lo, hi) = window_thm3(a, c).ok_or(Error::InfeasibleWindow {
                theorem: theorem.label(),
                a,
                c,
            })?;
            let ratio = ratio_choice.pick(lo, hi)?;
            let (beta, gamma) = (1.0, ratio);
            let decrease_constant = beta * (1.0 - c * c) - gamma * a * a;
            Ok(LyapunovCertificate { theorem, a, c, beta, gamma, decrease_constant, window: (lo, hi) })
        }
    }
}

/// V values and increments along one y-orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovTrace {
    /// values[i] = V at orbit position i+1 (the first V uses y1, y2).
    pub values: Vec<f64>,
    /// deltas[i] = values[i+1] - values[i].
    pub deltas: Vec<f64>,
    /// The y values the trace was computed from.
    ys: Vec<f64>,
    c: f64,
}

impl LyapunovTrace {
    pub fn ys(&self) -> &[f64] {
        &self.ys
    }
}

/// Evaluate V along a y-orbit. Needs at least 3 values so at least one
/// increment exists.
pub fn trace(cert: &LyapunovCertificate, orbit: &Trajectory) -> Result<LyapunovTrace> {
    if orbit.kind() != OrbitKind::YOrbit {
        return Err(Error::WrongOrbitKind { expected: "y-orbit", got: orbit.kind().label() });
    }
    if orbit.len() < 3 {
        return Err(Error::TooShort { need: 3, got: orbit.len() });
    }
    if orbit.spec().c() != cert.c {
        return Err(Error::SpecMismatch(format!(
            "certificate built for c = {}, orbit has c = {}",
            cert.c,
            orbit.spec().c()
        )));
    }
    let f = orbit.spec().nonlinearity();
    let ys = orbit.values();
    let mut values = Vec::with_capacity(ys.len() - 1);
    for n in 1..ys.len() {
        let fp = f.evaluate(ys[n - 1]);
        let v = cert.beta * (ys[n] - fp) * (ys[n] - fp) + cert.gamma * fp * fp;
        values.push(v);
    }
    let deltas = values.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(LyapunovTrace { values, deltas, ys: ys.to_vec(), c: orbit.spec().c() })
}

/// Outcome of checking `dV[n] <= -K y[n]^2 + tol` pointwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub theorem: TheoremId,
    pub verified: bool,
    /// Orbit position (in the y numbering, first value = 1) of the first
    /// violating increment.
    pub first_violation: Option<usize>,
    /// Number of increments checked.
    pub checked: usize,
    /// Convergence witness: sum of y[n]^2 over the checked range.
    pub sum_y_squared: f64,
    /// Telescoping bound V_first / K that the witness must respect.
    pub telescope_bound: f64,
    /// Largest observed dV[n] + K y[n]^2 (<= tol when verified).
    pub max_excess: f64,
    /// For the nonnegative form: index into the x-orbit where the
    /// constant-sign tail the check ran on begins.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_start: Option<usize>,
}

/// Check the decrease inequality along a trace.
pub fn verify_decrease(
    tr: &LyapunovTrace,
    cert: &LyapunovCertificate,
    tol: f64,
) -> Result<VerificationReport> {
    if tr.c != cert.c {
        return Err(Error::SpecMismatch(format!(
            "trace from c = {}, certificate for c = {}",
            tr.c, cert.c
        )));
    }
    let k = cert.decrease_constant;
    let mut verified = true;
    let mut first_violation = None;
    let mut max_excess = f64::NEG_INFINITY;
    let mut sum_y_squared = 0.0;
    for (i, &dv) in tr.deltas.iter().enumerate() {
        // deltas[i] = V[i+2] - V[i+1] in orbit positions; the bound uses
        // the y value at position i+2, i.e. ys[i+1].
        let y = tr.ys[i + 1];
        sum_y_squared += y * y;
        let excess = dv + k * y * y;
        if excess > max_excess {
            max_excess = excess;
        }
        if excess > tol && verified {
            verified = false;
            first_violation = Some(i + 2);
        }
    }
    let telescope_bound = if k > 0.0 { tr.values[0] / k } else { f64::INFINITY };
    Ok(VerificationReport {
        theorem: cert.theorem,
        verified,
        first_violation,
        checked: tr.deltas.len(),
        sum_y_squared,
        telescope_bound,
        max_excess,
        tail_start: None,
    })
}

/// First index after which an orbit's sign never changes, treating values
/// as nonnegative/negative. Returns `values.len() - 1` when even the last
/// two values disagree.
pub fn constant_sign_tail_start(values: &[f64]) -> usize {
    let mut start = 0;
    for n in 1..values.len() {
        if (values[n] >= 0.0) != (values[n - 1] >= 0.0) {
            start = n;
        }
    }
    start
}

/// Verify a certificate against a simulated x-orbit.
///
/// The sector form is checked along the entire differenced orbit. The
/// nonnegative form only claims the decrease on the eventually-one-sign
/// tail, and only the positive case needs the certificate (a negative tail
/// increases monotonically toward zero), so the check runs on the
/// differenced positive tail; `checked = 0` reports a negative tail.
pub fn verify_certificate_on_orbit(
    cert: &LyapunovCertificate,
    xorbit: &Trajectory,
    tol: f64,
) -> Result<VerificationReport> {
    if xorbit.kind() != OrbitKind::XOrbit {
        return Err(Error::WrongOrbitKind { expected: "x-orbit", got: xorbit.kind().label() });
    }
    match cert.theorem {
        TheoremId::SectorBounded => {
            let y = difference_orbit(xorbit)?;
            let tr = trace(cert, &y)?;
            verify_decrease(&tr, cert, tol)
        }
        TheoremId::NonnegativeTail => {
            let start = constant_sign_tail_start(xorbit.values());
            let tail = &xorbit.values()[start..];
            if tail.len() < 4 || tail[0] < 0.0 {
                // Negative (or too-short) tail: the decrease claim is not
                // made there. Report vacuous success.
                return Ok(VerificationReport {
                    theorem: cert.theorem,
                    verified: true,
                    first_violation: None,
                    checked: 0,
                    sum_y_squared: 0.0,
                    telescope_bound: f64::INFINITY,
                    max_excess: f64::NEG_INFINITY,
                    tail_start: Some(start),
                });
            }
            let tail_orbit = Trajectory::from_values(
                xorbit.spec().clone(),
                OrbitKind::XOrbit,
                Termination::HorizonReached,
                tail.to_vec(),
            )?;
            let y = difference_orbit(&tail_orbit)?;
            let tr = trace(cert, &y)?;
            let mut report = verify_decrease(&tr, cert, tol)?;
            report.tail_start = Some(start);
            Ok(report)
        }
    }
}
