//! Finite-orbit classification and the linear comparison roots.
//!
//! A solution oscillates when it is neither eventually positive nor
//! eventually negative. On a finite run that is necessarily a heuristic:
//! the verdict here counts strict sign alternations over a tail window of
//! the orbit, after dropping entries whose magnitude is below a relative
//! zero tolerance (round-off about zero on a converging orbit would
//! otherwise read as sign changes, and a converged run's trailing
//! sub-tolerance stretch would otherwise crowd genuine alternations out of
//! the window). Two or more alternations in the tail read as oscillatory,
//! zero as nonoscillatory, and anything in between stays undetermined
//! rather than guessed.

use serde::Serialize;

use crate::criteria::oscillation_band;
use crate::dynamics::{Termination, Trajectory};

/// Count strict sign alternations, skipping entries with |value| <= zero_tol.
pub fn sign_changes(seq: &[f64], zero_tol: f64) -> usize {
    let mut changes = 0;
    let mut prev: Option<bool> = None;
    for &v in seq {
        if v.abs() <= zero_tol {
            continue;
        }
        let positive = v > 0.0;
        if let Some(p) = prev {
            if p != positive {
                changes += 1;
            }
        }
        prev = Some(positive);
    }
    changes
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyParams {
    /// Cap on the tail window length.
    pub tail_cap: usize,
    /// Relative zero tolerance: entries below `zero_tol_rel * max|value|`
    /// are treated as zero.
    pub zero_tol_rel: f64,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        Self { tail_cap: 500, zero_tol_rel: 1e-13 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Oscillation {
    Oscillatory,
    Nonoscillatory,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitBehavior {
    ConvergesToZero,
    Diverges,
    MonotoneBounded,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationVerdict {
    pub oscillation: Oscillation,
    pub limit_behavior: LimitBehavior,
    /// For nonoscillatory verdicts: whether x[n] (x[n+1] - x[n]) < 0 across
    /// the tail, the signature of a one-signed orbit creeping to zero.
    pub lemma1_holds: Option<bool>,
    /// Index into the orbit where the tail window begins.
    pub tail_start: usize,
    /// Sign alternations counted in the tail window.
    pub sign_changes: usize,
}

/// Classify a finite orbit.
///
/// The tail window is the last `min(tail_cap, m/2)` of the m entries that
/// survive the zero tolerance; fewer than 4 surviving entries (or a window
/// shorter than 2) is reported undetermined.
pub fn classify(traj: &Trajectory, params: &ClassifyParams) -> ClassificationVerdict {
    let values = traj.values();
    let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let zero_tol = params.zero_tol_rel * max_abs;

    let valid: Vec<usize> = (0..values.len())
        .filter(|&i| values[i].abs() > zero_tol)
        .collect();

    let window = params.tail_cap.min(valid.len() / 2);
    if valid.len() < 4 || window < 2 {
        return ClassificationVerdict {
            oscillation: Oscillation::Undetermined,
            limit_behavior: limit_from_termination(traj.termination(), None),
            lemma1_holds: None,
            tail_start: values.len(),
            sign_changes: 0,
        };
    }

    let tail_idx = &valid[valid.len() - window..];
    let tail_start = tail_idx[0];
    let tail_end = *tail_idx.last().unwrap();
    let tail_values: Vec<f64> = tail_idx.iter().map(|&i| values[i]).collect();
    let changes = sign_changes(&tail_values, 0.0);

    let oscillation = match changes {
        0 => Oscillation::Nonoscillatory,
        1 => Oscillation::Undetermined,
        _ => Oscillation::Oscillatory,
    };

    // Monotonicity over the tail span, on original consecutive pairs.
    let mut monotone_up = true;
    let mut monotone_down = true;
    for n in tail_start..tail_end {
        let d = values[n + 1] - values[n];
        if d > zero_tol {
            monotone_down = false;
        }
        if d < -zero_tol {
            monotone_up = false;
        }
    }
    let monotone = monotone_up || monotone_down;

    let lemma1_holds = if oscillation == Oscillation::Nonoscillatory {
        let mut holds = true;
        for n in tail_start..tail_end {
            let x = values[n];
            let d = values[n + 1] - values[n];
            if x.abs() <= zero_tol || d.abs() <= zero_tol {
                continue;
            }
            if x * d >= 0.0 {
                holds = false;
                break;
            }
        }
        Some(holds)
    } else {
        None
    };

    let limit_behavior = limit_from_termination(
        traj.termination(),
        Some(oscillation == Oscillation::Nonoscillatory && monotone),
    );

    ClassificationVerdict {
        oscillation,
        limit_behavior,
        lemma1_holds,
        tail_start,
        sign_changes: changes,
    }
}

fn limit_from_termination(t: Termination, monotone_tail: Option<bool>) -> LimitBehavior {
    match t {
        Termination::Converged => LimitBehavior::ConvergesToZero,
        Termination::Diverged => LimitBehavior::Diverges,
        Termination::HorizonReached => match monotone_tail {
            Some(true) => LimitBehavior::MonotoneBounded,
            _ => LimitBehavior::Undetermined,
        },
    }
}

// --- characteristic roots ---------------------------------------------------

/// Which comparison polynomial to solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootMode {
    /// lambda^2 - (c + alpha) lambda + alpha = 0: the linear comparison for
    /// a slope-alpha feedback at zero.
    SlopeComparison { alpha: f64 },
    /// lambda^2 - (c - a) lambda - a = 0: the exact polynomial of the
    /// linear feedback f(t) = -a t.
    LinearNegative { a: f64 },
}

/// One root as a complex number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    pub re: f64,
    pub im: f64,
}

impl Root {
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn is_real(&self) -> bool {
        self.im == 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharacteristicRoots {
    pub mode: RootMode,
    /// Both roots, ordered by modulus descending.
    pub roots: [Root; 2],
    pub modulus_max: f64,
    /// Both roots real and positive: the nonoscillation signature of the
    /// comparison equation.
    pub both_real_positive: bool,
}

/// Solve the mode's quadratic with the cancellation-safe formula.
pub fn characteristic_roots(mode: RootMode, c: f64) -> CharacteristicRoots {
    // lambda^2 - p lambda + q = 0
    let (p, q) = match mode {
        RootMode::SlopeComparison { alpha } => (c + alpha, alpha),
        RootMode::LinearNegative { a } => (c - a, -a),
    };
    let disc = p * p - 4.0 * q;
    let (r1, r2) = if disc >= 0.0 {
        let s = disc.sqrt();
        if q == 0.0 {
            (Root { re: p, im: 0.0 }, Root { re: 0.0, im: 0.0 })
        } else {
            // avoid cancellation: take the half with |p| + s first
            let big = if p >= 0.0 { (p + s) / 2.0 } else { (p - s) / 2.0 };
            (Root { re: big, im: 0.0 }, Root { re: q / big, im: 0.0 })
        }
    } else {
        let s = (-disc).sqrt() / 2.0;
        (Root { re: p / 2.0, im: s }, Root { re: p / 2.0, im: -s })
    };
    let (first, second) = if r1.modulus() >= r2.modulus() { (r1, r2) } else { (r2, r1) };
    let both_real_positive = first.is_real() && first.re > 0.0 && second.re > 0.0;
    CharacteristicRoots {
        mode,
        roots: [first, second],
        modulus_max: first.modulus(),
        both_real_positive,
    }
}

/// Cross-check: the comparison roots are real and positive exactly when the
/// slope lies outside the open oscillation band.
pub fn band_consistency(alpha: f64, c: f64) -> bool {
    let roots = characteristic_roots(RootMode::SlopeComparison { alpha }, c);
    let (lo, hi) = oscillation_band(c);
    let outside_open_band = !(alpha > lo && alpha < hi);
    roots.both_real_positive == outside_open_band
}
