//! Catalog of feedback nonlinearities with declared analytic metadata.
//!
//! Every kind fixes f(0) = 0, so the origin is the unique equilibrium of
//! the recursion driven by f. Each kind also declares the analytic data
//! the stability criteria consume as hypotheses:
//!
//! * a sector bound `a` with |f(t)| <= a|t|, together with the threshold
//!   `t0` beyond which the bound is declared to hold (t0 = 0 means the
//!   bound is global),
//! * the slope of f at zero (finite, two-sided, or divergent),
//! * sign-structure flags.
//!
//! The metadata is computed from the closed form of each kind, never
//! estimated from samples: a limit at zero is not something a sampler can
//! certify. [`NonlinearitySpec::verify_sector`] exists to cross-check the
//! declarations numerically, not to produce them.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Closed-form nonlinearity families.
#[derive(Debug, Clone, PartialEq)]
pub enum Kind {
    /// f(t) = -a t. The family whose characteristic root drops below -1;
    /// used to witness sharpness of the attractivity thresholds.
    LinearNegative { a: f64 },
    /// f(t) = a t.
    LinearPositive { a: f64 },
    /// f(t) = a tanh t. The discrete single-neuron activation.
    ScaledTanh { a: f64 },
    /// f(t) = |t|^lambda sgn t with lambda in (0, 1). The ratio f(t)/t
    /// blows up at zero; the sector bound 1 only holds for |t| >= 1.
    SublinearPower { lambda: f64 },
    /// f(t) = a max(t, 0).
    Ramp { a: f64 },
    /// Piecewise linear interpolant through `nodes` (strictly increasing
    /// in t, passing through the origin), extended beyond the end nodes
    /// with the end segment slopes.
    PiecewiseLinear { nodes: Vec<(f64, f64)> },
    /// f(t) = min(a max(t, 0), cap): a ramp saturating at `cap`.
    BoundedSaturating { a: f64, cap: f64 },
}

/// Slope of f at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeAtZero {
    Finite(f64),
    /// One-sided slopes differ (ramp-like kinds).
    TwoSided { left: f64, right: f64 },
    /// f(t)/t grows without bound as t -> 0.
    Divergent,
}

impl SlopeAtZero {
    /// The slope as a single number when the two one-sided slopes agree.
    pub fn as_finite(&self) -> Option<f64> {
        match *self {
            SlopeAtZero::Finite(s) => Some(s),
            SlopeAtZero::TwoSided { left, right } if left == right => Some(left),
            _ => None,
        }
    }
}

/// Declared sign/shape structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    /// t f(t) >= 0 for all t.
    pub sign_preserving: bool,
    /// f(t) >= 0 for all t.
    pub nonnegative: bool,
    /// The sector bound holds for all t, not just |t| >= t0.
    pub globally_sectored: bool,
    /// 0 < f(t)/t <= f'(0) for all t != 0 (the ratio is maximized at the
    /// origin and f is differentiable there).
    pub ratio_peak_at_zero: bool,
}

/// Bundle of the declared analytic metadata for one nonlinearity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyRecord {
    pub sector_bound: f64,
    pub t0: f64,
    pub slope_at_zero: SlopeAtZero,
    pub flags: Flags,
}

/// Outcome of sampling |f(t)|/|t| against the declared sector bound.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorReport {
    pub declared_bound: f64,
    pub t0: f64,
    /// Bound holds on every sample (global claim).
    pub global_pass: bool,
    /// Bound holds on every sample with |t| >= t0.
    pub asymptotic_pass: bool,
    pub max_ratio_global: f64,
    pub max_ratio_asymptotic: f64,
    /// Sample t violating the global claim, if any.
    pub global_witness: Option<f64>,
    pub asymptotic_witness: Option<f64>,
    pub samples: usize,
}

/// A validated nonlinearity.
#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearitySpec {
    kind: Kind,
}

/// Slack allowed when the sampled ratio is compared to the declared bound;
/// absorbs round-off for kinds that attain the bound exactly.
pub const SECTOR_SLACK: f64 = 1e-12;

impl NonlinearitySpec {
    pub fn new(kind: Kind) -> Result<Self> {
        match &kind {
            Kind::LinearNegative { a }
            | Kind::LinearPositive { a }
            | Kind::ScaledTanh { a }
            | Kind::Ramp { a } => {
                if !a.is_finite() || *a <= 0.0 {
                    return Err(Error::InvalidNonlinearity(format!(
                        "gain a = {a} must be finite and positive"
                    )));
                }
            }
            Kind::SublinearPower { lambda } => {
                if !(*lambda > 0.0 && *lambda < 1.0) {
                    return Err(Error::InvalidNonlinearity(format!(
                        "lambda = {lambda} must lie in (0, 1)"
                    )));
                }
            }
            Kind::BoundedSaturating { a, cap } => {
                if !a.is_finite() || *a <= 0.0 || !cap.is_finite() || *cap <= 0.0 {
                    return Err(Error::InvalidNonlinearity(format!(
                        "require a > 0 and cap > 0, got a = {a}, cap = {cap}"
                    )));
                }
            }
            Kind::PiecewiseLinear { nodes } => validate_pwl(nodes)?,
        }
        Ok(Self { kind })
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    /// f(t). Total on finite inputs; sgn 0 = 0 so every kind maps 0 to 0.
    pub fn evaluate(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::LinearNegative { a } => -a * t,
            Kind::LinearPositive { a } => a * t,
            Kind::ScaledTanh { a } => a * t.tanh(),
            Kind::SublinearPower { lambda } => {
                if t > 0.0 {
                    t.powf(*lambda)
                } else if t < 0.0 {
                    -(-t).powf(*lambda)
                } else {
                    0.0
                }
            }
            Kind::Ramp { a } => a * t.max(0.0),
            Kind::PiecewiseLinear { nodes } => eval_pwl(nodes, t),
            Kind::BoundedSaturating { a, cap } => (a * t.max(0.0)).min(*cap),
        }
    }

    /// Declared metadata, computed from the closed form.
    pub fn properties(&self) -> PropertyRecord {
        match &self.kind {
            Kind::LinearNegative { a } => PropertyRecord {
                sector_bound: *a,
                t0: 0.0,
                slope_at_zero: SlopeAtZero::Finite(-*a),
                flags: Flags {
                    sign_preserving: false,
                    nonnegative: false,
                    globally_sectored: true,
                    ratio_peak_at_zero: false,
                },
            },
            Kind::LinearPositive { a } => PropertyRecord {
                sector_bound: *a,
                t0: 0.0,
                slope_at_zero: SlopeAtZero::Finite(*a),
                flags: Flags {
                    sign_preserving: true,
                    nonnegative: false,
                    globally_sectored: true,
                    ratio_peak_at_zero: true,
                },
            },
            Kind::ScaledTanh { a } => PropertyRecord {
                // |tanh t| <= |t|, with f(t)/t decreasing in |t|.
                sector_bound: *a,
                t0: 0.0,
                slope_at_zero: SlopeAtZero::Finite(*a),
                flags: Flags {
                    sign_preserving: true,
                    nonnegative: false,
                    globally_sectored: true,
                    ratio_peak_at_zero: true,
                },
            },
            Kind::SublinearPower { .. } => PropertyRecord {
                // |t|^(lambda-1) <= 1 exactly when |t| >= 1.
                sector_bound: 1.0,
                t0: 1.0,
                slope_at_zero: SlopeAtZero::Divergent,
                flags: Flags {
                    sign_preserving: true,
                    nonnegative: false,
                    globally_sectored: false,
                    ratio_peak_at_zero: false,
                },
            },
            Kind::Ramp { a } => PropertyRecord {
                sector_bound: *a,
                t0: 0.0,
                slope_at_zero: SlopeAtZero::TwoSided { left: 0.0, right: *a },
                flags: Flags {
                    sign_preserving: true,
                    nonnegative: true,
                    globally_sectored: true,
                    // f(t)/t = 0 for t < 0, so 0 < f(t)/t fails.
                    ratio_peak_at_zero: false,
                },
            },
            Kind::PiecewiseLinear { nodes } => pwl_properties(nodes),
            Kind::BoundedSaturating { a, .. } => PropertyRecord {
                sector_bound: *a,
                t0: 0.0,
                slope_at_zero: SlopeAtZero::TwoSided { left: 0.0, right: *a },
                flags: Flags {
                    sign_preserving: true,
                    nonnegative: true,
                    globally_sectored: true,
                    ratio_peak_at_zero: false,
                },
            },
        }
    }

    /// Sample |f(t)|/|t| on a log-spaced grid over [-range, range] \ {0}
    /// and test the declared sector bound, globally and restricted to
    /// |t| >= t0. A failure carries the witness sample.
    ///
    /// `samples` is the number of magnitudes per sign; at least 100.
    pub fn verify_sector(&self, samples: usize, range: f64) -> Result<SectorReport> {
        if samples < 100 {
            return Err(Error::InvalidConfig(format!(
                "verify_sector needs >= 100 samples, got {samples}"
            )));
        }
        if !range.is_finite() || range <= 0.0 {
            return Err(Error::InvalidConfig(format!("range = {range} must be positive")));
        }
        let props = self.properties();
        let bound = props.sector_bound + SECTOR_SLACK;

        let lo_mag: f64 = 1e-9_f64.min(range / 2.0);
        let log_lo = lo_mag.log10();
        let log_hi = range.log10();
        let mut report = SectorReport {
            declared_bound: props.sector_bound,
            t0: props.t0,
            global_pass: true,
            asymptotic_pass: true,
            max_ratio_global: 0.0,
            max_ratio_asymptotic: 0.0,
            global_witness: None,
            asymptotic_witness: None,
            samples: 2 * samples,
        };
        for i in 0..samples {
            let frac = i as f64 / (samples - 1) as f64;
            let mag = 10f64.powf(log_lo + frac * (log_hi - log_lo));
            for t in [mag, -mag] {
                let ratio = self.evaluate(t).abs() / t.abs();
                if ratio > report.max_ratio_global {
                    report.max_ratio_global = ratio;
                }
                if ratio > bound {
                    report.global_pass = false;
                    report.global_witness.get_or_insert(t);
                }
                if t.abs() >= props.t0 {
                    if ratio > report.max_ratio_asymptotic {
                        report.max_ratio_asymptotic = ratio;
                    }
                    if ratio > bound {
                        report.asymptotic_pass = false;
                        report.asymptotic_witness.get_or_insert(t);
                    }
                }
            }
        }
        Ok(report)
    }
}

fn validate_pwl(nodes: &[(f64, f64)]) -> Result<()> {
    if nodes.len() < 2 {
        return Err(Error::InvalidNonlinearity(
            "piecewise linear needs at least 2 nodes".into(),
        ));
    }
    for (t, v) in nodes {
        if !t.is_finite() || !v.is_finite() {
            return Err(Error::InvalidNonlinearity(format!(
                "non-finite node ({t}, {v})"
            )));
        }
    }
    for w in nodes.windows(2) {
        if w[0].0 >= w[1].0 {
            return Err(Error::InvalidNonlinearity(format!(
                "node abscissae must be strictly increasing, got {} then {}",
                w[0].0, w[1].0
            )));
        }
    }
    if eval_pwl(nodes, 0.0) != 0.0 {
        return Err(Error::InvalidNonlinearity(
            "interpolant must pass through (0, 0)".into(),
        ));
    }
    Ok(())
}

fn eval_pwl(nodes: &[(f64, f64)], t: f64) -> f64 {
    let n = nodes.len();
    let seg = |i: usize| (nodes[i + 1].1 - nodes[i].1) / (nodes[i + 1].0 - nodes[i].0);
    if t <= nodes[0].0 {
        return nodes[0].1 + seg(0) * (t - nodes[0].0);
    }
    if t >= nodes[n - 1].0 {
        return nodes[n - 1].1 + seg(n - 2) * (t - nodes[n - 1].0);
    }
    // nodes[i].0 < t <= nodes[i+1].0
    let i = nodes.partition_point(|&(x, _)| x < t) - 1;
    nodes[i].1 + seg(i) * (t - nodes[i].0)
}

fn pwl_properties(nodes: &[(f64, f64)]) -> PropertyRecord {
    let n = nodes.len();
    let seg = |i: usize| (nodes[i + 1].1 - nodes[i].1) / (nodes[i + 1].0 - nodes[i].0);
    let first_slope = seg(0);
    let last_slope = seg(n - 2);

    // One-sided slopes at the origin.
    let (left0, right0) = match nodes.iter().position(|&(t, _)| t == 0.0) {
        Some(k) => {
            let left = if k == 0 { first_slope } else { seg(k - 1) };
            let right = if k == n - 1 { last_slope } else { seg(k) };
            (left, right)
        }
        None => {
            // Origin interior to a segment (or in an extrapolated region);
            // the interpolant passes through it, so both slopes agree.
            if 0.0 < nodes[0].0 {
                (first_slope, first_slope)
            } else if 0.0 > nodes[n - 1].0 {
                (last_slope, last_slope)
            } else {
                let i = nodes.partition_point(|&(x, _)| x < 0.0) - 1;
                (seg(i), seg(i))
            }
        }
    };

    // |f(t)/t| is piecewise monotone, so its sup over all t is attained at
    // a node, at the origin, or asymptotically (end segment slopes).
    let mut bound: f64 = first_slope.abs().max(last_slope.abs());
    bound = bound.max(left0.abs()).max(right0.abs());
    for &(t, v) in nodes {
        if t != 0.0 {
            bound = bound.max((v / t).abs());
        }
    }

    let sign_preserving = nodes.iter().all(|&(t, v)| t * v >= 0.0)
        && first_slope >= 0.0
        && last_slope >= 0.0;
    let nonnegative =
        nodes.iter().all(|&(_, v)| v >= 0.0) && first_slope <= 0.0 && last_slope >= 0.0;

    let ratio_peak_at_zero = left0 == right0 && left0 > 0.0 && {
        let s0 = left0;
        first_slope > 0.0
            && first_slope <= s0
            && last_slope > 0.0
            && last_slope <= s0
            && nodes
                .iter()
                .filter(|&&(t, _)| t != 0.0)
                .all(|&(t, v)| v / t > 0.0 && v / t <= s0)
    };

    let slope_at_zero = if left0 == right0 {
        SlopeAtZero::Finite(left0)
    } else {
        SlopeAtZero::TwoSided { left: left0, right: right0 }
    };

    PropertyRecord {
        sector_bound: bound,
        t0: 0.0,
        slope_at_zero,
        flags: Flags {
            sign_preserving,
            nonnegative,
            globally_sectored: true,
            ratio_peak_at_zero,
        },
    }
}

// --- compact textual form -------------------------------------------------
//
//   tanh:a=0.8
//   linneg:a=0.6        linpos:a=0.4
//   sublinear:lambda=0.5
//   ramp:a=0.9
//   sat:a=0.9,cap=2.5
//   pwl:(-1,-0.5);(0,0);(1,0.5)

impl fmt::Display for NonlinearitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::LinearNegative { a } => write!(f, "linneg:a={a}"),
            Kind::LinearPositive { a } => write!(f, "linpos:a={a}"),
            Kind::ScaledTanh { a } => write!(f, "tanh:a={a}"),
            Kind::SublinearPower { lambda } => write!(f, "sublinear:lambda={lambda}"),
            Kind::Ramp { a } => write!(f, "ramp:a={a}"),
            Kind::BoundedSaturating { a, cap } => write!(f, "sat:a={a},cap={cap}"),
            Kind::PiecewiseLinear { nodes } => {
                write!(f, "pwl:")?;
                for (i, (t, v)) in nodes.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "({t},{v})")?;
                }
                Ok(())
            }
        }
    }
}

fn parse_err(input: &str, reason: impl Into<String>) -> Error {
    Error::Parse { input: input.into(), reason: reason.into() }
}

fn parse_params<'a>(input: &str, body: &'a str, expected: &[&str]) -> Result<Vec<(&'a str, f64)>> {
    let mut out = Vec::new();
    for part in body.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| parse_err(input, format!("expected key=value, got `{part}`")))?;
        let k = k.trim();
        if !expected.contains(&k) {
            return Err(parse_err(input, format!("unknown parameter `{k}`")));
        }
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| parse_err(input, format!("bad number `{v}`")))?;
        out.push((k, v));
    }
    Ok(out)
}

fn lookup(params: &[(&str, f64)], key: &str, input: &str) -> Result<f64> {
    params
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| parse_err(input, format!("missing parameter `{key}`")))
}

impl FromStr for NonlinearitySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, body) = s
            .split_once(':')
            .ok_or_else(|| parse_err(s, "expected `kind:params`"))?;
        let kind = match name.trim() {
            "tanh" => Kind::ScaledTanh { a: lookup(&parse_params(s, body, &["a"])?, "a", s)? },
            "linneg" => Kind::LinearNegative { a: lookup(&parse_params(s, body, &["a"])?, "a", s)? },
            "linpos" => Kind::LinearPositive { a: lookup(&parse_params(s, body, &["a"])?, "a", s)? },
            "ramp" => Kind::Ramp { a: lookup(&parse_params(s, body, &["a"])?, "a", s)? },
            "sublinear" => Kind::SublinearPower {
                lambda: lookup(&parse_params(s, body, &["lambda"])?, "lambda", s)?,
            },
            "sat" => {
                let p = parse_params(s, body, &["a", "cap"])?;
                Kind::BoundedSaturating { a: lookup(&p, "a", s)?, cap: lookup(&p, "cap", s)? }
            }
            "pwl" => {
                let mut nodes = Vec::new();
                for piece in body.split(';') {
                    let piece = piece.trim();
                    let inner = piece
                        .strip_prefix('(')
                        .and_then(|p| p.strip_suffix(')'))
                        .ok_or_else(|| parse_err(s, format!("expected `(t,v)`, got `{piece}`")))?;
                    let (t, v) = inner
                        .split_once(',')
                        .ok_or_else(|| parse_err(s, format!("expected `(t,v)`, got `{piece}`")))?;
                    let t: f64 = t.trim().parse().map_err(|_| parse_err(s, "bad node abscissa"))?;
                    let v: f64 = v.trim().parse().map_err(|_| parse_err(s, "bad node ordinate"))?;
                    nodes.push((t, v));
                }
                Kind::PiecewiseLinear { nodes }
            }
            other => return Err(parse_err(s, format!("unknown kind `{other}`"))),
        };
        NonlinearitySpec::new(kind)
    }
}

impl Serialize for NonlinearitySpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NonlinearitySpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}
