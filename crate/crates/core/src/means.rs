//! The classical bivariate means and their continuous extensions.
//!
//! Every mean is evaluated on the canonical ordering `lo <= hi` of its
//! arguments, so `evaluate(k, (x, y))` and `evaluate(k, (y, x))` run the same
//! floating-point operations and agree bit for bit. The logarithmic, identric,
//! Alzer and power means are written in terms of `d = ln(hi/lo)` and `expm1`,
//! which keeps them accurate when `x` and `y` are close.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Below this value of `ln(hi/lo)` the logarithmic and identric means switch
/// to their series about the geometric mean.
pub const DIAGONAL_SERIES_THRESHOLD: f64 = 1e-8;

/// Alzer parameters within this distance of 0 or -1 use the analytic limits.
pub const ALZER_SINGULAR_EPS: f64 = 1e-8;

/// Power-mean exponents with |t| below this use the geometric branch.
pub const POWER_GEOMETRIC_EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeanError {
    #[error("mean arguments must be positive and finite, got ({x}, {y})")]
    Domain { x: f64, y: f64 },
    #[error("mean parameter must be finite, got {0}")]
    Parameter(f64),
    #[error("unrecognised mean kind {0:?} (expected A, G, H, L, I, E, J:<p> or M:<t>)")]
    UnknownKind(String),
}

/// Two positive, finite abscissae.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivePair {
    x: f64,
    y: f64,
}

impl PositivePair {
    pub fn new(x: f64, y: f64) -> Result<Self, MeanError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if ok(x) && ok(y) {
            Ok(Self { x, y })
        } else {
            Err(MeanError::Domain { x, y })
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn lo(&self) -> f64 {
        self.x.min(self.y)
    }

    pub fn hi(&self) -> f64 {
        self.x.max(self.y)
    }

    pub fn is_diagonal(&self) -> bool {
        self.x == self.y
    }

    /// The same pair with both coordinates multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self, MeanError> {
        Self::new(self.x * factor, self.y * factor)
    }
}

/// Selects one of the supported means.
///
/// `Alzer(0)` and `Alzer(-1)` are the continuous extensions of the Alzer
/// family: the logarithmic mean and `G^2/L` respectively. `Power(0)` is the
/// geometric mean. `Ebanks` is `(xy)^(1/4) ((x+y)/2)^(1/2)`, the geometric
/// mean of `G` and `A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MeanKind {
    Arithmetic,
    Geometric,
    Harmonic,
    Logarithmic,
    Identric,
    Alzer(f64),
    Power(f64),
    Ebanks,
}

impl MeanKind {
    fn check(&self) -> Result<(), MeanError> {
        match *self {
            MeanKind::Alzer(p) | MeanKind::Power(p) if !p.is_finite() => {
                Err(MeanError::Parameter(p))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for MeanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeanKind::Arithmetic => f.write_str("A"),
            MeanKind::Geometric => f.write_str("G"),
            MeanKind::Harmonic => f.write_str("H"),
            MeanKind::Logarithmic => f.write_str("L"),
            MeanKind::Identric => f.write_str("I"),
            MeanKind::Alzer(p) => write!(f, "J:{p}"),
            MeanKind::Power(t) => write!(f, "M:{t}"),
            MeanKind::Ebanks => f.write_str("E"),
        }
    }
}

impl FromStr for MeanKind {
    type Err = MeanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let param = |rest: &str| -> Result<f64, MeanError> {
            let v: f64 = rest
                .trim()
                .parse()
                .map_err(|_| MeanError::UnknownKind(s.to_string()))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(MeanError::Parameter(v))
            }
        };
        match s {
            "A" => Ok(MeanKind::Arithmetic),
            "G" => Ok(MeanKind::Geometric),
            "H" => Ok(MeanKind::Harmonic),
            "L" => Ok(MeanKind::Logarithmic),
            "I" => Ok(MeanKind::Identric),
            "E" => Ok(MeanKind::Ebanks),
            _ => {
                if let Some(rest) = s.strip_prefix("J:") {
                    Ok(MeanKind::Alzer(param(rest)?))
                } else if let Some(rest) = s.strip_prefix("M:") {
                    Ok(MeanKind::Power(param(rest)?))
                } else {
                    Err(MeanError::UnknownKind(s.to_string()))
                }
            }
        }
    }
}

/// Evaluates the mean `kind` at `pair`.
pub fn evaluate(kind: MeanKind, pair: PositivePair) -> Result<f64, MeanError> {
    kind.check()?;
    Ok(eval_sorted(kind, pair.lo(), pair.hi()))
}

/// Convenience wrapper validating raw arguments.
pub fn mean(kind: MeanKind, x: f64, y: f64) -> Result<f64, MeanError> {
    evaluate(kind, PositivePair::new(x, y)?)
}

/// The Alzer mean through its cancellation-free representation
/// `J_p = p/(p+1) * base * E((p+1) l) / E(p l)`, where `E = expm1` and
/// `l = ln(other/base)`. Parameters within [`ALZER_SINGULAR_EPS`] of 0 or -1
/// return the limits `L` and `G^2/L`.
pub fn alzer_limit_form(p: f64, pair: PositivePair) -> Result<f64, MeanError> {
    evaluate(MeanKind::Alzer(p), pair)
}

fn eval_sorted(kind: MeanKind, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        return lo;
    }
    let v = match kind {
        MeanKind::Arithmetic => arithmetic(lo, hi),
        MeanKind::Geometric => geometric(lo, hi),
        MeanKind::Harmonic => harmonic(lo, hi),
        MeanKind::Logarithmic => logarithmic(lo, hi),
        MeanKind::Identric => identric(lo, hi),
        MeanKind::Alzer(p) => alzer(p, lo, hi),
        MeanKind::Power(t) => power(t, lo, hi),
        MeanKind::Ebanks => geometric(lo, hi).sqrt() * arithmetic(lo, hi).sqrt(),
    };
    // Every mean is internal; clamping only removes rounding excursions.
    v.clamp(lo, hi)
}

/// `ln(hi/lo)` for `0 < lo < hi`, accurate to a few ulps even when the ratio
/// is within rounding of 1.
fn log_ratio(lo: f64, hi: f64) -> f64 {
    let diff = hi - lo;
    if diff <= lo {
        // hi <= 2 lo: the subtraction is exact.
        (diff / lo).ln_1p()
    } else {
        let r = hi / lo;
        if r.is_finite() {
            r.ln()
        } else {
            hi.ln() - lo.ln()
        }
    }
}

fn arithmetic(lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * 0.5
}

fn geometric(lo: f64, hi: f64) -> f64 {
    let prod = lo * hi;
    if prod.is_normal() && prod.is_finite() {
        prod.sqrt()
    } else {
        lo.sqrt() * hi.sqrt()
    }
}

fn harmonic(lo: f64, hi: f64) -> f64 {
    2.0 * lo / (1.0 + lo / hi)
}

fn logarithmic(lo: f64, hi: f64) -> f64 {
    let d = log_ratio(lo, hi);
    if d < DIAGONAL_SERIES_THRESHOLD {
        // L/G = sinh(d/2)/(d/2)
        let d2 = d * d;
        geometric(lo, hi) * (1.0 + d2 / 24.0 + d2 * d2 / 1920.0 + d2 * d2 * d2 / 322_560.0)
    } else {
        (hi - lo) / d
    }
}

fn identric(lo: f64, hi: f64) -> f64 {
    let d = log_ratio(lo, hi);
    if d < DIAGONAL_SERIES_THRESHOLD {
        // ln(I/G) = (d/2) coth(d/2) - 1
        let d2 = d * d;
        let s = d2 / 12.0 - d2 * d2 / 720.0 + d2 * d2 * d2 / 30_240.0
            - d2 * d2 * d2 * d2 / 1_209_600.0;
        geometric(lo, hi) * s.exp()
    } else {
        // ln(I/hi) = d/(e^d - 1) - 1; no term grows with d.
        hi * (d / d.exp_m1() - 1.0).exp()
    }
}

/// E(a)/E(b) with E = expm1, switching to logarithms when either argument
/// would overflow.
fn expm1_ratio(a: f64, b: f64) -> f64 {
    if a.abs() < 700.0 && b.abs() < 700.0 {
        return a.exp_m1() / b.exp_m1();
    }
    // ln|E(t)|: for t > 0, t + ln(1 - e^-t); for t < 0, ln(1 - e^t).
    let ln_abs = |t: f64| {
        if t > 0.0 {
            t + (-(-t).exp()).ln_1p()
        } else {
            (-t.exp_m1()).ln()
        }
    };
    let sign = if (a > 0.0) == (b > 0.0) { 1.0 } else { -1.0 };
    sign * (ln_abs(a) - ln_abs(b)).exp()
}

fn alzer(p: f64, lo: f64, hi: f64) -> f64 {
    if p.abs() < ALZER_SINGULAR_EPS {
        return logarithmic(lo, hi);
    }
    if (p + 1.0).abs() < ALZER_SINGULAR_EPS {
        let g = geometric(lo, hi);
        return g * (g / logarithmic(lo, hi));
    }
    let d = log_ratio(lo, hi);
    // Choose the base so that p*l and (p+1)*l are not both positive.
    let (base, l) = if p > 0.0 { (hi, -d) } else { (lo, d) };
    let q = p + 1.0;
    (p / q) * base * expm1_ratio(q * l, p * l)
}

fn power(t: f64, lo: f64, hi: f64) -> f64 {
    if t.abs() < POWER_GEOMETRIC_EPS {
        return geometric(lo, hi);
    }
    let d = log_ratio(lo, hi);
    // M_t = base * ((1 + e^{t l})/2)^{1/t} with t*l <= 0.
    let (base, l) = if t > 0.0 { (hi, -d) } else { (lo, d) };
    base * (((t * l).exp_m1() * 0.5).ln_1p() / t).exp()
}
