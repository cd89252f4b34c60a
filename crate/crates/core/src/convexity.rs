//! MN-convexity checks.
//!
//! `f` is MN-convex on I when `f(M(x, y)) <= N(f(x), f(y))` for all x, y in
//! I, and MN-concave when the inequality is reversed. Two independent
//! procedures decide this:
//!
//! * [`definitional_check`] samples pairs and compares both sides directly.
//! * [`criterion_check`] uses the derivative test for power means: `f` is
//!   `(p, q)`-convex (concave) exactly when
//!   `g(x) = x^(1-p) f'(x) f(x)^(q-1)` is increasing (decreasing).
//!
//! Letters map to power-mean exponents as A = 1, G = 0, H = -1.
//!
//! Every comparison uses the normalized margin
//! `(rhs - lhs) / (1 + |lhs| + |rhs|)`, which is non-negative when the convex
//! direction holds. Margins within the equality tolerance are ties.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{EvalError, FunctionSpec};
use crate::means::{evaluate, MeanError, MeanKind, PositivePair};
use crate::sampling::IntervalSpec;

pub const EQUALITY_TOL: f64 = 1e-9;

/// Largest fraction of grid points whose evaluation may fail before a
/// criterion check gives up and reports `Inconclusive`.
pub const MAX_FAILED_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    ConvexHolds,
    ConcaveHolds,
    BothHold,
    NeitherHolds,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Convex,
    Concave,
}

/// What a witness compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Probe {
    /// `points = [x, y]`, `lhs = f(M(x, y))`, `rhs = N(f(x), f(y))`.
    Pair,
    /// `points = [x1, x2]` with `x1 < x2`, `lhs = g(x1)`, `rhs = g(x2)`.
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub probe: Probe,
    pub points: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub violates: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub witnesses: Vec<Witness>,
    /// Smallest margin in the direction of the outcome. For `BothHold`,
    /// `NeitherHolds` and `Inconclusive` it covers both directions.
    pub min_margin: f64,
    pub samples_used: usize,
}

impl Verdict {
    pub fn is_convex(&self) -> bool {
        matches!(self.outcome, Outcome::ConvexHolds | Outcome::BothHold)
    }

    pub fn is_concave(&self) -> bool {
        matches!(self.outcome, Outcome::ConcaveHolds | Outcome::BothHold)
    }
}

/// Power-mean exponents of the argument-side and value-side means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PQPair {
    pub p: f64,
    pub q: f64,
}

impl PQPair {
    pub fn new(p: f64, q: f64) -> Self {
        Self { p, q }
    }

    /// Maps a pair of A, G, H or power-mean letters to exponents.
    pub fn from_letters(m: MeanKind, n: MeanKind) -> Result<Self, ConvexityError> {
        Ok(Self {
            p: letter_exponent(m)?,
            q: letter_exponent(n)?,
        })
    }
}

pub fn letter_exponent(kind: MeanKind) -> Result<f64, ConvexityError> {
    match kind {
        MeanKind::Arithmetic => Ok(1.0),
        MeanKind::Geometric => Ok(0.0),
        MeanKind::Harmonic => Ok(-1.0),
        MeanKind::Power(t) => Ok(t),
        other => Err(ConvexityError::NotPowerMean(other)),
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConvexityError {
    #[error("evaluating f failed for the pair ({x}, {y}): {source}")]
    PairEval {
        x: f64,
        y: f64,
        #[source]
        source: EvalError,
    },
    #[error("f({x}) = {value} is not positive, but the value-side mean needs positive values")]
    NotPositive { x: f64, value: f64 },
    #[error("sampled function is not finite at x = {x}")]
    NonFinite { x: f64 },
    #[error(transparent)]
    Mean(#[from] MeanError),
    #[error("{0} is not a power mean; the derivative criterion needs A, G, H or M:<t>")]
    NotPowerMean(MeanKind),
}

pub fn normalized_margin(lhs: f64, rhs: f64) -> f64 {
    (rhs - lhs) / (1.0 + lhs.abs() + rhs.abs())
}

#[derive(Clone, Copy, PartialEq)]
enum Keep {
    First,
    Worst,
}

/// Order-independent aggregation of margins by sample index.
struct Tally {
    tol: f64,
    keep: Keep,
    min: f64,
    max: f64,
    convex_witness: Option<Witness>,
    concave_witness: Option<Witness>,
    samples: usize,
}

impl Tally {
    fn new(tol: f64, keep: Keep) -> Self {
        Self {
            tol,
            keep,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            convex_witness: None,
            concave_witness: None,
            samples: 0,
        }
    }

    fn observe(&mut self, probe: Probe, points: [f64; 2], lhs: f64, rhs: f64) {
        let margin = normalized_margin(lhs, rhs);
        self.min = self.min.min(margin);
        self.max = self.max.max(margin);
        let violates = if margin < -self.tol {
            Direction::Convex
        } else if margin > self.tol {
            Direction::Concave
        } else {
            return;
        };
        let slot = match violates {
            Direction::Convex => &mut self.convex_witness,
            Direction::Concave => &mut self.concave_witness,
        };
        let replace = match (slot.as_ref(), self.keep) {
            (None, _) => true,
            (Some(_), Keep::First) => false,
            (Some(w), Keep::Worst) => margin.abs() > w.margin.abs(),
        };
        if replace {
            *slot = Some(Witness {
                probe,
                points: points.to_vec(),
                lhs,
                rhs,
                margin,
                violates,
            });
        }
    }

    fn verdict(self) -> Verdict {
        let (min, max) = if self.min.is_finite() {
            (self.min, self.max)
        } else {
            (0.0, 0.0)
        };
        let outcome = match (&self.convex_witness, &self.concave_witness) {
            (None, None) => Outcome::BothHold,
            (None, Some(_)) => Outcome::ConvexHolds,
            (Some(_), None) => Outcome::ConcaveHolds,
            (Some(_), Some(_)) => Outcome::NeitherHolds,
        };
        let min_margin = match outcome {
            Outcome::ConvexHolds => min,
            Outcome::ConcaveHolds => -max,
            _ => min.min(-max),
        };
        Verdict {
            outcome,
            witnesses: self
                .convex_witness
                .into_iter()
                .chain(self.concave_witness)
                .collect(),
            min_margin,
            samples_used: self.samples,
        }
    }
}

fn value_side_mean(n: MeanKind, a: f64, b: f64) -> Result<f64, ConvexityError> {
    if needs_positive(n) {
        for v in [a, b] {
            if v <= 0.0 {
                return Err(ConvexityError::NotPositive { x: f64::NAN, value: v });
            }
        }
        Ok(evaluate(n, PositivePair::new(a, b)?)?)
    } else {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        Ok(lo + (hi - lo) * 0.5)
    }
}

fn needs_positive(n: MeanKind) -> bool {
    !matches!(n, MeanKind::Arithmetic) && n != MeanKind::Power(1.0)
}

/// Compares `f(M(x, y))` with `N(f(x), f(y))` on the random and structured
/// pairs of `iv`.
pub fn definitional_check(
    f: &FunctionSpec,
    m: MeanKind,
    n: MeanKind,
    iv: &IntervalSpec,
    tol: f64,
) -> Result<Verdict, ConvexityError> {
    let mut tally = Tally::new(tol, Keep::Worst);
    for pair in iv.pairs() {
        let (x, y) = (pair.x(), pair.y());
        let pair_err = |source| ConvexityError::PairEval { x, y, source };
        let fx = f.eval(x).map_err(pair_err)?;
        let fy = f.eval(y).map_err(pair_err)?;
        let lhs = f.eval(evaluate(m, pair)?).map_err(pair_err)?;
        let rhs = value_side_mean(n, fx, fy).map_err(|e| match e {
            ConvexityError::NotPositive { value, .. } => ConvexityError::NotPositive {
                x: if value == fx { x } else { y },
                value,
            },
            e => e,
        })?;
        tally.samples += 1;
        tally.observe(Probe::Pair, [x, y], lhs, rhs);
    }
    Ok(tally.verdict())
}

/// `x^(1-p) f'(x) f(x)^(q-1)`. Integer exponents use repeated
/// multiplication, so for p, q in {1, 0, -1} this is exactly one of
/// `f'`, `f'/f`, `f'/f^2`, `x f'`, ..., `x^2 f'/f^2`.
pub fn criterion_quantity(pq: PQPair, x: f64, fx: f64, dfx: f64) -> f64 {
    let pow = |base: f64, e: f64| {
        if e == e.trunc() && e.abs() <= 64.0 {
            base.powi(e as i32)
        } else {
            base.powf(e)
        }
    };
    let xs = pow(x, 1.0 - pq.p);
    match pq.q - 1.0 {
        0.0 => xs * dfx,
        e if e < 0.0 && e == e.trunc() && e >= -64.0 => xs * dfx / fx.powi(-e as i32),
        e => xs * dfx * pow(fx, e),
    }
}

/// Decides `(p, q)`-convexity from the monotonicity of
/// [`criterion_quantity`] on the grid of `iv`.
pub fn criterion_check(
    f: &FunctionSpec,
    pq: PQPair,
    iv: &IntervalSpec,
    tol: f64,
) -> Result<Verdict, ConvexityError> {
    let grid = iv.grid();
    let mut points = Vec::with_capacity(grid.len());
    for &x in &grid {
        let Ok(fx) = f.eval(x) else { continue };
        if pq.q != 1.0 && fx <= 0.0 {
            return Err(ConvexityError::NotPositive { x, value: fx });
        }
        let Ok(dfx) = f.derivative(x) else { continue };
        let g = criterion_quantity(pq, x, fx, dfx);
        if g.is_finite() {
            points.push((x, g));
        }
    }
    let failed = grid.len() - points.len();
    let mut verdict = classify_points(&points, tol).verdict();
    if failed as f64 > MAX_FAILED_FRACTION * grid.len() as f64 {
        verdict.outcome = Outcome::Inconclusive;
        verdict.witnesses.clear();
    }
    Ok(verdict)
}

/// [`criterion_check`] for M, N in {A, G, H} at the default tolerance.
pub fn nine_case_check(
    f: &FunctionSpec,
    m: MeanKind,
    n: MeanKind,
    iv: &IntervalSpec,
) -> Result<Verdict, ConvexityError> {
    for k in [m, n] {
        if !matches!(
            k,
            MeanKind::Arithmetic | MeanKind::Geometric | MeanKind::Harmonic
        ) {
            return Err(ConvexityError::NotPowerMean(k));
        }
    }
    criterion_check(f, PQPair::from_letters(m, n)?, iv, EQUALITY_TOL)
}

/// Log-convexity via the monotonicity of `f'/f`, which is the (1, 0)
/// criterion.
pub fn log_convexity_check(f: &FunctionSpec, iv: &IntervalSpec) -> Result<Verdict, ConvexityError> {
    criterion_check(f, PQPair::new(1.0, 0.0), iv, EQUALITY_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trend {
    Increasing,
    Decreasing,
    Constant,
    Neither,
}

/// A pair of grid points `x1 < x2` and the sampled values there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub x1: f64,
    pub g1: f64,
    pub x2: f64,
    pub g2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monotonicity {
    pub trend: Trend,
    /// First pair showing a rise beyond tolerance.
    pub rise: Option<Step>,
    /// First pair showing a fall beyond tolerance.
    pub fall: Option<Step>,
    pub samples: usize,
}

impl Monotonicity {
    /// For `Neither`, the first pair that contradicts the earlier trend.
    pub fn inversion(&self) -> Option<Step> {
        match (self.rise, self.fall) {
            (Some(r), Some(f)) => Some(if r.x2 > f.x2 { r } else { f }),
            _ => None,
        }
    }
}

struct Scan {
    tally: Tally,
    rise: Option<Step>,
    fall: Option<Step>,
}

impl Scan {
    fn verdict(self) -> Verdict {
        self.tally.verdict()
    }

    fn trend(&self) -> Trend {
        match (self.rise.is_some(), self.fall.is_some()) {
            (true, true) => Trend::Neither,
            (true, false) => Trend::Increasing,
            (false, true) => Trend::Decreasing,
            (false, false) => Trend::Constant,
        }
    }
}

/// Scans `(x, g)` in increasing `x`, comparing each value with the running
/// minimum and maximum of the earlier ones.
fn classify_points(points: &[(f64, f64)], tol: f64) -> Scan {
    let mut tally = Tally::new(tol, Keep::First);
    tally.samples = points.len();
    let (mut rise, mut fall) = (None, None);
    let Some(&first) = points.first() else {
        return Scan { tally, rise, fall };
    };
    let (mut lo, mut hi) = (first, first);
    for &(x, g) in &points[1..] {
        let step = |anchor: (f64, f64)| Step {
            x1: anchor.0,
            g1: anchor.1,
            x2: x,
            g2: g,
        };
        if rise.is_none() && normalized_margin(lo.1, g) > tol {
            rise = Some(step(lo));
        }
        if fall.is_none() && normalized_margin(hi.1, g) < -tol {
            fall = Some(step(hi));
        }
        tally.observe(Probe::Grid, [lo.0, x], lo.1, g);
        tally.observe(Probe::Grid, [hi.0, x], hi.1, g);
        if g < lo.1 {
            lo = (x, g);
        }
        if g > hi.1 {
            hi = (x, g);
        }
    }
    Scan { tally, rise, fall }
}

/// Classifies `g` on the grid of `iv`.
pub fn monotone_classify<G: Fn(f64) -> f64>(
    g: G,
    iv: &IntervalSpec,
    tol: f64,
) -> Result<Monotonicity, ConvexityError> {
    let points = sample_grid(g, &iv.grid())?;
    Ok(monotonicity(&points, tol))
}

pub(crate) fn sample_grid<G: Fn(f64) -> f64>(
    g: G,
    grid: &[f64],
) -> Result<Vec<(f64, f64)>, ConvexityError> {
    grid.iter()
        .map(|&x| {
            let v = g(x);
            if v.is_finite() {
                Ok((x, v))
            } else {
                Err(ConvexityError::NonFinite { x })
            }
        })
        .collect()
}

pub(crate) fn monotonicity(points: &[(f64, f64)], tol: f64) -> Monotonicity {
    let scan = classify_points(points, tol);
    Monotonicity {
        trend: scan.trend(),
        rise: scan.rise,
        fall: scan.fall,
        samples: points.len(),
    }
}
