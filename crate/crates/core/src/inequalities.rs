//! Numerical audits of mean inequalities.
//!
//! Each auditor validates its preconditions on the span of the sampled pairs,
//! tests every inequality separately over the pairs, and returns a
//! [`CheckReport`]. An inequality lists the preconditions it depends on in
//! `requires`; `from_proof` marks inequalities established by a written
//! argument rather than only stated.
//!
//! Margins are `(larger side - smaller side) / (1 + |lhs| + |rhs|)` for the
//! claimed direction. A pair whose margin is not larger in magnitude than
//! the scaled quadrature error is counted as inconclusive, not decided.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::convexity::{
    criterion_check, monotonicity, sample_grid, ConvexityError, Outcome, PQPair, Trend, Verdict,
    EQUALITY_TOL,
};
use crate::expr::{EvalError, FunctionSpec};
use crate::means::{evaluate, MeanError, MeanKind, PositivePair};
use crate::quadrature::{integrate, mean_value, QuadError, QuadOptions, QuadResult};
use crate::sampling::IntervalSpec;

/// Grid size used for precondition checks.
pub const PRECONDITION_GRID: usize = 513;
/// Failure witnesses kept per inequality besides the worst one.
pub const MAX_FAILURE_WITNESSES: usize = 8;
pub const MEAN_CHAIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Normalized margins at or above `-equality` pass.
    pub equality: f64,
    pub quad_rel: f64,
    pub quad_abs: f64,
    /// Decided margins must exceed this multiple of the quadrature error.
    pub quad_insulation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            equality: EQUALITY_TOL,
            quad_rel: 1e-10,
            quad_abs: 1e-12,
            quad_insulation: 10.0,
        }
    }
}

impl Tolerances {
    pub fn with_equality(self, equality: f64) -> Self {
        Self { equality, ..self }
    }

    fn quad(&self) -> QuadOptions {
        QuadOptions {
            rel_tol: self.quad_rel,
            abs_tol: self.quad_abs,
            ..QuadOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub tolerances: Tolerances,
    pub seed: u64,
}

impl AuditConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            tolerances: Tolerances::default(),
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PreconditionStatus {
    Met,
    Unmet,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Precondition {
    pub name: String,
    pub status: PreconditionStatus,
    pub observed: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
}

/// A re-evaluable sample. For integral inequalities `x` and `y` are the
/// integration bounds. `params` holds extra inputs such as the two Alzer
/// exponents being compared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairWitness {
    pub x: f64,
    pub y: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityResult {
    pub description: String,
    pub from_proof: bool,
    pub requires: Vec<String>,
    pub pairs_tested: usize,
    pub failures: usize,
    pub inconclusive: usize,
    /// Over decided samples; zero when none was decided.
    pub min_margin: f64,
    pub worst_witness: Option<PairWitness>,
    pub failure_witnesses: Vec<PairWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EbanksFunctionals {
    pub pair: PositivePair,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub inner_mean: f64,
    pub quad: QuadResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub subject: String,
    pub preconditions: Vec<Precondition>,
    pub inequalities: Vec<InequalityResult>,
    pub seed: u64,
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ebanks: Option<EbanksFunctionals>,
}

impl CheckReport {
    pub fn failures(&self) -> usize {
        self.inequalities.iter().map(|q| q.failures).sum()
    }

    pub fn inconclusive(&self) -> usize {
        self.inequalities.iter().map(|q| q.inconclusive).sum()
    }

    /// Preconditions that are not `Met`.
    pub fn flagged_preconditions(&self) -> impl Iterator<Item = &Precondition> {
        self.preconditions
            .iter()
            .filter(|p| p.status != PreconditionStatus::Met)
    }

    pub fn precondition(&self, name: &str) -> Option<&Precondition> {
        self.preconditions.iter().find(|p| p.name == name)
    }

    /// Whether every precondition listed by `q` is `Met`.
    pub fn requirements_met(&self, q: &InequalityResult) -> bool {
        q.requires.iter().all(|n| {
            self.precondition(n)
                .is_some_and(|p| p.status == PreconditionStatus::Met)
        })
    }

    pub fn inequality(&self, description: &str) -> Option<&InequalityResult> {
        self.inequalities.iter().find(|q| q.description == description)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AuditError {
    #[error("evaluating f failed: {0}")]
    Eval(#[from] EvalError),
    #[error("f({x}) = {value} is not positive")]
    NotPositive { x: f64, value: f64 },
    #[error("quadrature failed on [{a}, {b}]: {source}")]
    Quadrature {
        a: f64,
        b: f64,
        #[source]
        source: QuadError,
    },
    #[error(transparent)]
    Mean(#[from] MeanError),
    #[error(transparent)]
    Convexity(#[from] ConvexityError),
    #[error("precondition {name} is not met: {observed}")]
    PreconditionUnmet { name: String, observed: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Relation {
    Le,
    Ge,
}

struct Tracker {
    result: InequalityResult,
    relation: Relation,
    decided: usize,
}

struct Sample {
    x: f64,
    y: f64,
    lhs: f64,
    rhs: f64,
    quad_error: f64,
    norm: Option<f64>,
    params: Vec<f64>,
}

impl Sample {
    fn new(x: f64, y: f64, lhs: f64, rhs: f64) -> Self {
        Self {
            x,
            y,
            lhs,
            rhs,
            quad_error: 0.0,
            norm: None,
            params: Vec::new(),
        }
    }

    fn quad(mut self, err: f64) -> Self {
        self.quad_error = err;
        self
    }
}

impl Tracker {
    fn new(description: &str, relation: Relation, from_proof: bool, requires: &[&str]) -> Self {
        Self {
            result: InequalityResult {
                description: description.to_string(),
                from_proof,
                requires: requires.iter().map(|s| s.to_string()).collect(),
                pairs_tested: 0,
                failures: 0,
                inconclusive: 0,
                min_margin: 0.0,
                worst_witness: None,
                failure_witnesses: Vec::new(),
            },
            relation,
            decided: 0,
        }
    }

    fn record(&mut self, s: Sample, tol: &Tolerances) {
        let norm = s.norm.unwrap_or(1.0 + s.lhs.abs() + s.rhs.abs());
        let (small, large) = match self.relation {
            Relation::Le => (s.lhs, s.rhs),
            Relation::Ge => (s.rhs, s.lhs),
        };
        let margin = (large - small) / norm;
        let shield = tol.quad_insulation * s.quad_error / norm;
        let r = &mut self.result;
        r.pairs_tested += 1;
        if shield > tol.equality && shield >= margin.abs() {
            r.inconclusive += 1;
            return;
        }
        let witness = PairWitness {
            x: s.x,
            y: s.y,
            lhs: s.lhs,
            rhs: s.rhs,
            margin,
            params: s.params,
        };
        if margin < -tol.equality {
            r.failures += 1;
            if r.failure_witnesses.len() < MAX_FAILURE_WITNESSES {
                r.failure_witnesses.push(witness.clone());
            }
        }
        if self.decided == 0 || margin < r.min_margin {
            r.min_margin = margin;
            r.worst_witness = Some(witness);
        }
        self.decided += 1;
    }

    fn finish(self) -> InequalityResult {
        self.result
    }
}

fn precondition(name: &str, status: PreconditionStatus, observed: String) -> Precondition {
    Precondition {
        name: name.to_string(),
        status,
        observed,
        verdict: None,
    }
}

fn status_if(met: bool) -> PreconditionStatus {
    if met {
        PreconditionStatus::Met
    } else {
        PreconditionStatus::Unmet
    }
}

/// Smallest interval holding every pair, widened slightly around a single
/// diagonal pair.
fn span_of(pairs: &[PositivePair]) -> Result<IntervalSpec, AuditError> {
    let lo = pairs.iter().map(|p| p.lo()).fold(f64::INFINITY, f64::min);
    let hi = pairs.iter().map(|p| p.hi()).fold(f64::NEG_INFINITY, f64::max);
    if pairs.is_empty() {
        return Err(AuditError::InvalidInput("no pairs to audit".into()));
    }
    let (lo, hi) = if lo < hi {
        (lo, hi)
    } else {
        (lo * (1.0 - 1e-3), hi * (1.0 + 1e-3))
    };
    IntervalSpec::new(lo, hi, PRECONDITION_GRID, 0)
        .map_err(|e| AuditError::InvalidInput(e.to_string()))
}

fn trend_name(t: Trend) -> &'static str {
    match t {
        Trend::Increasing => "increasing",
        Trend::Decreasing => "decreasing",
        Trend::Constant => "constant",
        Trend::Neither => "not monotone",
    }
}

/// Monotonicity of `g` on a grid. Strict requirements reject `Constant`.
fn monotone_precondition<G: Fn(f64) -> Result<f64, EvalError>>(
    name: &str,
    label: &str,
    g: G,
    grid: &[f64],
    want: Trend,
    strict: bool,
) -> Precondition {
    let mut points = Vec::with_capacity(grid.len());
    for &x in grid {
        match g(x) {
            Ok(v) if v.is_finite() => points.push((x, v)),
            Ok(_) | Err(_) => {
                return precondition(
                    name,
                    PreconditionStatus::Inconclusive,
                    format!("{label} could not be evaluated at x = {x}"),
                )
            }
        }
    }
    let m = monotonicity(&points, EQUALITY_TOL);
    let met = m.trend == want || (!strict && m.trend == Trend::Constant);
    let mut observed = format!("{label} is {}", trend_name(m.trend));
    let counter = match want {
        Trend::Increasing => m.fall,
        _ => m.rise,
    };
    if let (false, Some(s)) = (met, counter) {
        observed.push_str(&format!(
            " ({label} at {} is {}, at {} is {})",
            s.x1, s.g1, s.x2, s.g2
        ));
    }
    precondition(name, status_if(met), observed)
}

fn interior_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * (i as f64 + 0.5) / n as f64)
        .collect()
}

fn criterion_precondition(
    name: &str,
    f: &FunctionSpec,
    pq: PQPair,
    span: &IntervalSpec,
    convex: bool,
) -> Precondition {
    match criterion_check(f, pq, span, EQUALITY_TOL) {
        Ok(v) => {
            let status = match v.outcome {
                Outcome::Inconclusive => PreconditionStatus::Inconclusive,
                _ if convex => status_if(v.is_convex()),
                _ => status_if(v.is_concave()),
            };
            Precondition {
                name: name.to_string(),
                status,
                observed: format!("{:?}, min margin {:e}", v.outcome, v.min_margin),
                verdict: Some(v),
            }
        }
        Err(e) => precondition(name, PreconditionStatus::Unmet, e.to_string()),
    }
}

fn convex_pre(f: &FunctionSpec, span: &IntervalSpec) -> Precondition {
    criterion_precondition("convex", f, PQPair::new(1.0, 1.0), span, true)
}

fn concave_pre(f: &FunctionSpec, span: &IntervalSpec) -> Precondition {
    criterion_precondition("concave", f, PQPair::new(1.0, 1.0), span, false)
}

fn log_convex_pre(f: &FunctionSpec, span: &IntervalSpec) -> Precondition {
    criterion_precondition("log_convex", f, PQPair::new(1.0, 0.0), span, true)
}

fn log_concave_pre(f: &FunctionSpec, span: &IntervalSpec) -> Precondition {
    criterion_precondition("log_concave", f, PQPair::new(1.0, 0.0), span, false)
}

fn increasing_pre(f: &FunctionSpec, span: &IntervalSpec, strict: bool) -> Precondition {
    let name = if strict { "strictly_increasing" } else { "increasing" };
    monotone_precondition(name, "f", |x| f.eval(x), &span.grid(), Trend::Increasing, strict)
}

fn positive(f: &FunctionSpec, x: f64) -> Result<f64, AuditError> {
    let v = f.eval(x)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(AuditError::NotPositive { x, value: v })
    }
}

fn value_pair(f: &FunctionSpec, pair: PositivePair) -> Result<PositivePair, AuditError> {
    Ok(PositivePair::new(positive(f, pair.x())?, positive(f, pair.y())?)?)
}

/// The integral average of `f` between the pair's coordinates; `f(x)` on the
/// diagonal.
fn integral_average(
    f: &FunctionSpec,
    pair: PositivePair,
    tol: &Tolerances,
) -> Result<QuadResult, AuditError> {
    if pair.is_diagonal() {
        return Ok(QuadResult {
            value: f.eval(pair.x())?,
            error_estimate: 0.0,
            evaluations: 1,
        });
    }
    let (a, b) = (pair.lo(), pair.hi());
    mean_value(|t| f.eval(t).unwrap_or(f64::NAN), a, b, &tol.quad())
        .map_err(|source| AuditError::Quadrature { a, b, source })
}

fn report(
    name: &str,
    subject: String,
    preconditions: Vec<Precondition>,
    trackers: Vec<Tracker>,
    cfg: &AuditConfig,
) -> CheckReport {
    CheckReport {
        name: name.to_string(),
        subject,
        preconditions,
        inequalities: trackers.into_iter().map(Tracker::finish).collect(),
        seed: cfg.seed,
        tolerances: cfg.tolerances,
        ebanks: None,
    }
}

/// `P_f <= R_f`: `f` at the geometric mean of `G` and `A` against the
/// integral average of `f`.
pub fn ebanks_check(
    f: &FunctionSpec,
    pairs: &[PositivePair],
    cfg: &AuditConfig,
) -> Result<CheckReport, AuditError> {
    let span = span_of(pairs)?;
    let pre = vec![increasing_pre(f, &span, true), convex_pre(f, &span)];
    let tol = &cfg.tolerances;
    let mut t = Tracker::new(
        "P_f(x,y) <= R_f(x,y)",
        Relation::Le,
        true,
        &["strictly_increasing", "convex"],
    );
    let mut worst: Option<(f64, EbanksFunctionals)> = None;
    for &pair in pairs {
        let inner = evaluate(MeanKind::Ebanks, pair)?;
        let p = f.eval(inner)?;
        let quad = integral_average(f, pair, tol)?;
        let margin = (quad.value - p) / (1.0 + p.abs() + quad.value.abs());
        if worst.as_ref().is_none_or(|(m, _)| margin < *m) {
            worst = Some((
                margin,
                EbanksFunctionals {
                    pair,
                    p,
                    r: quad.value,
                    inner_mean: inner,
                    quad,
                },
            ));
        }
        t.record(
            Sample::new(pair.x(), pair.y(), p, quad.value).quad(quad.error_estimate),
            tol,
        );
    }
    let mut r = report("ebanks", format!("f = {f}"), pre, vec![t], cfg);
    r.ebanks = worst.map(|(_, e)| e);
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdentricProfile {
    Lower,
    Upper,
}

/// Lower profile: `I(f(x), f(y)) >= f(I(x, y))`. Upper profile:
/// `I(f(x), f(y)) <= f(A(x, y))`.
pub fn identric_sandwich(
    f: &FunctionSpec,
    pairs: &[PositivePair],
    profile: IdentricProfile,
    cfg: &AuditConfig,
) -> Result<CheckReport, AuditError> {
    let span = span_of(pairs)?;
    let (name, pre, mut t, inner) = match profile {
        IdentricProfile::Lower => (
            "identric_lower",
            vec![
                increasing_pre(f, &span, false),
                convex_pre(f, &span),
                log_convex_pre(f, &span),
            ],
            Tracker::new(
                "I(f(x),f(y)) >= f(I(x,y))",
                Relation::Ge,
                true,
                &["increasing", "convex", "log_convex"],
            ),
            MeanKind::Identric,
        ),
        IdentricProfile::Upper => (
            "identric_upper",
            vec![
                increasing_pre(f, &span, false),
                concave_pre(f, &span),
                log_concave_pre(f, &span),
            ],
            Tracker::new(
                "I(f(x),f(y)) <= f(A(x,y))",
                Relation::Le,
                false,
                &["increasing", "concave", "log_concave"],
            ),
            MeanKind::Arithmetic,
        ),
    };
    for &pair in pairs {
        let lhs = evaluate(MeanKind::Identric, value_pair(f, pair)?)?;
        let rhs = f.eval(evaluate(inner, pair)?)?;
        t.record(Sample::new(pair.x(), pair.y(), lhs, rhs), &cfg.tolerances);
    }
    Ok(report(name, format!("f = {f}"), pre, vec![t], cfg))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlzerPart {
    One,
    Two,
}

pub const ALZER_LOWER: &str = "J_p(f(x),f(y)) >= f(J_p(x,y))";
pub const ALZER_UPPER: &str = "J_p(f(x),f(y)) <= f(A(x,y))";
pub const ALZER_STEP_1: &str = "J_p(f(x),f(y)) >= R_f(x,y)";
pub const ALZER_STEP_2: &str = "R_f(x,y) >= f(A(x,y))";
pub const ALZER_STEP_3: &str = "f(A(x,y)) >= f(J_p(x,y))";

/// The two stated Alzer inequalities, plus for part one the three steps
/// `J_p(f) >= R_f >= f(A) >= f(J_p)`.
///
/// The auxiliary monotonicity condition is validated in two readings:
/// `f^(p-1) f` (that is `f^p`) and `f^(p-1) f'`.
pub fn alzer_sandwich(
    f: &FunctionSpec,
    p: f64,
    pairs: &[PositivePair],
    part: AlzerPart,
    cfg: &AuditConfig,
) -> Result<CheckReport, AuditError> {
    if !p.is_finite() {
        return Err(AuditError::InvalidInput(format!("p = {p}")));
    }
    let span = span_of(pairs)?;
    let grid = span.grid();
    let literal = |x: f64| -> Result<f64, EvalError> {
        let v = f.eval(x)?;
        Ok(v.powf(p - 1.0) * v)
    };
    let proof = |x: f64| -> Result<f64, EvalError> { Ok(f.eval(x)?.powf(p - 1.0) * f.derivative(x)?) };
    let (trend, range_name, range_ok, mono_name) = match part {
        AlzerPart::One => (Trend::Increasing, "p_at_most_1", p <= 1.0, "strictly_increasing"),
        AlzerPart::Two => (Trend::Decreasing, "p_above_1", p > 1.0, "strictly_decreasing"),
    };
    let dir = trend_name(trend);
    let lit_name = format!("aux_literal_{dir}");
    let proof_name = format!("aux_proof_{dir}");
    let pre = vec![
        precondition(range_name, status_if(range_ok), format!("p = {p}")),
        monotone_precondition(mono_name, "f", |x| f.eval(x), &grid, trend, true),
        convex_pre(f, &span),
        monotone_precondition(&lit_name, "f^(p-1)*f", literal, &grid, trend, false),
        monotone_precondition(&proof_name, "f^(p-1)*f'", proof, &grid, trend, false),
    ];
    let stated: Vec<&str> = vec![range_name, mono_name, "convex", &lit_name];
    let chain_backed: Vec<&str> = vec![range_name, mono_name, "convex", &proof_name];
    let one = part == AlzerPart::One;
    let mut trackers = vec![
        Tracker::new(
            ALZER_LOWER,
            Relation::Ge,
            one,
            if one { &chain_backed } else { &stated },
        ),
        Tracker::new(ALZER_UPPER, Relation::Le, false, &stated),
    ];
    if one {
        trackers.push(Tracker::new(
            ALZER_STEP_1,
            Relation::Ge,
            true,
            &[mono_name, &proof_name],
        ));
        trackers.push(Tracker::new(ALZER_STEP_2, Relation::Ge, true, &["convex"]));
        trackers.push(Tracker::new(
            ALZER_STEP_3,
            Relation::Ge,
            true,
            &[range_name, mono_name],
        ));
    }
    let tol = &cfg.tolerances;
    let kind = MeanKind::Alzer(p);
    for &pair in pairs {
        let (x, y) = (pair.x(), pair.y());
        let jf = evaluate(kind, value_pair(f, pair)?)?;
        let fj = f.eval(evaluate(kind, pair)?)?;
        let fa = f.eval(evaluate(MeanKind::Arithmetic, pair)?)?;
        trackers[0].record(Sample::new(x, y, jf, fj), tol);
        trackers[1].record(Sample::new(x, y, jf, fa), tol);
        if one {
            let r = integral_average(f, pair, tol)?;
            trackers[2].record(Sample::new(x, y, jf, r.value).quad(r.error_estimate), tol);
            trackers[3].record(Sample::new(x, y, r.value, fa).quad(r.error_estimate), tol);
            trackers[4].record(Sample::new(x, y, fa, fj), tol);
        }
    }
    let name = if one { "alzer_one" } else { "alzer_two" };
    Ok(report(name, format!("f = {f}, p = {p}"), pre, trackers, cfg))
}

/// Chebyshev's integral inequality on `[a, b]` with weight `w > 0`:
/// `int w f * int w g <= int w * int w f g` when `f` and `g` are monotone in
/// the same sense, reversed otherwise. The margin is normalized by
/// `(int w)^2 max|f| max|g|`.
pub fn chebyshev_check(
    f: &dyn Fn(f64) -> f64,
    g: &dyn Fn(f64) -> f64,
    w: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    cfg: &AuditConfig,
) -> Result<CheckReport, AuditError> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(AuditError::InvalidInput(format!("interval [{a}, {b}]")));
    }
    let grid = interior_grid(a, b, PRECONDITION_GRID);
    let fm = monotonicity(&sample_grid(f, &grid)?, EQUALITY_TOL);
    let gm = monotonicity(&sample_grid(g, &grid)?, EQUALITY_TOL);
    let w_min = grid.iter().map(|&t| w(t)).fold(f64::INFINITY, f64::min);
    let monotone = |t: Trend| t != Trend::Neither;
    let pre = vec![
        precondition("f_monotone", status_if(monotone(fm.trend)), format!("f is {}", trend_name(fm.trend))),
        precondition("g_monotone", status_if(monotone(gm.trend)), format!("g is {}", trend_name(gm.trend))),
        precondition("weight_positive", status_if(w_min > 0.0), format!("min w = {w_min}")),
    ];
    if let Some(p) = pre.iter().find(|p| p.status != PreconditionStatus::Met) {
        return Err(AuditError::PreconditionUnmet {
            name: p.name.clone(),
            observed: p.observed.clone(),
        });
    }
    let opposite = matches!(
        (fm.trend, gm.trend),
        (Trend::Increasing, Trend::Decreasing) | (Trend::Decreasing, Trend::Increasing)
    );
    let tol = &cfg.tolerances;
    let q = |h: &dyn Fn(f64) -> f64| {
        integrate(h, a, b, &tol.quad()).map_err(|source| AuditError::Quadrature { a, b, source })
    };
    let iw = q(&|t| w(t))?;
    let iwf = q(&|t| w(t) * f(t))?;
    let iwg = q(&|t| w(t) * g(t))?;
    let iwfg = q(&|t| w(t) * f(t) * g(t))?;
    let lhs = iwf.value * iwg.value;
    let rhs = iw.value * iwfg.value;
    let err = iwf.value.abs() * iwg.error_estimate
        + iwg.value.abs() * iwf.error_estimate
        + iw.value.abs() * iwfg.error_estimate
        + iwfg.value.abs() * iw.error_estimate;
    let scale = |h: &dyn Fn(f64) -> f64| grid.iter().map(|&t| h(t).abs()).fold(0.0, f64::max);
    let norm = iw.value * iw.value * scale(f) * scale(g);
    let norm = if norm > 0.0 && norm.is_finite() { norm } else { 1.0 };
    let (description, relation) = if opposite {
        ("int w f * int w g >= int w * int w f g", Relation::Ge)
    } else {
        ("int w f * int w g <= int w * int w f g", Relation::Le)
    };
    let mut t = Tracker::new(description, relation, true, &["f_monotone", "g_monotone", "weight_positive"]);
    let mut s = Sample::new(a, b, lhs, rhs).quad(err);
    s.norm = Some(norm);
    t.record(s, tol);
    let subject = format!(
        "f {}, g {} on [{a}, {b}]",
        trend_name(fm.trend),
        trend_name(gm.trend)
    );
    Ok(report("chebyshev", subject, pre, vec![t], cfg))
}

/// Jensen's integral inequality: `f(avg phi) <= avg f(phi)` over `[a, b]`
/// for convex `f`, reversed for concave `f`.
pub fn jensen_check(
    f: &FunctionSpec,
    phi: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    cfg: &AuditConfig,
) -> Result<CheckReport, AuditError> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(AuditError::InvalidInput(format!("interval [{a}, {b}]")));
    }
    let grid = interior_grid(a, b, PRECONDITION_GRID);
    let values = sample_grid(phi, &grid)?;
    let lo = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    let hi = values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    let range = if lo < hi {
        interior_grid(lo, hi, PRECONDITION_GRID)
    } else {
        vec![lo]
    };
    let slope = sample_grid(|x| f.derivative(x).unwrap_or(f64::NAN), &range)?;
    let trend = monotonicity(&slope, EQUALITY_TOL).trend;
    let (pre, description, relation) = match trend {
        Trend::Increasing | Trend::Constant => (
            precondition("convex", PreconditionStatus::Met, format!("f' is {} on the range of phi", trend_name(trend))),
            "f(avg phi) <= avg f(phi)",
            Relation::Le,
        ),
        Trend::Decreasing => (
            precondition("concave", PreconditionStatus::Met, "f' is decreasing on the range of phi".into()),
            "f(avg phi) >= avg f(phi)",
            Relation::Ge,
        ),
        Trend::Neither => {
            return Err(AuditError::PreconditionUnmet {
                name: "convex".into(),
                observed: "f' is not monotone on the range of phi".into(),
            })
        }
    };
    let tol = &cfg.tolerances;
    let avg = |h: &dyn Fn(f64) -> f64| {
        mean_value(h, a, b, &tol.quad()).map_err(|source| AuditError::Quadrature { a, b, source })
    };
    let mphi = avg(phi)?;
    let mf = avg(&|t| f.eval(phi(t)).unwrap_or(f64::NAN))?;
    let lhs = f.eval(mphi.value)?;
    let err = f.derivative(mphi.value)?.abs() * mphi.error_estimate + mf.error_estimate;
    let name = pre.name.clone();
    let mut t = Tracker::new(description, relation, true, &[&name]);
    t.record(Sample::new(a, b, lhs, mf.value).quad(err), tol);
    Ok(report("jensen", format!("f = {f} on [{a}, {b}]"), vec![pre], vec![t], cfg))
}

/// `L <= I <= A`.
pub fn mean_chain(pairs: &[PositivePair], cfg: &AuditConfig) -> Result<CheckReport, AuditError> {
    let mut li = Tracker::new("L(x,y) <= I(x,y)", Relation::Le, true, &[]);
    let mut ia = Tracker::new("I(x,y) <= A(x,y)", Relation::Le, true, &[]);
    for &pair in pairs {
        let l = evaluate(MeanKind::Logarithmic, pair)?;
        let i = evaluate(MeanKind::Identric, pair)?;
        let a = evaluate(MeanKind::Arithmetic, pair)?;
        li.record(Sample::new(pair.x(), pair.y(), l, i), &cfg.tolerances);
        ia.record(Sample::new(pair.x(), pair.y(), i, a), &cfg.tolerances);
    }
    Ok(report("mean_chain", "means".into(), Vec::new(), vec![li, ia], cfg))
}

/// The `p` grid `-5, -4.9, ..., 5`, which hits 0 and -1 exactly.
pub fn default_p_grid() -> Vec<f64> {
    (0..=100).map(|k| -5.0 + 10.0 * k as f64 / 100.0).collect()
}

/// `J_p <= J_q` for adjacent `p < q` on a sorted copy of `p_grid`.
pub fn alzer_monotone(
    pairs: &[PositivePair],
    p_grid: &[f64],
    cfg: &AuditConfig,
) -> Result<CheckReport, AuditError> {
    let mut grid: Vec<f64> = p_grid.to_vec();
    if grid.iter().any(|p| !p.is_finite()) || grid.len() < 2 {
        return Err(AuditError::InvalidInput("p grid needs two finite values".into()));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut t = Tracker::new("J_p(x,y) <= J_q(x,y) for adjacent p < q", Relation::Le, true, &[]);
    for &pair in pairs {
        let values = grid
            .iter()
            .map(|&p| evaluate(MeanKind::Alzer(p), pair))
            .collect::<Result<Vec<_>, _>>()?;
        for k in 1..grid.len() {
            let mut s = Sample::new(pair.x(), pair.y(), values[k - 1], values[k]);
            s.params = vec![grid[k - 1], grid[k]];
            t.record(s, &cfg.tolerances);
        }
    }
    let subject = format!("p from {} to {} ({} values)", grid[0], grid[grid.len() - 1], grid.len());
    Ok(report("alzer_monotone", subject, Vec::new(), vec![t], cfg))
}

/// `f(L) <= L(f)` and `f(A) <= L(f)` for increasing log-convex `f`, both
/// reversed for log-concave `f`.
pub fn ll_al_check(
    f: &FunctionSpec,
    pairs: &[PositivePair],
    cfg: &AuditConfig,
) -> Result<CheckReport, AuditError> {
    let span = span_of(pairs)?;
    let log = log_convex_pre(f, &span);
    let verdict = log.verdict.clone();
    let (shape, relation, sym) = match verdict.as_ref().map(|v| v.outcome) {
        Some(Outcome::ConvexHolds | Outcome::BothHold) => ("log_convex", Relation::Le, "<="),
        Some(Outcome::ConcaveHolds) => ("log_concave", Relation::Ge, ">="),
        _ => {
            return Err(AuditError::PreconditionUnmet {
                name: "log_convex".into(),
                observed: log.observed,
            })
        }
    };
    let shape_pre = Precondition {
        name: shape.into(),
        status: PreconditionStatus::Met,
        ..log
    };
    let pre = vec![increasing_pre(f, &span, false), shape_pre];
    let requires = ["increasing", shape];
    let mut ll = Tracker::new(&format!("f(L(x,y)) {sym} L(f(x),f(y))"), relation, false, &requires);
    let mut al = Tracker::new(&format!("f(A(x,y)) {sym} L(f(x),f(y))"), relation, false, &requires);
    for &pair in pairs {
        let lf = evaluate(MeanKind::Logarithmic, value_pair(f, pair)?)?;
        let fl = f.eval(evaluate(MeanKind::Logarithmic, pair)?)?;
        let fa = f.eval(evaluate(MeanKind::Arithmetic, pair)?)?;
        ll.record(Sample::new(pair.x(), pair.y(), fl, lf), &cfg.tolerances);
        al.record(Sample::new(pair.x(), pair.y(), fa, lf), &cfg.tolerances);
    }
    Ok(report("ll_al", format!("f = {f}"), pre, vec![ll, al], cfg))
}

/// Which auditor a catalog entry runs, with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum AuditKind {
    Ebanks,
    Identric(IdentricProfile),
    Alzer { p: f64, part: AlzerPart },
    Chebyshev { g: FunctionSpec, w: FunctionSpec, a: f64, b: f64 },
    Jensen { phi: FunctionSpec, a: f64, b: f64 },
    MeanChain,
    AlzerMonotone { p_grid: Vec<f64> },
    LlAl,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub id: String,
    pub kind: AuditKind,
    /// Unused by `MeanChain` and `AlzerMonotone`.
    pub function: FunctionSpec,
    /// Replaces the plan's interval for pair-based auditors.
    pub range: Option<(f64, f64)>,
}

impl CatalogEntry {
    pub fn new(id: &str, kind: AuditKind, function: FunctionSpec) -> Self {
        Self {
            id: id.to_string(),
            kind,
            function,
            range: None,
        }
    }

    pub fn on(mut self, lo: f64, hi: f64) -> Self {
        self.range = Some((lo, hi));
        self
    }

    pub fn run(&self, plan: &IntervalSpec, tol: &Tolerances) -> Result<CheckReport, AuditError> {
        let cfg = AuditConfig {
            tolerances: *tol,
            seed: plan.seed,
        };
        let pairs = || -> Result<Vec<PositivePair>, AuditError> {
            let iv = match self.range {
                Some((lo, hi)) => IntervalSpec::with_sampling(lo, hi, plan.samples, plan.sampling, plan.seed)
                    .map_err(|e| AuditError::InvalidInput(e.to_string()))?,
                None => *plan,
            };
            Ok(iv.pairs())
        };
        let f = &self.function;
        let pointwise = |h: &FunctionSpec| {
            let h = h.clone();
            move |t: f64| h.eval(t).unwrap_or(f64::NAN)
        };
        match &self.kind {
            AuditKind::Ebanks => ebanks_check(f, &pairs()?, &cfg),
            AuditKind::Identric(profile) => identric_sandwich(f, &pairs()?, *profile, &cfg),
            AuditKind::Alzer { p, part } => alzer_sandwich(f, *p, &pairs()?, *part, &cfg),
            AuditKind::Chebyshev { g, w, a, b } => {
                chebyshev_check(&pointwise(f), &pointwise(g), &pointwise(w), *a, *b, &cfg)
            }
            AuditKind::Jensen { phi, a, b } => jensen_check(f, &pointwise(phi), *a, *b, &cfg),
            AuditKind::MeanChain => mean_chain(&pairs()?, &cfg),
            AuditKind::AlzerMonotone { p_grid } => alzer_monotone(&pairs()?, p_grid, &cfg),
            AuditKind::LlAl => ll_al_check(f, &pairs()?, &cfg),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditRun {
    pub reports: Vec<CheckReport>,
    /// `(entry id, error)` for entries that could not be audited.
    pub errors: Vec<(String, AuditError)>,
}

/// Runs every entry in catalog order. Entry errors are collected.
pub fn audit_all(catalog: &[CatalogEntry], plan: &IntervalSpec, tol: &Tolerances) -> AuditRun {
    let mut run = AuditRun {
        reports: Vec::new(),
        errors: Vec::new(),
    };
    for entry in catalog {
        match entry.run(plan, tol) {
            Ok(r) => run.reports.push(r),
            Err(e) => run.errors.push((entry.id.clone(), e)),
        }
    }
    run
}

/// 10^4 log-uniform pairs over [1e-2, 1e2].
pub fn default_plan(seed: u64) -> IntervalSpec {
    IntervalSpec::new(1e-2, 1e2, 10_000, seed).expect("valid default plan")
}

fn spec(text: &str) -> FunctionSpec {
    FunctionSpec::parse(text).expect("built-in catalog expression")
}

/// Entries whose inequalities are expected to hold.
pub fn builtin_catalog() -> Vec<CatalogEntry> {
    use AuditKind::*;
    let mut c = Vec::new();
    for f in ["x^2", "exp(x)", "x^3 + x", "x*exp(x)"] {
        c.push(CatalogEntry::new("ebanks", Ebanks, spec(f)));
    }
    for f in ["exp(x)", "exp(x^2)"] {
        c.push(CatalogEntry::new("identric", Identric(IdentricProfile::Lower), spec(f)).on(0.1, 5.0));
    }
    for (f, p) in [("exp(x)", 0.0), ("exp(x)", 0.5), ("exp(x)", 1.0), ("x^2", 0.5), ("x^2", 1.0)] {
        c.push(CatalogEntry::new("alzer", Alzer { p, part: AlzerPart::One }, spec(f)).on(0.1, 5.0));
    }
    c.push(CatalogEntry::new(
        "chebyshev",
        Chebyshev { g: spec("x"), w: spec("1"), a: 0.0, b: 1.0 },
        spec("x"),
    ));
    c.push(CatalogEntry::new(
        "chebyshev",
        Chebyshev { g: spec("exp(x)"), w: spec("1 + x"), a: 0.5, b: 2.0 },
        spec("x^3"),
    ));
    c.push(CatalogEntry::new("jensen", Jensen { phi: spec("x"), a: 0.0, b: 1.0 }, spec("x^2")));
    c.push(CatalogEntry::new("jensen", Jensen { phi: spec("sqrt(x)"), a: 1.0, b: 4.0 }, spec("exp(x)")));
    c.push(CatalogEntry::new("chain", MeanChain, spec("x")));
    c.push(CatalogEntry::new("alzer-mono", AlzerMonotone { p_grid: default_p_grid() }, spec("x")));
    c.push(CatalogEntry::new("ll-al", LlAl, spec("exp(x^2)")).on(0.5, 3.0));
    c
}
