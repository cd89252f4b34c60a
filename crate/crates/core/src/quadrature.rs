//! Adaptive Gauss-Kronrod (7, 15) quadrature.
//!
//! The interval is bisected recursively. Each panel is accepted when the
//! difference between its Kronrod and Gauss estimates is within the panel's
//! share of the global tolerance, the share being proportional to the panel's
//! width. Panels are summed in left-to-right tree order, so the result is
//! bit-for-bit reproducible.

use serde::{Deserialize, Serialize};
use thiserror::Error;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the nodes XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

pub const RULE_POINTS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_depth: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("integrand is not finite at t = {abscissa}")]
    NonFinite { abscissa: f64 },
    #[error("maximum bisection depth reached on panel [{a}, {b}] (error estimate {error})")]
    MaxDepth { a: f64, b: f64, error: f64 },
    #[error("invalid integration interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("tolerances must be positive (rel {rel_tol}, abs {abs_tol})")]
    InvalidTolerance { rel_tol: f64, abs_tol: f64 },
}

struct Panel {
    kronrod: f64,
    error: f64,
    abs: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel, QuadError> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |t: f64| {
        let v = f(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadError::NonFinite { abscissa: t })
        }
    };
    let fc = eval(centre)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(centre - dx)?;
        let f2 = eval(centre + dx)?;
        kronrod += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    Ok(Panel {
        kronrod,
        error: (kronrod - gauss).abs(),
        abs: abs * half.abs(),
    })
}

struct Adaptive<'a, F> {
    f: &'a F,
    tol_density: f64,
    max_depth: u32,
    evaluations: usize,
}

impl<F: Fn(f64) -> f64> Adaptive<'_, F> {
    fn refine(&mut self, a: f64, b: f64, panel: Panel, depth: u32) -> Result<(f64, f64), QuadError> {
        let allowed = self.tol_density * (b - a);
        let roundoff = 50.0 * f64::EPSILON * panel.abs;
        if panel.error <= allowed || panel.error <= roundoff {
            return Ok((panel.kronrod, panel.error));
        }
        let mid = 0.5 * (a + b);
        if depth >= self.max_depth || mid <= a || mid >= b {
            return Err(QuadError::MaxDepth {
                a,
                b,
                error: panel.error,
            });
        }
        let left = gk15(self.f, a, mid)?;
        let right = gk15(self.f, mid, b)?;
        self.evaluations += 2 * RULE_POINTS;
        let (lv, le) = self.refine(a, mid, left, depth + 1)?;
        let (rv, re) = self.refine(mid, b, right, depth + 1)?;
        Ok((lv + rv, le + re))
    }
}

/// Integrates `f` over `[a, b]`, `a < b`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<QuadResult, QuadError> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(QuadError::InvalidInterval { a, b });
    }
    if !(opts.rel_tol > 0.0 && opts.abs_tol > 0.0) {
        return Err(QuadError::InvalidTolerance {
            rel_tol: opts.rel_tol,
            abs_tol: opts.abs_tol,
        });
    }
    let whole = gk15(&f, a, b)?;
    let tol = opts.abs_tol.max(opts.rel_tol * whole.kronrod.abs());
    let mut run = Adaptive {
        f: &f,
        tol_density: tol / (b - a),
        max_depth: opts.max_depth,
        evaluations: RULE_POINTS,
    };
    let (value, error_estimate) = run.refine(a, b, whole, 0)?;
    Ok(QuadResult {
        value,
        error_estimate,
        evaluations: run.evaluations,
    })
}

/// Oriented integral: `-integrate(f, b, a)` when `a > b`, zero when `a == b`.
pub fn integrate_oriented<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<QuadResult, QuadError> {
    if a == b && a.is_finite() {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    if a > b {
        let r = integrate(f, b, a, opts)?;
        return Ok(QuadResult {
            value: -r.value,
            ..r
        });
    }
    integrate(f, a, b, opts)
}

/// The integral average of `f` between `a` and `b` (in either order), with
/// value and error estimate divided by `|b - a|`.
pub fn mean_value<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<QuadResult, QuadError> {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let r = integrate(f, lo, hi, opts)?;
    let w = hi - lo;
    Ok(QuadResult {
        value: r.value / w,
        error_estimate: r.error_estimate / w,
        evaluations: r.evaluations,
    })
}
