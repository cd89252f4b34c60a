use std::fmt;

use super::{parse, EvalError, Expr, ParseError};

/// Built-in families with closed-form derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    Exp,
    /// ln(1 + x)
    Log1p,
    /// x^a
    Power(f64),
    /// slope * x + intercept
    Affine { slope: f64, intercept: f64 },
    /// x e^x
    XExp,
}

impl Builtin {
    fn value(self, x: f64) -> f64 {
        match self {
            Builtin::Exp => x.exp(),
            Builtin::Log1p => x.ln_1p(),
            Builtin::Power(a) => x.powf(a),
            Builtin::Affine { slope, intercept } => slope * x + intercept,
            Builtin::XExp => x * x.exp(),
        }
    }

    fn derivative(self, x: f64) -> f64 {
        match self {
            Builtin::Exp => x.exp(),
            Builtin::Log1p => 1.0 / (1.0 + x),
            Builtin::Power(a) => a * x.powf(a - 1.0),
            Builtin::Affine { slope, .. } => slope,
            Builtin::XExp => (1.0 + x) * x.exp(),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::Exp => f.write_str("exp(x)"),
            Builtin::Log1p => f.write_str("ln(1 + x)"),
            Builtin::Power(a) => write!(f, "x^{a}"),
            Builtin::Affine { slope, intercept } => write!(f, "{slope}*x + {intercept}"),
            Builtin::XExp => f.write_str("x*exp(x)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionKind {
    Builtin(Builtin),
    Parsed(Expr),
}

/// A real function of one positive variable on a declared open domain.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    kind: FunctionKind,
    lo: f64,
    hi: f64,
}

/// `cbrt(machine epsilon) * max(|x|, 1)`.
pub fn default_step(x: f64) -> f64 {
    f64::EPSILON.cbrt() * x.abs().max(1.0)
}

/// `(f(x + h) - f(x - h)) / (2h)`, with `h` replaced by the exactly
/// representable step `(x + h) - x`.
pub fn central_difference<F>(f: F, x: f64, h: f64) -> Result<f64, EvalError>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    let up = x + h;
    let down = x - h;
    Ok((f(up)? - f(down)?) / (up - down))
}

impl FunctionSpec {
    pub fn builtin(b: Builtin) -> Self {
        Self {
            kind: FunctionKind::Builtin(b),
            lo: 0.0,
            hi: f64::INFINITY,
        }
    }

    pub fn parsed(expr: Expr) -> Self {
        Self {
            kind: FunctionKind::Parsed(expr),
            lo: 0.0,
            hi: f64::INFINITY,
        }
    }

    /// Parses `text` as an expression in `x` on the domain (0, inf).
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        Ok(Self::parsed(parse(text)?))
    }

    /// Restricts the declared domain to the open interval (lo, hi).
    pub fn with_domain(mut self, lo: f64, hi: f64) -> Self {
        self.lo = lo.max(0.0);
        self.hi = hi;
        self
    }

    pub fn kind(&self) -> &FunctionKind {
        &self.kind
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        if !(x > self.lo && x < self.hi) {
            return Err(EvalError::OutOfDomain {
                x,
                lo: self.lo,
                hi: self.hi,
            });
        }
        match &self.kind {
            FunctionKind::Builtin(b) => {
                let v = b.value(x);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(EvalError::NonFinite {
                        expr: b.to_string(),
                        x,
                    })
                }
            }
            FunctionKind::Parsed(e) => e.eval(x),
        }
    }

    /// f'(x). Built-ins use their closed form. Parsed expressions use
    /// central differences extrapolated to zero step (Ridders' scheme),
    /// starting from a step of a tenth of the distance to the domain's lower
    /// edge (at most 0.1).
    pub fn derivative(&self, x: f64) -> Result<f64, EvalError> {
        match &self.kind {
            FunctionKind::Builtin(b) => {
                self.eval(x)?;
                let d = b.derivative(x);
                if d.is_finite() {
                    Ok(d)
                } else {
                    Err(EvalError::NonFinite {
                        expr: format!("d/dx {b}"),
                        x,
                    })
                }
            }
            FunctionKind::Parsed(_) => {
                let room = (x - self.lo).min(self.hi - x).min(1.0);
                if !(room > 0.0) {
                    return Err(EvalError::OutOfDomain {
                        x,
                        lo: self.lo,
                        hi: self.hi,
                    });
                }
                ridders(|t| self.eval(t), x, 0.1 * room)
            }
        }
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FunctionKind::Builtin(b) => write!(f, "{b}"),
            FunctionKind::Parsed(e) => write!(f, "{e}"),
        }
    }
}

/// Polynomial extrapolation of central differences over the steps
/// h, h/1.4, h/1.4^2, ...; returns the entry with the smallest estimated
/// error and stops once the tableau diagonal starts to diverge.
fn ridders<F>(f: F, x: f64, h0: f64) -> Result<f64, EvalError>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    const CON: f64 = 1.4;
    const CON2: f64 = CON * CON;
    const NTAB: usize = 12;
    const SAFE: f64 = 2.0;

    let mut a = [[0.0f64; NTAB]; NTAB];
    let mut h = h0;
    a[0][0] = central_difference(&f, x, h)?;
    let mut best = a[0][0];
    let mut err = f64::INFINITY;
    for i in 1..NTAB {
        h /= CON;
        a[0][i] = central_difference(&f, x, h)?;
        let mut fac = CON2;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON2;
            let errt = (a[j][i] - a[j - 1][i])
                .abs()
                .max((a[j][i] - a[j - 1][i - 1]).abs());
            if errt <= err {
                err = errt;
                best = a[j][i];
            }
        }
        if (a[i][i] - a[i - 1][i - 1]).abs() >= SAFE * err {
            break;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_derivatives_are_exact() {
        let f = FunctionSpec::builtin(Builtin::Exp);
        assert_eq!(f.derivative(0.5).unwrap(), 0.5f64.exp());
        let f = FunctionSpec::builtin(Builtin::Power(3.0));
        assert_eq!(f.derivative(2.0).unwrap(), 12.0);
        let f = FunctionSpec::builtin(Builtin::XExp);
        assert_eq!(f.derivative(1.0).unwrap(), 2.0 * 1f64.exp());
    }

    #[test]
    fn parsed_derivatives() {
        let f = FunctionSpec::parse("x^2").unwrap();
        assert!((f.derivative(3.0).unwrap() - 6.0).abs() < 1e-9);
        let f = FunctionSpec::parse("ln(x)").unwrap();
        assert!((f.derivative(2.0).unwrap() - 0.5).abs() < 1e-9);
        // Near the domain edge the step shrinks instead of leaving the domain.
        let f = FunctionSpec::parse("ln(x)").unwrap();
        assert!((f.derivative(1e-6).unwrap() - 1e6).abs() < 1e-3);
    }

    #[test]
    fn default_step_central_difference() {
        let f = FunctionSpec::parse("x^2").unwrap();
        let d = central_difference(|t| f.eval(t), 3.0, default_step(3.0)).unwrap();
        assert!((d - 6.0).abs() < 1e-9);
        let f = FunctionSpec::parse("ln(x)").unwrap();
        let d = central_difference(|t| f.eval(t), 2.0, default_step(2.0)).unwrap();
        assert!((d - 0.5).abs() < 1e-9);
    }

    #[test]
    fn domain_is_enforced() {
        let f = FunctionSpec::parse("x").unwrap().with_domain(1.0, 2.0);
        assert!(f.eval(1.5).is_ok());
        assert!(matches!(f.eval(2.5), Err(EvalError::OutOfDomain { .. })));
        assert!(matches!(f.eval(0.0), Err(EvalError::OutOfDomain { .. })));
        assert!(f.derivative(1.0).is_err());
    }
}
