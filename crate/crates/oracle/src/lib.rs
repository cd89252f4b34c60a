//! Reference values for the bivariate means, computed from the defining
//! formulas in 320-bit binary floating point (about 96 decimal digits).
//!
//! Nothing here shares code with `bimean`: the formulas are evaluated
//! literally, with no cancellation-avoiding rewrites, and the working
//! precision is high enough that the cancellation does not matter for the
//! inputs the tests use (|x/y - 1| >= 1e-16).

use astro_float::{BigFloat, Consts, RoundingMode};

const PREC: usize = 320;
const RM: RoundingMode = RoundingMode::ToEven;

/// A high-precision number with the operations the mean formulas need.
#[derive(Clone, Debug)]
pub struct Big(BigFloat);

fn consts() -> Consts {
    Consts::new().expect("constants cache")
}

impl Big {
    pub fn from_f64(v: f64) -> Self {
        Big(BigFloat::from_f64(v, PREC))
    }

    pub fn from_i64(v: i64) -> Self {
        Big(BigFloat::from_i64(v, PREC))
    }

    pub fn add(&self, o: &Big) -> Big {
        Big(self.0.add(&o.0, PREC, RM))
    }

    pub fn sub(&self, o: &Big) -> Big {
        Big(self.0.sub(&o.0, PREC, RM))
    }

    pub fn mul(&self, o: &Big) -> Big {
        Big(self.0.mul(&o.0, PREC, RM))
    }

    pub fn div(&self, o: &Big) -> Big {
        Big(self.0.div(&o.0, PREC, RM))
    }

    pub fn ln(&self) -> Big {
        Big(self.0.ln(PREC, RM, &mut consts()))
    }

    pub fn exp(&self) -> Big {
        Big(self.0.exp(PREC, RM, &mut consts()))
    }

    pub fn sqrt(&self) -> Big {
        Big(self.0.sqrt(PREC, RM))
    }

    /// `self^e` for positive `self`, via exp(e ln self).
    pub fn powf(&self, e: &Big) -> Big {
        e.mul(&self.ln()).exp()
    }

    /// Correctly rounded conversion, via the decimal representation.
    pub fn to_f64(&self) -> f64 {
        let s = format!("{}", self.0);
        s.parse::<f64>()
            .unwrap_or_else(|e| panic!("cannot parse oracle output {s:?}: {e}"))
    }

    /// |self - approx| / |self|, evaluated at full precision.
    pub fn rel_err(&self, approx: f64) -> f64 {
        let diff = Big::from_f64(approx).sub(self);
        let r = diff.div(self).to_f64();
        r.abs()
    }
}

fn big(v: f64) -> Big {
    Big::from_f64(v)
}

pub fn arithmetic(x: f64, y: f64) -> Big {
    big(x).add(&big(y)).div(&Big::from_i64(2))
}

pub fn geometric(x: f64, y: f64) -> Big {
    big(x).mul(&big(y)).sqrt()
}

pub fn harmonic(x: f64, y: f64) -> Big {
    let two = Big::from_i64(2);
    two.mul(&big(x)).mul(&big(y)).div(&big(x).add(&big(y)))
}

/// (x - y) / (ln x - ln y), with the diagonal value x.
pub fn logarithmic(x: f64, y: f64) -> Big {
    if x == y {
        return big(x);
    }
    let (bx, by) = (big(x), big(y));
    bx.sub(&by).div(&bx.ln().sub(&by.ln()))
}

/// (1/e) (x^x / y^y)^(1/(x-y)), evaluated as exp((x ln x - y ln y)/(x - y) - 1).
pub fn identric(x: f64, y: f64) -> Big {
    if x == y {
        return big(x);
    }
    let (bx, by) = (big(x), big(y));
    let num = bx.mul(&bx.ln()).sub(&by.mul(&by.ln()));
    num.div(&bx.sub(&by)).sub(&Big::from_i64(1)).exp()
}

/// (p/(p+1)) (x^(p+1) - y^(p+1)) / (x^p - y^p), for p outside {0, -1}.
pub fn alzer(p: f64, x: f64, y: f64) -> Big {
    if x == y {
        return big(x);
    }
    let bp = big(p);
    let bp1 = bp.add(&Big::from_i64(1));
    let (bx, by) = (big(x), big(y));
    let num = bx.powf(&bp1).sub(&by.powf(&bp1));
    let den = bx.powf(&bp).sub(&by.powf(&bp));
    bp.div(&bp1).mul(&num).div(&den)
}

/// G(x,y)^2 / L(x,y): the limit of the Alzer mean at p = -1.
pub fn alzer_minus_one(x: f64, y: f64) -> Big {
    if x == y {
        return big(x);
    }
    big(x).mul(&big(y)).div(&logarithmic(x, y))
}

/// ((x^t + y^t)/2)^(1/t) for t != 0.
pub fn power(t: f64, x: f64, y: f64) -> Big {
    let bt = big(t);
    let s = big(x).powf(&bt).add(&big(y).powf(&bt));
    let half = s.div(&Big::from_i64(2));
    half.powf(&Big::from_i64(1).div(&bt))
}

/// (xy)^(1/4) ((x+y)/2)^(1/2).
pub fn ebanks(x: f64, y: f64) -> Big {
    geometric(x, y).mul(&arithmetic(x, y)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        let e = std::f64::consts::E;
        assert!((logarithmic(1.0, e).to_f64() - (e - 1.0)).abs() < 1e-15);
        assert!((alzer(2.0, 1.0, 2.0).to_f64() - 14.0 / 9.0).abs() < 1e-15);
        assert!((ebanks(1.0, 4.0).to_f64() - 5f64.sqrt()).abs() < 1e-15);
        assert_eq!(power(2.0, 1.0, 7.0).to_f64(), 5.0);
    }
}
