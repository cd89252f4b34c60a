//! User-supplied functions of one variable.
//!
//! The grammar, loosest to tightest binding:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?          right-associative
//! atom  := number | 'x' | ident '(' expr (',' expr)? ')' | '(' expr ')'
//! ```
//!
//! So `-x^2` is `-(x^2)`, `2^3^2` is `2^(3^2)` and `2^-1` is `0.5`. Numbers
//! are decimal literals with an optional exponent. There is no implicit
//! multiplication. Functions: `exp ln sqrt abs sinh cosh` (one argument) and
//! `pow` (two arguments).

mod function;
mod parser;

use std::fmt;

use thiserror::Error;

pub use function::{central_difference, default_step, Builtin, FunctionKind, FunctionSpec};
pub use parser::{parse, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    Abs,
    Sinh,
    Cosh,
    Pow,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "pow" => Func::Pow,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Pow => "pow",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Pow => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{op} is undefined for argument {arg} (in `{expr}` at x = {x})")]
    Domain {
        op: &'static str,
        arg: f64,
        expr: String,
        x: f64,
    },
    #[error("`{expr}` is not finite at x = {x}")]
    NonFinite { expr: String, x: f64 },
    #[error("x = {x} lies outside the declared domain ({lo}, {hi})")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    /// Evaluates the tree at `x`. Undefined operations (ln of a non-positive
    /// value, sqrt of a negative one, zero to a negative power, a negative
    /// base to a non-integer power) and non-finite intermediate results are
    /// errors naming the offending sub-expression.
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Var => x,
            Expr::Neg(e) => -e.eval(x)?,
            Expr::Binary(op, l, r) => {
                let a = l.eval(x)?;
                let b = r.eval(x)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => self.pow(a, b, x)?,
                }
            }
            Expr::Call(func, args) => {
                let a = args[0].eval(x)?;
                match func {
                    Func::Exp => a.exp(),
                    Func::Ln => {
                        if a <= 0.0 {
                            return Err(self.domain("ln", a, x));
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(self.domain("sqrt", a, x));
                        }
                        a.sqrt()
                    }
                    Func::Abs => a.abs(),
                    Func::Sinh => a.sinh(),
                    Func::Cosh => a.cosh(),
                    Func::Pow => {
                        let b = args[1].eval(x)?;
                        self.pow(a, b, x)?
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite {
                expr: self.to_string(),
                x,
            })
        }
    }

    fn pow(&self, base: f64, exponent: f64, x: f64) -> Result<f64, EvalError> {
        if base == 0.0 && exponent < 0.0 {
            return Err(self.domain("0^negative", exponent, x));
        }
        if base < 0.0 && exponent.fract() != 0.0 {
            return Err(self.domain("negative base with non-integer power", base, x));
        }
        Ok(base.powf(exponent))
    }

    fn domain(&self, op: &'static str, arg: f64, x: f64) -> EvalError {
        EvalError::Domain {
            op,
            arg,
            expr: self.to_string(),
            x,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Neg(_) => 3,
            Expr::Num(v) if v.is_sign_negative() => 0,
            _ => 5,
        }
    }
}

struct Child<'a>(&'a Expr, u8);

impl fmt::Display for Child<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.precedence() < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var => f.write_str("x"),
            Expr::Neg(e) => write!(f, "-{}", Child(e, 3)),
            Expr::Binary(op, l, r) => {
                let p = op.precedence();
                // Left-associative operators need a strictly tighter right
                // operand; `^` is right-associative and takes a unary exponent.
                let (lp, rp) = match op {
                    BinOp::Pow => (5, 3),
                    _ => (p, p + 1),
                };
                write!(f, "{} {} {}", Child(l, lp), op.symbol(), Child(r, rp))
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}
