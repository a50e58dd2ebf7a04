//! Arithmetic expressions in `z` and `t`: parsing, evaluation, symbolic derivatives.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | 'z' | 't' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | exp | sqrt | abs
//! ```

mod diff;
mod parse;

use std::fmt;

use thiserror::Error;

pub use parse::parse;

/// Free variables an expression may reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    Z,
    T,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Z => f.write_str("z"),
            Var::T => f.write_str("t"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "sqrt" => Some(Func::Sqrt),
            "abs" => Some(Func::Abs),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// Expression tree. Literals produced by the parser are always non-negative;
/// a leading minus is a `Neg` node.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Pi,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at offset {offset}: expected {expected}")]
    Syntax { offset: usize, expected: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("unbound variable `{0}`")]
    Unbound(Var),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("cannot differentiate `{0}`: exponent depends on the variable")]
    NonConstantExponent(String),
}

/// Values for the free variables. Unset entries are unbound.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Bindings {
    pub z: Option<f64>,
    pub t: Option<f64>,
}

impl Bindings {
    pub fn z(z: f64) -> Self {
        Bindings { z: Some(z), t: None }
    }

    pub fn t(t: f64) -> Self {
        Bindings { z: None, t: Some(t) }
    }

    pub fn tz(t: f64, z: f64) -> Self {
        Bindings { z: Some(z), t: Some(t) }
    }

    fn get(&self, v: Var) -> Option<f64> {
        match v {
            Var::Z => self.z,
            Var::T => self.t,
        }
    }
}

fn domain(msg: impl Into<String>) -> ExprError {
    ExprError::Domain(msg.into())
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        Expr::Call(f, Box::new(a))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    pub fn evaluate(&self, env: &Bindings) -> Result<f64, ExprError> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Pi => std::f64::consts::PI,
            Expr::Var(v) => env.get(*v).ok_or(ExprError::Unbound(*v))?,
            Expr::Neg(a) => -a.evaluate(env)?,
            Expr::Bin(op, a, b) => {
                let x = a.evaluate(env)?;
                let y = b.evaluate(env)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(domain("division by zero"));
                        }
                        x / y
                    }
                    BinOp::Pow => {
                        if x == 0.0 && y < 0.0 {
                            return Err(domain("zero raised to a negative power"));
                        }
                        if x < 0.0 && y.fract() != 0.0 {
                            return Err(domain("negative base with non-integer exponent"));
                        }
                        x.powf(y)
                    }
                }
            }
            Expr::Call(f, a) => {
                let x = a.evaluate(env)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Abs => x.abs(),
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(domain("square root of a negative number"));
                        }
                        x.sqrt()
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(domain("result is not finite"))
        }
    }

    /// Evaluate with only `z` bound.
    pub fn eval_z(&self, z: f64) -> Result<f64, ExprError> {
        self.evaluate(&Bindings::z(z))
    }

    /// Evaluate with only `t` bound.
    pub fn eval_t(&self, t: f64) -> Result<f64, ExprError> {
        self.evaluate(&Bindings::t(t))
    }

    pub fn eval_tz(&self, t: f64, z: f64) -> Result<f64, ExprError> {
        self.evaluate(&Bindings::tz(t, z))
    }

    pub fn depends_on(&self, v: Var) -> bool {
        match self {
            Expr::Num(_) | Expr::Pi => false,
            Expr::Var(w) => *w == v,
            Expr::Neg(a) | Expr::Call(_, a) => a.depends_on(v),
            Expr::Bin(_, a, b) => a.depends_on(v) || b.depends_on(v),
        }
    }

    pub fn is_constant(&self) -> bool {
        !self.depends_on(Var::Z) && !self.depends_on(Var::T)
    }

    /// `Some(c)` when the tree is a plain literal (possibly negated).
    pub fn as_literal(&self) -> Option<f64> {
        match self {
            Expr::Num(v) => Some(*v),
            Expr::Neg(a) => a.as_literal().map(|v| -v),
            _ => None,
        }
    }

    pub fn differentiate(&self, var: Var) -> Result<Expr, ExprError> {
        diff::differentiate(self, var)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: bool) -> fmt::Result {
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => {
                if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) {
                    write!(f, "(-{:?})", -v)
                } else {
                    write!(f, "{v:?}")
                }
            }
            Expr::Pi => f.write_str("pi"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_wrapped(f, a, a.precedence() < 3)
            }
            Expr::Bin(op, a, b) => {
                let (wrap_l, wrap_r) = match op {
                    BinOp::Add => (false, b.precedence() <= 1),
                    BinOp::Sub => (false, b.precedence() <= 1),
                    BinOp::Mul | BinOp::Div => (a.precedence() < 2, b.precedence() <= 2),
                    BinOp::Pow => (a.precedence() < 5, b.precedence() < 4),
                };
                write_wrapped(f, a, wrap_l)?;
                write!(f, "{}", op.symbol())?;
                write_wrapped(f, b, wrap_r)
            }
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}
