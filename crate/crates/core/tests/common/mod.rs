#![allow(dead_code)]

use parabolic_iss::expr::{BinOp, Func};
use parabolic_iss::{Expr, Var};
use rand::Rng;

const FUNCS: [Func; 5] = [Func::Sin, Func::Cos, Func::Exp, Func::Sqrt, Func::Abs];

/// Random tree of the shape the parser produces: non-negative literals, constant
/// exponents, at most `depth` levels.
pub fn random_expr(rng: &mut impl Rng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..4) {
            0 => Expr::Num((rng.gen_range(0.0..4.0f64) * 100.0).round() / 100.0),
            1 => Expr::Pi,
            _ => Expr::Var(Var::Z),
        };
    }
    let sub = |rng: &mut _| random_expr(rng, depth - 1);
    match rng.gen_range(0..10) {
        0 => Expr::Neg(Box::new(sub(rng))),
        1 | 2 => Expr::Call(FUNCS[rng.gen_range(0..FUNCS.len())], Box::new(sub(rng))),
        3 => {
            let k = [2.0, 3.0, 0.5][rng.gen_range(0..3)];
            Expr::Bin(BinOp::Pow, Box::new(sub(rng)), Box::new(Expr::Num(k)))
        }
        n => {
            let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Add, BinOp::Mul][n - 4];
            Expr::Bin(op, Box::new(sub(rng)), Box::new(sub(rng)))
        }
    }
}

pub const FD_STEP: f64 = 1e-6;

pub enum DerivativeCheck {
    Pass,
    /// Too close to a singularity or kink for a finite-difference comparison.
    Skipped,
    Fail { symbolic: f64, central: f64 },
}

/// Symbolic `d/dz` against the central difference with step `FD_STEP`, tolerance
/// `1e-5 (1 + |value|)`. Points where the difference quotient cannot reach a tenth of
/// that tolerance, by truncation `h²|f‴|/6` or rounding `ε|f|/h`, are skipped.
pub fn check_derivative(e: &Expr, z0: f64) -> DerivativeCheck {
    let Ok(d) = e.differentiate(Var::Z) else { return DerivativeCheck::Skipped };
    let smooth = (-20..=20).all(|k| match e.eval_z(z0 + k as f64 * 5e-5) {
        Ok(v) => v.is_finite() && v.abs() < 1e6,
        Err(_) => false,
    });
    if !smooth {
        return DerivativeCheck::Skipped;
    }
    let third = d.differentiate(Var::Z).and_then(|d2| d2.differentiate(Var::Z)).and_then(|d3| d3.eval_z(z0));
    let (Ok(f), Ok(value), Ok(third)) = (e.eval_z(z0), d.eval_z(z0), third) else {
        return DerivativeCheck::Skipped;
    };
    let tol = 1e-5 * (1.0 + value.abs());
    let oracle_error = FD_STEP * FD_STEP * third.abs() / 6.0 + f64::EPSILON * f.abs() / FD_STEP;
    if !value.is_finite() || !third.is_finite() || oracle_error > 0.1 * tol {
        return DerivativeCheck::Skipped;
    }
    let central = (e.eval_z(z0 + FD_STEP).unwrap() - e.eval_z(z0 - FD_STEP).unwrap()) / (2.0 * FD_STEP);
    if (value - central).abs() <= tol {
        DerivativeCheck::Pass
    } else {
        DerivativeCheck::Fail { symbolic: value, central }
    }
}
