use super::{BinOp, Expr, ExprError, Func, Var};

fn is_zero(e: &Expr) -> bool {
    matches!(e, Expr::Num(v) if *v == 0.0)
}

fn is_one(e: &Expr) -> bool {
    matches!(e, Expr::Num(v) if *v == 1.0)
}

fn add(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        b
    } else if is_zero(&b) {
        a
    } else {
        Expr::bin(BinOp::Add, a, b)
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    if is_zero(&b) {
        a
    } else if is_zero(&a) {
        Expr::neg(b)
    } else {
        Expr::bin(BinOp::Sub, a, b)
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) || is_zero(&b) {
        Expr::Num(0.0)
    } else if is_one(&a) {
        b
    } else if is_one(&b) {
        a
    } else {
        Expr::bin(BinOp::Mul, a, b)
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        Expr::Num(0.0)
    } else {
        Expr::bin(BinOp::Div, a, b)
    }
}

fn neg(a: Expr) -> Expr {
    if is_zero(&a) {
        a
    } else {
        Expr::neg(a)
    }
}

pub(super) fn differentiate(e: &Expr, var: Var) -> Result<Expr, ExprError> {
    if !e.depends_on(var) {
        return Ok(Expr::Num(0.0));
    }
    Ok(match e {
        Expr::Num(_) | Expr::Pi => Expr::Num(0.0),
        Expr::Var(v) => Expr::Num(if *v == var { 1.0 } else { 0.0 }),
        Expr::Neg(a) => neg(differentiate(a, var)?),
        Expr::Bin(op, a, b) => {
            let (a, b) = (a.as_ref(), b.as_ref());
            match op {
                BinOp::Add => add(differentiate(a, var)?, differentiate(b, var)?),
                BinOp::Sub => sub(differentiate(a, var)?, differentiate(b, var)?),
                BinOp::Mul => add(
                    mul(differentiate(a, var)?, b.clone()),
                    mul(a.clone(), differentiate(b, var)?),
                ),
                BinOp::Div => {
                    let num = sub(
                        mul(differentiate(a, var)?, b.clone()),
                        mul(a.clone(), differentiate(b, var)?),
                    );
                    div(num, mul_plain(b.clone(), b.clone()))
                }
                BinOp::Pow => {
                    if b.depends_on(var) {
                        return Err(ExprError::NonConstantExponent(e.to_string()));
                    }
                    let lowered = Expr::bin(BinOp::Sub, b.clone(), Expr::Num(1.0));
                    mul(
                        mul(b.clone(), Expr::bin(BinOp::Pow, a.clone(), lowered)),
                        differentiate(a, var)?,
                    )
                }
            }
        }
        Expr::Call(f, a) => {
            let inner = differentiate(a, var)?;
            let a = a.as_ref().clone();
            let outer = match f {
                Func::Sin => Expr::call(Func::Cos, a),
                Func::Cos => Expr::neg(Expr::call(Func::Sin, a)),
                Func::Exp => Expr::call(Func::Exp, a),
                Func::Sqrt => {
                    return Ok(div(
                        inner,
                        Expr::bin(BinOp::Mul, Expr::Num(2.0), Expr::call(Func::Sqrt, a)),
                    ))
                }
                Func::Abs => div(a.clone(), Expr::call(Func::Abs, a)),
            };
            mul(outer, inner)
        }
    })
}

fn mul_plain(a: Expr, b: Expr) -> Expr {
    Expr::bin(BinOp::Mul, a, b)
}

#[cfg(test)]
mod tests {
    use crate::expr::{parse, Var};

    fn d_at(s: &str, z: f64) -> f64 {
        parse(s).unwrap().differentiate(Var::Z).unwrap().eval_z(z).unwrap()
    }

    #[test]
    fn reference_derivatives() {
        assert_eq!(d_at("z^2", 3.0), 6.0);
        assert!((d_at("sin(pi*z)", 0.0) - std::f64::consts::PI).abs() < 1e-15);
        let e = 1f64.exp();
        let fd = (((1.0 + 1e-6f64).exp() * (1.0 + 1e-6)) - ((1.0 - 1e-6f64).exp() * (1.0 - 1e-6))) / 2e-6;
        assert!((d_at("exp(z)*z", 1.0) - 2.0 * e).abs() < 1e-12);
        assert!((fd - 2.0 * e).abs() / (2.0 * e) < 1e-6);
    }

    #[test]
    fn quotient_sqrt_abs_cos() {
        assert!((d_at("1/z", 2.0) + 0.25).abs() < 1e-15);
        assert!((d_at("sqrt(z)", 4.0) - 0.25).abs() < 1e-15);
        assert_eq!(d_at("abs(z)", -3.0), -1.0);
        assert!((d_at("cos(2*z)", 0.3) + 2.0 * (0.6f64).sin()).abs() < 1e-15);
    }

    #[test]
    fn partial_in_t() {
        let e = parse("z*t^2").unwrap().differentiate(Var::T).unwrap();
        assert_eq!(e.eval_tz(3.0, 2.0).unwrap(), 12.0);
        let dz = parse("sin(t)").unwrap().differentiate(Var::Z).unwrap();
        assert_eq!(dz.as_literal(), Some(0.0));
    }

    #[test]
    fn rejects_variable_exponent() {
        let e = parse("2^z").unwrap();
        assert!(e.differentiate(Var::Z).is_err());
        assert!(e.differentiate(Var::T).is_ok());
    }
}
