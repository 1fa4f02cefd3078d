//! Closed-form real expressions in named variables, e.g. `7 - 1/(n+1)`,
//! `(-1)^n`, `exp(t)`, `ceil(1/eps)`.
//!
//! Used for sequence rules, series coefficients, Laplace integrands and
//! witness functions. Evaluation comes in two flavours: [`RealExpr::eval`]
//! keeps rational arithmetic exact, [`RealExpr::eval_f64`] is the fast float
//! path used when probing sequences at many indices.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use thiserror::Error;

use crate::lexer::{tokenize, Cursor, ParseError, Tok};
use crate::number::{parse_decimal, Rat, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Sqrt,
    Exp,
    Ln,
    Sin,
    Cos,
    Floor,
    Ceil,
    Fact,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "floor" => Func::Floor,
            "ceil" => Func::Ceil,
            "fact" => Func::Fact,
            _ => return None,
        })
    }

    /// Float evaluation; NaN or an infinity outside the domain.
    pub fn apply(self, x: f64) -> f64 {
        apply_float(self, x)
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Floor => "floor",
            Func::Ceil => "ceil",
            Func::Fact => "fact",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RealExpr {
    Num(Rat),
    Pi,
    Var(String),
    Neg(Box<RealExpr>),
    Add(Box<RealExpr>, Box<RealExpr>),
    Sub(Box<RealExpr>, Box<RealExpr>),
    Mul(Box<RealExpr>, Box<RealExpr>),
    Div(Box<RealExpr>, Box<RealExpr>),
    Pow(Box<RealExpr>, Box<RealExpr>),
    Call(Func, Box<RealExpr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0}")]
    Domain(String),
    #[error("non-finite result")]
    NonFinite,
}

const FACT_LIMIT: u64 = 10_000;

fn exact_integer(s: &Scalar) -> Option<BigInt> {
    match s {
        Scalar::Exact(r) if r.is_integer() => Some(r.to_integer()),
        _ => None,
    }
}

fn exact_factorial(n: &BigInt) -> Result<Rat, EvalError> {
    let n = n
        .to_u64()
        .filter(|&n| n <= FACT_LIMIT)
        .ok_or_else(|| EvalError::Domain(format!("factorial of {n} out of range")))?;
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    Ok(Rat::from_integer(acc))
}

fn float_factorial(x: f64) -> f64 {
    if x < 0.0 || x.fract() != 0.0 {
        return f64::NAN;
    }
    if x > 170.0 {
        return f64::INFINITY;
    }
    (2..=x as u64).fold(1.0, |acc, k| acc * k as f64)
}

fn float_result(x: f64) -> Result<Scalar, EvalError> {
    Scalar::float(x).map_err(|_| EvalError::NonFinite)
}

impl RealExpr {
    pub fn num(n: i64) -> Self {
        RealExpr::Num(Rat::from_integer(BigInt::from(n)))
    }

    pub fn var(name: &str) -> Self {
        RealExpr::Var(name.to_string())
    }

    /// Exact-when-possible evaluation.
    pub fn eval(&self, env: &dyn Fn(&str) -> Option<Scalar>) -> Result<Scalar, EvalError> {
        use RealExpr::*;
        Ok(match self {
            Num(r) => Scalar::Exact(r.clone()),
            Pi => Scalar::pi(),
            Var(name) => env(name).ok_or_else(|| EvalError::UnboundVariable(name.clone()))?,
            Neg(a) => -a.eval(env)?,
            Add(a, b) => a.eval(env)? + b.eval(env)?,
            Sub(a, b) => a.eval(env)? - b.eval(env)?,
            Mul(a, b) => a.eval(env)? * b.eval(env)?,
            Div(a, b) => {
                let d = b.eval(env)?;
                a.eval(env)?.checked_div(&d).map_err(|_| EvalError::DivisionByZero)?
            }
            Pow(a, b) => {
                let base = a.eval(env)?;
                let exp = b.eval(env)?;
                if let Some(k) = exact_integer(&exp).and_then(|k| k.to_i64()) {
                    match base.powi(k) {
                        Ok(v) => v,
                        Err(crate::number::NumError::DivisionByZero) => return Err(EvalError::DivisionByZero),
                        Err(_) => return Err(EvalError::NonFinite),
                    }
                } else {
                    float_result(base.to_f64().powf(exp.to_f64()))?
                }
            }
            Call(f, a) => {
                let v = a.eval(env)?;
                match (f, &v) {
                    (Func::Abs, _) => v.abs(),
                    (Func::Floor, Scalar::Exact(r)) => Scalar::Exact(r.floor()),
                    (Func::Ceil, Scalar::Exact(r)) => Scalar::Exact(r.ceil()),
                    (Func::Fact, Scalar::Exact(r)) if r.is_integer() && !r.is_negative() => {
                        Scalar::Exact(exact_factorial(&r.to_integer())?)
                    }
                    (Func::Fact, _) => return Err(EvalError::Domain("factorial of a non-natural number".into())),
                    (Func::Sqrt, _) if v.is_negative() => {
                        return Err(EvalError::Domain("sqrt of a negative number".into()))
                    }
                    (Func::Ln, _) if v.is_negative() || v.is_zero() => {
                        return Err(EvalError::Domain("ln of a non-positive number".into()))
                    }
                    _ => float_result(apply_float(*f, v.to_f64()))?,
                }
            }
        })
    }

    /// Float evaluation. Returns NaN or an infinity on domain errors; callers
    /// check finiteness.
    pub fn eval_f64(&self, env: &[(&str, f64)]) -> f64 {
        use RealExpr::*;
        match self {
            Num(r) => crate::number::rat_to_f64(r),
            Pi => std::f64::consts::PI,
            Var(name) => env.iter().find(|(k, _)| k == name).map_or(f64::NAN, |(_, v)| *v),
            Neg(a) => -a.eval_f64(env),
            Add(a, b) => a.eval_f64(env) + b.eval_f64(env),
            Sub(a, b) => a.eval_f64(env) - b.eval_f64(env),
            Mul(a, b) => a.eval_f64(env) * b.eval_f64(env),
            Div(a, b) => a.eval_f64(env) / b.eval_f64(env),
            Pow(a, b) => {
                let base = a.eval_f64(env);
                let exp = b.eval_f64(env);
                if exp.fract() == 0.0 && exp.abs() <= i32::MAX as f64 {
                    base.powi(exp as i32)
                } else {
                    base.powf(exp)
                }
            }
            Call(f, a) => apply_float(*f, a.eval_f64(env)),
        }
    }

    /// Names of the free variables, in first-occurrence order.
    pub fn variables(&self) -> Vec<String> {
        fn walk(e: &RealExpr, out: &mut Vec<String>) {
            use RealExpr::*;
            match e {
                Num(_) | Pi => {}
                Var(v) => {
                    if !out.contains(v) {
                        out.push(v.clone())
                    }
                }
                Neg(a) | Call(_, a) => walk(a, out),
                Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b) => {
                    walk(a, out);
                    walk(b, out)
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

fn apply_float(f: Func, x: f64) -> f64 {
    match f {
        Func::Abs => x.abs(),
        Func::Sqrt => x.sqrt(),
        Func::Exp => x.exp(),
        Func::Ln => x.ln(),
        Func::Sin => x.sin(),
        Func::Cos => x.cos(),
        Func::Floor => x.floor(),
        Func::Ceil => x.ceil(),
        Func::Fact => float_factorial(x),
    }
}

impl fmt::Display for RealExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use RealExpr::*;
        match self {
            Num(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "({}/{})", r.numer(), r.denom())
                }
            }
            Pi => f.write_str("pi"),
            Var(v) => f.write_str(v),
            Neg(a) => write!(f, "(-{a})"),
            Add(a, b) => write!(f, "({a} + {b})"),
            Sub(a, b) => write!(f, "({a} - {b})"),
            Mul(a, b) => write!(f, "({a} * {b})"),
            Div(a, b) => write!(f, "({a} / {b})"),
            Pow(a, b) => write!(f, "({a} ^ {b})"),
            Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// Parse a complete closed-form expression whose free variables must come
/// from `vars`.
pub fn parse_real_expr(src: &str, vars: &[&str]) -> Result<RealExpr, ParseError> {
    let tokens = tokenize(src)?;
    let mut cur = Cursor::new(&tokens, src.len());
    let e = parse_sum(&mut cur, vars)?;
    cur.expect_end()?;
    Ok(e)
}

pub fn parse_sum(cur: &mut Cursor<'_>, vars: &[&str]) -> Result<RealExpr, ParseError> {
    let mut lhs = parse_product(cur, vars)?;
    loop {
        if cur.eat_sym("+") {
            lhs = RealExpr::Add(Box::new(lhs), Box::new(parse_product(cur, vars)?));
        } else if cur.eat_sym("-") {
            lhs = RealExpr::Sub(Box::new(lhs), Box::new(parse_product(cur, vars)?));
        } else {
            return Ok(lhs);
        }
    }
}

/// Multiplicative level: stops before a binary `+` or `-`, which lets the
/// transform syntax read `translate 1 -2` as two parameters.
pub fn parse_product(cur: &mut Cursor<'_>, vars: &[&str]) -> Result<RealExpr, ParseError> {
    let mut lhs = parse_unary(cur, vars)?;
    loop {
        if cur.eat_sym("*") {
            lhs = RealExpr::Mul(Box::new(lhs), Box::new(parse_unary(cur, vars)?));
        } else if cur.eat_sym("/") {
            lhs = RealExpr::Div(Box::new(lhs), Box::new(parse_unary(cur, vars)?));
        } else {
            return Ok(lhs);
        }
    }
}

fn parse_unary(cur: &mut Cursor<'_>, vars: &[&str]) -> Result<RealExpr, ParseError> {
    if cur.eat_sym("-") {
        return Ok(RealExpr::Neg(Box::new(parse_unary(cur, vars)?)));
    }
    if cur.eat_sym("+") {
        return parse_unary(cur, vars);
    }
    let base = parse_postfix(cur, vars)?;
    if cur.eat_sym("^") {
        let exp = parse_unary(cur, vars)?;
        return Ok(RealExpr::Pow(Box::new(base), Box::new(exp)));
    }
    Ok(base)
}

fn parse_postfix(cur: &mut Cursor<'_>, vars: &[&str]) -> Result<RealExpr, ParseError> {
    let mut e = parse_primary(cur, vars)?;
    while cur.eat_sym("!") {
        e = RealExpr::Call(Func::Fact, Box::new(e));
    }
    Ok(e)
}

fn parse_primary(cur: &mut Cursor<'_>, vars: &[&str]) -> Result<RealExpr, ParseError> {
    let offset = cur.offset();
    match cur.peek() {
        Some(Tok::Number(text)) => {
            cur.bump();
            let r = parse_decimal(text).ok_or_else(|| ParseError::new(offset, &["number"], text.clone()))?;
            Ok(RealExpr::Num(r))
        }
        Some(Tok::Ident(name)) => {
            cur.bump();
            if name == "pi" {
                return Ok(RealExpr::Pi);
            }
            if let Some(func) = Func::from_name(name) {
                if cur.eat_sym("(") {
                    let arg = parse_sum(cur, vars)?;
                    cur.expect_sym(")")?;
                    return Ok(RealExpr::Call(func, Box::new(arg)));
                }
            }
            if vars.contains(&name.as_str()) {
                Ok(RealExpr::Var(name.clone()))
            } else {
                let mut expected: Vec<&str> = vec!["number", "pi", "("];
                expected.extend(vars.iter().copied());
                Err(ParseError::new(offset, &expected, format!("`{name}`")))
            }
        }
        Some(Tok::Sym("(")) => {
            cur.bump();
            let e = parse_sum(cur, vars)?;
            cur.expect_sym(")")?;
            Ok(e)
        }
        Some(Tok::Sym("|")) => {
            cur.bump();
            let e = parse_sum(cur, vars)?;
            cur.expect_sym("|")?;
            Ok(RealExpr::Call(Func::Abs, Box::new(e)))
        }
        _ => Err(cur.error(&["number", "pi", "variable", "("])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::rat;

    fn eval_n(src: &str, n: i64) -> Scalar {
        let e = parse_real_expr(src, &["n"]).unwrap();
        e.eval(&|v| (v == "n").then(|| Scalar::int(n))).unwrap()
    }

    #[test]
    fn exact_sequence_terms() {
        assert_eq!(eval_n("7 - 1/(n+1)", 0), Scalar::int(6));
        assert_eq!(eval_n("7 - 1/(n+1)", 3).as_exact(), Some(&rat(27, 4)));
        assert_eq!(eval_n("(-1)^n", 3), Scalar::int(-1));
        assert_eq!(eval_n("1/n!", 4).as_exact(), Some(&rat(1, 24)));
        assert_eq!(eval_n("1/fact(n)", 5).as_exact(), Some(&rat(1, 120)));
        assert_eq!(eval_n("(1/2)^n", 3).as_exact(), Some(&rat(1, 8)));
        assert_eq!(eval_n("2^-2", 0).as_exact(), Some(&rat(1, 4)));
    }

    #[test]
    fn float_path_agrees() {
        let e = parse_real_expr("7 - 1/(n+1) + |n - 3| * pi", &["n"]).unwrap();
        for n in 0..10 {
            let exact = e.eval(&|_| Some(Scalar::int(n))).unwrap().to_f64();
            let float = e.eval_f64(&[("n", n as f64)]);
            assert!((exact - float).abs() < 1e-12);
        }
    }

    #[test]
    fn functions_and_errors() {
        let e = parse_real_expr("exp(t)", &["t"]).unwrap();
        assert!((e.eval_f64(&[("t", 1.0)]) - std::f64::consts::E).abs() < 1e-15);
        let err = parse_real_expr("x + 1", &["n"]).unwrap_err();
        assert_eq!(err.offset, 0);
        let e = parse_real_expr("1/(n-2)", &["n"]).unwrap();
        assert_eq!(e.eval(&|_| Some(Scalar::int(2))), Err(EvalError::DivisionByZero));
        assert!(parse_real_expr("1 +", &["n"]).is_err());
        assert_eq!(parse_real_expr("ceil(1/eps)", &["eps"]).unwrap().variables(), vec!["eps"]);
    }
}
