//! Power series as lazily generated coefficient sequences.
//!
//! A series has two readings: the numeric sum of its terms (`sigma`) and
//! the function `x ↦ Σ aₙ xⁿ` (`powers_eval`). The formal operations below
//! (sum, Cauchy product, derivative, integral, composition) work on the
//! coefficients alone and never look at convergence.

use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::lexer::{tokenize, Cursor, ParseError, Tok};
use crate::number::{parse_decimal, Rat, Scalar};
use crate::numexpr::{parse_real_expr, parse_sum, EvalError, RealExpr};
use crate::seq::Stabilizer;

/// Coefficients with index below this are memoized.
pub const MEMO_CAP: u64 = 10_000;
pub const DEFAULT_MAX_TERMS: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("composition requires zero constant term")]
    NonZeroConstantTerm,
    #[error("coefficient {index}: {source}")]
    Coefficient { index: u64, source: EvalError },
    #[error("coefficient {index} is not finite")]
    NonFinite { index: u64 },
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error(transparent)]
    Syntax(#[from] ParseError),
}

type Rule = dyn Fn(u64) -> Result<Scalar, SeriesError> + Send + Sync;

/// A power series given by its coefficient rule.
#[derive(Clone)]
pub struct PowerSeries {
    rule: Arc<Rule>,
    memo: Arc<Mutex<Vec<Option<Scalar>>>>,
}

impl fmt::Debug for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head: Vec<String> =
            (0..6).map(|n| self.coeff(n).map_or_else(|e| format!("<{e}>"), |c| c.to_string())).collect();
        write!(f, "PowerSeries[{}, ..]", head.join(", "))
    }
}

impl PowerSeries {
    pub fn try_from_fn(f: impl Fn(u64) -> Result<Scalar, SeriesError> + Send + Sync + 'static) -> Self {
        PowerSeries { rule: Arc::new(f), memo: Arc::new(Mutex::new(Vec::new())) }
    }

    pub fn from_fn(f: impl Fn(u64) -> Scalar + Send + Sync + 'static) -> Self {
        PowerSeries::try_from_fn(move |n| Ok(f(n)))
    }

    /// A finite prefix, extended by zeros.
    pub fn from_coeffs(coeffs: Vec<Scalar>) -> Self {
        PowerSeries::from_fn(move |n| {
            usize::try_from(n).ok().and_then(|i| coeffs.get(i).cloned()).unwrap_or_else(Scalar::zero)
        })
    }

    pub fn from_rats(coeffs: &[Rat]) -> Self {
        PowerSeries::from_coeffs(coeffs.iter().cloned().map(Scalar::Exact).collect())
    }

    pub fn zero() -> Self {
        PowerSeries::from_fn(|_| Scalar::zero())
    }

    pub fn one() -> Self {
        PowerSeries::from_coeffs(vec![Scalar::one()])
    }

    /// The identity series `x`.
    pub fn x() -> Self {
        PowerSeries::from_coeffs(vec![Scalar::zero(), Scalar::one()])
    }

    /// Coefficients from a closed form in `n`, evaluated exactly when the
    /// form is rational.
    pub fn from_expr(expr: RealExpr) -> Self {
        PowerSeries::try_from_fn(move |n| {
            let at = Scalar::Exact(Rat::from_integer(BigInt::from(n)));
            let v = expr
                .eval(&|name| (name == "n").then(|| at.clone()))
                .map_err(|source| SeriesError::Coefficient { index: n, source })?;
            if v.to_f64().is_finite() {
                Ok(v)
            } else {
                Err(SeriesError::NonFinite { index: n })
            }
        })
    }

    pub fn coeff(&self, n: u64) -> Result<Scalar, SeriesError> {
        if n >= MEMO_CAP {
            return (self.rule)(n);
        }
        let i = n as usize;
        if let Some(Some(c)) = self.memo.lock().expect("memo poisoned").get(i) {
            return Ok(c.clone());
        }
        // The lock is not held while computing: rules may consult other
        // series, or this one at a smaller index.
        let c = (self.rule)(n)?;
        let mut memo = self.memo.lock().expect("memo poisoned");
        if memo.len() <= i {
            memo.resize(i + 1, None);
        }
        memo[i] = Some(c.clone());
        Ok(c)
    }

    /// Coefficients `0 ..= order`.
    pub fn prefix(&self, order: u64) -> Result<Vec<Scalar>, SeriesError> {
        (0..=order).map(|n| self.coeff(n)).collect()
    }
}

fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn inv_factorial(n: u64) -> Rat {
    Rat::new(BigInt::one(), factorial(n))
}

/// `exp`: coefficients `1/n!`.
pub fn exp_ps() -> PowerSeries {
    PowerSeries::from_fn(|n| Scalar::Exact(inv_factorial(n)))
}

/// `sin`: `(−1)^k/(2k+1)!` at odd indices.
pub fn sin_ps() -> PowerSeries {
    PowerSeries::from_fn(|n| {
        if n % 2 == 0 {
            Scalar::zero()
        } else {
            let c = inv_factorial(n);
            Scalar::Exact(if (n / 2) % 2 == 0 { c } else { -c })
        }
    })
}

/// `cos`: `(−1)^k/(2k)!` at even indices.
pub fn cos_ps() -> PowerSeries {
    PowerSeries::from_fn(|n| {
        if n % 2 == 1 {
            Scalar::zero()
        } else {
            let c = inv_factorial(n);
            Scalar::Exact(if (n / 2) % 2 == 0 { c } else { -c })
        }
    })
}

/// The geometric series `1 + x + x² + …`.
pub fn geom_ps() -> PowerSeries {
    PowerSeries::from_fn(|_| Scalar::one())
}

pub fn add_ps(a: &PowerSeries, b: &PowerSeries) -> PowerSeries {
    let (a, b) = (a.clone(), b.clone());
    PowerSeries::try_from_fn(move |n| Ok(a.coeff(n)? + b.coeff(n)?))
}

pub fn scale_ps(c: &Rat, a: &PowerSeries) -> PowerSeries {
    let (c, a) = (Scalar::Exact(c.clone()), a.clone());
    PowerSeries::try_from_fn(move |n| Ok(&c * &a.coeff(n)?))
}

pub fn neg_ps(a: &PowerSeries) -> PowerSeries {
    scale_ps(&-Rat::one(), a)
}

/// Cauchy product `cₙ = Σₖ a(k)·b(n−k)`.
pub fn mul_ps(a: &PowerSeries, b: &PowerSeries) -> PowerSeries {
    let (a, b) = (a.clone(), b.clone());
    PowerSeries::try_from_fn(move |n| {
        let mut acc = Scalar::zero();
        for k in 0..=n {
            acc = acc + &a.coeff(k)? * &b.coeff(n - k)?;
        }
        Ok(acc)
    })
}

/// `(n+1)·a(n+1)`.
pub fn deriv_ps(a: &PowerSeries) -> PowerSeries {
    let a = a.clone();
    PowerSeries::try_from_fn(move |n| Ok(&Scalar::Exact(Rat::from_integer(BigInt::from(n) + 1)) * &a.coeff(n + 1)?))
}

/// Antiderivative with constant term `c0`.
pub fn integ_ps(a: &PowerSeries, c0: &Rat) -> PowerSeries {
    let (a, c0) = (a.clone(), Scalar::Exact(c0.clone()));
    PowerSeries::try_from_fn(move |n| {
        if n == 0 {
            return Ok(c0.clone());
        }
        let d = Scalar::Exact(Rat::from_integer(BigInt::from(n)));
        Ok(a.coeff(n - 1)?.checked_div(&d).expect("n ≥ 1"))
    })
}

fn truncated_mul(p: &[Scalar], q: &[Scalar], len: usize) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); len];
    for (i, pi) in p.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
        for (j, qj) in q.iter().enumerate().take(len.saturating_sub(i)) {
            if !qj.is_zero() {
                out[i + j] = &out[i + j] + &(pi * qj);
            }
        }
    }
    out
}

/// Coefficients `0 ..= order` of `a ∘ b`, by Horner's scheme on truncated
/// polynomials; higher coefficients of the result are zero.
pub fn compose_ps(a: &PowerSeries, b: &PowerSeries, order: u64) -> Result<PowerSeries, SeriesError> {
    if !b.coeff(0)?.is_zero() {
        return Err(SeriesError::NonZeroConstantTerm);
    }
    let len = order as usize + 1;
    let bs = b.prefix(order)?;
    let mut acc = vec![Scalar::zero(); len];
    for k in (0..=order).rev() {
        acc = truncated_mul(&acc, &bs, len);
        acc[0] = &acc[0] + &a.coeff(k)?;
    }
    Ok(PowerSeries::from_coeffs(acc))
}

/// Outcome of a numeric summation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumResult {
    pub value: f64,
    pub terms_used: u64,
    pub converged: bool,
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

fn sum_terms(
    mut term: impl FnMut(u64) -> Result<f64, SeriesError>,
    tol: f64,
    max_terms: u64,
) -> Result<SumResult, SeriesError> {
    if !(tol > 0.0) {
        return Err(SeriesError::BadTolerance(tol));
    }
    let mut acc = CompensatedSum::default();
    let mut stab = Stabilizer::new(tol);
    for n in 0..max_terms {
        let t = term(n)?;
        if !t.is_finite() {
            return Err(SeriesError::NonFinite { index: n });
        }
        acc.add(t);
        if stab.push(t) {
            return Ok(SumResult { value: acc.value(), terms_used: n + 1, converged: true });
        }
    }
    Ok(SumResult { value: acc.value(), terms_used: max_terms, converged: false })
}

/// `Σ f`: limit of the partial sums, declared once
/// [`STABILIZATION_WINDOW`](crate::seq::STABILIZATION_WINDOW) consecutive
/// increments are below `tol`.
pub fn sigma(f: &dyn Fn(u64) -> f64, tol: f64, max_terms: u64) -> Result<SumResult, SeriesError> {
    sum_terms(|n| Ok(f(n)), tol, max_terms)
}

/// `Σ a(n)·xⁿ`.
pub fn powers_eval(a: &PowerSeries, x: f64, tol: f64, max_terms: u64) -> Result<SumResult, SeriesError> {
    if x == 0.0 {
        if !(tol > 0.0) {
            return Err(SeriesError::BadTolerance(tol));
        }
        return Ok(SumResult { value: a.coeff(0)?.to_f64(), terms_used: 1, converged: true });
    }
    let mut power = 1.0;
    sum_terms(
        |n| {
            let c = a.coeff(n)?;
            let t = if c.is_zero() { 0.0 } else { c.to_f64() * power };
            power *= x;
            Ok(t)
        },
        tol,
        max_terms,
    )
}

/// Parse a series: a builtin name (`exp`, `sin`, `cos`, `geom`), a literal
/// prefix list such as `[1, 1, 1/2]`, or a closed form in `n`.
pub fn parse_series(src: &str) -> Result<PowerSeries, SeriesError> {
    match src.trim() {
        "exp" => return Ok(exp_ps()),
        "sin" => return Ok(sin_ps()),
        "cos" => return Ok(cos_ps()),
        "geom" => return Ok(geom_ps()),
        _ => {}
    }
    let tokens = tokenize(src)?;
    if !matches!(tokens.first().map(|t| &t.tok), Some(Tok::Sym("["))) {
        return Ok(PowerSeries::from_expr(parse_real_expr(src, &["n"])?));
    }
    let mut cur = Cursor::new(&tokens, src.len());
    cur.expect_sym("[")?;
    let mut coeffs = Vec::new();
    if !cur.eat_sym("]") {
        loop {
            let offset = cur.offset();
            let e = parse_sum(&mut cur, &[])?;
            let v = e.eval(&|_| None).map_err(|_| ParseError::new(offset, &["constant"], e.to_string()))?;
            coeffs.push(v);
            if cur.eat_sym("]") {
                break;
            }
            cur.expect_sym(",")?;
        }
    }
    cur.expect_end()?;
    Ok(PowerSeries::from_coeffs(coeffs))
}

/// Exact rational from a decimal or `p/q` literal.
pub fn parse_rat(src: &str) -> Option<Rat> {
    match src.split_once('/') {
        Some((p, q)) => {
            let (p, q) = (parse_decimal(p.trim())?, parse_decimal(q.trim())?);
            (!q.is_zero()).then(|| p / q)
        }
        None => parse_decimal(src.trim()),
    }
}
