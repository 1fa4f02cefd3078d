//! Deep embedding of the complex-number language.
//!
//! [`ComplexExpr`] is the syntax tree; [`fold_expr`] is its structural
//! recursion; [`eval_cart`] and [`normalize`] interpret it into the
//! Cartesian domain; [`parse_expr`] and [`print_expr`] connect it to the two
//! concrete forms `a + bi` and `a + ib`.
//!
//! Grammar (ASCII, whitespace-insensitive):
//!
//! ```text
//! expr   := sign? term (("+" | "-") term)*
//! term   := factor ("*"? factor)*      -- juxtaposition only next to i, pi or "("
//! factor := number | "i" | "pi" | "(" expr ")"
//! number := integer | integer "/" positive-integer | decimal
//! ```
//!
//! Subtraction and leading minus desugar to `Negate`; a negated imaginary
//! term `b i` becomes `(−b) i`, so `a - b i` reads as `a + (−b) i`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::complex::{add_c, mul_c, neg_c, to_complex, CartComplex};
use crate::lexer::ParseError;
use crate::number::{parse_decimal, Rat, Scalar};

/// Tolerance for comparing canonical forms with a float component.
pub const EXPR_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum ComplexExpr {
    ImaginaryUnit,
    FromReal(Scalar),
    Plus(Box<ComplexExpr>, Box<ComplexExpr>),
    Times(Box<ComplexExpr>, Box<ComplexExpr>),
    Negate(Box<ComplexExpr>),
}

impl ComplexExpr {
    pub fn real(x: impl Into<Scalar>) -> Self {
        ComplexExpr::FromReal(x.into())
    }

    pub fn plus(a: ComplexExpr, b: ComplexExpr) -> Self {
        ComplexExpr::Plus(Box::new(a), Box::new(b))
    }

    pub fn times(a: ComplexExpr, b: ComplexExpr) -> Self {
        ComplexExpr::Times(Box::new(a), Box::new(b))
    }

    pub fn negate(a: ComplexExpr) -> Self {
        ComplexExpr::Negate(Box::new(a))
    }
}

/// Constructor-style rendering of the tree, e.g.
/// `Plus(FromReal 3, Times(FromReal 2, ImaginaryUnit))`.
impl fmt::Display for ComplexExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexExpr::ImaginaryUnit => f.write_str("ImaginaryUnit"),
            ComplexExpr::FromReal(x) => write!(f, "FromReal {x}"),
            ComplexExpr::Plus(a, b) => write!(f, "Plus({a}, {b})"),
            ComplexExpr::Times(a, b) => write!(f, "Times({a}, {b})"),
            ComplexExpr::Negate(a) => write!(f, "Negate({a})"),
        }
    }
}

/// One handler per constructor. A fold replaces each constructor by its
/// handler, which makes every implementation a homomorphism out of the
/// syntax.
pub trait ExprAlgebra {
    type Carrier;

    fn on_i(&self) -> Self::Carrier;
    fn on_from_real(&self, x: &Scalar) -> Self::Carrier;
    fn on_plus(&self, a: Self::Carrier, b: Self::Carrier) -> Self::Carrier;
    fn on_times(&self, a: Self::Carrier, b: Self::Carrier) -> Self::Carrier;
    fn on_negate(&self, a: Self::Carrier) -> Self::Carrier;
}

pub fn fold_expr<A: ExprAlgebra>(alg: &A, e: &ComplexExpr) -> A::Carrier {
    match e {
        ComplexExpr::ImaginaryUnit => alg.on_i(),
        ComplexExpr::FromReal(x) => alg.on_from_real(x),
        ComplexExpr::Plus(a, b) => alg.on_plus(fold_expr(alg, a), fold_expr(alg, b)),
        ComplexExpr::Times(a, b) => alg.on_times(fold_expr(alg, a), fold_expr(alg, b)),
        ComplexExpr::Negate(a) => alg.on_negate(fold_expr(alg, a)),
    }
}

/// Interprets the syntax in the Cartesian domain.
#[derive(Debug, Clone, Copy, Default)]
pub struct CartesianAlgebra;

impl ExprAlgebra for CartesianAlgebra {
    type Carrier = CartComplex;

    fn on_i(&self) -> CartComplex {
        CartComplex::i()
    }
    fn on_from_real(&self, x: &Scalar) -> CartComplex {
        to_complex(x.clone())
    }
    fn on_plus(&self, a: CartComplex, b: CartComplex) -> CartComplex {
        add_c(&a, &b)
    }
    fn on_times(&self, a: CartComplex, b: CartComplex) -> CartComplex {
        mul_c(&a, &b)
    }
    fn on_negate(&self, a: CartComplex) -> CartComplex {
        neg_c(&a)
    }
}

/// Rebuilds the constructors; folding with it is the identity.
#[derive(Debug, Clone, Copy, Default)]
pub struct RebuildAlgebra;

impl ExprAlgebra for RebuildAlgebra {
    type Carrier = ComplexExpr;

    fn on_i(&self) -> ComplexExpr {
        ComplexExpr::ImaginaryUnit
    }
    fn on_from_real(&self, x: &Scalar) -> ComplexExpr {
        ComplexExpr::FromReal(x.clone())
    }
    fn on_plus(&self, a: ComplexExpr, b: ComplexExpr) -> ComplexExpr {
        ComplexExpr::plus(a, b)
    }
    fn on_times(&self, a: ComplexExpr, b: ComplexExpr) -> ComplexExpr {
        ComplexExpr::times(a, b)
    }
    fn on_negate(&self, a: ComplexExpr) -> ComplexExpr {
        ComplexExpr::negate(a)
    }
}

/// Counts nodes.
#[derive(Debug, Clone, Copy, Default)]
pub struct SizeAlgebra;

impl ExprAlgebra for SizeAlgebra {
    type Carrier = usize;

    fn on_i(&self) -> usize {
        1
    }
    fn on_from_real(&self, _: &Scalar) -> usize {
        1
    }
    fn on_plus(&self, a: usize, b: usize) -> usize {
        1 + a + b
    }
    fn on_times(&self, a: usize, b: usize) -> usize {
        1 + a + b
    }
    fn on_negate(&self, a: usize) -> usize {
        1 + a
    }
}

/// Direct recursive evaluator into the Cartesian domain.
pub fn eval_cart(e: &ComplexExpr) -> CartComplex {
    match e {
        ComplexExpr::ImaginaryUnit => CartComplex::i(),
        ComplexExpr::FromReal(x) => to_complex(x.clone()),
        ComplexExpr::Plus(a, b) => add_c(&eval_cart(a), &eval_cart(b)),
        ComplexExpr::Times(a, b) => mul_c(&eval_cart(a), &eval_cart(b)),
        ComplexExpr::Negate(a) => crate::complex::sub_c(&CartComplex::zero(), &eval_cart(a)),
    }
}

/// Result of collapsing an expression to the single-constructor form
/// `PlusI re im`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalForm {
    pub re: Scalar,
    pub im: Scalar,
}

impl CanonicalForm {
    pub fn new(re: impl Into<Scalar>, im: impl Into<Scalar>) -> Self {
        CanonicalForm { re: re.into(), im: im.into() }
    }

    pub fn approx_eq(&self, other: &CanonicalForm) -> bool {
        self.re.approx_eq(&other.re, EXPR_TOLERANCE) && self.im.approx_eq(&other.im, EXPR_TOLERANCE)
    }

    pub fn to_expr(&self) -> ComplexExpr {
        ComplexExpr::plus(
            ComplexExpr::FromReal(self.re.clone()),
            ComplexExpr::times(ComplexExpr::FromReal(self.im.clone()), ComplexExpr::ImaginaryUnit),
        )
    }
}

impl From<CartComplex> for CanonicalForm {
    fn from(z: CartComplex) -> Self {
        CanonicalForm { re: z.re().clone(), im: z.im().clone() }
    }
}

pub fn normalize(e: &ComplexExpr) -> CanonicalForm {
    eval_cart(e).into()
}

/// Semantic equality: the canonical forms agree componentwise.
pub fn expr_equal(a: &ComplexExpr, b: &ComplexExpr) -> bool {
    normalize(a).approx_eq(&normalize(b))
}

/// The two concrete forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// `a + bi`
    Form1,
    /// `a + ib`
    Form2,
}

/// Renders the canonical form of `e`. General trees are normalized first.
pub fn print_expr(e: &ComplexExpr, form: Form) -> String {
    print_canonical(&normalize(e), form)
}

pub fn print_canonical(c: &CanonicalForm, form: Form) -> String {
    let sign = if c.im.is_negative() { " - " } else { " + " };
    let magnitude = c.im.abs();
    match form {
        Form::Form1 => format!("{}{sign}{}i", c.re, magnitude),
        Form::Form2 => format!("{}{sign}i{}", c.re, magnitude),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum CTok {
    Num(String),
    I,
    Pi,
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

impl CTok {
    fn describe(&self) -> String {
        match self {
            CTok::Num(s) => format!("`{s}`"),
            CTok::I => "`i`".into(),
            CTok::Pi => "`pi`".into(),
            CTok::Plus => "`+`".into(),
            CTok::Minus => "`-`".into(),
            CTok::Star => "`*`".into(),
            CTok::Slash => "`/`".into(),
            CTok::LParen => "`(`".into(),
            CTok::RParen => "`)`".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(CTok, usize)>, ParseError> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut chars = src.char_indices().peekable();
    while let Some(&(off, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let single = match c {
            '+' => Some(CTok::Plus),
            '-' | '−' => Some(CTok::Minus),
            '*' | '·' | '×' => Some(CTok::Star),
            '/' => Some(CTok::Slash),
            '(' => Some(CTok::LParen),
            ')' => Some(CTok::RParen),
            'π' => Some(CTok::Pi),
            _ => None,
        };
        if let Some(t) = single {
            chars.next();
            out.push((t, off));
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && bytes.get(off + 1).is_some_and(u8::is_ascii_digit)) {
            let mut end = off;
            while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
                end += 1;
            }
            out.push((CTok::Num(src[off..end].to_string()), off));
            while chars.peek().is_some_and(|&(i, _)| i < end) {
                chars.next();
            }
            continue;
        }
        if c.is_ascii_alphabetic() {
            // Split letter runs into `i` and `pi`, so `ipi` and `pii` work.
            let mut end = off;
            while end < bytes.len() && bytes[end].is_ascii_alphabetic() {
                end += 1;
            }
            let mut k = off;
            while k < end {
                if src[k..end].starts_with("pi") {
                    out.push((CTok::Pi, k));
                    k += 2;
                } else if bytes[k] == b'i' {
                    out.push((CTok::I, k));
                    k += 1;
                } else {
                    return Err(ParseError::new(k, &["i", "pi"], format!("`{}`", &src[k..end])));
                }
            }
            while chars.peek().is_some_and(|&(i, _)| i < end) {
                chars.next();
            }
            continue;
        }
        return Err(ParseError::new(off, &["number", "i", "pi", "+", "-", "*", "(", ")"], c.to_string()));
    }
    Ok(out)
}

struct ExprParser {
    toks: Vec<(CTok, usize)>,
    pos: usize,
    len: usize,
}

impl ExprParser {
    fn peek(&self) -> Option<&CTok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.len, |(_, o)| *o)
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let found = self.peek().map_or_else(|| "end of input".to_string(), CTok::describe);
        ParseError::new(self.offset(), expected, found)
    }

    fn expr(&mut self) -> Result<ComplexExpr, ParseError> {
        let mut acc = match self.peek() {
            Some(CTok::Minus) => {
                self.pos += 1;
                negate_term(self.term()?)
            }
            Some(CTok::Plus) => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(CTok::Plus) => {
                    self.pos += 1;
                    acc = ComplexExpr::plus(acc, self.term()?);
                }
                Some(CTok::Minus) => {
                    self.pos += 1;
                    acc = ComplexExpr::plus(acc, negate_term(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ComplexExpr, ParseError> {
        let mut acc = self.factor()?;
        let mut prev_is_i = matches!(acc, ComplexExpr::ImaginaryUnit);
        loop {
            let juxtaposed = match self.peek() {
                Some(CTok::Star) => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    prev_is_i = matches!(rhs, ComplexExpr::ImaginaryUnit);
                    acc = ComplexExpr::times(acc, rhs);
                    continue;
                }
                Some(CTok::I | CTok::Pi | CTok::LParen) => true,
                Some(CTok::Num(_)) => prev_is_i,
                _ => false,
            };
            if !juxtaposed {
                return Ok(acc);
            }
            let rhs = self.factor()?;
            prev_is_i = matches!(rhs, ComplexExpr::ImaginaryUnit);
            acc = ComplexExpr::times(acc, rhs);
        }
    }

    fn factor(&mut self) -> Result<ComplexExpr, ParseError> {
        let offset = self.offset();
        match self.peek().cloned() {
            Some(CTok::Num(text)) => {
                self.pos += 1;
                let value =
                    parse_decimal(&text).ok_or_else(|| ParseError::new(offset, &["number"], format!("`{text}`")))?;
                if self.peek() == Some(&CTok::Slash) {
                    self.pos += 1;
                    let den = match self.peek().cloned() {
                        Some(CTok::Num(d)) if d.bytes().all(|b| b.is_ascii_digit()) => {
                            self.pos += 1;
                            d.parse::<BigInt>().ok()
                        }
                        _ => None,
                    };
                    let den = den.filter(|d| !d.is_zero()).ok_or_else(|| self.error(&["positive integer"]))?;
                    if !text.bytes().all(|b| b.is_ascii_digit()) {
                        return Err(ParseError::new(offset, &["integer numerator"], format!("`{text}`")));
                    }
                    return Ok(ComplexExpr::FromReal(Scalar::Exact(value / Rat::from_integer(den))));
                }
                Ok(ComplexExpr::FromReal(Scalar::Exact(value)))
            }
            Some(CTok::I) => {
                self.pos += 1;
                Ok(ComplexExpr::ImaginaryUnit)
            }
            Some(CTok::Pi) => {
                self.pos += 1;
                Ok(ComplexExpr::FromReal(Scalar::pi()))
            }
            Some(CTok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&CTok::RParen) {
                    return Err(self.error(&[")", "+", "-"]));
                }
                self.pos += 1;
                Ok(e)
            }
            _ => Err(self.error(&["number", "i", "pi", "("])),
        }
    }
}

/// `b i ↦ (−b) i`, `i b ↦ i (−b)`, anything else is wrapped in `Negate`.
fn negate_term(t: ComplexExpr) -> ComplexExpr {
    match t {
        ComplexExpr::Times(a, b) if *b == ComplexExpr::ImaginaryUnit && *a != ComplexExpr::ImaginaryUnit => {
            ComplexExpr::Times(Box::new(ComplexExpr::negate(*a)), b)
        }
        ComplexExpr::Times(a, b) if *a == ComplexExpr::ImaginaryUnit && *b != ComplexExpr::ImaginaryUnit => {
            ComplexExpr::Times(a, Box::new(ComplexExpr::negate(*b)))
        }
        other => ComplexExpr::negate(other),
    }
}

pub fn parse_expr(text: &str) -> Result<ComplexExpr, ParseError> {
    let toks = lex(text)?;
    let mut p = ExprParser { toks, pos: 0, len: text.len() };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(p.error(&["+", "-", "*", "end of input"]));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::rat;

    fn real(n: i64) -> ComplexExpr {
        ComplexExpr::real(Scalar::int(n))
    }

    #[test]
    fn parses_paper_examples() {
        assert_eq!(
            parse_expr("3 + 2i").unwrap(),
            ComplexExpr::plus(real(3), ComplexExpr::times(real(2), ComplexExpr::ImaginaryUnit))
        );
        assert_eq!(
            parse_expr("0 + i pi").unwrap(),
            ComplexExpr::plus(real(0), ComplexExpr::times(ComplexExpr::ImaginaryUnit, ComplexExpr::real(Scalar::pi())))
        );
        assert_eq!(
            parse_expr("7/2 - 2/3 i").unwrap(),
            ComplexExpr::plus(
                ComplexExpr::real(Scalar::ratio(7, 2)),
                ComplexExpr::times(
                    ComplexExpr::negate(ComplexExpr::real(Scalar::ratio(2, 3))),
                    ComplexExpr::ImaginaryUnit
                )
            )
        );
    }

    #[test]
    fn accepted_shapes() {
        for src in
            ["3", "i", "2i", "2 i", "i2", "i pi", "2 pi", "(1 + i) * (1 - i)", "-3", "ipi", "3 + i2/3", "0.5 - 1.25i"]
        {
            assert!(parse_expr(src).is_ok(), "{src}");
        }
        assert_eq!(normalize(&parse_expr("2i").unwrap()), CanonicalForm::new(Scalar::zero(), Scalar::int(2)));
        assert_eq!(
            normalize(&parse_expr("(1 + i) * (1 - i)").unwrap()),
            CanonicalForm::new(Scalar::int(2), Scalar::zero())
        );
    }

    #[test]
    fn syntax_errors_carry_offset_and_expectations() {
        let err = parse_expr("3 + ").unwrap_err();
        assert_eq!(err.offset, 4);
        assert!(err.expected.contains(&"i".to_string()));
        let err = parse_expr("3 2").unwrap_err();
        assert_eq!(err.offset, 2);
        let err = parse_expr("3 + x").unwrap_err();
        assert_eq!(err.offset, 4);
        assert!(parse_expr("1/0").is_err());
        assert!(parse_expr("(1 + i").is_err());
    }

    #[test]
    fn printing_forms() {
        let c = CanonicalForm::new(Scalar::int(3), Scalar::int(2));
        assert_eq!(print_canonical(&c, Form::Form1), "3 + 2i");
        assert_eq!(print_canonical(&c, Form::Form2), "3 + i2");
        let c = CanonicalForm::new(Scalar::zero(), Scalar::pi());
        assert_eq!(print_canonical(&c, Form::Form2), "0 + ipi");
        assert_eq!(print_canonical(&CanonicalForm::new(Scalar::zero(), Scalar::zero()), Form::Form1), "0 + 0i");
        let c = CanonicalForm::new(Scalar::ratio(7, 2), Scalar::ratio(-2, 3));
        assert_eq!(print_canonical(&c, Form::Form1), "7/2 - 2/3i");
        assert_eq!(print_expr(&parse_expr("i * i").unwrap(), Form::Form1), "-1 + 0i");
    }

    #[test]
    fn folds() {
        let e = ComplexExpr::plus(ComplexExpr::ImaginaryUnit, ComplexExpr::ImaginaryUnit);
        assert_eq!(fold_expr(&SizeAlgebra, &e), 3);
        let e = parse_expr("7/2 - 2/3 i + (1 + i) * i").unwrap();
        assert_eq!(fold_expr(&RebuildAlgebra, &e), e);
        assert_eq!(fold_expr(&CartesianAlgebra, &e), eval_cart(&e));
    }

    #[test]
    fn evaluation() {
        let ii = ComplexExpr::times(ComplexExpr::ImaginaryUnit, ComplexExpr::ImaginaryUnit);
        assert_eq!(eval_cart(&ii), CartComplex::new(Scalar::int(-1), Scalar::zero()));
        assert_eq!(eval_cart(&real(-3)), CartComplex::new(Scalar::int(-3), Scalar::zero()));
        assert_eq!(eval_cart(&parse_expr("3 + 2i").unwrap()), CartComplex::new(Scalar::int(3), Scalar::int(2)));
        let z = eval_cart(&parse_expr("7/2 - 2/3 i").unwrap());
        assert_eq!(z.im().as_exact(), Some(&rat(-2, 3)));
    }

    #[test]
    fn normalization() {
        let n = normalize(&parse_expr("0 + i pi").unwrap());
        assert_eq!(n.re, Scalar::zero());
        assert_eq!(n.im.to_f64(), std::f64::consts::PI);
        assert_eq!(normalize(&ComplexExpr::ImaginaryUnit), CanonicalForm::new(Scalar::zero(), Scalar::one()));
    }

    #[test]
    fn equality() {
        let p = |s| parse_expr(s).unwrap();
        assert!(expr_equal(&p("3 + 2i"), &p("3 + i2")));
        assert!(expr_equal(&p("i"), &p("0 + 1i")));
        assert!(!expr_equal(&p("3 + 2i"), &p("2 + 3i")));
    }
}
