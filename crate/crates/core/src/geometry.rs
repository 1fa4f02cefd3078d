//! A small language of plane transformations with two semantics.
//!
//! [`apply_geometric`] acts on points directly (2×2 rotations, scalar
//! scaling, translation). [`apply_via_complex`] first collapses the whole
//! transform to an affine map `z ↦ m·z + o` over complex numbers and then
//! applies it. [`semantics_equivalent`] checks that both agree on sampled
//! points.
//!
//! `Compose(f, g)` applies `g` first, then `f`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::complex::{add_c, from_polar, mul_c, CartComplex, PolarComplex};
use crate::lexer::{tokenize, Cursor, ParseError};
use crate::number::Scalar;
use crate::numexpr::{parse_product, EvalError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("scale factor must be non-negative, got {0}")]
    NegativeScale(f64),
    #[error("non-finite transform parameter {0}")]
    NonFinite(f64),
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("cannot evaluate parameter: {0}")]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn max_abs_diff(&self, other: &Point) -> f64 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::number::format_plain;
        write!(f, "({}, {})", format_plain(self.x), format_plain(self.y))
    }
}

/// A non-negative, finite scale factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleFactor(f64);

impl ScaleFactor {
    pub fn new(m: f64) -> Result<Self, GeometryError> {
        if !m.is_finite() {
            Err(GeometryError::NonFinite(m))
        } else if m < 0.0 {
            Err(GeometryError::NegativeScale(m))
        } else {
            Ok(ScaleFactor(m))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Transform {
    Identity,
    Scale(ScaleFactor),
    Rotate(f64),
    Translate(f64, f64),
    /// `Compose(f, g)`: `g` first, then `f`.
    Compose(Box<Transform>, Box<Transform>),
}

fn finite(x: f64) -> Result<f64, GeometryError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(GeometryError::NonFinite(x))
    }
}

impl Transform {
    pub fn scale(m: f64) -> Result<Self, GeometryError> {
        ScaleFactor::new(m).map(Transform::Scale)
    }

    pub fn rotate(theta: f64) -> Result<Self, GeometryError> {
        finite(theta).map(Transform::Rotate)
    }

    pub fn translate(dx: f64, dy: f64) -> Result<Self, GeometryError> {
        Ok(Transform::Translate(finite(dx)?, finite(dy)?))
    }

    pub fn compose(f: Transform, g: Transform) -> Self {
        Transform::Compose(Box::new(f), Box::new(g))
    }

    /// `self` first, then `next`.
    pub fn then(self, next: Transform) -> Self {
        Transform::compose(next, self)
    }

    pub fn depth(&self) -> usize {
        match self {
            Transform::Compose(f, g) => 1 + f.depth().max(g.depth()),
            _ => 1,
        }
    }
}

/// Concrete syntax: `id`, `scale m`, `rotate t`, `translate dx dy`, and
/// `a ; b` for "a then b".
impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Identity => f.write_str("id"),
            Transform::Scale(m) => write!(f, "scale {}", m.get()),
            Transform::Rotate(t) => write!(f, "rotate {t}"),
            Transform::Translate(dx, dy) => write!(f, "translate {dx} {dy}"),
            Transform::Compose(outer, inner) => write!(f, "({inner} ; {outer})"),
        }
    }
}

pub fn apply_geometric(t: &Transform, p: Point) -> Point {
    match t {
        Transform::Identity => p,
        Transform::Scale(m) => Point::new(m.get() * p.x, m.get() * p.y),
        Transform::Rotate(theta) => {
            let (s, c) = theta.sin_cos();
            Point::new(p.x * c - p.y * s, p.x * s + p.y * c)
        }
        Transform::Translate(dx, dy) => Point::new(p.x + dx, p.y + dy),
        Transform::Compose(f, g) => apply_geometric(f, apply_geometric(g, p)),
    }
}

/// The map `z ↦ multiplier·z + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineForm {
    pub multiplier: CartComplex,
    pub offset: CartComplex,
}

impl AffineForm {
    pub fn identity() -> Self {
        AffineForm { multiplier: CartComplex::one(), offset: CartComplex::zero() }
    }

    pub fn apply(&self, z: &CartComplex) -> CartComplex {
        add_c(&mul_c(&self.multiplier, z), &self.offset)
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &AffineForm) -> AffineForm {
        AffineForm {
            multiplier: mul_c(&self.multiplier, &inner.multiplier),
            offset: add_c(&mul_c(&self.multiplier, &inner.offset), &self.offset),
        }
    }
}

fn real_scalar(x: f64) -> Scalar {
    Scalar::float(x).unwrap_or_else(|_| Scalar::zero())
}

pub fn to_affine(t: &Transform) -> AffineForm {
    match t {
        Transform::Identity => AffineForm::identity(),
        Transform::Scale(m) => AffineForm {
            multiplier: CartComplex::new(real_scalar(m.get()), Scalar::zero()),
            offset: CartComplex::zero(),
        },
        Transform::Rotate(theta) => {
            let unit = PolarComplex::with_angle(1.0, *theta).expect("finite rotation angle");
            AffineForm { multiplier: from_polar(&unit), offset: CartComplex::zero() }
        }
        Transform::Translate(dx, dy) => {
            AffineForm { multiplier: CartComplex::one(), offset: CartComplex::new(real_scalar(*dx), real_scalar(*dy)) }
        }
        Transform::Compose(f, g) => to_affine(f).after(&to_affine(g)),
    }
}

pub fn apply_via_complex(t: &Transform, p: Point) -> Point {
    let z = CartComplex::new(real_scalar(p.x), real_scalar(p.y));
    let (x, y) = to_affine(t).apply(&z).to_f64_pair();
    Point::new(x, y)
}

/// Relative tolerance of the equivalence check: deviations are compared
/// against `EQUIVALENCE_TOLERANCE · (1 + |p|)`.
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    /// Largest `|geometric − complex|∞` seen.
    pub max_deviation: f64,
    /// Largest deviation divided by `1 + |p|`.
    pub max_scaled_deviation: f64,
    pub samples: usize,
}

/// Compares both semantics on `sample_count` points drawn uniformly from
/// `[-10, 10]²` with a seeded generator.
pub fn semantics_equivalent(t: &Transform, sample_count: usize, seed: u64) -> EquivalenceReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Point> = (0..sample_count.max(1))
        .map(|_| Point::new(rng.random_range(-10.0..=10.0), rng.random_range(-10.0..=10.0)))
        .collect();
    equivalent_on(t, &points)
}

pub fn equivalent_on(t: &Transform, points: &[Point]) -> EquivalenceReport {
    let affine = to_affine(t);
    let mut max_deviation: f64 = 0.0;
    let mut max_scaled: f64 = 0.0;
    for p in points {
        let geometric = apply_geometric(t, *p);
        let z = CartComplex::new(real_scalar(p.x), real_scalar(p.y));
        let (x, y) = affine.apply(&z).to_f64_pair();
        let dev = geometric.max_abs_diff(&Point::new(x, y));
        let scaled = if dev.is_nan() { f64::INFINITY } else { dev / (1.0 + p.norm()) };
        max_deviation = max_deviation.max(dev);
        max_scaled = max_scaled.max(scaled);
    }
    EquivalenceReport {
        equivalent: max_scaled <= EQUIVALENCE_TOLERANCE,
        max_deviation,
        max_scaled_deviation: max_scaled,
        samples: points.len(),
    }
}

/// Parse the textual transform syntax. `a ; b` means "a then b", i.e.
/// `Compose(b, a)`. Parameters are numeric expressions at multiplicative
/// level (`pi/2`, `-1`, `2*pi`).
pub fn parse_transform(src: &str) -> Result<Transform, GeometryError> {
    let tokens = tokenize(src)?;
    let mut cur = Cursor::new(&tokens, src.len());
    let t = parse_sequence(&mut cur)?;
    cur.expect_end()?;
    Ok(t)
}

fn parse_sequence(cur: &mut Cursor<'_>) -> Result<Transform, GeometryError> {
    let mut acc = parse_atom(cur)?;
    while cur.eat_sym(";") {
        let next = parse_atom(cur)?;
        acc = acc.then(next);
    }
    Ok(acc)
}

fn parameter(cur: &mut Cursor<'_>) -> Result<f64, GeometryError> {
    let e = parse_product(cur, &[])?;
    Ok(e.eval(&|_| None)?.to_f64())
}

fn parse_atom(cur: &mut Cursor<'_>) -> Result<Transform, GeometryError> {
    if cur.eat_sym("(") {
        let t = parse_sequence(cur)?;
        cur.expect_sym(")")?;
        return Ok(t);
    }
    if cur.eat_ident("id") {
        return Ok(Transform::Identity);
    }
    if cur.eat_ident("scale") {
        return Transform::scale(parameter(cur)?);
    }
    if cur.eat_ident("rotate") {
        return Transform::rotate(parameter(cur)?);
    }
    if cur.eat_ident("translate") {
        let dx = parameter(cur)?;
        let dy = parameter(cur)?;
        return Transform::translate(dx, dy);
    }
    Err(cur.error(&["id", "scale", "rotate", "translate", "("]).into())
}

/// Parse `(x, y)` or `x,y`.
pub fn parse_point(src: &str) -> Result<Point, GeometryError> {
    let tokens = tokenize(src)?;
    let mut cur = Cursor::new(&tokens, src.len());
    let paren = cur.eat_sym("(");
    let x = crate::numexpr::parse_sum(&mut cur, &[])?.eval(&|_| None)?.to_f64();
    cur.expect_sym(",")?;
    let y = crate::numexpr::parse_sum(&mut cur, &[])?.eval(&|_| None)?.to_f64();
    if paren {
        cur.expect_sym(")")?;
    }
    cur.expect_end()?;
    Ok(Point::new(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: Point, b: Point, tol: f64) -> bool {
        a.max_abs_diff(&b) <= tol
    }

    #[test]
    fn geometric_action() {
        let r = apply_geometric(&Transform::rotate(PI / 2.0).unwrap(), Point::new(1.0, 0.0));
        assert!(close(r, Point::new(0.0, 1.0), 1e-15));
        assert_eq!(apply_geometric(&Transform::scale(2.0).unwrap(), Point::new(3.0, 4.0)), Point::new(6.0, 8.0));
        let t = Transform::compose(Transform::scale(2.0).unwrap(), Transform::rotate(PI).unwrap());
        assert!(close(apply_geometric(&t, Point::new(1.0, 0.0)), Point::new(-2.0, 0.0), 1e-15));
    }

    #[test]
    fn affine_forms() {
        let a = to_affine(&Transform::rotate(PI / 2.0).unwrap());
        let (x, y) = a.multiplier.to_f64_pair();
        assert!(x.abs() < 1e-16 && (y - 1.0).abs() < 1e-16);
        assert_eq!(to_affine(&Transform::Identity), AffineForm::identity());
        let t = Transform::compose(Transform::translate(1.0, 0.0).unwrap(), Transform::translate(0.0, 1.0).unwrap());
        let a = to_affine(&t);
        assert_eq!(a.multiplier.to_f64_pair(), (1.0, 0.0));
        assert_eq!(a.offset.to_f64_pair(), (1.0, 1.0));
    }

    #[test]
    fn complex_action() {
        let r = apply_via_complex(&Transform::rotate(PI / 2.0).unwrap(), Point::new(1.0, 0.0));
        assert!(close(r, Point::new(0.0, 1.0), 1e-15));
        let p = Point::new(-3.5, 2.25);
        assert_eq!(apply_via_complex(&Transform::Identity, p), p);
        assert_eq!(apply_via_complex(&Transform::scale(3.0).unwrap(), Point::new(1.0, 2.0)), Point::new(3.0, 6.0));
    }

    #[test]
    fn equivalence_examples() {
        let id = semantics_equivalent(&Transform::Identity, 100, 1);
        assert!(id.equivalent);
        assert_eq!(id.max_deviation, 0.0);
        let t = Transform::compose(Transform::rotate(1.0).unwrap(), Transform::scale(2.0).unwrap());
        assert!(semantics_equivalent(&t, 1000, 2).equivalent);
    }

    #[test]
    fn negative_scale_rejected() {
        assert_eq!(Transform::scale(-1.0), Err(GeometryError::NegativeScale(-1.0)));
        assert!(Transform::rotate(f64::NAN).is_err());
    }

    #[test]
    fn transform_syntax() {
        let t = parse_transform("rotate pi/2 ; scale 2").unwrap();
        assert_eq!(t, Transform::compose(Transform::scale(2.0).unwrap(), Transform::rotate(PI / 2.0).unwrap()));
        assert!(close(apply_geometric(&t, Point::new(1.0, 0.0)), Point::new(0.0, 2.0), 1e-15));
        let t = parse_transform("translate 1 -2").unwrap();
        assert_eq!(t, Transform::Translate(1.0, -2.0));
        let t = parse_transform("(id ; rotate 1) ; translate 0.5 0.5").unwrap();
        assert_eq!(t.depth(), 3);
        let reparsed = parse_transform(&t.to_string()).unwrap();
        assert_eq!(reparsed, t);
        assert!(parse_transform("scale -1").is_err());
        let err = parse_transform("spin 3").unwrap_err();
        assert!(matches!(err, GeometryError::Syntax(ParseError { offset: 0, .. })));
    }

    #[test]
    fn point_syntax() {
        assert_eq!(parse_point("(1, 0)").unwrap(), Point::new(1.0, 0.0));
        assert_eq!(parse_point("-2,3.5").unwrap(), Point::new(-2.0, 3.5));
        assert!(parse_point("(1 0)").is_err());
    }
}
