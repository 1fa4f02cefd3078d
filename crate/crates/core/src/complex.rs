//! Cartesian and polar complex numbers.
//!
//! `CartComplex` is the pair representation `C(re, im)`; its components are
//! [`Scalar`]s, so sums and products of rational literals stay exact.
//! `PolarComplex` is the `C′(modulus, argument)` representation with the
//! argument normalised to the half-open interval (−π, π].

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::number::{format_plain, Real, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComplexError {
    #[error("argument undefined at 0")]
    ArgumentAtZero,
    #[error("modulus must be non-negative, got {0}")]
    NegativeModulus(f64),
    #[error("argument {0} outside (-pi, pi]")]
    ArgumentOutOfRange(f64),
    #[error("non-finite component {0}")]
    NonFinite(f64),
}

/// Reduce an angle to its principal value in (−π, π].
pub fn principal_angle(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    let r = theta.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CartComplex {
    re: Scalar,
    im: Scalar,
}

impl CartComplex {
    pub fn new(re: impl Into<Scalar>, im: impl Into<Scalar>) -> Self {
        CartComplex { re: re.into(), im: im.into() }
    }

    /// Float constructor; rejects non-finite components.
    pub fn from_f64(re: f64, im: f64) -> Result<Self, ComplexError> {
        let re = Real::new(re).map_err(|_| ComplexError::NonFinite(re))?;
        let im = Real::new(im).map_err(|_| ComplexError::NonFinite(im))?;
        Ok(CartComplex::new(re, im))
    }

    pub fn zero() -> Self {
        CartComplex::new(Scalar::zero(), Scalar::zero())
    }

    pub fn one() -> Self {
        CartComplex::new(Scalar::one(), Scalar::zero())
    }

    /// The imaginary unit `C(0, 1)`.
    pub fn i() -> Self {
        CartComplex::new(Scalar::zero(), Scalar::one())
    }

    pub fn re(&self) -> &Scalar {
        &self.re
    }

    pub fn im(&self) -> &Scalar {
        &self.im
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_exact(&self) -> bool {
        self.re.is_exact() && self.im.is_exact()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Exact when both components are exact, tolerance otherwise.
    pub fn approx_eq(&self, other: &CartComplex, tol: f64) -> bool {
        self.re.approx_eq(&other.re, tol) && self.im.approx_eq(&other.im, tol)
    }
}

/// The embedding of the reals: `x ↦ C(x, 0)`.
pub fn to_complex(x: impl Into<Scalar>) -> CartComplex {
    CartComplex::new(x.into(), Scalar::zero())
}

pub fn add_c(w: &CartComplex, z: &CartComplex) -> CartComplex {
    CartComplex::new(&w.re + &z.re, &w.im + &z.im)
}

pub fn sub_c(w: &CartComplex, z: &CartComplex) -> CartComplex {
    CartComplex::new(&w.re - &z.re, &w.im - &z.im)
}

/// Product forced by distributivity together with `i·i = −1`.
pub fn mul_c(w: &CartComplex, z: &CartComplex) -> CartComplex {
    let re = &(&w.re * &z.re) - &(&w.im * &z.im);
    let im = &(&w.re * &z.im) + &(&w.im * &z.re);
    CartComplex::new(re, im)
}

pub fn neg_c(z: &CartComplex) -> CartComplex {
    CartComplex::new(-&z.re, -&z.im)
}

pub fn modulus_c(z: &CartComplex) -> f64 {
    let (x, y) = z.to_f64_pair();
    x.hypot(y)
}

/// Principal argument in (−π, π]. The negative real axis maps to +π.
pub fn argument_c(z: &CartComplex) -> Result<f64, ComplexError> {
    if z.is_zero() {
        return Err(ComplexError::ArgumentAtZero);
    }
    let (x, y) = z.to_f64_pair();
    // atan2(-0.0, x<0) yields -π
    let theta = y.atan2(x);
    Ok(if theta == -PI { PI } else { theta })
}

/// `C′(m, θ)` with `m ≥ 0` and `θ ∈ (−π, π]`; the zero modulus carries the
/// canonical argument 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarComplex {
    modulus: f64,
    argument: f64,
}

impl PolarComplex {
    pub fn new(modulus: f64, argument: f64) -> Result<Self, ComplexError> {
        if !modulus.is_finite() {
            return Err(ComplexError::NonFinite(modulus));
        }
        if !argument.is_finite() {
            return Err(ComplexError::NonFinite(argument));
        }
        if modulus < 0.0 {
            return Err(ComplexError::NegativeModulus(modulus));
        }
        if !(argument > -PI && argument <= PI) {
            return Err(ComplexError::ArgumentOutOfRange(argument));
        }
        let argument = if modulus == 0.0 { 0.0 } else { argument };
        Ok(PolarComplex { modulus, argument })
    }

    /// Accepts any real angle and reduces it to its principal value.
    pub fn with_angle(modulus: f64, angle: f64) -> Result<Self, ComplexError> {
        if !angle.is_finite() {
            return Err(ComplexError::NonFinite(angle));
        }
        PolarComplex::new(modulus, principal_angle(angle))
    }

    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    pub fn argument(&self) -> f64 {
        self.argument
    }
}

impl fmt::Display for PolarComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ∠ {}", format_plain(self.modulus), format_plain(self.argument))
    }
}

pub fn to_polar(z: &CartComplex) -> PolarComplex {
    match argument_c(z) {
        Ok(theta) => PolarComplex { modulus: modulus_c(z), argument: theta },
        Err(_) => PolarComplex { modulus: 0.0, argument: 0.0 },
    }
}

pub fn from_polar(p: &PolarComplex) -> CartComplex {
    let (s, c) = p.argument.sin_cos();
    CartComplex::new(
        Scalar::Float(Real::new(p.modulus * c).unwrap_or_default()),
        Scalar::Float(Real::new(p.modulus * s).unwrap_or_default()),
    )
}

impl fmt::Display for CartComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C({}, {})", self.re, self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::rat;

    fn c(re: Scalar, im: Scalar) -> CartComplex {
        CartComplex::new(re, im)
    }

    #[test]
    fn sum_of_paper_literals_is_exact() {
        // 3 + 2i plus 7/2 - 2/3 i, componentwise: 3 + 7/2 = 13/2, 2 - 2/3 = 4/3
        let w = c(Scalar::int(3), Scalar::int(2));
        let z = c(Scalar::ratio(7, 2), Scalar::ratio(-2, 3));
        let s = add_c(&w, &z);
        assert_eq!(s.re().as_exact(), Some(&rat(13, 2)));
        assert_eq!(s.im().as_exact(), Some(&rat(4, 3)));
        assert_eq!(add_c(&CartComplex::zero(), &z), z);
        assert_eq!(
            add_c(&c(Scalar::int(1), Scalar::int(1)), &c(Scalar::int(-1), Scalar::int(-1))),
            CartComplex::zero()
        );
    }

    #[test]
    fn difference() {
        let w = c(Scalar::int(3), Scalar::int(2));
        assert_eq!(sub_c(&w, &w), CartComplex::zero());
        assert_eq!(sub_c(&w, &CartComplex::zero()), w);
        let z = c(Scalar::ratio(7, 2), Scalar::ratio(-2, 3));
        let d = sub_c(&z, &w);
        assert_eq!(d, c(Scalar::ratio(1, 2), Scalar::ratio(-8, 3)));
        assert!(d.is_exact());
    }

    #[test]
    fn i_squared_is_minus_one() {
        let i = CartComplex::i();
        assert_eq!(mul_c(&i, &i), c(Scalar::int(-1), Scalar::zero()));
        assert_eq!(mul_c(&i, &CartComplex::one()), i);
        let z = c(Scalar::ratio(5, 7), Scalar::int(-4));
        assert_eq!(mul_c(&CartComplex::one(), &z), z);
    }

    #[test]
    fn projections() {
        let z = c(Scalar::int(3), Scalar::int(2));
        assert_eq!(z.re(), &Scalar::int(3));
        assert_eq!(z.im(), &Scalar::int(2));
        assert_eq!(CartComplex::zero().re(), &Scalar::zero());
    }

    #[test]
    fn modulus_and_argument() {
        assert_eq!(modulus_c(&c(Scalar::int(3), Scalar::int(4))), 5.0);
        assert_eq!(modulus_c(&CartComplex::zero()), 0.0);
        assert_eq!(modulus_c(&CartComplex::i()), 1.0);
        assert_eq!(argument_c(&CartComplex::i()).unwrap(), PI / 2.0);
        assert_eq!(argument_c(&CartComplex::one()).unwrap(), 0.0);
        assert_eq!(argument_c(&c(Scalar::int(-1), Scalar::zero())).unwrap(), PI);
        let neg_zero_im = CartComplex::from_f64(-1.0, -0.0).unwrap();
        assert_eq!(argument_c(&neg_zero_im).unwrap(), PI);
        assert_eq!(argument_c(&CartComplex::zero()), Err(ComplexError::ArgumentAtZero));
    }

    #[test]
    fn polar_conversions() {
        let p = to_polar(&CartComplex::i());
        assert_eq!((p.modulus(), p.argument()), (1.0, PI / 2.0));
        let z = to_polar(&CartComplex::zero());
        assert_eq!((z.modulus(), z.argument()), (0.0, 0.0));
        let back = from_polar(&PolarComplex::new(2.0, 0.0).unwrap());
        assert_eq!(back.to_f64_pair(), (2.0, 0.0));
    }

    #[test]
    fn polar_constructor_validation() {
        assert!(matches!(PolarComplex::new(-1.0, 0.0), Err(ComplexError::NegativeModulus(_))));
        assert!(matches!(PolarComplex::new(1.0, -PI), Err(ComplexError::ArgumentOutOfRange(_))));
        assert!(PolarComplex::new(1.0, PI).is_ok());
        assert_eq!(PolarComplex::new(0.0, 1.0).unwrap().argument(), 0.0);
        assert_eq!(PolarComplex::with_angle(1.0, 3.0 * PI).unwrap().argument(), PI);
    }

    #[test]
    fn embedding() {
        assert_eq!(to_complex(Scalar::int(-3)), c(Scalar::int(-3), Scalar::zero()));
        assert_eq!(to_complex(Scalar::zero()), CartComplex::zero());
        assert_eq!(to_complex(Scalar::ratio(7, 2)), c(Scalar::ratio(7, 2), Scalar::zero()));
    }

    #[test]
    fn principal_angle_range() {
        assert_eq!(principal_angle(PI), PI);
        assert_eq!(principal_angle(-PI), PI);
        assert!((principal_angle(2.5 * PI) - 0.5 * PI).abs() < 1e-12);
        assert!((principal_angle(-1.5 * PI) - 0.5 * PI).abs() < 1e-12);
    }

    #[test]
    fn polar_display() {
        assert_eq!(to_polar(&CartComplex::i()).to_string(), "1 ∠ 1.5707963268");
    }
}
