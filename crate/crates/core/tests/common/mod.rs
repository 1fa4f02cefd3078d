#![allow(dead_code)]

use std::f64::consts::PI;

use mathdsl_core::expr::ComplexExpr;
use mathdsl_core::geometry::Transform;
use mathdsl_core::number::{rat, Rat, Scalar};
use mathdsl_core::seq::FiniteSet;
use mathdsl_core::series::PowerSeries;
use rand::Rng;

/// Small exact rational with numerator in [-20, 20] and denominator in [1, 12].
pub fn small_rat<R: Rng>(rng: &mut R) -> Rat {
    rat(rng.random_range(-20..=20), rng.random_range(1..=12))
}

/// Random expression tree of depth at most `depth`. Leaves are exact
/// rationals, `i`, or (with `floats`) finite floats.
pub fn random_expr<R: Rng>(rng: &mut R, depth: u32, floats: bool) -> ComplexExpr {
    if depth <= 1 || rng.random_ratio(1, 3) {
        return match rng.random_range(0..4) {
            0 => ComplexExpr::ImaginaryUnit,
            1 if floats => ComplexExpr::FromReal(Scalar::float(rng.random_range(-100.0..100.0)).unwrap()),
            _ => ComplexExpr::FromReal(small_rat(rng).into()),
        };
    }
    let d = depth - 1;
    match rng.random_range(0..3) {
        0 => ComplexExpr::plus(random_expr(rng, d, floats), random_expr(rng, d, floats)),
        1 => ComplexExpr::times(random_expr(rng, d, floats), random_expr(rng, d, floats)),
        _ => ComplexExpr::negate(random_expr(rng, d, floats)),
    }
}

/// Random transform of depth at most `depth`. Scale factors stay in
/// [1/2, 2] so deep compositions keep a moderate magnitude.
pub fn random_transform<R: Rng>(rng: &mut R, depth: usize) -> Transform {
    if depth <= 1 || rng.random_ratio(2, 5) {
        return match rng.random_range(0..4) {
            0 => Transform::Identity,
            1 => Transform::scale(rng.random_range(0.5..=2.0)).unwrap(),
            2 => Transform::rotate(rng.random_range(-2.0 * PI..=2.0 * PI)).unwrap(),
            _ => Transform::translate(rng.random_range(-10.0..=10.0), rng.random_range(-10.0..=10.0)).unwrap(),
        };
    }
    Transform::compose(random_transform(rng, depth - 1), random_transform(rng, depth - 1))
}

pub fn random_finite_set<R: Rng>(rng: &mut R) -> FiniteSet {
    let n = rng.random_range(1..=20);
    let values = (0..n).map(|_| rng.random_range(-50..=50) as f64 / 4.0).collect();
    FiniteSet::new(values).unwrap()
}

pub fn random_rats<R: Rng>(rng: &mut R, len: usize) -> Vec<Rat> {
    (0..len).map(|_| small_rat(rng)).collect()
}

/// Series with a random exact prefix of length `len`, zero afterwards.
pub fn random_series<R: Rng>(rng: &mut R, len: usize) -> (PowerSeries, Vec<Rat>) {
    let c = random_rats(rng, len);
    (PowerSeries::from_rats(&c), c)
}

pub fn exact(s: &Scalar) -> Rat {
    s.as_exact().expect("exact coefficient").clone()
}

/// Brute-force Cauchy product of two finite coefficient lists, truncated to `order` terms.
pub fn convolve(a: &[Rat], b: &[Rat], order: usize) -> Vec<Rat> {
    let zero = Rat::from_integer(0.into());
    let get = |v: &[Rat], i: usize| v.get(i).cloned().unwrap_or_else(|| zero.clone());
    (0..order).map(|n| (0..=n).fold(zero.clone(), |acc, k| acc + get(a, k) * get(b, n - k))).collect()
}

/// Composite Simpson rule on [a, b] with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|k| f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}
