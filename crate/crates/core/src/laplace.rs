//! Numeric Laplace transform `ℒf(s) = ∫₀^∞ e^(−st) f(t) dt` for real `s`
//! and real-valued `f`, truncated at a finite horizon.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LaplaceError {
    #[error("s must be positive, got {0}")]
    NonPositiveS(f64),
    #[error("s = {s} does not exceed the declared growth rate {rate}")]
    BelowGrowthRate { s: f64, rate: f64 },
    #[error("integrand is not finite at t = {0}")]
    NonFinite(f64),
    #[error("quadrature did not converge; last refinement delta {delta:e}")]
    NoConvergence { delta: f64 },
    #[error("invalid option: {0}")]
    BadOption(String),
}

/// Declared bound `|f(t)| ≤ bound · e^(rate·t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthCap {
    pub bound: f64,
    pub rate: f64,
}

impl Default for GrowthCap {
    fn default() -> Self {
        GrowthCap { bound: 1.0, rate: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceOptions {
    /// Absolute tolerance for the integral.
    pub quad_tol: f64,
    /// Integration horizon; derived from the growth cap when absent.
    pub t_max: Option<f64>,
    pub growth: GrowthCap,
    pub max_subdivisions: usize,
}

impl Default for LaplaceOptions {
    fn default() -> Self {
        LaplaceOptions { quad_tol: 1e-9, t_max: None, growth: GrowthCap::default(), max_subdivisions: 4000 }
    }
}

/// Horizon `T` beyond which the tail of the integral is at most `tol/10`
/// and `e^(−sT)·|f(T)|` is at most `tol/10`.
pub fn default_horizon(s: f64, tol: f64, growth: GrowthCap) -> Result<f64, LaplaceError> {
    let gap = s - growth.rate;
    if !(gap > 0.0) {
        return Err(LaplaceError::BelowGrowthRate { s, rate: growth.rate });
    }
    let t = (10.0 * growth.bound.max(f64::MIN_POSITIVE) / (tol * gap.min(1.0))).ln() / gap;
    Ok(t.max(1.0))
}

// Gauss–Kronrod 7-15 nodes on [-1, 1] (non-negative half) and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes (the 7-point rule).
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Result<Panel, LaplaceError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |t: f64| {
        let v = f(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(LaplaceError::NonFinite(t))
        }
    };
    let fc = eval(center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK.iter().zip(&WGK).take(7).enumerate() {
        let pair = eval(center - half * x)? + eval(center + half * x)?;
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Ok(Panel { a, b, value: kronrod * half, error: ((kronrod - gauss) * half).abs() })
}

/// Globally adaptive Gauss–Kronrod quadrature: the panel with the largest
/// error estimate is bisected until the summed estimate is below `tol`.
pub fn integrate(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    max_subdivisions: usize,
) -> Result<f64, LaplaceError> {
    if !(tol > 0.0) {
        return Err(LaplaceError::BadOption(format!("tolerance {tol}")));
    }
    let mut panels = vec![gk15(f, a, b)?];
    for _ in 0..max_subdivisions {
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if error <= tol {
            return Ok(panels.iter().map(|p| p.value).sum());
        }
        let worst = (0..panels.len()).max_by(|&i, &j| panels[i].error.total_cmp(&panels[j].error)).expect("non-empty");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        panels.push(gk15(f, p.a, mid)?);
        panels.push(gk15(f, mid, p.b)?);
    }
    let error: f64 = panels.iter().map(|p| p.error).sum();
    if error <= tol {
        Ok(panels.iter().map(|p| p.value).sum())
    } else {
        Err(LaplaceError::NoConvergence { delta: error })
    }
}

/// `∫₀^T e^(−st) f(t) dt`, with `T` taken from the options or derived from
/// the growth cap.
pub fn laplace_numeric(f: &dyn Fn(f64) -> f64, s: f64, opts: &LaplaceOptions) -> Result<f64, LaplaceError> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(LaplaceError::NonPositiveS(s));
    }
    let t_max = match opts.t_max {
        Some(t) if t > 0.0 && t.is_finite() => t,
        Some(t) => return Err(LaplaceError::BadOption(format!("horizon {t}"))),
        None => default_horizon(s, opts.quad_tol, opts.growth)?,
    };
    let integrand = |t: f64| (-s * t).exp() * f(t);
    integrate(&integrand, 0.0, t_max, opts.quad_tol, opts.max_subdivisions)
}
