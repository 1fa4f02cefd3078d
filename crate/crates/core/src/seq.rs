//! Real sequences `ℕ → ℝ` and the combinators built around them: tails
//! (`drop` / `Drop`), sets of upper bounds, minima and suprema,
//! ε-neighbourhoods, and witness-based limit checks.
//!
//! Everything here is a numeric approximation of a classical notion.
//! Monotonicity and convergence are verified only on probed indices: a
//! reported violation is definitive, a pass is evidence.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::lexer::ParseError;
use crate::numexpr::{parse_real_expr, RealExpr};

/// Consecutive gaps below tolerance required before a run of values counts
/// as stabilised.
pub const STABILIZATION_WINDOW: usize = 8;
/// Default tolerance for convergence detection.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default index bound for searching a sequence range.
pub const DEFAULT_SEARCH_BOUND: u64 = 1_000_000;
/// Distance under which a probed element counts as equal to a query value.
pub const MEMBERSHIP_TOL: f64 = 1e-12;
/// Largest probe index; beyond 2⁵² consecutive integers stop being
/// representable as `f64`.
pub const MAX_PROBE_EXPONENT: u32 = 52;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeqError {
    #[error("sequence value at index {index} is not finite")]
    NonFinite { index: u64 },
    #[error("monotonicity violated: f({i}) = {fi} > f({j}) = {fj}")]
    NotMonotone { i: u64, fi: f64, j: u64, fj: f64 },
    #[error("no convergence detected after {probes} probes")]
    NoConvergence { probes: usize },
    #[error("probed value {value} at index {index} exceeds the bound {cap}")]
    Unbounded { index: u64, value: f64, cap: f64 },
    #[error("no upper bound")]
    NoUpperBound,
    #[error("minimum does not exist")]
    NoMinimum,
    #[error("empty set")]
    EmptySet,
    #[error("invalid set: {0}")]
    InvalidSet(String),
    #[error("neighbourhood radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error(transparent)]
    Syntax(#[from] ParseError),
}

/// A total map from indices to reals. Rules must be pure; the engine may
/// call them from several threads.
#[derive(Clone)]
pub struct Sequence {
    rule: Arc<dyn Fn(u64) -> f64 + Send + Sync>,
    label: Arc<str>,
}

impl Sequence {
    pub fn from_fn(label: &str, f: impl Fn(u64) -> f64 + Send + Sync + 'static) -> Self {
        Sequence { rule: Arc::new(f), label: label.into() }
    }

    pub fn constant(c: f64) -> Self {
        Sequence::from_fn(&c.to_string(), move |_| c)
    }

    /// A closed-form rule in the variable `n`.
    pub fn from_expr(expr: RealExpr) -> Self {
        let label = expr.to_string();
        Sequence::from_fn(&label, move |n| expr.eval_f64(&[("n", n as f64)]))
    }

    pub fn parse(src: &str) -> Result<Self, SeqError> {
        let expr = parse_real_expr(src, &["n"])?;
        Ok(Sequence { label: src.into(), ..Sequence::from_expr(expr) })
    }

    #[inline]
    pub fn at(&self, n: u64) -> f64 {
        (self.rule)(n)
    }

    pub fn try_at(&self, n: u64) -> Result<f64, SeqError> {
        let v = self.at(n);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(SeqError::NonFinite { index: n })
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sequence({})", self.label)
    }
}

/// `drop n f = λ i → f (n + i)`.
pub fn drop_seq(n: u64, f: &Sequence) -> Sequence {
    let inner = f.clone();
    Sequence { rule: Arc::new(move |i| inner.at(n.saturating_add(i))), label: format!("drop {n} ({})", f.label).into() }
}

/// `Drop n f`: the set of values of the `n`-th tail.
pub fn drop_range(n: u64, f: &Sequence) -> RealSet {
    RealSet::SeqRange { seq: f.clone(), from: n }
}

/// A convergence witness `ε ↦ N(ε)`.
#[derive(Clone)]
pub struct NWitness(Arc<dyn Fn(f64) -> u64 + Send + Sync>);

impl NWitness {
    pub fn new(f: impl Fn(f64) -> u64 + Send + Sync + 'static) -> Self {
        NWitness(Arc::new(f))
    }

    pub fn constant(n: u64) -> Self {
        NWitness::new(move |_| n)
    }

    /// A closed-form witness in `eps`; the value is rounded up and clamped
    /// at zero.
    pub fn parse(src: &str) -> Result<Self, SeqError> {
        let expr = parse_real_expr(src, &["eps"])?;
        Ok(NWitness::new(move |eps| {
            let v = expr.eval_f64(&[("eps", eps)]);
            if v.is_nan() || v <= 0.0 {
                0
            } else {
                v.ceil().min(u64::MAX as f64) as u64
            }
        }))
    }

    pub fn at(&self, eps: f64) -> u64 {
        (self.0)(eps)
    }
}

impl fmt::Debug for NWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("NWitness(..)")
    }
}

/// A sorted, duplicate-free, finite set of reals.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSet(Vec<f64>);

impl FiniteSet {
    pub fn new(mut values: Vec<f64>) -> Result<Self, SeqError> {
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(SeqError::InvalidSet(format!("non-finite element {bad}")));
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        Ok(FiniteSet(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.0.binary_search_by(|v| v.total_cmp(&x)).is_ok() || (x == 0.0 && self.0.contains(&0.0))
    }

    pub fn min(&self) -> Option<f64> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<f64> {
        self.0.last().copied()
    }
}

/// The set representations the engine can reason about.
#[derive(Debug, Clone)]
pub enum RealSet {
    Finite(FiniteSet),
    /// `[lower, ∞)` when `closed`, `(lower, ∞)` otherwise.
    Ray {
        lower: f64,
        closed: bool,
    },
    /// `{ seq(i) | i ≥ from }`.
    SeqRange {
        seq: Sequence,
        from: u64,
    },
    Interval {
        lo: f64,
        hi: f64,
        lo_closed: bool,
        hi_closed: bool,
    },
}

impl RealSet {
    pub fn finite(values: Vec<f64>) -> Result<Self, SeqError> {
        FiniteSet::new(values).map(RealSet::Finite)
    }

    pub fn closed_ray(lower: f64) -> Self {
        RealSet::Ray { lower, closed: true }
    }

    pub fn open_ray(lower: f64) -> Self {
        RealSet::Ray { lower, closed: false }
    }

    pub fn interval(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<Self, SeqError> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(SeqError::InvalidSet(format!("interval endpoints {lo}, {hi}")));
        }
        Ok(RealSet::Interval { lo, hi, lo_closed, hi_closed })
    }

    pub fn open_interval(lo: f64, hi: f64) -> Result<Self, SeqError> {
        RealSet::interval(lo, hi, false, false)
    }

    pub fn closed_interval(lo: f64, hi: f64) -> Result<Self, SeqError> {
        RealSet::interval(lo, hi, true, true)
    }

    /// Whether the set is certainly empty.
    pub fn is_empty(&self) -> bool {
        match self {
            RealSet::Finite(s) => s.is_empty(),
            RealSet::Interval { lo, hi, lo_closed, hi_closed } => lo == hi && !(*lo_closed && *hi_closed),
            _ => false,
        }
    }
}

impl fmt::Display for RealSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealSet::Finite(s) => {
                let parts: Vec<String> = s.values().iter().map(|v| v.to_string()).collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
            RealSet::Ray { lower, closed } => write!(f, "{}{lower}, inf)", if *closed { "[" } else { "(" }),
            RealSet::SeqRange { seq, from } => write!(f, "Drop {from} ({})", seq.label()),
            RealSet::Interval { lo, hi, lo_closed, hi_closed } => {
                write!(f, "{}{lo}, {hi}{}", if *lo_closed { "[" } else { "(" }, if *hi_closed { "]" } else { ")" })
            }
        }
    }
}

/// The ε-neighbourhood `V(center, radius) = { x | |x − center| < radius }`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbourhood {
    center: f64,
    radius: f64,
}

impl Neighbourhood {
    pub fn new(center: f64, radius: f64) -> Result<Self, SeqError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(SeqError::NonPositiveRadius(radius));
        }
        Ok(Neighbourhood { center, radius })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.center).abs() < self.radius
    }

    pub fn to_set(&self) -> RealSet {
        RealSet::Interval {
            lo: self.center - self.radius,
            hi: self.center + self.radius,
            lo_closed: false,
            hi_closed: false,
        }
    }
}

/// Three-valued membership: sequence ranges are only searched up to a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Member,
    NotMember,
    NotFoundUpTo(u64),
}

impl Membership {
    pub fn is_member(self) -> bool {
        self == Membership::Member
    }
}

pub fn member(s: &RealSet, x: f64) -> Membership {
    member_with_bound(s, x, DEFAULT_SEARCH_BOUND)
}

pub fn member_with_bound(s: &RealSet, x: f64, bound: u64) -> Membership {
    let yes = |b: bool| if b { Membership::Member } else { Membership::NotMember };
    match s {
        RealSet::Finite(fs) => yes(fs.contains(x)),
        RealSet::Ray { lower, closed } => yes(if *closed { x >= *lower } else { x > *lower }),
        RealSet::Interval { lo, hi, lo_closed, hi_closed } => {
            let above = if *lo_closed { x >= *lo } else { x > *lo };
            let below = if *hi_closed { x <= *hi } else { x < *hi };
            yes(above && below)
        }
        RealSet::SeqRange { seq, from } => {
            let found = (0..bound).any(|k| {
                let v = seq.at(from.saturating_add(k));
                (v - x).abs() <= MEMBERSHIP_TOL
            });
            if found {
                Membership::Member
            } else {
                Membership::NotFoundUpTo(bound)
            }
        }
    }
}

/// Options for [`sup_monotone`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupOptions {
    pub tol: f64,
    /// Maximum number of probes.
    pub max_iter: usize,
    /// Optional upper bound every probed value must respect.
    pub cap: Option<f64>,
}

impl Default for SupOptions {
    fn default() -> Self {
        SupOptions { tol: DEFAULT_TOL, max_iter: 1_000_000, cap: None }
    }
}

impl SupOptions {
    pub fn with_tol(tol: f64) -> Self {
        SupOptions { tol, ..SupOptions::default() }
    }
}

/// Tracks runs of small gaps for convergence detection.
#[derive(Debug, Clone)]
pub struct Stabilizer {
    tol: f64,
    run: usize,
}

impl Stabilizer {
    pub fn new(tol: f64) -> Self {
        Stabilizer { tol, run: 0 }
    }

    /// Feed one gap; true once `STABILIZATION_WINDOW` consecutive gaps were
    /// below tolerance.
    pub fn push(&mut self, gap: f64) -> bool {
        if gap.abs() < self.tol {
            self.run += 1;
        } else {
            self.run = 0;
        }
        self.run >= STABILIZATION_WINDOW
    }
}

/// The geometric probe schedule `0, 1, 2, 4, …, 2⁵²`.
pub fn probe_schedule() -> impl Iterator<Item = u64> {
    std::iter::once(0).chain((0..=MAX_PROBE_EXPONENT).map(|k| 1u64 << k))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupEstimate {
    pub value: f64,
    /// Index of the last probe.
    pub index: u64,
    pub probes: usize,
}

/// Supremum (equivalently, limit) of a non-decreasing bounded sequence,
/// estimated on the geometric probe schedule. Stops once
/// `STABILIZATION_WINDOW` consecutive probe gaps are below `tol`.
pub fn sup_monotone(f: &Sequence, opts: SupOptions) -> Result<SupEstimate, SeqError> {
    let mut stab = Stabilizer::new(opts.tol);
    let mut prev: Option<(u64, f64)> = None;
    let mut probes = 0;
    for idx in probe_schedule().take(opts.max_iter.max(1)) {
        let v = f.try_at(idx)?;
        probes += 1;
        if let Some(cap) = opts.cap {
            if v > cap {
                return Err(SeqError::Unbounded { index: idx, value: v, cap });
            }
        }
        if let Some((pi, pv)) = prev {
            if v < pv {
                return Err(SeqError::NotMonotone { i: pi, fi: pv, j: idx, fj: v });
            }
            if stab.push(v - pv) {
                return Ok(SupEstimate { value: v, index: idx, probes });
            }
        }
        prev = Some((idx, v));
    }
    Err(SeqError::NoConvergence { probes })
}

/// Set of upper bounds, represented as the closed ray above the least one.
pub fn ubs(s: &RealSet) -> Result<RealSet, SeqError> {
    match s {
        RealSet::Finite(fs) => fs.max().map(RealSet::closed_ray).ok_or(SeqError::EmptySet),
        RealSet::Interval { hi, .. } => {
            if s.is_empty() {
                Err(SeqError::EmptySet)
            } else {
                Ok(RealSet::closed_ray(*hi))
            }
        }
        RealSet::Ray { .. } => Err(SeqError::NoUpperBound),
        RealSet::SeqRange { seq, from } => {
            let tail = drop_seq(*from, seq);
            match sup_monotone(&tail, SupOptions::default()) {
                Ok(est) => Ok(RealSet::closed_ray(est.value)),
                Err(SeqError::NoConvergence { .. } | SeqError::Unbounded { .. }) => Err(SeqError::NoUpperBound),
                Err(e) => Err(e),
            }
        }
    }
}

/// `min A = x ⟺ x ∈ A ∧ ∀ a ∈ A. x ≤ a`.
pub fn min_set(s: &RealSet) -> Result<f64, SeqError> {
    match s {
        RealSet::Finite(fs) => fs.min().ok_or(SeqError::EmptySet),
        RealSet::Ray { lower, closed: true } => Ok(*lower),
        RealSet::Interval { lo, lo_closed: true, .. } if !s.is_empty() => Ok(*lo),
        _ => Err(SeqError::NoMinimum),
    }
}

/// `sup = min ∘ ubs`.
pub fn sup_set(s: &RealSet) -> Result<f64, SeqError> {
    min_set(&ubs(s)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitVerdict {
    NotFalsified,
    /// `|f(index) − claim| ≥ eps`.
    Falsified {
        eps: f64,
        index: u64,
        value: f64,
    },
}

/// Probes `N(ε) ..= N(ε) + probes_per_eps` for every ε and checks
/// `Drop (N ε) f ⊆ V L ε` on those indices.
pub fn check_limit(
    f: &Sequence,
    claim: f64,
    witness: &NWitness,
    epsilons: &[f64],
    probes_per_eps: u64,
) -> LimitVerdict {
    for &eps in epsilons {
        let start = witness.at(eps);
        for k in 0..=probes_per_eps {
            let i = start.saturating_add(k);
            let v = f.at(i);
            if !((v - claim).abs() < eps) {
                return LimitVerdict::Falsified { eps, index: i, value: v };
            }
        }
    }
    LimitVerdict::NotFalsified
}

/// Least index `i ≤ search_bound` with `f(i) ∈ V s ε`.
pub fn epsilon_near(f: &Sequence, s: f64, eps: f64, search_bound: u64) -> Option<u64> {
    (0..=search_bound).find(|&i| (f.at(i) - s).abs() < eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(src: &str) -> Sequence {
        Sequence::parse(src).unwrap()
    }

    #[test]
    fn drop_examples() {
        assert_eq!(drop_seq(2, &seq("n")).at(0), 2.0);
        let f = seq("n^2 - 3");
        let d = drop_seq(0, &f);
        assert!((0..20).all(|i| d.at(i) == f.at(i)));
        assert_eq!(drop_seq(3, &seq("1/(n+1)")).at(0), 0.25);
    }

    #[test]
    fn drop_range_membership() {
        let r = drop_range(2, &seq("n"));
        assert_eq!(member(&r, 5.0), Membership::Member);
        assert_eq!(member_with_bound(&r, 1.0, 1000), Membership::NotFoundUpTo(1000));
        let f = seq("n^2");
        for x in [4.0, 9.0, 100.0] {
            assert!(member(&drop_range(2, &f), x).is_member());
            assert!(member(&drop_range(0, &f), x).is_member());
        }
    }

    #[test]
    fn set_membership() {
        assert!(member(&RealSet::closed_ray(2.0), 2.0).is_member());
        assert!(!member(&RealSet::open_ray(2.0), 2.0).is_member());
        assert_eq!(member(&RealSet::finite(vec![1.0, 2.0, 3.0]).unwrap(), 4.0), Membership::NotMember);
        let v = Neighbourhood::new(1.0, 0.5).unwrap();
        for a in [0.4, 0.5, 0.9, 1.2, 1.5, 1.6] {
            assert_eq!(member(&v.to_set(), a).is_member(), (a - 1.0f64).abs() < 0.5, "{a}");
            assert_eq!(v.contains(a), (a - 1.0f64).abs() < 0.5);
        }
        assert!(Neighbourhood::new(0.0, 0.0).is_err());
    }

    #[test]
    fn upper_bounds() {
        let r = ubs(&RealSet::finite(vec![1.0, 2.0]).unwrap()).unwrap();
        assert!(matches!(r, RealSet::Ray { lower, closed: true } if lower == 2.0));
        let r = ubs(&RealSet::open_interval(0.0, 1.0).unwrap()).unwrap();
        assert!(matches!(r, RealSet::Ray { lower, closed: true } if lower == 1.0));
        let r = ubs(&RealSet::finite(vec![7.0]).unwrap()).unwrap();
        assert!(matches!(r, RealSet::Ray { lower, closed: true } if lower == 7.0));
        assert_eq!(ubs(&RealSet::closed_ray(0.0)).unwrap_err(), SeqError::NoUpperBound);
    }

    #[test]
    fn open_interval_sup_is_least_upper_bound() {
        // Every rational below 1 but near it is in (0,1), so no smaller bound works.
        let s = RealSet::open_interval(0.0, 1.0).unwrap();
        let sup = sup_set(&s).unwrap();
        assert_eq!(sup, 1.0);
        for k in 1..40 {
            let q = 1.0 - 2f64.powi(-k);
            assert!(member(&s, q).is_member() && q < sup);
        }
    }

    #[test]
    fn minimum() {
        assert_eq!(min_set(&RealSet::finite(vec![3.0, 1.0, 2.0]).unwrap()).unwrap(), 1.0);
        assert_eq!(min_set(&RealSet::closed_ray(2.0)).unwrap(), 2.0);
        assert_eq!(min_set(&RealSet::open_ray(2.0)), Err(SeqError::NoMinimum));
        assert_eq!(min_set(&RealSet::finite(vec![]).unwrap()), Err(SeqError::EmptySet));
    }

    #[test]
    fn suprema() {
        assert_eq!(sup_set(&RealSet::finite(vec![1.0, 2.0, 3.0]).unwrap()).unwrap(), 3.0);
        assert_eq!(sup_set(&RealSet::open_interval(0.0, 1.0).unwrap()).unwrap(), 1.0);
        let prefix: Vec<f64> = (1..=1_000_000).map(|n| 7.0 - 1.0 / n as f64).collect();
        let approx = sup_set(&RealSet::finite(prefix).unwrap()).unwrap();
        assert!(approx < 7.0 && 7.0 - approx < 1.1e-6);
        let full = sup_set(&drop_range(0, &seq("7 - 1/(n+1)"))).unwrap();
        assert!((full - 7.0).abs() < 1e-8);
    }

    #[test]
    fn monotone_sup() {
        let est = sup_monotone(&seq("7 - 1/(n+1)"), SupOptions::with_tol(1e-6)).unwrap();
        assert!((est.value - 7.0).abs() <= 1e-6);
        assert_eq!(sup_monotone(&Sequence::constant(5.0), SupOptions::default()).unwrap().value, 5.0);
        assert!(matches!(sup_monotone(&seq("n"), SupOptions::default()), Err(SeqError::NoConvergence { .. })));
        assert!(matches!(sup_monotone(&seq("(-1)^n"), SupOptions::default()), Err(SeqError::NotMonotone { .. })));
        assert!(matches!(
            sup_monotone(&seq("n"), SupOptions { cap: Some(100.0), ..SupOptions::default() }),
            Err(SeqError::Unbounded { .. })
        ));
    }

    #[test]
    fn limit_checks() {
        let f = seq("1/(n+1)");
        let w = NWitness::parse("1/eps").unwrap();
        assert_eq!(check_limit(&f, 0.0, &w, &[1.0, 0.1, 1e-3, 1e-6], 1000), LimitVerdict::NotFalsified);
        assert_eq!(
            check_limit(&Sequence::constant(3.0), 3.0, &NWitness::constant(0), &[1.0, 1e-9], 100),
            LimitVerdict::NotFalsified
        );
        let osc = seq("(-1)^n");
        for n0 in [0, 1, 17, 1000] {
            let v = check_limit(&osc, 0.0, &NWitness::constant(n0), &[0.5], 10);
            assert!(matches!(v, LimitVerdict::Falsified { eps, index, value }
                if eps == 0.5 && (osc.at(index) - 0.0).abs() >= 0.5 && value == osc.at(index)));
        }
    }

    #[test]
    fn near_elements() {
        let f = seq("7 - 1/(n+1)");
        let i = epsilon_near(&f, 7.0, 0.01, 1_000_000).unwrap();
        assert!((f.at(i) - 7.0).abs() < 0.01 && (f.at(i - 1) - 7.0).abs() >= 0.01);
        assert!((99..=100).contains(&i));
        assert_eq!(epsilon_near(&Sequence::constant(7.0), 7.0, 1e-9, 10), Some(0));
        assert_eq!(epsilon_near(&Sequence::constant(0.0), 7.0, 1.0, 10_000), None);
    }
}
