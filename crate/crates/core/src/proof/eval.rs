//! Three-valued evaluation of proof items under a sampled assignment.
//!
//! Infinite sets (sequence tails, intervals, rays) are seen through a
//! finite probe set. A universal statement with no counterexample among the
//! probes evaluates to true ("not refuted"); an existential with no witness
//! evaluates to unknown.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use super::ast::{Formula, Quantifier, SetExpr, Term};
use super::parse::{Header, VarDomain};
use crate::number::{format_plain, rat_to_f64};
use crate::seq::{drop_seq, sup_monotone, Sequence, SupOptions, MAX_PROBE_EXPONENT};

/// Truth value of a formula under one assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tv {
    True,
    False,
    Unknown,
}

impl Tv {
    fn from_bool(b: bool) -> Tv {
        if b {
            Tv::True
        } else {
            Tv::False
        }
    }

    pub fn and(self, other: Tv) -> Tv {
        match (self, other) {
            (Tv::False, _) | (_, Tv::False) => Tv::False,
            (Tv::True, Tv::True) => Tv::True,
            _ => Tv::Unknown,
        }
    }

    pub fn or(self, other: Tv) -> Tv {
        !(!self).and(!other)
    }
}

impl std::ops::Not for Tv {
    type Output = Tv;

    fn not(self) -> Tv {
        match self {
            Tv::True => Tv::False,
            Tv::False => Tv::True,
            Tv::Unknown => Tv::Unknown,
        }
    }
}

/// Value given to a header variable.
#[derive(Debug, Clone, PartialEq)]
pub enum Binding {
    Scalar(f64),
    Set(Vec<f64>),
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binding::Scalar(x) => f.write_str(&format_plain(*x)),
            Binding::Set(v) => {
                let parts: Vec<String> = v.iter().map(|x| format_plain(*x)).collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
        }
    }
}

/// Values of all header variables for one sample.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Assignment(pub Vec<(String, Binding)>);

impl Assignment {
    pub fn get(&self, name: &str) -> Option<&Binding> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, b)| b)
    }

    pub fn scalar(&self, name: &str) -> Option<f64> {
        match self.get(name) {
            Some(Binding::Scalar(x)) => Some(*x),
            _ => None,
        }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (n, b)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n} = {b}")?;
        }
        Ok(())
    }
}

fn draw_unit_open(rng: &mut impl Rng) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

fn draw_scalar(domain: &VarDomain, rng: &mut impl Rng) -> f64 {
    match domain {
        VarDomain::Interval { lo, hi, lo_closed, hi_closed } => {
            if *lo_closed && rng.random_ratio(1, 16) {
                return *lo;
            }
            if *hi_closed && rng.random_ratio(1, 16) {
                return *hi;
            }
            loop {
                let x = lo + (hi - lo) * draw_unit_open(rng);
                if (x > *lo || *lo_closed) && (x < *hi || *hi_closed) {
                    return x;
                }
            }
        }
        VarDomain::LogSpace { lo, hi } => {
            let (a, b) = (lo.ln(), hi.ln());
            (a + (b - a) * rng.random::<f64>()).exp().clamp(*lo, *hi)
        }
        VarDomain::Finite(v) => v[rng.random_range(0..v.len())],
        VarDomain::RandomSet { .. } => unreachable!("set domains are drawn by draw_assignment"),
    }
}

/// Draw one value per header variable.
pub fn draw_assignment(header: &Header, rng: &mut impl Rng) -> Assignment {
    let mut out = Vec::with_capacity(header.vars.len());
    for v in &header.vars {
        let b = match &v.domain {
            VarDomain::RandomSet { max_size, lo, hi } => {
                let n = rng.random_range(1..=*max_size);
                let mut elems: Vec<f64> = (0..n).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect();
                elems.sort_by(f64::total_cmp);
                elems.dedup();
                Binding::Set(elems)
            }
            d => Binding::Scalar(draw_scalar(d, rng)),
        };
        out.push((v.name.clone(), b));
    }
    Assignment(out)
}

/// Why a term or set has no value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Issue {
    Undefined,
    EmptyDomain,
}

/// An infinite set known through the values at probe indices.
#[derive(Debug)]
pub struct Probed {
    pub elems: Vec<f64>,
    /// Largest element, when the tail was certified monotone and convergent.
    pub sup: Option<f64>,
}

/// Evaluated sets.
#[derive(Debug, Clone)]
pub enum SetVal {
    /// Sorted, duplicate-free.
    Finite(Arc<Vec<f64>>),
    Interval {
        lo: f64,
        hi: f64,
        lo_closed: bool,
        hi_closed: bool,
    },
    Probed(Arc<Probed>),
    Ubs(Box<SetVal>),
}

/// Offsets from a tail's start: every index up to 64, then `2ᵏ` and `3·2ᵏ`.
pub fn probe_offsets() -> Vec<u64> {
    let mut v: Vec<u64> = (0..=64).collect();
    for k in 6..=MAX_PROBE_EXPONENT {
        v.push(1u64 << k);
        if k < MAX_PROBE_EXPONENT {
            v.push(3u64 << k);
        }
    }
    v.sort_unstable();
    v.dedup();
    v
}

const CACHE_LIMIT: usize = 4096;

/// Sequence name and starting index.
type ProbeKey = (String, u64);

/// Materialized sequence tails, shared by the samples of one step.
#[derive(Default)]
pub struct ProbeCache {
    offsets: Vec<u64>,
    map: RefCell<HashMap<ProbeKey, Option<Arc<Probed>>>>,
}

impl ProbeCache {
    pub fn new() -> Self {
        ProbeCache { offsets: probe_offsets(), map: RefCell::default() }
    }

    fn tail(&self, name: &str, seq: &Sequence, from: u64) -> Option<Arc<Probed>> {
        let key = (name.to_string(), from);
        if let Some(hit) = self.map.borrow().get(&key) {
            return hit.clone();
        }
        let mut elems = Vec::with_capacity(self.offsets.len());
        let mut ok = true;
        for &k in &self.offsets {
            let v = seq.at(from.saturating_add(k));
            if !v.is_finite() {
                ok = false;
                break;
            }
            elems.push(v);
        }
        let probed = ok.then(|| {
            let sup = sup_monotone(&drop_seq(from, seq), SupOptions::default())
                .ok()
                .map(|_| elems.iter().copied().fold(f64::NEG_INFINITY, f64::max));
            elems.sort_by(f64::total_cmp);
            elems.dedup();
            Arc::new(Probed { elems, sup })
        });
        let mut map = self.map.borrow_mut();
        if map.len() >= CACHE_LIMIT {
            map.clear();
        }
        map.insert(key, probed.clone());
        probed
    }
}

const GRID: usize = 32;

fn interval_points(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Vec<f64> {
    let mut out = Vec::new();
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => {
            if lo == hi {
                if lo_closed && hi_closed {
                    out.push(lo);
                }
                return out;
            }
            for j in 0..=GRID {
                if (j == 0 && !lo_closed) || (j == GRID && !hi_closed) {
                    continue;
                }
                out.push(lo + (hi - lo) * j as f64 / GRID as f64);
            }
        }
        (true, false) => {
            if lo_closed {
                out.push(lo);
            }
            out.extend((-20..=40).map(|k| lo + 2f64.powi(k)));
        }
        (false, true) => {
            out.extend((-20..=40).rev().map(|k| hi - 2f64.powi(k)));
            if hi_closed {
                out.push(hi);
            }
        }
        (false, false) => {
            out.extend((-40..=40).map(|k| if k < 0 { -2f64.powi(-k) } else { 2f64.powi(k) }));
        }
    }
    out
}

fn interval_empty(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> bool {
    lo > hi || (lo == hi && !(lo_closed && hi_closed))
}

/// Evaluates items for one assignment.
pub struct Evaluator<'a> {
    header: &'a Header,
    cache: &'a ProbeCache,
    scalars: Vec<(String, Option<f64>)>,
    set_vars: Vec<(String, Arc<Vec<f64>>)>,
}

impl<'a> Evaluator<'a> {
    pub fn new(header: &'a Header, cache: &'a ProbeCache, assignment: &Assignment) -> Self {
        let mut ev = Evaluator { header, cache, scalars: Vec::new(), set_vars: Vec::new() };
        for (name, b) in &assignment.0 {
            match b {
                Binding::Scalar(x) => ev.scalars.push((name.clone(), Some(*x))),
                Binding::Set(v) => {
                    let mut v = v.clone();
                    v.sort_by(f64::total_cmp);
                    v.dedup();
                    ev.set_vars.push((name.clone(), Arc::new(v)));
                }
            }
        }
        for (name, t) in &header.defs {
            let v = ev.term(t).ok();
            ev.scalars.push((name.clone(), v));
        }
        ev
    }

    fn lookup(&self, name: &str) -> Result<f64, Issue> {
        self.scalars.iter().rev().find(|(n, _)| n == name).and_then(|(_, v)| *v).ok_or(Issue::Undefined)
    }

    fn index(&self, t: &Term) -> Result<u64, Issue> {
        let x = self.term(t)?;
        let r = x.round();
        if x < -0.0 || (x - r).abs() > 1e-9 || r > 9.0e15 {
            return Err(Issue::Undefined);
        }
        Ok(r as u64)
    }

    pub fn term(&self, t: &Term) -> Result<f64, Issue> {
        let v = match t {
            Term::Num(r) => rat_to_f64(r),
            Term::Pi => std::f64::consts::PI,
            Term::Var(v) => self.lookup(v)?,
            Term::Neg(a) => -self.term(a)?,
            Term::Add(a, b) => self.term(a)? + self.term(b)?,
            Term::Sub(a, b) => self.term(a)? - self.term(b)?,
            Term::Mul(a, b) => self.term(a)? * self.term(b)?,
            Term::Div(a, b) => {
                let d = self.term(b)?;
                if d == 0.0 {
                    return Err(Issue::Undefined);
                }
                self.term(a)? / d
            }
            Term::Pow(a, b) => {
                let (x, e) = (self.term(a)?, self.term(b)?);
                if e.fract() == 0.0 && e.abs() < 1024.0 {
                    x.powi(e as i32)
                } else {
                    x.powf(e)
                }
            }
            Term::Abs(a) => self.term(a)?.abs(),
            Term::Call(f, a) => f.apply(self.term(a)?),
            Term::Min(s) => self.min(&self.set(s)?)?,
            Term::Max(s) => self.max(&self.set(s)?)?,
            Term::Sup(s) => self.sup(&self.set(s)?)?,
            Term::SeqAt(name, i) => {
                let seq = self.header.seq(name).ok_or(Issue::Undefined)?;
                seq.at(self.index(i)?)
            }
            Term::FnAt(name, x) => {
                let f = self.header.function(name).ok_or(Issue::Undefined)?;
                let arg = self.term(x)?;
                f.body.eval_f64(&[(f.param.as_str(), arg)])
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Issue::Undefined)
        }
    }

    fn min(&self, s: &SetVal) -> Result<f64, Issue> {
        match s {
            SetVal::Finite(v) => v.first().copied().ok_or(Issue::Undefined),
            SetVal::Interval { lo, hi, lo_closed: true, hi_closed }
                if lo.is_finite() && !interval_empty(*lo, *hi, true, *hi_closed) =>
            {
                Ok(*lo)
            }
            SetVal::Ubs(inner) => self.sup(inner),
            _ => Err(Issue::Undefined),
        }
    }

    fn max(&self, s: &SetVal) -> Result<f64, Issue> {
        match s {
            SetVal::Finite(v) => v.last().copied().ok_or(Issue::Undefined),
            SetVal::Interval { lo, hi, lo_closed, hi_closed: true }
                if hi.is_finite() && !interval_empty(*lo, *hi, *lo_closed, true) =>
            {
                Ok(*hi)
            }
            _ => Err(Issue::Undefined),
        }
    }

    fn sup(&self, s: &SetVal) -> Result<f64, Issue> {
        match s {
            SetVal::Finite(v) => v.last().copied().ok_or(Issue::Undefined),
            SetVal::Interval { lo, hi, lo_closed, hi_closed }
                if hi.is_finite() && !interval_empty(*lo, *hi, *lo_closed, *hi_closed) =>
            {
                Ok(*hi)
            }
            SetVal::Probed(p) => p.sup.ok_or(Issue::Undefined),
            _ => Err(Issue::Undefined),
        }
    }

    pub fn set(&self, s: &SetExpr) -> Result<SetVal, Issue> {
        Ok(match s {
            SetExpr::Named(name) => {
                if let Some((_, v)) = self.set_vars.iter().find(|(n, _)| n == name) {
                    SetVal::Finite(v.clone())
                } else {
                    let e = self.header.set(name).ok_or(Issue::Undefined)?;
                    self.set(e)?
                }
            }
            SetExpr::Ubs(inner) => SetVal::Ubs(Box::new(self.set(inner)?)),
            SetExpr::V(c, e) => {
                let (c, e) = (self.term(c)?, self.term(e)?);
                if !(e > 0.0) {
                    return Err(Issue::Undefined);
                }
                SetVal::Interval { lo: c - e, hi: c + e, lo_closed: false, hi_closed: false }
            }
            SetExpr::Drop(k, name) => {
                let from = self.index(k)?;
                let seq = self.header.seq(name).ok_or(Issue::Undefined)?;
                SetVal::Probed(self.cache.tail(name, seq, from).ok_or(Issue::Undefined)?)
            }
            SetExpr::Interval { lo, hi, lo_closed, hi_closed } => {
                let lo = match lo {
                    Some(t) => self.term(t)?,
                    None => f64::NEG_INFINITY,
                };
                let hi = match hi {
                    Some(t) => self.term(t)?,
                    None => f64::INFINITY,
                };
                SetVal::Interval { lo, hi, lo_closed: *lo_closed, hi_closed: *hi_closed }
            }
            SetExpr::Finite(ts) => {
                let mut v = ts.iter().map(|t| self.term(t)).collect::<Result<Vec<_>, _>>()?;
                v.sort_by(f64::total_cmp);
                v.dedup();
                SetVal::Finite(Arc::new(v))
            }
        })
    }

    pub fn member(&self, x: f64, s: &SetVal) -> Tv {
        match s {
            SetVal::Finite(v) => {
                Tv::from_bool(v.binary_search_by(|e| e.total_cmp(&x)).is_ok() || (x == 0.0 && v.contains(&0.0)))
            }
            SetVal::Interval { lo, hi, lo_closed, hi_closed } => {
                let above = if *lo_closed { x >= *lo } else { x > *lo };
                let below = if *hi_closed { x <= *hi } else { x < *hi };
                Tv::from_bool(above && below)
            }
            SetVal::Probed(p) => {
                if p.elems.binary_search_by(|e| e.total_cmp(&x)).is_ok() {
                    Tv::True
                } else {
                    Tv::Unknown
                }
            }
            SetVal::Ubs(inner) => match inner.as_ref() {
                SetVal::Finite(v) => Tv::from_bool(v.iter().all(|a| *a <= x)),
                SetVal::Interval { lo, hi, lo_closed, hi_closed } => {
                    if interval_empty(*lo, *hi, *lo_closed, *hi_closed) {
                        Tv::True
                    } else {
                        Tv::from_bool(x >= *hi)
                    }
                }
                SetVal::Probed(p) => Tv::from_bool(p.elems.iter().all(|a| *a <= x)),
                SetVal::Ubs(_) => Tv::Unknown,
            },
        }
    }

    /// Elements used to range over a set, and whether they are all of it.
    pub fn elements(&self, s: &SetVal) -> Result<(Vec<f64>, bool), Issue> {
        match s {
            SetVal::Finite(v) => Ok((v.as_ref().clone(), true)),
            SetVal::Probed(p) => Ok((p.elems.clone(), false)),
            SetVal::Interval { lo, hi, lo_closed, hi_closed } => {
                if interval_empty(*lo, *hi, *lo_closed, *hi_closed) {
                    return Ok((Vec::new(), true));
                }
                let complete = lo == hi;
                Ok((interval_points(*lo, *hi, *lo_closed, *hi_closed), complete))
            }
            SetVal::Ubs(inner) => {
                let s = self.sup(inner)?;
                Ok((interval_points(s, f64::INFINITY, true, false), false))
            }
        }
    }

    pub fn formula(&mut self, f: &Formula) -> Result<Tv, Issue> {
        Ok(match f {
            Formula::True => Tv::True,
            Formula::False => Tv::False,
            Formula::Cmp(a, op, b) => match (self.term(a), self.term(b)) {
                (Ok(x), Ok(y)) => Tv::from_bool(op.holds(x, y)),
                _ => Tv::Unknown,
            },
            Formula::In(t, s) => match (self.term(t), self.set(s)) {
                (Ok(x), Ok(sv)) => self.member(x, &sv),
                _ => Tv::Unknown,
            },
            Formula::Not(inner) => !self.formula(inner)?,
            Formula::And(a, b) => {
                let l = self.formula(a)?;
                if l == Tv::False {
                    return Ok(Tv::False);
                }
                l.and(self.formula(b)?)
            }
            Formula::Or(a, b) => {
                let l = self.formula(a)?;
                if l == Tv::True {
                    return Ok(Tv::True);
                }
                l.or(self.formula(b)?)
            }
            Formula::Quant(q, var, dom, body) => {
                let sv = match self.set(dom) {
                    Ok(sv) => sv,
                    Err(_) => return Ok(Tv::Unknown),
                };
                let (elems, complete) = match self.elements(&sv) {
                    Ok(e) => e,
                    Err(_) => return Ok(Tv::Unknown),
                };
                if elems.is_empty() {
                    return Err(Issue::EmptyDomain);
                }
                self.quantify(*q, var, &elems, complete, body)?
            }
        })
    }

    fn quantify(
        &mut self,
        q: Quantifier,
        var: &str,
        elems: &[f64],
        complete: bool,
        body: &Formula,
    ) -> Result<Tv, Issue> {
        let mut unknown = false;
        let decisive = match q {
            Quantifier::Forall => Tv::False,
            Quantifier::Exists => Tv::True,
        };
        for &x in elems {
            self.scalars.push((var.to_string(), Some(x)));
            let r = self.formula(body);
            self.scalars.pop();
            match r? {
                v if v == decisive => return Ok(decisive),
                Tv::Unknown => unknown = true,
                _ => {}
            }
        }
        Ok(match q {
            Quantifier::Forall if unknown => Tv::Unknown,
            Quantifier::Forall => Tv::True,
            Quantifier::Exists if complete && !unknown => Tv::False,
            Quantifier::Exists => Tv::Unknown,
        })
    }
}
