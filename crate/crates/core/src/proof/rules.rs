//! Registered rewrite rules. A hint selects rules by case-insensitive
//! keyword; a rule justifies a step when the second item is obtained from
//! the first by rewriting any number of subformulas with it.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use super::ast::{Alpha, CmpOp, Formula, Item, Quantifier, Relation, SetExpr, Term};
use crate::number::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    Arithmetic,
    QuantifierNegation,
    AbsoluteValue,
    Membership,
    Weakening,
}

#[derive(Debug, Clone, Copy)]
pub struct Rule {
    pub name: &'static str,
    pub keywords: &'static [&'static str],
    pub kind: RuleKind,
}

pub const REGISTRY: &[Rule] = &[
    Rule { name: "arithmetic", keywords: &["arithmetic", "algebra"], kind: RuleKind::Arithmetic },
    Rule {
        name: "quantifier negation",
        keywords: &["quantifier negation", "de morgan", "negation"],
        kind: RuleKind::QuantifierNegation,
    },
    Rule { name: "absolute value", keywords: &["absolute value"], kind: RuleKind::AbsoluteValue },
    Rule {
        name: "membership",
        keywords: &["membership", "neighbourhood", "neighborhood", "unfold"],
        kind: RuleKind::Membership,
    },
    Rule { name: "weakening", keywords: &["weaken"], kind: RuleKind::Weakening },
];

/// Hint that forces sampling.
pub const NUMERIC_HINT: &str = "numeric";

pub fn rules_for_hint(hint: &str) -> Vec<&'static Rule> {
    let h = hint.to_lowercase();
    if h.trim() == NUMERIC_HINT {
        return Vec::new();
    }
    REGISTRY.iter().filter(|r| r.keywords.iter().any(|k| h.contains(k))).collect()
}

impl Rule {
    fn is_equivalence(&self) -> bool {
        self.kind != RuleKind::Weakening
    }

    /// Whether the rule alone justifies `before rel after`.
    pub fn justifies(&self, rel: Relation, before: &Item, after: &Item) -> bool {
        match (rel, before, after) {
            (Relation::Implies, Item::Formula(b), Item::Formula(a)) => self.related(b, a, &mut Alpha::new()),
            (Relation::Iff, Item::Formula(b), Item::Formula(a)) => {
                self.is_equivalence() && self.related(b, a, &mut Alpha::new())
            }
            (Relation::Equal, Item::Term(b), Item::Term(a)) if self.kind == RuleKind::Arithmetic => {
                let alpha = Alpha::new();
                poly(b, &alpha) == poly(a, &alpha)
            }
            _ => false,
        }
    }

    /// `b` rewrites to `a` (for weakening: `b` implies `a` by monotonicity).
    fn related(&self, b: &Formula, a: &Formula, alpha: &mut Alpha) -> bool {
        if alpha.formula(b, a) || self.root(b, a, alpha) {
            return true;
        }
        match (b, a) {
            (Formula::Not(x), Formula::Not(y)) => {
                if self.is_equivalence() {
                    self.related(x, y, alpha)
                } else {
                    self.related(y, x, alpha)
                }
            }
            (Formula::And(b1, b2), Formula::And(a1, a2)) | (Formula::Or(b1, b2), Formula::Or(a1, a2)) => {
                self.related(b1, a1, alpha) && self.related(b2, a2, alpha)
            }
            (Formula::Quant(q1, v1, d1, x), Formula::Quant(q2, v2, d2, y)) if q1 == q2 && alpha.set(d1, d2) => {
                alpha.push(v1, v2);
                let ok = self.related(x, y, alpha);
                alpha.pop();
                ok
            }
            _ => false,
        }
    }

    fn root(&self, b: &Formula, a: &Formula, alpha: &mut Alpha) -> bool {
        match self.kind {
            RuleKind::Arithmetic => arithmetic_root(b, a, alpha),
            RuleKind::Weakening => weakening_root(b, a, alpha),
            _ => {
                let forward = self.rewrites(b).iter().any(|c| alpha.formula(c, a));
                forward || self.rewrites(a).iter().any(|c| alpha.formula(b, c))
            }
        }
    }

    fn rewrites(&self, f: &Formula) -> Vec<Formula> {
        match self.kind {
            RuleKind::QuantifierNegation => negation_rewrites(f),
            RuleKind::AbsoluteValue => abs_rewrites(f),
            RuleKind::Membership => membership_rewrites(f),
            RuleKind::Arithmetic | RuleKind::Weakening => Vec::new(),
        }
    }
}

/// Logical negation pushed through connectives and comparisons.
pub fn negate(f: &Formula) -> Formula {
    match f {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Cmp(x, CmpOp::Lt, y) => Formula::Cmp(y.clone(), CmpOp::Le, x.clone()),
        Formula::Cmp(x, CmpOp::Le, y) => Formula::Cmp(y.clone(), CmpOp::Lt, x.clone()),
        Formula::Cmp(x, CmpOp::Eq, y) => Formula::Cmp(x.clone(), CmpOp::Ne, y.clone()),
        Formula::Cmp(x, CmpOp::Ne, y) => Formula::Cmp(x.clone(), CmpOp::Eq, y.clone()),
        Formula::Not(inner) => (**inner).clone(),
        Formula::And(p, q) => Formula::or(negate(p), negate(q)),
        Formula::Or(p, q) => Formula::and(negate(p), negate(q)),
        Formula::Quant(q, v, d, body) => Formula::Quant(dual(*q), v.clone(), d.clone(), Box::new(negate(body))),
        Formula::In(..) => Formula::negated(f.clone()),
    }
}

fn dual(q: Quantifier) -> Quantifier {
    match q {
        Quantifier::Forall => Quantifier::Exists,
        Quantifier::Exists => Quantifier::Forall,
    }
}

fn negation_rewrites(f: &Formula) -> Vec<Formula> {
    let Formula::Not(inner) = f else { return Vec::new() };
    let mut out = vec![negate(inner)];
    match inner.as_ref() {
        Formula::Quant(q, v, d, body) => {
            out.push(Formula::Quant(dual(*q), v.clone(), d.clone(), Box::new(Formula::negated((**body).clone()))));
        }
        Formula::And(p, q) => out.push(Formula::or(Formula::negated((**p).clone()), Formula::negated((**q).clone()))),
        Formula::Or(p, q) => out.push(Formula::and(Formula::negated((**p).clone()), Formula::negated((**q).clone()))),
        _ => {}
    }
    out
}

fn abs_rewrites(f: &Formula) -> Vec<Formula> {
    match f {
        Formula::Cmp(Term::Abs(x), op @ (CmpOp::Lt | CmpOp::Le), e) => {
            let lower = Formula::Cmp(Term::Neg(Box::new(e.clone())), *op, (**x).clone());
            let upper = Formula::Cmp((**x).clone(), *op, e.clone());
            vec![Formula::and(lower, upper)]
        }
        _ => Vec::new(),
    }
}

fn membership_rewrites(f: &Formula) -> Vec<Formula> {
    let Formula::In(x, s) = f else { return Vec::new() };
    match s {
        SetExpr::Ubs(inner) => {
            let body = Formula::Cmp(Term::Var("$u".into()), CmpOp::Le, x.clone());
            vec![Formula::quant(Quantifier::Forall, "$u", (**inner).clone(), body)]
        }
        SetExpr::V(c, e) => vec![
            Formula::Cmp(Term::Abs(Box::new(Term::Sub(Box::new(x.clone()), c.clone()))), CmpOp::Lt, (**e).clone()),
            Formula::Cmp(Term::Abs(Box::new(Term::Sub(c.clone(), Box::new(x.clone())))), CmpOp::Lt, (**e).clone()),
        ],
        SetExpr::Interval { lo, hi, lo_closed, hi_closed } => {
            let op = |closed: bool| if closed { CmpOp::Le } else { CmpOp::Lt };
            let lower = lo.as_ref().map(|l| Formula::Cmp((**l).clone(), op(*lo_closed), x.clone()));
            let upper = hi.as_ref().map(|h| Formula::Cmp(x.clone(), op(*hi_closed), (**h).clone()));
            vec![match (lower, upper) {
                (Some(l), Some(u)) => Formula::and(l, u),
                (Some(l), None) => l,
                (None, Some(u)) => u,
                (None, None) => Formula::True,
            }]
        }
        SetExpr::Finite(ts) => {
            let eqs = ts.iter().map(|t| Formula::Cmp(x.clone(), CmpOp::Eq, t.clone()));
            vec![eqs.reduce(Formula::or).unwrap_or(Formula::False)]
        }
        SetExpr::Named(_) | SetExpr::Drop(..) => Vec::new(),
    }
}

fn weakening_root(b: &Formula, a: &Formula, alpha: &mut Alpha) -> bool {
    if *a == Formula::True {
        return true;
    }
    if let Formula::And(p, q) = b {
        if alpha.formula(p, a) || alpha.formula(q, a) {
            return true;
        }
    }
    if let Formula::Or(p, q) = a {
        if alpha.formula(b, p) || alpha.formula(b, q) {
            return true;
        }
    }
    match (b, a) {
        (Formula::Cmp(x, CmpOp::Lt, y), Formula::Cmp(x2, CmpOp::Le, y2)) => alpha.term(x, x2) && alpha.term(y, y2),
        _ => false,
    }
}

/// Monomial: sorted atoms with exponents.
type Monomial = Vec<(String, u32)>;
type Poly = BTreeMap<Monomial, Rat>;

fn constant(r: Rat) -> Poly {
    let mut p = Poly::new();
    if !r.is_zero() {
        p.insert(Vec::new(), r);
    }
    p
}

fn atom(key: String) -> Poly {
    let mut p = Poly::new();
    p.insert(vec![(key, 1)], Rat::from_integer(1.into()));
    p
}

fn add_into(acc: &mut Poly, other: &Poly, sign: &Rat) {
    for (m, c) in other {
        let e = acc.entry(m.clone()).or_insert_with(Rat::zero);
        *e += c * sign;
        if e.is_zero() {
            acc.remove(m);
        }
    }
}

fn mul_mono(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out: BTreeMap<String, u32> = a.iter().cloned().collect();
    for (k, e) in b {
        *out.entry(k.clone()).or_insert(0) += e;
    }
    out.into_iter().collect()
}

fn mul_poly(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m = mul_mono(ma, mb);
            let e = out.entry(m.clone()).or_insert_with(Rat::zero);
            *e += ca * cb;
            if e.is_zero() {
                out.remove(&m);
            }
        }
    }
    out
}

fn as_constant(p: &Poly) -> Option<Rat> {
    match p.len() {
        0 => Some(Rat::zero()),
        1 => p.get(&Vec::new()).cloned(),
        _ => None,
    }
}

/// Polynomial normal form; non-polynomial subterms become opaque atoms.
/// Bound variables on the right-hand side are renamed to their left-hand
/// partners so both sides share atom names.
fn poly(t: &Term, alpha: &Alpha) -> Poly {
    let one = Rat::from_integer(1.into());
    match t {
        Term::Num(r) => constant(r.clone()),
        Term::Var(v) => atom(alpha.left_name(v)),
        Term::Neg(a) => {
            let mut out = Poly::new();
            add_into(&mut out, &poly(a, alpha), &-one);
            out
        }
        Term::Add(a, b) => {
            let mut out = poly(a, alpha);
            add_into(&mut out, &poly(b, alpha), &one);
            out
        }
        Term::Sub(a, b) => {
            let mut out = poly(a, alpha);
            add_into(&mut out, &poly(b, alpha), &-one);
            out
        }
        Term::Mul(a, b) => mul_poly(&poly(a, alpha), &poly(b, alpha)),
        Term::Div(a, b) => match as_constant(&poly(b, alpha)) {
            Some(c) if !c.is_zero() => {
                let mut out = Poly::new();
                add_into(&mut out, &poly(a, alpha), &(one / c));
                out
            }
            _ => atom(t.to_string()),
        },
        Term::Pow(a, e) => match as_constant(&poly(e, alpha)) {
            Some(k) if k.is_integer() && !k.is_negative() && k <= Rat::from_integer(16.into()) => {
                let base = poly(a, alpha);
                let n = k.to_integer().to_string().parse::<u32>().unwrap_or(0);
                (0..n).fold(constant(one), |acc, _| mul_poly(&acc, &base))
            }
            _ => atom(t.to_string()),
        },
        _ => atom(t.to_string()),
    }
}

fn difference(lo: &Term, hi: &Term, alpha: &Alpha) -> Poly {
    let mut d = poly(hi, alpha);
    add_into(&mut d, &poly(lo, alpha), &-Rat::from_integer(1.into()));
    d
}

/// Both sides are comparisons of the same kind whose differences agree up
/// to a positive factor (any non-zero factor for `=` and `!=`).
fn arithmetic_root(b: &Formula, a: &Formula, alpha: &mut Alpha) -> bool {
    let (Formula::Cmp(x1, op1, y1), Formula::Cmp(x2, op2, y2)) = (b, a) else { return false };
    if op1 != op2 {
        return false;
    }
    let empty = Alpha::new();
    let d1 = difference(x1, y1, &empty);
    let d2 = difference(x2, y2, alpha);
    let Some((m, c2)) = d2.iter().next() else { return d1.is_empty() };
    let Some(c1) = d1.get(m) else { return false };
    let factor = c1 / c2;
    let sign_ok = match op1 {
        CmpOp::Lt | CmpOp::Le => factor.is_positive(),
        CmpOp::Eq | CmpOp::Ne => !factor.is_zero(),
    };
    if !sign_ok || d1.len() != d2.len() {
        return false;
    }
    d2.iter().all(|(m, c)| d1.get(m) == Some(&(c * &factor)))
}
