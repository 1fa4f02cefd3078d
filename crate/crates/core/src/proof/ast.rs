use std::fmt;

use crate::number::Rat;
use crate::numexpr::Func;

/// Real-valued terms.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Num(Rat),
    Pi,
    Var(String),
    Neg(Box<Term>),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Div(Box<Term>, Box<Term>),
    Pow(Box<Term>, Box<Term>),
    Abs(Box<Term>),
    Call(Func, Box<Term>),
    Min(Box<SetExpr>),
    Max(Box<SetExpr>),
    Sup(Box<SetExpr>),
    /// Value of a declared sequence at an index.
    SeqAt(String, Box<Term>),
    /// Application of a declared one-parameter function.
    FnAt(String, Box<Term>),
}

/// Set expressions. Interval endpoints set to `None` are infinite.
#[derive(Debug, Clone, PartialEq)]
pub enum SetExpr {
    Named(String),
    Ubs(Box<SetExpr>),
    /// The neighbourhood `V c e`.
    V(Box<Term>, Box<Term>),
    /// `Drop k f`.
    Drop(Box<Term>, String),
    Interval {
        lo: Option<Box<Term>>,
        hi: Option<Box<Term>>,
        lo_closed: bool,
        hi_closed: bool,
    },
    Finite(Vec<Term>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        }
    }

    pub fn holds(self, a: f64, b: f64) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    Forall,
    Exists,
}

/// Formulas. Comparison chains are stored as conjunctions of binary
/// comparisons, with `>` and `>=` flipped to `<` and `<=`.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    True,
    False,
    Cmp(Term, CmpOp, Term),
    In(Term, SetExpr),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Quant(Quantifier, String, SetExpr, Box<Formula>),
}

impl Formula {
    pub fn negated(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn quant(q: Quantifier, var: &str, dom: SetExpr, body: Formula) -> Formula {
        Formula::Quant(q, var.to_string(), dom, Box::new(body))
    }
}

/// One line of a proof body: a formula, a term, or a set.
#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Formula(Formula),
    Term(Term),
    Set(SetExpr),
}

impl Item {
    pub fn kind(&self) -> &'static str {
        match self {
            Item::Formula(_) => "formula",
            Item::Term(_) => "term",
            Item::Set(_) => "set",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Implies,
    Iff,
    Equal,
    LessEq,
    Subset,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Implies => "=>",
            Relation::Iff => "<=>",
            Relation::Equal => "=",
            Relation::LessEq => "<=",
            Relation::Subset => "subset",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

fn write_rat(f: &mut fmt::Formatter<'_>, r: &Rat) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "({}/{})", r.numer(), r.denom())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Num(r) => write_rat(f, r),
            Term::Pi => f.write_str("pi"),
            Term::Var(v) => f.write_str(v),
            Term::Neg(a) => write!(f, "(-{a})"),
            Term::Add(a, b) => write!(f, "({a} + {b})"),
            Term::Sub(a, b) => write!(f, "({a} - {b})"),
            Term::Mul(a, b) => write!(f, "({a} * {b})"),
            Term::Div(a, b) => write!(f, "({a} / {b})"),
            Term::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Term::Abs(a) => write!(f, "|{a}|"),
            Term::Call(func, a) => write!(f, "{}({a})", func.name()),
            Term::Min(s) => write!(f, "min({s})"),
            Term::Max(s) => write!(f, "max({s})"),
            Term::Sup(s) => write!(f, "sup({s})"),
            Term::SeqAt(name, i) | Term::FnAt(name, i) => write!(f, "{name}({i})"),
        }
    }
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetExpr::Named(n) => f.write_str(n),
            SetExpr::Ubs(s) => write!(f, "ubs({s})"),
            SetExpr::V(c, e) => write!(f, "V({c}, {e})"),
            SetExpr::Drop(k, s) => write!(f, "Drop({k}, {s})"),
            SetExpr::Interval { lo, hi, lo_closed, hi_closed } => {
                f.write_str(if *lo_closed { "[" } else { "(" })?;
                match lo {
                    Some(t) => write!(f, "{t}")?,
                    None => f.write_str("-inf")?,
                }
                f.write_str(", ")?;
                match hi {
                    Some(t) => write!(f, "{t}")?,
                    None => f.write_str("inf")?,
                }
                f.write_str(if *hi_closed { "]" } else { ")" })
            }
            SetExpr::Finite(ts) => {
                f.write_str("{")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str("}")
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Cmp(a, op, b) => write!(f, "{a} {} {b}", op.symbol()),
            Formula::In(t, s) => write!(f, "{t} in {s}"),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::In(t, s) => write!(f, "{t} notin {s}"),
                other => write!(f, "~({other})"),
            },
            Formula::And(a, b) => write!(f, "({a} /\\ {b})"),
            Formula::Or(a, b) => write!(f, "({a} \\/ {b})"),
            Formula::Quant(q, v, d, body) => {
                let kw = match q {
                    Quantifier::Forall => "forall",
                    Quantifier::Exists => "exists",
                };
                write!(f, "({kw} {v} in {d}. {body})")
            }
        }
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::Formula(x) => write!(f, "{x}"),
            Item::Term(x) => write!(f, "{x}"),
            Item::Set(x) => write!(f, "{x}"),
        }
    }
}

/// Structural equality up to renaming of bound variables.
#[derive(Debug, Default)]
pub struct Alpha {
    pairs: Vec<(String, String)>,
}

impl Alpha {
    pub fn new() -> Self {
        Alpha::default()
    }

    pub fn push(&mut self, a: &str, b: &str) {
        self.pairs.push((a.to_string(), b.to_string()));
    }

    pub fn pop(&mut self) {
        self.pairs.pop();
    }

    /// The left-hand name paired with a right-hand bound variable.
    pub fn left_name(&self, b: &str) -> String {
        self.pairs.iter().rev().find(|(_, y)| y == b).map_or_else(|| b.to_string(), |(x, _)| x.clone())
    }

    fn var(&self, a: &str, b: &str) -> bool {
        for (x, y) in self.pairs.iter().rev() {
            if x == a || y == b {
                return x == a && y == b;
            }
        }
        a == b
    }

    pub fn term(&mut self, a: &Term, b: &Term) -> bool {
        use Term::*;
        match (a, b) {
            (Num(x), Num(y)) => x == y,
            (Pi, Pi) => true,
            (Var(x), Var(y)) => self.var(x, y),
            (Neg(x), Neg(y)) | (Abs(x), Abs(y)) => self.term(x, y),
            (Add(a1, a2), Add(b1, b2))
            | (Sub(a1, a2), Sub(b1, b2))
            | (Mul(a1, a2), Mul(b1, b2))
            | (Div(a1, a2), Div(b1, b2))
            | (Pow(a1, a2), Pow(b1, b2)) => self.term(a1, b1) && self.term(a2, b2),
            (Call(f, x), Call(g, y)) => f == g && self.term(x, y),
            (Min(x), Min(y)) | (Max(x), Max(y)) | (Sup(x), Sup(y)) => self.set(x, y),
            (SeqAt(f, x), SeqAt(g, y)) | (FnAt(f, x), FnAt(g, y)) => f == g && self.term(x, y),
            _ => false,
        }
    }

    fn opt_term(&mut self, a: &Option<Box<Term>>, b: &Option<Box<Term>>) -> bool {
        match (a, b) {
            (None, None) => true,
            (Some(x), Some(y)) => self.term(x, y),
            _ => false,
        }
    }

    pub fn set(&mut self, a: &SetExpr, b: &SetExpr) -> bool {
        use SetExpr::*;
        match (a, b) {
            (Named(x), Named(y)) => x == y,
            (Ubs(x), Ubs(y)) => self.set(x, y),
            (V(c1, e1), V(c2, e2)) => self.term(c1, c2) && self.term(e1, e2),
            (Drop(k1, f1), Drop(k2, f2)) => f1 == f2 && self.term(k1, k2),
            (
                Interval { lo: l1, hi: h1, lo_closed: lc1, hi_closed: hc1 },
                Interval { lo: l2, hi: h2, lo_closed: lc2, hi_closed: hc2 },
            ) => lc1 == lc2 && hc1 == hc2 && self.opt_term(l1, l2) && self.opt_term(h1, h2),
            (Finite(xs), Finite(ys)) => xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.term(x, y)),
            _ => false,
        }
    }

    pub fn formula(&mut self, a: &Formula, b: &Formula) -> bool {
        use Formula::*;
        match (a, b) {
            (True, True) | (False, False) => true,
            (Cmp(a1, o1, a2), Cmp(b1, o2, b2)) => o1 == o2 && self.term(a1, b1) && self.term(a2, b2),
            (In(t1, s1), In(t2, s2)) => self.term(t1, t2) && self.set(s1, s2),
            (Not(x), Not(y)) => self.formula(x, y),
            (And(a1, a2), And(b1, b2)) | (Or(a1, a2), Or(b1, b2)) => self.formula(a1, b1) && self.formula(a2, b2),
            (Quant(q1, v1, d1, x), Quant(q2, v2, d2, y)) => {
                if q1 != q2 || !self.set(d1, d2) {
                    return false;
                }
                self.push(v1, v2);
                let ok = self.formula(x, y);
                self.pop();
                ok
            }
            _ => false,
        }
    }
}

pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    Alpha::new().formula(a, b)
}
