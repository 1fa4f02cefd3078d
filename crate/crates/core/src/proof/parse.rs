//! Line-oriented parser for proof scripts.
//!
//! ```text
//! # header
//! var eps : real in logspace(1e-9, 1e3)
//! set A = seqrange(7 - 1/(n+1), 0)
//! def s = sup(A)
//!
//! # body: items alternate with relation lines
//! 0 < eps
//! => { arithmetic }
//! s - eps < s
//! ```

use std::collections::HashMap;

use thiserror::Error;

use super::ast::{CmpOp, Formula, Item, Quantifier, Relation, SetExpr, Term};
use crate::lexer::{tokenize, Cursor, ParseError, Tok, Token};
use crate::number::{parse_decimal, rat_to_f64, Rat};
use crate::numexpr::{parse_sum, Func, RealExpr};
use crate::seq::Sequence;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProofError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}, column {column}: undeclared variable `{name}`")]
    Undeclared { line: usize, column: usize, name: String },
    #[error("line {line}: {message}")]
    Structure { line: usize, message: String },
}

/// Sampling distribution of a header variable.
#[derive(Debug, Clone, PartialEq)]
pub enum VarDomain {
    Interval {
        lo: f64,
        hi: f64,
        lo_closed: bool,
        hi_closed: bool,
    },
    /// Log-uniform on `[lo, hi]`, both positive.
    LogSpace {
        lo: f64,
        hi: f64,
    },
    Finite(Vec<f64>),
    /// A random finite set of `1 ..= max_size` elements drawn from `[lo, hi]`.
    RandomSet {
        max_size: usize,
        lo: f64,
        hi: f64,
    },
}

impl VarDomain {
    pub fn is_set(&self) -> bool {
        matches!(self, VarDomain::RandomSet { .. })
    }

    pub fn is_empty(&self) -> bool {
        match self {
            VarDomain::Interval { lo, hi, lo_closed, hi_closed } => {
                lo > hi || (lo == hi && !(*lo_closed && *hi_closed))
            }
            VarDomain::LogSpace { lo, hi } => lo > hi,
            VarDomain::Finite(v) => v.is_empty(),
            VarDomain::RandomSet { max_size, lo, hi } => *max_size == 0 || lo > hi,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarDecl {
    pub name: String,
    pub domain: VarDomain,
}

/// A one-parameter function given by a closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct FnDecl {
    pub name: String,
    pub param: String,
    pub body: RealExpr,
}

#[derive(Debug, Clone, Default)]
pub struct Header {
    pub vars: Vec<VarDecl>,
    pub sets: Vec<(String, SetExpr)>,
    pub seqs: Vec<(String, Sequence)>,
    pub fns: Vec<FnDecl>,
    pub defs: Vec<(String, Term)>,
    pub seed: Option<u64>,
}

impl Header {
    pub fn seq(&self, name: &str) -> Option<&Sequence> {
        self.seqs.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    pub fn set(&self, name: &str) -> Option<&SetExpr> {
        self.sets.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    pub fn function(&self, name: &str) -> Option<&FnDecl> {
        self.fns.iter().find(|f| f.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hint {
    /// Text between the braces, verbatim.
    pub text: String,
    /// `trusted { … }`: accepted without checking.
    pub trusted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub relation: Relation,
    pub hint: Hint,
    /// 1-based line of the relation.
    pub line: usize,
}

/// A parsed proof: step `i` relates `items[i]` to `items[i + 1]`.
#[derive(Debug, Clone)]
pub struct ProofScript {
    pub header: Header,
    pub items: Vec<Item>,
    pub steps: Vec<Step>,
}

impl ProofScript {
    pub fn formula_count(&self) -> usize {
        self.items.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Scalar,
    Set,
    Seq,
    Fn,
}

const RESERVED: &[&str] = &[
    "in", "notin", "forall", "exists", "not", "true", "false", "subset", "ubs", "V", "Drop", "min", "max", "sup",
    "inf", "pi", "trusted", "seqrange", "logspace", "real", "set",
];

/// Errors raised inside a line, before conversion to line/column.
#[derive(Debug, Clone)]
enum LineError {
    Syntax(ParseError),
    Undeclared { offset: usize, name: String },
}

impl LineError {
    fn offset(&self) -> usize {
        match self {
            LineError::Syntax(e) => e.offset,
            LineError::Undeclared { offset, .. } => *offset,
        }
    }
}

impl From<ParseError> for LineError {
    fn from(e: ParseError) -> Self {
        LineError::Syntax(e)
    }
}

type LResult<T> = Result<T, LineError>;

struct Parser<'a, 's> {
    cur: Cursor<'a>,
    scope: &'s HashMap<String, Kind>,
    bound: Vec<String>,
}

fn is_cmp(tok: Option<&Tok>) -> bool {
    matches!(tok, Some(Tok::Sym("<" | "<=" | ">" | ">=" | "=" | "!=")))
}

impl<'a, 's> Parser<'a, 's> {
    fn new(tokens: &'a [Token], len: usize, scope: &'s HashMap<String, Kind>) -> Self {
        Parser { cur: Cursor::new(tokens, len), scope, bound: Vec::new() }
    }

    fn kind(&self, name: &str) -> Option<Kind> {
        if self.bound.iter().any(|b| b == name) {
            Some(Kind::Scalar)
        } else {
            self.scope.get(name).copied()
        }
    }

    // ---- terms ----

    fn term(&mut self) -> LResult<Term> {
        let mut lhs = self.product()?;
        loop {
            if self.cur.eat_sym("+") {
                lhs = Term::Add(Box::new(lhs), Box::new(self.product()?));
            } else if self.cur.eat_sym("-") {
                lhs = Term::Sub(Box::new(lhs), Box::new(self.product()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> LResult<Term> {
        let mut lhs = self.unary()?;
        loop {
            if self.cur.eat_sym("*") {
                lhs = Term::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.cur.eat_sym("/") {
                lhs = Term::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> LResult<Term> {
        if self.cur.eat_sym("-") {
            return Ok(Term::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.cur.eat_sym("^") {
            return Ok(Term::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> LResult<Term> {
        let offset = self.cur.offset();
        match self.cur.peek() {
            Some(Tok::Number(text)) => {
                self.cur.bump();
                let r = parse_decimal(text).ok_or_else(|| ParseError::new(offset, &["number"], text.clone()))?;
                Ok(Term::Num(r))
            }
            Some(Tok::Sym("(")) => {
                self.cur.bump();
                let t = self.term()?;
                self.cur.expect_sym(")")?;
                Ok(t)
            }
            Some(Tok::Sym("|")) => {
                self.cur.bump();
                let t = self.term()?;
                self.cur.expect_sym("|")?;
                Ok(Term::Abs(Box::new(t)))
            }
            Some(Tok::Ident(name)) => {
                let name = name.as_str();
                match name {
                    "pi" => {
                        self.cur.bump();
                        return Ok(Term::Pi);
                    }
                    "min" | "max" | "sup" => {
                        self.cur.bump();
                        let s = Box::new(self.set_atom()?);
                        return Ok(match name {
                            "min" => Term::Min(s),
                            "max" => Term::Max(s),
                            _ => Term::Sup(s),
                        });
                    }
                    _ => {}
                }
                match self.kind(name) {
                    Some(Kind::Scalar) => {
                        self.cur.bump();
                        Ok(Term::Var(name.to_string()))
                    }
                    Some(Kind::Seq) => {
                        self.cur.bump();
                        Ok(Term::SeqAt(name.to_string(), Box::new(self.atom()?)))
                    }
                    Some(Kind::Fn) => {
                        self.cur.bump();
                        Ok(Term::FnAt(name.to_string(), Box::new(self.atom()?)))
                    }
                    Some(Kind::Set) => Err(self.cur.error(&["term"]).into()),
                    None => match Func::from_name(name) {
                        Some(func) if matches!(self.cur.peek_at(1), Some(Tok::Sym("("))) => {
                            self.cur.bump();
                            Ok(Term::Call(func, Box::new(self.atom()?)))
                        }
                        _ if RESERVED.contains(&name) => Err(self.cur.error(&["term"]).into()),
                        _ => Err(LineError::Undeclared { offset, name: name.to_string() }),
                    },
                }
            }
            _ => Err(self.cur.error(&["number", "variable", "(", "|"]).into()),
        }
    }

    // ---- sets ----

    fn set_expr(&mut self) -> LResult<SetExpr> {
        self.set_atom()
    }

    fn set_atom(&mut self) -> LResult<SetExpr> {
        let offset = self.cur.offset();
        match self.cur.peek() {
            Some(Tok::Ident(name)) => {
                let name = name.as_str();
                match name {
                    "ubs" => {
                        self.cur.bump();
                        Ok(SetExpr::Ubs(Box::new(self.set_atom()?)))
                    }
                    "V" => {
                        self.cur.bump();
                        let start = self.cur.pos();
                        if self.cur.eat_sym("(") {
                            if let Ok(c) = self.term() {
                                if self.cur.eat_sym(",") {
                                    let e = self.term()?;
                                    self.cur.expect_sym(")")?;
                                    return Ok(SetExpr::V(Box::new(c), Box::new(e)));
                                }
                            }
                            self.cur.reset(start);
                        }
                        let c = self.atom()?;
                        let e = self.atom()?;
                        Ok(SetExpr::V(Box::new(c), Box::new(e)))
                    }
                    "Drop" => {
                        self.cur.bump();
                        let start = self.cur.pos();
                        if self.cur.eat_sym("(") {
                            if let Ok(k) = self.term() {
                                if self.cur.eat_sym(",") {
                                    let f = self.seq_name()?;
                                    self.cur.expect_sym(")")?;
                                    return Ok(SetExpr::Drop(Box::new(k), f));
                                }
                            }
                            self.cur.reset(start);
                        }
                        let k = self.atom()?;
                        let f = self.seq_name()?;
                        Ok(SetExpr::Drop(Box::new(k), f))
                    }
                    _ => match self.kind(name) {
                        Some(Kind::Set) => {
                            self.cur.bump();
                            Ok(SetExpr::Named(name.to_string()))
                        }
                        None if !RESERVED.contains(&name) => {
                            Err(LineError::Undeclared { offset, name: name.to_string() })
                        }
                        _ => Err(self.cur.error(&["set"]).into()),
                    },
                }
            }
            Some(Tok::Sym("{")) => {
                self.cur.bump();
                let mut elems = Vec::new();
                if !self.cur.eat_sym("}") {
                    loop {
                        elems.push(self.term()?);
                        if self.cur.eat_sym("}") {
                            break;
                        }
                        self.cur.expect_sym(",")?;
                    }
                }
                Ok(SetExpr::Finite(elems))
            }
            Some(Tok::Sym("(")) => {
                let start = self.cur.pos();
                self.cur.bump();
                if let Ok(s) = self.set_expr() {
                    if self.cur.eat_sym(")") {
                        return Ok(s);
                    }
                }
                self.cur.reset(start);
                self.interval()
            }
            Some(Tok::Sym("[")) => self.interval(),
            _ => Err(self.cur.error(&["set"]).into()),
        }
    }

    fn seq_name(&mut self) -> LResult<String> {
        let offset = self.cur.offset();
        let name = self.cur.expect_ident()?;
        match self.kind(name) {
            Some(Kind::Seq) => Ok(name.to_string()),
            None => Err(LineError::Undeclared { offset, name: name.to_string() }),
            _ => Err(ParseError::new(offset, &["sequence name"], format!("`{name}`")).into()),
        }
    }

    fn interval(&mut self) -> LResult<SetExpr> {
        let lo_closed = if self.cur.eat_sym("[") {
            true
        } else {
            self.cur.expect_sym("(")?;
            false
        };
        let lo = if self.cur.is_sym("-") && matches!(self.cur.peek_at(1), Some(Tok::Ident(n)) if n == "inf") {
            self.cur.bump();
            self.cur.bump();
            None
        } else {
            Some(Box::new(self.term()?))
        };
        self.cur.expect_sym(",")?;
        let hi = if self.cur.eat_ident("inf") { None } else { Some(Box::new(self.term()?)) };
        let hi_closed = if self.cur.eat_sym("]") {
            true
        } else {
            self.cur.expect_sym(")")?;
            false
        };
        Ok(SetExpr::Interval { lo_closed: lo_closed && lo.is_some(), hi_closed: hi_closed && hi.is_some(), lo, hi })
    }

    // ---- formulas ----

    fn formula(&mut self) -> LResult<Formula> {
        let mut lhs = self.conj()?;
        while self.cur.eat_sym("\\/") || self.cur.eat_ident("or") {
            lhs = Formula::or(lhs, self.conj()?);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> LResult<Formula> {
        let mut lhs = self.negation()?;
        while self.cur.eat_sym("/\\") || self.cur.eat_ident("and") {
            lhs = Formula::and(lhs, self.negation()?);
        }
        Ok(lhs)
    }

    fn negation(&mut self) -> LResult<Formula> {
        if self.cur.eat_sym("~") || self.cur.eat_ident("not") {
            return Ok(Formula::negated(self.negation()?));
        }
        for (kw, q) in [("forall", Quantifier::Forall), ("exists", Quantifier::Exists)] {
            if self.cur.eat_ident(kw) {
                let offset = self.cur.offset();
                let var = self.cur.expect_ident()?.to_string();
                if RESERVED.contains(&var.as_str()) {
                    return Err(ParseError::new(offset, &["variable"], format!("`{var}`")).into());
                }
                if !self.cur.eat_ident("in") {
                    return Err(self.cur.error(&["in"]).into());
                }
                let dom = self.set_expr()?;
                self.cur.expect_sym(".")?;
                self.bound.push(var.clone());
                let body = self.formula();
                self.bound.pop();
                return Ok(Formula::Quant(q, var, dom, Box::new(body?)));
            }
        }
        self.atomic()
    }

    fn atomic(&mut self) -> LResult<Formula> {
        if self.cur.eat_ident("true") {
            return Ok(Formula::True);
        }
        if self.cur.eat_ident("false") {
            return Ok(Formula::False);
        }
        if self.cur.is_sym("(") {
            let start = self.cur.pos();
            self.cur.bump();
            if let Ok(f) = self.formula() {
                if self.cur.eat_sym(")") && !self.continues_term() {
                    return Ok(f);
                }
            }
            self.cur.reset(start);
        }
        let lhs = self.term()?;
        if self.cur.eat_ident("in") {
            return Ok(Formula::In(lhs, self.set_expr()?));
        }
        if self.cur.eat_ident("notin") {
            return Ok(Formula::negated(Formula::In(lhs, self.set_expr()?)));
        }
        if !is_cmp(self.cur.peek()) {
            return Err(self.cur.error(&["<", "<=", "=", "!=", ">", ">=", "in", "notin"]).into());
        }
        let mut left = lhs;
        let mut out: Option<Formula> = None;
        while is_cmp(self.cur.peek()) {
            let op = match self.cur.bump() {
                Some(Tok::Sym(s)) => *s,
                _ => unreachable!(),
            };
            let right = self.term()?;
            let atom = match op {
                "<" => Formula::Cmp(left, CmpOp::Lt, right.clone()),
                "<=" => Formula::Cmp(left, CmpOp::Le, right.clone()),
                ">" => Formula::Cmp(right.clone(), CmpOp::Lt, left),
                ">=" => Formula::Cmp(right.clone(), CmpOp::Le, left),
                "=" => Formula::Cmp(left, CmpOp::Eq, right.clone()),
                _ => Formula::Cmp(left, CmpOp::Ne, right.clone()),
            };
            out = Some(match out {
                None => atom,
                Some(prev) => Formula::and(prev, atom),
            });
            left = right;
        }
        Ok(out.expect("at least one comparison"))
    }

    /// Whether the next token would extend a parenthesised term.
    fn continues_term(&self) -> bool {
        matches!(self.cur.peek(), Some(Tok::Sym("+" | "-" | "*" | "/" | "^")))
            || is_cmp(self.cur.peek())
            || self.cur.is_ident("in")
            || self.cur.is_ident("notin")
    }
}

fn column_of(line: &str, offset: usize) -> usize {
    line[..offset.min(line.len())].chars().count() + 1
}

fn lift(line_no: usize, line: &str, base: usize, e: LineError) -> ProofError {
    match e {
        LineError::Syntax(p) => ProofError::Syntax {
            line: line_no,
            column: column_of(line, base + p.offset),
            message: format!("expected {}, found {}", p.expected.join(" | "), p.found),
        },
        LineError::Undeclared { offset, name } => {
            ProofError::Undeclared { line: line_no, column: column_of(line, base + offset), name }
        }
    }
}

fn run<T>(src: &str, scope: &HashMap<String, Kind>, f: impl FnOnce(&mut Parser<'_, '_>) -> LResult<T>) -> LResult<T> {
    let tokens = tokenize(src)?;
    let mut p = Parser::new(&tokens, src.len(), scope);
    let v = f(&mut p)?;
    p.cur.expect_end()?;
    Ok(v)
}

fn parse_item(src: &str, scope: &HashMap<String, Kind>) -> LResult<Item> {
    let attempts = [
        run(src, scope, |p| p.formula().map(Item::Formula)),
        run(src, scope, |p| p.set_expr().map(Item::Set)),
        run(src, scope, |p| p.term().map(Item::Term)),
    ];
    let mut best: Option<LineError> = None;
    for a in attempts {
        match a {
            Ok(item) => return Ok(item),
            Err(e) => {
                let better = match &best {
                    None => true,
                    Some(b) => {
                        e.offset() > b.offset()
                            || (e.offset() == b.offset() && matches!(e, LineError::Undeclared { .. }))
                    }
                };
                if better {
                    best = Some(e);
                }
            }
        }
    }
    Err(best.expect("three attempts"))
}

/// Spellings accepted for step relations, longest first.
const RELATIONS: &[(&str, Relation)] = &[
    ("<=>", Relation::Iff),
    ("⟺", Relation::Iff),
    ("⇔", Relation::Iff),
    ("=>", Relation::Implies),
    ("⇒", Relation::Implies),
    ("<=", Relation::LessEq),
    ("≤", Relation::LessEq),
    ("=", Relation::Equal),
    ("subset", Relation::Subset),
    ("⊆", Relation::Subset),
];

fn relation_prefix(line: &str) -> Option<(Relation, usize)> {
    RELATIONS.iter().find(|(s, _)| line.starts_with(s)).map(|(s, r)| (*r, s.len()))
}

fn parse_relation(line_no: usize, raw: &str, indent: usize) -> Result<Step, ProofError> {
    let text = &raw[indent..];
    let (relation, len) = relation_prefix(text).expect("caller checked");
    let mut pos = indent + len;
    let syntax = |pos: usize, message: &str| ProofError::Syntax {
        line: line_no,
        column: column_of(raw, pos),
        message: message.to_string(),
    };
    let skip_ws = |pos: usize| pos + raw[pos..].len() - raw[pos..].trim_start().len();
    pos = skip_ws(pos);
    let mut trusted = false;
    if raw[pos..].starts_with("trusted") {
        trusted = true;
        pos = skip_ws(pos + "trusted".len());
    }
    if !raw[pos..].starts_with('{') {
        return Err(syntax(pos, "expected `{` opening the hint"));
    }
    let close =
        raw.rfind('}').filter(|&c| c > pos).ok_or_else(|| syntax(raw.len(), "expected `}` closing the hint"))?;
    if !raw[close + 1..].trim().is_empty() {
        return Err(syntax(close + 1, "unexpected text after the hint"));
    }
    Ok(Step { relation, hint: Hint { text: raw[pos + 1..close].trim().to_string(), trusted }, line: line_no })
}

/// Strip a `#` comment that is not inside braces.
fn strip_comment(line: &str) -> &str {
    let mut depth = 0i32;
    for (i, c) in line.char_indices() {
        match c {
            '{' => depth += 1,
            '}' => depth -= 1,
            '#' if depth <= 0 => return &line[..i],
            _ => {}
        }
    }
    line
}

fn const_value(cur: &mut Cursor<'_>) -> LResult<f64> {
    let offset = cur.offset();
    if cur.eat_ident("inf") {
        return Ok(f64::INFINITY);
    }
    if cur.is_sym("-") && matches!(cur.peek_at(1), Some(Tok::Ident(n)) if n == "inf") {
        cur.bump();
        cur.bump();
        return Ok(f64::NEG_INFINITY);
    }
    let e = parse_sum(cur, &[])?;
    let v = e.eval_f64(&[]);
    if v.is_nan() {
        return Err(ParseError::new(offset, &["constant"], e.to_string()).into());
    }
    Ok(v)
}

fn count_value(cur: &mut Cursor<'_>) -> LResult<u64> {
    let offset = cur.offset();
    match cur.bump() {
        Some(Tok::Number(t)) => parse_decimal(t)
            .filter(|r: &Rat| r.is_integer() && *r >= Rat::from_integer(0.into()))
            .map(|r| rat_to_f64(&r) as u64)
            .ok_or_else(|| ParseError::new(offset, &["natural number"], t.clone()).into()),
        other => {
            Err(ParseError::new(offset, &["natural number"], other.map_or("end of input".into(), |t| t.to_string()))
                .into())
        }
    }
}

fn var_domain(cur: &mut Cursor<'_>) -> LResult<VarDomain> {
    if cur.eat_ident("logspace") {
        cur.expect_sym("(")?;
        let lo_off = cur.offset();
        let lo = const_value(cur)?;
        cur.expect_sym(",")?;
        let hi = const_value(cur)?;
        cur.expect_sym(")")?;
        if !(lo > 0.0 && hi.is_finite()) {
            return Err(ParseError::new(lo_off, &["positive finite bounds"], format!("{lo}, {hi}")).into());
        }
        return Ok(VarDomain::LogSpace { lo, hi });
    }
    if cur.eat_sym("{") {
        let mut vals = Vec::new();
        if !cur.eat_sym("}") {
            loop {
                vals.push(const_value(cur)?);
                if cur.eat_sym("}") {
                    break;
                }
                cur.expect_sym(",")?;
            }
        }
        return Ok(VarDomain::Finite(vals));
    }
    let (lo, hi, lo_closed, hi_closed) = bounds(cur)?;
    Ok(VarDomain::Interval { lo, hi, lo_closed, hi_closed })
}

fn bounds(cur: &mut Cursor<'_>) -> LResult<(f64, f64, bool, bool)> {
    let lo_closed = if cur.eat_sym("[") {
        true
    } else if cur.eat_sym("(") {
        false
    } else {
        return Err(cur.error(&["(", "[", "{", "logspace"]).into());
    };
    let off = cur.offset();
    let lo = const_value(cur)?;
    cur.expect_sym(",")?;
    let hi = const_value(cur)?;
    let hi_closed = if cur.eat_sym("]") {
        true
    } else {
        cur.expect_sym(")")?;
        false
    };
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(ParseError::new(off, &["finite sampling bounds"], format!("{lo}, {hi}")).into());
    }
    Ok((lo, hi, lo_closed, hi_closed))
}

struct Builder {
    header: Header,
    scope: HashMap<String, Kind>,
}

impl Builder {
    fn declare(&mut self, name: &str, kind: Kind, offset: usize) -> LResult<()> {
        if RESERVED.contains(&name) || Func::from_name(name).is_some() {
            return Err(ParseError::new(offset, &["fresh name"], format!("reserved `{name}`")).into());
        }
        if self.scope.contains_key(name) {
            return Err(ParseError::new(offset, &["fresh name"], format!("`{name}` already declared")).into());
        }
        self.scope.insert(name.to_string(), kind);
        Ok(())
    }

    fn header_line(&mut self, src: &str) -> LResult<()> {
        let tokens = tokenize(src)?;
        let mut cur = Cursor::new(&tokens, src.len());
        let kw = cur.expect_ident()?.to_string();
        let name_off = cur.offset();
        match kw.as_str() {
            "seed" => {
                self.header.seed = Some(count_value(&mut cur)?);
            }
            "var" => {
                let name = cur.expect_ident()?.to_string();
                cur.expect_sym(":")?;
                let domain = if cur.eat_ident("real") {
                    if !cur.eat_ident("in") {
                        return Err(cur.error(&["in"]).into());
                    }
                    var_domain(&mut cur)?
                } else if cur.eat_ident("set") {
                    cur.expect_sym("(")?;
                    let k = count_value(&mut cur)?;
                    cur.expect_sym(")")?;
                    if !cur.eat_ident("in") {
                        return Err(cur.error(&["in"]).into());
                    }
                    let (lo, hi, _, _) = bounds(&mut cur)?;
                    VarDomain::RandomSet { max_size: k as usize, lo, hi }
                } else {
                    return Err(cur.error(&["real", "set"]).into());
                };
                let kind = if domain.is_set() { Kind::Set } else { Kind::Scalar };
                self.declare(&name, kind, name_off)?;
                self.header.vars.push(VarDecl { name, domain });
            }
            "seq" => {
                let name = cur.expect_ident()?.to_string();
                cur.expect_sym("=")?;
                let body = parse_sum(&mut cur, &["n"])?;
                self.declare(&name, Kind::Seq, name_off)?;
                self.header.seqs.push((name, Sequence::from_expr(body)));
            }
            "fn" => {
                let name = cur.expect_ident()?.to_string();
                cur.expect_sym("(")?;
                let param = cur.expect_ident()?.to_string();
                cur.expect_sym(")")?;
                cur.expect_sym("=")?;
                let body = parse_sum(&mut cur, &[param.as_str()])?;
                self.declare(&name, Kind::Fn, name_off)?;
                self.header.fns.push(FnDecl { name, param, body });
            }
            "set" => {
                let name = cur.expect_ident()?.to_string();
                cur.expect_sym("=")?;
                let set = if cur.eat_ident("seqrange") {
                    cur.expect_sym("(")?;
                    let body = parse_sum(&mut cur, &["n"])?;
                    cur.expect_sym(",")?;
                    let from = count_value(&mut cur)?;
                    cur.expect_sym(")")?;
                    let hidden = format!("{name}'seq");
                    self.header.seqs.push((hidden.clone(), Sequence::from_expr(body)));
                    SetExpr::Drop(Box::new(Term::Num(Rat::from_integer(from.into()))), hidden)
                } else {
                    let mut p = Parser { cur: cur.clone(), scope: &self.scope, bound: Vec::new() };
                    let s = p.set_expr()?;
                    cur = p.cur;
                    s
                };
                self.declare(&name, Kind::Set, name_off)?;
                self.header.sets.push((name, set));
            }
            "def" => {
                let name = cur.expect_ident()?.to_string();
                cur.expect_sym("=")?;
                let mut p = Parser { cur: cur.clone(), scope: &self.scope, bound: Vec::new() };
                let t = p.term()?;
                cur = p.cur;
                self.declare(&name, Kind::Scalar, name_off)?;
                self.header.defs.push((name, t));
            }
            _ => unreachable!("caller checked the keyword"),
        }
        cur.expect_end()?;
        Ok(())
    }
}

const HEADER_KEYWORDS: &[&str] = &["var", "set", "seq", "fn", "def", "seed"];

fn header_keyword(line: &str) -> bool {
    let word: String = line.chars().take_while(|c| c.is_alphanumeric() || *c == '_').collect();
    HEADER_KEYWORDS.contains(&word.as_str()) && line[word.len()..].starts_with(char::is_whitespace)
}

/// Parse a complete proof script.
pub fn parse_proof(text: &str) -> Result<ProofScript, ProofError> {
    let mut b = Builder { header: Header::default(), scope: HashMap::new() };
    let mut items = Vec::new();
    let mut steps = Vec::new();
    let mut expect_item = true;
    let mut last_line = 0;
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw_line);
        let trimmed = line.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        last_line = line_no;
        let indent = line.len() - trimmed.len();
        if items.is_empty() && header_keyword(trimmed) {
            b.header_line(trimmed).map_err(|e| lift(line_no, raw_line, indent, e))?;
            continue;
        }
        if relation_prefix(trimmed).is_some() {
            if expect_item {
                return Err(ProofError::Structure {
                    line: line_no,
                    message: "relation without a preceding formula".into(),
                });
            }
            steps.push(parse_relation(line_no, line.trim_end(), indent)?);
            expect_item = true;
        } else {
            if !expect_item {
                return Err(ProofError::Structure {
                    line: line_no,
                    message: "expected a relation line such as `=> { hint }`".into(),
                });
            }
            let item = parse_item(trimmed.trim_end(), &b.scope).map_err(|e| lift(line_no, raw_line, indent, e))?;
            items.push(item);
            expect_item = false;
        }
    }
    if expect_item && !steps.is_empty() {
        return Err(ProofError::Structure { line: last_line, message: "proof ends with a relation".into() });
    }
    if items.len() < 2 {
        return Err(ProofError::Structure {
            line: last_line.max(1),
            message: "a proof needs at least two formulas".into(),
        });
    }
    Ok(ProofScript { header: b.header, items, steps })
}
