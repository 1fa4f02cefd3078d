//! Step checking: a registered rule, or a sampled search for a
//! counterexample. "Checked" means only that no counterexample was found.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::ast::{Item, Relation};
use super::eval::{draw_assignment, Assignment, Evaluator, Issue, ProbeCache, SetVal, Tv};
use super::parse::{Header, Hint, ProofScript};
use super::rules::rules_for_hint;
use crate::number::format_plain;

pub const DEFAULT_BUDGET: usize = 10_000;
/// Relative tolerance for `=` and `<=` between terms.
pub const TERM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum StepStatus {
    /// Not falsified. `rule` names the registered rule that matched, if any.
    Checked {
        rule: Option<&'static str>,
    },
    Falsified {
        counterexample: Assignment,
        detail: String,
    },
    Unsupported {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepVerdict {
    pub status: StepStatus,
    pub samples_used: usize,
}

impl StepVerdict {
    fn new(status: StepStatus, samples_used: usize) -> Self {
        StepVerdict { status, samples_used }
    }

    fn unsupported(reason: impl Into<String>) -> Self {
        StepVerdict::new(StepStatus::Unsupported { reason: reason.into() }, 0)
    }

    pub fn is_checked(&self) -> bool {
        matches!(self.status, StepStatus::Checked { .. })
    }

    pub fn is_falsified(&self) -> bool {
        matches!(self.status, StepStatus::Falsified { .. })
    }

    pub fn is_trusted(&self) -> bool {
        matches!(&self.status, StepStatus::Unsupported { reason } if reason == "trusted")
    }
}

impl fmt::Display for StepVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.status {
            StepStatus::Checked { rule: Some(r) } => write!(f, "checked (rule: {r})"),
            StepStatus::Checked { rule: None } => write!(f, "checked ({} samples, not falsified)", self.samples_used),
            StepStatus::Falsified { counterexample, detail } => {
                write!(f, "falsified at sample {}: {counterexample}", self.samples_used)?;
                if !detail.is_empty() {
                    write!(f, "; {detail}")?;
                }
                Ok(())
            }
            StepStatus::Unsupported { reason } => write!(f, "unsupported ({reason})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Overall {
    Checked,
    Falsified,
    Unsupported,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProofReport {
    pub verdicts: Vec<StepVerdict>,
    pub overall: Overall,
}

impl ProofReport {
    pub fn checked(&self) -> usize {
        self.verdicts.iter().filter(|v| v.is_checked()).count()
    }

    pub fn falsified(&self) -> usize {
        self.verdicts.iter().filter(|v| v.is_falsified()).count()
    }

    pub fn trusted(&self) -> usize {
        self.verdicts.iter().filter(|v| v.is_trusted()).count()
    }
}

/// Outcome of one sample.
enum Observation {
    Holds,
    Violated(String),
    Inconclusive,
}

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= TERM_TOLERANCE * 1f64.max(x.abs()).max(y.abs())
}

fn subset(ev: &Evaluator<'_>, a: &SetVal, b: &SetVal) -> Observation {
    let Ok((elems, _)) = ev.elements(a) else { return Observation::Inconclusive };
    let mut unknown = false;
    for x in elems {
        match ev.member(x, b) {
            Tv::False => {
                return Observation::Violated(format!("element {} is outside the right-hand set", format_plain(x)))
            }
            Tv::Unknown => unknown = true,
            Tv::True => {}
        }
    }
    if unknown {
        Observation::Inconclusive
    } else {
        Observation::Holds
    }
}

/// Evaluate one step under `assignment`. `Err` signals an empty sampling
/// domain.
fn observe(
    header: &Header,
    cache: &ProbeCache,
    rel: Relation,
    before: &Item,
    after: &Item,
    assignment: &Assignment,
) -> Result<Observation, Issue> {
    let mut ev = Evaluator::new(header, cache, assignment);
    Ok(match (rel, before, after) {
        (Relation::Implies, Item::Formula(b), Item::Formula(a)) => match ev.formula(b)? {
            Tv::False => Observation::Holds,
            bt => match (bt, ev.formula(a)?) {
                (_, Tv::True) => Observation::Holds,
                (Tv::True, Tv::False) => Observation::Violated("left side holds, right side fails".into()),
                _ => Observation::Inconclusive,
            },
        },
        (Relation::Iff, Item::Formula(b), Item::Formula(a)) => match (ev.formula(b)?, ev.formula(a)?) {
            (Tv::Unknown, _) | (_, Tv::Unknown) => Observation::Inconclusive,
            (x, y) if x == y => Observation::Holds,
            (Tv::True, _) => Observation::Violated("left side holds, right side fails".into()),
            _ => Observation::Violated("right side holds, left side fails".into()),
        },
        (Relation::Equal | Relation::LessEq, Item::Term(b), Item::Term(a)) => match (ev.term(b), ev.term(a)) {
            (Ok(x), Ok(y)) => {
                let ok = if rel == Relation::Equal { close(x, y) } else { x <= y || close(x, y) };
                if ok {
                    Observation::Holds
                } else {
                    Observation::Violated(format!("left = {}, right = {}", format_plain(x), format_plain(y)))
                }
            }
            _ => Observation::Inconclusive,
        },
        (Relation::Subset | Relation::Equal, Item::Set(b), Item::Set(a)) => match (ev.set(b), ev.set(a)) {
            (Ok(sb), Ok(sa)) => match subset(&ev, &sb, &sa) {
                Observation::Holds if rel == Relation::Equal => match subset(&ev, &sa, &sb) {
                    Observation::Violated(d) => Observation::Violated(format!("reverse inclusion: {d}")),
                    o => o,
                },
                o => o,
            },
            _ => Observation::Inconclusive,
        },
        _ => unreachable!("kinds validated by the caller"),
    })
}

fn kinds_fit(rel: Relation, before: &Item, after: &Item) -> bool {
    matches!(
        (rel, before, after),
        (Relation::Implies | Relation::Iff, Item::Formula(_), Item::Formula(_))
            | (Relation::Equal | Relation::LessEq, Item::Term(_), Item::Term(_))
            | (Relation::Subset | Relation::Equal, Item::Set(_), Item::Set(_))
    )
}

fn step_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (index as u64).wrapping_add(1).wrapping_mul(0xD1B5_4A32_D192_ED03)
}

/// Check `before rel after`. `index` only perturbs the sampling stream so
/// distinct steps of one proof draw distinct samples.
#[allow(clippy::too_many_arguments)]
pub fn check_step(
    header: &Header,
    before: &Item,
    rel: Relation,
    after: &Item,
    hint: &Hint,
    budget: usize,
    seed: u64,
    index: usize,
) -> StepVerdict {
    if hint.trusted {
        return StepVerdict::unsupported("trusted");
    }
    if !kinds_fit(rel, before, after) {
        return StepVerdict::unsupported(format!(
            "relation `{rel}` cannot relate a {} to a {}",
            before.kind(),
            after.kind()
        ));
    }
    if let Some(rule) = rules_for_hint(&hint.text).into_iter().find(|r| r.justifies(rel, before, after)) {
        return StepVerdict::new(StepStatus::Checked { rule: Some(rule.name) }, 0);
    }
    if header.vars.iter().any(|v| v.domain.is_empty()) {
        return StepVerdict::unsupported("empty sampling domain");
    }
    let budget = if header.vars.is_empty() { 1 } else { budget.max(1) };
    let mut rng = ChaCha8Rng::seed_from_u64(step_seed(seed, index));
    let cache = ProbeCache::new();
    let mut inconclusive = 0usize;
    for sample in 0..budget {
        let assignment = draw_assignment(header, &mut rng);
        match observe(header, &cache, rel, before, after, &assignment) {
            Err(_) => {
                return StepVerdict::new(StepStatus::Unsupported { reason: "empty sampling domain".into() }, sample + 1)
            }
            Ok(Observation::Holds) => {}
            Ok(Observation::Inconclusive) => inconclusive += 1,
            Ok(Observation::Violated(detail)) => {
                return StepVerdict::new(StepStatus::Falsified { counterexample: assignment, detail }, sample + 1)
            }
        }
    }
    if inconclusive > 0 {
        return StepVerdict::new(
            StepStatus::Unsupported { reason: format!("inconclusive on {inconclusive} of {budget} samples") },
            budget,
        );
    }
    StepVerdict::new(StepStatus::Checked { rule: None }, budget)
}

/// Re-evaluate a step under a given assignment: `Some(true)` when the
/// assignment violates the step relation.
pub fn violates(script: &ProofScript, step: usize, assignment: &Assignment) -> Option<bool> {
    let cache = ProbeCache::new();
    let rel = script.steps.get(step)?.relation;
    let (b, a) = (&script.items[step], &script.items[step + 1]);
    if !kinds_fit(rel, b, a) {
        return None;
    }
    match observe(&script.header, &cache, rel, b, a, assignment).ok()? {
        Observation::Violated(_) => Some(true),
        Observation::Holds => Some(false),
        Observation::Inconclusive => None,
    }
}

/// Check every step, in parallel. `seed` overrides the script's `seed` line.
pub fn check_proof(script: &ProofScript, budget: usize, seed: Option<u64>) -> ProofReport {
    let seed = seed.or(script.header.seed).unwrap_or(0);
    let verdicts: Vec<StepVerdict> = script
        .steps
        .par_iter()
        .enumerate()
        .map(|(i, step)| {
            check_step(
                &script.header,
                &script.items[i],
                step.relation,
                &script.items[i + 1],
                &step.hint,
                budget,
                seed,
                i,
            )
        })
        .collect();
    let overall = if verdicts.iter().any(StepVerdict::is_falsified) {
        Overall::Falsified
    } else if verdicts.iter().all(StepVerdict::is_checked) {
        Overall::Checked
    } else {
        Overall::Unsupported
    };
    ProofReport { verdicts, overall }
}
