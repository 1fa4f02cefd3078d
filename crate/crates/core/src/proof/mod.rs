//! Calculational proofs: a chain of formulas (or terms, or sets) linked by
//! relations, each step carrying a bracketed hint.
//!
//! Each step is justified either by a registered rewrite rule selected by
//! its hint, or by a seeded random search for a counterexample over the
//! variables declared in the header. The checker is a falsifier: a
//! `checked` verdict means no counterexample was found, not that the step
//! is proved.

mod ast;
mod check;
mod eval;
mod parse;
mod rules;

pub use ast::{alpha_eq, CmpOp, Formula, Item, Quantifier, Relation, SetExpr, Term};
pub use check::{
    check_proof, check_step, violates, Overall, ProofReport, StepStatus, StepVerdict, DEFAULT_BUDGET, TERM_TOLERANCE,
};
pub use eval::{draw_assignment, probe_offsets, Assignment, Binding, Tv};
pub use parse::{parse_proof, FnDecl, Header, Hint, ProofError, ProofScript, Step, VarDecl, VarDomain};
pub use rules::{negate, rules_for_hint, Rule, RuleKind, NUMERIC_HINT, REGISTRY};

/// Proof scripts shipped with the library.
pub mod corpus {
    /// The no-gap argument below a supremum, 9 formulas and 8 steps.
    pub const SUP_CHAIN: &str = include_str!("../../proofs/sup_chain.proof");
    /// Tails of an increasing bounded sequence; the middle step is trusted.
    pub const DROP_CHAIN: &str = include_str!("../../proofs/drop_chain.proof");

    /// Deliberately wrong single-step proofs, each of which must be falsified.
    pub const CORRUPTED: [(&str, &str); 10] = [
        ("sign flip", include_str!("../../proofs/corrupted/01_sign_flip.proof")),
        ("strict from non-strict", include_str!("../../proofs/corrupted/02_strict_to_nonstrict.proof")),
        ("strict bound between variables", include_str!("../../proofs/corrupted/03_nonstrict_to_strict_bound.proof")),
        ("quantifier swap", include_str!("../../proofs/corrupted/04_quantifier_swap.proof")),
        ("negation keeps strictness", include_str!("../../proofs/corrupted/05_negation_keeps_bound.proof")),
        ("exists to forall", include_str!("../../proofs/corrupted/06_exists_to_forall.proof")),
        ("absolute value drops a bound", include_str!("../../proofs/corrupted/07_absolute_value.proof")),
        ("non-strict min property", include_str!("../../proofs/corrupted/08_min_property.proof")),
        ("sup below min", include_str!("../../proofs/corrupted/09_sup_below_min.proof")),
        ("closed neighbourhood", include_str!("../../proofs/corrupted/10_neighbourhood_radius.proof")),
    ];
}
