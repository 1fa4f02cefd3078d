//! Embedded languages for complex arithmetic, plane transformations,
//! sequence limits, formal power series, Laplace transforms and sampled
//! checking of calculational proofs.

// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complex;
pub mod expr;
pub mod geometry;
pub mod laplace;
pub mod lexer;
pub mod number;
pub mod numexpr;
pub mod proof;
pub mod seq;
pub mod series;

pub use complex::{CartComplex, ComplexError, PolarComplex};
pub use expr::{parse_expr, print_expr, ComplexExpr, Form};
pub use geometry::{parse_transform, Point, Transform};
pub use laplace::{laplace_numeric, LaplaceError, LaplaceOptions};
pub use number::{Rat, Real, Scalar};
pub use proof::{check_proof, parse_proof, ProofReport, ProofScript, StepVerdict};
pub use seq::{SeqError, Sequence};
pub use series::{PowerSeries, SeriesError};
