//! A small computational type theory kernel in the style of meaning
//! explanations: types are programs, membership is defined by evaluation
//! to canonical form, and judgments are decided by bounded enumeration.

// Failure payloads carry the offending terms for diagnostics; they are rare
// and not worth boxing.
#![allow(clippy::result_large_err, clippy::large_enum_variant)]

pub mod binary;
pub mod checker;
pub mod eval;
pub mod judgment;
pub mod kripke;
pub mod par;
pub mod rules;
pub mod syntax;
pub mod term;
pub mod unary;

pub use checker::{
    former_depth, ground_types, CheckError, Checker, EnumError, Enumeration, InhabitError,
    Inhabitation, DEFAULT_DEPTH, DEFAULT_FUEL, MAX_NESTING,
};
pub use eval::{eval, eval_with, EvalResult, Strategy};
pub use judgment::{Counterexample, FuelReport, Judgment, Trace, Verdict, VerdictKind};
pub use par::Exec;
pub use syntax::{parse, ParseError};
pub use term::{CanonicalForm, Name, Term};
