//! Proof theory and semantics for intuitionistic and constructive
//! conditional logics.
//!
//! The crate provides:
//!
//! - [`formula`] — the shared formula language with *would* (`>`) and
//!   *might* (`?>`) conditionals, parser and printer;
//! - [`sequent`] — single-succedent sequent calculi for the constructive
//!   conditional logics and their identity / conditional-modus-ponens /
//!   conditional-excluded-middle extensions, a multi-succedent calculus for
//!   classical CK, backward proof search, derivation checking and
//!   admissibility probes;
//! - [`nested`] — the nested sequent calculus for the intuitionistic
//!   conditional logic, proof search, and executable structural-rule,
//!   index-replacement and cut elimination;
//! - [`semantics`] — finite birelational Chellas models, frame-condition
//!   checking, validity evaluation, seeded random model generation and
//!   bounded countermodel search;
//! - [`hilbert`] — the axiomatic systems, a line-checked proof format, a
//!   sequent-to-Hilbert compiler and the modal embedding;
//! - [`conformance`] — the theorem/non-theorem matrix and property suites
//!   behind the `condikit conformance` command.
//!
//! Batchable work (conformance rows, probe trials, validity sweeps,
//! countermodel scans) runs data-parallel on rayon by default; building with
//! `--no-default-features` selects the sequential fallback.

pub mod cli;
pub mod exec;
pub mod formula;
pub mod hilbert;
pub mod nested;
pub mod semantics;
pub mod sequent;

pub use formula::{parse, Formula, Polarity};
pub use sequent::{LogicId, ProofResult, SearchBudget, SeqDerivation, Sequent};
