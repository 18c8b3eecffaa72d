//! Finite-model workbench for first-order logic.
//!
//! The crate decides and transforms satisfiability problems over finite
//! domains. Formulas use de Bruijn indices, models are explicit lookup
//! tables, and every signature reduction ships with executable model
//! transports in both directions, so each transformation can be checked
//! against the evaluator rather than taken on faith.
//!
//! The main entry points, roughly bottom-up:
//!
//! - [`logic`]: terms, formulas, signatures, the s-expression parser and
//!   printer.
//! - [`semantics`]: finite models, environments, and the evaluator,
//!   plus a memoizing [`semantics::ModelChecker`] for large models.
//! - [`toolkit`]: small finite combinatorics (duplicate search, quotients,
//!   powersets, pairing).
//! - [`search`]: bounded model search over a signature.
//! - [`bisim`]: indistinguishability refinement and model minimization.
//! - [`hfs`]: hereditarily finite sets and membership models.
//! - [`passes`]: signature reduction passes and the pipeline down to a
//!   single binary relation.
//! - [`bpcp`]: bounded Post correspondence, its axiomatisation in first-order
//!   logic, and solution extraction from models.
//! - [`monadic`]: a decision procedure for the monadic fragment.
//! - [`seplog`]: separation logic on functional heaps and the encoding of
//!   binary-relation satisfiability into memory-chunk satisfiability.
//! - [`classify`]: the decidability frontier by signature shape.
//!
//! Each major capability has a runnable example:
//!
//! ```text
//! cargo run --example check_model
//! cargo run --example model_search
//! cargo run --example minimize_model
//! cargo run --example reduction_pipeline
//! cargo run --example membership_compression
//! cargo run --example bpcp_reduction
//! cargo run --example monadic_decision
//! cargo run --example separation_logic
//! cargo run --example classify_signatures
//! ```
//!
//! The `finsat` binary exposes the same operations as subcommands over JSON
//! files; see the crate README for the file formats.

pub mod bisim;
pub mod bpcp;
pub mod classify;
pub mod cli;
pub mod hfs;
pub mod logic;
pub mod monadic;
pub mod passes;
pub mod search;
pub mod semantics;
pub mod seplog;
pub mod toolkit;

pub use logic::{BinOp, Formula, Quantifier, Signature, Term};
pub use semantics::{Env, FinModel};
