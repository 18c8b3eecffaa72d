//! Brute-force finite satisfiability: a total decider for one domain size,
//! a sweep over sizes, and the satisfiability semi-decider built on it.
//!
//! The candidate order is part of the contract. Candidates form one
//! odometer whose digits run, fastest to slowest: the assignment of free
//! variables (lowest index fastest), then function tables, then relation
//! tables, each table with cell 0 fastest and tables of later-declared
//! symbols before earlier ones. Every digit starts at zero, so the first
//! candidate has all-false relations, constant-zero functions, and the
//! all-zero assignment. Only symbols occurring in the formula are
//! enumerated; the rest keep canonical zero tables.

use crate::logic::{Formula, LogicError, Signature};
use crate::semantics::{Env, FinModel, ModelError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("candidate space of {candidates} models exceeds the ceiling of {ceiling}")]
    CandidateCeiling { candidates: u128, ceiling: u128 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// Resource limits for the enumeration.
#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    /// Upper bound on the number of candidate models times assignments.
    pub max_candidates: u128,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            max_candidates: 100_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    /// First witness in candidate order; `eval` returns true on it.
    Sat { model: FinModel, env: Env },
    /// No model of any size in `1..=bound` satisfies the formula.
    UnsatUpTo(usize),
    /// No model with this exact domain size satisfies the formula.
    UnsatOnDomain(usize),
}

impl SearchOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SearchOutcome::Sat { .. })
    }
}

enum CellKind {
    Assignment { var: usize },
    Function { name: String, cell: usize },
    Relation { name: String, cell: usize },
}

struct Digit {
    kind: CellKind,
    radix: usize,
}

/// Decides satisfiability over the domain `0..k` by exhaustive table
/// enumeration. Total for valid inputs.
pub fn decide_fixed_domain(
    phi: &Formula,
    sig: &Signature,
    k: usize,
    cfg: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    decide_with_pinned(phi, sig, k, None, cfg)
}

/// Same decider, but the named binary relation is pinned to the identity
/// table and excluded from enumeration. This is satisfiability with that
/// symbol read as true equality.
pub fn decide_fixed_domain_with_identity(
    phi: &Formula,
    sig: &Signature,
    k: usize,
    eq: &str,
    cfg: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    decide_with_pinned(phi, sig, k, Some(eq), cfg)
}

fn decide_with_pinned(
    phi: &Formula,
    sig: &Signature,
    k: usize,
    pinned_eq: Option<&str>,
    cfg: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    if k == 0 {
        return Err(SearchError::Model(ModelError::EmptyDomain));
    }
    sig.validate_formula(phi)?;

    let (occ_funs, occ_rels) = phi.symbols();
    let free = phi.free_vars();
    let mut model = FinModel::canonical(sig, k)?;
    if let Some(eq) = pinned_eq {
        let table: Vec<bool> = (0..k * k).map(|i| i / k == i % k).collect();
        model.set_relation(eq, 2, table)?;
    }

    // Digit layout, fastest first. Within each group later-declared symbols
    // come first so that earlier declarations change more slowly.
    let mut digits: Vec<Digit> = Vec::new();
    let mut candidates: u128 = 1;
    for v in &free {
        digits.push(Digit {
            kind: CellKind::Assignment { var: *v },
            radix: k,
        });
    }
    for (name, arity) in sig.functions().iter().rev() {
        if !occ_funs.contains(name) {
            continue;
        }
        for cell in 0..k.pow(*arity as u32) {
            digits.push(Digit {
                kind: CellKind::Function {
                    name: name.clone(),
                    cell,
                },
                radix: k,
            });
        }
    }
    for (name, arity) in sig.relations().iter().rev() {
        if !occ_rels.contains(name) || pinned_eq == Some(name.as_str()) {
            continue;
        }
        for cell in 0..k.pow(*arity as u32) {
            digits.push(Digit {
                kind: CellKind::Relation {
                    name: name.clone(),
                    cell,
                },
                radix: 2,
            });
        }
    }
    for d in &digits {
        candidates = candidates
            .checked_mul(d.radix as u128)
            .unwrap_or(u128::MAX);
    }
    if candidates > cfg.max_candidates {
        return Err(SearchError::CandidateCeiling {
            candidates,
            ceiling: cfg.max_candidates,
        });
    }

    let prefix_len = free.iter().max().map_or(0, |m| m + 1);
    let mut values = vec![0usize; digits.len()];
    let mut prefix = vec![0usize; prefix_len];
    loop {
        let env = Env::new(prefix.clone(), 0);
        if model.eval(&env, phi)? {
            debug_assert!(model.eval(&env, phi).unwrap());
            return Ok(SearchOutcome::Sat { model, env });
        }
        // Odometer tick: increment the fastest digit, carrying upward.
        let mut i = 0;
        loop {
            if i == digits.len() {
                return Ok(SearchOutcome::UnsatOnDomain(k));
            }
            values[i] += 1;
            if values[i] < digits[i].radix {
                apply_digit(&mut model, &mut prefix, &digits[i], values[i]);
                break;
            }
            values[i] = 0;
            apply_digit(&mut model, &mut prefix, &digits[i], 0);
            i += 1;
        }
    }
}

fn apply_digit(model: &mut FinModel, prefix: &mut [usize], d: &Digit, value: usize) {
    match &d.kind {
        CellKind::Assignment { var } => prefix[*var] = value,
        CellKind::Function { name, cell } => model.set_function_cell(name, *cell, value),
        CellKind::Relation { name, cell } => model.set_relation_cell(name, *cell, value == 1),
    }
}

/// Tries domain sizes `1..=kmax` in order and reports the first hit.
pub fn search_up_to(
    phi: &Formula,
    sig: &Signature,
    kmax: usize,
    cfg: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    for k in 1..=kmax {
        if let SearchOutcome::Sat { model, env } = decide_fixed_domain(phi, sig, k, cfg)? {
            return Ok(SearchOutcome::Sat { model, env });
        }
    }
    Ok(SearchOutcome::UnsatUpTo(kmax))
}

/// Satisfiability semi-decision: a size sweep under a fuel bound. A `Sat`
/// answer is definitive; `UnsatUpTo` only says no model of size `<= fuel`
/// exists and is not an unsatisfiability proof.
pub fn enumerate_fsat(
    phi: &Formula,
    sig: &Signature,
    fuel: usize,
    cfg: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    search_up_to(phi, sig, fuel, cfg)
}
