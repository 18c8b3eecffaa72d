//! Signature-changing reductions. Each pass turns a formula over one
//! signature into an equisatisfiable formula over another and carries
//! executable model transports in both directions: forward images of
//! satisfying models satisfy the transformed formula, and backward images
//! of its models satisfy the original.

mod equality;
mod membership;
mod monadic_funs;
mod pairing;
mod shape;

pub use equality::{add_congruence, remove_functions};
pub use membership::compress_to_membership;
pub use monadic_funs::remove_monadic_functions;
pub use pairing::{embed_padding, rel2_to_fun};
pub use shape::{
    close_formula, compact_symbols, lift_arity0_to1, merge_relations, propositional_collapse,
    remove_constants, uniformize_arity,
};

use crate::hfs::HfsError;
use crate::logic::{Formula, LogicError, Quantifier, Signature, Term};
use crate::semantics::{Env, FinModel, ModelError};
use crate::toolkit::ToolkitError;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PassError {
    #[error("`{name}` is not a declared relation")]
    MissingEquality { name: String },
    #[error("`{name}` has arity {arity}, expected a binary equality relation")]
    EqualityArity { name: String, arity: usize },
    #[error("`{name}` has arity {arity}, above the bound {bound}")]
    ArityAboveBound {
        name: String,
        arity: usize,
        bound: usize,
    },
    #[error("function `{name}` is not allowed by this pass")]
    UnexpectedFunction { name: String },
    #[error("relation `{name}` of arity {arity} is not allowed by this pass")]
    UnexpectedRelation { name: String, arity: usize },
    #[error("`{name}` has arity {arity}, expected uniform arity {expected}")]
    NonUniformArity {
        name: String,
        arity: usize,
        expected: usize,
    },
    #[error("expected exactly one relation, found {found}")]
    NotSingleRelation { found: usize },
    #[error("no relations to merge")]
    NothingToMerge,
    #[error("target signature lacks {needed}")]
    MissingTarget { needed: String },
    #[error("pairing arity {n} is below 2")]
    PairingArity { n: usize },
    #[error("no admissible witness for `{symbol}` in the backward transport")]
    NoWitness { symbol: String },
    #[error("no satisfying witness for the existential closure")]
    NoClosureWitness,
    #[error("witness scan over {candidates} assignments is too large")]
    WitnessScanTooLarge { candidates: u128 },
    #[error("backward transport produced an empty domain")]
    EmptyDecodedDomain,
    #[error("environment entry {value} outside domain of size {size}")]
    EnvEntry { value: usize, size: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Hfs(#[from] HfsError),
    #[error(transparent)]
    Toolkit(#[from] ToolkitError),
}

pub type Transport = Box<dyn Fn(&FinModel, &Env) -> Result<(FinModel, Env), PassError> + Send + Sync>;

/// One reduction: the transformed formula over the target signature plus
/// both model transports. `source_eq` and `target_eq` name a relation that
/// the corresponding side's models must interpret as true equality.
pub struct ReductionStep {
    pub name: &'static str,
    pub source_sig: Signature,
    pub target_sig: Signature,
    pub source_eq: Option<String>,
    pub target_eq: Option<String>,
    /// Free variables the transformed formula adds beyond the source's.
    pub reserved_free: Vec<usize>,
    pub formula: Formula,
    forward: Transport,
    backward: Transport,
}

impl ReductionStep {
    /// Transports a satisfying source model to the target side.
    pub fn forward(&self, m: &FinModel, e: &Env) -> Result<(FinModel, Env), PassError> {
        (self.forward)(m, e)
    }

    /// Transports a satisfying target model back to the source side.
    pub fn backward(&self, m: &FinModel, e: &Env) -> Result<(FinModel, Env), PassError> {
        (self.backward)(m, e)
    }
}

impl std::fmt::Debug for ReductionStep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReductionStep")
            .field("name", &self.name)
            .field("source_sig", &self.source_sig)
            .field("target_sig", &self.target_sig)
            .field("reserved_free", &self.reserved_free)
            .field("formula", &self.formula)
            .finish_non_exhaustive()
    }
}

/// Applies the forward transports of a pass sequence in order.
pub fn run_forward(
    steps: &[ReductionStep],
    model: &FinModel,
    env: &Env,
) -> Result<(FinModel, Env), PassError> {
    let mut cur = (model.clone(), env.clone());
    for s in steps {
        cur = s.forward(&cur.0, &cur.1)?;
    }
    Ok(cur)
}

/// Applies the backward transports in reverse order.
pub fn run_backward(
    steps: &[ReductionStep],
    model: &FinModel,
    env: &Env,
) -> Result<(FinModel, Env), PassError> {
    let mut cur = (model.clone(), env.clone());
    for s in steps.iter().rev() {
        cur = s.backward(&cur.0, &cur.1)?;
    }
    Ok(cur)
}

/// The full chain from an arbitrary signature to the pure membership
/// signature: compact, remove functions, force congruence, uniformize
/// arities, merge relations, drop constants, compress.
pub fn pipeline_to_binary(phi: &Formula, sig: &Signature) -> Result<Vec<ReductionStep>, PassError> {
    let s1 = compact_symbols(phi, sig)?;
    let s2 = remove_functions(&s1.formula, &s1.target_sig)?;
    let eq = s2.target_eq.clone().expect("remove_functions pins equality");
    let s3 = add_congruence(&s2.formula, &s2.target_sig, &eq)?;
    let n = s3
        .target_sig
        .max_relation_arity()
        .expect("equality relation present");
    let s4 = uniformize_arity(&s3.formula, &s3.target_sig, n)?;
    let s5 = merge_relations(&s4.formula, &s4.target_sig)?;
    let s6 = remove_constants(&s5.formula, &s5.target_sig)?;
    let s7 = compress_to_membership(&s6.formula, &s6.target_sig)?;
    Ok(vec![s1, s2, s3, s4, s5, s6, s7])
}

/// First name not in `taken`, formed from `base` by appending a counter;
/// the result is recorded as taken.
pub(crate) fn fresh_name(base: &str, taken: &mut BTreeSet<String>) -> String {
    let name = if !taken.contains(base) {
        base.to_string()
    } else {
        let mut i = 0usize;
        loop {
            let cand = format!("{base}{i}");
            if !taken.contains(&cand) {
                break cand;
            }
            i += 1;
        }
    };
    taken.insert(name.clone());
    name
}

/// Every symbol name of a signature, both namespaces.
pub(crate) fn sig_names(sig: &Signature) -> BTreeSet<String> {
    sig.functions()
        .iter()
        .chain(sig.relations().iter())
        .map(|(n, _)| n.clone())
        .collect()
}

/// Rewrites every atom; the callback sees the relation, the arguments, and
/// the binder depth at the atom.
pub(crate) fn map_atoms<M>(phi: &Formula, map: &mut M) -> Formula
where
    M: FnMut(&str, &[Term], usize) -> Formula,
{
    fn go<M>(phi: &Formula, depth: usize, map: &mut M) -> Formula
    where
        M: FnMut(&str, &[Term], usize) -> Formula,
    {
        match phi {
            Formula::Falsum => Formula::Falsum,
            Formula::Atom(r, args) => map(r, args, depth),
            Formula::Bin(op, l, r) => Formula::bin(*op, go(l, depth, map), go(r, depth, map)),
            Formula::Quant(Quantifier::All, body) => Formula::forall(go(body, depth + 1, map)),
            Formula::Quant(Quantifier::Ex, body) => Formula::exists(go(body, depth + 1, map)),
        }
    }
    go(phi, 0, map)
}

/// Rewrites atoms and relativizes every quantifier to a guard on its bound
/// variable. `guard(depth)` must place the bound variable at index 0 under
/// `depth` binders.
pub(crate) fn relativize<M, G>(phi: &Formula, map: &mut M, guard: &G) -> Formula
where
    M: FnMut(&str, &[Term], usize) -> Formula,
    G: Fn(usize) -> Formula,
{
    fn go<M, G>(phi: &Formula, depth: usize, map: &mut M, guard: &G) -> Formula
    where
        M: FnMut(&str, &[Term], usize) -> Formula,
        G: Fn(usize) -> Formula,
    {
        match phi {
            Formula::Falsum => Formula::Falsum,
            Formula::Atom(r, args) => map(r, args, depth),
            Formula::Bin(op, l, r) => {
                Formula::bin(*op, go(l, depth, map, guard), go(r, depth, map, guard))
            }
            Formula::Quant(Quantifier::All, body) => Formula::forall(Formula::implies(
                guard(depth + 1),
                go(body, depth + 1, map, guard),
            )),
            Formula::Quant(Quantifier::Ex, body) => Formula::exists(Formula::and(
                guard(depth + 1),
                go(body, depth + 1, map, guard),
            )),
        }
    }
    go(phi, 0, map, guard)
}

pub(crate) fn identity_table(k: usize) -> Vec<bool> {
    (0..k * k).map(|i| i / k == i % k).collect()
}

/// Copies the named relation's table from `src` into `dst`.
pub(crate) fn copy_relation(
    dst: &mut FinModel,
    src: &FinModel,
    name: &str,
) -> Result<(), PassError> {
    let (arity, table) = src.relation(name).ok_or(ModelError::MissingSymbol {
        name: name.to_string(),
    })?;
    dst.set_relation(name, arity, table.to_vec())?;
    Ok(())
}

/// Copies the named function's table from `src` into `dst`.
pub(crate) fn copy_function(
    dst: &mut FinModel,
    src: &FinModel,
    name: &str,
) -> Result<(), PassError> {
    let (arity, table) = src.function(name).ok_or(ModelError::MissingSymbol {
        name: name.to_string(),
    })?;
    dst.set_function(name, arity, table.to_vec())?;
    Ok(())
}

pub(crate) fn env_entry_checked(env: &Env, index: usize, size: usize) -> Result<usize, PassError> {
    let v = env.lookup(index);
    if v >= size {
        return Err(PassError::EnvEntry { value: v, size });
    }
    Ok(v)
}
