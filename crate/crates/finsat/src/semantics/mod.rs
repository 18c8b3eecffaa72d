//! Finite Tarski semantics: models as lookup tables, environments as
//! prefix-plus-default assignments, and the recursive evaluator.
//!
//! A model interprets every function symbol by a flat table of length
//! `size^arity` and every relation symbol by a flat bit table. Tuples index
//! tables big-endian: the first argument is the most significant digit.

mod checker;

pub use checker::ModelChecker;
#[cfg(test)]
pub(crate) use checker::{match_approx, match_is_opair, match_is_pair};

use crate::logic::{BinOp, Formula, Quantifier, Signature, Term};
use std::collections::BTreeMap;
use thiserror::Error;

/// Errors from model construction and evaluation.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("model domain must be nonempty")]
    EmptyDomain,
    #[error("table for `{name}` has {got} entries, expected {expected}")]
    BadTableSize {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("table for `{name}` contains entry {entry} outside domain of size {size}")]
    EntryOutOfRange {
        name: String,
        entry: usize,
        size: usize,
    },
    #[error("model does not interpret `{name}`")]
    MissingSymbol { name: String },
    #[error("`{symbol}` interpreted with arity {expected} but used with {got} arguments")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("environment value {value} outside domain of size {size}")]
    EnvOutOfRange { value: usize, size: usize },
}

/// Variable assignment: an explicit prefix and a default for all other
/// indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Env {
    prefix: Vec<usize>,
    default: usize,
}

impl Env {
    pub fn new(prefix: Vec<usize>, default: usize) -> Env {
        Env { prefix, default }
    }

    /// The constant assignment `x -> value`.
    pub fn constant(value: usize) -> Env {
        Env {
            prefix: Vec::new(),
            default: value,
        }
    }

    pub fn lookup(&self, index: usize) -> usize {
        self.prefix.get(index).copied().unwrap_or(self.default)
    }

    pub fn prefix(&self) -> &[usize] {
        &self.prefix
    }

    pub fn default_value(&self) -> usize {
        self.default
    }

    /// Largest value the assignment can produce over the given indices.
    pub fn max_over(&self, indices: &[usize]) -> usize {
        indices
            .iter()
            .map(|i| self.lookup(*i))
            .max()
            .unwrap_or(self.default)
    }
}

/// Flat big-endian tuple index: `args[0]` is the most significant digit.
pub fn tuple_index(size: usize, args: &[usize]) -> usize {
    let mut idx = 0;
    for a in args {
        idx = idx * size + a;
    }
    idx
}

/// Inverse of [`tuple_index`]: decodes `index` into `arity` digits.
pub fn tuple_of_index(size: usize, arity: usize, index: usize) -> Vec<usize> {
    let mut digits = vec![0; arity];
    let mut rest = index;
    for slot in digits.iter_mut().rev() {
        *slot = rest % size;
        rest /= size;
    }
    digits
}

/// All tuples of the given arity over `0..size`, in table order.
pub fn tuples(size: usize, arity: usize) -> impl Iterator<Item = Vec<usize>> {
    let count = size.checked_pow(arity as u32).unwrap_or(0);
    (0..count).map(move |i| tuple_of_index(size, arity, i))
}

/// A finite model: a domain `0..size` and explicit tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinModel {
    size: usize,
    funs: BTreeMap<String, (usize, Vec<usize>)>,
    rels: BTreeMap<String, (usize, Vec<bool>)>,
}

impl FinModel {
    pub fn new(size: usize) -> Result<FinModel, ModelError> {
        if size == 0 {
            return Err(ModelError::EmptyDomain);
        }
        Ok(FinModel {
            size,
            funs: BTreeMap::new(),
            rels: BTreeMap::new(),
        })
    }

    /// A model interpreting every symbol of `sig` by all-zero tables.
    pub fn canonical(sig: &Signature, size: usize) -> Result<FinModel, ModelError> {
        let mut m = FinModel::new(size)?;
        for (f, a) in sig.functions() {
            let len = size.pow(*a as u32);
            m.set_function(f, *a, vec![0; len])?;
        }
        for (r, a) in sig.relations() {
            let len = size.pow(*a as u32);
            m.set_relation(r, *a, vec![false; len])?;
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn set_function(
        &mut self,
        name: &str,
        arity: usize,
        table: Vec<usize>,
    ) -> Result<(), ModelError> {
        let expected = self.size.pow(arity as u32);
        if table.len() != expected {
            return Err(ModelError::BadTableSize {
                name: name.to_string(),
                expected,
                got: table.len(),
            });
        }
        if let Some(&entry) = table.iter().find(|&&e| e >= self.size) {
            return Err(ModelError::EntryOutOfRange {
                name: name.to_string(),
                entry,
                size: self.size,
            });
        }
        self.funs.insert(name.to_string(), (arity, table));
        Ok(())
    }

    pub fn set_relation(
        &mut self,
        name: &str,
        arity: usize,
        table: Vec<bool>,
    ) -> Result<(), ModelError> {
        let expected = self.size.pow(arity as u32);
        if table.len() != expected {
            return Err(ModelError::BadTableSize {
                name: name.to_string(),
                expected,
                got: table.len(),
            });
        }
        self.rels.insert(name.to_string(), (arity, table));
        Ok(())
    }

    /// Overwrites one table cell of an interpreted function. Internal to
    /// enumeration; callers guarantee the symbol exists and the value is in
    /// range.
    pub(crate) fn set_function_cell(&mut self, name: &str, cell: usize, value: usize) {
        let (_, table) = self.funs.get_mut(name).expect("function interpreted");
        table[cell] = value;
    }

    /// Overwrites one table cell of an interpreted relation.
    pub(crate) fn set_relation_cell(&mut self, name: &str, cell: usize, value: bool) {
        let (_, table) = self.rels.get_mut(name).expect("relation interpreted");
        table[cell] = value;
    }

    pub fn remove_function(&mut self, name: &str) {
        self.funs.remove(name);
    }

    pub fn remove_relation(&mut self, name: &str) {
        self.rels.remove(name);
    }

    pub fn function(&self, name: &str) -> Option<(usize, &[usize])> {
        self.funs.get(name).map(|(a, t)| (*a, t.as_slice()))
    }

    pub fn relation(&self, name: &str) -> Option<(usize, &[bool])> {
        self.rels.get(name).map(|(a, t)| (*a, t.as_slice()))
    }

    pub fn function_names(&self) -> impl Iterator<Item = &str> {
        self.funs.keys().map(|s| s.as_str())
    }

    pub fn relation_names(&self) -> impl Iterator<Item = &str> {
        self.rels.keys().map(|s| s.as_str())
    }

    /// Applies an interpreted function to argument values.
    pub fn apply_function(&self, name: &str, args: &[usize]) -> Result<usize, ModelError> {
        let (arity, table) = self.funs.get(name).ok_or_else(|| ModelError::MissingSymbol {
            name: name.to_string(),
        })?;
        if *arity != args.len() {
            return Err(ModelError::ArityMismatch {
                symbol: name.to_string(),
                expected: *arity,
                got: args.len(),
            });
        }
        Ok(table[tuple_index(self.size, args)])
    }

    /// Reads an interpreted relation at argument values.
    pub fn relation_holds(&self, name: &str, args: &[usize]) -> Result<bool, ModelError> {
        let (arity, table) = self.rels.get(name).ok_or_else(|| ModelError::MissingSymbol {
            name: name.to_string(),
        })?;
        if *arity != args.len() {
            return Err(ModelError::ArityMismatch {
                symbol: name.to_string(),
                expected: *arity,
                got: args.len(),
            });
        }
        Ok(table[tuple_index(self.size, args)])
    }

    pub(crate) fn lookup_var(
        &self,
        env: &Env,
        scope: &[usize],
        n: usize,
    ) -> Result<usize, ModelError> {
        let v = if n < scope.len() {
            scope[scope.len() - 1 - n]
        } else {
            env.lookup(n - scope.len())
        };
        if v >= self.size {
            return Err(ModelError::EnvOutOfRange {
                value: v,
                size: self.size,
            });
        }
        Ok(v)
    }

    pub(crate) fn eval_term_scoped(
        &self,
        env: &Env,
        scope: &[usize],
        t: &Term,
    ) -> Result<usize, ModelError> {
        match t {
            Term::Var(n) => self.lookup_var(env, scope, *n),
            Term::App(f, args) => {
                let vals = args
                    .iter()
                    .map(|a| self.eval_term_scoped(env, scope, a))
                    .collect::<Result<Vec<_>, _>>()?;
                self.apply_function(f, &vals)
            }
        }
    }

    /// Evaluates a term under an environment.
    pub fn eval_term(&self, env: &Env, t: &Term) -> Result<usize, ModelError> {
        self.eval_term_scoped(env, &[], t)
    }

    fn eval_inner(
        &self,
        env: &Env,
        scope: &mut Vec<usize>,
        phi: &Formula,
    ) -> Result<bool, ModelError> {
        match phi {
            Formula::Falsum => Ok(false),
            Formula::Atom(p, args) => {
                let vals = args
                    .iter()
                    .map(|a| self.eval_term_scoped(env, scope, a))
                    .collect::<Result<Vec<_>, _>>()?;
                self.relation_holds(p, &vals)
            }
            Formula::Bin(op, l, r) => match op {
                BinOp::Impl => {
                    if !self.eval_inner(env, scope, l)? {
                        Ok(true)
                    } else {
                        self.eval_inner(env, scope, r)
                    }
                }
                BinOp::And => {
                    if !self.eval_inner(env, scope, l)? {
                        Ok(false)
                    } else {
                        self.eval_inner(env, scope, r)
                    }
                }
                BinOp::Or => {
                    if self.eval_inner(env, scope, l)? {
                        Ok(true)
                    } else {
                        self.eval_inner(env, scope, r)
                    }
                }
            },
            Formula::Quant(q, body) => {
                for a in 0..self.size {
                    scope.push(a);
                    let holds = self.eval_inner(env, scope, body);
                    scope.pop();
                    match (q, holds?) {
                        (Quantifier::All, false) => return Ok(false),
                        (Quantifier::Ex, true) => return Ok(true),
                        _ => {}
                    }
                }
                Ok(matches!(q, Quantifier::All))
            }
        }
    }

    /// Evaluates a formula under an environment. Quantifiers range over the
    /// whole domain; connectives short-circuit left to right.
    pub fn eval(&self, env: &Env, phi: &Formula) -> Result<bool, ModelError> {
        self.eval_inner(env, &mut Vec::new(), phi)
    }

    /// Table-level equality on the listed symbols. Models of different sizes
    /// are never equal.
    pub fn ext_equal(
        &self,
        other: &FinModel,
        funs: &[String],
        rels: &[String],
    ) -> Result<bool, ModelError> {
        if self.size != other.size {
            return Ok(false);
        }
        for f in funs {
            let a = self.function(f).ok_or_else(|| ModelError::MissingSymbol {
                name: f.clone(),
            })?;
            let b = other.function(f).ok_or_else(|| ModelError::MissingSymbol {
                name: f.clone(),
            })?;
            if a != b {
                return Ok(false);
            }
        }
        for r in rels {
            let a = self.relation(r).ok_or_else(|| ModelError::MissingSymbol {
                name: r.clone(),
            })?;
            let b = other.relation(r).ok_or_else(|| ModelError::MissingSymbol {
                name: r.clone(),
            })?;
            if a != b {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
