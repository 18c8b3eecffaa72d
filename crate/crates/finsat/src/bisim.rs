//! Indistinguishability of model elements and model minimization.
//!
//! Two elements are indistinguishable when no formula over a chosen symbol
//! list separates them. On a finite model this relation is the fixpoint of
//! a refinement operator that starts from the full relation and repeatedly
//! removes pairs some function image or relation read tells apart.

use crate::logic::Formula;
use crate::semantics::{Env, FinModel, ModelError};
use crate::toolkit::finite_quotient;

/// A binary relation on `0..size` as a bit matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairRelation {
    size: usize,
    bits: Vec<bool>,
}

impl PairRelation {
    pub fn full(size: usize) -> PairRelation {
        PairRelation {
            size,
            bits: vec![true; size * size],
        }
    }

    pub fn identity(size: usize) -> PairRelation {
        PairRelation {
            size,
            bits: (0..size * size).map(|i| i / size == i % size).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn holds(&self, x: usize, y: usize) -> bool {
        self.bits[x * self.size + y]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[x * self.size + y] = value;
    }

    pub fn pair_count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_equivalence(&self) -> bool {
        let k = self.size;
        (0..k).all(|x| self.holds(x, x))
            && (0..k).all(|x| (0..k).all(|y| self.holds(x, y) == self.holds(y, x)))
            && (0..k).all(|x| {
                (0..k).all(|y| {
                    (0..k).all(|z| !(self.holds(x, y) && self.holds(y, z)) || self.holds(x, z))
                })
            })
    }
}

/// One refinement step. A pair `(x, y)` survives iff every function in
/// `funs` maps tuples differing only in `x` versus `y` at one position to
/// related values, and every relation in `rels` cannot tell such tuples
/// apart.
pub fn apply_f(
    m: &FinModel,
    funs: &[String],
    rels: &[String],
    r: &PairRelation,
) -> Result<PairRelation, ModelError> {
    let k = m.size();
    let mut out = PairRelation::full(k);
    for x in 0..k {
        for y in 0..k {
            if !survives(m, funs, rels, r, x, y)? {
                out.set(x, y, false);
            }
        }
    }
    Ok(out)
}

fn survives(
    m: &FinModel,
    funs: &[String],
    rels: &[String],
    r: &PairRelation,
    x: usize,
    y: usize,
) -> Result<bool, ModelError> {
    let k = m.size();
    for f in funs {
        let (arity, _) = m.function(f).ok_or_else(|| ModelError::MissingSymbol {
            name: f.clone(),
        })?;
        for mut v in crate::semantics::tuples(k, arity) {
            for i in 0..arity {
                let saved = v[i];
                v[i] = x;
                let fx = m.apply_function(f, &v)?;
                v[i] = y;
                let fy = m.apply_function(f, &v)?;
                v[i] = saved;
                if !r.holds(fx, fy) {
                    return Ok(false);
                }
            }
        }
    }
    for p in rels {
        let (arity, _) = m.relation(p).ok_or_else(|| ModelError::MissingSymbol {
            name: p.clone(),
        })?;
        for mut v in crate::semantics::tuples(k, arity) {
            for i in 0..arity {
                let saved = v[i];
                v[i] = x;
                let px = m.relation_holds(p, &v)?;
                v[i] = y;
                let py = m.relation_holds(p, &v)?;
                v[i] = saved;
                if px != py {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Greatest fixpoint of the refinement operator, reached from the full
/// relation. Each strict step removes at least one pair, so at most
/// `size^2 + 1` iterations run. The result is an equivalence and a
/// congruence for the listed symbols.
pub fn indist_fixpoint(
    m: &FinModel,
    funs: &[String],
    rels: &[String],
) -> Result<PairRelation, ModelError> {
    let k = m.size();
    let mut r = PairRelation::full(k);
    for _ in 0..k * k + 1 {
        let next = apply_f(m, funs, rels, &r)?;
        if next == r {
            return Ok(r);
        }
        r = next;
    }
    Ok(r)
}

/// Quotients a model and environment by indistinguishability over the
/// symbols of `phi`. Satisfaction of every formula over those symbols is
/// preserved; the returned size never exceeds the input size.
pub fn minimize_model(
    m: &FinModel,
    env: &Env,
    phi: &Formula,
) -> Result<(FinModel, Env), ModelError> {
    let (funs, rels) = phi.symbols();
    let r = indist_fixpoint(m, &funs, &rels)?;
    let k = m.size();
    let elements: Vec<usize> = (0..k).collect();
    let q = finite_quotient(&elements, |a, b| r.holds(*a, *b));
    let n = q.class_count();
    let class_of = |v: usize| q.class_of(&v).expect("domain element has a class");

    let mut out = FinModel::new(n)?;
    // Tables are re-read through class representatives; this is
    // well-defined for the congruence symbols and deterministic for the
    // rest.
    let fun_names: Vec<String> = m.function_names().map(String::from).collect();
    for f in &fun_names {
        let (arity, _) = m.function(f).expect("listed function");
        let mut table = Vec::with_capacity(n.pow(arity as u32));
        for c in crate::semantics::tuples(n, arity) {
            let reps: Vec<usize> = c.iter().map(|ci| *q.repr(*ci)).collect();
            table.push(class_of(m.apply_function(f, &reps)?));
        }
        out.set_function(f, arity, table)?;
    }
    let rel_names: Vec<String> = m.relation_names().map(String::from).collect();
    for p in &rel_names {
        let (arity, _) = m.relation(p).expect("listed relation");
        let mut table = Vec::with_capacity(n.pow(arity as u32));
        for c in crate::semantics::tuples(n, arity) {
            let reps: Vec<usize> = c.iter().map(|ci| *q.repr(*ci)).collect();
            table.push(m.relation_holds(p, &reps)?);
        }
        out.set_relation(p, arity, table)?;
    }

    let prefix = env.prefix().iter().map(|v| class_of(*v)).collect();
    let new_env = Env::new(prefix, class_of(env.default_value()));
    Ok((out, new_env))
}
