//! Shared generators and oracles for the integration suites.

#![allow(dead_code)]

use finsat::logic::{BinOp, Formula, Quantifier, Signature, Term};
use finsat::semantics::{Env, FinModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random term over the signature's functions; `scope` is the number of
/// variable indices in scope (bound plus free).
pub fn random_term(rng: &mut ChaCha8Rng, sig: &Signature, scope: usize, depth: usize) -> Term {
    let funs = sig.functions();
    if depth == 0 || funs.is_empty() || rng.random_bool(0.5) {
        return Term::var(rng.random_range(0..scope.max(1)));
    }
    let (name, arity) = &funs[rng.random_range(0..funs.len())];
    let args = (0..*arity)
        .map(|_| random_term(rng, sig, scope, depth - 1))
        .collect();
    Term::app(name, args)
}

fn random_atom(rng: &mut ChaCha8Rng, sig: &Signature, scope: usize) -> Formula {
    let rels = sig.relations();
    if rels.is_empty() {
        return Formula::Falsum;
    }
    let (name, arity) = &rels[rng.random_range(0..rels.len())];
    let args = (0..*arity)
        .map(|_| random_term(rng, sig, scope, 2))
        .collect();
    Formula::atom(name, args)
}

/// Random formula of tree depth at most `depth`. `free` fixes how many
/// free variable slots are in scope at the top level.
pub fn random_formula(rng: &mut ChaCha8Rng, sig: &Signature, free: usize, depth: usize) -> Formula {
    random_formula_at(rng, sig, free, depth)
}

fn random_formula_at(rng: &mut ChaCha8Rng, sig: &Signature, scope: usize, depth: usize) -> Formula {
    if depth == 0 {
        return if rng.random_bool(0.1) {
            Formula::Falsum
        } else {
            random_atom(rng, sig, scope)
        };
    }
    match rng.random_range(0..10) {
        0 => Formula::Falsum,
        1..=3 => random_atom(rng, sig, scope),
        4..=6 => {
            let op = match rng.random_range(0..3) {
                0 => BinOp::And,
                1 => BinOp::Or,
                _ => BinOp::Impl,
            };
            Formula::bin(
                op,
                random_formula_at(rng, sig, scope, depth - 1),
                random_formula_at(rng, sig, scope, depth - 1),
            )
        }
        _ => {
            let body = random_formula_at(rng, sig, scope + 1, depth - 1);
            if rng.random_bool(0.5) {
                Formula::forall(body)
            } else {
                Formula::exists(body)
            }
        }
    }
}

pub fn random_model(rng: &mut ChaCha8Rng, sig: &Signature, k: usize) -> FinModel {
    let mut m = FinModel::new(k).expect("positive size");
    for (name, arity) in sig.functions() {
        let table = (0..k.pow(*arity as u32)).map(|_| rng.random_range(0..k)).collect();
        m.set_function(name, *arity, table).expect("table shape");
    }
    for (name, arity) in sig.relations() {
        let table = (0..k.pow(*arity as u32)).map(|_| rng.random()).collect();
        m.set_relation(name, *arity, table).expect("table shape");
    }
    m
}

pub fn random_env(rng: &mut ChaCha8Rng, width: usize, k: usize) -> Env {
    let prefix = (0..width).map(|_| rng.random_range(0..k)).collect();
    Env::new(prefix, 0)
}

/// All models of the signature at domain size `k`, by odometer over every
/// table cell. The count is exponential; keep signatures and k tiny.
pub fn all_models(sig: &Signature, k: usize) -> Vec<FinModel> {
    let mut cells: Vec<(bool, String, usize)> = Vec::new();
    for (name, arity) in sig.functions() {
        cells.push((true, name.clone(), k.pow(*arity as u32)));
    }
    for (name, arity) in sig.relations() {
        cells.push((false, name.clone(), k.pow(*arity as u32)));
    }
    let mut digits: Vec<usize> = Vec::new();
    let mut radix: Vec<usize> = Vec::new();
    for (is_fun, _, len) in &cells {
        for _ in 0..*len {
            digits.push(0);
            radix.push(if *is_fun { k } else { 2 });
        }
    }
    let mut out = Vec::new();
    loop {
        let mut m = FinModel::new(k).expect("positive size");
        let mut at = 0;
        for (is_fun, name, len) in &cells {
            let slice = &digits[at..at + len];
            at += len;
            if *is_fun {
                let arity = sig.function_arity(name).unwrap();
                m.set_function(name, arity, slice.to_vec()).unwrap();
            } else {
                let arity = sig.relation_arity(name).unwrap();
                m.set_relation(name, arity, slice.iter().map(|d| *d == 1).collect())
                    .unwrap();
            }
        }
        out.push(m);
        let mut i = 0;
        loop {
            if i == digits.len() {
                return out;
            }
            digits[i] += 1;
            if digits[i] < radix[i] {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// Expands every quantifier syntactically into a conjunction or
/// disjunction over the domain. Bound occurrences become fresh free
/// variables `width + e` reserved for element `e`, so the result is
/// quantifier-free and can be evaluated under [`ground_env`].
pub fn expand_ground(phi: &Formula, k: usize, width: usize) -> Formula {
    fn term(t: &Term, binders: &[usize], width: usize) -> Term {
        match t {
            Term::Var(n) => {
                if *n < binders.len() {
                    Term::var(binders[*n])
                } else {
                    Term::var(n - binders.len())
                }
            }
            Term::App(f, args) => {
                Term::app(f, args.iter().map(|a| term(a, binders, width)).collect())
            }
        }
    }
    fn go(phi: &Formula, k: usize, width: usize, binders: &[usize]) -> Formula {
        match phi {
            Formula::Falsum => Formula::Falsum,
            Formula::Atom(r, args) => {
                Formula::atom(r, args.iter().map(|a| term(a, binders, width)).collect())
            }
            Formula::Bin(op, lhs, rhs) => Formula::bin(
                *op,
                go(lhs, k, width, binders),
                go(rhs, k, width, binders),
            ),
            Formula::Quant(q, body) => {
                let parts: Vec<Formula> = (0..k)
                    .map(|e| {
                        let mut inner = vec![width + e];
                        inner.extend_from_slice(binders);
                        go(body, k, width, &inner)
                    })
                    .collect();
                match q {
                    Quantifier::All => Formula::conj(parts),
                    Quantifier::Ex => Formula::disj(parts),
                }
            }
        }
    }
    go(phi, k, width, &[])
}

/// Environment for the output of [`expand_ground`]: original free slots
/// first, then one slot per domain element.
pub fn ground_env(env: &Env, k: usize, width: usize) -> Env {
    let mut prefix: Vec<usize> = (0..width).map(|i| env.lookup(i)).collect();
    prefix.extend(0..k);
    Env::new(prefix, env.default_value())
}
