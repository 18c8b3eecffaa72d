//! Structural passes: symbol compaction, arity adjustment, relation
//! merging, constant and closure elimination.

use super::{
    copy_function, copy_relation, env_entry_checked, fresh_name, map_atoms, PassError,
    ReductionStep,
};
use crate::logic::{Formula, Signature, Term};
use crate::semantics::{tuples, Env, FinModel, ModelError};
use std::collections::BTreeMap;

/// Renames the symbols occurring in the formula to a canonical dense family
/// `f0, f1, ...` and `P0, P1, ...`; unused symbols are dropped from the
/// signature.
pub fn compact_symbols(phi: &Formula, sig: &Signature) -> Result<ReductionStep, PassError> {
    sig.validate_formula(phi)?;
    let (funs, rels) = phi.symbols();
    let fun_map: BTreeMap<String, String> = funs
        .iter()
        .enumerate()
        .map(|(i, f)| (f.clone(), format!("f{i}")))
        .collect();
    let rel_map: BTreeMap<String, String> = rels
        .iter()
        .enumerate()
        .map(|(i, r)| (r.clone(), format!("P{i}")))
        .collect();
    let mut target = Signature::new();
    for f in &funs {
        target.add_function(&fun_map[f], sig.function_arity(f).expect("validated"))?;
    }
    for r in &rels {
        target.add_relation(&rel_map[r], sig.relation_arity(r).expect("validated"))?;
    }

    fn rename_term(t: &Term, fun_map: &BTreeMap<String, String>) -> Term {
        match t {
            Term::Var(v) => Term::var(*v),
            Term::App(f, args) => Term::app(
                fun_map[f].clone(),
                args.iter().map(|a| rename_term(a, fun_map)).collect(),
            ),
        }
    }
    let formula = map_atoms(phi, &mut |r, args, _| {
        Formula::atom(
            rel_map[r].clone(),
            args.iter().map(|t| rename_term(t, &fun_map)).collect(),
        )
    });

    let fmap = fun_map.clone();
    let rmap = rel_map.clone();
    let forward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
        let mut out = FinModel::new(m.size())?;
        for (old, new) in &fmap {
            let (a, table) = m.function(old).ok_or(ModelError::MissingSymbol {
                name: old.clone(),
            })?;
            out.set_function(new, a, table.to_vec())?;
        }
        for (old, new) in &rmap {
            let (a, table) = m.relation(old).ok_or(ModelError::MissingSymbol {
                name: old.clone(),
            })?;
            out.set_relation(new, a, table.to_vec())?;
        }
        Ok((out, e.clone()))
    });

    let ssig = sig.clone();
    let backward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
        let mut out = FinModel::canonical(&ssig, m.size())?;
        for (old, new) in &fun_map {
            let (a, table) = m.function(new).ok_or(ModelError::MissingSymbol {
                name: new.clone(),
            })?;
            out.set_function(old, a, table.to_vec())?;
        }
        for (old, new) in &rel_map {
            let (a, table) = m.relation(new).ok_or(ModelError::MissingSymbol {
                name: new.clone(),
            })?;
            out.set_relation(old, a, table.to_vec())?;
        }
        Ok((out, e.clone()))
    });

    Ok(ReductionStep {
        name: "compact_symbols",
        source_sig: sig.clone(),
        target_sig: target,
        source_eq: None,
        target_eq: None,
        reserved_free: Vec::new(),
        formula,
        forward,
        backward,
    })
}

/// Pads every relation to arity exactly `n`. Atoms of positive arity repeat
/// their last argument; nullary atoms use a designated fresh free variable,
/// kept pointing at the same value under binders.
pub fn uniformize_arity(
    phi: &Formula,
    sig: &Signature,
    n: usize,
) -> Result<ReductionStep, PassError> {
    sig.validate_formula(phi)?;
    for (r, a) in sig.relations() {
        if *a > n {
            return Err(PassError::ArityAboveBound {
                name: r.clone(),
                arity: *a,
                bound: n,
            });
        }
    }
    let x0 = phi.fresh_free();
    let (_, used_rels) = phi.symbols();
    let pads_nullary = n > 0 && used_rels.iter().any(|r| sig.relation_arity(r) == Some(0));

    let mut target = Signature::new();
    for (f, a) in sig.functions() {
        target.add_function(f, *a)?;
    }
    for (r, _) in sig.relations() {
        target.add_relation(r, n)?;
    }
    let formula = map_atoms(phi, &mut |r, args, depth| {
        if args.is_empty() {
            Formula::atom(r, vec![Term::var(x0 + depth); n])
        } else {
            let mut new_args = args.to_vec();
            let last = new_args.last().expect("nonempty").clone();
            while new_args.len() < n {
                new_args.push(last.clone());
            }
            Formula::atom(r, new_args)
        }
    });

    let funs: Vec<String> = sig.functions().iter().map(|(f, _)| f.clone()).collect();
    let rels: Vec<(String, usize)> = sig.relations().to_vec();
    let funs_b = funs.clone();
    let rels_b = rels.clone();
    let forward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
        let k = m.size();
        let mut out = FinModel::new(k)?;
        for f in &funs {
            if m.function(f).is_some() {
                copy_function(&mut out, m, f)?;
            }
        }
        for (r, a) in &rels {
            if m.relation(r).is_none() {
                continue;
            }
            let mut table = vec![false; k.pow(n as u32)];
            for (i, w) in tuples(k, n).enumerate() {
                table[i] = m.relation_holds(r, &w[..*a])?;
            }
            out.set_relation(r, n, table)?;
        }
        Ok((out, e.clone()))
    });

    let ssig = sig.clone();
    let backward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
        let k = m.size();
        let mut out = FinModel::canonical(&ssig, k)?;
        for f in &funs_b {
            if m.function(f).is_some() {
                copy_function(&mut out, m, f)?;
            }
        }
        for (r, a) in &rels_b {
            if m.relation(r).is_none() {
                continue;
            }
            let mut table = vec![false; k.pow(*a as u32)];
            for (i, v) in tuples(k, *a).enumerate() {
                let w: Vec<usize> = if *a == 0 {
                    vec![env_entry_checked(e, x0, k)?; n]
                } else {
                    let mut w = v.clone();
                    let last = *w.last().expect("nonempty");
                    while w.len() < n {
                        w.push(last);
                    }
                    w
                };
                table[i] = m.relation_holds(r, &w)?;
            }
            out.set_relation(r, *a, table)?;
        }
        Ok((out, e.clone()))
    });

    Ok(ReductionStep {
        name: "uniformize_arity",
        source_sig: sig.clone(),
        target_sig: target,
        source_eq: None,
        target_eq: None,
        reserved_free: if pads_nullary { vec![x0] } else { Vec::new() },
        formula,
        forward,
        backward,
    })
}

/// Folds all relations of uniform arity `n` into a single relation of arity
/// `n + 1` whose first argument is a per-relation constant tag.
pub fn merge_relations(phi: &Formula, sig: &Signature) -> Result<ReductionStep, PassError> {
    sig.validate_formula(phi)?;
    if let Some((f, _)) = sig.functions().first() {
        return Err(PassError::UnexpectedFunction { name: f.clone() });
    }
    let rels = sig.relations().to_vec();
    let Some((_, first_arity)) = rels.first() else {
        return Err(PassError::NothingToMerge);
    };
    let n = *first_arity;
    for (r, a) in &rels {
        if *a != n {
            return Err(PassError::NonUniformArity {
                name: r.clone(),
                arity: *a,
                expected: n,
            });
        }
    }

    let mut taken = super::sig_names(sig);
    let consts: Vec<String> = rels
        .iter()
        .map(|(r, _)| fresh_name(&format!("c_{r}"), &mut taken))
        .collect();
    let q = fresh_name("Q", &mut taken);
    let mut target = Signature::new();
    for c in &consts {
        target.add_function(c, 0)?;
    }
    target.add_relation(&q, n + 1)?;

    let index: BTreeMap<String, usize> = rels
        .iter()
        .enumerate()
        .map(|(i, (r, _))| (r.clone(), i))
        .collect();
    let q_t = q.clone();
    let consts_t = consts.clone();
    let formula = map_atoms(phi, &mut |r, args, _| {
        let mut new_args = vec![Term::cnst(consts_t[index[r]].clone())];
        new_args.extend(args.iter().cloned());
        Formula::atom(q_t.clone(), new_args)
    });

    let tag_count = rels.len();
    let rels_f = rels.clone();
    let consts_f = consts.clone();
    let q_f = q.clone();
    let forward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
        let k = m.size();
        let k2 = k + tag_count;
        let mut out = FinModel::new(k2)?;
        for (i, c) in consts_f.iter().enumerate() {
            out.set_function(c, 0, vec![k + i])?;
        }
        let mut table = vec![false; k2.pow((n + 1) as u32)];
        for (idx, w) in tuples(k2, n + 1).enumerate() {
            let tag = w[0];
            if tag < k {
                continue;
            }
            let (rname, _) = &rels_f[tag - k];
            // The retraction sends tag elements to element 0.
            let args: Vec<usize> = w[1..].iter().map(|&v| if v < k { v } else { 0 }).collect();
            table[idx] = m.relation_holds(rname, &args)?;
        }
        out.set_relation(&q_f, n + 1, table)?;
        Ok((out, e.clone()))
    });

    let backward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
        let k = m.size();
        let mut out = FinModel::new(k)?;
        for (i, (rname, a)) in rels.iter().enumerate() {
            let cp = m.apply_function(&consts[i], &[])?;
            let mut table = vec![false; k.pow(*a as u32)];
            for (idx, v) in tuples(k, *a).enumerate() {
                let mut args = vec![cp];
                args.extend(v.iter().copied());
                table[idx] = m.relation_holds(&q, &args)?;
            }
            out.set_relation(rname, *a, table)?;
        }
        Ok((out, e.clone()))
    });

    Ok(ReductionStep {
        name: "merge_relations",
        source_sig: sig.clone(),
        target_sig: target,
        source_eq: None,
        target_eq: None,
        reserved_free: Vec::new(),
        formula,
        forward,
        backward,
    })
}

/// Replaces every constant occurring in the formula by a fresh free
/// variable above all existing free variables.
pub fn remove_constants(phi: &Formula, sig: &Signature) -> Result<ReductionStep, PassError> {
    sig.validate_formula(phi)?;
    for (f, a) in sig.functions() {
        if *a != 0 {
            return Err(PassError::ArityAboveBound {
                name: f.clone(),
                arity: *a,
                bound: 0,
            });
        }
    }
    let (used_consts, _) = phi.symbols();
    let base = phi.fresh_free();
    let index: BTreeMap<String, usize> = used_consts
        .iter()
        .enumerate()
        .map(|(i, c)| (c.clone(), i))
        .collect();
    let mut target = Signature::new();
    for (r, a) in sig.relations() {
        target.add_relation(r, *a)?;
    }
    let formula = map_atoms(phi, &mut |r, args, depth| {
        let new_args = args
            .iter()
            .map(|t| match t {
                Term::Var(v) => Term::var(*v),
                Term::App(c, _) => Term::var(base + index[c] + depth),
            })
            .collect();
        Formula::atom(r, new_args)
    });

    let rel_names: Vec<String> = sig.relations().iter().map(|(r, _)| r.clone()).collect();
    let rel_names_b = rel_names.clone();
    let consts = used_consts.clone();
    let forward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
        let mut out = FinModel::new(m.size())?;
        for r in &rel_names {
            if m.relation(r).is_some() {
                copy_relation(&mut out, m, r)?;
            }
        }
        let mut prefix: Vec<usize> = (0..base).map(|i| e.lookup(i)).collect();
        for c in &used_consts {
            prefix.push(m.apply_function(c, &[])?);
        }
        Ok((out, Env::new(prefix, e.default_value())))
    });

    let ssig = sig.clone();
    let backward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
        let k = m.size();
        let mut out = FinModel::canonical(&ssig, k)?;
        for r in &rel_names_b {
            if m.relation(r).is_some() {
                copy_relation(&mut out, m, r)?;
            }
        }
        for (i, c) in consts.iter().enumerate() {
            let v = env_entry_checked(e, base + i, k)?;
            out.set_function(c, 0, vec![v])?;
        }
        Ok((out, e.clone()))
    });

    let reserved: Vec<usize> = (base..base + index.len()).collect();
    Ok(ReductionStep {
        name: "remove_constants",
        source_sig: sig.clone(),
        target_sig: target,
        source_eq: None,
        target_eq: None,
        reserved_free: reserved,
        formula,
        forward,
        backward,
    })
}

/// Raises every arity-0 symbol to arity 1, filling the new argument with a
/// designated fresh free variable.
pub fn lift_arity0_to1(phi: &Formula, sig: &Signature) -> Result<ReductionStep, PassError> {
    sig.validate_formula(phi)?;
    for (name, a) in sig.functions().iter().chain(sig.relations().iter()) {
        if *a > 1 {
            return Err(PassError::ArityAboveBound {
                name: name.clone(),
                arity: *a,
                bound: 1,
            });
        }
    }
    let x0 = phi.fresh_free();
    let (used_f, used_r) = phi.symbols();
    let uses_nullary = used_f.iter().any(|f| sig.function_arity(f) == Some(0))
        || used_r.iter().any(|r| sig.relation_arity(r) == Some(0));

    let mut target = Signature::new();
    for (f, _) in sig.functions() {
        target.add_function(f, 1)?;
    }
    for (r, _) in sig.relations() {
        target.add_relation(r, 1)?;
    }

    fn lift_term(t: &Term, x0: usize, depth: usize) -> Term {
        match t {
            Term::Var(v) => Term::var(*v),
            Term::App(f, args) if args.is_empty() => {
                Term::app(f.clone(), vec![Term::var(x0 + depth)])
            }
            Term::App(f, args) => Term::app(f.clone(), vec![lift_term(&args[0], x0, depth)]),
        }
    }
    let formula = map_atoms(phi, &mut |r, args, depth| {
        if args.is_empty() {
            Formula::atom(r, vec![Term::var(x0 + depth)])
        } else {
            Formula::atom(r, args.iter().map(|t| lift_term(t, x0, depth)).collect())
        }
    });

    let funs: Vec<(String, usize)> = sig.functions().to_vec();
    let rels: Vec<(String, usize)> = sig.relations().to_vec();
    let funs_b = funs.clone();
    let rels_b = rels.clone();
    let forward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
        let k = m.size();
        let mut out = FinModel::new(k)?;
        for (f, a) in &funs {
            if m.function(f).is_none() {
                continue;
            }
            if *a == 0 {
                let v = m.apply_function(f, &[])?;
                out.set_function(f, 1, vec![v; k])?;
            } else {
                copy_function(&mut out, m, f)?;
            }
        }
        for (r, a) in &rels {
            if m.relation(r).is_none() {
                continue;
            }
            if *a == 0 {
                let b = m.relation_holds(r, &[])?;
                out.set_relation(r, 1, vec![b; k])?;
            } else {
                copy_relation(&mut out, m, r)?;
            }
        }
        Ok((out, e.clone()))
    });

    let ssig = sig.clone();
    let backward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
        let k = m.size();
        let fill = env_entry_checked(e, x0, k)?;
        let mut out = FinModel::canonical(&ssig, k)?;
        for (f, a) in &funs_b {
            if m.function(f).is_none() {
                continue;
            }
            if *a == 0 {
                let v = m.apply_function(f, &[fill])?;
                out.set_function(f, 0, vec![v])?;
            } else {
                copy_function(&mut out, m, f)?;
            }
        }
        for (r, a) in &rels_b {
            if m.relation(r).is_none() {
                continue;
            }
            if *a == 0 {
                let b = m.relation_holds(r, &[fill])?;
                out.set_relation(r, 0, vec![b])?;
            } else {
                copy_relation(&mut out, m, r)?;
            }
        }
        Ok((out, e.clone()))
    });

    Ok(ReductionStep {
        name: "lift_arity0_to1",
        source_sig: sig.clone(),
        target_sig: target,
        source_eq: None,
        target_eq: None,
        reserved_free: if uses_nullary { vec![x0] } else { Vec::new() },
        formula,
        forward,
        backward,
    })
}

/// Strips function symbols from a signature whose relations are all
/// nullary; no term can occur in such formulas.
pub fn propositional_collapse(phi: &Formula, sig: &Signature) -> Result<ReductionStep, PassError> {
    sig.validate_formula(phi)?;
    for (r, a) in sig.relations() {
        if *a != 0 {
            return Err(PassError::UnexpectedRelation {
                name: r.clone(),
                arity: *a,
            });
        }
    }
    let mut target = Signature::new();
    for (r, _) in sig.relations() {
        target.add_relation(r, 0)?;
    }
    let rel_names: Vec<String> = sig.relations().iter().map(|(r, _)| r.clone()).collect();
    let rel_names_b = rel_names.clone();
    let forward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
        let mut out = FinModel::new(m.size())?;
        for r in &rel_names {
            if m.relation(r).is_some() {
                copy_relation(&mut out, m, r)?;
            }
        }
        Ok((out, e.clone()))
    });
    let ssig = sig.clone();
    let backward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
        let mut out = FinModel::canonical(&ssig, m.size())?;
        for r in &rel_names_b {
            if m.relation(r).is_some() {
                copy_relation(&mut out, m, r)?;
            }
        }
        Ok((out, e.clone()))
    });

    Ok(ReductionStep {
        name: "propositional_collapse",
        source_sig: sig.clone(),
        target_sig: target,
        source_eq: None,
        target_eq: None,
        reserved_free: Vec::new(),
        formula: phi.clone(),
        forward,
        backward,
    })
}

/// Prefixes the formula with one existential per free variable, producing a
/// closed formula.
pub fn close_formula(phi: &Formula, sig: &Signature) -> Result<ReductionStep, PassError> {
    sig.validate_formula(phi)?;
    let n = phi.fresh_free();
    let mut formula = phi.clone();
    for _ in 0..n {
        formula = Formula::exists(formula);
    }
    let forward: super::Transport = Box::new(move |m: &FinModel, e: &Env| Ok((m.clone(), e.clone())));
    let phi_b = phi.clone();
    let backward: super::Transport = Box::new(move |m: &FinModel, _e: &Env| {
        let k = m.size();
        let total = (k as u128)
            .checked_pow(n as u32)
            .unwrap_or(u128::MAX);
        if total > 10_000_000 {
            return Err(PassError::WitnessScanTooLarge { candidates: total });
        }
        for prefix in tuples(k, n) {
            let env = Env::new(prefix, 0);
            if m.eval(&env, &phi_b)? {
                return Ok((m.clone(), env));
            }
        }
        Err(PassError::NoClosureWitness)
    });

    Ok(ReductionStep {
        name: "close_formula",
        source_sig: sig.clone(),
        target_sig: sig.clone(),
        source_eq: None,
        target_eq: None,
        reserved_free: Vec::new(),
        formula,
        forward,
        backward,
    })
}
