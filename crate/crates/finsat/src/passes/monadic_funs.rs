//! Eliminates unary functions from a monadic signature by introducing one
//! predicate per relation and function word: `q_{w,P}(x)` abbreviates
//! `P(f_w(x))`, and a skolemized axiom block ties neighbouring words
//! together so models can be decoded without the functions.

use super::{copy_relation, fresh_name, map_atoms, sig_names, PassError, ReductionStep};
use crate::logic::{Formula, Signature, Term};
use crate::semantics::{Env, FinModel, ModelError};
use std::collections::BTreeMap;

/// Reduces a formula over unary functions and unary relations to a
/// function-free monadic formula. Words are applied innermost first:
/// `q_{[g, f], P}(x)` stands for `P(f(g(x)))`.
pub fn remove_monadic_functions(
    phi: &Formula,
    sig: &Signature,
) -> Result<ReductionStep, PassError> {
    sig.validate_formula(phi)?;
    for (name, a) in sig.functions().iter().chain(sig.relations().iter()) {
        if *a != 1 {
            return Err(PassError::NonUniformArity {
                name: name.clone(),
                arity: *a,
                expected: 1,
            });
        }
    }
    let funs: Vec<String> = sig.functions().iter().map(|(f, _)| f.clone()).collect();
    let rels: Vec<String> = sig.relations().iter().map(|(r, _)| r.clone()).collect();
    let nf = funs.len();

    let chain = max_chain_depth(phi);
    // Words of function indices up to the longest chain, shortest first,
    // lexicographic within a length.
    let mut words: Vec<Vec<usize>> = vec![Vec::new()];
    let mut level: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..chain {
        let mut next = Vec::new();
        for fi in 0..nf {
            for w in &level {
                let mut nw = vec![fi];
                nw.extend(w.iter().copied());
                next.push(nw);
            }
        }
        words.extend(next.iter().cloned());
        level = next;
    }
    let windex: BTreeMap<Vec<usize>, usize> = words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i))
        .collect();

    let mut taken = sig_names(sig);
    let q_names: Vec<Vec<String>> = rels
        .iter()
        .map(|r| {
            words
                .iter()
                .map(|w| {
                    let base = if w.is_empty() {
                        format!("q_{r}")
                    } else {
                        let tail: Vec<&str> = w.iter().map(|&fi| funs[fi].as_str()).collect();
                        format!("q_{r}_{}", tail.join("_"))
                    };
                    fresh_name(&base, &mut taken)
                })
                .collect()
        })
        .collect();

    let mut target = Signature::new();
    for r in &rels {
        target.add_relation(r, 1)?;
    }
    for per_rel in &q_names {
        for q in per_rel {
            target.add_relation(q, 1)?;
        }
    }

    let rindex: BTreeMap<String, usize> = rels
        .iter()
        .enumerate()
        .map(|(i, r)| (r.clone(), i))
        .collect();
    let recoded = map_atoms(phi, &mut |r, args, _| {
        let mut syms = Vec::new();
        let mut cur = &args[0];
        while let Term::App(f, fargs) = cur {
            syms.push(funs.iter().position(|g| g == f).expect("validated"));
            cur = &fargs[0];
        }
        let Term::Var(v) = cur else { unreachable!("chain ends in a variable") };
        syms.reverse();
        if syms.is_empty() {
            Formula::atom(r, vec![Term::var(*v)])
        } else {
            Formula::atom(&q_names[rindex[r]][windex[&syms]], vec![Term::var(*v)])
        }
    });

    // forall x exists y_0 .. y_{nf-1}: the base predicates mirror the
    // relations and each y_i behaves as f_i(x) on every short word.
    let mut eqs = Vec::new();
    for (ri, r) in rels.iter().enumerate() {
        eqs.push(Formula::iff(
            Formula::atom(&q_names[ri][0], vec![Term::var(nf)]),
            Formula::atom(r, vec![Term::var(nf)]),
        ));
        for fi in 0..nf {
            for (wi, w) in words.iter().enumerate() {
                if w.len() >= chain {
                    continue;
                }
                let mut fw = vec![fi];
                fw.extend(w.iter().copied());
                eqs.push(Formula::iff(
                    Formula::atom(&q_names[ri][windex[&fw]], vec![Term::var(nf)]),
                    Formula::atom(&q_names[ri][wi], vec![Term::var(nf - 1 - fi)]),
                ));
            }
        }
    }
    let mut axiom = Formula::conj(eqs);
    for _ in 0..nf {
        axiom = Formula::exists(axiom);
    }
    axiom = Formula::forall(axiom);
    let formula = Formula::conj(vec![recoded, axiom]);

    // Pairs (extended word, word) a decoded image must agree on.
    let mut succ: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nf];
    for (wi, w) in words.iter().enumerate() {
        if w.len() >= chain {
            continue;
        }
        for (fi, pairs) in succ.iter_mut().enumerate() {
            let mut fw = vec![fi];
            fw.extend(w.iter().copied());
            pairs.push((windex[&fw], wi));
        }
    }

    let funs_f = funs.clone();
    let rels_f = rels.clone();
    let words_f = words.clone();
    let q_names_f = q_names.clone();
    let forward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
        let k = m.size();
        let mut out = FinModel::new(k)?;
        for r in &rels_f {
            copy_relation(&mut out, m, r)?;
        }
        for (ri, r) in rels_f.iter().enumerate() {
            for (wi, w) in words_f.iter().enumerate() {
                let mut table = vec![false; k];
                for (x, slot) in table.iter_mut().enumerate() {
                    let mut v = x;
                    for &fi in w {
                        v = m.apply_function(&funs_f[fi], &[v])?;
                    }
                    *slot = m.relation_holds(r, &[v])?;
                }
                out.set_relation(&q_names_f[ri][wi], 1, table)?;
            }
        }
        Ok((out, e.clone()))
    });

    let backward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
        let k = m.size();
        let mut out = FinModel::new(k)?;
        let mut q_tables: Vec<Vec<&[bool]>> = Vec::with_capacity(rels.len());
        for per_rel in &q_names {
            let mut row = Vec::with_capacity(per_rel.len());
            for q in per_rel {
                let (_, t) = m.relation(q).ok_or(ModelError::MissingSymbol {
                    name: q.clone(),
                })?;
                row.push(t);
            }
            q_tables.push(row);
        }
        for (ri, r) in rels.iter().enumerate() {
            out.set_relation(r, 1, q_tables[ri][0].to_vec())?;
        }
        for (fi, fname) in funs.iter().enumerate() {
            let mut table = vec![0usize; k];
            for (x, slot) in table.iter_mut().enumerate() {
                let image = (0..k).find(|&y| {
                    q_tables.iter().all(|row| {
                        succ[fi].iter().all(|&(li, wi)| row[li][x] == row[wi][y])
                    })
                });
                *slot = image.ok_or(PassError::NoWitness {
                    symbol: fname.clone(),
                })?;
            }
            out.set_function(fname, 1, table)?;
        }
        Ok((out, e.clone()))
    });

    Ok(ReductionStep {
        name: "remove_monadic_functions",
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

fn term_chain_depth(t: &Term) -> usize {
    match t {
        Term::Var(_) => 0,
        Term::App(_, args) => 1 + args.iter().map(term_chain_depth).max().unwrap_or(0),
    }
}

/// Longest function chain applied inside any atom.
fn max_chain_depth(phi: &Formula) -> usize {
    match phi {
        Formula::Falsum => 0,
        Formula::Atom(_, args) => args.iter().map(term_chain_depth).max().unwrap_or(0),
        Formula::Bin(_, l, r) => max_chain_depth(l).max(max_chain_depth(r)),
        Formula::Quant(_, body) => max_chain_depth(body),
    }
}
