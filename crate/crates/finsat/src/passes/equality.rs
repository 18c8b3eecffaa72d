//! Passes that move between plain satisfiability and satisfiability with a
//! distinguished equality relation: axiomatizing a congruence, and encoding
//! functions as total functional relations.

use super::{fresh_name, identity_table, map_atoms, sig_names, PassError, ReductionStep};
use crate::logic::{Formula, Signature, Term};
use crate::semantics::{tuple_index, tuples, Env, FinModel, ModelError};
use crate::toolkit::finite_quotient;
use std::collections::BTreeMap;

/// Turns equality-pinned satisfiability into plain satisfiability by
/// conjoining equivalence and congruence axioms for the named relation.
/// Backward models are quotiented by their interpretation of the symbol.
pub fn add_congruence(
    phi: &Formula,
    sig: &Signature,
    eqsym: &str,
) -> Result<ReductionStep, PassError> {
    sig.validate_formula(phi)?;
    match sig.relation_arity(eqsym) {
        None => {
            return Err(PassError::MissingEquality {
                name: eqsym.to_string(),
            })
        }
        Some(2) => {}
        Some(a) => {
            return Err(PassError::EqualityArity {
                name: eqsym.to_string(),
                arity: a,
            })
        }
    }
    let (funs, rels) = phi.symbols();
    let eq = eqsym.to_string();

    let eq_at = |a: usize, b: usize| Formula::atom(eq.clone(), vec![Term::var(a), Term::var(b)]);
    let refl = Formula::forall(eq_at(0, 0));
    let sym = Formula::forall(Formula::forall(Formula::implies(
        eq_at(1, 0),
        eq_at(0, 1),
    )));
    let trans = Formula::forall(Formula::forall(Formula::forall(Formula::implies(
        eq_at(2, 1),
        Formula::implies(eq_at(1, 0), eq_at(2, 0)),
    ))));

    let mut parts = vec![phi.clone(), refl, sym, trans];
    for f in &funs {
        let a = sig.function_arity(f).expect("validated");
        parts.push(congruence_axiom(&eq, f, a, true));
    }
    for r in &rels {
        let a = sig.relation_arity(r).expect("validated");
        parts.push(congruence_axiom(&eq, r, a, false));
    }
    let formula = Formula::conj(parts);

    let eq_f = eq.clone();
    let forward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
        let mut out = m.clone();
        out.set_relation(&eq_f, 2, identity_table(m.size()))?;
        Ok((out, e.clone()))
    });

    let ssig = sig.clone();
    let eq_b = eq.clone();
    let backward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
        let k = m.size();
        let (arity, table) = m.relation(&eq_b).ok_or(ModelError::MissingSymbol {
            name: eq_b.clone(),
        })?;
        if arity != 2 {
            return Err(PassError::EqualityArity {
                name: eq_b.clone(),
                arity,
            });
        }
        let table = table.to_vec();
        let elements: Vec<usize> = (0..k).collect();
        let q = finite_quotient(&elements, |x, y| table[x * k + y]);
        let classes = q.class_count();
        let class_of = |v: usize| -> Result<usize, PassError> { Ok(q.class_of(&v)?) };
        let mut out = FinModel::canonical(&ssig, classes)?;
        for (fname, a) in ssig.functions() {
            if m.function(fname).is_none() {
                continue;
            }
            let mut ftable = vec![0usize; classes.pow(*a as u32)];
            for (i, c) in tuples(classes, *a).enumerate() {
                let args: Vec<usize> = c.iter().map(|&ci| q.reprs()[ci]).collect();
                ftable[i] = class_of(m.apply_function(fname, &args)?)?;
            }
            out.set_function(fname, *a, ftable)?;
        }
        for (rname, a) in ssig.relations() {
            if m.relation(rname).is_none() {
                continue;
            }
            let mut rtable = vec![false; classes.pow(*a as u32)];
            for (i, c) in tuples(classes, *a).enumerate() {
                let args: Vec<usize> = c.iter().map(|&ci| q.reprs()[ci]).collect();
                rtable[i] = m.relation_holds(rname, &args)?;
            }
            out.set_relation(rname, *a, rtable)?;
        }
        out.set_relation(&eq_b, 2, identity_table(classes))?;
        let prefix: Vec<usize> = e
            .prefix()
            .iter()
            .map(|&v| class_of(v.min(k - 1)))
            .collect::<Result<_, _>>()?;
        let default = class_of(e.default_value().min(k - 1))?;
        Ok((out, Env::new(prefix, default)))
    });

    Ok(ReductionStep {
        name: "add_congruence",
        source_sig: sig.clone(),
        target_sig: sig.clone(),
        source_eq: Some(eq),
        target_eq: None,
        reserved_free: Vec::new(),
        formula,
        forward,
        backward,
    })
}

/// The congruence axiom for one symbol: pointwise-equal argument tuples
/// yield an equal value (functions) or an equivalent atom (relations).
fn congruence_axiom(eq: &str, name: &str, arity: usize, is_fun: bool) -> Formula {
    let a = arity;
    if a == 0 {
        return if is_fun {
            Formula::atom(eq, vec![Term::cnst(name), Term::cnst(name)])
        } else {
            Formula::iff(Formula::atom(name, vec![]), Formula::atom(name, vec![]))
        };
    }
    let xs: Vec<Term> = (1..=a).map(|j| Term::var(2 * a - j)).collect();
    let ys: Vec<Term> = (1..=a).map(|j| Term::var(a - j)).collect();
    let premise = Formula::conj(
        (0..a)
            .map(|i| Formula::atom(eq, vec![xs[i].clone(), ys[i].clone()]))
            .collect(),
    );
    let conclusion = if is_fun {
        Formula::atom(
            eq,
            vec![Term::app(name, xs.clone()), Term::app(name, ys.clone())],
        )
    } else {
        Formula::iff(Formula::atom(name, xs.clone()), Formula::atom(name, ys.clone()))
    };
    let mut out = Formula::implies(premise, conclusion);
    for _ in 0..2 * a {
        out = Formula::forall(out);
    }
    out
}

/// Replaces every function by its graph relation, recoding atoms through
/// existential witnesses and conjoining totality and functionality axioms.
/// The target side carries a fresh equality symbol that its models must
/// interpret as identity.
pub fn remove_functions(phi: &Formula, sig: &Signature) -> Result<ReductionStep, PassError> {
    sig.validate_formula(phi)?;
    let (funs, rels) = phi.symbols();
    let mut taken = sig_names(sig);
    let graph: BTreeMap<String, String> = funs
        .iter()
        .map(|f| (f.clone(), fresh_name(&format!("{f}_g"), &mut taken)))
        .collect();
    let eq = fresh_name("eqv", &mut taken);

    let mut target = Signature::new();
    target.add_relation(&eq, 2)?;
    for f in &funs {
        let a = sig.function_arity(f).expect("validated");
        target.add_relation(&graph[f], a + 1)?;
    }
    for r in &rels {
        target.add_relation(r, sig.relation_arity(r).expect("validated"))?;
    }

    let names = Names {
        eq: eq.clone(),
        graph: graph.clone(),
    };
    let mut parts = vec![map_atoms(phi, &mut |r, args, _| {
        encode_atom(r, args, &names)
    })];
    for f in &funs {
        let a = sig.function_arity(f).expect("validated");
        let g = graph[f].clone();
        parts.push(totality_axiom(&g, a));
        parts.push(functionality_axiom(&g, &eq, a));
    }
    let formula = Formula::conj(parts);

    let fun_arities: Vec<(String, usize)> = funs
        .iter()
        .map(|f| (f.clone(), sig.function_arity(f).expect("validated")))
        .collect();
    let rels_f = rels.clone();
    let graph_f = graph.clone();
    let eq_f = eq.clone();
    let fun_arities_b = fun_arities.clone();
    let forward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
        let k = m.size();
        let mut out = FinModel::new(k)?;
        out.set_relation(&eq_f, 2, identity_table(k))?;
        for (f, a) in &fun_arities {
            let mut table = vec![false; k.pow((a + 1) as u32)];
            for v in tuples(k, *a) {
                let w = m.apply_function(f, &v)?;
                let mut full = v.clone();
                full.push(w);
                table[tuple_index(k, &full)] = true;
            }
            out.set_relation(&graph_f[f], a + 1, table)?;
        }
        for r in &rels_f {
            let (a, table) = m.relation(r).ok_or(ModelError::MissingSymbol {
                name: r.clone(),
            })?;
            out.set_relation(r, a, table.to_vec())?;
        }
        Ok((out, e.clone()))
    });

    let ssig = sig.clone();
    let rels_b = rels.clone();
    let backward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
        let k = m.size();
        let mut out = FinModel::canonical(&ssig, k)?;
        for (f, a) in &fun_arities_b {
            let g = &graph[f];
            let mut table = vec![0usize; k.pow(*a as u32)];
            for (i, v) in tuples(k, *a).enumerate() {
                let mut found = None;
                for w in 0..k {
                    let mut full = v.clone();
                    full.push(w);
                    if m.relation_holds(g, &full)? {
                        if found.is_some() {
                            return Err(PassError::NoWitness { symbol: f.clone() });
                        }
                        found = Some(w);
                    }
                }
                table[i] = found.ok_or(PassError::NoWitness { symbol: f.clone() })?;
            }
            out.set_function(f, *a, table)?;
        }
        for r in &rels_b {
            let (a, table) = m.relation(r).ok_or(ModelError::MissingSymbol {
                name: r.clone(),
            })?;
            out.set_relation(r, a, table.to_vec())?;
        }
        Ok((out, e.clone()))
    });

    Ok(ReductionStep {
        name: "remove_functions",
        source_sig: sig.clone(),
        target_sig: target,
        source_eq: None,
        target_eq: Some(eq),
        reserved_free: Vec::new(),
        formula,
        forward,
        backward,
    })
}

struct Names {
    eq: String,
    graph: BTreeMap<String, String>,
}

/// Rewrites an atom whose arguments may contain compound terms: each
/// compound argument gets an existential witness defined through the graph
/// relations, innermost terms first.
fn encode_atom(rel: &str, args: &[Term], names: &Names) -> Formula {
    let compounds: Vec<usize> = args
        .iter()
        .enumerate()
        .filter(|(_, t)| matches!(t, Term::App(..)))
        .map(|(i, _)| i)
        .collect();
    let m = compounds.len();
    if m == 0 {
        return Formula::atom(rel, args.to_vec());
    }
    let mut parts = Vec::new();
    let mut new_args = Vec::with_capacity(args.len());
    let mut next = 0usize;
    for t in args {
        match t {
            Term::Var(v) => new_args.push(Term::var(v + m)),
            Term::App(..) => {
                // The j-th compound is bound j-th from the outside.
                let w = m - 1 - next;
                next += 1;
                let shifted = t.shift(0, m as isize).expect("upward shift");
                parts.push(defines(w, &shifted, names));
                new_args.push(Term::var(w));
            }
        }
    }
    parts.push(Formula::atom(rel, new_args));
    let mut body = Formula::conj(parts);
    for _ in 0..m {
        body = Formula::exists(body);
    }
    body
}

/// The formula stating that variable `x` denotes the term `t`.
fn defines(x: usize, t: &Term, names: &Names) -> Formula {
    match t {
        Term::Var(v) => Formula::atom(names.eq.clone(), vec![Term::var(x), Term::var(*v)]),
        Term::App(f, fargs) => {
            let mut args = fargs.clone();
            args.push(Term::var(x));
            encode_atom(&names.graph[f], &args, names)
        }
    }
}

/// Every argument tuple has an image: forall ys exists x, g(ys, x).
fn totality_axiom(g: &str, a: usize) -> Formula {
    let mut args: Vec<Term> = (0..a).map(|j| Term::var(a - j)).collect();
    args.push(Term::var(0));
    let mut out = Formula::exists(Formula::atom(g, args));
    for _ in 0..a {
        out = Formula::forall(out);
    }
    out
}

/// Images are unique up to the equality symbol.
fn functionality_axiom(g: &str, eq: &str, a: usize) -> Formula {
    let ys: Vec<Term> = (0..a).map(|j| Term::var(a + 1 - j)).collect();
    let mut first = ys.clone();
    first.push(Term::var(1));
    let mut second = ys;
    second.push(Term::var(0));
    let mut out = Formula::implies(
        Formula::atom(g, first),
        Formula::implies(
            Formula::atom(g, second),
            Formula::atom(eq, vec![Term::var(1), Term::var(0)]),
        ),
    );
    for _ in 0..a + 2 {
        out = Formula::forall(out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;
    use crate::search::{
        decide_fixed_domain, decide_fixed_domain_with_identity, SearchConfig, SearchOutcome,
    };

    fn conj_spine_len(phi: &Formula) -> usize {
        match phi {
            Formula::Bin(crate::logic::BinOp::And, l, r) => conj_spine_len(l) + conj_spine_len(r),
            _ => 1,
        }
    }

    #[test]
    fn congruence_adds_one_axiom_per_symbol() {
        let sig = Signature::make(&[], &[("same", 2)]).unwrap();
        let phi = parse_formula("(exists x (same x x))", &sig).unwrap();
        let step = add_congruence(&phi, &sig, "same").unwrap();
        // Spine: phi, reflexivity, symmetry, transitivity, one congruence.
        assert_eq!(conj_spine_len(&step.formula), 5);
        assert_eq!(step.source_eq.as_deref(), Some("same"));
        assert!(step.target_eq.is_none());
    }

    #[test]
    fn congruence_rejects_wrong_equality_symbols() {
        let sig = Signature::make(&[], &[("U", 1)]).unwrap();
        let phi = parse_formula("(U x)", &sig).unwrap();
        assert!(matches!(
            add_congruence(&phi, &sig, "missing"),
            Err(PassError::MissingEquality { .. })
        ));
        assert!(matches!(
            add_congruence(&phi, &sig, "U"),
            Err(PassError::EqualityArity { name, arity: 1 }) if name == "U"
        ));
    }

    #[test]
    fn congruence_forward_pins_the_diagonal() {
        let sig = Signature::make(&[("f", 1)], &[("same", 2), ("P", 1)]).unwrap();
        let phi = parse_formula("(exists x (and (P (f x)) (same x x)))", &sig).unwrap();
        let step = add_congruence(&phi, &sig, "same").unwrap();
        let SearchOutcome::Sat { model, env } =
            decide_fixed_domain_with_identity(&phi, &sig, 2, "same", &SearchConfig::default())
                .unwrap()
        else {
            panic!("satisfiable with identity");
        };
        let (fm, fe) = step.forward(&model, &env).unwrap();
        let (_, table) = fm.relation("same").unwrap();
        assert_eq!(table, identity_table(2).as_slice());
        assert!(fm.eval(&fe, &step.formula).unwrap());
    }

    #[test]
    fn congruence_backward_quotients_a_full_relation() {
        let sig = Signature::make(&[], &[("same", 2)]).unwrap();
        let phi = parse_formula("(exists x (same x x))", &sig).unwrap();
        let step = add_congruence(&phi, &sig, "same").unwrap();
        let mut n = FinModel::new(2).unwrap();
        n.set_relation("same", 2, vec![true; 4]).unwrap();
        assert!(n.eval(&Env::constant(0), &step.formula).unwrap());
        let (bm, be) = step.backward(&n, &Env::constant(0)).unwrap();
        assert_eq!(bm.size(), 1);
        let (_, table) = bm.relation("same").unwrap();
        assert_eq!(table, &[true]);
        assert!(bm.eval(&be, &phi).unwrap());
    }

    #[test]
    fn function_removal_flattens_atoms_through_graphs() {
        let sig = Signature::make(&[("f", 1)], &[("P", 1)]).unwrap();
        let phi = parse_formula("(P (f x))", &sig).unwrap();
        let step = remove_functions(&phi, &sig).unwrap();
        assert_eq!(step.target_eq.as_deref(), Some("eqv"));
        assert_eq!(
            step.target_sig.relations(),
            &[
                ("eqv".to_string(), 2),
                ("f_g".to_string(), 2),
                ("P".to_string(), 1),
            ]
        );
        let expected_core = Formula::exists(Formula::and(
            Formula::atom("f_g", vec![Term::var(1), Term::var(0)]),
            Formula::atom("P", vec![Term::var(0)]),
        ));
        // Spine: encoded atom, totality, functionality.
        assert_eq!(conj_spine_len(&step.formula), 3);
        let Formula::Bin(crate::logic::BinOp::And, first, _) = &step.formula else {
            panic!("conjunction expected");
        };
        assert_eq!(**first, expected_core);
    }

    #[test]
    fn function_removal_forward_builds_graphs() {
        let sig = Signature::make(&[("f", 1)], &[("P", 1)]).unwrap();
        let phi = parse_formula("(P (f x))", &sig).unwrap();
        let step = remove_functions(&phi, &sig).unwrap();
        let mut m = FinModel::new(2).unwrap();
        m.set_function("f", 1, vec![0, 1]).unwrap();
        m.set_relation("P", 1, vec![true, false]).unwrap();
        let e = Env::constant(0);
        let (fm, fe) = step.forward(&m, &e).unwrap();
        let (_, graph) = fm.relation("f_g").unwrap();
        assert_eq!(graph, &[true, false, false, true]);
        assert!(fm.eval(&fe, &step.formula).unwrap());
        let (bm, be) = step.backward(&fm, &fe).unwrap();
        assert!(bm.eval(&be, &phi).unwrap());
        let (_, recovered) = bm.function("f").unwrap();
        assert_eq!(recovered, &[0, 1]);
    }

    #[test]
    fn function_removal_round_trips_searched_witnesses() {
        let sig = Signature::make(&[("f", 1)], &[("P", 2)]).unwrap();
        let phi = parse_formula("(forall x (P x (f x)))", &sig).unwrap();
        let step = remove_functions(&phi, &sig).unwrap();
        for k in 1..=2 {
            let SearchOutcome::Sat { model, env } =
                decide_fixed_domain(&phi, &sig, k, &SearchConfig::default()).unwrap()
            else {
                panic!("satisfiable at {k}");
            };
            let (fm, fe) = step.forward(&model, &env).unwrap();
            assert!(fm.eval(&fe, &step.formula).unwrap());
            let (bm, be) = step.backward(&fm, &fe).unwrap();
            assert!(bm.eval(&be, &phi).unwrap());
            assert!(bm
                .ext_equal(&model, &["f".to_string()], &["P".to_string()])
                .unwrap());
        }
    }

    #[test]
    fn backward_rejects_non_total_graphs() {
        let sig = Signature::make(&[("f", 1)], &[("P", 1)]).unwrap();
        let phi = parse_formula("(P (f x))", &sig).unwrap();
        let step = remove_functions(&phi, &sig).unwrap();
        let mut n = FinModel::new(2).unwrap();
        n.set_relation("eqv", 2, identity_table(2)).unwrap();
        n.set_relation("f_g", 2, vec![false; 4]).unwrap();
        n.set_relation("P", 1, vec![false, false]).unwrap();
        assert!(matches!(
            step.backward(&n, &Env::constant(0)),
            Err(PassError::NoWitness { symbol }) if symbol == "f"
        ));
    }
}
