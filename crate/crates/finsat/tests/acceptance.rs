//! End-to-end gate for the whole crate: ten checks, one per major
//! capability, each printing a single pass or fail line with its runtime
//! (visible with `--nocapture`).

mod common;

use std::time::{Duration, Instant};

use finsat::bisim::{apply_f, indist_fixpoint, minimize_model, PairRelation};
use finsat::bpcp::{derivable, encode_phi, extract_solution, solve_bpcp, BpcpInstance};
use finsat::classify::{classify_signature, DecidableCase, UndecidableCase, Verdict};
use finsat::hfs::{
    build_membership_model, ext_sentence, normalize, tuple_mem, Hfs, RawTree, MEM_REL,
};
use finsat::logic::{print_formula, Formula, Signature, Term};
use finsat::monadic::{decide_monadic_full, MonadicVerdict};
use finsat::passes::{
    add_congruence, close_formula, compact_symbols, compress_to_membership, embed_padding,
    lift_arity0_to1, merge_relations, pipeline_to_binary, propositional_collapse, rel2_to_fun,
    remove_constants, remove_functions, remove_monadic_functions, run_backward, run_forward,
    uniformize_arity, PassError, ReductionStep,
};
use finsat::search::{
    decide_fixed_domain, decide_fixed_domain_with_identity, enumerate_fsat, search_up_to,
    SearchConfig, SearchOutcome,
};
use finsat::semantics::{tuples, Env, FinModel, ModelChecker};
use finsat::seplog::{
    encode_fsat_to_msl, eval_sl, heap_to_model, model_to_heap, msl_translation, Heap, SlFormula,
    Stack,
};
use finsat::toolkit::weak_powerset;
use rand::seq::SliceRandom;
use rand::Rng;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// Runs one gate body, prints its PASS or FAIL line, then asserts.
fn gate(name: &str, limit: Duration, body: impl FnOnce() -> Result<(), String>) {
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    match &outcome {
        Ok(()) if elapsed <= limit => {
            println!("PASS {name} ({elapsed:.2?} of {limit:?})");
        }
        Ok(()) => println!("FAIL {name}: over time, {elapsed:.2?} exceeds {limit:?}"),
        Err(e) => println!("FAIL {name}: {e} ({elapsed:.2?})"),
    }
    if let Err(e) = outcome {
        panic!("{name}: {e}");
    }
    assert!(
        elapsed <= limit,
        "{name} exceeded its {limit:?} budget: {elapsed:.2?}"
    );
}

fn err_str(e: impl std::fmt::Display) -> String {
    e.to_string()
}

#[test]
fn criterion_01_evaluator_matches_quantifier_expansion() {
    gate(
        "evaluator agrees with syntactic quantifier expansion",
        Duration::from_secs(60),
        || {
            let sig = Signature::make(&[("f", 1)], &[("P", 1)]).map_err(err_str)?;
            let width = 3;
            // The joint space of depth-3 formulas, sizes, tables, and
            // assignments is far beyond 1e5 cases, so 1e4 are sampled.
            let mut rng = common::rng(0xA1);
            for round in 0..10_000 {
                let phi = common::random_formula(&mut rng, &sig, width, 3);
                let k = rng.random_range(1..=3usize);
                let m = common::random_model(&mut rng, &sig, k);
                let env = common::random_env(&mut rng, width, k);

                let direct = m.eval(&env, &phi).map_err(err_str)?;
                let fast = ModelChecker::new(&m, &phi).eval(&env).map_err(err_str)?;
                let ground = common::expand_ground(&phi, k, width);
                let genv = common::ground_env(&env, k, width);
                let expanded = m.eval(&genv, &ground).map_err(err_str)?;

                ensure!(
                    direct == expanded,
                    "round {round}: expansion disagrees on {} at k={k}",
                    print_formula(&phi)
                );
                ensure!(
                    direct == fast,
                    "round {round}: checker disagrees on {} at k={k}",
                    print_formula(&phi)
                );
            }
            Ok(())
        },
    );
}

struct PassCase {
    label: &'static str,
    sig: Signature,
    /// Relation read as true equality; pinned during the source search.
    eq: Option<&'static str>,
    apply: Box<dyn Fn(&Formula, &Signature) -> Result<ReductionStep, PassError>>,
}

/// Models times assignments a fixed-domain search would enumerate.
fn candidate_count(sig: &Signature, k: usize, width: usize) -> u128 {
    let mut total: u128 = 1;
    for (_, a) in sig.functions() {
        let cells = k.pow(*a as u32) as u32;
        total = total.saturating_mul((k as u128).saturating_pow(cells));
    }
    for (_, a) in sig.relations() {
        let cells = k.pow(*a as u32) as u32;
        total = total.saturating_mul(2u128.saturating_pow(cells));
    }
    total.saturating_mul((k as u128).saturating_pow(width as u32))
}

#[test]
fn criterion_02_every_pass_round_trips_witnesses() {
    gate(
        "each reduction pass transports witnesses both ways",
        Duration::from_secs(600),
        || {
            let cases = pass_cases().map_err(err_str)?;
            let cfg = SearchConfig::default();
            // Budget for hunting witnesses on the target side; bigger
            // target signatures fall back to forward witnesses only.
            let target_budget: u128 = 300_000;
            let mut rng = common::rng(0xB2);
            for case in &cases {
                for round in 0..100 {
                    let phi = common::random_formula(&mut rng, &case.sig, 2, 3);
                    let step = (case.apply)(&phi, &case.sig)
                        .map_err(|e| format!("{}: round {round}: pass failed: {e}", case.label))?;
                    let target_width = step.formula.fresh_free();

                    for k in 1..=3usize {
                        let found = match case.eq {
                            Some(eq) => {
                                decide_fixed_domain_with_identity(&phi, &case.sig, k, eq, &cfg)
                            }
                            None => decide_fixed_domain(&phi, &case.sig, k, &cfg),
                        }
                        .map_err(err_str)?;
                        match found {
                            SearchOutcome::Sat { model, env } => {
                                let (tm, te) = step.forward(&model, &env).map_err(|e| {
                                    format!("{}: round {round}: forward: {e}", case.label)
                                })?;
                                let ok = ModelChecker::new(&tm, &step.formula)
                                    .eval(&te)
                                    .map_err(err_str)?;
                                ensure!(
                                    ok,
                                    "{}: round {round}: forward witness fails target at k={k}",
                                    case.label
                                );
                                // The transported witness is also a found
                                // target witness; send it back.
                                let (bm, be) = step.backward(&tm, &te).map_err(|e| {
                                    format!("{}: round {round}: backward: {e}", case.label)
                                })?;
                                let ok =
                                    ModelChecker::new(&bm, &phi).eval(&be).map_err(err_str)?;
                                ensure!(
                                    ok,
                                    "{}: round {round}: round trip loses the witness at k={k}",
                                    case.label
                                );
                            }
                            _ => {}
                        }
                        if candidate_count(&step.target_sig, k, target_width) <= target_budget {
                            if let SearchOutcome::Sat { model, env } =
                                decide_fixed_domain(&step.formula, &step.target_sig, k, &cfg)
                                    .map_err(err_str)?
                            {
                                let (bm, be) = step.backward(&model, &env).map_err(|e| {
                                    format!("{}: round {round}: backward: {e}", case.label)
                                })?;
                                let ok =
                                    ModelChecker::new(&bm, &phi).eval(&be).map_err(err_str)?;
                                ensure!(
                                    ok,
                                    "{}: round {round}: target witness at k={k} fails source",
                                    case.label
                                );
                            }
                        }
                    }
                }
            }
            Ok(())
        },
    );
}

fn pass_cases() -> Result<Vec<PassCase>, finsat::logic::LogicError> {
    let fpq = Signature::make(&[("f", 1)], &[("P", 2), ("Q", 1)])?;
    let two_binary = Signature::make(&[], &[("P", 2), ("E", 2)])?;
    let uniform = Signature::make(&[], &[("P", 2), ("Q", 1)])?;
    let mergeable = Signature::make(&[], &[("P", 2), ("Q", 2)])?;
    let constants = Signature::make(&[("c", 0), ("d", 0)], &[("P", 2)])?;
    let nullary = Signature::make(&[], &[("A", 0), ("B", 0), ("P", 1)])?;
    let degenerate = Signature::make(&[("f", 2)], &[("A", 0), ("B", 0)])?;
    let monadic = Signature::make(&[("g", 1)], &[("P", 1), ("Q", 1)])?;
    let one_binary = Signature::make(&[], &[("R", 2)])?;
    let padded = Signature::make(&[], &[("T", 3)])?;
    Ok(vec![
        PassCase {
            label: "close_formula",
            sig: fpq.clone(),
            eq: None,
            apply: Box::new(|phi, sig| close_formula(phi, sig)),
        },
        PassCase {
            label: "compact_symbols",
            sig: fpq.clone(),
            eq: None,
            apply: Box::new(|phi, sig| compact_symbols(phi, sig)),
        },
        PassCase {
            label: "remove_functions",
            sig: fpq,
            eq: None,
            apply: Box::new(|phi, sig| remove_functions(phi, sig)),
        },
        PassCase {
            label: "add_congruence",
            sig: two_binary,
            eq: Some("E"),
            apply: Box::new(|phi, sig| add_congruence(phi, sig, "E")),
        },
        PassCase {
            label: "uniformize_arity",
            sig: uniform,
            eq: None,
            apply: Box::new(|phi, sig| uniformize_arity(phi, sig, 2)),
        },
        PassCase {
            label: "merge_relations",
            sig: mergeable,
            eq: None,
            apply: Box::new(|phi, sig| merge_relations(phi, sig)),
        },
        PassCase {
            label: "remove_constants",
            sig: constants,
            eq: None,
            apply: Box::new(|phi, sig| remove_constants(phi, sig)),
        },
        PassCase {
            label: "lift_arity0_to1",
            sig: nullary,
            eq: None,
            apply: Box::new(|phi, sig| lift_arity0_to1(phi, sig)),
        },
        PassCase {
            label: "propositional_collapse",
            sig: degenerate,
            eq: None,
            apply: Box::new(|phi, sig| propositional_collapse(phi, sig)),
        },
        PassCase {
            label: "remove_monadic_functions",
            sig: monadic,
            eq: None,
            apply: Box::new(|phi, sig| remove_monadic_functions(phi, sig)),
        },
        PassCase {
            label: "compress_to_membership",
            sig: one_binary.clone(),
            eq: None,
            apply: Box::new(|phi, sig| compress_to_membership(phi, sig)),
        },
        PassCase {
            label: "rel2_to_fun",
            sig: one_binary.clone(),
            eq: None,
            apply: Box::new(|phi, sig| rel2_to_fun(phi, sig, 2)),
        },
        PassCase {
            label: "embed_padding",
            sig: one_binary,
            eq: None,
            apply: Box::new(move |phi, sig| embed_padding(phi, sig, &padded)),
        },
    ])
}

#[test]
fn criterion_03_pipeline_compresses_to_membership() {
    gate(
        "pipeline to one binary relation keeps witnesses",
        Duration::from_secs(600),
        || {
            let sig = Signature::make(&[("f", 1)], &[("P", 2), ("Q", 1)]).map_err(err_str)?;
            let cfg = SearchConfig::default();
            let mut rng = common::rng(0xC3);
            let mut done = 0;
            let mut attempts = 0;
            while done < 25 {
                attempts += 1;
                ensure!(attempts < 2000, "satisfiable corpus did not fill up");
                let phi = common::random_formula(&mut rng, &sig, 2, 3);
                let (m, e) = match search_up_to(&phi, &sig, 2, &cfg).map_err(err_str)? {
                    SearchOutcome::Sat { model, env } => (model, env),
                    _ => continue,
                };
                let steps = pipeline_to_binary(&phi, &sig).map_err(err_str)?;
                let last = steps.last().expect("pipeline is never empty");
                ensure!(
                    last.target_sig.functions().is_empty()
                        && last.target_sig.relations().len() == 1
                        && last.target_sig.relations()[0].1 == 2,
                    "target is not a single binary relation"
                );
                let (tm, te) = run_forward(&steps, &m, &e).map_err(err_str)?;
                let ok = ModelChecker::new(&tm, &last.formula)
                    .eval(&te)
                    .map_err(err_str)?;
                ensure!(ok, "forward witness fails the compressed formula");
                let (bm, be) = run_backward(&steps, &tm, &te).map_err(err_str)?;
                let ok = ModelChecker::new(&bm, &phi).eval(&be).map_err(err_str)?;
                ensure!(ok, "backward transport fails the source formula");
                done += 1;
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_04_card_matching_chain() {
    gate(
        "card deck encoding, intended models, and extraction",
        Duration::from_secs(60),
        || {
            let single = BpcpInstance::from_strings(&[("1", "1")]).map_err(err_str)?;
            let crossed = BpcpInstance::from_strings(&[("1", "11"), ("11", "1")]).map_err(err_str)?;
            let skewed = BpcpInstance::from_strings(&[("1", "0")]).map_err(err_str)?;

            let s1 = solve_bpcp(&single, 6).ok_or("one-card deck should solve")?;
            ensure!(s1.len() == 1, "one-card deck solves at length {}", s1.len());
            let s3 = solve_bpcp(&crossed, 6).ok_or("crossed deck should solve")?;
            ensure!(s3.len() == 3, "crossed deck solves at length {}", s3.len());

            for (deck, n) in [(&single, 1usize), (&crossed, 3)] {
                let (model, env) = finsat::bpcp::build_bn(deck, n).map_err(err_str)?;
                let phi = encode_phi(deck);
                let ok = ModelChecker::new(&model, &phi).eval(&env).map_err(err_str)?;
                ensure!(ok, "encoding fails on its intended model at n={n}");
                let s = extract_solution(deck, &model, &env).map_err(err_str)?;
                ensure!(derivable(deck, &s, &s), "extracted string is not derivable");
            }

            ensure!(solve_bpcp(&skewed, 6).is_none(), "skewed deck must not solve");
            for len in 1..=4usize {
                for mask in 0..(1u32 << len) {
                    let s: Vec<bool> = (0..len).map(|i| mask >> i & 1 == 1).collect();
                    ensure!(
                        !derivable(&skewed, &s, &s),
                        "skewed deck derives a match of length {len}"
                    );
                }
            }
            Ok(())
        },
    );
}

fn to_raw(h: &Hfs) -> RawTree {
    RawTree(h.children().iter().map(to_raw).collect())
}

fn random_tree(rng: &mut rand_chacha::ChaCha8Rng, depth: usize) -> RawTree {
    if depth == 0 || rng.random_bool(0.3) {
        return RawTree(Vec::new());
    }
    let n = rng.random_range(0..=3);
    RawTree((0..n).map(|_| random_tree(rng, depth - 1)).collect())
}

fn shuffled(rng: &mut rand_chacha::ChaCha8Rng, t: &RawTree) -> RawTree {
    let mut children: Vec<RawTree> = t.0.iter().map(|c| shuffled(rng, c)).collect();
    children.shuffle(rng);
    RawTree(children)
}

fn padded_tree(rng: &mut rand_chacha::ChaCha8Rng, t: &RawTree) -> RawTree {
    let mut children: Vec<RawTree> = t.0.clone();
    if !children.is_empty() {
        let pick = rng.random_range(0..children.len());
        children.push(children[pick].clone());
    }
    RawTree(children)
}

#[test]
fn criterion_05_set_encoding_suite() {
    gate(
        "set normalization and the membership encoding",
        Duration::from_secs(120),
        || {
            let mut rng = common::rng(0xD4);
            for _ in 0..10_000 {
                let t = random_tree(&mut rng, 4);
                let n = normalize(&t);
                ensure!(normalize(&to_raw(&n)) == n, "normalization is not idempotent");
                ensure!(
                    normalize(&shuffled(&mut rng, &t)) == n,
                    "normal form depends on child order"
                );
                ensure!(
                    normalize(&padded_tree(&mut rng, &t)) == n,
                    "normal form depends on duplicates"
                );
            }

            // All four sets of rank <= 2, crossed both ways.
            let empty = Hfs::empty();
            let one = Hfs::singleton(empty.clone());
            let low: Vec<Hfs> = vec![
                empty.clone(),
                Hfs::singleton(empty.clone()),
                Hfs::singleton(one.clone()),
                Hfs::pair_set(empty, one),
            ];
            for x in &low {
                for y in &low {
                    for a in &low {
                        for b in &low {
                            let same = Hfs::opair(x.clone(), y.clone())
                                == Hfs::opair(a.clone(), b.clone());
                            ensure!(
                                same == (x == a && y == b),
                                "pairing is not injective on rank-2 sets"
                            );
                        }
                    }
                }
            }

            // Encoding properties, exhaustive over tables while the table
            // space stays small, sampled at k = n = 3.
            for k in 1..=3usize {
                for n in 1..=3usize {
                    let cells = k.pow(n as u32);
                    let exhaustive = cells <= 9;
                    let runs: Vec<Vec<bool>> = if exhaustive {
                        (0..(1u32 << cells))
                            .map(|mask| (0..cells).map(|i| mask >> i & 1 == 1).collect())
                            .collect()
                    } else {
                        (0..25)
                            .map(|_| (0..cells).map(|_| rng.random()).collect())
                            .collect()
                    };
                    for table in runs {
                        let mut m = FinModel::new(k).map_err(err_str)?;
                        m.set_relation("R", n, table.clone()).map_err(err_str)?;
                        let mm = build_membership_model(&m).map_err(err_str)?;
                        let d = mm.d_index;
                        // Every element code is a member of d, and d has
                        // no other members.
                        for x in 0..k {
                            let code = mm.element_index[x];
                            ensure!(
                                mm.universe[d].has_member(&mm.universe[code]),
                                "code {x} missing from d"
                            );
                            ensure!(
                                mm.model.relation_holds(MEM_REL, &[code, d]).map_err(err_str)?,
                                "membership table misses code {x}"
                            );
                        }
                        for u in 0..mm.model.size() {
                            if mm.model.relation_holds(MEM_REL, &[u, d]).map_err(err_str)? {
                                ensure!(
                                    mm.element_index.contains(&u),
                                    "d contains a non-code member"
                                );
                            }
                        }
                        // Tuple membership mirrors the source table.
                        let vars: Vec<usize> = (1..=n).collect();
                        let probe = tuple_mem(0, &vars, MEM_REL);
                        let checker = ModelChecker::new(&mm.model, &probe);
                        for t in tuples(k, n) {
                            let mut prefix = vec![mm.r_index];
                            prefix.extend(t.iter().map(|v| mm.element_index[*v]));
                            let got = checker.eval(&Env::new(prefix, 0)).map_err(err_str)?;
                            let want = m.relation_holds("R", &t).map_err(err_str)?;
                            ensure!(got == want, "tuple {t:?} decodes wrongly");
                        }
                        // The universe is extensional.
                        let ext = ext_sentence(MEM_REL);
                        let ok = ModelChecker::new(&mm.model, &ext)
                            .eval(&Env::constant(0))
                            .map_err(err_str)?;
                        ensure!(ok, "built model is not extensional");
                    }
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_06_indistinguishability_and_minimization() {
    gate(
        "refinement fixpoint bounds and model minimization",
        Duration::from_secs(120),
        || {
            let rel_sig = Signature::make(&[], &[("P", 1), ("R", 2)]).map_err(err_str)?;
            let fun_sig = Signature::make(&[("f", 1)], &[("R", 2)]).map_err(err_str)?;
            let funs = |sig: &Signature| -> Vec<String> {
                sig.functions().iter().map(|(n, _)| n.clone()).collect()
            };
            let rels = |sig: &Signature| -> Vec<String> {
                sig.relations().iter().map(|(n, _)| n.clone()).collect()
            };

            let mut rng = common::rng(0xE5);
            let mut scrutinize: Vec<(FinModel, PairRelation)> = Vec::new();
            let check = |m: FinModel,
                             fs: &[String],
                             rs: &[String],
                             keep: &mut Vec<(FinModel, PairRelation)>,
                             sample: bool|
             -> Result<(), String> {
                let k = m.size();
                let mut r = PairRelation::full(k);
                let mut iterations = 0;
                loop {
                    let next = apply_f(&m, fs, rs, &r).map_err(err_str)?;
                    iterations += 1;
                    if next == r {
                        break;
                    }
                    r = next;
                    ensure!(
                        iterations <= k * k + 1,
                        "fixpoint took more than {} steps at k={k}",
                        k * k + 1
                    );
                }
                let direct = indist_fixpoint(&m, fs, rs).map_err(err_str)?;
                ensure!(direct == r, "library fixpoint differs from iteration");
                ensure!(r.is_equivalence(), "fixpoint is not an equivalence");
                let again = apply_f(&m, fs, rs, &r).map_err(err_str)?;
                ensure!(again == r, "fixpoint is not a congruence point");
                if sample {
                    keep.push((m, r));
                }
                Ok(())
            };

            // Exhaustive over all tables at k <= 3 for the two-relation
            // signature; random at k = 4 for the function signature.
            for k in 1..=3usize {
                for (i, m) in common::all_models(&rel_sig, k).into_iter().enumerate() {
                    let sample = i % 971 == 0;
                    check(m, &funs(&rel_sig), &rels(&rel_sig), &mut scrutinize, sample)?;
                }
            }
            for i in 0..500 {
                let m = common::random_model(&mut rng, &fun_sig, 4);
                check(m, &funs(&fun_sig), &rels(&fun_sig), &mut scrutinize, i % 29 == 0)?;
            }

            // Related elements satisfy the same formulas in one free
            // variable over the model's symbols.
            for (m, r) in &scrutinize {
                let sig = if m.function_names().count() == 0 {
                    &rel_sig
                } else {
                    &fun_sig
                };
                for _ in 0..20 {
                    let phi = common::random_formula(&mut rng, sig, 1, 3);
                    for x in 0..m.size() {
                        for y in 0..m.size() {
                            if !r.holds(x, y) {
                                continue;
                            }
                            let a = m.eval(&Env::new(vec![x], 0), &phi).map_err(err_str)?;
                            let b = m.eval(&Env::new(vec![y], 0), &phi).map_err(err_str)?;
                            ensure!(
                                a == b,
                                "related pair ({x},{y}) split by {}",
                                print_formula(&phi)
                            );
                        }
                    }
                }
            }

            // Minimization preserves evaluation.
            for _ in 0..200 {
                let phi = common::random_formula(&mut rng, &fun_sig, 2, 3);
                let k = rng.random_range(1..=4usize);
                let m = common::random_model(&mut rng, &fun_sig, k);
                let env = common::random_env(&mut rng, 2, k);
                let before = m.eval(&env, &phi).map_err(err_str)?;
                let (small, small_env) = minimize_model(&m, &env, &phi).map_err(err_str)?;
                ensure!(small.size() <= k, "quotient grew the model");
                let after = small.eval(&small_env, &phi).map_err(err_str)?;
                ensure!(before == after, "quotient flipped {}", print_formula(&phi));
            }
            Ok(())
        },
    );
}

/// Longest function nesting in any atom argument.
fn max_chain(phi: &Formula) -> usize {
    fn term(t: &Term) -> usize {
        match t {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(term).max().unwrap_or(0),
        }
    }
    match phi {
        Formula::Falsum => 0,
        Formula::Atom(_, args) => args.iter().map(term).max().unwrap_or(0),
        Formula::Bin(_, lhs, rhs) => max_chain(lhs).max(max_chain(rhs)),
        Formula::Quant(_, body) => max_chain(body),
    }
}

#[test]
fn criterion_07_monadic_decision_agrees_with_search() {
    gate(
        "total monadic decision versus bounded search",
        Duration::from_secs(300),
        || {
            let sig = Signature::make(&[("g", 1)], &[("P", 1), ("Q", 1)]).map_err(err_str)?;
            let cfg = SearchConfig::default();
            let mut rng = common::rng(0xF6);
            let mut done = 0;
            let mut attempts = 0;
            while done < 200 {
                attempts += 1;
                ensure!(attempts < 20_000, "corpus generation stalled");
                let phi = common::random_formula(&mut rng, &sig, 1, 3);
                // Function removal multiplies predicates, so keep the
                // decider within its default predicate guard: either no
                // functions, or one predicate with short chains.
                let (funs_used, rels_used) = phi.symbols();
                let chain = max_chain(&phi);
                let fun_free = funs_used.is_empty();
                if !(fun_free && rels_used.len() <= 2
                    || rels_used.len() <= 1 && chain <= 2)
                {
                    continue;
                }
                done += 1;

                let searched = search_up_to(&phi, &sig, 4, &cfg).map_err(err_str)?;
                let verdict = decide_monadic_full(&phi, &sig).map_err(err_str)?;
                match &verdict {
                    MonadicVerdict::Sat { model, env } => {
                        let ok = ModelChecker::new(model, &phi).eval(env).map_err(err_str)?;
                        ensure!(ok, "sat witness fails {}", print_formula(&phi));
                        // Function-free monadic formulas over two
                        // predicates have models within size 4, so the
                        // bounded search must agree there.
                        if fun_free {
                            ensure!(
                                model.size() <= 4,
                                "witness beats the small-model bound"
                            );
                            ensure!(
                                searched.is_sat(),
                                "search misses a model of size {} for {}",
                                model.size(),
                                print_formula(&phi)
                            );
                        } else {
                            ensure!(
                                model.size() <= 8,
                                "witness beats the small-model bound"
                            );
                        }
                    }
                    MonadicVerdict::Unsat => {
                        // For the function-free slice the size-4 search is
                        // exhaustive at the small-model bound, so this
                        // fully confirms the verdict; with a function it
                        // is a consistency check below the bound.
                        ensure!(
                            !searched.is_sat(),
                            "decider calls {} unsat but search found a model",
                            print_formula(&phi)
                        );
                    }
                }
                if searched.is_sat() {
                    ensure!(
                        verdict.is_sat(),
                        "search found a model but the decider says unsat for {}",
                        print_formula(&phi)
                    );
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_08_enumerator_fuel_and_powerset_count() {
    gate(
        "fuel threshold for the three-class formula",
        Duration::from_secs(10),
        || {
            let sig = Signature::make(&[], &[("P", 1), ("Q", 1)]).map_err(err_str)?;
            let phi = finsat::logic::parse_formula(
                "(and (exists x (and (P x) (Q x))) \
                  (and (exists x (and (P x) (-> (Q x) false))) \
                       (exists x (-> (P x) false))))",
                &sig,
            )
            .map_err(err_str)?;
            let cfg = SearchConfig::default();
            for fuel in 1..=5usize {
                let got = enumerate_fsat(&phi, &sig, fuel, &cfg).map_err(err_str)?;
                if fuel < 3 {
                    ensure!(!got.is_sat(), "three classes fit in {fuel} points");
                } else {
                    match got {
                        SearchOutcome::Sat { model, .. } => ensure!(
                            model.size() == 3,
                            "minimal witness has size {}",
                            model.size()
                        ),
                        other => return Err(format!("fuel {fuel} gave {other:?}")),
                    }
                }
            }
            let subsets: Vec<Vec<bool>> = weak_powerset(2).map_err(err_str)?.collect();
            ensure!(
                subsets.len() == 4,
                "powerset of a two-point universe has {} entries",
                subsets.len()
            );
            Ok(())
        },
    );
}

#[test]
fn criterion_09_heap_encoding_round_trips() {
    gate(
        "heap semantics matches relational satisfiability",
        Duration::from_secs(120),
        || {
            let sig = Signature::make(&[], &[("P", 2)]).map_err(err_str)?;
            let mut rng = common::rng(0x17);

            // Translation invariance: model evaluation agrees with heap
            // evaluation, for every model and assignment at k <= 2.
            for round in 0..40 {
                let phi = common::random_formula(&mut rng, &sig, 2, 3);
                let translated = msl_translation(&phi, &sig).map_err(err_str)?;
                for k in 1..=2usize {
                    for m in common::all_models(&sig, k) {
                        for x in 0..k {
                            for y in 0..k {
                                let env = Env::new(vec![x, y], 0);
                                let direct = m.eval(&env, &phi).map_err(err_str)?;
                                let (h, s) = model_to_heap(&m, &env).map_err(err_str)?;
                                let heaped =
                                    translated.holds_in(&h, &s).map_err(err_str)?;
                                ensure!(
                                    direct == heaped,
                                    "round {round}: translation flips {} at k={k}",
                                    print_formula(&phi)
                                );
                            }
                        }
                    }
                }
            }

            // The assertion that a cell exists equals carving it out with
            // a separating conjunction, on every heap up to three cells.
            let addrs = [0usize, 1, 2];
            let values = [None, Some(0), Some(2)];
            let mut heaps = Vec::new();
            for mask in 0..(1u32 << addrs.len()) {
                let picked: Vec<usize> =
                    addrs.iter().copied().filter(|a| mask >> *a & 1 == 1).collect();
                let mut contents = vec![Vec::new()];
                for _ in &picked {
                    let mut next = Vec::new();
                    for prefix in &contents {
                        for v1 in values {
                            for v2 in values {
                                let mut row: Vec<(Option<usize>, Option<usize>)> =
                                    prefix.clone();
                                row.push((v1, v2));
                                next.push(row);
                            }
                        }
                    }
                    contents = next;
                }
                for row in contents {
                    let cells: Vec<(usize, (Option<usize>, Option<usize>))> =
                        picked.iter().copied().zip(row).collect();
                    heaps.push(Heap::new(cells).map_err(err_str)?);
                }
            }
            ensure!(heaps.len() == 1000, "expected 1000 heaps, got {}", heaps.len());
            let stack = Stack::new(vec![Some(0), Some(2)], None);
            let terms = [None, Some(0), Some(1)];
            for h in &heaps {
                for t in terms {
                    for a in terms {
                        for b in terms {
                            let hooks = SlFormula::hooks(t, a, b);
                            let carved = SlFormula::star(
                                SlFormula::pointsto(t, a, b),
                                SlFormula::top(),
                            );
                            let lhs = eval_sl(h, &stack, &hooks, None, None).map_err(err_str)?;
                            let rhs = eval_sl(h, &stack, &carved, None, None).map_err(err_str)?;
                            ensure!(
                                lhs.value == rhs.value,
                                "hooks and star(pointsto, top) split on {:?}",
                                h.cells()
                            );
                        }
                    }
                }
            }

            // End to end: satisfiable relational sentences stay true
            // through the heap encoding and decode back to models.
            let cfg = SearchConfig::default();
            let mut done = 0;
            let mut attempts = 0;
            while done < 20 {
                attempts += 1;
                ensure!(attempts < 2000, "satisfiable corpus did not fill up");
                let body = common::random_formula(&mut rng, &sig, 2, 2);
                let phi = Formula::exists(Formula::exists(body));
                let (m, e) = match search_up_to(&phi, &sig, 2, &cfg).map_err(err_str)? {
                    SearchOutcome::Sat { model, env } => (model, env),
                    _ => continue,
                };
                let encoded = encode_fsat_to_msl(&phi, &sig).map_err(err_str)?;
                let (h, s) = model_to_heap(&m, &e).map_err(err_str)?;
                let ok = eval_sl(&h, &s, &encoded, None, None).map_err(err_str)?;
                ensure!(ok.value, "encoding fails on the flattened witness");
                let (back, back_env) = heap_to_model(&h, &s).map_err(err_str)?;
                let ok = back.eval(&back_env, &phi).map_err(err_str)?;
                ensure!(ok, "decoded model fails the source sentence");
                done += 1;
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_10_signature_classifier_table() {
    gate(
        "decidability verdicts across all small signatures",
        Duration::from_secs(60),
        || {
            // The four documented rows, verbatim.
            let rows: [(&[(&str, usize)], &[(&str, usize)], Verdict); 4] = [
                (
                    &[],
                    &[("P", 2)],
                    Verdict::Undecidable(UndecidableCase::WideRelation),
                ),
                (
                    &[("f", 2)],
                    &[("Q", 1)],
                    Verdict::Undecidable(UndecidableCase::WideFunction),
                ),
                (
                    &[("f", 1)],
                    &[("P", 1), ("Q", 0)],
                    Verdict::Decidable(DecidableCase::Monadic),
                ),
                (
                    &[("g", 5)],
                    &[("A", 0)],
                    Verdict::Decidable(DecidableCase::Propositional),
                ),
            ];
            for (funs, rels, want) in rows {
                let sig = Signature::make(funs, rels).map_err(err_str)?;
                let got = classify_signature(&sig);
                ensure!(got.verdict == want, "documented row misclassified: {sig:?}");
                ensure!(got.enumerable, "satisfiable formulas stay enumerable");
            }

            // Exhaustive over signatures with up to three symbols of
            // arity up to three, split any way between kinds.
            let mut seen = 0;
            for nf in 0..=3usize {
                for nr in 0..=3 - nf {
                    let mut fa = vec![0usize; nf];
                    loop {
                        let mut ra = vec![0usize; nr];
                        loop {
                            let funs: Vec<(String, usize)> = fa
                                .iter()
                                .enumerate()
                                .map(|(i, a)| (format!("f{i}"), *a))
                                .collect();
                            let rels: Vec<(String, usize)> = ra
                                .iter()
                                .enumerate()
                                .map(|(i, a)| (format!("r{i}"), *a))
                                .collect();
                            let mut sig = Signature::new();
                            for (n, a) in &funs {
                                sig.add_function(n, *a).map_err(err_str)?;
                            }
                            for (n, a) in &rels {
                                sig.add_relation(n, *a).map_err(err_str)?;
                            }
                            let got = classify_signature(&sig);
                            let wide_rel = ra.iter().any(|a| *a >= 2);
                            let unary_rel = ra.iter().any(|a| *a >= 1);
                            let wide_fun = fa.iter().any(|a| *a >= 2);
                            let want = if wide_rel {
                                Verdict::Undecidable(UndecidableCase::WideRelation)
                            } else if unary_rel && wide_fun {
                                Verdict::Undecidable(UndecidableCase::WideFunction)
                            } else if !wide_fun {
                                Verdict::Decidable(DecidableCase::Monadic)
                            } else {
                                Verdict::Decidable(DecidableCase::Propositional)
                            };
                            ensure!(
                                got.verdict == want,
                                "shape {fa:?}/{ra:?} classified as {:?}",
                                got.verdict
                            );
                            ensure!(got.enumerable, "enumerability is unconditional");
                            seen += 1;
                            if !bump(&mut ra, 3) {
                                break;
                            }
                        }
                        if !bump(&mut fa, 3) {
                            break;
                        }
                    }
                }
            }
            ensure!(seen == 313, "expected 313 shapes, saw {seen}");
            Ok(())
        },
    );
}

/// Odometer over arity vectors with entries `0..=max`.
fn bump(digits: &mut [usize], max: usize) -> bool {
    for d in digits.iter_mut() {
        if *d < max {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}
