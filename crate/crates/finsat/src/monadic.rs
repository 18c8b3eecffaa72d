//! Total decision procedures for finite satisfiability over monadic
//! signatures, where every symbol has arity at most one.
//!
//! Discernability of symbols never obstructs these deciders: symbols are
//! concrete strings, so whether two of them can be told apart is always
//! decidable and needs no extra machinery.

use thiserror::Error;

use crate::logic::{Formula, LogicError, Signature};
use crate::passes::{
    compact_symbols, lift_arity0_to1, propositional_collapse, remove_monadic_functions,
    run_backward, PassError, ReductionStep,
};
use crate::semantics::{Env, FinModel, ModelChecker, ModelError};
use crate::toolkit::{weak_powerset, ToolkitError};

/// Default bound on the number of unary predicates the subset scan accepts;
/// the scan visits all nonempty subsets of a `2^n`-point space.
pub const DEFAULT_PREDICATE_GUARD: usize = 4;

#[derive(Debug, Error)]
pub enum MonadicError {
    #[error("{count} unary predicates exceed the scan guard {guard}")]
    GuardExceeded { count: usize, guard: usize },
    #[error("function symbol {name} is not allowed here")]
    UnexpectedFunction { name: String },
    #[error("relation {name} has arity {arity}, expected 1")]
    NonUnaryRelation { name: String, arity: usize },
    #[error("symbol {name} has arity {arity}, so the signature is not monadic")]
    NotMonadic { name: String, arity: usize },
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Pass(#[from] PassError),
    #[error(transparent)]
    Toolkit(#[from] ToolkitError),
}

/// A total verdict: unlike bounded search, `Unsat` rules out models of
/// every finite size.
#[derive(Debug, Clone)]
pub enum MonadicVerdict {
    /// First witness in subset-then-assignment order; `eval` is true on it.
    Sat { model: FinModel, env: Env },
    Unsat,
}

impl MonadicVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, MonadicVerdict::Sat { .. })
    }
}

pub fn decide_monadic_base(
    phi: &Formula,
    sig: &Signature,
) -> Result<MonadicVerdict, MonadicError> {
    decide_monadic_base_with_guard(phi, sig, DEFAULT_PREDICATE_GUARD)
}

/// Decides satisfiability for a function-free signature of `n` unary
/// relations. Every satisfiable such formula has a model whose elements
/// are distinct bit vectors read componentwise by the predicates, so the
/// scan over nonempty subsets of `B^n` crossed with assignments of the
/// free variables is complete, not just a semi-decision.
pub fn decide_monadic_base_with_guard(
    phi: &Formula,
    sig: &Signature,
    guard: usize,
) -> Result<MonadicVerdict, MonadicError> {
    sig.validate_formula(phi)?;
    if let Some((name, _)) = sig.functions().first() {
        return Err(MonadicError::UnexpectedFunction { name: name.clone() });
    }
    for (name, arity) in sig.relations() {
        if *arity != 1 {
            return Err(MonadicError::NonUnaryRelation {
                name: name.clone(),
                arity: *arity,
            });
        }
    }
    let n = sig.relations().len();
    if n > guard {
        return Err(MonadicError::GuardExceeded { count: n, guard });
    }

    let points: Vec<Vec<bool>> = weak_powerset(n)?.collect();
    let free = phi.free_vars();
    let width = phi.fresh_free();
    for mask in weak_powerset(points.len())? {
        let subset: Vec<&Vec<bool>> = points
            .iter()
            .zip(&mask)
            .filter(|(_, &keep)| keep)
            .map(|(p, _)| p)
            .collect();
        if subset.is_empty() {
            continue;
        }
        let k = subset.len();
        let mut model = FinModel::new(k)?;
        for (i, (rname, _)) in sig.relations().iter().enumerate() {
            model.set_relation(rname, 1, subset.iter().map(|p| p[i]).collect())?;
        }
        let mc = ModelChecker::new(&model, phi);
        let mut prefix = vec![0usize; width];
        let mut witness = None;
        loop {
            let env = Env::new(prefix.clone(), 0);
            if mc.eval(&env)? {
                witness = Some(env);
                break;
            }
            if !bump_at(&mut prefix, &free, k) {
                break;
            }
        }
        if let Some(env) = witness {
            return Ok(MonadicVerdict::Sat { model, env });
        }
    }
    Ok(MonadicVerdict::Unsat)
}

/// Advances only the listed positions, each through `0..k`; false once all
/// combinations are exhausted.
fn bump_at(prefix: &mut [usize], positions: &[usize], k: usize) -> bool {
    for &i in positions {
        if prefix[i] + 1 < k {
            prefix[i] += 1;
            return true;
        }
        prefix[i] = 0;
    }
    false
}

pub fn decide_monadic_full(
    phi: &Formula,
    sig: &Signature,
) -> Result<MonadicVerdict, MonadicError> {
    decide_monadic_full_with_guard(phi, sig, DEFAULT_PREDICATE_GUARD)
}

/// Decides satisfiability for any monadic signature, and for degenerate
/// signatures where every relation is nullary regardless of function
/// arities. Degenerate inputs collapse to their propositional skeleton
/// first; then nullary symbols are lifted to arity one, unused symbols
/// dropped, function chains flattened into fresh predicates, and the
/// subset scan finishes. A `Sat` witness is transported back through every
/// pass, so it lives over the original signature.
pub fn decide_monadic_full_with_guard(
    phi: &Formula,
    sig: &Signature,
    guard: usize,
) -> Result<MonadicVerdict, MonadicError> {
    sig.validate_formula(phi)?;
    let degenerate = sig.relations().iter().all(|(_, a)| *a == 0);
    if !degenerate {
        let wide = sig
            .functions()
            .iter()
            .chain(sig.relations())
            .find(|(_, a)| *a > 1);
        if let Some((name, arity)) = wide {
            return Err(MonadicError::NotMonadic {
                name: name.clone(),
                arity: *arity,
            });
        }
    }

    let mut steps: Vec<ReductionStep> = Vec::new();
    let mut cur = phi.clone();
    let mut csig = sig.clone();
    let mut push = |step: ReductionStep, cur: &mut Formula, csig: &mut Signature| {
        *cur = step.formula.clone();
        *csig = step.target_sig.clone();
        steps.push(step);
    };
    if degenerate {
        push(propositional_collapse(&cur, &csig)?, &mut cur, &mut csig);
    }
    push(lift_arity0_to1(&cur, &csig)?, &mut cur, &mut csig);
    push(compact_symbols(&cur, &csig)?, &mut cur, &mut csig);
    push(remove_monadic_functions(&cur, &csig)?, &mut cur, &mut csig);

    match decide_monadic_base_with_guard(&cur, &csig, guard)? {
        MonadicVerdict::Sat { model, env } => {
            let (back_m, back_e) = run_backward(&steps, &model, &env)?;
            Ok(MonadicVerdict::Sat {
                model: back_m,
                env: back_e,
            })
        }
        MonadicVerdict::Unsat => Ok(MonadicVerdict::Unsat),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula, Term};
    use crate::search::{search_up_to, SearchConfig, SearchOutcome};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn base_finds_the_separating_point() {
        let sig = Signature::make(&[], &[("P", 1), ("Q", 1)]).unwrap();
        let phi = parse_formula("(exists x (and (P x) (-> (Q x) false)))", &sig).unwrap();
        let v = decide_monadic_base(&phi, &sig).unwrap();
        let MonadicVerdict::Sat { model, env } = v else {
            panic!("expected Sat");
        };
        assert_eq!(model.size(), 1);
        assert!(model.relation_holds("P", &[0]).unwrap());
        assert!(!model.relation_holds("Q", &[0]).unwrap());
        assert!(model.eval(&env, &phi).unwrap());
    }

    #[test]
    fn base_refutes_a_contradiction() {
        let sig = Signature::make(&[], &[("P", 1)]).unwrap();
        let phi = parse_formula(
            "(and (forall x (P x)) (exists x (-> (P x) false)))",
            &sig,
        )
        .unwrap();
        assert!(!decide_monadic_base(&phi, &sig).unwrap().is_sat());
    }

    #[test]
    fn base_handles_free_variables_and_singletons() {
        let sig = Signature::make(&[], &[("P", 1)]).unwrap();
        let phi = parse_formula("(exists x (P x))", &sig).unwrap();
        let MonadicVerdict::Sat { model, .. } = decide_monadic_base(&phi, &sig).unwrap() else {
            panic!("expected Sat");
        };
        assert_eq!(model.size(), 1);

        let open = parse_formula("(P x)", &sig).unwrap();
        let MonadicVerdict::Sat { model, env } = decide_monadic_base(&open, &sig).unwrap() else {
            panic!("expected Sat");
        };
        assert!(model.relation_holds("P", &[env.lookup(0)]).unwrap());
    }

    #[test]
    fn base_rejects_out_of_scope_signatures() {
        let funs = Signature::make(&[("f", 1)], &[("P", 1)]).unwrap();
        let phi = parse_formula("(P x)", &funs).unwrap();
        assert!(matches!(
            decide_monadic_base(&phi, &funs),
            Err(MonadicError::UnexpectedFunction { .. })
        ));

        let wide = Signature::make(&[], &[("R", 2)]).unwrap();
        let phi = parse_formula("(R x x)", &wide).unwrap();
        assert!(matches!(
            decide_monadic_base(&phi, &wide),
            Err(MonadicError::NonUnaryRelation { .. })
        ));

        let five = Signature::make(
            &[],
            &[("P0", 1), ("P1", 1), ("P2", 1), ("P3", 1), ("P4", 1)],
        )
        .unwrap();
        let phi = parse_formula("(P0 x)", &five).unwrap();
        assert!(matches!(
            decide_monadic_base(&phi, &five),
            Err(MonadicError::GuardExceeded { count: 5, guard: 4 })
        ));
    }

    #[test]
    fn full_decides_the_degenerate_fragment() {
        let sig = Signature::make(&[("g", 2)], &[("A", 0)]).unwrap();
        let a = Formula::atom("A", vec![]);
        let contradiction = Formula::and(a.clone(), Formula::neg(a.clone()));
        assert!(!decide_monadic_full(&contradiction, &sig)
            .unwrap()
            .is_sat());

        let MonadicVerdict::Sat { model, env } = decide_monadic_full(&a, &sig).unwrap() else {
            panic!("expected Sat");
        };
        assert!(model.eval(&env, &a).unwrap());
    }

    #[test]
    fn full_decides_function_chains() {
        let sig = Signature::make(&[("f", 1)], &[("P", 1)]).unwrap();
        let phi = parse_formula("(and (P (f x)) (exists y (-> (P y) false)))", &sig).unwrap();
        let MonadicVerdict::Sat { model, env } = decide_monadic_full(&phi, &sig).unwrap() else {
            panic!("expected Sat");
        };
        assert!(model.eval(&env, &phi).unwrap());
        assert!(model.size() >= 2, "needs a point inside P and one outside");
    }

    #[test]
    fn full_rejects_wide_relations() {
        let sig = Signature::make(&[], &[("R", 2)]).unwrap();
        let phi = parse_formula("(R x x)", &sig).unwrap();
        assert!(matches!(
            decide_monadic_full(&phi, &sig),
            Err(MonadicError::NotMonadic { .. })
        ));
    }

    #[test]
    fn full_handles_formulas_without_atoms() {
        let sig = Signature::new();
        assert!(!decide_monadic_full(&Formula::Falsum, &sig).unwrap().is_sat());
        assert!(decide_monadic_full(&Formula::neg(Formula::Falsum), &sig)
            .unwrap()
            .is_sat());
    }

    fn random_monadic(rng: &mut ChaCha8Rng, depth: usize, binders: usize) -> Formula {
        if depth == 0 || rng.random_range(0..4) == 0 {
            if rng.random_range(0..8) == 0 {
                return Formula::Falsum;
            }
            let mut t = Term::var(rng.random_range(0..binders.max(1)));
            for _ in 0..rng.random_range(0..=2) {
                t = Term::app("f", vec![t]);
            }
            return Formula::atom("P", vec![t]);
        }
        match rng.random_range(0..5) {
            0 => Formula::and(
                random_monadic(rng, depth - 1, binders),
                random_monadic(rng, depth - 1, binders),
            ),
            1 => Formula::or(
                random_monadic(rng, depth - 1, binders),
                random_monadic(rng, depth - 1, binders),
            ),
            2 => Formula::implies(
                random_monadic(rng, depth - 1, binders),
                random_monadic(rng, depth - 1, binders),
            ),
            3 => Formula::forall(random_monadic(rng, depth - 1, binders + 1)),
            _ => Formula::exists(random_monadic(rng, depth - 1, binders + 1)),
        }
    }

    #[test]
    fn full_agrees_with_bounded_search() {
        let sig = Signature::make(&[("f", 1)], &[("P", 1)]).unwrap();
        let cfg = SearchConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..40 {
            let phi = random_monadic(&mut rng, 3, 0);
            let verdict = decide_monadic_full(&phi, &sig).unwrap();
            let searched = search_up_to(&phi, &sig, 4, &cfg).unwrap();
            match &verdict {
                MonadicVerdict::Sat { model, env } => {
                    assert!(model.eval(env, &phi).unwrap(), "witness must check out");
                }
                MonadicVerdict::Unsat => {
                    assert!(
                        !searched.is_sat(),
                        "total refutation contradicts a found model: {phi:?}"
                    );
                }
            }
            if let SearchOutcome::Sat { .. } = searched {
                assert!(verdict.is_sat(), "search witness contradicts Unsat: {phi:?}");
            }
        }
    }
}
