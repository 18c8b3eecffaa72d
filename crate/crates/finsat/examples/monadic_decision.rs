//! Decides satisfiability outright for signatures with only unary symbols.

use finsat::logic::{parse_formula, print_formula, Signature};
use finsat::monadic::{
    decide_monadic_base_with_guard, decide_monadic_full, MonadicError, MonadicVerdict,
};
use finsat::search::{search_up_to, SearchConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sig = Signature::make(&[("g", 1)], &[("P", 1), ("Q", 1)])?;

    // Function removal costs one fresh predicate per relation and chain
    // shape, so the default guard favours formulas that lean on few
    // symbols at a time; this one uses P and g only.
    let sat = parse_formula(
        "(and (exists x (-> (P x) false)) (forall x (P (g x))))",
        &sig,
    )?;
    println!("{}", print_formula(&sat));
    match decide_monadic_full(&sat, &sig)? {
        MonadicVerdict::Sat { model, env } => {
            println!("  sat, witness size {}", model.size());
            println!("  witness checks out: {}", model.eval(&env, &sat)?);
        }
        MonadicVerdict::Unsat => println!("  unsat"),
    }

    // Unlike bounded search, an unsat answer here rules out every finite
    // size, not just the sizes tried.
    let unsat = parse_formula(
        "(and (forall x (P x)) (exists x (-> (P x) false)))",
        &sig,
    )?;
    println!("{}", print_formula(&unsat));
    println!("  verdict sat: {}", decide_monadic_full(&unsat, &sig)?.is_sat());
    let searched = search_up_to(&unsat, &sig, 3, &SearchConfig::default())?;
    println!("  bounded search agrees: {:?}", searched);

    // The subset scan is doubly exponential in the number of predicates,
    // so a guard refuses oversized signatures instead of hanging.
    let wide = Signature::make(
        &[],
        &[("A", 1), ("B", 1), ("C", 1), ("D", 1), ("E", 1)],
    )?;
    let probe = parse_formula("(exists x (A x))", &wide)?;
    match decide_monadic_base_with_guard(&probe, &wide, 4) {
        Err(MonadicError::GuardExceeded { count, guard }) => {
            println!("guard refused {count} predicates (limit {guard})");
        }
        other => println!("unexpected outcome {other:?}"),
    }
    Ok(())
}
