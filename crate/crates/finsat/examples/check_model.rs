//! Evaluates formulas on a hand-built finite model.
//!
//! The model is a directed 3-cycle: a successor function `f` and an edge
//! relation `P` that holds exactly on the successor pairs.

use finsat::logic::{parse_formula, print_formula, Signature};
use finsat::semantics::{Env, FinModel, ModelChecker};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sig = Signature::make(&[("f", 1)], &[("P", 2)])?;

    let mut m = FinModel::new(3)?;
    m.set_function("f", 1, vec![1, 2, 0])?;
    // Binary tables are indexed row-major: entry for (x, y) sits at 3x + y.
    let mut edges = vec![false; 9];
    for x in 0..3 {
        edges[3 * x + (x + 1) % 3] = true;
    }
    m.set_relation("P", 2, edges)?;

    let closed = parse_formula("(forall x (P x (f x)))", &sig)?;
    println!("{}", print_formula(&closed));
    println!("  holds: {}", m.eval(&Env::constant(0), &closed)?);

    // Free variables are numbered in order of first occurrence, so the
    // environment prefix below binds x then y.
    let open = parse_formula("(P x y)", &sig)?;
    println!("{}", print_formula(&open));
    for (x, y) in [(0, 1), (1, 0), (2, 0)] {
        let env = Env::new(vec![x, y], 0);
        println!("  at x={x}, y={y}: {}", m.eval(&env, &open)?);
    }

    // The memoizing checker computes the same answers as the plain
    // evaluator, one quantifier table at a time instead of by recursion.
    let deep = parse_formula(
        "(forall x (exists y (and (P x y) (-> (P y x) false))))",
        &sig,
    )?;
    let checker = ModelChecker::new(&m, &deep);
    println!("{}", print_formula(&deep));
    println!(
        "  checker: {}, plain evaluator: {}",
        checker.eval(&Env::constant(0))?,
        m.eval(&Env::constant(0), &deep)?
    );
    Ok(())
}
