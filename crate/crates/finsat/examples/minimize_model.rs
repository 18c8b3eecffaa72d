//! Shrinks a model to its distinguishable core.
//!
//! Six elements fall into two classes once only the symbols of the formula
//! can tell them apart, so the quotient has size 2.

use finsat::bisim::{indist_fixpoint, minimize_model};
use finsat::logic::{parse_formula, print_formula, Signature};
use finsat::semantics::{Env, FinModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sig = Signature::make(&[("f", 1)], &[("P", 1)])?;

    // P marks the even elements; f adds 2, so it preserves the marking.
    let mut m = FinModel::new(6)?;
    m.set_relation("P", 1, (0..6).map(|x| x % 2 == 0).collect())?;
    m.set_function("f", 1, (0..6).map(|x| (x + 2) % 6).collect())?;

    let phi = parse_formula("(forall x (iff (P (f x)) (P x)))", &sig)?;
    let env = Env::constant(0);
    println!("{}", print_formula(&phi));
    println!("  on the 6-element model: {}", m.eval(&env, &phi)?);

    // The fixpoint relates x and y when no formula over the listed symbols
    // distinguishes them; here that collapses each parity class.
    let rel = indist_fixpoint(&m, &["f".into()], &["P".into()])?;
    println!(
        "  indistinguishable pairs: {} of {}",
        rel.pair_count(),
        6 * 6
    );

    let (small, small_env) = minimize_model(&m, &env, &phi)?;
    println!("  minimized size: {}", small.size());
    let (_, table) = small.relation("P").expect("P is interpreted");
    println!("  P on the quotient = {table:?}");
    println!(
        "  formula still holds: {}",
        small.eval(&small_env, &phi)?
    );
    Ok(())
}
