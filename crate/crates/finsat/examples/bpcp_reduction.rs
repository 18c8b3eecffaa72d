//! Encodes a bounded card-matching problem as a first-order formula and
//! reads a solution back out of a model.

use finsat::bpcp::{
    bits_to_string, build_bn, derivable, encode_phi, extract_solution, sig_bpcp, solve_bpcp,
    BpcpInstance,
};
use finsat::semantics::ModelChecker;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Each card stacks a top string over a bottom string; a solution is a
    // nonempty card sequence whose tops and bottoms spell the same string.
    let deck = BpcpInstance::from_strings(&[("1", "11"), ("11", "1")])?;

    match solve_bpcp(&deck, 6) {
        Some(s) => println!("direct search: solution {}", bits_to_string(&s)),
        None => println!("direct search: nothing up to length 6"),
    }
    let s = [true, true, true];
    println!("derivable(111, 111): {}", derivable(&deck, &s, &s));

    // The encoding is one sentence over a fixed signature; the intended
    // model interprets strings up to a length cutoff.
    let phi = encode_phi(&deck);
    let sig = sig_bpcp();
    println!(
        "encoding: formula size {}, relations {:?}",
        phi.size(),
        sig.relations()
    );

    let (model, env) = build_bn(&deck, 3)?;
    println!("intended model over strings of length <= 3: size {}", model.size());
    let holds = ModelChecker::new(&model, &phi).eval(&env)?;
    println!("encoding holds on it: {holds}");

    let recovered = extract_solution(&deck, &model, &env)?;
    println!("extracted solution: {}", bits_to_string(&recovered));

    // A deck whose cards always leave the bottom longer has no solution,
    // and its encoding fails on the intended models.
    let stuck = BpcpInstance::from_strings(&[("1", "11")])?;
    println!("stuck deck solvable up to 6: {:?}", solve_bpcp(&stuck, 6).is_some());
    let (sm, se) = build_bn(&stuck, 3)?;
    let stuck_holds = ModelChecker::new(&sm, &encode_phi(&stuck)).eval(&se)?;
    println!("stuck encoding on its intended model: {stuck_holds}");
    Ok(())
}
