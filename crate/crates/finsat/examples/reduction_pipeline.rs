//! Runs the full reduction chain down to a single binary relation and
//! transports a witness model through it in both directions.

use finsat::logic::{parse_formula, print_formula, Signature};
use finsat::passes::{pipeline_to_binary, run_backward, run_forward};
use finsat::search::{search_up_to, SearchConfig, SearchOutcome};
use finsat::semantics::ModelChecker;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sig = Signature::make(&[("f", 1)], &[("P", 2), ("Q", 1)])?;
    let phi = parse_formula("(exists x (and (P x (f x)) (Q x)))", &sig)?;
    println!("source: {}", print_formula(&phi));

    let steps = pipeline_to_binary(&phi, &sig)?;
    for step in &steps {
        println!(
            "  {} -> functions {:?}, relations {:?}",
            step.name,
            step.target_sig.functions(),
            step.target_sig.relations()
        );
    }
    let last = steps.last().expect("the chain is never empty");
    println!("target formula size: {}", last.formula.size());

    // Satisfiability is preserved in both directions: a source model maps
    // to a target model and back.
    let (m, e) = match search_up_to(&phi, &sig, 2, &SearchConfig::default())? {
        SearchOutcome::Sat { model, env } => (model, env),
        other => panic!("source formula should be satisfiable, got {other:?}"),
    };
    println!("source witness: size {}", m.size());

    let (tm, te) = run_forward(&steps, &m, &e)?;
    println!("forward transport: size {}", tm.size());
    let holds = ModelChecker::new(&tm, &last.formula).eval(&te)?;
    println!("  target formula on it: {holds}");

    let (bm, be) = run_backward(&steps, &tm, &te)?;
    println!("backward transport: size {}", bm.size());
    println!("  source formula on it: {}", bm.eval(&be, &phi)?);
    Ok(())
}
