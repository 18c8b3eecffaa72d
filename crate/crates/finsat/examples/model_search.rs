//! Searches increasing domain sizes for a model of a formula.

use finsat::logic::{parse_formula, Signature};
use finsat::search::{search_up_to, SearchConfig, SearchError, SearchOutcome};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sig = Signature::make(&[], &[("R", 2)])?;
    let cfg = SearchConfig::default();

    // An irreflexive transitive relation with at least one edge needs two
    // elements, so the search skips size 1 and stops at 2.
    let order = parse_formula(
        "(and (forall x (-> (R x x) false)) \
          (and (forall x (forall y (forall z (-> (and (R x y) (R y z)) (R x z))))) \
               (exists x (exists y (R x y)))))",
        &sig,
    )?;
    match search_up_to(&order, &sig, 4, &cfg)? {
        SearchOutcome::Sat { model, .. } => {
            let (_, table) = model.relation("R").expect("R is interpreted");
            println!("strict order fragment: sat at size {}", model.size());
            println!("  R = {table:?}");
        }
        other => println!("strict order fragment: {other:?}"),
    }

    // A contradiction never gets a model; the outcome records how far the
    // search looked, because a larger domain could still work in general.
    let contradiction = parse_formula(
        "(and (exists x (R x x)) (forall x (-> (R x x) false)))",
        &sig,
    )?;
    println!(
        "contradiction: {:?}",
        search_up_to(&contradiction, &sig, 4, &cfg)?
    );

    // The candidate ceiling cuts searches off before they enumerate more
    // than max_candidates model and assignment combinations.
    let tight = SearchConfig { max_candidates: 10 };
    match search_up_to(&order, &sig, 4, &tight) {
        Err(SearchError::CandidateCeiling { .. }) => {
            println!("ceiling of 10 candidates: search refused");
        }
        other => println!("unexpected outcome {other:?}"),
    }
    Ok(())
}
