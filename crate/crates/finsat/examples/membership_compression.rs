//! Compresses a one-relation model into a pure membership model whose
//! elements are hereditarily finite sets.

use finsat::hfs::{build_membership_model, Hfs};
use finsat::logic::{parse_formula, print_formula, Signature};
use finsat::passes::compress_to_membership;
use finsat::search::{search_up_to, SearchConfig, SearchOutcome};
use finsat::semantics::ModelChecker;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Sets ignore order and repetition, so both constructions below build
    // the same one-element set.
    let empty = Hfs::empty();
    let a = Hfs::from_children(vec![empty.clone(), empty.clone()]);
    let b = Hfs::singleton(empty.clone());
    println!("{{0,0}} == {{0}}: {}", a == b);
    println!("numeral 3: cardinality {}, rank {}", Hfs::numeral(3).card(), Hfs::numeral(3).rank());
    let pair = Hfs::opair(Hfs::numeral(0), Hfs::numeral(1));
    println!("ordered pair (0,1): cardinality {}", pair.card());

    // Encoding a model: elements become numerals, true tuples become
    // nested pairs, and one set collects each.
    let sig = Signature::make(&[], &[("R", 2)])?;
    let phi = parse_formula("(exists x (exists y (and (R x y) (-> (R y x) false))))", &sig)?;
    println!("source: {}", print_formula(&phi));

    let (m, e) = match search_up_to(&phi, &sig, 2, &SearchConfig::default())? {
        SearchOutcome::Sat { model, env } => (model, env),
        other => panic!("source formula should be satisfiable, got {other:?}"),
    };
    let encoded = build_membership_model(&m)?;
    println!(
        "membership universe: {} sets (element codes at {:?})",
        encoded.universe.len(),
        encoded.element_index
    );

    // The reduction pass wraps the same encoding with a formula
    // translation, so satisfiability transfers in both directions.
    let step = compress_to_membership(&phi, &sig)?;
    println!(
        "pass {}: target relations {:?}",
        step.name,
        step.target_sig.relations()
    );
    let (tm, te) = step.forward(&m, &e)?;
    println!("forward model size: {}", tm.size());
    let holds = ModelChecker::new(&tm, &step.formula).eval(&te)?;
    println!("translated formula on it: {holds}");

    let (bm, be) = step.backward(&tm, &te)?;
    println!(
        "backward model size {}, source formula holds: {}",
        bm.size(),
        bm.eval(&be, &phi)?
    );
    Ok(())
}
