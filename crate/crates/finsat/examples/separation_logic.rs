//! Evaluates separation logic on concrete heaps and encodes
//! binary-relation satisfiability into the minimal memory fragment.

use finsat::logic::{parse_formula, print_formula, Signature};
use finsat::search::{search_up_to, SearchConfig, SearchOutcome};
use finsat::seplog::{
    encode_fsat_to_msl, eval_sl, heap_to_model, model_to_heap, parse_sl, print_sl, Heap, Stack,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Two cells: address 1 stores (2, null) and address 2 stores nothing.
    let h = Heap::new(vec![(1, (Some(2), None)), (2, (None, None))])?;
    let s = Stack::new(vec![Some(1), Some(2)], None);

    // Free names bind to stack slots in order of first occurrence, so x
    // reads slot 0 and y slot 1.
    for src in [
        "(hooks x y null)",
        "(pointsto x y null)",
        "(star (pointsto x y null) (pointsto y null null))",
        "(exists p (hooks p null null))",
    ] {
        let phi = parse_sl(src)?;
        let verdict = eval_sl(&h, &s, &phi, None, None)?;
        println!("{}: {}", print_sl(&phi), verdict.value);
    }

    // Separating implication quantifies over extension heaps, so its
    // evaluation takes an explicit cell bound and flags the result.
    let wand = parse_sl("(wand (pointsto p null null) (hooks p null null))")?;
    let grown = Stack::new(vec![Some(5)], None);
    let verdict = eval_sl(&Heap::empty(), &grown, &wand, None, Some(1))?;
    println!(
        "{}: {} (bounded: {})",
        print_sl(&wand),
        verdict.value,
        verdict.wand_bounded
    );

    // Satisfiability of a formula over one binary relation transfers to
    // the fragment with only hooks, falsity, connectives and quantifiers.
    let sig = Signature::make(&[], &[("P", 2)])?;
    let phi = parse_formula("(exists x (exists y (and (P x y) (P y x))))", &sig)?;
    let encoded = encode_fsat_to_msl(&phi, &sig)?;
    println!("source: {}", print_formula(&phi));
    println!("encoded: {}", print_sl(&encoded));

    let (m, e) = match search_up_to(&phi, &sig, 2, &SearchConfig::default())? {
        SearchOutcome::Sat { model, env } => (model, env),
        other => panic!("source formula should be satisfiable, got {other:?}"),
    };
    let (wh, ws) = model_to_heap(&m, &e)?;
    println!("witness model becomes a heap with {} cells", wh.len());
    println!(
        "encoded formula on that heap: {}",
        eval_sl(&wh, &ws, &encoded, None, None)?.value
    );

    let (back, back_env) = heap_to_model(&wh, &ws)?;
    println!(
        "heap read back as a model of size {}, source holds: {}",
        back.size(),
        back.eval(&back_env, &phi)?
    );
    Ok(())
}
