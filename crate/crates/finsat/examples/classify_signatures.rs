//! Sorts signatures by where finite satisfiability lands: decidable
//! fragments on one side, relation and function shapes that encode
//! arbitrary computation on the other.

use finsat::classify::classify_signature;
use finsat::logic::Signature;

fn describe(sig: &Signature) -> String {
    let funs: Vec<String> = sig
        .functions()
        .iter()
        .map(|(n, a)| format!("{n}/{a}"))
        .collect();
    let rels: Vec<String> = sig
        .relations()
        .iter()
        .map(|(n, a)| format!("{n}/{a}"))
        .collect();
    format!("functions [{}] relations [{}]", funs.join(" "), rels.join(" "))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rows = [
        Signature::make(&[], &[("P", 2)])?,
        Signature::make(&[("f", 2)], &[("Q", 1)])?,
        Signature::make(&[("f", 1)], &[("P", 1), ("Q", 0)])?,
        Signature::make(&[("g", 5)], &[("A", 0)])?,
        Signature::make(&[], &[])?,
    ];
    for sig in &rows {
        let c = classify_signature(sig);
        println!(
            "{:48} -> {} ({}), enumerable: {}",
            describe(sig),
            c.verdict.family(),
            c.verdict.case(),
            c.enumerable
        );
    }

    // The verdict is a promise about machinery: decidable shapes feed the
    // total decision procedure, undecidable ones admit the encodings that
    // embed arbitrary binary-relation problems.
    let c = classify_signature(&rows[0]);
    println!("note: {}", c.note);
    Ok(())
}
