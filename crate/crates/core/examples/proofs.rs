//! Deriving covering sieves from axioms, checking derivations, and what an
//! unprovable target looks like.

use sievecalc::proofsys::{check, prove, saturate, ProofOutcome};
use sievecalc::{CategoryDoc, Sieve, SieveFamily, Universe};

fn main() -> sievecalc::Result<()> {
    let cat = CategoryDoc::new()
        .object("a")
        .object("b")
        .object("c")
        .arrow("f", "a", "b")
        .arrow("g", "b", "c")
        .arrow("gf", "a", "c")
        .compose("g", "f", "gf")
        .build()?;
    let uni = Universe::new(cat)?;
    let cat = uni.cat();
    let (b, c) = (cat.object("b")?, cat.object("c")?);
    let axioms = SieveFamily::from_sieves(
        &uni,
        [
            &Sieve::new(cat, b, &[cat.arrow("f")?])?,
            &Sieve::new(cat, c, &[cat.arrow("g")?, cat.arrow("gf")?])?,
        ],
    )?;

    let sat = saturate(&axioms);
    println!(
        "saturated in {} round(s): {}",
        sat.rounds(),
        sat.topology().describe()
    );

    let target = Sieve::new(cat, c, &[cat.arrow("gf")?])?;
    match prove(&target, &axioms) {
        ProofOutcome::Proved(d) => {
            println!(
                "derivation of {} (depth {}):",
                target.display(cat),
                d.depth()
            );
            println!("{}", serde_json::to_string_pretty(&d.to_doc(cat)).unwrap());
            println!("checker: {:?}", check(&d, &axioms));
        }
        ProofOutcome::Refuted(r) => println!("unprovable; saturated: {}", r.saturated.describe()),
    }

    if let ProofOutcome::Refuted(r) = prove(&Sieve::empty(c), &axioms) {
        println!("the empty sieve on c is not derivable:");
        println!("{}", serde_json::to_string(&r.to_doc()).unwrap());
    }
    Ok(())
}
