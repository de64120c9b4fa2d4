//! Building finite categories, from the builder, from JSON, and catching
//! law violations.

use sievecalc::fincat::{load_table, validate, FIXTURES};
use sievecalc::{builtin, CategoryDoc};

fn main() -> sievecalc::Result<()> {
    let chain = CategoryDoc::new()
        .object("a")
        .object("b")
        .object("c")
        .arrow("f", "a", "b")
        .arrow("g", "b", "c")
        .arrow("gf", "a", "c")
        .compose("g", "f", "gf")
        .build()?;
    println!(
        "chain: {} objects, {} arrows",
        chain.num_objects(),
        chain.num_arrows()
    );
    for c in chain.objects() {
        let into: Vec<&str> = chain
            .arrows_into(c)
            .iter()
            .map(|&f| chain.arrow_name(f))
            .collect();
        println!(
            "  arrows into {}: {}",
            chain.object_name(c),
            into.join(", ")
        );
    }

    for name in FIXTURES {
        let cat = builtin(name)?;
        println!(
            "fixture {name}: {} objects, {} arrows",
            cat.num_objects(),
            cat.num_arrows()
        );
    }

    // `e∘e = z` but `z` does not behave like `e∘e` under further composition
    let broken = r#"{
        "objects": ["o"],
        "arrows": [{"name": "e", "dom": "o", "cod": "o"}, {"name": "z", "dom": "o", "cod": "o"}],
        "compose": [["e","e","z"], ["e","z","z"], ["z","e","e"], ["z","z","z"]]
    }"#;
    let report = validate(&load_table(broken)?);
    println!("broken monoid: {} violation(s)", report.violations.len());
    for v in &report.violations {
        println!("  {v}");
    }
    Ok(())
}
