//! Sieves on a three-object chain: enumeration, generation from arrows,
//! pullback and composition.

use std::collections::BTreeMap;

use sievecalc::sieve::{compose_sieves, generate_sieve, pullback, Presieve};
use sievecalc::{CategoryDoc, Sieve, Universe};

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
    for c in cat.objects() {
        let list: Vec<String> = uni.sieves(c).iter().map(|s| s.display(cat)).collect();
        println!("sieves on {}: {}", cat.object_name(c), list.join("  "));
    }

    let c = cat.object("c")?;
    let g = cat.arrow("g")?;
    let generated = generate_sieve(cat, &Presieve::new(cat, c, &[g])?);
    println!("generated by g: {}", generated.display(cat));

    let f = cat.arrow("f")?;
    let on_b = pullback(cat, g, &generated)?;
    let on_a = pullback(cat, cat.arrow("gf")?, &generated)?;
    println!(
        "g*(<g>) = {}, (gf)*(<g>) = {}",
        on_b.display(cat),
        on_a.display(cat)
    );

    // compose <g> with, over g, the sieve generated by f on b; over gf, everything on a
    let b = cat.object("b")?;
    let a = cat.object("a")?;
    let by_f = generate_sieve(cat, &Presieve::new(cat, b, &[f])?);
    let parts = BTreeMap::from([(g, by_f), (cat.arrow("gf")?, Sieve::maximal(cat, a))]);
    println!(
        "<g> * {{...}} = {}",
        compose_sieves(cat, &generated, &parts)?.display(cat)
    );
    Ok(())
}
