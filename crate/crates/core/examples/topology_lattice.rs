//! All topologies on a category, their order, and generation from sieves.

use sievecalc::topology::{enumerate_topologies, generate_topology, hasse, lattice_dot};
use sievecalc::{builtin, Sieve, SieveFamily, Universe};

fn main() -> sievecalc::Result<()> {
    for name in ["C1", "C2", "D2", "M2", "SPAN"] {
        let uni = Universe::new(builtin(name)?)?;
        let all = enumerate_topologies(&uni)?;
        println!(
            "{name}: {} topologies, {} covering pairs",
            all.len(),
            hasse(&all).len()
        );
    }

    let uni = Universe::new(builtin("C2")?)?;
    let cat = uni.cat();
    let all = enumerate_topologies(&uni)?;
    for (i, j) in all.iter().enumerate() {
        println!("  #{i}: {}", j.describe());
    }
    print!("{}", lattice_dot(&all));

    let a = cat.object("a")?;
    let empty_on_a = SieveFamily::from_sieves(&uni, [&Sieve::empty(a)])?;
    let j = generate_topology(&empty_on_a);
    println!("generated by the empty sieve on a: {}", j.describe());
    println!("as JSON: {}", serde_json::to_string(&j.to_doc()).unwrap());
    Ok(())
}
