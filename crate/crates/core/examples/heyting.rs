//! Meet, join, implication and pseudocomplement in the lattice of
//! topologies on the span `b <- a -> c`.

use sievecalc::topology::{enumerate_topologies, implication, join, negation};
use sievecalc::{builtin, Universe};

fn main() -> sievecalc::Result<()> {
    let uni = Universe::new(builtin("SPAN")?)?;
    let all = enumerate_topologies(&uni)?;
    let index = |t: &sievecalc::Topology| all.iter().position(|u| u == t).expect("enumerated");
    for (i, j) in all.iter().enumerate() {
        println!("#{i}: {}", j.describe());
    }
    println!();
    println!("pseudocomplements:");
    for (i, j) in all.iter().enumerate() {
        let n = negation(j);
        println!(
            "  not #{i} = #{}, not not #{i} = #{}",
            index(&n),
            index(&negation(&n))
        );
    }
    println!("implication table (row => column):");
    for a in &all {
        let row: Vec<String> = all
            .iter()
            .map(|b| implication(a, b).map(|t| format!("{:>2}", index(&t))))
            .collect::<sievecalc::Result<_>>()?;
        println!("  {}", row.join(" "));
    }
    let (x, y) = (&all[1], &all[2]);
    println!(
        "#1 v #2 = #{}, #1 ^ #2 = #{}",
        index(&join(x, y)?),
        index(&x.meet(y)?)
    );
    Ok(())
}
