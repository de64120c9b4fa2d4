//! Open, closed and quasi-closed topologies of subterminals, Booleanization,
//! the dense-closed factorization, skeletality and atoms.

use sievecalc::subtopos::{
    atoms, booleanization, closed_topology, dense_closed_factorization, ideals, is_boolean,
    is_dense, is_skeletal, is_two_valued, j_ideals, open_topology, quasiclosed_topology,
};
use sievecalc::topology::enumerate_topologies;
use sievecalc::{builtin, Topology, Universe};

fn main() -> sievecalc::Result<()> {
    let uni = Universe::new(builtin("SPAN")?)?;
    let cat = uni.cat();
    let bottom = Topology::bottom(&uni);
    println!(
        "ideals: {}",
        ideals(cat)?
            .iter()
            .map(|u| u.display(cat))
            .collect::<Vec<_>>()
            .join(" ")
    );
    for u in j_ideals(&bottom)? {
        println!("U = {}", u.display(cat));
        println!("  open:   {}", open_topology(&bottom, &u)?.describe());
        println!("  closed: {}", closed_topology(&bottom, &u)?.describe());
        println!(
            "  qc:     {}",
            quasiclosed_topology(&bottom, &u)?.describe()
        );
    }
    let b = booleanization(&bottom);
    println!(
        "Booleanization: {} (Boolean: {})",
        b.describe(),
        is_boolean(&b)
    );

    let all = enumerate_topologies(&uni)?;
    for upper in &all {
        let middle = dense_closed_factorization(upper, &bottom)?;
        let m = all.iter().position(|t| *t == middle).expect("enumerated");
        println!(
            "{:<60} middle #{m}, dense {}, skeletal {}",
            upper.describe(),
            is_dense(upper, &bottom)?,
            is_skeletal(upper, &bottom)?
        );
    }
    for a in atoms(&bottom)? {
        println!(
            "atom: {} (two-valued: {})",
            a.describe(),
            is_two_valued(&a)?
        );
    }
    Ok(())
}
