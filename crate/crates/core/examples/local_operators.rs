//! Closure of sieves, the internal Heyting operations on sieves and
//! relativization of one local operator at another.

use sievecalc::localop::{
    classify, closed_sieves, internal_implies, internal_or, relativization_witness, relativize,
};
use sievecalc::topology::enumerate_topologies;
use sievecalc::{builtin, Sieve, Universe};

fn main() -> sievecalc::Result<()> {
    let uni = Universe::new(builtin("C2")?)?;
    let cat = uni.cat();
    let all = enumerate_topologies(&uni)?;
    let (bottom, dense, closed_a) = (&all[0], &all[1], &all[2]);
    let b = cat.object("b")?;
    let f = cat.arrow("f")?;
    let by_f = Sieve::new(cat, b, &[f])?;
    let empty = Sieve::empty(b);

    println!(
        "or({}, {}) = {}",
        by_f.display(cat),
        empty.display(cat),
        internal_or(cat, &by_f, &empty)?.display(cat)
    );
    println!(
        "implies(M_b, {}) = {}",
        by_f.display(cat),
        internal_implies(cat, &Sieve::maximal(cat, b), &by_f)?.display(cat)
    );

    for (name, j) in [
        ("bottom", bottom),
        ("dense", dense),
        ("closed{a}", closed_a),
    ] {
        let closed: Vec<String> = closed_sieves(j, b)?
            .iter()
            .map(|s| s.display(cat))
            .collect();
        println!(
            "{name}: closure of {} is {}; closed sieves on b: {}",
            empty.display(cat),
            classify(j, &empty)?.display(cat),
            closed.join(", ")
        );
    }

    let rel = relativize(&all[3], dense)?;
    for (s, t) in rel.pairs(b) {
        println!(
            "top relativized at dense: {} -> {}",
            s.display(cat),
            t.display(cat)
        );
    }
    match relativization_witness(closed_a, dense)? {
        Some((s, ks)) => println!(
            "closed{{a}} does not relativize at dense: {} closes to {}, which is not dense-closed",
            s.display(cat),
            ks.display(cat)
        ),
        None => println!("closed{{a}} relativizes at dense"),
    }
    Ok(())
}
