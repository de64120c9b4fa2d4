//! Closed-form descriptions of the lattice of topologies: the `r`/`l`
//! operators on pullback-stable sieve families, generation, join, Heyting
//! implication and pseudocomplement.

use std::sync::Arc;

use super::{check_same, SieveFamily, Topology};
use crate::error::{Error, Result};
use crate::fincat::Obj;
use crate::universe::{SieveId, Universe};

fn require_stable(d: &SieveFamily) -> Result<()> {
    match d.pullback_witness() {
        None => Ok(()),
        Some((g, s)) => {
            let cat = d.cat();
            Err(Error::NotPullbackStable(format!(
                "{} is selected but its pullback along {} is not",
                s.display(cat),
                cat.arrow_name(g)
            )))
        }
    }
}

/// Smallest pullback-stable family containing `f`.
pub fn pullback_stabilize(f: &SieveFamily) -> SieveFamily {
    let uni = f.universe();
    let cat = uni.cat();
    let mut out = f.clone();
    let mut stack: Vec<(Obj, SieveId)> = cat
        .objects()
        .flat_map(|c| f.ids(c).map(move |s| (c, s)))
        .collect();
    while let Some((c, s)) = stack.pop() {
        for &g in cat.arrows_into(c) {
            let d = cat.dom(g);
            let p = uni.pullback_id(g, s);
            if out.put(d, p) {
                stack.push((d, p));
            }
        }
    }
    out
}

/// `D^r(c) = {T | for all f: d → c and S ∈ D(d), S ⊆ f*(T) implies f ∈ T}`.
pub fn r_operator(d: &SieveFamily) -> Result<SieveFamily> {
    require_stable(d)?;
    let uni = d.universe();
    let cat = uni.cat();
    let mut out = SieveFamily::empty(uni);
    for c in cat.objects() {
        'sieves: for t in 0..uni.num_sieves(c) as SieveId {
            for &f in cat.arrows_into(c) {
                if uni.member(f, t) {
                    continue;
                }
                let dom = cat.dom(f);
                let pulled = uni.pullback_id(f, t);
                if d.ids(dom).any(|s| uni.is_subsieve(dom, s, pulled)) {
                    continue 'sieves;
                }
            }
            out.put(c, t);
        }
    }
    Ok(out)
}

/// Sieves `S` on each object such that for every `f: d → c` and every
/// admissible non-maximal `Z` on `d`, `f*(S) ⊄ Z`.
fn l_formula(uni: &Arc<Universe>, admissible: impl Fn(Obj, SieveId) -> bool) -> SieveFamily {
    let cat = uni.cat();
    let blockers: Vec<Vec<SieveId>> = cat
        .objects()
        .map(|d| {
            (0..uni.num_sieves(d) as SieveId)
                .filter(|&z| z != uni.maximal_id(d) && admissible(d, z))
                .collect()
        })
        .collect();
    let mut out = SieveFamily::empty(uni);
    for c in cat.objects() {
        'sieves: for s in 0..uni.num_sieves(c) as SieveId {
            for &f in cat.arrows_into(c) {
                let d = cat.dom(f);
                let pulled = uni.pullback_id(f, s);
                if blockers[d.index()]
                    .iter()
                    .any(|&z| uni.is_subsieve(d, pulled, z))
                {
                    continue 'sieves;
                }
            }
            out.put(c, s);
        }
    }
    out
}

/// `D^l(c) = {S | for all f: d → c and Z ∈ D(d), f*(S) ⊆ Z implies Z = M_d}`;
/// the largest topology for which every sieve of `D` is closed.
pub fn l_operator(d: &SieveFamily) -> Result<Topology> {
    require_stable(d)?;
    Ok(Topology::trusted(l_formula(d.universe(), |o, z| {
        d.has(o, z)
    })))
}

/// The smallest topology in which every sieve of `f` covers, computed as
/// `((f_pb)^r)^l`.
pub fn generate_topology(f: &SieveFamily) -> Topology {
    let stable = pullback_stabilize(f);
    let r = r_operator(&stable).expect("stabilized family");
    l_operator(&r).expect("r-operator output is pullback-stable")
}

/// The topology generated by the sieves covering for either operand.
pub fn join(j1: &Topology, j2: &Topology) -> Result<Topology> {
    Ok(generate_topology(&j1.union(j2)?))
}

/// `(J1 ⇒ J2)(c) = {S | for all f: d → c and Z on d, Z J1-covering and
/// J2-closed with f*(S) ⊆ Z implies Z = M_d}`.
pub fn implication(j1: &Topology, j2: &Topology) -> Result<Topology> {
    check_same(j1.universe(), j2.universe())?;
    Ok(Topology::trusted(l_formula(j1.universe(), |d, z| {
        j1.has(d, z) && j2.is_closed_id(d, z)
    })))
}

/// Pseudocomplement, as `J ⇒ ⊥`.
pub fn negation(j: &Topology) -> Topology {
    implication(j, &Topology::bottom(j.universe())).expect("same universe")
}

/// Pseudocomplement by its own formula: `Z` ranges over the `J`-covering
/// sieves only.
pub fn negation_formula(j: &Topology) -> Topology {
    Topology::trusted(l_formula(j.universe(), |d, z| j.has(d, z)))
}
