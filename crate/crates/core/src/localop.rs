//! The subobject classifier of the presheaf topos, seen object by object as
//! the set of sieves, together with its internal Heyting operations, the
//! local operator of a topology and relativization of one local operator
//! at another.
//!
//! A local operator is never stored as a table: it is the closure map of its
//! topology, evaluated on demand.

use crate::error::{Error, Result};
use crate::fincat::{FinCat, Obj};
use crate::sieve::{pullback, sieve_intersection, sieve_leq, sieve_union, Sieve};
use crate::topology::{check_same, join, Topology};
use crate::universe::SieveId;

/// The local operator of `J` applied to `s`: `{f | f*(S) covers}`.
pub fn classify(j: &Topology, s: &Sieve) -> Result<Sieve> {
    j.closure(s)
}

fn same_object(cat: &FinCat, s: &Sieve, t: &Sieve) -> Result<Obj> {
    if s.on() != t.on() {
        return Err(Error::ObjectMismatch {
            left: cat.object_name(s.on()).to_owned(),
            right: cat.object_name(t.on()).to_owned(),
        });
    }
    Ok(s.on())
}

/// Arrows `f` into the common object of `s` and `t` for which `keep`
/// accepts the pair `(f*(S), f*(T))`.
fn sieve_where(
    cat: &FinCat,
    s: &Sieve,
    t: &Sieve,
    keep: impl Fn(&Sieve, &Sieve) -> bool,
) -> Result<Sieve> {
    let c = same_object(cat, s, t)?;
    let mut members = Vec::new();
    for &f in cat.arrows_into(c) {
        if keep(&pullback(cat, f, s)?, &pullback(cat, f, t)?) {
            members.push(f);
        }
    }
    Sieve::new(cat, c, &members)
}

pub fn internal_and(cat: &FinCat, s: &Sieve, t: &Sieve) -> Result<Sieve> {
    sieve_intersection(cat, s, t)
}

/// `{f | f*(S) ∪ f*(T) is maximal}`.
pub fn internal_or(cat: &FinCat, s: &Sieve, t: &Sieve) -> Result<Sieve> {
    sieve_where(cat, s, t, |a, b| {
        sieve_union(cat, a, b).is_ok_and(|u| u.is_maximal(cat))
    })
}

/// `{f | f*(S) ⊆ f*(T)}`.
pub fn internal_implies(cat: &FinCat, s: &Sieve, t: &Sieve) -> Result<Sieve> {
    sieve_where(cat, s, t, |a, b| sieve_leq(cat, a, b).unwrap_or(false))
}

/// All `J`-closed sieves on `c`, in canonical order.
pub fn closed_sieves(j: &Topology, c: Obj) -> Result<Vec<Sieve>> {
    let uni = j.universe();
    if c.index() >= uni.cat().num_objects() {
        return Err(Error::UnknownObject(format!("#{}", c.index())));
    }
    Ok((0..uni.num_sieves(c) as SieveId)
        .filter(|&s| j.is_closed_id(c, s))
        .map(|s| uni.sieve(c, s))
        .collect())
}

/// The first `J`-closed sieve (objects in order, sieves canonically) whose
/// `K`-closure is not `J`-closed, with that closure.
pub fn relativization_witness(k: &Topology, j: &Topology) -> Result<Option<(Sieve, Sieve)>> {
    check_same(k.universe(), j.universe())?;
    for c in j.cat().objects() {
        for s in closed_sieves(j, c)? {
            let ks = classify(k, &s)?;
            if !j.is_closed(&ks)? {
                return Ok(Some((s, ks)));
            }
        }
    }
    Ok(None)
}

/// Whether the local operator of `K` maps `J`-closed sieves to `J`-closed
/// sieves.
pub fn relativization_exists(k: &Topology, j: &Topology) -> Result<bool> {
    Ok(relativization_witness(k, j)?.is_none())
}

/// The operator induced by `K` on the `J`-closed sieves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativizedOperator {
    base: Topology,
    /// Per object, `(S, K-closure of S)` for every `J`-closed `S`, canonical order.
    action: Vec<Vec<(Sieve, Sieve)>>,
}

impl RelativizedOperator {
    pub fn base(&self) -> &Topology {
        &self.base
    }

    pub fn pairs(&self, c: Obj) -> &[(Sieve, Sieve)] {
        &self.action[c.index()]
    }

    /// Image of a `J`-closed sieve.
    pub fn apply(&self, s: &Sieve) -> Result<Sieve> {
        self.action
            .get(s.on().index())
            .and_then(|row| row.iter().find(|(from, _)| from == s))
            .map(|&(_, to)| to)
            .ok_or_else(|| {
                Error::Precondition(format!(
                    "{} is not closed for the base topology",
                    s.display(self.base.cat())
                ))
            })
    }

    /// Pointwise equality of the actions, ignoring which `K` induced them.
    pub fn same_action(&self, other: &RelativizedOperator) -> bool {
        self.action == other.action
    }
}

fn no_relativization(j: &Topology, s: Sieve, closure: Sieve) -> Error {
    let cat = j.cat();
    Error::NoRelativization {
        object: cat.object_name(s.on()).to_owned(),
        sieve: s.display(cat),
        closure: closure.display(cat),
    }
}

pub fn relativize(k: &Topology, j: &Topology) -> Result<RelativizedOperator> {
    if let Some((s, ks)) = relativization_witness(k, j)? {
        return Err(no_relativization(j, s, ks));
    }
    let action = j
        .cat()
        .objects()
        .map(|c| {
            closed_sieves(j, c)?
                .into_iter()
                .map(|s| Ok((s, classify(k, &s)?)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RelativizedOperator {
        base: j.clone(),
        action,
    })
}

/// For every `J`-closed `S`: the relativized action agrees with `K`'s local
/// operator, and `S` covers for `K ∨ J` exactly when its image under the
/// relativized operator closes to the maximal sieve under `J`.
pub fn check_relativization_theorem(k: &Topology, j: &Topology) -> Result<bool> {
    let rel = relativize(k, j)?;
    let kj = join(k, j)?;
    let cat = j.cat();
    for c in cat.objects() {
        for &(s, image) in rel.pairs(c) {
            if image != classify(k, &s)? {
                return Ok(false);
            }
            let joined_covers = classify(&kj, &s)?.is_maximal(cat);
            let relative_covers = classify(j, &image)?.is_maximal(cat);
            if joined_covers != relative_covers {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
