//! Exhaustive enumeration of the topologies on a category.
//!
//! Per object, a covering set is an up-set of the sieve lattice containing
//! the maximal sieve; those are generated first. Objects are then assigned
//! in canonical order, checking stability on every arrow between assigned
//! objects and transitivity at each object as soon as the domains of all
//! arrows into it are assigned.

use std::fmt::Write as _;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::{SieveFamily, Topology, TopologyDoc};
use crate::error::{Error, Result};
use crate::fincat::Obj;
use crate::universe::{SieveId, Universe};

fn upsets(uni: &Universe, c: Obj) -> Result<Vec<FixedBitSet>> {
    let n = uni.num_sieves(c);
    let mut order: Vec<SieveId> = (0..n as SieveId).collect();
    order.sort_by_key(|&s| std::cmp::Reverse(uni.sieve(c, s).len()));
    let supersets: Vec<Vec<SieveId>> = (0..n as SieveId)
        .map(|s| {
            (0..n as SieveId)
                .filter(|&t| t != s && uni.is_subsieve(c, s, t))
                .collect()
        })
        .collect();

    let limit = uni.guard().max_upsets;
    let mut out = Vec::new();
    let mut current = FixedBitSet::with_capacity(n);
    // `order[0]` is the maximal sieve, which every covering set contains.
    current.insert(order[0] as usize);
    fn go(
        k: usize,
        order: &[SieveId],
        supersets: &[Vec<SieveId>],
        current: &mut FixedBitSet,
        out: &mut Vec<FixedBitSet>,
        limit: usize,
    ) -> Result<()> {
        if k == order.len() {
            if out.len() == limit {
                return Err(Error::GuardExceeded {
                    bound: "candidate covering families per object",
                    limit,
                    actual: limit + 1,
                });
            }
            out.push(current.clone());
            return Ok(());
        }
        let s = order[k] as usize;
        go(k + 1, order, supersets, current, out, limit)?;
        if supersets[s].iter().all(|&t| current.contains(t as usize)) {
            current.insert(s);
            go(k + 1, order, supersets, current, out, limit)?;
            current.set(s, false);
        }
        Ok(())
    }
    go(1, &order, &supersets, &mut current, &mut out, limit)?;
    Ok(out)
}

struct Search<'a> {
    uni: &'a Universe,
    candidates: Vec<Vec<FixedBitSet>>,
    assigned: Vec<FixedBitSet>,
    /// Objects whose transitivity can be checked once object `k` is set.
    ready_at: Vec<Vec<Obj>>,
    found: Vec<Vec<FixedBitSet>>,
}

impl Search<'_> {
    fn stable_at(&self, k: usize) -> bool {
        let uni = self.uni;
        let cat = uni.cat();
        for g in cat.arrows() {
            let (d, c) = (cat.dom(g).index(), cat.cod(g).index());
            if d.max(c) != k {
                continue;
            }
            for s in self.assigned[c].ones() {
                let p = uni.pullback_id(g, s as SieveId) as usize;
                if !self.assigned[d].contains(p) {
                    return false;
                }
            }
        }
        true
    }

    fn transitive_at(&self, c: Obj) -> bool {
        let uni = self.uni;
        let cat = uni.cat();
        let covers = &self.assigned[c.index()];
        for r in 0..uni.num_sieves(c) {
            if covers.contains(r) {
                continue;
            }
            for s in covers.ones() {
                let local = uni.sieve(c, s as SieveId).members(cat).all(|f| {
                    let p = uni.pullback_id(f, r as SieveId) as usize;
                    self.assigned[cat.dom(f).index()].contains(p)
                });
                if local {
                    return false;
                }
            }
        }
        true
    }

    fn run(&mut self, k: usize) {
        if k == self.candidates.len() {
            self.found.push(self.assigned.clone());
            return;
        }
        for i in 0..self.candidates[k].len() {
            self.assigned[k] = self.candidates[k][i].clone();
            if !self.stable_at(k) {
                continue;
            }
            if !self.ready_at[k].iter().all(|&c| self.transitive_at(c)) {
                continue;
            }
            self.run(k + 1);
        }
    }
}

/// All topologies on the category, in canonical order.
pub fn enumerate_topologies(uni: &Arc<Universe>) -> Result<Vec<Topology>> {
    let cat = uni.cat();
    let candidates = cat
        .objects()
        .map(|c| upsets(uni, c))
        .collect::<Result<Vec<_>>>()?;
    let mut ready_at = vec![Vec::new(); cat.num_objects()];
    for c in cat.objects() {
        let last = cat
            .arrows_into(c)
            .iter()
            .map(|&f| cat.dom(f).index())
            .chain([c.index()])
            .max()
            .expect("identity");
        ready_at[last].push(c);
    }
    let mut search = Search {
        uni,
        assigned: cat
            .objects()
            .map(|c| FixedBitSet::with_capacity(uni.num_sieves(c)))
            .collect(),
        candidates,
        ready_at,
        found: Vec::new(),
    };
    search.run(0);
    let mut out: Vec<Topology> = search
        .found
        .into_iter()
        .map(|sel| {
            Topology::trusted(SieveFamily {
                uni: Arc::clone(uni),
                sel,
            })
        })
        .collect();
    out.sort_by(|a, b| a.canonical_cmp(b));
    Ok(out)
}

/// Covering relation of the order on `lattice`, as index pairs
/// `(lower, upper)` in ascending order.
pub fn hasse(lattice: &[Topology]) -> Vec<(usize, usize)> {
    let n = lattice.len();
    let leq: Vec<Vec<bool>> = lattice
        .iter()
        .map(|a| lattice.iter().map(|b| a.is_subfamily(b)).collect())
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j || !leq[i][j] {
                continue;
            }
            let between = (0..n).any(|k| k != i && k != j && leq[i][k] && leq[k][j]);
            if !between {
                edges.push((i, j));
            }
        }
    }
    edges
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeNode {
    pub id: usize,
    pub label: String,
    pub topology: TopologyDoc,
}

/// Nodes plus the full order matrix: `leq[i][j]` iff node `i` ≤ node `j`.
#[derive(Clone, Debug, Serialize)]
pub struct LatticeDoc {
    pub nodes: Vec<LatticeNode>,
    pub leq: Vec<Vec<bool>>,
}

fn label(t: &Topology, i: usize) -> String {
    if t.is_top() {
        "top".into()
    } else if t.is_bottom() {
        "bottom".into()
    } else {
        format!("J{i}")
    }
}

pub fn lattice_doc(lattice: &[Topology]) -> LatticeDoc {
    LatticeDoc {
        nodes: lattice
            .iter()
            .enumerate()
            .map(|(i, t)| LatticeNode {
                id: i,
                label: label(t, i),
                topology: t.to_doc(),
            })
            .collect(),
        leq: lattice
            .iter()
            .map(|a| lattice.iter().map(|b| a.is_subfamily(b)).collect())
            .collect(),
    }
}

/// Hasse diagram in DOT, bottom at the bottom.
pub fn lattice_dot(lattice: &[Topology]) -> String {
    let mut out = String::from("digraph topologies {\n  rankdir=BT;\n");
    for (i, t) in lattice.iter().enumerate() {
        let tooltip = t.describe().replace('"', "'");
        writeln!(
            out,
            "  n{i} [label=\"{}\", tooltip=\"{tooltip}\"];",
            label(t, i)
        )
        .unwrap();
    }
    for (i, j) in hasse(lattice) {
        writeln!(out, "  n{i} -> n{j};").unwrap();
    }
    out.push_str("}\n");
    out
}
