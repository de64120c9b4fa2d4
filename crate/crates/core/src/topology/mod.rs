//! Grothendieck topologies on a finite category, stored extensionally as
//! per-object sets of covering sieves.

mod enumerate;
mod formulas;

use std::cmp::Ordering;
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fincat::{Arrow, FinCat, Obj};
use crate::sieve::{Sieve, SieveDoc};
use crate::universe::{SieveId, Universe};

pub use enumerate::{enumerate_topologies, hasse, lattice_doc, lattice_dot, LatticeDoc};
pub use formulas::{
    generate_topology, implication, join, l_operator, negation, negation_formula,
    pullback_stabilize, r_operator,
};

/// An arbitrary per-object selection of sieves (a candidate subobject of
/// the sieve classifier). Nothing is assumed; pullback stability is checked
/// on demand by [`SieveFamily::is_pullback_stable`].
#[derive(Clone)]
pub struct SieveFamily {
    uni: Arc<Universe>,
    sel: Vec<FixedBitSet>,
}

impl PartialEq for SieveFamily {
    fn eq(&self, other: &Self) -> bool {
        same_universe(&self.uni, &other.uni) && self.sel == other.sel
    }
}

impl Eq for SieveFamily {}

impl fmt::Debug for SieveFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

pub(crate) fn same_universe(a: &Arc<Universe>, b: &Arc<Universe>) -> bool {
    Arc::ptr_eq(a, b) || a.cat() == b.cat()
}

impl SieveFamily {
    pub fn empty(uni: &Arc<Universe>) -> Self {
        let sel = uni
            .cat()
            .objects()
            .map(|c| FixedBitSet::with_capacity(uni.num_sieves(c)))
            .collect();
        SieveFamily {
            uni: Arc::clone(uni),
            sel,
        }
    }

    pub fn from_sieves<'a>(
        uni: &Arc<Universe>,
        sieves: impl IntoIterator<Item = &'a Sieve>,
    ) -> Result<Self> {
        let mut fam = Self::empty(uni);
        for s in sieves {
            fam.insert(s)?;
        }
        Ok(fam)
    }

    /// Every sieve on every object.
    pub fn all(uni: &Arc<Universe>) -> Self {
        let mut fam = Self::empty(uni);
        for set in &mut fam.sel {
            set.insert_range(..);
        }
        fam
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.uni
    }

    pub fn cat(&self) -> &FinCat {
        self.uni.cat()
    }

    pub fn insert(&mut self, s: &Sieve) -> Result<()> {
        let id = self.uni.try_id(s)?;
        self.sel[s.on().index()].insert(id as usize);
        Ok(())
    }

    pub fn contains(&self, s: &Sieve) -> bool {
        match self.uni.try_id(s) {
            Ok(id) => self.has(s.on(), id),
            Err(_) => false,
        }
    }

    pub(crate) fn has(&self, c: Obj, id: SieveId) -> bool {
        self.sel[c.index()].contains(id as usize)
    }

    pub(crate) fn put(&mut self, c: Obj, id: SieveId) -> bool {
        !self.sel[c.index()].put(id as usize)
    }

    pub(crate) fn ids(&self, c: Obj) -> impl Iterator<Item = SieveId> + '_ {
        self.sel[c.index()].ones().map(|i| i as SieveId)
    }

    /// Selected sieves on `c`, in canonical order.
    pub fn sieves_on(&self, c: Obj) -> impl Iterator<Item = Sieve> + '_ {
        self.ids(c).map(move |id| self.uni.sieve(c, id))
    }

    /// All selected sieves, object by object.
    pub fn sieves(&self) -> impl Iterator<Item = Sieve> + '_ {
        self.cat().objects().flat_map(move |c| self.sieves_on(c))
    }

    pub fn count_on(&self, c: Obj) -> usize {
        self.sel[c.index()].count_ones(..)
    }

    pub fn len(&self) -> usize {
        self.sel.iter().map(|s| s.count_ones(..)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// First selected sieve whose pullback along some arrow is not selected.
    pub fn pullback_witness(&self) -> Option<(Arrow, Sieve)> {
        let cat = self.cat();
        for c in cat.objects() {
            for s in self.ids(c) {
                for &g in cat.arrows_into(c) {
                    if !self.has(cat.dom(g), self.uni.pullback_id(g, s)) {
                        return Some((g, self.uni.sieve(c, s)));
                    }
                }
            }
        }
        None
    }

    pub fn is_pullback_stable(&self) -> bool {
        self.pullback_witness().is_none()
    }

    pub fn union(&self, other: &SieveFamily) -> Result<SieveFamily> {
        check_same(&self.uni, &other.uni)?;
        let mut out = self.clone();
        for (a, b) in out.sel.iter_mut().zip(&other.sel) {
            a.union_with(b);
        }
        Ok(out)
    }

    pub fn is_subfamily(&self, other: &SieveFamily) -> bool {
        self.sel.iter().zip(&other.sel).all(|(a, b)| a.is_subset(b))
    }

    /// One line per object, e.g. `b: {1_b, f}, {f}`.
    pub fn describe(&self) -> String {
        let cat = self.cat();
        cat.objects()
            .map(|c| {
                let sieves: Vec<String> = self
                    .sieves_on(c)
                    .map(|s| format!("{{{}}}", s.member_names(cat).join(", ")))
                    .collect();
                format!("{}: {}", cat.object_name(c), sieves.join(", "))
            })
            .collect::<Vec<_>>()
            .join(" | ")
    }

    pub fn to_doc(&self) -> TopologyDoc {
        let cat = self.cat();
        let covers = cat
            .objects()
            .map(|c| {
                let sieves = self
                    .sieves_on(c)
                    .map(|s| s.member_names(cat).iter().map(|n| n.to_string()).collect())
                    .collect();
                (cat.object_name(c).to_owned(), sieves)
            })
            .collect();
        TopologyDoc { covers }
    }

    pub fn from_doc(uni: &Arc<Universe>, doc: &FamilyDoc) -> Result<Self> {
        let cat = uni.cat();
        let mut fam = Self::empty(uni);
        match doc {
            FamilyDoc::Covers(t) => {
                for (object, sieves) in &t.covers {
                    for arrows in sieves {
                        let s = Sieve::from_doc(
                            cat,
                            &SieveDoc {
                                on: object.clone(),
                                arrows: arrows.clone(),
                            },
                        )?;
                        fam.insert(&s)?;
                    }
                }
            }
            FamilyDoc::List(list) => {
                for d in list {
                    fam.insert(&Sieve::from_doc(cat, d)?)?;
                }
            }
        }
        Ok(fam)
    }

    /// Canonical order: per-object cover counts, then the per-object sieve
    /// lists compared lexicographically.
    pub fn canonical_cmp(&self, other: &SieveFamily) -> Ordering {
        let sizes = |f: &SieveFamily| f.sel.iter().map(|s| s.count_ones(..)).collect::<Vec<_>>();
        sizes(self).cmp(&sizes(other)).then_with(|| {
            for (a, b) in self.sel.iter().zip(&other.sel) {
                let ord = a.ones().cmp(b.ones());
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            Ordering::Equal
        })
    }
}

pub(crate) fn check_same(a: &Arc<Universe>, b: &Arc<Universe>) -> Result<()> {
    if same_universe(a, b) {
        Ok(())
    } else {
        Err(Error::CategoryMismatch)
    }
}

/// `{"covers": {"a": [["1_a"]], "b": [["1_b","f"],["f"]]}}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyDoc {
    pub covers: IndexMap<String, Vec<Vec<String>>>,
}

/// Families are read either in the topology format or as a flat list of
/// sieves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FamilyDoc {
    Covers(TopologyDoc),
    List(Vec<SieveDoc>),
}

/// First failure of maximality / stability / transitivity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomViolation {
    Maximality {
        object: Obj,
    },
    Stability {
        arrow: Arrow,
        sieve: Sieve,
    },
    /// `covering` is selected, every pullback of `sieve` along its members
    /// is selected, but `sieve` is not.
    Transitivity {
        covering: Sieve,
        sieve: Sieve,
    },
}

impl AxiomViolation {
    pub fn describe(&self, cat: &FinCat) -> String {
        match self {
            AxiomViolation::Maximality { object } => {
                format!("maximality: M_{} is not covering", cat.object_name(*object))
            }
            AxiomViolation::Stability { arrow, sieve } => format!(
                "stability: {} covers but its pullback along {} does not",
                sieve.display(cat),
                cat.arrow_name(*arrow)
            ),
            AxiomViolation::Transitivity { covering, sieve } => format!(
                "transitivity: {} is locally covering over {} but does not cover",
                sieve.display(cat),
                covering.display(cat)
            ),
        }
    }
}

/// First failure of the four-clause form of the definition
/// (maximal, upward closed, locally nonempty pullbacks, composites).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DefinitionViolation {
    Maximal { object: Obj },
    UpwardClosed { covering: Sieve, larger: Sieve },
    Local { arrow: Arrow, sieve: Sieve },
    Composite { covering: Sieve, composite: Sieve },
}

/// Maximality, stability and transitivity.
pub fn check_axioms(fam: &SieveFamily) -> Result<(), AxiomViolation> {
    let uni = &fam.uni;
    let cat = uni.cat();
    for c in cat.objects() {
        if !fam.has(c, uni.maximal_id(c)) {
            return Err(AxiomViolation::Maximality { object: c });
        }
    }
    if let Some((arrow, sieve)) = fam.pullback_witness() {
        return Err(AxiomViolation::Stability { arrow, sieve });
    }
    for c in cat.objects() {
        for r in 0..uni.num_sieves(c) as SieveId {
            if fam.has(c, r) {
                continue;
            }
            for s in fam.ids(c) {
                let local = uni
                    .sieve(c, s)
                    .members(cat)
                    .all(|f| fam.has(cat.dom(f), uni.pullback_id(f, r)));
                if local {
                    return Err(AxiomViolation::Transitivity {
                        covering: uni.sieve(c, s),
                        sieve: uni.sieve(c, r),
                    });
                }
            }
        }
    }
    Ok(())
}

/// The four-clause definition, evaluated independently of
/// [`check_axioms`].
pub fn check_definition(fam: &SieveFamily) -> Result<(), DefinitionViolation> {
    let uni = &fam.uni;
    let cat = uni.cat();
    for c in cat.objects() {
        if !fam.has(c, uni.maximal_id(c)) {
            return Err(DefinitionViolation::Maximal { object: c });
        }
    }
    for c in cat.objects() {
        for t in fam.ids(c) {
            for s in 0..uni.num_sieves(c) as SieveId {
                if uni.is_subsieve(c, t, s) && !fam.has(c, s) {
                    return Err(DefinitionViolation::UpwardClosed {
                        covering: uni.sieve(c, t),
                        larger: uni.sieve(c, s),
                    });
                }
            }
        }
    }
    for c in cat.objects() {
        for r in fam.ids(c) {
            for &g in cat.arrows_into(c) {
                let d = cat.dom(g);
                let pulled = uni.pullback_id(g, r);
                // some covering S on d with g∘f ∈ R for all f ∈ S, i.e. S ⊆ g*(R)
                if !fam.ids(d).any(|s| uni.is_subsieve(d, s, pulled)) {
                    return Err(DefinitionViolation::Local {
                        arrow: g,
                        sieve: uni.sieve(c, r),
                    });
                }
            }
        }
    }
    // Composite clause. With upward closure established above, composites
    // are monotone in S and in every T_f, so only inclusion-minimal choices
    // need to be tried.
    let minimal: Vec<Vec<SieveId>> = cat
        .objects()
        .map(|c| {
            fam.ids(c)
                .filter(|&s| !fam.ids(c).any(|t| t != s && uni.is_subsieve(c, t, s)))
                .collect()
        })
        .collect();
    for c in cat.objects() {
        for &s in &minimal[c.index()] {
            let sieve = uni.sieve(c, s);
            let members: Vec<Arrow> = sieve.members(cat).collect();
            let options: Vec<&[SieveId]> = members
                .iter()
                .map(|&f| minimal[cat.dom(f).index()].as_slice())
                .collect();
            let mut choice = vec![0usize; members.len()];
            loop {
                let mut raw = 0u64;
                for (k, &f) in members.iter().enumerate() {
                    let t = uni.sieve(cat.dom(f), options[k][choice[k]]);
                    for (j, &pos) in cat.post_row(f).iter().enumerate() {
                        if t.mask() & (1 << j) != 0 {
                            raw |= 1 << pos;
                        }
                    }
                }
                let composite = generated(cat, c, raw);
                if !fam.contains(&composite) {
                    return Err(DefinitionViolation::Composite {
                        covering: sieve,
                        composite,
                    });
                }
                // odometer over the choices
                let mut k = 0;
                while k < choice.len() {
                    choice[k] += 1;
                    if choice[k] < options[k].len() {
                        break;
                    }
                    choice[k] = 0;
                    k += 1;
                }
                if k == choice.len() {
                    break;
                }
            }
        }
    }
    Ok(())
}

fn generated(cat: &FinCat, c: Obj, raw: u64) -> Sieve {
    let mut mask = 0;
    for (i, &g) in cat.arrows_into(c).iter().enumerate() {
        if raw & (1 << i) != 0 {
            mask |= cat.principal_mask(g);
        }
    }
    Sieve::from_mask(c, mask)
}

/// Both verdicts on a candidate family.
#[derive(Clone, Debug)]
pub struct TopologyVerdict {
    pub axioms: Result<(), AxiomViolation>,
    pub definition: Result<(), DefinitionViolation>,
}

impl TopologyVerdict {
    pub fn agree(&self) -> bool {
        self.axioms.is_ok() == self.definition.is_ok()
    }
}

pub fn topology_verdict(fam: &SieveFamily) -> TopologyVerdict {
    TopologyVerdict {
        axioms: check_axioms(fam),
        definition: check_definition(fam),
    }
}

/// Whether `fam` is a Grothendieck topology, with the first axiom that
/// fails. Both forms of the definition are evaluated; they must agree.
pub fn is_topology(fam: &SieveFamily) -> Result<(), AxiomViolation> {
    let verdict = topology_verdict(fam);
    assert!(
        verdict.agree(),
        "definition forms disagree on {}: {:?} vs {:?}",
        fam.describe(),
        verdict.axioms,
        verdict.definition
    );
    verdict.axioms
}

/// A sieve family known to satisfy the topology axioms.
#[derive(Clone, PartialEq, Eq)]
pub struct Topology(SieveFamily);

impl Deref for Topology {
    type Target = SieveFamily;

    fn deref(&self) -> &SieveFamily {
        &self.0
    }
}

impl fmt::Debug for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Topology({})", self.0.describe())
    }
}

impl TryFrom<SieveFamily> for Topology {
    type Error = Error;

    fn try_from(fam: SieveFamily) -> Result<Self> {
        match is_topology(&fam) {
            Ok(()) => Ok(Topology(fam)),
            Err(v) => Err(Error::NotATopology(v.describe(fam.cat()))),
        }
    }
}

impl Topology {
    /// Wraps a family that is a topology by construction; checked in debug
    /// builds.
    pub(crate) fn trusted(fam: SieveFamily) -> Self {
        debug_assert!(
            is_topology(&fam).is_ok(),
            "constructed family is not a topology: {}",
            fam.describe()
        );
        Topology(fam)
    }

    pub fn family(&self) -> &SieveFamily {
        &self.0
    }

    pub fn into_family(self) -> SieveFamily {
        self.0
    }

    /// Only the maximal sieves cover.
    pub fn bottom(uni: &Arc<Universe>) -> Self {
        let mut fam = SieveFamily::empty(uni);
        for c in uni.cat().objects() {
            fam.put(c, uni.maximal_id(c));
        }
        Topology(fam)
    }

    /// Every sieve covers.
    pub fn top(uni: &Arc<Universe>) -> Self {
        Topology(SieveFamily::all(uni))
    }

    pub fn from_doc(uni: &Arc<Universe>, doc: &FamilyDoc) -> Result<Self> {
        SieveFamily::from_doc(uni, doc)?.try_into()
    }

    pub fn is_bottom(&self) -> bool {
        *self == Topology::bottom(&self.uni)
    }

    pub fn is_top(&self) -> bool {
        self.sel.iter().all(|s| s.is_full())
    }

    pub fn leq(&self, other: &Topology) -> Result<bool> {
        check_same(&self.uni, &other.uni)?;
        Ok(self.is_subfamily(other))
    }

    /// Per-object intersection.
    pub fn meet(&self, other: &Topology) -> Result<Topology> {
        check_same(&self.uni, &other.uni)?;
        let mut out = self.0.clone();
        for (a, b) in out.sel.iter_mut().zip(&other.sel) {
            a.intersect_with(b);
        }
        Ok(Topology::trusted(out))
    }

    pub fn covers(&self, s: &Sieve) -> bool {
        self.contains(s)
    }

    pub(crate) fn closure_id(&self, c: Obj, r: SieveId) -> Sieve {
        let uni = &self.uni;
        let cat = uni.cat();
        let mut mask = 0u64;
        for (i, &f) in cat.arrows_into(c).iter().enumerate() {
            if self.has(cat.dom(f), uni.pullback_id(f, r)) {
                mask |= 1 << i;
            }
        }
        Sieve::from_mask(c, mask)
    }

    /// `{f: d → c | f*(R) covers d}`.
    pub fn closure(&self, r: &Sieve) -> Result<Sieve> {
        let id = self.uni.try_id(r)?;
        Ok(self.closure_id(r.on(), id))
    }

    pub fn is_closed(&self, r: &Sieve) -> Result<bool> {
        Ok(self.closure(r)? == *r)
    }

    pub(crate) fn is_closed_id(&self, c: Obj, r: SieveId) -> bool {
        self.closure_id(c, r).mask() == self.uni.sieve(c, r).mask()
    }

    /// Sieves on `c` that cover, smallest-first by canonical order.
    pub fn covering_sieves(&self, c: Obj) -> Vec<Sieve> {
        self.sieves_on(c).collect()
    }
}

/// `sieve_closure(R, J)`.
pub fn sieve_closure(r: &Sieve, j: &Topology) -> Result<Sieve> {
    j.closure(r)
}

pub fn is_closed_sieve(r: &Sieve, j: &Topology) -> Result<bool> {
    j.is_closed(r)
}


#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;
    use crate::fincat::builtin;

    #[test]
    fn bottom_and_top_are_topologies() {
        let c = c2();
        assert!(is_topology(&c.bottom).is_ok());
        assert!(is_topology(&c.top).is_ok());
        let c1 = Universe::new(builtin("C1").unwrap()).unwrap();
        assert_eq!(Topology::bottom(&c1).len(), 1);
        assert_eq!(Topology::top(&c1).len(), 2);
        let cat = c.uni.cat();
        assert_eq!(c.top.count_on(cat.object("a").unwrap()), 2);
        assert_eq!(c.top.count_on(cat.object("b").unwrap()), 3);
    }

    #[test]
    fn empty_sieve_on_b_alone_fails_stability() {
        let c = c2();
        let fam = family(&c.uni, &[("a", &["1_a"]), ("b", &["1_b", "f"]), ("b", &[])]);
        let v = is_topology(&fam).unwrap_err();
        let cat = c.uni.cat();
        assert_eq!(
            v,
            AxiomViolation::Stability {
                arrow: cat.arrow("f").unwrap(),
                sieve: Sieve::empty(cat.object("b").unwrap()),
            }
        );
        assert!(check_definition(&fam).is_err());
    }

    #[test]
    fn order_and_meet() {
        let c = c2();
        for j in [&c.bottom, &c.j2, &c.j3, &c.top] {
            assert!(c.bottom.leq(j).unwrap() && j.leq(&c.top).unwrap());
            assert_eq!(&j.meet(j).unwrap(), j);
            assert_eq!(&j.meet(&c.top).unwrap(), j);
        }
        assert_eq!(c.j2.meet(&c.j3).unwrap(), c.bottom);
        let other = Universe::new(builtin("D2").unwrap()).unwrap();
        assert!(matches!(
            c.j2.meet(&Topology::bottom(&other)),
            Err(Error::CategoryMismatch)
        ));
    }

    #[test]
    fn closures() {
        let c = c2();
        for s in [
            sieve(&c.uni, "b", &[]),
            sieve(&c.uni, "b", &["f"]),
            sieve(&c.uni, "a", &[]),
        ] {
            assert_eq!(sieve_closure(&s, &c.bottom).unwrap(), s);
            assert!(sieve_closure(&s, &c.top).unwrap().is_maximal(c.uni.cat()));
            assert!(is_closed_sieve(&s, &c.bottom).unwrap());
            assert!(!is_closed_sieve(&s, &c.top).unwrap());
        }
        let empty_b = sieve(&c.uni, "b", &[]);
        assert_eq!(
            sieve_closure(&empty_b, &c.j3).unwrap(),
            sieve(&c.uni, "b", &["f"])
        );
        assert!(is_closed_sieve(&sieve(&c.uni, "b", &["f"]), &c.j3).unwrap());
    }

    #[test]
    fn doc_round_trip() {
        let c = c2();
        let doc = c.j2.to_doc();
        let json = serde_json::to_string(&doc).unwrap();
        assert_eq!(
            json,
            r#"{"covers":{"a":[["1_a"]],"b":[["1_b","f"],["f"]]}}"#
        );
        let back: FamilyDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(Topology::from_doc(&c.uni, &back).unwrap(), c.j2);
        let list: FamilyDoc = serde_json::from_str(r#"[{"on":"a","arrows":[]}]"#).unwrap();
        let fam = SieveFamily::from_doc(&c.uni, &list).unwrap();
        assert_eq!(fam.len(), 1);
        assert!(matches!(
            Topology::from_doc(&c.uni, &list),
            Err(Error::NotATopology(_))
        ));
    }

    #[test]
    fn pullback_stability_flag() {
        let c = c2();
        assert!(c.j3.is_pullback_stable());
        let f_only = family(&c.uni, &[("b", &["f"])]);
        assert!(!f_only.is_pullback_stable());
    }
}
