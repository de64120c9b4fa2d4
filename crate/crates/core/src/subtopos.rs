//! Subterminal objects as ideals of objects, and the topologies of the open,
//! closed and quasi-closed subtoposes they determine.
//!
//! A subterminal `U` of the presheaf topos is a downward-closed set of
//! objects; its characteristic sieve at `c` is `Z(c)`, the arrows into `c`
//! whose domain lies in `U`. Every construction here consumes only `Z`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fincat::{FinCat, Obj};
use crate::sieve::{pullback, sieve_leq, sieve_union, Sieve};
use crate::topology::{enumerate_topologies, join, SieveFamily, Topology};

/// Upper bound on the number of objects for which all ideals are listed.
pub const MAX_IDEAL_OBJECTS: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ideal {
    objects: BTreeSet<Obj>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealDoc {
    pub objects: Vec<String>,
}

fn first_escape(cat: &FinCat, objects: &BTreeSet<Obj>) -> Option<(Obj, Obj)> {
    cat.arrows()
        .map(|f| (cat.dom(f), cat.cod(f)))
        .find(|(d, c)| objects.contains(c) && !objects.contains(d))
}

impl Ideal {
    /// Checks downward closure.
    pub fn new(cat: &FinCat, objects: impl IntoIterator<Item = Obj>) -> Result<Self> {
        let objects: BTreeSet<Obj> = objects.into_iter().collect();
        if let Some(o) = objects.iter().find(|o| o.index() >= cat.num_objects()) {
            return Err(Error::UnknownObject(format!("#{}", o.index())));
        }
        if let Some((d, c)) = first_escape(cat, &objects) {
            let ideal = Ideal { objects };
            return Err(Error::BadIdeal {
                ideal: ideal.display(cat),
                kind: "ideal",
                reason: format!(
                    "contains {} but not {}, which maps to it",
                    cat.object_name(c),
                    cat.object_name(d)
                ),
            });
        }
        Ok(Ideal { objects })
    }

    pub fn empty() -> Self {
        Ideal {
            objects: BTreeSet::new(),
        }
    }

    pub fn all(cat: &FinCat) -> Self {
        Ideal {
            objects: cat.objects().collect(),
        }
    }

    pub fn contains(&self, c: Obj) -> bool {
        self.objects.contains(&c)
    }

    pub fn objects(&self) -> impl Iterator<Item = Obj> + '_ {
        self.objects.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn display(&self, cat: &FinCat) -> String {
        let names: Vec<&str> = self.objects().map(|o| cat.object_name(o)).collect();
        format!("{{{}}}", names.join(", "))
    }

    pub fn to_doc(&self, cat: &FinCat) -> IdealDoc {
        IdealDoc {
            objects: self
                .objects()
                .map(|o| cat.object_name(o).to_owned())
                .collect(),
        }
    }

    pub fn from_doc(cat: &FinCat, doc: &IdealDoc) -> Result<Self> {
        let objects = doc
            .objects
            .iter()
            .map(|n| cat.object(n))
            .collect::<Result<Vec<_>>>()?;
        Ideal::new(cat, objects)
    }

    fn key(&self) -> Vec<usize> {
        self.objects().map(Obj::index).collect()
    }
}

impl Ord for Ideal {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Ideal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.objects().map(|o| format!("#{}", o.index())).collect();
        write!(f, "{{{}}}", idx.join(", "))
    }
}

/// All downward-closed sets of objects, ordered lexicographically by their
/// ascending object sequences.
pub fn ideals(cat: &FinCat) -> Result<Vec<Ideal>> {
    let n = cat.num_objects();
    if n > MAX_IDEAL_OBJECTS {
        return Err(Error::GuardExceeded {
            bound: "objects for ideal enumeration",
            limit: MAX_IDEAL_OBJECTS,
            actual: n,
        });
    }
    let mut out: Vec<Ideal> = (0u32..1 << n)
        .map(|bits| {
            (0..n as u32)
                .filter(|i| bits & (1 << i) != 0)
                .map(Obj)
                .collect::<BTreeSet<_>>()
        })
        .filter(|objects| first_escape(cat, objects).is_none())
        .map(|objects| Ideal { objects })
        .collect();
    out.sort();
    Ok(out)
}

/// `Z(c)`: arrows into `c` with domain in `u`.
pub fn z_sieve(cat: &FinCat, u: &Ideal, c: Obj) -> Result<Sieve> {
    if c.index() >= cat.num_objects() {
        return Err(Error::UnknownObject(format!("#{}", c.index())));
    }
    let members: Vec<_> = cat
        .arrows_into(c)
        .iter()
        .copied()
        .filter(|&f| u.contains(cat.dom(f)))
        .collect();
    Sieve::new(cat, c, &members)
}

/// The first object outside `u` at which `Z` covers for `j`, if any.
fn j_closure_witness(j: &Topology, u: &Ideal) -> Result<Option<Obj>> {
    let cat = j.cat();
    for c in cat.objects() {
        if !u.contains(c) && j.covers(&z_sieve(cat, u, c)?) {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

pub fn is_j_ideal(j: &Topology, u: &Ideal) -> Result<bool> {
    Ok(first_escape(j.cat(), &u.objects).is_none() && j_closure_witness(j, u)?.is_none())
}

/// Errors unless `u` is a `J`-ideal.
pub fn require_j_ideal(j: &Topology, u: &Ideal) -> Result<()> {
    let cat = j.cat();
    Ideal::new(cat, u.objects())?;
    if let Some(c) = j_closure_witness(j, u)? {
        return Err(Error::BadIdeal {
            ideal: u.display(cat),
            kind: "J-ideal",
            reason: format!(
                "Z({0}) covers {0} but {0} is not in the ideal",
                cat.object_name(c)
            ),
        });
    }
    Ok(())
}

/// Ideals closed for `j`, in the order of [`ideals`].
pub fn j_ideals(j: &Topology) -> Result<Vec<Ideal>> {
    let mut out = Vec::new();
    for u in ideals(j.cat())? {
        if j_closure_witness(j, &u)?.is_none() {
            out.push(u);
        }
    }
    Ok(out)
}

/// Sieves on each object selected by `keep(c, R)`, as a topology.
fn family_where(
    j: &Topology,
    mut keep: impl FnMut(Obj, &Sieve) -> Result<bool>,
) -> Result<Topology> {
    let uni = j.universe();
    let mut fam = SieveFamily::empty(uni);
    for c in uni.cat().objects() {
        for r in uni.sieves(c) {
            if keep(c, r)? {
                fam.insert(r)?;
            }
        }
    }
    Topology::try_from(fam)
}

/// The topology of `R ⊇ Z(c)`, before joining with the base.
pub fn open_part(j: &Topology, u: &Ideal) -> Result<Topology> {
    let cat = j.cat();
    family_where(j, |c, r| sieve_leq(cat, &z_sieve(cat, u, c)?, r))
}

/// `J ∨ J_o(U)`, where `J_o(U)(c) = {R | R ⊇ Z(c)}`.
pub fn open_topology(j: &Topology, u: &Ideal) -> Result<Topology> {
    require_j_ideal(j, u)?;
    join(j, &open_part(j, u)?)
}

/// `R` covers `c` iff `Z(c) ∪ R` covers `c` for `J`.
pub fn closed_topology(j: &Topology, u: &Ideal) -> Result<Topology> {
    require_j_ideal(j, u)?;
    let cat = j.cat();
    let out = family_where(j, |c, r| {
        Ok(j.covers(&sieve_union(cat, &z_sieve(cat, u, c)?, r)?))
    })?;
    debug_assert!(j.is_subfamily(&out));
    Ok(out)
}

/// The topology of sieves `R` on `c` such that `f*(R) ⊆ Z(d)` forces
/// `f ∈ Z(c)` for every `f: d → c`, before joining with the base.
pub fn quasiclosed_part(j: &Topology, u: &Ideal) -> Result<Topology> {
    let cat = j.cat();
    let z: Vec<Sieve> = cat
        .objects()
        .map(|c| z_sieve(cat, u, c))
        .collect::<Result<_>>()?;
    family_where(j, |c, r| {
        for &f in cat.arrows_into(c) {
            let d = cat.dom(f);
            if sieve_leq(cat, &pullback(cat, f, r)?, &z[d.index()])? && !u.contains(d) {
                return Ok(false);
            }
        }
        Ok(true)
    })
}

pub fn quasiclosed_topology(j: &Topology, u: &Ideal) -> Result<Topology> {
    require_j_ideal(j, u)?;
    join(j, &quasiclosed_part(j, u)?)
}

/// Objects whose empty sieve covers.
pub fn zero_ideal(j: &Topology) -> Ideal {
    let uni = j.universe();
    let objects = uni
        .cat()
        .objects()
        .filter(|&c| j.has(c, uni.empty_id(c)))
        .collect();
    Ideal { objects }
}

/// Quasi-closed topology at the zero ideal.
pub fn booleanization(j: &Topology) -> Topology {
    quasiclosed_topology(j, &zero_ideal(j)).expect("the zero ideal is a J-ideal")
}

fn require_leq(jp: &Topology, j: &Topology) -> Result<()> {
    if !j.leq(jp)? {
        return Err(Error::Precondition(format!(
            "the base topology {} is not below {}",
            j.describe(),
            jp.describe()
        )));
    }
    Ok(())
}

/// `{c | ∅ covers c for Jp}`, a `J`-ideal whenever `J ≤ Jp`.
pub fn ext(jp: &Topology, j: &Topology) -> Result<Ideal> {
    require_leq(jp, j)?;
    let u = zero_ideal(jp);
    debug_assert!(is_j_ideal(j, &u).unwrap_or(false));
    Ok(u)
}

/// The middle topology `M` of the factorization `J ≤ M ≤ Jp` into a closed
/// part (`J` to `M`) followed by a dense part (`M` to `Jp`).
pub fn dense_closed_factorization(jp: &Topology, j: &Topology) -> Result<Topology> {
    closed_topology(j, &ext(jp, j)?)
}

pub fn is_dense(jp: &Topology, j: &Topology) -> Result<bool> {
    Ok(ext(jp, j)? == zero_ideal(j))
}

/// Evaluates the skeletality criterion on the full subcategory of objects
/// outside `zero_ideal(J)`: whenever the sieve of arrows from objects
/// covered by `∅` under `Jp` is stably non-empty there, `∅` covers `c`.
pub fn is_skeletal(jp: &Topology, j: &Topology) -> Result<bool> {
    require_leq(jp, j)?;
    Ok(skeletal_witness(jp, j).is_none())
}

/// An object of the restricted category at which the criterion fails.
pub fn skeletal_witness(jp: &Topology, j: &Topology) -> Option<Obj> {
    let uni = jp.universe();
    let cat = uni.cat();
    let zero = zero_ideal(j);
    let kept = |o: Obj| !zero.contains(o);
    let empty_covers = |o: Obj| jp.has(o, uni.empty_id(o));
    // Z(c) contains an arrow into c exactly when its domain is in
    // `empty_covers`, so `g*(Z)` is non-empty in the restricted category
    // iff some restricted object with empty_covers maps to dom g.
    let reaches_zero = |e: Obj| {
        cat.objects()
            .any(|x| kept(x) && empty_covers(x) && cat.has_arrow(x, e))
    };
    cat.objects().filter(|&c| kept(c)).find(|&c| {
        let stably_non_empty = cat
            .arrows_into(c)
            .iter()
            .map(|&g| cat.dom(g))
            .filter(|&e| kept(e))
            .all(reaches_zero);
        stably_non_empty && !empty_covers(c)
    })
}

pub fn is_boolean(j: &Topology) -> bool {
    booleanization(j) == *j
}

pub fn is_two_valued(j: &Topology) -> Result<bool> {
    Ok(j_ideals(j)?.len() == 2)
}

pub fn is_degenerate(j: &Topology) -> bool {
    j.is_top()
}

/// Topologies `K ≥ J`, `K ≠ ⊤`, whose only strict upper bound is `⊤`.
pub fn atoms(j: &Topology) -> Result<Vec<Topology>> {
    let all = enumerate_topologies(j.universe())?;
    Ok(atoms_among(j, &all))
}

/// [`atoms`] against an already enumerated lattice.
pub fn atoms_among(j: &Topology, all: &[Topology]) -> Vec<Topology> {
    let above: Vec<&Topology> = all.iter().filter(|k| j.is_subfamily(k)).collect();
    above
        .iter()
        .filter(|k| !k.is_top())
        .filter(|k| {
            above
                .iter()
                .all(|k2| !k.is_subfamily(k2) || k2 == *k || k2.is_top())
        })
        .map(|k| (*k).clone())
        .collect()
}

/// The topologies above `J` that are Boolean and two-valued.
pub fn boolean_two_valued_among(j: &Topology, all: &[Topology]) -> Result<Vec<Topology>> {
    let mut out = Vec::new();
    for k in all.iter().filter(|k| j.is_subfamily(k)) {
        if is_boolean(k) && is_two_valued(k)? {
            out.push(k.clone());
        }
    }
    Ok(out)
}

/// Whether the open and closed topologies of `u` meet in `J` and join to `⊤`.
pub fn complements_check(j: &Topology, u: &Ideal) -> Result<bool> {
    let open = open_topology(j, u)?;
    let closed = closed_topology(j, u)?;
    Ok(open.meet(&closed)? == *j && join(&open, &closed)?.is_top())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{builtin, corpus};
    use crate::topology::test_support::{c2, sieve};
    use crate::universe::Universe;

    fn ideal(cat: &FinCat, names: &[&str]) -> Ideal {
        Ideal::new(cat, names.iter().map(|n| cat.object(n).unwrap())).unwrap()
    }

    #[test]
    fn ideal_listing() {
        let c2 = builtin("C2").unwrap();
        let names: Vec<String> = ideals(&c2)
            .unwrap()
            .iter()
            .map(|u| u.display(&c2))
            .collect();
        assert_eq!(names, ["{}", "{a}", "{a, b}"]);
        assert!(matches!(
            Ideal::new(&c2, [c2.object("b").unwrap()]),
            Err(Error::BadIdeal { .. })
        ));
        assert_eq!(ideals(&builtin("D2").unwrap()).unwrap().len(), 4);
        let c = self::c2();
        assert_eq!(j_ideals(&c.bottom).unwrap().len(), 3);
    }

    #[test]
    fn z_sieves() {
        let c = c2();
        let cat = c.uni.cat();
        let a = ideal(cat, &["a"]);
        let b = cat.object("b").unwrap();
        assert_eq!(z_sieve(cat, &a, b).unwrap(), sieve(&c.uni, "b", &["f"]));
        assert!(z_sieve(cat, &a, cat.object("a").unwrap())
            .unwrap()
            .is_maximal(cat));
        assert!(z_sieve(cat, &Ideal::all(cat), b).unwrap().is_maximal(cat));
        assert!(z_sieve(cat, &Ideal::empty(), b).unwrap().is_empty());
    }

    #[test]
    fn open_closed_quasiclosed_on_c2() {
        let c = c2();
        let cat = c.uni.cat();
        let a = ideal(cat, &["a"]);
        assert_eq!(open_topology(&c.bottom, &a).unwrap(), c.j2);
        assert_eq!(closed_topology(&c.bottom, &a).unwrap(), c.j3);
        assert_eq!(
            quasiclosed_topology(&c.bottom, &Ideal::empty()).unwrap(),
            c.j2
        );
        assert_eq!(
            closed_topology(&c.bottom, &Ideal::empty()).unwrap(),
            c.bottom
        );
        for j in [&c.bottom, &c.j2, &c.j3, &c.top] {
            let all = Ideal::all(cat);
            assert_eq!(&open_topology(j, &all).unwrap(), j);
            assert!(closed_topology(j, &all).unwrap().is_top());
            assert!(quasiclosed_topology(j, &all).unwrap().is_top());
        }
        assert!(complements_check(&c.bottom, &a).unwrap());
    }

    #[test]
    fn zero_ideal_ext_and_factorization() {
        let c = c2();
        let cat = c.uni.cat();
        assert!(zero_ideal(&c.bottom).is_empty());
        assert_eq!(zero_ideal(&c.top), Ideal::all(cat));
        assert_eq!(zero_ideal(&c.j3), ideal(cat, &["a"]));
        assert_eq!(ext(&c.j3, &c.bottom).unwrap(), ideal(cat, &["a"]));
        assert!(ext(&c.j2, &c.bottom).unwrap().is_empty());
        assert!(matches!(ext(&c.bottom, &c.j2), Err(Error::Precondition(_))));
        assert_eq!(dense_closed_factorization(&c.j3, &c.bottom).unwrap(), c.j3);
        assert_eq!(
            dense_closed_factorization(&c.j2, &c.bottom).unwrap(),
            c.bottom
        );
        assert!(is_dense(&c.j2, &c.bottom).unwrap());
        assert!(!is_dense(&c.j3, &c.bottom).unwrap());
    }

    #[test]
    fn booleanization_examples() {
        let c = c2();
        assert_eq!(booleanization(&c.bottom), c.j2);
        assert_eq!(booleanization(&c.top), c.top);
        let c1 = Universe::new(builtin("C1").unwrap()).unwrap();
        let bottom = Topology::bottom(&c1);
        assert_eq!(booleanization(&bottom), bottom);
        assert!(is_boolean(&bottom) && is_two_valued(&bottom).unwrap() && !is_degenerate(&bottom));
        assert!(!is_boolean(&c.bottom));
        assert!(is_degenerate(&c.top) && !is_two_valued(&c.top).unwrap());
    }

    #[test]
    fn skeletal_examples() {
        let c = c2();
        assert!(is_skeletal(&c.j2, &c.bottom).unwrap());
        assert!(!is_skeletal(&c.j3, &c.bottom).unwrap());
        assert_eq!(
            skeletal_witness(&c.j3, &c.bottom),
            Some(c.uni.cat().object("b").unwrap())
        );
        for j in [&c.bottom, &c.j2, &c.j3, &c.top] {
            assert!(is_skeletal(j, j).unwrap());
            assert!(is_dense(j, j).unwrap());
        }
    }

    #[test]
    fn atom_examples() {
        let c = c2();
        assert_eq!(atoms(&c.bottom).unwrap(), vec![c.j2.clone(), c.j3.clone()]);
        assert!(atoms(&c.top).unwrap().is_empty());
        let c1 = Universe::new(builtin("C1").unwrap()).unwrap();
        assert_eq!(
            atoms(&Topology::bottom(&c1)).unwrap(),
            vec![Topology::bottom(&c1)]
        );
    }

    #[test]
    fn corpus_sweep() {
        for (name, cat) in corpus() {
            let uni = Universe::new(cat).unwrap();
            let all = enumerate_topologies(&uni).unwrap();
            for j in &all {
                assert_eq!(
                    atoms_among(j, &all),
                    boolean_two_valued_among(j, &all).unwrap(),
                    "{name}"
                );
                let b = booleanization(j);
                assert!(is_boolean(&b) && zero_ideal(&b) == zero_ideal(j), "{name}");
                for u in j_ideals(j).unwrap() {
                    assert!(
                        complements_check(j, &u).unwrap(),
                        "{name} {}",
                        u.display(uni.cat())
                    );
                    assert!(open_part(j, &u).is_ok() && quasiclosed_part(j, &u).is_ok());
                }
                for jp in all.iter().filter(|jp| j.is_subfamily(jp)) {
                    if is_dense(jp, j).unwrap() {
                        assert!(is_skeletal(jp, j).unwrap(), "{name}");
                    }
                }
            }
        }
    }

    #[test]
    fn ideal_doc_round_trip() {
        let cat = builtin("C2").unwrap();
        let u = ideal(&cat, &["a"]);
        let json = serde_json::to_string(&u.to_doc(&cat)).unwrap();
        assert_eq!(json, r#"{"objects":["a"]}"#);
        let doc: IdealDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(Ideal::from_doc(&cat, &doc).unwrap(), u);
    }
}
