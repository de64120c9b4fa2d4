//! Finite categories given by an explicit composition table.
//!
//! A category is read from a small JSON document (objects, non-identity
//! arrows, composites), turned into a [`CategoryTable`], checked against the
//! category laws by [`validate`], and finally frozen into a [`FinCat`] which
//! carries the lookup tables every sieve computation relies on.
//!
//! Canonical order is declaration order, with identities placed first (one
//! per object, in object order). Every set-valued output of this crate is
//! emitted in canonical order.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of arrows into a single object that a [`FinCat`] accepts.
/// Sieves are stored as bit masks over the arrows into their object.
pub const MAX_ARROWS_INTO: usize = 64;

/// Index of an object in canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Obj(pub(crate) u32);

/// Index of an arrow in canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arrow(pub(crate) u32);

impl Obj {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl Arrow {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// The on-disk category format.
///
/// ```json
/// {"objects":["a","b"],"arrows":[{"name":"f","dom":"a","cod":"b"}],"compose":[]}
/// ```
///
/// `compose` holds triples `[g, f, gf]` meaning `g∘f = gf`. Compositions
/// with identities may be omitted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryDoc {
    pub objects: Vec<String>,
    #[serde(default)]
    pub arrows: Vec<ArrowDoc>,
    #[serde(default)]
    pub compose: Vec<[String; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowDoc {
    pub name: String,
    pub dom: String,
    pub cod: String,
}

impl CategoryDoc {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn object(mut self, name: &str) -> Self {
        self.objects.push(name.to_owned());
        self
    }

    pub fn arrow(mut self, name: &str, dom: &str, cod: &str) -> Self {
        self.arrows.push(ArrowDoc {
            name: name.to_owned(),
            dom: dom.to_owned(),
            cod: cod.to_owned(),
        });
        self
    }

    /// Records `g∘f = gf`.
    pub fn compose(mut self, g: &str, f: &str, gf: &str) -> Self {
        self.compose
            .push([g.to_owned(), f.to_owned(), gf.to_owned()]);
        self
    }

    pub fn build(&self) -> Result<FinCat> {
        FinCat::new(CategoryTable::from_doc(self)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct ArrowData {
    pub(crate) name: String,
    pub(crate) dom: Obj,
    pub(crate) cod: Obj,
}

/// A category whose laws have not been checked yet.
///
/// The composition table is total on composable pairs, but may violate the
/// identity or associativity laws, or return composites of the wrong type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CategoryTable {
    pub(crate) objects: Vec<String>,
    pub(crate) arrows: Vec<ArrowData>,
    pub(crate) identity: Vec<Arrow>,
    /// `table[g * n + f]` is `g∘f` for composable pairs.
    pub(crate) table: Vec<Option<Arrow>>,
}

fn identity_name(object: &str) -> String {
    format!("1_{object}")
}

impl CategoryTable {
    pub fn from_doc(doc: &CategoryDoc) -> Result<Self> {
        let mut object_ix = HashMap::new();
        for (i, name) in doc.objects.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::Malformed("empty object name".into()));
            }
            if object_ix.insert(name.as_str(), Obj(i as u32)).is_some() {
                return Err(Error::Malformed(format!("duplicate object `{name}`")));
            }
        }
        let lookup_obj = |name: &str| {
            object_ix
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnknownObject(name.to_owned()))
        };

        // Identities first, in object order; explicit ones are recognised by
        // name and must be endomorphisms.
        let mut arrows: Vec<ArrowData> = doc
            .objects
            .iter()
            .enumerate()
            .map(|(i, o)| ArrowData {
                name: identity_name(o),
                dom: Obj(i as u32),
                cod: Obj(i as u32),
            })
            .collect();
        for a in &doc.arrows {
            if a.name.is_empty() {
                return Err(Error::Malformed("empty arrow name".into()));
            }
            let dom = lookup_obj(&a.dom)?;
            let cod = lookup_obj(&a.cod)?;
            if let Some(pos) = arrows.iter().position(|x| x.name == a.name) {
                let is_identity = pos < doc.objects.len();
                if is_identity && dom == cod && dom.index() == pos {
                    continue;
                }
                if is_identity {
                    return Err(Error::Malformed(format!(
                        "arrow `{}` uses the identity name of `{}` but is not an endomorphism of it",
                        a.name, doc.objects[pos]
                    )));
                }
                return Err(Error::Malformed(format!("duplicate arrow `{}`", a.name)));
            }
            arrows.push(ArrowData {
                name: a.name.clone(),
                dom,
                cod,
            });
        }

        let arrow_ix: HashMap<&str, Arrow> = arrows
            .iter()
            .enumerate()
            .map(|(i, a)| (a.name.as_str(), Arrow(i as u32)))
            .collect();
        let lookup_arrow = |name: &str| {
            arrow_ix
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnknownArrow(name.to_owned()))
        };

        let n = arrows.len();
        let identity: Vec<Arrow> = (0..doc.objects.len()).map(|i| Arrow(i as u32)).collect();
        let mut table: Vec<Option<Arrow>> = vec![None; n * n];
        for [g, f, gf] in &doc.compose {
            let (g, f, gf) = (lookup_arrow(g)?, lookup_arrow(f)?, lookup_arrow(gf)?);
            if arrows[g.index()].dom != arrows[f.index()].cod {
                return Err(Error::Malformed(format!(
                    "non-composable pair ({}, {}): dom({}) = {} but cod({}) = {}",
                    arrows[g.index()].name,
                    arrows[f.index()].name,
                    arrows[g.index()].name,
                    doc.objects[arrows[g.index()].dom.index()],
                    arrows[f.index()].name,
                    doc.objects[arrows[f.index()].cod.index()],
                )));
            }
            let slot = &mut table[g.index() * n + f.index()];
            match slot {
                Some(prev) if *prev != gf => {
                    return Err(Error::Malformed(format!(
                        "conflicting composites for {}∘{}: {} and {}",
                        arrows[g.index()].name,
                        arrows[f.index()].name,
                        arrows[prev.index()].name,
                        arrows[gf.index()].name
                    )))
                }
                _ => *slot = Some(gf),
            }
        }

        // Identity compositions default to the identity laws.
        for (i, a) in arrows.iter().enumerate() {
            let f = Arrow(i as u32);
            let left = identity[a.cod.index()];
            table[left.index() * n + i].get_or_insert(f);
            let right = identity[a.dom.index()];
            table[i * n + right.index()].get_or_insert(f);
        }

        for (gi, g) in arrows.iter().enumerate() {
            for (fi, f) in arrows.iter().enumerate() {
                if g.dom == f.cod && table[gi * n + fi].is_none() {
                    return Err(Error::Malformed(format!(
                        "missing composite {}∘{}",
                        g.name, f.name
                    )));
                }
            }
        }

        Ok(CategoryTable {
            objects: doc.objects.clone(),
            arrows,
            identity,
            table,
        })
    }

    fn name(&self, a: Arrow) -> &str {
        &self.arrows[a.index()].name
    }

    fn get(&self, g: Arrow, f: Arrow) -> Option<Arrow> {
        self.table[g.index() * self.arrows.len() + f.index()]
    }
}

/// A single failed category law, with the arrows that witness it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    CompositeType {
        g: String,
        f: String,
        composite: String,
    },
    IdentityLaw {
        arrow: String,
        identity: String,
        got: String,
    },
    Associativity {
        h: String,
        g: String,
        f: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::CompositeType { g, f, composite } => write!(
                out,
                "composite type: {g}∘{f} = {composite} has the wrong domain or codomain"
            ),
            Violation::IdentityLaw {
                arrow,
                identity,
                got,
            } => write!(
                out,
                "identity law: composing {arrow} with {identity} gives {got}"
            ),
            Violation::Associativity { h, g, f } => write!(
                out,
                "associativity: {h}∘({g}∘{f}) differs from ({h}∘{g})∘{f}"
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                out.write_str("; ")?;
            }
            write!(out, "{v}")?;
        }
        Ok(())
    }
}

/// Checks typing of composites, both identity laws and associativity.
pub fn validate(table: &CategoryTable) -> ValidationReport {
    let mut violations = Vec::new();
    let arrows = &table.arrows;
    let all = || (0..arrows.len() as u32).map(Arrow);
    let dom = |a: Arrow| arrows[a.index()].dom;
    let cod = |a: Arrow| arrows[a.index()].cod;

    for g in all() {
        for f in all() {
            if dom(g) != cod(f) {
                continue;
            }
            let Some(gf) = table.get(g, f) else { continue };
            if dom(gf) != dom(f) || cod(gf) != cod(g) {
                violations.push(Violation::CompositeType {
                    g: table.name(g).into(),
                    f: table.name(f).into(),
                    composite: table.name(gf).into(),
                });
            }
        }
    }

    for f in all() {
        let left = table.identity[cod(f).index()];
        let right = table.identity[dom(f).index()];
        for (a, b, id) in [(left, f, left), (f, right, right)] {
            if let Some(got) = table.get(a, b) {
                if got != f {
                    violations.push(Violation::IdentityLaw {
                        arrow: table.name(f).into(),
                        identity: table.name(id).into(),
                        got: table.name(got).into(),
                    });
                }
            }
        }
    }

    let typed = |g: Arrow, f: Arrow| {
        table
            .get(g, f)
            .filter(|&gf| dom(gf) == dom(f) && cod(gf) == cod(g))
    };
    for h in all() {
        for g in all().filter(|&g| cod(g) == dom(h)) {
            for f in all().filter(|&f| cod(f) == dom(g)) {
                let left = typed(g, f).and_then(|gf| typed(h, gf));
                let right = typed(h, g).and_then(|hg| typed(hg, f));
                if let (Some(l), Some(r)) = (left, right) {
                    if l != r {
                        violations.push(Violation::Associativity {
                            h: table.name(h).into(),
                            g: table.name(g).into(),
                            f: table.name(f).into(),
                        });
                    }
                }
            }
        }
    }

    ValidationReport { violations }
}

/// A validated finite category.
#[derive(Clone, Debug)]
pub struct FinCat {
    table: CategoryTable,
    object_ix: HashMap<String, Obj>,
    arrow_ix: HashMap<String, Arrow>,
    into: Vec<Vec<Arrow>>,
    /// Position of each arrow in `into[cod]`.
    local: Vec<u8>,
    /// Mask (over `into[cod g]`) of the sieve generated by `g`.
    principal: Vec<u64>,
    /// `post[g][j]` is the position of `g∘into[dom g][j]` in `into[cod g]`.
    post: Vec<Vec<u8>>,
}

impl PartialEq for FinCat {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table
    }
}

impl Eq for FinCat {}

impl FinCat {
    pub fn new(table: CategoryTable) -> Result<Self> {
        let report = validate(&table);
        if !report.is_empty() {
            return Err(Error::Invalid(report));
        }
        let n_obj = table.objects.len();
        let mut into = vec![Vec::new(); n_obj];
        let mut local = vec![0u8; table.arrows.len()];
        for (i, a) in table.arrows.iter().enumerate() {
            let slot = &mut into[a.cod.index()];
            if slot.len() == MAX_ARROWS_INTO {
                return Err(Error::Malformed(format!(
                    "more than {MAX_ARROWS_INTO} arrows into `{}`",
                    table.objects[a.cod.index()]
                )));
            }
            local[i] = slot.len() as u8;
            slot.push(Arrow(i as u32));
        }
        let mut post = Vec::with_capacity(table.arrows.len());
        let mut principal = Vec::with_capacity(table.arrows.len());
        for (gi, g) in table.arrows.iter().enumerate() {
            let row: Vec<u8> = into[g.dom.index()]
                .iter()
                .map(|&h| {
                    let gh = table
                        .get(Arrow(gi as u32), h)
                        .expect("validated table is total");
                    local[gh.index()]
                })
                .collect();
            principal.push(row.iter().fold(0u64, |m, &j| m | (1 << j)));
            post.push(row);
        }
        let object_ix = table
            .objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.clone(), Obj(i as u32)))
            .collect();
        let arrow_ix = table
            .arrows
            .iter()
            .enumerate()
            .map(|(i, a)| (a.name.clone(), Arrow(i as u32)))
            .collect();
        Ok(FinCat {
            table,
            object_ix,
            arrow_ix,
            into,
            local,
            principal,
            post,
        })
    }

    pub fn table(&self) -> &CategoryTable {
        &self.table
    }

    pub fn num_objects(&self) -> usize {
        self.table.objects.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.table.arrows.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = Obj> + '_ {
        (0..self.table.objects.len() as u32).map(Obj)
    }

    pub fn arrows(&self) -> impl Iterator<Item = Arrow> + '_ {
        (0..self.table.arrows.len() as u32).map(Arrow)
    }

    pub fn object(&self, name: &str) -> Result<Obj> {
        self.object_ix
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownObject(name.to_owned()))
    }

    pub fn arrow(&self, name: &str) -> Result<Arrow> {
        self.arrow_ix
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownArrow(name.to_owned()))
    }

    pub fn object_name(&self, o: Obj) -> &str {
        &self.table.objects[o.index()]
    }

    pub fn arrow_name(&self, a: Arrow) -> &str {
        &self.table.arrows[a.index()].name
    }

    pub fn dom(&self, a: Arrow) -> Obj {
        self.table.arrows[a.index()].dom
    }

    pub fn cod(&self, a: Arrow) -> Obj {
        self.table.arrows[a.index()].cod
    }

    pub fn identity(&self, o: Obj) -> Arrow {
        self.table.identity[o.index()]
    }

    pub fn is_identity(&self, a: Arrow) -> bool {
        self.identity(self.dom(a)) == a
    }

    /// `g∘f`, or `None` when `dom g ≠ cod f`.
    pub fn compose(&self, g: Arrow, f: Arrow) -> Option<Arrow> {
        self.table.get(g, f)
    }

    /// All arrows with codomain `c`, in canonical order. These are the
    /// members of the maximal sieve on `c`.
    pub fn arrows_into(&self, c: Obj) -> &[Arrow] {
        &self.into[c.index()]
    }

    pub fn arrows_into_named(&self, c: &str) -> Result<Vec<&str>> {
        let c = self.object(c)?;
        Ok(self.into[c.index()]
            .iter()
            .map(|&a| self.arrow_name(a))
            .collect())
    }

    pub(crate) fn local_index(&self, a: Arrow) -> u32 {
        self.local[a.index()] as u32
    }

    pub(crate) fn principal_mask(&self, a: Arrow) -> u64 {
        self.principal[a.index()]
    }

    pub(crate) fn post_row(&self, g: Arrow) -> &[u8] {
        &self.post[g.index()]
    }

    /// Whether some arrow `d → c` exists.
    pub fn has_arrow(&self, d: Obj, c: Obj) -> bool {
        self.into[c.index()].iter().any(|&a| self.dom(a) == d)
    }

    /// The full subcategory on `keep`, with objects and arrows in the
    /// canonical order inherited from `self`.
    pub fn full_subcategory(&self, keep: &BTreeSet<Obj>) -> Result<FinCat> {
        if let Some(o) = keep.iter().find(|o| o.index() >= self.num_objects()) {
            return Err(Error::UnknownObject(format!("#{}", o.0)));
        }
        let kept_obj: Vec<Obj> = self.objects().filter(|o| keep.contains(o)).collect();
        let mut obj_map = vec![None; self.num_objects()];
        for (i, o) in kept_obj.iter().enumerate() {
            obj_map[o.index()] = Some(Obj(i as u32));
        }
        let kept_arrows: Vec<Arrow> = self
            .arrows()
            .filter(|&a| keep.contains(&self.dom(a)) && keep.contains(&self.cod(a)))
            .collect();
        let mut arrow_map = vec![None; self.num_arrows()];
        for (i, a) in kept_arrows.iter().enumerate() {
            arrow_map[a.index()] = Some(Arrow(i as u32));
        }
        let n = kept_arrows.len();
        let mut table = vec![None; n * n];
        for (gi, &g) in kept_arrows.iter().enumerate() {
            for (fi, &f) in kept_arrows.iter().enumerate() {
                if let Some(gf) = self.compose(g, f) {
                    table[gi * n + fi] = arrow_map[gf.index()];
                }
            }
        }
        let sub = CategoryTable {
            objects: kept_obj
                .iter()
                .map(|&o| self.object_name(o).to_owned())
                .collect(),
            arrows: kept_arrows
                .iter()
                .map(|&a| ArrowData {
                    name: self.arrow_name(a).to_owned(),
                    dom: obj_map[self.dom(a).index()].expect("kept"),
                    cod: obj_map[self.cod(a).index()].expect("kept"),
                })
                .collect(),
            identity: kept_obj
                .iter()
                .map(|&o| arrow_map[self.identity(o).index()].expect("identity kept"))
                .collect(),
            table,
        };
        FinCat::new(sub)
    }

    /// Serializes back to the input format, omitting identities and
    /// identity compositions.
    pub fn to_doc(&self) -> CategoryDoc {
        let mut doc = CategoryDoc {
            objects: self.table.objects.clone(),
            ..CategoryDoc::default()
        };
        for a in self.arrows().filter(|&a| !self.is_identity(a)) {
            doc.arrows.push(ArrowDoc {
                name: self.arrow_name(a).to_owned(),
                dom: self.object_name(self.dom(a)).to_owned(),
                cod: self.object_name(self.cod(a)).to_owned(),
            });
        }
        for g in self.arrows().filter(|&a| !self.is_identity(a)) {
            for f in self.arrows().filter(|&a| !self.is_identity(a)) {
                if let Some(gf) = self.compose(g, f) {
                    doc.compose.push([
                        self.arrow_name(g).to_owned(),
                        self.arrow_name(f).to_owned(),
                        self.arrow_name(gf).to_owned(),
                    ]);
                }
            }
        }
        doc
    }
}

/// Parses, checks structure, validates the laws.
pub fn load_category(source: &str) -> Result<FinCat> {
    let doc: CategoryDoc = serde_json::from_str(source).map_err(Error::from_json)?;
    doc.build()
}

/// Parses and checks structure only, so that law violations can be reported
/// with [`validate`] instead of as an error.
pub fn load_table(source: &str) -> Result<CategoryTable> {
    let doc: CategoryDoc = serde_json::from_str(source).map_err(Error::from_json)?;
    CategoryTable::from_doc(&doc)
}

pub const FIXTURES: [&str; 5] = ["C1", "C2", "D2", "M2", "SPAN"];

/// The named fixture categories.
///
/// * `C1`: terminal category
/// * `C2`: a single arrow `f: a → b`
/// * `D2`: two objects, identities only
/// * `M2`: one object `o` with an idempotent `e` (`e∘e = e`)
/// * `SPAN`: `p: a → b`, `q: a → c`
pub fn builtin(name: &str) -> Result<FinCat> {
    let doc = match name {
        "C1" => CategoryDoc::new().object("a"),
        "C2" => CategoryDoc::new()
            .object("a")
            .object("b")
            .arrow("f", "a", "b"),
        "D2" => CategoryDoc::new().object("a").object("b"),
        "M2" => CategoryDoc::new()
            .object("o")
            .arrow("e", "o", "o")
            .compose("e", "e", "e"),
        "SPAN" => CategoryDoc::new()
            .object("a")
            .object("b")
            .object("c")
            .arrow("p", "a", "b")
            .arrow("q", "a", "c"),
        other => return Err(Error::UnknownFixture(other.to_owned())),
    };
    doc.build()
}

/// All fixtures, in [`FIXTURES`] order.
pub fn corpus() -> Vec<(&'static str, FinCat)> {
    FIXTURES
        .iter()
        .map(|&n| (n, builtin(n).expect("fixtures are valid")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2() -> FinCat {
        builtin("C2").unwrap()
    }

    #[test]
    fn identities_are_synthesized() {
        let cat = load_category(
            r#"{"objects":["a","b"],"arrows":[{"name":"f","dom":"a","cod":"b"}],"compose":[]}"#,
        )
        .unwrap();
        let names: Vec<_> = cat.arrows().map(|a| cat.arrow_name(a)).collect();
        assert_eq!(names, ["1_a", "1_b", "f"]);
    }

    #[test]
    fn explicit_identities_are_accepted() {
        let cat = load_category(
            r#"{"objects":["a"],"arrows":[{"name":"1_a","dom":"a","cod":"a"}],"compose":[["1_a","1_a","1_a"]]}"#,
        )
        .unwrap();
        assert_eq!(cat.num_arrows(), 1);
    }

    #[test]
    fn non_composable_pair_is_rejected() {
        let err = CategoryDoc::new()
            .object("a")
            .object("b")
            .arrow("f", "a", "b")
            .arrow("g", "a", "b")
            .compose("g", "f", "f")
            .build()
            .unwrap_err();
        assert!(err.to_string().contains("non-composable pair"), "{err}");
    }

    #[test]
    fn missing_composite_is_rejected() {
        let err = CategoryDoc::new()
            .object("a")
            .object("b")
            .object("c")
            .arrow("f", "a", "b")
            .arrow("g", "b", "c")
            .build()
            .unwrap_err();
        assert!(err.to_string().contains("missing composite g∘f"), "{err}");
    }

    #[test]
    fn parse_errors_carry_position() {
        match load_category("{\"objects\": [\n  \"a\",\n  oops]}") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn idempotent_monoid_is_valid() {
        let cat = builtin("M2").unwrap();
        assert_eq!(cat.num_objects(), 1);
        assert_eq!(cat.num_arrows(), 2);
        // exhaustive table check, independent of `validate`
        let all: Vec<_> = cat.arrows().collect();
        for &x in &all {
            for &y in &all {
                for &z in &all {
                    let l = cat.compose(x, cat.compose(y, z).unwrap()).unwrap();
                    let r = cat.compose(cat.compose(x, y).unwrap(), z).unwrap();
                    assert_eq!(l, r);
                }
            }
            let id = cat.identity(cat.dom(x));
            assert_eq!(cat.compose(x, id), Some(x));
            assert_eq!(cat.compose(id, x), Some(x));
        }
    }

    #[test]
    fn fixtures_validate() {
        for (_, cat) in corpus() {
            assert!(validate(cat.table()).is_empty());
        }
    }

    #[test]
    fn broken_identity_law_is_reported_once() {
        let table = CategoryTable::from_doc(
            &CategoryDoc::new()
                .object("a")
                .object("b")
                .arrow("f", "a", "b")
                .arrow("f2", "a", "b")
                .compose("f", "1_a", "f2"),
        )
        .unwrap();
        let report = validate(&table);
        assert_eq!(report.violations.len(), 1, "{report}");
        assert!(matches!(&report.violations[0],
            Violation::IdentityLaw { arrow, .. } if arrow == "f"));
        assert!(report.to_string().contains("identity law"));
    }

    #[test]
    fn perturbed_chain_breaks_associativity_once() {
        let chain = CategoryDoc::new()
            .object("a")
            .object("b")
            .object("c")
            .object("d")
            .arrow("f", "a", "b")
            .arrow("g", "b", "c")
            .arrow("h", "c", "d")
            .arrow("gf", "a", "c")
            .arrow("hg", "b", "d")
            .arrow("hgf", "a", "d")
            .arrow("k", "a", "d")
            .compose("g", "f", "gf")
            .compose("h", "g", "hg")
            .compose("h", "gf", "hgf");
        let good = chain.clone().compose("hg", "f", "hgf");
        assert!(validate(&CategoryTable::from_doc(&good).unwrap()).is_empty());

        let bad = chain.compose("hg", "f", "k");
        let report = validate(&CategoryTable::from_doc(&bad).unwrap());
        assert_eq!(
            report.violations,
            vec![Violation::Associativity {
                h: "h".into(),
                g: "g".into(),
                f: "f".into()
            }]
        );
    }

    #[test]
    fn arrows_into_follow_canonical_order() {
        let cat = c2();
        assert_eq!(cat.arrows_into_named("b").unwrap(), ["1_b", "f"]);
        assert_eq!(cat.arrows_into_named("a").unwrap(), ["1_a"]);
        let d2 = builtin("D2").unwrap();
        for o in d2.objects() {
            assert_eq!(d2.arrows_into(o), [d2.identity(o)]);
        }
        assert!(matches!(
            cat.arrows_into_named("z"),
            Err(Error::UnknownObject(_))
        ));
    }

    #[test]
    fn full_subcategories() {
        let cat = c2();
        let all: BTreeSet<_> = cat.objects().collect();
        assert_eq!(cat.full_subcategory(&all).unwrap(), cat);

        let a = cat.object("a").unwrap();
        let only_a = cat.full_subcategory(&BTreeSet::from([a])).unwrap();
        assert_eq!(only_a, builtin("C1").unwrap());

        let empty = cat.full_subcategory(&BTreeSet::new()).unwrap();
        assert_eq!(empty.num_objects(), 0);
        assert_eq!(empty.num_arrows(), 0);
    }

    #[test]
    fn builtin_fixtures() {
        let c1 = builtin("C1").unwrap();
        assert_eq!((c1.num_objects(), c1.num_arrows()), (1, 1));
        let c2 = c2();
        assert_eq!((c2.num_objects(), c2.num_arrows()), (2, 3));
        let d2 = builtin("D2").unwrap();
        assert_eq!((d2.num_objects(), d2.num_arrows()), (2, 2));
        assert!(matches!(builtin("C3"), Err(Error::UnknownFixture(_))));
    }

    #[test]
    fn doc_round_trip() {
        for (_, cat) in corpus() {
            assert_eq!(cat.to_doc().build().unwrap(), cat);
        }
    }
}
