//! Sieves and presieves on a finite category.
//!
//! A sieve on `c` is stored as a bit mask over `arrows_into(c)`; bit `i` is
//! the `i`-th arrow into `c` in canonical order. Identities are stored like
//! any other member, so a sieve is maximal exactly when it contains `1_c`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fincat::{Arrow, FinCat, Obj};

fn full_mask(len: usize) -> u64 {
    if len == 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// A set of arrows with common codomain, not necessarily closed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Presieve {
    on: Obj,
    mask: u64,
}

impl Presieve {
    pub fn new(cat: &FinCat, on: Obj, members: &[Arrow]) -> Result<Self> {
        let mut mask = 0;
        for &f in members {
            if cat.cod(f) != on {
                return Err(Error::CodomainMismatch {
                    arrow: cat.arrow_name(f).into(),
                    object: cat.object_name(on).into(),
                });
            }
            mask |= 1 << cat.local_index(f);
        }
        Ok(Presieve { on, mask })
    }

    pub fn on(&self) -> Obj {
        self.on
    }
}

/// A precomposition-closed set of arrows into a fixed object.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Sieve {
    on: Obj,
    mask: u64,
}

impl Sieve {
    pub(crate) fn from_mask(on: Obj, mask: u64) -> Self {
        Sieve { on, mask }
    }

    pub(crate) fn mask(&self) -> u64 {
        self.mask
    }

    pub fn on(&self) -> Obj {
        self.on
    }

    pub fn empty(on: Obj) -> Self {
        Sieve { on, mask: 0 }
    }

    /// The maximal sieve `M_c`: every arrow into `c`.
    pub fn maximal(cat: &FinCat, c: Obj) -> Self {
        Sieve {
            on: c,
            mask: full_mask(cat.arrows_into(c).len()),
        }
    }

    /// Builds a sieve from its full member list; fails if the members do not
    /// form a sieve.
    pub fn new(cat: &FinCat, on: Obj, members: &[Arrow]) -> Result<Self> {
        let p = Presieve::new(cat, on, members)?;
        let closed = generate_sieve(cat, &p);
        if closed.mask != p.mask {
            let missing = closed.mask & !p.mask;
            let witness = cat.arrows_into(on)[missing.trailing_zeros() as usize];
            return Err(Error::NotASieve {
                object: cat.object_name(on).into(),
                reason: format!(
                    "not closed under precomposition (missing `{}`)",
                    cat.arrow_name(witness)
                ),
            });
        }
        Ok(closed)
    }

    pub fn is_maximal(&self, cat: &FinCat) -> bool {
        self.mask == full_mask(cat.arrows_into(self.on).len())
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn contains(&self, cat: &FinCat, f: Arrow) -> bool {
        cat.cod(f) == self.on && self.mask & (1 << cat.local_index(f)) != 0
    }

    /// Members in canonical order.
    pub fn members<'c>(&self, cat: &'c FinCat) -> impl Iterator<Item = Arrow> + 'c {
        let mask = self.mask;
        cat.arrows_into(self.on)
            .iter()
            .enumerate()
            .filter(move |(i, _)| mask & (1 << i) != 0)
            .map(|(_, &a)| a)
    }

    pub fn member_names<'c>(&self, cat: &'c FinCat) -> Vec<&'c str> {
        self.members(cat).map(|a| cat.arrow_name(a)).collect()
    }

    /// Canonical order on sieves over one object: lexicographic on the
    /// ascending sequence of member positions (so `∅` comes first).
    pub fn canonical_cmp(&self, other: &Sieve) -> Ordering {
        self.on
            .cmp(&other.on)
            .then_with(|| mask_lex_cmp(self.mask, other.mask))
    }

    pub fn display(&self, cat: &FinCat) -> String {
        format!(
            "{{{}}} on {}",
            self.member_names(cat).join(", "),
            cat.object_name(self.on)
        )
    }

    pub fn to_doc(&self, cat: &FinCat) -> SieveDoc {
        SieveDoc {
            on: cat.object_name(self.on).to_owned(),
            arrows: self
                .member_names(cat)
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }

    pub fn from_doc(cat: &FinCat, doc: &SieveDoc) -> Result<Self> {
        let on = cat.object(&doc.on)?;
        let members = doc
            .arrows
            .iter()
            .map(|n| cat.arrow(n))
            .collect::<Result<Vec<_>>>()?;
        Sieve::new(cat, on, &members)
    }
}

pub(crate) fn mask_lex_cmp(a: u64, b: u64) -> Ordering {
    let diff = a ^ b;
    if diff == 0 {
        return Ordering::Equal;
    }
    let i = diff.trailing_zeros();
    let above = |m: u64| if i == 63 { 0 } else { m >> (i + 1) };
    if a & (1 << i) != 0 {
        // `a` continues with position i; `b` either ends (b is a prefix) or
        // continues with a larger position.
        if above(b) == 0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    } else if above(a) == 0 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Serialized sieve: `{"on":"b","arrows":["1_b","f"]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveDoc {
    pub on: String,
    pub arrows: Vec<String>,
}

/// The smallest sieve containing `p`: all `g∘h` with `g ∈ p`.
pub fn generate_sieve(cat: &FinCat, p: &Presieve) -> Sieve {
    let mut mask = 0;
    for (i, &g) in cat.arrows_into(p.on).iter().enumerate() {
        if p.mask & (1 << i) != 0 {
            mask |= cat.principal_mask(g);
        }
    }
    Sieve { on: p.on, mask }
}

/// `g*(s) = {h | g∘h ∈ s}`, a sieve on `dom g`.
pub fn pullback(cat: &FinCat, g: Arrow, s: &Sieve) -> Result<Sieve> {
    if cat.cod(g) != s.on {
        return Err(Error::CodomainMismatch {
            arrow: cat.arrow_name(g).into(),
            object: cat.object_name(s.on).into(),
        });
    }
    Ok(pullback_unchecked(cat, g, s))
}

pub(crate) fn pullback_unchecked(cat: &FinCat, g: Arrow, s: &Sieve) -> Sieve {
    let mut mask = 0;
    for (j, &pos) in cat.post_row(g).iter().enumerate() {
        if s.mask & (1 << pos) != 0 {
            mask |= 1 << j;
        }
    }
    Sieve {
        on: cat.dom(g),
        mask,
    }
}

/// The composite `S ∗ {T_f}`: the sieve generated by all `f∘g` with
/// `f ∈ S` and `g ∈ T_f`.
pub fn compose_sieves(cat: &FinCat, s: &Sieve, t: &BTreeMap<Arrow, Sieve>) -> Result<Sieve> {
    let mut raw = 0u64;
    for f in s.members(cat) {
        let tf = t.get(&f).ok_or_else(|| {
            Error::Assignment(format!(
                "no sieve assigned to member `{}`",
                cat.arrow_name(f)
            ))
        })?;
        if tf.on != cat.dom(f) {
            return Err(Error::Assignment(format!(
                "sieve assigned to `{}` lives on `{}`, expected `{}`",
                cat.arrow_name(f),
                cat.object_name(tf.on),
                cat.object_name(cat.dom(f))
            )));
        }
        let row = cat.post_row(f);
        for (j, &pos) in row.iter().enumerate() {
            if tf.mask & (1 << j) != 0 {
                raw |= 1 << pos;
            }
        }
    }
    Ok(generate_sieve(
        cat,
        &Presieve {
            on: s.on,
            mask: raw,
        },
    ))
}

fn same_object(cat: &FinCat, a: &Sieve, b: &Sieve) -> Result<()> {
    if a.on == b.on {
        Ok(())
    } else {
        Err(Error::ObjectMismatch {
            left: cat.object_name(a.on).into(),
            right: cat.object_name(b.on).into(),
        })
    }
}

pub fn sieve_leq(cat: &FinCat, a: &Sieve, b: &Sieve) -> Result<bool> {
    same_object(cat, a, b)?;
    Ok(a.mask & !b.mask == 0)
}

pub fn sieve_union(cat: &FinCat, a: &Sieve, b: &Sieve) -> Result<Sieve> {
    same_object(cat, a, b)?;
    Ok(Sieve::from_mask(a.on, a.mask | b.mask))
}

pub fn sieve_intersection(cat: &FinCat, a: &Sieve, b: &Sieve) -> Result<Sieve> {
    same_object(cat, a, b)?;
    Ok(Sieve::from_mask(a.on, a.mask & b.mask))
}

/// Every sieve on `c`, in canonical order. Sieves are unions of principal
/// sieves, so the search only ever visits actual sieves; it stops with
/// `None` once more than `limit` have been found.
pub fn all_sieves(cat: &FinCat, c: Obj, limit: usize) -> Option<Vec<Sieve>> {
    let generators: Vec<u64> = cat
        .arrows_into(c)
        .iter()
        .map(|&a| cat.principal_mask(a))
        .collect();
    let mut seen = std::collections::HashSet::from([0u64]);
    let mut stack = vec![0u64];
    while let Some(m) = stack.pop() {
        for &g in &generators {
            let next = m | g;
            if seen.insert(next) {
                if seen.len() > limit {
                    return None;
                }
                stack.push(next);
            }
        }
    }
    let mut out: Vec<Sieve> = seen.into_iter().map(|mask| Sieve { on: c, mask }).collect();
    out.sort_by(|a, b| a.canonical_cmp(b));
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::builtin;

    fn named(cat: &FinCat, on: &str, members: &[&str]) -> Sieve {
        let on = cat.object(on).unwrap();
        let members: Vec<_> = members.iter().map(|n| cat.arrow(n).unwrap()).collect();
        Sieve::new(cat, on, &members).unwrap()
    }

    #[test]
    fn maximal_sieves() {
        let c2 = builtin("C2").unwrap();
        let b = c2.object("b").unwrap();
        assert_eq!(Sieve::maximal(&c2, b).member_names(&c2), ["1_b", "f"]);
        let a = c2.object("a").unwrap();
        assert_eq!(Sieve::maximal(&c2, a).member_names(&c2), ["1_a"]);
        let m2 = builtin("M2").unwrap();
        let o = m2.object("o").unwrap();
        assert_eq!(Sieve::maximal(&m2, o).member_names(&m2), ["1_o", "e"]);
    }

    #[test]
    fn generation() {
        let c2 = builtin("C2").unwrap();
        let b = c2.object("b").unwrap();
        let id = Presieve::new(&c2, b, &[c2.arrow("1_b").unwrap()]).unwrap();
        assert!(generate_sieve(&c2, &id).is_maximal(&c2));
        let f = Presieve::new(&c2, b, &[c2.arrow("f").unwrap()]).unwrap();
        assert_eq!(generate_sieve(&c2, &f).member_names(&c2), ["f"]);
        let none = Presieve::new(&c2, b, &[]).unwrap();
        assert!(generate_sieve(&c2, &none).is_empty());
        assert!(Presieve::new(&c2, b, &[c2.arrow("1_a").unwrap()]).is_err());
    }

    #[test]
    fn non_closed_member_list_is_rejected() {
        let m2 = builtin("M2").unwrap();
        let o = m2.object("o").unwrap();
        let err = Sieve::new(&m2, o, &[m2.arrow("1_o").unwrap()]).unwrap_err();
        assert!(matches!(err, Error::NotASieve { .. }));
    }

    #[test]
    fn pullbacks() {
        let c2 = builtin("C2").unwrap();
        let f = c2.arrow("f").unwrap();
        let b = c2.object("b").unwrap();
        let a = c2.object("a").unwrap();
        let mb = Sieve::maximal(&c2, b);
        assert_eq!(pullback(&c2, f, &mb).unwrap(), Sieve::maximal(&c2, a));
        let sf = named(&c2, "b", &["f"]);
        assert_eq!(pullback(&c2, f, &sf).unwrap(), Sieve::maximal(&c2, a));
        assert_eq!(pullback(&c2, f, &Sieve::empty(b)).unwrap(), Sieve::empty(a));
        assert!(pullback(&c2, f, &Sieve::empty(a)).is_err());
    }

    #[test]
    fn composites() {
        let c2 = builtin("C2").unwrap();
        let b = c2.object("b").unwrap();
        let a = c2.object("a").unwrap();
        let (id_b, f) = (c2.arrow("1_b").unwrap(), c2.arrow("f").unwrap());
        let mb = Sieve::maximal(&c2, b);
        let t = BTreeMap::from([(id_b, named(&c2, "b", &["f"])), (f, Sieve::maximal(&c2, a))]);
        assert_eq!(
            compose_sieves(&c2, &mb, &t).unwrap().member_names(&c2),
            ["f"]
        );

        let t_max = BTreeMap::from([(id_b, mb), (f, Sieve::maximal(&c2, a))]);
        assert_eq!(compose_sieves(&c2, &mb, &t_max).unwrap(), mb);

        let t_empty = BTreeMap::from([(id_b, Sieve::empty(b)), (f, Sieve::empty(a))]);
        assert!(compose_sieves(&c2, &mb, &t_empty).unwrap().is_empty());

        let partial = BTreeMap::from([(id_b, mb)]);
        assert!(matches!(
            compose_sieves(&c2, &mb, &partial),
            Err(Error::Assignment(_))
        ));
        let wrong = BTreeMap::from([(id_b, mb), (f, mb)]);
        assert!(matches!(
            compose_sieves(&c2, &mb, &wrong),
            Err(Error::Assignment(_))
        ));
    }

    #[test]
    fn lattice_operations() {
        let c2 = builtin("C2").unwrap();
        let b = c2.object("b").unwrap();
        let sf = named(&c2, "b", &["f"]);
        let mb = Sieve::maximal(&c2, b);
        assert!(sieve_leq(&c2, &sf, &mb).unwrap());
        assert_eq!(sieve_union(&c2, &sf, &Sieve::empty(b)).unwrap(), sf);
        assert_eq!(sieve_intersection(&c2, &mb, &sf).unwrap(), sf);
        let a = c2.object("a").unwrap();
        assert!(matches!(
            sieve_leq(&c2, &sf, &Sieve::empty(a)),
            Err(Error::ObjectMismatch { .. })
        ));
    }

    #[test]
    fn sieve_enumeration_order() {
        let c2 = builtin("C2").unwrap();
        let b = c2.object("b").unwrap();
        let names: Vec<_> = all_sieves(&c2, b, 100)
            .unwrap()
            .iter()
            .map(|s| s.member_names(&c2).join(","))
            .collect();
        assert_eq!(names, ["", "1_b,f", "f"]);
        assert!(all_sieves(&c2, b, 2).is_none());
    }

    #[test]
    fn mask_order_is_lexicographic_on_positions() {
        fn positions(m: u64) -> Vec<u32> {
            (0..64).filter(|i| m & (1 << i) != 0).collect()
        }
        for a in 0..64u64 {
            for b in 0..64u64 {
                assert_eq!(
                    mask_lex_cmp(a, b),
                    positions(a).cmp(&positions(b)),
                    "{a} {b}"
                );
            }
        }
    }
}
