//! All sieves on all objects of a category, numbered and cross-indexed.
//!
//! Every topology-level formula quantifies over the sieves on every object,
//! so they are enumerated once, up front, under an explicit size [`Guard`].

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{Arrow, FinCat, Obj};
use crate::sieve::{all_sieves, pullback_unchecked, Sieve};

/// Size bounds for the exhaustive parts of the library. Exceeding any of
/// them is an error, never a silent truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Guard {
    pub max_arrows_into: usize,
    pub max_total_sieves: usize,
    /// Per-object bound on the candidate covering families considered by
    /// topology enumeration.
    pub max_upsets: usize,
}

impl Default for Guard {
    fn default() -> Self {
        Guard {
            max_arrows_into: 22,
            max_total_sieves: 4096,
            max_upsets: 1 << 20,
        }
    }
}

impl Guard {
    pub fn with_max_total_sieves(max_total_sieves: usize) -> Self {
        Guard {
            max_total_sieves,
            ..Guard::default()
        }
    }
}

/// Index of a sieve among the sieves on its object (canonical order).
pub type SieveId = u32;

#[derive(Debug)]
pub struct Universe {
    cat: FinCat,
    guard: Guard,
    sieves: Vec<Vec<Sieve>>,
    ids: Vec<HashMap<u64, SieveId>>,
    /// `pb[g][s]`: id of `g*(s)` for `s` an id on `cod g`.
    pb: Vec<Vec<SieveId>>,
    maximal: Vec<SieveId>,
    empty: Vec<SieveId>,
}

impl Universe {
    pub fn new(cat: FinCat) -> Result<Arc<Self>> {
        Self::with_guard(cat, Guard::default())
    }

    pub fn with_guard(cat: FinCat, guard: Guard) -> Result<Arc<Self>> {
        for c in cat.objects() {
            let n = cat.arrows_into(c).len();
            if n > guard.max_arrows_into {
                return Err(Error::GuardExceeded {
                    bound: "arrows into a single object",
                    limit: guard.max_arrows_into,
                    actual: n,
                });
            }
        }
        let mut sieves = Vec::with_capacity(cat.num_objects());
        let mut total = 0usize;
        for c in cat.objects() {
            let remaining = guard.max_total_sieves.saturating_sub(total);
            let list = all_sieves(&cat, c, remaining).ok_or(Error::GuardExceeded {
                bound: "total number of sieves",
                limit: guard.max_total_sieves,
                actual: guard.max_total_sieves + 1,
            })?;
            total += list.len();
            sieves.push(list);
        }
        let ids: Vec<HashMap<u64, SieveId>> = sieves
            .iter()
            .map(|list| {
                list.iter()
                    .enumerate()
                    .map(|(i, s)| (s.mask(), i as SieveId))
                    .collect()
            })
            .collect();
        let pb = cat
            .arrows()
            .map(|g| {
                let dom = cat.dom(g).index();
                sieves[cat.cod(g).index()]
                    .iter()
                    .map(|s| ids[dom][&pullback_unchecked(&cat, g, s).mask()])
                    .collect()
            })
            .collect();
        let maximal = cat
            .objects()
            .map(|c| ids[c.index()][&Sieve::maximal(&cat, c).mask()])
            .collect();
        let empty = cat.objects().map(|c| ids[c.index()][&0]).collect();
        Ok(Arc::new(Universe {
            cat,
            guard,
            sieves,
            ids,
            pb,
            maximal,
            empty,
        }))
    }

    pub fn cat(&self) -> &FinCat {
        &self.cat
    }

    pub fn guard(&self) -> Guard {
        self.guard
    }

    pub fn total_sieves(&self) -> usize {
        self.sieves.iter().map(Vec::len).sum()
    }

    pub fn sieves(&self, c: Obj) -> &[Sieve] {
        &self.sieves[c.index()]
    }

    pub fn num_sieves(&self, c: Obj) -> usize {
        self.sieves[c.index()].len()
    }

    pub fn sieve(&self, c: Obj, id: SieveId) -> Sieve {
        self.sieves[c.index()][id as usize]
    }

    pub fn id(&self, s: &Sieve) -> SieveId {
        self.ids[s.on().index()][&s.mask()]
    }

    /// Like [`Universe::id`] but for sieves from an untrusted source.
    pub fn try_id(&self, s: &Sieve) -> Result<SieveId> {
        self.ids
            .get(s.on().index())
            .and_then(|m| m.get(&s.mask()))
            .copied()
            .ok_or_else(|| Error::NotASieve {
                object: format!("#{}", s.on().index()),
                reason: "sieve does not belong to this category".into(),
            })
    }

    pub fn pullback_id(&self, g: Arrow, s: SieveId) -> SieveId {
        self.pb[g.index()][s as usize]
    }

    pub fn maximal_id(&self, c: Obj) -> SieveId {
        self.maximal[c.index()]
    }

    pub fn empty_id(&self, c: Obj) -> SieveId {
        self.empty[c.index()]
    }

    pub fn is_subsieve(&self, c: Obj, a: SieveId, b: SieveId) -> bool {
        let (a, b) = (self.sieve(c, a).mask(), self.sieve(c, b).mask());
        a & !b == 0
    }

    /// Whether `f` (an arrow into `c`) is a member of sieve `s` on `c`.
    pub fn member(&self, f: Arrow, s: SieveId) -> bool {
        let c = self.cat.cod(f);
        self.sieve(c, s).mask() & (1 << self.cat.local_index(f)) != 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::builtin;

    #[test]
    fn sieve_counts() {
        let uni = Universe::new(builtin("C2").unwrap()).unwrap();
        let cat = uni.cat();
        assert_eq!(uni.num_sieves(cat.object("a").unwrap()), 2);
        assert_eq!(uni.num_sieves(cat.object("b").unwrap()), 3);
        let m2 = Universe::new(builtin("M2").unwrap()).unwrap();
        assert_eq!(m2.total_sieves(), 3);
    }

    #[test]
    fn guard_refuses() {
        let err = Universe::with_guard(builtin("C2").unwrap(), Guard::with_max_total_sieves(4))
            .unwrap_err();
        assert!(matches!(
            err,
            Error::GuardExceeded {
                bound: "total number of sieves",
                ..
            }
        ));
        let err = Universe::with_guard(
            builtin("C2").unwrap(),
            Guard {
                max_arrows_into: 1,
                ..Guard::default()
            },
        )
        .unwrap_err();
        assert!(err.to_string().contains("arrows into a single object"));
    }
}
