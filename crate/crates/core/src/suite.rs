//! Cross-validation suites: every closed-form construction is compared
//! against an independent exhaustive or rule-based computation on the
//! fixture corpus. Used by `sievecalc selftest` and by the acceptance tests.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::fincat::{builtin, corpus, FinCat, Obj};
use crate::localop::{
    check_relativization_theorem, classify, relativization_exists, relativization_witness,
    relativize,
};
use crate::proofsys::{check, derive_upward, generate_topology_oracle, prove_with, saturate};
use crate::sieve::{compose_sieves, pullback, sieve_leq, Sieve};
use crate::subtopos::{
    atoms_among, boolean_two_valued_among, booleanization, closed_topology, complements_check,
    dense_closed_factorization, is_boolean, is_dense, is_skeletal, j_ideals, open_topology,
    quasiclosed_topology, zero_ideal,
};
use crate::topology::{
    check_axioms, enumerate_topologies, generate_topology, hasse, implication, is_topology, join,
    negation, topology_verdict, SieveFamily, Topology,
};
use crate::universe::{SieveId, Universe};

/// Sample sizes and seed for the randomized criteria.
#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Total over the corpus.
    pub definition_samples: usize,
    /// Per corpus category.
    pub generation_samples: usize,
    pub proof_targets: usize,
    pub upward_pairs: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            definition_samples: 10_000,
            generation_samples: 500,
            proof_targets: 1_000,
            upward_pairs: 100,
        }
    }
}

impl SuiteConfig {
    pub fn with_seed(seed: u64) -> Self {
        SuiteConfig {
            seed,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {}: {} checks, {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.checks,
            self.detail
        )?;
        if let Some(first) = self.failures.first() {
            write!(f, "; first failure: {first}")?;
        }
        Ok(())
    }
}

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "enumeration goldens"),
    (2, "definition equivalence"),
    (3, "generation oracle equivalence"),
    (4, "Heyting laws"),
    (5, "closure operator laws"),
    (6, "subtopos constructions"),
    (7, "atoms"),
    (8, "relativization"),
    (9, "skeletality"),
    (10, "proof system"),
];

/// Collects checks and the first few failures.
struct Tally {
    checks: usize,
    failures: Vec<String>,
    failed: usize,
}

impl Tally {
    fn new() -> Self {
        Tally {
            checks: 0,
            failures: Vec::new(),
            failed: 0,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < 5 {
                self.failures.push(what());
            }
        }
    }

    fn finish(self, id: u8, detail: String, start: Instant) -> CriterionReport {
        CriterionReport {
            id,
            name: CRITERIA[id as usize - 1].1,
            passed: self.failed == 0 && self.checks > 0,
            checks: self.checks,
            failures: self.failures,
            detail,
            elapsed: start.elapsed(),
        }
    }
}

struct Fixture {
    name: &'static str,
    uni: Arc<Universe>,
    all: Vec<Topology>,
}

fn fixtures() -> Result<Vec<Fixture>> {
    corpus()
        .into_iter()
        .map(|(name, cat)| {
            let uni = Universe::new(cat)?;
            let all = enumerate_topologies(&uni)?;
            Ok(Fixture { name, uni, all })
        })
        .collect()
}

/// Every per-object selection of sieves, filtered by the three axioms.
/// Independent of the pruned search in `enumerate_topologies`.
pub fn brute_force_topologies(uni: &Arc<Universe>) -> Vec<SieveFamily> {
    let cat = uni.cat();
    let slots: Vec<(Obj, SieveId)> = cat
        .objects()
        .flat_map(|c| (0..uni.num_sieves(c) as SieveId).map(move |s| (c, s)))
        .collect();
    assert!(
        slots.len() <= 24,
        "brute force is only meant for tiny categories"
    );
    let mut out = Vec::new();
    for bits in 0u32..1 << slots.len() {
        let mut fam = SieveFamily::empty(uni);
        for (i, &(c, s)) in slots.iter().enumerate() {
            if bits & (1 << i) != 0 {
                fam.put(c, s);
            }
        }
        if check_axioms(&fam).is_ok() {
            out.push(fam);
        }
    }
    out
}

fn random_family(uni: &Arc<Universe>, rng: &mut ChaCha8Rng) -> SieveFamily {
    let cat = uni.cat();
    let density: f64 = rng.gen();
    let keep_maximal = rng.gen_bool(0.8);
    let mut fam = SieveFamily::empty(uni);
    for c in cat.objects() {
        for s in 0..uni.num_sieves(c) as SieveId {
            let forced = keep_maximal && s == uni.maximal_id(c);
            if forced || rng.gen_bool(density) {
                fam.put(c, s);
            }
        }
    }
    fam
}

fn sparse_family(uni: &Arc<Universe>, rng: &mut ChaCha8Rng) -> SieveFamily {
    let cat = uni.cat();
    let mut fam = SieveFamily::empty(uni);
    let n = rng.gen_range(0..=3);
    for _ in 0..n {
        let c = Obj(rng.gen_range(0..cat.num_objects() as u32));
        let s = rng.gen_range(0..uni.num_sieves(c) as SieveId);
        fam.put(c, s);
    }
    fam
}

pub fn criterion_1() -> Result<CriterionReport> {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut counts = Vec::new();
    for (name, expected) in [("C1", 2), ("C2", 4), ("D2", 4)] {
        let started = Instant::now();
        let uni = Universe::new(builtin(name)?)?;
        let found = enumerate_topologies(&uni)?;
        let elapsed = started.elapsed();
        let raw = brute_force_topologies(&uni);
        t.check(found.len() == expected, || {
            format!("{name}: {} topologies", found.len())
        });
        t.check(raw.len() == expected, || {
            format!("{name}: brute force found {}", raw.len())
        });
        t.check(
            raw.iter().all(|f| found.iter().any(|j| j.family() == f)),
            || format!("{name}: enumeration misses a brute-force topology"),
        );
        t.check(elapsed < Duration::from_secs(1), || {
            format!("{name}: took {elapsed:?}")
        });
        counts.push(format!("{name}={}", found.len()));
    }
    for name in ["M2", "SPAN"] {
        let uni = Universe::new(builtin(name)?)?;
        let found = enumerate_topologies(&uni)?;
        let raw = brute_force_topologies(&uni);
        t.check(
            raw.len() == found.len() && raw.iter().all(|f| found.iter().any(|j| j.family() == f)),
            || format!("{name}: enumeration and brute force disagree"),
        );
        counts.push(format!("{name}={}", found.len()));
    }
    let uni = Universe::new(builtin("C2")?)?;
    let lattice = enumerate_topologies(&uni)?;
    let edges = hasse(&lattice);
    // 2×2 Boolean lattice: bottom, two incomparable atoms, top.
    let square = lattice.len() == 4
        && lattice[0].is_bottom()
        && lattice[3].is_top()
        && !lattice[1].is_subfamily(&lattice[2])
        && !lattice[2].is_subfamily(&lattice[1])
        && edges == [(0, 1), (0, 2), (1, 3), (2, 3)];
    t.check(square, || format!("C2 Hasse diagram {edges:?}"));
    Ok(t.finish(1, counts.join(" "), start))
}

pub fn criterion_2(cfg: &SuiteConfig) -> Result<CriterionReport> {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 2);
    let cats = corpus();
    let per = cfg.definition_samples.div_ceil(cats.len());
    let mut topologies = 0;
    for (name, cat) in cats {
        let uni = Universe::new(cat)?;
        for _ in 0..per {
            let fam = random_family(&uni, &mut rng);
            let v = topology_verdict(&fam);
            topologies += usize::from(v.axioms.is_ok());
            t.check(v.agree(), || format!("{name}: {} ({v:?})", fam.describe()));
        }
    }
    Ok(t.finish(2, format!("{topologies} samples were topologies"), start))
}

pub fn criterion_3(cfg: &SuiteConfig) -> Result<CriterionReport> {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 3);
    for fx in fixtures()? {
        for i in 0..cfg.generation_samples {
            let fam = if i % 2 == 0 {
                sparse_family(&fx.uni, &mut rng)
            } else {
                random_family(&fx.uni, &mut rng)
            };
            let formula = generate_topology(&fam);
            let oracle = generate_topology_oracle(&fam);
            let above: Vec<&Topology> = fx.all.iter().filter(|k| fam.is_subfamily(k)).collect();
            let least = above
                .iter()
                .find(|k| above.iter().all(|k2| k.is_subfamily(k2)));
            t.check(formula == oracle, || {
                format!("{}: formula vs saturation on {}", fx.name, fam.describe())
            });
            t.check(least == Some(&&formula), || {
                format!(
                    "{}: formula is not the least topology above {}",
                    fx.name,
                    fam.describe()
                )
            });
        }
    }
    let elapsed = start.elapsed();
    t.check(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    });
    let families = cfg.generation_samples * corpus().len();
    Ok(t.finish(3, format!("{families} families"), start))
}

pub fn criterion_4() -> Result<CriterionReport> {
    let start = Instant::now();
    let mut t = Tally::new();
    for fx in fixtures()? {
        let bottom = Topology::bottom(&fx.uni);
        for j in &fx.all {
            t.check(negation(j) == implication(j, &bottom)?, || {
                format!("{}: negation", fx.name)
            });
        }
        let joins: BTreeMap<(usize, usize), Topology> = (0..fx.all.len())
            .flat_map(|a| (0..fx.all.len()).map(move |b| (a, b)))
            .map(|(a, b)| Ok(((a, b), join(&fx.all[a], &fx.all[b])?)))
            .collect::<Result<_>>()?;
        for (a, k) in fx.all.iter().enumerate() {
            for (b, j1) in fx.all.iter().enumerate() {
                let kj1 = k.meet(j1)?;
                for (c, j2) in fx.all.iter().enumerate() {
                    let residual = kj1.leq(j2)? == k.leq(&implication(j1, j2)?)?;
                    t.check(residual, || {
                        format!("{}: residuation at ({a},{b},{c})", fx.name)
                    });
                    let lhs = k.meet(&joins[&(b, c)])?;
                    let rhs = join(&kj1, &k.meet(j2)?)?;
                    t.check(lhs == rhs, || {
                        format!("{}: distributivity at ({a},{b},{c})", fx.name)
                    });
                }
            }
        }
    }
    Ok(t.finish(4, "all topology triples".into(), start))
}

/// Every assignment of sieves to the members of `s`, up to `cap` of them.
fn assignments(
    uni: &Universe,
    s: &Sieve,
    cap: usize,
) -> Vec<BTreeMap<crate::fincat::Arrow, Sieve>> {
    let cat = uni.cat();
    let members: Vec<_> = s.members(cat).collect();
    let mut out = vec![BTreeMap::new()];
    for f in members {
        let options = uni.sieves(cat.dom(f));
        let mut next = Vec::new();
        for partial in &out {
            for &t in options {
                let mut m: BTreeMap<_, _> = partial.clone();
                m.insert(f, t);
                next.push(m);
                if next.len() >= cap {
                    break;
                }
            }
            if next.len() >= cap {
                break;
            }
        }
        out = next;
    }
    out
}

pub fn criterion_5() -> Result<CriterionReport> {
    let start = Instant::now();
    let mut t = Tally::new();
    for fx in fixtures()? {
        let uni = &fx.uni;
        let cat = uni.cat();
        for j in &fx.all {
            for c in cat.objects() {
                for r in uni.sieves(c) {
                    let cr = j.closure(r)?;
                    t.check(sieve_leq(cat, r, &cr)?, || {
                        format!("{}: not inflationary", fx.name)
                    });
                    t.check(j.closure(&cr)? == cr, || {
                        format!("{}: not idempotent", fx.name)
                    });
                    for s in uni.sieves(c) {
                        if sieve_leq(cat, r, s)? {
                            t.check(sieve_leq(cat, &cr, &j.closure(s)?)?, || {
                                format!("{}: not monotone", fx.name)
                            });
                        }
                    }
                    for &f in cat.arrows_into(c) {
                        let lhs = pullback(cat, f, &cr)?;
                        let rhs = j.closure(&pullback(cat, f, r)?)?;
                        t.check(lhs == rhs, || {
                            format!("{}: pullback along {}", fx.name, cat.arrow_name(f))
                        });
                    }
                    for ts in assignments(uni, r, 512) {
                        let closed: BTreeMap<_, _> = ts
                            .iter()
                            .map(|(&f, s)| Ok((f, j.closure(s)?)))
                            .collect::<Result<_>>()?;
                        let lhs = j.closure(&compose_sieves(cat, r, &ts)?)?;
                        let rhs = j.closure(&compose_sieves(cat, r, &closed)?)?;
                        t.check(lhs == rhs, || format!("{}: closure of composite", fx.name));
                    }
                    for jp in fx.all.iter().filter(|jp| j.is_subfamily(jp)) {
                        t.check(sieve_leq(cat, &cr, &jp.closure(r)?)?, || {
                            format!("{}: closure not monotone in the topology", fx.name)
                        });
                        if jp.is_closed(r)? {
                            t.check(j.is_closed(r)?, || {
                                format!("{}: closedness not inherited", fx.name)
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(t.finish(5, "all (sieve, topology) pairs".into(), start))
}

pub fn criterion_6() -> Result<CriterionReport> {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut ideals_seen = 0;
    for fx in fixtures()? {
        let top = Topology::top(&fx.uni);
        for j in &fx.all {
            for u in j_ideals(j)? {
                ideals_seen += 1;
                let open = open_topology(j, &u)?;
                let closed = closed_topology(j, &u)?;
                let qc = quasiclosed_topology(j, &u)?;
                t.check(open.meet(&closed)? == *j, || {
                    format!("{}: open ∧ closed ≠ J", fx.name)
                });
                t.check(join(&open, &closed)? == top, || {
                    format!("{}: open ∨ closed ≠ ⊤", fx.name)
                });
                t.check(complements_check(j, &u)?, || {
                    format!("{}: complements_check", fx.name)
                });
                for (what, k) in [("open", &open), ("closed", &closed), ("quasi-closed", &qc)] {
                    t.check(is_topology(k).is_ok() && j.is_subfamily(k), || {
                        format!("{}: {what} output is not a topology above J", fx.name)
                    });
                }
            }
            let b = booleanization(j);
            t.check(booleanization(&b) == b, || {
                format!("{}: booleanization not idempotent", fx.name)
            });
            t.check(is_boolean(&b), || {
                format!("{}: booleanization not Boolean", fx.name)
            });
            t.check(is_dense(&b, j)?, || {
                format!("{}: booleanization not dense", fx.name)
            });
            for jp in fx.all.iter().filter(|jp| j.is_subfamily(jp)) {
                let m = dense_closed_factorization(jp, j)?;
                t.check(j.is_subfamily(&m) && m.is_subfamily(jp), || {
                    format!("{}: factorization out of order", fx.name)
                });
                t.check(is_dense(jp, &m)?, || {
                    format!("{}: upper part not dense", fx.name)
                });
                t.check(dense_closed_factorization(&m, j)? == m, || {
                    format!("{}: re-factorization moved the middle", fx.name)
                });
                if is_dense(jp, j)? {
                    t.check(m == *j, || {
                        format!("{}: dense inclusion with non-trivial closed part", fx.name)
                    });
                }
            }
        }
    }
    Ok(t.finish(6, format!("{ideals_seen} (J, U) pairs"), start))
}

pub fn criterion_7() -> Result<CriterionReport> {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut total = 0;
    for fx in fixtures()? {
        for j in &fx.all {
            let atoms = atoms_among(j, &fx.all);
            total += atoms.len();
            t.check(atoms == boolean_two_valued_among(j, &fx.all)?, || {
                format!("{}: atoms above {}", fx.name, j.describe())
            });
        }
    }
    Ok(t.finish(7, format!("{total} atoms found"), start))
}

pub fn criterion_8() -> Result<CriterionReport> {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut failing_pairs = 0;
    for fx in fixtures()? {
        let cat = fx.uni.cat();
        for j in &fx.all {
            for k in &fx.all {
                let ordered = j.is_subfamily(k);
                let exists = relativization_exists(k, j)?;
                if ordered {
                    t.check(exists, || {
                        format!("{}: no relativization above the base", fx.name)
                    });
                }
                if exists {
                    t.check(check_relativization_theorem(k, j)?, || {
                        format!("{}: relativization theorem", fx.name)
                    });
                    let rel = relativize(k, j)?;
                    let kj = join(k, j)?;
                    t.check(relativize(&kj, j)?.same_action(&rel), || {
                        format!("{}: join-relativization", fx.name)
                    });
                    if ordered {
                        for c in cat.objects() {
                            for &(s, ks) in rel.pairs(c) {
                                t.check(classify(&kj, &s)? == ks, || {
                                    format!("{}: (K ∨ J)-closure differs from K-closure", fx.name)
                                });
                            }
                        }
                    }
                } else {
                    failing_pairs += 1;
                    let (s, ks) = relativization_witness(k, j)?.expect("no relativization");
                    t.check(
                        j.is_closed(&s)? && !j.is_closed(&ks)? && classify(k, &s)? == ks,
                        || format!("{}: bad failure witness", fx.name),
                    );
                }
            }
        }
    }
    t.check(failing_pairs > 0, || {
        "no corpus pair without relativization".into()
    });
    Ok(t.finish(
        8,
        format!("{failing_pairs} pairs without relativization"),
        start,
    ))
}

/// The skeletality criterion evaluated literally: build the full
/// subcategory, form the sieves there and pull them back.
pub fn skeletal_oracle(jp: &Topology, j: &Topology) -> Result<bool> {
    let uni = jp.universe();
    let cat = uni.cat();
    let zero = zero_ideal(j);
    let keep: std::collections::BTreeSet<Obj> =
        cat.objects().filter(|&c| !zero.contains(c)).collect();
    let sub = cat.full_subcategory(&keep)?;
    let empty_covers = |name: &str| -> Result<bool> {
        let o = cat.object(name)?;
        Ok(jp.covers(&Sieve::empty(o)))
    };
    for c in sub.objects() {
        let mut z = Vec::new();
        for &f in sub.arrows_into(c) {
            if empty_covers(sub.object_name(sub.dom(f)))? {
                z.push(f);
            }
        }
        let z = Sieve::new(&sub, c, &z)?;
        let mut stably_non_empty = true;
        for &g in sub.arrows_into(c) {
            stably_non_empty &= !pullback(&sub, g, &z)?.is_empty();
        }
        if stably_non_empty && !empty_covers(sub.object_name(c))? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn criterion_9() -> Result<CriterionReport> {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut dense_pairs = 0;
    for fx in fixtures()? {
        for j in &fx.all {
            for jp in fx.all.iter().filter(|jp| j.is_subfamily(jp)) {
                let skeletal = is_skeletal(jp, j)?;
                t.check(skeletal == skeletal_oracle(jp, j)?, || {
                    format!(
                        "{}: skeletality disagrees with the literal evaluation",
                        fx.name
                    )
                });
                if is_dense(jp, j)? {
                    dense_pairs += 1;
                    t.check(skeletal, || format!("{}: dense but not skeletal", fx.name));
                }
            }
        }
    }
    let uni = Universe::new(builtin("C2")?)?;
    let all = enumerate_topologies(&uni)?;
    let (bottom, j2, j3) = (&all[0], &all[1], &all[2]);
    t.check(!is_skeletal(j3, bottom)?, || {
        "C2: J3 over ⊥ should not be skeletal".into()
    });
    t.check(is_skeletal(j2, bottom)?, || {
        "C2: J2 over ⊥ should be skeletal".into()
    });
    Ok(t.finish(9, format!("{dense_pairs} dense pairs"), start))
}

pub fn criterion_10(cfg: &SuiteConfig) -> Result<CriterionReport> {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 10);
    let fxs = fixtures()?;
    let mut targets = 0;
    let mut pairs = 0;
    let mut round = 0;
    while targets < cfg.proof_targets || pairs < cfg.upward_pairs {
        let fx = &fxs[round % fxs.len()];
        round += 1;
        let cat: &FinCat = fx.uni.cat();
        let axioms = sparse_family(&fx.uni, &mut rng);
        let sat = saturate(&axioms);
        let generated = generate_topology(&axioms);
        let mut provable = Vec::new();
        for c in cat.objects() {
            for s in fx.fx_sieves(c) {
                let outcome = prove_with(&sat, &s);
                t.check(outcome.is_proved() == generated.covers(&s), || {
                    format!("{}: success set differs at {}", fx.name, s.display(cat))
                });
                if outcome.is_proved() {
                    provable.push(s);
                }
            }
        }
        for _ in 0..4 {
            if targets >= cfg.proof_targets {
                break;
            }
            let s = provable[rng.gen_range(0..provable.len())];
            let d = sat.derivation(&s).expect("provable");
            t.check(check(&d, &axioms).is_ok() && d.conclusion == s, || {
                format!(
                    "{}: derivation of {} fails the checker",
                    fx.name,
                    s.display(cat)
                )
            });
            targets += 1;
        }
        if pairs < cfg.upward_pairs {
            let lower = provable[rng.gen_range(0..provable.len())];
            let uppers: Vec<Sieve> = fx
                .fx_sieves(lower.on())
                .filter(|r| sieve_leq(cat, &lower, r).unwrap_or(false))
                .collect();
            let r = uppers[rng.gen_range(0..uppers.len())];
            let d = derive_upward(cat, sat.derivation(&lower).expect("provable"), &r)?;
            t.check(
                check(&d, &axioms).is_ok() && prove_with(&sat, &r).is_proved(),
                || format!("{}: upward closure from {}", fx.name, lower.display(cat)),
            );
            pairs += 1;
        }
    }
    Ok(t.finish(
        10,
        format!("{targets} targets, {pairs} upward pairs, {round} axiom families"),
        start,
    ))
}

impl Fixture {
    fn fx_sieves(&self, c: Obj) -> impl Iterator<Item = Sieve> + '_ {
        self.uni.sieves(c).iter().copied()
    }
}

pub fn run_criterion(id: u8, cfg: &SuiteConfig) -> Result<CriterionReport> {
    match id {
        1 => criterion_1(),
        2 => criterion_2(cfg),
        3 => criterion_3(cfg),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        10 => criterion_10(cfg),
        _ => Err(crate::error::Error::Precondition(format!(
            "no criterion {id}"
        ))),
    }
}

pub fn run_all(cfg: &SuiteConfig) -> Result<Vec<CriterionReport>> {
    CRITERIA
        .iter()
        .map(|&(id, _)| run_criterion(id, cfg))
        .collect()
}
