//! The `sievecalc` command line. Each verb loads a category, parses its
//! document arguments, calls one library operation and prints the result as
//! JSON (or DOT for `lattice --format dot`).
//!
//! Exit codes: 0 on success, 1 on a domain error (an error document
//! `{code, message, witness?}` is printed on stdout), 2 on a usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use indexmap::IndexMap;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fincat::{builtin, load_category, FinCat};
use crate::localop::relativize;
use crate::proofsys::{check, prove, Derivation, DerivationDoc, ProofOutcome};
use crate::sieve::{Sieve, SieveDoc};
use crate::subtopos::{
    atoms, booleanization, closed_topology, dense_closed_factorization, ideals, is_dense,
    is_skeletal, j_ideals, open_topology, quasiclosed_topology, skeletal_witness, Ideal, IdealDoc,
};
use crate::suite::{run_criterion, SuiteConfig, CRITERIA};
use crate::topology::{
    enumerate_topologies, generate_topology, implication, join, lattice_doc, lattice_dot, negation,
    FamilyDoc, SieveFamily, Topology,
};
use crate::universe::{Guard, Universe};

#[derive(Parser, Debug)]
#[command(
    name = "sievecalc",
    version,
    about = "Grothendieck topologies on finite categories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Site {
    /// Category description (JSON file).
    #[arg(long, value_name = "FILE", conflicts_with = "builtin")]
    category: Option<PathBuf>,
    /// Built-in fixture: C1, C2, D2, M2 or SPAN.
    #[arg(long, value_name = "NAME")]
    builtin: Option<String>,
    /// Maximum total number of sieves to enumerate.
    #[arg(long, value_name = "N")]
    guard: Option<usize>,
}

/// Documents are given inline (JSON text) or as a path to a JSON file.
/// Topology arguments also accept `bottom` and `top`.
#[derive(Subcommand, Debug)]
enum Command {
    /// Check the category laws.
    Validate(Site),
    /// List every sieve on every object.
    Sieves(Site),
    /// Enumerate all topologies.
    Topologies(Site),
    /// The lattice of topologies.
    Lattice {
        #[command(flatten)]
        site: Site,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Topology generated by a family of sieves.
    Generate {
        #[command(flatten)]
        site: Site,
        #[arg(long)]
        family: String,
    },
    Meet {
        #[command(flatten)]
        site: Site,
        left: String,
        right: String,
    },
    Join {
        #[command(flatten)]
        site: Site,
        left: String,
        right: String,
    },
    /// Heyting implication `left ⇒ right`.
    Implies {
        #[command(flatten)]
        site: Site,
        left: String,
        right: String,
    },
    /// Pseudocomplement.
    Neg {
        #[command(flatten)]
        site: Site,
        topology: String,
    },
    /// Closure of a sieve.
    Closure {
        #[command(flatten)]
        site: Site,
        #[arg(long)]
        topology: String,
        #[arg(long)]
        sieve: String,
    },
    /// Open topology of an ideal.
    Open(WithIdeal),
    /// Closed topology of an ideal.
    Closed(WithIdeal),
    /// Quasi-closed topology of an ideal.
    Qc(WithIdeal),
    Booleanize(WithTopology),
    /// Middle topology of the dense-closed factorization.
    Factor(Pair),
    Dense(Pair),
    Skeletal(Pair),
    /// Atoms of the lattice above a topology.
    Atoms(WithTopology),
    /// Ideals, or J-ideals when a topology is given.
    Ideals {
        #[command(flatten)]
        site: Site,
        #[arg(long)]
        topology: Option<String>,
    },
    /// Local operator of `outer` restricted to sieves closed for `base`.
    Relativize {
        #[command(flatten)]
        site: Site,
        #[arg(long)]
        outer: String,
        #[arg(long)]
        base: String,
    },
    /// Derive a sieve from axioms, or show the saturated family without it.
    Prove {
        #[command(flatten)]
        site: Site,
        #[arg(long)]
        axioms: String,
        #[arg(long)]
        target: String,
    },
    /// Check a derivation against axioms.
    Check {
        #[command(flatten)]
        site: Site,
        #[arg(long)]
        axioms: String,
        #[arg(long)]
        derivation: String,
    },
    /// Run the cross-validation suites.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Only run these criteria (1-10).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Args, Debug)]
struct WithIdeal {
    #[command(flatten)]
    site: Site,
    #[arg(long)]
    topology: String,
    #[arg(long)]
    ideal: String,
}

#[derive(Args, Debug)]
struct WithTopology {
    #[command(flatten)]
    site: Site,
    #[arg(long)]
    topology: String,
}

#[derive(Args, Debug)]
struct Pair {
    #[command(flatten)]
    site: Site,
    /// The larger topology.
    #[arg(long)]
    upper: String,
    /// The base topology.
    #[arg(long)]
    lower: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Dot,
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// What a verb prints, and whether it counts as success.
enum Output {
    Json(Value),
    Text(String),
    Failed(Value),
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("documents serialize")
}

fn read_doc<T: DeserializeOwned>(arg: &str) -> Result<T> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        arg.to_owned()
    } else {
        std::fs::read_to_string(arg)?
    };
    serde_json::from_str(&text).map_err(Error::from_json)
}

impl Site {
    fn category(&self) -> Outcome<FinCat> {
        match (&self.category, &self.builtin) {
            (Some(path), None) => Ok(load_category(
                &std::fs::read_to_string(path).map_err(Error::from)?,
            )?),
            (None, Some(name)) => Ok(builtin(name)?),
            _ => Err(Failure::Usage(
                "exactly one of --category FILE or --builtin NAME is required".into(),
            )),
        }
    }

    fn universe(&self) -> Outcome<Arc<Universe>> {
        let cat = self.category()?;
        let guard = match self.guard {
            Some(n) => Guard::with_max_total_sieves(n),
            None => Guard::default(),
        };
        Ok(Universe::with_guard(cat, guard)?)
    }
}

fn topology(uni: &Arc<Universe>, arg: &str) -> Result<Topology> {
    match arg {
        "bottom" => Ok(Topology::bottom(uni)),
        "top" => Ok(Topology::top(uni)),
        _ => Topology::from_doc(uni, &read_doc::<FamilyDoc>(arg)?),
    }
}

fn sieve(cat: &FinCat, arg: &str) -> Result<Sieve> {
    Sieve::from_doc(cat, &read_doc::<SieveDoc>(arg)?)
}

fn ideal(cat: &FinCat, arg: &str) -> Result<Ideal> {
    Ideal::from_doc(cat, &read_doc::<IdealDoc>(arg)?)
}

fn topology_list(list: &[Topology]) -> Value {
    Value::Array(list.iter().map(|t| to_value(&t.to_doc())).collect())
}

fn execute(command: Command) -> Outcome<Output> {
    use Output::Json;
    Ok(match command {
        Command::Validate(site) => {
            let cat = site.category()?;
            Json(json!({
                "valid": true,
                "objects": cat.num_objects(),
                "arrows": cat.num_arrows(),
            }))
        }
        Command::Sieves(site) => {
            let uni = site.universe()?;
            let cat = uni.cat();
            let map: IndexMap<&str, Vec<Vec<&str>>> = cat
                .objects()
                .map(|c| {
                    let list = uni.sieves(c).iter().map(|s| s.member_names(cat)).collect();
                    (cat.object_name(c), list)
                })
                .collect();
            Json(to_value(&map))
        }
        Command::Topologies(site) => Json(topology_list(&enumerate_topologies(&site.universe()?)?)),
        Command::Lattice { site, format } => {
            let all = enumerate_topologies(&site.universe()?)?;
            match format {
                Format::Json => Json(to_value(&lattice_doc(&all))),
                Format::Dot => Output::Text(lattice_dot(&all)),
            }
        }
        Command::Generate { site, family } => {
            let uni = site.universe()?;
            let fam = SieveFamily::from_doc(&uni, &read_doc(&family)?)?;
            Json(to_value(&generate_topology(&fam).to_doc()))
        }
        Command::Meet { site, left, right } => {
            let uni = site.universe()?;
            let t = topology(&uni, &left)?.meet(&topology(&uni, &right)?)?;
            Json(to_value(&t.to_doc()))
        }
        Command::Join { site, left, right } => {
            let uni = site.universe()?;
            let t = join(&topology(&uni, &left)?, &topology(&uni, &right)?)?;
            Json(to_value(&t.to_doc()))
        }
        Command::Implies { site, left, right } => {
            let uni = site.universe()?;
            let t = implication(&topology(&uni, &left)?, &topology(&uni, &right)?)?;
            Json(to_value(&t.to_doc()))
        }
        Command::Neg { site, topology: t } => {
            let uni = site.universe()?;
            Json(to_value(&negation(&topology(&uni, &t)?).to_doc()))
        }
        Command::Closure {
            site,
            topology: t,
            sieve: s,
        } => {
            let uni = site.universe()?;
            let j = topology(&uni, &t)?;
            let closed = j.closure(&sieve(uni.cat(), &s)?)?;
            Json(to_value(&closed.to_doc(uni.cat())))
        }
        Command::Open(a) => with_ideal(a, open_topology)?,
        Command::Closed(a) => with_ideal(a, closed_topology)?,
        Command::Qc(a) => with_ideal(a, quasiclosed_topology)?,
        Command::Booleanize(a) => {
            let uni = a.site.universe()?;
            Json(to_value(
                &booleanization(&topology(&uni, &a.topology)?).to_doc(),
            ))
        }
        Command::Factor(p) => {
            let (_, upper, lower) = pair(&p)?;
            let middle = dense_closed_factorization(&upper, &lower)?;
            Json(to_value(&middle.to_doc()))
        }
        Command::Dense(p) => {
            let (_, upper, lower) = pair(&p)?;
            Json(json!({ "dense": is_dense(&upper, &lower)? }))
        }
        Command::Skeletal(p) => {
            let (uni, upper, lower) = pair(&p)?;
            let skeletal = is_skeletal(&upper, &lower)?;
            let mut doc = json!({ "skeletal": skeletal });
            if let Some(c) = skeletal_witness(&upper, &lower) {
                doc["witness"] = json!(uni.cat().object_name(c));
            }
            Json(doc)
        }
        Command::Atoms(a) => {
            let uni = a.site.universe()?;
            Json(topology_list(&atoms(&topology(&uni, &a.topology)?)?))
        }
        Command::Ideals { site, topology: t } => {
            let uni = site.universe()?;
            let cat = uni.cat();
            let list = match t {
                Some(t) => j_ideals(&topology(&uni, &t)?)?,
                None => ideals(cat)?,
            };
            Json(Value::Array(
                list.iter().map(|u| to_value(&u.to_doc(cat))).collect(),
            ))
        }
        Command::Relativize { site, outer, base } => {
            let uni = site.universe()?;
            let cat = uni.cat();
            let rel = relativize(&topology(&uni, &outer)?, &topology(&uni, &base)?)?;
            let action: IndexMap<&str, Vec<Value>> = cat
                .objects()
                .map(|c| {
                    let pairs = rel
                        .pairs(c)
                        .iter()
                        .map(|(s, t)| json!({ "sieve": s.member_names(cat), "image": t.member_names(cat) }))
                        .collect();
                    (cat.object_name(c), pairs)
                })
                .collect();
            Json(json!({ "action": action }))
        }
        Command::Prove {
            site,
            axioms,
            target,
        } => {
            let uni = site.universe()?;
            let cat = uni.cat();
            let fam = SieveFamily::from_doc(&uni, &read_doc(&axioms)?)?;
            match prove(&sieve(cat, &target)?, &fam) {
                ProofOutcome::Proved(d) => Json(to_value(&d.to_doc(cat))),
                ProofOutcome::Refuted(r) => Json(to_value(&r.to_doc())),
            }
        }
        Command::Check {
            site,
            axioms,
            derivation,
        } => {
            let uni = site.universe()?;
            let cat = uni.cat();
            let fam = SieveFamily::from_doc(&uni, &read_doc(&axioms)?)?;
            let doc: DerivationDoc = read_doc(&derivation)?;
            let d = Derivation::from_doc(cat, &doc)?;
            match check(&d, &fam) {
                Ok(()) => Json(json!({ "valid": true })),
                Err(f) => Json(json!({ "valid": false, "path": f.path, "reason": f.reason })),
            }
        }
        Command::Selftest { seed, only } => {
            let cfg = SuiteConfig::with_seed(seed);
            let ids: Vec<u8> = if only.is_empty() {
                CRITERIA.iter().map(|&(id, _)| id).collect()
            } else {
                only
            };
            let mut lines = String::new();
            let mut ok = true;
            for id in ids {
                let report = run_criterion(id, &cfg)?;
                ok &= report.passed;
                lines.push_str(&format!("{report}\n"));
            }
            if ok {
                Output::Text(lines)
            } else {
                Output::Failed(json!({ "code": "selftest-failed", "message": lines }))
            }
        }
    })
}

fn with_ideal(a: WithIdeal, op: fn(&Topology, &Ideal) -> Result<Topology>) -> Outcome<Output> {
    let uni = a.site.universe()?;
    let j = topology(&uni, &a.topology)?;
    let u = ideal(uni.cat(), &a.ideal)?;
    Ok(Output::Json(to_value(&op(&j, &u)?.to_doc())))
}

fn pair(p: &Pair) -> Outcome<(Arc<Universe>, Topology, Topology)> {
    let uni = p.site.universe()?;
    let upper = topology(&uni, &p.upper)?;
    let lower = topology(&uni, &p.lower)?;
    Ok((uni, upper, lower))
}

fn witness(e: &Error) -> Option<Value> {
    match e {
        Error::Parse { line, column, .. } => Some(json!({ "line": line, "column": column })),
        Error::Invalid(report) => Some(to_value(report)),
        Error::GuardExceeded {
            bound,
            limit,
            actual,
        } => Some(json!({ "bound": bound, "limit": limit, "actual": actual })),
        Error::NoRelativization {
            object,
            sieve,
            closure,
        } => Some(json!({ "object": object, "sieve": sieve, "closure": closure })),
        _ => None,
    }
}

fn error_doc(e: &Error) -> Value {
    let mut doc = json!({ "code": e.code(), "message": e.to_string() });
    if let Some(w) = witness(e) {
        doc["witness"] = w;
    }
    doc
}

fn print_json(out: &mut dyn Write, v: &Value) -> std::io::Result<()> {
    serde_json::to_writer(&mut *out, v)?;
    writeln!(out)
}

/// Runs one invocation, writing documents to `out` and usage messages to
/// `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let written = match execute(cli.command) {
        Ok(Output::Json(v)) => print_json(out, &v).map(|()| 0),
        Ok(Output::Text(s)) => out.write_all(s.as_bytes()).map(|()| 0),
        Ok(Output::Failed(v)) => print_json(out, &v).map(|()| 1),
        Err(Failure::Domain(e)) => print_json(out, &error_doc(&e)).map(|()| 1),
        Err(Failure::Usage(msg)) => writeln!(err, "error: {msg}").map(|()| 2),
    };
    written.unwrap_or(1)
}
