use serde_json::Value;
use sievecalc::cli::run;
use sievecalc::proofsys::{prove, ProofOutcome};
use sievecalc::subtopos::{open_topology, Ideal};
use sievecalc::topology::{enumerate_topologies, negation};
use sievecalc::{builtin, Sieve, SieveFamily, Topology, Universe};

const C2_FILE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/c2.json");
const BROKEN_FILE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/broken_idempotent.json");

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("sievecalc").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = call(args);
    assert_eq!(code, 0, "{args:?}: {out}{err}");
    serde_json::from_str(&out).unwrap()
}

fn c2() -> (std::sync::Arc<Universe>, Vec<Topology>) {
    let uni = Universe::new(builtin("C2").unwrap()).unwrap();
    let all = enumerate_topologies(&uni).unwrap();
    (uni, all)
}

#[test]
fn topologies_from_file() {
    let v = json(&["topologies", "--category", C2_FILE]);
    assert_eq!(v.as_array().unwrap().len(), 4);
    let (_, all) = c2();
    let expected: Vec<Value> = all
        .iter()
        .map(|t| serde_json::to_value(t.to_doc()).unwrap())
        .collect();
    assert_eq!(v, Value::Array(expected));
}

#[test]
fn lattice_dot_has_four_nodes_and_edges() {
    let (code, out, _) = call(&["lattice", "--category", C2_FILE, "--format", "dot"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("digraph"));
    assert_eq!(out.matches("[label=").count(), 4);
    assert_eq!(out.matches(" -> ").count(), 4);
}

#[test]
fn prove_axiom_target_and_check_it() {
    let axioms = r#"[{"on":"a","arrows":[]}]"#;
    let d = json(&[
        "prove",
        "--category",
        C2_FILE,
        "--axioms",
        axioms,
        "--target",
        r#"{"on":"a","arrows":[]}"#,
    ]);
    assert_eq!(d["rule"], "AxiomGiven");
    let verdict = json(&[
        "check",
        "--category",
        C2_FILE,
        "--axioms",
        axioms,
        "--derivation",
        &d.to_string(),
    ]);
    assert_eq!(verdict["valid"], true);
    // the same tree is not a proof without the axiom
    let verdict = json(&[
        "check",
        "--category",
        C2_FILE,
        "--axioms",
        "[]",
        "--derivation",
        &d.to_string(),
    ]);
    assert_eq!(verdict["valid"], false);
}

#[test]
fn prove_matches_library() {
    let (uni, _) = c2();
    let cat = uni.cat();
    let axioms = SieveFamily::from_sieves(
        &uni,
        [&Sieve::new(cat, cat.object("b").unwrap(), &[cat.arrow("f").unwrap()]).unwrap()],
    )
    .unwrap();
    let target = Sieve::empty(cat.object("b").unwrap());
    let v = json(&[
        "prove",
        "--builtin",
        "C2",
        "--axioms",
        r#"[{"on":"b","arrows":["f"]}]"#,
        "--target",
        r#"{"on":"b","arrows":[]}"#,
    ]);
    match prove(&target, &axioms) {
        ProofOutcome::Refuted(r) => assert_eq!(v, serde_json::to_value(r.to_doc()).unwrap()),
        ProofOutcome::Proved(_) => panic!("empty sieve should not be derivable"),
    }
}

#[test]
fn verbs_agree_with_library() {
    let (uni, all) = c2();
    let cat = uni.cat();
    let doc = |t: &Topology| serde_json::to_string(&t.to_doc()).unwrap();
    let value = |t: &Topology| serde_json::to_value(t.to_doc()).unwrap();
    let (j2, j3) = (&all[1], &all[2]);
    assert_eq!(
        json(&["neg", "--builtin", "C2", &doc(j2)]),
        value(&negation(j2))
    );
    assert_eq!(
        json(&["join", "--builtin", "C2", &doc(j2), &doc(j3)]),
        value(&all[3])
    );
    assert_eq!(
        json(&["meet", "--builtin", "C2", &doc(j2), &doc(j3)]),
        value(&all[0])
    );
    assert_eq!(
        json(&["implies", "--builtin", "C2", &doc(j2), "bottom"]),
        value(j3)
    );
    let a = Ideal::new(cat, [cat.object("a").unwrap()]).unwrap();
    assert_eq!(
        json(&[
            "open",
            "--builtin",
            "C2",
            "--topology",
            "bottom",
            "--ideal",
            r#"{"objects":["a"]}"#
        ]),
        value(&open_topology(&all[0], &a).unwrap())
    );
    assert_eq!(
        json(&[
            "closed",
            "--builtin",
            "C2",
            "--topology",
            "bottom",
            "--ideal",
            r#"{"objects":["a"]}"#
        ]),
        value(j3)
    );
    assert_eq!(
        json(&["booleanize", "--builtin", "C2", "--topology", "bottom"]),
        value(j2)
    );
    assert_eq!(
        json(&[
            "factor",
            "--builtin",
            "C2",
            "--upper",
            &doc(j3),
            "--lower",
            "bottom"
        ]),
        value(j3)
    );
    assert_eq!(
        json(&[
            "dense",
            "--builtin",
            "C2",
            "--upper",
            &doc(j2),
            "--lower",
            "bottom"
        ])["dense"],
        true
    );
    assert_eq!(
        json(&[
            "skeletal",
            "--builtin",
            "C2",
            "--upper",
            &doc(j3),
            "--lower",
            "bottom"
        ])["skeletal"],
        false
    );
    assert_eq!(
        json(&["atoms", "--builtin", "C2", "--topology", "bottom"]),
        Value::Array(vec![value(j2), value(j3)])
    );
    assert_eq!(
        json(&[
            "closure",
            "--builtin",
            "C2",
            "--topology",
            &doc(j3),
            "--sieve",
            r#"{"on":"b","arrows":[]}"#
        ]),
        serde_json::json!({"on": "b", "arrows": ["f"]})
    );
    assert_eq!(
        json(&["ideals", "--builtin", "C2"])
            .as_array()
            .unwrap()
            .len(),
        3
    );
    assert_eq!(
        json(&[
            "generate",
            "--builtin",
            "C2",
            "--family",
            r#"[{"on":"a","arrows":[]}]"#
        ]),
        value(j3)
    );
    assert_eq!(
        json(&["sieves", "--builtin", "C2"])["b"]
            .as_array()
            .unwrap()
            .len(),
        3
    );
}

#[test]
fn domain_errors_are_documents() {
    let (code, out, _) = call(&["validate", "--category", BROKEN_FILE]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["code"], "invalid-category");
    assert_eq!(v["witness"]["violations"].as_array().unwrap().len(), 2);

    let (code, out, _) = call(&["topologies", "--builtin", "C2", "--guard", "3"]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["code"], "guard-exceeded");
    assert_eq!(v["witness"]["bound"], "total number of sieves");

    let j2 = r#"{"covers":{"a":[["1_a"]],"b":[["1_b","f"],["f"]]}}"#;
    let j3 = r#"{"covers":{"a":[[],["1_a"]],"b":[["1_b","f"]]}}"#;
    let (code, out, _) = call(&["relativize", "--builtin", "C2", "--outer", j3, "--base", j2]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["code"], "no-relativization");
    assert_eq!(v["witness"]["closure"], "{f} on b");

    let not_a_topology = r#"{"covers":{"a":[["1_a"]],"b":[["1_b","f"],[]]}}"#;
    let (code, out, _) = call(&["neg", "--builtin", "C2", not_a_topology]);
    assert_eq!(code, 1);
    assert!(out.contains("not-a-topology"));

    let (code, out, _) = call(&["neg", "--builtin", "C2", "{\"covers\": "]);
    assert_eq!(code, 1);
    assert!(out.contains("\"parse\""));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(call(&["topologies"]).0, 2);
    assert_eq!(call(&["frobnicate"]).0, 2);
    assert_eq!(
        call(&["topologies", "--builtin", "C2", "--category", C2_FILE]).0,
        2
    );
    assert_eq!(
        call(&["lattice", "--builtin", "C2", "--format", "svg"]).0,
        2
    );
}

#[test]
fn selftest_subset_passes() {
    let (code, out, _) = call(&["selftest", "--only", "1,7,9"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out.lines().count(), 3);
    assert!(out.lines().all(|l| l.starts_with("[PASS]")));
}
