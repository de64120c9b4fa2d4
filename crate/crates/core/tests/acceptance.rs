//! One line per acceptance criterion, then a single assertion over all of
//! them so a failure in one does not hide the others.

use std::process::Command;
use std::time::{Duration, Instant};

use sievecalc::suite::{run_criterion, SuiteConfig, CRITERIA};

const BIN: &str = env!("CARGO_BIN_EXE_sievecalc");

fn sievecalc(args: &[&str]) -> (i32, Vec<u8>, Vec<u8>) {
    let out = Command::new(BIN)
        .args(args)
        .output()
        .expect("run sievecalc");
    (out.status.code().unwrap_or(-1), out.stdout, out.stderr)
}

/// Every verb, run twice on the same inputs, must print the same bytes.
fn cli_determinism() -> Result<String, String> {
    let c2 = ["--builtin", "C2"];
    let j2 = r#"{"covers":{"a":[["1_a"]],"b":[["1_b","f"],["f"]]}}"#;
    let j3 = r#"{"covers":{"a":[[],["1_a"]],"b":[["1_b","f"]]}}"#;
    let ideal = r#"{"objects":["a"]}"#;
    let target = r#"{"on":"a","arrows":[]}"#;
    let axioms = r#"[{"on":"a","arrows":[]}]"#;
    let sieve_b = r#"{"on":"b","arrows":[]}"#;
    let invocations: Vec<Vec<&str>> = vec![
        vec!["validate"],
        vec!["sieves"],
        vec!["topologies"],
        vec!["lattice", "--format", "json"],
        vec!["lattice", "--format", "dot"],
        vec!["generate", "--family", axioms],
        vec!["meet", j2, j3],
        vec!["join", j2, j3],
        vec!["implies", j2, "bottom"],
        vec!["neg", j2],
        vec!["closure", "--topology", j3, "--sieve", sieve_b],
        vec!["open", "--topology", "bottom", "--ideal", ideal],
        vec!["closed", "--topology", "bottom", "--ideal", ideal],
        vec!["qc", "--topology", "bottom", "--ideal", r#"{"objects":[]}"#],
        vec!["booleanize", "--topology", "bottom"],
        vec!["factor", "--upper", j3, "--lower", "bottom"],
        vec!["dense", "--upper", j2, "--lower", "bottom"],
        vec!["skeletal", "--upper", j3, "--lower", "bottom"],
        vec!["atoms", "--topology", "bottom"],
        vec!["ideals"],
        vec!["ideals", "--topology", "bottom"],
        vec!["prove", "--axioms", axioms, "--target", target],
        vec![
            "prove",
            "--axioms",
            axioms,
            "--target",
            r#"{"on":"b","arrows":[]}"#,
        ],
        vec!["relativize", "--outer", j3, "--base", j2],
    ];
    for args in &invocations {
        let full: Vec<&str> = args[..1]
            .iter()
            .chain(&c2)
            .chain(&args[1..])
            .copied()
            .collect();
        let first = sievecalc(&full);
        let second = sievecalc(&full);
        if first != second {
            return Err(format!("`{}` is not deterministic", args.join(" ")));
        }
        if first.0 == 2 {
            return Err(format!("`{}` was a usage error", args.join(" ")));
        }
    }
    let prove = sievecalc(&[
        "prove",
        "--builtin",
        "C2",
        "--axioms",
        axioms,
        "--target",
        target,
    ]);
    let doc: serde_json::Value = serde_json::from_slice(&prove.1).map_err(|e| e.to_string())?;
    let tree = doc.get("derivation").cloned().unwrap_or(doc);
    let (_, check_out, _) = sievecalc(&[
        "check",
        "--builtin",
        "C2",
        "--axioms",
        axioms,
        "--derivation",
        &tree.to_string(),
    ]);
    if sievecalc(&[
        "check",
        "--builtin",
        "C2",
        "--axioms",
        axioms,
        "--derivation",
        &tree.to_string(),
    ])
    .1 != check_out
    {
        return Err("`check` is not deterministic".into());
    }

    let start = Instant::now();
    let (code, out, err) = sievecalc(&["selftest", "--seed", "7"]);
    let elapsed = start.elapsed();
    if code != 0 {
        return Err(format!(
            "selftest failed:\n{}{}",
            String::from_utf8_lossy(&out),
            String::from_utf8_lossy(&err)
        ));
    }
    if elapsed >= Duration::from_secs(300) {
        return Err(format!("selftest took {elapsed:?}"));
    }
    Ok(format!(
        "{} invocations deterministic, selftest in {elapsed:.2?}",
        invocations.len() + 1
    ))
}

fn main() {
    let cfg = SuiteConfig::default();
    let mut failed = Vec::new();
    for (id, name) in CRITERIA {
        match run_criterion(id, &cfg) {
            Ok(report) => {
                println!("{report} ({:.2?})", report.elapsed);
                for f in report.failures.iter().skip(1) {
                    println!("        also: {f}");
                }
                if !report.passed {
                    failed.push(id);
                }
            }
            Err(e) => {
                println!("[FAIL] {id:>2} {name}: error {e}");
                failed.push(id);
            }
        }
    }
    match cli_determinism() {
        Ok(detail) => println!("[PASS] 11 CLI determinism: {detail}"),
        Err(e) => {
            println!("[FAIL] 11 CLI determinism: {e}");
            failed.push(11);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
