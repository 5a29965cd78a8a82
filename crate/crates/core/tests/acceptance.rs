//! Acceptance gate: every primary criterion with its default options.
//! Prints one pass/fail line per criterion, then fails if any did.

use hardy_lab::campaign::determinism_suite;
use hardy_lab::suites::*;
use hardy_lab::Result;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

// Written straight to stdout so the lines show without `--nocapture`.
fn say(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

#[test]
fn primary_criteria() {
    let quick = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../campaigns/quick.toml");
    let runs: Vec<(u8, Box<dyn Fn() -> Result<SuiteReport>>)> = vec![
        (1, Box::new(|| subordinator_suite(&Default::default()))),
        (2, Box::new(|| certification_suite(&Default::default()))),
        (3, Box::new(|| ledger_suite(&Default::default()))),
        (4, Box::new(|| decomposition_suite(&Default::default()))),
        (5, Box::new(|| majorization_suite(&Default::default()))),
        (6, Box::new(|| grand_oracle_suite(&Default::default()))),
        (7, Box::new(|| atom_uniformity_suite(&Default::default()))),
        (8, Box::new(|| domination_suite(&Default::default()))),
        (9, Box::new(move || determinism_suite(&quick))),
    ];
    let mut failed = Vec::new();
    for (n, run) in runs {
        let start = Instant::now();
        match run() {
            Ok(r) => {
                let verdict = if r.passed { "PASS" } else { "FAIL" };
                say(&format!("criterion {n} {verdict}: {} ({:.1}s)", r.title, start.elapsed().as_secs_f64()));
                if !r.passed {
                    for l in r.lines().iter().filter(|l| l.starts_with("[FAIL]")) {
                        say(&format!("    {l}"));
                    }
                    failed.push(n);
                }
            }
            Err(e) => {
                say(&format!("criterion {n} FAIL: {e}"));
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
