use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hardy-lab"))
}

fn campaigns() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../campaigns")
}

fn run(config: &Path, out: &Path) -> Output {
    bin().arg("run").arg(config).arg("--out").arg(out).output().unwrap()
}

fn report(bundle: &Path, format: &str) -> Output {
    bin().arg("report").arg(bundle).args(["--format", format]).output().unwrap()
}

fn summary(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap()
}

const LINE: &str = r#"
[[stage]]
kind = "space"
id = "line"
spec = { topology = "grid", dim = 1, lower = -1.0, extent = 2.0, spacing = 0.00390625 }

[[stage]]
kind = "kernel"
id = "bump"
space = "line"
spec = { type = "bump", profile = { shape = "triangle", radius = 1.0 } }
"#;

#[test]
fn empty_campaign_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.toml");
    std::fs::write(&cfg, "name = \"empty\"\n").unwrap();
    let out = dir.path().join("out");
    let o = run(&cfg, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&out);
    assert_eq!(s["schema"], 1);
    assert_eq!(s["passed"], true);
}

#[test]
fn unknown_kernel_type_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    let text = LINE.replace("type = \"bump\"", "type = \"gaussian-blur\"");
    std::fs::write(&cfg, format!("name = \"bad\"\n{text}")).unwrap();
    let o = run(&cfg, &dir.path().join("out"));
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr).into_owned() + &String::from_utf8_lossy(&o.stdout);
    assert!(err.contains("gaussian-blur"), "{err}");
}

#[test]
fn nominal_ledger_and_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ledger.toml");
    let text = format!(
        "name = \"ledger\"\n{LINE}\n[[stage]]\nkind = \"ledger\"\nid = \"led\"\nkernel = \"bump\"\nc = 0.5\n\n\
         [[stage]]\nkind = \"decompose\"\nledger = \"led\"\nlevels = 5\nsample = 1\n"
    );
    std::fs::write(&cfg, text).unwrap();
    let out = dir.path().join("out");
    let o = run(&cfg, &out);
    assert!(o.status.success(), "{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr));

    let s = summary(&out);
    let led = &s["stages"][2]["result"];
    assert!((led["kappa"].as_f64().unwrap() - 22.6274).abs() < 1e-4);
    assert!((led["sigma"].as_f64().unwrap() - 0.015306).abs() < 1e-6);
    assert_eq!(led["eta"].as_f64().unwrap(), 2f64.powi(-18));

    // One trace row per level, plus the header.
    let trace = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.to_string_lossy().ends_with("decompose-trace.csv"))
        .expect("trace artifact");
    let rows = csv::Reader::from_path(&trace).unwrap().records().count();
    assert_eq!(rows, 5);

    let md1 = report(&out, "md");
    let md2 = report(&out, "md");
    assert!(md1.status.success());
    assert_eq!(md1.stdout, md2.stdout);
    let json = report(&out, "json");
    let parsed: Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(parsed, s);
    let csv_out = report(&out, "csv");
    assert!(String::from_utf8_lossy(&csv_out.stdout).starts_with("stage,kind,label,check"));
}

#[test]
fn infeasible_ledger_names_the_binding_condition() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&campaigns().join("infeasible-ledger.toml"), &out);
    assert_eq!(o.status.code(), Some(1));
    let md = report(&out, "md");
    assert!(md.status.success());
    let text = String::from_utf8_lossy(&md.stdout);
    assert!(text.contains("cond8"), "{text}");
}

#[test]
fn schema_mismatch_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.toml");
    std::fs::write(&cfg, "name = \"empty\"\n").unwrap();
    let out = dir.path().join("out");
    assert!(run(&cfg, &out).status.success());
    let mut s = summary(&out);
    s["schema"] = Value::from(2);
    std::fs::write(out.join("summary.json"), serde_json::to_string(&s).unwrap()).unwrap();
    let o = report(&out, "md");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("schema"));
}

#[test]
fn thread_count_must_be_positive() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.toml");
    std::fs::write(&cfg, "name = \"empty\"\n").unwrap();
    let o = bin().env("HARDY_LAB_THREADS", "0").arg("run").arg(&cfg).arg("--out").arg(dir.path().join("o")).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = bin().env("HARDY_LAB_THREADS", "2").arg("run").arg(&cfg).arg("--out").arg(dir.path().join("o")).output().unwrap();
    assert!(o.status.success());
}
