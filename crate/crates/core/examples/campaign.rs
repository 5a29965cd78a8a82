//! Running a campaign from an inline config and rendering the bundle.
use hardy_lab::campaign::{load_bundle, parse_config, render, run_campaign, Format};

const CONFIG: &str = r#"
name = "inline"
seed = 3

[[stage]]
kind = "space"
id = "line"
spec = { topology = "grid", dim = 1, lower = -1.0, extent = 2.0, spacing = 0.0078125 }

[[stage]]
kind = "kernel"
id = "bump"
space = "line"
spec = { type = "bump", profile = { shape = "triangle" } }

[[stage]]
kind = "certify"
kernel = "bump"
lambda = 1.0

[[stage]]
kind = "ledger"
id = "led"
kernel = "bump"

[[stage]]
kind = "decompose"
ledger = "led"
levels = 4
"#;

fn main() -> hardy_lab::Result<()> {
    let out = std::env::temp_dir().join("hardy-lab-example-campaign");
    let cfg = parse_config(CONFIG)?;
    let summary = run_campaign(&cfg, &out, &out, false)?;
    println!("passed: {}", summary.passed);
    print!("{}", render(&load_bundle(&out)?, Format::Md)?);
    Ok(())
}
