use clap::{Parser, Subcommand, ValueEnum};
use hardy_lab::campaign::{load_bundle, render, run_config_file, Format};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hardy-lab", version, about = "Run verification campaigns and render their reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a campaign config and write its bundle.
    Run {
        config: PathBuf,
        /// Stop after the first failing stage.
        #[arg(long)]
        fail_fast: bool,
        /// Bundle directory; defaults to `hardy-lab-out/<name>`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a bundle.
    Report {
        bundle: PathBuf,
        #[arg(long, value_enum, default_value = "md")]
        format: Fmt,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Json,
    Csv,
    Md,
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("HARDY_LAB_THREADS") else { return Ok(()) };
    let n: usize = v.parse().map_err(|_| format!("HARDY_LAB_THREADS must be a positive integer, got `{v}`"))?;
    if n == 0 {
        return Err("HARDY_LAB_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match cli.command {
        Command::Run { config, fail_fast, out } => {
            let out = match out {
                Some(o) => o,
                None => match hardy_lab::campaign::load_config(&config) {
                    Ok(cfg) => PathBuf::from("hardy-lab-out").join(cfg.name),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(2);
                    }
                },
            };
            match run_config_file(&config, &out, fail_fast) {
                Ok(s) => {
                    for st in &s.stages {
                        let v = if st.skipped { "skip" } else if st.passed { "pass" } else { "FAIL" };
                        let note = st.error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default();
                        println!("[{v}] {:02} {} {}{note}", st.index, st.kind, st.label);
                    }
                    println!("bundle: {}", out.display());
                    if s.passed {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Command::Report { bundle, format } => {
            let f = match format {
                Fmt::Json => Format::Json,
                Fmt::Csv => Format::Csv,
                Fmt::Md => Format::Md,
            };
            match load_bundle(&bundle).and_then(|s| render(&s, f)) {
                Ok(text) => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}
