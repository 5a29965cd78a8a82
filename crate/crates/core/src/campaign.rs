//! Config-driven campaigns. A campaign is an ordered list of stages read
//! from TOML; running it writes a bundle directory with `summary.json` and
//! CSV artifacts. Bundles never contain timings or absolute paths, so the
//! same config and seed always give the same bytes.

use crate::decomposition::{
    choose_constants, majorization_check, net_weight, reconstruct, uchiyama_decompose_weighted, write_residuals_csv,
    ConstantLedger, LedgerOptions, ResolutionPolicy,
};
use crate::error::{Error, Result};
use crate::hardy::{atom_maximal_suite, AtomSuiteOptions};
use crate::kernels::{laplace_check, make_kernel, verify_lai, Budget, FittedConstants, Kernel, KernelSpec};
use crate::maximal::{cutoff_family, hl_maximal, radial_maximal, GrandEvaluator, GrandOptions};
use crate::space::{verify_ahlfors, AhlforsMode, DiscreteSpace, Field, SpaceSpec, Topology};
use crate::suites::{self, Check, SuiteReport};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub const SCHEMA: u64 = 1;
pub const SUMMARY: &str = "summary.json";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub fail_fast: bool,
    #[serde(default, rename = "stage")]
    pub stages: Vec<StageConfig>,
}

fn default_name() -> String {
    "campaign".into()
}
fn one() -> f64 {
    1.0
}
fn default_levels() -> usize {
    12
}
fn default_samples() -> usize {
    20
}
fn default_cutoff() -> String {
    "triangle".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StageConfig {
    Space {
        id: String,
        spec: SpaceSpec,
        /// Also fit the Ahlfors constant over dyadic radii.
        #[serde(default)]
        ahlfors: bool,
    },
    Kernel {
        id: String,
        space: String,
        spec: KernelSpec,
    },
    Subordinator {
        #[serde(default = "alphas")]
        alphas: Vec<f64>,
        #[serde(default = "zs")]
        zs: Vec<f64>,
        #[serde(default = "laplace_tol")]
        tolerance: f64,
    },
    /// Fits the admissible scale and replaces the kernel by its scaled form.
    Certify {
        kernel: String,
        #[serde(default = "one")]
        gamma: f64,
        lambda: Option<f64>,
        #[serde(default)]
        budget: Budget,
    },
    Ledger {
        id: String,
        kernel: String,
        #[serde(default = "one")]
        gamma: f64,
        /// Lower constant to use instead of the certified one.
        c: Option<f64>,
        basepoint: Option<Vec<f64>>,
        #[serde(default)]
        options: LedgerOptions,
    },
    Decompose {
        ledger: String,
        #[serde(default = "default_cutoff")]
        cutoff: String,
        #[serde(default = "default_levels")]
        levels: usize,
        /// Index of the random sample `f`.
        #[serde(default)]
        sample: u64,
        #[serde(default)]
        policy: ResolutionPolicy,
    },
    Majorize {
        ledger: String,
        #[serde(default = "default_samples")]
        samples: usize,
        /// Include the optimised grand-maximal candidates.
        #[serde(default)]
        grand: Option<GrandOptions>,
    },
    GrandOracle {
        #[serde(default)]
        instances: Option<usize>,
        #[serde(default)]
        ratio: Option<f64>,
    },
    HardySuite {
        kernel: String,
        #[serde(default = "one")]
        gamma: f64,
        #[serde(default)]
        options: AtomSuiteOptions,
    },
    Domination {
        kernel: String,
        /// Expected lower constant in `c|f| <= K* f`.
        c: f64,
        #[serde(default = "one")]
        lambda: f64,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    /// A full acceptance suite; criterion 9 reruns the campaign at `config`.
    Suite {
        criterion: u8,
        #[serde(default)]
        options: Option<toml::Value>,
        config: Option<PathBuf>,
    },
}

fn alphas() -> Vec<f64> {
    vec![0.3, 0.5, 0.7]
}
fn zs() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}
fn laplace_tol() -> f64 {
    1e-6
}

impl StageConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            StageConfig::Space { .. } => "space",
            StageConfig::Kernel { .. } => "kernel",
            StageConfig::Subordinator { .. } => "subordinator",
            StageConfig::Certify { .. } => "certify",
            StageConfig::Ledger { .. } => "ledger",
            StageConfig::Decompose { .. } => "decompose",
            StageConfig::Majorize { .. } => "majorize",
            StageConfig::GrandOracle { .. } => "grand-oracle",
            StageConfig::HardySuite { .. } => "hardy-suite",
            StageConfig::Domination { .. } => "domination",
            StageConfig::Suite { .. } => "suite",
        }
    }
}

pub fn parse_config(text: &str) -> Result<CampaignConfig> {
    toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))
}

pub fn load_config(path: &Path) -> Result<CampaignConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    parse_config(&text).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StageOutcome {
    pub index: usize,
    pub kind: String,
    pub label: String,
    pub passed: bool,
    #[serde(default)]
    pub skipped: bool,
    pub error: Option<String>,
    pub checks: Vec<Check>,
    pub result: Value,
    pub artifacts: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Summary {
    pub schema: u64,
    pub name: String,
    pub seed: u64,
    pub passed: bool,
    pub stages: Vec<StageOutcome>,
}

struct KernelEntry {
    kernel: Kernel,
    fit: Option<FittedConstants>,
}

struct LedgerEntry {
    ledger: ConstantLedger,
    kernel: String,
}

#[derive(Default)]
struct Context {
    spaces: BTreeMap<String, Arc<DiscreteSpace>>,
    kernels: BTreeMap<String, KernelEntry>,
    ledgers: BTreeMap<String, LedgerEntry>,
}

fn missing(kind: &str, id: &str) -> Error {
    Error::Config(format!("stage references unknown {kind} `{id}`"))
}

impl Context {
    fn space(&self, id: &str) -> Result<&Arc<DiscreteSpace>> {
        self.spaces.get(id).ok_or_else(|| missing("space", id))
    }
    fn kernel(&self, id: &str) -> Result<&KernelEntry> {
        self.kernels.get(id).ok_or_else(|| missing("kernel", id))
    }
    fn ledger(&self, id: &str) -> Result<&LedgerEntry> {
        self.ledgers.get(id).ok_or_else(|| missing("ledger", id))
    }
}

struct StageRun {
    label: String,
    checks: Vec<Check>,
    result: Value,
    artifacts: Vec<String>,
}

impl StageRun {
    fn new(label: impl Into<String>, checks: Vec<Check>, result: Value) -> Self {
        StageRun { label: label.into(), checks, result, artifacts: Vec::new() }
    }
}

/// Random sample `f` used by campaign stages: piecewise constant over the
/// bounding interval of the first coordinate.
fn sample_field(space: &DiscreteSpace, seed: u64, index: u64) -> Field {
    let (lo, hi) = (0..space.len())
        .map(|x| space.coords(x)[0])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    suites::random_piecewise(space, lo, hi, seed, index)
}

fn options<T: Default + for<'de> Deserialize<'de>>(v: &Option<toml::Value>) -> Result<T> {
    match v {
        None => Ok(T::default()),
        Some(v) => v.clone().try_into().map_err(|e: toml::de::Error| Error::Config(format!("suite options: {e}"))),
    }
}

fn run_suite(criterion: u8, opts: &Option<toml::Value>, config: &Option<PathBuf>, base: &Path) -> Result<SuiteReport> {
    match criterion {
        1 => suites::subordinator_suite(&options(opts)?),
        2 => suites::certification_suite(&options(opts)?),
        3 => suites::ledger_suite(&options(opts)?),
        4 => suites::decomposition_suite(&options(opts)?),
        5 => suites::majorization_suite(&options(opts)?),
        6 => suites::grand_oracle_suite(&options(opts)?),
        7 => suites::atom_uniformity_suite(&options(opts)?),
        8 => suites::domination_suite(&options(opts)?),
        9 => {
            let rel = config.as_ref().ok_or_else(|| Error::Config("suite 9 needs `config`".into()))?;
            determinism_suite(&base.join(rel))
        }
        n => Err(Error::Config(format!("unknown criterion {n}"))),
    }
}

fn run_stage(stage: &StageConfig, index: usize, seed: u64, ctx: &mut Context, out: &Path, base: &Path) -> Result<StageRun> {
    let prefix = format!("stage-{index:02}-{}", stage.kind());
    match stage {
        StageConfig::Space { id, spec, ahlfors } => {
            let mut sp = DiscreteSpace::build(spec)?;
            let mut checks = Vec::new();
            let mut result = json!({ "points": sp.len(), "dimension": sp.dimension(), "resolution": sp.resolution() });
            if *ahlfors {
                let mut radii = Vec::new();
                let mut r = 2.0 * sp.resolution();
                while r <= sp.diameter() / 2.0 {
                    radii.push(r);
                    r *= 2.0;
                }
                let rep = verify_ahlfors(&sp, &AhlforsMode::Sampled(radii), None);
                checks.push(Check::holds("Ahlfors regular", rep.certified));
                result["ahlfors"] = json!({ "A": rep.fitted_a, "radii": rep.radii_checked, "flags": rep.flags });
                if let Some(cert) = rep.certificate {
                    sp = sp.with_ahlfors(cert);
                }
            }
            ctx.spaces.insert(id.clone(), Arc::new(sp));
            Ok(StageRun::new(id.clone(), checks, result))
        }
        StageConfig::Kernel { id, space, spec } => {
            let sp = ctx.space(space)?.clone();
            let k = make_kernel(sp, spec)?;
            let result = json!({ "name": k.name(), "spec": spec });
            ctx.kernels.insert(id.clone(), KernelEntry { kernel: k, fit: None });
            Ok(StageRun::new(id.clone(), Vec::new(), result))
        }
        StageConfig::Subordinator { alphas, zs, tolerance } => {
            let mut checks = Vec::new();
            let mut rows = Vec::new();
            for &a in alphas {
                let lc = laplace_check(a, zs)?;
                let r = lc.residual.iter().cloned().fold(0.0, f64::max);
                checks.push(Check::le(&format!("Laplace residual alpha={a}"), r, *tolerance));
                rows.push(lc);
            }
            Ok(StageRun::new("subordinator", checks, json!({ "laplace": rows })))
        }
        StageConfig::Certify { kernel, gamma, lambda, budget } => {
            let entry = ctx.kernels.get_mut(kernel).ok_or_else(|| missing("kernel", kernel))?;
            let fit = verify_lai(&entry.kernel, *gamma, *lambda, budget);
            let checks = vec![
                Check::holds("certified", fit.certified),
                Check::gt("c > 0", fit.c, 0.0),
                Check::lt("c < 1", fit.c, 1.0),
            ];
            let result = serde_json::to_value(&fit)?;
            entry.kernel = entry.kernel.scaled(fit.scale);
            entry.fit = Some(fit);
            Ok(StageRun::new(kernel.clone(), checks, result))
        }
        StageConfig::Ledger { id, kernel, gamma, c, basepoint, options } => {
            let entry = ctx.kernel(kernel)?;
            let sp = entry.kernel.space().clone();
            let o = match basepoint {
                Some(p) => sp.nearest(p)?,
                None => sp.default_basepoint(),
            };
            let (c_val, assumed) = match (c, &entry.fit) {
                (Some(c), _) => (*c, true),
                (None, Some(fit)) => (fit.c, false),
                (None, None) => return Err(Error::Config(format!("ledger `{id}` needs `c` or a certified kernel"))),
            };
            let ledger = choose_constants(&sp, o, *gamma, c_val, assumed, options)?;
            let checks = ledger.conditions.iter().map(|c| Check::holds(&c.name, c.holds)).collect();
            let result = serde_json::to_value(&ledger)?;
            ctx.ledgers.insert(id.clone(), LedgerEntry { ledger, kernel: kernel.clone() });
            Ok(StageRun::new(id.clone(), checks, result))
        }
        StageConfig::Decompose { ledger, cutoff, levels, sample, policy } => {
            let le = ctx.ledger(ledger)?;
            let k = &ctx.kernel(&le.kernel)?.kernel;
            let sp = k.space().clone();
            let o = le.ledger.basepoint;
            let family = cutoff_family(&sp, o, le.ledger.gamma);
            let phi = family
                .iter()
                .find(|(l, _)| l == cutoff)
                .map(|(_, p)| p.clone())
                .ok_or_else(|| Error::Config(format!("unknown cutoff `{cutoff}`")))?;
            let f = sample_field(&sp, seed, *sample);
            let g = net_weight(k, &f)?;
            let dec = uchiyama_decompose_weighted(&phi, k, &le.ledger, &g, *levels, *policy)?;
            let (_, _, rep) = reconstruct(&dec, k)?;
            let worst = dec.levels.iter().map(|l| l.ratio).fold(0.0, f64::max);
            let checks = vec![
                Check::le("max level residual ratio", worst, 1.0),
                Check::le("||phi_N|| / (1-delta)^N", rep.residual_sup / rep.bound, 1.0),
                Check::le("telescoping identity error", rep.identity_error, 1e-12),
                Check::le("coefficient audit error", rep.coefficient_error, 1e-12),
            ];
            let trace = format!("{prefix}-trace.csv");
            let residuals = format!("{prefix}-residuals.csv");
            dec.write_trace_csv(&out.join(&trace))?;
            write_residuals_csv(&dec, &out.join(&residuals))?;
            let result = json!({
                "cutoff": cutoff,
                "levels": dec.depth(),
                "resolved_levels": dec.resolved_levels,
                "final_ratio": dec.final_ratio,
                "reconstruction": rep,
                "decomposition": dec,
            });
            let mut run = StageRun::new(format!("{ledger}/{cutoff}"), checks, result);
            run.artifacts = vec![trace, residuals];
            Ok(run)
        }
        StageConfig::Majorize { ledger, samples, grand } => {
            let le = ctx.ledger(ledger)?;
            let k = &ctx.kernel(&le.kernel)?.kernel;
            let sp = k.space().clone();
            let o = le.ledger.basepoint;
            let family = cutoff_family(&sp, o, le.ledger.gamma);
            let fs: Vec<Field> = (0..*samples).map(|i| sample_field(&sp, seed, i as u64)).collect();
            let ev = grand.as_ref().map(|g| GrandEvaluator::new(&sp, o, le.ledger.gamma, g));
            let rep = majorization_check(k, &le.ledger, &family, &fs, ev.as_ref())?;
            let checks = vec![
                Check::lt("E_emp finite", if rep.e_emp.is_finite() { 0.0 } else { 1.0 }, 0.5),
                Check::le("skipped samples", rep.skipped as f64, 0.0),
            ];
            let csv_name = format!("{prefix}-samples.csv");
            let mut w = csv::Writer::from_path(out.join(&csv_name))?;
            w.write_record(["index", "family", "grand", "denominator", "ratio"])?;
            for s in &rep.samples {
                let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
                w.write_record([s.index.to_string(), s.family.to_string(), opt(s.grand), s.denominator.to_string(), opt(s.ratio)])?;
            }
            w.flush().map_err(|source| Error::Io { path: csv_name.clone(), source })?;
            let result = json!({ "p": rep.p, "E_emp": rep.e_emp, "E_family": rep.e_family, "samples": rep.samples.len() });
            let mut run = StageRun::new(ledger.clone(), checks, result);
            run.artifacts = vec![csv_name];
            Ok(run)
        }
        StageConfig::GrandOracle { instances, ratio } => {
            let mut o = suites::GrandOracleSuite { seed, ..Default::default() };
            if let Some(n) = instances {
                o.instances = *n;
            }
            if let Some(r) = ratio {
                o.ratio = *r;
            }
            let r = suites::grand_oracle_suite(&o)?;
            Ok(StageRun::new("grand-oracle", r.checks, r.details))
        }
        StageConfig::HardySuite { kernel, gamma, options } => {
            let k = &ctx.kernel(kernel)?.kernel;
            let opts = AtomSuiteOptions { seed, ..options.clone() };
            let rep = atom_maximal_suite(k, *gamma, &opts, None)?;
            let checks = vec![
                Check::lt("max ||K* a||_1 finite", if rep.max_total.is_finite() { 0.0 } else { 1.0 }, 0.5),
                Check::le("support violations", rep.support_violations as f64, 0.0),
            ];
            let csv_name = format!("{prefix}-atoms.csv");
            let mut w = csv::Writer::from_path(out.join(&csv_name))?;
            for r in &rep.records {
                w.serialize(r)?;
            }
            w.flush().map_err(|source| Error::Io { path: csv_name.clone(), source })?;
            let result = json!({
                "count": rep.count, "max_standard": rep.max_standard, "max_global": rep.max_global,
                "max_total": rep.max_total, "shape": rep.shape, "max_tail_ratio": rep.max_tail_ratio,
            });
            let mut run = StageRun::new(kernel.clone(), checks, result);
            run.artifacts = vec![csv_name];
            Ok(run)
        }
        StageConfig::Domination { kernel, c, lambda, samples } => {
            let k = &ctx.kernel(kernel)?.kernel;
            let sp = k.space().clone();
            let (mut fitted, mut eps): (f64, f64) = (0.0, 0.0);
            for i in 0..*samples {
                let f = match (sp.topology(), sp.period()) {
                    (Topology::Torus, Some(p)) => suites::random_trig(&sp, p, 4, 24, seed, i as u64),
                    _ => sample_field(&sp, seed, i as u64),
                };
                let kf = radial_maximal(k, &f, 0.0)?.values;
                let m = hl_maximal(&sp, &f, *lambda)?;
                for x in 0..sp.len() {
                    if m.get(x) > 0.0 {
                        fitted = fitted.max(kf.get(x) / m.get(x));
                    }
                    eps = eps.max(c * f.get(x).abs() - kf.get(x));
                }
            }
            let checks = vec![Check::lt("fitted C finite", if fitted.is_finite() { 0.0 } else { 1.0 }, 0.5)];
            Ok(StageRun::new(kernel.clone(), checks, json!({ "C": fitted, "eps_grid": eps })))
        }
        StageConfig::Suite { criterion, options, config } => {
            let r = run_suite(*criterion, options, config, base)?;
            let label = format!("criterion {}: {}", r.criterion, r.title);
            Ok(StageRun::new(label, r.checks, json!({ "criterion": r.criterion, "details": r.details })))
        }
    }
}

fn mkdir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

/// Runs the campaign and writes its bundle into `out`. Relative paths in
/// the config resolve against `base`.
pub fn run_campaign(cfg: &CampaignConfig, out: &Path, base: &Path, fail_fast: bool) -> Result<Summary> {
    mkdir(out)?;
    let fail_fast = fail_fast || cfg.fail_fast;
    let mut ctx = Context::default();
    let mut stages = Vec::new();
    let mut failed = false;
    for (i, st) in cfg.stages.iter().enumerate() {
        if failed && fail_fast {
            stages.push(StageOutcome {
                index: i,
                kind: st.kind().into(),
                label: String::new(),
                passed: false,
                skipped: true,
                error: Some("skipped after an earlier failure".into()),
                checks: Vec::new(),
                result: Value::Null,
                artifacts: Vec::new(),
            });
            continue;
        }
        let outcome = match run_stage(st, i, cfg.seed, &mut ctx, out, base) {
            Ok(run) => StageOutcome {
                index: i,
                kind: st.kind().into(),
                passed: run.checks.iter().all(|c| c.passed),
                label: run.label,
                skipped: false,
                error: None,
                checks: run.checks,
                result: run.result,
                artifacts: run.artifacts,
            },
            Err(e) => {
                let result = match &e {
                    Error::Infeasible { binding, detail } => json!({ "binding": binding, "detail": detail }),
                    _ => Value::Null,
                };
                StageOutcome {
                    index: i,
                    kind: st.kind().into(),
                    label: String::new(),
                    passed: false,
                    skipped: false,
                    error: Some(e.to_string()),
                    checks: Vec::new(),
                    result,
                    artifacts: Vec::new(),
                }
            }
        };
        failed |= !outcome.passed;
        stages.push(outcome);
    }
    let summary = Summary { schema: SCHEMA, name: cfg.name.clone(), seed: cfg.seed, passed: !failed, stages };
    let path = out.join(SUMMARY);
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    Ok(summary)
}

/// Loads `config` and runs it with paths relative to its directory.
pub fn run_config_file(config: &Path, out: &Path, fail_fast: bool) -> Result<Summary> {
    let cfg = load_config(config)?;
    let base = config.parent().map(Path::to_path_buf).unwrap_or_default();
    run_campaign(&cfg, out, &base, fail_fast)
}

fn read_dir_sorted(dir: &Path) -> Result<Vec<(String, Vec<u8>)>> {
    let io = |source| Error::Io { path: dir.display().to_string(), source };
    let mut files = Vec::new();
    for e in std::fs::read_dir(dir).map_err(io)? {
        let e = e.map_err(io)?;
        let bytes = std::fs::read(e.path()).map_err(io)?;
        files.push((e.file_name().to_string_lossy().into_owned(), bytes));
    }
    files.sort();
    Ok(files)
}

/// Runs the campaign at `config` twice into fresh directories and compares
/// every file byte for byte.
pub fn determinism_suite(config: &Path) -> Result<SuiteReport> {
    let cfg = load_config(config)?;
    let base = config.parent().map(Path::to_path_buf).unwrap_or_default();
    let root = std::env::temp_dir().join(format!("hardy-lab-determinism-{}", std::process::id()));
    let (a, b) = (root.join("a"), root.join("b"));
    let _ = std::fs::remove_dir_all(&root);
    run_campaign(&cfg, &a, &base, false)?;
    run_campaign(&cfg, &b, &base, false)?;
    let fa = read_dir_sorted(&a)?;
    let fb = read_dir_sorted(&b)?;
    let _ = std::fs::remove_dir_all(&root);
    let names: Vec<&String> = fa.iter().map(|(n, _)| n).collect();
    let differing: Vec<String> = fa
        .iter()
        .zip(&fb)
        .filter(|((na, ba), (nb, bb))| na != nb || ba != bb)
        .map(|((n, _), _)| n.clone())
        .collect();
    let checks = vec![
        Check::holds("same file set", fa.len() == fb.len() && fa.iter().zip(&fb).all(|(x, y)| x.0 == y.0)),
        Check::le("files differing", differing.len() as f64, 0.0),
        Check::ge("files compared", fa.len() as f64, 1.0),
    ];
    let details = json!({ "campaign": cfg.name, "files": names, "differing": differing });
    Ok(SuiteReport::new(9, "determinism", checks, details))
}

// ---------------------------------------------------------------- report

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Md,
}

/// Reads `summary.json` from a bundle directory (or the file itself).
pub fn load_bundle(bundle: &Path) -> Result<Summary> {
    let path = if bundle.is_dir() { bundle.join(SUMMARY) } else { bundle.to_path_buf() };
    let text = std::fs::read_to_string(&path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    let v: Value = serde_json::from_str(&text)?;
    let found = v.get("schema").and_then(Value::as_u64).unwrap_or(0);
    if found != SCHEMA {
        return Err(Error::Schema { found, expected: SCHEMA });
    }
    Ok(serde_json::from_value(v)?)
}

fn fmt_num(v: Option<f64>) -> String {
    v.map_or("non-finite".into(), |v| format!("{v:.6e}"))
}

pub fn render(summary: &Summary, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(summary)?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["stage", "kind", "label", "check", "measured", "relation", "threshold", "passed"])?;
            for st in &summary.stages {
                if st.checks.is_empty() {
                    let verdict = if st.passed { "true" } else { "false" };
                    let note = st.error.clone().unwrap_or_default();
                    w.write_record([&st.index.to_string(), &st.kind, &st.label, &note, "", "", "", verdict])?;
                }
                for c in &st.checks {
                    w.write_record([
                        st.index.to_string(),
                        st.kind.clone(),
                        st.label.clone(),
                        c.name.clone(),
                        c.measured.map_or(String::new(), |v| v.to_string()),
                        c.relation.clone(),
                        c.threshold.to_string(),
                        c.passed.to_string(),
                    ])?;
                }
            }
            let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
        Format::Md => Ok(markdown(summary)),
    }
}

fn markdown(s: &Summary) -> String {
    let mut m = String::new();
    let verdict = |p: bool| if p { "pass" } else { "FAIL" };
    let _ = writeln!(m, "# Campaign `{}`\n", s.name);
    let _ = writeln!(m, "seed {} | schema {} | overall **{}**\n", s.seed, s.schema, verdict(s.passed));
    let _ = writeln!(m, "| # | stage | label | verdict |\n|---|---|---|---|");
    for st in &s.stages {
        let v = if st.skipped { "skipped" } else { verdict(st.passed) };
        let _ = writeln!(m, "| {} | {} | {} | {} |", st.index, st.kind, st.label, v);
    }
    for st in &s.stages {
        let _ = writeln!(m, "\n## {} `{}` {}\n", st.index, st.kind, st.label);
        if let Some(e) = &st.error {
            let _ = writeln!(m, "error: {e}\n");
        }
        if let Some(b) = st.result.get("binding").and_then(Value::as_str) {
            let _ = writeln!(m, "binding constraint: `{b}`\n");
        }
        if st.kind == "ledger" && st.error.is_none() {
            let r = &st.result;
            let _ = writeln!(m, "| constant | value |\n|---|---|");
            for key in ["c", "kappa", "sigma", "delta", "eta", "rho", "p", "L"] {
                if let Some(v) = r.get(key).and_then(Value::as_f64) {
                    let _ = writeln!(m, "| {key} | {v:.6e} |");
                }
            }
            let _ = writeln!(m);
        }
        if st.kind == "decompose" {
            if let Some(levels) = st.result.pointer("/decomposition/levels").and_then(Value::as_array) {
                let _ = writeln!(m, "| level | residual ratio |\n|---|---|");
                for l in levels {
                    let i = l.get("index").and_then(Value::as_u64).unwrap_or(0);
                    let r = l.get("ratio").and_then(Value::as_f64);
                    let _ = writeln!(m, "| {i} | {} |", fmt_num(r));
                }
                let _ = writeln!(m);
            }
        }
        if let Some(n) = st.result.get("criterion").and_then(Value::as_u64) {
            let _ = writeln!(m, "single invocation: `hardy-lab run campaigns/criteria/c{n}.toml`\n");
        }
        if !st.checks.is_empty() {
            let _ = writeln!(m, "| check | measured | relation | threshold | verdict |\n|---|---|---|---|---|");
            for c in &st.checks {
                let _ = writeln!(
                    m,
                    "| {} | {} | {} | {:.6e} | {} |",
                    c.name,
                    fmt_num(c.measured),
                    c.relation,
                    c.threshold,
                    verdict(c.passed)
                );
            }
        }
        if !st.artifacts.is_empty() {
            let _ = writeln!(m, "\nartifacts: {}", st.artifacts.join(", "));
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_kernel_type_names_the_key() {
        let text = "[[stage]]\nkind = \"kernel\"\nid = \"k\"\nspace = \"s\"\nspec = { type = \"gaussian\" }\n";
        let err = parse_config(text).unwrap_err().to_string();
        assert!(err.contains("gaussian"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn empty_campaign_passes() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = parse_config("name = \"empty\"\n").unwrap();
        let s = run_campaign(&cfg, dir.path(), dir.path(), false).unwrap();
        assert!(s.passed);
        assert!(s.stages.is_empty());
    }
}
