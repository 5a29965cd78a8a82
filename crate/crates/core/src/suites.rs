//! Property suites, one per acceptance criterion. Each returns named checks
//! with the measured value next to its threshold.

use crate::decomposition::{
    choose_constants, kappa_of, majorization_check, net_weight, reconstruct, rho_of, sigma_of, uchiyama_decompose_weighted,
    LedgerOptions, ResolutionPolicy,
};
use crate::error::Result;
use crate::hardy::{atom_maximal_suite, AtomSuiteOptions};
use crate::kernels::{
    laplace_check, make_kernel, subordinator_density, verify_lai, Budget, FittedConstants, Kernel, KernelSpec, Profile,
    Shape,
};
use crate::maximal::{
    cutoff_family, grand_maximal_at, hl_maximal, radial_maximal, GrandEvaluator, GrandMethod, GrandOptions,
};
use crate::rng::stream;
use crate::space::{DiscreteSpace, Field, SpaceSpec, Topology};
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::sync::Arc;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Check {
    pub name: String,
    /// `None` when the measured value is not finite.
    pub measured: Option<f64>,
    pub relation: String,
    pub threshold: f64,
    pub passed: bool,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl Check {
    pub fn le(name: &str, measured: f64, threshold: f64) -> Check {
        Check { name: name.into(), measured: finite(measured), relation: "<=".into(), threshold, passed: measured <= threshold }
    }
    pub fn ge(name: &str, measured: f64, threshold: f64) -> Check {
        Check { name: name.into(), measured: finite(measured), relation: ">=".into(), threshold, passed: measured >= threshold }
    }
    pub fn lt(name: &str, measured: f64, threshold: f64) -> Check {
        Check { name: name.into(), measured: finite(measured), relation: "<".into(), threshold, passed: measured < threshold }
    }
    pub fn gt(name: &str, measured: f64, threshold: f64) -> Check {
        Check { name: name.into(), measured: finite(measured), relation: ">".into(), threshold, passed: measured > threshold }
    }
    pub fn holds(name: &str, ok: bool) -> Check {
        Check { name: name.into(), measured: Some(ok as u8 as f64), relation: "==".into(), threshold: 1.0, passed: ok }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub criterion: u8,
    pub title: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub details: Value,
}

impl SuiteReport {
    pub fn new(criterion: u8, title: &str, checks: Vec<Check>, details: Value) -> Self {
        let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
        SuiteReport { criterion, title: title.into(), passed, checks, details }
    }
    /// One line per check, for terminal output.
    pub fn lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                let m = c.measured.map_or("non-finite".to_string(), |v| format!("{v:.6e}"));
                format!(
                    "[{}] {}: {} {} {:.6e}",
                    if c.passed { "pass" } else { "FAIL" },
                    c.name,
                    m,
                    c.relation,
                    c.threshold
                )
            })
            .collect()
    }
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_change(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}

fn line(lower: f64, extent: f64, spacing: f64) -> Result<Arc<DiscreteSpace>> {
    Ok(Arc::new(DiscreteSpace::build(&SpaceSpec { topology: Topology::Grid, dim: 1, lower, extent, spacing })?))
}

fn torus(dim: usize, extent: f64, spacing: f64) -> Result<Arc<DiscreteSpace>> {
    Ok(Arc::new(DiscreteSpace::build(&SpaceSpec { topology: Topology::Torus, dim, lower: 0.0, extent, spacing })?))
}

fn bump(space: &Arc<DiscreteSpace>, profile: Profile) -> Result<Kernel> {
    make_kernel(space.clone(), &KernelSpec::Bump { profile, gamma: 1.0 })
}

/// Piecewise constant function of the first coordinate on `[lo, hi]`, with
/// 2 to 15 pieces of uniform random height in `[-1, 1]`.
pub fn random_piecewise(space: &DiscreteSpace, lo: f64, hi: f64, seed: u64, index: u64) -> Field {
    let mut rng = stream(seed, "piecewise", index);
    let k = rng.random_range(2..16usize);
    let vals: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
    Field::from_fn(space, |x| {
        let u = (space.coords(x)[0] - lo) / (hi - lo);
        if !(0.0..=1.0).contains(&u) {
            return 0.0;
        }
        vals[((u * k as f64) as usize).min(k - 1)]
    })
}

/// Trigonometric polynomial on a circle of length `period`, with degree
/// drawn in `[deg_lo, deg_hi]` and coefficients decaying like `1/(1+k)`.
pub fn random_trig(space: &DiscreteSpace, period: f64, deg_lo: usize, deg_hi: usize, seed: u64, index: u64) -> Field {
    let mut rng = stream(seed, "trig", index);
    let deg = rng.random_range(deg_lo..=deg_hi);
    let co: Vec<(f64, f64)> = (0..=deg).map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    Field::from_fn(space, |x| {
        let u = 2.0 * std::f64::consts::PI * space.coords(x)[0] / period;
        co.iter()
            .enumerate()
            .map(|(k, (a, b))| (a * (k as f64 * u).cos() + b * (k as f64 * u).sin()) / (1.0 + k as f64))
            .sum()
    })
}

// ---------------------------------------------------------------- 1

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SubordinatorSuite {
    pub s_points: usize,
    pub s_lo: f64,
    pub s_hi: f64,
    pub alphas: Vec<f64>,
    pub zs: Vec<f64>,
    pub density_tolerance: f64,
    pub laplace_tolerance: f64,
}

impl Default for SubordinatorSuite {
    fn default() -> Self {
        SubordinatorSuite {
            s_points: 50,
            s_lo: 0.01,
            s_hi: 100.0,
            alphas: vec![0.3, 0.5, 0.7],
            zs: vec![0.5, 1.0, 2.0],
            density_tolerance: 1e-8,
            laplace_tolerance: 1e-6,
        }
    }
}

pub fn subordinator_suite(o: &SubordinatorSuite) -> Result<SuiteReport> {
    let mut worst: f64 = 0.0;
    let n = o.s_points.max(2);
    for i in 0..n {
        let s = o.s_lo * (o.s_hi / o.s_lo).powf(i as f64 / (n - 1) as f64);
        // Density against ds/s, so one power of s is absorbed.
        let exact = (-0.25 / s).exp() / (2.0 * std::f64::consts::PI.sqrt() * s.sqrt());
        worst = worst.max((subordinator_density(0.5, s)? - exact).abs());
    }
    let mut checks = vec![Check::le("density alpha=1/2, max abs error", worst, o.density_tolerance)];
    let mut rows = Vec::new();
    for &a in &o.alphas {
        let lc = laplace_check(a, &o.zs)?;
        let r = lc.residual.iter().cloned().fold(0.0, f64::max);
        checks.push(Check::le(&format!("Laplace identity alpha={a}, max residual"), r, o.laplace_tolerance));
        rows.push(lc);
    }
    Ok(SuiteReport::new(1, "subordinator exactness", checks, json!({ "laplace": rows })))
}

// ---------------------------------------------------------------- 2

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct CertificationSuite {
    pub torus_1d_cells: usize,
    pub torus_2d_cells: usize,
    pub line_cells: usize,
    pub stability: f64,
    pub budget: Budget,
}

impl Default for CertificationSuite {
    fn default() -> Self {
        CertificationSuite { torus_1d_cells: 257, torus_2d_cells: 64, line_cells: 128, stability: 0.2, budget: Budget::default() }
    }
}

fn fit_pair(
    label: &str,
    coarse: FittedConstants,
    fine: FittedConstants,
    stability: f64,
    checks: &mut Vec<Check>,
    rows: &mut Vec<Value>,
) {
    checks.push(Check::holds(&format!("{label}: certified"), coarse.certified));
    checks.push(Check::gt(&format!("{label}: c > 0"), coarse.c, 0.0));
    checks.push(Check::lt(&format!("{label}: c < 1"), coarse.c, 1.0));
    for (name, a, b) in [("C1", coarse.c1, fine.c1), ("C2", coarse.c2, fine.c2), ("C3", coarse.c3, fine.c3), ("c", coarse.c, fine.c)] {
        checks.push(Check::le(&format!("{label}: {name} change under refinement"), relative_change(a, b), stability));
    }
    checks.push(Check::holds(&format!("{label}: refined certified"), fine.certified));
    let strip = |f: &FittedConstants| json!({ "C1": f.c1, "C2": f.c2, "C3": f.c3, "c": f.c, "scale": f.scale, "certified": f.certified });
    rows.push(json!({ "kernel": label, "coarse": strip(&coarse), "fine": strip(&fine) }));
}

pub fn certification_suite(o: &CertificationSuite) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (dim, cells) in [(1usize, o.torus_1d_cells), (2, o.torus_2d_cells)] {
        let fits: Vec<FittedConstants> = [cells, 2 * cells]
            .iter()
            .map(|&c| {
                let sp = torus(dim, 1.0, 1.0 / c as f64)?;
                let k = make_kernel(sp, &KernelSpec::HeatTorus)?;
                Ok(verify_lai(&k, 1.0, None, &o.budget))
            })
            .collect::<Result<_>>()?;
        let [a, b]: [FittedConstants; 2] = fits.try_into().expect("two fits");
        fit_pair(&format!("heat T^{dim} ({cells} cells per side)"), a, b, o.stability, &mut checks, &mut rows);
    }
    for (label, spec) in [
        ("bump on [-1,1]", KernelSpec::Bump { profile: Profile::triangle(), gamma: 1.0 }),
        ("poisson-model on [-1,1]", KernelSpec::PoissonModel),
    ] {
        let lambda = matches!(spec, KernelSpec::Bump { .. }).then_some(1.0);
        let fits: Vec<FittedConstants> = [o.line_cells, 2 * o.line_cells]
            .iter()
            .map(|&c| {
                let sp = line(-1.0, 2.0, 2.0 / c as f64)?;
                let k = make_kernel(sp, &spec)?;
                Ok(verify_lai(&k, 1.0, lambda, &o.budget))
            })
            .collect::<Result<_>>()?;
        let [a, b]: [FittedConstants; 2] = fits.try_into().expect("two fits");
        fit_pair(label, a, b, o.stability, &mut checks, &mut rows);
    }
    Ok(SuiteReport::new(2, "kernel certification", checks, json!({ "fits": rows })))
}

// ---------------------------------------------------------------- 3

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct LedgerSuite {
    pub c: f64,
    pub line_spacing: f64,
    pub plane_spacing: f64,
    pub options: LedgerOptions,
}

impl Default for LedgerSuite {
    fn default() -> Self {
        LedgerSuite { c: 0.5, line_spacing: 1.0 / 256.0, plane_spacing: 1.0 / 16.0, options: LedgerOptions::default() }
    }
}

pub fn ledger_suite(o: &LedgerSuite) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let line_sp = line(-1.0, 2.0, o.line_spacing)?;
    let plane = Arc::new(DiscreteSpace::build(&SpaceSpec {
        topology: Topology::Grid,
        dim: 2,
        lower: -1.0,
        extent: 2.0,
        spacing: o.plane_spacing,
    })?);
    for (sp, gamma) in [(&line_sp, 1.0), (&line_sp, 0.5), (&plane, 1.0)] {
        let d = sp.dimension();
        let tag = format!("D={d}, gamma={gamma}");
        let origin = sp.nearest(&vec![0.0; sp.coord_dim()])?;
        let led = match choose_constants(sp, origin, gamma, o.c, true, &o.options) {
            Ok(l) => l,
            Err(e) => {
                checks.push(Check::holds(&format!("{tag}: feasible ({e})"), false));
                continue;
            }
        };
        for c in &led.conditions {
            checks.push(Check::holds(&format!("{tag}: {}", c.name), c.holds));
        }
        checks.push(Check::le(&format!("{tag}: condition count"), led.conditions.len() as f64, 9.0));
        checks.push(Check::ge(&format!("{tag}: condition count"), led.conditions.len() as f64, 9.0));
        // Closed forms, written out independently of the ledger code.
        let c1 = o.c / 2.0;
        let kappa = 1.0 / (c1 * 2f64.powf(-1.0 - d - gamma / 2.0));
        let sigma = f64::min(0.25, (2.0 * (4f64.powf(d + 1.5 * gamma) + 2.0 / 3.0)).powf(-1.0 / gamma));
        checks.push(Check::le(&format!("{tag}: kappa vs closed form"), relative_change(led.kappa, kappa), 1e-15));
        checks.push(Check::le(&format!("{tag}: sigma vs closed form"), relative_change(led.sigma, sigma), 1e-15));
        checks.push(Check::le(&format!("{tag}: kappa helper"), relative_change(kappa_of(c1, d, gamma), kappa), 1e-15));
        checks.push(Check::le(&format!("{tag}: sigma helper"), relative_change(sigma_of(d, gamma), sigma), 1e-15));
        let rho = (1.0 - led.delta).ln() / (led.eta.powf(d)).ln();
        checks.push(Check::le(&format!("{tag}: rho recomputed"), (rho - led.rho).abs(), 1e-15));
        checks.push(Check::le(&format!("{tag}: rho helper"), (rho_of(led.delta, led.eta, d) - led.rho).abs(), 1e-15));
        checks.push(Check::le(&format!("{tag}: p recomputed"), (1.0 / (1.0 + rho) - led.p).abs(), 1e-15));
        checks.push(Check::gt(&format!("{tag}: rho > 0"), led.rho, 0.0));
        checks.push(Check::lt(&format!("{tag}: rho < 1"), led.rho, 1.0));
        checks.push(Check::gt(&format!("{tag}: p > 1/2"), led.p, 0.5));
        checks.push(Check::lt(&format!("{tag}: p < 1"), led.p, 1.0));
        rows.push(json!({ "D": d, "gamma": gamma, "ledger": led }));
    }
    let k = kappa_of(0.25, 1.0, 1.0);
    checks.push(Check::le("kappa(D=1, gamma=1, c=1/2) = 2^4.5", relative_change(k, 2f64.powf(4.5)), 1e-15));
    checks.push(Check::le("sigma(D=1, gamma=1) = 1/65.333...", relative_change(sigma_of(1.0, 1.0), 3.0 / 196.0), 1e-15));
    Ok(SuiteReport::new(3, "ledger feasibility", checks, json!({ "ledgers": rows })))
}

// ---------------------------------------------------------------- 4

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct DecompositionSuite {
    pub spacing: f64,
    pub cutoffs: usize,
    pub samples: usize,
    pub levels: usize,
    pub min_levels: usize,
    pub seed: u64,
    pub policy: ResolutionPolicy,
}

impl Default for DecompositionSuite {
    fn default() -> Self {
        DecompositionSuite {
            spacing: 1.0 / 1024.0,
            cutoffs: 5,
            samples: 5,
            levels: 12,
            min_levels: 10,
            seed: 11,
            policy: ResolutionPolicy::Discrete,
        }
    }
}

/// First `count` cutoffs of the family with pairwise distinct values.
pub fn distinct_cutoffs(family: Vec<(String, Field)>, count: usize) -> Vec<(String, Field)> {
    let mut out: Vec<(String, Field)> = Vec::new();
    for (label, phi) in family {
        if out.len() == count {
            break;
        }
        if out.iter().all(|(_, q)| q.sub(&phi).sup_norm() > 0.0) {
            out.push((label, phi));
        }
    }
    out
}

pub fn decomposition_suite(o: &DecompositionSuite) -> Result<SuiteReport> {
    let sp = line(-1.0, 2.0, o.spacing)?;
    let origin = sp.nearest(&[0.0])?;
    let raw = bump(&sp, Profile::triangle())?;
    let fit = verify_lai(&raw, 1.0, Some(1.0), &Budget::default());
    let kernel = raw.scaled(fit.scale);
    let ledger = choose_constants(&sp, origin, 1.0, fit.c, false, &LedgerOptions::default())?;
    let cutoffs = distinct_cutoffs(cutoff_family(&sp, origin, 1.0), o.cutoffs);
    let mut checks = vec![
        Check::holds("kernel certified", fit.certified),
        Check::holds("ledger feasible", ledger.feasible()),
        Check::ge("distinct cutoffs", cutoffs.len() as f64, o.cutoffs as f64),
        Check::ge("levels", o.levels as f64, o.min_levels as f64),
    ];
    let (mut worst_ratio, mut worst_final, mut worst_identity, mut worst_coef): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    let (mut worst_wi, mut worst_holder, mut worst_far): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let (mut sign_violations, mut overlap_bad, mut times_bad) = (0usize, 0usize, 0usize);
    let mut residual_excess: f64 = 0.0;
    let mut resolved = usize::MAX;
    let mut failures = Vec::new();
    let mut traces = Vec::new();
    for s in 0..o.samples {
        let f = random_piecewise(&sp, -1.0, 1.0, o.seed, s as u64);
        let g = net_weight(&kernel, &f)?;
        for (label, phi) in &cutoffs {
            match uchiyama_decompose_weighted(phi, &kernel, &ledger, &g, o.levels, o.policy) {
                Ok(dec) => {
                    let (_, _, rep) = reconstruct(&dec, &kernel)?;
                    resolved = resolved.min(dec.resolved_levels);
                    for l in &dec.levels {
                        worst_ratio = worst_ratio.max(l.ratio);
                        worst_wi = worst_wi.max(l.audit.wi_ratio);
                        worst_holder = worst_holder.max(l.audit.holder_ratio.unwrap_or(0.0));
                        // Level 0 is the cutoff itself, which may saturate the bound.
                        if l.index > 0 {
                            worst_far = worst_far.max(l.audit.far_ratio.unwrap_or(0.0));
                        }
                        sign_violations += l.audit.sign_violations;
                        overlap_bad += (!l.audit.overlap_ok) as usize;
                        times_bad += (l.audit.max_time > 1.0) as usize;
                    }
                    worst_final = worst_final.max(dec.final_ratio);
                    worst_identity = worst_identity.max(rep.identity_error);
                    worst_coef = worst_coef.max(rep.coefficient_error);
                    residual_excess = residual_excess.max(rep.residual_sup / rep.bound);
                    traces.push(json!({
                        "cutoff": label,
                        "sample": s,
                        "ratios": dec.levels.iter().map(|l| l.ratio).collect::<Vec<_>>(),
                        "final_ratio": dec.final_ratio,
                        "residual_sup": rep.residual_sup,
                        "bound": rep.bound,
                    }));
                }
                Err(e) => failures.push(format!("{label} / sample {s}: {e}")),
            }
        }
    }
    checks.push(Check::le("failed runs", failures.len() as f64, 0.0));
    checks.push(Check::le("max residual ratio over levels", worst_ratio, 1.0));
    checks.push(Check::le("max final residual ratio", worst_final, 1.0));
    checks.push(Check::le("max ||phi_N|| / (1-delta)^N", residual_excess, 1.0));
    checks.push(Check::le("max telescoping identity error", worst_identity, 1e-12));
    checks.push(Check::le("max coefficient audit error", worst_coef, 1e-12));
    checks.push(Check::le("max |w_i| against its a-priori bound", worst_wi, 1.0));
    checks.push(Check::le("max Hölder propagation ratio", worst_holder, 1.0));
    checks.push(Check::le("max far-field ratio past level 0", worst_far, 1.0));
    checks.push(Check::le("sign coherence violations", sign_violations as f64, 0.0));
    checks.push(Check::le("levels with overlap above L", overlap_bad as f64, 0.0));
    checks.push(Check::le("levels with a time above 1", times_bad as f64, 0.0));
    let details = json!({
        "ledger": ledger,
        "kernel_fit": { "c": fit.c, "scale": fit.scale },
        "resolved_levels": if resolved == usize::MAX { 0 } else { resolved },
        "resolvable_depth": ledger.resolvable_depth(sp.resolution()),
        "failures": failures,
        "traces": traces,
    });
    Ok(SuiteReport::new(4, "Uchiyama decomposition", checks, details))
}

// ---------------------------------------------------------------- 5

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct MajorizationSuite {
    pub spacing: f64,
    pub samples: usize,
    pub stability: f64,
    pub seed: u64,
    pub grand: GrandOptions,
}

impl Default for MajorizationSuite {
    fn default() -> Self {
        MajorizationSuite {
            spacing: 1.0 / 128.0,
            samples: 100,
            stability: 0.2,
            seed: 5,
            grand: GrandOptions { r_ratio: std::f64::consts::SQRT_2, envelope_limit: 300, ..GrandOptions::default() },
        }
    }
}

fn majorization_run(o: &MajorizationSuite, spacing: f64, samples: usize) -> Result<(f64, f64, usize, f64)> {
    let sp = line(-1.0, 2.0, spacing)?;
    let origin = sp.nearest(&[0.0])?;
    let raw = bump(&sp, Profile::triangle())?;
    let fit = verify_lai(&raw, 1.0, Some(1.0), &Budget::default());
    let kernel = raw.scaled(fit.scale);
    let ledger = choose_constants(&sp, origin, 1.0, fit.c, false, &LedgerOptions::default())?;
    let family = cutoff_family(&sp, origin, 1.0);
    let ev = GrandEvaluator::new(&sp, origin, 1.0, &o.grand);
    let fs: Vec<Field> = (0..samples).map(|i| random_piecewise(&sp, -1.0, 1.0, o.seed, i as u64)).collect();
    let rep = majorization_check(&kernel, &ledger, &family, &fs, Some(&ev))?;
    Ok((rep.e_emp, rep.e_family, rep.skipped, rep.p))
}

pub fn majorization_suite(o: &MajorizationSuite) -> Result<SuiteReport> {
    let (e0, fam0, sk0, p) = majorization_run(o, o.spacing, o.samples)?;
    let (e1, _, sk1, _) = majorization_run(o, o.spacing / 2.0, o.samples)?;
    let (e2, _, sk2, _) = majorization_run(o, o.spacing, 2 * o.samples)?;
    let checks = vec![
        Check::lt("E_emp finite", if e0.is_finite() { 0.0 } else { 1.0 }, 0.5),
        Check::gt("E_emp positive", e0, 0.0),
        Check::le("E_emp change under refinement", relative_change(e0, e1), o.stability),
        Check::le("E_emp change when doubling samples", relative_change(e0, e2), o.stability),
        Check::le("skipped samples", (sk0 + sk1 + sk2) as f64, 0.0),
    ];
    let details = json!({
        "p": p,
        "E_emp": e0,
        "E_family": fam0,
        "E_refined": e1,
        "E_doubled": e2,
    });
    Ok(SuiteReport::new(5, "majorization", checks, details))
}

// ---------------------------------------------------------------- 6

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct GrandOracleSuite {
    pub instances: usize,
    pub max_points: usize,
    pub ratio: f64,
    pub seed: u64,
}

impl Default for GrandOracleSuite {
    fn default() -> Self {
        GrandOracleSuite { instances: 50, max_points: 200, ratio: 0.8, seed: 3 }
    }
}

pub fn grand_oracle_suite(o: &GrandOracleSuite) -> Result<SuiteReport> {
    let sizes: Vec<usize> = [32usize, 48, 64, 96, 128, 192].into_iter().filter(|c| c + 1 <= o.max_points).collect();
    let mut worst_ratio = f64::INFINITY;
    let mut worst_excess: f64 = 0.0;
    let mut rows = Vec::new();
    for i in 0..o.instances {
        let mut rng = stream(o.seed, "grand-instance", i as u64);
        let cells = sizes[rng.random_range(0..sizes.len())];
        let gamma = if rng.random_bool(0.5) { 1.0 } else { 0.5 };
        let sp = line(0.0, 1.0, 1.0 / cells as f64)?;
        let x = rng.random_range(0..sp.len());
        let f = random_piecewise(&sp, 0.0, 1.0, o.seed, i as u64);
        let opts = GrandOptions::default();
        let cand = grand_maximal_at(&sp, &f, gamma, x, GrandMethod::CandidateFamily, &opts)?;
        let lp = grand_maximal_at(&sp, &f, gamma, x, GrandMethod::LpExact, &opts)?;
        let ratio = if lp.value > 0.0 { cand.value / lp.value } else { 1.0 };
        worst_ratio = worst_ratio.min(ratio);
        if lp.value > 0.0 {
            worst_excess = worst_excess.max(cand.value / lp.value - 1.0);
        }
        rows.push(json!({
            "points": sp.len(), "gamma": gamma, "x": x,
            "candidate": cand.value, "label": cand.label, "lp": lp.value, "ratio": ratio,
        }));
    }
    let checks = vec![
        Check::ge("min candidate / LP", worst_ratio, o.ratio),
        Check::le("max candidate / LP - 1", worst_excess, 1e-12),
        Check::ge("instances", rows.len() as f64, o.instances as f64),
    ];
    Ok(SuiteReport::new(6, "grand-maximal oracle", checks, json!({ "instances": rows })))
}

// ---------------------------------------------------------------- 7

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct AtomUniformitySuite {
    pub spacing: f64,
    pub atoms: AtomSuiteOptions,
    pub stability: f64,
    pub max_spread: f64,
}

impl Default for AtomUniformitySuite {
    fn default() -> Self {
        AtomUniformitySuite {
            spacing: 1.0 / 256.0,
            atoms: AtomSuiteOptions { count: 200, scale: 0.25, lambda: 1.0, seed: 7, r_min_cells: 4.0, center_radius: Some(0.5) },
            stability: 0.25,
            max_spread: 4.0,
        }
    }
}

pub fn atom_uniformity_suite(o: &AtomUniformitySuite) -> Result<SuiteReport> {
    let run = |spacing: f64, count: usize| -> Result<crate::hardy::AtomSuiteReport> {
        let sp = line(-1.5, 3.0, spacing)?;
        let k = bump(&sp, Profile::triangle())?;
        atom_maximal_suite(&k, 1.0, &AtomSuiteOptions { count, ..o.atoms.clone() }, None)
    };
    let base = run(o.spacing, o.atoms.count)?;
    let fine = run(o.spacing / 2.0, o.atoms.count)?;
    let more = run(o.spacing, 2 * o.atoms.count)?;
    let checks = vec![
        Check::lt("max ||K* a||_1 finite", if base.max_total.is_finite() { 0.0 } else { 1.0 }, 0.5),
        Check::le("max ||K* a||_1 change under refinement", relative_change(base.max_total, fine.max_total), o.stability),
        Check::le("max ||K* a||_1 change when doubling count", relative_change(base.max_total, more.max_total), o.stability),
        Check::le(
            "outer-part constant change under refinement",
            relative_change(base.shape.constant, fine.shape.constant),
            o.stability,
        ),
        Check::le("outer-part constant spread over radius octaves", base.shape.spread, o.max_spread),
        Check::le("global atoms outside B(c, r + lambda)", (base.support_violations + fine.support_violations) as f64, 0.0),
    ];
    let summary = |r: &crate::hardy::AtomSuiteReport| {
        json!({
            "count": r.count, "max_standard": r.max_standard, "max_global": r.max_global,
            "shape": r.shape, "support_violations": r.support_violations,
        })
    };
    let details = json!({ "base": summary(&base), "refined": summary(&fine), "doubled": summary(&more) });
    Ok(SuiteReport::new(7, "atom uniformity", checks, details))
}

// ---------------------------------------------------------------- 8

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct DominationSuite {
    /// Circle length.
    pub period: f64,
    pub spacing: f64,
    pub samples: usize,
    pub degrees: (usize, usize),
    pub seed: u64,
}

impl Default for DominationSuite {
    fn default() -> Self {
        DominationSuite { period: 4.0, spacing: 1.0 / 64.0, samples: 100, degrees: (4, 24), seed: 13 }
    }
}

/// `(max K* f / M_lambda f, max (c|f| - K* f)_+)` over the samples, with
/// `c` the limit mass of the profile.
fn domination_run(o: &DominationSuite, spacing: f64) -> Result<(f64, f64)> {
    let sp = torus(1, o.period, spacing)?;
    let profile = Profile::new(Shape::RaisedCosine, 1.0, 1.0);
    let k = bump(&sp, profile)?;
    let c = profile.mass(1);
    let lambda = profile.radius;
    let mut fitted: f64 = 0.0;
    let mut eps: f64 = 0.0;
    for i in 0..o.samples {
        let f = random_trig(&sp, o.period, o.degrees.0, o.degrees.1, o.seed, i as u64);
        let kf = radial_maximal(&k, &f, 0.0)?.values;
        let m = hl_maximal(&sp, &f, lambda)?;
        for x in 0..sp.len() {
            if m.get(x) > 0.0 {
                fitted = fitted.max(kf.get(x) / m.get(x));
            }
            eps = eps.max(c * f.get(x).abs() - kf.get(x));
        }
    }
    Ok((fitted, eps))
}

pub fn domination_suite(o: &DominationSuite) -> Result<SuiteReport> {
    let (c0, e0) = domination_run(o, o.spacing)?;
    let (c1, e1) = domination_run(o, o.spacing / 2.0)?;
    let checks = vec![
        Check::lt("fitted C finite", if c0.is_finite() && c1.is_finite() { 0.0 } else { 1.0 }, 0.5),
        Check::le("fitted C change under refinement", relative_change(c0, c1), 0.2),
        Check::le("eps_grid refined / coarse", if e0 > 0.0 { e1 / e0 } else if e1 > 0.0 { f64::INFINITY } else { 0.0 }, 0.5),
    ];
    let details = json!({ "C": c0, "C_refined": c1, "eps_grid": e0, "eps_grid_refined": e1 });
    Ok(SuiteReport::new(8, "domination chain", checks, details))
}
