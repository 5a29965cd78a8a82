//! Empirical constant in the majorization of the grand maximal function by
//! the maximal function of (K* f)^p.
use hardy_lab::decomposition::{choose_constants, majorization_check, LedgerOptions};
use hardy_lab::kernels::{make_kernel, verify_lai, Budget, KernelSpec, Profile};
use hardy_lab::maximal::{cutoff_family, GrandEvaluator, GrandOptions};
use hardy_lab::space::{DiscreteSpace, SpaceSpec, Topology};
use hardy_lab::suites::random_piecewise;
use std::sync::Arc;

fn main() -> hardy_lab::Result<()> {
    let sp = Arc::new(DiscreteSpace::build(&SpaceSpec { topology: Topology::Grid, dim: 1, lower: -1.0, extent: 2.0, spacing: 1.0 / 128.0 })?);
    let o = sp.nearest(&[0.0])?;
    let raw = make_kernel(sp.clone(), &KernelSpec::Bump { profile: Profile::triangle(), gamma: 1.0 })?;
    let fit = verify_lai(&raw, 1.0, Some(1.0), &Budget::default());
    let k = raw.scaled(fit.scale);
    let led = choose_constants(&sp, o, 1.0, fit.c, false, &LedgerOptions::default())?;
    let family = cutoff_family(&sp, o, 1.0);
    let fs: Vec<_> = (0..20).map(|i| random_piecewise(&sp, -1.0, 1.0, 5, i)).collect();
    let ev = GrandEvaluator::new(&sp, o, 1.0, &GrandOptions { envelope_limit: 300, ..GrandOptions::default() });
    let rep = majorization_check(&k, &led, &family, &fs, Some(&ev))?;
    println!("p = {:.8}  E_emp = {:.4}  (fixed family alone {:.4})", rep.p, rep.e_emp, rep.e_family);
    Ok(())
}
