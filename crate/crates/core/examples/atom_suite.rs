//! Uniform bound on ||K* a||_1 over random atoms, with the outer-part shape fit.
use hardy_lab::hardy::{atom_maximal_suite, hardy_norm_estimate, AtomSuiteOptions};
use hardy_lab::kernels::{make_kernel, KernelSpec, Profile};
use hardy_lab::space::{DiscreteSpace, Field, SpaceSpec, Topology};
use std::sync::Arc;

fn main() -> hardy_lab::Result<()> {
    let sp = Arc::new(DiscreteSpace::build(&SpaceSpec { topology: Topology::Grid, dim: 1, lower: -1.5, extent: 3.0, spacing: 1.0 / 256.0 })?);
    let k = make_kernel(sp.clone(), &KernelSpec::Bump { profile: Profile::triangle(), gamma: 1.0 })?;
    let opts = AtomSuiteOptions { count: 60, center_radius: Some(0.5), seed: 7, ..AtomSuiteOptions::default() };
    let rep = atom_maximal_suite(&k, 1.0, &opts, None)?;
    println!(
        "{} atoms: max standard {:.4}, max global {:.4}, outer constant {:.4} (spread {:.2})",
        rep.count, rep.max_standard, rep.max_global, rep.shape.constant, rep.shape.spread
    );

    // A normalised indicator is not an atom, and its norm grows as it shrinks.
    let c = sp.nearest(&[0.0])?;
    for r in [0.25, 0.0625, 0.015625] {
        let m = sp.ball_measure(c, r);
        let f = Field::from_fn(&sp, |x| if sp.dist(x, c) <= r { 1.0 / m } else { 0.0 });
        let h = hardy_norm_estimate(&f, &k)?;
        println!("indicator of radius {r}: ||f||_1 + ||K* f||_1 = {:.4}", h.total);
    }
    Ok(())
}
