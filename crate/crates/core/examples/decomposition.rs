//! Uchiyama decomposition of a cutoff against K* f, with reconstruction.
use hardy_lab::decomposition::{choose_constants, reconstruct, uchiyama_decompose, LedgerOptions, ResolutionPolicy};
use hardy_lab::kernels::{make_kernel, verify_lai, Budget, KernelSpec, Profile};
use hardy_lab::maximal::cutoff_family;
use hardy_lab::space::{DiscreteSpace, Field, SpaceSpec, Topology};
use std::sync::Arc;

fn main() -> hardy_lab::Result<()> {
    let sp = Arc::new(DiscreteSpace::build(&SpaceSpec { topology: Topology::Grid, dim: 1, lower: -1.0, extent: 2.0, spacing: 1.0 / 256.0 })?);
    let o = sp.nearest(&[0.0])?;
    let raw = make_kernel(sp.clone(), &KernelSpec::Bump { profile: Profile::triangle(), gamma: 1.0 })?;
    let fit = verify_lai(&raw, 1.0, Some(1.0), &Budget::default());
    let k = raw.scaled(fit.scale);
    let led = choose_constants(&sp, o, 1.0, fit.c, false, &LedgerOptions::default())?;

    let f = Field::from_fn(&sp, |x| (5.0 * sp.coords(x)[0]).cos());
    let (_, phi) = cutoff_family(&sp, o, 1.0).into_iter().find(|(l, _)| l == "triangle").expect("triangle cutoff");
    let dec = uchiyama_decompose(&phi, &k, &led, &f, 8, ResolutionPolicy::Discrete)?;
    for l in &dec.levels {
        println!("level {}: {} centers, residual ratio {:.4}", l.index, l.centers.len(), l.ratio);
    }
    let (_, residual, rep) = reconstruct(&dec, &k)?;
    println!(
        "||phi_N|| = {:.4} <= (1-delta)^N = {:.6}: {}  identity error {:e}",
        residual.sup_norm(),
        rep.bound,
        rep.bound_holds,
        rep.identity_error
    );
    Ok(())
}
