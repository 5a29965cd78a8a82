//! Fitting admissible scales and the lower constant for the built-in kernels.
use hardy_lab::kernels::{make_kernel, verify_lai, Budget, KernelSpec, Profile};
use hardy_lab::space::{DiscreteSpace, SpaceSpec, Topology};
use std::sync::Arc;

fn main() -> hardy_lab::Result<()> {
    let line = Arc::new(DiscreteSpace::build(&SpaceSpec { topology: Topology::Grid, dim: 1, lower: -1.0, extent: 2.0, spacing: 1.0 / 128.0 })?);
    let circle = Arc::new(DiscreteSpace::build(&SpaceSpec { topology: Topology::Torus, dim: 1, lower: 0.0, extent: 1.0, spacing: 1.0 / 257.0 })?);
    let cases = [
        ("bump", line.clone(), KernelSpec::Bump { profile: Profile::triangle(), gamma: 1.0 }, Some(1.0)),
        ("poisson-model", line, KernelSpec::PoissonModel, None),
        ("heat on the circle", circle.clone(), KernelSpec::HeatTorus, None),
        ("subordinated heat, alpha 1/2", circle, KernelSpec::Subordinated { alpha: 0.5 }, None),
    ];
    for (label, sp, spec, lambda) in cases {
        let k = make_kernel(sp, &spec)?;
        let fit = verify_lai(&k, 1.0, lambda, &Budget::default());
        println!(
            "{label:<30} scale {:.4e}  c {:.4e}  C1 {:.3}  C3 {:.3}  certified {}",
            fit.scale, fit.c, fit.c1, fit.c3, fit.certified
        );
    }
    Ok(())
}
