//! Splitting a kernel into local and tail parts, and transplanting a
//! compactly supported kernel through a dilation chart.
use hardy_lab::kernels::{glue_kernel, make_kernel, split_ai, verify_lai, Budget, Chart, KernelSpec, Profile, Shape};
use hardy_lab::space::{DiscreteSpace, SpaceSpec, Topology};
use std::sync::Arc;

fn main() -> hardy_lab::Result<()> {
    let circle = Arc::new(DiscreteSpace::build(&SpaceSpec { topology: Topology::Torus, dim: 1, lower: 0.0, extent: 1.0, spacing: 1.0 / 128.0 })?);
    let heat = make_kernel(circle, &KernelSpec::HeatTorus)?;
    let split = split_ai(&heat, 0.25)?;
    println!("heat tail norm beyond 1/8: {:.4e}, trend {:?}", split.tail_norm, split.trend);

    let source = Arc::new(DiscreteSpace::build(&SpaceSpec { topology: Topology::Grid, dim: 1, lower: -1.0, extent: 2.0, spacing: 1.0 / 128.0 })?);
    let target = Arc::new(DiscreteSpace::build(&SpaceSpec { topology: Topology::Grid, dim: 1, lower: -2.0, extent: 4.0, spacing: 1.0 / 64.0 })?);
    let p = source.nearest(&[0.0])?;
    let chart = Chart::dilation(source.clone(), target, 2.0, p, vec![0.0], 1.0, 2.0)?;
    let small = make_kernel(source, &KernelSpec::Bump { profile: Profile::new(Shape::Triangle, 1.0 / 32.0, 1.0), gamma: 1.0 })?;
    let glued = glue_kernel(&small, &chart, 1.0)?;
    let fit = verify_lai(&glued, 1.0, None, &Budget::default());
    println!("glued kernel: C1 {:.3}  c {:.3e}  certified {}", fit.c1, fit.c, fit.certified);
    Ok(())
}
