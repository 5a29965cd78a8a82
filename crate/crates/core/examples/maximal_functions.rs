//! Radial, Hardy-Littlewood and grand maximal functions of a sample f.
use hardy_lab::kernels::{make_kernel, KernelSpec, Profile};
use hardy_lab::maximal::{grand_maximal_at, hl_maximal, radial_maximal, riesz_potential, GrandMethod, GrandOptions};
use hardy_lab::space::{DiscreteSpace, Field, SpaceSpec, Topology};
use std::sync::Arc;

fn main() -> hardy_lab::Result<()> {
    let sp = Arc::new(DiscreteSpace::build(&SpaceSpec { topology: Topology::Grid, dim: 1, lower: -1.0, extent: 2.0, spacing: 1.0 / 128.0 })?);
    let f = Field::from_fn(&sp, |x| if sp.coords(x)[0].abs() < 0.25 { 1.0 } else { 0.0 });
    let k = make_kernel(sp.clone(), &KernelSpec::Bump { profile: Profile::triangle(), gamma: 1.0 })?;

    let kf = radial_maximal(&k, &f, 0.0)?;
    let m = hl_maximal(&sp, &f, 1.0)?;
    let i = riesz_potential(&sp, &f, 0.5)?;
    for xc in [0.0, 0.3, 0.6, 0.9] {
        let x = sp.nearest(&[xc])?;
        let g = grand_maximal_at(&sp, &f, 1.0, x, GrandMethod::CandidateFamily, &GrandOptions::default())?;
        println!(
            "x = {xc:.1}: K*f {:.4}  M_1 f {:.4}  I f {:.4}  G f >= {:.4} ({} at r = {:.3})",
            kf.values.get(x),
            m.get(x),
            i.get(x),
            g.value,
            g.label,
            g.radius
        );
    }
    Ok(())
}
