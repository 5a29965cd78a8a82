//! Weighted separated nets and the colored partition of unity.
use hardy_lab::space::{build_patchwork, maximal_net, DiscreteSpace, Field, SpaceSpec, Topology};

fn main() -> hardy_lab::Result<()> {
    let sp = DiscreteSpace::build(&SpaceSpec { topology: Topology::Grid, dim: 1, lower: 0.0, extent: 1.0, spacing: 1.0 / 256.0 })?;
    let o = sp.nearest(&[0.0])?;

    let flat = Field::constant(sp.len(), 1.0);
    let net = maximal_net(&sp, o, 0.125, 1.0, &flat)?;
    println!("flat weight: {} centers, overlap {}, covered {}", net.centers.len(), net.overlap, net.covered);

    // A spike in the weight pushes centers away from it.
    let spike_at = sp.nearest(&[0.5])?;
    let spiky = Field::from_fn(&sp, |x| if x == spike_at { 100.0 } else { 1.0 });
    let net = maximal_net(&sp, o, 0.125, 1.0, &spiky)?;
    println!(
        "spiky weight: spike selected {}, average constant {:.3}",
        net.centers.contains(&spike_at),
        net.average_constant
    );

    let pw = build_patchwork(&sp, 0.125)?;
    let worst = (0..sp.len())
        .map(|x| (pw.cutoffs.iter().map(|c| c.get(x)).sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    println!("patchwork: {} patches in {} colors, max |sum - 1| = {worst:e}", pw.centers.len(), pw.n_colors);
    Ok(())
}
