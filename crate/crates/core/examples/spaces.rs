//! Building grids and tori, measuring balls and fitting the Ahlfors constant.
use hardy_lab::space::{verify_ahlfors, AhlforsMode, DiscreteSpace, SpaceSpec, Topology};

fn main() -> hardy_lab::Result<()> {
    let grid = DiscreteSpace::build(&SpaceSpec { topology: Topology::Grid, dim: 1, lower: 0.0, extent: 1.0, spacing: 1.0 / 256.0 })?;
    println!("grid [0,1]: {} points, total measure {}", grid.len(), grid.total_measure());

    let circle = DiscreteSpace::build(&SpaceSpec { topology: Topology::Torus, dim: 1, lower: 0.0, extent: 1.0, spacing: 1.0 / 128.0 })?;
    let (a, b) = (circle.nearest(&[0.0])?, circle.nearest(&[0.75])?);
    println!("circle: d(0, 0.75) = {}", circle.dist(a, b));

    let radii: Vec<f64> = (0..5).map(|k| 1.0 / 16.0 * 2f64.powf(k as f64 / 2.0)).collect();
    let rep = verify_ahlfors(&circle, &AhlforsMode::Sampled(radii), None);
    println!("circle Ahlfors: A = {:.4}, certified {}", rep.fitted_a, rep.certified);

    let square = DiscreteSpace::build(&SpaceSpec { topology: Topology::Grid, dim: 2, lower: 0.0, extent: 1.0, spacing: 1.0 / 64.0 })?;
    let mid = square.nearest(&[0.5, 0.5])?;
    let r = 0.125;
    println!("square: m(B(center, 1/8)) / r^2 = {:.4} (pi = {:.4})", square.ball_measure(mid, r) / (r * r), std::f64::consts::PI);
    Ok(())
}
