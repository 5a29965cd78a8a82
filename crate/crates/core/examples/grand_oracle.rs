//! Candidate-family lower bound for the grand maximal function against the
//! exact linear program on a small grid.
use hardy_lab::maximal::{grand_maximal_at, GrandMethod, GrandOptions};
use hardy_lab::space::{DiscreteSpace, Field, SpaceSpec, Topology};

fn main() -> hardy_lab::Result<()> {
    let sp = DiscreteSpace::build(&SpaceSpec { topology: Topology::Grid, dim: 1, lower: 0.0, extent: 1.0, spacing: 1.0 / 64.0 })?;
    let f = Field::from_fn(&sp, |x| {
        let u = sp.coords(x)[0];
        (7.0 * u).sin() + if u > 0.6 { 1.0 } else { 0.0 }
    });
    let opts = GrandOptions::default();
    for xc in [0.1, 0.5, 0.8] {
        let x = sp.nearest(&[xc])?;
        for gamma in [1.0, 0.5] {
            let cand = grand_maximal_at(&sp, &f, gamma, x, GrandMethod::CandidateFamily, &opts)?;
            let lp = grand_maximal_at(&sp, &f, gamma, x, GrandMethod::LpExact, &opts)?;
            println!("x = {xc}, gamma = {gamma}: candidate {:.5}  lp {:.5}  ratio {:.3}", cand.value, lp.value, cand.value / lp.value);
        }
    }
    Ok(())
}
