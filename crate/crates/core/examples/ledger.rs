//! Choosing the decomposition constants and checking every condition.
use hardy_lab::decomposition::{choose_constants, LedgerOptions};
use hardy_lab::space::{DiscreteSpace, SpaceSpec, Topology};

fn main() -> hardy_lab::Result<()> {
    let sp = DiscreteSpace::build(&SpaceSpec { topology: Topology::Grid, dim: 1, lower: -1.0, extent: 2.0, spacing: 1.0 / 256.0 })?;
    let o = sp.nearest(&[0.0])?;
    let led = choose_constants(&sp, o, 1.0, 0.5, true, &LedgerOptions::default())?;
    println!("kappa {:.4}  sigma {:.6}  delta {:.3e}  eta {:.3e}  p {:.8}", led.kappa, led.sigma, led.delta, led.eta, led.p);
    for c in &led.conditions {
        println!("  {:<12} {:>12.4e} vs {:>12.4e}  {}", c.name, c.lhs, c.rhs, if c.holds { "holds" } else { "FAILS" });
    }

    // Stopping the eta search early leaves no admissible choice.
    let cut = LedgerOptions { max_k: 2, ..LedgerOptions::default() };
    match choose_constants(&sp, o, 1.0, 0.5, true, &cut) {
        Ok(_) => println!("unexpectedly feasible"),
        Err(e) => println!("truncated search: {e}"),
    }
    Ok(())
}
