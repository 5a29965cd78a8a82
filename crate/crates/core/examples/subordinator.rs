//! Stable subordinator densities and the Laplace identity they satisfy.
use hardy_lab::kernels::{laplace_check, subordinator_density};

fn main() -> hardy_lab::Result<()> {
    for s in [0.01f64, 0.1, 1.0, 10.0, 100.0] {
        let exact = (-0.25 / s).exp() / (2.0 * std::f64::consts::PI.sqrt() * s.sqrt());
        let v = subordinator_density(0.5, s)?;
        println!("F_1/2({s:>6}) = {v:.12}  closed form {exact:.12}");
    }
    for alpha in [0.3, 0.5, 0.7] {
        let lc = laplace_check(alpha, &[0.5, 1.0, 2.0])?;
        println!("alpha {alpha}: Laplace residuals {:?}", lc.residual);
    }
    Ok(())
}
