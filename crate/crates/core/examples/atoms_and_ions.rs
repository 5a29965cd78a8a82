//! Validating atoms and ions, and carrying an atom to an ion through a
//! dilation.
use hardy_lab::hardy::{atom_to_ion, validate_atom, validate_ion, Atom, BallRef, Flavor, PushforwardSpec};
use hardy_lab::space::{DiscreteSpace, Field, SpaceSpec, Topology};
use std::sync::Arc;

fn main() -> hardy_lab::Result<()> {
    let sp = Arc::new(DiscreteSpace::build(&SpaceSpec { topology: Topology::Grid, dim: 1, lower: -1.0, extent: 2.0, spacing: 1.0 / 256.0 })?);
    let c = sp.nearest(&[0.0])?;
    let r = 0.0625;
    let ball = BallRef { center: c, radius: r };
    let m = sp.ball_measure(c, r);
    let inside = |x| sp.dist(x, c) <= r;

    let dipole = Field::from_fn(&sp, |x| {
        let u = sp.coords(x)[0];
        if !inside(x) || u == 0.0 {
            0.0
        } else {
            u.signum() / m
        }
    });
    println!("dipole at scale 1/4: {:?}", validate_atom(&sp, &dipole, ball, 0.25, f64::INFINITY)?);
    let bump = Field::from_fn(&sp, |x| if inside(x) { 1.0 / m } else { 0.0 });
    println!("normalised indicator, r = s: {:?}", validate_atom(&sp, &bump, ball, r, f64::INFINITY)?);
    println!("normalised indicator, r = s/2: {:?}", validate_atom(&sp, &bump, ball, 2.0 * r, f64::INFINITY)?);
    println!("indicator scaled by r: {:?}", validate_ion(&sp, &bump.scale(r), ball, 0.25, f64::INFINITY)?);

    let target = Arc::new(DiscreteSpace::build(&SpaceSpec { topology: Topology::Grid, dim: 1, lower: -2.0, extent: 4.0, spacing: 1.0 / 256.0 })?);
    let spec = PushforwardSpec::dilation(sp.clone(), target, 2.0, &[0.0], &[0.0], Field::constant(sp.len(), 1.0), 1.0)?;
    println!("dilation audit: {:?}", spec.audit());
    let atom = Atom { values: dipole, ball, scale: 0.25, p: f64::INFINITY, flavor: Flavor::Standard };
    let (ion, verdict) = atom_to_ion(&atom, &spec)?;
    println!("transported: radius {} at scale {}, mean {:.2e}, {:?}", ion.ball.radius, ion.scale, ion.mean, verdict);
    Ok(())
}
