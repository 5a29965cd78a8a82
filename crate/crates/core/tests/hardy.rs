use hardy_lab::hardy::{
    atom_maximal_suite, atom_to_ion, hardy_norm_estimate, random_atom, validate_atom, validate_ion, Atom, AtomSuiteOptions,
    AtomVerdict, BallRef, Flavor, IonVerdict, PushforwardSpec, Rejection,
};
use hardy_lab::kernels::{make_kernel, split_ai, KernelSpec, Profile};
use hardy_lab::maximal::radial_maximal;
use hardy_lab::rng::stream;
use hardy_lab::space::{build_patchwork, DiscreteSpace, Field, SpaceSpec, Topology};
use hardy_lab::Error;
use std::sync::Arc;

const INF: f64 = f64::INFINITY;

fn grid(lower: f64, extent: f64, spacing: f64) -> Arc<DiscreteSpace> {
    Arc::new(DiscreteSpace::build(&SpaceSpec { topology: Topology::Grid, dim: 1, lower, extent, spacing }).unwrap())
}

fn indicator(sp: &DiscreteSpace, c: usize, r: f64, height: f64) -> Field {
    Field::from_fn(sp, |x| if sp.dist(c, x) <= r { height } else { 0.0 })
}

fn dipole(sp: &DiscreteSpace, c: usize, r: f64) -> Field {
    let m = sp.ball_measure(c, r);
    let xc = sp.coords(c)[0];
    Field::from_fn(sp, |x| if sp.dist(c, x) <= r { (sp.coords(x)[0] - xc).signum() * (x != c) as u8 as f64 / m } else { 0.0 })
}

#[test]
fn dipole_is_a_standard_atom() {
    let sp = grid(-1.0, 2.0, 1.0 / 128.0);
    let c = sp.nearest(&[0.0]).unwrap();
    let a = dipole(&sp, c, 0.1);
    assert!(a.integral(&sp).abs() < 1e-15);
    assert_eq!(validate_atom(&sp, &a, BallRef { center: c, radius: 0.1 }, 0.25, INF).unwrap(), AtomVerdict::Standard);
    // Too large by a factor of two.
    match validate_atom(&sp, &a.scale(2.0), BallRef { center: c, radius: 0.1 }, 0.25, INF).unwrap() {
        AtomVerdict::Reject(r) => assert!(matches!(r[0], Rejection::Size { .. })),
        v => panic!("{v:?}"),
    }
    // Support must lie in the ball.
    match validate_atom(&sp, &a, BallRef { center: c, radius: 0.05 }, 0.25, INF).unwrap() {
        AtomVerdict::Reject(r) => assert!(r.iter().any(|r| matches!(r, Rejection::Support { .. }))),
        v => panic!("{v:?}"),
    }
}

#[test]
fn normalized_indicators() {
    let sp = grid(-1.0, 2.0, 1.0 / 128.0);
    let c = sp.nearest(&[0.0]).unwrap();
    let s = 0.25;
    let a = indicator(&sp, c, s, 1.0 / sp.ball_measure(c, s));
    assert_eq!(validate_atom(&sp, &a, BallRef { center: c, radius: s }, s, INF).unwrap(), AtomVerdict::Global);
    let b = indicator(&sp, c, s / 2.0, 1.0 / sp.ball_measure(c, s / 2.0));
    match validate_atom(&sp, &b, BallRef { center: c, radius: s / 2.0 }, s, INF).unwrap() {
        AtomVerdict::Reject(r) => {
            assert!(r.iter().any(|r| matches!(r, Rejection::Cancellation { .. })));
            assert!(r.iter().any(|r| matches!(r, Rejection::Radius { .. })));
        }
        v => panic!("{v:?}"),
    }
    // Finite exponent: the L^2 size limit of a normalized indicator is attained.
    assert_eq!(validate_atom(&sp, &a, BallRef { center: c, radius: s }, s, 2.0).unwrap(), AtomVerdict::Global);
    assert!(matches!(validate_atom(&sp, &a, BallRef { center: c, radius: s }, s, 1.0).unwrap(), AtomVerdict::Reject(_)));
}

#[test]
fn ion_mean_limit() {
    let sp = grid(-1.0, 2.0, 1.0 / 128.0);
    let c = sp.nearest(&[0.2]).unwrap();
    let (r, s) = (0.125, 0.25);
    let m = sp.ball_measure(c, r);
    let ball = BallRef { center: c, radius: r };
    let g = indicator(&sp, c, r, r / m);
    assert!((g.integral(&sp) - r).abs() < 1e-14);
    assert_eq!(validate_ion(&sp, &g, ball, s, INF).unwrap(), IonVerdict::Ion);
    match validate_ion(&sp, &g.scale(2.0), ball, s, INF).unwrap() {
        IonVerdict::Reject(v) => assert!(matches!(v[..], [Rejection::Mean { .. }])),
        v => panic!("{v:?}"),
    }
    // Radius above the scale.
    match validate_ion(&sp, &g, ball, r / 2.0, INF).unwrap() {
        IonVerdict::Reject(v) => assert!(v.iter().any(|r| matches!(r, Rejection::Radius { .. }))),
        v => panic!("{v:?}"),
    }
}

#[test]
fn identity_pushforward() {
    let sp = grid(-1.0, 2.0, 1.0 / 128.0);
    let c = sp.nearest(&[0.0]).unwrap();
    let s = 0.25;
    let atom = Atom { values: dipole(&sp, c, 0.1), ball: BallRef { center: c, radius: 0.1 }, scale: s, p: INF, flavor: Flavor::Standard };
    let spec = PushforwardSpec::identity(sp.clone(), Field::constant(sp.len(), 1.0), 1.0).unwrap();
    assert!(spec.audit().within);
    // The default threshold is the unit-scale one, too small for s < 1.
    assert!(matches!(atom_to_ion(&atom, &spec), Err(Error::HBelowThreshold { .. })));
    let h = spec.threshold(s, INF);
    assert!((h - 1.0 / s).abs() < 1e-12);
    let (ion, verdict) = atom_to_ion(&atom, &spec.with_h(h)).unwrap();
    assert_eq!(verdict, IonVerdict::Ion);
    assert_eq!(ion.ball, atom.ball);
    assert!(ion.values.sub(&atom.values.scale(1.0 / h)).sup_norm() < 1e-15);
}

#[test]
fn dilation_doubles_scale_and_radius() {
    let src = grid(-1.0, 2.0, 1.0 / 128.0);
    let tgt = grid(-2.0, 4.0, 1.0 / 64.0);
    let c = src.nearest(&[0.25]).unwrap();
    let (r, s) = (0.0625, 0.125);
    let atom = Atom { values: dipole(&src, c, r), ball: BallRef { center: c, radius: r }, scale: s, p: INF, flavor: Flavor::Standard };
    let spec = PushforwardSpec::dilation(src.clone(), tgt.clone(), 2.0, &[0.0], &[0.0], Field::constant(src.len(), 1.0), 1.0).unwrap();
    let audit = spec.audit();
    assert!(audit.within, "{audit:?}");
    // Source cells are half the size of target cells.
    assert!((audit.rho_max - 0.5).abs() < 1e-12);
    let h = spec.threshold(s, INF);
    let (ion, verdict) = atom_to_ion(&atom, &spec.with_h(h)).unwrap();
    assert_eq!(verdict, IonVerdict::Ion);
    assert!((ion.ball.radius - 2.0 * r).abs() < 1e-15);
    assert!((ion.scale - 2.0 * s).abs() < 1e-15);
    assert!((tgt.coords(ion.ball.center)[0] - 0.5).abs() < 1e-12);
    assert!(ion.mean.abs() < 1e-12);
}

#[test]
fn patchwork_multiplier_keeps_the_mean_small() {
    let sp = grid(-1.0, 2.0, 1.0 / 128.0);
    let pw = build_patchwork(&sp, 0.25).unwrap();
    let mut rng = stream(9, "hardy-test", 0);
    let all: Vec<usize> = (0..sp.len()).collect();
    for (p, phi) in pw.cutoffs.iter().enumerate() {
        let l = pw.lipschitz[p].max(phi.sup_norm()).max(1.0);
        let spec = PushforwardSpec::identity(sp.clone(), phi.clone(), l).unwrap();
        for _ in 0..5 {
            let atom = random_atom(&sp, 0.125, 4.0 / 128.0, Flavor::Standard, &all, &mut rng);
            let h = spec.threshold(atom.scale, atom.p);
            let (ion, verdict) = atom_to_ion(&atom, &spec.clone().with_h(h)).unwrap();
            assert_eq!(verdict, IonVerdict::Ion, "patch {p}");
            // |int phi a| = |int (phi - phi(c)) a| <= L r ||a||_1 <= L r.
            assert!(ion.mean.abs() <= l * atom.ball.radius / h + 1e-12);
        }
    }
}

#[test]
fn surrogate_of_zero_and_of_shrinking_indicators() {
    let sp = grid(-2.0, 4.0, 1.0 / 512.0);
    let k = make_kernel(sp.clone(), &KernelSpec::Bump { profile: Profile::triangle(), gamma: 1.0 }).unwrap();
    let z = hardy_norm_estimate(&Field::zeros(sp.len()), &k).unwrap();
    assert_eq!(z.total, 0.0);
    let c = sp.nearest(&[0.0]).unwrap();
    let mut prev = None;
    let mut steps = Vec::new();
    for r in [1.0 / 8.0, 1.0 / 32.0, 1.0 / 128.0] {
        let f = indicator(&sp, c, r, 1.0 / sp.ball_measure(c, r));
        let e = hardy_norm_estimate(&f, &k).unwrap();
        assert!((e.l1 - 1.0).abs() < 1e-12);
        assert!((e.total - e.l1 - e.maximal_l1).abs() < 1e-15);
        if let Some(p) = prev {
            steps.push(e.total - p);
        }
        prev = Some(e.total);
    }
    // Logarithmic growth: equal increments per factor 4 in r, up to discretisation.
    assert!(steps.iter().all(|s| *s > 0.0));
    assert!((steps[1] / steps[0] - 1.0).abs() < 0.25, "{steps:?}");
}

#[test]
fn atom_suite_support_and_tail() {
    let sp = grid(-2.0, 4.0, 1.0 / 128.0);
    let bump = make_kernel(sp.clone(), &KernelSpec::Bump { profile: Profile::triangle(), gamma: 1.0 }).unwrap();
    let opts = AtomSuiteOptions { count: 12, center_radius: Some(0.5), ..AtomSuiteOptions::default() };
    let rep = atom_maximal_suite(&bump, 1.0, &opts, None).unwrap();
    assert_eq!(rep.records.len(), 12);
    assert_eq!(rep.support_violations, 0);
    assert!(rep.max_total.is_finite() && rep.max_total > 0.0);
    for rec in &rep.records {
        assert!((rec.total - rec.inner - rec.outer).abs() < 1e-12);
    }

    let poisson = make_kernel(sp.clone(), &KernelSpec::PoissonModel).unwrap();
    let split = split_ai(&poisson, 0.5).unwrap();
    let rep = atom_maximal_suite(&poisson, 1.0, &opts, Some(&split)).unwrap();
    let worst = rep.max_tail_ratio.unwrap();
    assert!(worst <= 1.0 + 1e-12, "{worst}");

    // Changing the seed changes the atoms.
    let other = atom_maximal_suite(&bump, 1.0, &AtomSuiteOptions { seed: 1, ..opts }, None).unwrap();
    assert_ne!(other.records[0].center, rep.records[0].center);
}

#[test]
fn global_atom_maximal_is_supported_near_the_ball() {
    let sp = grid(-2.0, 4.0, 1.0 / 128.0);
    let k = make_kernel(sp.clone(), &KernelSpec::Bump { profile: Profile::triangle(), gamma: 1.0 }).unwrap();
    let c = sp.nearest(&[0.0]).unwrap();
    let s = 0.25;
    let a = indicator(&sp, c, s, 1.0 / sp.ball_measure(c, s));
    let km = radial_maximal(&k, &a, 0.0).unwrap().values;
    for x in 0..sp.len() {
        if sp.dist(c, x) > s + 1.0 + 1e-9 {
            assert_eq!(km.get(x), 0.0);
        }
    }
}
