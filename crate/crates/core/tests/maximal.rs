use hardy_lab::kernels::{make_kernel, KernelSpec, Profile};
use hardy_lab::maximal::{
    apply_kernel, grand_maximal_at, hl_maximal, lp_best, radial_maximal, riesz_potential, GrandMethod, GrandOptions,
};
use hardy_lab::space::{DiscreteSpace, Field, SpaceSpec, Topology};
use hardy_lab::suites::random_piecewise;
use proptest::prelude::*;
use std::sync::Arc;

fn space(topology: Topology, dim: usize, lower: f64, extent: f64, spacing: f64) -> Arc<DiscreteSpace> {
    Arc::new(DiscreteSpace::build(&SpaceSpec { topology, dim, lower, extent, spacing }).unwrap())
}

#[test]
fn heat_preserves_constants() {
    let sp = space(Topology::Torus, 1, 0.0, 1.0, 1.0 / 128.0);
    let k = make_kernel(sp.clone(), &KernelSpec::HeatTorus).unwrap();
    for t in [0.05, 0.3, 1.0] {
        let v = apply_kernel(&k, t, &Field::constant(sp.len(), 1.0)).unwrap();
        assert!(v.values().iter().all(|x| (x - 1.0).abs() < 1e-10));
    }
}

#[test]
fn single_cell_gives_one_kernel_term() {
    let sp = space(Topology::Grid, 1, -1.0, 2.0, 1.0 / 64.0);
    let k = make_kernel(sp.clone(), &KernelSpec::PoissonModel).unwrap();
    let y0 = 40;
    let f = Field::from_fn(&sp, |x| (x == y0) as u8 as f64);
    let t = 0.2;
    let v = apply_kernel(&k, t, &f).unwrap();
    for x in 0..sp.len() {
        assert!((v.get(x) - k.eval(t, x, y0) * sp.weight(y0)).abs() < 1e-14);
    }
}

#[test]
fn bump_average_of_one() {
    let h = 1.0 / 512.0;
    let sp = space(Topology::Grid, 1, -2.0, 4.0, h);
    let k = make_kernel(sp.clone(), &KernelSpec::Bump { profile: Profile::triangle(), gamma: 1.0 }).unwrap();
    let one = Field::constant(sp.len(), 1.0);
    for t in [0.05, 0.25, 1.0] {
        let v = apply_kernel(&k, t, &one).unwrap();
        let x = sp.nearest(&[0.0]).unwrap();
        // Riemann sum of the unit-mass triangle: error O(h / t).
        assert!((v.get(x) - 1.0).abs() <= 2.0 * h / t, "t {t}: {}", v.get(x));
    }
}

#[test]
fn maximal_of_zero_is_zero() {
    let sp = space(Topology::Grid, 1, -1.0, 2.0, 1.0 / 64.0);
    let k = make_kernel(sp.clone(), &KernelSpec::PoissonModel).unwrap();
    let z = Field::zeros(sp.len());
    assert!(radial_maximal(&k, &z, 0.0).unwrap().values.values().iter().all(|v| *v == 0.0));
    assert!(riesz_potential(&sp, &z, 0.5).unwrap().values().iter().all(|v| *v == 0.0));
    let g = grand_maximal_at(&sp, &z, 1.0, 10, GrandMethod::LpExact, &GrandOptions::default()).unwrap();
    assert_eq!(g.value, 0.0);
}

#[test]
fn poisson_maximal_of_point_mass() {
    let h = 1.0 / 256.0;
    let sp = space(Topology::Grid, 1, -1.0, 2.0, h);
    let k = make_kernel(sp.clone(), &KernelSpec::PoissonModel).unwrap();
    let y0 = sp.nearest(&[-1.0]).unwrap();
    let f = Field::from_fn(&sp, |x| if x == y0 { 1.0 / sp.weight(x) } else { 0.0 });
    let m = radial_maximal(&k, &f, 0.0).unwrap();
    for x in 0..sp.len() {
        let d = sp.dist(x, y0);
        if (16.0 * h..=1.0).contains(&d) {
            // The optimum t = d sits between two nodes of ratio 2^{1/8}.
            let exact = 1.0 / (2.0 * d);
            assert!((m.values.get(x) / exact - 1.0).abs() < 2e-3, "d {d}: {}", m.values.get(x));
        }
    }
}

#[test]
fn heat_maximal_dominates_unit_scale() {
    let sp = space(Topology::Torus, 1, 0.0, 1.0, 1.0 / 128.0);
    let k = make_kernel(sp.clone(), &KernelSpec::HeatTorus).unwrap();
    let f = random_piecewise(&sp, 0.0, 1.0, 1, 0).map(f64::abs);
    let m = radial_maximal(&k, &f, 0.0).unwrap().values;
    let k1 = apply_kernel(&k, 1.0, &f).unwrap();
    for x in 0..sp.len() {
        assert!(m.get(x) >= k1.get(x) - 1e-14);
    }
}

#[test]
fn hl_of_constant_and_of_one_cell() {
    let h = 1.0 / 256.0;
    let sp = space(Topology::Grid, 1, -1.0, 2.0, h);
    let c = Field::constant(sp.len(), -2.5);
    assert!(hl_maximal(&sp, &c, 1.0).unwrap().values().iter().all(|v| (v - 2.5).abs() < 1e-12));

    let y0 = sp.nearest(&[0.0]).unwrap();
    let f = Field::from_fn(&sp, |x| (x == y0) as u8 as f64);
    let m = hl_maximal(&sp, &f, 1.0).unwrap();
    for x in 0..sp.len() {
        let d = sp.dist(x, y0);
        if (8.0 * h..=0.45).contains(&d) {
            // Balls of radius 2d stay inside the grid, so the best ball just reaches y0.
            let approx = h / (2.0 * d);
            assert!((m.get(x) / approx - 1.0).abs() < 0.1, "d {d}: {} vs {approx}", m.get(x));
        }
    }
}

#[test]
fn kernel_maximal_bounded_by_hl() {
    let sp = space(Topology::Grid, 1, -1.0, 2.0, 1.0 / 128.0);
    let k = make_kernel(sp.clone(), &KernelSpec::Bump { profile: Profile::triangle(), gamma: 1.0 }).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let f = random_piecewise(&sp, -1.0, 1.0, 4, i);
        let kf = radial_maximal(&k, &f, 0.0).unwrap().values;
        let m = hl_maximal(&sp, &f, 1.0).unwrap();
        for x in 0..sp.len() {
            if m.get(x) > 0.0 {
                worst = worst.max(kf.get(x) / m.get(x));
            }
        }
    }
    // The unit-mass triangle is at most 2 times the indicator average.
    assert!(worst.is_finite() && worst <= 2.0 + 1e-9, "{worst}");
}

#[test]
fn riesz_potential_in_one_and_two_dimensions() {
    let sp = space(Topology::Grid, 1, -1.0, 2.0, 1.0 / 64.0);
    let f = random_piecewise(&sp, -1.0, 1.0, 2, 0);
    let lam = 0.3;
    let i = riesz_potential(&sp, &f, lam).unwrap();
    for x in (0..sp.len()).step_by(9) {
        let direct: f64 = (0..sp.len()).filter(|&y| sp.dist(x, y) <= lam).map(|y| f.get(y).abs() * sp.weight(y)).sum();
        assert!((i.get(x) - direct).abs() < 1e-12);
    }

    let sq = space(Topology::Grid, 2, 0.0, 1.0, 1.0 / 32.0);
    let y0 = sq.nearest(&[0.5, 0.5]).unwrap();
    let w = sq.weight(y0);
    let f = Field::from_fn(&sq, |x| (x == y0) as u8 as f64);
    let i = riesz_potential(&sq, &f, 0.25).unwrap();
    for x in 0..sq.len() {
        let d = sq.dist(x, y0);
        if d > 0.0 && d <= 0.25 {
            assert!((i.get(x) - w / d).abs() < 1e-12);
        }
    }
}

#[test]
fn lp_beats_the_explicit_cone_value() {
    let sp = space(Topology::Grid, 1, -1.0, 2.0, 1.0 / 64.0);
    let o = sp.nearest(&[0.0]).unwrap();
    let r0 = 0.25;
    let f = Field::from_fn(&sp, |x| (1.0 - sp.dist(x, o) / r0).max(0.0));
    let integral = f.integral(&sp);
    for (r, gamma) in [(0.3, 1.0), (0.5, 1.0), (0.5, 0.5)] {
        let lp = lp_best(&sp, &f, o, r, gamma, false).unwrap();
        let floor = r.powf(-1.0) * integral * (1.0 - (r0 / r).powf(gamma));
        assert!(lp >= floor - 1e-12, "r {r}: {lp} < {floor}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn candidate_never_exceeds_lp(seed in 0u64..1000, cells in 16usize..48, xi in 0usize..48, half in proptest::bool::ANY) {
        let sp = space(Topology::Grid, 1, 0.0, 1.0, 1.0 / cells as f64);
        let x = xi % sp.len();
        let gamma = if half { 0.5 } else { 1.0 };
        let f = random_piecewise(&sp, 0.0, 1.0, seed, 0);
        let opts = GrandOptions::default();
        let cand = grand_maximal_at(&sp, &f, gamma, x, GrandMethod::CandidateFamily, &opts).unwrap();
        let lp = grand_maximal_at(&sp, &f, gamma, x, GrandMethod::LpExact, &opts).unwrap();
        prop_assert!(cand.value <= lp.value * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn kernel_action_is_linear(a in -3.0f64..3.0, seed in 0u64..100, t in 0.05f64..1.0) {
        let sp = space(Topology::Grid, 1, -1.0, 2.0, 1.0 / 32.0);
        let k = make_kernel(sp.clone(), &KernelSpec::PoissonModel).unwrap();
        let f = random_piecewise(&sp, -1.0, 1.0, seed, 0);
        let g = random_piecewise(&sp, -1.0, 1.0, seed, 1);
        let lhs = apply_kernel(&k, t, &f.scale(a).add(&g)).unwrap();
        let rhs = apply_kernel(&k, t, &f).unwrap().scale(a).add(&apply_kernel(&k, t, &g).unwrap());
        prop_assert!(lhs.sub(&rhs).sup_norm() < 1e-10);
    }

    #[test]
    fn maximal_functions_are_sublinear(seed in 0u64..100) {
        let sp = space(Topology::Grid, 1, -1.0, 2.0, 1.0 / 32.0);
        let k = make_kernel(sp.clone(), &KernelSpec::Bump { profile: Profile::triangle(), gamma: 1.0 }).unwrap();
        let f = random_piecewise(&sp, -1.0, 1.0, seed, 0);
        let g = random_piecewise(&sp, -1.0, 1.0, seed, 1);
        let kfg = radial_maximal(&k, &f.add(&g), 0.0).unwrap().values;
        let kf = radial_maximal(&k, &f, 0.0).unwrap().values;
        let kg = radial_maximal(&k, &g, 0.0).unwrap().values;
        let mfg = hl_maximal(&sp, &f.add(&g), 0.5).unwrap();
        let mf = hl_maximal(&sp, &f, 0.5).unwrap();
        let mg = hl_maximal(&sp, &g, 0.5).unwrap();
        for x in 0..sp.len() {
            prop_assert!(kfg.get(x) <= kf.get(x) + kg.get(x) + 1e-12);
            prop_assert!(mfg.get(x) <= mf.get(x) + mg.get(x) + 1e-12);
        }
    }
}
