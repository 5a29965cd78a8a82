use hardy_lab::decomposition::{
    calibrate_sum_constant, choose_constants, kappa_of, majorization_check, reconstruct, rho_of, sigma_of,
    uchiyama_decompose, LedgerOptions, ResolutionPolicy,
};
use hardy_lab::Error;
use hardy_lab::kernels::{make_kernel, verify_lai, Budget, Kernel, KernelSpec, Profile};
use hardy_lab::maximal::cutoff_family;
use hardy_lab::space::{maximal_net, DiscreteSpace, Field, SpaceSpec, Topology};
use hardy_lab::suites::random_piecewise;
use std::sync::Arc;

fn line(spacing: f64) -> Arc<DiscreteSpace> {
    Arc::new(DiscreteSpace::build(&SpaceSpec { topology: Topology::Grid, dim: 1, lower: -1.0, extent: 2.0, spacing }).unwrap())
}

/// Triangle bump rescaled to its certified form, with its diagonal constant.
fn certified_bump(sp: &Arc<DiscreteSpace>) -> (Kernel, f64) {
    let raw = make_kernel(sp.clone(), &KernelSpec::Bump { profile: Profile::triangle(), gamma: 1.0 }).unwrap();
    let fit = verify_lai(&raw, 1.0, Some(1.0), &Budget::default());
    assert!(fit.certified);
    (raw.scaled(fit.scale), fit.c)
}

#[test]
fn closed_form_constants() {
    assert!((kappa_of(0.25, 1.0, 1.0) - 2f64.powf(4.5)).abs() < 1e-12);
    let sigma = 1.0 / (2.0 * (32.0 + 2.0 / 3.0));
    assert!((sigma_of(1.0, 1.0) - sigma).abs() < 1e-15);
    assert!((sigma_of(0.0, 1.0) - 3.0 / 52.0).abs() < 1e-15);
    // rho solves eta^{D rho} = 1 - delta.
    let (delta, eta) = (2.4e-4, 1.0 / 256.0);
    let rho = rho_of(delta, eta, 1.0);
    assert!((eta.powf(rho) - (1.0 - delta)).abs() < 1e-14);
}

#[test]
fn calibration_without_nets_is_floored_at_one() {
    let sp = line(1.0 / 64.0);
    let o = sp.nearest(&[0.0]).unwrap();
    let cal = calibrate_sum_constant(&sp, o, 0.5, 1.0, &[], &LedgerOptions::default()).unwrap();
    assert_eq!(cal.value, 1.0);
    assert!(calibrate_sum_constant(&sp, o, 1.0, 0.5, &[], &LedgerOptions::default()).is_err());
}

#[test]
fn calibration_matches_brute_force() {
    let sp = line(1.0 / 64.0);
    let o = sp.nearest(&[0.0]).unwrap();
    let (a, b, t) = (0.5, 1.0, 0.125);
    let net = maximal_net(&sp, o, t, 0.25, &Field::constant(sp.len(), 1.0)).unwrap();
    let hs = vec![0.0, 1.0, 4.0];
    let opts = LedgerOptions { safety: 1.0, h_samples: hs.clone(), ..LedgerOptions::default() };
    let cal = calibrate_sum_constant(&sp, o, a, b, std::slice::from_ref(&net), &opts).unwrap();

    let dw = |x| 1.0 + sp.dist(o, x);
    let mut worst: f64 = 0.0;
    for x in 0..sp.len() {
        for &h in &hs {
            let mut lhs = 0.0;
            for &c in &net.centers {
                let q = sp.dist(c, x) / (t * dw(c));
                if q >= h {
                    lhs += dw(c).powf(-1.0 - a) * (1.0 + q).powf(-1.0 - b);
                }
            }
            worst = worst.max(lhs / (dw(x).powf(-1.0 - a) * t.powf(b).max((1.0 + h).powf(-b))));
        }
        if t * dw(x) >= 2.0 {
            let lhs: f64 = net
                .centers
                .iter()
                .filter(|&&c| t * dw(c) <= 1.0)
                .map(|&c| dw(c).powf(-1.0 - a) * (1.0 + sp.dist(c, x) / (t * dw(c))).powf(-1.0 - b))
                .sum();
            worst = worst.max(lhs / (dw(x).powf(-1.0 - b) * t.powf(a)));
        }
    }
    assert!((cal.per_scale[0].1 - worst).abs() <= 1e-12 * worst, "{} vs {worst}", cal.per_scale[0].1);
    assert_eq!(cal.value, worst.max(1.0));

    // More thresholds can only raise the fit.
    let fewer = LedgerOptions { h_samples: vec![0.0], ..opts };
    let cal0 = calibrate_sum_constant(&sp, o, a, b, std::slice::from_ref(&net), &fewer).unwrap();
    assert!(cal0.per_scale[0].1 <= cal.per_scale[0].1);
}

#[test]
fn nominal_ledger_constants() {
    let sp = line(1.0 / 128.0);
    let o = sp.nearest(&[0.0]).unwrap();
    let led = choose_constants(&sp, o, 1.0, 0.5, true, &LedgerOptions::default()).unwrap();
    assert!(led.feasible());
    assert!((led.kappa - 2f64.powf(4.5)).abs() < 1e-12);
    assert!((led.sigma - sigma_of(1.0, 1.0)).abs() < 1e-15);
    assert!(led.conditions.iter().all(|c| c.holds));
    // eta is dyadic.
    assert_eq!(led.eta.log2().fract(), 0.0);
    assert!(led.delta > 0.0 && led.delta <= 0.25);
    assert!(led.l >= 1.0);
}

#[test]
fn capped_dyadic_search_fails_on_cond8() {
    let sp = line(1.0 / 128.0);
    let o = sp.nearest(&[0.0]).unwrap();
    let opts = LedgerOptions { max_k: 2, ..LedgerOptions::default() };
    match choose_constants(&sp, o, 1.0, 0.5, true, &opts) {
        Err(Error::Infeasible { binding, .. }) => assert_eq!(binding, "cond8"),
        other => panic!("expected an infeasible ledger, got {:?}", other.map(|l| l.eta)),
    }
}

#[test]
fn ledger_rejects_bad_inputs() {
    let sp = line(1.0 / 64.0);
    let o = sp.nearest(&[0.0]).unwrap();
    assert!(choose_constants(&sp, o, 0.0, 0.5, true, &LedgerOptions::default()).is_err());
    assert!(choose_constants(&sp, o, 1.0, 1.5, true, &LedgerOptions::default()).is_err());
}

#[test]
fn decomposition_pipeline() {
    let sp = line(1.0 / 128.0);
    let o = sp.nearest(&[0.0]).unwrap();
    let (kernel, c) = certified_bump(&sp);
    let led = choose_constants(&sp, o, 1.0, c, false, &LedgerOptions::default()).unwrap();
    assert!(led.feasible());
    let phi = cutoff_family(&sp, o, 1.0).into_iter().next().unwrap().1;
    let f = random_piecewise(&sp, -1.0, 1.0, 7, 0);

    // Zero levels reconstruct nothing.
    let dec = uchiyama_decompose(&phi, &kernel, &led, &f, 0, ResolutionPolicy::Discrete).unwrap();
    let (sum, residual, rep) = reconstruct(&dec, &kernel).unwrap();
    assert_eq!(sum.sup_norm(), 0.0);
    assert_eq!(residual, *dec.phi0());
    assert_eq!(rep.levels, 0);

    // The zero cutoff stays zero.
    let zero = Field::zeros(sp.len());
    let dec = uchiyama_decompose(&zero, &kernel, &led, &f, 3, ResolutionPolicy::Discrete).unwrap();
    assert!(dec.residuals.iter().all(|r| r.sup_norm() == 0.0));

    let n = 20;
    let dec = uchiyama_decompose(&phi, &kernel, &led, &f, n, ResolutionPolicy::Discrete).unwrap();
    assert_eq!(dec.depth(), n);
    assert!(dec.bound_holds());
    let (_, _, rep) = reconstruct(&dec, &kernel).unwrap();
    assert!(rep.bound_holds, "{} > {}", rep.residual_sup, rep.bound);
    assert!(rep.identity_error <= 1e-12);
    assert!(rep.coefficient_error <= 1e-12);
    for l in &dec.levels {
        assert!(l.audit.max_time <= 1.0);
        assert_eq!(l.audit.sign_violations, 0);
        assert!(l.audit.overlap_ok);
        assert_eq!(l.coefficients.len(), l.centers.len());
    }

    // Strict resolution refuses levels below the grid.
    if let Some(depth) = led.resolvable_depth(sp.resolution()) {
        let strict = uchiyama_decompose(&phi, &kernel, &led, &f, depth + 2, ResolutionPolicy::Strict);
        assert!(strict.is_err() || strict.unwrap().depth() <= depth);
    }
}

#[test]
fn majorization_skips_zero_functions() {
    let sp = line(1.0 / 64.0);
    let o = sp.nearest(&[0.0]).unwrap();
    let (kernel, c) = certified_bump(&sp);
    let led = choose_constants(&sp, o, 1.0, c, false, &LedgerOptions::default()).unwrap();
    let family = cutoff_family(&sp, o, 1.0);
    let samples = vec![Field::zeros(sp.len()), random_piecewise(&sp, -1.0, 1.0, 1, 0)];
    let rep = majorization_check(&kernel, &led, &family, &samples, None).unwrap();
    assert_eq!(rep.skipped, 1);
    assert!(rep.samples[0].ratio.is_none());
    let r = rep.samples[1].ratio.unwrap();
    assert!(r.is_finite() && r > 0.0);
    assert!(rep.e_emp >= r);
}
