use hardy_lab::space::{
    build_patchwork, maximal_net, verify_ahlfors, AhlforsMode, DiscreteSpace, Field, SpaceSpec, Topology,
};
use proptest::prelude::*;

fn space(topology: Topology, dim: usize, lower: f64, extent: f64, spacing: f64) -> DiscreteSpace {
    DiscreteSpace::build(&SpaceSpec { topology, dim, lower, extent, spacing }).unwrap()
}

#[test]
fn unit_grid_points_and_weights() {
    let s = space(Topology::Grid, 1, 0.0, 1.0, 1.0 / 256.0);
    assert_eq!(s.len(), 257);
    assert!(s.weights().iter().all(|w| *w == 1.0 / 256.0));
}

#[test]
fn torus_distance_wraps() {
    let s = space(Topology::Torus, 1, 0.0, 1.0, 1.0 / 128.0);
    let (a, b) = (s.nearest(&[0.0]).unwrap(), s.nearest(&[0.75]).unwrap());
    assert!((s.dist(a, b) - 0.25).abs() < 1e-15);
}

#[test]
fn square_grid_total_measure() {
    let s = space(Topology::Grid, 2, 0.0, 1.0, 1.0 / 64.0);
    // 65 x 65 cells of area 1/64^2.
    let expected = (65.0f64 / 64.0).powi(2);
    assert!((s.total_measure() - expected).abs() < 1e-12);
    assert!((s.total_measure() - 1.032).abs() < 1e-3);
}

#[test]
fn circle_ahlfors_constant() {
    let s = space(Topology::Torus, 1, 0.0, 1.0, 1.0 / 256.0);
    let radii: Vec<f64> = (0..=16).map(|k| 1.0 / 16.0 * 4f64.powf(k as f64 / 16.0)).collect();
    let rep = verify_ahlfors(&s, &AhlforsMode::Sampled(radii.clone()), None);
    assert!(rep.certified);
    assert!(rep.fitted_a <= 2.2, "{}", rep.fitted_a);
    // Independent count: m(B(x, r)) = (2 floor(r/h) + 1) h.
    let h = 1.0 / 256.0;
    let worst = radii
        .iter()
        .map(|&r| {
            let m = (2.0 * (r / h + 1e-9).floor() + 1.0) * h;
            (m / r).max(r / m)
        })
        .fold(0.0, f64::max);
    assert!((rep.fitted_a - worst).abs() < 1e-9, "{} vs {worst}", rep.fitted_a);
}

#[test]
fn single_point_is_not_regular() {
    let s = DiscreteSpace::from_table(vec![vec![0.0]], vec![1.0], None, 1.0).unwrap();
    let rep = verify_ahlfors(&s, &AhlforsMode::Sampled(vec![0.25]), None);
    assert!(!rep.certified);
}

#[test]
fn lattice_disc_is_close_to_pi() {
    let s = space(Topology::Grid, 2, 0.0, 1.0, 1.0 / 64.0);
    let r = 0.125;
    for c in [[0.5, 0.5], [0.4, 0.6], [0.3, 0.3]] {
        let x = s.nearest(&c).unwrap();
        let ratio = s.ball_measure(x, r) / (r * r);
        assert!((ratio / std::f64::consts::PI - 1.0).abs() < 0.1, "{ratio}");
    }
}

#[test]
fn one_point_net() {
    let s = DiscreteSpace::from_table(vec![vec![0.0]], vec![1.0], None, 1.0).unwrap();
    let net = maximal_net(&s, 0, 0.25, 1.0, &Field::constant(1, 1.0)).unwrap();
    assert_eq!(net.centers, vec![0]);
}

#[test]
fn net_covers_and_overlap_is_exact() {
    let s = space(Topology::Grid, 1, 0.0, 1.0, 1.0 / 256.0);
    let (t, a) = (0.125, 1.0);
    let net = maximal_net(&s, 0, t, a, &Field::constant(s.len(), 1.0)).unwrap();
    let d = |x| 1.0 + s.dist(0, x);
    // Every x with d(x) <= 4 is within a t d(x_j) of a center.
    for x in 0..s.len() {
        if d(x) <= 4.0 {
            assert!(net.centers.iter().any(|&c| s.dist(x, c) <= a * t * d(c) + 1e-12), "x = {x}");
        }
    }
    let overlap = (0..s.len())
        .map(|x| net.centers.iter().filter(|&&c| s.dist(x, c) <= t * d(c)).count())
        .max()
        .unwrap();
    assert_eq!(net.overlap, overlap);
    assert!(net.covered);
}

#[test]
fn spike_weight_average_constant_matches_recomputation() {
    let s = space(Topology::Grid, 1, 0.0, 1.0, 1.0 / 256.0);
    let spike = 128;
    let g = Field::from_fn(&s, |x| if x == spike { 100.0 } else { 1.0 });
    let t = 0.125;
    let net = maximal_net(&s, 0, t, 1.0, &g).unwrap();
    let mut worst: f64 = 0.0;
    for &c in &net.centers {
        let r = t * (1.0 + s.dist(0, c));
        let (mut num, mut den) = (0.0, 0.0);
        for y in 0..s.len() {
            if s.dist(c, y) <= r {
                num += g.get(y) * s.weight(y);
                den += s.weight(y);
            }
        }
        worst = worst.max(g.get(c) / (num / den));
    }
    assert!((net.average_constant - worst).abs() < 1e-9, "{} vs {worst}", net.average_constant);
    assert!(!net.centers.contains(&spike));
}

#[test]
fn patchwork_partition_and_color_separation() {
    let s = space(Topology::Grid, 1, 0.0, 1.0, 1.0 / 256.0);
    let kappa = 0.125;
    let pw = build_patchwork(&s, kappa).unwrap();
    for x in 0..s.len() {
        let total: f64 = pw.cutoffs.iter().map(|c| c.get(x)).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
    for i in 0..pw.centers.len() {
        for j in 0..i {
            if pw.colors[i] == pw.colors[j] {
                assert!(s.dist(pw.centers[i], pw.centers[j]) >= 4.0 * kappa - 1e-12);
            }
        }
    }
}

#[test]
fn small_space_is_one_patch() {
    let s = space(Topology::Grid, 1, 0.0, 0.125, 1.0 / 256.0);
    let pw = build_patchwork(&s, 0.5).unwrap();
    assert_eq!(pw.centers.len(), 1);
    assert!(pw.cutoffs[0].values().iter().all(|v| (*v - 1.0).abs() < 1e-15));
}

#[test]
fn color_count_bounded_under_refinement() {
    // Centers are kappa/3-separated, so at most 2 * 4kappa / (kappa/3) + 1 = 25
    // of them are close enough to need distinct colors.
    for cells in [128.0, 256.0, 512.0] {
        let pw = build_patchwork(&space(Topology::Torus, 1, 0.0, 1.0, 1.0 / cells), 0.1).unwrap();
        assert!(pw.n_colors <= 25, "{cells}: {}", pw.n_colors);
    }
}

proptest! {
    #[test]
    fn torus_metric_axioms(i in 0usize..1024, j in 0usize..1024, k in 0usize..1024) {
        let s = space(Topology::Torus, 2, 0.0, 1.0, 1.0 / 32.0);
        let (i, j, k) = (i % s.len(), j % s.len(), k % s.len());
        prop_assert!((s.dist(i, j) - s.dist(j, i)).abs() < 1e-15);
        prop_assert!(s.dist(i, k) <= s.dist(i, j) + s.dist(j, k) + 1e-12);
        prop_assert_eq!(s.dist(i, i), 0.0);
        prop_assert!(s.dist(i, j) <= std::f64::consts::SQRT_2 / 2.0 + 1e-12);
    }

    #[test]
    fn ball_measure_is_monotone(x in 0usize..129, r in 0.0f64..1.0, dr in 0.0f64..0.5) {
        let s = space(Topology::Grid, 1, 0.0, 1.0, 1.0 / 128.0);
        prop_assert!(s.ball_measure(x, r) <= s.ball_measure(x, r + dr));
        prop_assert!(s.ball_measure(x, r) >= s.weight(x));
    }

    #[test]
    fn weights_comparable_on_grid(o in 0usize..129, x in 0usize..129, y in 0usize..129) {
        let s = space(Topology::Grid, 1, 0.0, 1.0, 1.0 / 128.0);
        prop_assert!(s.weight_comparable(o, x, y));
    }
}
