use super::Kernel;
use crate::grid;
use crate::rng;
use crate::space::PointId;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Sampling budget for [`verify_lai`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Budget {
    /// Number of base points `x`; all points when the space is smaller.
    pub x_points: usize,
    /// Spaces up to this size test every `(y, z)` pair.
    pub exhaustive_limit: usize,
    /// Random partners `z` per `y` on larger spaces, on top of the
    /// nearest neighbours.
    pub z_random: usize,
    /// Requested smallest scale; clipped to twice the resolution.
    pub t_min: f64,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { x_points: 8, exhaustive_limit: 600, z_random: 16, t_min: 0.0, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Witness {
    pub kind: String,
    pub t: f64,
    pub x: PointId,
    pub y: PointId,
    pub z: Option<PointId>,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Margins {
    pub upper: f64,
    pub lower: f64,
    pub lipschitz: f64,
}

/// Fitted constants of a locally approximating identity.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FittedConstants {
    pub gamma: f64,
    pub lambda: Option<f64>,
    /// Largest sampled `|K| t^D (1 + d/t)^{D+gamma}`.
    #[serde(rename = "C1")]
    pub c1: f64,
    /// Smallest sampled `t^D K(t, x, x)`.
    #[serde(rename = "C2")]
    pub c2: f64,
    /// Largest sampled Hölder quotient.
    #[serde(rename = "C3")]
    pub c3: f64,
    /// Multiplier bringing both upper constants to one.
    pub scale: f64,
    /// On-diagonal constant of the scaled kernel.
    pub c: f64,
    /// `1 / C1`.
    pub s_upper: f64,
    pub margins: Margins,
    pub support_violations: usize,
    pub witnesses: Vec<Witness>,
    pub t_grid: Vec<f64>,
    pub samples: String,
    pub warning: Option<String>,
    pub certified: bool,
}

#[derive(Default)]
struct Acc {
    upper: (f64, Option<Witness>),
    lower: (f64, Option<Witness>),
    lip: (f64, Option<Witness>),
    support: (usize, Option<Witness>),
}

fn better(cur: &mut (f64, Option<Witness>), w: Witness, larger: bool) {
    let take = match &cur.1 {
        None => true,
        Some(_) => {
            if larger {
                w.ratio > cur.0
            } else {
                w.ratio < cur.0
            }
        }
    };
    if take {
        cur.0 = w.ratio;
        cur.1 = Some(w);
    }
}

/// Fits upper, lower and Hölder constants of `kernel` on a geometric scale
/// grid, and checks the support radius `lambda` when given.
pub fn verify_lai(kernel: &Kernel, gamma: f64, lambda: Option<f64>, budget: &Budget) -> FittedConstants {
    let sp = kernel.space().clone();
    let n = sp.len();
    let dd = sp.dimension();
    let res = sp.resolution();
    let t_grid = grid::time_grid(budget.t_min, res);
    let warning = (budget.t_min > 0.0 && budget.t_min < 2.0 * res)
        .then(|| format!("t_min {} is below twice the resolution {}; clipped", budget.t_min, res));

    let mut r = rng::stream(budget.seed, "certify-x", 0);
    let xs: Vec<PointId> = if n <= budget.x_points {
        (0..n).collect()
    } else {
        let half = budget.x_points.div_ceil(2);
        let mut v: Vec<PointId> =
            (0..half).map(|i| (i * (n - 1)) / (half.max(2) - 1).max(1)).collect();
        while v.len() < budget.x_points {
            v.push(r.random_range(0..n));
        }
        v.sort_unstable();
        v.dedup();
        v
    };
    let exhaustive = n <= budget.exhaustive_limit;
    let dmat: Option<Vec<f64>> = exhaustive.then(|| {
        let mut m = vec![0.0; n * n];
        for y in 0..n {
            for z in 0..n {
                m[y * n + z] = sp.dist(y, z);
            }
        }
        m
    });
    let near_r = 3.0 * res * (sp.coord_dim().max(1) as f64).sqrt();

    let per_t: Vec<Acc> = t_grid
        .par_iter()
        .enumerate()
        .map(|(ti, &t)| {
            let mut acc = Acc::default();
            let mut rz = rng::stream(budget.seed, "certify-z", ti as u64);
            let td = t.powf(dd);
            let mut v = vec![0.0; n];
            let mut dx = vec![0.0; n];
            let mut partners: Vec<(PointId, f64)> = Vec::new();
            for &x in &xs {
                for y in 0..n {
                    v[y] = kernel.eval(t, x, y);
                    dx[y] = sp.dist(x, y);
                }
                better(
                    &mut acc.lower,
                    Witness { kind: "lower".into(), t, x, y: x, z: None, ratio: td * v[x] },
                    false,
                );
                for y in 0..n {
                    let u = dx[y] / t;
                    let q = v[y].abs() * td * (1.0 + u).powf(dd + gamma);
                    better(&mut acc.upper, Witness { kind: "upper".into(), t, x, y, z: None, ratio: q }, true);
                    if let Some(l) = lambda {
                        if dx[y] > l * (1.0 + 1e-12) && v[y] != 0.0 {
                            acc.support.0 += 1;
                            if acc.support.1.is_none() {
                                acc.support.1 = Some(Witness {
                                    kind: "support".into(),
                                    t,
                                    x,
                                    y,
                                    z: None,
                                    ratio: v[y].abs(),
                                });
                            }
                        }
                    }
                }
                for y in 0..n {
                    let range = (t + dx[y]) / 4.0;
                    let tail = td * (1.0 + dx[y] / t).powf(dd + 2.0 * gamma);
                    partners.clear();
                    if let Some(m) = &dmat {
                        for z in 0..n {
                            let d = m[y * n + z];
                            if z != y && d <= range {
                                partners.push((z, d));
                            }
                        }
                    } else {
                        sp.for_each_within(y, near_r.min(range), |z, d| {
                            if z != y {
                                partners.push((z, d));
                            }
                        });
                        for _ in 0..budget.z_random {
                            let z = rz.random_range(0..n);
                            let d = sp.dist(y, z);
                            if z != y && d <= range {
                                partners.push((z, d));
                            }
                        }
                    }
                    for &(z, d) in &partners {
                        let base = if gamma == 1.0 { d / t } else { (d / t).powf(gamma) };
                        let q = (v[y] - v[z]).abs() * tail / base;
                        if q > acc.lip.0 || acc.lip.1.is_none() {
                            acc.lip = (q, Some(Witness { kind: "lipschitz".into(), t, x, y, z: Some(z), ratio: q }));
                        }
                    }
                }
            }
            acc
        })
        .collect();

    let mut tot = Acc::default();
    for a in per_t {
        if let Some(w) = a.upper.1 {
            better(&mut tot.upper, w, true);
        }
        if let Some(w) = a.lower.1 {
            better(&mut tot.lower, w, false);
        }
        if let Some(w) = a.lip.1 {
            better(&mut tot.lip, w, true);
        }
        tot.support.0 += a.support.0;
        if tot.support.1.is_none() {
            tot.support.1 = a.support.1;
        }
    }
    let (c1, c2, c3) = (tot.upper.0, tot.lower.0, tot.lip.0);
    let scale = 1.0 / c1.max(c3);
    // A kernel vanishing identically has no lower constant at all.
    let c = if c2 == 0.0 { 0.0 } else { scale * c2 };
    let witnesses: Vec<Witness> =
        [tot.upper.1, tot.lower.1, tot.lip.1, tot.support.1].into_iter().flatten().collect();
    let finite = c1.is_finite() && c2.is_finite() && c3.is_finite() && scale.is_finite();
    let certified = finite && c > 0.0 && c < 1.0 && tot.support.0 == 0;
    FittedConstants {
        gamma,
        lambda,
        c1,
        c2,
        c3,
        scale,
        c,
        s_upper: 1.0 / c1,
        margins: Margins { upper: scale * c1, lower: c, lipschitz: scale * c3 },
        support_violations: tot.support.0,
        witnesses,
        t_grid: t_grid.clone(),
        samples: format!(
            "{} scales, {} base points, {} partners",
            t_grid.len(),
            xs.len(),
            if exhaustive { "all".to_string() } else { format!("near + {} random", budget.z_random) }
        ),
        warning,
        certified,
    }
}
