use super::{DiscreteSpace, Field, PointId};
use crate::error::{invalid, Result};

/// Smooth step equal to 1 below `a` and 0 beyond `b`.
pub fn smooth_cutoff(u: f64, a: f64, b: f64) -> f64 {
    if u <= a {
        1.0
    } else if u >= b {
        0.0
    } else {
        let s = (u - a) / (b - a);
        1.0 - s * s * (3.0 - 2.0 * s)
    }
}

/// Colored partition of unity at scale `kappa`.
#[derive(Debug, Clone)]
pub struct Patchwork {
    pub kappa: f64,
    pub centers: Vec<PointId>,
    /// `phi_p`, summing to one.
    pub cutoffs: Vec<Field>,
    /// `phi~_p`, equal to one on `B(p, kappa)`.
    pub wide: Vec<Field>,
    pub colors: Vec<usize>,
    pub n_colors: usize,
    /// Measured Lipschitz constant of each `phi_p`.
    pub lipschitz: Vec<f64>,
}

pub fn build_patchwork(space: &DiscreteSpace, kappa: f64) -> Result<Patchwork> {
    if kappa < 4.0 * space.resolution() {
        return Err(invalid("kappa", format!("must be at least four grid spacings ({})", 4.0 * space.resolution())));
    }
    let n = space.len();
    let mut taken = vec![false; n];
    let mut centers = Vec::new();
    for y in 0..n {
        let mut clash = false;
        space.for_each_within(y, kappa / 3.0, |z, d| {
            if taken[z] && d < kappa / 3.0 {
                clash = true;
            }
        });
        if !clash {
            taken[y] = true;
            centers.push(y);
        }
    }
    let mut raw = Vec::with_capacity(centers.len());
    let mut total = vec![0.0; n];
    for &p in &centers {
        let mut f = vec![0.0; n];
        space.for_each_within(p, 0.75 * kappa, |x, d| {
            f[x] = smooth_cutoff(d, 0.5 * kappa, 0.75 * kappa);
            total[x] += f[x];
        });
        raw.push(f);
    }
    let cutoffs: Vec<Field> = raw
        .into_iter()
        .map(|f| Field::new(f.iter().zip(&total).map(|(v, s)| v / s).collect()))
        .collect();
    let wide: Vec<Field> = centers
        .iter()
        .map(|&p| {
            let mut f = vec![0.0; n];
            space.for_each_within(p, 1.5 * kappa, |x, d| f[x] = smooth_cutoff(d, kappa, 1.5 * kappa));
            Field::new(f)
        })
        .collect();

    let mut colors = vec![usize::MAX; centers.len()];
    let mut n_colors = 0;
    while colors.iter().any(|&c| c == usize::MAX) {
        let mut chosen: Vec<usize> = Vec::new();
        for i in 0..centers.len() {
            if colors[i] != usize::MAX {
                continue;
            }
            if chosen.iter().all(|&j| space.dist(centers[i], centers[j]) >= 4.0 * kappa) {
                chosen.push(i);
            }
        }
        for &i in &chosen {
            colors[i] = n_colors;
        }
        n_colors += 1;
    }

    let lipschitz = centers
        .iter()
        .zip(&cutoffs)
        .map(|(&p, phi)| {
            let mut worst: f64 = 0.0;
            space.for_each_within(p, kappa, |x, _| {
                space.for_each_within(x, kappa / 4.0, |y, d| {
                    if d > 0.0 {
                        worst = worst.max((phi.get(x) - phi.get(y)).abs() / d);
                    }
                });
            });
            worst
        })
        .collect();
    Ok(Patchwork { kappa, centers, cutoffs, wide, colors, n_colors, lipschitz })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{SpaceSpec, Topology};

    fn torus(cells: usize) -> DiscreteSpace {
        DiscreteSpace::build(&SpaceSpec {
            topology: Topology::Torus,
            dim: 1,
            lower: 0.0,
            extent: 1.0,
            spacing: 1.0 / cells as f64,
        })
        .unwrap()
    }

    #[test]
    fn partition_of_unity_and_supports() {
        let s = torus(256);
        let pw = build_patchwork(&s, 0.1).unwrap();
        for x in 0..s.len() {
            let sum: f64 = pw.cutoffs.iter().map(|f| f.get(x)).sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
        for (k, &p) in pw.centers.iter().enumerate() {
            for x in pw.cutoffs[k].support() {
                assert!(s.dist(p, x) <= 0.1);
            }
            for x in s.ball(p, 0.1) {
                assert_eq!(pw.wide[k].get(x), 1.0);
            }
        }
        for i in 0..pw.centers.len() {
            for j in 0..i {
                if pw.colors[i] == pw.colors[j] {
                    assert!(s.dist(pw.centers[i], pw.centers[j]) >= 0.4);
                }
            }
        }
    }

    #[test]
    fn color_count_is_stable_under_refinement() {
        let a = build_patchwork(&torus(128), 0.1).unwrap();
        let b = build_patchwork(&torus(512), 0.1).unwrap();
        assert!(a.n_colors <= 16 && b.n_colors <= 16);
        assert!((a.n_colors as i64 - b.n_colors as i64).abs() <= 2);
    }

    #[test]
    fn rejects_tiny_kappa() {
        assert!(build_patchwork(&torus(64), 0.03).is_err());
    }
}
