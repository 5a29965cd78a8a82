use super::{DiscreteSpace, Field, PointId};
use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

/// A weighted separated net at scale `t` together with its audited
/// constants.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Net {
    pub t: f64,
    pub a: f64,
    pub basepoint: PointId,
    /// Greedy separated points.
    pub seeds: Vec<PointId>,
    /// Selected centers, one per seed.
    pub centers: Vec<PointId>,
    /// Largest number of balls `B(x_j, t d(x_j))` containing one point.
    pub overlap: usize,
    /// Largest ratio `g(x_j) / avg_{B(x_j, t d(x_j))} g`.
    pub average_constant: f64,
    /// Every admissible point lies within `a t d(x_j)` of some center.
    pub covered: bool,
    /// The separation radius is below the grid resolution.
    pub sub_resolution: bool,
}

fn ball_average(space: &DiscreteSpace, g: &Field, x: PointId, r: f64) -> f64 {
    let (mut s, mut m) = (0.0, 0.0);
    space.for_each_within(x, r, |y, _| {
        s += g.get(y) * space.weight(y);
        m += space.weight(y);
    });
    s / m
}

/// Greedy construction over `{y : t d(y) <= 1/2}` in index order, followed
/// by a choice of center in each small ball where `g` is at most twice its
/// average.
pub fn maximal_net(space: &DiscreteSpace, o: PointId, t: f64, a: f64, g: &Field) -> Result<Net> {
    g.check(space)?;
    if !(a > 0.0 && a <= 1.0) {
        return Err(invalid("a", "must lie in (0, 1]"));
    }
    if !(t > 0.0) {
        return Err(invalid("t", "must be positive"));
    }
    let n = space.len();
    let dw: Vec<f64> = (0..n).map(|x| space.d_weight(o, x)).collect();
    let admissible: Vec<bool> = dw.iter().map(|&d| t * d <= 0.5).collect();
    let mut accepted = vec![false; n];
    let mut seeds = Vec::new();
    for y in 0..n {
        if !admissible[y] {
            continue;
        }
        let r = a * t * dw[y] / 4.0;
        let mut clash = false;
        space.for_each_within(y, r, |z, d| {
            if accepted[z] && d < a * t * dw[y].min(dw[z]) / 4.0 {
                clash = true;
            }
        });
        if !clash {
            accepted[y] = true;
            seeds.push(y);
        }
    }
    let mut centers = Vec::with_capacity(seeds.len());
    for &y in &seeds {
        let r = a * t * dw[y] / 4.0;
        let avg = ball_average(space, g, y, r);
        if g.get(y) <= 2.0 * avg {
            centers.push(y);
            continue;
        }
        let mut best = (f64::INFINITY, y);
        space.for_each_within(y, r, |z, _| {
            let v = g.get(z);
            if v < best.0 || (v == best.0 && z < best.1) {
                best = (v, z);
            }
        });
        centers.push(best.1);
    }

    let mut counts = vec![0usize; n];
    let mut average_constant: f64 = 0.0;
    for &x in &centers {
        let r = t * dw[x];
        space.for_each_within(x, r, |y, _| counts[y] += 1);
        let gx = g.get(x);
        if gx > 0.0 {
            average_constant = average_constant.max(gx / ball_average(space, g, x, r));
        }
    }
    let overlap = counts.iter().copied().max().unwrap_or(0);

    let mut near = vec![false; n];
    for &x in &centers {
        space.for_each_within(x, a * t * dw[x], |y, _| near[y] = true);
    }
    let covered = (0..n).all(|y| !admissible[y] || near[y]);
    let max_d = dw.iter().cloned().fold(1.0, f64::max);
    let sub_resolution = a * t * max_d / 4.0 < space.resolution();
    Ok(Net {
        t,
        a,
        basepoint: o,
        seeds,
        centers,
        overlap,
        average_constant,
        covered,
        sub_resolution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{SpaceSpec, Topology};

    fn line(cells: usize) -> DiscreteSpace {
        DiscreteSpace::build(&SpaceSpec {
            topology: Topology::Grid,
            dim: 1,
            lower: 0.0,
            extent: 1.0,
            spacing: 1.0 / cells as f64,
        })
        .unwrap()
    }

    #[test]
    fn constant_weight_net_is_separated() {
        let s = line(1024);
        let g = Field::constant(s.len(), 1.0);
        let net = maximal_net(&s, 0, 0.25, 0.5, &g).unwrap();
        assert!(net.covered);
        assert!(!net.sub_resolution);
        let dw = |x| s.d_weight(0, x);
        for (i, &p) in net.seeds.iter().enumerate() {
            for &q in &net.seeds[..i] {
                assert!(s.dist(p, q) >= 0.5 * 0.25 * f64::min(dw(p), dw(q)) / 4.0);
            }
            assert!(0.25 * dw(p) <= 0.5);
        }
        assert!(net.overlap >= 1);
        assert!((net.average_constant - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spike_is_avoided() {
        let s = line(1024);
        let mut g = Field::constant(s.len(), 1.0);
        g.values_mut()[300] = 100.0;
        let net = maximal_net(&s, 0, 0.25, 0.5, &g).unwrap();
        for &x in &net.centers {
            if x == 300 {
                let avg = ball_average(&s, &g, x, 0.5 * 0.25 * s.d_weight(0, x) / 4.0);
                assert!(100.0 <= 2.0 * avg);
            }
        }
    }

    #[test]
    fn fine_scale_takes_every_point() {
        let s = line(64);
        let g = Field::constant(s.len(), 1.0);
        let net = maximal_net(&s, 0, 1.0 / 256.0, 0.25, &g).unwrap();
        assert!(net.sub_resolution);
        assert_eq!(net.centers.len(), s.len());
        assert_eq!(net.overlap, 1);
    }
}
