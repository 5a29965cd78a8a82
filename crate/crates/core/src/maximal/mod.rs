//! Maximal operators: radial kernel maximal function, local
//! Hardy–Littlewood, Riesz-type potential and the grand maximal function.

mod grand;
mod lp;
mod testfn;

pub use grand::{grand_maximal, grand_maximal_at, GrandEvaluator, GrandMethod, GrandOptions, GrandValue};
pub use lp::lp_best;
pub use testfn::{check_test_function, cutoff_family, CandidateLibrary};

use crate::error::Result;
use crate::grid;
use crate::kernels::Kernel;
use crate::space::{DiscreteSpace, Field, PointId};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// `(K_t f)(x) = sum_y K(t, x, y) f(y) m(y)`.
pub fn apply_kernel(kernel: &Kernel, t: f64, f: &Field) -> Result<Field> {
    let sp = kernel.space();
    f.check(sp)?;
    let nz = f.support();
    let supp = kernel.support_radius(t);
    if let Some(r) = supp {
        if (nz.len() as f64) <= 0.25 * sp.len() as f64 {
            // Sparse input with compact kernel: scatter from the support.
            let mut vals = vec![0.0; sp.len()];
            for &y in &nz {
                let c = f.get(y) * sp.weight(y);
                sp.for_each_within(y, r * (1.0 + 1e-12), |x, _| vals[x] += kernel.eval(t, x, y) * c);
            }
            return Ok(Field::new(vals));
        }
    }
    let vals: Vec<f64> = (0..sp.len())
        .into_par_iter()
        .map(|x| {
            let mut s = 0.0;
            match supp {
                Some(r) => {
                    sp.for_each_within(x, r, |y, _| {
                        let v = f.get(y);
                        if v != 0.0 {
                            s += kernel.eval(t, x, y) * v * sp.weight(y);
                        }
                    });
                }
                None => {
                    for &y in &nz {
                        s += kernel.eval(t, x, y) * f.get(y) * sp.weight(y);
                    }
                }
            }
            s
        })
        .collect();
    Ok(Field::new(vals))
}

/// Radial maximal function with the attaining scale per point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaximalResult {
    pub values: Field,
    pub argmax_t: Vec<f64>,
    pub t_grid: Vec<f64>,
    /// Set when more than 5% of the points attain the maximum at the
    /// smallest scale.
    pub warning: Option<String>,
}

/// `K* f(x) = sup_{0 < t <= 1} |K_t f(x)|` over the geometric scale grid.
pub fn radial_maximal(kernel: &Kernel, f: &Field, t_min: f64) -> Result<MaximalResult> {
    let sp = kernel.space();
    let ts = grid::time_grid(t_min, sp.resolution());
    radial_maximal_on(kernel, f, &ts)
}

pub fn radial_maximal_on(kernel: &Kernel, f: &Field, ts: &[f64]) -> Result<MaximalResult> {
    let sp = kernel.space();
    f.check(sp)?;
    let n = sp.len();
    let mut best = vec![0.0f64; n];
    let mut arg = vec![f64::NAN; n];
    for &t in ts {
        let g = apply_kernel(kernel, t, f)?;
        for x in 0..n {
            let v = g.get(x).abs();
            if v > best[x] || arg[x].is_nan() {
                best[x] = v;
                arg[x] = t;
            }
        }
    }
    let t_last = *ts.last().expect("non-empty grid");
    let at_floor = (0..n).filter(|&x| best[x] > 0.0 && arg[x] == t_last).count();
    let warning = (at_floor as f64 > 0.05 * n as f64).then(|| {
        format!("{at_floor} of {n} points attain the maximum at the smallest scale {t_last}")
    });
    Ok(MaximalResult { values: Field::new(best), argmax_t: arg, t_grid: ts.to_vec(), warning })
}

/// Local Hardy–Littlewood maximal function at one point.
pub fn hl_maximal_at(space: &DiscreteSpace, f: &Field, big_r: f64, x: PointId) -> f64 {
    let lo = 0.5 * space.resolution().max(1e-12);
    let radii = grid::radius_grid(lo.min(big_r), big_r);
    let mut dist: Vec<(f64, f64, f64)> = Vec::new();
    space.for_each_within(x, big_r, |y, d| dist.push((d, f.get(y).abs() * space.weight(y), space.weight(y))));
    dist.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best: f64 = 0.0;
    let (mut s, mut m, mut k) = (0.0, 0.0, 0);
    for &r in radii.iter().rev() {
        while k < dist.len() && dist[k].0 <= r * (1.0 + 1e-12) {
            s += dist[k].1;
            m += dist[k].2;
            k += 1;
        }
        if m > 0.0 {
            best = best.max(s / m);
        }
    }
    best
}

/// `M_R f(x) = max_{r <= R} avg_{B(x,r)} |f|` over the radius grid.
pub fn hl_maximal(space: &DiscreteSpace, f: &Field, big_r: f64) -> Result<Field> {
    f.check(space)?;
    let v: Vec<f64> = (0..space.len()).into_par_iter().map(|x| hl_maximal_at(space, f, big_r, x)).collect();
    Ok(Field::new(v))
}

/// `I_lambda f(x) = sum_{0 < d(x,y) <= lambda} |f(y)| d(x,y)^{1-D} m(y)`
/// plus the self cell, counted at distance half a spacing.
pub fn riesz_potential(space: &DiscreteSpace, f: &Field, lambda: f64) -> Result<Field> {
    f.check(space)?;
    let e = space.dimension() - 1.0;
    let half = 0.5 * space.resolution();
    let v: Vec<f64> = (0..space.len())
        .into_par_iter()
        .map(|x| {
            let mut s = f.get(x).abs() * space.weight(x) * half.powf(-e);
            space.for_each_within(x, lambda, |y, d| {
                if y != x {
                    s += f.get(y).abs() * d.powf(-e) * space.weight(y);
                }
            });
            s
        })
        .collect();
    Ok(Field::new(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{make_kernel, KernelSpec, Profile};
    use crate::space::{SpaceSpec, Topology};
    use std::sync::Arc;

    fn line(cells: usize) -> Arc<DiscreteSpace> {
        Arc::new(
            DiscreteSpace::build(&SpaceSpec {
                topology: Topology::Grid,
                dim: 1,
                lower: 0.0,
                extent: 1.0,
                spacing: 1.0 / cells as f64,
            })
            .unwrap(),
        )
    }

    #[test]
    fn hl_of_point_mass() {
        let s = line(512);
        let mut f = Field::zeros(s.len());
        f.values_mut()[256] = 1.0;
        let w = s.weight(0);
        let m = hl_maximal(&s, &f, 0.4).unwrap();
        for &off in &[16usize, 64, 128] {
            let d = off as f64 * w;
            let v = m.get(256 + off);
            assert!((v / (w / (2.0 * d)) - 1.0).abs() < 0.12, "off={off}: {v}");
        }
        assert_eq!(m.get(256), 1.0);
    }

    #[test]
    fn riesz_in_one_dimension_is_local_mass() {
        let s = line(128);
        let f = Field::from_fn(&s, |x| (x as f64).sin());
        let r = riesz_potential(&s, &f, 0.25).unwrap();
        let x = 64;
        let direct: f64 = s.ball(x, 0.25).iter().map(|&y| f.get(y).abs() * s.weight(y)).sum();
        assert!((r.get(x) - direct).abs() < 1e-12);
    }

    #[test]
    fn bump_maximal_of_constant() {
        let s = line(256);
        let k = make_kernel(s.clone(), &KernelSpec::Bump { profile: Profile::triangle(), gamma: 1.0 }).unwrap();
        let f = Field::constant(s.len(), 1.0);
        let m = radial_maximal(&k, &f, 0.0).unwrap();
        // Interior points see the full triangle mass; Riemann sums of the
        // triangle overshoot by a few percent at the finest scales.
        let v = m.values.get(128);
        assert!((1.0..1.05).contains(&v), "{v}");
    }
}
