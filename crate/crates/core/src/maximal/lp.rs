use super::testfn::ball_data;
use crate::error::{Error, Result};
use crate::space::{DiscreteSpace, Field, PointId};
use minilp::{ComparisonOp, OptimizationDirection, Problem};

/// Exact `sup |int phi f|` over the Hölder class on `B(x, r)` by linear
/// programming. Variables are the values on the ball (in units of `r^-D`);
/// the distance to the complement folds the outside pairs into box bounds.
/// With `prune`, a pair constraint implied by two shorter ones through an
/// intermediate point is dropped.
pub fn lp_best(space: &DiscreteSpace, f: &Field, x: PointId, r: f64, gamma: f64, prune: bool) -> Result<f64> {
    let b = ball_data(space, x, r, gamma);
    let amp = r.powf(-space.dimension());
    let m = b.ids.len();
    let c: Vec<f64> = b.ids.iter().map(|&y| f.get(y) * space.weight(y) * amp).collect();
    if c.iter().all(|v| *v == 0.0) {
        return Ok(0.0);
    }
    let mut e = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..i {
            let v = b.hol(space.dist(b.ids[i], b.ids[j]));
            e[i * m + j] = v;
            e[j * m + i] = v;
        }
    }
    let mut p = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = (0..m).map(|i| p.add_var(c[i], (-b.bound[i], b.bound[i]))).collect();
    for i in 0..m {
        for j in 0..i {
            let eij = e[i * m + j];
            if b.bound[i] + b.bound[j] <= eij {
                continue;
            }
            if prune
                && (0..m).any(|k| k != i && k != j && e[i * m + k] + e[k * m + j] <= eij * (1.0 + 1e-12))
            {
                continue;
            }
            p.add_constraint(&[(vars[i], 1.0), (vars[j], -1.0)], ComparisonOp::Le, eij);
            p.add_constraint(&[(vars[i], 1.0), (vars[j], -1.0)], ComparisonOp::Ge, -eij);
        }
    }
    let sol = p.solve().map_err(|e| Error::Lp(e.to_string()))?;
    Ok(sol.objective().abs())
}
