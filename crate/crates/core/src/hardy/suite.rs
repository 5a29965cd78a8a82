use super::{Atom, BallRef, Flavor};
use crate::error::{invalid, Result};
use crate::kernels::{Kernel, SplitKernel};
use crate::maximal::radial_maximal;
use crate::rng::{stream, Rng};
use crate::space::{DiscreteSpace, Field, PointId};
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Random `p = inf` atom: piecewise constant on the Voronoi cells of a few
/// random sites in a random ball, normalised to within 1% of the size
/// bound. Standard atoms have log-uniform radius in `[r_min, s]` and zero
/// mean; global atoms have radius `s` and nonnegative values.
pub fn random_atom(space: &DiscreteSpace, s: f64, r_min: f64, flavor: Flavor, centers: &[PointId], rng: &mut Rng) -> Atom {
    let center = centers[rng.random_range(0..centers.len())];
    let radius = match flavor {
        Flavor::Global => s,
        Flavor::Standard => {
            let (lo, hi) = (r_min.min(s).ln(), s.ln());
            (lo + (hi - lo) * rng.random::<f64>()).exp()
        }
    };
    let ball = space.ball(center, radius);
    let k = rng.random_range(2..=6usize).min(ball.len());
    let sites: Vec<PointId> = rand::seq::index::sample(rng, ball.len(), k).into_iter().map(|i| ball[i]).collect();
    let levels: Vec<f64> = (0..k)
        .map(|_| match flavor {
            Flavor::Standard => rng.random_range(-1.0..1.0),
            Flavor::Global => rng.random_range(0.0..1.0),
        })
        .collect();
    let mut vals = vec![0.0; space.len()];
    for &y in &ball {
        let mut best = (f64::INFINITY, 0);
        for (i, &z) in sites.iter().enumerate() {
            let d = space.dist(y, z);
            if d < best.0 {
                best = (d, i);
            }
        }
        vals[y] = levels[best.1];
    }
    let m: f64 = ball.iter().map(|&y| space.weight(y)).sum();
    let raw = ball.iter().map(|&y| vals[y].abs()).fold(0.0, f64::max);
    if flavor == Flavor::Standard {
        let mean = ball.iter().map(|&y| vals[y] * space.weight(y)).sum::<f64>() / m;
        for &y in &ball {
            vals[y] -= mean;
        }
    }
    let sup = ball.iter().map(|&y| vals[y].abs()).fold(0.0, f64::max);
    let target = (0.99 + 0.01 * rng.random::<f64>()) / m;
    if sup > 1e-6 * raw {
        for &y in &ball {
            vals[y] *= target / sup;
        }
    } else {
        // Cells too small to carry distinct values; use a dipole.
        let c = space.coords(center)[0];
        for &y in &ball {
            vals[y] = target * (space.coords(y)[0] - c).signum() * (space.coords(y)[0] != c) as u8 as f64;
        }
    }
    Atom { values: Field::new(vals), ball: BallRef { center, radius }, scale: s, p: f64::INFINITY, flavor }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct AtomSuiteOptions {
    pub count: usize,
    pub scale: f64,
    /// Support radius of the kernel at `t = 1`.
    pub lambda: f64,
    pub seed: u64,
    /// Smallest standard-atom radius, in units of the grid spacing.
    pub r_min_cells: f64,
    /// Centers are drawn among points within this distance of the
    /// default basepoint.
    pub center_radius: Option<f64>,
}

impl Default for AtomSuiteOptions {
    fn default() -> Self {
        AtomSuiteOptions { count: 200, scale: 0.25, lambda: 1.0, seed: 0, r_min_cells: 4.0, center_radius: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AtomRecord {
    pub index: usize,
    pub flavor: Flavor,
    pub center: PointId,
    pub radius: f64,
    pub total: f64,
    pub inner: f64,
    pub outer: f64,
    pub shape_ratio: Option<f64>,
    pub tail_ratio: Option<f64>,
    pub support_ok: bool,
}

/// Fit of the outer part of standard atoms against
/// `r^gamma int_{2r}^{2 lambda} u^{-1-gamma} du`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ShapeFit {
    pub gamma: f64,
    pub constant: f64,
    /// Largest ratio per octave of radii, from the largest radius down.
    pub per_octave: Vec<(f64, f64)>,
    /// Largest over smallest octave maximum.
    pub spread: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomSuiteReport {
    pub count: usize,
    pub max_standard: f64,
    pub max_global: f64,
    pub max_total: f64,
    pub shape: ShapeFit,
    pub support_violations: usize,
    pub max_tail_ratio: Option<f64>,
    pub records: Vec<AtomRecord>,
}

pub fn bound_shape(r: f64, lambda: f64, gamma: f64) -> f64 {
    if 2.0 * r >= 2.0 * lambda {
        return 0.0;
    }
    r.powf(gamma) * ((2.0 * r).powf(-gamma) - (2.0 * lambda).powf(-gamma)) / gamma
}

/// `||K* a||_1` over random standard and global atoms (alternating), split
/// into the parts on `5B` and off it.
pub fn atom_maximal_suite(
    kernel: &Kernel,
    gamma: f64,
    opts: &AtomSuiteOptions,
    tail: Option<&SplitKernel>,
) -> Result<AtomSuiteReport> {
    let sp = kernel.space();
    if opts.count == 0 {
        return Err(invalid("count", "must be positive"));
    }
    let o = sp.default_basepoint();
    let centers: Vec<PointId> = match opts.center_radius {
        Some(r) => sp.ball(o, r),
        None => (0..sp.len()).collect(),
    };
    let r_min = opts.r_min_cells * sp.resolution();
    let compact = kernel.support_radius(1.0).is_some();
    let rows: Vec<Result<AtomRecord>> = (0..opts.count)
        .into_par_iter()
        .map(|index| {
            let mut rng = stream(opts.seed, "atom", index as u64);
            let flavor = if index % 2 == 0 { Flavor::Standard } else { Flavor::Global };
            let atom = random_atom(sp, opts.scale, r_min, flavor, &centers, &mut rng);
            let km = radial_maximal(kernel, &atom.values, 0.0)?.values;
            let (c, r) = (atom.ball.center, atom.ball.radius);
            let (mut inner, mut outer) = (0.0, 0.0);
            let mut support_ok = true;
            for x in 0..sp.len() {
                let v = km.get(x) * sp.weight(x);
                let d = sp.dist(c, x);
                if d <= 5.0 * r {
                    inner += v;
                } else {
                    outer += v;
                }
                if compact && km.get(x) > 0.0 && d > (r + opts.lambda) * (1.0 + 1e-12) {
                    support_ok = false;
                }
            }
            let shape_ratio = (flavor == Flavor::Standard)
                .then(|| bound_shape(r, opts.lambda, gamma))
                .filter(|&b| b > 0.0)
                .map(|b| outer / b);
            let tail_ratio = match tail {
                Some(split) if split.tail_norm > 0.0 => {
                    let tm = radial_maximal(&split.tail, &atom.values, 0.0)?.values;
                    Some(tm.l1_norm(sp) / (split.tail_norm * atom.values.l1_norm(sp)))
                }
                _ => None,
            };
            Ok(AtomRecord { index, flavor, center: c, radius: r, total: inner + outer, inner, outer, shape_ratio, tail_ratio, support_ok })
        })
        .collect();
    let records: Vec<AtomRecord> = rows.into_iter().collect::<Result<_>>()?;
    let max_of = |fl: Flavor| records.iter().filter(|r| r.flavor == fl).map(|r| r.total).fold(0.0, f64::max);
    let max_standard = max_of(Flavor::Standard);
    let max_global = max_of(Flavor::Global);

    let mut per_octave: Vec<(f64, f64)> = Vec::new();
    for rec in &records {
        if let Some(q) = rec.shape_ratio {
            let k = (opts.scale / rec.radius).log2().floor().max(0.0);
            let r_hi = opts.scale * 0.5f64.powf(k);
            match per_octave.iter_mut().find(|(r, _)| *r == r_hi) {
                Some(e) => e.1 = e.1.max(q),
                None => per_octave.push((r_hi, q)),
            }
        }
    }
    per_octave.sort_by(|a, b| b.0.total_cmp(&a.0));
    let constant = per_octave.iter().map(|p| p.1).fold(0.0, f64::max);
    let least = per_octave.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let spread = if least > 0.0 && least.is_finite() { constant / least } else { f64::INFINITY };
    let max_tail_ratio = records.iter().filter_map(|r| r.tail_ratio).reduce(f64::max);
    Ok(AtomSuiteReport {
        count: records.len(),
        max_standard,
        max_global,
        max_total: max_standard.max(max_global),
        shape: ShapeFit { gamma, constant, per_octave, spread },
        support_violations: records.iter().filter(|r| !r.support_ok).count(),
        max_tail_ratio,
        records,
    })
}
