use super::ledger::ConstantLedger;
use crate::error::{invalid, Error, Result};
use crate::kernels::Kernel;
use crate::maximal::{check_test_function, radial_maximal};
use crate::space::{maximal_net, DiscreteSpace, Field, PointId};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// What to do at levels whose scale `eta^{1+i}` is below twice the grid
/// spacing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ResolutionPolicy {
    /// Refuse such levels.
    Strict,
    /// Continue with every point as a center; all per-level bounds are
    /// still verified.
    #[default]
    Discrete,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LevelAudit {
    /// `max |w_i| / (1/4 (1-delta)^i d^{-D-gamma/2})`.
    pub wi_ratio: f64,
    /// Same against the far-field form, where `eta^{1+i} d >= 2`.
    pub wi_far_ratio: Option<f64>,
    /// `max |w_i(x)-w_i(y)|` against its Lipschitz-type bound, over pairs
    /// with `d(x,y) <= eta^{1+i} d(x) / 4`.
    pub wi_lip_ratio: Option<f64>,
    /// `max |phi_i(x)-phi_i(y)| / (1/2 (1-delta)^i d(x)^{-D-gamma/2})`
    /// over pairs with `d(x,y) <= sigma eta^i d(x)`.
    pub holder_ratio: Option<f64>,
    pub holder_pairs: usize,
    /// Centers in the regime `1/2 < |phi_i| / bound <= 1`.
    pub regime_centers: usize,
    pub sign_violations: usize,
    /// `|phi_i| / (1/4 bound)` where `eta^i d >= 2`.
    pub far_ratio: Option<f64>,
    pub overlap: usize,
    pub overlap_ok: bool,
    /// Largest `(K* f)^{1/2}(x_ij)` over its ball average of radius
    /// `eta^{1+i} d(x_ij)`.
    pub average_constant: f64,
    pub max_time: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Level {
    pub index: usize,
    pub eta_power: f64,
    pub sub_resolution: bool,
    pub centers: Vec<PointId>,
    pub times: Vec<f64>,
    pub signs: Vec<i8>,
    pub coefficients: Vec<f64>,
    /// `max |phi_i| / ((1-delta)^i d^{-D-gamma/2})`.
    pub ratio: f64,
    pub witness: PointId,
    pub audit: LevelAudit,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Decomposition {
    pub basepoint: PointId,
    pub gamma: f64,
    /// Factor applied to the input cutoff.
    pub rescale: f64,
    pub policy: ResolutionPolicy,
    pub levels: Vec<Level>,
    /// Levels whose scale is at least twice the spacing.
    pub resolved_levels: usize,
    /// Ratio of the final residual `phi_N`.
    pub final_ratio: f64,
    pub delta: f64,
    pub eta: f64,
    pub kappa: f64,
    /// `phi_0, ..., phi_N`.
    #[serde(skip)]
    pub residuals: Vec<Field>,
}

impl Decomposition {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }
    /// Every completed level and the final residual respect the bound.
    pub fn bound_holds(&self) -> bool {
        self.levels.iter().all(|l| l.ratio <= 1.0) && self.final_ratio <= 1.0
    }
    pub fn phi0(&self) -> &Field {
        &self.residuals[0]
    }

    /// One row per level: index, ratio, decay relative to the previous
    /// level, audit ratios.
    pub fn write_trace_csv(&self, path: &Path) -> Result<()> {
        let io = |e| Error::Io { path: path.display().to_string(), source: e };
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["level", "scale", "ratio", "bound", "wi_ratio", "holder_ratio", "centers"])?;
        for l in &self.levels {
            w.write_record([
                l.index.to_string(),
                format!("{:e}", l.eta_power),
                format!("{:e}", l.ratio),
                format!("{:e}", (1.0 - self.delta).powi(l.index as i32)),
                format!("{:e}", l.audit.wi_ratio),
                l.audit.holder_ratio.map_or(String::new(), |v| format!("{v:e}")),
                l.centers.len().to_string(),
            ])?;
        }
        w.flush().map_err(io)?;
        Ok(())
    }
}

fn sgn(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

fn level_sum(kernel: &Kernel, centers: &[PointId], times: &[f64], weights: &[f64]) -> Field {
    let sp = kernel.space();
    let n = sp.len();
    let active: Vec<usize> = (0..centers.len()).filter(|&j| weights[j] != 0.0).collect();
    if active.iter().all(|&j| kernel.support_radius(times[j]).is_some()) {
        let mut w = vec![0.0; n];
        for &j in &active {
            let r = kernel.support_radius(times[j]).expect("compact");
            let (xj, tj, cj) = (centers[j], times[j], weights[j]);
            sp.for_each_within(xj, r, |x, _| w[x] += cj * kernel.eval(tj, xj, x));
        }
        Field::new(w)
    } else {
        let w = (0..n)
            .into_par_iter()
            .map(|x| active.iter().map(|&j| weights[j] * kernel.eval(times[j], centers[j], x)).sum())
            .collect();
        Field::new(w)
    }
}

/// `(K* f)^{1/2}`, the weight steering the choice of net centers.
pub fn net_weight(kernel: &Kernel, f: &Field) -> Result<Field> {
    f.check(kernel.space())?;
    if f.sup_norm() == 0.0 {
        return Ok(Field::zeros(f.len()));
    }
    Ok(radial_maximal(kernel, f, 0.0)?.values.map(f64::sqrt))
}

/// Runs the iteration `phi_{i+1} = phi_i - w_i` for `levels` steps on a
/// cutoff of the unit class at the ledger's basepoint.
pub fn uchiyama_decompose(
    phi: &Field,
    kernel: &Kernel,
    ledger: &ConstantLedger,
    f: &Field,
    levels: usize,
    policy: ResolutionPolicy,
) -> Result<Decomposition> {
    let g = net_weight(kernel, f)?;
    uchiyama_decompose_weighted(phi, kernel, ledger, &g, levels, policy)
}

/// As [`uchiyama_decompose`] with the net weight `g = (K* f)^{1/2}`
/// supplied, so that one `f` can serve many cutoffs.
pub fn uchiyama_decompose_weighted(
    phi: &Field,
    kernel: &Kernel,
    ledger: &ConstantLedger,
    g: &Field,
    levels: usize,
    policy: ResolutionPolicy,
) -> Result<Decomposition> {
    let sp: &DiscreteSpace = kernel.space();
    let o = ledger.basepoint;
    let gamma = ledger.gamma;
    let dd = sp.dimension();
    if (dd - ledger.d).abs() > 1e-12 {
        return Err(invalid("ledger", "dimension differs from the kernel space"));
    }
    check_test_function(sp, phi, o, 1.0, gamma)?;
    g.check(sp)?;
    let n = sp.len();
    let dw: Vec<f64> = (0..n).map(|x| sp.d_weight(o, x)).collect();
    let rescale = 2f64.powf(-dd - gamma / 2.0);
    let (kappa, delta, eta) = (ledger.kappa, ledger.delta, ledger.eta);

    let bound0: Vec<f64> = dw.iter().map(|d| d.powf(-dd - gamma / 2.0)).collect();
    let ratio_of = |phi: &Field, decay: f64| -> (f64, PointId) {
        let mut best = (0.0, o);
        for x in 0..n {
            let r = phi.get(x).abs() / (decay * bound0[x]);
            if r > best.0 {
                best = (r, x);
            }
        }
        best
    };

    let mut current = phi.scale(rescale);
    let mut residuals = vec![current.clone()];
    let mut out = Vec::with_capacity(levels);
    let mut resolved = 0;
    for i in 0..levels {
        let decay = (1.0 - delta).powi(i as i32);
        let (ratio, witness) = ratio_of(&current, decay);
        if ratio > 1.0 {
            return Err(Error::ResidualBound { level: i, point: witness, ratio });
        }
        let t = eta.powi(1 + i as i32);
        let sub_resolution = t < 2.0 * sp.resolution();
        if sub_resolution && policy == ResolutionPolicy::Strict {
            return Err(Error::NetResolution { level: i, scale: t, resolution: sp.resolution() });
        }
        if !sub_resolution {
            resolved += 1;
        }
        let net = maximal_net(sp, o, t, ledger.c2, g)?;
        let centers = net.centers.clone();
        let times: Vec<f64> = centers.iter().map(|&x| t * dw[x]).collect();
        let max_time = times.iter().cloned().fold(0.0, f64::max);
        let signs: Vec<i8> = centers.iter().map(|&x| sgn(current.get(x))).collect();
        let coeff_scale = kappa * delta * decay * eta.powf(dd * (1 + i) as f64);
        let coefficients: Vec<f64> = centers.iter().map(|&x| coeff_scale * dw[x].powf(-gamma / 2.0)).collect();
        let weights: Vec<f64> = coefficients.iter().zip(&signs).map(|(c, &s)| c * s as f64).collect();
        let w = level_sum(kernel, &centers, &times, &weights);

        let audit = audit_level(sp, o, &dw, &bound0, &current, &w, &centers, g, i, ledger, net.overlap, max_time);
        out.push(Level {
            index: i,
            eta_power: t,
            sub_resolution,
            centers,
            times,
            signs,
            coefficients,
            ratio,
            witness,
            audit,
        });
        current = current.sub(&w);
        residuals.push(current.clone());
    }
    let (final_ratio, witness) = ratio_of(&current, (1.0 - delta).powi(levels as i32));
    if final_ratio > 1.0 {
        return Err(Error::ResidualBound { level: levels, point: witness, ratio: final_ratio });
    }
    Ok(Decomposition {
        basepoint: o,
        gamma,
        rescale,
        policy,
        levels: out,
        resolved_levels: resolved,
        final_ratio,
        delta,
        eta,
        kappa,
        residuals,
    })
}

#[allow(clippy::too_many_arguments)]
fn audit_level(
    sp: &DiscreteSpace,
    o: PointId,
    dw: &[f64],
    bound0: &[f64],
    phi: &Field,
    w: &Field,
    centers: &[PointId],
    g: &Field,
    i: usize,
    ledger: &ConstantLedger,
    overlap: usize,
    max_time: f64,
) -> LevelAudit {
    let n = sp.len();
    let (delta, eta, gamma, sigma, dd) = (ledger.delta, ledger.eta, ledger.gamma, ledger.sigma, ledger.d);
    let decay = (1.0 - delta).powi(i as i32);
    let ti = eta.powi(i as i32);
    let t1 = ti * eta;
    let _ = o;

    let mut wi_ratio: f64 = 0.0;
    let mut wi_far: Option<f64> = None;
    let mut far: Option<f64> = None;
    for x in 0..n {
        wi_ratio = wi_ratio.max(w.get(x).abs() / (0.25 * decay * bound0[x]));
        if t1 * dw[x] >= 2.0 {
            let b = 0.25 * eta.powf(gamma / 2.0) * ((1.0 - delta) * eta.powf(gamma / 2.0)).powi(i as i32) * dw[x].powf(-dd - gamma);
            let r = w.get(x).abs() / b;
            wi_far = Some(wi_far.map_or(r, |v: f64| v.max(r)));
        }
        if ti * dw[x] >= 2.0 {
            let r = phi.get(x).abs() / (0.25 * decay * bound0[x]);
            far = Some(far.map_or(r, |v: f64| v.max(r)));
        }
    }

    // Pairwise bounds; radii shrink with the level so only the first
    // levels carry pairs on a grid.
    let pair_stats: Vec<(Option<f64>, Option<f64>, usize)> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut lip: Option<f64> = None;
            let mut hol: Option<f64> = None;
            let mut pairs = 0;
            let r_lip = t1 * dw[x] / 4.0;
            let r_hol = sigma * ti * dw[x];
            sp.for_each_within(x, r_lip.max(r_hol), |y, d| {
                if y == x {
                    return;
                }
                if d <= r_lip {
                    let b = (1.0 / 3.0) * ((1.0 - delta) / eta.powf(gamma)).powi(i as i32 + 1)
                        * d.powf(gamma)
                        * dw[x].powf(-dd - 1.5 * gamma);
                    let r = (w.get(x) - w.get(y)).abs() / b;
                    lip = Some(lip.map_or(r, |v: f64| v.max(r)));
                }
                if d <= r_hol {
                    pairs += 1;
                    let r = (phi.get(x) - phi.get(y)).abs() / (0.5 * decay * bound0[x]);
                    hol = Some(hol.map_or(r, |v: f64| v.max(r)));
                }
            });
            (lip, hol, pairs)
        })
        .collect();
    let merge = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, None) => a,
        (None, b) => b,
    };
    let (mut wi_lip, mut holder, mut holder_pairs) = (None, None, 0);
    for (l, h, p) in pair_stats {
        wi_lip = merge(wi_lip, l);
        holder = merge(holder, h);
        holder_pairs += p;
    }

    let mut regime_centers = 0;
    let mut sign_violations = 0;
    let mut average_constant: f64 = 0.0;
    for &x in centers {
        let q = phi.get(x).abs() / (decay * bound0[x]);
        if q > 0.5 && q <= 1.0 {
            regime_centers += 1;
            let s = sgn(phi.get(x));
            sp.for_each_within(x, sigma * ti * dw[x], |y, _| {
                if sgn(phi.get(y)) != s {
                    sign_violations += 1;
                }
            });
        }
        let gx = g.get(x);
        if gx > 0.0 {
            let (mut s, mut m) = (0.0, 0.0);
            sp.for_each_within(x, t1 * dw[x], |y, _| {
                s += g.get(y) * sp.weight(y);
                m += sp.weight(y);
            });
            average_constant = average_constant.max(gx * m / s);
        }
    }
    LevelAudit {
        wi_ratio,
        wi_far_ratio: wi_far,
        wi_lip_ratio: wi_lip,
        holder_ratio: holder,
        holder_pairs,
        regime_centers,
        sign_violations,
        far_ratio: far,
        overlap,
        overlap_ok: overlap as f64 <= ledger.l.max(1.0) || centers.is_empty(),
        average_constant,
        max_time,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub levels: usize,
    /// `||phi_N||_inf`.
    pub residual_sup: f64,
    /// `(1-delta)^N`.
    pub bound: f64,
    pub bound_holds: bool,
    /// `||(phi_0 - sum w_i) - phi_N||_inf` against the stored trace.
    pub identity_error: f64,
    /// Largest relative deviation of a stored coefficient from its
    /// recomputed value.
    pub coefficient_error: f64,
}

/// Recomputes `sum_i w_i` from the stored centers and returns it with the
/// residual `phi_0 - sum_i w_i`.
pub fn reconstruct(dec: &Decomposition, kernel: &Kernel) -> Result<(Field, Field, ReconstructionReport)> {
    let sp = kernel.space();
    let n = sp.len();
    let dd = sp.dimension();
    let o = dec.basepoint;
    let mut sum = Field::zeros(n);
    let mut residual = dec.phi0().clone();
    let mut coefficient_error: f64 = 0.0;
    for l in &dec.levels {
        let scale = dec.kappa * dec.delta * (1.0 - dec.delta).powi(l.index as i32) * dec.eta.powf(dd * (1 + l.index) as f64);
        for (k, &x) in l.centers.iter().enumerate() {
            let want = scale * sp.d_weight(o, x).powf(-dec.gamma / 2.0);
            coefficient_error = coefficient_error.max((l.coefficients[k] - want).abs() / want);
        }
        let weights: Vec<f64> = l.coefficients.iter().zip(&l.signs).map(|(c, &s)| c * s as f64).collect();
        let w = level_sum(kernel, &l.centers, &l.times, &weights);
        sum = sum.add(&w);
        residual = residual.sub(&w);
    }
    let identity_error = residual.sub(dec.residuals.last().expect("trace")).sup_norm();
    let residual_sup = residual.sup_norm();
    let bound = (1.0 - dec.delta).powi(dec.levels.len() as i32);
    let report = ReconstructionReport {
        levels: dec.levels.len(),
        residual_sup,
        bound,
        bound_holds: residual_sup <= bound,
        identity_error,
        coefficient_error,
    };
    Ok((sum, residual, report))
}

/// Writes `phi_i` for every level as columns `point, phi_0, ..., phi_N`.
pub fn write_residuals_csv(dec: &Decomposition, path: &Path) -> Result<()> {
    let io = |e| Error::Io { path: path.display().to_string(), source: e };
    let file = std::fs::File::create(path).map_err(io)?;
    let mut out = std::io::BufWriter::new(file);
    let header: Vec<String> = std::iter::once("point".to_string())
        .chain((0..dec.residuals.len()).map(|i| format!("phi_{i}")))
        .collect();
    writeln!(out, "{}", header.join(",")).map_err(io)?;
    let n = dec.residuals.first().map_or(0, |f| f.len());
    for x in 0..n {
        let row: Vec<String> = std::iter::once(x.to_string())
            .chain(dec.residuals.iter().map(|f| format!("{:e}", f.get(x))))
            .collect();
        writeln!(out, "{}", row.join(",")).map_err(io)?;
    }
    out.flush().map_err(io)
}
