use crate::error::{invalid, Error, Result};
use crate::space::{maximal_net, DiscreteSpace, Field, Net, PointId};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One inequality of the ledger, evaluated as `lhs <= rhs` (or `<` for
/// strict conditions).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConditionCheck {
    pub name: String,
    pub statement: String,
    pub lhs: f64,
    pub rhs: f64,
    pub strict: bool,
    pub holds: bool,
}

impl ConditionCheck {
    fn le(name: &str, statement: &str, lhs: f64, rhs: f64) -> Self {
        ConditionCheck { name: name.into(), statement: statement.into(), lhs, rhs, strict: false, holds: lhs <= rhs }
    }
    fn lt(name: &str, statement: &str, lhs: f64, rhs: f64) -> Self {
        ConditionCheck { name: name.into(), statement: statement.into(), lhs, rhs, strict: true, holds: lhs < rhs }
    }
}

/// Empirical value of a lattice-sum constant `C_{a,b,L}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Calibration {
    pub a: f64,
    pub b: f64,
    pub value: f64,
    /// Largest observed ratio per net scale.
    pub per_scale: Vec<(f64, f64)>,
    pub safety: f64,
    /// False when the fitted ratio grows by more than half between
    /// consecutive scales.
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct LedgerOptions {
    pub draft_eta: f64,
    pub safety: f64,
    pub h_samples: Vec<f64>,
    /// Spaces larger than this calibrate on a strided subset of points.
    pub x_budget: usize,
    /// Largest `k` tried in the dyadic search `eta = 2^-k`.
    pub max_k: u32,
}

impl Default for LedgerOptions {
    fn default() -> Self {
        LedgerOptions {
            draft_eta: 0.25,
            safety: 2.0,
            h_samples: vec![0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0],
            x_budget: 3000,
            max_k: 64,
        }
    }
}

/// The constant set driving the decomposition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstantLedger {
    #[serde(rename = "D")]
    pub d: f64,
    pub gamma: f64,
    pub c: f64,
    pub c_assumed: bool,
    pub c1: f64,
    pub c2: f64,
    pub kappa: f64,
    pub sigma: f64,
    pub delta: f64,
    pub eta: f64,
    pub rho: f64,
    pub p: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub c_half: Calibration,
    pub c_three: Calibration,
    pub conditions: Vec<ConditionCheck>,
    pub provenance: BTreeMap<String, String>,
    /// Measured majorization constant, once available.
    pub e_emp: Option<f64>,
    pub basepoint: PointId,
}

impl ConstantLedger {
    pub fn feasible(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }
    /// Largest `N` with `eta^{1+N} >= 4 * resolution`, if any.
    pub fn resolvable_depth(&self, resolution: f64) -> Option<usize> {
        let mut n = None;
        let mut t = self.eta;
        let mut k = 0;
        while t >= 4.0 * resolution {
            n = Some(k);
            t *= self.eta;
            k += 1;
        }
        n
    }
}

pub fn kappa_of(c1: f64, d: f64, gamma: f64) -> f64 {
    1.0 / (c1 * 2f64.powf(-1.0 - d - gamma / 2.0))
}

pub fn sigma_of(d: f64, gamma: f64) -> f64 {
    (0.25f64).min((2.0 * (4f64.powf(d + 1.5 * gamma) + 2.0 / 3.0)).powf(-1.0 / gamma))
}

pub fn rho_of(delta: f64, eta: f64, d: f64) -> f64 {
    (-delta).ln_1p() / (d * eta.ln())
}

/// Fits `C_{a,b,L}` from the nets: the largest ratio of the weighted sum
/// over centers to its claimed bound, over sampled `x` and thresholds `h`,
/// times the safety factor and floored at one.
pub fn calibrate_sum_constant(
    space: &DiscreteSpace,
    o: PointId,
    a: f64,
    b: f64,
    nets: &[Net],
    opts: &LedgerOptions,
) -> Result<Calibration> {
    if b < a {
        return Err(invalid("b", "must be at least a"));
    }
    let dd = space.dimension();
    let n = space.len();
    let stride = n.div_ceil(opts.x_budget.max(1));
    let xs: Vec<PointId> = (0..n).step_by(stride.max(1)).collect();
    let mut per_scale = Vec::new();
    for net in nets {
        let t = net.t;
        let dj: Vec<f64> = net.centers.iter().map(|&x| space.d_weight(o, x)).collect();
        let mut worst: f64 = 0.0;
        let mut terms: Vec<(f64, f64)> = Vec::with_capacity(net.centers.len());
        for &x in &xs {
            let dx = space.d_weight(o, x);
            terms.clear();
            for (k, &xj) in net.centers.iter().enumerate() {
                let dist = space.dist(xj, x);
                let term = dj[k].powf(-dd - a) * (1.0 + dist / (t * dj[k])).powf(-dd - b);
                terms.push((dist / (t * dj[k]), term));
            }
            for &h in &opts.h_samples {
                let lhs: f64 = terms.iter().filter(|(q, _)| *q >= h).map(|(_, v)| v).sum();
                let rhs = dx.powf(-dd - a) * t.powf(b).max((1.0 + h).powf(-b));
                worst = worst.max(lhs / rhs);
            }
            if t * dx >= 2.0 {
                let lhs: f64 = terms.iter().zip(&dj).filter(|(_, d)| t * **d <= 1.0).map(|((_, v), _)| v).sum();
                let rhs = dx.powf(-dd - b) * t.powf(a);
                worst = worst.max(lhs / rhs);
            }
        }
        per_scale.push((t, worst));
    }
    let fitted = per_scale.iter().map(|p| p.1).fold(0.0, f64::max);
    let converged = per_scale.windows(2).all(|w| w[1].1 <= 1.5 * w[0].1.max(1e-300));
    Ok(Calibration { a, b, value: (opts.safety * fitted).max(1.0), per_scale, safety: opts.safety, converged })
}

fn nets_at(space: &DiscreteSpace, o: PointId, eta: f64, a: f64) -> Result<Vec<Net>> {
    let g = Field::constant(space.len(), 1.0);
    (1..=3).map(|k| maximal_net(space, o, eta.powi(k), a, &g)).collect()
}

fn eta_conditions(d: f64, gamma: f64, c1: f64, sigma: f64, c_half: f64, delta: f64, eta: f64) -> Vec<ConditionCheck> {
    vec![
        ConditionCheck::le("eta_first", "eta <= 1/2", eta, 0.5),
        ConditionCheck::le("cond3", "eta^(gamma/2) <= 1/2", eta.powf(gamma / 2.0), 0.5),
        ConditionCheck::le("cond5", "2 eta^gamma <= 1 - delta", 2.0 * eta.powf(gamma), 1.0 - delta),
        ConditionCheck::le("cond7", "eta <= 1/4", eta, 0.25),
        ConditionCheck::le(
            "cond8",
            "eta^gamma <= c1 2^(-D-gamma/2) / (4 C_{gamma/2,gamma} sigma^-gamma)",
            eta.powf(gamma),
            c1 * 2f64.powf(-d - gamma / 2.0) / (4.0 * c_half * sigma.powf(-gamma)),
        ),
        ConditionCheck::lt("eta_delta", "eta^D < 1 - delta", eta.powf(d), 1.0 - delta),
    ]
}

fn delta_conditions(kappa: f64, c_half: f64, c_three: f64, delta: f64) -> Vec<ConditionCheck> {
    vec![
        ConditionCheck::le("cond1", "C_{gamma/2,gamma} kappa delta <= 1/4", c_half * kappa * delta, 0.25),
        ConditionCheck::le("cond2", "C_{3gamma/2,2gamma} kappa delta <= 1/4", c_three * kappa * delta, 0.25),
        ConditionCheck::le("cond2_delta", "3/4 <= 1 - delta", 0.75, 1.0 - delta),
    ]
}

/// Fixes `kappa`, then the largest admissible `delta`, then the largest
/// dyadic `eta`, with the lattice-sum constants calibrated on the space.
pub fn choose_constants(
    space: &DiscreteSpace,
    o: PointId,
    gamma: f64,
    c: f64,
    c_assumed: bool,
    opts: &LedgerOptions,
) -> Result<ConstantLedger> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(invalid("gamma", "must lie in (0, 1]"));
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(invalid("c", "on-diagonal constant must lie in (0, 1)"));
    }
    let d = space.dimension();
    let c1 = c / 2.0;
    let c2 = (c / 2.0).powf(1.0 / gamma).min(0.25);
    let kappa = kappa_of(c1, d, gamma);
    let sigma = sigma_of(d, gamma);

    let draft = nets_at(space, o, opts.draft_eta, c2)?;
    let mut l = draft.iter().map(|n| (n.overlap as f64).max(n.average_constant)).fold(1.0, f64::max);
    let mut c_half = calibrate_sum_constant(space, o, gamma / 2.0, gamma, &draft, opts)?;
    let mut c_three = calibrate_sum_constant(space, o, 1.5 * gamma, 2.0 * gamma, &draft, opts)?;

    let mut attempt = 0;
    loop {
        let mut delta = (0.25f64).min(0.25 / (kappa * c_half.value.max(c_three.value)));
        while delta_conditions(kappa, c_half.value, c_three.value, delta).iter().any(|c| !c.holds) {
            delta *= 1.0 - 1e-15;
        }
        let mut found = None;
        let mut last_fail = String::new();
        for k in 1..=opts.max_k {
            let eta = 0.5f64.powi(k as i32);
            let conds = eta_conditions(d, gamma, c1, sigma, c_half.value, delta, eta);
            match conds.iter().find(|c| !c.holds) {
                None => {
                    found = Some(eta);
                    break;
                }
                Some(f) => last_fail = f.name.clone(),
            }
        }
        let eta = match found {
            Some(e) => e,
            None => {
                return Err(Error::Infeasible {
                    binding: last_fail,
                    detail: format!("no eta = 2^-k with k <= {} satisfies every condition", opts.max_k),
                })
            }
        };
        // Re-fit on nets at the final scales and keep the larger constants.
        let fine = nets_at(space, o, eta, c2)?;
        let fh = calibrate_sum_constant(space, o, gamma / 2.0, gamma, &fine, opts)?;
        let ft = calibrate_sum_constant(space, o, 1.5 * gamma, 2.0 * gamma, &fine, opts)?;
        l = fine.iter().map(|n| (n.overlap as f64).max(n.average_constant)).fold(l, f64::max);
        if (fh.value > c_half.value || ft.value > c_three.value) && attempt < 4 {
            attempt += 1;
            if fh.value > c_half.value {
                c_half = merge(c_half, fh);
            }
            if ft.value > c_three.value {
                c_three = merge(c_three, ft);
            }
            continue;
        }
        c_half.per_scale.extend(fh.per_scale);
        c_three.per_scale.extend(ft.per_scale);
        let rho = rho_of(delta, eta, d);
        let p = 1.0 / (1.0 + rho);
        let mut conditions = vec![eta_conditions(d, gamma, c1, sigma, c_half.value, delta, eta)[0].clone()];
        conditions.extend(delta_conditions(kappa, c_half.value, c_three.value, delta));
        conditions.extend(eta_conditions(d, gamma, c1, sigma, c_half.value, delta, eta).into_iter().skip(1));
        let mut provenance = BTreeMap::new();
        let note = |s: &str| s.to_string();
        provenance.insert(
            "c".into(),
            if c_assumed { note("assumed on-diagonal constant") } else { note("fitted on-diagonal constant of the scaled kernel") },
        );
        provenance.insert("c1".into(), note("c / 2"));
        provenance.insert("c2".into(), note("min{(c/2)^(1/gamma), 1/4}"));
        provenance.insert("kappa".into(), note("(c1 2^(-1-D-gamma/2))^-1"));
        provenance.insert("sigma".into(), note("min{1/4, (2(4^(D+3gamma/2) + 2/3))^(-1/gamma)}"));
        provenance.insert(
            "C".into(),
            format!(
                "lattice sums over nets at draft eta {} and final eta, max ratio x{}",
                opts.draft_eta, opts.safety
            ),
        );
        provenance.insert("delta".into(), note("largest value with cond1, cond2 and 1 - delta >= 3/4"));
        provenance.insert("eta".into(), note("largest 2^-k meeting every eta condition"));
        provenance.insert("L".into(), note("largest realised overlap or average constant of the calibration nets"));
        provenance.insert("rho".into(), note("log(1 - delta) / log(eta^D)"));
        provenance.insert("p".into(), note("1 / (1 + rho)"));
        return Ok(ConstantLedger {
            d,
            gamma,
            c,
            c_assumed,
            c1,
            c2,
            kappa,
            sigma,
            delta,
            eta,
            rho,
            p,
            l,
            c_half,
            c_three,
            conditions,
            provenance,
            e_emp: None,
            basepoint: o,
        });
    }
}

fn merge(mut a: Calibration, b: Calibration) -> Calibration {
    a.value = a.value.max(b.value);
    a.converged &= b.converged;
    a.per_scale.extend(b.per_scale);
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert!((kappa_of(0.25, 1.0, 1.0) - 2f64.powf(4.5)).abs() < 1e-12);
        assert!((sigma_of(1.0, 1.0) - 1.0 / (2.0 * (32.0 + 2.0 / 3.0))).abs() < 1e-15);
        assert!((sigma_of(1.0, 1.0) - 0.015_31).abs() < 1e-5);
    }
}
