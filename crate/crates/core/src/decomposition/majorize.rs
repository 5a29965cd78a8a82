use super::ledger::ConstantLedger;
use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::maximal::{hl_maximal_at, radial_maximal, GrandEvaluator};
use crate::space::Field;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MajorizationSample {
    pub index: usize,
    /// `max |int phi f|` over the fixed cutoff family.
    pub family: f64,
    /// Grand maximal value at the basepoint, when an evaluator is given.
    pub grand: Option<f64>,
    /// `(M((K* f)^p)(o))^{1/p}`.
    pub denominator: f64,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MajorizationReport {
    pub p: f64,
    /// Largest ratio over the samples.
    pub e_emp: f64,
    /// Largest ratio using the fixed family only.
    pub e_family: f64,
    pub skipped: usize,
    pub samples: Vec<MajorizationSample>,
}

/// Compares pairings against test functions at the ledger's basepoint with
/// `(M((K* f)^p))^{1/p}`, `M` the Hardy–Littlewood maximal function over
/// all radii up to the diameter.
pub fn majorization_check(
    kernel: &Kernel,
    ledger: &ConstantLedger,
    family: &[(String, Field)],
    samples: &[Field],
    grand: Option<&GrandEvaluator>,
) -> Result<MajorizationReport> {
    let sp = kernel.space();
    let o = ledger.basepoint;
    let p = ledger.p;
    let rows: Vec<Result<MajorizationSample>> = samples
        .par_iter()
        .enumerate()
        .map(|(index, f)| {
            f.check(sp)?;
            let fam = family.iter().map(|(_, phi)| phi.mul(f).integral(sp).abs()).fold(0.0, f64::max);
            let gv = grand.map(|g| g.eval(sp, f).value);
            let num = gv.map_or(fam, |g| g.max(fam));
            let denominator = if f.sup_norm() == 0.0 {
                0.0
            } else {
                let kf = radial_maximal(kernel, f, 0.0)?.values.map(|v| v.powf(p));
                hl_maximal_at(sp, &kf, sp.diameter(), o).powf(1.0 / p)
            };
            let ratio = if denominator > 0.0 {
                Some(num / denominator)
            } else if num == 0.0 {
                None
            } else {
                return Err(Error::InvalidParameter {
                    name: "kernel".into(),
                    reason: format!("sample {index}: K* f vanishes while a pairing does not; kernel certification failed"),
                });
            };
            Ok(MajorizationSample { index, family: fam, grand: gv, denominator, ratio })
        })
        .collect();
    let samples: Vec<MajorizationSample> = rows.into_iter().collect::<Result<_>>()?;
    let e_emp = samples.iter().filter_map(|s| s.ratio).fold(0.0, f64::max);
    let e_family = samples
        .iter()
        .filter(|s| s.denominator > 0.0)
        .map(|s| s.family / s.denominator)
        .fold(0.0, f64::max);
    let skipped = samples.iter().filter(|s| s.ratio.is_none()).count();
    Ok(MajorizationReport { p, e_emp, e_family, skipped, samples })
}
