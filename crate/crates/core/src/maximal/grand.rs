use super::lp::lp_best;
use super::testfn::CandidateLibrary;
use crate::error::Result;
use crate::grid;
use crate::space::{DiscreteSpace, Field, PointId};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrandMethod {
    /// Certified lower bound from a fixed library of test functions.
    CandidateFamily,
    /// Linear programming over all test functions on each ball.
    LpExact,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct GrandOptions {
    pub r_ratio: f64,
    /// Smallest radius; defaults to twice the resolution.
    pub r_min: Option<f64>,
    pub r_max: f64,
    pub prune: bool,
    /// Balls with more points skip the sign envelopes of the candidate
    /// family.
    pub envelope_limit: usize,
}

impl Default for GrandOptions {
    fn default() -> Self {
        GrandOptions { r_ratio: grid::RATIO, r_min: None, r_max: 1.0, prune: true, envelope_limit: super::testfn::ENVELOPE_LIMIT }
    }
}

impl GrandOptions {
    pub fn radii(&self, space: &DiscreteSpace) -> Vec<f64> {
        let lo = self.r_min.unwrap_or(2.0 * space.resolution()).min(self.r_max);
        grid::geometric_down(self.r_max, lo, self.r_ratio)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GrandValue {
    pub value: f64,
    pub radius: f64,
    pub label: String,
}

/// Candidate libraries for one point and every radius, reusable across
/// many functions.
pub struct GrandEvaluator {
    libs: Vec<CandidateLibrary>,
}

impl GrandEvaluator {
    pub fn new(space: &DiscreteSpace, x: PointId, gamma: f64, opts: &GrandOptions) -> Self {
        let libs = opts.radii(space).into_iter().map(|r| CandidateLibrary::build_with(space, x, r, gamma, opts.envelope_limit)).collect();
        GrandEvaluator { libs }
    }

    pub fn eval(&self, space: &DiscreteSpace, f: &Field) -> GrandValue {
        let mut best = GrandValue { value: 0.0, radius: f64::NAN, label: "none".into() };
        for lib in &self.libs {
            let (v, l) = lib.best(space, f);
            if v > best.value {
                best = GrandValue { value: v, radius: lib.r, label: l.into() };
            }
        }
        best
    }
}

/// `G_gamma f(x)` by the chosen method over the radius grid.
pub fn grand_maximal_at(
    space: &DiscreteSpace,
    f: &Field,
    gamma: f64,
    x: PointId,
    method: GrandMethod,
    opts: &GrandOptions,
) -> Result<GrandValue> {
    f.check(space)?;
    match method {
        GrandMethod::CandidateFamily => Ok(GrandEvaluator::new(space, x, gamma, opts).eval(space, f)),
        GrandMethod::LpExact => {
            // Visit radii by decreasing box bound and stop once no radius can
            // beat the current best.
            let mut order: Vec<(f64, f64)> = opts
                .radii(space)
                .into_iter()
                .map(|r| {
                    let lib_bound = box_bound(space, f, x, r, gamma);
                    (lib_bound, r)
                })
                .collect();
            order.sort_by(|a, b| b.0.total_cmp(&a.0));
            let mut best = GrandValue { value: 0.0, radius: f64::NAN, label: "lp".into() };
            for (ub, r) in order {
                if ub <= best.value {
                    break;
                }
                let v = lp_best(space, f, x, r, gamma, opts.prune)?;
                if v > best.value {
                    best = GrandValue { value: v, radius: r, label: "lp".into() };
                }
            }
            Ok(best)
        }
    }
}

fn box_bound(space: &DiscreteSpace, f: &Field, x: PointId, r: f64, gamma: f64) -> f64 {
    let b = super::testfn::ball_data(space, x, r, gamma);
    let amp = r.powf(-space.dimension());
    b.ids.iter().zip(&b.bound).map(|(&y, &v)| v * amp * space.weight(y) * f.get(y).abs()).sum()
}

/// `G_gamma f` at each listed point.
pub fn grand_maximal(
    space: &DiscreteSpace,
    f: &Field,
    gamma: f64,
    method: GrandMethod,
    opts: &GrandOptions,
    points: &[PointId],
) -> Result<Vec<GrandValue>> {
    points.iter().map(|&x| grand_maximal_at(space, f, gamma, x, method, opts)).collect()
}
