//! Atoms, ions, transport of atoms to ions, the `h^1` norm surrogate and
//! the random-atom suite.

mod pushforward;
mod suite;

pub use pushforward::{atom_to_ion, PushforwardAudit, PushforwardSpec};
pub use suite::{atom_maximal_suite, bound_shape, random_atom, AtomRecord, AtomSuiteOptions, AtomSuiteReport, ShapeFit};

use crate::error::Result;
use crate::kernels::Kernel;
use crate::maximal::radial_maximal;
use crate::space::{DiscreteSpace, Field, PointId};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    Standard,
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallRef {
    pub center: PointId,
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Atom {
    pub values: Field,
    pub ball: BallRef,
    pub scale: f64,
    pub p: f64,
    pub flavor: Flavor,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Ion {
    pub values: Field,
    pub ball: BallRef,
    pub scale: f64,
    pub p: f64,
    pub mean: f64,
    /// `m(B)^{-1/p'} - ||g||_p`; for `p = inf` the smallest pointwise gap.
    pub size_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "clause", rename_all = "kebab-case")]
pub enum Rejection {
    Exponent { p: f64 },
    Support { point: PointId },
    Size { norm: f64, limit: f64 },
    Cancellation { mean: f64, tolerance: f64 },
    Mean { mean: f64, limit: f64 },
    Radius { radius: f64, scale: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AtomVerdict {
    Standard,
    Global,
    Reject(Vec<Rejection>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IonVerdict {
    Ion,
    Reject(Vec<Rejection>),
}

/// Conjugate exponent; `p = inf` gives 1.
pub fn conjugate(p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

const REL: f64 = 1e-12;

struct Common {
    mean: f64,
    l1: f64,
    margin: f64,
}

fn common(space: &DiscreteSpace, g: &Field, ball: BallRef, p: f64, out: &mut Vec<Rejection>) -> Result<Common> {
    g.check(space)?;
    if !(p > 1.0) {
        out.push(Rejection::Exponent { p });
    }
    for y in g.support() {
        if space.dist(ball.center, y) > ball.radius * (1.0 + REL) {
            out.push(Rejection::Support { point: y });
            break;
        }
    }
    let measure = space.ball_measure(ball.center, ball.radius * (1.0 + REL));
    let limit = measure.powf(-1.0 / conjugate(p));
    let (norm, margin) = if p.is_infinite() {
        let s = g.sup_norm();
        (s, limit - s)
    } else {
        let s = g.lp_norm(space, p);
        (s, limit - s)
    };
    if norm > limit * (1.0 + REL) {
        out.push(Rejection::Size { norm, limit });
    }
    Ok(Common { mean: g.integral(space), l1: g.l1_norm(space), margin })
}

/// Classifies `a` as a standard atom, a global atom, or neither.
pub fn validate_atom(space: &DiscreteSpace, a: &Field, ball: BallRef, s: f64, p: f64) -> Result<AtomVerdict> {
    let mut basic = Vec::new();
    let c = common(space, a, ball, p, &mut basic)?;
    if !basic.is_empty() {
        return Ok(AtomVerdict::Reject(basic));
    }
    let tolerance = 1e-10 * c.l1;
    let cancels = c.mean.abs() <= tolerance;
    if ball.radius <= s * (1.0 + REL) && cancels {
        return Ok(AtomVerdict::Standard);
    }
    if (ball.radius - s).abs() <= REL * s {
        return Ok(AtomVerdict::Global);
    }
    let mut reasons = Vec::new();
    if !cancels {
        reasons.push(Rejection::Cancellation { mean: c.mean, tolerance });
    }
    reasons.push(Rejection::Radius { radius: ball.radius, scale: s });
    Ok(AtomVerdict::Reject(reasons))
}

/// Ion test: size as for atoms, radius at most `s`, `|int g| <= r_B`.
pub fn validate_ion(space: &DiscreteSpace, g: &Field, ball: BallRef, s: f64, p: f64) -> Result<IonVerdict> {
    let mut reasons = Vec::new();
    let c = common(space, g, ball, p, &mut reasons)?;
    if ball.radius > s * (1.0 + REL) {
        reasons.push(Rejection::Radius { radius: ball.radius, scale: s });
    }
    let limit = ball.radius + 1e-10 * c.l1;
    if c.mean.abs() > limit {
        reasons.push(Rejection::Mean { mean: c.mean, limit });
    }
    Ok(if reasons.is_empty() { IonVerdict::Ion } else { IonVerdict::Reject(reasons) })
}

impl Atom {
    pub fn verdict(&self, space: &DiscreteSpace) -> Result<AtomVerdict> {
        validate_atom(space, &self.values, self.ball, self.scale, self.p)
    }
}

impl Ion {
    pub fn from_field(space: &DiscreteSpace, values: Field, ball: BallRef, scale: f64, p: f64) -> Result<(Ion, IonVerdict)> {
        let mut scratch = Vec::new();
        let c = common(space, &values, ball, p, &mut scratch)?;
        let (mean, size_margin) = (c.mean, c.margin);
        let verdict = validate_ion(space, &values, ball, scale, p)?;
        Ok((Ion { values, ball, scale, p, mean, size_margin }, verdict))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyEstimate {
    pub l1: f64,
    pub maximal_l1: f64,
    pub total: f64,
}

/// `||f||_1 + ||K* f||_1`, equivalent to the local Hardy norm for a
/// certified kernel.
pub fn hardy_norm_estimate(f: &Field, kernel: &Kernel) -> Result<HardyEstimate> {
    let sp = kernel.space();
    f.check(sp)?;
    let l1 = f.l1_norm(sp);
    let maximal_l1 = if f.sup_norm() == 0.0 { 0.0 } else { radial_maximal(kernel, f, 0.0)?.values.l1_norm(sp) };
    Ok(HardyEstimate { l1, maximal_l1, total: l1 + maximal_l1 })
}
