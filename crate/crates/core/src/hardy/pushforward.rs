use super::{conjugate, Atom, BallRef, Ion, IonVerdict};
use crate::error::{invalid, Error, Result};
use crate::space::{DiscreteSpace, Field, PointId};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Transport of functions from `source` to `target` through a
/// bi-Lipschitz map `psi` defined on a patch of the target.
#[derive(Debug, Clone)]
pub struct PushforwardSpec {
    pub source: Arc<DiscreteSpace>,
    pub target: Arc<DiscreteSpace>,
    /// `psi(x')` for target points of the patch.
    pub psi: Vec<Option<PointId>>,
    /// Bi-Lipschitz constant.
    pub a: f64,
    /// Multiplier on the source, with `|phi| <= l` and Lipschitz constant
    /// at most `l`.
    pub multiplier: Field,
    pub l: f64,
    /// Density `m(psi(x')) / m'(x')` on the target.
    pub rho: Field,
    /// Ahlfors comparison constant of the two spaces.
    pub kappa_a: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PushforwardAudit {
    pub lipschitz_min: f64,
    pub lipschitz_max: f64,
    pub rho_max: f64,
    pub multiplier_sup: f64,
    pub multiplier_lipschitz: f64,
    pub within: bool,
}

impl PushforwardSpec {
    /// Map built from target coordinates, `psi(x') = p + (x' - c) / factor`,
    /// keeping the target points that land exactly on source points.
    pub fn dilation(
        source: Arc<DiscreteSpace>,
        target: Arc<DiscreteSpace>,
        factor: f64,
        p: &[f64],
        c: &[f64],
        multiplier: Field,
        l: f64,
    ) -> Result<Self> {
        if !(factor > 0.0) {
            return Err(invalid("factor", "must be positive"));
        }
        let mut psi = vec![None; target.len()];
        for (xt, slot) in psi.iter_mut().enumerate() {
            let y: Vec<f64> = target.coords(xt).iter().zip(c).zip(p).map(|((x, c), p)| p + (x - c) / factor).collect();
            let z = source.nearest(&y)?;
            let off: f64 = source.coords(z).iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if off <= 1e-9 * source.resolution() {
                *slot = Some(z);
            }
        }
        let a = factor.max(1.0 / factor);
        Self::from_map(source, target, psi, a, multiplier, l)
    }

    pub fn identity(space: Arc<DiscreteSpace>, multiplier: Field, l: f64) -> Result<Self> {
        let psi = (0..space.len()).map(Some).collect();
        Self::from_map(space.clone(), space, psi, 1.0, multiplier, l)
    }

    fn from_map(
        source: Arc<DiscreteSpace>,
        target: Arc<DiscreteSpace>,
        psi: Vec<Option<PointId>>,
        a: f64,
        multiplier: Field,
        l: f64,
    ) -> Result<Self> {
        multiplier.check(&source)?;
        let rho = Field::new(
            psi.iter().enumerate().map(|(x, y)| y.map_or(0.0, |y| source.weight(y) / target.weight(x))).collect(),
        );
        let ca = |s: &DiscreteSpace| s.ahlfors().map_or(1.0, |c| c.a);
        let kappa_a = ca(&source) * ca(&target);
        let mut spec = PushforwardSpec { source, target, psi, a, multiplier, l, rho, kappa_a, h: 0.0 };
        spec.h = spec.threshold(1.0, f64::INFINITY);
        Ok(spec)
    }

    /// `max{L/A, L/(A s), L A^{2D/p'} kappa_A^{2/p'}}`.
    pub fn threshold(&self, s: f64, p: f64) -> f64 {
        let q = conjugate(p);
        let d = self.source.dimension();
        let (l, a) = (self.l, self.a);
        (l / a).max(l / (a * s)).max(l * a.powf(2.0 * d / q) * self.kappa_a.powf(2.0 / q))
    }

    pub fn with_h(mut self, h: f64) -> Self {
        self.h = h;
        self
    }

    /// Sampled bi-Lipschitz ratios, density bound and multiplier bounds.
    pub fn audit(&self) -> PushforwardAudit {
        let pts: Vec<(PointId, PointId)> = self.psi.iter().enumerate().filter_map(|(x, y)| y.map(|y| (x, y))).collect();
        let step = (pts.len() / 64).max(1);
        let sample: Vec<_> = pts.iter().step_by(step).collect();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (i, &&(x1, y1)) in sample.iter().enumerate() {
            for &&(x2, y2) in &sample[..i] {
                let r = self.source.dist(y1, y2) / self.target.dist(x1, x2);
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
        let rho_max = self.rho.sup_norm();
        let m = &self.multiplier;
        let sup = m.sup_norm();
        let n = self.source.len();
        let mut lip: f64 = 0.0;
        let stride = (n / 256).max(1);
        for y in (0..n).step_by(stride) {
            for z in 0..n {
                if z != y {
                    lip = lip.max((m.get(y) - m.get(z)).abs() / self.source.dist(y, z));
                }
            }
        }
        let tol = 1.0 + 1e-9;
        let d = self.source.dimension();
        let within = lo * self.a >= 1.0 / tol
            && hi <= self.a * tol
            && rho_max <= self.a.powf(d) * tol
            && sup <= self.l * tol
            && lip <= self.l * tol;
        PushforwardAudit {
            lipschitz_min: lo,
            lipschitz_max: hi,
            rho_max,
            multiplier_sup: sup,
            multiplier_lipschitz: lip,
            within,
        }
    }
}

/// `g(x') = rho(x') phi(psi(x')) a(psi(x')) / H` on the patch, `0` elsewhere,
/// as an ion at scale `A s` on the ball of radius `A r_B` around the
/// preimage of the center.
pub fn atom_to_ion(atom: &Atom, spec: &PushforwardSpec) -> Result<(Ion, IonVerdict)> {
    let src = &spec.source;
    atom.values.check(src)?;
    let threshold = spec.threshold(atom.scale, atom.p);
    if spec.h < threshold * (1.0 - 1e-12) {
        return Err(Error::HBelowThreshold { h: spec.h, threshold });
    }
    let mut preimage = vec![None; src.len()];
    for (x, y) in spec.psi.iter().enumerate() {
        if let Some(y) = y {
            preimage[*y] = Some(x);
        }
    }
    for y in atom.values.support() {
        if preimage[y].is_none() {
            return Err(Error::PatchOverflow { point: y });
        }
    }
    let center = preimage[atom.ball.center].ok_or(Error::PatchOverflow { point: atom.ball.center })?;
    let g = Field::new(
        spec.psi
            .iter()
            .enumerate()
            .map(|(x, y)| {
                y.map_or(0.0, |y| spec.rho.get(x) * spec.multiplier.get(y) * atom.values.get(y) / spec.h)
            })
            .collect(),
    );
    let ball = BallRef { center, radius: spec.a * atom.ball.radius };
    Ion::from_field(&spec.target, g, ball, spec.a * atom.scale, atom.p)
}
