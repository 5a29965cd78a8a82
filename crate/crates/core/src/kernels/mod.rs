//! Approximation-of-the-identity kernels and their certification.

mod certify;
mod chart;
pub mod heat;
mod split;
pub mod subordinator;

pub use certify::{verify_lai, Budget, FittedConstants, Witness};
pub use chart::{glue_kernel, reference_kernel, Chart};
pub use split::{split_ai, SplitKernel};
pub use subordinator::{laplace_check, subordinator_density, LaplaceCheck};

use crate::error::{invalid, Error, Result};
use crate::space::{DiscreteSpace, PointId, Topology};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Radial profile shapes on `[0, 1]`, rescaled by [`Profile::radius`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum Shape {
    Triangle,
    RaisedCosine,
    /// `(1 - u)^beta`.
    Power { beta: f64 },
    /// Indicator of `[0, 1)`.
    Step,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    #[serde(flatten)]
    pub shape: Shape,
    #[serde(default = "unit")]
    pub radius: f64,
    #[serde(default = "unit")]
    pub amplitude: f64,
}

fn unit() -> f64 {
    1.0
}

impl Profile {
    pub fn new(shape: Shape, radius: f64, amplitude: f64) -> Self {
        Profile { shape, radius, amplitude }
    }
    pub fn triangle() -> Self {
        Profile::new(Shape::Triangle, 1.0, 1.0)
    }

    pub fn eval(&self, u: f64) -> f64 {
        let v = u / self.radius;
        if v >= 1.0 {
            return 0.0;
        }
        let base = match self.shape {
            Shape::Triangle => 1.0 - v,
            Shape::RaisedCosine => 0.5 * (1.0 + (std::f64::consts::PI * v).cos()),
            Shape::Power { beta } => (1.0 - v).powf(beta),
            Shape::Step => 1.0,
        };
        self.amplitude * base
    }

    /// `int_{R^dim} psi(|y|) dy`, the limit mass of `t^-dim psi(d/t)`.
    pub fn mass(&self, dim: usize) -> f64 {
        let dim = dim as f64;
        // Surface area of the unit sphere in R^dim.
        let area = 2.0 * std::f64::consts::PI.powf(dim / 2.0) / gamma_fn(dim / 2.0);
        let r = crate::quad::integrate(|u| self.eval(u) * u.powf(dim - 1.0), 0.0, self.radius, 1e-14, 1e-12, 200)
            .map(|q| q.value)
            .unwrap_or(f64::NAN);
        area * r
    }

    /// Declared Hölder constant of exponent `gamma` in the variable `u`.
    pub fn declared_holder(&self, gamma: f64) -> f64 {
        let slope = match self.shape {
            Shape::RaisedCosine => std::f64::consts::FRAC_PI_2,
            _ => 1.0,
        };
        self.amplitude * (slope / self.radius).powf(gamma)
    }

    /// Samples `|psi(u) - psi(v)| / |u - v|^gamma` and rejects the profile
    /// when the declared constant is exceeded.
    pub fn check_holder(&self, gamma: f64) -> Result<()> {
        let declared = self.declared_holder(gamma);
        let m = 4096;
        let h = 1.25 * self.radius / m as f64;
        let vals: Vec<f64> = (0..=m).map(|i| self.eval(i as f64 * h)).collect();
        let mut worst: f64 = 0.0;
        let mut step = 1;
        while step <= m {
            for i in 0..=m - step {
                let q = (vals[i + step] - vals[i]).abs() / (step as f64 * h).powf(gamma);
                worst = worst.max(q);
            }
            step *= 2;
        }
        if worst > declared * (1.0 + 1e-9) {
            return Err(Error::NotHolder { quotient: worst, declared });
        }
        Ok(())
    }
}

/// Gamma function at half-integers and integers, enough for sphere areas.
fn gamma_fn(x: f64) -> f64 {
    if (x - 0.5).abs() < 1e-12 {
        std::f64::consts::PI.sqrt()
    } else if (x - 1.0).abs() < 1e-12 {
        1.0
    } else {
        (x - 1.0) * gamma_fn(x - 1.0)
    }
}

/// Kernel families that can be named in a configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum KernelSpec {
    /// `t^-D psi(d / t)`.
    Bump {
        profile: Profile,
        #[serde(default = "unit")]
        gamma: f64,
    },
    /// `t (t^2 + d^2)^{-(D+1)/2}`.
    PoissonModel,
    /// Heat kernel at time `t^2` on a flat torus.
    HeatTorus,
    /// Heat kernel subordinated by the stable subordinator of index `alpha`.
    Subordinated { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Part {
    Local,
    Tail,
}

pub type KernelFn = dyn Fn(f64, PointId, PointId) -> f64 + Send + Sync;

pub(crate) enum KernelKind {
    Bump { profile: Profile },
    Poisson,
    Heat { period: f64 },
    Subordinated { period: f64, alpha: f64, table: SubTable },
    Localized { inner: Kernel, lambda: f64, part: Part },
    Glued { chart: Arc<Chart>, source: Kernel, reference: Kernel },
    Explicit { f: Box<KernelFn>, support: Option<f64>, label: String },
}

/// A kernel `K(t, x, y)` on a fixed space, possibly multiplied by a scale.
#[derive(Clone)]
pub struct Kernel {
    space: Arc<DiscreteSpace>,
    kind: Arc<KernelKind>,
    scale: f64,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Kernel({}, scale={})", self.name(), self.scale)
    }
}

/// Construct a kernel from a configuration entry.
pub fn make_kernel(space: Arc<DiscreteSpace>, spec: &KernelSpec) -> Result<Kernel> {
    let kind = match spec {
        KernelSpec::Bump { profile, gamma } => {
            if !(profile.radius > 0.0) {
                return Err(invalid("profile.radius", "must be positive"));
            }
            if !(*gamma > 0.0 && *gamma <= 1.0) {
                return Err(invalid("gamma", "must lie in (0, 1]"));
            }
            profile.check_holder(*gamma)?;
            KernelKind::Bump { profile: *profile }
        }
        KernelSpec::PoissonModel => KernelKind::Poisson,
        KernelSpec::HeatTorus => KernelKind::Heat { period: torus_period(&space)? },
        KernelSpec::Subordinated { alpha } => {
            if !(*alpha > 0.0 && *alpha < 1.0) {
                return Err(invalid("alpha", "must lie in (0, 1)"));
            }
            let period = torus_period(&space)?;
            let t_min = 2.0 * space.resolution();
            let table = SubTable::build(*alpha, period * period, t_min)?;
            KernelKind::Subordinated { period, alpha: *alpha, table }
        }
    };
    Ok(Kernel { space, kind: Arc::new(kind), scale: 1.0 })
}

fn torus_period(space: &DiscreteSpace) -> Result<f64> {
    if space.topology() != Topology::Torus {
        return Err(invalid("type", "heat kernels need a torus space"));
    }
    Ok(space.period().expect("torus"))
}

impl Kernel {
    /// Kernel from an arbitrary function of `(t, x, y)`.
    pub fn explicit(
        space: Arc<DiscreteSpace>,
        label: &str,
        support: Option<f64>,
        f: impl Fn(f64, PointId, PointId) -> f64 + Send + Sync + 'static,
    ) -> Kernel {
        Kernel {
            space,
            kind: Arc::new(KernelKind::Explicit { f: Box::new(f), support, label: label.into() }),
            scale: 1.0,
        }
    }

    pub(crate) fn from_kind(space: Arc<DiscreteSpace>, kind: KernelKind) -> Kernel {
        Kernel { space, kind: Arc::new(kind), scale: 1.0 }
    }

    pub fn space(&self) -> &Arc<DiscreteSpace> {
        &self.space
    }
    pub fn scale(&self) -> f64 {
        self.scale
    }
    /// Same kernel multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Kernel {
        Kernel { space: self.space.clone(), kind: self.kind.clone(), scale: self.scale * s }
    }

    pub fn name(&self) -> String {
        match &*self.kind {
            KernelKind::Bump { .. } => "bump".into(),
            KernelKind::Poisson => "poisson-model".into(),
            KernelKind::Heat { .. } => "heat-torus".into(),
            KernelKind::Subordinated { alpha, .. } => format!("subordinated({alpha})"),
            KernelKind::Localized { inner, part, .. } => {
                format!("{}[{}]", inner.name(), if *part == Part::Local { "local" } else { "tail" })
            }
            KernelKind::Glued { source, .. } => format!("glued({})", source.name()),
            KernelKind::Explicit { label, .. } => label.clone(),
        }
    }

    /// Radius outside of which `K(t, x, .)` vanishes, if finite.
    pub fn support_radius(&self, t: f64) -> Option<f64> {
        match &*self.kind {
            KernelKind::Bump { profile } => Some(profile.radius * t),
            KernelKind::Localized { inner, lambda, part } => match part {
                Part::Local => Some(inner.support_radius(t).map_or(*lambda, |r| r.min(*lambda))),
                Part::Tail => inner.support_radius(t),
            },
            KernelKind::Glued { source, reference, chart } => {
                let s = source.support_radius(t)?;
                let r = reference.support_radius(t)?;
                Some(r.max(s * chart.q))
            }
            KernelKind::Explicit { support, .. } => *support,
            _ => None,
        }
    }

    pub fn eval(&self, t: f64, x: PointId, y: PointId) -> f64 {
        self.scale * self.eval_raw(t, x, y)
    }

    fn eval_raw(&self, t: f64, x: PointId, y: PointId) -> f64 {
        let sp = &*self.space;
        let dd = sp.dimension();
        match &*self.kind {
            KernelKind::Bump { profile } => t.powf(-dd) * profile.eval(sp.dist(x, y) / t),
            KernelKind::Poisson => {
                let d = sp.dist(x, y);
                t * (t * t + d * d).powf(-(dd + 1.0) / 2.0)
            }
            KernelKind::Heat { period } => {
                let delta = coord_delta(sp, x, y);
                heat::heat_torus(t * t, &delta, *period)
            }
            KernelKind::Subordinated { period, table, .. } => {
                let delta = coord_delta(sp, x, y);
                table.eval(t, &delta, *period, sp.coord_dim())
            }
            KernelKind::Localized { inner, lambda, part } => {
                let phi = crate::space::smooth_cutoff(sp.dist(x, y), lambda / 2.0, *lambda);
                let k = inner.eval(t, x, y);
                match part {
                    Part::Local => phi * k,
                    Part::Tail => (1.0 - phi) * k,
                }
            }
            KernelKind::Glued { chart, source, reference } => {
                let xi = chart.chi(x) * chart.chi(y);
                let s = reference.eval(t, x, y);
                if xi > 0.0 {
                    let (a, b) = (chart.inverse[x].expect("patch"), chart.inverse[y].expect("patch"));
                    xi * source.eval(t, a, b) + (1.0 - xi) * s
                } else {
                    s
                }
            }
            KernelKind::Explicit { f, .. } => f(t, x, y),
        }
    }
}

fn coord_delta(sp: &DiscreteSpace, x: PointId, y: PointId) -> Vec<f64> {
    sp.coords(x).iter().zip(sp.coords(y)).map(|(a, b)| a - b).collect()
}

/// Precomputed density values on a geometric grid in `sigma = s / t^2`.
pub(crate) struct SubTable {
    sigmas: Vec<f64>,
    density: Vec<f64>,
    step: f64,
    /// Above `s_flat` the torus heat kernel is constant to double precision.
    s_flat: f64,
}

impl SubTable {
    const SIGMA_MIN: f64 = 1e-4;
    const NODES_PER_SPAN: f64 = 399.0; // over eight decades

    fn build(alpha: f64, s_flat: f64, t_min: f64) -> Result<SubTable> {
        let step = (1e8f64).ln() / Self::NODES_PER_SPAN;
        let sigma_max = s_flat / (t_min * t_min);
        let mut sigmas = Vec::new();
        let mut density = Vec::new();
        let mut k = 0;
        loop {
            let s = Self::SIGMA_MIN * (step * k as f64).exp();
            sigmas.push(s);
            density.push(subordinator::density(alpha, s)?);
            if s >= sigma_max {
                break;
            }
            k += 1;
        }
        Ok(SubTable { sigmas, density, step, s_flat })
    }

    fn eval(&self, t: f64, delta: &[f64], period: f64, dim: usize) -> f64 {
        let t2 = t * t;
        let last = self
            .sigmas
            .iter()
            .rposition(|&s| s * t2 <= self.s_flat)
            .unwrap_or(0);
        let mut sum = 0.0;
        let mut mass = 0.0;
        for k in 0..=last {
            let w = if k == 0 || k == last { 0.5 * self.step } else { self.step };
            let wf = w * self.density[k];
            if wf == 0.0 {
                continue;
            }
            mass += wf;
            sum += wf * heat::heat_torus(self.sigmas[k] * t2, delta, period);
        }
        // Remaining subordinator mass sits where the heat kernel is flat.
        sum + (1.0 - mass) / period.powi(dim as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SpaceSpec;

    fn torus(cells: usize) -> Arc<DiscreteSpace> {
        Arc::new(
            DiscreteSpace::build(&SpaceSpec {
                topology: Topology::Torus,
                dim: 1,
                lower: 0.0,
                extent: 1.0,
                spacing: 1.0 / cells as f64,
            })
            .unwrap(),
        )
    }

    #[test]
    fn profiles_holder_check() {
        assert!(Profile::triangle().check_holder(1.0).is_ok());
        assert!(Profile::new(Shape::RaisedCosine, 0.5, 1.0).check_holder(1.0).is_ok());
        assert!(Profile::new(Shape::Power { beta: 0.5 }, 1.0, 1.0).check_holder(0.5).is_ok());
        assert!(Profile::new(Shape::Power { beta: 0.5 }, 1.0, 1.0).check_holder(1.0).is_err());
        assert!(matches!(
            Profile::new(Shape::Step, 1.0, 1.0).check_holder(0.5),
            Err(Error::NotHolder { .. })
        ));
    }

    #[test]
    fn poisson_diagonal() {
        let s = Arc::new(
            DiscreteSpace::build(&SpaceSpec {
                topology: Topology::Grid,
                dim: 1,
                lower: 0.0,
                extent: 1.0,
                spacing: 1.0 / 64.0,
            })
            .unwrap(),
        );
        let k = make_kernel(s, &KernelSpec::PoissonModel).unwrap();
        for &t in &[1.0, 0.5, 0.1] {
            assert!((k.eval(t, 3, 3) - 1.0 / t).abs() < 1e-12);
        }
    }

    #[test]
    fn heat_needs_torus() {
        let s = Arc::new(
            DiscreteSpace::build(&SpaceSpec {
                topology: Topology::Grid,
                dim: 1,
                lower: 0.0,
                extent: 1.0,
                spacing: 0.25,
            })
            .unwrap(),
        );
        assert!(make_kernel(s, &KernelSpec::HeatTorus).is_err());
    }

    #[test]
    fn half_subordination_is_periodic_poisson() {
        let s = torus(64);
        let k = make_kernel(s.clone(), &KernelSpec::Subordinated { alpha: 0.5 }).unwrap();
        for &t in &[0.05, 0.2, 1.0] {
            for y in [0usize, 3, 10, 32] {
                let d = s.coords(0)[0] - s.coords(y)[0];
                let exact = heat::poisson_1d_periodic(t, d, 1.0);
                let v = k.eval(t, 0, y);
                assert!((v - exact).abs() < 1e-6 * exact.max(1.0), "t={t} y={y}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn subordinated_mass_is_one() {
        let s = torus(64);
        let k = make_kernel(s.clone(), &KernelSpec::Subordinated { alpha: 0.3 }).unwrap();
        for &t in &[0.5, 1.0] {
            let m: f64 = (0..s.len()).map(|y| k.eval(t, 5, y) * s.weight(y)).sum();
            assert!((m - 1.0).abs() < 1e-6, "t={t}: {m}");
        }
    }
}
