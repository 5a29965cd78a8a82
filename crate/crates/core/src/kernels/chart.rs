use super::{make_kernel, Kernel, KernelKind, KernelSpec, Profile, Shape};
use crate::error::{invalid, Error, Result};
use crate::space::{smooth_cutoff, DiscreteSpace, PointId};
use std::sync::Arc;

/// A dilation chart `eta(x) = c + factor (x - p)` from `B(p, r0)` in the
/// source space into a coordinate space.
#[derive(Debug, Clone)]
pub struct Chart {
    pub source: Arc<DiscreteSpace>,
    pub target: Arc<DiscreteSpace>,
    /// `eta^{-1}` on the target points of the patch image.
    pub inverse: Vec<Option<PointId>>,
    pub center: Vec<f64>,
    pub r0: f64,
    pub q: f64,
}

impl Chart {
    pub fn dilation(
        source: Arc<DiscreteSpace>,
        target: Arc<DiscreteSpace>,
        factor: f64,
        p: PointId,
        center: Vec<f64>,
        r0: f64,
        q: f64,
    ) -> Result<Chart> {
        let dim = source.coord_dim();
        if dim == 0 || target.coord_dim() != dim || center.len() != dim {
            return Err(invalid("chart", "source, target and center must share a coordinate dimension"));
        }
        if !(factor > 0.0) || !(q >= 1.0) || !(r0 > 0.0) {
            return Err(invalid("chart", "need factor > 0, q >= 1, r0 > 0"));
        }
        if factor > q || 1.0 / factor > q {
            return Err(invalid("q", "dilation factor is not within the bi-Lipschitz constant"));
        }
        let pc = source.coords(p).to_vec();
        let mut inverse = vec![None; target.len()];
        for (xt, slot) in inverse.iter_mut().enumerate() {
            let y: Vec<f64> = target
                .coords(xt)
                .iter()
                .zip(&center)
                .zip(&pc)
                .map(|((a, c), b)| b + (a - c) / factor)
                .collect();
            let z = source.nearest(&y)?;
            let off: f64 = source.coords(z).iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if off <= 1e-9 * source.resolution().max(1e-300) && source.dist(p, z) < r0 {
                *slot = Some(z);
            }
        }
        let chart = Chart { source, target, inverse, center, r0, q };
        // The cutoff region must sit inside the patch image.
        for x in 0..chart.target.len() {
            if chart.chi(x) > 0.0 && chart.inverse[x].is_none() {
                return Err(Error::PatchOverflow { point: x });
            }
        }
        Ok(chart)
    }

    fn radius_from_center(&self, x: PointId) -> f64 {
        self.target
            .coords(x)
            .iter()
            .zip(&self.center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Cutoff equal to one on `B(c, r0/(4q))` and vanishing beyond `r0/(2q)`.
    pub fn chi(&self, x: PointId) -> f64 {
        let r = self.radius_from_center(x);
        smooth_cutoff(r, self.r0 / (4.0 * self.q), self.r0 / (2.0 * self.q))
    }
}

/// Reference kernel `t^-n zeta(|X - Y| / t)` with `zeta` a triangle supported
/// in `[0, r0/q]`, scaled so its Hölder constant of order `gamma` is one.
pub fn reference_kernel(target: Arc<DiscreteSpace>, r0: f64, q: f64, gamma: f64) -> Result<Kernel> {
    let rho = r0 / q;
    let profile = Profile::new(Shape::Triangle, rho, rho.powf(gamma).min(1.0));
    make_kernel(target, &KernelSpec::Bump { profile, gamma })
}

/// Transplants a kernel through a chart:
/// `Xi K(t, eta^-1 X, eta^-1 Y) + (1 - Xi) S(t, X, Y)` with
/// `Xi = chi(X) chi(Y)`.
pub fn glue_kernel(kernel: &Kernel, chart: &Chart, gamma: f64) -> Result<Kernel> {
    if !Arc::ptr_eq(kernel.space(), &chart.source) {
        return Err(invalid("chart", "kernel does not live on the chart source"));
    }
    let limit = chart.r0 / (8.0 * chart.q * chart.q);
    match kernel.support_radius(1.0) {
        Some(s) if s <= limit * (1.0 + 1e-12) => {}
        Some(s) => return Err(Error::NotLocal { support: s, limit }),
        None => return Err(Error::NotLocal { support: f64::INFINITY, limit }),
    }
    let reference = reference_kernel(chart.target.clone(), chart.r0, chart.q, gamma)?;
    Ok(Kernel::from_kind(
        chart.target.clone(),
        KernelKind::Glued { chart: Arc::new(chart.clone()), source: kernel.clone(), reference },
    ))
}
