//! Density of the one-sided stable subordinator, normalised by
//! `exp(-z^alpha) = \int_0^inf F_alpha(s) e^{-s z} ds / s`.

use crate::error::{invalid, Result};
use crate::quad;
use std::f64::consts::PI;

/// `F_alpha(s)` for `alpha` in `(0, 1)` and `s` in `[1e-4, 1e4]`.
pub fn subordinator_density(alpha: f64, s: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha", "must lie in (0, 1)"));
    }
    if !(1e-4..=1e4).contains(&s) {
        return Err(invalid("s", "must lie in [1e-4, 1e4]"));
    }
    density(alpha, s)
}

/// Same as [`subordinator_density`] without the range restriction on `s`.
pub(crate) fn density(alpha: f64, s: f64) -> Result<f64> {
    // Integrate along the ray of angle theta in the upper half plane. The
    // angle pi gives a real integral that decays only for alpha < 1/2; the
    // midpoint between pi/2 and pi/(2 alpha) keeps both exponents negative.
    let theta = PI.min(0.25 * PI * (1.0 + 1.0 / alpha));
    let (ct, st) = (theta.cos(), theta.sin());
    let (ca, sa) = ((alpha * theta).cos(), (alpha * theta).sin());
    let expo = |r: f64| s * r * ct - r.powf(alpha) * ca;
    let integrand = |r: f64| {
        let e = expo(r);
        if e < -745.0 {
            return 0.0;
        }
        e.exp() * (s * r * st - r.powf(alpha) * sa + theta).sin()
    };
    let cut = -45.0;
    let mut big = 1.0;
    while expo(big) > cut {
        big *= 2.0;
    }
    while big > 1e-300 && expo(big / 2.0) <= cut {
        big /= 2.0;
    }
    let mut breaks = vec![0.0];
    let mut b = big * 1e-20;
    while b < big {
        breaks.push(b);
        b *= 4.0;
    }
    breaks.push(big);
    let r = quad::integrate_panels(integrand, &breaks, 1e-14 / s.max(1e-300).min(1.0), 1e-12, 4000)?;
    Ok((s / PI * r.value).max(0.0))
}

/// Closed form for `alpha = 1/2`.
pub fn density_half(s: f64) -> f64 {
    s.powf(-0.5) * (-0.25 / s).exp() / (2.0 * PI.sqrt())
}

/// Result of checking the Laplace identity at several points.
#[derive(Debug, Clone, serde::Serialize)]
pub struct LaplaceCheck {
    pub alpha: f64,
    pub z: Vec<f64>,
    pub residual: Vec<f64>,
    pub quadrature_error: f64,
}

/// Evaluates `\int F_alpha(s) e^{-s z} ds/s` with a fixed composite rule in
/// `log s`, independent of the adaptive rule that produces `F`.
pub fn laplace_check(alpha: f64, zs: &[f64]) -> Result<LaplaceCheck> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha", "must lie in (0, 1)"));
    }
    let zmin = zs.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(zmin > 0.0) {
        return Err(invalid("z", "must be positive"));
    }
    // Below u_lo the density is smaller than e^-40.
    let c_alpha = (1.0 - alpha) * alpha.powf(alpha / (1.0 - alpha));
    let u_lo = -((1.0 - alpha) / alpha) * (40.0 / c_alpha).ln() - 1.0;
    let u_hi = (45.0 / zmin).ln();
    let width = 0.25;
    let panels = ((u_hi - u_lo) / width).ceil() as usize;
    // Gauss-Kronrod nodes on every panel, shared across z.
    let (xk, wk, wg) = gk_nodes();
    let mut nodes = Vec::with_capacity(panels * 21);
    for p in 0..panels {
        let a = u_lo + p as f64 * width;
        let c = a + 0.5 * width;
        for i in 0..21 {
            let u = c + 0.5 * width * xk[i];
            nodes.push((u, density(alpha, u.exp())?));
        }
    }
    let mut residual = Vec::new();
    let mut qerr: f64 = 0.0;
    for &z in zs {
        let (mut k, mut g) = (0.0, 0.0);
        for (i, &(u, f)) in nodes.iter().enumerate() {
            let v = f * (-z * u.exp()).exp();
            k += wk[i % 21] * v;
            g += wg[i % 21] * v;
        }
        k *= 0.5 * width;
        g *= 0.5 * width;
        qerr = qerr.max((k - g).abs());
        residual.push((k - (-z.powf(alpha)).exp()).abs());
    }
    Ok(LaplaceCheck { alpha, z: zs.to_vec(), residual, quadrature_error: qerr })
}

fn gk_nodes() -> ([f64; 21], [f64; 21], [f64; 21]) {
    // Full 21-point rule on [-1, 1] with the embedded Gauss weights.
    let pos = quad::gk21_positive();
    let mut x = [0.0; 21];
    let mut wk = [0.0; 21];
    let mut wg = [0.0; 21];
    for i in 0..10 {
        x[i] = -pos.0[i];
        x[20 - i] = pos.0[i];
        wk[i] = pos.1[i];
        wk[20 - i] = pos.1[i];
        if i % 2 == 1 {
            wg[i] = pos.2[i / 2];
            wg[20 - i] = pos.2[i / 2];
        }
    }
    wk[10] = pos.1[10];
    (x, wk, wg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_matches_closed_form() {
        for &s in &[1e-4, 1e-2, 0.1, 0.5, 1.0, 3.0, 10.0, 1e2, 1e4] {
            let f = subordinator_density(0.5, s).unwrap();
            assert!((f - density_half(s)).abs() < 1e-8, "s={s}: {f} vs {}", density_half(s));
        }
        assert!((density_half(1.0) - 0.219_70).abs() < 1e-5);
    }

    #[test]
    fn rejects_bad_alpha() {
        assert!(subordinator_density(1.0, 1.0).is_err());
        assert!(subordinator_density(0.5, 1e5).is_err());
    }

    #[test]
    fn laplace_identity_holds() {
        for &alpha in &[0.1, 0.3, 0.7, 0.9] {
            let c = laplace_check(alpha, &[0.01, 1.0, 100.0]).unwrap();
            for r in &c.residual {
                assert!(*r < 1e-6, "alpha={alpha}: {:?}", c.residual);
            }
        }
    }
}
