use std::f64::consts::PI;

/// Periodised Gaussian `sum_k (4 pi s)^{-1/2} exp(-(delta + kL)^2 / (4s))`.
pub fn heat_1d(s: f64, delta: f64, period: f64) -> f64 {
    let d = delta - period * (delta / period).round();
    let c = (4.0 * PI * s).sqrt().recip();
    let q = 0.25 / s;
    let mut sum = c * (-d * d * q).exp();
    let mut k = 1.0;
    loop {
        let a = d + k * period;
        let b = d - k * period;
        let term = c * ((-a * a * q).exp() + (-b * b * q).exp());
        sum += term;
        if term < 1e-16 * sum.max(1e-300) || term == 0.0 {
            break;
        }
        k += 1.0;
    }
    sum
}

/// Heat kernel on the flat torus `(R/LZ)^n` at time `s`.
pub fn heat_torus(s: f64, delta: &[f64], period: f64) -> f64 {
    delta.iter().map(|&d| heat_1d(s, d, period)).product()
}

/// Periodised Poisson kernel on `R / LZ`, for tests of the subordinated heat
/// kernel at `alpha = 1/2`.
pub fn poisson_1d_periodic(t: f64, delta: f64, period: f64) -> f64 {
    let a = 2.0 * PI * t / period;
    let b = 2.0 * PI * delta / period;
    a.sinh() / (period * (a.cosh() - b.cos()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discrete_mass_is_one() {
        for &s in &[0.01, 0.1, 1.0] {
            let n = 128;
            let h = 1.0 / n as f64;
            let m: f64 = (0..n).map(|i| heat_1d(s, i as f64 * h, 1.0) * h).sum();
            assert!((m - 1.0).abs() < 1e-10, "s={s}: {m}");
        }
    }

    #[test]
    fn symmetric_and_periodic() {
        let a = heat_1d(0.03, 0.2, 1.0);
        assert!((a - heat_1d(0.03, -0.2, 1.0)).abs() < 1e-15);
        assert!((a - heat_1d(0.03, 1.2, 1.0)).abs() < 1e-13);
    }
}
