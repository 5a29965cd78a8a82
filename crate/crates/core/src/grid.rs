//! Geometric scale grids used wherever a supremum over a continuum of
//! scales or radii is replaced by a finite maximum.

/// Default ratio between consecutive scales.
pub const RATIO: f64 = 1.090_507_732_665_257_7; // 2^(1/8)

/// Scales `hi, hi/q, hi/q^2, ...` down to `lo` (inclusive up to rounding).
/// The final element is `lo` itself when it is not already hit.
pub fn geometric_down(hi: f64, lo: f64, ratio: f64) -> Vec<f64> {
    assert!(ratio > 1.0 && hi > 0.0 && lo > 0.0);
    let mut out = Vec::new();
    if lo > hi {
        return out;
    }
    let mut t = hi;
    while t >= lo * (1.0 - 1e-12) {
        out.push(t);
        t /= ratio;
    }
    if let Some(&last) = out.last() {
        if last > lo * (1.0 + 1e-9) {
            out.push(lo);
        }
    }
    out
}

/// Time grid on `[max(t_min, 2*spacing), 1]`.
pub fn time_grid(t_min: f64, spacing: f64) -> Vec<f64> {
    let lo = t_min.max(2.0 * spacing).min(1.0);
    geometric_down(1.0, lo, RATIO)
}

/// Radius grid `(lo, hi]`.
pub fn radius_grid(lo: f64, hi: f64) -> Vec<f64> {
    geometric_down(hi, lo, RATIO)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_is_eighth_root_of_two() {
        assert!((RATIO.powi(8) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn time_grid_spans_range() {
        let g = time_grid(0.0, 1.0 / 256.0);
        assert_eq!(g[0], 1.0);
        assert!((g.last().unwrap() - 1.0 / 128.0).abs() < 1e-12);
        assert_eq!(g.len(), 57);
        for w in g.windows(2) {
            assert!(w[0] > w[1]);
        }
    }

    #[test]
    fn odd_endpoint_is_appended() {
        let g = geometric_down(1.0, 0.3, 2.0);
        assert_eq!(g, vec![1.0, 0.5, 0.3]);
    }
}
