use super::{Kernel, KernelKind, Part};
use crate::error::{invalid, Error, Result};
use crate::grid;

/// Local and tail parts of a kernel.
#[derive(Debug, Clone)]
pub struct SplitKernel {
    pub local: Kernel,
    pub tail: Kernel,
    /// `sup_y sum_x sup_t |tail(t, x, y)| m(x)` over the sampled scales.
    pub tail_norm: f64,
    /// The same quantity with the scale grid stopped at `1, 1/2, 1/4, ...`.
    pub trend: Vec<f64>,
}

/// Splits `kernel` with a smooth cutoff equal to one on `[0, lambda/2]` and
/// vanishing beyond `lambda`.
pub fn split_ai(kernel: &Kernel, lambda: f64) -> Result<SplitKernel> {
    let sp = kernel.space().clone();
    if !(lambda > 2.0 * sp.resolution()) {
        return Err(invalid("lambda", "must exceed twice the resolution"));
    }
    let local = Kernel::from_kind(
        sp.clone(),
        KernelKind::Localized { inner: kernel.clone(), lambda, part: Part::Local },
    );
    let tail = Kernel::from_kind(
        sp.clone(),
        KernelKind::Localized { inner: kernel.clone(), lambda, part: Part::Tail },
    );
    let n = sp.len();
    let ts = grid::time_grid(0.0, sp.resolution());
    let ys: Vec<usize> = if n <= 64 { (0..n).collect() } else { (0..16).map(|i| i * (n - 1) / 15).collect() };
    // Octave cut points for the trend: index of the last scale >= 2^-k.
    let mut cuts = Vec::new();
    let mut k = 0;
    loop {
        let lim = 0.5f64.powi(k);
        match ts.iter().rposition(|&t| t >= lim * (1.0 - 1e-12)) {
            Some(i) if i + 1 < ts.len() || cuts.last() != Some(&i) => {
                if cuts.last() != Some(&i) {
                    cuts.push(i);
                }
            }
            _ => {}
        }
        if lim <= ts[ts.len() - 1] {
            break;
        }
        k += 1;
    }
    if *cuts.last().unwrap() != ts.len() - 1 {
        cuts.push(ts.len() - 1);
    }
    let mut trend = vec![0.0f64; cuts.len()];
    for &y in &ys {
        let mut sums = vec![0.0; cuts.len()];
        for x in 0..n {
            let mut running: f64 = 0.0;
            let mut ci = 0;
            for (i, &t) in ts.iter().enumerate() {
                running = running.max(tail.eval(t, x, y).abs());
                while ci < cuts.len() && cuts[ci] == i {
                    sums[ci] += running * sp.weight(x);
                    ci += 1;
                }
            }
        }
        for (a, b) in trend.iter_mut().zip(sums) {
            *a = a.max(b);
        }
    }
    let tail_norm = *trend.last().unwrap();
    let m = trend.len();
    if !tail_norm.is_finite() || (m >= 3 && trend[m - 1] > 1.5 * trend[m - 2] && trend[m - 2] > 1.5 * trend[m - 3]) {
        return Err(Error::TailDiverges { trend });
    }
    Ok(SplitKernel { local, tail, tail_norm, trend })
}
