//! Discrete metric measure spaces: grids, tori and explicit tables.

mod ahlfors;
mod field;
mod io;
mod net;
mod patchwork;

pub use ahlfors::{verify_ahlfors, AhlforsCertificate, AhlforsMode, AhlforsReport};
pub use field::Field;
pub use io::{read_field_csv, read_table_csv, write_field_csv};
pub use net::{maximal_net, Net};
pub use patchwork::{build_patchwork, smooth_cutoff, Patchwork};

use crate::error::{invalid, Error, Result};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

pub type PointId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    Grid,
    Torus,
    Table,
}

/// Declarative description of a lattice space.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SpaceSpec {
    pub topology: Topology,
    #[serde(default = "one")]
    pub dim: usize,
    /// Lower corner of the box (grid) or of the fundamental domain (torus).
    #[serde(default)]
    pub lower: f64,
    /// Side length of the box, or the period of the torus.
    pub extent: f64,
    pub spacing: f64,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone)]
enum Metric {
    /// Euclidean or flat-torus distance computed from integer indices.
    Lattice,
    /// Euclidean distance between stored coordinates.
    Euclidean,
    /// Dense symmetric matrix.
    Matrix(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct DiscreteSpace {
    topology: Topology,
    dim: usize,
    shape: Vec<usize>,
    strides: Vec<usize>,
    lower: f64,
    spacing: f64,
    period: f64,
    coords: Vec<f64>,
    weights: Vec<f64>,
    metric: Metric,
    dimension: f64,
    resolution: f64,
    diameter: f64,
    ahlfors: Option<AhlforsCertificate>,
}

impl DiscreteSpace {
    /// Build a grid or torus. Weights are `spacing^dim`.
    pub fn build(spec: &SpaceSpec) -> Result<Self> {
        if spec.dim == 0 || spec.dim > 3 {
            return Err(invalid("dim", "must be 1, 2 or 3"));
        }
        if !(spec.spacing > 0.0) || !(spec.extent > 0.0) {
            return Err(invalid("spacing", "spacing and extent must be positive"));
        }
        let ratio = spec.extent / spec.spacing;
        let cells = ratio.round();
        if (ratio - cells).abs() > 1e-9 * ratio.max(1.0) {
            return Err(invalid("spacing", "extent must be an integer multiple of spacing"));
        }
        let cells = cells as usize;
        let per_axis = match spec.topology {
            Topology::Grid => cells + 1,
            Topology::Torus => cells,
            Topology::Table => return Err(invalid("topology", "use from_table for tables")),
        };
        if per_axis < 2 {
            return Err(invalid("spacing", "need at least two points per axis"));
        }
        let dim = spec.dim;
        let shape = vec![per_axis; dim];
        let n: usize = shape.iter().product();
        if n > 5_000_000 {
            return Err(invalid("spacing", "space too large"));
        }
        let mut strides = vec![1; dim];
        for a in (0..dim.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * shape[a + 1];
        }
        let mut coords = Vec::with_capacity(n * dim);
        for id in 0..n {
            for a in 0..dim {
                let i = (id / strides[a]) % shape[a];
                coords.push(spec.lower + i as f64 * spec.spacing);
            }
        }
        let w = spec.spacing.powi(dim as i32);
        let diameter = match spec.topology {
            Topology::Grid => spec.extent * (dim as f64).sqrt(),
            _ => {
                let half = (per_axis / 2) as f64 * spec.spacing;
                half * (dim as f64).sqrt()
            }
        };
        Ok(DiscreteSpace {
            topology: spec.topology,
            dim,
            shape,
            strides,
            lower: spec.lower,
            spacing: spec.spacing,
            period: if spec.topology == Topology::Torus { spec.extent } else { 0.0 },
            coords,
            weights: vec![w; n],
            metric: Metric::Lattice,
            dimension: dim as f64,
            resolution: spec.spacing,
            diameter,
            ahlfors: None,
        })
    }

    /// Explicit table. `dist` is a row-major `n*n` matrix; when absent the
    /// Euclidean distance between `coords` rows is used.
    pub fn from_table(
        coords: Vec<Vec<f64>>,
        weights: Vec<f64>,
        dist: Option<Vec<f64>>,
        dimension: f64,
    ) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::InvalidSpace("empty table".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidSpace("weights must be positive and finite".into()));
        }
        if !(dimension > 0.0) {
            return Err(invalid("dimension", "must be positive"));
        }
        let dim = coords.first().map(|c| c.len()).unwrap_or(0);
        if coords.len() != n && !(coords.is_empty()) {
            return Err(Error::InvalidSpace("coordinate rows do not match weights".into()));
        }
        if coords.iter().any(|c| c.len() != dim) {
            return Err(Error::InvalidSpace("ragged coordinate rows".into()));
        }
        let flat: Vec<f64> = coords.into_iter().flatten().collect();
        let metric = match dist {
            Some(m) => {
                if m.len() != n * n {
                    return Err(Error::InvalidSpace("distance matrix has wrong size".into()));
                }
                for i in 0..n {
                    if m[i * n + i] != 0.0 {
                        return Err(Error::InvalidSpace(format!("nonzero self distance at {i}")));
                    }
                    for j in 0..i {
                        let (a, b) = (m[i * n + j], m[j * n + i]);
                        if (a - b).abs() > 1e-12 * a.abs().max(1.0) {
                            return Err(Error::InvalidSpace(format!(
                                "asymmetric distance between {j} and {i}: {b} vs {a}"
                            )));
                        }
                        if !(a > 0.0) || !a.is_finite() {
                            return Err(Error::InvalidSpace(format!(
                                "distance between {j} and {i} must be positive"
                            )));
                        }
                    }
                }
                Metric::Matrix(m)
            }
            None => {
                if dim == 0 && n > 1 {
                    return Err(Error::InvalidSpace("need coordinates or distances".into()));
                }
                Metric::Euclidean
            }
        };
        let mut s = DiscreteSpace {
            topology: Topology::Table,
            dim,
            shape: vec![],
            strides: vec![],
            lower: 0.0,
            spacing: 0.0,
            period: 0.0,
            coords: flat,
            weights,
            metric,
            dimension,
            resolution: 0.0,
            diameter: 0.0,
            ahlfors: None,
        };
        let mut min_d = f64::INFINITY;
        let mut max_d: f64 = 0.0;
        for i in 0..n {
            for j in 0..i {
                let d = s.dist(i, j);
                if d == 0.0 {
                    return Err(Error::InvalidSpace(format!("points {j} and {i} coincide")));
                }
                min_d = min_d.min(d);
                max_d = max_d.max(d);
            }
        }
        s.resolution = if min_d.is_finite() { min_d } else { 0.0 };
        s.diameter = max_d;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
    pub fn topology(&self) -> Topology {
        self.topology
    }
    /// Number of coordinates per point (0 for coordinate-free tables).
    pub fn coord_dim(&self) -> usize {
        self.dim
    }
    /// Regularity dimension `D`.
    pub fn dimension(&self) -> f64 {
        self.dimension
    }
    /// Smallest distance between distinct points.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }
    pub fn diameter(&self) -> f64 {
        self.diameter
    }
    pub fn period(&self) -> Option<f64> {
        (self.topology == Topology::Torus).then_some(self.period)
    }
    pub fn weight(&self, x: PointId) -> f64 {
        self.weights[x]
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn coords(&self, x: PointId) -> &[f64] {
        &self.coords[x * self.dim..(x + 1) * self.dim]
    }
    pub fn total_measure(&self) -> f64 {
        self.weights.iter().sum()
    }
    pub fn ahlfors(&self) -> Option<&AhlforsCertificate> {
        self.ahlfors.as_ref()
    }
    pub fn with_ahlfors(mut self, cert: AhlforsCertificate) -> Self {
        self.ahlfors = Some(cert);
        self
    }

    fn axis_index(&self, x: PointId, a: usize) -> usize {
        (x / self.strides[a]) % self.shape[a]
    }

    pub fn dist(&self, x: PointId, y: PointId) -> f64 {
        match &self.metric {
            Metric::Lattice => {
                if x == y {
                    return 0.0;
                }
                let mut s = 0.0;
                for a in 0..self.dim {
                    let i = self.axis_index(x, a) as i64;
                    let j = self.axis_index(y, a) as i64;
                    let mut k = (i - j).abs();
                    if self.topology == Topology::Torus {
                        k = k.min(self.shape[a] as i64 - k);
                    }
                    s += (k * k) as f64;
                }
                s.sqrt() * self.spacing
            }
            Metric::Euclidean => {
                let (a, b) = (self.coords(x), self.coords(y));
                a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
            }
            Metric::Matrix(m) => m[x * self.len() + y],
        }
    }

    /// Calls `f(y, d(x, y))` for every `y` in the closed ball `B(x, r)`.
    pub fn for_each_within<F: FnMut(PointId, f64)>(&self, x: PointId, r: f64, mut f: F) {
        match self.metric {
            Metric::Lattice => {
                let k = (r / self.spacing + 1e-9).floor().max(0.0) as i64;
                let mut lo = vec![0i64; self.dim];
                let mut hi = vec![0i64; self.dim];
                for a in 0..self.dim {
                    let i = self.axis_index(x, a) as i64;
                    let m = self.shape[a] as i64;
                    match self.topology {
                        Topology::Torus if 2 * k + 1 >= m => {
                            lo[a] = i - m / 2;
                            hi[a] = lo[a] + m - 1;
                        }
                        Topology::Torus => {
                            lo[a] = i - k;
                            hi[a] = i + k;
                        }
                        _ => {
                            lo[a] = (i - k).max(0);
                            hi[a] = (i + k).min(m - 1);
                        }
                    }
                }
                let r2 = (r / self.spacing) * (r / self.spacing) * (1.0 + 1e-12) + 1e-12;
                let mut cur = lo.clone();
                loop {
                    let mut s = 0i64;
                    let mut id = 0usize;
                    for a in 0..self.dim {
                        let i = self.axis_index(x, a) as i64;
                        let d = cur[a] - i;
                        s += d * d;
                        let m = self.shape[a] as i64;
                        id += (cur[a].rem_euclid(m) as usize) * self.strides[a];
                    }
                    if (s as f64) <= r2 {
                        f(id, (s as f64).sqrt() * self.spacing);
                    }
                    let mut a = self.dim;
                    loop {
                        if a == 0 {
                            return;
                        }
                        a -= 1;
                        if cur[a] < hi[a] {
                            cur[a] += 1;
                            break;
                        }
                        cur[a] = lo[a];
                    }
                }
            }
            _ => {
                for y in 0..self.len() {
                    let d = self.dist(x, y);
                    if d <= r {
                        f(y, d);
                    }
                }
            }
        }
    }

    pub fn ball(&self, x: PointId, r: f64) -> Vec<PointId> {
        let mut v = Vec::new();
        self.for_each_within(x, r, |y, _| v.push(y));
        v.sort_unstable();
        v
    }

    pub fn ball_measure(&self, x: PointId, r: f64) -> f64 {
        let mut m = 0.0;
        self.for_each_within(x, r, |y, _| m += self.weights[y]);
        m
    }

    /// Point nearest to the given coordinates (lowest id on ties).
    pub fn nearest(&self, p: &[f64]) -> Result<PointId> {
        if p.len() != self.dim || self.dim == 0 {
            return Err(invalid("point", "coordinate dimension mismatch"));
        }
        if let Metric::Lattice = self.metric {
            let mut id = 0;
            for a in 0..self.dim {
                let m = self.shape[a] as i64;
                let mut i = ((p[a] - self.lower) / self.spacing).round() as i64;
                if self.topology == Topology::Torus {
                    i = i.rem_euclid(m);
                } else {
                    i = i.clamp(0, m - 1);
                }
                id += i as usize * self.strides[a];
            }
            return Ok(id);
        }
        let mut best = (f64::INFINITY, 0);
        for y in 0..self.len() {
            let d: f64 = self.coords(y).iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum();
            if d < best.0 {
                best = (d, y);
            }
        }
        Ok(best.1)
    }

    /// Point nearest to the origin, or point 0 for coordinate-free tables.
    pub fn default_basepoint(&self) -> PointId {
        if self.dim == 0 {
            return 0;
        }
        self.nearest(&vec![0.0; self.dim]).unwrap_or(0)
    }

    /// `1 + d(o, x)`.
    pub fn d_weight(&self, o: PointId, x: PointId) -> f64 {
        1.0 + self.dist(o, x)
    }

    /// Distance from `y` to the complement of `B(x, r)` (infinite if the
    /// ball is the whole space).
    pub fn dist_to_complement(&self, x: PointId, r: f64, y: PointId) -> f64 {
        let mut best = f64::INFINITY;
        for z in 0..self.len() {
            if self.dist(x, z) > r {
                best = best.min(self.dist(y, z));
            }
        }
        best
    }

    /// Checks `(1+d(o,x)) <= 2(1+d(o,y))` whenever `d(x,y) <= (1+d(o,y))/2`.
    pub fn weight_comparable(&self, o: PointId, x: PointId, y: PointId) -> bool {
        let dy = self.d_weight(o, y);
        if self.dist(x, y) > dy / 2.0 {
            return true;
        }
        let dx = self.d_weight(o, x);
        dx <= 2.0 * dy * (1.0 + 1e-12) && dy <= 2.0 * dx * (1.0 + 1e-12)
    }

    /// Random triangle-inequality audit; returns the worst excess found.
    pub fn triangle_audit(&self, samples: usize, rng: &mut crate::rng::Rng) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let (x, y, z) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
            let excess = self.dist(x, z) - self.dist(x, y) - self.dist(y, z);
            worst = worst.max(excess);
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid1(n_cells: usize) -> DiscreteSpace {
        DiscreteSpace::build(&SpaceSpec {
            topology: Topology::Grid,
            dim: 1,
            lower: 0.0,
            extent: 1.0,
            spacing: 1.0 / n_cells as f64,
        })
        .unwrap()
    }

    #[test]
    fn unit_interval_grid() {
        let s = grid1(256);
        assert_eq!(s.len(), 257);
        assert!((s.weight(0) - 1.0 / 256.0).abs() < 1e-15);
        assert!((s.total_measure() - 257.0 / 256.0).abs() < 1e-12);
        assert_eq!(s.default_basepoint(), 0);
    }

    #[test]
    fn square_grid_measure() {
        let s = DiscreteSpace::build(&SpaceSpec {
            topology: Topology::Grid,
            dim: 2,
            lower: 0.0,
            extent: 1.0,
            spacing: 1.0 / 64.0,
        })
        .unwrap();
        assert_eq!(s.len(), 65 * 65);
        assert!((s.total_measure() - 1.032).abs() < 1e-3);
    }

    #[test]
    fn torus_wraps() {
        let s = DiscreteSpace::build(&SpaceSpec {
            topology: Topology::Torus,
            dim: 1,
            lower: 0.0,
            extent: 1.0,
            spacing: 0.125,
        })
        .unwrap();
        assert_eq!(s.len(), 8);
        assert!((s.dist(0, 7) - 0.125).abs() < 1e-15);
        assert!((s.dist(0, 4) - 0.5).abs() < 1e-15);
        assert_eq!(s.ball(0, 0.25), vec![0, 1, 2, 6, 7]);
        assert_eq!(s.ball(0, 10.0).len(), 8);
    }

    #[test]
    fn ball_enumeration_matches_scan() {
        let s = DiscreteSpace::build(&SpaceSpec {
            topology: Topology::Torus,
            dim: 2,
            lower: 0.0,
            extent: 1.0,
            spacing: 0.1,
        })
        .unwrap();
        for x in [0, 13, 57, 99] {
            for r in [0.05, 0.1, 0.15, 0.3, 0.71, 2.0] {
                let fast = s.ball(x, r);
                let slow: Vec<_> = (0..s.len()).filter(|&y| s.dist(x, y) <= r + 1e-12).collect();
                assert_eq!(fast, slow, "x={x} r={r}");
            }
        }
    }

    #[test]
    fn table_rejects_asymmetry() {
        let d = vec![0.0, 1.0, 2.0, 0.0];
        let e = DiscreteSpace::from_table(vec![], vec![1.0, 1.0], Some(d), 1.0);
        assert!(matches!(e, Err(Error::InvalidSpace(_))));
    }

    #[test]
    fn rejects_noninteger_cells() {
        let e = DiscreteSpace::build(&SpaceSpec {
            topology: Topology::Grid,
            dim: 1,
            lower: 0.0,
            extent: 1.0,
            spacing: 0.3,
        });
        assert!(e.is_err());
    }

    #[test]
    fn comparable_weights_on_grid() {
        let s = grid1(64);
        for x in 0..s.len() {
            for y in 0..s.len() {
                assert!(s.weight_comparable(0, x, y));
            }
        }
    }
}
