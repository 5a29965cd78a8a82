use crate::error::{Error, Result};
use crate::space::{DiscreteSpace, Field, PointId};

type Sparse = Vec<(PointId, f64)>;

/// Default ball size up to which the f-dependent sign envelopes are built.
pub const ENVELOPE_LIMIT: usize = 1200;
const POLISH_SWEEPS: usize = 8;

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

enum Item {
    Fixed { label: &'static str, values: Sparse },
    /// Sub-bumps with disjoint supports; each gets the sign of its own
    /// pairing with `f`. The scale is valid for every sign pattern.
    Mosaic { parts: Vec<Sparse> },
}

/// Hölder test functions supported in `B(x, r)`, each scaled into the class
/// `|phi| <= r^-D`, `|phi(y) - phi(z)| <= r^-D (d(y,z)/r)^gamma`.
pub struct CandidateLibrary {
    pub x: PointId,
    pub r: f64,
    items: Vec<Item>,
    ball: Ball,
    holder: Vec<f64>,
    amp: f64,
    /// Sum of `r^-D min(1, (dist(y, B^c)/r)^gamma) m(y)` weights, used to
    /// bound every admissible pairing from above.
    pub box_bound: Vec<(PointId, f64)>,
}

pub(crate) struct Ball {
    pub(crate) ids: Vec<PointId>,
    pub(crate) dx: Vec<f64>,
    pub(crate) bound: Vec<f64>,
    pub(crate) gamma: f64,
    pub(crate) r: f64,
}

pub(crate) fn ball_data(space: &DiscreteSpace, x: PointId, r: f64, gamma: f64) -> Ball {
    let ids = space.ball(x, r);
    let inside: std::collections::HashSet<PointId> = ids.iter().copied().collect();
    let outside: Vec<PointId> = (0..space.len()).filter(|z| !inside.contains(z)).collect();
    let dx = ids.iter().map(|&y| space.dist(x, y)).collect();
    let bound = ids
        .iter()
        .map(|&y| {
            let dc = outside.iter().map(|&z| space.dist(y, z)).fold(f64::INFINITY, f64::min);
            (dc / r).powf(gamma).min(1.0)
        })
        .collect();
    Ball { ids, dx, bound, gamma, r }
}

impl Ball {
    pub(crate) fn hol(&self, d: f64) -> f64 {
        if self.gamma == 1.0 {
            d / self.r
        } else {
            (d / self.r).powf(self.gamma)
        }
    }

    /// Largest `lambda <= 1` making `lambda u` admissible (unit scale).
    fn admissible_scale(&self, space: &DiscreteSpace, u: &[f64], group: Option<&[usize]>) -> f64 {
        let mut lam: f64 = 1.0;
        for (i, &v) in u.iter().enumerate() {
            if v != 0.0 {
                lam = lam.min(self.bound[i] / v.abs());
            }
        }
        for i in 0..u.len() {
            for j in 0..i {
                let diff = match group {
                    Some(g) if g[i] != g[j] && g[i] != usize::MAX && g[j] != usize::MAX => u[i].abs() + u[j].abs(),
                    _ => (u[i] - u[j]).abs(),
                };
                if diff > 0.0 {
                    let e = self.hol(space.dist(self.ids[i], self.ids[j]));
                    lam = lam.min(e / diff);
                }
            }
        }
        lam.max(0.0)
    }

    fn sub_bump(&self, space: &DiscreteSpace, c: PointId, rho: f64) -> Vec<f64> {
        self.ids.iter().map(|&y| ((rho - space.dist(c, y)).max(0.0) / self.r).powf(self.gamma)).collect()
    }
}

fn to_sparse(ids: &[PointId], u: &[f64], factor: f64) -> Sparse {
    ids.iter().zip(u).filter(|(_, v)| **v != 0.0).map(|(&y, &v)| (y, v * factor)).collect()
}

/// Greedy farthest-point selection among `pool`.
fn spread(space: &DiscreteSpace, pool: &[PointId], k: usize) -> Vec<PointId> {
    let mut out: Vec<PointId> = Vec::new();
    if pool.is_empty() {
        return out;
    }
    out.push(pool[0]);
    while out.len() < k.min(pool.len()) {
        let next = pool
            .iter()
            .copied()
            .max_by(|&a, &b| {
                let da = out.iter().map(|&c| space.dist(a, c)).fold(f64::INFINITY, f64::min);
                let db = out.iter().map(|&c| space.dist(b, c)).fold(f64::INFINITY, f64::min);
                da.total_cmp(&db).then(b.cmp(&a))
            })
            .unwrap();
        if out.contains(&next) {
            break;
        }
        out.push(next);
    }
    out
}

impl CandidateLibrary {
    pub fn build(space: &DiscreteSpace, x: PointId, r: f64, gamma: f64) -> CandidateLibrary {
        Self::build_with(space, x, r, gamma, ENVELOPE_LIMIT)
    }

    /// As [`build`](Self::build), with envelopes only on balls of at most
    /// `envelope_limit` points.
    pub fn build_with(space: &DiscreteSpace, x: PointId, r: f64, gamma: f64, envelope_limit: usize) -> CandidateLibrary {
        let b = ball_data(space, x, r, gamma);
        let amp = r.powf(-space.dimension());
        let mut items = Vec::new();
        let push = |label: &'static str, u: Vec<f64>, b: &Ball, items: &mut Vec<Item>| {
            let lam = b.admissible_scale(space, &u, None);
            if lam > 0.0 {
                items.push(Item::Fixed { label, values: to_sparse(&b.ids, &u, lam * amp) });
            }
        };
        push("cone", b.bound.clone(), &b, &mut items);
        push("triangle", b.dx.iter().map(|d| ((r - d).max(0.0) / r).powf(gamma)).collect(), &b, &mut items);
        push(
            "raised-cosine",
            b.dx.iter().map(|d| 0.5 * (1.0 + (std::f64::consts::PI * d / r).min(std::f64::consts::PI).cos())).collect(),
            &b,
            &mut items,
        );
        // Sub-bumps of radius r/2 centred on the half-radius shell.
        let tol = space.resolution().max(1e-12);
        let shell: Vec<PointId> =
            b.ids.iter().zip(&b.dx).filter(|(_, d)| (**d - r / 2.0).abs() <= tol).map(|(&y, _)| y).collect();
        let centers = spread(space, &shell, 6);
        for &c in &centers {
            push("sub-bump", b.sub_bump(space, c, r / 2.0), &b, &mut items);
        }
        for (i, &c) in centers.iter().enumerate() {
            let a = b.sub_bump(space, c, r / 2.0);
            // Partner is the farthest remaining shell centre.
            if let Some(&o) = centers[i + 1..].iter().max_by(|&&p, &&q| space.dist(c, p).total_cmp(&space.dist(c, q))) {
                let bb = b.sub_bump(space, o, r / 2.0);
                let u: Vec<f64> = a.iter().zip(&bb).map(|(p, q)| p - q).collect();
                push("dipole", u, &b, &mut items);
            }
        }
        // Signed mosaic of quarter-radius bumps on a half-radius net.
        let mut net: Vec<PointId> = Vec::new();
        for (&y, &d) in b.ids.iter().zip(&b.dx) {
            if d <= 0.75 * r && net.iter().all(|&c| space.dist(c, y) >= r / 2.0) {
                net.push(y);
            }
        }
        if net.len() >= 2 {
            let mut group = vec![usize::MAX; b.ids.len()];
            let mut u = vec![0.0; b.ids.len()];
            let parts_u: Vec<Vec<f64>> = net.iter().map(|&c| b.sub_bump(space, c, r / 4.0)).collect();
            for (k, p) in parts_u.iter().enumerate() {
                for i in 0..u.len() {
                    if p[i] != 0.0 {
                        group[i] = k;
                        u[i] = p[i];
                    }
                }
            }
            let lam = b.admissible_scale(space, &u, Some(&group));
            if lam > 0.0 {
                let parts = parts_u.iter().map(|p| to_sparse(&b.ids, p, lam * amp)).collect();
                items.push(Item::Mosaic { parts });
            }
        }
        let box_bound = b.ids.iter().zip(&b.bound).map(|(&y, &v)| (y, v * amp * space.weight(y))).collect();
        let m = b.ids.len();
        let holder = if m <= envelope_limit {
            let mut e = vec![0.0; m * m];
            for i in 0..m {
                for j in 0..i {
                    let v = b.hol(space.dist(b.ids[i], b.ids[j]));
                    e[i * m + j] = v;
                    e[j * m + i] = v;
                }
            }
            e
        } else {
            Vec::new()
        };
        CandidateLibrary { x, r, items, ball: b, holder, amp, box_bound }
    }

    /// Lower and upper Hölder envelopes of `target`, clipped to the box.
    /// Both stay admissible since envelopes and clipping preserve the
    /// Hölder bound.
    fn envelopes(&self, target: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let m = target.len();
        let e = &self.holder;
        let mut lower = Vec::with_capacity(m);
        let mut upper = Vec::with_capacity(m);
        for i in 0..m {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for j in 0..m {
                lo = lo.min(target[j] + e[i * m + j]);
                hi = hi.max(target[j] - e[i * m + j]);
            }
            let b = self.ball.bound[i];
            lower.push(lo.clamp(-b, b));
            upper.push(hi.clamp(-b, b));
        }
        (lower, upper)
    }

    /// Coordinate ascent on `sum c u` inside the admissible set. Each move
    /// puts one value at the end of its feasible interval, so the iterate
    /// stays admissible.
    fn polish(&self, c: &[f64], u: &mut [f64], sweeps: usize) {
        let m = u.len();
        let e = &self.holder;
        for _ in 0..sweeps {
            let mut moved = false;
            for i in 0..m {
                if c[i] == 0.0 {
                    continue;
                }
                let b = self.ball.bound[i];
                let (mut lo, mut hi) = (-b, b);
                for j in 0..m {
                    if j != i {
                        lo = lo.max(u[j] - e[i * m + j]);
                        hi = hi.min(u[j] + e[i * m + j]);
                    }
                }
                let v = if c[i] > 0.0 { hi } else { lo };
                if (v - u[i]) * c[i] > 1e-15 * c[i].abs() {
                    u[i] = v;
                    moved = true;
                }
            }
            if !moved {
                break;
            }
        }
    }

    fn envelope_best(&self, space: &DiscreteSpace, f: &Field) -> f64 {
        let ids = &self.ball.ids;
        let c: Vec<f64> = ids.iter().map(|&y| f.get(y) * space.weight(y)).collect();
        let val = |u: &[f64]| u.iter().zip(&c).map(|(v, w)| v * w).sum::<f64>();
        let mut best: f64 = 0.0;
        for keep in [0i8, 1, -1] {
            let target: Vec<f64> = ids
                .iter()
                .zip(&self.ball.bound)
                .map(|(&y, &b)| {
                    let s = sign(f.get(y));
                    if keep == 0 || s == keep as f64 { b * s } else { 0.0 }
                })
                .collect();
            let (lo, hi) = self.envelopes(&target);
            let mid: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
            for mut u in [lo, hi, mid] {
                // Orient toward a positive pairing before polishing.
                if val(&u) < 0.0 {
                    u.iter_mut().for_each(|v| *v = -*v);
                }
                self.polish(&c, &mut u, POLISH_SWEEPS);
                best = best.max(val(&u));
            }
        }
        best * self.amp
    }

    /// Best `|int phi f|` over the library, with the winning label.
    pub fn best(&self, space: &DiscreteSpace, f: &Field) -> (f64, &'static str) {
        let pair = |v: &Sparse| v.iter().map(|&(y, c)| c * f.get(y) * space.weight(y)).sum::<f64>();
        let mut best = (0.0, "none");
        if !self.holder.is_empty() {
            best = (self.envelope_best(space, f), "sign-envelope");
        }
        for it in &self.items {
            let (val, label) = match it {
                Item::Fixed { label, values } => (pair(values).abs(), *label),
                Item::Mosaic { parts } => (parts.iter().map(|p| pair(p).abs()).sum(), "mosaic"),
            };
            if val > best.0 {
                best = (val, label);
            }
        }
        best
    }

    /// Upper bound on `|int phi f|` over the whole admissible class.
    pub fn upper_bound(&self, f: &Field) -> f64 {
        self.box_bound.iter().map(|&(y, c)| c * f.get(y).abs()).sum()
    }

    /// Fixed (sign-independent) members as dense fields.
    pub fn fixed_fields(&self, n: usize) -> Vec<(String, Field)> {
        self.items
            .iter()
            .filter_map(|it| match it {
                Item::Fixed { label, values } => {
                    let mut v = vec![0.0; n];
                    for &(y, c) in values {
                        v[y] = c;
                    }
                    Some((label.to_string(), Field::new(v)))
                }
                _ => None,
            })
            .collect()
    }
}

/// Fixed cutoffs of the unit class at `o`.
pub fn cutoff_family(space: &DiscreteSpace, o: PointId, gamma: f64) -> Vec<(String, Field)> {
    CandidateLibrary::build(space, o, 1.0, gamma).fixed_fields(space.len())
}

/// Verifies that `phi` is supported in `B(x, r)`, bounded by `r^-D` and
/// Hölder of order `gamma` with constant `r^{-D-gamma}`.
pub fn check_test_function(space: &DiscreteSpace, phi: &Field, x: PointId, r: f64, gamma: f64) -> Result<()> {
    phi.check(space)?;
    let amp = r.powf(-space.dimension());
    let supp = phi.support();
    for &y in &supp {
        if space.dist(x, y) > r * (1.0 + 1e-12) {
            return Err(Error::NotTestFunction(format!("point {y} lies outside the ball")));
        }
        if phi.get(y).abs() > amp * (1.0 + 1e-12) {
            return Err(Error::NotTestFunction(format!("value at {y} exceeds the bound")));
        }
    }
    for &y in &supp {
        for z in 0..space.len() {
            if z == y {
                continue;
            }
            let e = amp * (space.dist(y, z) / r).powf(gamma);
            if (phi.get(y) - phi.get(z)).abs() > e * (1.0 + 1e-9) + 1e-300 {
                return Err(Error::NotTestFunction(format!("Hölder bound fails between {y} and {z}")));
            }
        }
    }
    Ok(())
}
