use super::{DiscreteSpace, PointId};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AhlforsCertificate {
    pub a: f64,
    pub dimension: f64,
    pub r_min: f64,
    pub r_max: f64,
}

#[derive(Debug, Clone)]
pub enum AhlforsMode {
    /// Every center against the listed radii.
    Sampled(Vec<f64>),
    /// Every center against the full radius interval, using the jump points
    /// of the ball-measure function. Intended for small spaces.
    Full { r_min: f64, r_max: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AhlforsReport {
    pub fitted_a: f64,
    pub worst_center: PointId,
    pub worst_radius: f64,
    pub radii_checked: usize,
    pub flags: Vec<String>,
    pub certified: bool,
    pub certificate: Option<AhlforsCertificate>,
}

/// Fits the smallest `A` with `A^-1 r^D <= m(B(x,r)) <= A r^D` over the
/// requested radii. When `declared` is given, certification additionally
/// needs the fitted constant not to exceed it.
pub fn verify_ahlfors(space: &DiscreteSpace, mode: &AhlforsMode, declared: Option<f64>) -> AhlforsReport {
    let d = space.dimension();
    let lo_ok = 2.0 * space.resolution();
    let hi_ok = space.diameter() / 2.0;
    let mut flags = Vec::new();
    let flag_radius = |r: f64, flags: &mut Vec<String>| {
        if r < lo_ok {
            flags.push(format!("radius {r} is below twice the resolution {}", space.resolution()));
        } else if r > hi_ok {
            flags.push(format!("radius {r} exceeds half the diameter {}", space.diameter()));
        }
    };
    let mut worst = (1.0f64, 0usize, f64::NAN);
    let mut radii_checked = 0;
    let (r_min, r_max);
    match mode {
        AhlforsMode::Sampled(radii) => {
            r_min = radii.iter().cloned().fold(f64::INFINITY, f64::min);
            r_max = radii.iter().cloned().fold(0.0, f64::max);
            for &r in radii {
                flag_radius(r, &mut flags);
            }
            radii_checked = radii.len();
            for x in 0..space.len() {
                for &r in radii {
                    let m = space.ball_measure(x, r);
                    let rd = r.powf(d);
                    let q = (m / rd).max(rd / m);
                    if q > worst.0 || worst.2.is_nan() {
                        worst = (q.max(worst.0), x, r);
                    }
                }
            }
        }
        AhlforsMode::Full { r_min: a, r_max: b } => {
            r_min = *a;
            r_max = *b;
            flag_radius(*a, &mut flags);
            flag_radius(*b, &mut flags);
            let mut buf: Vec<(f64, f64)> = Vec::with_capacity(space.len());
            for x in 0..space.len() {
                buf.clear();
                for y in 0..space.len() {
                    buf.push((space.dist(x, y), space.weight(y)));
                }
                buf.sort_by(|p, q| p.0.total_cmp(&q.0));
                let mut mass = 0.0;
                let mut k = 0;
                while k < buf.len() {
                    let dk = buf[k].0;
                    while k < buf.len() && buf[k].0 == dk {
                        mass += buf[k].1;
                        k += 1;
                    }
                    let next = if k < buf.len() { buf[k].0 } else { f64::INFINITY };
                    let left = dk.max(*a);
                    let right = next.min(*b);
                    if left > right || right < *a {
                        continue;
                    }
                    radii_checked += 1;
                    let q_up = mass / left.powf(d);
                    let q_lo = right.powf(d) / mass;
                    let q = q_up.max(q_lo);
                    if q > worst.0 || worst.2.is_nan() {
                        worst = (q.max(worst.0), x, if q_up >= q_lo { left } else { right });
                    }
                }
            }
        }
    }
    let fitted_a = worst.0;
    let mut certified = flags.is_empty() && radii_checked > 0 && fitted_a.is_finite();
    if let Some(decl) = declared {
        if fitted_a > decl {
            flags.push(format!("fitted constant {fitted_a} exceeds declared {decl}"));
            certified = false;
        }
    }
    let certificate = certified.then(|| AhlforsCertificate { a: fitted_a, dimension: d, r_min, r_max });
    AhlforsReport {
        fitted_a,
        worst_center: worst.1,
        worst_radius: worst.2,
        radii_checked,
        flags,
        certified,
        certificate,
    }
}
