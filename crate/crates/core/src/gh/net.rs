//! Nets of geodesic balls centred on the symmetry axis.
//!
//! Every pair of points in such a ball can be rotated (fixing the centre) into one
//! section through the axis: two-dimensional when the centre is a pole, three-
//! dimensional otherwise. Nets are therefore grids in the tangent space of that
//! section, pushed forward by the exponential map, and a point is stored by its
//! axis coordinate s and the position (θ, α) of its sphere direction.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use super::{FiniteMetricSpace, Provenance};
use crate::error::{Error, Result};
use crate::num::sq;
use crate::warped::geodesic::{exp_slice, graph_distance, slice_distance, GraphGrid};
use crate::warped::slice::SliceMetric;
use crate::warped::volume::pole_side;

/// A geodesic ball B(center, radius) with the center on the axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetRegion {
    pub center: f64,
    pub radius: f64,
}

/// Point of the section: axis coordinate, and polar angles of its sphere direction
/// measured from the centre's direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionPoint {
    pub s: f64,
    pub theta: f64,
    pub alpha: f64,
    /// normal coordinates at the centre that produced it
    pub v: [f64; 3],
}

impl SectionPoint {
    fn direction(&self) -> [f64; 3] {
        let st = libm::sin(self.theta);
        [libm::cos(self.theta), st * libm::cos(self.alpha), st * libm::sin(self.alpha)]
    }

    /// Angle between the sphere directions of two points.
    pub fn angle_to(&self, o: &SectionPoint) -> f64 {
        let (a, b) = (self.direction(), o.direction());
        let c = libm::sqrt(sq(a[0] - b[0]) + sq(a[1] - b[1]) + sq(a[2] - b[2]));
        2.0 * libm::asin((0.5 * c).min(1.0))
    }
}

/// Section dimension for balls centred at x0.
pub fn section_dim<M: SliceMetric + ?Sized>(g: &M, x0: f64) -> usize {
    if pole_side(g, x0).is_some() {
        2
    } else {
        3
    }
}

/// exp at the axis point x0 of the tangent vector v (v[0] along increasing x).
pub fn section_point<M: SliceMetric + ?Sized>(g: &M, x0: f64, v: [f64; 3]) -> Result<SectionPoint> {
    let t = libm::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    let alpha = libm::atan2(v[2], v[1]);
    if t == 0.0 {
        return Ok(SectionPoint { s: x0, theta: 0.0, alpha: 0.0, v });
    }
    match pole_side(g, x0) {
        Some(upper) => {
            let len = if upper { g.total_axis_length() - t } else { t };
            if !(len >= 0.0 && len <= g.total_axis_length()) {
                return Err(Error::Range { what: "net point beyond the model", value: t });
            }
            let theta = libm::acos((v[0] / t).clamp(-1.0, 1.0));
            Ok(SectionPoint { s: g.axis_point(len), theta, alpha, v })
        }
        None => {
            let perp = libm::hypot(v[1], v[2]);
            let beta = libm::atan2(perp, v[0]);
            let (s, theta) = exp_slice(g, x0, beta, t).ok_or(Error::Range { what: "net point beyond the model", value: t })?;
            Ok(SectionPoint { s, theta: libm::fabs(theta), alpha, v })
        }
    }
}

/// Distance between section points, with an O(h) graph fallback when shooting fails.
/// Returns the distance and the fallback tolerance (0 for a converged BVP).
pub fn point_distance<M: SliceMetric + ?Sized>(g: &M, a: &SectionPoint, b: &SectionPoint) -> (f64, f64) {
    let gamma = a.angle_to(b);
    match slice_distance(g, a.s, b.s, gamma) {
        Ok(d) => (d, 0.0),
        Err(_) => graph_fallback(g, a.s, b.s, gamma),
    }
}

fn graph_fallback<M: SliceMetric + ?Sized>(g: &M, s1: f64, s2: f64, gamma: f64) -> (f64, f64) {
    let (lo, hi) = g.x_range();
    let b = g.coeffs(s1).b.max(g.coeffs(s2).b);
    let reach = libm::fabs(g.axis_length(s2) - g.axis_length(s1)) + b * gamma;
    let grid = GraphGrid {
        s_lo: (s1.min(s2) - reach).max(lo),
        s_hi: (s1.max(s2) + reach).min(hi),
        ns: 240,
        nt: 720,
        knight_moves: true,
    };
    let snap_s = |s: f64| (libm::round((s - grid.s_lo) / grid.ds()) as usize).min(grid.ns);
    let j = (libm::round(gamma / grid.dt()) as usize).min(grid.nt);
    let d = graph_distance(g, &grid, (snap_s(s1), 0), (snap_s(s2), j));
    let mut amax = 0.0_f64;
    let mut bmax = 0.0_f64;
    for i in 0..=grid.ns {
        let c = g.coeffs(grid.node_s(i));
        amax = amax.max(c.a);
        bmax = bmax.max(c.b);
    }
    (d, 2.0 * (amax * grid.ds() + bmax * grid.dt()) + 0.1 * d)
}

/// Grid points (spacing 2ε/√k) inside the tangent ball, plus the radial projections of
/// grid points just outside it; every point of the ball is within ε of the set.
pub fn tangent_net(dim: usize, radius: f64, eps: f64) -> Vec<[f64; 3]> {
    let k = dim as f64;
    let h = 2.0 * eps / libm::sqrt(k);
    let n = libm::ceil(radius / h) as i64 + 1;
    let reach = radius + eps;
    let mut out = Vec::new();
    let range3 = if dim == 3 { -n..=n } else { 0..=0 };
    for i in -n..=n {
        for j in -n..=n {
            for l in range3.clone() {
                let v = [i as f64 * h, j as f64 * h, l as f64 * h];
                let r = libm::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
                if r <= radius {
                    out.push(v);
                } else if r <= reach {
                    let c = radius / r;
                    let p = [v[0] * c, v[1] * c, v[2] * c];
                    let dup = out.iter().any(|q| {
                        libm::fabs(q[0] - p[0]) + libm::fabs(q[1] - p[1]) + libm::fabs(q[2] - p[2]) < 1e-3 * h
                    });
                    if !dup {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Points verified at most this many, to bound the cost of the net check.
const NET_VERIFY_SAMPLES: usize = 48;

/// An ε-net of the ball with its distance matrix under `g`.
///
/// The covering property is checked by taking a finer tangent grid, assigning each
/// fine point its nearest net point, and measuring the true distance for an evenly
/// spaced subset of them.
pub fn sample_net<M: SliceMetric + ?Sized>(
    g: &M,
    label: &str,
    region: NetRegion,
    eps: f64,
) -> Result<(Vec<SectionPoint>, FiniteMetricSpace)> {
    if !(eps > 0.0 && region.radius > 0.0) {
        return Err(Error::Domain { what: "net resolution", value: eps });
    }
    let dim = section_dim(g, region.center);
    let pts: Vec<SectionPoint> = tangent_net(dim, region.radius, eps)
        .into_iter()
        .map(|v| section_point(g, region.center, v))
        .collect::<Result<_>>()?;
    let fine = tangent_net(dim, region.radius, 0.5 * eps);
    let step = (fine.len() / NET_VERIFY_SAMPLES).max(1);
    for v in fine.iter().step_by(step) {
        let near = pts
            .iter()
            .min_by(|a, b| {
                let da = sq(a.v[0] - v[0]) + sq(a.v[1] - v[1]) + sq(a.v[2] - v[2]);
                let db = sq(b.v[0] - v[0]) + sq(b.v[1] - v[1]) + sq(b.v[2] - v[2]);
                da.partial_cmp(&db).unwrap_or(core::cmp::Ordering::Equal)
            })
            .ok_or(Error::Contract("empty net"))?;
        let p = section_point(g, region.center, *v)?;
        let (d, tol) = point_distance(g, &p, near);
        if d > eps * (1.0 + 1e-9) + tol {
            return Err(Error::Resolution { slack: d, allowance: eps });
        }
    }
    let provenance = Provenance {
        model: label.to_string(),
        region: format!("B({}, {})", region.center, region.radius),
        eps_net: eps,
    };
    let space = distance_matrix(g, &pts, provenance)?;
    Ok((pts, space))
}

/// Distance matrix of given section points under `g` (for matched nets in two metrics).
pub fn distance_matrix<M: SliceMetric + ?Sized>(
    g: &M,
    pts: &[SectionPoint],
    provenance: Provenance,
) -> Result<FiniteMetricSpace> {
    let n = pts.len();
    let mut d = alloc::vec![0.0; n * n];
    let mut fallback = 0.0_f64;
    for i in 0..n {
        for j in i + 1..n {
            let (v, tol) = point_distance(g, &pts[i], &pts[j]);
            fallback = fallback.max(tol);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    let scale = d.iter().fold(0.0_f64, |a, &b| a.max(b));
    let mut space = FiniteMetricSpace::with_tolerance(n, d, 0, provenance, 1e-8 * scale.max(1.0) + 2.0 * fallback)?;
    space.fallback_tolerance = fallback;
    Ok(space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::warped::profile::WarpedProfile;

    #[test]
    fn tangent_net_covers_the_disk() {
        let pts = tangent_net(2, 1.0, 0.2);
        let mut worst = 0.0_f64;
        for i in 0..=60 {
            for j in 0..=60 {
                let v = [-1.0 + i as f64 / 30.0, -1.0 + j as f64 / 30.0];
                if v[0] * v[0] + v[1] * v[1] > 1.0 {
                    continue;
                }
                let d = pts.iter().map(|p| libm::hypot(p[0] - v[0], p[1] - v[1])).fold(f64::INFINITY, f64::min);
                worst = worst.max(d);
            }
        }
        assert!(worst <= 0.2, "{worst}");
        assert!(pts.iter().all(|p| libm::hypot(p[0], p[1]) <= 1.0 + 1e-12));
    }

    #[test]
    fn gaussian_net_is_euclidean() {
        let g = WarpedProfile::flat(4, 20.0);
        let (pts, x) = sample_net(&g, "gaussian", NetRegion { center: 0.0, radius: 1.0 }, 0.2).unwrap();
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                let (a, b) = (pts[i].v, pts[j].v);
                let e = libm::hypot(a[0] - b[0], a[1] - b[1]);
                assert!(libm::fabs(x.dist(i, j) - e) < 1e-6, "{} vs {e}", x.dist(i, j));
            }
        }
        assert_eq!(x.fallback_tolerance, 0.0);
    }

    #[test]
    fn sphere_cap_matches_great_circles() {
        let r0 = libm::sqrt(6.0);
        let g = WarpedProfile::round(4, r0);
        let (pts, x) = sample_net(&g, "sphere", NetRegion { center: 0.0, radius: 0.5 }, 0.15).unwrap();
        let embed = |p: &SectionPoint| {
            let t = p.s / r0;
            let u = p.direction();
            [libm::cos(t), libm::sin(t) * u[0], libm::sin(t) * u[1], libm::sin(t) * u[2]]
        };
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let (a, b) = (embed(&pts[i]), embed(&pts[j]));
                let chord = libm::sqrt((0..4).map(|k| sq(a[k] - b[k])).sum::<f64>());
                let e = 2.0 * r0 * libm::asin(0.5 * chord);
                assert!(libm::fabs(x.dist(i, j) - e) < 1e-6, "{} vs {e}", x.dist(i, j));
            }
        }
    }

    #[test]
    fn cylinder_off_pole_points_are_three_dimensional() {
        let g = WarpedProfile::cylinder(4, 2.0, 40.0);
        assert_eq!(section_dim(&g, 0.0), 3);
        let p = section_point(&g, 0.0, [0.0, 0.3, 0.4]).unwrap();
        // straight line across the sphere factor: θ = |v|/ρ
        assert!(libm::fabs(p.s) < 1e-10 && libm::fabs(p.theta - 0.25) < 1e-10);
        let q = section_point(&g, 0.0, [0.0, 0.3, -0.4]).unwrap();
        // both on S³(2) through the centre direction, separated by the angle between (0.3, ±0.4)
        let gamma = p.angle_to(&q);
        let (d, _) = point_distance(&g, &p, &q);
        assert!(libm::fabs(d - 2.0 * gamma) < 1e-8);
    }

    #[test]
    fn graph_fallback_is_close_on_the_plane() {
        let g = WarpedProfile::flat(4, 20.0);
        let (d, tol) = graph_fallback(&g, 1.0, 2.0, 0.5);
        let e = libm::sqrt(1.0 + 4.0 - 4.0 * libm::cos(0.5));
        assert!(libm::fabs(d - e) <= tol, "{d} vs {e} ± {tol}");
    }
}
