//! Volumes of geodesic balls, plain or weighted.
//!
//! Poles reduce to a 1D integral of b^{m-1}. Other axis points use polar
//! coordinates of the exponential map, with the Jacobian from the two Jacobi fields.

use alloc::vec::Vec;

use super::geodesic::ray_with_jacobi;
use super::profile::{Potential, WarpedProfile};
use super::slice::SliceMetric;
use crate::error::{Error, Result};
use crate::num::{simpson, sphere_area, PI};

pub const DEFAULT_PANELS: usize = 4096;
pub const DEFAULT_ANGLE_PANELS: usize = 64;

/// Which tip (if any) the axis point sits on.
pub fn pole_side<M: SliceMetric + ?Sized>(g: &M, x: f64) -> Option<bool> {
    let (lo, hi) = g.x_range();
    let (tl, th) = g.tips();
    if tl && x <= lo {
        Some(false)
    } else if th && x >= hi {
        Some(true)
    } else {
        None
    }
}

/// ∫_{B(x0, r)} w dv for a weight depending on the axis coordinate only.
pub fn ball_integral<M: SliceMetric + ?Sized, W: Fn(f64) -> f64>(g: &M, x0: f64, r: f64, w: &W) -> Result<f64> {
    let (lo, hi) = g.x_range();
    if !(x0 >= lo && x0 <= hi) {
        return Err(Error::Domain { what: "ball center", value: x0 });
    }
    if !(r >= 0.0) {
        return Err(Error::Domain { what: "ball radius", value: r });
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let m = g.dim();
    match pole_side(g, x0) {
        Some(upper) => {
            let tot = g.total_axis_length();
            let (tl, th) = g.tips();
            let far_closed = if upper { tl } else { th };
            if r > tot && !far_closed {
                return Err(Error::Range { what: "ball radius beyond truncated domain", value: r });
            }
            let reach = r.min(tot);
            let x_end = if upper { g.axis_point(tot - reach) } else { g.axis_point(reach) };
            let (a, b) = if upper { (x_end, hi) } else { (lo, x_end) };
            let area = sphere_area(m - 1);
            let v = simpson(
                |x| {
                    let c = g.coeffs(x);
                    c.a * libm::pow(c.b.max(0.0), (m - 1) as f64) * w(x)
                },
                a,
                b,
                DEFAULT_PANELS,
            );
            Ok(area * v)
        }
        None => polar_ball_integral(g, x0, &[r], w, DEFAULT_ANGLE_PANELS).map(|v| v[0]),
    }
}

/// Ball integrals at several radii from one sweep of rays (radii increasing).
pub fn polar_ball_integral<M: SliceMetric + ?Sized, W: Fn(f64) -> f64>(
    g: &M,
    x0: f64,
    radii: &[f64],
    w: &W,
    angle_panels: usize,
) -> Result<Vec<f64>> {
    let m = g.dim();
    if m < 3 {
        return Err(Error::UnsupportedDimension { m, min: 3 });
    }
    let n = (angle_panels.max(2) + 1) & !1;
    let h = PI / n as f64;
    let mut acc = alloc::vec![0.0; radii.len()];
    for k in 1..n {
        let beta = h * k as f64;
        let wk = if k % 2 == 1 { 4.0 } else { 2.0 };
        let sp = libm::pow(libm::sin(beta), (m - 2) as f64);
        let samples = ray_with_jacobi(g, x0, beta, radii, w);
        for (i, s) in samples.iter().enumerate() {
            if !s.valid {
                return Err(Error::Capability("ball leaves the region where polar coordinates are valid"));
            }
            acc[i] += wk * sp * s.integral;
        }
    }
    let area = sphere_area(m - 2);
    Ok(acc.into_iter().map(|v| area * v * h / 3.0).collect())
}

/// Largest radius for which polar coordinates at x0 stay valid (searched up to `r_cap`).
pub fn polar_radius_limit<M: SliceMetric + ?Sized>(g: &M, x0: f64, r_cap: f64) -> f64 {
    if pole_side(g, x0).is_some() {
        return r_cap;
    }
    let n = 24;
    let marks: Vec<f64> = (1..=64).map(|i| r_cap * i as f64 / 64.0).collect();
    let mut limit = r_cap;
    for k in 0..=n {
        let beta = PI * k as f64 / n as f64;
        let rs = ray_with_jacobi(g, x0, beta, &marks, &|_| 1.0);
        if let Some(i) = rs.iter().position(|s| !s.valid) {
            let bad = if i == 0 { 0.0 } else { marks[i - 1] };
            limit = limit.min(bad);
        }
    }
    limit
}

/// Volume (or e^{-f}-weighted volume) of the geodesic ball B(center, r).
pub fn ball_volume(
    p: &WarpedProfile,
    pot: Option<&Potential>,
    center: f64,
    r: f64,
    weighted: bool,
) -> Result<f64> {
    if weighted {
        let f = pot.ok_or(Error::Contract("weighted volume needs a potential"))?;
        ball_integral(p, center, r, &|s| libm::exp(-f.f(s)))
    } else {
        ball_integral(p, center, r, &|_| 1.0)
    }
}

/// Euclidean-normalized ratio |B(x, r)| / (ω_m r^m).
pub fn volume_ratio<M: SliceMetric + ?Sized>(g: &M, x0: f64, r: f64) -> Result<f64> {
    let v = ball_integral(g, x0, r, &|_| 1.0)?;
    Ok(v / (crate::num::unit_ball_volume(g.dim()) * libm::pow(r, g.dim() as f64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::unit_ball_volume;

    #[test]
    fn euclidean_ball_at_origin() {
        let g = WarpedProfile::flat(4, 20.0);
        let v = ball_volume(&g, None, 0.0, 1.0, false).unwrap();
        assert!(libm::fabs(v - PI * PI / 2.0) < 1e-12);
    }

    #[test]
    fn full_round_sphere() {
        let r0 = libm::sqrt(6.0);
        let g = WarpedProfile::round(4, r0);
        let v = ball_volume(&g, None, 0.0, PI * r0, false).unwrap();
        // Vol S⁴(r₀) = (8π²/3) r₀⁴
        assert!(libm::fabs(v - 8.0 * PI * PI / 3.0 * 36.0) < 1e-8);
        assert!(libm::fabs(v - 96.0 * PI * PI) < 1e-8);
    }

    #[test]
    fn off_axis_flat_ball_is_euclidean() {
        let g = WarpedProfile::flat(4, 20.0);
        let v = ball_integral(&g, 3.0, 0.8, &|_| 1.0).unwrap();
        let e = unit_ball_volume(4) * libm::pow(0.8, 4.0);
        assert!(libm::fabs(v / e - 1.0) < 1e-8, "{v} vs {e}");
    }

    #[test]
    fn cylinder_ball_matches_nested_product_formula() {
        let rho = 2.0;
        let m = 4;
        let g = WarpedProfile::cylinder(m, rho, 40.0);
        let r = 1.3;
        let v = ball_integral(&g, 0.0, r, &|_| 1.0).unwrap();
        // ∫_{-r}^{r} |cap of geodesic radius √(r²-s²) in S³(ρ)| ds
        let cap = |u: f64| sphere_area(m - 2) * simpson(|t| libm::pow(rho * libm::sin(t / rho), (m - 2) as f64), 0.0, u, 2000);
        let e = simpson(|s| cap(libm::sqrt((r * r - s * s).max(0.0))), -r, r, 2000);
        assert!(libm::fabs(v / e - 1.0) < 1e-5, "{v} vs {e}");
    }

    #[test]
    fn sphere_off_pole_equals_pole_ball() {
        let g = WarpedProfile::round(4, 1.0);
        let a = ball_integral(&g, 0.0, 0.6, &|_| 1.0).unwrap();
        let b = ball_integral(&g, 1.1, 0.6, &|_| 1.0).unwrap();
        assert!(libm::fabs(a / b - 1.0) < 1e-7, "{a} {b}");
    }

    #[test]
    fn weighted_ratio_bound_gaussian() {
        let g = WarpedProfile::flat(4, 20.0);
        let f = Potential::quadratic(0.25, 0.0, 0.0);
        let v2 = ball_volume(&g, Some(&f), 0.0, 2.0, true).unwrap();
        let v1 = ball_volume(&g, Some(&f), 0.0, 1.0, true).unwrap();
        assert!(v2 / v1 <= 16.0);
    }

    #[test]
    fn bishop_gromov_on_sphere() {
        let g = WarpedProfile::round(4, libm::sqrt(6.0));
        let mut prev = f64::INFINITY;
        for i in 1..=20 {
            let r = 7.6 * i as f64 / 20.0;
            let q = volume_ratio(&g, 0.0, r).unwrap();
            assert!(q <= prev + 1e-12);
            prev = q;
        }
    }

    #[test]
    fn truncated_domain_rejects_large_balls() {
        let g = WarpedProfile::flat(4, 20.0);
        assert!(matches!(ball_volume(&g, None, 0.0, 25.0, false), Err(Error::Range { .. })));
    }
}
