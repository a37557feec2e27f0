//! Two-dimensional totally geodesic slice a(x)²dx² + b(x)²dθ² of a rotationally
//! symmetric metric. Warped profiles are the case a ≡ 1; conformal charts are not.

use super::profile::WarpedProfile;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceCoeffs {
    pub a: f64,
    pub da: f64,
    pub b: f64,
    pub db: f64,
    pub d2b: f64,
}

/// Metric a(x)² dx² + b(x)² g_{S^{m-1}} in an axis coordinate x.
pub trait SliceMetric {
    fn dim(&self) -> usize;
    fn x_range(&self) -> (f64, f64);
    fn coeffs(&self, x: f64) -> SliceCoeffs;
    /// smooth poles at the two ends
    fn caps(&self) -> (bool, bool);
    /// ends where b vanishes, smooth or not
    fn tips(&self) -> (bool, bool);
    /// ∫ a dx from the lower end
    fn axis_length(&self, x: f64) -> f64;
    /// inverse of `axis_length`
    fn axis_point(&self, len: f64) -> f64;

    fn total_axis_length(&self) -> f64 {
        self.axis_length(self.x_range().1)
    }
}

impl SliceMetric for WarpedProfile {
    fn dim(&self) -> usize {
        self.m
    }
    fn x_range(&self) -> (f64, f64) {
        self.domain
    }
    fn coeffs(&self, x: f64) -> SliceCoeffs {
        let j = self.jet(x);
        SliceCoeffs { a: 1.0, da: 0.0, b: j[0], db: j[1], d2b: j[2] }
    }
    fn caps(&self) -> (bool, bool) {
        self.caps
    }
    fn tips(&self) -> (bool, bool) {
        WarpedProfile::tips(self)
    }
    fn axis_length(&self, x: f64) -> f64 {
        x - self.domain.0
    }
    fn axis_point(&self, len: f64) -> f64 {
        self.domain.0 + len
    }
}

/// Distance along the axis to the nearest smooth cap, with the side (false = lower).
pub fn cap_distance<M: SliceMetric + ?Sized>(g: &M, x: f64) -> Option<(f64, bool)> {
    let (lo, hi) = g.caps();
    let d_lo = if lo { Some(g.axis_length(x)) } else { None };
    let d_hi = if hi { Some(g.total_axis_length() - g.axis_length(x)) } else { None };
    match (d_lo, d_hi) {
        (Some(a), Some(b)) => Some(if a <= b { (a, false) } else { (b, true) }),
        (Some(a), None) => Some((a, false)),
        (None, Some(b)) => Some((b, true)),
        (None, None) => None,
    }
}

/// Below this axis distance from a smooth cap the spherical curvature is taken
/// from the cap limit K_sph = K_rad (error O(σ²)).
pub const CAP_SERIES: f64 = 1e-4;

fn raw_sectional(c: &SliceCoeffs) -> (f64, f64) {
    let ps = c.db / c.a;
    let pss = (c.d2b * c.a - c.db * c.da) / (c.a * c.a * c.a);
    (-pss / c.b, (1.0 - ps * ps) / (c.b * c.b))
}

/// Radial and spherical sectional curvatures (K_rad, K_sph).
pub fn sectional<M: SliceMetric + ?Sized>(g: &M, x: f64) -> (f64, f64) {
    if let Some((sigma, upper)) = cap_distance(g, x) {
        if sigma < CAP_SERIES {
            let probe = 1e-7_f64.max(sigma);
            let len = if upper { g.total_axis_length() - probe } else { probe };
            let k = raw_sectional(&g.coeffs(g.axis_point(len))).0;
            return (k, k);
        }
    }
    raw_sectional(&g.coeffs(x))
}

/// Curvature quantities of a warped metric at one axis point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureData {
    pub s: f64,
    pub k_rad: f64,
    pub k_sph: f64,
    pub ric_rad: f64,
    pub ric_sph: f64,
    pub r: f64,
    pub norm_rc: f64,
    /// full tensor norm (Σ R_ijkl² over an orthonormal frame)^{1/2}
    pub norm_rm: f64,
}

impl CurvatureData {
    pub fn from_sectional(m: usize, s: f64, k_rad: f64, k_sph: f64) -> Self {
        let mf = m as f64;
        let ric_rad = (mf - 1.0) * k_rad;
        let ric_sph = k_rad + (mf - 2.0) * k_sph;
        let r = ric_rad + (mf - 1.0) * ric_sph;
        let norm_rc = libm::sqrt(ric_rad * ric_rad + (mf - 1.0) * ric_sph * ric_sph);
        let pairs = (mf - 1.0) * (mf - 2.0) / 2.0;
        let norm_rm = 2.0 * libm::sqrt((mf - 1.0) * k_rad * k_rad + pairs * k_sph * k_sph);
        Self { s, k_rad, k_sph, ric_rad, ric_sph, r, norm_rc, norm_rm }
    }
}

/// Curvature of a warped profile from its analytic jet; caps use the series limit.
pub fn curvature_at(p: &WarpedProfile, s: f64) -> Result<CurvatureData> {
    p.check_point(s)?;
    let (lo, hi) = p.domain;
    let at_cap = |end: f64, flag: bool| flag && libm::fabs(s - end) < CAP_SERIES;
    let (k_rad, k_sph) = if at_cap(lo, p.caps.0) || at_cap(hi, p.caps.1) {
        let j = p.jet(s);
        let k = if libm::fabs(j[0]) < 1e-300 { -j[3] / j[1] } else { -j[2] / j[0] };
        (k, k)
    } else {
        let j = p.jet(s);
        if !(j[0] > 0.0) {
            return Err(Error::DegenerateProfile { s });
        }
        (-j[2] / j[0], (1.0 - j[1] * j[1]) / (j[0] * j[0]))
    };
    Ok(CurvatureData::from_sectional(p.m, s, k_rad, k_sph))
}

/// Curvature of any slice metric (used for conformal charts).
pub fn slice_curvature<M: SliceMetric + ?Sized>(g: &M, x: f64) -> CurvatureData {
    let (k_rad, k_sph) = sectional(g, x);
    CurvatureData::from_sectional(g.dim(), x, k_rad, k_sph)
}

/// Hessian eigenvalues of f (radial, spherical) and |∇f|².
pub fn potential_hessian(
    p: &WarpedProfile,
    pot: &super::profile::Potential,
    s: f64,
) -> Result<(f64, f64, f64)> {
    p.check_point(s)?;
    let j = p.jet(s);
    let f = pot.jet(s);
    let hess_sph = if libm::fabs(j[0]) < 1e-12 {
        // f'/φ → f''/φ' at a pole
        if p.caps.0 || p.caps.1 { f[2] } else { return Err(Error::DegenerateProfile { s }) }
    } else {
        if !(j[0] > 0.0) {
            return Err(Error::DegenerateProfile { s });
        }
        f[1] * j[1] / j[0]
    };
    Ok((f[2], hess_sph, f[1] * f[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::warped::profile::Potential;

    #[test]
    fn flat_sphere_cylinder_examples() {
        let g = WarpedProfile::flat(4, 20.0);
        let c = curvature_at(&g, 1.0).unwrap();
        assert_eq!((c.k_rad, c.k_sph, c.r), (0.0, 0.0, 0.0));

        let r0 = libm::sqrt(6.0);
        let c = curvature_at(&WarpedProfile::round(4, r0), 1.0).unwrap();
        // constant curvature 1/r0², R = m(m-1)/r0²
        assert!(libm::fabs(c.k_rad - 1.0 / 6.0) < 1e-14);
        assert!(libm::fabs(c.k_sph - 1.0 / 6.0) < 1e-14);
        assert!(libm::fabs(c.r - 12.0 / 6.0) < 1e-13);

        // R = (m-1)(m-2)/ρ² on R × S^{m-1}(ρ), ρ² = 2(m-2)
        let c = curvature_at(&WarpedProfile::cylinder(4, 2.0, 40.0), 3.3).unwrap();
        assert_eq!(c.k_rad, 0.0);
        assert!(libm::fabs(c.k_sph - 0.25) < 1e-15);
        assert!(libm::fabs(c.r - 1.5) < 1e-14);
    }

    #[test]
    fn caps_use_series_limit() {
        let g = WarpedProfile::round(5, 2.0);
        for s in [0.0, 1e-9, 5e-5, core::f64::consts::PI * 2.0] {
            let c = curvature_at(&g, s).unwrap();
            assert!(libm::fabs(c.k_rad - 0.25) < 1e-8 && libm::fabs(c.k_sph - c.k_rad) < 1e-4, "s={s}");
        }
        let (kr, ks) = sectional(&g, 0.0);
        assert!(libm::fabs(kr - 0.25) < 1e-8 && kr == ks);
    }

    #[test]
    fn hessian_examples() {
        let g = WarpedProfile::flat(4, 20.0);
        let f = Potential::quadratic(0.25, 0.0, 0.0);
        assert_eq!(potential_hessian(&g, &f, 2.0).unwrap(), (0.5, 0.5, 1.0));
        assert_eq!(potential_hessian(&g, &f, 0.0).unwrap(), (0.5, 0.5, 0.0));
        let c = WarpedProfile::cylinder(4, 2.0, 40.0);
        let f = Potential::quadratic(0.25, 0.0, 1.5);
        assert_eq!(potential_hessian(&c, &f, 0.0).unwrap(), (0.5, 0.0, 0.0));
        let s = WarpedProfile::round(4, libm::sqrt(6.0));
        let f = Potential::constant(2.0, 0.0);
        assert_eq!(potential_hessian(&s, &f, 1.3).unwrap(), (0.0, 0.0, 0.0));
    }

    #[test]
    fn out_of_domain_is_an_error() {
        let g = WarpedProfile::flat(4, 20.0);
        assert!(matches!(curvature_at(&g, -0.1), Err(Error::Domain { .. })));
        assert!(curvature_at(&g, 20.5).is_err());
    }

    #[test]
    fn norm_conventions() {
        // round S^m(1): |Rm|² = 2m(m-1), |Rc|² = m(m-1)²
        let c = CurvatureData::from_sectional(4, 0.0, 1.0, 1.0);
        assert!(libm::fabs(c.norm_rm * c.norm_rm - 24.0) < 1e-12);
        assert!(libm::fabs(c.norm_rc * c.norm_rc - 36.0) < 1e-12);
    }
}
