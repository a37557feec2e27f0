use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::num::CubicSpline;

/// Closed-form or sampled warping function φ.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// φ(s) = s
    Flat,
    /// φ(s) = r₀ sin(s/r₀)
    Round { radius: f64 },
    /// φ(s) = ρ
    Cylinder { radius: f64 },
    /// φ(s) = A(as)B(as)/a with a = √(2β/π)
    ConformalGaussian { beta: f64 },
    /// cubic spline through uniform samples
    Sampled(CubicSpline),
}

/// Rotationally symmetric metric ds² + φ(s)² g_{S^{m-1}} on [s_lo, s_hi].
#[derive(Debug, Clone, PartialEq)]
pub struct WarpedProfile {
    pub m: usize,
    pub domain: (f64, f64),
    /// smooth poles (φ = 0, |φ'| = 1) at the two endpoints
    pub caps: (bool, bool),
    pub shape: Shape,
}

impl WarpedProfile {
    pub fn flat(m: usize, s_max: f64) -> Self {
        Self { m, domain: (0.0, s_max), caps: (true, false), shape: Shape::Flat }
    }

    pub fn round(m: usize, radius: f64) -> Self {
        Self { m, domain: (0.0, core::f64::consts::PI * radius), caps: (true, true), shape: Shape::Round { radius } }
    }

    pub fn cylinder(m: usize, radius: f64, half_length: f64) -> Self {
        Self { m, domain: (-half_length, half_length), caps: (false, false), shape: Shape::Cylinder { radius } }
    }

    /// Spline through `samples` on a uniform grid over `domain`; capped ends get slope ±1.
    pub fn sampled(m: usize, domain: (f64, f64), samples: Vec<f64>, caps: (bool, bool)) -> Result<Self> {
        let slopes = match caps {
            (true, true) => Some((1.0, -1.0)),
            _ => None,
        };
        let mut spline = CubicSpline::new(domain.0, domain.1, samples.clone(), slopes)?;
        if caps.0 != caps.1 {
            // one-sided clamp: rebuild with the estimated slope on the open end
            let free = CubicSpline::new(domain.0, domain.1, samples.clone(), None)?;
            let (l, r) = (free.eval(domain.0)[1], free.eval(domain.1)[1]);
            let s = (if caps.0 { 1.0 } else { l }, if caps.1 { -1.0 } else { r });
            spline = CubicSpline::new(domain.0, domain.1, samples, Some(s))?;
        }
        let p = Self { m, domain, caps, shape: Shape::Sampled(spline) };
        p.validate()?;
        Ok(p)
    }

    /// Highest derivative order that `jet` fills with finite values.
    pub fn max_order(&self) -> usize {
        match self.shape {
            Shape::Sampled(_) => 3,
            _ => 5,
        }
    }

    /// φ and its derivatives up to order 5 (NaN past `max_order`).
    pub fn jet(&self, s: f64) -> [f64; 6] {
        match &self.shape {
            Shape::Flat => [s, 1.0, 0.0, 0.0, 0.0, 0.0],
            Shape::Cylinder { radius } => [*radius, 0.0, 0.0, 0.0, 0.0, 0.0],
            Shape::Round { radius } => {
                let r = *radius;
                let (sn, cs) = (libm::sin(s / r), libm::cos(s / r));
                [r * sn, cs, -sn / r, -cs / (r * r), sn / (r * r * r), cs / (r * r * r * r)]
            }
            Shape::ConformalGaussian { beta } => crate::gaussian::profile_jet(*beta, s),
            Shape::Sampled(sp) => {
                let e = sp.eval(s);
                [e[0], e[1], e[2], e[3], f64::NAN, f64::NAN]
            }
        }
    }

    pub fn phi(&self, s: f64) -> f64 {
        self.jet(s)[0]
    }

    /// Endpoints where φ vanishes (smooth caps or singular tips).
    pub fn tips(&self) -> (bool, bool) {
        let scale = (self.domain.1 - self.domain.0).max(1.0);
        let z = |s: f64| libm::fabs(self.phi(s)) < 1e-10 * scale;
        (self.caps.0 || z(self.domain.0), self.caps.1 || z(self.domain.1))
    }

    pub fn contains(&self, s: f64) -> bool {
        s >= self.domain.0 && s <= self.domain.1
    }

    pub fn check_point(&self, s: f64) -> Result<()> {
        if !self.contains(s) || s.is_nan() {
            return Err(Error::Domain { what: "arclength", value: s });
        }
        Ok(())
    }

    /// Structural invariants: positivity inside, cap behaviour at flagged ends.
    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::UnsupportedDimension { m: self.m, min: 2 });
        }
        let (lo, hi) = self.domain;
        if !(hi > lo) {
            return Err(Error::Domain { what: "profile domain length", value: hi - lo });
        }
        let n = 512;
        for i in 1..n {
            let s = lo + (hi - lo) * i as f64 / n as f64;
            if !(self.phi(s) > 0.0) {
                return Err(Error::DegenerateProfile { s });
            }
        }
        let tol = if matches!(self.shape, Shape::Sampled(_)) { 1e-4 } else { 1e-8 };
        for (flag, s, sign) in [(self.caps.0, lo, 1.0), (self.caps.1, hi, -1.0)] {
            if flag {
                let j = self.jet(s);
                if libm::fabs(j[0]) > tol || libm::fabs(j[1] - sign) > tol {
                    return Err(Error::DegenerateProfile { s });
                }
            }
        }
        Ok(())
    }
}

/// Potential f(s) of a shrinker model.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialShape {
    Constant(f64),
    /// f = k (s - center)² + offset
    Quadratic { k: f64, center: f64, offset: f64 },
    Sampled(CubicSpline),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    pub shape: PotentialShape,
    /// axis coordinate of the minimum point p
    pub f_min_location: f64,
}

impl Potential {
    pub fn constant(c: f64, at: f64) -> Self {
        Self { shape: PotentialShape::Constant(c), f_min_location: at }
    }

    pub fn quadratic(k: f64, center: f64, offset: f64) -> Self {
        Self { shape: PotentialShape::Quadratic { k, center, offset }, f_min_location: center }
    }

    /// f, f', f'', f'''
    pub fn jet(&self, s: f64) -> [f64; 4] {
        match &self.shape {
            PotentialShape::Constant(c) => [*c, 0.0, 0.0, 0.0],
            PotentialShape::Quadratic { k, center, offset } => {
                let d = s - center;
                [k * d * d + offset, 2.0 * k * d, 2.0 * k, 0.0]
            }
            PotentialShape::Sampled(sp) => sp.eval(s),
        }
    }

    pub fn f(&self, s: f64) -> f64 {
        self.jet(s)[0]
    }

    /// Same potential with the argument rescaled: s ↦ f(s/λ).
    pub fn rescaled(&self, lambda: f64) -> Self {
        let shape = match &self.shape {
            PotentialShape::Constant(c) => PotentialShape::Constant(*c),
            PotentialShape::Quadratic { k, center, offset } => {
                PotentialShape::Quadratic { k: k / (lambda * lambda), center: center * lambda, offset: *offset }
            }
            PotentialShape::Sampled(sp) => {
                let (a, b) = sp.range();
                PotentialShape::Sampled(
                    CubicSpline::new(a * lambda, b * lambda, sp.samples().to_vec(), None)
                        .expect("rescaling keeps a valid spline"),
                )
            }
        };
        Self { shape, f_min_location: self.f_min_location * lambda }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::d1_5pt;

    #[test]
    fn analytic_jets_match_stencils() {
        let profiles = [
            WarpedProfile::flat(4, 20.0),
            WarpedProfile::round(4, libm::sqrt(6.0)),
            WarpedProfile::cylinder(4, 2.0, 40.0),
            crate::gaussian::ConformalGaussian::new(4).unwrap().profile,
        ];
        for p in &profiles {
            let (lo, hi) = p.domain;
            for i in 1..40 {
                let s = lo + (hi - lo) * i as f64 / 40.0;
                let j = p.jet(s);
                let h = 1e-3 * (hi - lo).min(1.0);
                for k in 0..4 {
                    let fd = d1_5pt(|t| p.jet(t)[k], s, h);
                    let rel = libm::fabs(fd - j[k + 1]) / j[k + 1].abs().max(1.0);
                    assert!(rel < 1e-5, "{:?} s={s} order {}", p.shape, k + 1);
                }
            }
        }
    }

    #[test]
    fn sampled_sphere_is_valid() {
        let r = libm::sqrt(6.0);
        let n = 2048;
        let hi = core::f64::consts::PI * r;
        let y: Vec<f64> = (0..n).map(|i| r * libm::sin(hi * i as f64 / (n - 1) as f64 / r)).collect();
        let p = WarpedProfile::sampled(4, (0.0, hi), y, (true, true)).unwrap();
        for i in 1..60 {
            let s = hi * i as f64 / 60.0;
            let j = p.jet(s);
            assert!(libm::fabs(j[0] - r * libm::sin(s / r)) < 1e-9);
            let fd = d1_5pt(|t| p.phi(t), s, 1e-3);
            assert!(libm::fabs(fd - j[1]) / j[1].abs().max(1.0) < 1e-5);
        }
    }

    #[test]
    fn degenerate_profiles_rejected() {
        let y: Vec<f64> = (0..64).map(|i| libm::sin(i as f64 / 63.0 * 6.0)).collect();
        assert!(WarpedProfile::sampled(4, (0.0, 6.0), y, (true, false)).is_err());
    }
}
