//! Small numerical kernels: quadrature, root finding, splines, tridiagonal solves,
//! low-discrepancy sequences.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub const PI: f64 = core::f64::consts::PI;

#[inline]
pub fn sq(x: f64) -> f64 {
    x * x
}

/// Area of the unit sphere S^n in R^{n+1}.
pub fn sphere_area(n: usize) -> f64 {
    let k = (n as f64 + 1.0) / 2.0;
    2.0 * libm::pow(PI, k) / libm::tgamma(k)
}

/// Volume of the unit ball in R^m.
pub fn unit_ball_volume(m: usize) -> f64 {
    let k = m as f64 / 2.0;
    libm::pow(PI, k) / libm::tgamma(k + 1.0)
}

/// Composite Simpson rule; `panels` is rounded up to an even number.
pub fn simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = (panels.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * i as f64);
    }
    acc * h / 3.0
}

/// Bisection for a sign change of `f` on [lo, hi].
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if (flo > 0.0) == (fhi > 0.0) {
        return Err(Error::Convergence { what: "bisection (no sign change)", best: flo, bracket: (lo, hi) });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section search for a minimum of a unimodal function on [a, b].
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc < fd { (c, fc) } else { (d, fd) }
}

/// Thomas algorithm. `sub[0]` and `sup[n-1]` are ignored.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if sub.len() != n || sup.len() != n || rhs.len() != n || n == 0 {
        return Err(Error::Contract("tridiagonal bands must share one nonzero length"));
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut piv = diag[0];
    if piv == 0.0 {
        return Err(Error::Contract("zero pivot in tridiagonal solve"));
    }
    c[0] = sup[0] / piv;
    d[0] = rhs[0] / piv;
    for i in 1..n {
        piv = diag[i] - sub[i] * c[i - 1];
        if piv == 0.0 {
            return Err(Error::Contract("zero pivot in tridiagonal solve"));
        }
        c[i] = if i + 1 < n { sup[i] / piv } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Clamped cubic spline on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    m2: Vec<f64>,
}

impl CubicSpline {
    /// End slopes default to fourth-order one-sided differences.
    pub fn new(x0: f64, x1: f64, y: Vec<f64>, slopes: Option<(f64, f64)>) -> Result<Self> {
        let n = y.len();
        if n < 5 || !(x1 > x0) {
            return Err(Error::Contract("spline needs at least five samples on a proper interval"));
        }
        let h = (x1 - x0) / (n - 1) as f64;
        let (d0, dn) = slopes.unwrap_or_else(|| {
            let l = (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) / (12.0 * h);
            let k = n - 1;
            let r = (25.0 * y[k] - 48.0 * y[k - 1] + 36.0 * y[k - 2] - 16.0 * y[k - 3] + 3.0 * y[k - 4])
                / (12.0 * h);
            (l, r)
        });
        let mut sub = vec![1.0; n];
        let mut diag = vec![4.0; n];
        let mut sup = vec![1.0; n];
        let mut rhs = vec![0.0; n];
        diag[0] = 2.0;
        diag[n - 1] = 2.0;
        sub[0] = 0.0;
        sup[n - 1] = 0.0;
        rhs[0] = 6.0 / h * ((y[1] - y[0]) / h - d0);
        rhs[n - 1] = 6.0 / h * (dn - (y[n - 1] - y[n - 2]) / h);
        for i in 1..n - 1 {
            rhs[i] = 6.0 / (h * h) * (y[i + 1] - 2.0 * y[i] + y[i - 1]);
        }
        let m2 = solve_tridiagonal(&sub, &diag, &sup, &rhs)?;
        Ok(Self { x0, h, y, m2 })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x0, self.x0 + self.h * (self.y.len() - 1) as f64)
    }

    pub fn samples(&self) -> &[f64] {
        &self.y
    }

    /// Value and first three derivatives.
    pub fn eval(&self, x: f64) -> [f64; 4] {
        let n = self.y.len();
        let u = (x - self.x0) / self.h;
        let i = (libm::floor(u).max(0.0) as usize).min(n - 2);
        let h = self.h;
        let xl = self.x0 + h * i as f64;
        let a = xl + h - x;
        let b = x - xl;
        let (mi, mj) = (self.m2[i], self.m2[i + 1]);
        let (yi, yj) = (self.y[i], self.y[i + 1]);
        let ci = yi / h - mi * h / 6.0;
        let cj = yj / h - mj * h / 6.0;
        [
            mi * a * a * a / (6.0 * h) + mj * b * b * b / (6.0 * h) + ci * a + cj * b,
            -mi * a * a / (2.0 * h) + mj * b * b / (2.0 * h) - ci + cj,
            (mi * a + mj * b) / h,
            (mj - mi) / h,
        ]
    }
}

/// Piecewise cubic Hermite interpolant of a function with known derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteTable {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
}

impl HermiteTable {
    fn locate(&self, x: f64) -> usize {
        match self.x.binary_search_by(|v| v.partial_cmp(&x).unwrap_or(core::cmp::Ordering::Less)) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.x.len() - 2),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.locate(x);
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.y[i]
            + (t3 - 2.0 * t2 + t) * h * self.dy[i]
            + (-2.0 * t3 + 3.0 * t2) * self.y[i + 1]
            + (t3 - t2) * h * self.dy[i + 1]
    }

    /// Inverse for a strictly increasing table: returns x with eval(x) ≈ v.
    pub fn inverse_guess(&self, v: f64) -> f64 {
        let j = match self.y.binary_search_by(|w| w.partial_cmp(&v).unwrap_or(core::cmp::Ordering::Less)) {
            Ok(i) => return self.x[i],
            Err(i) => i.saturating_sub(1).min(self.y.len() - 2),
        };
        let (y0, y1) = (self.y[j], self.y[j + 1]);
        let t = if y1 > y0 { ((v - y0) / (y1 - y0)).clamp(0.0, 1.0) } else { 0.0 };
        self.x[j] + t * (self.x[j + 1] - self.x[j])
    }
}

/// Radical-inverse (van der Corput) sequence in the given base.
pub fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    let step = inv;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv *= step;
    }
    out
}

/// Halton point in [0,1)^D using the first D primes.
pub fn halton<const D: usize>(i: u64) -> [f64; D] {
    const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
    let mut out = [0.0; D];
    for (k, o) in out.iter_mut().enumerate() {
        *o = radical_inverse(i, PRIMES[k]);
    }
    out
}

/// SplitMix64 generator for reproducible sampling without std.
#[derive(Debug, Clone)]
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Five-point central first derivative.
pub fn d1_5pt<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Five-point central second derivative.
pub fn d2_5pt<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_constants() {
        assert!((sphere_area(1) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-13);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 2);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn tridiagonal_matches_dense() {
        // [2 1 0; 1 3 1; 0 1 2] x = [3, 5, 3] has solution (1, 1, 1)
        let x = solve_tridiagonal(&[0.0, 1.0, 1.0], &[2.0, 3.0, 2.0], &[1.0, 1.0, 0.0], &[3.0, 5.0, 3.0]).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn spline_reproduces_sine() {
        let n = 2048;
        let y: Vec<f64> = (0..n).map(|i| libm::sin(3.0 * i as f64 / (n - 1) as f64)).collect();
        let s = CubicSpline::new(0.0, 3.0, y, Some((1.0, libm::cos(3.0)))).unwrap();
        for k in 1..50 {
            let x = 3.0 * k as f64 / 50.3;
            let e = s.eval(x);
            assert!((e[0] - libm::sin(x)).abs() < 1e-11);
            assert!((e[1] - libm::cos(x)).abs() < 1e-7);
            assert!((e[2] + libm::sin(x)).abs() < 1e-4);
        }
    }

    #[test]
    fn bisection_and_golden() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - libm::sqrt(2.0)).abs() < 1e-13);
        let (x, _) = golden_min(|x| (x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-9);
        assert!((x - 0.3).abs() < 1e-8);
    }

    #[test]
    fn halton_is_in_unit_cube() {
        for i in 0..100 {
            let p: [f64; 3] = halton(i);
            assert!(p.iter().all(|v| (0.0..1.0).contains(v)));
        }
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
    }
}
