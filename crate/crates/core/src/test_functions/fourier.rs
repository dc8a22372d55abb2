//! Fourier transform on ℝ with the character `e^{−2πixy}`.

use crate::error::{Error, Result};
use crate::quad::{self, Estimate};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

/// How far a function on ℝ extends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extent {
    /// Vanishes outside `[a, b]`.
    Compact(f64, f64),
    /// Below the quadrature tolerance outside `[−radius, radius]`.
    Decaying { radius: f64 },
    /// No certificate.
    Unbounded,
}

/// A complex function on ℝ together with its extent and the points where it
/// may fail to be smooth.
#[derive(Clone)]
pub struct RealFunction {
    f: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
    extent: Extent,
    breaks: Vec<f64>,
}

impl std::fmt::Debug for RealFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RealFunction({:?}, breaks={:?})", self.extent, self.breaks)
    }
}

impl RealFunction {
    pub fn new(f: impl Fn(f64) -> Complex64 + Send + Sync + 'static, extent: Extent) -> Self {
        RealFunction { f: Arc::new(f), extent, breaks: Vec::new() }
    }

    pub fn real(f: impl Fn(f64) -> f64 + Send + Sync + 'static, extent: Extent) -> Self {
        Self::new(move |x| Complex64::new(f(x), 0.0), extent)
    }

    pub fn with_breaks(mut self, breaks: Vec<f64>) -> Self {
        self.breaks = breaks;
        self
    }

    pub fn zero() -> Self {
        Self::real(|_| 0.0, Extent::Compact(0.0, 0.0))
    }

    /// `e^{−π a x²}`, with its decay radius.
    pub fn gaussian(a: f64) -> Self {
        let radius = (40.0 / (PI * a)).sqrt();
        Self::real(move |x| (-PI * a * x * x).exp(), Extent::Decaying { radius })
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        match self.extent {
            Extent::Compact(a, b) if x < a || x > b => Complex64::new(0.0, 0.0),
            _ => (self.f)(x),
        }
    }

    pub fn extent(&self) -> Extent {
        self.extent
    }

    /// Integration interval, or an error when no certificate is available.
    pub fn interval(&self) -> Result<(f64, f64)> {
        match self.extent {
            Extent::Compact(a, b) => Ok((a, b)),
            Extent::Decaying { radius } => Ok((-radius, radius)),
            Extent::Unbounded => Err(Error::Domain("Fourier transform needs compact support or a decay certificate".into())),
        }
    }

    fn breaks_in(&self, a: f64, b: f64, period: f64) -> Vec<f64> {
        let mut out = vec![a, b];
        out.extend(self.breaks.iter().copied().filter(|x| *x > a && *x < b));
        let pieces = ((b - a) / period).ceil().clamp(1.0, 4096.0) as usize;
        for k in 1..pieces {
            out.push(a + (b - a) * k as f64 / pieces as f64);
        }
        out.sort_by(|x, y| x.total_cmp(y));
        out.dedup();
        out
    }

    /// `∫ f(y) dy`.
    pub fn integral(&self, tol: f64) -> Result<Estimate<Complex64>> {
        let (a, b) = self.interval()?;
        if a == b {
            return Ok(Estimate { value: Complex64::new(0.0, 0.0), error: 0.0 });
        }
        quad::integrate_with_breaks(|y| (self.f)(y), &self.breaks_in(a, b, f64::INFINITY), tol)
    }

    /// `∫ |f(y)|² dy`.
    pub fn norm_sqr(&self, tol: f64) -> Result<f64> {
        let (a, b) = self.interval()?;
        if a == b {
            return Ok(0.0);
        }
        Ok(quad::integrate_with_breaks(|y| (self.f)(y).norm_sqr(), &self.breaks_in(a, b, f64::INFINITY), tol)?.value)
    }
}

/// The transform `ξ ↦ ∫ f(y) e^{−2πiξy} dy`, evaluated lazily.
#[derive(Clone, Debug)]
pub struct FourierTransform {
    source: RealFunction,
    tol: f64,
}

impl FourierTransform {
    pub fn eval(&self, xi: f64) -> Result<Estimate<Complex64>> {
        let (a, b) = self.source.interval()?;
        if a == b {
            return Ok(Estimate { value: Complex64::new(0.0, 0.0), error: 0.0 });
        }
        let period = if xi.abs() > 0.0 { 1.0 / xi.abs() } else { f64::INFINITY };
        let breaks = self.source.breaks_in(a, b, period);
        let f = &self.source.f;
        quad::integrate_with_breaks(|y: f64| f(y) * Complex64::from_polar(1.0, -2.0 * PI * xi * y), &breaks, self.tol)
    }

    /// The transform as a [`RealFunction`] (panics are avoided by mapping
    /// quadrature failures to NaN), with the given extent certificate.
    pub fn into_function(self, extent: Extent) -> RealFunction {
        RealFunction::new(move |xi| self.eval(xi).map(|e| e.value).unwrap_or(Complex64::new(f64::NAN, f64::NAN)), extent)
    }
}

/// Fourier transform on ℝ with respect to `e^{−2πixy}`.
pub fn fourier_real(f: &RealFunction, tol: f64) -> Result<FourierTransform> {
    f.interval()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    Ok(FourierTransform { source: f.clone(), tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gaussian_is_self_dual() {
        let ft = fourier_real(&RealFunction::gaussian(1.0), 1e-13).unwrap();
        for xi in [0.0, 0.3, 1.0, 2.5] {
            let v = ft.eval(xi).unwrap().value;
            assert_abs_diff_eq!(v.re, (-PI * xi * xi).exp(), epsilon = 1e-12);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn box_gives_sinc() {
        let f = RealFunction::real(|_| 1.0, Extent::Compact(-0.5, 0.5));
        let ft = fourier_real(&f, 1e-13).unwrap();
        for xi in [0.25, 1.0, 1.5, 7.3] {
            let exact = (PI * xi).sin() / (PI * xi);
            assert_abs_diff_eq!(ft.eval(xi).unwrap().value.re, exact, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(ft.eval(0.0).unwrap().value.re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn zero_and_unbounded() {
        let ft = fourier_real(&RealFunction::zero(), 1e-10).unwrap();
        assert_eq!(ft.eval(3.0).unwrap().value, Complex64::new(0.0, 0.0));
        let bad = RealFunction::real(|x| 1.0 / (1.0 + x * x), Extent::Unbounded);
        assert!(matches!(fourier_real(&bad, 1e-10), Err(Error::Domain(_))));
    }

    #[test]
    fn double_transform_reflects() {
        let f = RealFunction::real(|x| (-PI * (x - 0.4).powi(2)).exp() * (1.0 + x), Extent::Decaying { radius: 6.0 });
        let ft = fourier_real(&f, 1e-12).unwrap().into_function(Extent::Decaying { radius: 6.0 });
        let ftt = fourier_real(&ft, 1e-10).unwrap();
        for x in [-1.0, 0.2, 0.9] {
            let v = ftt.eval(x).unwrap().value;
            assert_abs_diff_eq!(v.re, f.eval(-x).re, epsilon = 1e-8);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn plancherel_on_samples() {
        let f = RealFunction::real(|x| (-PI * x * x).exp() * x.cos(), Extent::Decaying { radius: 6.0 });
        let ft = fourier_real(&f, 1e-13).unwrap().into_function(Extent::Decaying { radius: 6.0 });
        let a = f.norm_sqr(1e-13).unwrap();
        let b = ft.norm_sqr(1e-11).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-9);
    }
}
