//! Test functions: radial functions on `K^*` described by a profile in
//! `y = log|u|`, locally constant functions at finite places, finite
//! characters, the reference functions `f₀, f₁, f₂`, Mellin transforms and
//! the archimedean Fourier transform.

mod character;
mod fourier;
mod reference;

pub use crate::local_field::LocallyConstantFn;
pub(crate) use character::grouped_sums;
pub use character::FiniteCharacter;
pub use fourier::{fourier_real, Extent, FourierTransform, RealFunction};
pub use reference::{f0, f1, f2, reference_f0_f1_f2};

use crate::error::{Error, Result};
use crate::quad::{self, Estimate};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Default absolute tolerance of the quadratures in this module.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Number of widths beyond which a Gaussian profile is treated as zero
/// (`e^{-72}` relative to its peak).
const GAUSSIAN_REACH: f64 = 12.0;

/// Regularity of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Smoothness {
    Analytic,
    Smooth,
    PiecewiseConstant,
}

/// A profile `φ(y)` of `y = log|u|`.
#[derive(Clone)]
pub enum Profile {
    /// `exp(−(y − center)² / (2 width²))`.
    GaussianLog { center: f64, width: f64 },
    /// `exp(−1/(1 − t²))` with `t = (y − center)/radius`, zero for `|t| ≥ 1`.
    Bump { center: f64, radius: f64 },
    /// Indicator of `[y_min, y_max]`.
    Window { y_min: f64, y_max: f64 },
    /// A user profile, zero outside `[y_min, y_max]`.
    Custom { name: String, phi: Arc<dyn Fn(f64) -> f64 + Send + Sync>, y_min: f64, y_max: f64, smoothness: Smoothness },
}

impl Profile {
    fn eval(&self, y: f64) -> f64 {
        match self {
            Profile::GaussianLog { center, width } => {
                let t = (y - center) / width;
                (-0.5 * t * t).exp()
            }
            Profile::Bump { center, radius } => {
                let t = (y - center) / radius;
                if t.abs() >= 1.0 {
                    0.0
                } else {
                    (-1.0 / (1.0 - t * t)).exp()
                }
            }
            Profile::Window { y_min, y_max } => {
                if y >= *y_min && y <= *y_max {
                    1.0
                } else {
                    0.0
                }
            }
            Profile::Custom { phi, y_min, y_max, .. } => {
                if y < *y_min || y > *y_max {
                    0.0
                } else {
                    phi(y)
                }
            }
        }
    }

    /// Closed interval outside which the profile vanishes (None for Gaussians).
    fn support(&self) -> Option<(f64, f64)> {
        match self {
            Profile::GaussianLog { .. } => None,
            Profile::Bump { center, radius } => Some((center - radius, center + radius)),
            Profile::Window { y_min, y_max } => Some((*y_min, *y_max)),
            Profile::Custom { y_min, y_max, .. } => Some((*y_min, *y_max)),
        }
    }

    fn smoothness(&self) -> Smoothness {
        match self {
            Profile::GaussianLog { .. } => Smoothness::Analytic,
            Profile::Bump { .. } => Smoothness::Smooth,
            Profile::Window { .. } => Smoothness::PiecewiseConstant,
            Profile::Custom { smoothness, .. } => *smoothness,
        }
    }

    fn shifted(&self, s: f64) -> Profile {
        match self {
            Profile::GaussianLog { center, width } => Profile::GaussianLog { center: center + s, width: *width },
            Profile::Bump { center, radius } => Profile::Bump { center: center + s, radius: *radius },
            Profile::Window { y_min, y_max } => Profile::Window { y_min: y_min + s, y_max: y_max + s },
            Profile::Custom { name, phi, y_min, y_max, smoothness } => {
                let phi = phi.clone();
                Profile::Custom {
                    name: name.clone(),
                    phi: Arc::new(move |y| phi(y - s)),
                    y_min: y_min + s,
                    y_max: y_max + s,
                    smoothness: *smoothness,
                }
            }
        }
    }

    /// Interval carrying all but `e^{-72}` of `|φ(y) e^{σy}|`.
    fn effective_range(&self, sigma: f64) -> (f64, f64) {
        match self {
            Profile::GaussianLog { center, width } => {
                let peak = center + sigma * width * width;
                (peak - GAUSSIAN_REACH * width, peak + GAUSSIAN_REACH * width)
            }
            other => other.support().expect("compact profile"),
        }
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::GaussianLog { center, width } => write!(f, "GaussianLog(center={center}, width={width})"),
            Profile::Bump { center, radius } => write!(f, "Bump(center={center}, radius={radius})"),
            Profile::Window { y_min, y_max } => write!(f, "Window([{y_min}, {y_max}])"),
            Profile::Custom { name, y_min, y_max, .. } => write!(f, "Custom({name}, [{y_min}, {y_max}])"),
        }
    }
}

/// A radial test function `h(u) = Σ c_k φ_k(log|u|)` on `K^*`.
#[derive(Clone, Debug)]
pub struct RadialTestFn {
    terms: Vec<(f64, Profile)>,
    value_at_one: Option<f64>,
}

impl RadialTestFn {
    pub fn zero() -> Self {
        RadialTestFn { terms: Vec::new(), value_at_one: None }
    }

    pub fn from_profile(coefficient: f64, profile: Profile) -> Result<Self> {
        match &profile {
            Profile::GaussianLog { width, .. } if !(*width > 0.0) => {
                return Err(Error::InvalidInput(format!("Gaussian width must be positive, got {width}")))
            }
            Profile::Bump { radius, .. } if !(*radius > 0.0) => {
                return Err(Error::InvalidInput(format!("bump radius must be positive, got {radius}")))
            }
            Profile::Window { y_min, y_max } | Profile::Custom { y_min, y_max, .. } if !(y_min < y_max) => {
                return Err(Error::InvalidInput(format!("empty support [{y_min}, {y_max}]")))
            }
            _ => {}
        }
        Ok(RadialTestFn { terms: vec![(coefficient, profile)], value_at_one: None })
    }

    /// `exp(−(log|u| − center)²/(2 width²))`.
    pub fn gaussian_log(center: f64, width: f64) -> Result<Self> {
        Self::from_profile(1.0, Profile::GaussianLog { center, width })
    }

    /// `exp(−1/(1 − t²))`, `t = (log|u| − center)/radius`, supported in
    /// `|log|u| − center| < radius`.
    pub fn bump(center: f64, radius: f64) -> Result<Self> {
        Self::from_profile(1.0, Profile::Bump { center, radius })
    }

    /// Indicator of `log|u| ∈ [y_min, y_max]`.
    pub fn window(y_min: f64, y_max: f64) -> Result<Self> {
        Self::from_profile(1.0, Profile::Window { y_min, y_max })
    }

    /// Bump supported exactly on `|u| ∈ (a, b)`.
    pub fn bump_on_module_interval(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > a) {
            return Err(Error::InvalidInput(format!("invalid module interval ({a}, {b})")));
        }
        let (la, lb) = (a.ln(), b.ln());
        Self::bump(0.5 * (la + lb), 0.5 * (lb - la))
    }

    /// Overrides the value reported by [`RadialTestFn::value_at_one`].
    pub fn with_value_at_one(mut self, v: f64) -> Self {
        self.value_at_one = Some(v);
        self
    }

    pub fn terms(&self) -> &[(f64, Profile)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(c, _)| *c == 0.0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        RadialTestFn { terms, value_at_one: None }
    }

    pub fn scale(&self, c: f64) -> Self {
        RadialTestFn { terms: self.terms.iter().map(|(a, p)| (a * c, p.clone())).collect(), value_at_one: self.value_at_one.map(|v| v * c) }
    }

    /// `u ↦ h(u / a)` for `a ≠ 0`.
    pub fn dilate(&self, a: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::InvalidInput(format!("dilation factor must be finite and nonzero, got {a}")));
        }
        let s = a.abs().ln();
        Ok(RadialTestFn { terms: self.terms.iter().map(|(c, p)| (*c, p.shifted(s))).collect(), value_at_one: None })
    }

    /// `φ(y) = Σ c_k φ_k(y)`.
    pub fn profile(&self, y: f64) -> f64 {
        self.terms.iter().map(|(c, p)| c * p.eval(y)).sum()
    }

    /// `h(u)`, with `h(0) = 0`.
    pub fn eval(&self, u: f64) -> f64 {
        if u == 0.0 {
            return 0.0;
        }
        self.profile(u.abs().ln())
    }

    pub fn value_at_one(&self) -> f64 {
        self.value_at_one.unwrap_or_else(|| self.profile(0.0))
    }

    /// Bounds of the support in `y = log|u|`, if compact.
    pub fn log_support(&self) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (c, p) in &self.terms {
            if *c == 0.0 {
                continue;
            }
            let (a, b) = p.support()?;
            lo = lo.min(a);
            hi = hi.max(b);
        }
        if lo > hi {
            return Some((0.0, 0.0));
        }
        Some((lo, hi))
    }

    /// Least regular term.
    pub fn smoothness(&self) -> Smoothness {
        let rank = |s: Smoothness| match s {
            Smoothness::Analytic => 0,
            Smoothness::Smooth => 1,
            Smoothness::PiecewiseConstant => 2,
        };
        self.terms.iter().map(|(_, p)| p.smoothness()).max_by_key(|s| rank(*s)).unwrap_or(Smoothness::Analytic)
    }

    /// Upper bound for `|h(u)|` valid for `log|u| ≥ y` (`upper`) or `≤ y`.
    pub fn tail_bound(&self, y: f64, upper: bool) -> f64 {
        self.terms
            .iter()
            .map(|(c, p)| {
                let c = c.abs();
                match p {
                    Profile::GaussianLog { center, width } => {
                        let d = if upper { y - center } else { center - y };
                        if d <= 0.0 {
                            c
                        } else {
                            c * (-0.5 * (d / width).powi(2)).exp()
                        }
                    }
                    other => {
                        let (a, b) = other.support().expect("compact profile");
                        let outside = if upper { y > b } else { y < a };
                        if outside {
                            0.0
                        } else {
                            c * match other {
                                Profile::Custom { .. } => f64::INFINITY,
                                _ => 1.0,
                            }
                        }
                    }
                }
            })
            .sum()
    }

    /// Break points in `y` where the profile may fail to be smooth.
    fn log_breaks(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (_, p) in &self.terms {
            if let Some((a, b)) = p.support() {
                out.push(a);
                out.push(b);
            }
        }
        out
    }

    /// `ĥ(ρ) = ∫_0^∞ h(x) x^ρ dx/x = ∫ φ(y) e^{ρy} dy` by adaptive quadrature
    /// in `y`.
    pub fn mellin(&self, rho: Complex64, tol: f64) -> Result<Estimate<Complex64>> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (c, p) in &self.terms {
            if *c == 0.0 {
                continue;
            }
            let (a, b) = p.effective_range(rho.re);
            lo = lo.min(a);
            hi = hi.max(b);
        }
        if lo > hi {
            return Ok(Estimate { value: Complex64::new(0.0, 0.0), error: 0.0 });
        }
        let growth = rho.re * if rho.re > 0.0 { hi } else { lo };
        if growth > 700.0 {
            return Err(Error::Domain(format!(
                "Mellin integrand overflows: Re ρ · y reaches {growth:.1} > 700 on the support [{lo}, {hi}]"
            )));
        }
        let mut breaks = vec![lo, hi];
        breaks.extend(self.log_breaks().into_iter().filter(|y| *y > lo && *y < hi));
        // Resolve the oscillation e^{i t y} with at least one break per period.
        let period = if rho.im.abs() > 1.0 { 2.0 * PI / rho.im.abs() } else { f64::INFINITY };
        let pieces = ((hi - lo) / period).ceil().min(4096.0) as usize;
        for k in 1..pieces {
            breaks.push(lo + (hi - lo) * k as f64 / pieces as f64);
        }
        breaks.sort_by(|a, b| a.total_cmp(b));
        breaks.dedup();
        let est = quad::integrate_with_breaks(|y: f64| (rho * y).exp() * self.profile(y), &breaks, tol)?;
        if let Some(exact) = self.mellin_closed_form(rho) {
            let scale = exact.norm().max(1.0);
            if (exact - est.value).norm() > 1e3 * tol * scale + 1e-12 * scale {
                return Err(Error::NotConverged(format!("Mellin quadrature {} disagrees with the closed form {exact}", est.value)));
            }
        }
        Ok(est)
    }

    /// Closed form of the Mellin transform when every term has one
    /// (`√(2π) w e^{ρc + ρ²w²/2}` for Gaussians, `(e^{ρb} − e^{ρa})/ρ` for windows).
    pub fn mellin_closed_form(&self, rho: Complex64) -> Option<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, p) in &self.terms {
            let v = match p {
                Profile::GaussianLog { center, width } => {
                    (2.0 * PI).sqrt() * width * (rho * center + rho * rho * (width * width / 2.0)).exp()
                }
                Profile::Window { y_min, y_max } => {
                    if rho.norm() == 0.0 {
                        Complex64::new(y_max - y_min, 0.0)
                    } else {
                        ((rho * y_max).exp() - (rho * y_min).exp()) / rho
                    }
                }
                _ => return None,
            };
            acc += v * c;
        }
        Some(acc)
    }

    /// Bound for `|ĥ(σ + it)|` uniformly in `σ ∈ [σ_lo, σ_hi]`, available when
    /// every term is a Gaussian.
    pub fn mellin_bound(&self, t: f64, sigma_lo: f64, sigma_hi: f64) -> Option<f64> {
        let mut acc = 0.0;
        for (c, p) in &self.terms {
            match p {
                Profile::GaussianLog { center, width } => {
                    // |ĥ(σ+it)| = √(2π) w exp(σc + (σ² − t²)w²/2); convex in σ.
                    let f = |s: f64| s * center + 0.5 * (s * s - t * t) * width * width;
                    let e = f(sigma_lo).max(f(sigma_hi));
                    acc += c.abs() * (2.0 * PI).sqrt() * width * e.exp();
                }
                _ => return None,
            }
        }
        Some(acc)
    }

    /// Whether every term is a Gaussian (the spectral tail can be certified).
    pub fn has_gaussian_decay(&self) -> bool {
        self.terms.iter().all(|(_, p)| matches!(p, Profile::GaussianLog { .. }))
    }

    /// Short description for reports.
    pub fn describe(&self) -> String {
        let parts: Vec<String> = self.terms.iter().map(|(c, p)| format!("{c}*{p:?}")).collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gaussian_mellin_examples() {
        let h = RadialTestFn::gaussian_log(0.0, 1.0).unwrap();
        let v = h.mellin(c(0.0, 0.0), 1e-13).unwrap();
        assert_abs_diff_eq!(v.value.re, (2.0 * PI).sqrt(), epsilon = 1e-12);
        for t in [0.0, 1.5, 4.0] {
            let v = h.mellin(c(0.5, t), 1e-13).unwrap().value;
            assert_abs_diff_eq!(v.norm(), (2.0 * PI).sqrt() * ((0.25 - t * t) / 2.0).exp(), epsilon = 1e-11);
        }
    }

    #[test]
    fn window_mellin_is_the_length_of_one_to_two() {
        let h = RadialTestFn::window(0.0, 2f64.ln()).unwrap();
        let v = h.mellin(c(1.0, 0.0), 1e-13).unwrap();
        assert_abs_diff_eq!(v.value.re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.value.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn bump_support_and_evaluation() {
        let h = RadialTestFn::bump_on_module_interval(2.0, 4.0).unwrap();
        assert_eq!(h.eval(1.0), 0.0);
        assert_eq!(h.eval(-5.0), 0.0);
        assert!(h.eval(-3.0) > 0.0);
        assert_eq!(h.eval(3.0), h.eval(-3.0));
        let (a, b) = h.log_support().unwrap();
        assert_abs_diff_eq!(a.exp(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.exp(), 4.0, epsilon = 1e-12);
        assert_eq!(h.smoothness(), Smoothness::Smooth);
    }

    #[test]
    fn huge_real_part_is_a_domain_error() {
        let h = RadialTestFn::bump(3.0, 1.0).unwrap();
        assert!(matches!(h.mellin(c(300.0, 0.0), 1e-10), Err(Error::Domain(_))));
    }

    #[test]
    fn mellin_bound_dominates_closed_form() {
        let h = RadialTestFn::gaussian_log(1.0, 0.8).unwrap().add(&RadialTestFn::gaussian_log(-0.5, 1.2).unwrap().scale(-2.0));
        for t in [0.0, 3.0, 9.0] {
            let b = h.mellin_bound(t, 0.0, 1.0).unwrap();
            for s in [0.0, 0.3, 0.5, 1.0] {
                assert!(h.mellin_closed_form(c(s, t)).unwrap().norm() <= b * (1.0 + 1e-12));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn mellin_dilation_law(a in 0.3f64..3.0, re in -1.0f64..2.0, im in -5.0f64..5.0, center in -1.0f64..1.0) {
            let h = RadialTestFn::bump(center, 0.7).unwrap().add(&RadialTestFn::gaussian_log(0.2, 0.9).unwrap().scale(0.5));
            let rho = c(re, im);
            let lhs = h.dilate(a).unwrap().mellin(rho, 1e-12).unwrap().value;
            let rhs = (rho * a.ln()).exp() * h.mellin(rho, 1e-12).unwrap().value;
            prop_assert!((lhs - rhs).norm() < 1e-9 * rhs.norm().max(1.0));
        }

        #[test]
        fn mellin_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, im in -3.0f64..3.0) {
            let h1 = RadialTestFn::gaussian_log(0.5, 1.0).unwrap();
            let h2 = RadialTestFn::bump(-0.3, 1.1).unwrap();
            let rho = c(0.5, im);
            let lhs = h1.scale(a).add(&h2.scale(b)).mellin(rho, 1e-12).unwrap().value;
            let rhs = h1.mellin(rho, 1e-12).unwrap().value * a + h2.mellin(rho, 1e-12).unwrap().value * b;
            prop_assert!((lhs - rhs).norm() < 1e-9);
        }
    }
}
