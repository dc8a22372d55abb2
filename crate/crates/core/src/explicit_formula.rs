//! Both sides of Weil's explicit formula over ℚ for the trivial character.
//!
//! Spectral side: `ĥ(0) + ĥ(1) − Σ_ρ ĥ(ρ)` with `ĥ(ρ) = ∫_0^∞ h(x) x^ρ dx/x`.
//! Geometric side: `Σ_v ∫′ h(u⁻¹)/|1−u| d*u`, that is the archimedean
//! principal value plus `Σ_p Σ_{m≥1} log p·[h(p^m) + p^{−m} h(p^{−m})]`.

use crate::error::{Error, Result};
use crate::principal_value::{log_half_line, pv_finite_radial, pv_real};
use crate::quad::{self, Estimate};
use crate::test_functions::RadialTestFn;
use crate::zeta_zeros::{smooth_count, ZeroList};
use num_complex::Complex64;
use serde::Serialize;

/// Zero ordinates and their contributions `2 Re ĥ(1/2 + iγ)`.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralSide {
    pub value: f64,
    pub h_hat_0: f64,
    pub h_hat_1: f64,
    pub zeros_used: usize,
    pub e_max: f64,
    pub tail_bound: f64,
    pub terms: Vec<(f64, f64)>,
}

/// One prime-power contribution `log p·[h(p^m) + p^{−m} h(p^{−m})]`.
#[derive(Debug, Clone, Serialize)]
pub struct PrimeTerm {
    pub p: u64,
    pub m: i64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeometricSide {
    pub value: f64,
    pub archimedean: Estimate,
    pub finite: f64,
    pub prime_cutoff: u64,
    pub prime_tail_bound: f64,
    pub shell_truncation: f64,
    /// `log|d|·h(1)`, zero over ℚ.
    pub different_term: f64,
    pub terms: Vec<PrimeTerm>,
}

impl GeometricSide {
    pub fn error_bound(&self) -> f64 {
        self.archimedean.error + self.prime_tail_bound + self.shell_truncation
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FormulaReport {
    pub h: String,
    pub spectral: SpectralSide,
    pub geometric: GeometricSide,
    pub discrepancy: f64,
    pub bound: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Primes up to `n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve.iter().enumerate().filter(|(_, s)| **s).map(|(k, _)| k as u64).collect()
}

fn mellin_value(h: &RadialTestFn, rho: Complex64, tol: f64) -> Result<Complex64> {
    match h.mellin_closed_form(rho) {
        Some(v) => Ok(v),
        None => Ok(h.mellin(rho, tol)?.value),
    }
}

/// Upper bound for the number of zeros with ordinate in `[t, t + 1]`, from
/// the smooth count and Backlund's bound on `S(t)`.
fn zeros_in_unit_window(t: f64) -> f64 {
    let t1 = t.max(2.0) + 1.0;
    let s_bound = |x: f64| 0.137 * x.ln() + 0.443 * x.ln().ln().max(0.0) + 4.35;
    (smooth_count(t1) - smooth_count(t.max(2.0))).max(0.0) + 2.0 * s_bound(t1) + 1.0
}

/// Bound for `Σ_{γ ≥ e} 2|ĥ(β + iγ)|` with `β ∈ [0, 1]`, or `β = 1/2` when
/// `strip_assumption` is set.
fn spectral_tail(h: &RadialTestFn, e: f64, strip_assumption: bool) -> Result<f64> {
    if h.is_zero() {
        return Ok(0.0);
    }
    let (lo, hi) = if strip_assumption { (0.5, 0.5) } else { (0.0, 1.0) };
    let mut total = 0.0;
    for m in 0..100_000 {
        let t = e + m as f64;
        let b = h
            .mellin_bound(t, lo, hi)
            .ok_or_else(|| Error::InvalidInput(format!("{} has no Mellin decay certificate for the zero-side tail", h.describe())))?;
        let term = 2.0 * zeros_in_unit_window(t) * b;
        total += term;
        if m > 5 && term < 1e-20 * total.max(1e-300) || term < 1e-300 {
            return Ok(total);
        }
    }
    Err(Error::Truncation(format!("zero-side tail beyond E = {e} does not decay")))
}

/// `ĥ(0) + ĥ(1) − Σ_γ 2 Re ĥ(1/2 + iγ)` over the listed zeros, with a bound
/// for the zeros above `zeros.e_max`.
pub fn spectral_side(h: &RadialTestFn, zeros: &ZeroList, strip_assumption: bool, tol: f64) -> Result<SpectralSide> {
    let tail_bound = spectral_tail(h, zeros.e_max, strip_assumption)?;
    if tail_bound > tol {
        return Err(Error::Truncation(format!(
            "zero-side tail bound {tail_bound:.3e} above E_max = {} exceeds the tolerance {tol:.1e}; use a larger E_max",
            zeros.e_max
        )));
    }
    let q = tol * 1e-3;
    let h0 = mellin_value(h, Complex64::new(0.0, 0.0), q)?.re;
    let h1 = mellin_value(h, Complex64::new(1.0, 0.0), q)?.re;
    let terms = zeros
        .ordinates
        .iter()
        .map(|g| Ok((*g, 2.0 * mellin_value(h, Complex64::new(0.5, *g), q)?.re)))
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let zero_sum = quad::compensated_sum(terms.iter().map(|(_, v)| *v));
    Ok(SpectralSide { value: h0 + h1 - zero_sum, h_hat_0: h0, h_hat_1: h1, zeros_used: terms.len(), e_max: zeros.e_max, tail_bound, terms })
}

/// `B(y)`: bound for `|h(u)|` on `log|u| ≥ y` plus `|u|·|h(u)|` on `log|u| ≤ −y`
/// (the inner values entering through `p^{−m} h(p^{−m})`).
fn prime_weight_bound(h: &RadialTestFn, y: f64) -> f64 {
    h.tail_bound(y, true) + h.tail_bound(-y, false) * (-y).exp()
}

/// Bound for the contribution of all `n > cutoff` (primes and their powers).
fn prime_tail(h: &RadialTestFn, cutoff: u64, tol: f64) -> Result<f64> {
    let y0 = (cutoff.max(1) as f64).ln();
    let g = |y: f64| (y.exp() + 1.0).ln() * prime_weight_bound(h, y) * y.exp();
    Ok(log_half_line(&g, y0, true, tol * 1e-3)?.value.abs())
}

/// Smallest power-of-two multiple of 100 whose prime tail bound is below `tol`.
pub fn required_prime_cutoff(h: &RadialTestFn, tol: f64) -> Result<u64> {
    let mut p = 100u64;
    while p < 1 << 34 {
        if prime_tail(h, p, tol)? <= tol {
            return Ok(p);
        }
        p *= 2;
    }
    Err(Error::Truncation(format!("{} needs primes beyond 2^34", h.describe())))
}

/// Geometric side with primes up to `prime_cutoff`.
pub fn geometric_side(h: &RadialTestFn, prime_cutoff: u64, tol: f64) -> Result<GeometricSide> {
    let prime_tail_bound = prime_tail(h, prime_cutoff, tol)?;
    if prime_tail_bound > tol {
        let need = required_prime_cutoff(h, tol)?;
        return Err(Error::Truncation(format!(
            "primes above {prime_cutoff} may contribute {prime_tail_bound:.3e} > {tol:.1e}; a cutoff of {need} suffices"
        )));
    }
    let hinv = |u: f64| if u == 0.0 { 0.0 } else { h.eval(1.0 / u) };
    let archimedean = if h.is_zero() {
        Estimate { value: 0.0, error: 0.0 }
    } else {
        match pv_real(&hinv, tol * 1e-2)?.value {
            crate::principal_value::PVValue::Float(e) => e,
            crate::principal_value::PVValue::Exact(x) => Estimate { value: x.to_f64(), error: 0.0 },
        }
    };
    let primes = primes_up_to(prime_cutoff);
    let per_prime_tol = tol * 1e-2 / (primes.len().max(1) as f64);
    let mut terms = Vec::new();
    let mut shell_truncation = 0.0;
    for &p in &primes {
        let lp = (p as f64).ln();
        // Σ_{k≥m} (|h(p^k)| + |h(p^{−k})|) bounded term by term.
        let tail = |m: i64| {
            let mut s = 0.0;
            for k in m..m + 400 {
                let y = k as f64 * lp;
                let b = h.tail_bound(y, true) + h.tail_bound(-y, false);
                s += b;
                if b == 0.0 || b < 1e-40 * s {
                    break;
                }
            }
            s
        };
        let (est, shells) = pv_finite_radial(p, |x| if x == 0.0 { 0.0 } else { h.eval(1.0 / x) }, tail, per_prime_tol)?;
        shell_truncation += est.error;
        terms.extend(shells.into_iter().filter(|(_, v)| *v != 0.0).map(|(m, value)| PrimeTerm { p, m, value }));
    }
    let finite = quad::compensated_sum(terms.iter().map(|t| t.value));
    Ok(GeometricSide {
        value: archimedean.value + finite,
        archimedean,
        finite,
        prime_cutoff,
        prime_tail_bound,
        shell_truncation,
        different_term: 0.0,
        terms,
    })
}

/// Compares the two sides: passes when the discrepancy is within the
/// combined truncation and quadrature bounds plus `tol`.
pub fn compare(h: &RadialTestFn, zeros: &ZeroList, prime_cutoff: u64, tol: f64) -> Result<FormulaReport> {
    let spectral = spectral_side(h, zeros, false, tol)?;
    let geometric = geometric_side(h, prime_cutoff, tol)?;
    let discrepancy = spectral.value - geometric.value;
    let bound = spectral.tail_bound + geometric.error_bound();
    Ok(FormulaReport { h: h.describe(), pass: discrepancy.abs() <= bound + tol, spectral, geometric, discrepancy, bound, tolerance: tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta_zeros::find_zeros;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{LN_2, PI};
    use std::sync::OnceLock;

    fn zeros() -> &'static ZeroList {
        static Z: OnceLock<ZeroList> = OnceLock::new();
        Z.get_or_init(|| find_zeros(200.0).unwrap())
    }

    #[test]
    fn sieve() {
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(primes_up_to(100_000).len(), 9592);
    }

    #[test]
    fn zero_function() {
        let h = RadialTestFn::zero();
        let r = compare(&h, zeros(), 100, 1e-8).unwrap();
        assert_eq!(r.spectral.value, 0.0);
        assert_eq!(r.geometric.value, 0.0);
        assert!(r.geometric.terms.is_empty());
    }

    #[test]
    fn shell_weights_pin_the_direction() {
        // Bump inside |u| ∈ (√2, 2√2): only p = 2, m = 1 with weight h(2).
        let h = RadialTestFn::bump_on_module_interval(2f64.sqrt() * 1.01, 2.0 * 2f64.sqrt() * 0.99).unwrap();
        let g = geometric_side(&h, 100, 1e-9).unwrap();
        assert_eq!(g.terms.len(), 1);
        assert_eq!((g.terms[0].p, g.terms[0].m), (2, 1));
        assert_abs_diff_eq!(g.terms[0].value, LN_2 * h.eval(2.0), epsilon = 1e-15);
        // The mirrored bump around 1/2 enters with weight 1/2.
        let hm = h.dilate(0.25).unwrap();
        let gm = geometric_side(&hm, 100, 1e-9).unwrap();
        assert_abs_diff_eq!(gm.terms[0].value, LN_2 * 0.5 * hm.eval(0.5), epsilon = 1e-15);
    }

    #[test]
    fn spectral_terms_decay() {
        let h = RadialTestFn::gaussian_log(0.0, 1.0).unwrap();
        let s = spectral_side(&h, zeros(), false, 1e-8).unwrap();
        let last = s.terms.iter().find(|(g, _)| *g > 143.0).unwrap();
        assert!(last.1.abs() <= 2.0 * (2.0 * PI).sqrt() * ((0.25 - 143.0f64.powi(2)) / 2.0).exp() + 1e-300);
    }

    #[test]
    fn gaussian_identity() {
        let h = RadialTestFn::gaussian_log(0.0, 1.0).unwrap();
        let need = required_prime_cutoff(&h, 1e-7).unwrap();
        let r = compare(&h, zeros(), need, 1e-7).unwrap();
        assert!(r.pass, "{r:#?}");
        assert!(r.discrepancy.abs() < 1e-6, "{}", r.discrepancy);
    }

    #[test]
    fn shifted_gaussian_identity() {
        let h = RadialTestFn::gaussian_log(2.0, 0.7).unwrap();
        let need = required_prime_cutoff(&h, 1e-6).unwrap();
        let r = compare(&h, zeros(), need, 1e-6).unwrap();
        assert!(r.discrepancy.abs() < 1e-5, "{}", r.discrepancy);
    }

    #[test]
    fn insufficient_cutoff_reports_requirement() {
        let h = RadialTestFn::gaussian_log(0.0, 1.3).unwrap();
        match geometric_side(&h, 100, 1e-8) {
            Err(Error::Truncation(msg)) => assert!(msg.contains("suffices")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bilinearity_and_dilation() {
        let h1 = RadialTestFn::gaussian_log(0.3, 0.9).unwrap();
        let h2 = RadialTestFn::gaussian_log(-0.5, 0.8).unwrap();
        let tol = 1e-7;
        let cut = required_prime_cutoff(&h1.add(&h2), tol).unwrap();
        let d1 = compare(&h1, zeros(), cut, tol).unwrap().discrepancy;
        let d2 = compare(&h2, zeros(), cut, tol).unwrap().discrepancy;
        let d = compare(&h1.scale(2.0).add(&h2.scale(-1.5)), zeros(), cut, tol).unwrap().discrepancy;
        assert!((d - (2.0 * d1 - 1.5 * d2)).abs() < 1e-6);
        let hd = h1.dilate(1.7).unwrap();
        let cut = required_prime_cutoff(&hd, tol).unwrap();
        let r = compare(&hd, zeros(), cut, tol).unwrap();
        assert!(r.pass, "{}", r.discrepancy);
        // Mellin transform of the dilate picks up a^ρ.
        let rho = Complex64::new(0.5, 14.134725);
        let lhs = mellin_value(&hd, rho, 1e-12).unwrap();
        let rhs = (rho * 1.7f64.ln()).exp() * mellin_value(&h1, rho, 1e-12).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
