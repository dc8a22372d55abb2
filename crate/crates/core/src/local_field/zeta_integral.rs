//! Tate's local zeta integrals and the homogeneous distributions `Δ′_s`,
//! with the multiplicative measure normalized by `μ*(ℤ_p^*) = 1`.

use super::lcf::LocallyConstantFn;
use super::rational;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;

/// Shell-summed value of a local zeta integral together with its certified
/// geometric tail bound and the closed form it was checked against.
#[derive(Debug, Clone, Serialize)]
pub struct ShellSum {
    pub value: Complex64,
    pub tail_bound: f64,
    pub shells: usize,
    pub closed_form: Complex64,
}

fn p_pow_neg_s(p: u64, s: Complex64, k: f64) -> Complex64 {
    (-s * (k * (p as f64).ln())).exp()
}

/// `∫_{ℤ_p ∖ 0} |x|^s d*x = Σ_{k≥0} p^{−ks} = (1 − p^{−s})^{−1}` for `Re s > 0`.
pub fn local_zeta_integral(p: u64, s: Complex64) -> Result<ShellSum> {
    if !rational::is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    if s.re <= 0.0 {
        return Err(Error::Domain(format!("local zeta integral diverges for Re s = {} ≤ 0", s.re)));
    }
    let ratio = p_pow_neg_s(p, s, 1.0);
    let r = ratio.norm();
    let mut value = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut shells = 0;
    let mut tail;
    loop {
        value += term;
        term *= ratio;
        shells += 1;
        tail = term.norm() / (1.0 - r);
        if tail < 1e-17 * value.norm() || shells > 1_000_000 {
            break;
        }
    }
    let closed_form = 1.0 / (1.0 - ratio);
    if (value - closed_form).norm() > 1e-12 * closed_form.norm().max(1.0) + tail {
        return Err(Error::NotConverged(format!("shell sum {value} disagrees with closed form {closed_form}")));
    }
    Ok(ShellSum { value, tail_bound: tail, shells, closed_form })
}

/// `∫_{ℚ_p^*} f(x) |x|^s d*x` for a locally constant `f` (`Re s > 0` whenever
/// `f(0) ≠ 0`).
pub fn local_zeta_integral_of(f: &LocallyConstantFn, s: Complex64) -> Result<Complex64> {
    let p = f.prime();
    let mut acc = Complex64::new(0.0, 0.0);
    for (ball, c) in f.pieces() {
        let c = rational::to_f64(c);
        let r = ball.radius_exponent() as f64;
        match ball.valuation() {
            None => {
                if s.re <= 0.0 {
                    return Err(Error::Domain(format!("∫ f |x|^s d*x diverges at Re s = {} since f(0) ≠ 0", s.re)));
                }
                acc += c * p_pow_neg_s(p, s, r) / (1.0 - p_pow_neg_s(p, s, 1.0));
            }
            Some(v) => {
                let share = (p as f64).powf(v as f64 - r + 1.0) / (p as f64 - 1.0);
                acc += c * share * p_pow_neg_s(p, s, v as f64);
            }
        }
    }
    Ok(acc)
}

/// `⟨f, Δ′_s⟩ = ∫ (f(x) − f(x/p)) |x|^s d*x`, an entire function of `s`
/// normalized by `⟨1_{ℤ_p}, Δ′_s⟩ = 1`.
pub fn homogeneous_delta_prime(p: u64, s: Complex64, f: &LocallyConstantFn) -> Result<Complex64> {
    if f.prime() != p {
        return Err(Error::InvalidInput(format!("function over Q_{} used at p = {p}", f.prime())));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let one_minus = 1.0 - p_pow_neg_s(p, s, 1.0);
    for (ball, c) in f.pieces() {
        let c = rational::to_f64(c);
        let r = ball.radius_exponent() as f64;
        match ball.valuation() {
            None => acc += c * p_pow_neg_s(p, s, r),
            Some(v) => {
                let share = (p as f64).powf(v as f64 - r + 1.0) / (p as f64 - 1.0);
                acc += c * share * p_pow_neg_s(p, s, v as f64) * one_minus;
            }
        }
    }
    Ok(acc)
}
