//! Principal values `∫′ f(u)/|1−u| d*u` at each place of ℚ, normalized so
//! that the regularizing distribution has Fourier transform vanishing at 1.
//!
//! * Finite places: exact, through the splitting `f = f(1)·1_{ℤ_p^*} + g`
//!   where the unit term contributes 0 under the normalized character and `g`
//!   vanishes near 1.
//! * Real place: `λ f(1) + lim_ε [∫_{|1−u|≥ε} f/|1−u| d*u + f(1) log ε]` with
//!   `λ = log 2π + γ` and `d*u = du/(2|u|)`.
//! * Complex place (radial `f`): `λ′ f(1)` plus the analogous limit of the
//!   fiber-integrated integral in `ν = |z|_ℂ`, with `λ′ = 2(log 2π + γ)`.

use crate::error::{Error, Result};
use crate::local_field::rational::{self, int};
use crate::local_field::{module, FieldElement, HaarNormalization, LocallyConstantFn, LogLinearNumber, ModuleValue, Place};
use crate::quad::{self, Estimate};
use crate::special::{EULER_GAMMA, LOG_TWO_PI};
use crate::test_functions::FiniteCharacter;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

/// The ε ladder `2^{−k}`, `k = 8..=24`.
const LADDER_START: i32 = 8;
const LADDER_END: i32 = 24;

/// Inner radius around 1 inside which the regularized integral is computed
/// with the symmetric subtraction.
const INNER: f64 = 0.5;

/// Value of a principal value: exact at finite places, a float with an
/// error bar at archimedean places.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum PVValue {
    Exact(LogLinearNumber),
    Float(Estimate),
}

impl PVValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            PVValue::Exact(x) => x.to_f64(),
            PVValue::Float(e) => e.value,
        }
    }

    pub fn error(&self) -> f64 {
        match self {
            PVValue::Exact(_) => 0.0,
            PVValue::Float(e) => e.error,
        }
    }

    pub fn exact(&self) -> Option<&LogLinearNumber> {
        match self {
            PVValue::Exact(x) => Some(x),
            PVValue::Float(_) => None,
        }
    }
}

/// `f(1)`, exact when the test function is rational-valued.
#[derive(Debug, Clone, PartialEq)]
pub enum ValueAtOne {
    Exact(BigRational),
    Float(f64),
}

impl Serialize for ValueAtOne {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ValueAtOne::Exact(r) => s.serialize_str(&r.to_string()),
            ValueAtOne::Float(x) => s.serialize_f64(*x),
        }
    }
}

impl ValueAtOne {
    pub fn to_f64(&self) -> f64 {
        match self {
            ValueAtOne::Exact(r) => rational::to_f64(r),
            ValueAtOne::Float(x) => *x,
        }
    }
}

/// How the regularization was carried out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum EpsilonTrace {
    /// Finite place: the refinement level of the ball decomposition and the
    /// number of pieces of `g`.
    Decomposition { level: i64, pieces: usize },
    /// Finite place, ramified character: coset summation modulo `p^n`.
    CosetSum { modulus_exponent: u32, cosets: usize },
    /// Archimedean place: the ladder `ε_k` with the regularized values and
    /// the directly computed limit used as a consistency check.
    Ladder { epsilons: Vec<f64>, values: Vec<f64>, extrapolated: Estimate, direct_limit: Estimate },
    /// Derived from another result by a character shift.
    Shifted { log_module: f64 },
    /// Identically zero input.
    Trivial,
}

/// A principal value together with the data needed to shift it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PVResult {
    pub value: PVValue,
    pub place: Place,
    pub character: Option<FiniteCharacter>,
    pub value_at_one: ValueAtOne,
    pub epsilon_trace: EpsilonTrace,
}

fn check_prime(p: u64, f: &LocallyConstantFn) -> Result<()> {
    if !rational::is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    if f.prime() != p {
        return Err(Error::InvalidInput(format!("function over Q_{} used at p = {p}", f.prime())));
    }
    Ok(())
}

/// Exact `∫′ f(u)/|1−u| d*u` for a locally constant `f` supported in ℚ_p^*.
pub fn pv_finite(p: u64, f: &LocallyConstantFn, normalization: HaarNormalization) -> Result<PVResult> {
    pv_finite_at_level(p, f, normalization, 0)
}

/// Same as [`pv_finite`], with every piece first refined to radius exponent
/// at least `level`; the result does not depend on `level`.
pub fn pv_finite_at_level(p: u64, f: &LocallyConstantFn, normalization: HaarNormalization, level: i64) -> Result<PVResult> {
    check_prime(p, f)?;
    if let Some((b, _)) = f.pieces().iter().find(|(b, _)| b.contains_zero()) {
        return Err(Error::Domain(format!("f is not supported in Q_{p}^*: the piece {b:?} contains 0")));
    }
    let one = BigRational::one();
    let f1 = f.eval(&one);
    let g = f.sub(&LocallyConstantFn::units(p)?.scale(&f1))?;
    let pieces = LocallyConstantFn::from_terms(p, g.refined(level))?;
    let mut value = LogLinearNumber::zero();
    for (ball, c) in pieces.pieces() {
        if ball.contains(&one) {
            return Err(Error::Domain(format!(
                "f is not constant near 1: the ball {ball:?} around 1 carries the value {c} after removing f(1)"
            )));
        }
        // |1 − u| is constant on a ball avoiding 1.
        let dist = rational::module_exact(&(&one - ball.center()), p);
        let mass = normalization.ball_mass(ball)?;
        value += &mass.scale(&(c / dist));
    }
    Ok(PVResult {
        value: PVValue::Exact(value),
        place: Place::Finite(p),
        character: None,
        value_at_one: ValueAtOne::Exact(f1),
        epsilon_trace: EpsilonTrace::Decomposition { level, pieces: pieces.pieces().len() },
    })
}

/// `∫′ h(u)/|1−u| d*u` for a radial `h(u) = H(|u|)` on ℚ_p^* under the
/// log-scale normalization: `Σ_{m≥1} log p·[H(p^{−m}) + p^{−m} H(p^m)]`
/// (the unit shell contributes 0). `tail(m)` must bound
/// `Σ_{k≥m} (|H(p^{−k})| + |H(p^k)|)`; the sum stops once `log p·tail(m)`
/// is below `tol`, which is then the reported error.
pub fn pv_finite_radial(p: u64, h: impl Fn(f64) -> f64, tail: impl Fn(i64) -> f64, tol: f64) -> Result<(Estimate, Vec<(i64, f64)>)> {
    if !rational::is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    let lp = (p as f64).ln();
    let pf = p as f64;
    let mut terms = Vec::new();
    let mut m = 1i64;
    loop {
        let bound = tail(m) * lp;
        if bound < tol {
            let value = quad::compensated_sum(terms.iter().map(|(_, v)| *v));
            return Ok((Estimate { value, error: bound }, terms));
        }
        if m > 4000 {
            return Err(Error::Truncation(format!("prime-power shells at p = {p} still exceed {bound:.3e} at m = {m}")));
        }
        let x = pf.powi(m as i32);
        let v = lp * (h(1.0 / x) + h(x) / x);
        terms.push((m, v));
        m += 1;
    }
}

/// Exact `∫′ χ(u)/|1−u| d*u` over ℚ_p^* for a ramified character extended by
/// zero off the units, under the log-scale normalization; equals `−f log p`.
pub fn pv_finite_char(p: u64, chi: &FiniteCharacter) -> Result<PVResult> {
    if chi.prime() != p {
        return Err(Error::InvalidInput(format!("character at p = {} used at p = {p}", chi.prime())));
    }
    if chi.is_trivial() {
        return Err(Error::InvalidInput("unramified character: use pv_finite on the unit indicator".into()));
    }
    let f = chi.conductor_exponent();
    let n = f + 1;
    let modulus = p.pow(n);
    // Level sets of k = v(1 − u) among units mod p^n; k < f on the support of χ − 1.
    let sums = crate::test_functions::grouped_sums(chi, n, |u| {
        let d = (1 + modulus - u) % modulus;
        if d == 0 {
            n as i64
        } else {
            let mut k = 0;
            let mut d = d;
            while d.is_multiple_of(p) {
                d /= p;
                k += 1;
            }
            k
        }
    })?;
    let cosets = sums.len();
    let mut total = BigRational::zero();
    let mut keys: Vec<i64> = sums.keys().copied().collect();
    keys.sort();
    for k in keys {
        let s = sums[&k];
        let count = count_level_set(p, n, k) as f64;
        // Σ (χ(u) − 1) over the level set; character sums over a coset
        // difference of subgroups are integers.
        let d = s - Complex64::new(count, 0.0);
        let r = d.re.round();
        if (d.re - r).abs() > 1e-9 || d.im.abs() > 1e-9 {
            return Err(Error::Precision(format!("character sum on the level set k = {k} is {d}, not an integer")));
        }
        if r == 0.0 {
            continue;
        }
        // Ball u + p^n ℤ_p: mass p^{1−n}/(p−1)·log p, weight |1−u|^{−1} = p^k.
        total += int(r as i64) * rational::pow_p(p, k + 1 - n as i64) / int(p as i64 - 1);
    }
    let value = LogLinearNumber::log_prime(p).scale(&total);
    let expected = LogLinearNumber::log_prime(p).scale(&-int(f as i64));
    if value != expected {
        return Err(Error::Precision(format!("coset summation gives {value}, which differs from -f log p = {expected}")));
    }
    Ok(PVResult {
        value: PVValue::Exact(value),
        place: Place::Finite(p),
        character: Some(chi.clone()),
        value_at_one: ValueAtOne::Exact(BigRational::one()),
        epsilon_trace: EpsilonTrace::CosetSum { modulus_exponent: n, cosets },
    })
}

/// Number of units `u` mod `p^n` with `v(1 − u) = k` (`k = n` meaning `u ≡ 1`).
fn count_level_set(p: u64, n: u32, k: i64) -> u64 {
    let n = n as i64;
    if k >= n {
        1
    } else if k == 0 {
        p.pow(n as u32 - 1) * (p - 2)
    } else {
        p.pow((n - k) as u32) - p.pow((n - k - 1) as u32)
    }
}

/// `L(F) = lim_δ [∫_{ν>0, |1−ν|≥δ} F(ν)/|1−ν| dν/ν + 2F(1) log δ]`.
///
/// Returns the ladder, the Richardson extrapolation along it, and the limit
/// computed directly from the symmetrized integrand (which is regular at 0).
fn radial_limit(big_f: &(dyn Fn(f64) -> f64 + Sync), tol: f64) -> Result<(Vec<f64>, Vec<f64>, Estimate, Estimate)> {
    let f1 = big_f(1.0);
    if !f1.is_finite() {
        return Err(Error::Domain("f(1) is not finite".into()));
    }
    let psi = |t: f64| big_f(1.0 + t) / (1.0 + t);
    let sym = |t: f64| if t == 0.0 { 0.0 } else { (psi(t) + psi(-t) - 2.0 * f1) / t };

    // Outer pieces in y = log ν: (0, 1/2] and [3/2, ∞).
    let lower = log_half_line(
        &|y: f64| {
            let nu = y.exp();
            big_f(nu) / (1.0 - nu)
        },
        INNER.ln(),
        false,
        tol * 0.1,
    )
    .map_err(|e| tail_error("ν → 0", e))?;
    let upper = log_half_line(
        &|y: f64| {
            let nu = y.exp();
            big_f(nu) / (nu - 1.0)
        },
        (1.0 + INNER).ln(),
        true,
        tol * 0.1,
    )
    .map_err(|e| tail_error("ν → ∞", e))?;
    let outer = lower.value + upper.value;
    let outer_err = lower.error + upper.error;

    let center = quad::integrate(sym, 0.0, INNER, tol * 0.1)?;
    let direct = Estimate { value: outer + center.value + 2.0 * f1 * INNER.ln(), error: outer_err + center.error };

    // Ladder: the regularized value at ε = 2^{-k} equals the direct limit
    // minus the symmetrized integral over (0, ε).
    let mut eps = Vec::new();
    let mut values = Vec::new();
    let mut prev = INNER;
    let mut acc = 0.0;
    for k in LADDER_START..=LADDER_END {
        let e = 2f64.powi(-k);
        let piece = quad::integrate(sym, e, prev, tol * 1e-3)?;
        acc += piece.value;
        prev = e;
        eps.push(e);
        // Regularized value at ε: outer + ∫_ε^{1/2} sym + 2 F(1) log(1/2).
        values.push(outer + acc + 2.0 * f1 * INNER.ln());
    }
    let extrapolated = quad::richardson(&values, 2.0, &[1.0, 2.0, 3.0, 4.0])?;
    Ok((eps, values, extrapolated, direct))
}

/// Span in `y = log ν` integrated with explicit breaks before the mapped tail.
const LOG_SPAN: f64 = 60.0;

/// `∫ g(y) dy` over `[y0, ∞)` (`upward`) or `(−∞, y0]`, with breaks every
/// half unit over a span of [`LOG_SPAN`] and a mapped remainder beyond it.
/// Values where `g` is not finite (overflow of `e^y`) count as 0.
pub(crate) fn log_half_line(g: &(dyn Fn(f64) -> f64 + Sync), y0: f64, upward: bool, tol: f64) -> Result<Estimate> {
    let sign = if upward { 1.0 } else { -1.0 };
    let safe = |y: f64| {
        let v = g(y);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let steps = (2.0 * LOG_SPAN) as usize;
    let mut breaks: Vec<f64> = (0..=steps).map(|k| y0 + sign * k as f64 * 0.5).collect();
    if !upward {
        breaks.reverse();
    }
    let body = quad::integrate_with_breaks(safe, &breaks, tol * 0.5)?;
    let far = y0 + sign * LOG_SPAN;
    let tail = quad::integrate_to_infinity(|s: f64| safe(far + sign * s), 0.0, tol * 0.5)?;
    if !(body.value.is_finite() && tail.value.is_finite()) {
        return Err(Error::Truncation("integral over a half-line diverges".into()));
    }
    if tail.value.abs() > tol.max(1e-6 * body.value.abs()) {
        return Err(Error::Truncation(format!("integrand still carries {:.3e} beyond |log ν| = {:.0}", tail.value, far.abs())));
    }
    Ok(Estimate { value: body.value + tail.value, error: body.error + tail.error })
}

fn tail_error(which: &str, e: Error) -> Error {
    match e {
        Error::NotConverged(msg) => Error::Truncation(format!("tail {which} does not converge: {msg}")),
        other => other,
    }
}

fn combine(extrapolated: Estimate, direct: Estimate) -> Estimate {
    Estimate { value: extrapolated.value, error: extrapolated.error.max((extrapolated.value - direct.value).abs()) + direct.error }
}

/// Real-place principal value of `f` with `d*u = du/(2|u|)`.
pub fn pv_real(f: &(dyn Fn(f64) -> f64 + Sync), tol: f64) -> Result<PVResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let f1 = f(1.0);
    let (eps, values, extrapolated, direct) = radial_limit(f, tol)?;
    // Negative half-line: |1 − u| = 1 + |u|, no singularity.
    let g_neg = |y: f64| {
        let nu = y.exp();
        f(-nu) / (1.0 + nu)
    };
    let neg = log_half_line(&g_neg, 0.0, false, tol * 0.05)
        .and_then(|a| log_half_line(&g_neg, 0.0, true, tol * 0.05).map(|b| Estimate { value: a.value + b.value, error: a.error + b.error }))
        .map_err(|e| tail_error("on the negative half-line", e))?;
    let lambda = LOG_TWO_PI + EULER_GAMMA;
    let shift = lambda * f1 + 0.5 * neg.value;
    let half = |e: Estimate| Estimate { value: shift + 0.5 * e.value, error: 0.5 * e.error + 0.5 * neg.error };
    let (extrapolated, direct) = (half(extrapolated), half(direct));
    let values: Vec<f64> = values.iter().map(|v| shift + 0.5 * v).collect();
    let value = combine(extrapolated, direct);
    Ok(PVResult {
        value: PVValue::Float(value),
        place: Place::Real,
        character: None,
        value_at_one: ValueAtOne::Float(f1),
        epsilon_trace: EpsilonTrace::Ladder { epsilons: eps, values, extrapolated, direct_limit: direct },
    })
}

/// Complex-place principal value of a radial `f(z) = F(|z|_ℂ)`; the argument
/// is `F` as a function of `ν = |z|_ℂ = z z̄`.
pub fn pv_complex(big_f: &(dyn Fn(f64) -> f64 + Sync), tol: f64) -> Result<PVResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let f1 = big_f(1.0);
    let (eps, values, extrapolated, direct) = radial_limit(big_f, tol)?;
    let lambda_prime = 2.0 * (LOG_TWO_PI + EULER_GAMMA);
    let shift = |e: Estimate| Estimate { value: lambda_prime * f1 + e.value, error: e.error };
    let (extrapolated, direct) = (shift(extrapolated), shift(direct));
    let values: Vec<f64> = values.iter().map(|v| lambda_prime * f1 + v).collect();
    Ok(PVResult {
        value: PVValue::Float(combine(extrapolated, direct)),
        place: Place::Complex,
        character: None,
        value_at_one: ValueAtOne::Float(f1),
        epsilon_trace: EpsilonTrace::Ladder { epsilons: eps, values, extrapolated, direct_limit: direct },
    })
}

/// Changes the additive character from `α₀` to `x ↦ α₀(λx)`: adds
/// `log|λ|·f(1)` to the principal value.
pub fn pv_character_shift(base: &PVResult, lambda: &FieldElement) -> Result<PVResult> {
    let m = module(base.place, lambda)?;
    let mut out = base.clone();
    let log_module;
    match (&base.value, &m, &base.value_at_one) {
        (PVValue::Exact(v), ModuleValue::Exact(r), ValueAtOne::Exact(f1)) => {
            let p = match base.place {
                Place::Finite(p) => p,
                _ => unreachable!("exact modules occur only at finite places"),
            };
            if r.is_zero() {
                return Err(Error::Domain("the shift λ must be invertible".into()));
            }
            // |λ| = p^k exactly, so log|λ| = k log p.
            let k = rational::valuation(r, p).unwrap_or(0);
            let shift = LogLinearNumber::log_prime(p).scale(&(int(k) * f1));
            log_module = k as f64 * (p as f64).ln();
            out.value = PVValue::Exact(v + &shift);
        }
        _ => {
            let a = m.to_f64();
            if a == 0.0 || !a.is_finite() {
                return Err(Error::Domain("the shift λ must be invertible".into()));
            }
            log_module = a.ln();
            let shift = log_module * base.value_at_one.to_f64();
            out.value = match &base.value {
                PVValue::Exact(x) => PVValue::Float(Estimate { value: x.to_f64() + shift, error: 0.0 }),
                PVValue::Float(e) => PVValue::Float(Estimate { value: e.value + shift, error: e.error }),
            };
        }
    }
    out.epsilon_trace = EpsilonTrace::Shifted { log_module };
    Ok(out)
}
