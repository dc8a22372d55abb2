//! The summation map `E(f)(λ) = λ^{1/2} Σ_{q∈ℚ^*} f(qλ)` on factorizable
//! adelic test functions over ℚ, evaluated on the idele classes `λ ∈ ℝ₊^*`.
//!
//! A test function is `f = ⊗_p f_p ⊗ f_∞` with `f_p = 1_{ℤ_p}` outside a
//! finite set of primes. The finite part selects `q ∈ D⁻¹ℤ` for an integer `D`
//! built from the listed primes, and its values on `D⁻¹ℤ` are periodic, so
//! `E(f)(λ) = λ^{1/2} Σ_{n≠0} w(n) f_∞(nλ/D)` with a tabulated weight `w`.
//! The archimedean factor is a finite combination of `x^m e^{−πbx²}` with
//! `m ∈ {0, 1}`, which keeps the Fourier transform and the tail bounds in
//! closed form.

use crate::error::{Error, Result};
use crate::local_field::rational;
use crate::local_field::{homogeneous_delta_prime, LocallyConstantFn, TwistedBallSum};
use crate::quad::{self, Estimate};
use crate::special::gamma;
use crate::zeta_zeros::zeta;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use std::f64::consts::PI;

/// `coeff·x^m·e^{−π·width·x²}` with `m = 1` when `odd`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussTerm {
    pub coeff: Complex64,
    pub width: f64,
    pub odd: bool,
}

impl GaussTerm {
    pub fn even(coeff: f64, width: f64) -> Self {
        GaussTerm { coeff: Complex64::new(coeff, 0.0), width, odd: false }
    }

    pub fn odd(coeff: f64, width: f64) -> Self {
        GaussTerm { coeff: Complex64::new(coeff, 0.0), width, odd: true }
    }

    fn eval(&self, x: f64) -> Complex64 {
        let g = (-PI * self.width * x * x).exp();
        self.coeff * if self.odd { x * g } else { g }
    }

    /// Fourier transform with the character `e^{−2πixξ}`.
    fn fourier(&self) -> GaussTerm {
        let b = self.width;
        if self.odd {
            GaussTerm { coeff: self.coeff * Complex64::new(0.0, -b.powf(-1.5)), width: 1.0 / b, odd: true }
        } else {
            GaussTerm { coeff: self.coeff * b.powf(-0.5), width: 1.0 / b, odd: false }
        }
    }
}

/// Archimedean factor `f_∞ = Σ_j a_j x^{m_j} e^{−πb_j x²}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArchimedeanFactor {
    pub terms: Vec<GaussTerm>,
}

impl ArchimedeanFactor {
    pub fn new(terms: Vec<GaussTerm>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| !(t.width > 0.0 && t.width.is_finite())) {
            return Err(Error::InvalidInput(format!("Gaussian widths must be positive, got {}", t.width)));
        }
        Ok(ArchimedeanFactor { terms })
    }

    pub fn gaussian() -> Self {
        ArchimedeanFactor { terms: vec![GaussTerm::even(1.0, 1.0)] }
    }

    /// `e^{−πx²} − (1+√2)e^{−2πx²} + √2·e^{−4πx²}`, which vanishes at 0 and has
    /// integral 0.
    pub fn theta_s0() -> Self {
        let r2 = 2f64.sqrt();
        ArchimedeanFactor { terms: vec![GaussTerm::even(1.0, 1.0), GaussTerm::even(-(1.0 + r2), 2.0), GaussTerm::even(r2, 4.0)] }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    pub fn fourier(&self) -> Self {
        ArchimedeanFactor { terms: self.terms.iter().map(GaussTerm::fourier).collect() }
    }

    pub fn value_at_zero(&self) -> Complex64 {
        self.terms.iter().filter(|t| !t.odd).map(|t| t.coeff).sum()
    }

    /// `∫_ℝ f_∞(x) dx`.
    pub fn integral(&self) -> Complex64 {
        self.terms.iter().filter(|t| !t.odd).map(|t| t.coeff * t.width.powf(-0.5)).sum()
    }

    /// `∫_ℝ f_∞(x)|x|^s dx/|x| = Σ_{even} a_j (πb_j)^{−s/2} Γ(s/2)`, `Re s > 0`.
    pub fn zeta_integral(&self, s: Complex64) -> Complex64 {
        self.terms.iter().filter(|t| !t.odd).map(|t| t.coeff * (-s / 2.0 * (PI * t.width).ln()).exp()).sum::<Complex64>() * gamma(s / 2.0)
    }

    /// `Δ′_∞(s)`: the zeta integral divided by `π^{−s/2}Γ(s/2)`, which is
    /// entire in `s`.
    pub fn delta_prime(&self, s: Complex64) -> Complex64 {
        self.terms.iter().filter(|t| !t.odd).map(|t| t.coeff * (-s / 2.0 * t.width.ln()).exp()).sum()
    }

    fn min_width(&self) -> f64 {
        self.terms.iter().map(|t| t.width).fold(f64::INFINITY, f64::min)
    }
}

/// A factorizable adelic test function `⊗_p f_p ⊗ f_∞`.
#[derive(Debug, Clone)]
pub struct AdelicTestFn {
    finite: Vec<TwistedBallSum>,
    /// The finite factors as rational-valued functions, when available.
    rational: Option<Vec<LocallyConstantFn>>,
    arch: ArchimedeanFactor,
    value_at_zero: Complex64,
    integral: Complex64,
    in_s0: bool,
}

/// Relative size below which an archimedean value counts as zero.
const S0_TOLERANCE: f64 = 1e-13;

impl AdelicTestFn {
    /// `⊗_{p} f_p ⊗ f_∞` with `f_p = 1_{ℤ_p}` at primes not listed.
    pub fn new(finite: Vec<LocallyConstantFn>, arch: ArchimedeanFactor) -> Result<Self> {
        let mut primes: Vec<u64> = finite.iter().map(|f| f.prime()).collect();
        primes.sort_unstable();
        if primes.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("two finite factors share a prime: the function is not given in factorized form".into()));
        }
        let zero = BigRational::zero();
        let fin_zero: BigRational = finite.iter().map(|f| f.eval(&zero)).product();
        let fin_mass: BigRational = finite.iter().map(|f| f.integral()).product();
        let scale = arch.terms.iter().map(|t| t.coeff.norm()).sum::<f64>().max(f64::MIN_POSITIVE);
        let a0 = arch.value_at_zero();
        let ai = arch.integral();
        let zero_value = fin_zero.is_zero() || a0.norm() <= S0_TOLERANCE * scale;
        let zero_mass = fin_mass.is_zero() || ai.norm() <= S0_TOLERANCE * scale;
        let in_s0 = zero_value && zero_mass;
        Ok(AdelicTestFn {
            finite: finite.iter().map(TwistedBallSum::from_locally_constant).collect(),
            value_at_zero: if zero_value { Complex64::new(0.0, 0.0) } else { a0 * rational::to_f64(&fin_zero) },
            integral: if zero_mass { Complex64::new(0.0, 0.0) } else { ai * rational::to_f64(&fin_mass) },
            rational: Some(finite),
            arch,
            in_s0,
        })
    }

    /// `1_Ẑ ⊗ f_∞`.
    pub fn integral_adeles(arch: ArchimedeanFactor) -> Self {
        AdelicTestFn::new(Vec::new(), arch).expect("no finite factors")
    }

    pub fn zero() -> Self {
        AdelicTestFn::integral_adeles(ArchimedeanFactor { terms: Vec::new() })
    }

    /// Whether `f(0) = 0` and `∫f = 0`.
    pub fn in_s0(&self) -> bool {
        self.in_s0
    }

    pub fn value_at_zero(&self) -> Complex64 {
        self.value_at_zero
    }

    pub fn integral(&self) -> Complex64 {
        self.integral
    }

    pub fn archimedean(&self) -> &ArchimedeanFactor {
        &self.arch
    }

    /// Factor-wise Fourier transform.
    pub fn fourier(&self) -> Self {
        AdelicTestFn {
            finite: self.finite.iter().map(TwistedBallSum::fourier).collect(),
            rational: None,
            arch: self.arch.fourier(),
            value_at_zero: self.integral,
            integral: self.value_at_zero,
            in_s0: self.in_s0,
        }
    }

    /// The lattice `D⁻¹ℤ` carrying the finite part and the weights `w(n)`
    /// on it, as one table per prime with its period.
    fn lattice(&self) -> Result<Lattice> {
        let mut denominator = 1.0;
        let mut exps = Vec::new();
        for f in &self.finite {
            match f.scales() {
                None => return Ok(Lattice { denominator: 1.0, tables: Vec::new(), empty: true }),
                Some((s, r)) => exps.push((f.prime(), (-s).max(0), r)),
            }
        }
        let mut d_big = BigInt::from(1);
        for (p, k, _) in &exps {
            d_big *= BigInt::from(*p).pow(*k as u32);
            denominator *= (*p as f64).powi(*k as i32);
        }
        let d_rat = BigRational::from_integer(d_big);
        let mut tables = Vec::new();
        for (f, (p, k, r)) in self.finite.iter().zip(&exps) {
            let period_exp = (r + k).max(0);
            let period = p
                .checked_pow(period_exp as u32)
                .filter(|m| *m <= 1 << 20)
                .ok_or_else(|| Error::InvalidInput(format!("finite factor at p = {p} has too fine a constancy scale")))?;
            let table: Vec<Complex64> =
                (0..period).map(|n| f.eval(&(BigRational::from_integer(BigInt::from(n)) / &d_rat)).to_complex()).collect();
            tables.push(table);
        }
        Ok(Lattice { denominator, tables, empty: false })
    }
}

struct Lattice {
    denominator: f64,
    tables: Vec<Vec<Complex64>>,
    empty: bool,
}

impl Lattice {
    fn weight(&self, n: i64) -> Complex64 {
        self.tables.iter().map(|t| t[n.rem_euclid(t.len() as i64) as usize]).product()
    }

    fn max_weight(&self) -> f64 {
        self.tables.iter().map(|t| t.iter().map(|w| w.norm()).fold(0.0, f64::max)).product()
    }
}

/// `E(f)(λ)` with the certified bound on the omitted terms.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EValue {
    pub lambda: f64,
    pub value: Complex64,
    pub terms: usize,
    pub tail_bound: f64,
}

/// `Σ_{n > N} |a| (nh)^m e^{−πb(nh)²}` bounded by a geometric series.
fn gauss_tail(t: &GaussTerm, h: f64, n: usize) -> f64 {
    let n = n as f64;
    let x = (n + 1.0) * h;
    let first = t.coeff.norm() * if t.odd { x } else { 1.0 } * (-PI * t.width * x * x).exp();
    let growth = if t.odd { (n + 2.0) / (n + 1.0) } else { 1.0 };
    let ratio = growth * (-PI * t.width * h * h * (2.0 * n + 3.0)).exp();
    if ratio >= 1.0 {
        f64::INFINITY
    } else {
        first / (1.0 - ratio)
    }
}

/// `E(f)(λ)` summed over `0 < |n| ≤ n_max`.
pub fn e_map_truncated(f: &AdelicTestFn, lambda: f64, n_max: usize) -> Result<EValue> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!("λ must be positive, got {lambda}")));
    }
    let lat = f.lattice()?;
    if lat.empty || f.arch.terms.is_empty() {
        return Ok(EValue { lambda, value: Complex64::new(0.0, 0.0), terms: 0, tail_bound: 0.0 });
    }
    let h = lambda / lat.denominator;
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 1..=n_max as i64 {
        let x = n as f64 * h;
        acc += lat.weight(n) * f.arch.eval(x) + lat.weight(-n) * f.arch.eval(-x);
    }
    let tail = 2.0 * lat.max_weight() * f.arch.terms.iter().map(|t| gauss_tail(t, h, n_max)).sum::<f64>();
    Ok(EValue { lambda, value: acc * lambda.sqrt(), terms: n_max, tail_bound: tail * lambda.sqrt() })
}

/// `E(f)(λ)`, truncated where the Gaussian tail drops below `e^{−50}` of the
/// leading size.
pub fn e_map(f: &AdelicTestFn, lambda: f64) -> Result<EValue> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!("λ must be positive, got {lambda}")));
    }
    let lat = f.lattice()?;
    if lat.empty || f.arch.terms.is_empty() {
        return Ok(EValue { lambda, value: Complex64::new(0.0, 0.0), terms: 0, tail_bound: 0.0 });
    }
    let x_cut = (50.0 / (PI * f.arch.min_width())).sqrt() + 1.0;
    let n_max = (x_cut * lat.denominator / lambda).ceil() as usize + 1;
    if n_max > 50_000_000 {
        return Err(Error::Truncation(format!("E(f)(λ) at λ = {lambda:.3e} needs {n_max} terms")));
    }
    e_map_truncated(f, lambda, n_max)
}

/// Residuals `E(f)(λ) − E(f̂)(1/λ)` over a grid.
#[derive(Debug, Clone, Serialize)]
pub struct FunctionalEquationReport {
    pub lambdas: Vec<f64>,
    pub residuals: Vec<Complex64>,
    /// `(∫f − λ f(0))/√λ`, the residual expected without the `S(A)₀` conditions.
    pub predicted: Vec<Complex64>,
    pub max_residual: f64,
    pub max_deviation_from_prediction: f64,
}

fn functional_equation_residuals(f: &AdelicTestFn, lambdas: &[f64]) -> Result<FunctionalEquationReport> {
    let fh = f.fourier();
    let mut residuals = Vec::with_capacity(lambdas.len());
    let mut predicted = Vec::with_capacity(lambdas.len());
    for &l in lambdas {
        let a = e_map(f, l)?;
        let b = e_map(&fh, 1.0 / l)?;
        residuals.push(a.value - b.value);
        predicted.push((f.integral() - l * f.value_at_zero()) / l.sqrt());
    }
    let max_residual = residuals.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let max_deviation_from_prediction = residuals.iter().zip(&predicted).map(|(r, p)| (r - p).norm()).fold(0.0, f64::max);
    Ok(FunctionalEquationReport { lambdas: lambdas.to_vec(), residuals, predicted, max_residual, max_deviation_from_prediction })
}

/// `max_λ |E(f)(λ) − E(f̂)(1/λ)|` for `f ∈ S(A)₀`.
pub fn functional_equation_check(f: &AdelicTestFn, lambdas: &[f64]) -> Result<FunctionalEquationReport> {
    if !f.in_s0() {
        return Err(Error::Domain("the functional equation needs f(0) = 0 and ∫f = 0; use boundary_term_check for general f".into()));
    }
    functional_equation_residuals(f, lambdas)
}

/// The functional-equation residual of an arbitrary `f`, compared with the
/// boundary term `(∫f − λ f(0))/√λ` from Poisson summation.
pub fn boundary_term_check(f: &AdelicTestFn, lambdas: &[f64]) -> Result<FunctionalEquationReport> {
    functional_equation_residuals(f, lambdas)
}

/// `E(f)(x)` for `f ∈ S(A)₀`, using `E(f̂)(1/x)` when `x < 1`.
fn e_balanced(f: &AdelicTestFn, fh: &AdelicTestFn, x: f64) -> Result<Complex64> {
    Ok(if x >= 1.0 { e_map(f, x)?.value } else { e_map(fh, 1.0 / x)?.value })
}

/// Mellin transform `∫₀^∞ E(f)(x) x^{s−1/2} d*x` against
/// `ξ(s)·Δ′_∞(s)·∏_p Δ′_p(s)` with `ξ(s) = π^{−s/2}Γ(s/2)ζ(s)`.
#[derive(Debug, Clone, Serialize)]
pub struct MellinComparison {
    pub s: Complex64,
    pub mellin: Estimate<Complex64>,
    pub model: Complex64,
    /// `mellin/model`.
    pub ratio: Complex64,
}

/// Extent in `log x` beyond which `E(f)` is below `e^{−50}` relative.
fn log_extent(f: &AdelicTestFn) -> Result<f64> {
    let lat = f.lattice()?;
    let fh = f.fourier();
    let lat_h = fh.lattice()?;
    let x1 = (50.0 / (PI * f.arch.min_width())).sqrt() * lat.denominator;
    let x2 = (50.0 / (PI * fh.arch.min_width())).sqrt() * lat_h.denominator;
    Ok(x1.max(x2).max(1.0).ln() + 0.5)
}

/// `∫₀^∞ E(f)(x) x^{s−1/2} d*x` by adaptive quadrature in `y = log x`.
pub fn mellin_transform(f: &AdelicTestFn, s: Complex64, tol: f64) -> Result<Estimate<Complex64>> {
    if !f.in_s0() {
        return Err(Error::Domain("the Mellin transform of E(f) converges for f ∈ S(A)₀ only".into()));
    }
    if f.arch.terms.is_empty() {
        return Ok(Estimate { value: Complex64::new(0.0, 0.0), error: 0.0 });
    }
    let fh = f.fourier();
    let y_max = log_extent(f)?;
    let integrand = |y: f64| -> Complex64 {
        let x = y.exp();
        let e = e_balanced(f, &fh, x).unwrap_or(Complex64::new(f64::NAN, 0.0));
        e * (s - 0.5).scale(y).exp()
    };
    let breaks: Vec<f64> = (0..=16).map(|k| -y_max + 2.0 * y_max * k as f64 / 16.0).collect();
    let est = quad::integrate_with_breaks(integrand, &breaks, tol)?;
    if !est.value.re.is_finite() || !est.value.im.is_finite() {
        return Err(Error::NotConverged("E(f) could not be evaluated on the Mellin contour".into()));
    }
    let edge = (integrand(y_max).norm() + integrand(-y_max).norm()).max(0.0);
    if edge > tol {
        return Err(Error::Truncation(format!("E(f) is still {edge:.3e} at |log x| = {y_max:.2}")));
    }
    Ok(est)
}

/// `ξ(s)·Δ′_∞(s)·∏_p Δ′_p(s)`.
pub fn l_function_model(f: &AdelicTestFn, s: Complex64) -> Result<Complex64> {
    let finite =
        f.rational.as_ref().ok_or_else(|| Error::InvalidInput("the L-function model needs rational-valued finite factors".into()))?;
    let xi = (-s / 2.0 * PI.ln()).exp() * gamma(s / 2.0) * zeta(s)?;
    let mut model = xi * f.arch.delta_prime(s);
    for fp in finite {
        model *= homogeneous_delta_prime(fp.prime(), s, fp)?;
    }
    Ok(model)
}

/// Compares the Mellin transform with the L-function model at `s`.
pub fn mellin_vs_l(f: &AdelicTestFn, s: Complex64, tol: f64) -> Result<MellinComparison> {
    if !(s.re > 0.0 && s.re < 1.0) {
        return Err(Error::InvalidInput(format!("need 0 < Re s < 1, got s = {s}")));
    }
    let mellin = mellin_transform(f, s, tol)?;
    let model = l_function_model(f, s)?;
    Ok(MellinComparison { s, mellin, model, ratio: mellin.value / model })
}

/// The normalizing constant `c` calibrated at `s* = 1/2` and the ratios at
/// further points divided by it.
#[derive(Debug, Clone, Serialize)]
pub struct MellinCalibration {
    pub c: Complex64,
    pub points: Vec<MellinComparison>,
    /// `ratio(s)/c − 1` per point.
    pub deviations: Vec<f64>,
}

pub fn calibrate_mellin(f: &AdelicTestFn, points: &[Complex64], tol: f64) -> Result<MellinCalibration> {
    let reference = mellin_vs_l(f, Complex64::new(0.5, 0.0), tol)?;
    if reference.model.norm() < 1e-12 {
        return Err(Error::Domain("the L-function model vanishes at s = 1/2; choose another test function".into()));
    }
    let c = reference.ratio;
    let mut out = Vec::with_capacity(points.len());
    let mut deviations = Vec::with_capacity(points.len());
    for s in points {
        let m = mellin_vs_l(f, *s, tol)?;
        deviations.push((m.ratio / c - 1.0).norm());
        out.push(m);
    }
    Ok(MellinCalibration { c, points: out, deviations })
}

/// `(log|E(f)(λ₁)| − log|E(f)(λ₂)|)/(|log λ₂| − |log λ₁|)`: the decay rate of
/// `E(f)` per unit of `|log λ|` between two points on the same side of 1.
pub fn decay_slope(f: &AdelicTestFn, lambda1: f64, lambda2: f64) -> Result<f64> {
    if (lambda1 - 1.0) * (lambda2 - 1.0) <= 0.0 || lambda1.ln().abs() >= lambda2.ln().abs() {
        return Err(Error::InvalidInput(format!("need 1 < λ₁ < λ₂ or λ₂ < λ₁ < 1, got {lambda1}, {lambda2}")));
    }
    let a = e_map(f, lambda1)?.value.norm();
    let b = e_map(f, lambda2)?.value.norm().max(f64::MIN_POSITIVE);
    Ok((a.ln() - b.ln()) / (lambda2.ln().abs() - lambda1.ln().abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_field::PAdicBall;
    use crate::zeta_zeros::find_zeros;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn grid() -> Vec<f64> {
        (0..=16).map(|k| 0.25 * 16f64.powf(k as f64 / 16.0)).collect()
    }

    #[test]
    fn theta_value() {
        let f = AdelicTestFn::integral_adeles(ArchimedeanFactor::gaussian());
        let e = e_map(&f, 1.0).unwrap();
        assert_abs_diff_eq!(e.value.re, 0.086_434_8, epsilon = 1e-7);
        let oracle: f64 = (1..10).map(|n: i32| 2.0 * (-PI * (n * n) as f64).exp()).sum();
        assert_abs_diff_eq!(e.value.re, oracle, epsilon = 1e-15);
        assert!(e.tail_bound < 1e-20);
        assert!(!f.in_s0());
    }

    #[test]
    fn odd_archimedean_factor_cancels() {
        let f = AdelicTestFn::integral_adeles(ArchimedeanFactor::new(vec![GaussTerm::odd(1.0, 1.0)]).unwrap());
        for l in [0.3, 1.0, 2.5] {
            assert!(e_map(&f, l).unwrap().value.norm() < 1e-15);
        }
        assert!(f.in_s0());
    }

    #[test]
    fn truncation_certificate() {
        let f = AdelicTestFn::integral_adeles(ArchimedeanFactor::theta_s0());
        for l in [0.5, 1.0, 3.0] {
            let e = e_map(&f, l).unwrap();
            let doubled = e_map_truncated(&f, l, 2 * e.terms).unwrap();
            assert!((e.value - doubled.value).norm() < 1e-12);
            assert!(e.tail_bound < 1e-12);
        }
    }

    #[test]
    fn gaussian_decays_at_infinity() {
        let f = AdelicTestFn::integral_adeles(ArchimedeanFactor::gaussian());
        let slope = decay_slope(&f, 2.0, 4.0).unwrap();
        assert!(slope > 5.0, "{slope}");
    }

    #[test]
    fn s0_functional_equation() {
        let f = AdelicTestFn::integral_adeles(ArchimedeanFactor::theta_s0());
        assert!(f.in_s0());
        let r = functional_equation_check(&f, &grid()).unwrap();
        assert!(r.max_residual < 1e-10, "{}", r.max_residual);
        let z = functional_equation_check(&AdelicTestFn::zero(), &grid()).unwrap();
        assert_eq!(z.max_residual, 0.0);
        assert!(decay_slope(&f, 2.0, 4.0).unwrap() >= 1.0);
        assert!(decay_slope(&f, 0.5, 0.25).unwrap() >= 1.0);
    }

    #[test]
    fn pure_gaussian_residual_is_the_boundary_term() {
        let f = AdelicTestFn::integral_adeles(ArchimedeanFactor::gaussian());
        assert!(functional_equation_check(&f, &[1.0]).is_err());
        let r = boundary_term_check(&f, &grid()).unwrap();
        assert!(r.max_residual > 0.1);
        assert!(r.max_deviation_from_prediction < 1e-10, "{}", r.max_deviation_from_prediction);
    }

    #[test]
    fn finite_factors_boundary_and_s0() {
        let f2 = LocallyConstantFn::indicator(PAdicBall::new(2, &rational::int(1), 1).unwrap());
        let f3 = LocallyConstantFn::indicator(PAdicBall::around_zero(3, -1).unwrap());
        // f_2 = 1_{1 + 2ℤ_2} has a twisted Fourier transform; f_3 = 1_{3^{-1}ℤ_3}.
        let g = AdelicTestFn::new(vec![f2.clone(), f3.clone()], ArchimedeanFactor::gaussian()).unwrap();
        assert!(!g.in_s0());
        let r = boundary_term_check(&g, &grid()).unwrap();
        assert!(r.max_deviation_from_prediction < 1e-10, "{}", r.max_deviation_from_prediction);
        let h = AdelicTestFn::new(vec![f2, f3], ArchimedeanFactor::theta_s0()).unwrap();
        assert!(h.in_s0());
        let r = functional_equation_check(&h, &grid()).unwrap();
        assert!(r.max_residual < 1e-10, "{}", r.max_residual);
    }

    #[test]
    fn rejects_unfactorized_input() {
        let a = LocallyConstantFn::integers(2).unwrap();
        assert!(AdelicTestFn::new(vec![a.clone(), a], ArchimedeanFactor::gaussian()).is_err());
    }

    #[test]
    fn mellin_constant_is_s_independent() {
        let f = AdelicTestFn::integral_adeles(ArchimedeanFactor::theta_s0());
        let pts = [Complex64::new(0.3, 0.0), Complex64::new(0.5, 2.0), Complex64::new(0.7, -1.0)];
        let cal = calibrate_mellin(&f, &pts, 1e-13).unwrap();
        for d in &cal.deviations {
            assert!(*d < 1e-6, "{:?}", cal.deviations);
        }
        assert_abs_diff_eq!(cal.c.re, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(cal.c.im, 0.0, epsilon = 1e-6);
        let z = mellin_transform(&AdelicTestFn::zero(), Complex64::new(0.5, 1.0), 1e-12).unwrap();
        assert_eq!(z.value.norm(), 0.0);
    }

    #[test]
    fn mellin_with_finite_factor() {
        let f3 = LocallyConstantFn::indicator(PAdicBall::around_zero(3, -1).unwrap());
        let f = AdelicTestFn::new(vec![f3], ArchimedeanFactor::theta_s0()).unwrap();
        let cal = calibrate_mellin(&f, &[Complex64::new(0.3, 0.0), Complex64::new(0.6, 1.5)], 1e-13).unwrap();
        assert!(cal.deviations.iter().all(|d| *d < 1e-6), "{:?}", cal.deviations);
    }

    #[test]
    fn mellin_vanishes_at_zeta_zeros() {
        let f = AdelicTestFn::integral_adeles(ArchimedeanFactor::theta_s0());
        let zeros = find_zeros(40.0).unwrap();
        for g in zeros.ordinates.iter().take(5) {
            let m = mellin_transform(&f, Complex64::new(0.5, *g), 1e-14).unwrap();
            let off = mellin_transform(&f, Complex64::new(0.5, g + 0.5), 1e-14).unwrap();
            assert!(m.value.norm() < 1e-6, "γ = {g}: {}", m.value);
            assert!(m.value.norm() < 1e-4 * off.value.norm(), "γ = {g}: {} vs {}", m.value, off.value);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn functional_equation_for_random_s0_combinations(a in -2.0f64..2.0, b1 in 0.5f64..3.0, b2 in 0.5f64..3.0, l in 0.25f64..4.0) {
            prop_assume!((b1 - b2).abs() > 0.1 && (b1 - 1.0).abs() > 0.1 && (b2 - 1.0).abs() > 0.1);
            // Solve for coefficients c1, c2 so that f(0) = 0 and ∫f = 0 with the leading e^{−πx²}·a.
            let (s1, s2) = (b1.powf(-0.5), b2.powf(-0.5));
            let det = s2 - s1;
            let c1 = (-a * s2 + a) / det;
            let c2 = (a * s1 - a) / det;
            let arch = ArchimedeanFactor::new(vec![GaussTerm::even(a, 1.0), GaussTerm::even(c1, b1), GaussTerm::even(c2, b2)]).unwrap();
            let f = AdelicTestFn::integral_adeles(arch);
            prop_assert!(f.in_s0());
            let r = functional_equation_check(&f, &[l]).unwrap();
            let scale = 1.0 + a.abs() + c1.abs() + c2.abs();
            prop_assert!(r.max_residual < 1e-10 * scale);
        }
    }
}
