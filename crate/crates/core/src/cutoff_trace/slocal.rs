use super::padic::symbol_shells;
use super::real::kernel_integrals;
use super::{symbol_g_real_twisted, QTerm, TraceReport};
use crate::error::{Error, Result};
use crate::local_field::rational::{self, int, pow_p};
use crate::local_field::{HaarNormalization, LocallyConstantFn, LogLinearNumber};
use crate::principal_value::{pv_finite, pv_real, PVValue};
use crate::quad::Estimate;
use crate::test_functions::RadialTestFn;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Fundamental domain for the S-units acting on `J_S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FundamentalDomain {
    /// `∏_p ℤ_p^* × ℝ_+`.
    UnitsTimesPositive,
    /// `ℚ_{p₁}^* × ∏_{p ≠ p₁} ℤ_p^* × [1, p₁)`, with `p₁` the first prime of S.
    FirstPrimeStrip,
}

/// A factorizable test function `f = ⊗_p f_p ⊗ f_∞` on `J_S` for
/// `S = {primes of the finite factors, ∞}`.
#[derive(Debug, Clone)]
pub struct SLocalConfig {
    pub finite: Vec<LocallyConstantFn>,
    pub real: RadialTestFn,
    /// Largest word length `Σ|k_i|` of `q = ±∏ p_i^{k_i}` that may be summed.
    pub max_radius: i64,
    pub domain: FundamentalDomain,
}

impl SLocalConfig {
    pub fn primes(&self) -> Vec<u64> {
        self.finite.iter().map(|f| f.prime()).collect()
    }

    /// The S-unit group, e.g. `±2^Z`.
    pub fn unit_group(&self) -> String {
        let primes = self.primes();
        if primes.is_empty() {
            return "±1".into();
        }
        format!("±{}", primes.iter().map(|p| format!("{p}^Z")).collect::<Vec<_>>().join("·"))
    }
}

/// One side-by-side check of a per-place identity.
#[derive(Debug, Clone, Serialize)]
pub struct PlaceIdentity {
    pub place: String,
    /// `Σ_q ∫ ĝ_q(u)(−log|u_v|) du`.
    pub lhs: f64,
    /// `∫′ h(u⁻¹)/|1−u| d*u` over `k_v^*`.
    pub rhs: f64,
}

/// `Σ_q ∫ ĝ_q = h(1)` and the per-place principal-value identities.
#[derive(Debug, Clone, Serialize)]
pub struct SLocalIdentities {
    pub mass_sum: f64,
    pub h_at_one: f64,
    pub per_place: Vec<PlaceIdentity>,
}

impl SLocalIdentities {
    pub fn max_defect(&self) -> f64 {
        self.per_place.iter().map(|p| (p.lhs - p.rhs).abs()).fold((self.mass_sum - self.h_at_one).abs(), f64::max)
    }
}

/// `ρ⁻¹ ∫_{x ∈ D, t/Λ ≤ |x| ≤ Λ} dx/|x|`, computed on the domain itself.
fn domain_weight(domain: FundamentalDomain, primes: &[u64], lambda: f64, t: f64) -> f64 {
    match (domain, primes.first()) {
        (FundamentalDomain::UnitsTimesPositive, _) | (_, None) => (lambda * lambda / t).ln().max(0.0),
        (FundamentalDomain::FirstPrimeStrip, Some(&p1)) => {
            // Shells |x_{p₁}| = p₁^m carry mass (1 − 1/p₁) for dx/|x|; the
            // common factor ∏ (1 − 1/p) is ρ and cancels.
            let lp = (p1 as f64).ln();
            let (lo, hi) = ((t / lambda).ln(), lambda.ln());
            let m_lo = (lo / lp).floor() as i64 - 1;
            let m_hi = (hi / lp).ceil() as i64 + 1;
            (m_lo..=m_hi)
                .map(|m| {
                    let shift = m as f64 * lp;
                    let a = (lo - shift).max(0.0);
                    let b = (hi - shift).min(lp);
                    (b - a).max(0.0)
                })
                .sum()
        }
    }
}

/// The constant `c_D` with `weight(t) = c_D − log t`, checked at several `t`.
fn domain_constant(domain: FundamentalDomain, primes: &[u64], lambda: f64) -> Result<f64> {
    let samples: Vec<f64> =
        [1.0, lambda.sqrt(), lambda, lambda.powf(1.5)].iter().map(|t| domain_weight(domain, primes, lambda, *t) + t.ln()).collect();
    let spread = samples.iter().fold(0.0f64, |m, s| m.max((s - samples[0]).abs()));
    if spread > 1e-9 * samples[0].abs().max(1.0) {
        return Err(Error::InvalidInput(format!("{domain:?} does not give a weight of the form c − log|u| (spread {spread:.3e})")));
    }
    Ok(samples[0])
}

/// Exponent vectors of word length exactly `d`.
fn exponent_shell(n: usize, d: i64) -> Vec<Vec<i64>> {
    if n == 0 {
        return if d == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for k in -d..=d {
        for mut rest in exponent_shell(n - 1, d - k.abs()) {
            rest.insert(0, k);
            out.push(rest);
        }
    }
    out
}

fn q_value(primes: &[u64], sign: i8, ks: &[i64]) -> BigRational {
    let mut q = int(sign as i64);
    for (p, k) in primes.iter().zip(ks) {
        q *= pow_p(*p, *k);
    }
    q
}

/// Per-`q` data kept for the identities.
struct QData {
    term: QTerm,
    totals: Vec<BigRational>,
    moments: Vec<BigRational>,
    s_numeric: f64,
    l_limit: f64,
}

fn compute_q(config: &SLocalConfig, primes: &[u64], sign: i8, ks: &[i64], lambda: f64, c: f64, tol: f64) -> Result<QData> {
    let q = q_value(primes, sign, ks);
    let qf = rational::to_f64(&q);
    let shells = config.finite.iter().map(|f| symbol_shells(&f.dilate(&q)?)).collect::<Result<Vec<_>>>()?;
    let sym = symbol_g_real_twisted(&config.real, qf)?;
    let s_inf = sym.at_zero();
    let l_inf = sym.log_moment(tol * 1e-4)?;
    let scale = 1.0 + s_inf.abs() + l_inf.abs();
    let mut truncation = 0.0;
    // Shell lists (log-shift, mass) per prime, with the geometric tails unrolled.
    let mut lists: Vec<Vec<(f64, f64)>> = Vec::new();
    for sh in &shells {
        let lp = (sh.p as f64).ln();
        let mut list: Vec<(f64, f64)> = sh.explicit.iter().map(|(j, m)| (*j as f64 * lp, rational::to_f64(m))).collect();
        let a = rational::to_f64(&sh.tail_coeff);
        if a != 0.0 {
            let mut j = sh.tail_start;
            loop {
                let m = rational::to_f64(&sh.mass(j));
                let weight = (c.abs() + (j as f64 * lp).abs() + 1.0) * scale;
                if m.abs() * weight < tol * 1e-6 {
                    // Geometric remainder: at most p/(p−1) times this term.
                    truncation += 2.0 * m.abs() * weight;
                    break;
                }
                list.push((j as f64 * lp, m));
                j -= 1;
            }
        }
        lists.push(list);
    }
    let mut combos: Vec<(f64, f64)> = vec![(0.0, 1.0)];
    for list in &lists {
        combos = combos.iter().flat_map(|(y, m)| list.iter().map(move |(y2, m2)| (y + y2, m * m2))).filter(|(_, m)| *m != 0.0).collect();
    }
    // Ascending cutoff radius R = Λ² e^{−y}.
    combos.sort_by(|a, b| b.0.total_cmp(&a.0));
    let saturation = tol * 1e-4;
    let mut saturated = false;
    let mut deviation = (0.0, 0.0);
    let mut last: Option<(f64, f64, f64, f64, f64)> = None;
    let mut s_numeric = s_inf;
    let mut value = 0.0;
    let mut error = truncation;
    for (y, m) in combos {
        let r = lambda * lambda * (-y).exp();
        let (s, l, es, el) = if saturated {
            (s_inf, l_inf, deviation.0, deviation.1)
        } else if let Some((y0, s, l, es, el)) = last.filter(|t| t.0 == y) {
            let _ = y0;
            (s, l, es, el)
        } else {
            match kernel_integrals(&sym, r, tol * 1e-4) {
                Ok(k) => {
                    s_numeric = k.s.value;
                    let dev = ((k.s.value - s_inf).abs(), (k.l.value - l_inf).abs());
                    if dev.0 < saturation && dev.1 < saturation {
                        saturated = true;
                        deviation = dev;
                    }
                    last = Some((y, k.s.value, k.l.value, k.s.error, k.l.error));
                    (k.s.value, k.l.value, k.s.error, k.l.error)
                }
                Err(Error::NotConverged(_)) => {
                    // Beyond the quadrature budget: use the limits with the
                    // last observed deviation as error bar.
                    saturated = true;
                    deviation = last.map(|(_, s, l, _, _)| ((s - s_inf).abs(), (l - l_inf).abs())).unwrap_or((s_inf.abs(), l_inf.abs()));
                    (s_inf, l_inf, deviation.0, deviation.1)
                }
                Err(e) => return Err(e),
            }
        };
        value += m * ((c - y) * s - l);
        error += m.abs() * ((c - y).abs() * es + el);
    }
    let totals: Vec<BigRational> = shells.iter().map(|s| s.total()).collect();
    let moments: Vec<BigRational> = shells.iter().map(|s| s.first_moment()).collect();
    let mass = totals.iter().map(rational::to_f64).product::<f64>() * s_numeric;
    Ok(QData { term: QTerm { sign, exponents: ks.to_vec(), value, error, mass }, totals, moments, s_numeric, l_limit: l_inf })
}

/// Valuation range of the support of a finite factor.
fn valuation_range(f: &LocallyConstantFn) -> Option<(i64, i64)> {
    let vals: Vec<i64> = f.pieces().iter().filter_map(|(b, _)| b.valuation()).collect();
    Some((*vals.iter().min()?, *vals.iter().max()?))
}

/// S-units `q` whose restriction data can be nonzero: every `q` with some
/// `f_v(q) ≠ 0` pattern used by `h(1)` or the per-place identities.
fn active_units(config: &SLocalConfig) -> Vec<(i8, Vec<i64>)> {
    let primes = config.primes();
    let (y_min, y_max) = config.real.log_support().unwrap_or((0.0, 0.0));
    let ranges: Vec<(i64, i64)> = config.finite.iter().map(|f| valuation_range(f).unwrap_or((0, -1))).collect();
    let spread: i64 = ranges.iter().map(|(a, b)| a.abs().max(b.abs())).sum();
    let bound = spread + (y_min.abs().max(y_max.abs()) / 2f64.ln()).ceil() as i64 + 1;
    let mut out = Vec::new();
    let mut boxes: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in &primes {
        boxes = boxes.into_iter().flat_map(|v| (-bound..=bound).map(move |k| [v.clone(), vec![k]].concat())).collect();
    }
    for ks in boxes {
        for sign in [1i8, -1] {
            out.push((sign, ks.clone()));
        }
    }
    out
}

fn word_length(ks: &[i64]) -> i64 {
    ks.iter().map(|k| k.abs()).sum()
}

/// S-local cutoff trace `Σ_q I_q` for `f` on `J_S`, with
/// `I_q = ∫_{|u| ≤ Λ²} ĝ_q(u)(2 log′Λ − log|u|) du` and
/// `g_q(u) = f(q(u+1)⁻¹)|u+1|⁻¹`, compared with
/// `2h(1) log′Λ + Σ_{v∈S} ∫′ h(u⁻¹)/|1−u| d*u` where `h = Σ_q f(q·)`.
pub fn trace_slocal(config: &SLocalConfig, lambda: f64, tol: f64) -> Result<TraceReport> {
    let primes = config.primes();
    if primes.len() > 2 {
        return Err(Error::InvalidInput(format!("S may contain at most two finite primes, got {}", primes.len())));
    }
    for (i, p) in primes.iter().enumerate() {
        if primes[..i].contains(p) {
            return Err(Error::InvalidInput(format!("the prime {p} appears twice in S")));
        }
    }
    if !(lambda >= 2.0 && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!("the cutoff needs Λ ≥ 2, got {lambda}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let c = domain_constant(config.domain, &primes, lambda)?;
    let domain_name = if primes.is_empty() {
        "R_+".to_string()
    } else {
        match config.domain {
            FundamentalDomain::UnitsTimesPositive => {
                format!("{} x R_+", primes.iter().map(|p| format!("Z_{p}^*")).collect::<Vec<_>>().join(" x "))
            }
            FundamentalDomain::FirstPrimeStrip => {
                let mut parts = vec![format!("Q_{}^*", primes[0])];
                parts.extend(primes[1..].iter().map(|p| format!("Z_{p}^*")));
                parts.push(format!("[1, {})", primes[0]));
                parts.join(" x ")
            }
        }
    };

    // Prediction and right-hand sides of the identities.
    let mut h1 = 0.0;
    let mut pv_finite_sums = vec![0.0; primes.len()];
    let mut real_coeffs: Vec<(f64, f64)> = Vec::new();
    let mut d_min = 0;
    for (sign, ks) in active_units(config) {
        let q = q_value(&primes, sign, &ks);
        let qf = rational::to_f64(&q);
        let fin: Vec<f64> = config.finite.iter().map(|f| rational::to_f64(&f.eval(&q))).collect();
        let f_inf = config.real.eval(qf);
        let all: f64 = fin.iter().product();
        if all != 0.0 {
            d_min = d_min.max(word_length(&ks));
            real_coeffs.push((qf, all));
            h1 += all * f_inf;
        }
        for i in 0..primes.len() {
            let coeff = f_inf * fin.iter().enumerate().filter(|(l, _)| *l != i).map(|(_, v)| v).product::<f64>();
            if coeff == 0.0 {
                continue;
            }
            d_min = d_min.max(word_length(&ks));
            let shifted = config.finite[i].dilate(&q)?.compose_inverse()?;
            let pv = pv_finite(primes[i], &shifted, HaarNormalization::LogScaleModulated)?;
            pv_finite_sums[i] += coeff * pv.value.to_f64();
        }
    }
    let pv_inf = if real_coeffs.is_empty() || config.real.is_zero() {
        Estimate { value: 0.0, error: 0.0 }
    } else {
        let f_inf = |u: f64| {
            if u == 0.0 {
                return 0.0;
            }
            real_coeffs.iter().map(|(q, a)| a * config.real.eval(q / u)).sum()
        };
        match pv_real(&f_inf, tol * 0.1)?.value {
            PVValue::Float(e) => e,
            PVValue::Exact(x) => Estimate { value: x.to_f64(), error: 0.0 },
        }
    };

    // Sum over q by word length until the shells are negligible.
    let mut data: Vec<QData> = Vec::new();
    let mut maxima: Vec<f64> = Vec::new();
    let mut q_tail = 0.0;
    let mut done = false;
    for d in 0..=config.max_radius.max(0) {
        let units: Vec<(i8, Vec<i64>)> =
            exponent_shell(primes.len(), d).into_iter().flat_map(|ks| [(1i8, ks.clone()), (-1i8, ks)]).collect();
        let shell = units.par_iter().map(|(sign, ks)| compute_q(config, &primes, *sign, ks, lambda, c, tol)).collect::<Result<Vec<_>>>()?;
        let m = shell.iter().map(|q| q.term.value.abs() + q.term.error).fold(0.0, f64::max);
        maxima.push(m);
        data.extend(shell);
        if primes.is_empty() {
            done = true;
            break;
        }
        let n = maxima.len();
        if d >= d_min && n >= 2 && maxima[n - 1] < tol * 0.01 && maxima[n - 2] < tol {
            let prev = maxima[n - 2];
            let ratio = if prev > 0.0 { (maxima[n - 1] / prev).clamp(0.25, 0.95) } else { 0.5 };
            q_tail = (1..=400).map(|e| 2.0 * exponent_shell(primes.len(), d + e).len() as f64 * maxima[n - 1] * ratio.powi(e as i32)).sum();
            done = q_tail <= tol;
            if done {
                break;
            }
        }
    }
    if !done {
        let n = maxima.len();
        let last = maxima[n - 1];
        let ratio = if n >= 2 && maxima[n - 2] > 0.0 { (last / maxima[n - 2]).clamp(0.1, 0.95) } else { 0.9 };
        let extra = ((last / (tol * 0.01)).ln() / (1.0 / ratio).ln()).ceil().max(1.0) as i64;
        return Err(Error::Truncation(format!(
            "S-unit sum not certified at word length {}: last shell carries {last:.3e}; a radius of about {} is required",
            n - 1,
            n as i64 - 1 + extra
        )));
    }

    let computed = Estimate {
        value: crate::quad::compensated_sum(data.iter().map(|q| q.term.value)),
        error: data.iter().map(|q| q.term.error).sum::<f64>() + q_tail,
    };
    let two_log = 2.0 * lambda.ln();
    let pv_total: f64 = pv_finite_sums.iter().sum::<f64>() + pv_inf.value;
    let predicted = Estimate { value: two_log * h1 + pv_total, error: pv_inf.error };
    let residual = Estimate { value: computed.value - predicted.value, error: computed.error + predicted.error };

    let mass_sum = data.iter().map(|q| q.totals.iter().map(rational::to_f64).product::<f64>() * q.s_numeric).sum();
    let mut per_place = Vec::new();
    for (i, p) in primes.iter().enumerate() {
        let lhs: f64 = data
            .iter()
            .map(|q| {
                let others: f64 = q.totals.iter().enumerate().filter(|(l, _)| *l != i).map(|(_, t)| rational::to_f64(t)).product();
                -(*p as f64).ln() * rational::to_f64(&q.moments[i]) * others * q.s_numeric
            })
            .sum();
        per_place.push(crate::cutoff_trace::slocal::PlaceIdentity { place: format!("Q_{p}"), lhs, rhs: pv_finite_sums[i] });
    }
    let lhs_inf: f64 = data.iter().map(|q| -q.totals.iter().map(rational::to_f64).product::<f64>() * q.l_limit).sum();
    per_place.push(PlaceIdentity { place: "R".into(), lhs: lhs_inf, rhs: pv_inf.value });

    let mut per_q: Vec<QTerm> = data.into_iter().map(|q| q.term).collect();
    per_q.retain(|t| t.value != 0.0 || t.mass != 0.0);
    let zero_trace = config.real.is_zero() || config.finite.iter().any(|f| f.is_zero());
    let pick = |e: Estimate| if zero_trace { PVValue::Exact(LogLinearNumber::zero()) } else { PVValue::Float(e) };
    Ok(TraceReport {
        place: format!("S = {{{}}}", primes.iter().map(|p| p.to_string()).chain(["inf".to_string()]).collect::<Vec<_>>().join(", ")),
        lambda,
        two_log_prime_lambda: PVValue::Float(Estimate { value: two_log, error: 0.0 }),
        computed: pick(computed),
        predicted: pick(predicted),
        residual: pick(residual),
        exact: zero_trace,
        n0: None,
        per_q,
        q_tail_bound: Some(q_tail),
        identities: Some(SLocalIdentities { mass_sum, h_at_one: h1, per_place }),
        fundamental_domain: Some(format!("{domain_name} for O_S^* = {}", config.unit_group())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutoff_trace::trace_real;
    use approx::assert_abs_diff_eq;

    fn two_adic_units() -> LocallyConstantFn {
        LocallyConstantFn::units(2).unwrap()
    }

    #[test]
    fn domain_weights_agree() {
        for lambda in [2.0, 5.5, 16.0] {
            let a = domain_constant(FundamentalDomain::UnitsTimesPositive, &[2], lambda).unwrap();
            let b = domain_constant(FundamentalDomain::FirstPrimeStrip, &[2], lambda).unwrap();
            let c = domain_constant(FundamentalDomain::FirstPrimeStrip, &[3, 2], lambda).unwrap();
            assert_abs_diff_eq!(a, 2.0 * f64::ln(lambda), epsilon = 1e-12);
            assert_abs_diff_eq!(b, a, epsilon = 1e-12);
            assert_abs_diff_eq!(c, a, epsilon = 1e-12);
        }
    }

    #[test]
    fn exponent_shells() {
        assert_eq!(exponent_shell(1, 2), vec![vec![-2], vec![2]]);
        assert_eq!(exponent_shell(2, 1).len(), 4);
        assert_eq!(exponent_shell(0, 0), vec![Vec::<i64>::new()]);
    }

    #[test]
    fn real_only_reduces_to_trace_real() {
        let f = RadialTestFn::bump_on_module_interval(0.5, 2.5).unwrap();
        let cfg = SLocalConfig { finite: vec![], real: f.clone(), max_radius: 0, domain: FundamentalDomain::UnitsTimesPositive };
        let s = trace_slocal(&cfg, 4.0, 1e-9).unwrap();
        let r = trace_real(&f.scale(2.0), 4.0, 1e-9).unwrap();
        assert_abs_diff_eq!(s.computed.to_f64(), r.computed.to_f64(), epsilon = 1e-8);
        assert_abs_diff_eq!(s.residual.to_f64(), r.residual.to_f64(), epsilon = 1e-7);
    }

    #[test]
    fn zero_function() {
        let cfg = SLocalConfig {
            finite: vec![LocallyConstantFn::zero(2)],
            real: RadialTestFn::bump_on_module_interval(1.1, 1.9).unwrap(),
            max_radius: 4,
            domain: FundamentalDomain::UnitsTimesPositive,
        };
        let r = trace_slocal(&cfg, 4.0, 1e-8).unwrap();
        assert!(r.exact);
        assert_eq!(r.computed.to_f64(), 0.0);
    }

    #[test]
    fn mass_identity_two_and_infinity() {
        let cfg = SLocalConfig {
            finite: vec![two_adic_units()],
            real: RadialTestFn::bump_on_module_interval(1.1, 1.9).unwrap(),
            max_radius: 30,
            domain: FundamentalDomain::UnitsTimesPositive,
        };
        let mut residuals = Vec::new();
        for lambda in [4.0, 8.0, 16.0] {
            let r = trace_slocal(&cfg, lambda, 1e-8).unwrap();
            let id = r.identities.as_ref().unwrap();
            assert_abs_diff_eq!(id.mass_sum, id.h_at_one, epsilon = 1e-8);
            for p in &id.per_place {
                assert_abs_diff_eq!(p.lhs, p.rhs, epsilon = 1e-6);
            }
            residuals.push(r.residual.to_f64().abs());
        }
        assert!(residuals[1] < 0.01 * residuals[0], "{residuals:?}");
        assert!(residuals[2] < 1e-8, "{residuals:?}");
    }

    #[test]
    fn value_at_one_and_domain_independence() {
        let finite = LocallyConstantFn::units(2).unwrap().add(&LocallyConstantFn::shell(2, 1).unwrap()).unwrap();
        let real = RadialTestFn::bump_on_module_interval(0.4, 1.6).unwrap();
        let run = |domain| {
            let cfg = SLocalConfig { finite: vec![finite.clone()], real: real.clone(), max_radius: 30, domain };
            trace_slocal(&cfg, 8.0, 1e-8).unwrap()
        };
        let a = run(FundamentalDomain::UnitsTimesPositive);
        let b = run(FundamentalDomain::FirstPrimeStrip);
        assert_abs_diff_eq!(a.computed.to_f64(), b.computed.to_f64(), epsilon = 1e-9);
        let id = a.identities.as_ref().unwrap();
        assert!(id.h_at_one > 0.0);
        assert_abs_diff_eq!(id.mass_sum, id.h_at_one, epsilon = 1e-8);
        for p in &id.per_place {
            assert_abs_diff_eq!(p.lhs, p.rhs, epsilon = 1e-6);
        }
        assert!(a.residual.to_f64().abs() < 1e-4, "{:?}", a.residual);
    }
}
