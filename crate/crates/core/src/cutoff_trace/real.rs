use super::{symbol_g_real, RealSymbol, TraceReport};
use crate::error::{Error, Result};
use crate::local_field::LogLinearNumber;
use crate::principal_value::{pv_real, PVValue};
use crate::quad::{self, Estimate};
use crate::special::sine_integral;
use crate::test_functions::RadialTestFn;
use num_complex::Complex64;
use std::f64::consts::PI;

/// `S(R) = ∫_{|u|≤R} ĝ(u) du` and `L(R) = ∫_{|u|≤R} ĝ(u) log|u| du`.
#[derive(Debug, Clone, Copy)]
pub struct KernelIntegrals {
    pub r: f64,
    pub s: Estimate,
    pub l: Estimate,
}

/// Kernels `W₁(x) = sin(2πxR)/(πx)` and
/// `W_log(x) = 2[log R·sin(2πxR) − Si(2πxR)]/(2πx)`, so that
/// `S(R) = ∫ g W₁` and `L(R) = ∫ g W_log`.
fn kernels(x: f64, r: f64) -> (f64, f64) {
    let a = 2.0 * PI * x;
    let z = a * r;
    let log_r = r.ln();
    if z.abs() < 1e-4 {
        let z2 = z * z;
        let w1 = 2.0 * r * (1.0 - z2 / 6.0);
        let wlog = 2.0 * r * (log_r * (1.0 - z2 / 6.0) - (1.0 - z2 / 18.0));
        return (w1, wlog);
    }
    let s = z.sin();
    (s / (PI * x), 2.0 * (log_r * s - sine_integral(z)) / a)
}

/// Panels per adaptive call; the quadrature caps its segment count.
const CHUNK: usize = 4000;
/// Largest total number of initial panels.
const MAX_PANELS: usize = 4_000_000;

/// Computes `S(R)` and `L(R)` by integrating the symbol against the kernels
/// with break points every `1/(4R)`.
pub fn kernel_integrals(g: &RealSymbol, r: f64, tol: f64) -> Result<KernelIntegrals> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidInput(format!("cutoff radius must be positive, got {r}")));
    }
    let step = 0.25 / r;
    let mut pieces: Vec<Vec<f64>> = Vec::new();
    let mut total_panels = 0usize;
    for (a, b) in g.support() {
        if !(b > a) {
            continue;
        }
        let n = ((b - a) / step).ceil().max(1.0) as usize;
        total_panels += n;
        if total_panels > MAX_PANELS {
            return Err(Error::NotConverged(format!("kernel quadrature at R = {r:.3e} would need more than {MAX_PANELS} panels")));
        }
        let mut pts: Vec<f64> = (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect();
        if a < 0.0 && b > 0.0 {
            pts.push(0.0);
            pts.sort_by(f64::total_cmp);
            pts.dedup();
        }
        for start in (0..pts.len() - 1).step_by(CHUNK) {
            let end = (start + CHUNK).min(pts.len() - 1);
            pieces.push(pts[start..=end].to_vec());
        }
    }
    let share = tol / pieces.len().max(1) as f64;
    let mut s = Estimate { value: 0.0, error: 0.0 };
    let mut l = Estimate { value: 0.0, error: 0.0 };
    for br in &pieces {
        if br.len() < 2 {
            continue;
        }
        let est = quad::integrate_with_breaks(
            |x: f64| {
                let gx = g.eval(x);
                if gx == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let (w1, wl) = kernels(x, r);
                Complex64::new(gx * w1, gx * wl)
            },
            br,
            share,
        )?;
        s.value += est.value.re;
        l.value += est.value.im;
        s.error += est.error;
        l.error += est.error;
    }
    Ok(KernelIntegrals { r, s, l })
}

/// Cutoff trace on ℝ at `Λ ≥ 2`: `2 log Λ·S(Λ²) − L(Λ²)`, compared with
/// `2h(1) log Λ + ∫′ h(u⁻¹)/|1−u| d*u`.
pub fn trace_real(h: &RadialTestFn, lambda: f64, tol: f64) -> Result<TraceReport> {
    if !(lambda >= 2.0 && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!("the real cutoff needs Λ ≥ 2, got {lambda}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let two_log = 2.0 * lambda.ln();
    if h.is_zero() {
        let zero = PVValue::Exact(LogLinearNumber::zero());
        return Ok(TraceReport {
            place: "R".into(),
            lambda,
            two_log_prime_lambda: PVValue::Float(Estimate { value: two_log, error: 0.0 }),
            computed: zero.clone(),
            predicted: zero.clone(),
            residual: zero,
            exact: true,
            n0: None,
            per_q: Vec::new(),
            q_tail_bound: None,
            identities: None,
            fundamental_domain: None,
        });
    }
    let g = symbol_g_real(h)?;
    let k = kernel_integrals(&g, lambda * lambda, tol * 0.1)?;
    let computed = Estimate { value: two_log * k.s.value - k.l.value, error: two_log * k.s.error + k.l.error };
    let pv = pv_real(&|u: f64| if u == 0.0 { 0.0 } else { h.eval(1.0 / u) }, tol * 0.1)?;
    let predicted = Estimate { value: two_log * h.value_at_one() + pv.value.to_f64(), error: pv.value.error() };
    let residual = Estimate { value: computed.value - predicted.value, error: computed.error + predicted.error };
    Ok(TraceReport {
        place: "R".into(),
        lambda,
        two_log_prime_lambda: PVValue::Float(Estimate { value: two_log, error: 0.0 }),
        computed: PVValue::Float(computed),
        predicted: PVValue::Float(predicted),
        residual: PVValue::Float(residual),
        exact: false,
        n0: None,
        per_q: Vec::new(),
        q_tail_bound: None,
        identities: None,
        fundamental_domain: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutoff_trace::symbol_g_real;
    use approx::assert_abs_diff_eq;

    #[test]
    fn symbol_support_and_value_at_zero() {
        let h = RadialTestFn::bump_on_module_interval(0.5, 2.0).unwrap();
        let g = symbol_g_real(&h).unwrap();
        let [(a1, b1), (a2, b2)] = g.support();
        assert_abs_diff_eq!(a1, -3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b1, -1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(a2, -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(b2, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.at_zero(), h.eval(1.0), epsilon = 0.0);
        assert!(symbol_g_real(&RadialTestFn::gaussian_log(0.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn kernel_limits_match_closed_forms() {
        // As R grows, S(R) → g(0) and L(R) → the regularized log moment.
        let h = RadialTestFn::bump_on_module_interval(0.6, 1.8).unwrap();
        let g = symbol_g_real(&h).unwrap();
        let k = kernel_integrals(&g, 4096.0, 1e-12).unwrap();
        assert_abs_diff_eq!(k.s.value, g.at_zero(), epsilon = 1e-8);
        assert_abs_diff_eq!(k.l.value, g.log_moment(1e-13).unwrap(), epsilon = 1e-7);
    }

    #[test]
    fn zero_function() {
        let r = trace_real(&RadialTestFn::zero(), 4.0, 1e-8).unwrap();
        assert!(r.exact);
        assert_eq!(r.computed.to_f64(), 0.0);
    }

    #[test]
    fn vanishing_at_one_converges_to_pv() {
        let h = RadialTestFn::bump_on_module_interval(2.0, 4.0).unwrap();
        let res: Vec<f64> = [4.0, 8.0, 16.0, 32.0].iter().map(|l| trace_real(&h, *l, 1e-11).unwrap().residual.to_f64().abs()).collect();
        assert!(res[3] < 1e-6, "{res:?}");
        for w in res.windows(2) {
            assert!(w[1] < 0.5 * w[0] || w[1] < 1e-9, "{res:?}");
        }
    }

    #[test]
    fn value_one_at_one() {
        let h = RadialTestFn::bump_on_module_interval(0.5, 2.0).unwrap().scale(std::f64::consts::E);
        assert_abs_diff_eq!(h.value_at_one(), 1.0, epsilon = 1e-14);
        let r = trace_real(&h, 16.0, 1e-10).unwrap();
        assert!(r.residual.to_f64().abs() < 1e-5, "{:?}", r.residual);
    }

    #[test]
    fn linear_in_h() {
        let a = RadialTestFn::bump_on_module_interval(0.5, 2.0).unwrap();
        let b = RadialTestFn::bump_on_module_interval(1.5, 3.0).unwrap();
        let t = |h: &RadialTestFn| trace_real(h, 8.0, 1e-11).unwrap().computed.to_f64();
        assert_abs_diff_eq!(t(&a.scale(2.0).add(&b)), 2.0 * t(&a) + t(&b), epsilon = 1e-8);
    }
}
