//! The cutoff trace `Trace(R_Λ U(h))` through its symbol: with
//! `g(λ) = h((λ+1)⁻¹)·|λ+1|⁻¹` one has
//! `Trace = ∫_{|u| ≤ Λ²} ĝ(u)(2 log′Λ − log|u|) du`,
//! compared with `2h(1) log′Λ + ∫′ h(u⁻¹)/|1−u| d*u`.
//!
//! The p-adic trace is an exact finite shell sum. The real trace integrates
//! `g` against closed-form kernels. The S-local trace sums over the S-units.

mod padic;
mod real;
mod slocal;

pub use padic::{shell_masses, trace_padic, ShellMasses};
pub use real::{kernel_integrals, trace_real, KernelIntegrals};
pub use slocal::{trace_slocal, FundamentalDomain, SLocalConfig, SLocalIdentities};

use crate::error::{Error, Result};
use crate::local_field::rational::pow_p;
use crate::local_field::{LocallyConstantFn, PAdicBall};
use crate::principal_value::PVValue;
use crate::test_functions::RadialTestFn;
use serde::Serialize;

/// Contribution of one S-unit `q` to an S-local trace.
#[derive(Debug, Clone, Serialize)]
pub struct QTerm {
    /// `q = sign·p^k` (a single finite prime) or the list of exponents.
    pub sign: i8,
    pub exponents: Vec<i64>,
    pub value: f64,
    pub error: f64,
    /// `∫ ĝ_q(u) du`.
    pub mass: f64,
}

/// Result of a cutoff-trace computation and its comparison with the
/// asymptotic prediction.
#[derive(Debug, Clone, Serialize)]
pub struct TraceReport {
    pub place: String,
    pub lambda: f64,
    /// `2 log′Λ`.
    pub two_log_prime_lambda: PVValue,
    pub computed: PVValue,
    pub predicted: PVValue,
    pub residual: PVValue,
    /// True when the residual is exactly 0.
    pub exact: bool,
    /// Smallest `N` from which the p-adic residual vanishes.
    pub n0: Option<i64>,
    pub per_q: Vec<QTerm>,
    pub q_tail_bound: Option<f64>,
    pub identities: Option<SLocalIdentities>,
    pub fundamental_domain: Option<String>,
}

/// `g(λ) = h((λ+1)⁻¹)·|λ+1|⁻¹` for a locally constant `h` on `ℚ_p^*`.
pub fn symbol_g_padic(h: &LocallyConstantFn) -> Result<LocallyConstantFn> {
    let p = h.prime();
    let minus_one = crate::local_field::rational::int(-1);
    let mut pieces: Vec<(PAdicBall, _)> = Vec::with_capacity(h.pieces().len());
    for (ball, c) in h.pieces() {
        let v = ball.valuation().ok_or_else(|| Error::Domain(format!("h does not vanish near module 0: the piece {ball:?} contains 0")))?;
        pieces.push((ball.invert()?.translate(&minus_one), c * pow_p(p, -v)));
    }
    LocallyConstantFn::from_terms(p, pieces)
}

/// The real symbol `g_q(x) = h(q/(x+1))·|x+1|⁻¹` of a radial test function;
/// `q = 1` gives `g`.
#[derive(Debug, Clone)]
pub struct RealSymbol {
    h: RadialTestFn,
    q: f64,
    y_min: f64,
    y_max: f64,
}

impl RealSymbol {
    pub fn eval(&self, x: f64) -> f64 {
        let d = x + 1.0;
        if d == 0.0 {
            return 0.0;
        }
        self.h.eval(self.q / d) / d.abs()
    }

    /// The two intervals `−1 ± |q|·[e^{−y_max}, e^{−y_min}]` carrying the support.
    pub fn support(&self) -> [(f64, f64); 2] {
        let lo = self.q.abs() * (-self.y_max).exp();
        let hi = self.q.abs() * (-self.y_min).exp();
        [(-1.0 - hi, -1.0 - lo), (-1.0 + lo, -1.0 + hi)]
    }

    pub fn at_zero(&self) -> f64 {
        self.eval(0.0)
    }

    /// `−(1/2)·∫_reg g(x)/|x| dx − (γ + log 2π)·g(0)`, the limit of
    /// `∫_{|u|≤R} ĝ(u) log|u| du` as `R → ∞`; the regularization subtracts
    /// `g(0)` on `|x| < 1`.
    pub fn log_moment(&self, tol: f64) -> Result<f64> {
        use crate::special::{EULER_GAMMA, LOG_TWO_PI};
        let g0 = self.at_zero();
        let [(a1, b1), (a2, b2)] = self.support();
        let mut breaks = vec![a1, b1, a2, b2, a1.min(-1.0), b2.max(1.0), -1.0, 0.0, 1.0];
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let reg = |x: f64| {
            if x == 0.0 {
                return 0.0;
            }
            let sub = if x.abs() < 1.0 { g0 } else { 0.0 };
            (self.eval(x) - sub) / x.abs()
        };
        let total = crate::quad::integrate_with_breaks(reg, &breaks, tol)?.value;
        Ok(-0.5 * total - (EULER_GAMMA + LOG_TWO_PI) * g0)
    }
}

/// Real symbol of `h`, with `q = 1`.
pub fn symbol_g_real(h: &RadialTestFn) -> Result<RealSymbol> {
    symbol_g_real_twisted(h, 1.0)
}

pub(crate) fn symbol_g_real_twisted(h: &RadialTestFn, q: f64) -> Result<RealSymbol> {
    let (y_min, y_max) = h.log_support().ok_or_else(|| {
        Error::Domain(format!("{} is not compactly supported in R^*: its support reaches module 0 or infinity", h.describe()))
    })?;
    Ok(RealSymbol { h: h.clone(), q, y_min, y_max })
}
