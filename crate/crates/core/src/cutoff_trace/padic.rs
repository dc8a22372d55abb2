use super::{symbol_g_padic, TraceReport};
use crate::error::{Error, Result};
use crate::local_field::rational::{self, int, pow_p};
use crate::local_field::{additive_character, Cyclotomic, HaarNormalization, LocallyConstantFn, LogLinearNumber, TwistedBallSum};
use crate::principal_value::{pv_finite, PVValue};
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Masses `a_j = ∫_{|u| = p^j} ĝ(u) du` of a transform on the shells of ℚ_p.
/// Shells `j ≤ tail_start` carry `tail_coeff·p^j·(1 − 1/p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellMasses {
    pub p: u64,
    pub explicit: BTreeMap<i64, BigRational>,
    pub tail_start: i64,
    pub tail_coeff: BigRational,
}

/// `Σ_{j ≤ m} j p^j = p^m [m p/(p−1) − p/(p−1)²]`.
fn weighted_geometric(p: u64, m: i64) -> BigRational {
    let pr = int(p as i64);
    let pm1 = int(p as i64 - 1);
    pow_p(p, m) * (int(m) * &pr / &pm1 - &pr / (&pm1 * &pm1))
}

fn one_minus_inv(p: u64) -> BigRational {
    BigRational::one() - pow_p(p, -1)
}

impl ShellMasses {
    pub fn mass(&self, j: i64) -> BigRational {
        if j <= self.tail_start {
            return &self.tail_coeff * pow_p(self.p, j) * one_minus_inv(self.p);
        }
        self.explicit.get(&j).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Largest shell index with nonzero mass.
    pub fn top(&self) -> Option<i64> {
        let explicit = self.explicit.iter().rev().find(|(_, m)| !m.is_zero()).map(|(j, _)| *j);
        let tail = (!self.tail_coeff.is_zero()).then_some(self.tail_start);
        explicit.max(tail)
    }

    /// `∫ ĝ = Σ_j a_j`.
    pub fn total(&self) -> BigRational {
        let explicit: BigRational = self.explicit.values().sum();
        explicit + &self.tail_coeff * pow_p(self.p, self.tail_start)
    }

    /// `Σ_j j·a_j`, so that `∫ ĝ(u) log|u| du = log p · Σ_j j a_j`.
    pub fn first_moment(&self) -> BigRational {
        let explicit: BigRational = self.explicit.iter().map(|(j, m)| int(*j) * m).sum();
        explicit + &self.tail_coeff * one_minus_inv(self.p) * weighted_geometric(self.p, self.tail_start)
    }

    /// `Σ_{j ≤ 2n} a_j (2n + 1 − j)`: the coefficient of `log p` in the trace
    /// at `Λ = p^n`.
    pub fn truncated_weight(&self, n: i64) -> BigRational {
        let top = 2 * n;
        let c = int(2 * n + 1);
        let explicit: BigRational = self.explicit.range(..=top).map(|(j, m)| m * (&c - int(*j))).sum();
        let m = self.tail_start.min(top);
        let tail = &self.tail_coeff * (&c * pow_p(self.p, m) - one_minus_inv(self.p) * weighted_geometric(self.p, m));
        explicit + tail
    }
}

fn valuation_or_infinite(x: &BigRational, p: u64) -> i64 {
    rational::valuation(x, p).unwrap_or(i64::MAX / 4)
}

/// Shell masses of a finite sum of twisted ball indicators, by
/// `∫_{e + p^t ℤ_p} α₀(b u) du = α₀(b e)·p^{−t}·[|b| p^{−t} ≤ 1]`.
pub fn shell_masses(ghat: &TwistedBallSum) -> Result<ShellMasses> {
    let p = ghat.prime();
    let mut tail_start = i64::MAX;
    for t in ghat.terms() {
        let r = t.ball.radius_exponent();
        let vb = valuation_or_infinite(&t.twist, p);
        let bound =
            if t.ball.contains_zero() { -(r.max(-vb)) } else { -rational::valuation(t.ball.center(), p).expect("center avoids 0") - 1 };
        tail_start = tail_start.min(bound);
    }
    if tail_start == i64::MAX {
        return Ok(ShellMasses { p, explicit: BTreeMap::new(), tail_start: 0, tail_coeff: BigRational::zero() });
    }
    let mut explicit: BTreeMap<i64, Cyclotomic> = BTreeMap::new();
    let mut tail = Cyclotomic::zero(p);
    let mut add = |j: i64, c: Cyclotomic| {
        let slot = explicit.entry(j).or_insert_with(|| Cyclotomic::zero(p));
        *slot = slot.add(&c);
    };
    for t in ghat.terms() {
        let r = t.ball.radius_exponent();
        let vb = valuation_or_infinite(&t.twist, p);
        if t.ball.contains_zero() {
            tail = tail.add(&t.coeff);
            for k in r..=(-tail_start - 1) {
                let mut m = BigRational::zero();
                if vb >= -k {
                    m += pow_p(p, -k);
                }
                if vb >= -k - 1 {
                    m -= pow_p(p, -k - 1);
                }
                if !m.is_zero() {
                    add(-k, t.coeff.scale(&m));
                }
            }
        } else if vb >= -r {
            let e = t.ball.center();
            let j = -rational::valuation(e, p).expect("center avoids 0");
            add(j, t.coeff.mul(&additive_character(p, &(&t.twist * e))).scale(&pow_p(p, -r)));
        }
    }
    let as_rational = |c: &Cyclotomic, what: String| {
        c.as_rational().ok_or_else(|| Error::Domain(format!("{what} is not rational: the transform is not a shell-radial sum")))
    };
    let mut masses = BTreeMap::new();
    for (j, c) in &explicit {
        let m = as_rational(c, format!("shell mass at |u| = {p}^{j}"))?;
        if !m.is_zero() {
            masses.insert(*j, m);
        }
    }
    Ok(ShellMasses { p, explicit: masses, tail_start, tail_coeff: as_rational(&tail, "tail mass".into())? })
}

/// Shell masses of `ĝ` for the symbol of `h`.
pub(crate) fn symbol_shells(h: &LocallyConstantFn) -> Result<ShellMasses> {
    let g = symbol_g_padic(h)?;
    shell_masses(&TwistedBallSum::from_locally_constant(&g).fourier())
}

/// Exact cutoff trace on ℚ_p at `Λ = p^n`:
/// `Σ_{j ≤ 2n} a_j (2n + 1 − j) log p`.
pub fn trace_padic(p: u64, h: &LocallyConstantFn, n: i64) -> Result<TraceReport> {
    if h.prime() != p {
        return Err(Error::InvalidInput(format!("function over Q_{} used at p = {p}", h.prime())));
    }
    if n < 0 {
        return Err(Error::InvalidInput(format!("the cutoff exponent must be nonnegative, got {n}")));
    }
    let shells = symbol_shells(h)?;
    let log_p = LogLinearNumber::log_prime(p);
    let computed = log_p.scale(&shells.truncated_weight(n));
    let h1 = h.eval(&BigRational::one());
    let two_log_prime = log_p.scale(&int(2 * n + 1));
    let pv = pv_finite(p, &h.compose_inverse()?, HaarNormalization::LogScaleModulated)?;
    let pv = pv.value.exact().cloned().expect("finite principal values are exact");
    let predicted = two_log_prime.scale(&h1) + pv;
    let residual = &computed - &predicted;
    let n0 = shells.top().map(|t| (t.max(0) + 1) / 2).unwrap_or(0);
    Ok(TraceReport {
        place: format!("Q_{p}"),
        lambda: (p as f64).powi(n as i32),
        two_log_prime_lambda: PVValue::Exact(two_log_prime),
        exact: residual.is_zero(),
        computed: PVValue::Exact(computed),
        predicted: PVValue::Exact(predicted),
        residual: PVValue::Exact(residual),
        n0: Some(n0),
        per_q: Vec::new(),
        q_tail_bound: None,
        identities: None,
        fundamental_domain: None,
    })
}
