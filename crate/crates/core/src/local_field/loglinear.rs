//! Exact numbers of the form `r₀ + Σ rᵢ log pᵢ + r_γ γ + r_π log 2π`.

use super::rational::{self, factorize};
use crate::error::{Error, Result};
use crate::quad::compensated_sum;
use crate::special::{EULER_GAMMA, LOG_TWO_PI};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

/// A rational linear combination of `1`, `log p` (p prime), `γ` and `log 2π`.
///
/// Equality is exact: the representation is canonical (zero coefficients are
/// dropped and composite logarithms are split into prime logarithms).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LogLinearNumber {
    constant: BigRational,
    logs: BTreeMap<u64, BigRational>,
    euler_gamma: BigRational,
    log_two_pi: BigRational,
}

impl LogLinearNumber {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn rational(r: BigRational) -> Self {
        LogLinearNumber { constant: r, ..Self::default() }
    }

    /// `coef · log n` for an integer `n ≥ 1`, split over the primes of `n`.
    pub fn log(n: u64, coef: BigRational) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("log of 0".into()));
        }
        let mut out = Self::zero();
        for (p, e) in factorize(n) {
            out.add_log(p, coef.clone() * rational::int(e as i64));
        }
        Ok(out)
    }

    /// `log p` for a prime `p`.
    pub fn log_prime(p: u64) -> Self {
        let mut out = Self::zero();
        out.add_log(p, BigRational::one());
        out
    }

    pub fn euler_gamma() -> Self {
        LogLinearNumber { euler_gamma: BigRational::one(), ..Self::default() }
    }

    pub fn log_two_pi() -> Self {
        LogLinearNumber { log_two_pi: BigRational::one(), ..Self::default() }
    }

    fn add_log(&mut self, p: u64, coef: BigRational) {
        let entry = self.logs.entry(p).or_insert_with(BigRational::zero);
        *entry += coef;
        if entry.is_zero() {
            self.logs.remove(&p);
        }
    }

    pub fn constant(&self) -> &BigRational {
        &self.constant
    }

    /// Coefficient of `log p` (zero if absent).
    pub fn log_coefficient(&self, p: u64) -> BigRational {
        self.logs.get(&p).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn euler_gamma_coefficient(&self) -> &BigRational {
        &self.euler_gamma
    }

    pub fn log_two_pi_coefficient(&self) -> &BigRational {
        &self.log_two_pi
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.logs.is_empty() && self.euler_gamma.is_zero() && self.log_two_pi.is_zero()
    }

    /// Multiplies every coefficient by `r`.
    pub fn scale(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        LogLinearNumber {
            constant: &self.constant * r,
            logs: self.logs.iter().map(|(p, c)| (*p, c * r)).collect(),
            euler_gamma: &self.euler_gamma * r,
            log_two_pi: &self.log_two_pi * r,
        }
    }

    /// Float value, summing the individual term evaluations with compensation.
    pub fn to_f64(&self) -> f64 {
        let mut terms = vec![rational::to_f64(&self.constant)];
        for (p, c) in &self.logs {
            terms.push(rational::to_f64(c) * (*p as f64).ln());
        }
        terms.push(rational::to_f64(&self.euler_gamma) * EULER_GAMMA);
        terms.push(rational::to_f64(&self.log_two_pi) * LOG_TWO_PI);
        compensated_sum(terms)
    }

    /// Symbolic rendering such as `1/2*log(2) - log(3) + euler_gamma`.
    pub fn render(&self) -> String {
        let mut parts: Vec<(BigRational, String)> = Vec::new();
        if !self.constant.is_zero() {
            parts.push((self.constant.clone(), String::new()));
        }
        for (p, c) in &self.logs {
            parts.push((c.clone(), format!("log({p})")));
        }
        if !self.euler_gamma.is_zero() {
            parts.push((self.euler_gamma.clone(), "euler_gamma".into()));
        }
        if !self.log_two_pi.is_zero() {
            parts.push((self.log_two_pi.clone(), "log(2*pi)".into()));
        }
        if parts.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (c, sym)) in parts.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let coef = if mag.is_integer() { mag.numer().to_string() } else { format!("{}/{}", mag.numer(), mag.denom()) };
            if sym.is_empty() {
                out.push_str(&coef);
            } else if mag == BigRational::one() {
                out.push_str(sym);
            } else {
                out.push_str(&format!("{coef}*{sym}"));
            }
        }
        out
    }
}

impl serde::Serialize for LogLinearNumber {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("LogLinearNumber", 2)?;
        st.serialize_field("symbolic", &self.render())?;
        st.serialize_field("value", &self.to_f64())?;
        st.end()
    }
}

impl fmt::Debug for LogLinearNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Display for LogLinearNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl AddAssign<&LogLinearNumber> for LogLinearNumber {
    fn add_assign(&mut self, rhs: &LogLinearNumber) {
        self.constant += &rhs.constant;
        for (p, c) in &rhs.logs {
            self.add_log(*p, c.clone());
        }
        self.euler_gamma += &rhs.euler_gamma;
        self.log_two_pi += &rhs.log_two_pi;
    }
}

impl SubAssign<&LogLinearNumber> for LogLinearNumber {
    fn sub_assign(&mut self, rhs: &LogLinearNumber) {
        *self += &(-rhs);
    }
}

impl Add<&LogLinearNumber> for &LogLinearNumber {
    type Output = LogLinearNumber;
    fn add(self, rhs: &LogLinearNumber) -> LogLinearNumber {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LogLinearNumber {
    type Output = LogLinearNumber;
    fn add(mut self, rhs: LogLinearNumber) -> LogLinearNumber {
        self += &rhs;
        self
    }
}

impl Sub<&LogLinearNumber> for &LogLinearNumber {
    type Output = LogLinearNumber;
    fn sub(self, rhs: &LogLinearNumber) -> LogLinearNumber {
        self + &(-rhs)
    }
}

impl Sub for LogLinearNumber {
    type Output = LogLinearNumber;
    fn sub(self, rhs: LogLinearNumber) -> LogLinearNumber {
        &self - &rhs
    }
}

impl Neg for &LogLinearNumber {
    type Output = LogLinearNumber;
    fn neg(self) -> LogLinearNumber {
        self.scale(&-BigRational::one())
    }
}

impl Neg for LogLinearNumber {
    type Output = LogLinearNumber;
    fn neg(self) -> LogLinearNumber {
        -&self
    }
}

impl Mul<&BigRational> for &LogLinearNumber {
    type Output = LogLinearNumber;
    fn mul(self, rhs: &BigRational) -> LogLinearNumber {
        self.scale(rhs)
    }
}

impl std::iter::Sum for LogLinearNumber {
    fn sum<I: Iterator<Item = LogLinearNumber>>(iter: I) -> Self {
        iter.fold(LogLinearNumber::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_field::rational::{frac, int as q};
    use proptest::prelude::*;

    #[test]
    fn composite_logs_split_into_primes() {
        let a = LogLinearNumber::log(12, q(1)).unwrap();
        let b = LogLinearNumber::log_prime(2).scale(&q(2)) + LogLinearNumber::log_prime(3);
        assert_eq!(a, b);
        assert!((a.to_f64() - 12f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn rendering() {
        let x = LogLinearNumber::log_prime(2).scale(&frac(1, 2));
        assert_eq!(x.render(), "1/2*log(2)");
        let y = &x - &LogLinearNumber::log_prime(3) + LogLinearNumber::euler_gamma();
        assert_eq!(y.render(), "1/2*log(2) - log(3) + euler_gamma");
        assert_eq!(LogLinearNumber::zero().render(), "0");
        assert_eq!((&x - &x).render(), "0");
        assert!((&x - &x).is_zero());
    }

    proptest! {
        #[test]
        fn group_laws(a in -50i64..50, b in 1i64..20, c in -50i64..50, pi in 0usize..4) {
            let p = [2u64, 3, 5, 7][pi];
            let x = LogLinearNumber::log_prime(p).scale(&frac(a, b)) + LogLinearNumber::rational(frac(c, b));
            let y = LogLinearNumber::log_prime(2).scale(&frac(c, 7));
            prop_assert_eq!(&(&x + &y) - &y, x.clone());
            prop_assert_eq!(&x + &y, &y + &x);
            prop_assert!(((&x + &y).to_f64() - (x.to_f64() + y.to_f64())).abs() < 1e-12);
        }
    }
}
