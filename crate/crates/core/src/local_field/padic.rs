//! Finite-precision p-adic numbers with explicit precision tracking.

use super::rational::{self, pow_p};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::fmt;

/// Default number of significant p-adic digits.
pub const DEFAULT_PRECISION: u32 = 32;

/// Fewest significant digits an arithmetic result may keep.
pub const MIN_SIGNIFICANT_DIGITS: u32 = 4;

/// A p-adic number `p^valuation · unit` with the unit known modulo `p^precision`.
///
/// Units are stored in a `u128`; the precision is capped so that `p^precision`
/// stays below `2^64` and products of units never overflow.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PAdicNumber {
    p: u64,
    is_zero: bool,
    valuation: i64,
    unit: u128,
    precision: u32,
}

/// Largest precision representable for the prime `p`.
pub fn max_precision(p: u64) -> u32 {
    let mut m = 0u32;
    let mut acc: u128 = 1;
    while acc * (p as u128) < (1u128 << 64) {
        acc *= p as u128;
        m += 1;
    }
    m
}

fn pow_u128(p: u64, e: u32) -> u128 {
    (p as u128).pow(e)
}

fn inverse_mod(a: u128, m: u128) -> u128 {
    let e = (a as i128).extended_gcd(&(m as i128));
    e.x.rem_euclid(m as i128) as u128
}

impl PAdicNumber {
    fn check_prime(p: u64) -> Result<()> {
        if !rational::is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        Ok(())
    }

    /// Exact zero at the prime `p`.
    pub fn zero(p: u64) -> Result<Self> {
        Self::check_prime(p)?;
        Ok(PAdicNumber { p, is_zero: true, valuation: 0, unit: 0, precision: max_precision(p) })
    }

    /// Converts a rational to `precision` significant digits (capped at the
    /// representable maximum).
    pub fn from_rational(x: &BigRational, p: u64, precision: u32) -> Result<Self> {
        Self::check_prime(p)?;
        if precision < MIN_SIGNIFICANT_DIGITS {
            return Err(Error::Precision(format!(
                "requested precision {precision} is below the minimum of {MIN_SIGNIFICANT_DIGITS} digits"
            )));
        }
        let precision = precision.min(max_precision(p));
        let Some(v) = rational::valuation(x, p) else {
            return Self::zero(p);
        };
        let unit_part = x / pow_p(p, v);
        let modulus = BigInt::from(pow_u128(p, precision));
        let inv = rational::mod_inverse(unit_part.denom(), &modulus);
        let u = (unit_part.numer() * inv).mod_floor(&modulus);
        Ok(PAdicNumber { p, is_zero: false, valuation: v, unit: u.to_u128().expect("unit below 2^64"), precision })
    }

    /// Integer convenience constructor with the default precision.
    pub fn from_i64(n: i64, p: u64) -> Result<Self> {
        Self::from_rational(&rational::int(n), p, DEFAULT_PRECISION)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }
    pub fn is_zero(&self) -> bool {
        self.is_zero
    }
    /// Valuation; `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero).then_some(self.valuation)
    }
    /// Unit part modulo `p^precision` (0 for zero).
    pub fn unit(&self) -> u128 {
        self.unit
    }
    pub fn precision(&self) -> u32 {
        self.precision
    }

    fn modulus(&self) -> u128 {
        pow_u128(self.p, self.precision)
    }

    fn same_prime(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::InvalidInput(format!("mixing primes {} and {}", self.p, other.p)));
        }
        Ok(())
    }

    /// Exact module `|x|_p = p^{-v}` (0 for zero).
    pub fn module(&self) -> BigRational {
        if self.is_zero {
            BigRational::zero()
        } else {
            pow_p(self.p, -self.valuation)
        }
    }

    /// Product; precision is the smaller of the two.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        if self.is_zero || other.is_zero {
            return Self::zero(self.p);
        }
        let precision = self.precision.min(other.precision);
        let m = pow_u128(self.p, precision);
        Ok(PAdicNumber {
            p: self.p,
            is_zero: false,
            valuation: self.valuation + other.valuation,
            unit: (self.unit % m) * (other.unit % m) % m,
            precision,
        })
    }

    /// Multiplicative inverse; precision is preserved.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero {
            return Err(Error::Domain("inverse of p-adic zero".into()));
        }
        Ok(PAdicNumber { unit: inverse_mod(self.unit, self.modulus()), valuation: -self.valuation, ..self.clone() })
    }

    /// Additive inverse.
    pub fn neg(&self) -> Self {
        if self.is_zero {
            return self.clone();
        }
        PAdicNumber { unit: (self.modulus() - self.unit) % self.modulus(), ..self.clone() }
    }

    /// Sum, tracking the loss of significant digits under cancellation.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        if self.is_zero {
            return Ok(other.clone());
        }
        if other.is_zero {
            return Ok(self.clone());
        }
        let (lo, hi) = if self.valuation <= other.valuation { (self, other) } else { (other, self) };
        let absolute = (lo.valuation + lo.precision as i64).min(hi.valuation + hi.precision as i64);
        let digits = (absolute - lo.valuation) as u32;
        let m = pow_u128(self.p, digits);
        let gap = (hi.valuation - lo.valuation) as u32;
        let shifted = if gap >= digits { 0 } else { (hi.unit % m) * pow_u128(self.p, gap) % m };
        let s = (lo.unit % m + shifted) % m;
        if s == 0 {
            return Err(Error::Precision(format!("sum cancels all {digits} known digits; valuation indeterminate")));
        }
        let mut t = 0u32;
        let mut u = s;
        while u.is_multiple_of(self.p as u128) {
            u /= self.p as u128;
            t += 1;
        }
        let precision = digits - t;
        if precision < MIN_SIGNIFICANT_DIGITS {
            return Err(Error::Precision(format!("sum keeps only {precision} significant digits (minimum {MIN_SIGNIFICANT_DIGITS})")));
        }
        Ok(PAdicNumber { p: self.p, is_zero: false, valuation: lo.valuation + t as i64, unit: u, precision })
    }

    /// Difference.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Quotient.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    /// The representative `p^v · unit` as a rational (exact when `x` came from
    /// an integer below `p^precision`).
    pub fn to_rational(&self) -> BigRational {
        if self.is_zero {
            return BigRational::zero();
        }
        BigRational::from_integer(BigInt::from(self.unit)) * pow_p(self.p, self.valuation)
    }

    /// p-adic fractional part `{x}_p`.
    pub fn fractional_part(&self) -> Result<BigRational> {
        if self.is_zero || self.valuation >= 0 {
            return Ok(BigRational::zero());
        }
        let need = (-self.valuation) as u32;
        if need > self.precision {
            return Err(Error::Precision(format!("fractional part needs {need} digits, only {} known", self.precision)));
        }
        Ok(rational::fractional_part(&self.to_rational(), self.p))
    }

    /// Agreement of two numbers to their common precision.
    pub fn approx_eq(&self, other: &Self) -> bool {
        if self.p != other.p || self.is_zero != other.is_zero {
            return false;
        }
        if self.is_zero {
            return true;
        }
        let m = pow_u128(self.p, self.precision.min(other.precision));
        self.valuation == other.valuation && self.unit % m == other.unit % m
    }
}

impl fmt::Debug for PAdicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero {
            write!(f, "0 (in Q_{})", self.p)
        } else {
            write!(f, "{}^{} * {} + O({}^{})", self.p, self.valuation, self.unit, self.p, self.valuation + self.precision as i64)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_field::rational::{frac, int};
    use proptest::prelude::*;

    fn pa(n: i64, d: i64, p: u64) -> PAdicNumber {
        PAdicNumber::from_rational(&frac(n, d), p, DEFAULT_PRECISION).unwrap()
    }

    #[test]
    fn basic_valuation_and_module() {
        let x = pa(3, 4, 2);
        assert_eq!(x.valuation(), Some(-2));
        assert_eq!(x.module(), int(4));
        assert_eq!(x.precision(), 32);
        assert_eq!(max_precision(7), 22);
    }

    #[test]
    fn inverse_round_trip() {
        let x = pa(10, 7, 5);
        let y = x.inv().unwrap();
        assert_eq!(y.precision(), x.precision());
        let one = x.mul(&y).unwrap();
        assert!(one.approx_eq(&pa(1, 1, 5)));
    }

    #[test]
    fn cancellation_loses_digits_and_errors() {
        let x = pa(1, 1, 2);
        let y = PAdicNumber::from_rational(&(int(1) + rational::pow_p(2, 30)), 2, 32).unwrap();
        let err = x.sub(&y).unwrap_err();
        assert!(matches!(err, Error::Precision(_)));
        let z = PAdicNumber::from_rational(&(int(1) + rational::pow_p(2, 20)), 2, 32).unwrap();
        let d = z.sub(&x).unwrap();
        assert_eq!(d.valuation(), Some(20));
        assert_eq!(d.precision(), 12);
    }

    #[test]
    fn fractional_part_matches_rational() {
        assert_eq!(pa(7, 12, 2).fractional_part().unwrap(), rational::fractional_part(&frac(7, 12), 2));
        assert_eq!(pa(5, 1, 3).fractional_part().unwrap(), int(0));
    }

    fn small_rational() -> impl Strategy<Value = (i64, i64)> {
        (-500i64..500, 1i64..60).prop_filter("nonzero", |(n, _)| *n != 0)
    }

    proptest! {
        #[test]
        fn ring_axioms_and_module(a in small_rational(), b in small_rational(), c in small_rational(),
                                  pi in 0usize..4) {
            let p = [2u64, 3, 5, 7][pi];
            let (x, y, z) = (pa(a.0, a.1, p), pa(b.0, b.1, p), pa(c.0, c.1, p));
            let xy = x.mul(&y).unwrap();
            // multiplicativity of the module
            prop_assert_eq!(xy.module(), x.module() * y.module());
            // associativity of multiplication
            let l = xy.mul(&z).unwrap();
            let r = x.mul(&y.mul(&z).unwrap()).unwrap();
            prop_assert!(l.approx_eq(&r));
            // agreement with exact rational arithmetic, whenever precision survives
            let exact = frac(a.0, a.1) + frac(b.0, b.1);
            if let Ok(s) = x.add(&y) {
                let e = PAdicNumber::from_rational(&exact, p, 32).unwrap();
                prop_assert!(s.approx_eq(&e));
                // ultrametric inequality
                let m = if x.module() > y.module() { x.module() } else { y.module() };
                prop_assert!(s.module() <= m);
                // distributivity
                if let (Ok(lhs), Ok(xz), Ok(yz)) = (s.mul(&z), Ok::<_, Error>(x.mul(&z).unwrap()), Ok::<_, Error>(y.mul(&z).unwrap())) {
                    if let Ok(rhs) = xz.add(&yz) {
                        prop_assert!(lhs.approx_eq(&rhs));
                    }
                }
            }
        }
    }
}
