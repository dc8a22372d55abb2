//! Places of ℚ, exact p-adic arithmetic, additive characters, Haar measures,
//! p-adic Fourier transforms and Tate's local zeta integrals.
//!
//! The uniformizer at a finite place is fixed to be `p` itself.

pub mod ball;
pub mod cyclotomic;
pub mod fourier;
pub mod lcf;
pub mod loglinear;
pub mod padic;
pub mod rational;
mod zeta_integral;

pub use ball::PAdicBall;
pub use cyclotomic::Cyclotomic;
pub use fourier::{additive_character, padic_fourier, TwistedBallSum, TwistedTerm};
pub use lcf::LocallyConstantFn;
pub use loglinear::LogLinearNumber;
pub use padic::PAdicNumber;
pub use zeta_integral::{homogeneous_delta_prime, local_zeta_integral, local_zeta_integral_of, ShellSum};

use crate::error::{Error, Result};
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A completion of ℚ (or the complex place, used for local constants only).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Place {
    Real,
    Complex,
    Finite(u64),
}

impl Place {
    /// Finite place, validating primality.
    pub fn finite(p: u64) -> Result<Self> {
        if rational::is_prime(p) {
            Ok(Place::Finite(p))
        } else {
            Err(Error::InvalidInput(format!("{p} is not prime")))
        }
    }

    /// Residue field cardinality `q_v` (None at archimedean places).
    pub fn residue_cardinality(&self) -> Option<u64> {
        match self {
            Place::Finite(p) => Some(*p),
            _ => None,
        }
    }

    /// Exponent relating the module to the usual absolute value.
    pub fn module_exponent(&self) -> u32 {
        match self {
            Place::Complex => 2,
            _ => 1,
        }
    }

    pub fn is_archimedean(&self) -> bool {
        !matches!(self, Place::Finite(_))
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "real"),
            Place::Complex => write!(f, "complex"),
            Place::Finite(p) => write!(f, "p={p}"),
        }
    }
}

/// An element of a completion.
#[derive(Debug, Clone)]
pub enum FieldElement {
    Real(f64),
    Complex(Complex64),
    Rational(BigRational),
    PAdic(PAdicNumber),
}

/// Value of a module: exact at finite places.
#[derive(Debug, Clone, PartialEq)]
pub enum ModuleValue {
    Exact(BigRational),
    Float(f64),
}

impl ModuleValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            ModuleValue::Exact(r) => rational::to_f64(r),
            ModuleValue::Float(x) => *x,
        }
    }
}

/// The module `|x|_v`: `|x|` at the real place, `z z̄` at the complex place
/// and `p^{−v_p(x)}` at a finite place.
pub fn module(place: Place, x: &FieldElement) -> Result<ModuleValue> {
    match (place, x) {
        (Place::Real, FieldElement::Real(v)) => Ok(ModuleValue::Float(v.abs())),
        (Place::Real, FieldElement::Rational(r)) => Ok(ModuleValue::Float(rational::to_f64(r).abs())),
        (Place::Complex, FieldElement::Complex(z)) => Ok(ModuleValue::Float(z.norm_sqr())),
        (Place::Complex, FieldElement::Real(v)) => Ok(ModuleValue::Float(v * v)),
        (Place::Finite(p), FieldElement::Rational(r)) => Ok(ModuleValue::Exact(rational::module_exact(r, p))),
        (Place::Finite(p), FieldElement::PAdic(a)) => {
            if a.prime() != p {
                return Err(Error::InvalidInput(format!("element of Q_{} used at place p={p}", a.prime())));
            }
            Ok(ModuleValue::Exact(a.module()))
        }
        (place, x) => Err(Error::InvalidInput(format!("{x:?} is not an element of the completion at {place}"))),
    }
}

/// Normalization of the multiplicative Haar measure at a place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HaarNormalization {
    /// The units `ℤ_p^*` have mass 1.
    UnitMassOnUnits,
    /// Each shell `{|u| = p^m}` has mass `log p`, so `{|u| ∈ [1, Λ]}` has mass ≈ `log Λ`.
    LogScaleModulated,
}

impl HaarNormalization {
    /// Mass of one shell at the prime `p`.
    pub fn shell_mass(&self, p: u64) -> LogLinearNumber {
        match self {
            HaarNormalization::UnitMassOnUnits => LogLinearNumber::rational(rational::int(1)),
            HaarNormalization::LogScaleModulated => LogLinearNumber::log_prime(p),
        }
    }

    /// Multiplicative mass `μ*(B)` of a ball avoiding 0: its share of its shell
    /// times the shell mass.
    pub fn ball_mass(&self, ball: &PAdicBall) -> Result<LogLinearNumber> {
        let p = ball.prime();
        let v = ball.valuation().ok_or_else(|| Error::Domain(format!("ball {ball:?} contains 0 and has infinite multiplicative mass")))?;
        let share = rational::pow_p(p, v - ball.radius_exponent() + 1) / rational::int(p as i64 - 1);
        Ok(self.shell_mass(p).scale(&share))
    }

    /// Mass of `{u : |u| ∈ [p^a, p^b]}` (`a ≤ b`), exact.
    pub fn annulus_mass(&self, p: u64, a: i64, b: i64) -> LogLinearNumber {
        if b < a {
            return LogLinearNumber::zero();
        }
        self.shell_mass(p).scale(&rational::int(b - a + 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rational::{frac, int};

    #[test]
    fn module_examples() {
        assert_eq!(module(Place::Finite(2), &FieldElement::Rational(frac(3, 4))).unwrap(), ModuleValue::Exact(int(4)));
        assert_eq!(module(Place::Real, &FieldElement::Real(-2.5)).unwrap(), ModuleValue::Float(2.5));
        assert_eq!(module(Place::Complex, &FieldElement::Complex(Complex64::new(1.0, 1.0))).unwrap().to_f64(), 2.0);
        assert_eq!(module(Place::Finite(3), &FieldElement::Rational(int(0))).unwrap(), ModuleValue::Exact(int(0)));
        assert!(Place::finite(9).is_err());
    }

    #[test]
    fn shell_measure_consistency() {
        for p in [2u64, 3, 5, 7] {
            for n in 0..6 {
                let m = HaarNormalization::LogScaleModulated.annulus_mass(p, 0, n);
                assert_eq!(m, LogLinearNumber::log_prime(p).scale(&int(n + 1)));
            }
            // The sub-balls of the units add up to the unit mass.
            let total: LogLinearNumber = LocallyConstantFn::units(p)
                .unwrap()
                .refined(2)
                .iter()
                .map(|(b, _)| HaarNormalization::UnitMassOnUnits.ball_mass(b).unwrap())
                .sum();
            assert_eq!(total, LogLinearNumber::rational(int(1)));
        }
    }

    #[test]
    fn multiplicativity_of_module() {
        for (a, b) in [(frac(6, 5), frac(10, 9)), (frac(-8, 3), frac(3, 16))] {
            for p in [2u64, 3, 5] {
                let prod = rational::module_exact(&(&a * &b), p);
                assert_eq!(prod, rational::module_exact(&a, p) * rational::module_exact(&b, p));
            }
        }
    }
}
