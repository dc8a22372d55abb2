//! The reference functions `f₀(ν) = min(ν^{1/2}, ν^{−1/2})`,
//! `f₁ = 1/f₀ − f₀` and `f₂(ν) = ν^{1/2} f₀(ν)` on `ℝ₊^*`.

use crate::error::{Error, Result};

fn check(nu: f64) -> Result<()> {
    if nu > 0.0 && nu.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("reference functions need ν > 0, got {nu}")))
    }
}

pub fn f0(nu: f64) -> Result<f64> {
    check(nu)?;
    Ok(nu.sqrt().min(1.0 / nu.sqrt()))
}

pub fn f1(nu: f64) -> Result<f64> {
    let a = f0(nu)?;
    Ok(1.0 / a - a)
}

pub fn f2(nu: f64) -> Result<f64> {
    Ok(nu.sqrt() * f0(nu)?)
}

/// `(f₀(ν), f₁(ν), f₂(ν))`.
pub fn reference_f0_f1_f2(nu: f64) -> Result<(f64, f64, f64)> {
    Ok((f0(nu)?, f1(nu)?, f2(nu)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(reference_f0_f1_f2(1.0).unwrap(), (1.0, 0.0, 1.0));
        assert_eq!(reference_f0_f1_f2(4.0).unwrap(), (0.5, 1.5, 1.0));
        assert_eq!(reference_f0_f1_f2(0.25).unwrap(), (0.5, 1.5, 0.25));
        assert!(reference_f0_f1_f2(0.0).is_err());
        assert!(reference_f0_f1_f2(-1.0).is_err());
    }

    proptest! {
        #[test]
        fn symmetry(nu in 1e-6f64..1e6) {
            prop_assert!((f0(nu).unwrap() - f0(1.0 / nu).unwrap()).abs() < 1e-12);
            // f₂(ν) f₂(1/ν) = f₀(ν)² since ν^{1/2}ν^{−1/2} = 1.
            let lhs = f2(nu).unwrap() * f2(1.0 / nu).unwrap();
            prop_assert!((lhs - f0(nu).unwrap().powi(2)).abs() < 1e-12);
        }
    }
}
