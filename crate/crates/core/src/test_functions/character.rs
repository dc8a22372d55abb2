//! Finite-order characters of `ℤ_p^*`, stored as a phase table on
//! `(ℤ/p^f)^*` with `f` the conductor exponent.

use crate::error::{Error, Result};
use crate::local_field::rational;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;

/// Largest table size accepted.
const MAX_MODULUS: u64 = 1 << 22;

/// A character `χ: ℤ_p^* → μ_∞`, `χ(u) = exp(2πi·phase(u))`, extended by
/// zero to non-units.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteCharacter {
    p: u64,
    conductor: u32,
    /// Phase in `[0, 1)` for every residue of `ℤ/p^conductor` (0 on non-units).
    #[serde(skip)]
    phases: Vec<Rational64>,
}

fn pow(p: u64, e: u32) -> Result<u64> {
    p.checked_pow(e)
        .filter(|m| *m <= MAX_MODULUS)
        .ok_or_else(|| Error::InvalidInput(format!("modulus {p}^{e} is too large for a character table")))
}

fn frac_part(x: Rational64) -> Rational64 {
    x - x.floor()
}

impl FiniteCharacter {
    pub fn trivial(p: u64) -> Result<Self> {
        if !rational::is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        Ok(FiniteCharacter { p, conductor: 0, phases: vec![Rational64::zero()] })
    }

    /// The character of `(ℤ/p^level)^*` determined by the phases of a set of
    /// generators. The images are propagated over the group; inconsistent
    /// images or generators that do not generate are rejected.
    pub fn from_generator_images(p: u64, level: u32, generators: &[(u64, Rational64)]) -> Result<Self> {
        if !rational::is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        let m = pow(p, level)?;
        let mut table: Vec<Option<Rational64>> = vec![None; m as usize];
        let one = 1 % m;
        table[one as usize] = Some(Rational64::zero());
        let mut queue = VecDeque::from([one]);
        while let Some(x) = queue.pop_front() {
            let px = table[x as usize].expect("visited");
            for (g, ph) in generators {
                let g = g % m;
                if g % p == 0 {
                    return Err(Error::InvalidInput(format!("generator {g} is not a unit mod {p}")));
                }
                let y = ((x as u128 * g as u128) % m as u128) as u64;
                let py = frac_part(px + ph);
                match table[y as usize] {
                    None => {
                        table[y as usize] = Some(py);
                        queue.push_back(y);
                    }
                    Some(old) if old != py => {
                        return Err(Error::InvalidInput(format!(
                            "generator images are not a homomorphism: residue {y} gets phases {old} and {py}"
                        )))
                    }
                    _ => {}
                }
            }
        }
        let units = (0..m).filter(|x| x % p != 0).count();
        let reached = table.iter().filter(|t| t.is_some()).count();
        if reached != units.max(1) {
            return Err(Error::InvalidInput(format!("generators reach {reached} of the {units} units mod {p}^{level}")));
        }
        let phases: Vec<Rational64> = table.into_iter().map(|t| t.unwrap_or_else(Rational64::zero)).collect();
        Ok(Self::reduce(p, level, phases))
    }

    /// Lowers the table to the true conductor.
    fn reduce(p: u64, level: u32, phases: Vec<Rational64>) -> Self {
        let m = p.pow(level);
        let mut conductor = level;
        for f in 0..=level {
            let pf = p.pow(f);
            // Trivial on units ≡ 1 mod p^f (all units when f = 0).
            let trivial = (0..m).filter(|x| x % p != 0 && (f == 0 || x % pf == 1 % pf)).all(|x| phases[x as usize].is_zero());
            if trivial {
                conductor = f;
                break;
            }
        }
        let mc = p.pow(conductor);
        let reduced = (0..mc)
            .map(|r| {
                // Any lift of r to level m has the same phase.
                if r % p == 0 && mc > 1 {
                    Rational64::zero()
                } else {
                    let lift = if mc == 1 { 1 % m } else { r };
                    phases[lift as usize]
                }
            })
            .collect();
        FiniteCharacter { p, conductor, phases: reduced }
    }

    /// `χ(g^j) = exp(2πi·k·j/φ(p^level))` for the smallest primitive root `g`
    /// modulo `p^level` (odd `p`).
    pub fn primitive_root_power(p: u64, level: u32, k: i64) -> Result<Self> {
        if p == 2 {
            return Err(Error::InvalidInput("(ℤ/2^n)^* is not cyclic; use two_adic".into()));
        }
        if level == 0 {
            return Self::trivial(p);
        }
        let m = pow(p, level)?;
        let phi = (m / p * (p - 1)) as i64;
        let g = primitive_root(p)?;
        // g is a primitive root mod p; g or g + p is one mod p^level.
        let g = if level >= 2 && mod_pow(g, p - 1, p * p) == 1 { g + p } else { g };
        Self::from_generator_images(p, level, &[(g, frac_part(Rational64::new(k.rem_euclid(phi), phi)))])
    }

    /// The Legendre symbol modulo an odd prime.
    pub fn quadratic(p: u64) -> Result<Self> {
        if p == 2 {
            return Self::two_adic(2, 1, 0);
        }
        Self::primitive_root_power(p, 1, ((p - 1) / 2) as i64)
    }

    /// Characters of `ℤ_2^* = {±1} × (1 + 4ℤ_2)`: `χ(−1) = (−1)^sign`,
    /// `χ(5) = exp(2πi k / 2^{level−2})`.
    pub fn two_adic(level: u32, sign: u32, k: i64) -> Result<Self> {
        if level < 2 {
            return if sign.is_multiple_of(2) && k == 0 {
                Self::trivial(2)
            } else {
                Err(Error::InvalidInput("nontrivial 2-adic characters need level ≥ 2".into()))
            };
        }
        let order5 = 1i64 << (level - 2);
        let m = pow(2, level)?;
        let mut gens = vec![((m - 1) % m, Rational64::new((sign % 2) as i64, 2))];
        if level >= 3 {
            gens.push((5, frac_part(Rational64::new(k.rem_euclid(order5), order5))));
        } else if k.rem_euclid(order5) != 0 {
            return Err(Error::InvalidInput("5 is trivial mod 4".into()));
        }
        Self::from_generator_images(2, level, &gens)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn conductor_exponent(&self) -> u32 {
        self.conductor
    }

    pub fn is_trivial(&self) -> bool {
        self.conductor == 0
    }

    /// Multiplicative order.
    pub fn order(&self) -> i64 {
        self.phases.iter().fold(1i64, |acc, ph| acc.lcm(ph.denom()))
    }

    /// Phase of a residue `r` modulo any `p^n` with `n ≥ conductor` (None on non-units).
    pub fn phase_of_residue(&self, r: u64) -> Option<Rational64> {
        if r.is_multiple_of(self.p) {
            return None;
        }
        let mc = self.p.pow(self.conductor);
        Some(self.phases[(r % mc) as usize])
    }

    pub fn eval_residue(&self, r: u64) -> Complex64 {
        match self.phase_of_residue(r) {
            None => Complex64::new(0.0, 0.0),
            Some(ph) => Complex64::from_polar(1.0, 2.0 * PI * ph.to_f64().unwrap_or(0.0)),
        }
    }

    /// `χ(u)` for a rational `u`, zero unless `u` is a p-adic unit.
    pub fn eval(&self, u: &BigRational) -> Complex64 {
        if rational::valuation(u, self.p) != Some(0) {
            return Complex64::new(0.0, 0.0);
        }
        let mc = self.p.pow(self.conductor);
        if mc == 1 {
            return Complex64::new(1.0, 0.0);
        }
        let r = rational::reduce_mod(u, self.p, self.conductor as i64);
        debug_assert!(r.denom().is_one());
        let r = r.numer().to_u64().unwrap_or(0);
        self.eval_residue(r)
    }

    /// Pointwise product (same prime).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::InvalidInput("characters at different primes".into()));
        }
        let level = self.conductor.max(other.conductor);
        let m = pow(self.p, level)?;
        let phases = (0..m)
            .map(|r| match (self.phase_of_residue(r), other.phase_of_residue(r)) {
                (Some(a), Some(b)) => frac_part(a + b),
                _ => Rational64::zero(),
            })
            .collect();
        Ok(Self::reduce(self.p, level, phases))
    }
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

fn primitive_root(p: u64) -> Result<u64> {
    let factors = rational::factorize(p - 1);
    (2..p.max(3))
        .find(|g| factors.iter().all(|(q, _)| mod_pow(*g, (p - 1) / q, p) != 1))
        .or(if p == 2 || p == 3 { Some(p - 1) } else { None })
        .ok_or_else(|| Error::InvalidInput(format!("no primitive root found mod {p}")))
}

/// Character sums `Σ χ(u)` over the units mod `p^n` grouped by a key.
pub(crate) fn grouped_sums(chi: &FiniteCharacter, n: u32, key: impl Fn(u64) -> i64) -> Result<HashMap<i64, Complex64>> {
    let m = pow(chi.p, n)?;
    let mut out: HashMap<i64, Complex64> = HashMap::new();
    for r in (1..m).filter(|r| r % chi.p != 0) {
        *out.entry(key(r)).or_insert(Complex64::new(0.0, 0.0)) += chi.eval_residue(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_field::rational::frac;
    use proptest::prelude::*;

    #[test]
    fn conductors() {
        assert_eq!(FiniteCharacter::quadratic(3).unwrap().conductor_exponent(), 1);
        assert_eq!(FiniteCharacter::two_adic(2, 1, 0).unwrap().conductor_exponent(), 2);
        assert_eq!(FiniteCharacter::two_adic(3, 0, 1).unwrap().conductor_exponent(), 3);
        assert_eq!(FiniteCharacter::two_adic(5, 0, 2).unwrap().conductor_exponent(), 4);
        let quartic = FiniteCharacter::primitive_root_power(5, 1, 1).unwrap();
        assert_eq!((quartic.conductor_exponent(), quartic.order()), (1, 4));
        // A character of level 2 that factors through level 1.
        assert_eq!(FiniteCharacter::primitive_root_power(3, 2, 3).unwrap().conductor_exponent(), 1);
        assert_eq!(FiniteCharacter::primitive_root_power(3, 2, 1).unwrap().conductor_exponent(), 2);
        assert!(FiniteCharacter::trivial(7).unwrap().is_trivial());
    }

    #[test]
    fn legendre_values() {
        let chi = FiniteCharacter::quadratic(7).unwrap();
        for (r, s) in [(1, 1.0), (2, 1.0), (3, -1.0), (4, 1.0), (5, -1.0), (6, -1.0)] {
            assert!((chi.eval_residue(r) - Complex64::new(s, 0.0)).norm() < 1e-15);
        }
        assert_eq!(chi.eval(&frac(7, 2)), Complex64::new(0.0, 0.0));
        assert!((chi.eval(&frac(1, 2)) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn inconsistent_images_rejected() {
        assert!(FiniteCharacter::from_generator_images(5, 1, &[(2, Rational64::new(1, 3))]).is_err());
        assert!(FiniteCharacter::from_generator_images(7, 1, &[(2, Rational64::new(1, 3))]).is_err());
    }

    proptest! {
        #[test]
        fn multiplicative(k in 0i64..18, a in 1u64..10_000, b in 1u64..10_000) {
            let chi = FiniteCharacter::primitive_root_power(3, 3, k).unwrap();
            prop_assume!(a % 3 != 0 && b % 3 != 0);
            let lhs = chi.eval_residue(a * b);
            let rhs = chi.eval_residue(a) * chi.eval_residue(b);
            prop_assert!((lhs - rhs).norm() < 1e-12);
            prop_assert_eq!(chi.is_trivial(), k % 18 == 0);
        }

        #[test]
        fn two_adic_multiplicative(sign in 0u32..2, k in 0i64..8, a in 0u64..500, b in 0u64..500) {
            let chi = FiniteCharacter::two_adic(5, sign, k).unwrap();
            let (a, b) = (2 * a + 1, 2 * b + 1);
            prop_assert!((chi.eval_residue(a * b) - chi.eval_residue(a) * chi.eval_residue(b)).norm() < 1e-12);
        }
    }
}
