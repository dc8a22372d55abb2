//! Exact elements of the cyclotomic field `ℚ(ζ_{p^K})`, used for values of
//! p-adic additive characters.

use super::rational::{self, pow_p};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::f64::consts::PI;

/// `Σ_j c_j ζ^j` with `ζ = exp(2πi / p^K)`, reduced to the power basis
/// `1, ζ, …, ζ^{φ(p^K) − 1}`.
#[derive(Clone, Debug)]
pub struct Cyclotomic {
    p: u64,
    k: u32,
    coeffs: Vec<BigRational>,
}

fn order(p: u64, k: u32) -> usize {
    (p as usize).pow(k)
}

fn phi(p: u64, k: u32) -> usize {
    if k == 0 {
        1
    } else {
        order(p, k) / p as usize * (p as usize - 1)
    }
}

impl Cyclotomic {
    /// The rational `r` viewed in `ℚ(ζ_{p^0}) = ℚ`.
    pub fn rational(p: u64, r: BigRational) -> Self {
        Cyclotomic { p, k: 0, coeffs: vec![r] }
    }

    pub fn zero(p: u64) -> Self {
        Self::rational(p, BigRational::zero())
    }

    /// `exp(2πi·t)` for a rational phase `t` whose denominator is a power of `p`.
    pub fn root_of_unity(p: u64, t: &BigRational) -> Self {
        let t = t - t.floor();
        if t.is_zero() {
            return Self::rational(p, rational::int(1));
        }
        let k = rational::valuation(&BigRational::from_integer(t.denom().clone()), p).unwrap_or(0) as u32;
        assert_eq!(BigRational::from_integer(t.denom().clone()), pow_p(p, k as i64), "phase denominator must be a power of p");
        let e = t.numer().to_usize().expect("phase numerator fits usize");
        let mut out = Cyclotomic { p, k, coeffs: vec![BigRational::zero(); order(p, k)] };
        out.coeffs[e] = rational::int(1);
        out.reduce();
        out
    }

    pub fn level(&self) -> u32 {
        self.k
    }

    /// Re-expresses the number in `ℚ(ζ_{p^K})` for `K ≥ self.k` (unreduced
    /// coefficient vector of length `p^K`).
    fn lifted(&self, k: u32) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); order(self.p, k)];
        let stride = order(self.p, k - self.k);
        for (j, c) in self.coeffs.iter().enumerate() {
            out[j * stride] += c;
        }
        out
    }

    fn from_full(p: u64, k: u32, full: Vec<BigRational>) -> Self {
        let mut out = Cyclotomic { p, k, coeffs: full };
        out.reduce();
        out
    }

    /// Reduces exponents `≥ φ(p^K)` with `Φ_{p^K}(ζ) = Σ_{j<p} ζ^{j p^{K−1}} = 0`.
    fn reduce(&mut self) {
        if self.k == 0 {
            self.coeffs.truncate(1);
            return;
        }
        let n = order(self.p, self.k);
        self.coeffs.resize(n, BigRational::zero());
        let f = phi(self.p, self.k);
        let step = order(self.p, self.k - 1);
        for e in (f..n).rev() {
            if self.coeffs[e].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut self.coeffs[e], BigRational::zero());
            for j in 0..(self.p as usize - 1) {
                let idx = e - f + j * step;
                self.coeffs[idx] -= &c;
            }
        }
        self.coeffs.truncate(f);
    }

    fn common_level(&self, other: &Self) -> u32 {
        assert_eq!(self.p, other.p, "cyclotomic numbers over different primes");
        self.k.max(other.k)
    }

    pub fn add(&self, other: &Self) -> Self {
        let k = self.common_level(other);
        let mut a = self.lifted(k);
        for (x, y) in a.iter_mut().zip(other.lifted(k)) {
            *x += y;
        }
        Self::from_full(self.p, k, a)
    }

    pub fn neg(&self) -> Self {
        Cyclotomic { p: self.p, k: self.k, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let k = self.common_level(other);
        let n = order(self.p, k);
        let a = self.lifted(k);
        let b = other.lifted(k);
        let mut out = vec![BigRational::zero(); n];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    out[(i + j) % n] += x * y;
                }
            }
        }
        Self::from_full(self.p, k, out)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Cyclotomic { p: self.p, k: self.k, coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    /// Complex conjugate (`ζ ↦ ζ^{-1}`).
    pub fn conj(&self) -> Self {
        let n = order(self.p, self.k);
        let mut out = vec![BigRational::zero(); n];
        for (j, c) in self.coeffs.iter().enumerate() {
            out[(n - j) % n] += c;
        }
        Self::from_full(self.p, self.k, out)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The rational value if the number lies in ℚ.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        let n = order(self.p, self.k) as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc += Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n) * rational::to_f64(c);
            }
        }
        acc
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_field::rational::{frac, int};

    #[test]
    fn roots_of_unity_sum_to_zero() {
        for (p, k) in [(2u64, 3u32), (3, 2), (5, 1)] {
            let n = (p as i64).pow(k);
            let mut s = Cyclotomic::zero(p);
            for j in 0..n {
                s = s.add(&Cyclotomic::root_of_unity(p, &frac(j, n)));
            }
            assert!(s.is_zero(), "p={p} k={k}");
        }
    }

    #[test]
    fn multiplication_adds_phases() {
        let a = Cyclotomic::root_of_unity(3, &frac(2, 9));
        let b = Cyclotomic::root_of_unity(3, &frac(5, 9));
        assert_eq!(a.mul(&b), Cyclotomic::root_of_unity(3, &frac(7, 9)));
        assert_eq!(a.mul(&a.conj()), Cyclotomic::rational(3, int(1)));
        let c = Cyclotomic::root_of_unity(2, &frac(1, 4));
        assert_eq!(c.mul(&c), Cyclotomic::rational(2, int(-1)));
    }

    #[test]
    fn complex_value_matches_phase() {
        let z = Cyclotomic::root_of_unity(5, &frac(3, 25)).scale(&frac(2, 3));
        let w = Complex64::from_polar(2.0 / 3.0, 2.0 * PI * 3.0 / 25.0);
        assert!((z.to_complex() - w).norm() < 1e-14);
    }
}
