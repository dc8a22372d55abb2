//! Exact Fourier analysis on ℚ_p with the normalized character
//! `α₀(x) = exp(2πi {x}_p)` and the self-dual measure (ℤ_p of mass 1).

use super::ball::PAdicBall;
use super::cyclotomic::Cyclotomic;
use super::lcf::LocallyConstantFn;
use super::rational::{self, pow_p};
use crate::error::{Error, Result};
use num_rational::BigRational;
use num_traits::Zero;

/// `α₀(x) = exp(2πi {x}_p)` as an exact root of unity.
pub fn additive_character(p: u64, x: &BigRational) -> Cyclotomic {
    Cyclotomic::root_of_unity(p, &rational::fractional_part(x, p))
}

/// One term `c · α₀(b x) · 1_B(x)`.
#[derive(Clone, Debug)]
pub struct TwistedTerm {
    pub coeff: Cyclotomic,
    pub twist: BigRational,
    pub ball: PAdicBall,
}

/// A finite sum of twisted ball indicators; the class is closed under the
/// Fourier transform.
#[derive(Clone, Debug)]
pub struct TwistedBallSum {
    p: u64,
    terms: Vec<TwistedTerm>,
}

/// Largest number of cells enumerated when a sum is tabulated exactly.
const MAX_CELLS: usize = 1 << 20;

impl TwistedBallSum {
    pub fn zero(p: u64) -> Self {
        TwistedBallSum { p, terms: Vec::new() }
    }

    pub fn from_terms(p: u64, terms: Vec<TwistedTerm>) -> Self {
        TwistedBallSum { p, terms: terms.into_iter().filter(|t| !t.coeff.is_zero()).collect() }
    }

    pub fn from_locally_constant(f: &LocallyConstantFn) -> Self {
        let p = f.prime();
        TwistedBallSum {
            p,
            terms: f
                .pieces()
                .iter()
                .map(|(b, c)| TwistedTerm { coeff: Cyclotomic::rational(p, c.clone()), twist: BigRational::zero(), ball: b.clone() })
                .collect(),
        }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn terms(&self) -> &[TwistedTerm] {
        &self.terms
    }

    pub fn eval(&self, x: &BigRational) -> Cyclotomic {
        let mut acc = Cyclotomic::zero(self.p);
        for t in &self.terms {
            if t.ball.contains(x) {
                acc = acc.add(&t.coeff.mul(&additive_character(self.p, &(&t.twist * x))));
            }
        }
        acc
    }

    /// Transform `ξ ↦ ∫ f(x) α₀(xξ) dx`. Each term maps by
    /// `c α₀(bx) 1_{a+p^rℤ_p} ↦ c p^{−r} α₀(ab) α₀(aξ) 1_{−b+p^{−r}ℤ_p}`.
    pub fn fourier(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let a = t.ball.center();
                let r = t.ball.radius_exponent();
                let coeff = t.coeff.mul(&additive_character(self.p, &(a * &t.twist))).scale(&pow_p(self.p, -r));
                let ball = PAdicBall::new(self.p, &-&t.twist, -r).expect("prime already validated");
                TwistedTerm { coeff, twist: a.clone(), ball }
            })
            .collect();
        TwistedBallSum::from_terms(self.p, terms)
    }

    /// `(support exponent s, constancy exponent R)`: the sum vanishes outside
    /// `p^s ℤ_p` and is constant on cosets of `p^R ℤ_p`.
    pub fn scales(&self) -> Option<(i64, i64)> {
        if self.terms.is_empty() {
            return None;
        }
        let mut s = i64::MAX;
        let mut big_r = i64::MIN;
        for t in &self.terms {
            let r = t.ball.radius_exponent();
            let vc = rational::valuation(t.ball.center(), self.p).unwrap_or(r).min(r);
            s = s.min(vc);
            let vt = rational::valuation(&t.twist, self.p).map(|v| -v).unwrap_or(i64::MIN);
            big_r = big_r.max(r).max(vt);
        }
        Some((s, big_r.max(s)))
    }

    /// Cells `p^R ℤ_p`-cosets covering the support, with the value on each.
    pub fn tabulate(&self) -> Result<Vec<(PAdicBall, Cyclotomic)>> {
        let Some((s, big_r)) = self.scales() else {
            return Ok(Vec::new());
        };
        let count = (self.p as f64).powi((big_r - s) as i32);
        if count > MAX_CELLS as f64 {
            return Err(Error::InvalidInput(format!("tabulation needs {count:.0} cells")));
        }
        let root = PAdicBall::around_zero(self.p, s)?;
        Ok(root
            .refine_to(big_r)
            .into_iter()
            .map(|cell| {
                let v = self.eval(cell.center());
                (cell, v)
            })
            .filter(|(_, v)| !v.is_zero())
            .collect())
    }

    /// Converts to a rational-valued locally constant function when every
    /// value is rational.
    pub fn to_locally_constant(&self) -> Result<Option<LocallyConstantFn>> {
        let mut pieces = Vec::new();
        for (cell, v) in self.tabulate()? {
            match v.as_rational() {
                Some(r) => pieces.push((cell, r)),
                None => return Ok(None),
            }
        }
        Ok(Some(LocallyConstantFn::from_terms(self.p, pieces)?))
    }

    /// Exact `∫ f ḡ dx`.
    pub fn inner(&self, other: &Self) -> Result<Cyclotomic> {
        let mut both = self.terms.clone();
        both.extend(other.terms.iter().cloned());
        let (s, big_r) = match TwistedBallSum::from_terms(self.p, both).scales() {
            Some(x) => x,
            None => return Ok(Cyclotomic::zero(self.p)),
        };
        let root = PAdicBall::around_zero(self.p, s)?;
        let mut acc = Cyclotomic::zero(self.p);
        for cell in root.refine_to(big_r) {
            let x = cell.center();
            let a = self.eval(x);
            if a.is_zero() {
                continue;
            }
            acc = acc.add(&a.mul(&other.eval(x).conj()));
        }
        Ok(acc.scale(&pow_p(self.p, -big_r)))
    }
}

/// Fourier transform of a locally constant function.
pub fn padic_fourier(f: &LocallyConstantFn) -> TwistedBallSum {
    TwistedBallSum::from_locally_constant(f).fourier()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_field::rational::{frac, int};
    use proptest::prelude::*;

    #[test]
    fn transform_of_integers_and_units() {
        for p in [2u64, 3, 5] {
            let zp = LocallyConstantFn::integers(p).unwrap();
            assert_eq!(padic_fourier(&zp).to_locally_constant().unwrap().unwrap(), zp);
            let units = LocallyConstantFn::units(p).unwrap();
            let expected = zp.sub(&LocallyConstantFn::indicator(PAdicBall::around_zero(p, -1).unwrap()).scale(&frac(1, p as i64))).unwrap();
            assert_eq!(padic_fourier(&units).to_locally_constant().unwrap().unwrap(), expected);
        }
        assert!(padic_fourier(&LocallyConstantFn::zero(3)).terms().is_empty());
    }

    proptest! {
        #[test]
        fn double_transform_is_reflection(p_idx in 0usize..3, n in -40i64..40, d in 1i64..10, r in -6i64..=6,
                                          samples in proptest::collection::vec((-300i64..300, 1i64..30), 12)) {
            let p = [2u64, 3, 5][p_idx];
            let ball = PAdicBall::new(p, &frac(n, d), r).unwrap();
            let f = TwistedBallSum::from_locally_constant(&LocallyConstantFn::indicator(ball.clone()));
            let ff = f.fourier().fourier();
            for (a, b) in samples {
                let x = frac(a, b);
                let expect = if ball.contains(&-&x) { int(1) } else { int(0) };
                prop_assert_eq!(ff.eval(&x).as_rational(), Some(expect));
            }
        }

        #[test]
        fn parseval_is_exact(n1 in -20i64..20, r1 in -2i64..3, n2 in -20i64..20, r2 in -2i64..3, c in 1i64..5) {
            let p = 2;
            let f = LocallyConstantFn::from_terms(p, [
                (PAdicBall::new(p, &frac(n1, 4), r1).unwrap(), int(c)),
                (PAdicBall::new(p, &frac(n2, 2), r2).unwrap(), int(-1)),
            ]).unwrap();
            let g = LocallyConstantFn::units(p).unwrap();
            let (tf, tg) = (TwistedBallSum::from_locally_constant(&f), TwistedBallSum::from_locally_constant(&g));
            prop_assert_eq!(tf.inner(&tg).unwrap(), tf.fourier().inner(&tg.fourier()).unwrap());
            prop_assert_eq!(tf.inner(&tf).unwrap(), tf.fourier().inner(&tf.fourier()).unwrap());
        }
    }
}
