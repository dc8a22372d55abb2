//! Compact-open balls `a + p^r ℤ_p` with exact rational centers.

use super::padic::PAdicNumber;
use super::rational::{self, pow_p};
use crate::error::{Error, Result};
use num_rational::BigRational;
use num_traits::Zero;
use std::fmt;

/// The ball `center + p^radius_exponent ℤ_p`.
///
/// Centers are rational and kept in canonical form (the representative in
/// `ℤ[1/p] ∩ [0, p^r)`), so structural equality is ball equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PAdicBall {
    p: u64,
    center: BigRational,
    r: i64,
}

impl PAdicBall {
    pub fn new(p: u64, center: &BigRational, r: i64) -> Result<Self> {
        if !rational::is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        Ok(PAdicBall { p, center: rational::reduce_mod(center, p, r), r })
    }

    /// `p^r ℤ_p`.
    pub fn around_zero(p: u64, r: i64) -> Result<Self> {
        Self::new(p, &BigRational::zero(), r)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }
    pub fn center(&self) -> &BigRational {
        &self.center
    }
    pub fn radius_exponent(&self) -> i64 {
        self.r
    }

    /// Center as a p-adic number with the given precision.
    pub fn center_padic(&self, precision: u32) -> Result<PAdicNumber> {
        PAdicNumber::from_rational(&self.center, self.p, precision)
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        rational::valuation(&(x - &self.center), self.p).is_none_or(|v| v >= self.r)
    }

    pub fn contains_zero(&self) -> bool {
        self.center.is_zero()
    }

    /// Whether `self ⊆ other`.
    pub fn is_subset_of(&self, other: &PAdicBall) -> bool {
        self.p == other.p && self.r >= other.r && other.contains(&self.center)
    }

    pub fn is_disjoint(&self, other: &PAdicBall) -> bool {
        !(self.is_subset_of(other) || other.is_subset_of(self))
    }

    /// Valuation shared by all elements (balls avoiding 0 only).
    pub fn valuation(&self) -> Option<i64> {
        if self.contains_zero() {
            None
        } else {
            rational::valuation(&self.center, self.p)
        }
    }

    /// Additive Haar measure `p^{-r}` (ℤ_p has mass 1).
    pub fn additive_measure(&self) -> BigRational {
        pow_p(self.p, -self.r)
    }

    /// The `p` sub-balls of radius exponent `r + 1`.
    pub fn children(&self) -> Vec<PAdicBall> {
        (0..self.p as i64)
            .map(|j| {
                let c = &self.center + rational::int(j) * pow_p(self.p, self.r);
                PAdicBall { p: self.p, center: rational::reduce_mod(&c, self.p, self.r + 1), r: self.r + 1 }
            })
            .collect()
    }

    /// All sub-balls of radius exponent `depth ≥ r`.
    pub fn refine_to(&self, depth: i64) -> Vec<PAdicBall> {
        let mut level = vec![self.clone()];
        for _ in self.r..depth {
            level = level.iter().flat_map(|b| b.children()).collect();
        }
        level
    }

    /// Image under `x ↦ a·x`.
    pub fn scale(&self, a: &BigRational) -> Result<Self> {
        let v = rational::valuation(a, self.p).ok_or_else(|| Error::Domain("scaling a ball by 0".into()))?;
        Self::new(self.p, &(&self.center * a), self.r + v)
    }

    /// Image under `x ↦ −x`.
    pub fn negate(&self) -> Self {
        PAdicBall { p: self.p, center: rational::reduce_mod(&-&self.center, self.p, self.r), r: self.r }
    }

    /// Image under `x ↦ x + t`.
    pub fn translate(&self, t: &BigRational) -> Self {
        PAdicBall { p: self.p, center: rational::reduce_mod(&(&self.center + t), self.p, self.r), r: self.r }
    }

    /// Image under `x ↦ 1/x` of a ball avoiding 0: `c⁻¹ + p^{r − 2v(c)} ℤ_p`.
    pub fn invert(&self) -> Result<Self> {
        let v = self.valuation().ok_or_else(|| Error::Domain(format!("inverting the ball {self:?}, which contains 0")))?;
        let c = num_traits::Inv::inv(self.center.clone());
        Self::new(self.p, &c, self.r - 2 * v)
    }
}

impl fmt::Debug for PAdicBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}^{} Z_{}", self.center, self.p, self.r, self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_field::rational::{frac, int};
    use proptest::prelude::*;

    #[test]
    fn canonical_centers() {
        let a = PAdicBall::new(2, &int(5), 2).unwrap();
        let b = PAdicBall::new(2, &int(1), 2).unwrap();
        assert_eq!(a, b);
        assert!(a.contains(&int(9)) && !a.contains(&int(3)));
        assert!(PAdicBall::new(3, &int(9), 1).unwrap().contains_zero());
    }

    #[test]
    fn inversion_maps_balls_onto_balls() {
        let b = PAdicBall::new(3, &frac(1, 3), 2).unwrap();
        let inv = b.invert().unwrap();
        for x in b.refine_to(4) {
            assert!(inv.contains(&num_traits::Inv::inv(x.center().clone())));
        }
        assert_eq!(inv.invert().unwrap(), b);
        assert_eq!(inv.additive_measure(), b.additive_measure() * pow_p(3, -2));
    }

    #[test]
    fn children_partition_the_ball() {
        let b = PAdicBall::new(5, &frac(2, 5), 0).unwrap();
        let kids = b.children();
        assert_eq!(kids.len(), 5);
        for (i, x) in kids.iter().enumerate() {
            assert!(x.is_subset_of(&b));
            for y in &kids[i + 1..] {
                assert!(x.is_disjoint(y));
            }
        }
    }

    proptest! {
        #[test]
        fn balls_are_disjoint_or_nested(c1 in -200i64..200, d1 in 1i64..30, r1 in -3i64..5,
                                         c2 in -200i64..200, d2 in 1i64..30, r2 in -3i64..5,
                                         samples in proptest::collection::vec((-500i64..500, 1i64..40), 40)) {
            let p = 2;
            let b1 = PAdicBall::new(p, &frac(c1, d1), r1).unwrap();
            let b2 = PAdicBall::new(p, &frac(c2, d2), r2).unwrap();
            let nested = b1.is_subset_of(&b2) || b2.is_subset_of(&b1);
            for (n, d) in samples {
                let x = frac(n, d);
                if b1.contains(&x) && b2.contains(&x) {
                    prop_assert!(nested);
                }
                if b1.is_subset_of(&b2) && b1.contains(&x) {
                    prop_assert!(b2.contains(&x));
                }
            }
            if !nested {
                prop_assert!(!b2.contains(b1.center()));
            }
        }
    }
}
