//! Compactly supported locally constant rational-valued functions on ℚ_p.

use super::ball::PAdicBall;
use super::rational::{self, pow_p};
use crate::error::{Error, Result};
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// `Σ c_j 1_{B_j}` with pairwise disjoint balls `B_j`, kept in a canonical
/// form (zero pieces dropped, complete sibling families with equal values
/// merged), so that equality of functions is structural equality.
#[derive(Clone, PartialEq, Eq)]
pub struct LocallyConstantFn {
    p: u64,
    pieces: Vec<(PAdicBall, BigRational)>,
}

impl LocallyConstantFn {
    pub fn zero(p: u64) -> Self {
        LocallyConstantFn { p, pieces: Vec::new() }
    }

    /// Builds the function `Σ c_j 1_{B_j}` from arbitrary (possibly nested)
    /// balls by refining into disjoint pieces.
    pub fn from_terms(p: u64, terms: impl IntoIterator<Item = (PAdicBall, BigRational)>) -> Result<Self> {
        let mut merged: BTreeMap<PAdicBall, BigRational> = BTreeMap::new();
        for (b, c) in terms {
            if b.prime() != p {
                return Err(Error::InvalidInput(format!("ball {b:?} is not over Q_{p}")));
            }
            *merged.entry(b).or_insert_with(BigRational::zero) += c;
        }
        merged.retain(|_, c| !c.is_zero());
        let balls: Vec<(PAdicBall, BigRational)> = merged.into_iter().collect();
        let mut pieces = Vec::new();
        for (i, (b, c)) in balls.iter().enumerate() {
            let maximal = !balls.iter().enumerate().any(|(j, (o, _))| j != i && b.is_subset_of(o));
            if maximal {
                let inside: Vec<&(PAdicBall, BigRational)> = balls.iter().filter(|(o, _)| o != b && o.is_subset_of(b)).collect();
                decompose(b, c.clone(), &inside, &mut pieces);
            }
        }
        let mut f = LocallyConstantFn { p, pieces };
        f.normalize();
        Ok(f)
    }

    /// Builds from pieces that must already be pairwise disjoint.
    pub fn from_disjoint(p: u64, pieces: Vec<(PAdicBall, BigRational)>) -> Result<Self> {
        for (i, (a, _)) in pieces.iter().enumerate() {
            for (b, _) in &pieces[i + 1..] {
                if !a.is_disjoint(b) {
                    return Err(Error::InvalidInput(format!("pieces {a:?} and {b:?} overlap")));
                }
            }
        }
        Self::from_terms(p, pieces)
    }

    /// Indicator of a ball.
    pub fn indicator(ball: PAdicBall) -> Self {
        let p = ball.prime();
        Self::from_terms(p, [(ball, BigRational::one())]).expect("single ball")
    }

    /// Indicator of `ℤ_p`.
    pub fn integers(p: u64) -> Result<Self> {
        Ok(Self::indicator(PAdicBall::around_zero(p, 0)?))
    }

    /// Indicator of the shell `{|u| = p^{-m}} = p^m ℤ_p^*`.
    pub fn shell(p: u64, m: i64) -> Result<Self> {
        let pieces = (1..p as i64)
            .map(|j| PAdicBall::new(p, &(rational::int(j) * pow_p(p, m)), m + 1).map(|b| (b, BigRational::one())))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(p, pieces)
    }

    /// Indicator of the units `ℤ_p^*`.
    pub fn units(p: u64) -> Result<Self> {
        Self::shell(p, 0)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn pieces(&self) -> &[(PAdicBall, BigRational)] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Value at a rational point.
    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.pieces.iter().find(|(b, _)| b.contains(x)).map(|(_, c)| c.clone()).unwrap_or_else(BigRational::zero)
    }

    /// Whether the support avoids 0, so the function lives on ℚ_p^*.
    pub fn vanishes_near_zero(&self) -> bool {
        self.pieces.iter().all(|(b, _)| !b.contains_zero())
    }

    /// Smallest `m ≥ 1` such that the function is constant on `1 + p^m ℤ_p`.
    pub fn constancy_exponent_at_one(&self) -> i64 {
        let one = BigRational::one();
        match self.pieces.iter().find(|(b, _)| b.contains(&one)) {
            Some((b, _)) => b.radius_exponent().max(1),
            None => {
                // f vanishes on the complement of its support; the nearest piece
                // determines how small a neighbourhood of 1 must be.
                let mut m = 1;
                for (b, _) in &self.pieces {
                    let d = b.center() - &one;
                    if let Some(v) = rational::valuation(&d, self.p) {
                        m = m.max(v + 1);
                    }
                }
                m
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::from_terms(self.p, self.pieces.iter().chain(other.pieces.iter()).cloned())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.p);
        }
        LocallyConstantFn { p: self.p, pieces: self.pieces.iter().map(|(b, v)| (b.clone(), v * c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-BigRational::one()))
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut terms = Vec::new();
        for (a, x) in &self.pieces {
            for (b, y) in &other.pieces {
                if a.is_subset_of(b) {
                    terms.push((a.clone(), x * y));
                } else if b.is_subset_of(a) {
                    terms.push((b.clone(), x * y));
                }
            }
        }
        Self::from_terms(self.p, terms)
    }

    /// `x ↦ f(−x)`.
    pub fn reflect(&self) -> Self {
        let mut f = LocallyConstantFn { p: self.p, pieces: self.pieces.iter().map(|(b, c)| (b.negate(), c.clone())).collect() };
        f.normalize();
        f
    }

    /// `x ↦ f(a·x)`.
    pub fn dilate(&self, a: &BigRational) -> Result<Self> {
        let inv = num_traits::Inv::inv(a.clone());
        let pieces = self.pieces.iter().map(|(b, c)| Ok((b.scale(&inv)?, c.clone()))).collect::<Result<Vec<_>>>()?;
        Self::from_terms(self.p, pieces)
    }

    /// `u ↦ f(u⁻¹)` for `f` supported on ℚ_p^*.
    pub fn compose_inverse(&self) -> Result<Self> {
        let pieces = self.pieces.iter().map(|(b, c)| Ok((b.invert()?, c.clone()))).collect::<Result<Vec<_>>>()?;
        Self::from_terms(self.p, pieces)
    }

    /// Refines all pieces to radius exponent at least `depth`.
    pub fn refined(&self, depth: i64) -> Vec<(PAdicBall, BigRational)> {
        self.pieces.iter().flat_map(|(b, c)| b.refine_to(depth.max(b.radius_exponent())).into_iter().map(move |s| (s, c.clone()))).collect()
    }

    /// `∫ f dx` for the additive Haar measure with `ℤ_p` of mass 1.
    pub fn integral(&self) -> BigRational {
        self.pieces.iter().map(|(b, c)| c * b.additive_measure()).sum()
    }

    fn normalize(&mut self) {
        self.pieces.retain(|(_, c)| !c.is_zero());
        loop {
            self.pieces.sort();
            let mut groups: BTreeMap<PAdicBall, Vec<usize>> = BTreeMap::new();
            for (i, (b, _)) in self.pieces.iter().enumerate() {
                let parent = PAdicBall::new(self.p, b.center(), b.radius_exponent() - 1).expect("prime already checked");
                groups.entry(parent).or_default().push(i);
            }
            let mut merged = None;
            for (parent, idx) in &groups {
                if idx.len() == self.p as usize {
                    let v = &self.pieces[idx[0]].1;
                    if idx.iter().all(|&i| &self.pieces[i].1 == v) {
                        merged = Some((parent.clone(), v.clone(), idx.clone()));
                        break;
                    }
                }
            }
            match merged {
                Some((parent, v, idx)) => {
                    let mut keep: Vec<_> =
                        self.pieces.iter().enumerate().filter(|(i, _)| !idx.contains(i)).map(|(_, x)| x.clone()).collect();
                    keep.push((parent, v));
                    self.pieces = keep;
                }
                None => break,
            }
        }
    }
}

fn decompose(ball: &PAdicBall, value: BigRational, inside: &[&(PAdicBall, BigRational)], out: &mut Vec<(PAdicBall, BigRational)>) {
    if inside.is_empty() {
        out.push((ball.clone(), value));
        return;
    }
    for child in ball.children() {
        let mut v = value.clone();
        let mut deeper = Vec::new();
        for t in inside {
            if t.0 == child {
                v += &t.1;
            } else if t.0.is_subset_of(&child) {
                deeper.push(*t);
            }
        }
        decompose(&child, v, &deeper, out);
    }
}

impl fmt::Debug for LocallyConstantFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.pieces.iter().map(|(b, c)| format!("{c}*1[{b:?}]")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_field::rational::{frac, int};

    #[test]
    fn shells_partition_the_integers() {
        let p = 3;
        let mut sum = LocallyConstantFn::zero(p);
        for m in 0..4 {
            sum = sum.add(&LocallyConstantFn::shell(p, m).unwrap()).unwrap();
        }
        sum = sum.add(&LocallyConstantFn::indicator(PAdicBall::around_zero(p, 4).unwrap())).unwrap();
        assert_eq!(sum, LocallyConstantFn::integers(p).unwrap());
    }

    #[test]
    fn overlapping_terms_are_refined() {
        let p = 2;
        let f = LocallyConstantFn::from_terms(
            p,
            [(PAdicBall::around_zero(p, 0).unwrap(), int(1)), (PAdicBall::around_zero(p, -1).unwrap(), frac(-1, 2))],
        )
        .unwrap();
        assert_eq!(f.eval(&int(3)), frac(1, 2));
        assert_eq!(f.eval(&frac(1, 2)), frac(-1, 2));
        assert_eq!(f.eval(&frac(1, 4)), int(0));
        assert_eq!(f.integral(), int(1) - int(1));
    }

    #[test]
    fn inversion_of_shells() {
        let p = 5;
        let f = LocallyConstantFn::shell(p, 2).unwrap();
        assert_eq!(f.compose_inverse().unwrap(), LocallyConstantFn::shell(p, -2).unwrap());
        assert!(LocallyConstantFn::integers(p).unwrap().compose_inverse().is_err());
    }

    #[test]
    fn constancy_near_one() {
        let p = 2;
        let f = LocallyConstantFn::units(p).unwrap();
        assert_eq!(f.constancy_exponent_at_one(), 1);
        let g = LocallyConstantFn::indicator(PAdicBall::new(p, &int(1), 5).unwrap());
        assert_eq!(g.constancy_exponent_at_one(), 5);
    }
}
