//! Exact p-adic helpers on rational numbers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `p^e` as a big rational, for any integer exponent.
pub fn pow_p(p: u64, e: i64) -> BigRational {
    let base = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(base)
    } else {
        BigRational::new(BigInt::one(), base)
    }
}

/// Integer → rational.
pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `n / d` as a reduced rational.
pub fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Multiplicity of `p` in the nonzero integer `n`, and the cofactor.
fn split_p(n: &BigInt, p: u64) -> (i64, BigInt) {
    let pb = BigInt::from(p);
    let mut m = n.clone();
    let mut k = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return (k, m);
        }
        m = q;
        k += 1;
    }
}

/// p-adic valuation of a nonzero rational; `None` for zero.
pub fn valuation(x: &BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let (a, _) = split_p(x.numer(), p);
    let (b, _) = split_p(x.denom(), p);
    Some(a - b)
}

/// p-adic module `|x|_p = p^{-v(x)}` as an exact rational (0 for 0).
pub fn module_exact(x: &BigRational, p: u64) -> BigRational {
    match valuation(x, p) {
        None => BigRational::zero(),
        Some(v) => pow_p(p, -v),
    }
}

/// Inverse of `a` modulo `m` for coprime `a`, `m`.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    debug_assert!(e.gcd.is_one(), "mod_inverse of non-unit");
    e.x.mod_floor(m)
}

/// Canonical representative of `x mod p^r ℤ_p`: the unique element of
/// `ℤ[1/p] ∩ [0, p^r)` congruent to `x`, expressed as a rational.
pub fn reduce_mod(x: &BigRational, p: u64, r: i64) -> BigRational {
    if x.is_zero() {
        return BigRational::zero();
    }
    let (_, b_coprime) = split_p(x.denom(), p);
    let (k, _) = split_p(x.denom(), p);
    if r + k <= 0 {
        return BigRational::zero();
    }
    let modulus = BigInt::from(p).pow((r + k) as u32);
    let inv = mod_inverse(&b_coprime, &modulus);
    let n = (x.numer() * inv).mod_floor(&modulus);
    BigRational::new(n, BigInt::from(p).pow(k as u32))
}

/// p-adic fractional part `{x}_p ∈ ℤ[1/p] ∩ [0, 1)`.
pub fn fractional_part(x: &BigRational, p: u64) -> BigRational {
    reduce_mod(x, p, 0)
}

/// Whether `x ∈ ℤ_p`.
pub fn is_integral(x: &BigRational, p: u64) -> bool {
    valuation(x, p).is_none_or(|v| v >= 0)
}

/// Exact primality test for the small primes used as places.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization of `n ≥ 1`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n.is_multiple_of(d) {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Rational → f64 with correct handling of huge numerators/denominators.
pub fn to_f64(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    if let Some(v) = x.to_f64() {
        if v.is_finite() && v != 0.0 {
            return v;
        }
    }
    let shift = x.numer().bits() as i64 - x.denom().bits() as i64;
    let scaled = if shift > 0 {
        x / BigRational::from_integer(BigInt::one() << shift as usize)
    } else {
        x * BigRational::from_integer(BigInt::one() << (-shift) as usize)
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

/// Absolute value.
pub fn abs(x: &BigRational) -> BigRational {
    x.abs()
}
