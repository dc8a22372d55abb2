//! Special functions: complex log-gamma, digamma, the sine integral and exact
//! Bernoulli numbers.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// The Euler–Mascheroni constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `log(2π)`.
pub const LOG_TWO_PI: f64 = 1.837_877_066_409_345_5;

/// Bernoulli numbers `B_0, …, B_n` (with `B_1 = −1/2`) computed exactly by the
/// Akiyama–Tanigawa algorithm.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(n + 1);
    let mut a: Vec<BigRational> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        a.push(BigRational::new(BigInt::from(1), BigInt::from(m as u64 + 1)));
        for j in (1..=m).rev() {
            let diff = &a[j - 1] - &a[j];
            a[j - 1] = diff * BigRational::from_integer(BigInt::from(j as u64));
        }
        out.push(a[0].clone());
    }
    // Akiyama–Tanigawa yields B_1 = +1/2.
    if n >= 1 {
        out[1] = -out[1].clone();
    }
    out
}

/// Even Bernoulli numbers `B_2, B_4, …, B_60` as floats.
pub fn even_bernoulli_f64() -> &'static [f64] {
    static CACHE: OnceLock<Vec<f64>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let b = bernoulli_numbers(60);
        (1..=30).map(|k| b[2 * k].to_f64().unwrap_or(f64::NAN)).collect()
    })
}

const STIRLING_SHIFT: f64 = 15.0;

/// Principal branch of `log Γ(z)` for `Re z > 0` and for other `z` away from
/// the poles, accurate to about 1e-14 relative to `|log Γ|`.
///
/// The argument is shifted to `Re z ≥ 15` and the Stirling series with ten
/// Bernoulli terms is applied; the shift is undone with principal logarithms,
/// which keeps the imaginary part continuous off the negative real axis.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Reflection: log Γ(z) = log π − log sin(πz) − log Γ(1 − z).
        let s = (Complex64::new(PI, 0.0) * z).sin();
        return Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < STIRLING_SHIFT {
        shift += w.ln();
        w += 1.0;
    }
    let b = even_bernoulli_f64();
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for k in 1..=10 {
        let kf = k as f64;
        series += pow * (b[k - 1] / (2.0 * kf * (2.0 * kf - 1.0)));
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + 0.5 * LOG_TWO_PI + series - shift
}

/// `Γ(z)` for complex `z`, computed as `exp(ln_gamma(z))`.
pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// Digamma function ψ(x) for real `x` not a nonpositive integer.
pub fn digamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::NAN;
    }
    if x < 0.5 {
        return digamma(1.0 - x) - PI / (PI * x).tan();
    }
    let mut acc = 0.0;
    let mut w = x;
    while w < STIRLING_SHIFT {
        acc -= 1.0 / w;
        w += 1.0;
    }
    let b = even_bernoulli_f64();
    let inv2 = 1.0 / (w * w);
    let mut pow = inv2;
    let mut series = 0.0;
    for k in 1..=10 {
        series += b[k - 1] / (2.0 * k as f64) * pow;
        pow *= inv2;
    }
    acc + w.ln() - 0.5 / w - series
}

/// Sine integral `Si(x) = ∫_0^x sin t / t dt`.
pub fn sine_integral(x: f64) -> f64 {
    if x < 0.0 {
        return -sine_integral(-x);
    }
    if x <= 4.0 {
        // Power series; terms decay quickly in this range.
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
            let add = term / (2.0 * k + 1.0);
            sum += add;
            if add.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        return sum;
    }
    // Continued fraction for E1(ix) by the modified Lentz method.
    let tiny = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let a = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    h *= Complex64::new(x.cos(), -x.sin());
    PI / 2.0 + h.im
}
