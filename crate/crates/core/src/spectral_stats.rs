//! Spectral statistics: semiclassical phase-space counting for the cutoff
//! `|Q| ≤ Λ, |P| ≤ Λ, |PQ| ≤ E/2π`, unfolding and pair correlation of zeta
//! zeros, and the finite shift model whose traces converge to Poisson
//! integrals.

use crate::error::{Error, Result};
use crate::quad::{self, Estimate};
use crate::zeta_zeros::{smooth_count, ZeroList};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

/// Phase-space area of `D′₊ = {0 ≤ P, Q ≤ Λ, PQ ≤ E/2π}` computed three ways.
#[derive(Debug, Clone, Serialize)]
pub struct SemiclassicalArea {
    pub e: f64,
    pub lambda: f64,
    /// `(2E/2π) log Λ − (E/2π)(log(E/2π) − 1)`.
    pub closed_form: f64,
    /// `∫₀^Λ min(Λ, E/(2πQ)) dQ` by adaptive quadrature.
    pub direct: Estimate,
    /// Area for the character `e^{ix}` before the rescaling `P = p/2π`:
    /// `E/2π + (2E/2π) log Λ − (E/2π) log E`.
    pub pre_rescaling: Option<f64>,
}

/// Closed form and direct quadrature of the phase-space area.
pub fn semiclassical_area(e: f64, lambda: f64) -> Result<SemiclassicalArea> {
    if !(e > 0.0 && e.is_finite()) || !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!("need E > 0 and Λ > 0, got E = {e}, Λ = {lambda}")));
    }
    let a = e / (2.0 * PI);
    if a > lambda * lambda {
        return Err(Error::Domain(format!(
            "the hyperbola PQ = {a:.6} misses the square of side Λ = {lambda}: the region is the full square"
        )));
    }
    let closed_form = 2.0 * a * lambda.ln() - a * (a.ln() - 1.0);
    let corner = a / lambda;
    let direct = quad::integrate_with_breaks(|q: f64| if q * lambda <= a { lambda } else { a / q }, &[0.0, corner, lambda], 1e-12)?;
    let pre_rescaling = (e <= lambda * lambda).then(|| a + 2.0 * a * lambda.ln() - a * e.ln());
    Ok(SemiclassicalArea { e, lambda, closed_form, direct, pre_rescaling })
}

/// Stratified Monte-Carlo estimate of the area of `D′₊` on a `k × k` jittered
/// grid. Cells entirely inside or outside the region are counted exactly; each
/// cell crossed by the hyperbola receives one uniform sample.
pub fn semiclassical_area_monte_carlo(e: f64, lambda: f64, k: usize, seed: u64) -> Result<Estimate> {
    if !(e > 0.0) || !(lambda > 0.0) || k == 0 {
        return Err(Error::InvalidInput(format!("need E > 0, Λ > 0 and a nonempty grid, got E = {e}, Λ = {lambda}, k = {k}")));
    }
    let a = e / (2.0 * PI);
    let h = lambda / k as f64;
    let cell = h * h;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inside = 0usize;
    let mut hits = 0usize;
    let mut sampled = 0usize;
    for i in 0..k {
        let q0 = i as f64 * h;
        let q1 = q0 + h;
        // Rows j with (j + 1)h·q1 ≤ a lie inside; rows with j·h·q0 > a lie outside.
        let full = ((a / (h * q1)).floor() as usize).min(k);
        let reach = if q0 == 0.0 { k } else { ((a / (h * q0)).ceil() as usize).min(k) };
        inside += full;
        for j in full..reach.max(full) {
            let q = q0 + h * rng.gen::<f64>();
            let p = (j as f64 + rng.gen::<f64>()) * h;
            sampled += 1;
            if p * q <= a {
                hits += 1;
            }
        }
    }
    let value = (inside + hits) as f64 * cell;
    // Each boundary cell contributes a Bernoulli variance of at most 1/4.
    let error = cell * (sampled as f64 / 4.0).sqrt();
    Ok(Estimate { value, error })
}

/// Zero ordinates mapped through the smooth counting function.
#[derive(Debug, Clone, Serialize)]
pub struct UnfoldedZeros {
    pub x: Vec<f64>,
    pub mean_spacing: f64,
}

/// Minimum sample size for the mean-spacing check.
const SPACING_SAMPLE: usize = 10;

/// `x_j = ⟨N(γ_j)⟩`; for ten or more zeros the mean spacing must lie within
/// 5% of 1.
pub fn unfold(zeros: &ZeroList) -> Result<UnfoldedZeros> {
    if zeros.is_empty() {
        return Err(Error::InvalidInput("cannot unfold an empty zero list".into()));
    }
    let x: Vec<f64> = zeros.ordinates.iter().map(|g| smooth_count(*g)).collect();
    let mean_spacing = if x.len() > 1 { (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64 } else { f64::NAN };
    if x.len() >= SPACING_SAMPLE && (mean_spacing - 1.0).abs() > 0.05 {
        return Err(Error::NotConverged(format!(
            "unfolded mean spacing {mean_spacing:.4} is not within 5% of 1; the zero list is incomplete or the counting is wrong"
        )));
    }
    Ok(UnfoldedZeros { x, mean_spacing })
}

/// Pair-correlation histogram compared with the GUE density
/// `1 − (sin πu/(πu))²`.
#[derive(Debug, Clone, Serialize)]
pub struct PairCorrelationReport {
    pub zeros: usize,
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// `count/(M·Δu)` per bin.
    pub density: Vec<f64>,
    /// The GUE density averaged over each bin.
    pub reference: Vec<f64>,
    /// Root-mean-square deviation over the bins.
    pub l2_deviation: f64,
    /// Log-likelihood ratio of the binned pair counts, GUE against uniform.
    pub log_likelihood_ratio: f64,
}

impl PairCorrelationReport {
    /// Whether GUE is preferred over the uniform alternative by a likelihood
    /// ratio above 10.
    pub fn gue_preferred(&self) -> bool {
        self.log_likelihood_ratio > 10f64.ln()
    }
}

/// `1 − (sin πu/(πu))²`.
pub fn gue_pair_density(u: f64) -> f64 {
    if u.abs() < 1e-6 {
        let z = PI * u;
        return z * z / 3.0;
    }
    let s = (PI * u).sin() / (PI * u);
    1.0 - s * s
}

/// Minimum number of unfolded zeros for a pair-correlation test.
pub const MIN_PAIR_ZEROS: usize = 300;

pub fn pair_correlation(ux: &UnfoldedZeros, u_max: f64, bins: usize) -> Result<PairCorrelationReport> {
    let m = ux.x.len();
    if m < MIN_PAIR_ZEROS {
        return Err(Error::InvalidInput(format!("pair correlation needs at least {MIN_PAIR_ZEROS} zeros, got {m}")));
    }
    if !(u_max > 0.0) || bins == 0 {
        return Err(Error::InvalidInput(format!("need u_max > 0 and at least one bin, got {u_max}, {bins}")));
    }
    let du = u_max / bins as f64;
    let mut counts = vec![0usize; bins];
    for i in 0..m {
        for j in i + 1..m {
            let d = ux.x[j] - ux.x[i];
            if d > u_max {
                break;
            }
            if d > 0.0 {
                let b = ((d / du).ceil() as usize).clamp(1, bins) - 1;
                counts[b] += 1;
            }
        }
    }
    let edges: Vec<f64> = (0..=bins).map(|b| b as f64 * du).collect();
    let mut reference = Vec::with_capacity(bins);
    for b in 0..bins {
        reference.push(quad::integrate(gue_pair_density, edges[b], edges[b + 1], 1e-12)?.value / du);
    }
    let density: Vec<f64> = counts.iter().map(|c| *c as f64 / (m as f64 * du)).collect();
    let l2_deviation = (density.iter().zip(&reference).map(|(d, r)| (d - r).powi(2)).sum::<f64>() / bins as f64).sqrt();
    let total_ref: f64 = reference.iter().sum();
    let log_likelihood_ratio = counts.iter().zip(&reference).map(|(n, r)| *n as f64 * ((r / total_ref) / (1.0 / bins as f64)).ln()).sum();
    Ok(PairCorrelationReport { zeros: m, edges, counts, density, reference, l2_deviation, log_likelihood_ratio })
}

/// A finitely supported sequence `f = Σ f_k δ_k` on ℤ.
pub type Sequence = Vec<(i64, Complex64)>;

/// Finite traces `Trace((S_N − E_N)V(f))` and their Poisson-integral limit.
#[derive(Debug, Clone, Serialize)]
pub struct ShiftModelReport {
    pub points: Vec<Complex64>,
    pub ladder: Vec<usize>,
    pub traces: Vec<Complex64>,
    /// `Σ_z Σ_k f_k m_k(w_z)` with `w_z = z` for `|z| ≤ 1` and `1/z̄` otherwise,
    /// `m_k(w) = w^k` for `k ≥ 0` and `w̄^{−k}` for `k < 0`.
    pub limit: Complex64,
    /// `Σ_z ∫ P_{w_z}(u) f̂(u) du` by quadrature on the circle; absent when a
    /// point lies on the circle.
    pub poisson_quadrature: Option<Estimate<Complex64>>,
    pub deviations: Vec<f64>,
}

/// Point of the closed unit disc whose Poisson measure is the limit for `z`.
fn harmonic_point(z: Complex64) -> Complex64 {
    if z.norm() <= 1.0 {
        z
    } else {
        1.0 / z.conj()
    }
}

fn moment(w: Complex64, k: i64) -> Complex64 {
    if k >= 0 {
        w.powi(k as i32)
    } else {
        w.conj().powi((-k) as i32)
    }
}

/// `Σ_k f_k u^k` on the unit circle.
fn fourier(f: &[(i64, Complex64)], theta: f64) -> Complex64 {
    f.iter().map(|(k, c)| c * Complex64::from_polar(1.0, *k as f64 * theta)).sum()
}

/// `∫ P_w(e^{iθ}) f̂(e^{iθ}) dθ/2π` for `|w| < 1`.
fn poisson_integral(w: Complex64, f: &[(i64, Complex64)], tol: f64) -> Result<Estimate<Complex64>> {
    let r2 = w.norm_sqr();
    let phi = w.arg().rem_euclid(2.0 * PI);
    let kernel = |t: f64| {
        let d = Complex64::from_polar(1.0, t) - w;
        (1.0 - r2) / d.norm_sqr() / (2.0 * PI)
    };
    let mut breaks = vec![0.0, phi, 2.0 * PI];
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    quad::integrate_with_breaks(|t: f64| fourier(f, t) * kernel(t), &breaks, tol)
}

/// `Trace((S_N − E_N)V(f))` for the window `[−N, N]`, where `S_N − E_N` is the
/// projection onto the span of `η_z(n) = z̄^n`, orthonormalized by
/// Gram–Schmidt.
pub fn shift_model_trace(points: &[Complex64], f: &[(i64, Complex64)], n: usize) -> Result<Complex64> {
    let len = 2 * n + 1;
    if points.len() >= len {
        return Err(Error::InvalidInput(format!("window of size {len} cannot hold {} independent conditions", points.len())));
    }
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(points.len());
    for z in points {
        // Rescale so that the largest entry has modulus 1.
        let zc = z.conj();
        let offset = if z.norm() < 1.0 { n as i32 } else { -(n as i32) };
        let mut v: Vec<Complex64> = (0..len).map(|i| zc.powi(i as i32 - n as i32 + offset)).collect();
        for _ in 0..2 {
            for e in &basis {
                let proj: Complex64 = e.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ei) in v.iter_mut().zip(e) {
                    *vi -= proj * ei;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 1e-10) {
            return Err(Error::Domain(format!("η_z for z = {z} is numerically dependent on the other points")));
        }
        v.iter_mut().for_each(|x| *x /= norm);
        basis.push(v);
    }
    let mut trace = Complex64::new(0.0, 0.0);
    for e in &basis {
        for (k, c) in f {
            // ⟨V^k e, e⟩ = Σ_n e(n − k)·conj(e(n)).
            let shift = *k;
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..len as i64 {
                let src = i - shift;
                if (0..len as i64).contains(&src) {
                    s += e[src as usize] * e[i as usize].conj();
                }
            }
            trace += c * s;
        }
    }
    Ok(trace)
}

/// Finite-`N` traces over the ladder compared with the Poisson limit.
pub fn shift_model_limit(points: &[Complex64], f: &[(i64, Complex64)], ladder: &[usize]) -> Result<ShiftModelReport> {
    if points.is_empty() || ladder.is_empty() {
        return Err(Error::InvalidInput("need at least one point and one window size".into()));
    }
    for (i, z) in points.iter().enumerate() {
        if z.norm() == 0.0 || !z.norm().is_finite() {
            return Err(Error::InvalidInput(format!("points must lie in ℂ^*, got {z}")));
        }
        if points[..i].contains(z) {
            return Err(Error::InvalidInput(format!("the point {z} is repeated; multiplicities above one are not supported")));
        }
    }
    let limit: Complex64 = points.iter().map(|z| f.iter().map(|(k, c)| c * moment(harmonic_point(*z), *k)).sum::<Complex64>()).sum();
    let poisson_quadrature = if points.iter().all(|z| (z.norm() - 1.0).abs() > 1e-12) {
        let mut acc = Estimate { value: Complex64::new(0.0, 0.0), error: 0.0 };
        for z in points {
            let est = poisson_integral(harmonic_point(*z), f, 1e-12)?;
            acc.value += est.value;
            acc.error += est.error;
        }
        Some(acc)
    } else {
        None
    };
    let mut traces = Vec::with_capacity(ladder.len());
    for &n in ladder {
        traces.push(shift_model_trace(points, f, n)?);
    }
    let deviations = traces.iter().map(|t| (t - limit).norm()).collect();
    Ok(ShiftModelReport { points: points.to_vec(), ladder: ladder.to_vec(), traces, limit, poisson_quadrature, deviations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta_zeros::find_zeros;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn semiclassical_examples() {
        let a = semiclassical_area(2.0 * PI, std::f64::consts::E).unwrap();
        assert_abs_diff_eq!(a.closed_form, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.direct.value, 3.0, epsilon = 1e-10);
        let b = semiclassical_area(2.0 * PI * std::f64::consts::E, 5.0).unwrap();
        assert_abs_diff_eq!(b.closed_form, 2.0 * std::f64::consts::E * 5f64.ln(), epsilon = 1e-12);
        assert!(semiclassical_area(-1.0, 2.0).is_err());
        assert!(semiclassical_area(100.0, 1.0).is_err());
    }

    #[test]
    fn pre_rescaling_area_matches_rectangle_plus_hyperbola() {
        let (e, l) = (7.0, 4.0);
        let a = semiclassical_area(e, l).unwrap();
        let direct = (e / l * l + quad::integrate(|q: f64| e / q, e / l, l, 1e-13).unwrap().value) / (2.0 * PI);
        assert_abs_diff_eq!(a.pre_rescaling.unwrap(), direct, epsilon = 1e-10);
    }

    #[test]
    fn monte_carlo_oracle() {
        let a = semiclassical_area(20.0, 10.0).unwrap();
        let mc = semiclassical_area_monte_carlo(20.0, 10.0, 8192, 7).unwrap();
        assert!((mc.value - a.closed_form).abs() < 1e-3, "{} vs {}", mc.value, a.closed_form);
        assert!(mc.error < 1e-3);
    }

    #[test]
    fn unfold_examples() {
        let zeros = find_zeros(100.0).unwrap();
        assert_eq!(zeros.len(), 29);
        let u = unfold(&zeros).unwrap();
        assert!(u.x.windows(2).all(|w| w[1] > w[0]));
        assert!((u.x[28] - 28.6).abs() < 0.5, "{}", u.x[28]);
        let one = unfold(&zeros.take(1).unwrap()).unwrap();
        assert_abs_diff_eq!(one.x[0], smooth_count(zeros.ordinates[0]), epsilon = 0.0);
        assert!(one.x[0] > 0.3 && one.x[0] < 0.5, "{}", one.x[0]);
        assert!(unfold(&zeros.take(0).unwrap()).is_err());
    }

    #[test]
    fn gue_density_values() {
        assert_abs_diff_eq!(gue_pair_density(0.5), 1.0 - (2.0 / PI).powi(2), epsilon = 1e-15);
        assert_abs_diff_eq!(gue_pair_density(0.5), 0.5947, epsilon = 1e-4);
        assert_abs_diff_eq!(gue_pair_density(1e4 + 0.5), 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(gue_pair_density(1e-7), (PI * 1e-7).powi(2) / 3.0, epsilon = 1e-20);
    }

    #[test]
    fn pair_correlation_needs_enough_zeros() {
        let u = UnfoldedZeros { x: (0..100).map(|i| i as f64).collect(), mean_spacing: 1.0 };
        assert!(pair_correlation(&u, 2.0, 20).is_err());
    }

    #[test]
    fn pair_correlation_of_a_lattice_prefers_nothing_below_one() {
        // A rigid lattice has no pairs in (0, 1): counts vanish there.
        let u = UnfoldedZeros { x: (0..400).map(|i| i as f64).collect(), mean_spacing: 1.0 };
        let r = pair_correlation(&u, 2.0, 20).unwrap();
        assert!(r.counts[..9].iter().all(|c| *c == 0));
        assert!(r.density.iter().all(|d| *d >= 0.0));
        assert_eq!(r.counts.iter().sum::<usize>(), 399 + 398);
    }

    #[test]
    fn shift_model_examples() {
        let identity = vec![(0, c(1.0, 0.0))];
        let shift = vec![(1, c(1.0, 0.0))];
        let r = shift_model_limit(&[c(0.9, 0.0)], &identity, &[8, 16]).unwrap();
        assert_abs_diff_eq!(r.limit.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.traces[1].re, 1.0, epsilon = 1e-12);
        let r = shift_model_limit(&[c(0.9, 0.0)], &shift, &[16, 32, 64, 128]).unwrap();
        assert_abs_diff_eq!(r.limit.re, 0.9, epsilon = 1e-15);
        assert!(r.deviations[3] < 1e-9, "{:?}", r.deviations);
        let z = Complex64::from_polar(0.8, PI / 3.0);
        let r = shift_model_limit(&[z], &shift, &[64]).unwrap();
        let q = r.poisson_quadrature.unwrap();
        assert!((q.value - z).norm() < 1e-6, "{}", q.value);
        assert!((r.traces[0] - z).norm() < 1e-6);
    }

    #[test]
    fn shift_model_outside_and_on_circle() {
        let f = vec![(1, c(1.0, 0.0)), (-2, c(0.5, 0.25)), (0, c(2.0, 0.0))];
        let z = c(1.3, -0.4);
        let r = shift_model_limit(&[z, c(0.5, 0.2)], &f, &[16, 32, 64, 128]).unwrap();
        let q = r.poisson_quadrature.clone().unwrap();
        assert!((q.value - r.limit).norm() < 1e-9);
        assert!(r.deviations[3] < 1e-8, "{:?}", r.deviations);
        for w in r.deviations.windows(2) {
            assert!(w[1] <= 0.5 * w[0] || w[1] < 1e-12, "{:?}", r.deviations);
        }
        let on = shift_model_limit(&[Complex64::from_polar(1.0, 0.7)], &f, &[256]).unwrap();
        assert!(on.poisson_quadrature.is_none());
        assert!(on.deviations[0] < 0.05, "{:?}", on.deviations);
    }

    #[test]
    fn shift_model_rejects_multiplicity_and_zero() {
        let f = vec![(1, c(1.0, 0.0))];
        let err = shift_model_limit(&[c(0.5, 0.0), c(0.5, 0.0)], &f, &[8]).unwrap_err();
        assert!(err.to_string().contains("repeated"));
        assert!(shift_model_limit(&[c(0.0, 0.0)], &f, &[8]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn closed_form_matches_direct(e in 0.5f64..200.0, l in 1.0f64..30.0) {
            prop_assume!(e / (2.0 * PI) <= l * l);
            let a = semiclassical_area(e, l).unwrap();
            prop_assert!((a.closed_form - a.direct.value).abs() < 1e-3);
        }

        #[test]
        fn unfold_is_monotone(gs in proptest::collection::vec(15.0f64..1e4, 1..40)) {
            let mut gs = gs;
            gs.sort_by(f64::total_cmp);
            gs.dedup();
            let x: Vec<f64> = gs.iter().map(|g| smooth_count(*g)).collect();
            prop_assert!(x.windows(2).all(|w| w[1] > w[0]));
        }
    }
}
