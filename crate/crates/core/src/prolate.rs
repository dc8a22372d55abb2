//! Prolate spheroidal analysis of the bandlimiting operator on ℝ.
//!
//! After the substitution `x = Λt` the operator
//! `−∂((Λ² − x²)∂) + (2πΛx)²` on `[−Λ, Λ]` becomes
//! `L_c = −∂_t((1 − t²)∂_t) + c² t²` on `[−1, 1]` with `c = 2πΛ²`. It commutes
//! with the time-and-band limiting operator whose kernel is
//! `sin(c(t − s))/(π(t − s))`, and the eigenvalues `λ_n` of the latter
//! plunge from 1 to 0 around `n ≈ 2c/π = 4Λ²`.
//!
//! `L_c` is discretized in the orthonormal Legendre basis, where it is
//! pentadiagonal and splits into even and odd blocks. Each `λ_n` is the
//! Rayleigh quotient of the kernel on the corresponding eigenfunction.

use crate::error::{Error, Result};
use crate::quad::GaussLegendre;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;
use std::f64::consts::PI;

/// Relative shift of `χ_n` between `dim` and `2·dim` above which the
/// discretization counts as unresolved.
const CHI_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

/// Which eigenfunctions to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sector {
    All,
    Even,
}

/// Spectrum of `L_c` and of the bandlimiting operator, indexed by `n`.
#[derive(Debug, Clone, Serialize)]
pub struct ProlateSpectrum {
    /// The cutoff `Λ` (for spectra built from `c` directly, `√(c/2π)`).
    pub lambda: f64,
    /// `c = 2πΛ²`.
    pub bandwidth: f64,
    /// Legendre basis dimension of the reported solve.
    pub dim: usize,
    /// `χ_n`, ascending.
    pub chi: Vec<f64>,
    /// `λ_n ∈ [0, 1]`, descending.
    pub eigenvalues: Vec<f64>,
    pub parity: Vec<Parity>,
    /// Largest relative change of a reported `χ_n` between `dim` and `2·dim`.
    pub chi_shift: f64,
    /// `max_n ‖Kψ_n − λ_n ψ_n‖`: the eigenfunctions of `L_c` are those of the kernel.
    pub commutation_residual: f64,
    /// `max |⟨ψ_m, ψ_n⟩ − δ_mn|` on the quadrature grid.
    pub orthonormality_defect: f64,
}

impl ProlateSpectrum {
    /// `#{n : λ_n > 1/2}`.
    pub fn count_above_half(&self) -> usize {
        self.eigenvalues.iter().filter(|l| **l > 0.5).count()
    }

    /// `#{n : 0.05 < λ_n < 0.95}`.
    pub fn plunge_width(&self) -> usize {
        self.eigenvalues.iter().filter(|l| **l > 0.05 && **l < 0.95).count()
    }
}

/// Entries of `L_c` in the orthonormal Legendre basis: `(diagonal, coupling
/// of k with k + 2)`.
fn galerkin_entries(c: f64, k: usize) -> (f64, f64) {
    let k = k as f64;
    let c2 = c * c;
    let diag = k * (k + 1.0) + c2 * (2.0 * k * k + 2.0 * k - 1.0) / ((2.0 * k - 1.0) * (2.0 * k + 3.0));
    let off = c2 * (k + 1.0) * (k + 2.0) / ((2.0 * k + 3.0) * ((2.0 * k + 1.0) * (2.0 * k + 5.0)).sqrt());
    (diag, off)
}

/// Eigenpairs of one parity block; the coefficient vectors are over the
/// Legendre degrees `parity, parity + 2, …` below `dim`.
fn solve_block(c: f64, dim: usize, parity: usize) -> (Vec<f64>, DMatrix<f64>) {
    let degrees: Vec<usize> = (parity..dim).step_by(2).collect();
    let m = degrees.len();
    let mut a = DMatrix::zeros(m, m);
    for (i, &k) in degrees.iter().enumerate() {
        let (d, off) = galerkin_entries(c, k);
        a[(i, i)] = d;
        if i + 1 < m {
            a[(i, i + 1)] = off;
            a[(i + 1, i)] = off;
        }
    }
    let eig = SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|x, y| eig.eigenvalues[*x].total_cmp(&eig.eigenvalues[*y]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(m, m);
    for (col, &i) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).into_owned();
        // Fix the sign so that the leading coefficient of largest size is positive.
        let (imax, _) = v.iter().enumerate().fold((0, 0.0), |acc, (j, x)| if x.abs() > acc.1 { (j, x.abs()) } else { acc });
        if v[imax] < 0.0 {
            v.neg_mut();
        }
        vectors.set_column(col, &v);
    }
    (values, vectors)
}

/// Merged spectrum `(χ_n, parity, coefficient vector over all degrees < dim)`.
fn solve_operator(c: f64, dim: usize, sector: Sector) -> Vec<(f64, Parity, DVector<f64>)> {
    let mut out = Vec::new();
    let parities: &[usize] = match sector {
        Sector::All => &[0, 1],
        Sector::Even => &[0],
    };
    for &par in parities {
        let (values, vectors) = solve_block(c, dim, par);
        for (j, chi) in values.iter().enumerate() {
            let mut full = DVector::zeros(dim);
            for (i, k) in (par..dim).step_by(2).enumerate() {
                full[k] = vectors[(i, j)];
            }
            out.push((*chi, if par == 0 { Parity::Even } else { Parity::Odd }, full));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Values `P̄_k(t_i)` of the orthonormal Legendre polynomials, `M × dim`.
fn legendre_matrix(nodes: &[f64], dim: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(nodes.len(), dim);
    for (i, &t) in nodes.iter().enumerate() {
        let mut p0 = 1.0;
        let mut p1 = t;
        for k in 0..dim {
            let pk = if k == 0 {
                1.0
            } else if k == 1 {
                t
            } else {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
                p2
            };
            m[(i, k)] = pk * ((2.0 * k as f64 + 1.0) / 2.0).sqrt();
        }
    }
    m
}

/// `√w_i K(t_i, t_j) √w_j` for the kernel `sin(c(t − s))/(π(t − s))`.
fn kernel_matrix(c: f64, rule: &GaussLegendre) -> DMatrix<f64> {
    let m = rule.nodes.len();
    DMatrix::from_fn(m, m, |i, j| {
        let d = rule.nodes[i] - rule.nodes[j];
        let k = if d == 0.0 { c / PI } else { (c * d).sin() / (PI * d) };
        rule.weights[i].sqrt() * k * rule.weights[j].sqrt()
    })
}

/// Quadrature size resolving the kernel and the eigenfunctions.
fn quadrature_size(c: f64, dim: usize) -> usize {
    ((2.0 * c) as usize + 80).max(dim + 20)
}

/// Spectrum for the bandwidth `c` directly.
pub fn solve_bandwidth(c: f64, dim: usize, sector: Sector) -> Result<ProlateSpectrum> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidInput(format!("bandwidth must be positive, got {c}")));
    }
    if dim < 16 {
        return Err(Error::InvalidInput(format!("basis dimension must be at least 16, got {dim}")));
    }
    let coarse = solve_operator(c, dim, sector);
    let fine = solve_operator(c, 2 * dim, sector);
    let keep = match sector {
        Sector::All => dim / 2,
        Sector::Even => dim / 4,
    };
    let mut chi_shift: f64 = 0.0;
    for n in 0..keep {
        chi_shift = chi_shift.max((coarse[n].0 - fine[n].0).abs() / fine[n].0.abs().max(1.0));
    }
    if chi_shift > CHI_TOLERANCE {
        return Err(Error::NotConverged(format!(
            "prolate eigenvalues move by {chi_shift:.3e} (relative) between dimensions {dim} and {}; increase the dimension",
            2 * dim
        )));
    }
    let rule = GaussLegendre::new(quadrature_size(c, 2 * dim));
    let sqrt_w = DVector::from_iterator(rule.weights.len(), rule.weights.iter().map(|w| w.sqrt()));
    let basis = legendre_matrix(&rule.nodes, 2 * dim);
    let kernel = kernel_matrix(c, &rule);
    let mut phis: Vec<DVector<f64>> = Vec::with_capacity(keep);
    let mut eigenvalues = Vec::with_capacity(keep);
    let mut residual: f64 = 0.0;
    for (_, _, coeffs) in fine.iter().take(keep) {
        let phi = (&basis * coeffs).component_mul(&sqrt_w);
        let kphi = &kernel * &phi;
        let lam = phi.dot(&kphi) / phi.dot(&phi);
        residual = residual.max((&kphi - &phi * lam).norm());
        eigenvalues.push(lam.clamp(0.0, 1.0));
        phis.push(phi);
    }
    let mut defect: f64 = 0.0;
    for i in 0..phis.len() {
        for j in 0..=i {
            let target = if i == j { 1.0 } else { 0.0 };
            defect = defect.max((phis[i].dot(&phis[j]) - target).abs());
        }
    }
    Ok(ProlateSpectrum {
        lambda: (c / (2.0 * PI)).sqrt(),
        bandwidth: c,
        dim: 2 * dim,
        chi: fine.iter().take(keep).map(|t| t.0).collect(),
        eigenvalues,
        parity: fine.iter().take(keep).map(|t| t.1).collect(),
        chi_shift,
        commutation_residual: residual,
        orthonormality_defect: defect,
    })
}

/// Spectrum of `H_Λ` and of `P_Λ P̂_Λ P_Λ` (both parities), with `c = 2πΛ²`.
pub fn solve_hlambda(lambda: f64, dim: usize) -> Result<ProlateSpectrum> {
    solve_hlambda_sector(lambda, dim, Sector::All)
}

/// As [`solve_hlambda`], optionally restricted to even eigenfunctions.
pub fn solve_hlambda_sector(lambda: f64, dim: usize, sector: Sector) -> Result<ProlateSpectrum> {
    if !(0.5..=4.0).contains(&lambda) {
        return Err(Error::InvalidInput(format!("Λ must lie in [0.5, 4], got {lambda}")));
    }
    if dim < 64 {
        return Err(Error::InvalidInput(format!("basis dimension must be at least 64, got {dim}")));
    }
    let mut s = solve_bandwidth(2.0 * PI * lambda * lambda, dim, sector)?;
    s.lambda = lambda;
    Ok(s)
}

/// Eigenvalues of `P̂_a P_b` (kernel `sin(2πa(x − y))/(π(x − y))` on
/// `[−b, b]`) by Nyström discretization with `m` Gauss–Legendre nodes,
/// descending. They depend on `a·b` only.
pub fn nystrom_eigenvalues(a: f64, b: f64, m: usize) -> Result<Vec<f64>> {
    if !(a > 0.0 && b > 0.0) || m < 2 {
        return Err(Error::InvalidInput(format!("need a, b > 0 and at least two nodes, got a = {a}, b = {b}, m = {m}")));
    }
    let rule = GaussLegendre::new(m);
    let x: Vec<f64> = rule.nodes.iter().map(|t| b * t).collect();
    let w: Vec<f64> = rule.weights.iter().map(|v| b * v).collect();
    let k = DMatrix::from_fn(m, m, |i, j| {
        let d = x[i] - x[j];
        let kij = if d == 0.0 { 2.0 * a } else { (2.0 * PI * a * d).sin() / (PI * d) };
        w[i].sqrt() * kij * w[j].sqrt()
    });
    let mut ev: Vec<f64> = SymmetricEigen::new(k).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    Ok(ev)
}

/// Least-squares fit `width ≈ a + b log Λ` of the plunge widths.
#[derive(Debug, Clone, Serialize)]
pub struct PlungeFit {
    pub lambdas: Vec<f64>,
    pub widths: Vec<usize>,
    pub intercept: f64,
    pub slope: f64,
    pub residuals: Vec<f64>,
}

pub fn plunge_width(spectra: &[ProlateSpectrum]) -> Result<PlungeFit> {
    let mut pts: Vec<(f64, usize)> = spectra.iter().map(|s| (s.lambda, s.plunge_width())).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| a.0 == b.0);
    if pts.len() < 3 {
        return Err(Error::InvalidInput(format!("a plunge fit needs at least three distinct Λ, got {}", pts.len())));
    }
    if let Some(s) = spectra.iter().find(|s| s.chi_shift > CHI_TOLERANCE) {
        return Err(Error::NotConverged(format!("spectrum at Λ = {} is not resolved", s.lambda)));
    }
    let n = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1 as f64).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    Ok(PlungeFit {
        lambdas: pts.iter().map(|p| p.0).collect(),
        widths: pts.iter().map(|p| p.1).collect(),
        intercept,
        slope,
        residuals: xs.iter().zip(&ys).map(|(x, y)| y - intercept - slope * x).collect(),
    })
}

/// Gap probabilities of the sine kernel on an interval of length `s`:
/// `E(0, s) = ∏(1 − λ_j)` and `E(n, s) = E(0, s)·e_n(λ/(1 − λ))`.
#[derive(Debug, Clone, Serialize)]
pub struct GapProbability {
    pub s: f64,
    /// `E(0, s), E(1, s), E(2, s)`.
    pub e: [f64; 3],
    pub eigenvalues: Vec<f64>,
}

/// Gap probabilities from the prolate eigenvalues with `c = πs/2`.
pub fn gap_probability(s: f64) -> Result<GapProbability> {
    if !(s > 0.0 && s <= 2.0) {
        return Err(Error::InvalidInput(format!("gap probabilities are computed for 0 < s ≤ 2, got {s}")));
    }
    let spec = solve_bandwidth(PI * s / 2.0, 32, Sector::All)?;
    let lam = spec.eigenvalues;
    let last = *lam.last().expect("nonempty spectrum");
    if last > 1e-15 {
        return Err(Error::Truncation(format!("smallest retained eigenvalue {last:.3e} is not negligible")));
    }
    let e0: f64 = lam.iter().map(|l| 1.0 - l).product();
    let mu: Vec<f64> = lam.iter().map(|l| l / (1.0 - l)).collect();
    // Elementary symmetric functions e_1, e_2 of μ.
    let e1: f64 = mu.iter().sum();
    let sq: f64 = mu.iter().map(|m| m * m).sum();
    let e2 = 0.5 * (e1 * e1 - sq);
    Ok(GapProbability { s, e: [e0, e0 * e1, e0 * e2], eigenvalues: lam })
}

/// `E(0, s) = det(I − K_sine)` on `[0, s]` by the Nyström determinant with
/// `m` Gauss–Legendre nodes.
pub fn gap_probability_nystrom(s: f64, m: usize) -> Result<f64> {
    let rule = GaussLegendre::new(m);
    let x: Vec<f64> = rule.nodes.iter().map(|t| 0.5 * s * (t + 1.0)).collect();
    let w: Vec<f64> = rule.weights.iter().map(|v| 0.5 * s * v).collect();
    let a = DMatrix::from_fn(m, m, |i, j| {
        let d = x[i] - x[j];
        let k = if d == 0.0 { 1.0 } else { (PI * d).sin() / (PI * d) };
        let delta = if i == j { 1.0 } else { 0.0 };
        delta - w[i].sqrt() * k * w[j].sqrt()
    });
    Ok(a.determinant())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::legendre_with_derivative;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn legendre_check(n: usize, t: f64) -> f64 {
        legendre_with_derivative(n, t).0
    }

    #[test]
    fn legendre_basis_values() {
        let m = legendre_matrix(&[0.3, -0.7], 6);
        for (i, t) in [0.3, -0.7].iter().enumerate() {
            for k in 0..6 {
                assert_abs_diff_eq!(m[(i, k)], legendre_check(k, *t) * ((2.0 * k as f64 + 1.0) / 2.0).sqrt(), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn plunge_count_at_one_and_two() {
        let s1 = solve_hlambda(1.0, 128).unwrap();
        assert!((3..=5).contains(&s1.count_above_half()), "{}", s1.count_above_half());
        let s2 = solve_hlambda(2.0, 128).unwrap();
        assert!((14..=18).contains(&s2.count_above_half()), "{}", s2.count_above_half());
        assert!(s1.eigenvalues[0] > 0.99);
    }

    #[test]
    fn spectrum_invariants() {
        let s = solve_hlambda(1.5, 128).unwrap();
        for (n, p) in s.parity.iter().enumerate() {
            assert_eq!(*p, if n % 2 == 0 { Parity::Even } else { Parity::Odd }, "n = {n}");
        }
        assert!(s.chi.windows(2).all(|w| w[1] > w[0]));
        assert!(s.chi[0] > 0.0);
        let significant: Vec<f64> = s.eigenvalues.iter().copied().take_while(|l| *l > 1e-12).collect();
        assert!(significant.windows(2).all(|w| w[1] < w[0]));
        assert!(s.commutation_residual < 1e-6, "{}", s.commutation_residual);
        assert!(s.orthonormality_defect < 1e-10, "{}", s.orthonormality_defect);
        // χ_n ~ n² on the tail.
        let n = s.chi.len() - 1;
        let ratio = s.chi[n] / (n * (n + 1)) as f64;
        assert!((ratio - 1.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn nystrom_oracle_agrees_and_depends_on_product() {
        let s = solve_hlambda(1.0, 96).unwrap();
        let a = nystrom_eigenvalues(1.0, 1.0, 80).unwrap();
        let b = nystrom_eigenvalues(2.0, 0.5, 80).unwrap();
        let c = nystrom_eigenvalues(0.25, 4.0, 80).unwrap();
        for n in 0..12 {
            assert_abs_diff_eq!(a[n], b[n], epsilon = 1e-8);
            assert_abs_diff_eq!(a[n], c[n], epsilon = 1e-8);
            assert_abs_diff_eq!(a[n], s.eigenvalues[n], epsilon = 1e-8);
        }
    }

    #[test]
    fn unresolved_dimension_is_an_error() {
        assert!(matches!(solve_hlambda(4.0, 64), Err(Error::NotConverged(_))));
        assert!(solve_hlambda(0.4, 64).is_err());
        assert!(solve_hlambda(1.0, 32).is_err());
    }

    #[test]
    fn plunge_fit() {
        let spectra: Vec<_> = [1.0, 1.5, 2.0, 3.0, 4.0].iter().map(|l| solve_hlambda(*l, 256).unwrap()).collect();
        let fit = plunge_width(&spectra).unwrap();
        assert!(fit.widths.iter().all(|w| *w >= 1));
        assert!(fit.slope > 0.0);
        for (i, l) in fit.lambdas.iter().enumerate() {
            if let Some(j) = fit.lambdas.iter().position(|m| (m - 2.0 * l).abs() < 1e-12) {
                if *l > 1.0 {
                    let bound = (2.0 * l).ln() / l.ln() + 0.5;
                    assert!((fit.widths[j] as f64) / (fit.widths[i] as f64) <= bound);
                }
            }
        }
        assert!(plunge_width(&spectra[..1]).is_err());
    }

    #[test]
    fn gap_probability_against_nystrom() {
        let g = gap_probability(1.0).unwrap();
        let oracle = gap_probability_nystrom(1.0, 40).unwrap();
        assert_abs_diff_eq!(g.e[0], oracle, epsilon = 1e-10);
        assert_abs_diff_eq!(g.e[0], 0.170_217_421_4, epsilon = 1e-8);
        let small = gap_probability(0.01).unwrap();
        assert!(small.e[0] > 0.98);
        assert_abs_diff_eq!(small.e.iter().sum::<f64>(), 1.0, epsilon = 1e-6);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn gap_probability_decreases(s in 0.05f64..1.9, ds in 0.01f64..0.1) {
            let a = gap_probability(s).unwrap().e[0];
            let b = gap_probability(s + ds).unwrap().e[0];
            prop_assert!(b < a);
        }
    }
}
