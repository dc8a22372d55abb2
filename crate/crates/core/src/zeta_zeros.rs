//! The Riemann zeta function by Euler–Maclaurin summation, the Riemann–Siegel
//! theta and Z functions, zeros on the critical line and the zero-counting
//! functions `N(E)`, `⟨N(E)⟩` and `N_osc(E)`.

use crate::error::{Error, Result};
use crate::quad::Estimate;
use crate::special::{even_bernoulli_f64, gamma, ln_gamma};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

/// Largest `|Im s|` accepted by [`zeta`].
pub const MAX_HEIGHT: f64 = 1e4;

/// Largest `E_max` accepted by [`find_zeros`].
pub const MAX_ZERO_HEIGHT: f64 = 1e3;

/// Bisection tolerance on zero ordinates.
pub const ZERO_TOLERANCE: f64 = 1e-9;

/// Method tag recorded in zero lists.
pub const METHOD: &str = "euler-maclaurin Z(t) sign changes, bisection, argument-principle count";

const INITIAL_STEP: f64 = 0.1;
const MAX_HALVINGS: u32 = 5;
const GRID_START: f64 = 1.0;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `ζ(s)` with an error bound, by Euler–Maclaurin summation for `Re s ≥ −1/2`
/// and the functional equation otherwise.
pub fn zeta_with_bound(s: Complex64) -> Result<Estimate<Complex64>> {
    if s.im.abs() > MAX_HEIGHT {
        return Err(Error::Domain(format!("|Im s| = {} exceeds the supported range {MAX_HEIGHT}", s.im.abs())));
    }
    if (s - 1.0).norm() == 0.0 {
        return Err(Error::Domain("ζ has a pole at s = 1".into()));
    }
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::Domain(format!("s = {s} is not finite")));
    }
    if s.re < -0.5 {
        // ζ(s) = 2^s π^{s−1} sin(πs/2) Γ(1−s) ζ(1−s).
        let one_minus = c(1.0, 0.0) - s;
        let z = zeta_with_bound(one_minus)?;
        let factor = (s * 2f64.ln()).exp() * ((s - 1.0) * PI.ln()).exp() * (s * (PI / 2.0)).sin() * gamma(one_minus);
        return Ok(Estimate { value: factor * z.value, error: factor.norm() * z.error });
    }
    euler_maclaurin(s)
}

fn euler_maclaurin(s: Complex64) -> Result<Estimate<Complex64>> {
    let n = (s.im.abs() / PI).ceil() as usize + 20;
    let nf = n as f64;
    let mut head = c(0.0, 0.0);
    for k in 1..n {
        head += (-s * (k as f64).ln()).exp();
    }
    let n_pow = (-s * nf.ln()).exp();
    let mut sum = head + n_pow * nf / (s - 1.0) + n_pow * 0.5;
    let b = even_bernoulli_f64();
    // Term k: B_{2k}/(2k)! · s(s+1)…(s+2k−2) · N^{−s−2k+1}.
    let mut rising = s; // s(s+1)…(s+2k−2)
    let mut npow = n_pow / nf; // N^{−s−2k+1}
    let mut fact = 2.0; // (2k)!
    let mut bound = f64::INFINITY;
    for k in 1..=b.len() {
        let term = rising * npow * (b[k - 1] / fact);
        let mag = term.norm();
        if mag < 1e-17 * sum.norm() || k == b.len() {
            // The remainder is bounded by the first omitted term times
            // |s + 2k − 1|/(σ + 2k − 1).
            bound = mag * (s + (2 * k - 1) as f64).norm() / (s.re + (2 * k - 1) as f64);
            break;
        }
        sum += term;
        let kf = k as f64;
        rising *= (s + (2.0 * kf - 1.0)) * (s + 2.0 * kf);
        npow /= nf * nf;
        fact *= (2.0 * kf + 1.0) * (2.0 * kf + 2.0);
    }
    if !bound.is_finite() || bound > 1e-8 * sum.norm().max(1.0) {
        return Err(Error::NotConverged(format!("Euler–Maclaurin remainder {bound:.3e} at s = {s}")));
    }
    Ok(Estimate { value: sum, error: bound + 1e-15 * (n as f64) })
}

/// `ζ(s)`.
pub fn zeta(s: Complex64) -> Result<Complex64> {
    Ok(zeta_with_bound(s)?.value)
}

/// Riemann–Siegel theta `θ(t) = Im log Γ(1/4 + it/2) − (t/2) log π`, with the
/// continuous branch `θ(0) = 0`.
pub fn riemann_siegel_theta(t: f64) -> f64 {
    // log Γ(z) = log Γ(z + 1) − log z keeps every logarithm in Re > 0.
    let z = c(0.25, 0.5 * t);
    (ln_gamma(z + 1.0) - z.ln()).im - 0.5 * t * PI.ln()
}

/// `Z(t) = e^{iθ(t)} ζ(1/2 + it)`, real for real `t`.
pub fn hardy_z(t: f64) -> Result<f64> {
    let v = c(0.0, riemann_siegel_theta(t)).exp() * zeta(c(0.5, t))?;
    if v.im.abs() > 1e-8 * v.re.abs().max(1.0) {
        return Err(Error::NotConverged(format!("Z({t}) has imaginary part {}", v.im)));
    }
    Ok(v.re)
}

/// Completed zeta `ξ(s) = π^{−s/2} Γ(s/2) ζ(s)`.
pub fn completed_zeta(s: Complex64) -> Result<Complex64> {
    Ok((-s * 0.5 * PI.ln()).exp() * gamma(s * 0.5) * zeta(s)?)
}

/// `⟨N(E)⟩ = (E/2π)(log(E/2π) − 1) + 7/8`.
pub fn smooth_count(e: f64) -> f64 {
    let x = e / (2.0 * PI);
    x * (x.ln() - 1.0) + 0.875
}

/// `S(E) = (1/π) arg ζ(1/2 + iE)`, the argument taken by continuous variation
/// along `2 → 2 + iE → 1/2 + iE` starting from 0.
pub fn n_osc(e: f64) -> Result<f64> {
    if !(e > 0.0) {
        return Err(Error::Domain(format!("E must be positive, got {e}")));
    }
    // Re ζ(2 + it) > 0, so the argument on the vertical segment is principal.
    let start = zeta(c(2.0, e))?;
    let mut arg = start.arg();
    let mut prev = start;
    let mut x: f64 = 2.0;
    let mut step: f64 = 0.05;
    while x > 0.5 {
        let nx = (x - step).max(0.5);
        let v = zeta(c(nx, e))?;
        let d = (v / prev).arg();
        if d.abs() > PI / 8.0 && step > 1e-6 {
            step *= 0.5;
            continue;
        }
        if v.norm() < 1e-12 {
            return Err(Error::Domain(format!("ζ vanishes on the path at {nx} + {e}i")));
        }
        arg += d;
        prev = v;
        x = nx;
        if d.abs() < PI / 32.0 {
            step = (step * 1.5).min(0.05);
        }
    }
    Ok(arg / PI)
}

/// `N(E)` by the argument principle: `θ(E)/π + 1 + S(E)`, rounded.
pub fn count_exact(e: f64) -> Result<usize> {
    let v = riemann_siegel_theta(e) / PI + 1.0 + n_osc(e)?;
    let r = v.round();
    if (v - r).abs() > 0.25 {
        return Err(Error::NotConverged(format!("argument-principle count {v} at E = {e} is not near an integer")));
    }
    Ok(r.max(0.0) as usize)
}

/// Ordinates `0 < γ₁ < γ₂ < …` of critical-line zeros below `e_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroList {
    pub ordinates: Vec<f64>,
    pub brackets: Vec<f64>,
    pub e_max: f64,
    pub method: String,
    pub tolerance: f64,
}

impl ZeroList {
    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    /// Number of listed zeros with ordinate below `e` (`e ≤ e_max`).
    pub fn count_below(&self, e: f64) -> usize {
        self.ordinates.partition_point(|g| *g < e)
    }

    /// The first `n` zeros.
    pub fn take(&self, n: usize) -> Result<ZeroList> {
        if n > self.len() {
            return Err(Error::InvalidInput(format!("requested {n} zeros but only {} are listed", self.len())));
        }
        let e_max = if n == self.len() {
            self.e_max
        } else if n == 0 {
            0.5 * self.ordinates[0]
        } else {
            0.5 * (self.ordinates[n - 1] + self.ordinates[n])
        };
        Ok(ZeroList {
            ordinates: self.ordinates[..n].to_vec(),
            brackets: self.brackets[..n].to_vec(),
            e_max,
            method: self.method.clone(),
            tolerance: self.tolerance,
        })
    }

    /// Restriction to zeros below `e` (`e ≤ e_max`).
    pub fn truncate(&self, e: f64) -> Result<ZeroList> {
        if e > self.e_max {
            return Err(Error::InvalidInput(format!("list only covers E < {}", self.e_max)));
        }
        let n = self.count_below(e);
        let mut out = self.take(n)?;
        out.e_max = e;
        Ok(out)
    }

    /// Writes the list as CSV with `#` header lines carrying the method and
    /// tolerance.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let io = |e: std::io::Error| Error::InvalidInput(format!("writing {}: {e}", path.display()));
        let mut out = String::new();
        out.push_str(&format!("# method: {}\n# tolerance: {:e}\n# e_max: {:.17e}\n", self.method, self.tolerance, self.e_max));
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["ordinate", "bracket"]).map_err(csv_err)?;
        for (g, b) in self.ordinates.iter().zip(&self.brackets) {
            w.write_record([format!("{g:.17e}"), format!("{b:.3e}")]).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
        out.push_str(&String::from_utf8_lossy(&bytes));
        std::fs::write(path, out).map_err(io)
    }

    /// Reads a list written by [`ZeroList::write_csv`].
    pub fn read_csv(path: &Path) -> Result<ZeroList> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("reading {}: {e}", path.display())))?;
        let mut method = None;
        let mut tolerance = None;
        let mut e_max = None;
        for line in text.lines().filter(|l| l.starts_with('#')) {
            let body = line.trim_start_matches('#').trim();
            if let Some(v) = body.strip_prefix("method:") {
                method = Some(v.trim().to_string());
            } else if let Some(v) = body.strip_prefix("tolerance:") {
                tolerance = v.trim().parse::<f64>().ok();
            } else if let Some(v) = body.strip_prefix("e_max:") {
                e_max = v.trim().parse::<f64>().ok();
            }
        }
        let (method, tolerance, e_max) = match (method, tolerance, e_max) {
            (Some(m), Some(t), Some(e)) => (m, t, e),
            _ => return Err(Error::InvalidInput(format!("{} lacks the method/tolerance/e_max header", path.display()))),
        };
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let mut ordinates = Vec::new();
        let mut brackets = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(csv_err)?;
            let parse = |i: usize| -> Result<f64> {
                rec.get(i).and_then(|s| s.trim().parse::<f64>().ok()).ok_or_else(|| Error::InvalidInput(format!("bad CSV record {rec:?}")))
            };
            ordinates.push(parse(0)?);
            brackets.push(parse(1)?);
        }
        if ordinates.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("cached ordinates are not strictly increasing".into()));
        }
        Ok(ZeroList { ordinates, brackets, e_max, method, tolerance })
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidInput(format!("CSV: {e}"))
}

fn bisect(mut a: f64, mut b: f64, mut za: f64) -> Result<(f64, f64)> {
    while b - a > ZERO_TOLERANCE {
        let m = 0.5 * (a + b);
        let zm = hardy_z(m)?;
        if zm == 0.0 {
            return Ok((m, 0.0));
        }
        if (zm > 0.0) == (za > 0.0) {
            a = m;
            za = zm;
        } else {
            b = m;
        }
    }
    Ok((0.5 * (a + b), b - a))
}

/// All zeros `0 < γ < e_max` on the critical line: sign changes of `Z` on a
/// grid, refined by bisection, with the total count checked against the
/// argument principle (the grid is halved on a mismatch).
pub fn find_zeros(e_max: f64) -> Result<ZeroList> {
    if !(e_max > 0.0) || e_max > MAX_ZERO_HEIGHT {
        return Err(Error::Domain(format!("E_max must lie in (0, {MAX_ZERO_HEIGHT}], got {e_max}")));
    }
    let expected = if e_max <= GRID_START { 0 } else { count_exact(e_max)? };
    let mut step = INITIAL_STEP;
    for _ in 0..=MAX_HALVINGS {
        let n = ((e_max - GRID_START) / step).ceil().max(1.0) as usize;
        let grid: Vec<f64> = (0..=n).map(|k| (GRID_START + k as f64 * step).min(e_max)).collect();
        let values = grid.par_iter().map(|t| hardy_z(*t)).collect::<Result<Vec<f64>>>()?;
        let cells: Vec<usize> = (0..n).filter(|&k| values[k] != 0.0 && (values[k] > 0.0) != (values[k + 1] > 0.0)).collect();
        if cells.len() == expected {
            let refined = cells.par_iter().map(|&k| bisect(grid[k], grid[k + 1], values[k])).collect::<Result<Vec<(f64, f64)>>>()?;
            let (ordinates, brackets): (Vec<f64>, Vec<f64>) = refined.into_iter().unzip();
            return Ok(ZeroList { ordinates, brackets, e_max, method: METHOD.into(), tolerance: ZERO_TOLERANCE });
        }
        step *= 0.5;
    }
    Err(Error::NotConverged(format!(
        "sign changes of Z below {e_max} never matched the argument-principle count {expected} down to step {:.2e}",
        step * 2.0
    )))
}

/// Loads zeros below `e_max` from `cache_dir` if a cached list covers them,
/// otherwise computes and caches them.
pub fn zeros_cached(e_max: f64, cache_dir: Option<&Path>) -> Result<ZeroList> {
    let Some(dir) = cache_dir else {
        return find_zeros(e_max);
    };
    if let Ok(entries) = std::fs::read_dir(dir) {
        let mut best: Option<ZeroList> = None;
        for entry in entries.flatten() {
            let path = entry.path();
            if path.extension().and_then(|e| e.to_str()) != Some("csv") {
                continue;
            }
            if let Ok(list) = ZeroList::read_csv(&path) {
                if list.e_max >= e_max
                    && list.tolerance <= ZERO_TOLERANCE
                    && list.method == METHOD
                    && best.as_ref().is_none_or(|b| b.e_max > list.e_max)
                {
                    best = Some(list);
                }
            }
        }
        if let Some(list) = best {
            return list.truncate(e_max);
        }
    }
    let list = find_zeros(e_max)?;
    std::fs::create_dir_all(dir).map_err(|e| Error::InvalidInput(format!("creating {}: {e}", dir.display())))?;
    list.write_csv(&dir.join(format!("zeros_{:.0}.csv", e_max.ceil())))?;
    Ok(list)
}

/// `N(E)` with its smooth and oscillatory parts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountingReport {
    pub e: f64,
    pub n_exact: usize,
    pub smooth: f64,
    pub n_osc: f64,
}

impl CountingReport {
    /// Whether the rounded sum `⟨N⟩ + N_osc` reproduces the zero count.
    pub fn consistent(&self) -> bool {
        (self.smooth + self.n_osc).round() as i64 == self.n_exact as i64
    }
}

/// Counting functions at `E`, with `N_exact` from the zeros located below `E`.
pub fn counting_functions(e: f64) -> Result<CountingReport> {
    if !(e > 0.0) {
        return Err(Error::Domain(format!("E must be positive, got {e}")));
    }
    let zeros = find_zeros(e)?;
    counting_functions_with(e, &zeros)
}

/// Counting functions at `E` using an existing zero list covering `E`.
pub fn counting_functions_with(e: f64, zeros: &ZeroList) -> Result<CountingReport> {
    if e > zeros.e_max {
        return Err(Error::InvalidInput(format!("zero list covers E < {} only", zeros.e_max)));
    }
    if let Some(g) = zeros.ordinates.iter().find(|g| (*g - e).abs() < 1e-6) {
        return Err(Error::Domain(format!("E = {e} lies within the bracket of the zero {g}")));
    }
    let report = CountingReport { e, n_exact: zeros.count_below(e), smooth: smooth_count(e), n_osc: n_osc(e)? };
    if !report.consistent() {
        return Err(Error::NotConverged(format!(
            "round(⟨N⟩ + N_osc) = round({} + {}) differs from the zero count {}",
            report.smooth, report.n_osc, report.n_exact
        )));
    }
    Ok(report)
}
