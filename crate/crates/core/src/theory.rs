//! Closed-form and quadrature predictions for `G(n, α, d)`.
//!
//! Combinatorial factors go through `ln Γ` and anything with `n` in an
//! exponent is evaluated in log space, so the formulas stay finite for
//! `n` up to ~10^8.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{DrggError, Result};
use crate::geometry::{ball_volume_unchecked, min_radius, pareto_normalizer};
use crate::quad::{integrate_split, Tolerance};

/// `β = (α - 1) / d`.
pub fn beta(alpha: f64, d: usize) -> f64 {
    (alpha - 1.0) / d as f64
}

fn check_alpha(alpha: f64, d: usize) -> Result<()> {
    if d == 0 {
        return Err(DrggError::invalid("dimension must be at least 1"));
    }
    if !(alpha > d as f64 + 1.0) || !alpha.is_finite() {
        return Err(DrggError::domain(format!("alpha = {alpha} must be finite and exceed d + 1 = {}", d + 1)));
    }
    Ok(())
}

fn model_radius(n: usize, alpha: f64, d: usize) -> Result<f64> {
    check_alpha(alpha, d)?;
    min_radius(n, d)
}

fn ln_choose(n: f64, k: f64) -> f64 {
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

/// Probability `z` that a fixed vertex lies in the ball of another:
/// `∫ η r^-α V_d r^d dr` over `[r0, 1/2]`, in closed form.
pub fn edge_prob_exact(n: usize, alpha: f64, d: usize) -> Result<f64> {
    let r0 = model_radius(n, alpha, d)?;
    let a = alpha - 1.0;
    let e = a - d as f64;
    let ln2r0 = (2.0 * r0).ln();
    // z = V a r0^d (1 - (2 r0)^e) / (e (1 - (2 r0)^a)), rearranged from η V (r0^-e - 2^e) / e
    let num = -(e * ln2r0).exp_m1();
    let den = -(a * ln2r0).exp_m1();
    Ok(ball_volume_unchecked(d) * a * r0.powi(d as i32) * num / (e * den))
}

/// Leading term `((α-1)/(α-1-d)) ln n / n`.
pub fn edge_prob_asymptotic(n: usize, alpha: f64, d: usize) -> Result<f64> {
    check_alpha(alpha, d)?;
    let nf = n as f64;
    Ok(asymptotic_coefficient(alpha, d) * nf.ln() / nf)
}

/// `(α - 1) / (α - 1 - d)`.
pub fn asymptotic_coefficient(alpha: f64, d: usize) -> f64 {
    (alpha - 1.0) / (alpha - 1.0 - d as f64)
}

/// Order of the neglected correction, `(ln n / n)^(β - 1)`.
pub fn edge_prob_correction_order(n: usize, alpha: f64, d: usize) -> f64 {
    let nf = n as f64;
    (nf.ln() / nf).powf(beta(alpha, d) - 1.0)
}

/// `n (n - 1) z`.
pub fn expected_edges(n: usize, alpha: f64, d: usize) -> Result<f64> {
    let z = edge_prob_exact(n, alpha, d)?;
    Ok(n as f64 * (n as f64 - 1.0) * z)
}

/// Power-law exponent of the indegree tail, `β + 1`.
pub fn indegree_exponent(alpha: f64, d: usize) -> f64 {
    beta(alpha, d) + 1.0
}

/// `P[indegree = k]`, integrating the binomial over the radius law (in `u = V_d r^d`).
///
/// Uses `n - 1` candidate in-neighbors.
pub fn indegree_pdf_exact(n: usize, alpha: f64, d: usize, k: usize) -> Result<f64> {
    let r0 = model_radius(n, alpha, d)?;
    if k + 1 > n {
        return Err(DrggError::invalid(format!("k = {k} outside [0, {}]", n - 1)));
    }
    Ok(indegree_pdf_exact_unchecked(n, alpha, d, k, r0))
}

fn indegree_pdf_exact_unchecked(n: usize, alpha: f64, d: usize, k: usize, r0: f64) -> f64 {
    let b = beta(alpha, d);
    let vd = ball_volume_unchecked(d);
    let eta = pareto_normalizer(alpha, r0).expect("validated radius law");
    let others = (n - 1) as f64;
    let kf = k as f64;
    let lo = vd * r0.powi(d as i32);
    let hi = vd / 2f64.powi(d as i32);
    let prefactor = (eta / d as f64).ln() + ln_choose(others, kf) + b * vd.ln();
    let p_up = kf - 1.0 - b;
    let p_down = others - kf;
    let log_kernel = |u: f64| {
        let down = if p_down == 0.0 { 0.0 } else { p_down * (-u).ln_1p() };
        p_up * u.ln() + down
    };
    let peak = if p_up > 0.0 { p_up / (p_up + p_down) } else { lo };
    let peak = peak.clamp(lo, hi);
    let top = log_kernel(peak);
    if !top.is_finite() {
        return 0.0;
    }
    let width = (peak * (1.0 - peak) / others.max(1.0)).sqrt().max(1e-300);
    let breaks: Vec<f64> =
        [-30.0, -10.0, -4.0, -1.0, 0.0, 1.0, 4.0, 10.0, 30.0].iter().map(|s| peak + s * width).collect();
    let mass = integrate_split(|u| (log_kernel(u) - top).exp(), lo, hi, &breaks, Tolerance { abs: 1e-300, rel: 1e-11 });
    (prefactor + top).exp() * mass
}

/// Exact indegree distribution for `k = 0..n-1`.
pub fn indegree_pmf_exact(n: usize, alpha: f64, d: usize) -> Result<Vec<f64>> {
    let r0 = model_radius(n, alpha, d)?;
    Ok((0..n).into_par_iter().map(|k| indegree_pdf_exact_unchecked(n, alpha, d, k, r0)).collect())
}

/// Logarithm of the unnormalized steepest-descent estimate of `P[indegree = k]`,
/// evaluated with `N = n - 1` candidate in-neighbors; `None` at `k = N` where it vanishes.
pub fn indegree_log_approx(n: usize, alpha: f64, d: usize, k: usize) -> Result<Option<f64>> {
    let r0 = model_radius(n, alpha, d)?;
    let b = beta(alpha, d);
    let kf = k as f64;
    let big_n = (n - 1) as f64;
    if !(kf > b + 1.0) || k > n - 1 {
        return Err(DrggError::domain(format!(
            "saddle point outside the domain: need beta + 1 = {:.4} < k <= {}",
            b + 1.0,
            n - 1
        )));
    }
    if kf == big_n {
        return Ok(None);
    }
    let eta = pareto_normalizer(alpha, r0)?;
    let vd = ball_volume_unchecked(d);
    let log = (eta / d as f64).ln()
        + ln_choose(big_n, kf)
        + b * vd.ln()
        + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + (kf - b - 0.5) * (kf - b - 1.0).ln()
        + (big_n - kf + 0.5) * (big_n - kf).ln()
        - (big_n - b + 0.5) * (big_n - b - 1.0).ln();
    Ok(Some(log))
}

/// Smallest `k` whose saddle point `(k - 1 - β) / (n - 2 - β)` lies inside the
/// integration range `[V_d r0^d, V_d / 2^d]`; below it the estimate ignores the
/// truncation of the radius law and overshoots.
pub fn saddle_point_inside_from(n: usize, alpha: f64, d: usize) -> Result<usize> {
    let r0 = model_radius(n, alpha, d)?;
    let b = beta(alpha, d);
    let lo = ball_volume_unchecked(d) * r0.powi(d as i32);
    let span = (n - 1) as f64 - 1.0 - b;
    Ok((1.0 + b + lo * span).ceil() as usize)
}

/// Steepest-descent indegree distribution renormalized over `k ∈ (β + 1, n - 1]`,
/// as `(k, probability)` pairs in ascending `k`.
pub fn indegree_pmf_approx(n: usize, alpha: f64, d: usize) -> Result<Vec<(usize, f64)>> {
    model_radius(n, alpha, d)?;
    let first = (beta(alpha, d) + 1.0).floor() as usize + 1;
    let logs: Vec<(usize, f64)> =
        (first..n).filter_map(|k| indegree_log_approx(n, alpha, d, k).ok().flatten().map(|l| (k, l))).collect();
    let top = logs.iter().map(|&(_, l)| l).fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<(usize, f64)> = logs.into_iter().map(|(k, l)| (k, (l - top).exp())).collect();
    if first <= n - 1 {
        out.push((n - 1, 0.0));
    }
    out.dedup_by_key(|p| p.0);
    let total: f64 = out.iter().map(|p| p.1).sum();
    for p in &mut out {
        p.1 /= total;
    }
    Ok(out)
}

/// One value of the renormalized steepest-descent distribution.
pub fn indegree_pdf_approx(n: usize, alpha: f64, d: usize, k: usize) -> Result<f64> {
    indegree_log_approx(n, alpha, d, k)?;
    let pmf = indegree_pmf_approx(n, alpha, d)?;
    Ok(pmf.iter().find(|p| p.0 == k).map_or(0.0, |p| p.1))
}

fn double_factorial(m: usize) -> f64 {
    (1..=m).rev().step_by(2).map(|x| x as f64).product()
}

fn require_odd(d: usize) -> Result<()> {
    if d == 0 {
        return Err(DrggError::invalid("dimension must be at least 1"));
    }
    if d % 2 == 0 {
        return Err(DrggError::NotAvailable(format!("no closed form for even d = {d}; use the Monte Carlo estimate")));
    }
    Ok(())
}

/// Terms `(c_k, 2k + d + 1)` of the odd-dimension ball distance law, with
/// `c_k = (-1)^k / (2k + 1) · C((d-1)/2, k)`, and the prefactor `d · d!! / (d-1)!!`.
fn ball_distance_terms(d: usize) -> (f64, Vec<(f64, f64)>) {
    let h = (d - 1) / 2;
    let pref = d as f64 * double_factorial(d) / double_factorial(d - 1);
    let mut binom = 1.0;
    let terms = (0..=h)
        .map(|k| {
            if k > 0 {
                binom *= (h + 1 - k) as f64 / k as f64;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            (sign * binom / (2 * k + 1) as f64, (2 * k + d + 1) as f64)
        })
        .collect();
    (pref, terms)
}

fn check_clustering_domain(alpha: f64, d: usize) -> Result<()> {
    require_odd(d)?;
    if !(alpha > 2.0 * d as f64 + 1.0) || !alpha.is_finite() {
        return Err(DrggError::domain(format!("alpha = {alpha} must exceed 2d + 1 = {}", 2 * d + 1)));
    }
    Ok(())
}

/// General odd-`d` series for the limiting `E[C_in]`.
pub fn clustering_constant_series(alpha: f64, d: usize) -> Result<f64> {
    check_clustering_domain(alpha, d)?;
    let a2 = (alpha - 1.0).powi(2);
    let df = d as f64;
    let (pref, terms) = ball_distance_terms(d);
    let sum: f64 = terms
        .iter()
        .enumerate()
        .map(|(k, &(c, m))| {
            let lead = a2 / (a2 - df * df) / df;
            let tail = a2 / (a2 - m * m) / (2f64.powi(2 * k as i32 + 1) * m);
            c * (lead - tail)
        })
        .sum();
    Ok(pref * sum)
}

/// Tabulated rational closed forms for `d ∈ {1, 3, 5}`.
pub fn clustering_constant_table(alpha: f64, d: usize) -> Result<f64> {
    check_clustering_domain(alpha, d)?;
    let a = alpha;
    let a2 = (alpha - 1.0).powi(2);
    let q = |c: f64| a * a - 2.0 * a - c;
    match d {
        1 => Ok(a2 / 4.0 * (4.0 / (a * a - 2.0 * a) + 1.0 / (-a * a - 2.0 * a + 1.0))),
        3 => {
            let poly = 5.0 * a.powi(4) - 20.0 * a.powi(3) + 9.0 * a * a + 22.0 * a - 72.0;
            Ok(3.0 * a2 * poly / (32.0 * q(8.0) * q(5.0) * q(3.0)))
        }
        5 => {
            let poly =
                159.0 * a.powi(6) - 954.0 * a.powi(5) + 5364.0 * a.powi(4) - 15096.0 * a.powi(3) - 73679.0 * a * a
                    + 175006.0 * a
                    + 392040.0;
            Ok(a2 * poly / (512.0 * q(24.0) * q(9.0) * q(7.0) * q(5.0)))
        }
        _ => Err(DrggError::NotAvailable(format!("no tabulated form for d = {d}"))),
    }
}

/// Limiting `E[C_in]` as `n → ∞`: the tabulated rational function for
/// `d ∈ {1, 3, 5}`, the general series for larger odd `d`.
pub fn clustering_constant(alpha: f64, d: usize) -> Result<f64> {
    match d {
        1 | 3 | 5 => clustering_constant_table(alpha, d),
        _ => clustering_constant_series(alpha, d),
    }
}

/// `α → ∞` limit of the series: the clustering of the fixed-radius geometric graph.
pub fn clustering_limit(d: usize) -> Result<f64> {
    require_odd(d)?;
    let df = d as f64;
    let (pref, terms) = ball_distance_terms(d);
    let sum: f64 =
        terms.iter().enumerate().map(|(k, &(c, m))| c * (1.0 / df - 1.0 / (2f64.powi(2 * k as i32 + 1) * m))).sum();
    Ok(pref * sum)
}

/// The two-ball integral `E[D(r_w / r_u)]` with the distance law `D` saturated at 1
/// beyond `r_w = 2 r_u`, for independent radii in the `r0 → 0` limit. Odd `d`, by quadrature.
///
/// `log(r_w / r_u)` is Laplace distributed with rate `α - 1`.
pub fn clustering_constant_capped(alpha: f64, d: usize) -> Result<f64> {
    require_odd(d)?;
    check_alpha(alpha, d)?;
    let a = alpha - 1.0;
    let tol = Tolerance { abs: 1e-300, rel: 1e-13 };
    // w = (α - 1) |ln t| turns both halves into integrals against e^-w / 2
    let breaks = [0.5, 2.0, 8.0, 20.0];
    let below =
        integrate_split(|w| ball_distance_cdf_unit((-w / a).exp(), d) * 0.5 * (-w).exp(), 0.0, 80.0, &breaks, tol);
    let top = (a * 2f64.ln()).min(80.0);
    let between =
        integrate_split(|w| ball_distance_cdf_unit((w / a).exp(), d) * 0.5 * (-w).exp(), 0.0, top, &breaks, tol);
    Ok(below + between + 0.5 * 2f64.powf(-a))
}

/// Monte Carlo estimate of the two-ball integral, valid for every `d`.
pub fn clustering_constant_monte_carlo(alpha: f64, d: usize, samples: usize, seed: u64) -> Result<f64> {
    check_alpha(alpha, d)?;
    if samples == 0 {
        return Err(DrggError::invalid("need at least one sample"));
    }
    let a = alpha - 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ball = |rng: &mut ChaCha8Rng, radius: f64| -> Vec<f64> {
        let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        let scale = radius * rng.random::<f64>().powf(1.0 / d as f64) / norm;
        g.into_iter().map(|x| x * scale).collect()
    };
    let mut hits = 0usize;
    for _ in 0..samples {
        // Pareto radii with unit scale; only the ratio matters in the limit
        let ru = (1.0 - rng.random::<f64>()).powf(-1.0 / a);
        let rw = (1.0 - rng.random::<f64>()).powf(-1.0 / a);
        let xv = ball(&mut rng, ru);
        let xw = ball(&mut rng, ru);
        let dist2: f64 = xv.iter().zip(&xw).map(|(p, q)| (p - q) * (p - q)).sum();
        if dist2 <= rw * rw {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples as f64)
}

/// `(2β - 2) / (2β - 1)`.
pub fn reciprocity_limit(alpha: f64, d: usize) -> Result<f64> {
    check_alpha(alpha, d)?;
    let b = beta(alpha, d);
    Ok((2.0 * b - 2.0) / (2.0 * b - 1.0))
}

/// Expected number of directed `k`-edge paths between two fixed vertices,
/// `C(n-2, k-1) z^k (k-1)!`.
pub fn expected_paths(n: usize, k: usize, z: f64) -> Result<f64> {
    if n < 2 || k < 1 || k > n - 1 {
        return Err(DrggError::invalid(format!("need 1 <= k <= n - 1, got n = {n}, k = {k}")));
    }
    if !(z > 0.0 && z < 1.0) {
        return Err(DrggError::invalid(format!("z = {z} outside (0, 1)")));
    }
    let log = ln_expected_paths(n, k, z);
    if log < 600.0 && k <= 64 {
        // (n-2)!/(n-1-k)! as an exact falling product
        let falling: f64 = (1..k).map(|j| (n - 1 - j) as f64).product();
        return Ok(falling * z.powi(k as i32));
    }
    Ok(log.exp())
}

fn ln_expected_paths(n: usize, k: usize, z: f64) -> f64 {
    ln_gamma((n - 1) as f64) - ln_gamma((n - k) as f64) + k as f64 * z.ln()
}

/// Smallest `k` with `E[a_k] >= 1`, if any.
pub fn path_threshold_k(n: usize, z: f64) -> Result<Option<usize>> {
    expected_paths(n, 1, z)?;
    Ok((1..n).find(|&k| ln_expected_paths(n, k, z) >= 0.0))
}

/// `⌈ln n / ln ln n⌉`.
pub fn path_threshold_reference(n: usize) -> usize {
    let l = (n as f64).ln();
    (l / l.ln()).ceil() as usize
}

fn ball_distance_cdf_unit(x: f64, d: usize) -> f64 {
    if x >= 2.0 {
        return 1.0;
    }
    let df = d as f64;
    let (pref, terms) = ball_distance_terms(d);
    pref * terms
        .iter()
        .enumerate()
        .map(|(k, &(c, m))| c * (x.powi(d as i32) / df - x.powf(m) / (2f64.powi(2 * k as i32 + 1) * m)))
        .sum::<f64>()
}

fn check_pair_distance(r: f64, radius: f64, d: usize) -> Result<()> {
    require_odd(d)?;
    if !(radius > 0.0) {
        return Err(DrggError::invalid(format!("ball radius {radius} must be positive")));
    }
    if !(0.0..=2.0 * radius).contains(&r) {
        return Err(DrggError::invalid(format!("r = {r} outside [0, {}]", 2.0 * radius)));
    }
    Ok(())
}

/// Density of the distance between two uniform points of a `d`-ball of radius `radius` (odd `d`).
pub fn pair_distance_pdf(r: f64, radius: f64, d: usize) -> Result<f64> {
    check_pair_distance(r, radius, d)?;
    let df = d as f64;
    let (pref, terms) = ball_distance_terms(d);
    let x = r / (2.0 * radius);
    let s: f64 = terms.iter().enumerate().map(|(k, &(c, _))| c * (1.0 - x.powi(2 * k as i32 + 1))).sum();
    // pref already carries the factor d
    Ok(pref / df * df * r.powi(d as i32 - 1) / radius.powi(d as i32) * s)
}

/// Distribution function of that distance.
pub fn pair_distance_cdf(r: f64, radius: f64, d: usize) -> Result<f64> {
    check_pair_distance(r, radius, d)?;
    Ok(ball_distance_cdf_unit(r / radius, d).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentIntegral {
    /// `∬ p(r_u) p(r_w) (r_w / r_u)^m` at the given `r0`.
    pub finite: f64,
    /// `(α-1)^2 / ((α-1)^2 - m^2)`, its `r0 → 0` limit.
    pub limit: f64,
}

pub fn moment_integral(alpha: f64, m: f64, r0: f64) -> Result<MomentIntegral> {
    pareto_normalizer(alpha, r0)?;
    let a = alpha - 1.0;
    if !(m.abs() < a) {
        return Err(DrggError::domain(format!("|m| = {} must be below alpha - 1 = {a}", m.abs())));
    }
    let l = (2.0 * r0).ln();
    let limit = a * a / (a * a - m * m);
    let t = -(a * l).exp_m1();
    let bracket = -((a - m) * l).exp_m1() * -((a + m) * l).exp_m1();
    Ok(MomentIntegral { finite: limit * bracket / (t * t), limit })
}

/// Every prediction for one `(n, α, d)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    pub n: usize,
    pub alpha: f64,
    pub d: usize,
    pub beta: f64,
    pub r0: f64,
    pub eta: f64,
    pub z_exact: f64,
    pub z_asymptotic: f64,
    pub z_correction_order: f64,
    pub expected_edges: f64,
    pub indegree_exponent: f64,
    /// `None` for even `d` or `α <= 2d + 1`; `clustering_note` says why.
    pub clustering_constant: Option<f64>,
    pub clustering_constant_series: Option<f64>,
    pub clustering_constant_capped: Option<f64>,
    pub clustering_constant_monte_carlo: Option<f64>,
    pub clustering_note: Option<String>,
    pub clustering_limit_alpha_inf: Option<f64>,
    pub reciprocity_limit: f64,
    /// `k → E[a_k]`.
    pub expected_paths: BTreeMap<usize, f64>,
    pub path_threshold_k: Option<usize>,
    pub path_threshold_reference: usize,
}

/// Samples used for the Monte Carlo clustering estimate in reports.
pub const CLUSTERING_MC_SAMPLES: usize = 200_000;

pub fn theory_report(n: usize, alpha: f64, d: usize, max_path_k: usize) -> Result<TheoryReport> {
    let r0 = model_radius(n, alpha, d)?;
    let z_exact = edge_prob_exact(n, alpha, d)?;
    let (clustering_constant, clustering_note) = match clustering_constant(alpha, d) {
        Ok(c) => (Some(c), None),
        Err(e @ (DrggError::NotAvailable(_) | DrggError::Domain(_))) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let expected_paths =
        (1..=max_path_k.min(n - 1)).map(|k| expected_paths(n, k, z_exact).map(|e| (k, e))).collect::<Result<_>>()?;
    Ok(TheoryReport {
        n,
        alpha,
        d,
        beta: beta(alpha, d),
        r0,
        eta: pareto_normalizer(alpha, r0)?,
        z_exact,
        z_asymptotic: edge_prob_asymptotic(n, alpha, d)?,
        z_correction_order: edge_prob_correction_order(n, alpha, d),
        expected_edges: expected_edges(n, alpha, d)?,
        indegree_exponent: indegree_exponent(alpha, d),
        clustering_constant,
        clustering_constant_series: clustering_constant_series(alpha, d).ok(),
        clustering_constant_capped: clustering_constant_capped(alpha, d).ok(),
        clustering_constant_monte_carlo: if d % 2 == 0 {
            clustering_constant_monte_carlo(alpha, d, CLUSTERING_MC_SAMPLES, 0).ok()
        } else {
            None
        },
        clustering_note,
        clustering_limit_alpha_inf: clustering_limit(d).ok(),
        reciprocity_limit: reciprocity_limit(alpha, d)?,
        expected_paths,
        path_threshold_k: path_threshold_k(n, z_exact)?,
        path_threshold_reference: path_threshold_reference(n),
    })
}
