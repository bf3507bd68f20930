//! Recovering `β` and `z` from degree data.
//!
//! The indegree tail is fitted by discrete maximum likelihood above a cutoff
//! `k_min` picked by Kolmogorov–Smirnov distance; the outdegree by the binomial
//! method of moments.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, Discrete};
use statrs::function::erf::erfc;

use crate::error::{DrggError, Result};
use crate::stats::DegreeHistogram;
use crate::theory;

/// Minimum number of vertices at or above `k_min`.
pub const MIN_TAIL: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    MleTail,
    LoglogLs,
}

/// Power-law fit of a degree tail, `P[k] ∝ k^-γ` for `k >= k_min`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub method: FitMethod,
    pub gamma_hat: f64,
    /// `γ - 1`.
    pub beta_hat: f64,
    pub k_min: usize,
    pub tail_size: usize,
    /// KS distance between the tail and the fitted law.
    pub goodness: f64,
    /// Normalized log-likelihood ratio against a discrete exponential on the same tail;
    /// positive favors the power law.
    pub lr_vs_exponential: f64,
    /// Two-sided significance of the sign of that ratio.
    pub lr_p_value: f64,
}

impl TailFit {
    pub fn power_law_favored(&self) -> bool {
        self.lr_vs_exponential > 0.0
    }
}

/// Hurwitz zeta `ζ(s, q) = Σ_{j>=0} (q + j)^-s` by Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    assert!(s > 1.0 && q > 0.0, "hurwitz_zeta needs s > 1 and q > 0");
    const TERMS: usize = 12;
    // B_2k / (2k)!
    const B: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
        1.0 / 74724249600.0,
    ];
    let head: f64 = (0..TERMS).map(|j| (q + j as f64).powf(-s)).sum();
    let a = q + TERMS as f64;
    let mut tail = a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // rising factorial s (s+1) ... (s+2k-2) times a^(-s-2k+1)
    let mut fac = s * a.powf(-s - 1.0);
    for (k, b) in B.iter().enumerate() {
        tail += b * fac;
        let m = 2.0 * k as f64;
        fac *= (s + m + 1.0) * (s + m + 2.0) / (a * a);
    }
    head + tail
}

fn tail_of(hist: &DegreeHistogram, k_min: usize) -> Vec<(usize, usize)> {
    hist.iter().filter(|&(k, _)| k >= k_min).collect()
}

fn mle_gamma(tail: &[(usize, usize)], k_min: usize) -> f64 {
    let count: f64 = tail.iter().map(|&(_, c)| c as f64).sum();
    let log_sum: f64 = tail.iter().map(|&(k, c)| c as f64 * (k as f64).ln()).sum();
    let q = k_min as f64;
    let nll = |g: f64| g * log_sum + count * hurwitz_zeta(g, q).ln();
    golden_min(nll, 1.0 + 1e-6, 30.0, 1e-10)
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Largest gap between the empirical tail CDF and the fitted discrete power law.
fn ks_distance(tail: &[(usize, usize)], gamma: f64, k_min: usize) -> f64 {
    let total: f64 = tail.iter().map(|&(_, c)| c as f64).sum();
    let z0 = hurwitz_zeta(gamma, k_min as f64);
    let model_cdf = |k: usize| 1.0 - hurwitz_zeta(gamma, k as f64 + 1.0) / z0;
    let mut seen = 0.0;
    let mut worst: f64 = 0.0;
    for (i, &(k, c)) in tail.iter().enumerate() {
        // just below k the empirical CDF still equals the previous step
        if k > k_min {
            worst = worst.max((seen / total - model_cdf(k - 1)).abs());
        }
        seen += c as f64;
        worst = worst.max((seen / total - model_cdf(k)).abs());
        if i + 1 == tail.len() {
            worst = worst.max(1.0 - model_cdf(k));
        }
    }
    worst
}

/// Vuong's normalized log-likelihood ratio, power law against exponential.
fn lr_test(tail: &[(usize, usize)], gamma: f64, k_min: usize) -> (f64, f64) {
    let count: f64 = tail.iter().map(|&(_, c)| c as f64).sum();
    let mean: f64 = tail.iter().map(|&(k, c)| (k * c) as f64).sum::<f64>() / count;
    let ln_z = hurwitz_zeta(gamma, k_min as f64).ln();
    let excess = mean - k_min as f64;
    let lambda = if excess > 0.0 { (1.0 + 1.0 / excess).ln() } else { 50.0 };
    let ln_norm = (-(-lambda).exp_m1()).ln();
    let diffs: Vec<(f64, f64)> = tail
        .iter()
        .map(|&(k, c)| {
            let pl = -gamma * (k as f64).ln() - ln_z;
            let ex = ln_norm - lambda * (k - k_min) as f64;
            (pl - ex, c as f64)
        })
        .collect();
    let r: f64 = diffs.iter().map(|&(x, c)| x * c).sum();
    let mu = r / count;
    let var = diffs.iter().map(|&(x, c)| c * (x - mu).powi(2)).sum::<f64>() / count;
    if var <= 0.0 {
        return (r, 1.0);
    }
    let stat = r / (count * var).sqrt();
    let p = erfc(stat.abs() / std::f64::consts::SQRT_2);
    (stat, p)
}

fn check_tail_mass(hist: &DegreeHistogram) -> Result<()> {
    let usable: usize = hist.iter().filter(|&(k, _)| k >= 2).map(|(_, c)| c).sum();
    if usable < MIN_TAIL {
        return Err(DrggError::InsufficientData(format!(
            "{usable} vertices with degree >= 2; at least {MIN_TAIL} are needed"
        )));
    }
    Ok(())
}

/// Candidate cutoffs: observed degrees in `[2, q90]` that leave at least `MIN_TAIL` vertices.
fn k_min_candidates(hist: &DegreeHistogram) -> Vec<usize> {
    let upper = hist.quantile(0.9).unwrap_or(0).max(2);
    let mut remaining = hist.total();
    let mut out = Vec::new();
    for (k, c) in hist.iter() {
        if (2..=upper).contains(&k) && remaining >= MIN_TAIL {
            out.push(k);
        }
        remaining -= c;
    }
    out
}

/// Discrete MLE of the tail exponent with the KS-optimal `k_min`.
pub fn fit_powerlaw_tail(hist: &DegreeHistogram) -> Result<TailFit> {
    check_tail_mass(hist)?;
    let best = k_min_candidates(hist)
        .into_iter()
        .map(|k_min| {
            let tail = tail_of(hist, k_min);
            let gamma = mle_gamma(&tail, k_min);
            (ks_distance(&tail, gamma, k_min), k_min, gamma)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0));
    let Some((goodness, k_min, gamma)) = best else {
        return Err(DrggError::InsufficientData("no admissible tail cutoff".into()));
    };
    let tail = tail_of(hist, k_min);
    let (lr, p) = lr_test(&tail, gamma, k_min);
    Ok(TailFit {
        method: FitMethod::MleTail,
        gamma_hat: gamma,
        beta_hat: gamma - 1.0,
        k_min,
        tail_size: tail.iter().map(|&(_, c)| c).sum(),
        goodness,
        lr_vs_exponential: lr,
        lr_p_value: p,
    })
}

/// Least-squares slope of the log-binned density against `ln k` over `k >= k_min`.
///
/// Bins grow geometrically by a factor 1.25 and the fit stops at the first bin
/// holding fewer than 5 vertices, so sparse high-degree counts do not flatten
/// the slope. Each bin contributes `ln(count / width)` at the geometric mean of
/// its integer range.
pub fn fit_powerlaw_loglog(hist: &DegreeHistogram, k_min: usize) -> Result<TailFit> {
    check_tail_mass(hist)?;
    let k_min = k_min.max(1);
    let tail = tail_of(hist, k_min);
    let k_max = tail.last().map_or(k_min, |&(k, _)| k);
    let mut pts: Vec<(f64, f64)> = Vec::new();
    let (mut lo, mut i) = (k_min, 0);
    while lo <= k_max {
        let hi = ((lo as f64 * 1.25).floor() as usize).max(lo + 1);
        let mut c = 0;
        while i < tail.len() && tail[i].0 < hi {
            c += tail[i].1;
            i += 1;
        }
        if c < 5 {
            break;
        }
        let x = ((lo as f64) * (hi - 1) as f64).sqrt().ln();
        pts.push((x, (c as f64 / (hi - lo) as f64).ln()));
        lo = hi;
    }
    if pts.len() < 3 {
        return Err(DrggError::InsufficientData(format!("{} occupied log bins at or above {k_min}", pts.len())));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let gamma = -sxy / sxx;
    if !(gamma > 1.0) {
        return Err(DrggError::InsufficientData(format!("log-log slope {} is not a decaying tail", -gamma)));
    }
    let (lr, p) = lr_test(&tail, gamma, k_min);
    Ok(TailFit {
        method: FitMethod::LoglogLs,
        gamma_hat: gamma,
        beta_hat: gamma - 1.0,
        k_min,
        tail_size: tail.iter().map(|&(_, c)| c).sum(),
        goodness: ks_distance(&tail, gamma, k_min),
        lr_vs_exponential: lr,
        lr_p_value: p,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinomialFit {
    /// Mean degree over `n - 1`.
    pub z_hat: f64,
    /// Total variation between the histogram and `Binomial(n - 1, z_hat)`.
    pub tv_distance: f64,
}

pub fn fit_binomial(hist: &DegreeHistogram, n: usize) -> Result<BinomialFit> {
    if n < 2 {
        return Err(DrggError::invalid(format!("n = {n} but at least 2 vertices are required")));
    }
    if hist.total() == 0 {
        return Ok(BinomialFit { z_hat: 0.0, tv_distance: 0.0 });
    }
    let trials = (n - 1) as u64;
    let z_hat = hist.mean() / trials as f64;
    if z_hat > 1.0 {
        return Err(DrggError::invalid(format!("mean degree {} exceeds n - 1", hist.mean())));
    }
    let binom = Binomial::new(z_hat, trials).map_err(|e| DrggError::invalid(e.to_string()))?;
    let total = hist.total() as f64;
    let mut tv = 0.0;
    let mut covered = 0.0;
    for k in 0..=trials {
        let p = binom.pmf(k);
        covered += p;
        tv += (hist.count(k as usize) as f64 / total - p).abs();
    }
    // degrees above n - 1 (impossible for simple graphs on n vertices) plus rounding
    let beyond: f64 = hist.iter().filter(|&(k, _)| k as u64 > trials).map(|(_, c)| c as f64).sum::<f64>() / total;
    tv += beyond + (1.0 - covered).max(0.0);
    Ok(BinomialFit { z_hat, tv_distance: 0.5 * tv })
}

/// Joint fit: `β` from the indegree tail, `z` from the outdegrees, and the
/// edge probability the fitted `α` implies for comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub method: FitMethod,
    pub beta_hat: f64,
    /// `β̂ d + 1` for the supplied `d`.
    pub alpha_hat: f64,
    pub d: usize,
    pub n: usize,
    pub z_hat: f64,
    pub k_min: usize,
    pub goodness: f64,
    pub tail_size: usize,
    pub lr_vs_exponential: f64,
    pub lr_p_value: f64,
    pub outdegree_tv: f64,
    /// `z` predicted at `(n, α̂, d)`, when that model is feasible.
    pub z_model: Option<f64>,
    /// `z_hat / z_model - 1`.
    pub z_relative_gap: Option<f64>,
}

/// Fits both degree laws. Fails with insufficient data when the indegree tail
/// is better described by an exponential than by a power law.
pub fn fit_model(
    in_hist: &DegreeHistogram,
    out_hist: &DegreeHistogram,
    n: usize,
    d: usize,
    method: FitMethod,
) -> Result<FitResult> {
    if d == 0 {
        return Err(DrggError::invalid("dimension must be at least 1"));
    }
    let mle = fit_powerlaw_tail(in_hist)?;
    let tail = match method {
        FitMethod::MleTail => mle,
        FitMethod::LoglogLs => fit_powerlaw_loglog(in_hist, mle.k_min)?,
    };
    if !tail.power_law_favored() {
        return Err(DrggError::InsufficientData(format!(
            "indegree tail above k_min = {} is closer to exponential than to a power law \
             (normalized log-likelihood ratio {:.3}, p = {:.3})",
            tail.k_min, tail.lr_vs_exponential, tail.lr_p_value
        )));
    }
    let binom = fit_binomial(out_hist, n)?;
    let alpha_hat = tail.beta_hat * d as f64 + 1.0;
    let z_model = theory::edge_prob_exact(n, alpha_hat, d).ok();
    Ok(FitResult {
        method,
        beta_hat: tail.beta_hat,
        alpha_hat,
        d,
        n,
        z_hat: binom.z_hat,
        k_min: tail.k_min,
        goodness: tail.goodness,
        tail_size: tail.tail_size,
        lr_vs_exponential: tail.lr_vs_exponential,
        lr_p_value: tail.lr_p_value,
        outdegree_tv: binom.tv_distance,
        z_model,
        z_relative_gap: z_model.map(|z| binom.z_hat / z - 1.0),
    })
}
