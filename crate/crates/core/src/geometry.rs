//! Torus metric, unit-ball constants and the truncated Pareto radius law.

use statrs::function::gamma::ln_gamma;

use crate::error::{DrggError, Result};

/// A point of the unit torus `[0,1)^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

impl TorusPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(DrggError::invalid("a torus point needs at least one coordinate"));
        }
        if let Some(c) = coords.iter().find(|c| !(0.0..1.0).contains(*c)) {
            return Err(DrggError::invalid(format!("coordinate {c} outside [0, 1)")));
        }
        Ok(TorusPoint { coords })
    }

    /// Reduces arbitrary reals onto the unit torus.
    pub fn wrapped(coords: &[f64]) -> Result<Self> {
        let coords = coords
            .iter()
            .map(|&c| {
                let w = c.rem_euclid(1.0);
                // rem_euclid can round up to exactly 1.0 for tiny negative inputs
                if w >= 1.0 {
                    0.0
                } else {
                    w
                }
            })
            .collect();
        Self::new(coords)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// Squared minimum-image distance between two coordinate slices of equal length.
///
/// This is the single predicate both edge builders share, so that their
/// decisions agree bit for bit.
#[inline]
pub fn torus_distance_sq(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    let mut acc = 0.0;
    for (a, b) in p.iter().zip(q) {
        let mut delta = (a - b).abs();
        if delta > 0.5 {
            delta = 1.0 - delta;
        }
        acc += delta * delta;
    }
    acc
}

/// `true` when `q` lies in the closed ball of radius `r` around `p`.
#[inline]
pub fn within_ball(p: &[f64], q: &[f64], r: f64) -> bool {
    torus_distance_sq(p, q) <= r * r
}

pub fn torus_distance(p: &TorusPoint, q: &TorusPoint) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(DrggError::invalid(format!("dimension mismatch: {} vs {}", p.dim(), q.dim())));
    }
    Ok(torus_distance_sq(&p.coords, &q.coords).sqrt())
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(DrggError::invalid("dimension must be at least 1"));
    }
    Ok(())
}

/// Volume of the unit ball, `π^(d/2) / Γ(d/2 + 1)`.
pub fn ball_volume(d: usize) -> Result<f64> {
    check_dim(d)?;
    Ok(ball_volume_unchecked(d))
}

pub(crate) fn ball_volume_unchecked(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI / 3.0,
        _ => {
            let h = d as f64 / 2.0;
            (h * std::f64::consts::PI.ln() - ln_gamma(h + 1.0)).exp()
        }
    }
}

/// Surface area of the unit sphere `S^(d-1)`, `2π^(d/2) / Γ(d/2)`.
pub fn sphere_surface(d: usize) -> Result<f64> {
    check_dim(d)?;
    Ok(d as f64 * ball_volume_unchecked(d))
}

/// Connectivity radius `r0 = (ln n / (V_d n))^(1/d)`.
pub fn min_radius(n: usize, d: usize) -> Result<f64> {
    check_dim(d)?;
    if n < 2 {
        return Err(DrggError::invalid("at least two vertices are required"));
    }
    let r0 = min_radius_unchecked(n, d);
    if r0 >= 0.5 {
        let min_n = (n + 1..).find(|&m| min_radius_unchecked(m, d) < 0.5);
        return Err(DrggError::Infeasible {
            message: format!(
                "r0 = {r0:.6} >= 1/2 for n = {n}, d = {d}; need n >= {}",
                min_n.map_or_else(|| "?".to_string(), |m| m.to_string())
            ),
            min_feasible_n: min_n,
        });
    }
    Ok(r0)
}

fn min_radius_unchecked(n: usize, d: usize) -> f64 {
    let n = n as f64;
    (n.ln() / (ball_volume_unchecked(d) * n)).powf(1.0 / d as f64)
}

/// Normalizer `η` making `η / r^α` a density on `[r0, 1/2]`.
pub fn pareto_normalizer(alpha: f64, r0: f64) -> Result<f64> {
    if !(r0 > 0.0 && r0 < 0.5) {
        return Err(DrggError::invalid(format!("r0 = {r0} outside (0, 1/2)")));
    }
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(DrggError::invalid(format!("alpha = {alpha} must exceed 1")));
    }
    let a = alpha - 1.0;
    Ok(a * r0.powf(a) / -((a * (2.0 * r0).ln()).exp_m1()))
}

/// Truncated Pareto law `f(r) = η / r^α` on `[r0, 1/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusLaw {
    alpha: f64,
    r0: f64,
    eta: f64,
    dim: usize,
    // (2 r0)^(α-1), cached for the inverse CDF
    tail: f64,
}

impl RadiusLaw {
    pub fn new(alpha: f64, r0: f64, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let eta = pareto_normalizer(alpha, r0)?;
        let tail = ((alpha - 1.0) * (2.0 * r0).ln()).exp();
        Ok(RadiusLaw { alpha, r0, eta, dim, tail })
    }

    /// The law used by `G(n, α, d)`: `r0 = min_radius(n, d)`, with `α > d + 1`.
    pub fn for_model(n: usize, alpha: f64, dim: usize) -> Result<Self> {
        if !(alpha > dim as f64 + 1.0) {
            return Err(DrggError::invalid(format!("alpha = {alpha} must exceed d + 1 = {}", dim + 1)));
        }
        Self::new(alpha, min_radius(n, dim)?, dim)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pdf(&self, r: f64) -> f64 {
        if r < self.r0 || r > 0.5 {
            0.0
        } else {
            self.eta * r.powf(-self.alpha)
        }
    }

    /// `F(r) = (1 - (r0/r)^(α-1)) / (1 - (2 r0)^(α-1))`, clamped to `[0, 1]`.
    pub fn cdf(&self, r: f64) -> f64 {
        if r <= self.r0 {
            0.0
        } else if r >= 0.5 {
            1.0
        } else {
            let a = self.alpha - 1.0;
            -((a * (self.r0 / r).ln()).exp_m1()) / (1.0 - self.tail)
        }
    }

    /// Inverse CDF: the radius `r` with `F(r) = u`.
    pub fn sample(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(DrggError::invalid(format!("u = {u} outside [0, 1]")));
        }
        Ok(self.quantile(u))
    }

    pub(crate) fn quantile(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return self.r0;
        }
        if u >= 1.0 {
            return 0.5;
        }
        let a = self.alpha - 1.0;
        // (r0 / r)^(α-1) = 1 - u (1 - (2 r0)^(α-1))
        let ratio = 1.0 - u * (1.0 - self.tail);
        let r = self.r0 * (-ratio.ln() / a).exp();
        r.clamp(self.r0, 0.5)
    }
}

pub fn sample_radius(law: &RadiusLaw, u: f64) -> Result<f64> {
    law.sample(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, Tolerance};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn pt(c: &[f64]) -> TorusPoint {
        TorusPoint::new(c.to_vec()).unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(torus_distance(&pt(&[0.3, 0.7]), &pt(&[0.3, 0.7])).unwrap(), 0.0);
        assert_relative_eq!(torus_distance(&pt(&[0.1]), &pt(&[0.9])).unwrap(), 0.2, epsilon = 1e-12);
        assert_relative_eq!(
            torus_distance(&pt(&[0.1, 0.1]), &pt(&[0.9, 0.9])).unwrap(),
            (0.08f64).sqrt(),
            epsilon = 1e-12
        );
        assert!(torus_distance(&pt(&[0.1]), &pt(&[0.1, 0.2])).is_err());
    }

    #[test]
    fn point_validation() {
        assert!(TorusPoint::new(vec![]).is_err());
        assert!(TorusPoint::new(vec![1.0]).is_err());
        assert!(TorusPoint::new(vec![-0.1]).is_err());
        assert_eq!(TorusPoint::wrapped(&[1.25, -0.25]).unwrap().coords(), &[0.25, 0.75]);
    }

    #[test]
    fn ball_constants() {
        assert_eq!(ball_volume(1).unwrap(), 2.0);
        assert_relative_eq!(ball_volume(2).unwrap(), std::f64::consts::PI);
        assert_relative_eq!(ball_volume(3).unwrap(), 4.0 * std::f64::consts::PI / 3.0);
        assert_relative_eq!(ball_volume(4).unwrap(), 4.934_802_200_544_679, max_relative = 1e-12);
        assert_relative_eq!(sphere_surface(5).unwrap() / ball_volume(5).unwrap(), 5.0, max_relative = 1e-12);
        // Γ-based surface formula, evaluated independently
        for d in 1..8 {
            let h = d as f64 / 2.0;
            let s = 2.0 * (h * std::f64::consts::PI.ln() - ln_gamma(h)).exp();
            assert_relative_eq!(sphere_surface(d).unwrap(), s, max_relative = 1e-12);
        }
        assert!(ball_volume(0).is_err());
    }

    #[test]
    fn min_radius_examples() {
        assert_relative_eq!(min_radius(100, 1).unwrap(), 100f64.ln() / 200.0, max_relative = 1e-12);
        assert_relative_eq!(min_radius(100, 1).unwrap(), 0.023_025_85, max_relative = 1e-6);
        let oracle = (1000f64.ln() / (1000.0 * std::f64::consts::PI)).sqrt();
        assert_relative_eq!(min_radius(1000, 2).unwrap(), oracle, max_relative = 1e-12);
        assert_relative_eq!(min_radius(1000, 2).unwrap(), 0.046_891_44, max_relative = 1e-6);
        // ln n / n never exceeds 1/e, so r0 < 1/2 for every n once V_d / 2^d > 1/e (d <= 3)
        let r = min_radius(3, 3).unwrap();
        assert_relative_eq!(r, (3f64.ln() / (4.0 * std::f64::consts::PI)).cbrt(), max_relative = 1e-12);
        assert!(r > 0.44 && r < 0.5);
        match min_radius(3, 4) {
            Err(DrggError::Infeasible { min_feasible_n: Some(m), .. }) => {
                assert_eq!(m, 6);
                assert!(min_radius(m, 4).is_ok());
                assert!(min_radius(m - 1, 4).is_err());
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn min_radius_shrinks_with_n() {
        for d in 1..=3 {
            let mut prev = f64::INFINITY;
            for n in [20, 50, 100, 1000, 10_000, 100_000] {
                let r = min_radius(n, d).unwrap();
                assert!(r < prev);
                prev = r;
            }
        }
    }

    #[test]
    fn normalizer_examples() {
        assert_relative_eq!(pareto_normalizer(2.0, 0.25).unwrap(), 0.5, max_relative = 1e-14);
        assert_relative_eq!(pareto_normalizer(4.0, 0.1).unwrap(), 0.003 / 0.992, max_relative = 1e-12);
        assert!(pareto_normalizer(4.0, 0.5).is_err());
        assert!(pareto_normalizer(4.0, 0.0).is_err());
        for &(alpha, r0) in &[(2.0, 0.25), (4.0, 0.1), (8.0, 0.02), (5.0, 1e-4), (13.0, 0.3)] {
            let law = RadiusLaw::new(alpha, r0, 1).unwrap();
            let closed = (alpha - 1.0) * r0.powf(alpha - 1.0) / (1.0 - (2.0 * r0).powf(alpha - 1.0));
            assert_relative_eq!(law.eta(), closed, max_relative = 1e-12);
            // integrate in log-radius, where the density is smooth
            let mass = integrate(
                |t: f64| law.pdf(t.exp()) * t.exp(),
                r0.ln(),
                0.5f64.ln(),
                Tolerance { abs: 1e-300, rel: 1e-13 },
            );
            assert!((mass - 1.0).abs() < 1e-9, "alpha={alpha} r0={r0} mass={mass}");
        }
    }

    #[test]
    fn sample_radius_examples() {
        let law = RadiusLaw::new(2.0, 0.25, 1).unwrap();
        assert_eq!(sample_radius(&law, 0.0).unwrap(), 0.25);
        assert_eq!(sample_radius(&law, 1.0).unwrap(), 0.5);
        assert_relative_eq!(sample_radius(&law, 0.5).unwrap(), 1.0 / 3.0, max_relative = 1e-12);
        assert!(sample_radius(&law, 1.5).is_err());
        assert!(sample_radius(&law, -0.1).is_err());
    }

    #[test]
    fn sampled_radii_match_cdf() {
        let law = RadiusLaw::for_model(10_000, 8.0, 3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut radii: Vec<f64> = (0..100_000).map(|_| law.quantile(rng.random())).collect();
        radii.sort_by(f64::total_cmp);
        let m = radii.len() as f64;
        let ks = radii
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let f = law.cdf(r);
                (f - i as f64 / m).abs().max((f - (i + 1) as f64 / m).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.01, "KS = {ks}");
    }

    proptest! {
        #[test]
        fn distance_is_a_metric(
            d in 1usize..5,
            raw in proptest::collection::vec(0.0f64..1.0, 15),
        ) {
            let p = pt(&raw[0..d]);
            let q = pt(&raw[5..5 + d]);
            let s = pt(&raw[10..10 + d]);
            let pq = torus_distance(&p, &q).unwrap();
            let qp = torus_distance(&q, &p).unwrap();
            let ps = torus_distance(&p, &s).unwrap();
            let qs = torus_distance(&q, &s).unwrap();
            prop_assert!(pq >= 0.0);
            prop_assert_eq!(pq, qp);
            prop_assert!(ps <= pq + qs + 1e-12);
            prop_assert!(pq <= (d as f64).sqrt() / 2.0 + 1e-12);
        }

        #[test]
        fn quantile_is_monotone(u in 0.0f64..1.0, v in 0.0f64..1.0, alpha in 2.1f64..20.0) {
            let law = RadiusLaw::new(alpha, 0.01, 1).unwrap();
            let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
            let (a, b) = (law.quantile(lo), law.quantile(hi));
            prop_assert!(a <= b);
            prop_assert!((0.01..=0.5).contains(&a));
            prop_assert!((law.cdf(a) - lo).abs() < 1e-9);
        }
    }
}
