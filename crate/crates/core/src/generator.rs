//! Construction of `G(n, α, d)` instances.
//!
//! Points are drawn first (all positions, then all radii) from one seeded
//! ChaCha stream; edge construction only reads the finished point set, so the
//! result does not depend on how the per-vertex work is scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DrggError, Result};
use crate::geometry::{min_radius, within_ball, RadiusLaw};
use crate::graph::DiGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusMode {
    /// Radii drawn from the truncated Pareto law.
    Pareto,
    /// Every radius equals `r0`: the undirected random geometric graph limit.
    FixedR0,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub alpha: f64,
    pub d: usize,
    pub seed: u64,
    pub radius_mode: RadiusMode,
}

impl ModelParams {
    pub fn new(n: usize, alpha: f64, d: usize, seed: u64) -> Self {
        ModelParams { n, alpha, d, seed, radius_mode: RadiusMode::Pareto }
    }

    pub fn fixed_radius(n: usize, d: usize, seed: u64) -> Self {
        // alpha plays no role in this mode; infinity is its natural value
        ModelParams { n, alpha: f64::INFINITY, d, seed, radius_mode: RadiusMode::FixedR0 }
    }

    pub fn with_mode(mut self, mode: RadiusMode) -> Self {
        self.radius_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(DrggError::invalid(format!("n = {} but at least 2 vertices are required", self.n)));
        }
        if self.n > u32::MAX as usize {
            return Err(DrggError::invalid("n exceeds the u32 vertex id space"));
        }
        if self.d == 0 {
            return Err(DrggError::invalid("dimension must be at least 1"));
        }
        if self.radius_mode == RadiusMode::Pareto && !(self.alpha > self.d as f64 + 1.0 && self.alpha.is_finite()) {
            return Err(DrggError::invalid(format!(
                "alpha = {} must be finite and exceed d + 1 = {}",
                self.alpha,
                self.d + 1
            )));
        }
        if self.radius_mode == RadiusMode::FixedR0 && self.alpha.is_nan() {
            return Err(DrggError::invalid("alpha is NaN"));
        }
        min_radius(self.n, self.d)?;
        Ok(())
    }

    pub fn r0(&self) -> Result<f64> {
        min_radius(self.n, self.d)
    }

    pub fn radius_law(&self) -> Result<RadiusLaw> {
        RadiusLaw::for_model(self.n, self.alpha, self.d)
    }
}

/// Positions (row-major, `n × d`) and radii of every vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPointSet {
    params: Option<ModelParams>,
    dim: usize,
    positions: Vec<f64>,
    radii: Vec<f64>,
}

impl TorusPointSet {
    /// A point set that claims to realize `params`; all model invariants are checked.
    pub fn new(params: ModelParams, positions: Vec<f64>, radii: Vec<f64>) -> Result<Self> {
        params.validate()?;
        let set = Self::custom(params.d, positions, radii)?;
        if set.len() != params.n {
            return Err(DrggError::Integrity(format!("{} points for n = {}", set.len(), params.n)));
        }
        let r0 = params.r0()?;
        for (i, &r) in set.radii.iter().enumerate() {
            let ok = match params.radius_mode {
                RadiusMode::Pareto => (r0..=0.5).contains(&r),
                RadiusMode::FixedR0 => r == r0,
            };
            if !ok {
                return Err(DrggError::Integrity(format!(
                    "radius {r} of vertex {i} violates the support [{r0}, 0.5] ({:?} mode)",
                    params.radius_mode
                )));
            }
        }
        Ok(TorusPointSet { params: Some(params), ..set })
    }

    /// An arbitrary point set, not tied to model parameters. Radii must lie in `(0, 1/2]`.
    pub fn custom(dim: usize, positions: Vec<f64>, radii: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(DrggError::invalid("dimension must be at least 1"));
        }
        if positions.len() != radii.len() * dim {
            return Err(DrggError::Integrity(format!(
                "{} coordinates do not match {} radii in dimension {dim}",
                positions.len(),
                radii.len()
            )));
        }
        if radii.len() > u32::MAX as usize {
            return Err(DrggError::invalid("too many points for u32 vertex ids"));
        }
        if let Some(c) = positions.iter().find(|c| !(0.0..1.0).contains(*c)) {
            return Err(DrggError::Integrity(format!("coordinate {c} outside [0, 1)")));
        }
        if let Some(r) = radii.iter().find(|&&r| !(r > 0.0 && r <= 0.5)) {
            return Err(DrggError::Integrity(format!("radius {r} outside (0, 0.5]")));
        }
        Ok(TorusPointSet { params: None, dim, positions, radii })
    }

    pub fn params(&self) -> Option<&ModelParams> {
        self.params.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.positions[i * self.dim..(i + 1) * self.dim]
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }
}

pub fn sample_points(params: &ModelParams) -> Result<TorusPointSet> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let positions: Vec<f64> = (0..params.n * params.d).map(|_| rng.random::<f64>()).collect();
    let radii = match params.radius_mode {
        RadiusMode::Pareto => {
            let law = params.radius_law()?;
            (0..params.n).map(|_| law.quantile(rng.random::<f64>())).collect()
        }
        RadiusMode::FixedR0 => vec![params.r0()?; params.n],
    };
    Ok(TorusPointSet { params: Some(*params), dim: params.d, positions, radii })
}

/// Reference construction: tests every ordered pair.
pub fn build_edges_naive(pts: &TorusPointSet) -> DiGraph {
    let n = pts.len();
    let lists = (0..n)
        .map(|v| {
            let (xv, rv) = (pts.point(v), pts.radii[v]);
            (0..n).filter(|&u| u != v && within_ball(xv, pts.point(u), rv)).map(|u| u as u32).collect()
        })
        .collect();
    DiGraph::from_in_lists(lists)
}

/// Upper bound on the total number of grid cells.
const CELL_BUDGET: usize = 1 << 18;

fn cells_per_axis(dim: usize, min_r: f64) -> usize {
    let mut cap = (CELL_BUDGET as f64).powf(1.0 / dim as f64).floor() as usize;
    while cap > 1 && cap.checked_pow(dim as u32).is_none_or(|c| c > CELL_BUDGET) {
        cap -= 1;
    }
    ((1.0 / min_r).floor() as usize).clamp(1, cap.max(1))
}

struct CellGrid {
    dim: usize,
    per_axis: usize,
    starts: Vec<usize>,
    members: Vec<u32>,
}

impl CellGrid {
    fn build(pts: &TorusPointSet, per_axis: usize) -> Self {
        let dim = pts.dim;
        let cells = per_axis.pow(dim as u32);
        let cell_of: Vec<usize> = (0..pts.len())
            .map(|i| {
                pts.point(i).iter().fold(0usize, |acc, &c| {
                    let k = ((c * per_axis as f64) as usize).min(per_axis - 1);
                    acc * per_axis + k
                })
            })
            .collect();
        let mut starts = vec![0usize; cells + 1];
        for &c in &cell_of {
            starts[c + 1] += 1;
        }
        for c in 0..cells {
            starts[c + 1] += starts[c];
        }
        let mut cursor = starts.clone();
        let mut members = vec![0u32; pts.len()];
        for (i, &c) in cell_of.iter().enumerate() {
            members[cursor[c]] = i as u32;
            cursor[c] += 1;
        }
        CellGrid { dim, per_axis, starts, members }
    }

    /// Cell indices along one axis covering `[x - r, x + r]` on the circle.
    fn axis_cells(&self, x: f64, r: f64) -> Vec<usize> {
        let m = self.per_axis as f64;
        // slack guards the floor against rounding right at a cell boundary
        let lo = ((x - r) * m - 1e-9).floor() as i64;
        let hi = ((x + r) * m + 1e-9).floor() as i64;
        if hi - lo + 1 >= self.per_axis as i64 {
            return (0..self.per_axis).collect();
        }
        (lo..=hi).map(|k| k.rem_euclid(self.per_axis as i64) as usize).collect()
    }

    fn in_ball(&self, pts: &TorusPointSet, v: usize) -> Vec<u32> {
        let (xv, rv) = (pts.point(v), pts.radii[v]);
        let axes: Vec<Vec<usize>> = xv.iter().map(|&x| self.axis_cells(x, rv)).collect();
        let mut found = Vec::new();
        let mut idx = vec![0usize; self.dim];
        loop {
            let cell = idx.iter().zip(&axes).fold(0usize, |acc, (&i, axis)| acc * self.per_axis + axis[i]);
            for &u in &self.members[self.starts[cell]..self.starts[cell + 1]] {
                if u as usize != v && within_ball(xv, pts.point(u as usize), rv) {
                    found.push(u);
                }
            }
            // odometer over the product of axis ranges
            let mut k = self.dim;
            loop {
                if k == 0 {
                    found.sort_unstable();
                    return found;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < axes[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
}

/// Cell-list construction; produces exactly the graph of [`build_edges_naive`].
pub fn build_edges_grid(pts: &TorusPointSet) -> DiGraph {
    if pts.is_empty() {
        return DiGraph::empty(0);
    }
    let min_r = pts.params.and_then(|p| p.r0().ok()).unwrap_or_else(|| pts.radii.iter().copied().fold(0.5, f64::min));
    let grid = CellGrid::build(pts, cells_per_axis(pts.dim, min_r));
    let lists: Vec<Vec<u32>> = (0..pts.len()).into_par_iter().map(|v| grid.in_ball(pts, v)).collect();
    DiGraph::from_in_lists(lists)
}

pub fn generate(params: &ModelParams) -> Result<(TorusPointSet, DiGraph)> {
    let pts = sample_points(params)?;
    let g = build_edges_grid(&pts);
    Ok((pts, g))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_examples() {
        let pts = TorusPointSet::custom(1, vec![0.0, 0.3], vec![0.35, 0.10]).unwrap();
        let g = build_edges_naive(&pts);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(1, 0)]);
        assert_eq!(build_edges_grid(&pts), g);

        let pts = TorusPointSet::custom(1, vec![0.0, 0.3], vec![0.35, 0.45]).unwrap();
        let g = build_edges_grid(&pts);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);

        let single = TorusPointSet::custom(2, vec![0.5, 0.5], vec![0.5]).unwrap();
        assert_eq!(build_edges_naive(&single).edge_count(), 0);
        assert_eq!(build_edges_grid(&single).edge_count(), 0);
    }

    #[test]
    fn boundary_tie_is_an_edge() {
        let pts = TorusPointSet::custom(1, vec![0.0, 0.25], vec![0.25, 0.01]).unwrap();
        assert!(build_edges_naive(&pts).has_edge(1, 0));
        assert!(build_edges_grid(&pts).has_edge(1, 0));
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = ModelParams::new(2000, 8.0, 3, 42);
        let a = sample_points(&p).unwrap();
        let b = sample_points(&p).unwrap();
        assert_eq!(a.positions(), b.positions());
        assert_eq!(a.radii(), b.radii());
        let c = sample_points(&ModelParams { seed: 43, ..p }).unwrap();
        assert_ne!(a.positions(), c.positions());
    }

    #[test]
    fn fixed_mode_radii() {
        let p = ModelParams::fixed_radius(500, 2, 1);
        let pts = sample_points(&p).unwrap();
        let r0 = min_radius(500, 2).unwrap();
        assert!(pts.radii().iter().all(|&r| r == r0));
    }

    #[test]
    fn uniform_positions() {
        let pts = sample_points(&ModelParams::new(100_000, 8.0, 2, 5)).unwrap();
        let mean = (0..pts.len()).map(|i| pts.point(i)[0]).sum::<f64>() / pts.len() as f64;
        assert!((mean - 0.5).abs() < 0.005, "{mean}");
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(1, 8.0, 3, 0).validate().is_err());
        assert!(ModelParams::new(100, 4.0, 3, 0).validate().is_err());
        assert!(matches!(ModelParams::new(3, 8.0, 4, 0).validate(), Err(DrggError::Infeasible { .. })));
        assert!(ModelParams::fixed_radius(100, 3, 0).validate().is_ok());
    }

    #[test]
    fn point_set_invariants() {
        let p = ModelParams::new(10, 4.0, 1, 0);
        let pts = sample_points(&p).unwrap();
        let mut radii = pts.radii().to_vec();
        radii[3] = 0.6;
        assert!(TorusPointSet::new(p, pts.positions().to_vec(), radii).is_err());
        assert!(TorusPointSet::new(p, pts.positions().to_vec(), pts.radii().to_vec()).is_ok());
        assert!(TorusPointSet::custom(2, vec![0.1, 0.2, 0.3], vec![0.1, 0.1]).is_err());
    }

    #[test]
    fn grid_matches_naive_on_awkward_sets() {
        // coordinates right on cell boundaries and near the wrap seam
        let n = 64;
        let positions: Vec<f64> = (0..n).flat_map(|i| [i as f64 / 64.0, (63 - i) as f64 / 64.0]).collect();
        let radii: Vec<f64> = (0..n).map(|i| if i % 7 == 0 { 0.5 } else { 1.0 / 64.0 }).collect();
        let pts = TorusPointSet::custom(2, positions, radii).unwrap();
        assert_eq!(build_edges_grid(&pts), build_edges_naive(&pts));
    }

    #[test]
    fn cell_budget_respected() {
        for d in 1..=6 {
            let m = cells_per_axis(d, 1e-9);
            assert!(m.pow(d as u32) <= CELL_BUDGET);
            assert!((m + 1).pow(d as u32) > CELL_BUDGET);
        }
        assert_eq!(cells_per_axis(3, 0.3), 3);
    }
}
