use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::graph::DiGraph;

/// Number of vertices per degree value.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DegreeHistogram {
    counts: BTreeMap<usize, usize>,
    total: usize,
}

impl DegreeHistogram {
    pub fn from_degrees(degrees: impl IntoIterator<Item = usize>) -> Self {
        let mut h = DegreeHistogram::default();
        for k in degrees {
            h.add(k, 1);
        }
        h
    }

    pub fn from_counts(counts: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut h = DegreeHistogram::default();
        for (k, c) in counts {
            h.add(k, c);
        }
        h
    }

    pub fn add(&mut self, degree: usize, count: usize) {
        if count > 0 {
            *self.counts.entry(degree).or_insert(0) += count;
            self.total += count;
        }
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn count(&self, degree: usize) -> usize {
        self.counts.get(&degree).copied().unwrap_or(0)
    }

    /// `(degree, count)` pairs in ascending degree order; zero counts omitted.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (usize, usize)> + '_ {
        self.counts.iter().map(|(&k, &c)| (k, c))
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.counts.keys().next_back().copied()
    }

    /// `Σ k · count(k)`.
    pub fn degree_sum(&self) -> usize {
        self.iter().map(|(k, c)| k * c).sum()
    }

    pub fn mean(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.degree_sum() as f64 / self.total as f64
        }
    }

    /// Smallest degree `k` with at least a fraction `q` of vertices at degree `<= k`.
    pub fn quantile(&self, q: f64) -> Option<usize> {
        let target = (q * self.total as f64).ceil().max(1.0) as usize;
        let mut acc = 0;
        for (k, c) in self.iter() {
            acc += c;
            if acc >= target {
                return Some(k);
            }
        }
        self.max_degree()
    }
}

impl Serialize for DegreeHistogram {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter().map(|(k, c)| [k, c]))
    }
}

impl<'de> Deserialize<'de> for DegreeHistogram {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs: Vec<[usize; 2]> = Vec::deserialize(d)?;
        Ok(DegreeHistogram::from_counts(pairs.into_iter().map(|[k, c]| (k, c))))
    }
}

/// Indegree and outdegree histograms.
pub fn degree_histograms(g: &DiGraph) -> (DegreeHistogram, DegreeHistogram) {
    let n = g.vertex_count();
    (
        DegreeHistogram::from_degrees((0..n).map(|v| g.in_degree(v))),
        DegreeHistogram::from_degrees((0..n).map(|v| g.out_degree(v))),
    )
}

/// The `k` vertices of largest indegree; ties broken by ascending vertex id.
pub fn top_hubs(g: &DiGraph, k: usize) -> Vec<(usize, usize)> {
    let mut order: Vec<(usize, usize)> = (0..g.vertex_count()).map(|v| (v, g.in_degree(v))).collect();
    let k = k.min(order.len());
    if k == 0 {
        return Vec::new();
    }
    let cmp = |a: &(usize, usize), b: &(usize, usize)| b.1.cmp(&a.1).then(a.0.cmp(&b.0));
    if k < order.len() {
        order.select_nth_unstable_by(k - 1, cmp);
        order.truncate(k);
    }
    order.sort_unstable_by(cmp);
    order
}
