//! Two-community planted-partition (PPM) and Erdős–Rényi (ER) graph generation.
//!
//! Parameter conventions: for `N` nodes split into two halves, the
//! intra-community probability is `p_aa = k_aa / (N - 2)` and the
//! inter-community probability is `p_ab = k_ab / N`, which makes the expected
//! mean degree exactly `k = (k_aa + k_ab) / 2`. Node `i` belongs to community
//! `A` when `i < N/2` and to `B` otherwise.

use rand::seq::index;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::seed::{rng_from_seed, GraphRng};

/// Slack allowed when a derived probability lands a rounding error above 1.
const PROB_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Planted,
    ErdosRenyi,
}

/// Fully resolved model specification.
///
/// For [`ModelKind::Planted`] the fields obey the planted-partition
/// conventions above. For [`ModelKind::ErdosRenyi`] both probabilities equal
/// `k / N` and `sigma2 = p (1 - p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PpmParams {
    pub model: ModelKind,
    pub n: usize,
    pub k: f64,
    pub k_aa: f64,
    pub k_ab: f64,
    pub p_aa: f64,
    pub p_ab: f64,
    pub sigma2: f64,
}

fn checked_probability(name: &str, p: f64) -> Result<f64> {
    if !p.is_finite() || !(0.0..=1.0 + PROB_SLACK).contains(&p) {
        return Err(Error::Infeasible(format!(
            "{name} = {p} lies outside [0, 1]"
        )));
    }
    Ok(p.min(1.0))
}

/// Resolves `(n, k, k_ab)` into a full planted-partition parameter set.
pub fn resolve_params(n: usize, k: f64, k_ab: f64) -> Result<PpmParams> {
    if !n.is_multiple_of(2) {
        return Err(invalid(format!("n must be even (got {n})")));
    }
    if n < 4 {
        return Err(invalid(format!("n must be at least 4 (got {n})")));
    }
    if !k.is_finite() || k < 0.0 {
        return Err(invalid(format!("k must be a finite non-negative number (got {k})")));
    }
    if !k_ab.is_finite() || k_ab < 0.0 || k_ab > 2.0 * k {
        return Err(invalid(format!("k_ab must lie in [0, 2k] = [0, {}] (got {k_ab})", 2.0 * k)));
    }
    let k_aa = 2.0 * k - k_ab;
    let p_aa = checked_probability("p_aa", k_aa / (n as f64 - 2.0))?;
    let p_ab = checked_probability("p_ab", k_ab / n as f64)?;
    Ok(PpmParams {
        model: ModelKind::Planted,
        n,
        k,
        k_aa,
        k_ab,
        p_aa,
        p_ab,
        sigma2: 0.5 * p_aa * (1.0 - p_aa) + 0.5 * p_ab * (1.0 - p_ab),
    })
}

impl PpmParams {
    /// `G(n, p)` with `p = k / n`.
    pub fn erdos_renyi(n: usize, k: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n must be positive"));
        }
        if !k.is_finite() || k < 0.0 {
            return Err(invalid(format!("k must be a finite non-negative number (got {k})")));
        }
        if k > n as f64 {
            return Err(Error::Infeasible(format!(
                "p = k/n = {} exceeds 1 (k = {k}, n = {n})",
                k / n as f64
            )));
        }
        let p = k / n as f64;
        Ok(PpmParams {
            model: ModelKind::ErdosRenyi,
            n,
            k,
            k_aa: k,
            k_ab: k,
            p_aa: p,
            p_ab: p,
            sigma2: p * (1.0 - p),
        })
    }

    /// `k_aa - k_ab`, the community-strength axis of every sweep.
    pub fn separation(&self) -> f64 {
        self.k_aa - self.k_ab
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Community {
    A,
    B,
}

/// Community of node `i` in a graph with `n` nodes.
#[inline]
pub fn community_of(i: usize, n: usize) -> Community {
    if i < n / 2 {
        Community::A
    } else {
        Community::B
    }
}

/// Symmetric 0/1 adjacency structure without self-loops, stored as sorted
/// neighbour lists (CSR).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    n: usize,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl Adjacency {
    /// Builds the structure from undirected edges `(i, j)` with `i < j`.
    ///
    /// Duplicate edges, self-loops and out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        if n > u32::MAX as usize {
            return Err(invalid("n exceeds the supported node index range"));
        }
        let mut sorted: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if i == j {
                return Err(invalid(format!("self-loop at node {i}")));
            }
            if j as usize >= n {
                return Err(invalid(format!("edge ({a}, {b}) out of range for n = {n}")));
            }
            sorted.push((i, j));
        }
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(invalid(format!("duplicate edge ({}, {})", w[0].0, w[0].1)));
        }
        Ok(Self::from_sorted_unique(n, &sorted))
    }

    /// Caller guarantees lexicographically sorted, unique, in-range pairs with `i < j`.
    fn from_sorted_unique(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut degree = vec![0usize; n];
        for &(i, j) in edges {
            degree[i as usize] += 1;
            degree[j as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut neighbors = vec![0u32; offsets[n]];
        // Lexicographic edge order leaves every row sorted.
        for &(i, j) in edges {
            neighbors[cursor[i as usize]] = j;
            cursor[i as usize] += 1;
            neighbors[cursor[j as usize]] = i;
            cursor[j as usize] += 1;
        }
        Adjacency {
            n,
            offsets,
            neighbors,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && self.neighbors(i).binary_search(&(j as u32)).is_ok()
    }

    /// Edges `(i, j)` with `i < j` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .map(|&j| j as usize)
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    /// Dense column-major `n × n` matrix of 0.0 / 1.0 entries.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for &j in self.neighbors(i) {
                a[j as usize * n + i] = 1.0;
            }
        }
        a
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.neighbors(i).iter().map(|&j| x[j as usize]).sum();
        }
    }

    /// Restriction to the nodes `range`, relabelled from zero.
    pub fn induced(&self, range: std::ops::Range<usize>) -> Adjacency {
        let start = range.start;
        let edges: Vec<(u32, u32)> = self
            .edges()
            .filter(|&(i, j)| range.contains(&i) && range.contains(&j))
            .map(|(i, j)| ((i - start) as u32, (j - start) as u32))
            .collect();
        Self::from_sorted_unique(range.len(), &edges)
    }
}

/// Edge-sampling strategy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    /// One Bernoulli draw per unordered pair (reference, `O(N²)`).
    #[default]
    PairLoop,
    /// Binomial edge count per block, then that many distinct pairs drawn
    /// uniformly within the block (`O(m)` expected).
    BlockBinomial,
}

/// One generated graph together with everything needed to regenerate it.
#[derive(Debug, Clone)]
pub struct GraphSample {
    pub params: PpmParams,
    pub adjacency: Adjacency,
    pub labels: Vec<Community>,
    pub seed: u64,
    pub sampler: Sampler,
}

impl GraphSample {
    pub fn n(&self) -> usize {
        self.adjacency.n()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.edge_count()
    }

    /// Counts edges by block: `(inside A, inside B, between)`.
    pub fn block_edge_counts(&self) -> (usize, usize, usize) {
        let mut counts = (0, 0, 0);
        for (i, j) in self.adjacency.edges() {
            match (self.labels[i], self.labels[j]) {
                (Community::A, Community::A) => counts.0 += 1,
                (Community::B, Community::B) => counts.1 += 1,
                _ => counts.2 += 1,
            }
        }
        counts
    }
}

fn labels_for(n: usize) -> Vec<Community> {
    (0..n).map(|i| community_of(i, n)).collect()
}

/// Draws a planted-partition graph.
pub fn generate_ppm(params: &PpmParams, seed: u64) -> Result<GraphSample> {
    generate_ppm_with(params, seed, Sampler::PairLoop)
}

/// Draws a planted-partition graph with an explicit sampler.
pub fn generate_ppm_with(params: &PpmParams, seed: u64, sampler: Sampler) -> Result<GraphSample> {
    // Rebuild to reject hand-edited parameter sets.
    let check = match params.model {
        ModelKind::Planted => resolve_params(params.n, params.k, params.k_ab)?,
        ModelKind::ErdosRenyi => PpmParams::erdos_renyi(params.n, params.k)?,
    };
    if check != *params {
        return Err(invalid("model parameters are not self-consistent"));
    }
    let n = params.n;
    let mut rng = rng_from_seed(seed);
    let edges = match sampler {
        Sampler::PairLoop => pair_loop(n, params.p_aa, params.p_ab, &mut rng),
        Sampler::BlockBinomial => block_binomial(n, params.p_aa, params.p_ab, &mut rng)?,
    };
    Ok(GraphSample {
        params: *params,
        adjacency: Adjacency::from_sorted_unique(n, &edges),
        labels: labels_for(n),
        seed,
        sampler,
    })
}

/// Draws `G(n, k/n)`. Labels are still assigned by half so ER graphs flow
/// through the same pipeline.
pub fn generate_er(n: usize, k: f64, seed: u64) -> Result<GraphSample> {
    generate_ppm_with(&PpmParams::erdos_renyi(n, k)?, seed, Sampler::PairLoop)
}

pub fn generate_er_with(n: usize, k: f64, seed: u64, sampler: Sampler) -> Result<GraphSample> {
    generate_ppm_with(&PpmParams::erdos_renyi(n, k)?, seed, sampler)
}

fn pair_loop(n: usize, p_aa: f64, p_ab: f64, rng: &mut GraphRng) -> Vec<(u32, u32)> {
    let half = n / 2;
    let mut edges = Vec::new();
    for i in 0..n {
        let in_a = i < half;
        for j in (i + 1)..n {
            let p = if in_a == (j < half) { p_aa } else { p_ab };
            if rng.random::<f64>() < p {
                edges.push((i as u32, j as u32));
            }
        }
    }
    edges
}

/// Pair `t` (row-major) of the strict upper triangle of an `h × h` block.
fn upper_pair(t: u64, h: u64) -> (u64, u64) {
    let row_start = |i: u64| i * (2 * h - i - 1) / 2;
    let b = (2 * h - 1) as f64;
    let mut i = ((b - (b * b - 8.0 * t as f64).max(0.0).sqrt()) / 2.0).floor() as u64;
    i = i.min(h.saturating_sub(2));
    while i > 0 && row_start(i) > t {
        i -= 1;
    }
    while i + 1 < h && row_start(i + 1) <= t {
        i += 1;
    }
    (i, t - row_start(i) + i + 1)
}

fn sample_block(
    rng: &mut GraphRng,
    pairs: u64,
    p: f64,
    mut place: impl FnMut(u64),
) -> Result<()> {
    if pairs == 0 || p <= 0.0 {
        return Ok(());
    }
    let count = Binomial::new(pairs, p)
        .map_err(|e| invalid(format!("binomial({pairs}, {p}): {e}")))?
        .sample(rng);
    let length = usize::try_from(pairs).map_err(|_| invalid("block too large for this platform"))?;
    for t in index::sample(rng, length, count as usize).iter() {
        place(t as u64);
    }
    Ok(())
}

fn block_binomial(n: usize, p_aa: f64, p_ab: f64, rng: &mut GraphRng) -> Result<Vec<(u32, u32)>> {
    let h = (n / 2) as u64;
    let rest = (n - n / 2) as u64;
    let mut edges = Vec::new();
    // inside A: nodes 0..h
    sample_block(rng, h * h.saturating_sub(1) / 2, p_aa, |t| {
        let (i, j) = upper_pair(t, h);
        edges.push((i as u32, j as u32));
    })?;
    // inside B: nodes h..n
    sample_block(rng, rest * rest.saturating_sub(1) / 2, p_aa, |t| {
        let (i, j) = upper_pair(t, rest);
        edges.push(((h + i) as u32, (h + j) as u32));
    })?;
    // between
    sample_block(rng, h * rest, p_ab, |t| {
        edges.push(((t / rest) as u32, (h + t % rest) as u32));
    })?;
    edges.sort_unstable();
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolve_dense_examples() {
        let p = resolve_params(1000, 50.0, 50.0).unwrap();
        assert_eq!(p.k_aa, 50.0);
        assert_eq!(p.p_aa, 50.0 / 998.0);
        assert_eq!(p.p_ab, 0.05);

        let p = resolve_params(1000, 50.0, 0.0).unwrap();
        assert_eq!(p.k_aa, 100.0);
        assert_eq!(p.p_ab, 0.0);
        assert_eq!(p.p_aa, 100.0 / 998.0);

        let p = resolve_params(4, 1.0, 1.0).unwrap();
        assert_eq!((p.k_aa, p.p_aa, p.p_ab), (1.0, 0.5, 0.25));
        assert_eq!(p.sigma2, 0.5 * 0.25 + 0.5 * 0.25 * 0.75);
        assert_eq!((p.k_aa + p.k_ab) / 2.0, p.k);
    }

    #[test]
    fn resolve_rejects_bad_input() {
        assert!(matches!(resolve_params(1001, 5.0, 1.0), Err(Error::InvalidParameter(m)) if m.contains("even")));
        assert!(resolve_params(2, 0.5, 0.0).is_err());
        assert!(resolve_params(10, 5.0, 11.0).is_err());
        assert!(resolve_params(10, 5.0, -1.0).is_err());
        assert!(resolve_params(10, f64::NAN, 1.0).is_err());
        // k_aa = 20 over n - 2 = 8 nodes
        assert!(matches!(resolve_params(10, 10.0, 0.0), Err(Error::Infeasible(_))));
        // k_ab = 12 > n
        assert!(matches!(resolve_params(10, 6.0, 12.0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn deterministic_limits() {
        // p_aa = 1, p_ab = 0
        let p = resolve_params(4, 1.0, 0.0).unwrap();
        assert_eq!(p.p_aa, 1.0);
        for sampler in [Sampler::PairLoop, Sampler::BlockBinomial] {
            let g = generate_ppm_with(&p, 9, sampler).unwrap();
            assert_eq!(g.edge_count(), 2);
            assert!(g.adjacency.has_edge(0, 1) && g.adjacency.has_edge(2, 3));
        }

        let p = resolve_params(8, 0.0, 0.0).unwrap();
        assert_eq!(generate_ppm(&p, 1).unwrap().edge_count(), 0);

        assert_eq!(generate_er(10, 0.0, 3).unwrap().edge_count(), 0);
        let full = generate_er(10, 10.0, 3).unwrap();
        assert_eq!(full.edge_count(), 45);
        assert!(matches!(generate_er(10, 10.5, 3), Err(Error::Infeasible(_))));
    }

    #[test]
    fn same_seed_same_graph() {
        let p = resolve_params(60, 6.0, 2.0).unwrap();
        for sampler in [Sampler::PairLoop, Sampler::BlockBinomial] {
            let a = generate_ppm_with(&p, 77, sampler).unwrap();
            let b = generate_ppm_with(&p, 77, sampler).unwrap();
            assert_eq!(a.adjacency, b.adjacency);
            let c = generate_ppm_with(&p, 78, sampler).unwrap();
            assert_ne!(a.adjacency, c.adjacency);
        }
    }

    #[test]
    fn structure_invariants() {
        let p = resolve_params(40, 5.0, 2.5).unwrap();
        let g = generate_ppm(&p, 5).unwrap();
        let dense = g.adjacency.to_dense();
        let n = g.n();
        let mut total = 0.0;
        for i in 0..n {
            assert_eq!(dense[i * n + i], 0.0);
            for j in 0..n {
                assert_eq!(dense[i * n + j], dense[j * n + i]);
                total += dense[i * n + j];
            }
        }
        assert_eq!(total as usize, 2 * g.edge_count());
        assert_eq!(g.labels.iter().filter(|&&c| c == Community::A).count(), n / 2);
    }

    #[test]
    fn no_cross_edges_without_inter_degree() {
        let p = resolve_params(200, 10.0, 0.0).unwrap();
        for sampler in [Sampler::PairLoop, Sampler::BlockBinomial] {
            let g = generate_ppm_with(&p, 11, sampler).unwrap();
            assert_eq!(g.block_edge_counts().2, 0);
            assert!(g.edge_count() > 0);
        }
    }

    #[test]
    fn upper_pair_enumerates_in_order() {
        for h in [2u64, 3, 7, 50] {
            let mut t = 0;
            for i in 0..h {
                for j in (i + 1)..h {
                    assert_eq!(upper_pair(t, h), (i, j), "h={h} t={t}");
                    t += 1;
                }
            }
        }
    }

    #[test]
    fn from_edges_validates() {
        assert!(Adjacency::from_edges(3, &[(0, 0)]).is_err());
        assert!(Adjacency::from_edges(3, &[(0, 3)]).is_err());
        assert!(Adjacency::from_edges(3, &[(0, 1), (1, 0)]).is_err());
        let a = Adjacency::from_edges(3, &[(2, 0), (0, 1)]).unwrap();
        assert_eq!(a.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2)]);
        assert_eq!(a.neighbors(0), &[1, 2]);
    }
}
