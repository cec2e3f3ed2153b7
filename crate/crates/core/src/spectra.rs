//! Frequency sets on the circle, their periodic line spectra, and the
//! displacement patterns used by the perturbation theorems.
//!
//! Displacements are stored in grid units: a node set perturbed by `mu`
//! has nodes `j/d + mu_j/d`, so the same numbers serve as the line
//! perturbations `lambda_n - n` of the associated `d`-periodic spectrum.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Nodes closer than this (modulo 1) are treated as duplicates.
pub const COLLISION_TOL: f64 = 1e-12;

/// Deterministic generator used by every stochastic operation.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn reduce_mod_one(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    // rem_euclid can round up to exactly 1.0 for tiny negative inputs
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// `d` distinct points of `[0, 1)`, sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeSet {
    nodes: Vec<f64>,
}

impl NodeSet {
    /// Reduces every value modulo 1, sorts, and rejects duplicates.
    pub fn new(values: impl Into<Vec<f64>>) -> Result<Self> {
        let mut nodes: Vec<f64> = values.into();
        if nodes.is_empty() {
            return Err(Error::invalid("a node set needs at least one node"));
        }
        if let Some(bad) = nodes.iter().find(|x| !x.is_finite()) {
            return Err(Error::invalid(format!("non-finite node {bad}")));
        }
        for x in nodes.iter_mut() {
            *x = reduce_mod_one(*x);
        }
        nodes.sort_by(|a, b| a.total_cmp(b));
        let set = NodeSet { nodes };
        if let Some((first, second, gap)) = set.closest_pair() {
            if gap < COLLISION_TOL {
                return Err(Error::DuplicateNodes { first, second });
            }
        }
        Ok(set)
    }

    pub fn d(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    // Adjacent pair (wraparound included) with the smallest circular gap.
    fn closest_pair(&self) -> Option<(f64, f64, f64)> {
        let n = self.nodes.len();
        if n < 2 {
            return None;
        }
        let mut best = (
            self.nodes[n - 1],
            self.nodes[0],
            1.0 - self.nodes[n - 1] + self.nodes[0],
        );
        for w in self.nodes.windows(2) {
            let gap = w[1] - w[0];
            if gap < best.2 {
                best = (w[0], w[1], gap);
            }
        }
        Some(best)
    }

    /// Minimal circular distance between distinct nodes. A single node has
    /// separation 1 (its only neighbour is its own translate by 1).
    pub fn separation(&self) -> f64 {
        self.closest_pair().map_or(1.0, |(_, _, gap)| gap)
    }

    /// Global rotation `theta -> theta + c (mod 1)`.
    pub fn rotated(&self, c: f64) -> NodeSet {
        NodeSet::new(self.nodes.iter().map(|x| x + c).collect::<Vec<_>>())
            .expect("rotation preserves distinctness")
    }

    /// Reflection `theta -> -theta (mod 1)`.
    pub fn reflected(&self) -> NodeSet {
        NodeSet::new(self.nodes.iter().map(|x| -x).collect::<Vec<_>>())
            .expect("reflection preserves distinctness")
    }

    pub fn spectrum(&self) -> PeriodicSpectrum {
        PeriodicSpectrum { base: self.clone() }
    }
}

/// Circular separation of raw values; duplicates are an error.
pub fn separation(values: &[f64]) -> Result<f64> {
    NodeSet::new(values.to_vec()).map(|s| s.separation())
}

/// The `d`-th roots of unity `{j/d}`.
pub fn roots_of_unity(d: usize) -> Result<NodeSet> {
    if d == 0 {
        return Err(Error::invalid("d must be positive"));
    }
    NodeSet::new((0..d).map(|j| j as f64 / d as f64).collect::<Vec<_>>())
}

/// The triangular family whose lower sampling bound degenerates as `d` grows:
/// `{0} ∪ {±(j - 1/4)/d}` for odd `d`, with the extra node `(k - 1/4)/d`
/// closing the even case `d = 2k`.
pub fn counterexample_family(d: usize) -> Result<NodeSet> {
    if d == 0 {
        return Err(Error::invalid("d must be positive"));
    }
    let df = d as f64;
    let k = d / 2;
    let paired = if d % 2 == 1 { k } else { k - 1 };
    let mut nodes = vec![0.0];
    for j in 1..=paired {
        let x = (j as f64 - 0.25) / df;
        nodes.push(x);
        nodes.push(-x);
    }
    if d.is_multiple_of(2) {
        nodes.push((k as f64 - 0.25) / df);
    }
    NodeSet::new(nodes)
}

/// Sup over windows `m*N .. (m+1)*N - 1` (indices mod `d`, `m = 0..d-1`) of
/// the absolute window mean.
pub fn block_average_sup(mu: &[f64], block: usize) -> Result<f64> {
    let d = mu.len();
    if block == 0 || block > d {
        return Err(Error::invalid(format!(
            "block size {block} must lie in 1..={d}"
        )));
    }
    let mut best = 0.0f64;
    for m in 0..d {
        let start = (m * block) % d;
        let sum: f64 = (0..block).map(|i| mu[(start + i) % d]).sum();
        best = best.max((sum / block as f64).abs());
    }
    Ok(best)
}

/// Per-node displacements in grid units with their summary sizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationSpec {
    pub mu: Vec<f64>,
    /// `max_j |mu_j|`
    pub sup_norm: f64,
    pub block_size: Option<usize>,
    /// Block-averaged size for `block_size`, when present.
    pub mu_star: Option<f64>,
}

impl PerturbationSpec {
    pub fn new(mu: Vec<f64>, block_size: Option<usize>) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::invalid("empty displacement sequence"));
        }
        if mu.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("non-finite displacement"));
        }
        let sup_norm = mu.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let mu_star = block_size.map(|n| block_average_sup(&mu, n)).transpose()?;
        Ok(PerturbationSpec {
            mu,
            sup_norm,
            block_size,
            mu_star,
        })
    }

    pub fn zero(d: usize) -> Self {
        PerturbationSpec::new(vec![0.0; d.max(1)], None).expect("zero pattern is valid")
    }

    pub fn d(&self) -> usize {
        self.mu.len()
    }

    pub fn negated(&self) -> Self {
        PerturbationSpec::new(self.mu.iter().map(|x| -x).collect(), self.block_size)
            .expect("negation preserves validity")
    }
}

/// Random or deterministic displacement patterns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerturbationKind {
    /// Each `mu_j` uniform in `[-mu_max, mu_max]`, `mu_max < 1/4`.
    UniformKadec { mu_max: f64 },
    /// `|mu_j| <= l` with block means of size `n` whose sup equals `mu_star`.
    BlockAvdonin { l: f64, n: usize, mu_star: f64 },
    /// All `mu_j = c`.
    ConstantShift { c: f64 },
}

pub fn make_perturbation(kind: PerturbationKind, d: usize, seed: u64) -> Result<PerturbationSpec> {
    if d == 0 {
        return Err(Error::invalid("d must be positive"));
    }
    let mut rng = seeded_rng(seed);
    match kind {
        PerturbationKind::ConstantShift { c } => {
            if !c.is_finite() {
                return Err(Error::invalid("shift must be finite"));
            }
            PerturbationSpec::new(vec![c; d], None)
        }
        PerturbationKind::UniformKadec { mu_max } => {
            if !(0.0..0.25).contains(&mu_max) {
                return Err(Error::invalid(format!(
                    "uniform displacement bound {mu_max} must lie in [0, 1/4)"
                )));
            }
            let mu = (0..d)
                .map(|_| {
                    if mu_max == 0.0 {
                        0.0
                    } else {
                        rng.random_range(-mu_max..=mu_max)
                    }
                })
                .collect();
            PerturbationSpec::new(mu, None)
        }
        PerturbationKind::BlockAvdonin { l, n, mu_star } => {
            block_avdonin(&mut rng, d, l, n, mu_star)
        }
    }
}

// Blocks are the disjoint runs [mN, (m+1)N); each gets a zero-mean random
// pattern of amplitude at most l - mu_star plus a block mean in
// [-mu_star, mu_star], one block carrying the mean +-mu_star exactly.
fn block_avdonin(
    rng: &mut ChaCha8Rng,
    d: usize,
    l: f64,
    n: usize,
    mu_star: f64,
) -> Result<PerturbationSpec> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::invalid(format!(
            "sup bound L = {l} must be positive"
        )));
    }
    if !(0.0..0.25).contains(&mu_star) {
        return Err(Error::invalid(format!(
            "block mean target {mu_star} must lie in [0, 1/4)"
        )));
    }
    if mu_star > l {
        return Err(Error::invalid(format!(
            "block mean target {mu_star} exceeds the sup bound L = {l}"
        )));
    }
    if n == 0 || !d.is_multiple_of(n) {
        return Err(Error::invalid(format!(
            "block size {n} must be positive and divide d = {d}"
        )));
    }
    let blocks = d / n;
    let amplitude = l - mu_star;
    let extremal_block = rng.random_range(0..blocks);
    let extremal_sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let mut mu = Vec::with_capacity(d);
    for b in 0..blocks {
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let mean = raw.iter().sum::<f64>() / n as f64;
        let centered: Vec<f64> = raw.iter().map(|x| x - mean).collect();
        let peak = centered.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let scale = if peak > 0.0 { amplitude / peak } else { 0.0 };
        let target = if b == extremal_block {
            extremal_sign * mu_star
        } else if mu_star > 0.0 {
            rng.random_range(-mu_star..=mu_star)
        } else {
            0.0
        };
        mu.extend(centered.iter().map(|x| x * scale + target));
    }
    // centring is exact only up to rounding; pin the extremal block mean
    let block = &mut mu[extremal_block * n..(extremal_block + 1) * n];
    let current = block.iter().sum::<f64>() / n as f64;
    block[0] += (extremal_sign * mu_star - current) * n as f64;
    PerturbationSpec::new(mu, Some(n))
}

/// Moves node `j` by `mu_j / d` and re-sorts.
pub fn apply_perturbation(base: &NodeSet, pert: &PerturbationSpec) -> Result<NodeSet> {
    let d = base.d();
    if pert.d() != d {
        return Err(Error::invalid(format!(
            "perturbation has {} entries for {d} nodes",
            pert.d()
        )));
    }
    let df = d as f64;
    NodeSet::new(
        base.nodes()
            .iter()
            .zip(&pert.mu)
            .map(|(x, m)| x + m / df)
            .collect::<Vec<_>>(),
    )
}

/// The `d`-periodic line spectrum `d*theta_j + d*Z` generated by a node set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicSpectrum {
    pub base: NodeSet,
}

impl PeriodicSpectrum {
    /// Spectrum with period `K` generated by points `x_k` in `[0, K)`.
    pub fn from_points(period: usize, points: &[f64]) -> Result<Self> {
        if period == 0 || points.len() != period {
            return Err(Error::invalid(format!(
                "a {period}-periodic spectrum of density one needs {period} points per period, got {}",
                points.len()
            )));
        }
        let k = period as f64;
        Ok(NodeSet::new(points.iter().map(|x| x / k).collect::<Vec<_>>())?.spectrum())
    }

    pub fn period(&self) -> f64 {
        self.base.d() as f64
    }

    /// Generators `d*theta_j` in `[0, d)`.
    pub fn points_in_period(&self) -> Vec<f64> {
        let p = self.period();
        self.base.nodes().iter().map(|t| t * p).collect()
    }

    /// `delta(Lambda) = d * delta_circ`.
    pub fn separation(&self) -> f64 {
        self.period() * self.base.separation()
    }

    /// All spectrum points in `[a, b]`, ascending.
    pub fn points_between(&self, a: f64, b: f64) -> Vec<f64> {
        let p = self.period();
        let gens = self.points_in_period();
        let first = (a / p).floor() as i64 - 1;
        let last = (b / p).ceil() as i64 + 1;
        let mut out = Vec::new();
        for m in first..=last {
            for g in &gens {
                let x = g + m as f64 * p;
                if x >= a && x <= b {
                    out.push(x);
                }
            }
        }
        out.sort_by(|x, y| x.total_cmp(y));
        out
    }
}
