//! Attribute-aware propagation models and the Monte Carlo spread estimator.
//!
//! Edge influence mixes a structural part (`1/in-degree` of the target) with a
//! semantic part (softmax of feature cosine similarity over the target's
//! in-edges). Both parts are normalized per target, so the influence entering
//! any node with predecessors sums to exactly one.
//!
//! All three models update in synchronous rounds. Every Monte Carlo run draws
//! from its own ChaCha8 stream selected by `(rng_seed, run_index)`, so results
//! do not depend on scheduling.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, NodeId};
use crate::par;

const ALPHA_SUM_TOL: f64 = 1e-9;

/// Per-edge influence, indexed by edge id.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceWeights {
    structural: Vec<f64>,
    semantic: Vec<f64>,
    combined: Vec<f64>,
    alpha1: f64,
    alpha2: f64,
}

impl InfluenceWeights {
    pub fn weight(&self, edge: usize) -> f64 {
        self.combined[edge]
    }

    pub fn structural(&self, edge: usize) -> f64 {
        self.structural[edge]
    }

    pub fn semantic(&self, edge: usize) -> f64 {
        self.semantic[edge]
    }

    pub fn weights(&self) -> &[f64] {
        &self.combined
    }

    pub fn alphas(&self) -> (f64, f64) {
        (self.alpha1, self.alpha2)
    }
}

fn check_alphas(alpha1: f64, alpha2: f64) -> Result<()> {
    if !(alpha1 >= 0.0 && alpha2 >= 0.0) {
        return Err(Error::param("alpha", "alpha1 and alpha2 must be non-negative"));
    }
    if (alpha1 + alpha2 - 1.0).abs() > ALPHA_SUM_TOL {
        return Err(Error::param("alpha", "alpha1 + alpha2 must equal 1"));
    }
    Ok(())
}

pub fn compute_influence_weights(g: &AttributedGraph, alpha1: f64, alpha2: f64) -> Result<InfluenceWeights> {
    check_alphas(alpha1, alpha2)?;
    let m = g.num_edges();
    let mut structural = vec![0.0; m];
    let mut semantic = vec![0.0; m];
    let mut sims = Vec::new();
    for i in 0..g.num_nodes() as NodeId {
        let ids = g.in_edge_ids(i);
        if ids.is_empty() {
            continue;
        }
        let share = 1.0 / ids.len() as f64;
        sims.clear();
        sims.extend(g.in_neighbors(i).iter().map(|&j| g.cosine_similarity(j, i)));
        let top = sims.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let total: f64 = sims.iter().map(|s| Float::exp(s - top)).sum();
        for (&e, &s) in ids.iter().zip(&sims) {
            structural[e] = share;
            semantic[e] = Float::exp(s - top) / total;
        }
    }
    let combined = structural.iter().zip(&semantic).map(|(s, t)| alpha1 * s + alpha2 * t).collect();
    Ok(InfluenceWeights { structural, semantic, combined, alpha1, alpha2 })
}

fn seed_mask(g: &AttributedGraph, seeds: &[NodeId]) -> Result<(Vec<bool>, Vec<NodeId>)> {
    let mut active = vec![false; g.num_nodes()];
    let mut frontier = Vec::with_capacity(seeds.len());
    for &s in seeds {
        g.check_node(s as usize)?;
        if !active[s as usize] {
            active[s as usize] = true;
            frontier.push(s);
        }
    }
    Ok((active, frontier))
}

fn collect(mask: &[bool]) -> Vec<NodeId> {
    mask.iter().enumerate().filter(|(_, &a)| a).map(|(v, _)| v as NodeId).collect()
}

/// LT+ with explicit per-node thresholds.
pub fn run_lt_plus_with_thresholds(
    g: &AttributedGraph,
    weights: &InfluenceWeights,
    seeds: &[NodeId],
    thresholds: &[f64],
) -> Result<Vec<NodeId>> {
    if thresholds.len() != g.num_nodes() {
        return Err(Error::Dimension(alloc::format!("{} thresholds for {} nodes", thresholds.len(), g.num_nodes())));
    }
    let (mut active, mut frontier) = seed_mask(g, seeds)?;
    let mut pressure = vec![0.0f64; g.num_nodes()];
    let mut touched = Vec::new();
    while !frontier.is_empty() {
        touched.clear();
        for &j in &frontier {
            for e in g.out_edge_range(j) {
                let i = g.edge_target(e) as usize;
                if !active[i] {
                    pressure[i] += weights.weight(e);
                    touched.push(i as NodeId);
                }
            }
        }
        frontier.clear();
        for &i in &touched {
            let iu = i as usize;
            if !active[iu] && pressure[iu] >= thresholds[iu] {
                active[iu] = true;
                frontier.push(i);
            }
        }
    }
    Ok(collect(&active))
}

/// LT+ with thresholds drawn uniformly from `[0, 1)`, one per node.
pub fn run_lt_plus<R: Rng + ?Sized>(
    g: &AttributedGraph,
    weights: &InfluenceWeights,
    seeds: &[NodeId],
    rng: &mut R,
) -> Result<Vec<NodeId>> {
    let thresholds: Vec<f64> = (0..g.num_nodes()).map(|_| rng.random::<f64>()).collect();
    run_lt_plus_with_thresholds(g, weights, seeds, &thresholds)
}

/// IC+: each newly activated node gets one attempt per inactive out-neighbor,
/// succeeding with the edge's influence weight.
pub fn run_ic_plus<R: Rng + ?Sized>(
    g: &AttributedGraph,
    weights: &InfluenceWeights,
    seeds: &[NodeId],
    rng: &mut R,
) -> Result<Vec<NodeId>> {
    let (mut active, mut frontier) = seed_mask(g, seeds)?;
    let mut next = Vec::new();
    while !frontier.is_empty() {
        next.clear();
        for &j in &frontier {
            for e in g.out_edge_range(j) {
                let i = g.edge_target(e) as usize;
                if !active[i] && rng.random::<f64>() < weights.weight(e) {
                    active[i] = true;
                    next.push(i as NodeId);
                }
            }
        }
        core::mem::swap(&mut frontier, &mut next);
    }
    Ok(collect(&active))
}

fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::param(name, "must lie in [0, 1]"))
    }
}

/// Discrete-time SIR along out-edges. Per step every infected node infects
/// each susceptible out-neighbor with probability `beta`, then recovers with
/// probability `gamma`. Returns every node that was ever infected.
pub fn run_sir<R: Rng + ?Sized>(
    g: &AttributedGraph,
    beta: f64,
    gamma: f64,
    seeds: &[NodeId],
    max_steps: Option<usize>,
    rng: &mut R,
) -> Result<Vec<NodeId>> {
    check_probability("beta", beta)?;
    check_probability("gamma", gamma)?;
    let (mut reached, mut infected) = seed_mask(g, seeds)?;
    let mut fresh = Vec::new();
    let mut still = Vec::new();
    let mut step = 0;
    while !infected.is_empty() && max_steps.is_none_or(|cap| step < cap) {
        step += 1;
        fresh.clear();
        for &j in &infected {
            for &i in g.out_neighbors(j) {
                if !reached[i as usize] && rng.random::<f64>() < beta {
                    reached[i as usize] = true;
                    fresh.push(i);
                }
            }
        }
        still.clear();
        for &j in &infected {
            if rng.random::<f64>() >= gamma {
                still.push(j);
            }
        }
        infected.clear();
        infected.extend_from_slice(&still);
        infected.extend_from_slice(&fresh);
    }
    Ok(collect(&reached))
}

/// `⟨k⟩ / (⟨k²⟩ − ⟨k⟩)` on the undirected simple degree sequence.
pub fn sir_epidemic_threshold(g: &AttributedGraph) -> Option<f64> {
    let n = g.num_nodes();
    if n == 0 {
        return None;
    }
    let mut nbrs = Vec::new();
    let (mut k1, mut k2) = (0.0f64, 0.0f64);
    for v in 0..n as NodeId {
        nbrs.clear();
        nbrs.extend_from_slice(g.out_neighbors(v));
        nbrs.extend_from_slice(g.in_neighbors(v));
        nbrs.sort_unstable();
        nbrs.dedup();
        let k = nbrs.len() as f64;
        k1 += k;
        k2 += k * k;
    }
    let (k1, k2) = (k1 / n as f64, k2 / n as f64);
    (k2 - k1 > 0.0).then(|| k1 / (k2 - k1))
}

/// Default SIR infection probability: 1.5 times the epidemic threshold,
/// capped at 1.
pub fn default_sir_beta(g: &AttributedGraph) -> f64 {
    sir_epidemic_threshold(g).map_or(1.0, |b| (1.5 * b).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffusionModel {
    LtPlus,
    IcPlus,
    Sir,
}

impl DiffusionModel {
    pub fn name(self) -> &'static str {
        match self {
            DiffusionModel::LtPlus => "ltp",
            DiffusionModel::IcPlus => "icp",
            DiffusionModel::Sir => "sir",
        }
    }
}

impl core::str::FromStr for DiffusionModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ltp" | "lt+" => Ok(Self::LtPlus),
            "icp" | "ic+" => Ok(Self::IcPlus),
            "sir" => Ok(Self::Sir),
            _ => Err(Error::param("model", alloc::format!("unknown diffusion model `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionConfig {
    pub model: DiffusionModel,
    pub alpha1: f64,
    pub alpha2: f64,
    /// `None` picks [`default_sir_beta`] for the graph at hand.
    pub sir_beta: Option<f64>,
    pub sir_gamma: f64,
    pub max_steps: Option<usize>,
    pub num_runs: usize,
    pub rng_seed: u64,
}

impl DiffusionConfig {
    pub fn new(model: DiffusionModel) -> Self {
        Self {
            model,
            alpha1: 0.5,
            alpha2: 0.5,
            sir_beta: None,
            sir_gamma: 1.0,
            max_steps: None,
            num_runs: 1000,
            rng_seed: 42,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_alphas(self.alpha1, self.alpha2)?;
        if let Some(b) = self.sir_beta {
            check_probability("beta", b)?;
        }
        check_probability("gamma", self.sir_gamma)?;
        if self.num_runs == 0 {
            return Err(Error::param("num_runs", "at least one run is required"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionResult {
    /// Mean fraction of activated nodes.
    pub mean_spread: f64,
    /// Sample standard deviation of the per-run fraction.
    pub std_spread: f64,
    pub activated_counts: Vec<usize>,
    pub runs: usize,
}

/// Reusable estimator: influence weights and the SIR rate are computed once
/// per graph.
#[derive(Debug, Clone)]
pub struct Simulator<'g> {
    graph: &'g AttributedGraph,
    config: DiffusionConfig,
    weights: InfluenceWeights,
    beta: f64,
}

impl<'g> Simulator<'g> {
    pub fn new(graph: &'g AttributedGraph, config: DiffusionConfig) -> Result<Self> {
        config.validate()?;
        let weights = compute_influence_weights(graph, config.alpha1, config.alpha2)?;
        let beta = config.sir_beta.unwrap_or_else(|| default_sir_beta(graph));
        Ok(Self { graph, config, weights, beta })
    }

    pub fn config(&self) -> &DiffusionConfig {
        &self.config
    }

    /// SIR infection probability in effect (explicit or defaulted).
    pub fn sir_beta(&self) -> f64 {
        self.beta
    }

    pub fn weights(&self) -> &InfluenceWeights {
        &self.weights
    }

    /// The RNG stream of one Monte Carlo run.
    pub fn run_rng(&self, run_index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.rng_seed);
        rng.set_stream(run_index as u64);
        rng
    }

    pub fn run_once(&self, seeds: &[NodeId], run_index: usize) -> Result<Vec<NodeId>> {
        let mut rng = self.run_rng(run_index);
        let g = self.graph;
        match self.config.model {
            DiffusionModel::LtPlus => run_lt_plus(g, &self.weights, seeds, &mut rng),
            DiffusionModel::IcPlus => run_ic_plus(g, &self.weights, seeds, &mut rng),
            DiffusionModel::Sir => run_sir(g, self.beta, self.config.sir_gamma, seeds, self.config.max_steps, &mut rng),
        }
    }

    pub fn spread(&self, seeds: &[NodeId]) -> Result<DiffusionResult> {
        seed_mask(self.graph, seeds)?;
        let runs = self.config.num_runs;
        let outcomes = par::map_range(runs, |r| self.run_once(seeds, r).map(|a| a.len()));
        let activated_counts = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
        let n = self.graph.num_nodes().max(1) as f64;
        let fractions: Vec<f64> = activated_counts.iter().map(|&c| c as f64 / n).collect();
        let mean_spread = fractions.iter().sum::<f64>() / runs as f64;
        let std_spread = if runs > 1 {
            let ss: f64 = fractions.iter().map(|f| (f - mean_spread) * (f - mean_spread)).sum();
            Float::sqrt(ss / (runs - 1) as f64)
        } else {
            0.0
        };
        Ok(DiffusionResult { mean_spread, std_spread, activated_counts, runs })
    }
}

/// Monte Carlo estimate of the influence spread `σ(S)`.
pub fn influence_spread(g: &AttributedGraph, config: &DiffusionConfig, seeds: &[NodeId]) -> Result<DiffusionResult> {
    Simulator::new(g, *config)?.spread(seeds)
}
