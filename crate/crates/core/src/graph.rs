//! Directed attributed graph in compressed sparse row layout.
//!
//! Both orientations are materialized. Edges are numbered by their position in
//! the out-adjacency (sorted by source, then target, then type); the
//! in-adjacency stores, next to every predecessor, the id of the edge it came
//! from, so per-edge quantities (influence weights, attention) live in one
//! array and can be reached from either side in O(degree).

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use num_traits::Float;

use crate::error::{Error, Result};

pub type NodeId = u32;
pub type EdgeType = u32;

/// Dense row-major node feature matrix, one row per node.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    dim: usize,
    data: Vec<f32>,
}

impl FeatureMatrix {
    pub fn new(rows: usize, dim: usize, data: Vec<f32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("feature dimension must be at least 1".into()));
        }
        if data.len() != rows * dim {
            return Err(Error::Dimension(format!(
                "expected {rows}x{dim} = {} feature values, got {}",
                rows * dim,
                data.len()
            )));
        }
        Ok(Self { rows, dim, data })
    }

    /// Matrix of ones; useful when a graph has no attributes.
    pub fn constant(rows: usize, dim: usize, value: f32) -> Self {
        Self { rows, dim: dim.max(1), data: vec![value; rows * dim.max(1)] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    fn select_rows(&self, rows: &[NodeId]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.dim);
        for &r in rows {
            data.extend_from_slice(self.row(r as usize));
        }
        Self { rows: rows.len(), dim: self.dim, data }
    }
}

/// Counters reported by [`GraphBuilder::build`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub self_loops_dropped: usize,
    pub duplicates_collapsed: usize,
}

/// Collects edges, then freezes them into an [`AttributedGraph`].
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    num_nodes: usize,
    features: Arc<FeatureMatrix>,
    labels: Option<Vec<String>>,
    edges: Vec<(NodeId, NodeId, Option<EdgeType>)>,
    num_edge_types: Option<u32>,
}

impl GraphBuilder {
    pub fn new(features: FeatureMatrix) -> Self {
        Self::with_shared_features(Arc::new(features))
    }

    pub fn with_shared_features(features: Arc<FeatureMatrix>) -> Self {
        Self { num_nodes: features.rows(), features, labels: None, edges: Vec::new(), num_edge_types: None }
    }

    /// Original identifiers of the nodes, in dense-id order.
    pub fn labels(mut self, labels: Vec<String>) -> Self {
        self.labels = Some(labels);
        self
    }

    /// Declares the edge-type universe `0..count`, even if some types end up
    /// with no edges.
    pub fn edge_type_count(mut self, count: u32) -> Self {
        self.num_edge_types = Some(count);
        self
    }

    pub fn edge(&mut self, src: NodeId, dst: NodeId) -> &mut Self {
        self.edges.push((src, dst, None));
        self
    }

    pub fn typed_edge(&mut self, src: NodeId, dst: NodeId, ty: EdgeType) -> &mut Self {
        self.edges.push((src, dst, Some(ty)));
        self
    }

    pub fn extend<I: IntoIterator<Item = (NodeId, NodeId)>>(&mut self, edges: I) -> &mut Self {
        self.edges.extend(edges.into_iter().map(|(s, d)| (s, d, None)));
        self
    }

    pub fn build(self) -> Result<(AttributedGraph, BuildStats)> {
        let n = self.num_nodes;
        let mut stats = BuildStats::default();

        let typed = match self.edges.first() {
            Some((_, _, t)) => t.is_some(),
            None => self.num_edge_types.is_some(),
        };
        let mut edges = Vec::with_capacity(self.edges.len());
        for (s, d, t) in self.edges {
            if t.is_some() != typed {
                return Err(Error::MixedEdgeTypes);
            }
            for id in [s, d] {
                if id as usize >= n {
                    return Err(Error::NodeOutOfRange { id: id as usize, num_nodes: n });
                }
            }
            if s == d {
                stats.self_loops_dropped += 1;
                continue;
            }
            edges.push((s, d, t.unwrap_or(0)));
        }
        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        stats.duplicates_collapsed = before - edges.len();

        let num_edge_types = if typed {
            let max_seen = edges.iter().map(|e| e.2 + 1).max().unwrap_or(0);
            match self.num_edge_types {
                Some(declared) if declared < max_seen => {
                    return Err(Error::UnknownEdgeType { ty: max_seen - 1, declared });
                }
                Some(declared) => declared,
                None => max_seen,
            }
        } else {
            0
        };

        let labels = match self.labels {
            Some(l) if l.len() != n => {
                return Err(Error::Dimension(format!("{} labels for {n} nodes", l.len())));
            }
            Some(l) => l,
            None => (0..n).map(|i| i.to_string()).collect(),
        };

        let graph = AttributedGraph::from_sorted(n, &edges, typed, num_edge_types, self.features, labels);
        Ok((graph, stats))
    }
}

/// Immutable directed graph with per-node features and optional edge types.
#[derive(Debug, Clone)]
pub struct AttributedGraph {
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeId>,
    edge_sources: Vec<NodeId>,
    edge_types: Option<Vec<EdgeType>>,
    num_edge_types: u32,
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeId>,
    in_edge_ids: Vec<usize>,
    features: Arc<FeatureMatrix>,
    labels: Vec<String>,
}

impl AttributedGraph {
    /// Untyped graph from an edge list; see [`GraphBuilder`] for the rules.
    pub fn from_edges(features: FeatureMatrix, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let mut b = GraphBuilder::new(features);
        b.extend(edges.iter().copied());
        Ok(b.build()?.0)
    }

    fn from_sorted(
        n: usize,
        edges: &[(NodeId, NodeId, EdgeType)],
        typed: bool,
        num_edge_types: u32,
        features: Arc<FeatureMatrix>,
        labels: Vec<String>,
    ) -> Self {
        let m = edges.len();
        let mut out_offsets = vec![0usize; n + 1];
        let mut in_offsets = vec![0usize; n + 1];
        for &(s, d, _) in edges {
            out_offsets[s as usize + 1] += 1;
            in_offsets[d as usize + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
            in_offsets[i + 1] += in_offsets[i];
        }
        let out_targets: Vec<NodeId> = edges.iter().map(|e| e.1).collect();
        let edge_sources: Vec<NodeId> = edges.iter().map(|e| e.0).collect();
        let edge_types = typed.then(|| edges.iter().map(|e| e.2).collect());

        // Edges are sorted by source, so filling in-lists in edge order keeps
        // each predecessor list sorted.
        let mut cursor = in_offsets.clone();
        let mut in_sources = vec![0; m];
        let mut in_edge_ids = vec![0; m];
        for (e, &(s, d, _)) in edges.iter().enumerate() {
            let slot = cursor[d as usize];
            in_sources[slot] = s;
            in_edge_ids[slot] = e;
            cursor[d as usize] += 1;
        }

        Self {
            out_offsets,
            out_targets,
            edge_sources,
            edge_types,
            num_edge_types,
            in_offsets,
            in_sources,
            in_edge_ids,
            features,
            labels,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.out_offsets.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.out_targets.len()
    }

    pub fn out_neighbors(&self, j: NodeId) -> &[NodeId] {
        &self.out_targets[self.out_edge_range(j)]
    }

    pub fn in_neighbors(&self, i: NodeId) -> &[NodeId] {
        &self.in_sources[self.in_offsets[i as usize]..self.in_offsets[i as usize + 1]]
    }

    /// Ids of the edges leaving `j`; they are contiguous.
    pub fn out_edge_range(&self, j: NodeId) -> Range<usize> {
        self.out_offsets[j as usize]..self.out_offsets[j as usize + 1]
    }

    /// Ids of the edges entering `i`, aligned with [`Self::in_neighbors`].
    pub fn in_edge_ids(&self, i: NodeId) -> &[usize] {
        &self.in_edge_ids[self.in_offsets[i as usize]..self.in_offsets[i as usize + 1]]
    }

    pub fn out_degree(&self, j: NodeId) -> usize {
        self.out_offsets[j as usize + 1] - self.out_offsets[j as usize]
    }

    pub fn in_degree(&self, i: NodeId) -> usize {
        self.in_offsets[i as usize + 1] - self.in_offsets[i as usize]
    }

    pub fn edge_source(&self, e: usize) -> NodeId {
        self.edge_sources[e]
    }

    pub fn edge_target(&self, e: usize) -> NodeId {
        self.out_targets[e]
    }

    pub fn edge_type(&self, e: usize) -> Option<EdgeType> {
        self.edge_types.as_ref().map(|t| t[e])
    }

    pub fn is_typed(&self) -> bool {
        self.edge_types.is_some()
    }

    pub fn num_edge_types(&self) -> u32 {
        self.num_edge_types
    }

    /// `(source, target)` pairs in edge-id order.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = (NodeId, NodeId)> + '_ {
        self.edge_sources.iter().copied().zip(self.out_targets.iter().copied())
    }

    pub fn has_edge(&self, j: NodeId, i: NodeId) -> bool {
        self.out_neighbors(j).binary_search(&i).is_ok()
    }

    pub fn features(&self) -> &FeatureMatrix {
        &self.features
    }

    pub fn shared_features(&self) -> Arc<FeatureMatrix> {
        Arc::clone(&self.features)
    }

    pub fn feature(&self, i: NodeId) -> &[f32] {
        self.features.row(i as usize)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: NodeId) -> &str {
        &self.labels[i as usize]
    }

    pub fn check_node(&self, id: usize) -> Result<NodeId> {
        if id < self.num_nodes() {
            Ok(id as NodeId)
        } else {
            Err(Error::NodeOutOfRange { id, num_nodes: self.num_nodes() })
        }
    }

    /// Edge count per declared type, indexed by type id.
    pub fn edge_type_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_edge_types as usize];
        if let Some(types) = &self.edge_types {
            for &t in types {
                counts[t as usize] += 1;
            }
        }
        counts
    }

    /// Same node set and features, keeping only edges of type `ty`.
    pub fn subgraph_by_edge_type(&self, ty: EdgeType) -> Result<Self> {
        let types = self.edge_types.as_ref().ok_or(Error::Untyped)?;
        if ty >= self.num_edge_types {
            return Err(Error::UnknownEdgeType { ty, declared: self.num_edge_types });
        }
        let edges: Vec<_> = self.edges().zip(types).filter(|(_, &t)| t == ty).map(|((s, d), &t)| (s, d, t)).collect();
        Ok(Self::from_sorted(
            self.num_nodes(),
            &edges,
            true,
            self.num_edge_types,
            self.shared_features(),
            self.labels.clone(),
        ))
    }

    /// Same nodes and features with a different (untyped) edge set.
    pub fn with_edges(&self, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let mut b = GraphBuilder::with_shared_features(self.shared_features()).labels(self.labels.clone());
        b.extend(edges.iter().copied());
        Ok(b.build()?.0)
    }

    /// Subgraph induced by `nodes` (given in the desired new order). Features,
    /// labels and edge types follow the nodes.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> Self {
        let mut new_id = vec![NodeId::MAX; self.num_nodes()];
        for (k, &v) in nodes.iter().enumerate() {
            new_id[v as usize] = k as NodeId;
        }
        let mut edges = Vec::new();
        for &v in nodes {
            for e in self.out_edge_range(v) {
                let w = self.out_targets[e];
                if new_id[w as usize] != NodeId::MAX {
                    edges.push((new_id[v as usize], new_id[w as usize], self.edge_type(e).unwrap_or(0)));
                }
            }
        }
        edges.sort_unstable();
        let labels = nodes.iter().map(|&v| self.labels[v as usize].clone()).collect();
        Self::from_sorted(
            nodes.len(),
            &edges,
            self.is_typed(),
            self.num_edge_types,
            Arc::new(self.features.select_rows(nodes)),
            labels,
        )
    }

    /// Largest weakly connected component as an induced subgraph, plus the
    /// original id of every retained node. Ties go to the component holding
    /// the smallest node id.
    pub fn largest_weak_component(&self) -> (Self, Vec<NodeId>) {
        let n = self.num_nodes();
        let mut seen = vec![false; n];
        let mut best: Vec<NodeId> = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n as NodeId {
            if seen[start as usize] {
                continue;
            }
            let mut members = vec![start];
            seen[start as usize] = true;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &w in self.out_neighbors(v).iter().chain(self.in_neighbors(v)) {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        members.push(w);
                        queue.push_back(w);
                    }
                }
            }
            if members.len() > best.len() {
                best = members;
            }
        }
        best.sort_unstable();
        (self.induced_subgraph(&best), best)
    }

    /// Cosine similarity of the feature vectors of `j` and `i`; zero when either
    /// vector has zero norm.
    pub fn cosine_similarity(&self, j: NodeId, i: NodeId) -> f64 {
        cosine(self.feature(j), self.feature(i))
    }
}

pub(crate) fn cosine(a: &[f32], b: &[f32]) -> f64 {
    let (mut dot, mut na, mut nb) = (0.0f64, 0.0f64, 0.0f64);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x as f64, y as f64);
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (Float::sqrt(na) * Float::sqrt(nb))).clamp(-1.0, 1.0)
}

/// One importance value per node, tagged with the method that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    pub method: String,
    pub values: Vec<f64>,
}

impl ScoreVector {
    pub fn new(method: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if let Some(node) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteScore { node });
        }
        Ok(Self { method: method.into(), values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Node ids by descending score, ties broken by ascending id.
    pub fn ranking(&self) -> Vec<NodeId> {
        ranking(&self.values)
    }
}

pub(crate) fn ranking(values: &[f64]) -> Vec<NodeId> {
    let mut order: Vec<NodeId> = (0..values.len() as NodeId).collect();
    order.sort_by(|&a, &b| values[b as usize].total_cmp(&values[a as usize]).then(a.cmp(&b)));
    order
}
