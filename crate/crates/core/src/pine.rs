//! Attention-derived importance scores.
//!
//! A node's score is the attention its out-neighbors pay to it, summed over
//! its out-edges. Heterogeneous graphs are handled by scoring each edge-type
//! subgraph with its own model and summing over a selected set of types.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::gat::{split_edges, train, GatModel, Real, SplitConfig, TrainConfig, TrainReport};
use crate::graph::{AttributedGraph, EdgeType, NodeId, ScoreVector};
use crate::metrics::spearman;
use crate::par;

/// Sum of the cached attention on each node's out-edges at `layer`.
pub fn pine_scores<T: Real>(model: &GatModel<T>, g: &AttributedGraph, layer: usize) -> Result<ScoreVector> {
    let attention = model.cached_attention(layer, g.num_edges())?;
    let values =
        (0..g.num_nodes() as NodeId).map(|j| g.out_edge_range(j).map(|e| attention[e].as_f64()).sum()).collect();
    ScoreVector::new("pine", values)
}

/// Forward `model` on `g` and score. The caller's model is left untouched.
pub fn score_graph<T: Real>(model: &GatModel<T>, g: &AttributedGraph, layer: usize) -> Result<ScoreVector> {
    let mut m = model.clone();
    m.forward(g)?;
    pine_scores(&m, g, layer)
}

/// Degree-based rescaling applied after scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Calibration {
    /// `score · ln(1 + out-degree)`
    #[default]
    LogDegree,
    /// `score · out-degree`
    Degree,
    /// `score · sqrt(out-degree)`
    SqrtDegree,
    None,
}

impl Calibration {
    pub fn name(self) -> &'static str {
        match self {
            Calibration::LogDegree => "log-degree",
            Calibration::Degree => "degree",
            Calibration::SqrtDegree => "sqrt-degree",
            Calibration::None => "none",
        }
    }

    fn factor(self, out_degree: usize) -> f64 {
        let k = out_degree as f64;
        match self {
            Calibration::LogDegree => Float::ln_1p(k),
            Calibration::Degree => k,
            Calibration::SqrtDegree => Float::sqrt(k),
            Calibration::None => 1.0,
        }
    }
}

impl core::str::FromStr for Calibration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log-degree" => Ok(Self::LogDegree),
            "degree" => Ok(Self::Degree),
            "sqrt-degree" => Ok(Self::SqrtDegree),
            "none" => Ok(Self::None),
            _ => Err(Error::param("calibration", alloc::format!("unknown calibration `{s}`"))),
        }
    }
}

/// Rescales scores by a function of each node's out-degree in `g` (the whole
/// graph, not a type subgraph).
pub fn calibrate_by_out_degree(
    scores: &ScoreVector,
    g: &AttributedGraph,
    calibration: Calibration,
) -> Result<ScoreVector> {
    if scores.len() != g.num_nodes() {
        return Err(Error::Dimension(alloc::format!("{} scores for {} nodes", scores.len(), g.num_nodes())));
    }
    let values =
        scores.values.iter().enumerate().map(|(j, s)| s * calibration.factor(g.out_degree(j as NodeId))).collect();
    ScoreVector::new(alloc::format!("{}+{}", scores.method, calibration.name()), values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeSelectionConfig {
    /// How many of the largest edge types to try.
    pub top_k_types: usize,
    pub train: TrainConfig,
    pub split: SplitConfig,
    pub layer: usize,
}

impl Default for TypeSelectionConfig {
    fn default() -> Self {
        Self { top_k_types: 100, train: TrainConfig::default(), split: SplitConfig::default(), layer: 0 }
    }
}

/// Outcome for one candidate edge type.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeCandidate {
    pub edge_type: EdgeType,
    pub num_edges: usize,
    /// Labelled nodes touching at least one edge of this type.
    pub labelled_nodes: usize,
    /// `None` when the correlation is undefined or the type was skipped.
    pub spearman: Option<f64>,
    pub selected: bool,
    pub skipped: Option<String>,
}

#[derive(Debug, Clone)]
pub struct TypeSelection<T> {
    pub candidates: Vec<TypeCandidate>,
    pub selected: Vec<EdgeType>,
    /// Trained model, training report and scores for every candidate that
    /// could be trained, selected or not.
    pub trained: Vec<TrainedType<T>>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct TrainedType<T> {
    pub edge_type: EdgeType,
    pub model: GatModel<T>,
    pub report: TrainReport,
    pub scores: ScoreVector,
}

impl<T> TypeSelection<T> {
    pub fn models(&self) -> Vec<(EdgeType, &GatModel<T>)> {
        self.trained.iter().map(|t| (t.edge_type, &t.model)).collect()
    }
}

/// Trains one model per candidate edge type and keeps the types whose scores
/// correlate positively (Spearman) with the validation labels. Candidates are
/// the `top_k_types` largest types; ties in size go to the smaller type id.
pub fn select_edge_types<T: Real>(
    g: &AttributedGraph,
    val_labels: &[(NodeId, f64)],
    config: &TypeSelectionConfig,
) -> Result<TypeSelection<T>> {
    if !g.is_typed() {
        return Err(Error::Untyped);
    }
    if val_labels.is_empty() {
        return Err(Error::param("val_labels", "at least one labelled node is required"));
    }
    for &(v, _) in val_labels {
        g.check_node(v as usize)?;
    }
    let counts = g.edge_type_counts();
    let mut order: Vec<EdgeType> = (0..counts.len() as EdgeType).filter(|&t| counts[t as usize] > 0).collect();
    order.sort_by(|&a, &b| counts[b as usize].cmp(&counts[a as usize]).then(a.cmp(&b)));
    order.truncate(config.top_k_types);

    let jobs = par::map_range(order.len(), |k| train_type::<T>(g, order[k], val_labels, config));

    let mut candidates = Vec::with_capacity(order.len());
    let mut trained = Vec::new();
    let mut warnings = Vec::new();
    for (k, job) in jobs.into_iter().enumerate() {
        let ty = order[k];
        let mut cand = TypeCandidate {
            edge_type: ty,
            num_edges: counts[ty as usize],
            labelled_nodes: 0,
            spearman: None,
            selected: false,
            skipped: None,
        };
        match job {
            Ok((t, labelled, rho)) => {
                cand.labelled_nodes = labelled;
                cand.spearman = rho;
                cand.selected = rho.is_some_and(|r| r > 0.0);
                trained.push(t);
            }
            Err(Error::Split(reason)) => {
                log::warn!("edge type {ty} skipped: {reason}");
                warnings.push(alloc::format!("edge type {ty} skipped: {reason}"));
                cand.skipped = Some(reason);
            }
            Err(e) => return Err(e),
        }
        candidates.push(cand);
    }

    let selected: Vec<EdgeType> = candidates.iter().filter(|c| c.selected).map(|c| c.edge_type).collect();
    if selected.is_empty() {
        let msg = "no edge type correlates positively with the validation labels";
        log::warn!("{msg}");
        warnings.push(msg.into());
    }
    Ok(TypeSelection { candidates, selected, trained, warnings })
}

fn train_type<T: Real>(
    g: &AttributedGraph,
    ty: EdgeType,
    val_labels: &[(NodeId, f64)],
    config: &TypeSelectionConfig,
) -> Result<(TrainedType<T>, usize, Option<f64>)> {
    let sub = g.subgraph_by_edge_type(ty)?;
    let split = split_edges(&sub, &config.split)?;
    let (model, report) = train::<T>(&sub, &split, &config.train)?;
    let scores = score_graph(&model, &sub, config.layer)?;

    let (pred, truth): (Vec<f64>, Vec<f64>) = val_labels
        .iter()
        .filter(|&&(v, _)| sub.in_degree(v) + sub.out_degree(v) > 0)
        .map(|&(v, imp)| (scores.values[v as usize], imp))
        .unzip();
    let rho = if pred.len() >= 2 { spearman(&pred, &truth).ok() } else { None };
    Ok((TrainedType { edge_type: ty, model, report, scores }, pred.len(), rho))
}

/// Sum of per-type scores over `selected`, each type scored by its own model
/// on its own subgraph. An empty selection yields all zeros.
pub fn heterogeneous_pine<T: Real>(
    g: &AttributedGraph,
    selected: &[EdgeType],
    models: &[(EdgeType, &GatModel<T>)],
    layer: usize,
) -> Result<ScoreVector> {
    let mut total = vec![0.0; g.num_nodes()];
    if selected.is_empty() {
        log::warn!("heterogeneous score over an empty type selection is all zeros");
    }
    for &ty in selected {
        let (_, model) = models
            .iter()
            .find(|(t, _)| *t == ty)
            .ok_or_else(|| Error::param("models", alloc::format!("no trained model for edge type {ty}")))?;
        let sub = g.subgraph_by_edge_type(ty)?;
        let s = score_graph(model, &sub, layer)?;
        total.iter_mut().zip(&s.values).for_each(|(a, b)| *a += b);
    }
    ScoreVector::new("pine_heterogeneous", total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gat::{Activation, GatLayer};
    use crate::graph::FeatureMatrix;

    fn graph(n: usize, edges: &[(NodeId, NodeId)]) -> AttributedGraph {
        let data = (0..n * 2).map(|k| ((k * 7 % 5) as f32) - 2.0).collect();
        AttributedGraph::from_edges(FeatureMatrix::new(n, 2, data).unwrap(), edges).unwrap()
    }

    fn model() -> GatModel<f64> {
        let mut layer = GatLayer::zeros(2, 3);
        layer.weight = vec![0.3, -0.2, 0.5, 0.1, -0.4, 0.7];
        layer.src_attention = vec![0.9, -0.3, 0.2];
        layer.dst_attention = vec![-0.5, 0.4, 0.1];
        GatModel::from_layers(vec![layer], 0.2, Activation::Elu).unwrap()
    }

    #[test]
    fn single_edge_scores() {
        let g = graph(2, &[(0, 1)]);
        assert_eq!(score_graph(&model(), &g, 0).unwrap().values, vec![1.0, 0.0]);
    }

    #[test]
    fn star_into_center_sums_to_one() {
        let g = graph(6, &[(1, 0), (2, 0), (3, 0), (4, 0), (5, 0)]);
        let s = score_graph(&model(), &g, 0).unwrap();
        assert_eq!(s.values[0], 0.0);
        assert!((s.values[1..].iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn requires_forward_pass() {
        let g = graph(2, &[(0, 1)]);
        assert_eq!(pine_scores(&model(), &g, 0).unwrap_err(), Error::EmptyAttentionCache);
    }

    #[test]
    fn calibration_cases() {
        let g = graph(3, &[(0, 1), (0, 2), (1, 2)]);
        let flat = ScoreVector::new("pine", vec![1.0; 3]).unwrap();
        let c = calibrate_by_out_degree(&flat, &g, Calibration::LogDegree).unwrap();
        assert_eq!(c.ranking(), vec![0, 1, 2]);
        assert!((c.values[0] - 3.0f64.ln()).abs() < 1e-12);
        let empty = graph(3, &[]);
        let z = calibrate_by_out_degree(&flat, &empty, Calibration::LogDegree).unwrap();
        assert_eq!(z.values, vec![0.0; 3]);
        assert_eq!(calibrate_by_out_degree(&flat, &g, Calibration::None).unwrap().values, vec![1.0; 3]);
        assert!(calibrate_by_out_degree(&flat, &graph(2, &[]), Calibration::Degree).is_err());
        assert_eq!("sqrt-degree".parse::<Calibration>().unwrap(), Calibration::SqrtDegree);
    }

    #[test]
    fn empty_selection_is_zero() {
        let g = graph(3, &[(0, 1)]);
        let s = heterogeneous_pine::<f64>(&g, &[], &[], 0).unwrap();
        assert_eq!(s.values, vec![0.0; 3]);
    }
}
