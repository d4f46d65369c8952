//! Score computation for every ranking method, shared by the pipeline, the
//! benchmark and the `centrality`/`score` subcommands.

use std::fmt;
use std::time::{Duration, Instant};

use anyhow::{anyhow, Context};
use pine_core::centrality::{self, ranking_to_scores};
use pine_core::gat::{split_edges, train, Real, TrainReport};
use pine_core::pine::{calibrate_by_out_degree, heterogeneous_pine, score_graph, select_edge_types, Calibration};
use pine_core::pine::{TypeSelection, TypeSelectionConfig};
use pine_core::{AttributedGraph, NodeId, ScoreVector};

use crate::config::{CentralitySection, Config, Method, Precision};

/// A failure tagged with the pipeline stage it happened in.
#[derive(Debug)]
pub struct StageError {
    pub stage: String,
    pub cause: anyhow::Error,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {:#}", self.stage, self.cause)
    }
}

impl std::error::Error for StageError {}

pub trait Staged<T> {
    fn stage(self, stage: impl Into<String>) -> Result<T, StageError>;
}

impl<T, E: Into<anyhow::Error>> Staged<T> for Result<T, E> {
    fn stage(self, stage: impl Into<String>) -> Result<T, StageError> {
        self.map_err(|e| StageError { stage: stage.into(), cause: e.into() })
    }
}

/// Scores for a non-learned method. `top_k` bounds the VoteRank elections;
/// nodes past it are ordered by their final vote score.
pub fn baseline_scores(
    method: Method,
    g: &AttributedGraph,
    params: &CentralitySection,
    top_k: usize,
) -> anyhow::Result<ScoreVector> {
    let budget = |name: &str| {
        if g.num_nodes() > params.node_budget {
            Err(anyhow!(
                "{name} on {} nodes exceeds the node budget of {}; raise `node_budget` to force it",
                g.num_nodes(),
                params.node_budget
            ))
        } else {
            Ok(())
        }
    };
    Ok(match method {
        Method::Degree => centrality::degree(g),
        Method::OutDegree => centrality::out_degree(g),
        Method::Weighted => centrality::weighted_out_degree(g),
        Method::Relative => centrality::relative_out_degree(g, params.relative_tuning)?,
        Method::Pagerank => {
            let r = centrality::pagerank(g, params.pagerank())?;
            if !r.converged {
                log::warn!("pagerank stopped after {} iterations without converging", r.iterations);
            }
            r.scores
        }
        Method::Katz => {
            let r = centrality::katz(g, params.katz())?;
            if !r.converged {
                log::warn!("katz stopped after {} iterations without converging", r.iterations);
            }
            r.scores
        }
        Method::Voterank => ranking_to_scores("voterank", &centrality::voterank(g, top_k.min(g.num_nodes()))?),
        Method::Closeness => {
            budget("closeness")?;
            centrality::closeness(g)
        }
        Method::Betweenness => {
            budget("betweenness")?;
            centrality::betweenness(g)
        }
        Method::Pine => return Err(anyhow!("pine scores need a trained model")),
    })
}

/// Outcome of training and scoring PINE on one graph.
#[derive(Debug, Clone)]
pub struct PineRun {
    pub scores: ScoreVector,
    pub train_time: Duration,
    pub score_time: Duration,
    /// Key/value facts for report headers (AUCs, selected types, ...).
    pub notes: Vec<(String, String)>,
}

fn train_notes(report: &TrainReport) -> Vec<(String, String)> {
    vec![
        ("pine.epochs".into(), report.epochs.len().to_string()),
        ("pine.best_epoch".into(), report.best_epoch.to_string()),
        ("pine.val_auc".into(), format!("{:.6}", report.best_val_auc)),
        ("pine.test_auc".into(), format!("{:.6}", report.test_auc)),
    ]
}

fn homogeneous<T: Real>(g: &AttributedGraph, cfg: &Config) -> Result<PineRun, StageError> {
    let start = Instant::now();
    let split = split_edges(g, &cfg.split.to_core()).stage("split")?;
    let train_cfg = cfg.train.to_core().map_err(|e| anyhow!(e)).stage("train")?;
    let (model, report) = train::<T>(g, &split, &train_cfg).stage("train")?;
    let train_time = start.elapsed();

    let start = Instant::now();
    let calibration = cfg.score.calibration().map_err(|e| anyhow!(e)).stage("score")?;
    let mut scores = score_graph(&model, g, cfg.score.layer).stage("score")?;
    if calibration != Calibration::None {
        scores = calibrate_by_out_degree(&scores, g, calibration).stage("score")?;
    }
    Ok(PineRun { scores, train_time, score_time: start.elapsed(), notes: train_notes(&report) })
}

/// Validation labels of a typed graph, read from `score.labels`.
pub fn validation_labels(g: &AttributedGraph, cfg: &Config) -> anyhow::Result<Vec<(NodeId, f64)>> {
    let path = cfg.score.labels.as_ref().context("typed graphs need `score.labels` for edge-type selection")?;
    let table = crate::io::read_keyed_values(path)?;
    Ok(crate::io::resolve_labels(g, &table, path)?)
}

pub fn type_selection_notes<T>(sel: &TypeSelection<T>) -> Vec<(String, String)> {
    let mut notes = Vec::new();
    for c in &sel.candidates {
        let rho = c.spearman.map_or("-".to_string(), |r| format!("{r:.6}"));
        let status = match (&c.skipped, c.selected) {
            (Some(why), _) => format!("skipped ({why})"),
            (None, true) => "selected".to_string(),
            (None, false) => "rejected".to_string(),
        };
        notes.push((format!("pine.type.{}", c.edge_type), format!("edges={} spearman={rho} {status}", c.num_edges)));
    }
    let selected: Vec<String> = sel.selected.iter().map(|t| t.to_string()).collect();
    notes.push(("pine.selected_types".into(), selected.join(",")));
    for w in &sel.warnings {
        log::warn!("{w}");
    }
    notes
}

fn heterogeneous<T: Real>(g: &AttributedGraph, cfg: &Config) -> Result<PineRun, StageError> {
    let labels = validation_labels(g, cfg).stage("load")?;
    let start = Instant::now();
    let train_cfg = cfg.train.to_core().map_err(|e| anyhow!(e)).stage("train")?;
    let sel_cfg = TypeSelectionConfig {
        top_k_types: cfg.score.top_types,
        train: train_cfg,
        split: cfg.split.to_core(),
        layer: cfg.score.layer,
    };
    let sel = select_edge_types::<T>(g, &labels, &sel_cfg).stage("train")?;
    let train_time = start.elapsed();

    let start = Instant::now();
    let calibration = cfg.score.calibration().map_err(|e| anyhow!(e)).stage("score")?;
    let mut scores = heterogeneous_pine(g, &sel.selected, &sel.models(), cfg.score.layer).stage("score")?;
    if calibration != Calibration::None {
        scores = calibrate_by_out_degree(&scores, g, calibration).stage("score")?;
    }
    Ok(PineRun { scores, train_time, score_time: start.elapsed(), notes: type_selection_notes(&sel) })
}

/// Trains and scores PINE: one model for an untyped graph, per-type models
/// with label-driven type selection for a typed one.
pub fn pine_run(g: &AttributedGraph, cfg: &Config) -> Result<PineRun, StageError> {
    match (g.is_typed(), cfg.train.precision) {
        (false, Precision::F32) => homogeneous::<f32>(g, cfg),
        (false, Precision::F64) => homogeneous::<f64>(g, cfg),
        (true, Precision::F32) => heterogeneous::<f32>(g, cfg),
        (true, Precision::F64) => heterogeneous::<f64>(g, cfg),
    }
}
