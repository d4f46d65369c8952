//! End-to-end experiment: rank nodes with each method, seed the top fraction
//! and measure influence spread under each diffusion model.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::anyhow;
use pine_core::diffusion::Simulator;
use pine_core::seeds::{fraction_count, select_top_fraction};
use pine_core::synthetic::random_graph;
use pine_core::AttributedGraph;

use crate::config::{Config, Method};
use crate::io::{load_graph, LoadStats};
use crate::methods::{baseline_scores, pine_run, StageError, Staged};

/// A loaded graph and the header facts describing where it came from.
#[derive(Debug, Clone)]
pub struct PreparedGraph {
    pub graph: AttributedGraph,
    pub notes: Vec<(String, String)>,
}

pub fn prepare_graph(cfg: &Config) -> Result<PreparedGraph, StageError> {
    let files = cfg.graph_files().map_err(|e| anyhow!(e)).stage("config")?;
    let mut notes = Vec::new();
    let (mut graph, stats) = match (&files, &cfg.graph.synthetic) {
        (Some(f), _) => {
            let loaded = load_graph(f).stage("load")?;
            notes.push(("graph.edges_file".into(), f.edges.display().to_string()));
            notes.push(("graph.features_file".into(), f.features.display().to_string()));
            notes.push(("graph.reverse_edges".into(), f.reverse_edges.to_string()));
            (loaded.graph, loaded.stats)
        }
        (None, Some(s)) => {
            let g = random_graph(s.nodes, s.edges, s.feature_dim, s.seed).stage("load")?;
            notes.push((
                "graph.synthetic".into(),
                format!("nodes={} edges={} feature_dim={} seed={}", s.nodes, s.edges, s.feature_dim, s.seed),
            ));
            (g, LoadStats::default())
        }
        (None, None) => unreachable!("graph_files validated the inputs"),
    };
    notes.push(("load.self_loops_dropped".into(), stats.self_loops_dropped.to_string()));
    notes.push(("load.duplicates_collapsed".into(), stats.duplicates_collapsed.to_string()));
    notes.push(("load.unknown_ids_dropped".into(), stats.unknown_ids_dropped.to_string()));
    if cfg.graph.largest_component {
        graph = graph.largest_weak_component().0;
    }
    notes.push(("graph.largest_component".into(), cfg.graph.largest_component.to_string()));
    notes.push(("graph.nodes".into(), graph.num_nodes().to_string()));
    notes.push(("graph.edges".into(), graph.num_edges().to_string()));
    notes.push(("graph.edge_types".into(), graph.num_edge_types().to_string()));
    if graph.num_nodes() == 0 {
        return Err(anyhow!("the graph has no nodes")).stage("load");
    }
    Ok(PreparedGraph { graph, notes })
}

/// Every configured default, in header order.
pub fn config_notes(cfg: &Config) -> Vec<(String, String)> {
    let (s, t, c, d) = (&cfg.split, &cfg.train, &cfg.centrality, &cfg.diffusion);
    let opt = |v: Option<usize>| v.map_or("none".to_string(), |v| v.to_string());
    vec![
        ("split.fractions".into(), format!("train={} val={} test={}", s.train, s.val, s.test)),
        ("split.supervision".into(), s.supervision.to_string()),
        ("split.seed".into(), s.seed.to_string()),
        ("train.layers".into(), t.layers.to_string()),
        ("train.hidden".into(), t.hidden.to_string()),
        ("train.learning_rate".into(), t.learning_rate.to_string()),
        ("train.max_epochs".into(), t.max_epochs.to_string()),
        ("train.patience".into(), t.patience.to_string()),
        ("train.seed".into(), t.seed.to_string()),
        ("train.leaky_slope".into(), t.leaky_slope.to_string()),
        ("train.activation".into(), t.activation.clone()),
        ("train.precision".into(), t.precision.name().into()),
        ("score.layer".into(), cfg.score.layer.to_string()),
        ("score.calibration".into(), cfg.score.calibration.clone()),
        ("score.top_types".into(), cfg.score.top_types.to_string()),
        ("centrality.damping".into(), c.damping.to_string()),
        ("centrality.pagerank_tol".into(), c.pagerank_tol.to_string()),
        ("centrality.katz_attenuation".into(), c.katz_attenuation.to_string()),
        ("centrality.relative_tuning".into(), c.relative_tuning.to_string()),
        ("diffusion.alpha1".into(), d.alpha1.to_string()),
        ("diffusion.alpha2".into(), d.alpha2.to_string()),
        ("diffusion.sir_gamma".into(), d.sir_gamma.to_string()),
        ("diffusion.max_steps".into(), opt(d.max_steps)),
        ("diffusion.runs".into(), d.runs.to_string()),
        ("diffusion.seed".into(), d.seed.to_string()),
        ("seeds.fraction".into(), cfg.pipeline.seed_fraction.to_string()),
    ]
}

/// Mean and standard deviation of the spread of one method under one model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub header: Vec<(String, String)>,
    pub models: Vec<String>,
    pub rows: Vec<(String, Vec<Cell>)>,
}

impl Report {
    pub fn cell(&self, method: &str, model: &str) -> Option<Cell> {
        let col = self.models.iter().position(|m| m == model)?;
        self.rows.iter().find(|(m, _)| m == method).map(|(_, cells)| cells[col])
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("# pine pipeline report\n");
        for (k, v) in &self.header {
            let _ = writeln!(out, "# {k}\t{v}");
        }
        out.push_str("method");
        for m in &self.models {
            let _ = write!(out, "\t{m}_mean\t{m}_std");
        }
        out.push('\n');
        for (method, cells) in &self.rows {
            out.push_str(method);
            for c in cells {
                let _ = write!(out, "\t{:.6}\t{:.6}", c.mean, c.std);
            }
            out.push('\n');
        }
        out
    }
}

pub fn run_pipeline(cfg: &Config) -> Result<Report, StageError> {
    let diffusion = cfg.diffusion.configs().map_err(|e| anyhow!(e)).stage("config")?;
    if cfg.pipeline.methods.is_empty() {
        return Err(anyhow!("no methods configured")).stage("config");
    }
    let prepared = prepare_graph(cfg)?;
    let g = &prepared.graph;
    let mut header = prepared.notes.clone();
    header.extend(config_notes(cfg));

    let simulators = diffusion
        .iter()
        .map(|d| Simulator::new(g, *d).stage(format!("simulate:{}", d.model.name())))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(sir) = simulators.iter().find(|s| s.config().model.name() == "sir") {
        let source = if cfg.diffusion.sir_beta.is_some() { "configured" } else { "1.5x epidemic threshold" };
        header.push(("diffusion.sir_beta".into(), format!("{} ({source})", sir.sir_beta())));
    }
    let seed_count = fraction_count(cfg.pipeline.seed_fraction, g.num_nodes());
    header.push(("seeds.count".into(), seed_count.to_string()));

    let mut rows = Vec::new();
    for &method in &cfg.pipeline.methods {
        let scores = if method == Method::Pine {
            let run = pine_run(g, cfg)?;
            header.extend(run.notes);
            run.scores
        } else {
            baseline_scores(method, g, &cfg.centrality, seed_count).stage(format!("centrality:{}", method.name()))?
        };
        let seeds = select_top_fraction(&scores, cfg.pipeline.seed_fraction).stage("seeds")?;
        let mut cells = Vec::new();
        for sim in &simulators {
            let r = sim.spread(&seeds).stage(format!("simulate:{}", sim.config().model.name()))?;
            cells.push(Cell { mean: r.mean_spread, std: r.std_spread });
        }
        log::info!("{}: {:?}", method.name(), cells);
        rows.push((method.name().to_string(), cells));
    }
    let models = diffusion.iter().map(|d| d.model.name().to_string()).collect();
    Ok(Report { header, models, rows })
}

pub fn run_pipeline_file(path: &Path) -> Result<Report, StageError> {
    let cfg = Config::load(path).stage("config")?;
    run_pipeline(&cfg)
}
