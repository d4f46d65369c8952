//! Wall-clock cost of each ranking method on the configured graph.

use std::fmt::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use pine_core::seeds::fraction_count;

use crate::config::{Config, Method};
use crate::methods::{baseline_scores, pine_run, StageError, Staged};
use crate::pipeline::prepare_graph;

#[derive(Debug, Clone, PartialEq)]
pub struct Timing {
    pub method: String,
    /// Only learned methods have a training stage.
    pub train: Option<Duration>,
    pub score: Duration,
}

impl Timing {
    pub fn total(&self) -> Duration {
        self.train.unwrap_or_default() + self.score
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub nodes: usize,
    pub edges: usize,
    pub rows: Vec<Timing>,
}

impl BenchReport {
    pub fn to_tsv(&self) -> String {
        let mut out = format!("# nodes\t{}\n# edges\t{}\n", self.nodes, self.edges);
        out.push_str("method\ttrain_seconds\tscore_seconds\ttotal_seconds\n");
        for t in &self.rows {
            let train = t.train.map_or("-".to_string(), |d| format!("{:.6}", d.as_secs_f64()));
            let _ =
                writeln!(out, "{}\t{train}\t{:.6}\t{:.6}", t.method, t.score.as_secs_f64(), t.total().as_secs_f64());
        }
        out
    }
}

pub fn benchmark(cfg: &Config) -> Result<BenchReport, StageError> {
    let prepared = prepare_graph(cfg)?;
    let g = &prepared.graph;
    let top_k = fraction_count(cfg.pipeline.seed_fraction, g.num_nodes());
    let mut rows = Vec::new();
    for &method in &cfg.pipeline.methods {
        let timing = if method == Method::Pine {
            let run = pine_run(g, cfg)?;
            Timing { method: method.name().into(), train: Some(run.train_time), score: run.score_time }
        } else {
            let start = Instant::now();
            baseline_scores(method, g, &cfg.centrality, top_k).stage(format!("centrality:{}", method.name()))?;
            Timing { method: method.name().into(), train: None, score: start.elapsed() }
        };
        log::info!("{}: {:?}", timing.method, timing.total());
        rows.push(timing);
    }
    Ok(BenchReport { nodes: g.num_nodes(), edges: g.num_edges(), rows })
}

pub fn benchmark_file(path: &Path) -> Result<BenchReport, StageError> {
    let cfg = Config::load(path).stage("config")?;
    benchmark(&cfg)
}
