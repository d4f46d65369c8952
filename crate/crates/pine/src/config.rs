//! TOML experiment configuration. Every section rejects unknown keys.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use pine_core::centrality::{KatzParams, PageRankParams};
use pine_core::diffusion::{DiffusionConfig, DiffusionModel};
use pine_core::gat::{Activation, SplitConfig, TrainConfig};
use pine_core::pine::Calibration;

use crate::io::{GraphFiles, InputFormat};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub graph: GraphSection,
    #[serde(default)]
    pub split: SplitSection,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub score: ScoreSection,
    #[serde(default)]
    pub centrality: CentralitySection,
    #[serde(default)]
    pub diffusion: DiffusionSection,
    #[serde(default)]
    pub pipeline: PipelineSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    #[serde(default)]
    pub format: InputFormat,
    pub edges: Option<PathBuf>,
    pub features: Option<PathBuf>,
    pub id_map: Option<PathBuf>,
    #[serde(default)]
    pub reverse_edges: bool,
    /// Keep only the largest weakly connected component.
    #[serde(default)]
    pub largest_component: bool,
    /// Generate a uniform random graph instead of reading files.
    pub synthetic: Option<SyntheticSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSection {
    pub nodes: usize,
    pub edges: usize,
    #[serde(default = "default_feature_dim")]
    pub feature_dim: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_feature_dim() -> usize {
    8
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitSection {
    pub train: f64,
    pub val: f64,
    pub test: f64,
    pub supervision: f64,
    pub seed: u64,
}

impl Default for SplitSection {
    fn default() -> Self {
        let d = SplitConfig::default();
        Self { train: d.train, val: d.val, test: d.test, supervision: d.supervision, seed: d.rng_seed }
    }
}

impl SplitSection {
    pub fn to_core(&self) -> SplitConfig {
        SplitConfig {
            train: self.train,
            val: self.val,
            test: self.test,
            supervision: self.supervision,
            rng_seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    F32,
    F64,
}

impl Precision {
    pub fn name(self) -> &'static str {
        match self {
            Precision::F32 => "f32",
            Precision::F64 => "f64",
        }
    }
}

impl FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "f32" => Ok(Self::F32),
            "f64" => Ok(Self::F64),
            _ => Err(format!("unknown precision `{s}` (f32, f64)")),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainSection {
    pub layers: usize,
    pub hidden: usize,
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub patience: usize,
    pub seed: u64,
    pub leaky_slope: f64,
    pub activation: String,
    pub precision: Precision,
}

impl Default for TrainSection {
    fn default() -> Self {
        let d = TrainConfig::default();
        Self {
            layers: d.num_layers,
            hidden: d.hidden_size,
            learning_rate: d.learning_rate,
            max_epochs: d.max_epochs,
            patience: d.patience,
            seed: d.rng_seed,
            leaky_slope: d.leaky_slope,
            activation: d.activation.name().to_string(),
            precision: Precision::F32,
        }
    }
}

impl TrainSection {
    pub fn to_core(&self) -> Result<TrainConfig, String> {
        let activation = Activation::from_str(&self.activation).map_err(|e| e.to_string())?;
        Ok(TrainConfig {
            learning_rate: self.learning_rate,
            hidden_size: self.hidden,
            num_layers: self.layers,
            max_epochs: self.max_epochs,
            patience: self.patience,
            rng_seed: self.seed,
            leaky_slope: self.leaky_slope,
            activation,
            ..TrainConfig::default()
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScoreSection {
    pub layer: usize,
    /// Degree calibration for PINE scores: none, log-degree, degree or
    /// sqrt-degree.
    pub calibration: String,
    /// Validation importance labels; required for typed graphs.
    pub labels: Option<PathBuf>,
    pub top_types: usize,
}

impl Default for ScoreSection {
    fn default() -> Self {
        Self { layer: 0, calibration: "none".into(), labels: None, top_types: 100 }
    }
}

impl ScoreSection {
    pub fn calibration(&self) -> Result<Calibration, String> {
        Calibration::from_str(&self.calibration).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CentralitySection {
    pub damping: f64,
    pub pagerank_tol: f64,
    pub pagerank_max_iter: usize,
    pub katz_attenuation: f64,
    pub katz_tol: f64,
    pub katz_max_iter: usize,
    /// Blend between out-degree (0) and weighted out-degree (1).
    pub relative_tuning: f64,
    /// Largest graph on which closeness and betweenness may run.
    pub node_budget: usize,
}

impl Default for CentralitySection {
    fn default() -> Self {
        let (p, k) = (PageRankParams::default(), KatzParams::default());
        Self {
            damping: p.damping,
            pagerank_tol: p.tol,
            pagerank_max_iter: p.max_iter,
            katz_attenuation: k.attenuation,
            katz_tol: k.tol,
            katz_max_iter: k.max_iter,
            relative_tuning: 0.5,
            node_budget: 50_000,
        }
    }
}

impl CentralitySection {
    pub fn pagerank(&self) -> PageRankParams {
        PageRankParams { damping: self.damping, tol: self.pagerank_tol, max_iter: self.pagerank_max_iter }
    }

    pub fn katz(&self) -> KatzParams {
        KatzParams { attenuation: self.katz_attenuation, tol: self.katz_tol, max_iter: self.katz_max_iter }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiffusionSection {
    pub models: Vec<String>,
    pub runs: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    /// Unset: 1.5× the epidemic threshold of the graph, capped at 1.
    pub sir_beta: Option<f64>,
    pub sir_gamma: f64,
    pub max_steps: Option<usize>,
    pub seed: u64,
}

impl Default for DiffusionSection {
    fn default() -> Self {
        let d = DiffusionConfig::new(DiffusionModel::LtPlus);
        Self {
            models: vec!["ltp".into(), "icp".into(), "sir".into()],
            runs: d.num_runs,
            alpha1: d.alpha1,
            alpha2: d.alpha2,
            sir_beta: d.sir_beta,
            sir_gamma: d.sir_gamma,
            max_steps: d.max_steps,
            seed: d.rng_seed,
        }
    }
}

impl DiffusionSection {
    pub fn configs(&self) -> Result<Vec<DiffusionConfig>, String> {
        self.models
            .iter()
            .map(|m| {
                let model = DiffusionModel::from_str(m).map_err(|e| e.to_string())?;
                let cfg = DiffusionConfig {
                    model,
                    alpha1: self.alpha1,
                    alpha2: self.alpha2,
                    sir_beta: self.sir_beta,
                    sir_gamma: self.sir_gamma,
                    max_steps: self.max_steps,
                    num_runs: self.runs,
                    rng_seed: self.seed,
                };
                cfg.validate().map_err(|e| e.to_string())?;
                Ok(cfg)
            })
            .collect()
    }
}

/// Node-ranking methods the pipeline can compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Degree,
    OutDegree,
    Weighted,
    Relative,
    Pagerank,
    Katz,
    Voterank,
    Closeness,
    Betweenness,
    Pine,
}

impl Method {
    pub const ALL: [Method; 10] = [
        Method::Degree,
        Method::OutDegree,
        Method::Weighted,
        Method::Relative,
        Method::Pagerank,
        Method::Katz,
        Method::Voterank,
        Method::Closeness,
        Method::Betweenness,
        Method::Pine,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Degree => "degree",
            Method::OutDegree => "out_degree",
            Method::Weighted => "weighted",
            Method::Relative => "relative",
            Method::Pagerank => "pagerank",
            Method::Katz => "katz",
            Method::Voterank => "voterank",
            Method::Closeness => "closeness",
            Method::Betweenness => "betweenness",
            Method::Pine => "pine",
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Method::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| format!("unknown method `{s}`"))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineSection {
    pub methods: Vec<Method>,
    /// Share of nodes used as diffusion seeds.
    pub seed_fraction: f64,
}

impl Default for PipelineSection {
    fn default() -> Self {
        Self { methods: Method::ALL.to_vec(), seed_fraction: 0.1 }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    /// Parses `path`, resolving relative file references against its
    /// directory.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let g = &mut cfg.graph;
        for p in [&mut g.edges, &mut g.features, &mut g.id_map, &mut cfg.score.labels].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// File inputs, or `None` for a synthetic graph.
    pub fn graph_files(&self) -> Result<Option<GraphFiles>, String> {
        let g = &self.graph;
        match (&g.synthetic, &g.edges, &g.features) {
            (Some(_), None, None) => Ok(None),
            (Some(_), _, _) => Err("graph: `synthetic` excludes `edges` and `features`".into()),
            (None, Some(e), Some(f)) => Ok(Some(GraphFiles {
                format: g.format,
                edges: e.clone(),
                features: f.clone(),
                id_map: g.id_map.clone(),
                reverse_edges: g.reverse_edges,
            })),
            _ => Err("graph: need both `edges` and `features`, or a `synthetic` table".into()),
        }
    }
}
