use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use pine_core::diffusion::{DiffusionConfig, DiffusionModel, Simulator};
use pine_core::gat::{split_edges, train, SplitConfig};
use pine_core::metrics::{ndcg_at_k, precision_at_k, spearman};
use pine_core::pine::TypeSelectionConfig;
use pine_core::pine::{calibrate_by_out_degree, heterogeneous_pine, score_graph, select_edge_types, Calibration};
use pine_core::seeds::select_top_fraction;
use pine_core::{AttributedGraph, ScoreVector};

use pine::config::{CentralitySection, Method, Precision, TrainSection};
use pine::io::{self, GraphFiles, InputFormat};
use pine::methods::{baseline_scores, type_selection_notes, StageError, Staged};

#[derive(Parser)]
#[command(name = "pine", version, about = "Node importance from graph attention, plus diffusion baselines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank nodes with a classical centrality measure.
    Centrality(CentralityArgs),
    /// Train a link-prediction attention model.
    Train(TrainArgs),
    /// Score nodes with a trained model (or per edge type, given labels).
    Score(ScoreArgs),
    /// Monte Carlo influence spread of a seed set.
    Simulate(SimulateArgs),
    /// Compare a score table against ground truth.
    Evaluate(EvaluateArgs),
    /// Run a configured experiment end to end.
    Pipeline(ConfigArgs),
    /// Time every configured method.
    Bench(ConfigArgs),
    /// Write the link-prediction edge split.
    Split(SplitArgs),
    /// Extract the largest weakly connected component.
    Component(ComponentArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// Edge list (`src dst [type]`), or the `.cites` file with --format planetoid.
    #[arg(long)]
    graph: PathBuf,
    /// Feature CSV or binary, or the `.content` file with --format planetoid.
    #[arg(long)]
    features: PathBuf,
    #[arg(long, default_value = "edgelist")]
    format: InputFormat,
    /// `dense_id<TAB>original_id` map for the ids used in the edge list.
    #[arg(long)]
    id_map: Option<PathBuf>,
    #[arg(long)]
    reverse_edges: bool,
}

impl GraphArgs {
    fn load(&self) -> Result<AttributedGraph, StageError> {
        let files = GraphFiles {
            format: self.format,
            edges: self.graph.clone(),
            features: self.features.clone(),
            id_map: self.id_map.clone(),
            reverse_edges: self.reverse_edges,
        };
        let loaded = io::load_graph(&files).stage("load")?;
        let s = loaded.stats;
        log::info!(
            "loaded {} nodes, {} edges ({} self-loops, {} duplicates, {} unknown ids dropped)",
            loaded.graph.num_nodes(),
            loaded.graph.num_edges(),
            s.self_loops_dropped,
            s.duplicates_collapsed,
            s.unknown_ids_dropped
        );
        Ok(loaded.graph)
    }
}

#[derive(Args)]
struct SeedOutput {
    /// Also write the top fraction of nodes as a seed file.
    #[arg(long)]
    seeds_out: Option<PathBuf>,
    #[arg(long, default_value_t = 0.1)]
    fraction: f64,
}

#[derive(Args)]
struct CentralityArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// degree, out_degree, weighted, relative, pagerank, katz, voterank, closeness, betweenness
    #[arg(long)]
    method: Method,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0.85)]
    damping: f64,
    #[arg(long, default_value_t = 0.005)]
    katz_attenuation: f64,
    #[arg(long, default_value_t = 0.5)]
    relative_tuning: f64,
    /// VoteRank elections before the remaining nodes are ordered by vote.
    #[arg(long)]
    voterank_k: Option<usize>,
    /// Refuse closeness/betweenness above this many nodes.
    #[arg(long, default_value_t = 50_000)]
    node_budget: usize,
    #[command(flatten)]
    seeds: SeedOutput,
}

#[derive(Args)]
struct SplitOptions {
    #[arg(long, default_value_t = 0.7)]
    train_fraction: f64,
    #[arg(long, default_value_t = 0.15)]
    val_fraction: f64,
    #[arg(long, default_value_t = 0.15)]
    test_fraction: f64,
    /// Share of training edges used only as supervision targets.
    #[arg(long, default_value_t = 0.3)]
    supervision: f64,
    #[arg(long, default_value_t = 42)]
    split_seed: u64,
}

impl SplitOptions {
    fn to_core(&self) -> SplitConfig {
        SplitConfig {
            train: self.train_fraction,
            val: self.val_fraction,
            test: self.test_fraction,
            supervision: self.supervision,
            rng_seed: self.split_seed,
        }
    }
}

#[derive(Args)]
struct TrainOptions {
    #[arg(long, default_value_t = 1)]
    layers: usize,
    #[arg(long, default_value_t = 512)]
    hidden: usize,
    #[arg(long, default_value_t = 5e-4)]
    lr: f64,
    #[arg(long, default_value_t = 500)]
    epochs: usize,
    #[arg(long, default_value_t = 20)]
    patience: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "elu")]
    activation: String,
    #[arg(long, default_value = "f32")]
    precision: Precision,
    #[command(flatten)]
    split: SplitOptions,
}

impl TrainOptions {
    fn section(&self) -> TrainSection {
        TrainSection {
            layers: self.layers,
            hidden: self.hidden,
            learning_rate: self.lr,
            max_epochs: self.epochs,
            patience: self.patience,
            seed: self.seed,
            activation: self.activation.clone(),
            precision: self.precision,
            ..TrainSection::default()
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    train: TrainOptions,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScoreArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Trained model; not used in heterogeneous mode.
    #[arg(long, required_unless_present = "labels")]
    model: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    layer: usize,
    /// none, log-degree, degree, sqrt-degree
    #[arg(long, default_value = "none")]
    calibrate: String,
    /// Validation importance labels; switches to per-edge-type training and selection.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    top_types: usize,
    #[command(flatten)]
    train: TrainOptions,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    seeds: SeedOutput,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// ltp, icp or sir
    #[arg(long)]
    model: DiffusionModel,
    #[arg(long)]
    seeds: PathBuf,
    #[arg(long, default_value_t = 1000)]
    runs: usize,
    #[arg(long, default_value_t = 0.5)]
    alpha1: f64,
    /// Defaults to 1 - alpha1.
    #[arg(long)]
    alpha2: Option<f64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    sir_beta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    sir_gamma: f64,
    #[arg(long)]
    max_steps: Option<usize>,
    /// Append the activated count of every run.
    #[arg(long)]
    per_run: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    scores: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    /// Comma-separated: ndcg@K, precision@K, spearman.
    #[arg(long, default_value = "ndcg@100,spearman,precision@100")]
    metrics: String,
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(long)]
    config: PathBuf,
    /// Report destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SplitArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    split: SplitOptions,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ComponentArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    out_edges: PathBuf,
    /// Written as CSV when the extension is `.csv`, binary otherwise.
    #[arg(long)]
    out_features: PathBuf,
    #[arg(long)]
    out_id_map: PathBuf,
}

/// Writes through a temporary sibling so failures never leave partial output.
fn write_output(path: Option<&Path>, text: &str, stage: &str) -> Result<(), StageError> {
    match path {
        None => std::io::stdout().lock().write_all(text.as_bytes()).stage(stage),
        Some(p) => {
            let tmp = p.with_extension("partial");
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).stage(stage)?;
            }
            std::fs::write(&tmp, text).with_context(|| tmp.display().to_string()).stage(stage)?;
            std::fs::rename(&tmp, p).with_context(|| p.display().to_string()).stage(stage)
        }
    }
}

fn emit_scores(
    g: &AttributedGraph,
    scores: &ScoreVector,
    out: Option<&Path>,
    seeds: &SeedOutput,
) -> Result<(), StageError> {
    let mut buf = Vec::new();
    io::write_scores(&mut buf, g, scores).stage("write")?;
    write_output(out, std::str::from_utf8(&buf).expect("labels are UTF-8"), "write")?;
    if let Some(path) = &seeds.seeds_out {
        let top = select_top_fraction(scores, seeds.fraction).stage("seeds")?;
        io::write_seeds(path, g, &top).stage("seeds")?;
    }
    Ok(())
}

fn centrality(a: CentralityArgs) -> Result<(), StageError> {
    let g = a.graph.load()?;
    let params = CentralitySection {
        damping: a.damping,
        katz_attenuation: a.katz_attenuation,
        relative_tuning: a.relative_tuning,
        node_budget: a.node_budget,
        ..CentralitySection::default()
    };
    let k = a.voterank_k.unwrap_or(g.num_nodes());
    let scores = baseline_scores(a.method, &g, &params, k).stage(format!("centrality:{}", a.method.name()))?;
    emit_scores(&g, &scores, a.out.as_deref(), &a.seeds)
}

fn train_cmd(a: TrainArgs) -> Result<(), StageError> {
    let g = a.graph.load()?;
    let split = split_edges(&g, &a.train.split.to_core()).stage("split")?;
    let cfg = a.train.section().to_core().map_err(|e| anyhow!(e)).stage("train")?;
    let report = match a.train.precision {
        Precision::F32 => {
            let (m, r) = train::<f32>(&g, &split, &cfg).stage("train")?;
            io::write_model(&a.out, &m).stage("write")?;
            r
        }
        Precision::F64 => {
            let (m, r) = train::<f64>(&g, &split, &cfg).stage("train")?;
            io::write_model(&a.out, &m).stage("write")?;
            r
        }
    };
    for e in &report.epochs {
        log::info!("epoch {}\tloss {:.6}\tval_auc {:.6}", e.epoch, e.loss, e.val_auc);
    }
    println!("epochs\t{}", report.epochs.len());
    println!("best_epoch\t{}", report.best_epoch);
    println!("early_stopped\t{}", report.early_stopped);
    println!("val_auc\t{:.6}", report.best_val_auc);
    println!("test_auc\t{:.6}", report.test_auc);
    Ok(())
}

fn score_cmd(a: ScoreArgs) -> Result<(), StageError> {
    let g = a.graph.load()?;
    let calibration: Calibration = a.calibrate.parse().stage("config")?;
    let scores = match &a.labels {
        Some(path) => {
            let table = io::read_keyed_values(path).stage("load")?;
            let labels = io::resolve_labels(&g, &table, path).stage("load")?;
            let cfg = TypeSelectionConfig {
                top_k_types: a.top_types,
                train: a.train.section().to_core().map_err(|e| anyhow!(e)).stage("train")?,
                split: a.train.split.to_core(),
                layer: a.layer,
            };
            let (notes, s) = match a.train.precision {
                Precision::F32 => {
                    let sel = select_edge_types::<f32>(&g, &labels, &cfg).stage("train")?;
                    (type_selection_notes(&sel), heterogeneous_pine(&g, &sel.selected, &sel.models(), a.layer))
                }
                Precision::F64 => {
                    let sel = select_edge_types::<f64>(&g, &labels, &cfg).stage("train")?;
                    (type_selection_notes(&sel), heterogeneous_pine(&g, &sel.selected, &sel.models(), a.layer))
                }
            };
            for (k, v) in notes {
                eprintln!("{k}\t{v}");
            }
            s.stage("score")?
        }
        None => {
            let path = a.model.as_ref().expect("clap requires --model without --labels");
            let model = io::read_model(path).stage("load")?;
            match a.train.precision {
                Precision::F32 => score_graph(&model, &g, a.layer),
                Precision::F64 => score_graph(&model.cast::<f64>(), &g, a.layer),
            }
            .stage("score")?
        }
    };
    let scores = match calibration {
        Calibration::None => scores,
        c => calibrate_by_out_degree(&scores, &g, c).stage("score")?,
    };
    emit_scores(&g, &scores, a.out.as_deref(), &a.seeds)
}

fn simulate(a: SimulateArgs) -> Result<(), StageError> {
    let g = a.graph.load()?;
    let seeds = io::read_seeds(&a.seeds, &g).stage("load")?;
    let cfg = DiffusionConfig {
        model: a.model,
        alpha1: a.alpha1,
        alpha2: a.alpha2.unwrap_or(1.0 - a.alpha1),
        sir_beta: a.sir_beta,
        sir_gamma: a.sir_gamma,
        max_steps: a.max_steps,
        num_runs: a.runs,
        rng_seed: a.seed,
    };
    let stage = format!("simulate:{}", a.model.name());
    let sim = Simulator::new(&g, cfg).stage(&stage)?;
    let r = sim.spread(&seeds).stage(&stage)?;
    let mut out = String::from("model\tmean\tstd\truns\tseeds");
    if a.model == DiffusionModel::Sir {
        out.push_str("\tbeta\tgamma");
    }
    out.push_str(&format!(
        "\n{}\t{:.6}\t{:.6}\t{}\t{}",
        a.model.name(),
        r.mean_spread,
        r.std_spread,
        r.runs,
        seeds.len()
    ));
    if a.model == DiffusionModel::Sir {
        out.push_str(&format!("\t{}\t{}", sim.sir_beta(), a.sir_gamma));
    }
    out.push('\n');
    if a.per_run {
        out.push_str("run\tactivated\n");
        for (k, c) in r.activated_counts.iter().enumerate() {
            out.push_str(&format!("{k}\t{c}\n"));
        }
    }
    write_output(None, &out, "write")
}

fn evaluate(a: EvaluateArgs) -> Result<(), StageError> {
    let pred = io::read_keyed_values(&a.scores).stage("load")?;
    let truth = io::read_keyed_values(&a.truth).stage("load")?;
    let index: std::collections::HashMap<&str, f64> = pred.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    if index.len() != pred.len() {
        return Err(anyhow!("{}: repeated node ids", a.scores.display())).stage("load");
    }
    let mut p = Vec::with_capacity(truth.len());
    for (id, _) in &truth {
        let v = index.get(id.as_str()).with_context(|| format!("node `{id}` has no score")).stage("load")?;
        p.push(*v);
    }
    let t: Vec<f64> = truth.iter().map(|x| x.1).collect();
    let mut out = String::from("metric\tvalue\n");
    for name in a.metrics.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let value = match name.split_once('@') {
            Some(("ndcg", k)) => ndcg_at_k(&p, &t, parse_k(k)?),
            Some(("precision", k)) => precision_at_k(&p, &t, parse_k(k)?),
            None if name == "spearman" => spearman(&p, &t),
            _ => return Err(anyhow!("unknown metric `{name}`")).stage("config"),
        }
        .stage(format!("evaluate:{name}"))?;
        out.push_str(&format!("{name}\t{value:.6}\n"));
    }
    write_output(None, &out, "write")
}

fn parse_k(k: &str) -> Result<usize, StageError> {
    k.parse().map_err(|_| anyhow!("`{k}` is not a cutoff")).stage("config")
}

fn split_cmd(a: SplitArgs) -> Result<(), StageError> {
    let g = a.graph.load()?;
    let s = split_edges(&g, &a.split.to_core()).stage("split")?;
    let parts = [
        ("message.tsv", &s.message_edges),
        ("supervision.tsv", &s.supervision_pos),
        ("val_pos.tsv", &s.val_pos),
        ("val_neg.tsv", &s.val_neg),
        ("test_pos.tsv", &s.test_pos),
        ("test_neg.tsv", &s.test_neg),
    ];
    for (name, edges) in parts {
        io::write_edge_list(&a.out_dir.join(name), &g, edges).stage("write")?;
        println!("{name}\t{}", edges.len());
    }
    Ok(())
}

fn component(a: ComponentArgs) -> Result<(), StageError> {
    let g = a.graph.load()?;
    if g.is_typed() {
        return Err(anyhow!("component extraction keeps no edge types; use an untyped edge list")).stage("component");
    }
    let (sub, kept) = g.largest_weak_component();
    let edges: Vec<_> = sub.edges().collect();
    io::write_edge_list(&a.out_edges, &sub, &edges).stage("write")?;
    match a.out_features.extension().and_then(|e| e.to_str()) {
        Some("csv") => io::write_features_csv(&a.out_features, sub.features()),
        _ => io::write_features_binary(&a.out_features, sub.features()),
    }
    .stage("write")?;
    io::write_id_map(&a.out_id_map, &sub).stage("write")?;
    println!("nodes\t{}\nedges\t{}\ndropped_nodes\t{}", kept.len(), sub.num_edges(), g.num_nodes() - kept.len());
    Ok(())
}

fn run(cli: Cli) -> Result<(), StageError> {
    match cli.command {
        Command::Centrality(a) => centrality(a),
        Command::Train(a) => train_cmd(a),
        Command::Score(a) => score_cmd(a),
        Command::Simulate(a) => simulate(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Pipeline(a) => {
            let report = pine::run_pipeline_file(&a.config)?;
            write_output(a.out.as_deref(), &report.to_tsv(), "write")
        }
        Command::Bench(a) => {
            let report = pine::benchmark_file(&a.config)?;
            write_output(a.out.as_deref(), &report.to_tsv(), "write")
        }
        Command::Split(a) => split_cmd(a),
        Command::Component(a) => component(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = pine::init_thread_pool() {
        eprintln!("error: [setup] {e:#}");
        return ExitCode::FAILURE;
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
