use std::collections::HashMap;
use std::path::Path;

use pine_core::{FeatureMatrix, GraphBuilder, NodeId};

use super::{content_lines, open, FormatError, LoadStats, Result};

/// A citation dataset in the `.content` / `.cites` layout.
#[derive(Debug, Clone)]
pub struct Planetoid {
    pub graph: pine_core::AttributedGraph,
    /// Class label of each node (last column of the content file).
    pub classes: Vec<String>,
    pub stats: LoadStats,
}

/// `content`: `paper_id  x_1 … x_d  class` per line. `cites`: `cited citing`
/// per line, loaded as the edge `cited → citing` (flip with `reverse`).
/// Citations naming papers absent from `content` are dropped and counted.
pub fn load_planetoid(content: &Path, cites: &Path, reverse: bool) -> Result<Planetoid> {
    let mut labels = Vec::new();
    let mut classes = Vec::new();
    let mut data = Vec::new();
    let mut dim = None;
    for item in content_lines(open(content)?, content) {
        let (line, text) = item?;
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() < 3 {
            return Err(FormatError::parse(content, line, "expected `id features… class`"));
        }
        let width = tokens.len() - 2;
        if *dim.get_or_insert(width) != width {
            return Err(FormatError::parse(content, line, format!("{width} features, expected {}", dim.unwrap())));
        }
        for t in &tokens[1..=width] {
            data.push(
                t.parse::<f32>().map_err(|_| FormatError::parse(content, line, format!("`{t}` is not a number")))?,
            );
        }
        labels.push(tokens[0].to_string());
        classes.push(tokens[width + 1].to_string());
    }
    let dim = dim.ok_or_else(|| FormatError::invalid(content, "no papers"))?;
    let n = labels.len();
    let index: HashMap<&str, NodeId> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i as NodeId)).collect();
    if index.len() != n {
        return Err(FormatError::invalid(content, "duplicate paper ids"));
    }

    let mut stats = LoadStats::default();
    let mut edges = Vec::new();
    for item in content_lines(open(cites)?, cites) {
        let (line, text) = item?;
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(FormatError::parse(cites, line, "expected `cited citing`"));
        }
        stats.edge_lines += 1;
        match (index.get(tokens[0]), index.get(tokens[1])) {
            (Some(&a), Some(&b)) => edges.push(if reverse { (b, a) } else { (a, b) }),
            _ => stats.unknown_ids_dropped += 1,
        }
    }
    drop(index);
    if stats.unknown_ids_dropped > 0 {
        log::info!("{}: dropped {} citations to unknown papers", cites.display(), stats.unknown_ids_dropped);
    }

    let mut builder = GraphBuilder::new(FeatureMatrix::new(n, dim, data)?).labels(labels);
    builder.extend(edges);
    let (graph, build) = builder.build()?;
    stats.self_loops_dropped = build.self_loops_dropped;
    stats.duplicates_collapsed = build.duplicates_collapsed;
    Ok(Planetoid { graph, classes, stats })
}
