use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use pine_core::{AttributedGraph, EdgeType, GraphBuilder, NodeId};

use super::{content_lines, create, open, FormatError, Result};

/// One parsed line of an edge list, ids still in their textual form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRecord {
    pub line: usize,
    pub src: String,
    pub dst: String,
    pub ty: Option<EdgeType>,
}

/// Whitespace-separated `src dst [type]` lines. Every line must agree on
/// whether a type column is present.
pub fn parse_edge_list<R: BufRead>(reader: R, path: &Path) -> Result<Vec<EdgeRecord>> {
    let mut out: Vec<EdgeRecord> = Vec::new();
    for item in content_lines(reader, path) {
        let (line, text) = item?;
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let ty = match tokens.len() {
            2 => None,
            3 => {
                Some(tokens[2].parse::<EdgeType>().map_err(|_| {
                    FormatError::parse(path, line, format!("edge type `{}` is not an integer", tokens[2]))
                })?)
            }
            k => return Err(FormatError::parse(path, line, format!("expected `src dst [type]`, found {k} fields"))),
        };
        if let Some(first) = out.first() {
            if first.ty.is_some() != ty.is_some() {
                return Err(FormatError::parse(path, line, "typed and untyped edges are mixed"));
            }
        }
        out.push(EdgeRecord { line, src: tokens[0].to_string(), dst: tokens[1].to_string(), ty });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    /// Edge list plus a feature file (CSV or binary).
    #[default]
    EdgeList,
    /// Citation-dataset pair: `*.cites` as edges, `*.content` as features.
    Planetoid,
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "edgelist" => Ok(Self::EdgeList),
            "planetoid" => Ok(Self::Planetoid),
            _ => Err(format!("unknown graph format `{s}` (edgelist, planetoid)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphFiles {
    pub format: InputFormat,
    pub edges: PathBuf,
    pub features: PathBuf,
    pub id_map: Option<PathBuf>,
    /// Swap every edge's direction while loading.
    pub reverse_edges: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LoadStats {
    pub edge_lines: usize,
    pub self_loops_dropped: usize,
    pub duplicates_collapsed: usize,
    /// Edges naming a node absent from the feature file (citation data only).
    pub unknown_ids_dropped: usize,
}

#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: AttributedGraph,
    pub stats: LoadStats,
}

pub fn load_graph(files: &GraphFiles) -> Result<LoadedGraph> {
    if files.format == InputFormat::Planetoid {
        let p = super::load_planetoid(&files.features, &files.edges, files.reverse_edges)?;
        return Ok(LoadedGraph { graph: p.graph, stats: p.stats });
    }
    let features = super::read_features(&files.features)?;
    let labels = match &files.id_map {
        Some(path) => {
            let labels = super::read_id_map(path)?;
            if labels.len() != features.rows() {
                return Err(FormatError::invalid(
                    path,
                    format!("{} ids for {} feature rows", labels.len(), features.rows()),
                ));
            }
            labels
        }
        None => (0..features.rows()).map(|i| i.to_string()).collect(),
    };
    let index: HashMap<&str, NodeId> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i as NodeId)).collect();
    let records = parse_edge_list(open(&files.edges)?, &files.edges)?;

    let typed = records.first().is_some_and(|r| r.ty.is_some());
    let mut edges = Vec::with_capacity(records.len());
    for r in &records {
        let resolve = |id: &str| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| FormatError::parse(&files.edges, r.line, format!("node `{id}` has no feature row")))
        };
        let (mut s, mut d) = (resolve(&r.src)?, resolve(&r.dst)?);
        if files.reverse_edges {
            std::mem::swap(&mut s, &mut d);
        }
        edges.push((s, d, r.ty));
    }
    drop(index);

    let mut builder = GraphBuilder::new(features).labels(labels);
    for (s, d, ty) in edges {
        match ty {
            Some(t) => builder.typed_edge(s, d, t),
            None => builder.edge(s, d),
        };
    }
    if !typed && records.is_empty() {
        log::warn!("{}: no edges", files.edges.display());
    }
    let (graph, build) = builder.build()?;
    let stats = LoadStats {
        edge_lines: records.len(),
        self_loops_dropped: build.self_loops_dropped,
        duplicates_collapsed: build.duplicates_collapsed,
        unknown_ids_dropped: 0,
    };
    Ok(LoadedGraph { graph, stats })
}

/// Writes `edges` of `g` using the graph's node labels.
pub fn write_edge_list(path: &Path, g: &AttributedGraph, edges: &[(NodeId, NodeId)]) -> Result<()> {
    let mut w = create(path)?;
    for &(s, d) in edges {
        writeln!(w, "{}\t{}", g.label(s), g.label(d)).map_err(|e| FormatError::io(path, e))?;
    }
    w.flush().map_err(|e| FormatError::io(path, e))
}
