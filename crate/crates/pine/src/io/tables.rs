use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use pine_core::{AttributedGraph, NodeId, ScoreVector};

use super::{content_lines, create, open, FormatError, Result};

/// `dense_id<TAB>original_id` lines. Returns original ids indexed by dense id.
pub fn read_id_map(path: &Path) -> Result<Vec<String>> {
    let mut pairs = Vec::new();
    for item in content_lines(open(path)?, path) {
        let (line, text) = item?;
        let mut fields = text.split('\t');
        let (Some(dense), Some(orig), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(FormatError::parse(path, line, "expected `dense_id<TAB>original_id`"));
        };
        let dense: usize =
            dense.trim().parse().map_err(|_| FormatError::parse(path, line, format!("`{dense}` is not a dense id")))?;
        pairs.push((line, dense, orig.trim().to_string()));
    }
    let n = pairs.len();
    let mut labels = vec![None; n];
    for (line, dense, orig) in pairs {
        match labels.get_mut(dense) {
            Some(slot @ None) => *slot = Some(orig),
            Some(Some(_)) => return Err(FormatError::parse(path, line, format!("dense id {dense} repeated"))),
            None => return Err(FormatError::parse(path, line, format!("dense id {dense} outside 0..{n}"))),
        }
    }
    Ok(labels.into_iter().map(Option::unwrap).collect())
}

pub fn write_id_map(path: &Path, g: &AttributedGraph) -> Result<()> {
    let mut w = create(path)?;
    for (i, label) in g.labels().iter().enumerate() {
        writeln!(w, "{i}\t{label}").map_err(|e| FormatError::io(path, e))?;
    }
    w.flush().map_err(|e| FormatError::io(path, e))
}

/// `node_id<TAB>score`, highest first, ties in ascending dense id.
pub fn write_scores<W: Write>(mut w: W, g: &AttributedGraph, scores: &ScoreVector) -> std::io::Result<()> {
    for v in scores.ranking() {
        writeln!(w, "{}\t{}", g.label(v), scores.values[v as usize])?;
    }
    w.flush()
}

/// Rows of a two-column `id<TAB>value` table, in file order.
pub type KeyedValues = Vec<(String, f64)>;

pub fn read_keyed_values(path: &Path) -> Result<KeyedValues> {
    let mut out = Vec::new();
    for item in content_lines(open(path)?, path) {
        let (line, text) = item?;
        let fields: Vec<&str> = text.split_whitespace().collect();
        let [id, value] = fields[..] else {
            return Err(FormatError::parse(path, line, "expected `id<TAB>value`"));
        };
        let value: f64 =
            value.parse().map_err(|_| FormatError::parse(path, line, format!("`{value}` is not a number")))?;
        if !value.is_finite() {
            return Err(FormatError::parse(path, line, "value is not finite"));
        }
        out.push((id.to_string(), value));
    }
    Ok(out)
}

fn label_index(g: &AttributedGraph) -> HashMap<&str, NodeId> {
    g.labels().iter().enumerate().map(|(i, l)| (l.as_str(), i as NodeId)).collect()
}

/// Maps the ids of a keyed table onto `g`'s dense ids.
pub fn resolve_labels(g: &AttributedGraph, values: &KeyedValues, path: &Path) -> Result<Vec<(NodeId, f64)>> {
    let index = label_index(g);
    values
        .iter()
        .map(|(id, v)| match index.get(id.as_str()) {
            Some(&n) => Ok((n, *v)),
            None => Err(FormatError::invalid(path, format!("node `{id}` is not in the graph"))),
        })
        .collect()
}

/// One node id per line.
pub fn read_seeds(path: &Path, g: &AttributedGraph) -> Result<Vec<NodeId>> {
    let index = label_index(g);
    let mut seeds = Vec::new();
    for item in content_lines(open(path)?, path) {
        let (line, text) = item?;
        let id = index
            .get(text.as_str())
            .ok_or_else(|| FormatError::parse(path, line, format!("node `{text}` is not in the graph")))?;
        seeds.push(*id);
    }
    Ok(seeds)
}

pub fn write_seeds(path: &Path, g: &AttributedGraph, seeds: &[NodeId]) -> Result<()> {
    let mut w = create(path)?;
    for &s in seeds {
        writeln!(w, "{}", g.label(s)).map_err(|e| FormatError::io(path, e))?;
    }
    w.flush().map_err(|e| FormatError::io(path, e))
}
