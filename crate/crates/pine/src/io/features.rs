use std::io::{BufRead, Read, Write};
use std::path::Path;

use pine_core::FeatureMatrix;

use super::{content_lines, create, open, FormatError, Result};

pub const FEATURE_MAGIC: &[u8; 6] = b"PINEF1";

/// Reads either format, recognising the binary one by its magic bytes.
pub fn read_features(path: &Path) -> Result<FeatureMatrix> {
    let mut reader = open(path)?;
    let head = reader.fill_buf().map_err(|e| FormatError::io(path, e))?;
    if head.starts_with(FEATURE_MAGIC) {
        let mut bytes = Vec::new();
        reader.read_to_end(&mut bytes).map_err(|e| FormatError::io(path, e))?;
        parse_binary(&bytes, path)
    } else {
        parse_features_csv(reader, path)
    }
}

fn parse_binary(bytes: &[u8], path: &Path) -> Result<FeatureMatrix> {
    let header = FEATURE_MAGIC.len() + 16;
    if bytes.len() < header {
        return Err(FormatError::invalid(path, "truncated feature header"));
    }
    let word = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
    let (n, d) = (word(6) as usize, word(14) as usize);
    let expected = n.checked_mul(d).and_then(|c| c.checked_mul(4)).map(|b| b + header);
    if expected != Some(bytes.len()) {
        return Err(FormatError::invalid(path, format!("{} bytes cannot hold a {n}x{d} matrix", bytes.len())));
    }
    let data = bytes[header..].chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect();
    Ok(FeatureMatrix::new(n, d, data)?)
}

/// One comma-separated row per node; row `k` belongs to node `k`.
pub fn parse_features_csv<R: BufRead>(reader: R, path: &Path) -> Result<FeatureMatrix> {
    let mut data = Vec::new();
    let mut dim = None;
    let mut rows = 0;
    for item in content_lines(reader, path) {
        let (line, text) = item?;
        let before = data.len();
        for field in text.split(',') {
            let v: f32 = field
                .trim()
                .parse()
                .map_err(|_| FormatError::parse(path, line, format!("`{}` is not a number", field.trim())))?;
            data.push(v);
        }
        let width = data.len() - before;
        match dim {
            None => dim = Some(width),
            Some(d) if d != width => {
                return Err(FormatError::parse(path, line, format!("row has {width} values, expected {d}")));
            }
            _ => {}
        }
        rows += 1;
    }
    let dim = dim.ok_or_else(|| FormatError::invalid(path, "no feature rows"))?;
    Ok(FeatureMatrix::new(rows, dim, data)?)
}

pub fn write_features_binary(path: &Path, x: &FeatureMatrix) -> Result<()> {
    let mut w = create(path)?;
    let mut body = Vec::with_capacity(22 + 4 * x.as_slice().len());
    body.extend_from_slice(FEATURE_MAGIC);
    body.extend_from_slice(&(x.rows() as u64).to_le_bytes());
    body.extend_from_slice(&(x.dim() as u64).to_le_bytes());
    for v in x.as_slice() {
        body.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&body).and_then(|_| w.flush()).map_err(|e| FormatError::io(path, e))
}

pub fn write_features_csv(path: &Path, x: &FeatureMatrix) -> Result<()> {
    let mut w = create(path)?;
    for i in 0..x.rows() {
        let row: Vec<String> = x.row(i).iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", row.join(",")).map_err(|e| FormatError::io(path, e))?;
    }
    w.flush().map_err(|e| FormatError::io(path, e))
}
