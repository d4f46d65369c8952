//! `PINEM1 | u64 layers | (u64 in, u64 out) per layer | f32 leaky slope |
//! u8 activation | per layer: U, s, t as little-endian f32`.
//!
//! Cached attention is not stored; it is rebuilt by the next forward pass.

use std::io::{Read, Write};
use std::path::Path;

use pine_core::gat::{Activation, GatLayer, GatModel, Real};

use super::{create, open, FormatError, Result};

pub const MODEL_MAGIC: &[u8; 6] = b"PINEM1";

const ACTIVATIONS: [Activation; 3] = [Activation::Elu, Activation::Relu, Activation::Identity];

pub fn write_model<T: Real>(path: &Path, model: &GatModel<T>) -> Result<()> {
    let model: GatModel<f32> = model.cast();
    let mut out = MODEL_MAGIC.to_vec();
    out.extend_from_slice(&(model.num_layers() as u64).to_le_bytes());
    for l in model.layers() {
        out.extend_from_slice(&(l.in_dim as u64).to_le_bytes());
        out.extend_from_slice(&(l.out_dim as u64).to_le_bytes());
    }
    out.extend_from_slice(&(model.leaky_slope() as f32).to_le_bytes());
    out.push(ACTIVATIONS.iter().position(|&a| a == model.activation()).unwrap() as u8);
    for l in model.layers() {
        for v in l.weight.iter().chain(&l.src_attention).chain(&l.dst_attention) {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    let mut w = create(path)?;
    w.write_all(&out).and_then(|_| w.flush()).map_err(|e| FormatError::io(path, e))
}

struct Cursor<'a> {
    bytes: &'a [u8],
    at: usize,
    path: &'a Path,
}

impl Cursor<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.at.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| FormatError::invalid(self.path, "truncated model file"))?;
        let s = &self.bytes[self.at..end];
        self.at = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<usize> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()) as usize)
    }

    fn f32s(&mut self, n: usize) -> Result<Vec<f32>> {
        let bytes = self.take(n.saturating_mul(4))?;
        Ok(bytes.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect())
    }
}

pub fn read_model(path: &Path) -> Result<GatModel<f32>> {
    let mut bytes = Vec::new();
    open(path)?.read_to_end(&mut bytes).map_err(|e| FormatError::io(path, e))?;
    let mut c = Cursor { bytes: &bytes, at: 0, path };
    if c.take(6)? != MODEL_MAGIC {
        return Err(FormatError::invalid(path, "not a model file (bad magic)"));
    }
    let count = c.u64()?;
    if count == 0 || count > 1024 {
        return Err(FormatError::invalid(path, format!("implausible layer count {count}")));
    }
    let dims = (0..count).map(|_| Ok((c.u64()?, c.u64()?))).collect::<Result<Vec<_>>>()?;
    let slope = f32::from_le_bytes(c.take(4)?.try_into().unwrap()) as f64;
    let activation = *ACTIVATIONS
        .get(c.take(1)?[0] as usize)
        .ok_or_else(|| FormatError::invalid(path, "unknown activation code"))?;
    let mut layers = Vec::with_capacity(count);
    for (in_dim, out_dim) in dims {
        layers.push(GatLayer {
            in_dim,
            out_dim,
            weight: c.f32s(in_dim.saturating_mul(out_dim))?,
            src_attention: c.f32s(out_dim)?,
            dst_attention: c.f32s(out_dim)?,
        });
    }
    if c.at != bytes.len() {
        return Err(FormatError::invalid(path, "trailing bytes after the last layer"));
    }
    Ok(GatModel::from_layers(layers, slope, activation)?)
}
