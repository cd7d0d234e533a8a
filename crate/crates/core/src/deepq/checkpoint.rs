//! Binary network checkpoints.
//!
//! Layout, little-endian: magic `RDQN`, version u32, layer count u32, input
//! rank u32 and dims u32 each, aux count u32; then per layer a type tag u8,
//! a dim count u32, the dims as u32, a parameter count u32 and the parameters
//! as f32 (weights, then biases). A leaky slope is stored as two dims
//! holding the low and high words of its f64 bits.

use std::io::{self, Read, Write};
use std::path::Path;

use thiserror::Error;

use super::layers::{LayerKind, Shape};
use super::network::{NetError, NetSpec, Network};

pub const CHECKPOINT_MAGIC: [u8; 4] = *b"RDQN";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("not a checkpoint (bad magic)")]
    BadMagic,
    #[error("unsupported checkpoint version {0}")]
    UnsupportedVersion(u32),
    #[error("truncated checkpoint")]
    Truncated,
    #[error("malformed checkpoint: {0}")]
    Malformed(String),
    #[error(transparent)]
    Net(#[from] NetError),
}

fn layer_dims(kind: LayerKind, input: Shape) -> Vec<u32> {
    match kind {
        LayerKind::Conv { out_channels, kernel } => {
            let c = match input {
                Shape::Image { c, .. } => c,
                Shape::Flat(_) => 0,
            };
            vec![out_channels as u32, c as u32, kernel as u32, kernel as u32]
        }
        LayerKind::Dense { units } | LayerKind::LinearOut { actions: units } => vec![units as u32, input.len() as u32],
        LayerKind::LeakyRelu { slope } => {
            let bits = slope.to_bits();
            vec![bits as u32, (bits >> 32) as u32]
        }
        LayerKind::MaxPool2 | LayerKind::Relu | LayerKind::ConcatAux => vec![],
    }
}

pub fn encode_checkpoint(net: &Network<f32>) -> Vec<u8> {
    let spec = net.spec();
    let mut b = Vec::new();
    let u32le = |b: &mut Vec<u8>, v: u32| b.extend_from_slice(&v.to_le_bytes());
    b.extend_from_slice(&CHECKPOINT_MAGIC);
    u32le(&mut b, CHECKPOINT_VERSION);
    u32le(&mut b, net.layers().len() as u32);
    let dims: Vec<usize> = match spec.input {
        Shape::Image { c, h, w } => vec![c, h, w],
        Shape::Flat(f) => vec![f],
    };
    u32le(&mut b, dims.len() as u32);
    dims.iter().for_each(|&d| u32le(&mut b, d as u32));
    u32le(&mut b, spec.aux as u32);
    for layer in net.layers() {
        b.push(layer.kind.tag());
        let dims = layer_dims(layer.kind, layer.input);
        u32le(&mut b, dims.len() as u32);
        dims.iter().for_each(|&d| u32le(&mut b, d));
        let params: Vec<f32> = layer.weights.iter().chain(&layer.bias).copied().collect();
        u32le(&mut b, params.len() as u32);
        params.iter().for_each(|p| b.extend_from_slice(&p.to_le_bytes()));
    }
    b
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8], CheckpointError> {
        if self.bytes.len() < n {
            return Err(CheckpointError::Truncated);
        }
        let (head, tail) = self.bytes.split_at(n);
        self.bytes = tail;
        Ok(head)
    }

    fn u32(&mut self) -> Result<u32, CheckpointError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u8(&mut self) -> Result<u8, CheckpointError> {
        Ok(self.take(1)?[0])
    }

    fn count(&mut self, limit: usize) -> Result<usize, CheckpointError> {
        let n = self.u32()? as usize;
        if n > limit {
            return Err(CheckpointError::Malformed(format!("count {n} exceeds {limit}")));
        }
        Ok(n)
    }
}

pub fn decode_checkpoint(bytes: &[u8]) -> Result<Network<f32>, CheckpointError> {
    let mut r = Reader { bytes };
    if r.take(4)? != CHECKPOINT_MAGIC {
        return Err(CheckpointError::BadMagic);
    }
    let version = r.u32()?;
    if version != CHECKPOINT_VERSION {
        return Err(CheckpointError::UnsupportedVersion(version));
    }
    let layer_count = r.count(1024)?;
    let rank = r.count(3)?;
    let dims = (0..rank).map(|_| r.u32().map(|d| d as usize)).collect::<Result<Vec<_>, _>>()?;
    let input = match dims.as_slice() {
        &[c, h, w] => Shape::Image { c, h, w },
        &[f] => Shape::Flat(f),
        _ => return Err(CheckpointError::Malformed(format!("input rank {rank}"))),
    };
    let aux = r.u32()? as usize;
    let mut kinds = Vec::with_capacity(layer_count);
    let mut params = Vec::with_capacity(layer_count);
    for _ in 0..layer_count {
        let tag = r.u8()?;
        let n = r.count(8)?;
        let d = (0..n).map(|_| r.u32().map(|v| v as usize)).collect::<Result<Vec<_>, _>>()?;
        let np = r.count(bytes.len() / 4)?;
        let raw = r.take(np * 4)?;
        let p: Vec<f32> = raw.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect();
        let bad = || CheckpointError::Malformed(format!("layer tag {tag} with dims {d:?}"));
        let kind = match (tag, d.as_slice()) {
            (0, &[out_channels, _, kernel, _]) => LayerKind::Conv { out_channels, kernel },
            (1, []) => LayerKind::MaxPool2,
            (2, []) => LayerKind::Relu,
            (3, &[lo, hi]) => LayerKind::LeakyRelu { slope: f64::from_bits(lo as u64 | (hi as u64) << 32) },
            (4, &[units, _]) => LayerKind::Dense { units },
            (5, []) => LayerKind::ConcatAux,
            (6, &[actions, _]) => LayerKind::LinearOut { actions },
            _ => return Err(bad()),
        };
        kinds.push((kind, d));
        params.push(p);
    }
    if !r.bytes.is_empty() {
        return Err(CheckpointError::Malformed(format!("{} trailing bytes", r.bytes.len())));
    }
    let spec = NetSpec { input, aux, layers: kinds.iter().map(|(k, _)| *k).collect() };
    let mut net = Network::<f32>::new(spec)?;
    for (layer, ((kind, dims), p)) in net.layers_mut().iter_mut().zip(kinds.iter().zip(params)) {
        if layer_dims(*kind, layer.input) != dims.iter().map(|&d| d as u32).collect::<Vec<_>>() {
            return Err(CheckpointError::Malformed(format!("{} dims {dims:?} do not chain", kind.name())));
        }
        if p.len() != layer.weights.len() + layer.bias.len() {
            return Err(CheckpointError::Malformed(format!("{} has {} parameters", kind.name(), p.len())));
        }
        let (w, b) = p.split_at(layer.weights.len());
        layer.weights.copy_from_slice(w);
        layer.bias.copy_from_slice(b);
    }
    Ok(net)
}

pub fn save_checkpoint(net: &Network<f32>, path: &Path) -> Result<(), CheckpointError> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&encode_checkpoint(net))?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Network<f32>, CheckpointError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode_checkpoint(&bytes)
}
