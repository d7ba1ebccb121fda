//! Binary parameter checkpoints.
//!
//! ```text
//! "RCALLCKP"            8-byte magic
//! u32 LE                format version (1)
//! u64 LE                manifest length in bytes
//! manifest              UTF-8 JSON: {format, tensors: [{name, shape, offset, frozen}], metadata}
//! data                  f64 little-endian; `offset` is in bytes from the start of this section
//! ```
//!
//! Tensors are written in name order, so equal stores encode to equal bytes.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{params::Param, ParamStore, Tensor};
use crate::{Error, Result};

pub const CHECKPOINT_FORMAT: &str = "rollcall-checkpoint/1";
const MAGIC: &[u8; 8] = b"RCALLCKP";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Manifest {
    format: String,
    tensors: Vec<TensorEntry>,
    metadata: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
struct TensorEntry {
    name: String,
    shape: Vec<usize>,
    offset: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    frozen: Vec<usize>,
}

pub fn encode_checkpoint(params: &ParamStore, metadata: &serde_json::Value) -> Result<Vec<u8>> {
    let mut tensors = Vec::with_capacity(params.len());
    let mut offset = 0u64;
    for (name, p) in params.iter() {
        tensors.push(TensorEntry {
            name: name.to_string(),
            shape: p.value.shape().to_vec(),
            offset,
            frozen: p.frozen_indices(),
        });
        offset += 8 * p.value.len() as u64;
    }
    let manifest = serde_json::to_vec(&Manifest {
        format: CHECKPOINT_FORMAT.to_string(),
        tensors,
        metadata: metadata.clone(),
    })?;

    let mut out = Vec::with_capacity(20 + manifest.len() + offset as usize);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(manifest.len() as u64).to_le_bytes());
    out.extend_from_slice(&manifest);
    for (_, p) in params.iter() {
        for x in p.value.data() {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn decode_checkpoint(bytes: &[u8]) -> Result<(ParamStore, serde_json::Value)> {
    let bad = |msg: &str| Error::Parse {
        file: "checkpoint".into(),
        line: 0,
        message: msg.to_string(),
    };
    if bytes.len() < 20 || &bytes[..8] != MAGIC {
        return Err(bad("not a rollcall checkpoint"));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != VERSION {
        return Err(bad(&format!("unsupported checkpoint version {version}")));
    }
    let mlen = u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize;
    let data_start = 20usize
        .checked_add(mlen)
        .filter(|&e| e <= bytes.len())
        .ok_or_else(|| bad("truncated manifest"))?;
    let manifest: Manifest = serde_json::from_slice(&bytes[20..data_start])?;
    if manifest.format != CHECKPOINT_FORMAT {
        return Err(bad(&format!("unknown format `{}`", manifest.format)));
    }
    let data = &bytes[data_start..];
    let mut store = ParamStore::new();
    for entry in manifest.tensors {
        let len: usize = entry.shape.iter().product();
        let start = entry.offset as usize;
        let end = start + 8 * len;
        if end > data.len() {
            return Err(bad(&format!(
                "tensor `{}` runs past end of file",
                entry.name
            )));
        }
        let values = data[start..end]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let mut param = Param::new(Tensor::new(entry.shape, values)?);
        for i in entry.frozen {
            if i >= len {
                return Err(bad("frozen index out of range"));
            }
            param.freeze_index(i);
        }
        if store.contains(&entry.name) {
            return Err(Error::DuplicateId {
                kind: "parameter",
                id: entry.name,
            });
        }
        store.insert_param(entry.name, param);
    }
    Ok((store, manifest.metadata))
}

pub fn write_checkpoint(
    path: &Path,
    params: &ParamStore,
    metadata: &serde_json::Value,
) -> Result<()> {
    let bytes = encode_checkpoint(params, metadata)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_checkpoint(path: &Path) -> Result<(ParamStore, serde_json::Value)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_checkpoint(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn round_trip(values in proptest::collection::vec(-1e6f64..1e6, 1..40), rows in 1usize..4) {
            let cols = values.len();
            let mut store = ParamStore::new();
            store.insert("b", Tensor::vector(values.clone()).unwrap()).unwrap();
            store.insert("a", Tensor::new(vec![rows, cols], values.repeat(rows)).unwrap()).unwrap();
            store.freeze_row("a", 0).unwrap();
            let meta = serde_json::json!({"note": "x"});
            let bytes = encode_checkpoint(&store, &meta).unwrap();
            let (back, meta_back) = decode_checkpoint(&bytes).unwrap();
            prop_assert_eq!(&back, &store);
            prop_assert_eq!(meta_back, meta);
            prop_assert_eq!(encode_checkpoint(&back, &serde_json::json!({"note": "x"})).unwrap(), bytes);
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(decode_checkpoint(b"hello").is_err());
        let mut bytes = encode_checkpoint(&ParamStore::new(), &serde_json::Value::Null).unwrap();
        bytes[8] = 9;
        assert!(decode_checkpoint(&bytes).is_err());
    }
}
