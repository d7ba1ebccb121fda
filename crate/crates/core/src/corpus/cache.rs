use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Corpus;
use crate::{Error, Result};

/// Schema string stamped into processed-corpus caches.
pub const CORPUS_SCHEMA: &str = "rollcall-corpus/1";

#[derive(Serialize, Deserialize)]
struct CacheFile {
    schema: String,
    corpus: Corpus,
}

pub fn save_corpus(path: &Path, corpus: &Corpus) -> Result<()> {
    let file = CacheFile {
        schema: CORPUS_SCHEMA.to_string(),
        corpus: corpus.clone(),
    };
    let mut bytes = serde_json::to_vec(&file)?;
    bytes.push(b'\n');
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn load_corpus(path: &Path) -> Result<Corpus> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let file: CacheFile = serde_json::from_slice(&bytes)?;
    if file.schema != CORPUS_SCHEMA {
        return Err(Error::config(format!(
            "corpus cache schema `{}` is not `{CORPUS_SCHEMA}`",
            file.schema
        )));
    }
    let mut corpus = file.corpus;
    corpus.reindex();
    Ok(corpus)
}
