use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

/// The bundled 127-word English stopword list, one token per line.
pub const BUILTIN_STOPWORDS: &str = include_str!("../../data/stopwords.txt");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stopwords {
    words: HashSet<String>,
    sha256: String,
}

impl Stopwords {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_STOPWORDS)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(|l| l.trim().to_lowercase())
            .filter(|l| !l.is_empty())
            .collect();
        Stopwords {
            words,
            sha256: hex::encode(Sha256::digest(text.as_bytes())),
        }
    }

    pub fn empty() -> Self {
        Self::parse("")
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Hash of the source text, recorded in corpus caches and run manifests.
    pub fn sha256(&self) -> &str {
        &self.sha256
    }
}

/// Lowercases and splits on maximal runs of non-alphanumeric characters.
pub fn tokenize(raw: &str) -> Vec<String> {
    raw.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Tokenizes, drops stopwords, then keeps the first `cap` tokens.
pub fn preprocess_text(raw: &str, stopwords: &Stopwords, cap: usize) -> Vec<String> {
    tokenize(raw)
        .into_iter()
        .filter(|t| !stopwords.contains(t))
        .take(cap)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationCaps {
    pub summary: usize,
    pub fulltext: usize,
}

impl Default for TruncationCaps {
    fn default() -> Self {
        TruncationCaps {
            summary: 400,
            fulltext: 2000,
        }
    }
}

/// Nearest-rank percentile of document lengths (`q` in `(0, 1]`), at least 1.
pub fn percentile_cap(lengths: &[usize], q: f64) -> usize {
    if lengths.is_empty() {
        return 1;
    }
    let mut sorted = lengths.to_vec();
    sorted.sort_unstable();
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1].max(1)
}
