use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::corpus::{Vocab, PAD};
use crate::ndcore::{Rng, Tensor};
use crate::{Error, Result};

/// Rows for tokens missing from the pretrained file are drawn from `U[-r, r]`.
pub const EMBEDDING_INIT_RANGE: f64 = 0.25;

/// Builds a `|V| x dim` table from a whitespace-separated `token v1 .. vdim`
/// file. Every row is first drawn at random (so the stream does not depend
/// on file contents), then overwritten where the file has the token. The
/// padding row is zero.
pub fn load_pretrained(
    path: Option<&Path>,
    vocab: &Vocab,
    dim: usize,
    rng: &mut Rng,
) -> Result<Tensor> {
    let mut data: Vec<f64> = (0..vocab.len() * dim)
        .map(|_| rng.uniform_range(-EMBEDDING_INIT_RANGE, EMBEDDING_INIT_RANGE))
        .collect();
    data[PAD as usize * dim..(PAD as usize + 1) * dim].fill(0.0);

    if let Some(path) = path {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let mut fields = line.split_whitespace();
            let Some(word) = fields.next() else { continue };
            let values: Vec<f64> = fields
                .map(str::parse::<f64>)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| parse_err(path, i, format!("bad number: {e}")))?;
            if values.len() != dim {
                return Err(parse_err(
                    path,
                    i,
                    format!("expected {dim} values, found {}", values.len()),
                ));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(parse_err(path, i, "non-finite value".into()));
            }
            let idx = vocab.lookup(word);
            // Only real tokens take pretrained rows; OOV keeps its random row.
            if idx as usize >= 2 && vocab.token(idx) == Some(word) {
                data[idx as usize * dim..(idx as usize + 1) * dim].copy_from_slice(&values);
            }
        }
    }
    Tensor::matrix(vocab.len(), dim, data)
}

fn parse_err(path: &Path, line: usize, message: String) -> Error {
    Error::Parse {
        file: path.display().to_string(),
        line: line + 1,
        message,
    }
}
