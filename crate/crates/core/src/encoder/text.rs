use crate::corpus::PAD;
use crate::ndcore::{axpy, Rng, RngStream, Tensor};
use crate::{Error, Result};

/// Borrowed view of one text encoder's parameters.
#[derive(Clone, Copy, Debug)]
pub enum TextEncoder<'a> {
    Mwe {
        table: &'a Tensor,
    },
    Cnn {
        table: &'a Tensor,
        filters: &'a Tensor,
        bias: &'a Tensor,
        window: usize,
    },
}

impl TextEncoder<'_> {
    pub fn output_dim(&self) -> usize {
        match self {
            TextEncoder::Mwe { table } => table.row_len(),
            TextEncoder::Cnn { bias, .. } => bias.len(),
        }
    }

    fn table(&self) -> &Tensor {
        match self {
            TextEncoder::Mwe { table } | TextEncoder::Cnn { table, .. } => table,
        }
    }
}

/// Mutable gradient buffers matching a [`TextEncoder`].
pub struct TextEncoderGrads<'a> {
    pub table: &'a mut Tensor,
    pub filters: Option<&'a mut Tensor>,
    pub bias: Option<&'a mut Tensor>,
}

/// Forward result plus what the backward pass needs.
#[derive(Clone, Debug)]
pub struct TextCache {
    pub output: Vec<f64>,
    /// Token ids actually encoded (CNN inputs are padded up to the window).
    tokens: Vec<u32>,
    /// Gathered `[n, d]` embedding rows (CNN only).
    rows: Vec<f64>,
    argmax: Vec<Option<usize>>,
}

/// Encodes a token sequence: mean of embedding rows, or 4-gram (by
/// default) convolution with ReLU and max-over-time pooling.
pub fn encode_text(tokens: &[u32], enc: TextEncoder<'_>) -> Result<TextCache> {
    let table = enc.table();
    let vocab = table.rows();
    if let Some(&bad) = tokens.iter().find(|&&t| t as usize >= vocab) {
        return Err(Error::OutOfRange {
            what: "embedding table",
            index: bad as usize,
            size: vocab,
        });
    }
    let d = table.row_len();
    match enc {
        TextEncoder::Mwe { table } => {
            let mut out = vec![0.0; d];
            for &t in tokens {
                axpy(1.0, table.row(t as usize), &mut out);
            }
            if !tokens.is_empty() {
                let inv = 1.0 / tokens.len() as f64;
                out.iter_mut().for_each(|x| *x *= inv);
            }
            Ok(TextCache {
                output: out,
                tokens: tokens.to_vec(),
                rows: Vec::new(),
                argmax: Vec::new(),
            })
        }
        TextEncoder::Cnn {
            table,
            filters,
            bias,
            window,
        } => {
            if filters.shape() != [bias.len(), window * d] {
                return Err(Error::Shape {
                    op: "encode_text (cnn filters)",
                    expected: vec![bias.len(), window * d],
                    actual: filters.shape().to_vec(),
                });
            }
            let mut padded = tokens.to_vec();
            if padded.len() < window {
                padded.resize(window, PAD);
            }
            let mut rows = Vec::with_capacity(padded.len() * d);
            for &t in &padded {
                rows.extend_from_slice(table.row(t as usize));
            }
            let (output, argmax) = crate::ndcore::conv_forward(
                &rows,
                padded.len(),
                d,
                filters.data(),
                bias.data(),
                window,
            );
            Ok(TextCache {
                output,
                tokens: padded,
                rows,
                argmax,
            })
        }
    }
}

/// Accumulates `dL/dparams` given `grad_out = dL/d(encoding)`.
pub fn encode_text_backward(
    cache: &TextCache,
    enc: TextEncoder<'_>,
    grad_out: &[f64],
    grads: TextEncoderGrads<'_>,
) -> Result<()> {
    if grad_out.len() != cache.output.len() {
        return Err(Error::Shape {
            op: "encode_text_backward",
            expected: vec![cache.output.len()],
            actual: vec![grad_out.len()],
        });
    }
    let d = enc.table().row_len();
    match enc {
        TextEncoder::Mwe { .. } => {
            if cache.tokens.is_empty() {
                return Ok(());
            }
            let share = 1.0 / cache.tokens.len() as f64;
            for &t in &cache.tokens {
                axpy(share, grad_out, grads.table.row_mut(t as usize));
            }
        }
        TextEncoder::Cnn {
            filters, window, ..
        } => {
            let (Some(gf), Some(gb)) = (grads.filters, grads.bias) else {
                return Err(Error::config(
                    "CNN backward needs filter and bias gradients",
                ));
            };
            let mut grows = vec![0.0; cache.rows.len()];
            crate::ndcore::conv_backward_acc(
                &cache.rows,
                d,
                filters.data(),
                &cache.argmax,
                grad_out,
                window,
                &mut grows,
                gf.data_mut(),
                gb.data_mut(),
            );
            for (i, &t) in cache.tokens.iter().enumerate() {
                let g = &grows[i * d..(i + 1) * d];
                if g.iter().any(|&x| x != 0.0) {
                    axpy(1.0, g, grads.table.row_mut(t as usize));
                }
            }
        }
    }
    Ok(())
}

/// One fixed random token sequence shared by every bill in the
/// metadata-only variant. Draws from all non-padding indices.
pub fn dummy_tokens(length: usize, vocab_len: usize, seed: u64) -> Result<Vec<u32>> {
    if length == 0 {
        return Err(Error::config("dummy text length must be positive"));
    }
    if vocab_len < 2 {
        return Err(Error::config("vocabulary too small to sample dummy text"));
    }
    let mut rng = Rng::stream(seed, RngStream::DummyText);
    Ok((0..length)
        .map(|_| 1 + rng.below(vocab_len - 1) as u32)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Tensor {
        Tensor::matrix(4, 2, vec![0.0, 0.0, 9.0, 9.0, 1.0, 3.0, 3.0, 1.0]).unwrap()
    }

    #[test]
    fn mwe_single_and_pair() {
        let t = table();
        let enc = TextEncoder::Mwe { table: &t };
        assert_eq!(encode_text(&[2], enc).unwrap().output, vec![1.0, 3.0]);
        assert_eq!(encode_text(&[2, 3], enc).unwrap().output, vec![2.0, 2.0]);
        assert_eq!(encode_text(&[], enc).unwrap().output, vec![0.0, 0.0]);
    }

    #[test]
    fn out_of_range_token() {
        let t = table();
        assert!(encode_text(&[4], TextEncoder::Mwe { table: &t }).is_err());
    }

    #[test]
    fn cnn_pads_short_input() {
        let t = table();
        let filters = Tensor::filled(&[1, 8], 1.0);
        let bias = Tensor::zeros(&[1]);
        let enc = TextEncoder::Cnn {
            table: &t,
            filters: &filters,
            bias: &bias,
            window: 4,
        };
        // one real token (sum 4) plus three zero padding rows
        assert_eq!(encode_text(&[2], enc).unwrap().output, vec![4.0]);
        assert_eq!(encode_text(&[], enc).unwrap().output, vec![0.0]);
    }

    #[test]
    fn dummy_text_is_fixed() {
        let a = dummy_tokens(50, 30, 7).unwrap();
        assert_eq!(a, dummy_tokens(50, 30, 7).unwrap());
        assert!(a.iter().all(|&t| (1..30).contains(&t)));
        assert_ne!(a, dummy_tokens(50, 30, 8).unwrap());
        assert!(dummy_tokens(50, 1, 7).is_err());
        assert!(dummy_tokens(0, 30, 7).is_err());
    }
}
