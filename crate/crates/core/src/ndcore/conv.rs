use super::ops::{axpy, dot, shape_err};
use super::Tensor;
use crate::{Error, Result};

/// Output of [`conv1d_ngram`] together with what the backward pass needs.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvOutput {
    pub output: Tensor,
    /// Winning window per filter, `None` where the filter's max activation
    /// was clipped to zero by the ReLU (no gradient flows there).
    pub argmax: Vec<Option<usize>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvGrads {
    pub emb: Tensor,
    pub filters: Tensor,
    pub bias: Tensor,
}

/// Narrow 1-d convolution over `window`-grams followed by ReLU and
/// max-over-time pooling.
///
/// `emb` is `[n, d]` with `n >= window`; `filters` is `[F, window * d]`
/// (each row a flattened `window x d` patch); `bias` is `[F]`. Position `p`
/// sees rows `p..p + window`, which are contiguous in row-major storage.
pub fn conv1d_ngram(
    emb: &Tensor,
    filters: &Tensor,
    bias: &Tensor,
    window: usize,
) -> Result<ConvOutput> {
    let (n, d, f) = conv_dims(emb, filters, bias, window)?;
    emb.check_finite("conv1d_ngram input")?;
    let (out, argmax) = conv_forward(emb.data(), n, d, filters.data(), bias.data(), window);
    debug_assert_eq!(out.len(), f);
    Ok(ConvOutput {
        output: Tensor::from_parts(vec![f], out),
        argmax,
    })
}

pub fn conv1d_ngram_backward(
    emb: &Tensor,
    filters: &Tensor,
    cache: &ConvOutput,
    grad_out: &Tensor,
    window: usize,
) -> Result<ConvGrads> {
    let f = cache.argmax.len();
    let (n, d) = match emb.shape() {
        [n, d] => (*n, *d),
        other => return Err(shape_err("conv1d_ngram_backward", &[0, 0], other)),
    };
    filters.expect_shape("conv1d_ngram_backward", &[f, window * d])?;
    grad_out.expect_shape("conv1d_ngram_backward", &[f])?;
    let mut gemb = vec![0.0; n * d];
    let mut gfilters = vec![0.0; f * window * d];
    let mut gbias = vec![0.0; f];
    conv_backward_acc(
        emb.data(),
        d,
        filters.data(),
        &cache.argmax,
        grad_out.data(),
        window,
        &mut gemb,
        &mut gfilters,
        &mut gbias,
    );
    Ok(ConvGrads {
        emb: Tensor::from_parts(vec![n, d], gemb),
        filters: Tensor::from_parts(vec![f, window * d], gfilters),
        bias: Tensor::from_parts(vec![f], gbias),
    })
}

fn conv_dims(
    emb: &Tensor,
    filters: &Tensor,
    bias: &Tensor,
    window: usize,
) -> Result<(usize, usize, usize)> {
    let (n, d) = match emb.shape() {
        [n, d] => (*n, *d),
        other => return Err(shape_err("conv1d_ngram", &[0, 0], other)),
    };
    if window == 0 {
        return Err(Error::config("convolution window must be positive"));
    }
    if n < window {
        return Err(Error::Shape {
            op: "conv1d_ngram (sequence shorter than window)",
            expected: vec![window, d],
            actual: vec![n, d],
        });
    }
    let f = bias.len();
    filters.expect_shape("conv1d_ngram", &[f, window * d])?;
    bias.expect_shape("conv1d_ngram", &[f])?;
    Ok((n, d, f))
}

pub(crate) fn conv_forward(
    emb: &[f64],
    n: usize,
    d: usize,
    filters: &[f64],
    bias: &[f64],
    window: usize,
) -> (Vec<f64>, Vec<Option<usize>>) {
    let span = window * d;
    let positions = n + 1 - window;
    let mut out = Vec::with_capacity(bias.len());
    let mut argmax = Vec::with_capacity(bias.len());
    for (row, &b) in filters.chunks_exact(span).zip(bias) {
        let mut best = f64::NEG_INFINITY;
        let mut best_pos = 0;
        for p in 0..positions {
            let s = dot(row, &emb[p * d..p * d + span]) + b;
            if s > best {
                best = s;
                best_pos = p;
            }
        }
        if best > 0.0 {
            out.push(best);
            argmax.push(Some(best_pos));
        } else {
            out.push(0.0);
            argmax.push(None);
        }
    }
    (out, argmax)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn conv_backward_acc(
    emb: &[f64],
    d: usize,
    filters: &[f64],
    argmax: &[Option<usize>],
    grad_out: &[f64],
    window: usize,
    gemb: &mut [f64],
    gfilters: &mut [f64],
    gbias: &mut [f64],
) {
    let span = window * d;
    for (k, (&g, pos)) in grad_out.iter().zip(argmax).enumerate() {
        let Some(p) = *pos else { continue };
        if g == 0.0 {
            continue;
        }
        gbias[k] += g;
        let patch = p * d..p * d + span;
        axpy(
            g,
            &emb[patch.clone()],
            &mut gfilters[k * span..(k + 1) * span],
        );
        axpy(g, &filters[k * span..(k + 1) * span], &mut gemb[patch]);
    }
}
