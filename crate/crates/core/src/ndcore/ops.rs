use super::Tensor;
use crate::{Error, Result};

/// Dot product with eight independent partial sums combined in a fixed
/// order, so results are reproducible and the loop vectorizes.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail
}

/// `y += alpha * x`
#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `out += W x` for row-major `W` of shape `out.len() x x.len()`.
pub(crate) fn matvec_acc(w: &[f64], x: &[f64], out: &mut [f64]) {
    let d_in = x.len();
    for (o, row) in out.iter_mut().zip(w.chunks_exact(d_in)) {
        *o += dot(row, x);
    }
}

/// `out += W^T g` for row-major `W` of shape `g.len() x out.len()`.
pub(crate) fn matvec_t_acc(w: &[f64], g: &[f64], out: &mut [f64]) {
    let d_in = out.len();
    for (&gi, row) in g.iter().zip(w.chunks_exact(d_in)) {
        if gi != 0.0 {
            axpy(gi, row, out);
        }
    }
}

/// `gw += g x^T`
pub(crate) fn add_outer(gw: &mut [f64], g: &[f64], x: &[f64]) {
    let d_in = x.len();
    for (&gi, row) in g.iter().zip(gw.chunks_exact_mut(d_in)) {
        if gi != 0.0 {
            axpy(gi, x, row);
        }
    }
}

/// `y = W x + b` with `W: [d_out, d_in]`, `x: [d_in]`, `b: [d_out]`.
pub fn affine(x: &Tensor, w: &Tensor, b: &Tensor) -> Result<Tensor> {
    let (d_out, d_in) = affine_dims(x, w, b)?;
    x.check_finite("affine input")?;
    let mut y = b.data().to_vec();
    matvec_acc(w.data(), x.data(), &mut y);
    debug_assert_eq!(y.len(), d_out);
    let _ = d_in;
    Ok(Tensor::from_parts(vec![d_out], y))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AffineGrads {
    pub x: Tensor,
    pub w: Tensor,
    pub b: Tensor,
}

/// Gradients of `y = W x + b` given upstream `grad_out = dL/dy`.
pub fn affine_backward(x: &Tensor, w: &Tensor, grad_out: &Tensor) -> Result<AffineGrads> {
    let (d_out, d_in) = match w.shape() {
        [o, i] => (*o, *i),
        _ => return Err(shape_err("affine_backward", &[0, 0], w.shape())),
    };
    x.expect_shape("affine_backward", &[d_in])?;
    grad_out.expect_shape("affine_backward", &[d_out])?;
    let mut gx = vec![0.0; d_in];
    matvec_t_acc(w.data(), grad_out.data(), &mut gx);
    let mut gw = vec![0.0; d_out * d_in];
    add_outer(&mut gw, grad_out.data(), x.data());
    Ok(AffineGrads {
        x: Tensor::from_parts(vec![d_in], gx),
        w: Tensor::from_parts(vec![d_out, d_in], gw),
        b: grad_out.clone(),
    })
}

fn affine_dims(x: &Tensor, w: &Tensor, b: &Tensor) -> Result<(usize, usize)> {
    let (d_out, d_in) = match w.shape() {
        [o, i] => (*o, *i),
        other => return Err(shape_err("affine", &[b.len(), x.len()], other)),
    };
    x.expect_shape("affine", &[d_in])?;
    b.expect_shape("affine", &[d_out])?;
    Ok((d_out, d_in))
}

pub fn elementwise_mul(a: &Tensor, b: &Tensor) -> Result<Tensor> {
    b.expect_shape("elementwise_mul", a.shape())?;
    let data = a.data().iter().zip(b.data()).map(|(x, y)| x * y).collect();
    Ok(Tensor::from_parts(a.shape().to_vec(), data))
}

/// Returns `(dL/da, dL/db)` for `c = a ⊙ b`.
pub fn elementwise_mul_backward(
    a: &Tensor,
    b: &Tensor,
    grad_out: &Tensor,
) -> Result<(Tensor, Tensor)> {
    b.expect_shape("elementwise_mul_backward", a.shape())?;
    grad_out.expect_shape("elementwise_mul_backward", a.shape())?;
    let ga = elementwise_mul(grad_out, b)?;
    let gb = elementwise_mul(grad_out, a)?;
    Ok((ga, gb))
}

/// Column-wise mean of an `[n, d]` matrix. An empty matrix pools to zeros.
pub fn mean_pool(rows: &Tensor) -> Result<Tensor> {
    let (n, d) = match rows.shape() {
        [n, d] => (*n, *d),
        other => return Err(shape_err("mean_pool", &[0, 0], other)),
    };
    let mut out = vec![0.0; d];
    if n > 0 {
        for i in 0..n {
            axpy(1.0, rows.row(i), &mut out);
        }
        let inv = 1.0 / n as f64;
        out.iter_mut().for_each(|v| *v *= inv);
    }
    Ok(Tensor::from_parts(vec![d], out))
}

/// Each of the `n` input rows receives `grad_out / n`.
pub fn mean_pool_backward(n: usize, grad_out: &Tensor) -> Result<Tensor> {
    if grad_out.rank() != 1 {
        return Err(shape_err(
            "mean_pool_backward",
            &[grad_out.len()],
            grad_out.shape(),
        ));
    }
    let d = grad_out.len();
    if n == 0 {
        return Ok(Tensor::zeros(&[0, d]));
    }
    let share = 1.0 / n as f64;
    let row: Vec<f64> = grad_out.data().iter().map(|g| g * share).collect();
    let mut data = Vec::with_capacity(n * d);
    for _ in 0..n {
        data.extend_from_slice(&row);
    }
    Ok(Tensor::from_parts(vec![n, d], data))
}

pub(crate) fn shape_err(op: &'static str, expected: &[usize], actual: &[usize]) -> Error {
    Error::Shape {
        op,
        expected: expected.to_vec(),
        actual: actual.to_vec(),
    }
}
