use super::{Rng, Tensor};
use crate::{Error, Result};

pub fn glorot_bound(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

/// I.i.d. draws from `U[-b, b]` with `b = sqrt(6 / (fan_in + fan_out))`.
pub fn glorot_uniform(
    fan_in: usize,
    fan_out: usize,
    shape: &[usize],
    rng: &mut Rng,
) -> Result<Tensor> {
    if fan_in == 0 || fan_out == 0 {
        return Err(Error::config(format!(
            "glorot_uniform needs positive fans, got fan_in={fan_in} fan_out={fan_out}"
        )));
    }
    let b = glorot_bound(fan_in, fan_out);
    Ok(uniform_tensor(shape, -b, b, rng))
}

pub fn uniform_tensor(shape: &[usize], lo: f64, hi: f64, rng: &mut Rng) -> Tensor {
    let len = shape.iter().product();
    let data = (0..len).map(|_| rng.uniform_range(lo, hi)).collect();
    Tensor::from_parts(shape.to_vec(), data)
}
