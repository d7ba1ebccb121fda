use crate::ndcore::Tensor;
use crate::{Error, Result};

/// `v_B = (p_r a_r) ⊙ T_r + (p_d a_d) ⊙ T_d`
///
/// Each party's gate vector is scaled by that party's sponsor share and
/// applied element-wise to that party's copy of the text encoding.
pub fn mix_sponsor(
    t_r: &Tensor,
    t_d: &Tensor,
    a_r: &Tensor,
    a_d: &Tensor,
    p_r: f64,
    p_d: f64,
) -> Result<Tensor> {
    let d = t_r.len();
    for t in [t_d, a_r, a_d] {
        t.expect_shape("mix_sponsor", &[d])?;
    }
    check_fractions(p_r, p_d)?;
    let mut out = vec![0.0; d];
    mix_into(
        t_r.data(),
        t_d.data(),
        a_r.data(),
        a_d.data(),
        p_r,
        p_d,
        &mut out,
    );
    Tensor::vector(out)
}

pub(crate) fn check_fractions(p_r: f64, p_d: f64) -> Result<()> {
    if p_r >= 0.0 && p_d >= 0.0 && p_r + p_d <= 1.0 + 1e-12 {
        Ok(())
    } else {
        Err(Error::config(format!(
            "invalid sponsor fractions ({p_r}, {p_d})"
        )))
    }
}

/// Evaluated per element as `(p_r * a_r) * t_r + (p_d * a_d) * t_d`, so
/// swapping the two parties' inputs yields bit-identical output.
pub(crate) fn mix_into(
    t_r: &[f64],
    t_d: &[f64],
    a_r: &[f64],
    a_d: &[f64],
    p_r: f64,
    p_d: f64,
    out: &mut [f64],
) {
    for i in 0..out.len() {
        out[i] = (p_r * a_r[i]) * t_r[i] + (p_d * a_d[i]) * t_d[i];
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixGrads {
    pub t_r: Tensor,
    pub t_d: Tensor,
    pub a_r: Tensor,
    pub a_d: Tensor,
}

pub fn mix_sponsor_backward(
    t_r: &Tensor,
    t_d: &Tensor,
    a_r: &Tensor,
    a_d: &Tensor,
    p_r: f64,
    p_d: f64,
    grad_out: &Tensor,
) -> Result<MixGrads> {
    let d = t_r.len();
    for t in [t_d, a_r, a_d, grad_out] {
        t.expect_shape("mix_sponsor_backward", &[d])?;
    }
    let g = grad_out.data();
    let part = |p: f64, other: &Tensor| -> Tensor {
        Tensor::vector(
            g.iter()
                .zip(other.data())
                .map(|(gi, o)| p * o * gi)
                .collect(),
        )
        .expect("finite")
    };
    Ok(MixGrads {
        t_r: part(p_r, a_r),
        t_d: part(p_d, a_d),
        a_r: part(p_r, t_r),
        a_d: part(p_d, t_d),
    })
}
