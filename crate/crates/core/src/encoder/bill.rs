use serde::{Deserialize, Serialize};

use super::mix::{check_fractions, mix_into};
use super::text::{encode_text, encode_text_backward, TextCache, TextEncoder, TextEncoderGrads};
use crate::corpus::PAD;
use crate::ndcore::{glorot_uniform, Grads, ParamStore, Rng, Tensor};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncoderKind {
    Mwe,
    Cnn,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncoderConfig {
    pub kind: EncoderKind,
    /// Mix party-specific copies by sponsor fractions.
    pub metadata: bool,
    /// Let both party copies read one embedding table (filters stay separate).
    pub shared_embeddings: bool,
    pub word_dim: usize,
    pub filters: usize,
    pub window: usize,
}

impl EncoderConfig {
    pub fn output_dim(&self) -> usize {
        match self.kind {
            EncoderKind::Mwe => self.word_dim,
            EncoderKind::Cnn => self.filters,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.word_dim == 0 {
            return Err(Error::config("word dimension must be positive"));
        }
        if self.kind == EncoderKind::Cnn && (self.filters == 0 || self.window == 0) {
            return Err(Error::config(
                "CNN needs at least one filter and a positive window",
            ));
        }
        Ok(())
    }
}

/// Which copy of the text representation a name set belongs to.
#[derive(Clone, Copy)]
struct Copy3 {
    emb: &'static str,
    filters: &'static str,
    bias: &'static str,
}

const PLAIN: Copy3 = Copy3 {
    emb: "enc.emb",
    filters: "enc.filters",
    bias: "enc.bias",
};
const REP: Copy3 = Copy3 {
    emb: "enc.r.emb",
    filters: "enc.r.filters",
    bias: "enc.r.bias",
};
const DEM: Copy3 = Copy3 {
    emb: "enc.d.emb",
    filters: "enc.d.filters",
    bias: "enc.d.bias",
};
const A_R: &str = "enc.a_r";
const A_D: &str = "enc.a_d";

/// Forward state kept for the backward pass.
#[derive(Clone, Debug)]
pub struct EncodeCache {
    pub output: Vec<f64>,
    p_r: f64,
    p_d: f64,
    /// Text-only: the single copy. Metadata: the Republican copy, absent when
    /// `p_r == 0` since it contributes nothing.
    first: Option<TextCache>,
    second: Option<TextCache>,
}

/// Bill encoder over parameters stored under fixed `enc.*` names.
#[derive(Clone, Debug, PartialEq)]
pub struct Encoder {
    config: EncoderConfig,
}

impl Encoder {
    pub fn new(config: EncoderConfig) -> Result<Self> {
        config.validate()?;
        Ok(Encoder { config })
    }

    pub fn config(&self) -> &EncoderConfig {
        &self.config
    }

    pub fn output_dim(&self) -> usize {
        self.config.output_dim()
    }

    fn copies(&self) -> (Copy3, Copy3) {
        let mut d = DEM;
        if self.config.shared_embeddings {
            d.emb = REP.emb;
        }
        (REP, d)
    }

    /// Every parameter name this encoder reads.
    pub fn param_names(&self) -> Vec<&'static str> {
        let cnn = self.config.kind == EncoderKind::Cnn;
        let mut names = Vec::new();
        let push_copy = |c: Copy3, names: &mut Vec<&'static str>| {
            if !names.contains(&c.emb) {
                names.push(c.emb);
            }
            if cnn {
                names.push(c.filters);
                names.push(c.bias);
            }
        };
        if self.config.metadata {
            let (r, d) = self.copies();
            push_copy(r, &mut names);
            push_copy(d, &mut names);
            names.push(A_R);
            names.push(A_D);
        } else {
            push_copy(PLAIN, &mut names);
        }
        names
    }

    /// Registers freshly initialized parameters. Each embedding copy starts
    /// from `table`; its padding row is frozen.
    pub fn init(&self, params: &mut ParamStore, table: &Tensor, rng: &mut Rng) -> Result<()> {
        if table.rank() != 2 || table.row_len() != self.config.word_dim {
            return Err(Error::Shape {
                op: "encoder init (embedding table)",
                expected: vec![table.rows(), self.config.word_dim],
                actual: table.shape().to_vec(),
            });
        }
        let mut add_copy = |c: Copy3, params: &mut ParamStore| -> Result<()> {
            if !params.contains(c.emb) {
                params.insert(c.emb, table.clone())?;
                params.freeze_row(c.emb, PAD as usize)?;
            }
            if self.config.kind == EncoderKind::Cnn {
                let (f, h, d) = (
                    self.config.filters,
                    self.config.window,
                    self.config.word_dim,
                );
                params.insert(c.filters, glorot_uniform(h * d, f * h, &[f, h * d], rng)?)?;
                params.insert(c.bias, Tensor::zeros(&[f]))?;
            }
            Ok(())
        };
        if self.config.metadata {
            let (r, d) = self.copies();
            add_copy(r, params)?;
            add_copy(d, params)?;
            let dim = self.output_dim();
            params.insert(A_R, Tensor::filled(&[dim], 1.0))?;
            params.insert(A_D, Tensor::filled(&[dim], 1.0))?;
        } else {
            add_copy(PLAIN, params)?;
        }
        Ok(())
    }

    fn view<'a>(&self, params: &'a ParamStore, c: Copy3) -> Result<TextEncoder<'a>> {
        let table = params.get(c.emb)?;
        Ok(match self.config.kind {
            EncoderKind::Mwe => TextEncoder::Mwe { table },
            EncoderKind::Cnn => TextEncoder::Cnn {
                table,
                filters: params.get(c.filters)?,
                bias: params.get(c.bias)?,
                window: self.config.window,
            },
        })
    }

    /// Computes `v_B`. Text-only encoders ignore the sponsor fractions.
    pub fn forward(
        &self,
        params: &ParamStore,
        tokens: &[u32],
        p_r: f64,
        p_d: f64,
    ) -> Result<EncodeCache> {
        if !self.config.metadata {
            let cache = encode_text(tokens, self.view(params, PLAIN)?)?;
            return Ok(EncodeCache {
                output: cache.output.clone(),
                p_r,
                p_d,
                first: Some(cache),
                second: None,
            });
        }
        check_fractions(p_r, p_d)?;
        let (r, d) = self.copies();
        let dim = self.output_dim();
        let a_r = params.get(A_R)?;
        let a_d = params.get(A_D)?;
        a_r.expect_shape("encoder forward (a_r)", &[dim])?;
        a_d.expect_shape("encoder forward (a_d)", &[dim])?;
        let first = if p_r != 0.0 {
            Some(encode_text(tokens, self.view(params, r)?)?)
        } else {
            None
        };
        let second = if p_d != 0.0 {
            Some(encode_text(tokens, self.view(params, d)?)?)
        } else {
            None
        };
        let zeros = vec![0.0; dim];
        let t_r = first.as_ref().map_or(&zeros[..], |c| &c.output[..]);
        let t_d = second.as_ref().map_or(&zeros[..], |c| &c.output[..]);
        let mut output = vec![0.0; dim];
        mix_into(t_r, t_d, a_r.data(), a_d.data(), p_r, p_d, &mut output);
        Ok(EncodeCache {
            output,
            p_r,
            p_d,
            first,
            second,
        })
    }

    /// Accumulates parameter gradients given `dL/dv_B`.
    pub fn backward(
        &self,
        params: &ParamStore,
        cache: &EncodeCache,
        grad_out: &[f64],
        grads: &mut Grads,
    ) -> Result<()> {
        let dim = self.output_dim();
        if grad_out.len() != dim {
            return Err(Error::Shape {
                op: "encoder backward",
                expected: vec![dim],
                actual: vec![grad_out.len()],
            });
        }
        if !self.config.metadata {
            let text = cache
                .first
                .as_ref()
                .ok_or_else(|| Error::config("encoder cache has no text state"))?;
            return self.text_backward(params, PLAIN, text, grad_out, grads);
        }
        let (r, d) = self.copies();
        let a_r = params.get(A_R)?.data();
        let a_d = params.get(A_D)?.data();
        let parties = [
            (r, A_R, a_r, cache.p_r, &cache.first),
            (d, A_D, a_d, cache.p_d, &cache.second),
        ];
        for (copy, a_name, a, p, text) in parties {
            let Some(text) = text else { continue };
            let ga = grads.get_mut(a_name)?.data_mut();
            for i in 0..dim {
                ga[i] += p * text.output[i] * grad_out[i];
            }
            let gt: Vec<f64> = (0..dim).map(|i| p * a[i] * grad_out[i]).collect();
            self.text_backward(params, copy, text, &gt, grads)?;
        }
        Ok(())
    }

    fn text_backward(
        &self,
        params: &ParamStore,
        c: Copy3,
        text: &TextCache,
        grad_out: &[f64],
        grads: &mut Grads,
    ) -> Result<()> {
        let view = self.view(params, c)?;
        match self.config.kind {
            EncoderKind::Mwe => {
                let table = grads.get_mut(c.emb)?;
                encode_text_backward(
                    text,
                    view,
                    grad_out,
                    TextEncoderGrads {
                        table,
                        filters: None,
                        bias: None,
                    },
                )
            }
            EncoderKind::Cnn => {
                let [table, filters, bias] = grads.get_disjoint_mut([c.emb, c.filters, c.bias])?;
                encode_text_backward(
                    text,
                    view,
                    grad_out,
                    TextEncoderGrads {
                        table,
                        filters: Some(filters),
                        bias: Some(bias),
                    },
                )
            }
        }
    }
}
