//! Bill representations: mean-word-embedding and CNN text encoders, the
//! per-party sponsor mixing layer, and the constant dummy text used by the
//! metadata-only variant.

mod bill;
mod embedding;
mod mix;
mod text;

pub use bill::{EncodeCache, Encoder, EncoderConfig, EncoderKind};
pub use embedding::{load_pretrained, EMBEDDING_INIT_RANGE};
pub use mix::{mix_sponsor, mix_sponsor_backward, MixGrads};
pub use text::{
    dummy_tokens, encode_text, encode_text_backward, TextCache, TextEncoder, TextEncoderGrads,
};
