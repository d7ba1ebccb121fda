//! Deterministic numeric foundation: dense `f64` tensors, the forward and
//! backward kernels the vote models are built from, Glorot initialization,
//! AdaMax, finite-difference gradient checking and the checkpoint format.

mod checkpoint;
mod conv;
mod gradcheck;
mod init;
mod loss;
mod ops;
mod optim;
mod params;
mod rng;
mod tensor;

pub use checkpoint::{
    decode_checkpoint, encode_checkpoint, read_checkpoint, write_checkpoint, CHECKPOINT_FORMAT,
};
pub use conv::{conv1d_ngram, conv1d_ngram_backward, ConvGrads, ConvOutput};
pub(crate) use conv::{conv_backward_acc, conv_forward};
pub use gradcheck::{grad_check, CoordReport, GradCheckOptions, GradCheckReport};
pub use init::{glorot_bound, glorot_uniform, uniform_tensor};
pub use loss::{sigmoid, sigmoid_bce, BceOutput};
pub(crate) use ops::{add_outer, axpy, matvec_acc, matvec_t_acc};
pub use ops::{
    affine, affine_backward, elementwise_mul, elementwise_mul_backward, mean_pool,
    mean_pool_backward, AffineGrads,
};
pub use optim::{AdaMax, AdaMaxConfig};
pub use params::{Grads, Param, ParamStore};
pub use rng::{Rng, RngStream};
pub use tensor::Tensor;
