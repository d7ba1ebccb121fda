//! The vote predictor: a bill representation projected into the legislator
//! space, compared with a legislator embedding through a weighted
//! element-wise product, and squashed by a sigmoid. Also the mini-batch
//! training loop and model configuration files.

mod config;
mod gradient;
mod model;

pub use config::{Dims, ModelConfig, ModelKind, TextSource, TrainConfig, PRESETS};
pub use gradient::{check_gradients, micro_instance, MICRO_VOCAB};
pub use model::{
    legislator_order, project_bill, score, BatchStats, Dataset, EpochStats, Example, TrainHistory,
    VoteModel,
};
