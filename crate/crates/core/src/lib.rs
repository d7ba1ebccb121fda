//! Roll-call vote prediction with sponsor-aware bill representations.
//!
//! A legislator embedding and a projected bill embedding are compared
//! element-wise and squashed through a sigmoid to give `p(yes)`. Bills are
//! encoded from their text (mean word embedding or a 4-gram CNN), optionally
//! mixed per party with the fraction of Republican and Democratic sponsors.
//!
//! Layout:
//! - [`ndcore`]: tensors, forward/backward kernels, AdaMax, gradient checking
//! - [`corpus`]: JSONL ingestion, text preprocessing, vocabulary, splits
//! - [`encoder`]: text encoders and the sponsor mixing layer
//! - [`votemodel`]: the vote predictor and its training loop
//! - [`evalharness`]: cross-validation, out-of-session runs, baselines, reports
//! - [`synthgen`]: synthetic corpora with a controlled session shift
//! - [`cli`]: the `rollcall` command-line front end

pub mod cli;
pub mod corpus;
pub mod encoder;
mod error;
pub mod evalharness;
pub mod ndcore;
pub mod synthgen;
pub mod votemodel;

pub use error::{Error, Result};
