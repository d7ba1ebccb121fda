//! Synthetic roll-call corpora in which text reveals a bill's topic, the
//! sponsor's party carries its ideology, and which party sponsors each
//! topic depends on who holds the majority. Includes exact Bayes-optimal
//! accuracies for the generated distribution.

mod generate;
mod oracle;
mod spec;

pub use generate::{generate, generate_corpus, topic_word, write_synthetic};
pub use oracle::{oracle_accuracies, OracleAccuracy, OracleReport};
pub use spec::{SessionSpec, SynthSpec};
