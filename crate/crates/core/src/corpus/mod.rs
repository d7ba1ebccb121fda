//! Legislative corpus: JSONL ingestion, filtering and text preprocessing,
//! vocabulary construction, and train/test partitioning.

mod build;
mod cache;
mod schema;
mod split;
mod text;
mod vocab;

pub use build::{
    compute_sponsor_fractions, filter_unanimous, Corpus, CorpusOptions, CorpusStats, FilterOutcome,
    ProcessedBill, SessionStats,
};
pub use cache::{load_corpus, save_corpus, CORPUS_SCHEMA};
pub use schema::{
    parse_corpus, write_corpus, Chamber, CorpusPaths, Legislator, Party, RawBill, RawCorpus,
    VoteRecord, SCHEMA_VERSION,
};
pub use split::{make_folds, out_of_session_split, FoldAssignment, SessionSplit};
pub use text::{
    percentile_cap, preprocess_text, tokenize, Stopwords, TruncationCaps, BUILTIN_STOPWORDS,
};
pub use vocab::{build_vocab, Bill, Vocab, OOV, PAD};
