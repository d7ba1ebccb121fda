use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::linear::LinearBaseline;
use super::metrics::{accuracy, count_correct};
use crate::corpus::{build_vocab, make_folds, out_of_session_split, Corpus, VoteRecord};
use crate::votemodel::{Dataset, ModelConfig, ModelKind, TrainHistory, VoteModel};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Setting {
    InSession,
    OutOfSession,
}

impl Setting {
    pub fn as_str(self) -> &'static str {
        match self {
            Setting::InSession => "in_session",
            Setting::OutOfSession => "out_of_session",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub model: String,
    pub setting: Setting,
    pub split: String,
    pub votes: usize,
    pub accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestBlock {
    pub label: String,
    pub sessions: Vec<String>,
}

/// Experiment description file: which sessions feed each protocol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Experiment {
    /// Sessions used for cross-validation; all sessions when absent.
    pub sessions: Option<Vec<String>>,
    pub folds: usize,
    pub fold_seed: u64,
    /// Split label for the cross-validation row; derived from the sessions
    /// when absent.
    pub label: Option<String>,
    pub train_sessions: Vec<String>,
    pub test_blocks: Vec<TestBlock>,
}

impl Default for Experiment {
    fn default() -> Self {
        Experiment {
            sessions: None,
            folds: 5,
            fold_seed: 0,
            label: None,
            train_sessions: Vec::new(),
            test_blocks: Vec::new(),
        }
    }
}

impl Experiment {
    pub fn from_file(path: &std::path::Path) -> Result<Experiment> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            file: path.display().to_string(),
            line: e.line(),
            message: e.to_string(),
        })
    }
}

/// A fitted model of any kind.
#[derive(Clone, Debug)]
pub enum Fitted {
    GuessYes,
    Linear(LinearBaseline),
    Neural(VoteModel),
}

impl Fitted {
    pub fn predict(&self, data: &Dataset) -> Result<Vec<f64>> {
        match self {
            Fitted::GuessYes => Ok(vec![1.0; data.len()]),
            Fitted::Linear(m) => m.predict_dataset(data),
            Fitted::Neural(m) => m.predict_dataset(data),
        }
    }
}

/// Trains `config` on `train_votes`. The vocabulary comes from the bills
/// those votes touch.
pub fn fit(
    config: &ModelConfig,
    corpus: &Corpus,
    train_votes: &[VoteRecord],
) -> Result<(Fitted, TrainHistory, crate::corpus::Vocab)> {
    let bill_ids: BTreeSet<&str> = train_votes.iter().map(|v| v.bill_id.as_str()).collect();
    let bills = bill_ids
        .iter()
        .map(|id| corpus.bill(id))
        .collect::<Result<Vec<_>>>()?;
    let vocab = build_vocab(bills);
    let data = Dataset::from_votes(corpus, &vocab, train_votes)?;
    let (fitted, history) = match config.kind {
        ModelKind::GuessYes => (Fitted::GuessYes, TrainHistory::default()),
        ModelKind::Linear => {
            let mut m =
                LinearBaseline::init(config.clone(), vocab.len(), corpus.num_legislators())?;
            let h = m.train(&data)?;
            (Fitted::Linear(m), h)
        }
        ModelKind::Neural => {
            let mut m = VoteModel::for_corpus(config.clone(), vocab.clone(), corpus)?;
            let h = m.train(&data)?;
            (Fitted::Neural(m), h)
        }
    };
    Ok((fitted, history, vocab))
}

fn evaluate(
    fitted: &Fitted,
    corpus: &Corpus,
    vocab: &crate::corpus::Vocab,
    votes: &[VoteRecord],
) -> Result<usize> {
    let data = Dataset::from_votes(corpus, vocab, votes)?;
    Ok(count_correct(&fitted.predict(&data)?, &data.labels()))
}

fn session_label(sessions: &[String]) -> String {
    match (sessions.first(), sessions.last()) {
        (Some(a), Some(b)) if a != b => format!("{a}..{b}"),
        (Some(a), _) => a.clone(),
        _ => "none".into(),
    }
}

/// k-fold cross-validation over bills; accuracy is pooled over all held-out
/// votes (a vote-weighted mean of the fold accuracies).
pub fn run_in_session_cv(
    corpus: &Corpus,
    config: &ModelConfig,
    experiment: &Experiment,
) -> Result<EvalResult> {
    let sessions = experiment
        .sessions
        .clone()
        .unwrap_or_else(|| corpus.sessions());
    let scoped = corpus.restrict_sessions(&sessions);
    let folds = make_folds(&scoped, experiment.folds, experiment.fold_seed)?;
    let (mut correct, mut total) = (0usize, 0usize);
    for fold in 0..folds.k {
        let test = folds.test_bills(fold);
        let (test_votes, train_votes): (Vec<VoteRecord>, Vec<VoteRecord>) = scoped
            .votes
            .iter()
            .cloned()
            .partition(|v| test.contains(&v.bill_id));
        if test_votes.is_empty() {
            continue;
        }
        if train_votes.is_empty() {
            return Err(Error::Empty(format!("training votes for fold {fold}")));
        }
        let (fitted, _, vocab) = fit(config, &scoped, &train_votes)?;
        correct += evaluate(&fitted, &scoped, &vocab, &test_votes)?;
        total += test_votes.len();
        log::info!(
            "{} fold {fold}: {}/{} correct so far",
            config.name,
            correct,
            total
        );
    }
    if total == 0 {
        return Err(Error::Empty("cross-validation test votes".into()));
    }
    Ok(EvalResult {
        model: config.name.clone(),
        setting: Setting::InSession,
        split: experiment
            .label
            .clone()
            .unwrap_or_else(|| session_label(&sessions)),
        votes: total,
        accuracy: correct as f64 / total as f64,
    })
}

/// Trains once on `train_sessions`, then scores each test block after
/// dropping votes by legislators unseen in training.
pub fn run_out_of_session(
    corpus: &Corpus,
    config: &ModelConfig,
    experiment: &Experiment,
) -> Result<Vec<EvalResult>> {
    if experiment.train_sessions.is_empty() || experiment.test_blocks.is_empty() {
        return Err(Error::config(
            "out-of-session evaluation needs train_sessions and test_blocks",
        ));
    }
    let splits = experiment
        .test_blocks
        .iter()
        .map(|b| out_of_session_split(corpus, &experiment.train_sessions, &b.sessions))
        .collect::<Result<Vec<_>>>()?;
    let (fitted, _, vocab) = fit(config, corpus, &splits[0].train_votes)?;
    let mut results = Vec::new();
    for (block, split) in experiment.test_blocks.iter().zip(&splits) {
        if split.test_votes.is_empty() {
            return Err(Error::Empty(format!(
                "test block `{}` after legislator filtering",
                block.label
            )));
        }
        let data = Dataset::from_votes(corpus, &vocab, &split.test_votes)?;
        let acc = accuracy(&fitted.predict(&data)?, &data.labels())?;
        results.push(EvalResult {
            model: config.name.clone(),
            setting: Setting::OutOfSession,
            split: block.label.clone(),
            votes: data.len(),
            accuracy: acc,
        });
    }
    Ok(results)
}
