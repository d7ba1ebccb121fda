use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::spec::{other, SynthSpec};
use crate::corpus::Party;
use crate::{Error, Result};

/// Best achievable accuracies on one evaluation pool.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleAccuracy {
    /// Sees the topic and the voter but not the sponsor.
    pub text_only: f64,
    /// Sees topic, voter and sponsor party.
    pub with_sponsor: f64,
    /// Yes rate of the pool.
    pub guess_yes: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    /// Rules fitted and evaluated on the training sessions.
    pub in_session: OracleAccuracy,
    /// Rules fitted on the training sessions, evaluated per other session.
    pub out_of_session: BTreeMap<String, OracleAccuracy>,
}

/// One cell of the generative table with its probability mass.
#[derive(Clone, Copy)]
struct Cell {
    topic: usize,
    sponsor: Party,
    voter: Party,
    mass: f64,
    clean: bool,
}

/// Cells of a pool of sessions, weighted by vote count.
fn cells(spec: &SynthSpec, sessions: &[usize]) -> Vec<Cell> {
    let total: f64 = sessions.iter().map(|&s| spec.seats(s) as f64).sum();
    let k = spec.topics as f64;
    let mut out = Vec::new();
    for &s in sessions {
        let majority = spec.sessions[s].majority;
        // each party holds half the seats
        let w = spec.seats(s) as f64 / total / (2.0 * k);
        for topic in 0..spec.topics {
            let q = spec.majority_sponsor_prob(topic, majority);
            for (sponsor, p) in [(majority, q), (other(majority), 1.0 - q)] {
                for voter in [Party::R, Party::D] {
                    let ideal = if voter == Party::R { 1.0 } else { -1.0 };
                    out.push(Cell {
                        topic,
                        sponsor,
                        voter,
                        mass: w * p,
                        clean: spec.clean_vote(topic, sponsor, ideal),
                    });
                }
            }
        }
    }
    out
}

/// Bayes decision per feature key, fitted on `train`. Ties predict yes.
fn fit_rule<K: Ord>(train: &[Cell], noise: f64, key: impl Fn(&Cell) -> K) -> BTreeMap<K, bool> {
    let mut mass: BTreeMap<K, (f64, f64)> = BTreeMap::new();
    for c in train {
        let e = mass.entry(key(c)).or_default();
        let p_yes = if c.clean { 1.0 - noise } else { noise };
        e.0 += c.mass * p_yes;
        e.1 += c.mass;
    }
    mass.into_iter()
        .filter(|(_, (_, m))| *m > 0.0)
        .map(|(k, (yes, m))| (k, yes / m >= 0.5 - 1e-12))
        .collect()
}

/// Accuracy of `rule` on `eval`; keys the rule never saw use `fallback`.
fn score<K: Ord>(
    rule: &BTreeMap<K, bool>,
    eval: &[Cell],
    noise: f64,
    key: impl Fn(&Cell) -> K,
    fallback: impl Fn(&Cell) -> bool,
) -> f64 {
    let total: f64 = eval.iter().map(|c| c.mass).sum();
    eval.iter()
        .map(|c| {
            let pred = rule.get(&key(c)).copied().unwrap_or_else(|| fallback(c));
            c.mass * if pred == c.clean { 1.0 - noise } else { noise }
        })
        .sum::<f64>()
        / total
}

fn evaluate(spec: &SynthSpec, train: &[Cell], eval: &[Cell]) -> OracleAccuracy {
    let n = spec.vote_noise;
    let text_key = |c: &Cell| (c.topic, c.voter);
    let full_key = |c: &Cell| (c.topic, c.voter, c.sponsor);
    let text = fit_rule(train, n, text_key);
    let full = fit_rule(train, n, full_key);
    let total: f64 = eval.iter().map(|c| c.mass).sum();
    let yes = eval
        .iter()
        .map(|c| c.mass * if c.clean { 1.0 - n } else { n })
        .sum::<f64>()
        / total;
    OracleAccuracy {
        // Unseen topics predict yes; an unseen sponsor for a known topic
        // backs off to the topic rule.
        text_only: score(&text, eval, n, text_key, |_| true),
        with_sponsor: score(&full, eval, n, full_key, |c| {
            text.get(&text_key(c)).copied().unwrap_or(true)
        }),
        guess_yes: yes,
    }
}

/// Exact Bayes-optimal accuracies by enumerating topic, sponsor party and
/// voter party. The text-only rule learned on `train_sessions` is what a
/// perfect topic reader would apply to later sessions.
pub fn oracle_accuracies(spec: &SynthSpec, train_sessions: &[String]) -> Result<OracleReport> {
    spec.validate()?;
    let index_of = |label: &str| {
        spec.sessions
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::config(format!("unknown session `{label}`")))
    };
    let train: Vec<usize> = train_sessions
        .iter()
        .map(|s| index_of(s))
        .collect::<Result<_>>()?;
    if train.is_empty() {
        return Err(Error::config("oracle needs at least one training session"));
    }
    let train_cells = cells(spec, &train);
    let in_session = evaluate(spec, &train_cells, &train_cells);
    let out_of_session = (0..spec.sessions.len())
        .filter(|s| !train.contains(s))
        .map(|s| {
            (
                spec.sessions[s].label.clone(),
                evaluate(spec, &train_cells, &cells(spec, &[s])),
            )
        })
        .collect();
    Ok(OracleReport {
        in_session,
        out_of_session,
    })
}
