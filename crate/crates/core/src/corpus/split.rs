use std::collections::{BTreeMap, BTreeSet};

use super::{Corpus, VoteRecord};
use crate::ndcore::{Rng, RngStream};
use crate::{Error, Result};

/// Bill-level fold assignment for cross-validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldAssignment {
    pub k: usize,
    pub fold_of: BTreeMap<String, usize>,
}

impl FoldAssignment {
    pub fn test_bills(&self, fold: usize) -> BTreeSet<String> {
        self.fold_of
            .iter()
            .filter(|(_, &f)| f == fold)
            .map(|(b, _)| b.clone())
            .collect()
    }

    pub fn train_bills(&self, fold: usize) -> BTreeSet<String> {
        self.fold_of
            .iter()
            .filter(|(_, &f)| f != fold)
            .map(|(b, _)| b.clone())
            .collect()
    }
}

/// Assigns each bill to one of `k` folds, stratified by session.
///
/// Within a session, bills are shuffled and dealt round-robin; the deal
/// continues across sessions so fold sizes also stay within one overall.
pub fn make_folds(corpus: &Corpus, k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::config(format!("need at least 2 folds, got {k}")));
    }
    if corpus.bills.is_empty() {
        return Err(Error::Empty(
            "corpus has no bills to split into folds".into(),
        ));
    }
    let mut by_session: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for b in corpus.bills.values() {
        by_session
            .entry(b.session.as_str())
            .or_default()
            .push(b.bill_id.as_str());
    }
    let mut rng = Rng::stream(seed, RngStream::Folds);
    let mut fold_of = BTreeMap::new();
    let mut offset = 0;
    for (session, mut ids) in by_session {
        if ids.len() < k {
            return Err(Error::config(format!(
                "session {session} has {} bills, fewer than k = {k}",
                ids.len()
            )));
        }
        ids.sort_unstable();
        rng.shuffle(&mut ids);
        for (i, id) in ids.iter().enumerate() {
            fold_of.insert(id.to_string(), (offset + i) % k);
        }
        offset += ids.len();
    }
    Ok(FoldAssignment { k, fold_of })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SessionSplit {
    pub train_bills: BTreeSet<String>,
    pub test_bills: BTreeSet<String>,
    pub train_votes: Vec<VoteRecord>,
    /// Test votes cast by legislators who also vote in the training sessions.
    pub test_votes: Vec<VoteRecord>,
    pub dropped_test_votes: usize,
    pub train_legislators: BTreeSet<String>,
}

pub fn out_of_session_split(
    corpus: &Corpus,
    train_sessions: &[String],
    test_sessions: &[String],
) -> Result<SessionSplit> {
    if train_sessions.is_empty() || test_sessions.is_empty() {
        return Err(Error::config(
            "train and test session sets must be nonempty",
        ));
    }
    let train: BTreeSet<&str> = train_sessions.iter().map(String::as_str).collect();
    let test: BTreeSet<&str> = test_sessions.iter().map(String::as_str).collect();
    if let Some(s) = train.intersection(&test).next() {
        return Err(Error::config(format!(
            "session {s} is in both train and test sets"
        )));
    }
    let in_sessions = |set: &BTreeSet<&str>| -> BTreeSet<String> {
        corpus
            .bills
            .values()
            .filter(|b| set.contains(b.session.as_str()))
            .map(|b| b.bill_id.clone())
            .collect()
    };
    let train_bills = in_sessions(&train);
    let test_bills = in_sessions(&test);
    let train_votes: Vec<VoteRecord> = corpus
        .votes
        .iter()
        .filter(|v| train_bills.contains(&v.bill_id))
        .cloned()
        .collect();
    let train_legislators: BTreeSet<String> = train_votes
        .iter()
        .map(|v| v.legislator_id.clone())
        .collect();
    let (test_votes, dropped): (Vec<VoteRecord>, Vec<VoteRecord>) = corpus
        .votes
        .iter()
        .filter(|v| test_bills.contains(&v.bill_id))
        .cloned()
        .partition(|v| train_legislators.contains(&v.legislator_id));
    if test_votes.is_empty() {
        log::warn!("out-of-session test set is empty after legislator filtering");
    }
    Ok(SessionSplit {
        train_bills,
        test_bills,
        train_votes,
        test_votes,
        dropped_test_votes: dropped.len(),
        train_legislators,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Chamber, Legislator, Party, ProcessedBill};

    fn corpus(sessions: &[(&str, usize)], voters: &[(&str, &[&str])]) -> Corpus {
        let mut bills = Vec::new();
        for (s, n) in sessions {
            for i in 0..*n {
                bills.push(ProcessedBill {
                    bill_id: format!("{s}-{i:02}"),
                    session: s.to_string(),
                    chamber: Chamber::House,
                    summary: vec![],
                    fulltext: None,
                    p_r: 0.0,
                    p_d: 0.0,
                });
            }
        }
        let mut legs = BTreeSet::new();
        let mut votes = Vec::new();
        for (leg, in_sessions) in voters {
            legs.insert(leg.to_string());
            for b in &bills {
                if in_sessions.contains(&b.session.as_str()) {
                    votes.push(VoteRecord {
                        bill_id: b.bill_id.clone(),
                        legislator_id: leg.to_string(),
                        outcome: true,
                    });
                }
            }
        }
        let legislators = legs
            .into_iter()
            .map(|id| Legislator {
                legislator_id: id,
                party: Party::D,
                chamber: Chamber::House,
                row_index: 0,
            })
            .collect();
        Corpus::from_parts(bills, legislators, votes).unwrap()
    }

    #[test]
    fn ten_bills_five_folds() {
        let c = corpus(&[("s1", 10)], &[]);
        let folds = make_folds(&c, 5, 1).unwrap();
        let mut union = BTreeSet::new();
        for f in 0..5 {
            let t = folds.test_bills(f);
            assert_eq!(t.len(), 2);
            assert!(union.is_disjoint(&t));
            union.extend(t);
        }
        assert_eq!(union.len(), 10);
        assert_eq!(folds, make_folds(&c, 5, 1).unwrap());
    }

    // Exhaustive check on the tiny instance: every fold gets exactly two
    // bills from each session.
    #[test]
    fn stratified_by_session() {
        let c = corpus(&[("s1", 10), ("s2", 10)], &[]);
        for seed in 0..20 {
            let folds = make_folds(&c, 5, seed).unwrap();
            for f in 0..5 {
                let t = folds.test_bills(f);
                assert_eq!(t.iter().filter(|b| b.starts_with("s1")).count(), 2);
                assert_eq!(t.iter().filter(|b| b.starts_with("s2")).count(), 2);
            }
        }
    }

    #[test]
    fn fold_errors() {
        let c = corpus(&[("s1", 10), ("s2", 3)], &[]);
        assert!(make_folds(&c, 5, 0).is_err());
        assert!(make_folds(&c, 1, 0).is_err());
    }

    #[test]
    fn new_legislators_dropped_from_test() {
        let c = corpus(
            &[("old", 3), ("new", 3)],
            &[("veteran", &["old", "new"]), ("freshman", &["new"])],
        );
        let split = out_of_session_split(&c, &["old".into()], &["new".into()]).unwrap();
        assert_eq!(split.train_votes.len(), 3);
        assert_eq!(split.test_votes.len(), 3);
        assert!(split
            .test_votes
            .iter()
            .all(|v| v.legislator_id == "veteran"));
        assert_eq!(split.dropped_test_votes, 3);
    }

    #[test]
    fn disjoint_voters_give_empty_test() {
        let c = corpus(
            &[("old", 2), ("new", 2)],
            &[("a", &["old"]), ("b", &["new"])],
        );
        let split = out_of_session_split(&c, &["old".into()], &["new".into()]).unwrap();
        assert!(split.test_votes.is_empty());
    }

    #[test]
    fn overlapping_sessions_rejected() {
        let c = corpus(&[("old", 2)], &[]);
        assert!(out_of_session_split(&c, &["old".into()], &["old".into()]).is_err());
        assert!(out_of_session_split(&c, &[], &["old".into()]).is_err());
    }
}
