//! Corpus invariants, shared by the property tests and the acceptance run.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use proptest::test_runner::TestCaseResult;
use rollcall::corpus::{
    filter_unanimous, make_folds, out_of_session_split, Chamber, Corpus, CorpusOptions, Legislator,
    Party, RawBill, RawCorpus, Stopwords, VoteRecord,
};

const WORDS: &[&str] = &[
    "Tax", "the", "school", "OF", "health", "and", "Bridge2", "roads", "a", "farm", "water",
];
const SEPARATORS: &[&str] = &[" ", ", ", "--", "\n", " (", ") "];
const SESSIONS: &[&str] = &["2005-2006", "2007-2008", "2009-2010"];

fn text(max_words: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec((0..WORDS.len(), 0..SEPARATORS.len()), 0..max_words).prop_map(|ws| {
        ws.into_iter()
            .map(|(w, s)| format!("{}{}", WORDS[w], SEPARATORS[s]))
            .collect()
    })
}

#[derive(Clone, Debug)]
pub struct Case {
    pub raw: RawCorpus,
    pub permutation_seed: u64,
}

/// Legislators with random parties, bills with random sponsors and text,
/// and a random subset of votes (each bill has at least one).
pub fn raw_corpus(long_text: bool, max_bills: usize) -> impl Strategy<Value = Case> {
    let (summary_words, full_words) = if long_text { (700, 2600) } else { (30, 60) };
    (2usize..9, 1..max_bills)
        .prop_flat_map(move |(n_leg, n_bill)| {
            let parties = proptest::collection::vec(0u8..3, n_leg);
            let bill = (
                0..SESSIONS.len(),
                text(summary_words),
                proptest::option::of(text(full_words)),
                proptest::collection::vec(any::<bool>(), n_leg),
                proptest::collection::vec(0u8..4, n_leg),
            );
            (
                parties,
                proptest::collection::vec(bill, n_bill),
                any::<u64>(),
            )
        })
        .prop_map(|(parties, bills, permutation_seed)| {
            let legislators: Vec<Legislator> = parties
                .iter()
                .enumerate()
                .map(|(i, p)| Legislator {
                    legislator_id: format!("L{i:02}"),
                    party: [Party::R, Party::D, Party::I][*p as usize],
                    chamber: Chamber::House,
                    row_index: 0,
                })
                .collect();
            let mut raw_bills = Vec::new();
            let mut votes = Vec::new();
            for (b, (session, summary, full, sponsors, ballots)) in bills.into_iter().enumerate() {
                let bill_id = format!("B{b:03}");
                raw_bills.push(RawBill {
                    bill_id: bill_id.clone(),
                    session: SESSIONS[session].into(),
                    chamber: Chamber::House,
                    title: String::new(),
                    summary_text: summary,
                    fulltext: full,
                    sponsor_ids: sponsors
                        .iter()
                        .enumerate()
                        .filter(|(_, s)| **s)
                        .map(|(i, _)| legislators[i].legislator_id.clone())
                        .collect(),
                });
                // 0 absent, 1 no, 2 and 3 yes; legislator 0 always votes.
                for (l, ballot) in ballots.into_iter().enumerate() {
                    let ballot = if l == 0 && ballot == 0 { 2 } else { ballot };
                    if ballot > 0 {
                        votes.push(VoteRecord {
                            bill_id: bill_id.clone(),
                            legislator_id: legislators[l].legislator_id.clone(),
                            outcome: ballot >= 2,
                        });
                    }
                }
            }
            Case {
                raw: RawCorpus::from_records(raw_bills, legislators, votes).unwrap(),
                permutation_seed,
            }
        })
}

/// Reference preprocessing: lowercase, split on anything that is not a
/// letter or digit, drop stopwords, keep the first `cap`.
fn reference_tokens(raw: &str, stop: &Stopwords, cap: usize) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in raw.chars().chain(std::iter::once(' ')) {
        if ch.is_alphanumeric() {
            cur.extend(ch.to_lowercase());
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    out.into_iter()
        .filter(|t| !stop.contains(t))
        .take(cap)
        .collect()
}

fn no_share(votes: &[VoteRecord], bill: &str) -> f64 {
    let cast: Vec<_> = votes.iter().filter(|v| v.bill_id == bill).collect();
    cast.iter().filter(|v| !v.outcome).count() as f64 / cast.len() as f64
}

fn permuted<T: Clone>(items: &[T], seed: u64) -> Vec<T> {
    let mut keyed: Vec<(u64, T)> = items
        .iter()
        .enumerate()
        .map(|(i, x)| {
            (
                (i as u64 + 1).wrapping_mul(seed | 1).rotate_left(17) ^ seed,
                x.clone(),
            )
        })
        .collect();
    keyed.sort_by_key(|(k, _)| *k);
    keyed.into_iter().map(|(_, x)| x).collect()
}

pub fn filter_keeps_exactly_the_contested_bills(case: &Case, threshold: f64) -> TestCaseResult {
    let raw = &case.raw;
    let out = filter_unanimous(&raw.bills, &raw.votes, threshold).unwrap();
    for b in &raw.bills {
        let share = no_share(&raw.votes, &b.bill_id);
        prop_assert_eq!(out.retained.contains(&b.bill_id), share >= threshold);
        prop_assert_eq!(out.dropped.contains(&b.bill_id), share < threshold);
    }
    let expected: Vec<&VoteRecord> = raw
        .votes
        .iter()
        .filter(|v| out.retained.contains(&v.bill_id))
        .collect();
    prop_assert_eq!(out.votes.iter().collect::<Vec<_>>(), expected);
    Ok(())
}

pub fn built_corpus_respects_filter_caps_and_fractions(case: &Case) -> TestCaseResult {
    let raw = case.raw.clone();
    let opts = CorpusOptions::default();
    let corpus = match Corpus::build(raw.clone(), &opts) {
        Ok(c) => c,
        Err(e) => return Err(TestCaseError::fail(e.to_string())),
    };
    let parties: BTreeMap<&str, Party> = raw
        .legislators
        .iter()
        .map(|l| (l.legislator_id.as_str(), l.party))
        .collect();
    for bill in corpus.bills.values() {
        prop_assert!(no_share(&corpus.votes, &bill.bill_id) >= 0.01);
        prop_assert!(bill.summary.len() <= 400);
        prop_assert!(bill.fulltext.as_ref().map_or(0, Vec::len) <= 2000);
        let source = raw
            .bills
            .iter()
            .find(|b| b.bill_id == bill.bill_id)
            .unwrap();
        prop_assert_eq!(
            &bill.summary,
            &reference_tokens(&source.summary_text, &opts.stopwords, 400)
        );
        let full = source
            .fulltext
            .as_ref()
            .map(|t| reference_tokens(t, &opts.stopwords, 2000));
        prop_assert_eq!(&bill.fulltext, &full);

        let n = source.sponsor_ids.len() as f64;
        let count = |p| {
            source
                .sponsor_ids
                .iter()
                .filter(|s| parties[s.as_str()] == p)
                .count() as f64
        };
        let (r, d) = if n == 0.0 {
            (0.0, 0.0)
        } else {
            (count(Party::R) / n, count(Party::D) / n)
        };
        prop_assert!(bill.p_r >= 0.0 && bill.p_d >= 0.0 && bill.p_r + bill.p_d <= 1.0 + 1e-12);
        prop_assert!((bill.p_r - r).abs() < 1e-15 && (bill.p_d - d).abs() < 1e-15);
    }
    for v in &corpus.votes {
        prop_assert!(corpus.bills.contains_key(&v.bill_id));
        prop_assert!(corpus.legislators.contains_key(&v.legislator_id));
    }
    for b in &raw.bills {
        let kept = corpus.bills.contains_key(&b.bill_id);
        prop_assert_eq!(kept, no_share(&raw.votes, &b.bill_id) >= 0.01);
    }
    Ok(())
}

pub fn build_ignores_input_order(case: &Case) -> TestCaseResult {
    let raw = &case.raw;
    let shuffled = RawCorpus::from_records(
        permuted(&raw.bills, case.permutation_seed),
        permuted(&raw.legislators, case.permutation_seed ^ 1),
        permuted(&raw.votes, case.permutation_seed ^ 2),
    )
    .unwrap();
    let opts = CorpusOptions::default();
    prop_assert_eq!(
        Corpus::build(raw.clone(), &opts).ok(),
        Corpus::build(shuffled, &opts).ok()
    );
    Ok(())
}

pub fn folds_partition_bills_within_each_session(
    case: &Case,
    k: usize,
    seed: u64,
) -> TestCaseResult {
    let opts = CorpusOptions {
        unanimity_threshold: 1e-9,
        ..CorpusOptions::default()
    };
    let Ok(corpus) = Corpus::build(case.raw.clone(), &opts) else {
        return Ok(());
    };
    let smallest = corpus
        .sessions()
        .iter()
        .map(|s| corpus.bills.values().filter(|b| &b.session == s).count())
        .min();
    if smallest.is_none_or(|n| n < k) {
        // Every session must be able to fill each fold.
        prop_assert!(make_folds(&corpus, k, seed).is_err());
        return Ok(());
    }
    let folds = make_folds(&corpus, k, seed).unwrap();
    prop_assert_eq!(
        folds.fold_of.keys().collect::<BTreeSet<_>>(),
        corpus.bills.keys().collect::<BTreeSet<_>>()
    );
    prop_assert!(folds.fold_of.values().all(|&f| f < k));
    let mut union = BTreeSet::new();
    for f in 0..k {
        let test = folds.test_bills(f);
        prop_assert!(union.is_disjoint(&test));
        union.extend(test.iter().cloned());
        let train: BTreeSet<&String> = corpus.bills.keys().filter(|b| !test.contains(*b)).collect();
        prop_assert!(train.iter().all(|b| !test.contains(*b)));
    }
    prop_assert_eq!(union.len(), corpus.bills.len());
    // Stratified: within a session fold sizes differ by at most one.
    for session in corpus.sessions() {
        let mut sizes = vec![0usize; k];
        for b in corpus.bills.values().filter(|b| b.session == session) {
            sizes[folds.fold_of[&b.bill_id]] += 1;
        }
        prop_assert!(
            sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1,
            "{:?}",
            sizes
        );
    }
    prop_assert_eq!(make_folds(&corpus, k, seed).unwrap(), folds);
    Ok(())
}

pub fn out_of_session_tests_only_known_legislators(case: &Case) -> TestCaseResult {
    let opts = CorpusOptions {
        unanimity_threshold: 1e-9,
        ..CorpusOptions::default()
    };
    let Ok(corpus) = Corpus::build(case.raw.clone(), &opts) else {
        return Ok(());
    };
    let train = vec![SESSIONS[0].to_string()];
    let test = vec![SESSIONS[1].to_string(), SESSIONS[2].to_string()];
    let split = out_of_session_split(&corpus, &train, &test).unwrap();
    let voters: BTreeSet<&str> = split
        .train_votes
        .iter()
        .map(|v| v.legislator_id.as_str())
        .collect();
    prop_assert!(split
        .test_votes
        .iter()
        .all(|v| voters.contains(v.legislator_id.as_str())));
    prop_assert!(split.train_bills.is_disjoint(&split.test_bills));
    let total_test = corpus
        .votes
        .iter()
        .filter(|v| split.test_bills.contains(&v.bill_id))
        .count();
    prop_assert_eq!(
        split.test_votes.len() + split.dropped_test_votes,
        total_test
    );
    Ok(())
}
