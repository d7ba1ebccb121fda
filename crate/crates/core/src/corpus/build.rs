use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::schema::{Chamber, Legislator, Party, RawBill, RawCorpus, VoteRecord};
use super::text::{percentile_cap, preprocess_text, Stopwords, TruncationCaps};
use crate::{Error, Result};

/// A bill after sponsor resolution and text preprocessing. Tokens are kept
/// as strings; indices are assigned per experiment by a training-only
/// [`Vocab`](super::Vocab).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessedBill {
    pub bill_id: String,
    pub session: String,
    pub chamber: Chamber,
    pub summary: Vec<String>,
    pub fulltext: Option<Vec<String>>,
    pub p_r: f64,
    pub p_d: f64,
}

#[derive(Clone, Debug)]
pub struct CorpusOptions {
    pub stopwords: Stopwords,
    pub caps: TruncationCaps,
    /// When set, replaces `caps` with this percentile of the tokenized lengths.
    pub percentile_caps: Option<f64>,
    pub unanimity_threshold: f64,
    /// Allowed session labels; `None` accepts any.
    pub sessions: Option<BTreeSet<String>>,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions {
            stopwords: Stopwords::builtin(),
            caps: TruncationCaps::default(),
            percentile_caps: None,
            unanimity_threshold: 0.01,
            sessions: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SessionStats {
    pub bills: usize,
    pub votes: usize,
    pub yes_votes: usize,
}

impl SessionStats {
    pub fn yes_rate(&self) -> f64 {
        if self.votes == 0 {
            0.0
        } else {
            self.yes_votes as f64 / self.votes as f64
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub bills_parsed: usize,
    pub bills_dropped_unanimous: usize,
    pub votes_parsed: usize,
    pub caps: Option<TruncationCaps>,
    pub stopwords_sha256: Option<String>,
    /// Retained bills and votes per session.
    pub sessions: BTreeMap<String, SessionStats>,
}

/// Immutable processed corpus. Maps are keyed by id; votes are sorted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub bills: BTreeMap<String, ProcessedBill>,
    pub legislators: BTreeMap<String, Legislator>,
    pub votes: Vec<VoteRecord>,
    pub stats: CorpusStats,
}

pub struct FilterOutcome {
    pub retained: BTreeSet<String>,
    pub dropped: BTreeSet<String>,
    pub votes: Vec<VoteRecord>,
}

/// Keeps a bill iff its share of cast "no" votes is at least `threshold`.
pub fn filter_unanimous(
    bills: &[RawBill],
    votes: &[VoteRecord],
    threshold: f64,
) -> Result<FilterOutcome> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::config(format!(
            "unanimity threshold must be in (0, 1), got {threshold}"
        )));
    }
    let mut tally: BTreeMap<&str, (usize, usize)> =
        bills.iter().map(|b| (b.bill_id.as_str(), (0, 0))).collect();
    for v in votes {
        if let Some(t) = tally.get_mut(v.bill_id.as_str()) {
            t.0 += 1;
            if !v.outcome {
                t.1 += 1;
            }
        }
    }
    let mut retained = BTreeSet::new();
    let mut dropped = BTreeSet::new();
    for (id, (total, no)) in tally {
        if total == 0 {
            return Err(Error::Empty(format!(
                "bill {id} has no votes; cannot apply unanimity filter"
            )));
        }
        if no as f64 / total as f64 >= threshold {
            retained.insert(id.to_string());
        } else {
            dropped.insert(id.to_string());
        }
    }
    let votes = votes
        .iter()
        .filter(|v| retained.contains(&v.bill_id))
        .cloned()
        .collect();
    Ok(FilterOutcome {
        retained,
        dropped,
        votes,
    })
}

/// `(p_r, p_d)`: shares of Republican and Democratic sponsors. Independents
/// count toward neither; an empty list gives `(0, 0)`.
pub fn compute_sponsor_fractions(
    sponsor_ids: &[String],
    legislators: &BTreeMap<String, Legislator>,
) -> Result<(f64, f64)> {
    if sponsor_ids.is_empty() {
        return Ok((0.0, 0.0));
    }
    let (mut r, mut d) = (0usize, 0usize);
    for id in sponsor_ids {
        let leg = legislators
            .get(id)
            .ok_or_else(|| Error::DanglingReference {
                from: "sponsor list".into(),
                kind: "legislator",
                id: id.clone(),
            })?;
        match leg.party {
            Party::R => r += 1,
            Party::D => d += 1,
            Party::I => {}
        }
    }
    let n = sponsor_ids.len() as f64;
    Ok((r as f64 / n, d as f64 / n))
}

impl Corpus {
    pub fn build(raw: RawCorpus, opts: &CorpusOptions) -> Result<Corpus> {
        if let Some(allowed) = &opts.sessions {
            if let Some(b) = raw.bills.iter().find(|b| !allowed.contains(&b.session)) {
                return Err(Error::config(format!(
                    "bill {} has session `{}` outside the configured set",
                    b.bill_id, b.session
                )));
            }
        }
        let legislators: BTreeMap<String, Legislator> = raw
            .legislators
            .iter()
            .map(|l| (l.legislator_id.clone(), l.clone()))
            .collect();

        let filtered = filter_unanimous(&raw.bills, &raw.votes, opts.unanimity_threshold)?;

        // (bill, summary tokens, full-text tokens) before truncation.
        type Tokenized<'a> = (&'a RawBill, Vec<String>, Option<Vec<String>>);
        let tokenized: Vec<Tokenized> = raw
            .bills
            .iter()
            .filter(|b| filtered.retained.contains(&b.bill_id))
            .map(|b| {
                let summary = preprocess_text(&b.summary_text, &opts.stopwords, usize::MAX);
                let fulltext = b
                    .fulltext
                    .as_ref()
                    .map(|t| preprocess_text(t, &opts.stopwords, usize::MAX));
                (b, summary, fulltext)
            })
            .collect();

        let caps = match opts.percentile_caps {
            None => opts.caps,
            Some(q) => {
                let s: Vec<usize> = tokenized.iter().map(|t| t.1.len()).collect();
                let f: Vec<usize> = tokenized
                    .iter()
                    .filter_map(|t| t.2.as_ref().map(Vec::len))
                    .collect();
                TruncationCaps {
                    summary: percentile_cap(&s, q),
                    fulltext: percentile_cap(&f, q),
                }
            }
        };

        let mut bills = BTreeMap::new();
        for (raw_bill, mut summary, mut fulltext) in tokenized {
            summary.truncate(caps.summary);
            if let Some(ft) = fulltext.as_mut() {
                ft.truncate(caps.fulltext);
            }
            let (p_r, p_d) = compute_sponsor_fractions(&raw_bill.sponsor_ids, &legislators)?;
            bills.insert(
                raw_bill.bill_id.clone(),
                ProcessedBill {
                    bill_id: raw_bill.bill_id.clone(),
                    session: raw_bill.session.clone(),
                    chamber: raw_bill.chamber,
                    summary,
                    fulltext,
                    p_r,
                    p_d,
                },
            );
        }

        let mut stats = CorpusStats {
            bills_parsed: raw.bills.len(),
            bills_dropped_unanimous: filtered.dropped.len(),
            votes_parsed: raw.votes.len(),
            caps: Some(caps),
            stopwords_sha256: Some(opts.stopwords.sha256().to_string()),
            sessions: BTreeMap::new(),
        };
        fill_session_stats(&mut stats, &bills, &filtered.votes);
        Ok(Corpus {
            bills,
            legislators,
            votes: filtered.votes,
            stats,
        })
    }

    /// Assembles a corpus from already-processed records, checking references.
    pub fn from_parts(
        bills: Vec<ProcessedBill>,
        legislators: Vec<Legislator>,
        votes: Vec<VoteRecord>,
    ) -> Result<Corpus> {
        let raw_bills: Vec<RawBill> = bills
            .iter()
            .map(|b| RawBill {
                bill_id: b.bill_id.clone(),
                session: b.session.clone(),
                chamber: b.chamber,
                title: String::new(),
                summary_text: String::new(),
                fulltext: None,
                sponsor_ids: Vec::new(),
            })
            .collect();
        let raw = RawCorpus::from_records(raw_bills, legislators, votes)?;
        let bills: BTreeMap<String, ProcessedBill> =
            bills.into_iter().map(|b| (b.bill_id.clone(), b)).collect();
        for b in bills.values() {
            if !(b.p_r >= 0.0 && b.p_d >= 0.0 && b.p_r + b.p_d <= 1.0 + 1e-12) {
                return Err(Error::config(format!(
                    "bill {} has invalid sponsor fractions",
                    b.bill_id
                )));
            }
        }
        let mut stats = CorpusStats {
            bills_parsed: bills.len(),
            votes_parsed: raw.votes.len(),
            ..Default::default()
        };
        fill_session_stats(&mut stats, &bills, &raw.votes);
        Ok(Corpus {
            bills,
            legislators: raw
                .legislators
                .into_iter()
                .map(|l| (l.legislator_id.clone(), l))
                .collect(),
            votes: raw.votes,
            stats,
        })
    }

    pub fn sessions(&self) -> Vec<String> {
        self.bills
            .values()
            .map(|b| b.session.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn num_legislators(&self) -> usize {
        self.legislators.len()
    }

    pub fn legislator_row(&self, id: &str) -> Result<usize> {
        self.legislators
            .get(id)
            .map(|l| l.row_index)
            .ok_or_else(|| Error::DanglingReference {
                from: "lookup".into(),
                kind: "legislator",
                id: id.to_string(),
            })
    }

    pub fn bill(&self, id: &str) -> Result<&ProcessedBill> {
        self.bills.get(id).ok_or_else(|| Error::DanglingReference {
            from: "lookup".into(),
            kind: "bill",
            id: id.to_string(),
        })
    }

    /// Same legislators (so embedding rows are stable), bills and votes
    /// restricted to `sessions`.
    pub fn restrict_sessions(&self, sessions: &[String]) -> Corpus {
        let keep: BTreeSet<&str> = sessions.iter().map(String::as_str).collect();
        let bills: BTreeMap<String, ProcessedBill> = self
            .bills
            .iter()
            .filter(|(_, b)| keep.contains(b.session.as_str()))
            .map(|(k, b)| (k.clone(), b.clone()))
            .collect();
        let votes: Vec<VoteRecord> = self
            .votes
            .iter()
            .filter(|v| bills.contains_key(&v.bill_id))
            .cloned()
            .collect();
        let mut stats = CorpusStats {
            bills_parsed: bills.len(),
            votes_parsed: votes.len(),
            caps: self.stats.caps,
            stopwords_sha256: self.stats.stopwords_sha256.clone(),
            ..Default::default()
        };
        fill_session_stats(&mut stats, &bills, &votes);
        Corpus {
            bills,
            legislators: self.legislators.clone(),
            votes,
            stats,
        }
    }

    pub fn yes_rate(&self) -> f64 {
        if self.votes.is_empty() {
            return 0.0;
        }
        self.votes.iter().filter(|v| v.outcome).count() as f64 / self.votes.len() as f64
    }

    /// Re-establishes derived state after deserialization.
    pub(crate) fn reindex(&mut self) {
        for (row, leg) in self.legislators.values_mut().enumerate() {
            leg.row_index = row;
        }
    }
}

fn fill_session_stats(
    stats: &mut CorpusStats,
    bills: &BTreeMap<String, ProcessedBill>,
    votes: &[VoteRecord],
) {
    stats.sessions.clear();
    for b in bills.values() {
        stats.sessions.entry(b.session.clone()).or_default().bills += 1;
    }
    for v in votes {
        if let Some(b) = bills.get(&v.bill_id) {
            let s = stats.sessions.entry(b.session.clone()).or_default();
            s.votes += 1;
            if v.outcome {
                s.yes_votes += 1;
            }
        }
    }
}
