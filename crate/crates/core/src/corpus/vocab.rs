use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::ProcessedBill;
use crate::{Error, Result};

pub const PAD: u32 = 0;
pub const OOV: u32 = 1;
const PAD_TOKEN: &str = "<pad>";
const OOV_TOKEN: &str = "<oov>";

/// Token ↔ index map. Index 0 is padding, 1 is out-of-vocabulary, and real
/// tokens follow in sorted order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocab {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocab {
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let sorted: BTreeSet<String> = tokens
            .into_iter()
            .map(|t| t.as_ref().to_string())
            .filter(|t| t != PAD_TOKEN && t != OOV_TOKEN)
            .collect();
        let mut all = vec![PAD_TOKEN.to_string(), OOV_TOKEN.to_string()];
        all.extend(sorted);
        let index = all
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Vocab { tokens: all, index }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.len() <= 2
    }

    pub fn token(&self, index: u32) -> Option<&str> {
        self.tokens.get(index as usize).map(String::as_str)
    }

    /// Real tokens only (excludes padding and OOV), in index order.
    pub fn tokens(&self) -> &[String] {
        &self.tokens[2..]
    }

    pub fn lookup(&self, token: &str) -> u32 {
        self.index.get(token).copied().unwrap_or(OOV)
    }

    pub fn encode<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<u32> {
        tokens.iter().map(|t| self.lookup(t.as_ref())).collect()
    }

    pub fn index_bill(&self, bill: &ProcessedBill) -> Bill {
        Bill {
            bill_id: bill.bill_id.clone(),
            session: bill.session.clone(),
            summary_tokens: self.encode(&bill.summary),
            fulltext_tokens: bill.fulltext.as_ref().map(|t| self.encode(t)),
            p_r: bill.p_r,
            p_d: bill.p_d,
        }
    }
}

/// Builds the vocabulary from training bills (summaries and full texts).
pub fn build_vocab<'a>(train_bills: impl IntoIterator<Item = &'a ProcessedBill>) -> Vocab {
    let mut seen = BTreeSet::new();
    for bill in train_bills {
        seen.extend(bill.summary.iter().cloned());
        if let Some(ft) = &bill.fulltext {
            seen.extend(ft.iter().cloned());
        }
    }
    Vocab::from_tokens(seen)
}

/// A bill with its text mapped to vocabulary indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bill {
    pub bill_id: String,
    pub session: String,
    pub summary_tokens: Vec<u32>,
    pub fulltext_tokens: Option<Vec<u32>>,
    pub p_r: f64,
    pub p_d: f64,
}

impl Bill {
    pub fn validate(&self, vocab_len: usize) -> Result<()> {
        let all = self
            .summary_tokens
            .iter()
            .chain(self.fulltext_tokens.iter().flatten());
        for &t in all {
            if t as usize >= vocab_len {
                return Err(Error::OutOfRange {
                    what: "vocabulary",
                    index: t as usize,
                    size: vocab_len,
                });
            }
        }
        Ok(())
    }
}
