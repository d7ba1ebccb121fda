use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Version of the three-file JSONL input schema understood by [`parse_corpus`].
pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chamber {
    House,
    Senate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Party {
    R,
    D,
    I,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawBill {
    pub bill_id: String,
    pub session: String,
    pub chamber: Chamber,
    pub title: String,
    pub summary_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fulltext: Option<String>,
    pub sponsor_ids: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Legislator {
    pub legislator_id: String,
    pub party: Party,
    pub chamber: Chamber,
    /// Dense row in the legislator embedding matrix, assigned in id order.
    #[serde(default, skip_serializing)]
    pub row_index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VoteRecord {
    pub bill_id: String,
    pub legislator_id: String,
    #[serde(with = "outcome")]
    pub outcome: bool,
}

mod outcome {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(yes: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(if *yes { "yes" } else { "no" })
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match String::deserialize(d)?.as_str() {
            "yes" => Ok(true),
            "no" => Ok(false),
            other => Err(serde::de::Error::custom(format!(
                "outcome must be \"yes\" or \"no\", got {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CorpusPaths {
    pub bills: PathBuf,
    pub legislators: PathBuf,
    pub votes: PathBuf,
}

impl CorpusPaths {
    /// `bills.jsonl`, `legislators.jsonl` and `votes.jsonl` inside `dir`.
    pub fn in_dir(dir: &Path) -> Self {
        CorpusPaths {
            bills: dir.join("bills.jsonl"),
            legislators: dir.join("legislators.jsonl"),
            votes: dir.join("votes.jsonl"),
        }
    }
}

/// Parsed and reference-checked records, each list sorted by id.
#[derive(Clone, Debug, PartialEq)]
pub struct RawCorpus {
    pub bills: Vec<RawBill>,
    pub legislators: Vec<Legislator>,
    pub votes: Vec<VoteRecord>,
}

pub fn parse_corpus(paths: &CorpusPaths, schema_version: &str) -> Result<RawCorpus> {
    if schema_version != SCHEMA_VERSION {
        return Err(Error::config(format!(
            "unsupported corpus schema version `{schema_version}` (expected `{SCHEMA_VERSION}`)"
        )));
    }
    let bills: Vec<RawBill> = read_jsonl(&paths.bills)?;
    let legislators: Vec<Legislator> = read_jsonl(&paths.legislators)?;
    let votes: Vec<VoteRecord> = read_jsonl(&paths.votes)?;
    RawCorpus::from_records(bills, legislators, votes)
}

impl RawCorpus {
    /// Sorts, rejects duplicates, checks references and assigns legislator rows.
    pub fn from_records(
        mut bills: Vec<RawBill>,
        mut legislators: Vec<Legislator>,
        mut votes: Vec<VoteRecord>,
    ) -> Result<Self> {
        bills.sort_by(|a, b| a.bill_id.cmp(&b.bill_id));
        if let Some(w) = bills.windows(2).find(|w| w[0].bill_id == w[1].bill_id) {
            return Err(Error::DuplicateId {
                kind: "bill",
                id: w[0].bill_id.clone(),
            });
        }
        legislators.sort_by(|a, b| a.legislator_id.cmp(&b.legislator_id));
        if let Some(w) = legislators
            .windows(2)
            .find(|w| w[0].legislator_id == w[1].legislator_id)
        {
            return Err(Error::DuplicateId {
                kind: "legislator",
                id: w[0].legislator_id.clone(),
            });
        }
        for (row, leg) in legislators.iter_mut().enumerate() {
            leg.row_index = row;
        }
        votes.sort();
        if let Some(w) = votes
            .windows(2)
            .find(|w| w[0].bill_id == w[1].bill_id && w[0].legislator_id == w[1].legislator_id)
        {
            return Err(Error::DuplicateId {
                kind: "vote",
                id: format!("{}/{}", w[0].bill_id, w[0].legislator_id),
            });
        }

        let bill_ids: BTreeSet<&str> = bills.iter().map(|b| b.bill_id.as_str()).collect();
        let leg_ids: BTreeMap<&str, usize> = legislators
            .iter()
            .map(|l| (l.legislator_id.as_str(), l.row_index))
            .collect();
        for bill in &bills {
            for s in &bill.sponsor_ids {
                if !leg_ids.contains_key(s.as_str()) {
                    return Err(Error::DanglingReference {
                        from: format!("bill {}", bill.bill_id),
                        kind: "legislator",
                        id: s.clone(),
                    });
                }
            }
        }
        for v in &votes {
            if !bill_ids.contains(v.bill_id.as_str()) {
                return Err(Error::DanglingReference {
                    from: format!("vote by {}", v.legislator_id),
                    kind: "bill",
                    id: v.bill_id.clone(),
                });
            }
            if !leg_ids.contains_key(v.legislator_id.as_str()) {
                return Err(Error::DanglingReference {
                    from: format!("vote on {}", v.bill_id),
                    kind: "legislator",
                    id: v.legislator_id.clone(),
                });
            }
        }
        Ok(RawCorpus {
            bills,
            legislators,
            votes,
        })
    }
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| Error::Parse {
            file: path.display().to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

/// Writes the three JSONL files. Legislator rows are not serialized.
pub fn write_corpus(paths: &CorpusPaths, raw: &RawCorpus) -> Result<()> {
    write_jsonl(&paths.bills, &raw.bills)?;
    write_jsonl(&paths.legislators, &raw.legislators)?;
    write_jsonl(&paths.votes, &raw.votes)
}

/// Writes one JSON object per line.
fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let mut buf = Vec::new();
    for r in records {
        serde_json::to_writer(&mut buf, r)?;
        buf.push(b'\n');
    }
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}
