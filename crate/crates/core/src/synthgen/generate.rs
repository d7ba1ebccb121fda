use std::path::Path;

use super::spec::{other, SynthSpec};
use crate::corpus::{
    write_corpus, Chamber, Corpus, CorpusOptions, CorpusPaths, Legislator, Party, RawBill,
    RawCorpus, VoteRecord,
};
use crate::ndcore::{Rng, RngStream};
use crate::Result;

const FILLER: &[&str] = &["the", "of", "and", "to", "for"];

/// Token `j` of topic `t`'s private vocabulary.
pub fn topic_word(topic: usize, j: usize) -> String {
    format!("t{topic}w{j:02}")
}

fn generic_word(j: usize) -> String {
    format!("g{j:03}")
}

struct Member {
    id: String,
    party: Party,
    ideal: f64,
}

fn members(prefix: &str, count: usize, jitter: f64, rng: &mut Rng) -> Vec<Member> {
    let mut out = Vec::with_capacity(2 * count);
    for party in [Party::R, Party::D] {
        let sign = if party == Party::R { 1.0 } else { -1.0 };
        for i in 0..count {
            out.push(Member {
                id: format!("{party:?}{prefix}{i:03}"),
                party,
                ideal: sign + rng.uniform_range(-jitter, jitter),
            });
        }
    }
    out
}

/// Draws a complete raw corpus. Output is a pure function of the spec.
pub fn generate(spec: &SynthSpec) -> Result<RawCorpus> {
    spec.validate()?;
    let mut rng = Rng::stream(spec.seed, RngStream::Synth);
    let base = members(
        "",
        spec.legislators_per_party,
        spec.ideal_point_jitter,
        &mut rng,
    );
    let mut legislators: Vec<Legislator> = base.iter().map(legislator).collect();
    let mut bills = Vec::new();
    let mut votes = Vec::new();

    for (s_idx, session) in spec.sessions.iter().enumerate() {
        let newcomers = if s_idx > 0 {
            let prefix = format!("-{}-", session.label);
            members(
                &prefix,
                spec.new_legislators_per_session,
                spec.ideal_point_jitter,
                &mut rng,
            )
        } else {
            Vec::new()
        };
        legislators.extend(newcomers.iter().map(legislator));
        let members: Vec<&Member> = base.iter().chain(&newcomers).collect();

        for b in 0..spec.bills_per_session {
            let topic = rng.below(spec.topics);
            let sponsor_party =
                if rng.bernoulli(spec.majority_sponsor_prob(topic, session.majority)) {
                    session.majority
                } else {
                    other(session.majority)
                };
            let candidates: Vec<&&Member> = members
                .iter()
                .filter(|m| m.party == sponsor_party)
                .collect();
            let sponsor = candidates[rng.below(candidates.len())];

            let mut summary = Vec::with_capacity(spec.summary_length * 2);
            for i in 0..spec.summary_length {
                if i % 3 == 0 {
                    summary.push(FILLER[rng.below(FILLER.len())].to_string());
                }
                summary.push(topic_word(topic, rng.below(spec.topic_vocab_size)));
            }
            let mut fulltext = Vec::with_capacity(spec.fulltext_length);
            for _ in 0..spec.fulltext_length {
                let topical = spec.generic_vocab_size == 0 || rng.bernoulli(0.5);
                fulltext.push(if topical {
                    topic_word(topic, rng.below(spec.topic_vocab_size))
                } else {
                    generic_word(rng.below(spec.generic_vocab_size))
                });
            }
            let bill_id = format!("{}-{b:04}", session.label);
            bills.push(RawBill {
                bill_id: bill_id.clone(),
                session: session.label.clone(),
                chamber: Chamber::House,
                title: format!("Synthetic bill {bill_id}"),
                summary_text: summary.join(" "),
                fulltext: (spec.fulltext_length > 0).then(|| fulltext.join(" ")),
                sponsor_ids: vec![sponsor.id.clone()],
            });
            for m in &members {
                let clean = spec.clean_vote(topic, sponsor_party, m.ideal);
                let noisy = rng.bernoulli(spec.vote_noise);
                votes.push(VoteRecord {
                    bill_id: bill_id.clone(),
                    legislator_id: m.id.clone(),
                    outcome: clean != noisy,
                });
            }
        }
    }
    RawCorpus::from_records(bills, legislators, votes)
}

fn legislator(m: &Member) -> Legislator {
    Legislator {
        legislator_id: m.id.clone(),
        party: m.party,
        chamber: Chamber::House,
        row_index: 0,
    }
}

/// Generates and writes `bills.jsonl`, `legislators.jsonl`, `votes.jsonl`.
pub fn write_synthetic(spec: &SynthSpec, dir: &Path) -> Result<CorpusPaths> {
    let raw = generate(spec)?;
    std::fs::create_dir_all(dir).map_err(|e| crate::Error::io(dir, e))?;
    let paths = CorpusPaths::in_dir(dir);
    write_corpus(&paths, &raw)?;
    Ok(paths)
}

/// Generated corpus after the standard ingestion pipeline.
pub fn generate_corpus(spec: &SynthSpec, opts: &CorpusOptions) -> Result<Corpus> {
    Corpus::build(generate(spec)?, opts)
}
