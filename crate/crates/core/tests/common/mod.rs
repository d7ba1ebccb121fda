//! Fixtures shared by the integration test targets.
#![allow(dead_code)]

pub mod corpus_props;
pub mod model_props;

use rollcall::corpus::{Bill, Chamber, Legislator, Party, RawBill, RawCorpus, Vocab, VoteRecord};
use rollcall::synthgen::{SessionSpec, SynthSpec};
use rollcall::votemodel::{Dataset, Dims, Example, ModelConfig, VoteModel};

/// Variants whose gradients and memorization are checked.
pub const VARIANTS: &[&str] = &[
    "mwe",
    "cnn",
    "mwe_meta",
    "cnn_meta",
    "meta_only",
    "mwe_meta_ft",
    "cnn_ft",
];

/// Preset with small dimensions so every coordinate can be checked.
pub fn small(key: &str) -> ModelConfig {
    let mut cfg = ModelConfig::preset(key).unwrap();
    cfg.dims = Dims {
        word: 8,
        legislator: 5,
        filters: 6,
        window: 4,
    };
    cfg.seed = 17;
    cfg
}

/// Twenty votes: five bills with distinct text and distinct sponsor mixes,
/// two legislators per party. A legislator votes yes iff their party
/// supplies the larger sponsor share, so labels are a function of both the
/// text (each bill is unique) and the fractions.
pub fn memorization_fixture(config: ModelConfig) -> (VoteModel, Dataset) {
    let vocab = Vocab::from_tokens((0..30).map(|i| format!("w{i:02}")));
    let fractions = [(1.0, 0.0), (0.0, 1.0), (0.8, 0.2), (0.3, 0.7), (0.6, 0.4)];
    let bills: Vec<Bill> = fractions
        .iter()
        .enumerate()
        .map(|(b, &(p_r, p_d))| {
            let summary: Vec<u32> = (0..6).map(|j| 2 + ((b * 5 + j * 3) % 30) as u32).collect();
            Bill {
                bill_id: format!("B{b}"),
                session: "s".into(),
                fulltext_tokens: Some(summary.iter().rev().copied().collect()),
                summary_tokens: summary,
                p_r,
                p_d,
            }
        })
        .collect();
    let parties = [Party::R, Party::R, Party::D, Party::D];
    let mut examples = Vec::new();
    for (b, &(p_r, p_d)) in fractions.iter().enumerate() {
        for (l, party) in parties.iter().enumerate() {
            let r_leads = p_r > p_d;
            examples.push(Example {
                bill: b,
                legislator: l,
                label: (*party == Party::R) == r_leads,
            });
        }
    }
    let model = VoteModel::init(config, vocab, (0..4).map(|l| format!("L{l}")).collect()).unwrap();
    (model, Dataset { bills, examples })
}

/// Shifted corpus: two sessions under one majority for training, two under
/// the other for testing. Topics are tied to the majority's agenda so text
/// predicts sponsors within a regime but not across the change.
pub fn shifted_spec(seed: u64) -> SynthSpec {
    let session = |label: &str, majority| SessionSpec {
        label: label.into(),
        majority,
    };
    SynthSpec {
        sessions: vec![
            session("2005-2006", Party::R),
            session("2007-2008", Party::R),
            session("2009-2010", Party::D),
            session("2011-2012", Party::D),
        ],
        bills_per_session: 100,
        vote_noise: 0.05,
        topic_agenda_coupling: 0.95,
        flip_topic_polarity_on_majority_change: true,
        seed,
        ..SynthSpec::default()
    }
}

pub const TRAIN_SESSIONS: [&str; 2] = ["2005-2006", "2007-2008"];
pub const TEST_SESSIONS: [&str; 2] = ["2009-2010", "2011-2012"];

/// Property-test settings: fixed seed so failures reproduce, no regression
/// files written into the source tree.
pub fn prop_config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        rng_seed: proptest::test_runner::RngSeed::Fixed(0x5eed_cafe),
        failure_persistence: None,
        ..proptest::test_runner::Config::default()
    }
}

/// Two hundred legislators voting on eleven bills, two of which have under
/// 1% no votes. Returns the raw corpus, the yes-rate after dropping those
/// two and the yes-rate before.
pub fn unanimity_fixture() -> (RawCorpus, f64, f64) {
    let legislators: Vec<Legislator> = (0..200)
        .map(|i| Legislator {
            legislator_id: format!("L{i:03}"),
            party: if i % 2 == 0 { Party::R } else { Party::D },
            chamber: Chamber::House,
            row_index: 0,
        })
        .collect();
    let mut bills = Vec::new();
    let mut votes = Vec::new();
    // Bill b gets `no_counts[b]` no votes out of 200.
    let no_counts = [0, 1, 2, 60, 90, 10, 130, 45, 3, 70, 20];
    for (b, &no) in no_counts.iter().enumerate() {
        let id = format!("B{b:02}");
        bills.push(RawBill {
            bill_id: id.clone(),
            session: "2005-2006".into(),
            chamber: Chamber::House,
            title: String::new(),
            summary_text: format!("bill number {b}"),
            fulltext: None,
            sponsor_ids: vec!["L000".into()],
        });
        for (i, l) in legislators.iter().enumerate() {
            votes.push(VoteRecord {
                bill_id: id.clone(),
                legislator_id: l.legislator_id.clone(),
                outcome: i >= no,
            });
        }
    }
    let raw = RawCorpus::from_records(bills, legislators, votes).unwrap();
    let all_yes = raw.votes.iter().filter(|v| v.outcome).count() as f64 / raw.votes.len() as f64;
    // 0 and 1 no votes are under 1% of 200; 2 is exactly 1% and stays.
    let kept: Vec<usize> = no_counts.iter().copied().filter(|&n| n >= 2).collect();
    let filtered_yes =
        kept.iter().map(|n| 200 - n).sum::<usize>() as f64 / (200 * kept.len()) as f64;
    (raw, filtered_yes, all_yes)
}
