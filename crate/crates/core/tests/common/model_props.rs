//! Bill encoder and model invariants, shared by the property tests and the
//! acceptance run.

use super::small;
use proptest::prelude::*;
use proptest::test_runner::TestCaseResult;
use rollcall::corpus::{Bill, Vocab, PAD};
use rollcall::encoder::{Encoder, EncoderConfig, EncoderKind};
use rollcall::ndcore::{ParamStore, Rng, RngStream, Tensor};
use rollcall::votemodel::{Dataset, Example, VoteModel};

const VOCAB: usize = 14;
const PAIRS: [(&str, &str); 4] = [
    ("enc.r.emb", "enc.d.emb"),
    ("enc.r.filters", "enc.d.filters"),
    ("enc.r.bias", "enc.d.bias"),
    ("enc.a_r", "enc.a_d"),
];

fn vocab() -> Vocab {
    Vocab::from_tokens((0..VOCAB - 2).map(|i| format!("w{i}")))
}

pub fn tokens(max: usize) -> impl Strategy<Value = Vec<u32>> {
    proptest::collection::vec(1..VOCAB as u32, 1..max)
}

/// Sponsor fractions with `p_r + p_d <= 1`, including the pure cases.
pub fn fractions() -> impl Strategy<Value = (f64, f64)> {
    prop_oneof![
        Just((1.0, 0.0)),
        Just((0.0, 1.0)),
        Just((0.0, 0.0)),
        (0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(a, b)| (a, (1.0 - a) * b)),
    ]
}

/// A metadata encoder whose two party copies and scales all differ.
fn metadata_encoder(cnn: bool, seed: u64) -> (Encoder, ParamStore) {
    let enc = Encoder::new(EncoderConfig {
        kind: if cnn {
            EncoderKind::Cnn
        } else {
            EncoderKind::Mwe
        },
        metadata: true,
        shared_embeddings: false,
        word_dim: 6,
        filters: 5,
        window: 3,
    })
    .unwrap();
    let mut rng = Rng::stream(seed, RngStream::Init);
    let mut table = Tensor::zeros(&[VOCAB, 6]);
    for x in &mut table.data_mut()[6..] {
        *x = rng.uniform_range(-0.25, 0.25);
    }
    let mut params = ParamStore::new();
    enc.init(&mut params, &table, &mut rng).unwrap();
    for name in ["enc.d.emb", "enc.a_r", "enc.a_d"] {
        let t = params.get_mut(name).unwrap();
        let skip = if name.ends_with("emb") { 6 } else { 0 };
        for x in &mut t.data_mut()[skip..] {
            *x = rng.uniform_range(-1.5, 1.5);
        }
    }
    (enc, params)
}

fn swap_parties(params: &ParamStore) -> ParamStore {
    let mut out = params.clone();
    for (r, d) in PAIRS {
        if params.contains(r) {
            *out.get_mut(r).unwrap() = params.get(d).unwrap().clone();
            *out.get_mut(d).unwrap() = params.get(r).unwrap().clone();
        }
    }
    out
}

pub fn bill(summary: Vec<u32>, (p_r, p_d): (f64, f64)) -> Bill {
    Bill {
        bill_id: "b".into(),
        session: "s".into(),
        fulltext_tokens: Some(summary.iter().rev().copied().collect()),
        summary_tokens: summary,
        p_r,
        p_d,
    }
}

pub fn model(key: &str, seed: u64) -> VoteModel {
    let mut cfg = small(key);
    cfg.seed = seed;
    VoteModel::init(cfg, vocab(), (0..4).map(|i| format!("L{i}")).collect()).unwrap()
}

/// Random bills (padding tokens included) and random votes by four
/// legislators.
pub fn dataset() -> impl Strategy<Value = Dataset> {
    let one = (
        proptest::collection::vec(0..VOCAB as u32, 1..8),
        fractions(),
    );
    (
        proptest::collection::vec(one, 1..5),
        proptest::collection::vec((0usize..100, 0usize..4, any::<bool>()), 1..12),
    )
        .prop_map(|(bills, votes)| {
            let n = bills.len();
            Dataset {
                bills: bills.into_iter().map(|(t, p)| bill(t, p)).collect(),
                examples: votes
                    .into_iter()
                    .map(|(b, legislator, label)| Example {
                        bill: b % n,
                        legislator,
                        label,
                    })
                    .collect(),
            }
        })
}

pub fn swapping_party_copies_and_fractions_leaves_bill_vector_unchanged(
    cnn: bool,
    seed: u64,
    toks: &[u32],
    p: (f64, f64),
) -> TestCaseResult {
    let (enc, params) = metadata_encoder(cnn, seed);
    let swapped = swap_parties(&params);
    let a = enc.forward(&params, toks, p.0, p.1).unwrap().output;
    let b = enc.forward(&swapped, toks, p.1, p.0).unwrap().output;
    prop_assert_eq!(a, b);
    Ok(())
}

pub fn bill_vector_is_linear_in_fractions(
    cnn: bool,
    seed: u64,
    toks: &[u32],
    p: (f64, f64),
    alpha: f64,
) -> TestCaseResult {
    let (enc, params) = metadata_encoder(cnn, seed);
    let base = enc.forward(&params, toks, p.0, p.1).unwrap().output;
    let scaled = enc
        .forward(&params, toks, alpha * p.0, alpha * p.1)
        .unwrap()
        .output;
    for (s, b) in scaled.iter().zip(&base) {
        prop_assert!(
            (s - alpha * b).abs() <= 1e-12 * (1.0 + b.abs()),
            "{} vs {}",
            s,
            alpha * b
        );
    }
    Ok(())
}

pub fn text_only_models_ignore_fractions(
    variant: &str,
    seed: u64,
    toks: &[u32],
    p: (f64, f64),
    q: (f64, f64),
) -> TestCaseResult {
    let m = model(variant, seed);
    for l in 0..4 {
        prop_assert_eq!(
            m.predict(&bill(toks.to_vec(), p), l).unwrap(),
            m.predict(&bill(toks.to_vec(), q), l).unwrap()
        );
    }
    Ok(())
}

pub fn meta_only_reads_only_the_fractions(
    seed: u64,
    a: Vec<u32>,
    b: Vec<u32>,
    p: (f64, f64),
) -> TestCaseResult {
    let m = model("meta_only", seed);
    let (x, y) = (bill(a, p), bill(b, p));
    let vx = m
        .encoder()
        .forward(m.params(), m.tokens(&x).unwrap(), p.0, p.1)
        .unwrap()
        .output;
    let vy = m
        .encoder()
        .forward(m.params(), m.tokens(&y).unwrap(), p.0, p.1)
        .unwrap()
        .output;
    prop_assert_eq!(vx, vy);
    for l in 0..4 {
        prop_assert_eq!(m.predict(&x, l).unwrap(), m.predict(&y, l).unwrap());
    }
    Ok(())
}

pub fn padding_rows_stay_zero_through_training(
    variant: &str,
    seed: u64,
    data: &Dataset,
    epochs: usize,
) -> TestCaseResult {
    let mut m = model(variant, seed);
    let mut cfg = m.config().clone();
    cfg.training.epochs = epochs;
    cfg.training.batch_size = 3;
    m = VoteModel::init(cfg, m.vocab().clone(), m.legislators().to_vec()).unwrap();
    m.train(data).unwrap();
    let tables: Vec<&str> = m.params().names().filter(|n| n.ends_with("emb")).collect();
    prop_assert!(!tables.is_empty());
    for name in tables {
        prop_assert!(
            m.params()
                .get(name)
                .unwrap()
                .row(PAD as usize)
                .iter()
                .all(|&x| x == 0.0),
            "{}",
            name
        );
    }
    Ok(())
}

pub fn batch_loss_is_order_free(
    variant: &str,
    seed: u64,
    data: &Dataset,
    rotate: usize,
) -> TestCaseResult {
    let m = model(variant, seed);
    let forward: Vec<usize> = (0..data.len()).collect();
    let mut shuffled = forward.clone();
    shuffled.reverse();
    let r = rotate % shuffled.len();
    shuffled.rotate_left(r);
    let a = m.batch_loss(m.params(), data, &forward).unwrap();
    let b = m.batch_loss(m.params(), data, &shuffled).unwrap();
    prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{} vs {}", a, b);
    Ok(())
}
