use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{ModelConfig, ModelKind, TextSource};
use crate::corpus::{Bill, Corpus, Vocab, VoteRecord};
use crate::encoder::{dummy_tokens, load_pretrained, Encoder};
use crate::ndcore::{
    add_outer, affine, axpy, decode_checkpoint, encode_checkpoint, glorot_uniform, matvec_acc,
    matvec_t_acc, sigmoid, sigmoid_bce, AdaMax, Grads, ParamStore, Rng, RngStream, Tensor,
};
use crate::{Error, Result};

pub(crate) const LEGISLATORS: &str = "legislators";
pub(crate) const PROJ_W: &str = "proj.w";
pub(crate) const PROJ_B: &str = "proj.b";
pub(crate) const SCORE_W: &str = "score.w";
pub(crate) const SCORE_B: &str = "score.b";

/// `v_BL = W_B v_B + b_B`
pub fn project_bill(v_b: &Tensor, w_b: &Tensor, b_b: &Tensor) -> Result<Tensor> {
    affine(v_b, w_b, b_b)
}

/// `W_v · (v_BL ⊙ v_L) + b_v`
pub fn score(v_bl: &[f64], v_l: &[f64], w_v: &[f64], b_v: f64) -> Result<f64> {
    let d = w_v.len();
    if v_bl.len() != d || v_l.len() != d {
        return Err(Error::Shape {
            op: "score",
            expected: vec![d],
            actual: vec![v_bl.len(), v_l.len()],
        });
    }
    Ok((0..d).map(|k| w_v[k] * (v_bl[k] * v_l[k])).sum::<f64>() + b_v)
}

/// One roll-call vote as indices into a [`Dataset`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Example {
    pub bill: usize,
    pub legislator: usize,
    pub label: bool,
}

/// Indexed bills plus the votes cast on them.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub bills: Vec<Bill>,
    pub examples: Vec<Example>,
}

impl Dataset {
    /// Indexes `votes` against `corpus`. Bills appear in id order; examples
    /// keep the order of `votes`.
    pub fn from_votes(corpus: &Corpus, vocab: &Vocab, votes: &[VoteRecord]) -> Result<Dataset> {
        let mut position = BTreeMap::new();
        for v in votes {
            position.entry(v.bill_id.as_str()).or_insert(0usize);
        }
        let mut bills = Vec::with_capacity(position.len());
        for (i, (id, slot)) in position.iter_mut().enumerate() {
            *slot = i;
            bills.push(vocab.index_bill(corpus.bill(id)?));
        }
        let examples = votes
            .iter()
            .map(|v| {
                Ok(Example {
                    bill: position[v.bill_id.as_str()],
                    legislator: corpus.legislator_row(&v.legislator_id)?,
                    label: v.outcome,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Dataset { bills, examples })
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn labels(&self) -> Vec<bool> {
        self.examples.iter().map(|e| e.label).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean BCE over the epoch's votes, each measured before its batch update.
    pub mean_loss: f64,
    /// Accuracy of those same pre-update predictions.
    pub train_accuracy: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub epochs: Vec<EpochStats>,
    /// Accuracy of the final parameters over the whole training set.
    pub final_train_accuracy: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BatchStats {
    pub loss_sum: f64,
    pub correct: usize,
    pub count: usize,
}

#[derive(Serialize, Deserialize)]
struct CheckpointMeta {
    model: ModelConfig,
    vocab: Vec<String>,
    legislators: Vec<String>,
    dummy: Option<Vec<u32>>,
}

/// The neural vote predictor: encoder, bill projection, legislator
/// embeddings and the bilinear score.
#[derive(Clone, Debug)]
pub struct VoteModel {
    config: ModelConfig,
    encoder: Encoder,
    vocab: Vocab,
    legislators: Vec<String>,
    dummy: Option<Vec<u32>>,
    params: ParamStore,
}

impl VoteModel {
    /// Fresh parameters. `legislators` lists ids in embedding-row order.
    pub fn init(config: ModelConfig, vocab: Vocab, legislators: Vec<String>) -> Result<VoteModel> {
        config.validate()?;
        if config.kind != ModelKind::Neural {
            return Err(Error::config(format!(
                "`{}` is not a neural model",
                config.name
            )));
        }
        if legislators.is_empty() {
            return Err(Error::Empty("legislator list".into()));
        }
        let encoder = Encoder::new(config.encoder_config())?;
        let mut emb_rng = Rng::stream(config.seed, RngStream::Embeddings);
        let table = load_pretrained(
            config.embeddings.as_deref(),
            &vocab,
            config.dims.word,
            &mut emb_rng,
        )?;
        let dummy = match config.text {
            TextSource::Dummy => Some(dummy_tokens(config.dummy_length, vocab.len(), config.seed)?),
            _ => None,
        };

        let mut rng = Rng::stream(config.seed, RngStream::Init);
        let mut params = ParamStore::new();
        encoder.init(&mut params, &table, &mut rng)?;
        let (l, d_text) = (config.dims.legislator, encoder.output_dim());
        let n = legislators.len();
        params.insert(LEGISLATORS, glorot_uniform(n, l, &[n, l], &mut rng)?)?;
        params.insert(PROJ_W, glorot_uniform(d_text, l, &[l, d_text], &mut rng)?)?;
        params.insert(PROJ_B, Tensor::zeros(&[l]))?;
        params.insert(SCORE_W, glorot_uniform(l, 1, &[l], &mut rng)?)?;
        params.insert(SCORE_B, Tensor::zeros(&[1]))?;
        Ok(VoteModel {
            config,
            encoder,
            vocab,
            legislators,
            dummy,
            params,
        })
    }

    /// Convenience: row order taken from the corpus.
    pub fn for_corpus(config: ModelConfig, vocab: Vocab, corpus: &Corpus) -> Result<VoteModel> {
        Self::init(config, vocab, legislator_order(corpus))
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn encoder(&self) -> &Encoder {
        &self.encoder
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    pub fn legislators(&self) -> &[String] {
        &self.legislators
    }

    pub fn dummy_tokens(&self) -> Option<&[u32]> {
        self.dummy.as_deref()
    }

    pub fn params(&self) -> &ParamStore {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut ParamStore {
        &mut self.params
    }

    /// Token sequence the encoder reads for `bill`.
    pub fn tokens<'a>(&'a self, bill: &'a Bill) -> Result<&'a [u32]> {
        match self.config.text {
            TextSource::Summary => Ok(&bill.summary_tokens),
            TextSource::Fulltext => bill
                .fulltext_tokens
                .as_deref()
                .ok_or_else(|| Error::config(format!("bill {} has no full text", bill.bill_id))),
            TextSource::Dummy => Ok(self.dummy.as_deref().unwrap_or_default()),
        }
    }

    fn bill_projection(
        &self,
        params: &ParamStore,
        bill: &Bill,
    ) -> Result<(crate::encoder::EncodeCache, Vec<f64>)> {
        let cache = self
            .encoder
            .forward(params, self.tokens(bill)?, bill.p_r, bill.p_d)?;
        let w = params.get(PROJ_W)?;
        let mut v_bl = params.get(PROJ_B)?.data().to_vec();
        if w.shape() != [v_bl.len(), cache.output.len()] {
            return Err(Error::Shape {
                op: "project_bill",
                expected: vec![v_bl.len(), cache.output.len()],
                actual: w.shape().to_vec(),
            });
        }
        matvec_acc(w.data(), &cache.output, &mut v_bl);
        Ok((cache, v_bl))
    }

    fn legislator<'a>(&self, params: &'a ParamStore, row: usize) -> Result<&'a [f64]> {
        let table = params.get(LEGISLATORS)?;
        if row >= table.rows() {
            return Err(Error::OutOfRange {
                what: "legislator embeddings",
                index: row,
                size: table.rows(),
            });
        }
        Ok(table.row(row))
    }

    fn logit_from(&self, params: &ParamStore, v_bl: &[f64], row: usize) -> Result<f64> {
        let w_v = params.get(SCORE_W)?.data();
        let b_v = params.get(SCORE_B)?.data()[0];
        score(v_bl, self.legislator(params, row)?, w_v, b_v)
    }

    /// `p(yes | bill, legislator)`
    pub fn predict(&self, bill: &Bill, legislator_row: usize) -> Result<f64> {
        let (_, v_bl) = self.bill_projection(&self.params, bill)?;
        Ok(sigmoid(self.logit_from(
            &self.params,
            &v_bl,
            legislator_row,
        )?))
    }

    /// Probabilities for every example, encoding each bill once.
    pub fn predict_dataset(&self, data: &Dataset) -> Result<Vec<f64>> {
        let mut projected: Vec<Option<Vec<f64>>> = vec![None; data.bills.len()];
        let mut out = Vec::with_capacity(data.len());
        for ex in &data.examples {
            let bill = data.bills.get(ex.bill).ok_or(Error::OutOfRange {
                what: "dataset bills",
                index: ex.bill,
                size: data.bills.len(),
            })?;
            if projected[ex.bill].is_none() {
                projected[ex.bill] = Some(self.bill_projection(&self.params, bill)?.1);
            }
            let v_bl = projected[ex.bill].as_deref().unwrap_or_default();
            out.push(sigmoid(self.logit_from(
                &self.params,
                v_bl,
                ex.legislator,
            )?));
        }
        Ok(out)
    }

    /// Mean BCE over `batch` (indices into `data.examples`) at `params`.
    pub fn batch_loss(&self, params: &ParamStore, data: &Dataset, batch: &[usize]) -> Result<f64> {
        let mut sum = 0.0;
        for_each_bill(data, batch, |bill, examples| {
            let (_, v_bl) = self.bill_projection(params, &data.bills[bill])?;
            for ex in examples {
                sum += sigmoid_bce(self.logit_from(params, &v_bl, ex.legislator)?, ex.label).loss;
            }
            Ok(())
        })?;
        Ok(sum / batch.len().max(1) as f64)
    }

    /// Adds `d(mean batch loss)/d(params)` into `grads`. Each bill is encoded
    /// once and its upstream gradient summed over its votes before
    /// backpropagating through the encoder.
    pub fn batch_gradients(
        &self,
        params: &ParamStore,
        data: &Dataset,
        batch: &[usize],
        grads: &mut Grads,
    ) -> Result<BatchStats> {
        let inv = 1.0 / batch.len().max(1) as f64;
        let mut stats = BatchStats {
            count: batch.len(),
            ..Default::default()
        };
        let w_v = params.get(SCORE_W)?.data();
        let w_b = params.get(PROJ_W)?.data();
        for_each_bill(data, batch, |bill, examples| {
            let (cache, v_bl) = self.bill_projection(params, &data.bills[bill])?;
            let l = v_bl.len();
            let mut g_bl = vec![0.0; l];
            for ex in examples {
                let v_l = self.legislator(params, ex.legislator)?;
                let out = sigmoid_bce(self.logit_from(params, &v_bl, ex.legislator)?, ex.label);
                stats.loss_sum += out.loss;
                stats.correct += usize::from((out.probability >= 0.5) == ex.label);
                let g = out.grad_logit * inv;
                grads.get_mut(SCORE_B)?.data_mut()[0] += g;
                let gw = grads.get_mut(SCORE_W)?.data_mut();
                for k in 0..l {
                    gw[k] += g * (v_bl[k] * v_l[k]);
                }
                let gl = grads.get_mut(LEGISLATORS)?.row_mut(ex.legislator);
                for k in 0..l {
                    gl[k] += g * w_v[k] * v_bl[k];
                    g_bl[k] += g * w_v[k] * v_l[k];
                }
            }
            axpy(1.0, &g_bl, grads.get_mut(PROJ_B)?.data_mut());
            add_outer(grads.get_mut(PROJ_W)?.data_mut(), &g_bl, &cache.output);
            let mut g_b = vec![0.0; cache.output.len()];
            matvec_t_acc(w_b, &g_bl, &mut g_b);
            self.encoder.backward(params, &cache, &g_b, grads)
        })?;
        Ok(stats)
    }

    /// Mini-batch AdaMax on mean BCE. Deterministic given the config seed.
    pub fn train(&mut self, data: &Dataset) -> Result<TrainHistory> {
        if data.is_empty() {
            return Err(Error::Empty("training set".into()));
        }
        let cfg = self.config.training;
        let mut opt = AdaMax::new(self.config.optimizer, &self.params);
        let mut rng = Rng::stream(self.config.seed, RngStream::Shuffle);
        let mut order: Vec<usize> = (0..data.len()).collect();
        let mut grads = Grads::zeros_like(&self.params);
        let mut history = TrainHistory::default();
        for epoch in 0..cfg.epochs {
            if cfg.shuffle {
                rng.shuffle(&mut order);
            }
            let (mut loss, mut correct) = (0.0, 0);
            for (b, batch) in order.chunks(cfg.batch_size).enumerate() {
                grads.zero();
                let stats = self.batch_gradients(&self.params, data, batch, &mut grads)?;
                if !stats.loss_sum.is_finite() {
                    return Err(Error::NonFiniteLoss { epoch, batch: b });
                }
                opt.step(&mut self.params, &grads)?;
                loss += stats.loss_sum;
                correct += stats.correct;
            }
            let stats = EpochStats {
                epoch,
                mean_loss: loss / data.len() as f64,
                train_accuracy: correct as f64 / data.len() as f64,
            };
            log::debug!(
                "{} epoch {epoch}: loss {:.4} acc {:.4}",
                self.config.name,
                stats.mean_loss,
                stats.train_accuracy
            );
            history.epochs.push(stats);
        }
        let probs = self.predict_dataset(data)?;
        history.final_train_accuracy = Some(crate::evalharness::accuracy(&probs, &data.labels())?);
        Ok(history)
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let meta = CheckpointMeta {
            model: self.config.clone(),
            vocab: self.vocab.tokens().to_vec(),
            legislators: self.legislators.clone(),
            dummy: self.dummy.clone(),
        };
        encode_checkpoint(&self.params, &serde_json::to_value(meta)?)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<VoteModel> {
        let (params, meta) = decode_checkpoint(bytes)?;
        let meta: CheckpointMeta = serde_json::from_value(meta)?;
        let encoder = Encoder::new(meta.model.encoder_config())?;
        let model = VoteModel {
            config: meta.model,
            encoder,
            vocab: Vocab::from_tokens(&meta.vocab),
            legislators: meta.legislators,
            dummy: meta.dummy,
            params,
        };
        model.check_layout()?;
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let bytes = self.to_bytes()?;
        std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<VoteModel> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }

    fn check_layout(&self) -> Result<()> {
        let mut expected: Vec<&str> = self.encoder.param_names();
        expected.extend([LEGISLATORS, PROJ_W, PROJ_B, SCORE_W, SCORE_B]);
        expected.sort_unstable();
        let actual: Vec<&str> = self.params.names().collect();
        if expected != actual {
            return Err(Error::config(format!(
                "checkpoint tensors {actual:?} do not match model layout {expected:?}"
            )));
        }
        let l = self.config.dims.legislator;
        self.params
            .get(LEGISLATORS)?
            .expect_shape("checkpoint", &[self.legislators.len(), l])?;
        self.params
            .get(PROJ_W)?
            .expect_shape("checkpoint", &[l, self.encoder.output_dim()])?;
        Ok(())
    }
}

/// Legislator ids in embedding-row order.
pub fn legislator_order(corpus: &Corpus) -> Vec<String> {
    let mut rows: Vec<(usize, &String)> = corpus
        .legislators
        .iter()
        .map(|(id, l)| (l.row_index, id))
        .collect();
    rows.sort_unstable();
    rows.into_iter().map(|(_, id)| id.clone()).collect()
}

/// Visits the examples of `batch` grouped by bill, bills in ascending index
/// order and each bill's votes in batch order.
fn for_each_bill(
    data: &Dataset,
    batch: &[usize],
    mut f: impl FnMut(usize, &[Example]) -> Result<()>,
) -> Result<()> {
    let mut groups: BTreeMap<usize, Vec<Example>> = BTreeMap::new();
    for &i in batch {
        let ex = *data.examples.get(i).ok_or(Error::OutOfRange {
            what: "dataset examples",
            index: i,
            size: data.len(),
        })?;
        if ex.bill >= data.bills.len() {
            return Err(Error::OutOfRange {
                what: "dataset bills",
                index: ex.bill,
                size: data.bills.len(),
            });
        }
        groups.entry(ex.bill).or_default().push(ex);
    }
    for (bill, examples) in &groups {
        f(*bill, examples)?;
    }
    Ok(())
}
