use std::collections::BTreeSet;

use crate::corpus::{Bill, PAD};
use crate::ndcore::{sigmoid, sigmoid_bce, AdaMax, Grads, ParamStore, Rng, RngStream, Tensor};
use crate::votemodel::{Dataset, EpochStats, ModelConfig, TextSource, TrainHistory};
use crate::{Error, Result};

const TEXT: &str = "linear.text";
const LEGISLATORS: &str = "linear.legislators";
const META: &str = "linear.meta";
const BIAS: &str = "linear.bias";

/// Logistic regression on binary bag-of-words, one-hot legislator and the
/// two sponsor fractions. Zero-initialized, trained with the same AdaMax
/// loop and batching as the neural models.
#[derive(Clone, Debug)]
pub struct LinearBaseline {
    config: ModelConfig,
    params: ParamStore,
}

impl LinearBaseline {
    pub fn init(config: ModelConfig, vocab_len: usize, num_legislators: usize) -> Result<Self> {
        config.validate()?;
        let mut params = ParamStore::new();
        params.insert(TEXT, Tensor::zeros(&[vocab_len]))?;
        params.insert(LEGISLATORS, Tensor::zeros(&[num_legislators]))?;
        params.insert(META, Tensor::zeros(&[2]))?;
        params.insert(BIAS, Tensor::zeros(&[1]))?;
        params.freeze_row(TEXT, PAD as usize)?;
        Ok(LinearBaseline { config, params })
    }

    pub fn params(&self) -> &ParamStore {
        &self.params
    }

    fn bag(&self, bill: &Bill) -> Result<Vec<u32>> {
        let tokens = match self.config.text {
            TextSource::Fulltext => bill
                .fulltext_tokens
                .as_deref()
                .ok_or_else(|| Error::config(format!("bill {} has no full text", bill.bill_id)))?,
            _ => &bill.summary_tokens,
        };
        let vocab = self.params.get(TEXT)?.len();
        let set: BTreeSet<u32> = tokens.iter().copied().filter(|&t| t != PAD).collect();
        if let Some(&t) = set.iter().find(|&&t| t as usize >= vocab) {
            return Err(Error::OutOfRange {
                what: "linear vocabulary",
                index: t as usize,
                size: vocab,
            });
        }
        Ok(set.into_iter().collect())
    }

    fn bags(&self, data: &Dataset) -> Result<Vec<Vec<u32>>> {
        data.bills.iter().map(|b| self.bag(b)).collect()
    }

    fn logit(&self, bag: &[u32], bill: &Bill, legislator: usize) -> Result<f64> {
        let text = self.params.get(TEXT)?.data();
        let legs = self.params.get(LEGISLATORS)?.data();
        let meta = self.params.get(META)?.data();
        let w_leg = *legs.get(legislator).ok_or(Error::OutOfRange {
            what: "linear legislators",
            index: legislator,
            size: legs.len(),
        })?;
        let words: f64 = bag.iter().map(|&t| text[t as usize]).sum();
        Ok(words
            + w_leg
            + meta[0] * bill.p_r
            + meta[1] * bill.p_d
            + self.params.get(BIAS)?.data()[0])
    }

    pub fn train(&mut self, data: &Dataset) -> Result<TrainHistory> {
        if data.is_empty() {
            return Err(Error::Empty("training set".into()));
        }
        let bags = self.bags(data)?;
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
            let (mut loss, mut correct) = (0.0, 0usize);
            for (b, batch) in order.chunks(cfg.batch_size).enumerate() {
                grads.zero();
                let inv = 1.0 / batch.len() as f64;
                let mut batch_loss = 0.0;
                for &i in batch {
                    let ex = data.examples[i];
                    let bill = &data.bills[ex.bill];
                    let out =
                        sigmoid_bce(self.logit(&bags[ex.bill], bill, ex.legislator)?, ex.label);
                    batch_loss += out.loss;
                    correct += usize::from((out.probability >= 0.5) == ex.label);
                    let g = out.grad_logit * inv;
                    let gt = grads.get_mut(TEXT)?.data_mut();
                    for &t in &bags[ex.bill] {
                        gt[t as usize] += g;
                    }
                    grads.get_mut(LEGISLATORS)?.data_mut()[ex.legislator] += g;
                    let gm = grads.get_mut(META)?.data_mut();
                    gm[0] += g * bill.p_r;
                    gm[1] += g * bill.p_d;
                    grads.get_mut(BIAS)?.data_mut()[0] += g;
                }
                if !batch_loss.is_finite() {
                    return Err(Error::NonFiniteLoss { epoch, batch: b });
                }
                opt.step(&mut self.params, &grads)?;
                loss += batch_loss;
            }
            history.epochs.push(EpochStats {
                epoch,
                mean_loss: loss / data.len() as f64,
                train_accuracy: correct as f64 / data.len() as f64,
            });
        }
        let probs = self.predict_dataset(data)?;
        history.final_train_accuracy = Some(super::accuracy(&probs, &data.labels())?);
        Ok(history)
    }

    pub fn predict_dataset(&self, data: &Dataset) -> Result<Vec<f64>> {
        let bags = self.bags(data)?;
        data.examples
            .iter()
            .map(|ex| {
                Ok(sigmoid(self.logit(
                    &bags[ex.bill],
                    &data.bills[ex.bill],
                    ex.legislator,
                )?))
            })
            .collect()
    }
}
