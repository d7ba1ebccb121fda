use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Grads, ParamStore};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdaMaxConfig {
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdaMaxConfig {
    fn default() -> Self {
        AdaMaxConfig {
            alpha: 0.002,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdaMaxConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.alpha > 0.0
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.epsilon >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!("invalid AdaMax settings {self:?}")))
        }
    }
}

/// AdaMax: Adam with the second moment replaced by an exponentially
/// weighted infinity norm.
///
/// ```text
/// t += 1
/// m <- b1 m + (1 - b1) g
/// u <- max(b2 u, |g|)
/// theta <- theta - alpha / (1 - b1^t) * m / (u + eps)
/// ```
///
/// Masked entries are skipped entirely, moments included.
#[derive(Clone, Debug)]
pub struct AdaMax {
    pub config: AdaMaxConfig,
    step: u64,
    first_moment: BTreeMap<String, Vec<f64>>,
    inf_norm: BTreeMap<String, Vec<f64>>,
}

impl AdaMax {
    pub fn new(config: AdaMaxConfig, params: &ParamStore) -> Self {
        let zeros = |p: &ParamStore| -> BTreeMap<String, Vec<f64>> {
            p.iter()
                .map(|(k, v)| (k.to_string(), vec![0.0; v.value.len()]))
                .collect()
        };
        AdaMax {
            config,
            step: 0,
            first_moment: zeros(params),
            inf_norm: zeros(params),
        }
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    pub fn inf_norm(&self, name: &str) -> Option<&[f64]> {
        self.inf_norm.get(name).map(Vec::as_slice)
    }

    /// Applies one update. Gradients are validated before anything is
    /// written, so a rejected step leaves parameters and state untouched.
    pub fn step(&mut self, params: &mut ParamStore, grads: &Grads) -> Result<()> {
        for (name, g) in grads.iter() {
            let p = params.get(name)?;
            if p.shape() != g.shape() {
                return Err(Error::Shape {
                    op: "adamax_step",
                    expected: p.shape().to_vec(),
                    actual: g.shape().to_vec(),
                });
            }
            if let Some(i) = g.data().iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite(format!(
                    "gradient of `{name}` at flat index {i} (value {}) on step {}",
                    g.data()[i],
                    self.step + 1
                )));
            }
        }

        self.step += 1;
        let AdaMaxConfig {
            alpha,
            beta1,
            beta2,
            epsilon,
        } = self.config;
        let lr = alpha / (1.0 - beta1.powi(self.step as i32));

        for (name, param) in params.iter_mut() {
            let Ok(g) = grads.get(name) else { continue };
            let m = self
                .first_moment
                .entry(name.to_string())
                .or_insert_with(|| vec![0.0; g.len()]);
            let u = self
                .inf_norm
                .entry(name.to_string())
                .or_insert_with(|| vec![0.0; g.len()]);
            let mask = param.mask().map(<[bool]>::to_vec);
            let theta = param.value.data_mut();
            for i in 0..theta.len() {
                if let Some(mask) = &mask {
                    if !mask[i] {
                        continue;
                    }
                }
                let gi = g.data()[i];
                m[i] = beta1 * m[i] + (1.0 - beta1) * gi;
                u[i] = (beta2 * u[i]).max(gi.abs());
                theta[i] -= lr * m[i] / (u[i] + epsilon);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ndcore::Tensor;

    fn scalar_store(x: f64) -> ParamStore {
        let mut p = ParamStore::new();
        p.insert("theta", Tensor::vector(vec![x]).unwrap()).unwrap();
        p
    }

    #[test]
    fn zero_gradient_is_a_no_op() {
        let mut p = scalar_store(1.5);
        let mut opt = AdaMax::new(AdaMaxConfig::default(), &p);
        let g = Grads::zeros_like(&p);
        opt.step(&mut p, &g).unwrap();
        assert_eq!(p.get("theta").unwrap().data(), &[1.5]);
    }

    #[test]
    fn one_step_hand_recurrence() {
        // m = 0.1, u = 1, lr = 0.002 / (1 - 0.9) = 0.02, delta = 0.02 * 0.1 / (1 + 1e-8)
        let mut p = scalar_store(0.0);
        let mut opt = AdaMax::new(AdaMaxConfig::default(), &p);
        let mut g = Grads::zeros_like(&p);
        g.get_mut("theta").unwrap().data_mut()[0] = 1.0;
        opt.step(&mut p, &g).unwrap();
        let expected = -0.002 / (1.0 + 1e-8);
        assert!((p.get("theta").unwrap().data()[0] - expected).abs() < 1e-15);
        assert_eq!(opt.inf_norm("theta").unwrap(), &[1.0]);
    }

    #[test]
    fn non_finite_gradient_aborts_without_writing() {
        let mut p = scalar_store(0.5);
        let mut opt = AdaMax::new(AdaMaxConfig::default(), &p);
        let mut g = Grads::zeros_like(&p);
        g.get_mut("theta").unwrap().data_mut()[0] = f64::NAN;
        let err = opt.step(&mut p, &g).unwrap_err();
        assert!(err.to_string().contains("theta"));
        assert_eq!(p.get("theta").unwrap().data(), &[0.5]);
        assert_eq!(opt.steps(), 0);
    }

    #[test]
    fn masked_row_never_moves() {
        let mut p = ParamStore::new();
        p.insert("emb", Tensor::zeros(&[3, 2])).unwrap();
        p.freeze_row("emb", 0).unwrap();
        let mut opt = AdaMax::new(AdaMaxConfig::default(), &p);
        let mut g = Grads::zeros_like(&p);
        g.get_mut("emb")
            .unwrap()
            .data_mut()
            .iter_mut()
            .for_each(|x| *x = 1.0);
        for _ in 0..10 {
            opt.step(&mut p, &g).unwrap();
        }
        let emb = p.get("emb").unwrap();
        assert_eq!(emb.row(0), &[0.0, 0.0]);
        assert!(emb.row(1)[0] < 0.0);
    }

    #[test]
    fn deterministic_over_ten_steps() {
        let run = || {
            let mut p = ParamStore::new();
            p.insert("w", Tensor::vector(vec![0.3, -0.7, 1.1]).unwrap())
                .unwrap();
            let mut opt = AdaMax::new(AdaMaxConfig::default(), &p);
            for k in 0..10 {
                let mut g = Grads::zeros_like(&p);
                let w = p.get("w").unwrap().data().to_vec();
                for (i, gi) in g.get_mut("w").unwrap().data_mut().iter_mut().enumerate() {
                    *gi = 2.0 * w[i] + 0.1 * k as f64;
                }
                opt.step(&mut p, &g).unwrap();
            }
            p.get("w")
                .unwrap()
                .data()
                .iter()
                .map(|x| x.to_bits())
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }
}
