use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::encoder::{EncoderConfig, EncoderKind};
use crate::ndcore::AdaMaxConfig;
use crate::{Error, Result};

/// What a configuration trains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Text encoder, sponsor mixing and legislator embeddings.
    Neural,
    /// Constant yes predictor.
    GuessYes,
    /// Logistic regression over bag-of-words, legislator indicators and
    /// sponsor fractions.
    Linear,
}

/// Which token sequence feeds the encoder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TextSource {
    Summary,
    Fulltext,
    /// One fixed random sequence shared by every bill.
    Dummy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Dims {
    pub word: usize,
    pub legislator: usize,
    pub filters: usize,
    pub window: usize,
}

impl Default for Dims {
    fn default() -> Self {
        Dims {
            word: 50,
            legislator: 25,
            filters: 400,
            window: 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub shuffle: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 50,
            batch_size: 50,
            shuffle: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::config("batch_size must be at least 1"));
        }
        Ok(())
    }
}

/// Full description of one model variant, serialized as the model config
/// file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub name: String,
    pub kind: ModelKind,
    pub encoder: EncoderKind,
    pub metadata: bool,
    pub text: TextSource,
    pub dims: Dims,
    pub optimizer: AdaMaxConfig,
    pub training: TrainConfig,
    pub seed: u64,
    pub shared_embeddings: bool,
    /// Pretrained word vectors; random initialization when absent.
    pub embeddings: Option<PathBuf>,
    pub dummy_length: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            name: "MWE".into(),
            kind: ModelKind::Neural,
            encoder: EncoderKind::Mwe,
            metadata: false,
            text: TextSource::Summary,
            dims: Dims::default(),
            optimizer: AdaMaxConfig::default(),
            training: TrainConfig::default(),
            seed: 0,
            shared_embeddings: false,
            embeddings: None,
            dummy_length: 50,
        }
    }
}

/// Preset keys in report order.
pub const PRESETS: &[&str] = &[
    "guess_yes",
    "linear",
    "mwe",
    "cnn",
    "meta_only",
    "mwe_meta",
    "cnn_meta",
    "mwe_ft",
    "cnn_ft",
    "mwe_meta_ft",
    "cnn_meta_ft",
];

impl ModelConfig {
    /// Looks up a named variant, e.g. `cnn_meta` or `mwe_ft`.
    pub fn preset(key: &str) -> Result<ModelConfig> {
        let base = ModelConfig::default();
        let neural = |name: &str, encoder, metadata, text| ModelConfig {
            name: name.into(),
            encoder,
            metadata,
            text,
            ..base.clone()
        };
        use EncoderKind::{Cnn, Mwe};
        use TextSource::{Dummy, Fulltext, Summary};
        Ok(match key {
            "guess_yes" => ModelConfig {
                name: "Guess Yes".into(),
                kind: ModelKind::GuessYes,
                ..base
            },
            "linear" => ModelConfig {
                name: "Linear BoW".into(),
                kind: ModelKind::Linear,
                ..base
            },
            "mwe" => neural("MWE", Mwe, false, Summary),
            "cnn" => neural("CNN", Cnn, false, Summary),
            "meta_only" => neural("Meta-Only", Mwe, true, Dummy),
            "mwe_meta" => neural("MWE+Meta", Mwe, true, Summary),
            "cnn_meta" => neural("CNN+Meta", Cnn, true, Summary),
            "mwe_ft" => neural("MWE+FT", Mwe, false, Fulltext),
            "cnn_ft" => neural("CNN+FT", Cnn, false, Fulltext),
            "mwe_meta_ft" => neural("MWE+Meta+FT", Mwe, true, Fulltext),
            "cnn_meta_ft" => neural("CNN+Meta+FT", Cnn, true, Fulltext),
            other => {
                return Err(Error::config(format!(
                    "unknown model preset `{other}` (known: {})",
                    PRESETS.join(", ")
                )))
            }
        })
    }

    /// Accepts a preset key or a path to a JSON config file.
    pub fn resolve(spec: &str) -> Result<ModelConfig> {
        if PRESETS.contains(&spec) {
            Self::preset(spec)
        } else {
            Self::from_file(Path::new(spec))
        }
    }

    pub fn from_file(path: &Path) -> Result<ModelConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: ModelConfig = serde_json::from_str(&text).map_err(|e| Error::Parse {
            file: path.display().to_string(),
            line: e.line(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.optimizer.validate()?;
        self.training.validate()?;
        if self.kind == ModelKind::Neural {
            self.encoder_config().validate()?;
            if self.dims.legislator == 0 {
                return Err(Error::config("legislator dimension must be positive"));
            }
            if self.text == TextSource::Dummy && self.dummy_length == 0 {
                return Err(Error::config("dummy_length must be positive"));
            }
        }
        Ok(())
    }

    pub fn encoder_config(&self) -> EncoderConfig {
        EncoderConfig {
            kind: self.encoder,
            metadata: self.metadata,
            shared_embeddings: self.shared_embeddings,
            word_dim: self.dims.word,
            filters: self.dims.filters,
            window: self.dims.window,
        }
    }

    /// Position of this model in reports: presets first, in preset order,
    /// then anything else by name.
    pub fn report_rank(name: &str) -> usize {
        PRESETS
            .iter()
            .position(|k| Self::preset(k).map(|c| c.name == name).unwrap_or(false))
            .unwrap_or(PRESETS.len())
    }
}
