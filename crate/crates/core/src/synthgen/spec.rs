use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Party;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionSpec {
    pub label: String,
    pub majority: Party,
}

/// Parameters of the synthetic roll-call generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub sessions: Vec<SessionSpec>,
    pub topics: usize,
    pub legislators_per_party: usize,
    pub bills_per_session: usize,
    /// Marginal probability that a bill's sponsor belongs to the majority.
    pub sponsor_majority_prob: f64,
    pub topic_vocab_size: usize,
    pub generic_vocab_size: usize,
    pub summary_length: usize,
    pub fulltext_length: usize,
    pub vote_noise: f64,
    /// Bill polarity follows the sponsor's party; otherwise it is a fixed
    /// property of the topic.
    pub flip_topic_polarity_on_majority_change: bool,
    /// How strongly a topic determines its sponsor's party. At 0 sponsors
    /// are drawn independently of topic; at 1 each topic is always
    /// sponsored by the party that owns it.
    pub topic_agenda_coupling: f64,
    /// Ideal points are `±1` plus uniform noise of this half-width.
    pub ideal_point_jitter: f64,
    /// Extra legislators per party who sit only in one session (every
    /// session after the first).
    pub new_legislators_per_session: usize,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            sessions: vec![
                SessionSpec {
                    label: "s1".into(),
                    majority: Party::R,
                },
                SessionSpec {
                    label: "s2".into(),
                    majority: Party::D,
                },
            ],
            topics: 8,
            legislators_per_party: 10,
            bills_per_session: 60,
            sponsor_majority_prob: 0.75,
            topic_vocab_size: 12,
            generic_vocab_size: 40,
            summary_length: 12,
            fulltext_length: 48,
            vote_noise: 0.0,
            flip_topic_polarity_on_majority_change: true,
            topic_agenda_coupling: 0.0,
            ideal_point_jitter: 0.2,
            new_legislators_per_session: 0,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn from_file(path: &Path) -> Result<SynthSpec> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let spec: SynthSpec = serde_json::from_str(&text).map_err(|e| Error::Parse {
            file: path.display().to_string(),
            line: e.line(),
            message: e.to_string(),
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must lie in [0, 1], got {p}")))
            }
        };
        prob("sponsor_majority_prob", self.sponsor_majority_prob)?;
        prob("vote_noise", self.vote_noise)?;
        prob("topic_agenda_coupling", self.topic_agenda_coupling)?;
        if self.vote_noise > 0.5 {
            return Err(Error::config("vote_noise above 0.5 inverts the labels"));
        }
        if self.topics < 2 {
            return Err(Error::config("need at least 2 topics"));
        }
        if self.sessions.len() < 2 {
            return Err(Error::config("need at least 2 sessions"));
        }
        let mut labels: Vec<&str> = self.sessions.iter().map(|s| s.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::config("session labels must be distinct"));
        }
        if self.sessions.iter().any(|s| s.majority == Party::I) {
            return Err(Error::config("session majority must be R or D"));
        }
        if self.legislators_per_party == 0 || self.bills_per_session == 0 {
            return Err(Error::config("need legislators and bills"));
        }
        if self.topic_vocab_size == 0 || self.summary_length == 0 {
            return Err(Error::config(
                "summaries need a topic vocabulary and a length",
            ));
        }
        if !(0.0..1.0).contains(&self.ideal_point_jitter) {
            return Err(Error::config("ideal_point_jitter must lie in [0, 1)"));
        }
        Ok(())
    }

    /// Number of agenda topics, owned by whichever party holds the majority.
    /// The remaining home topics are split between the parties so that the
    /// marginal majority-sponsor rate stays at `sponsor_majority_prob`
    /// whenever `(2p - 1) K` is a whole number.
    pub fn agenda_topics(&self) -> usize {
        let k = self.topics as f64;
        ((2.0 * self.sponsor_majority_prob - 1.0) * k)
            .round()
            .clamp(0.0, k) as usize
    }

    /// Party that owns `topic` in a session whose majority is `majority`.
    pub fn topic_owner(&self, topic: usize, majority: Party) -> Party {
        let agenda = self.agenda_topics();
        if topic < agenda {
            majority
        } else if (topic - agenda).is_multiple_of(2) {
            Party::R
        } else {
            Party::D
        }
    }

    /// `P(sponsor in majority | topic)`
    pub fn majority_sponsor_prob(&self, topic: usize, majority: Party) -> f64 {
        let c = self.topic_agenda_coupling;
        let owned = if self.topic_owner(topic, majority) == majority {
            1.0
        } else {
            0.0
        };
        (1.0 - c) * self.sponsor_majority_prob + c * owned
    }

    /// Fixed polarity of a topic when polarity does not follow sponsors.
    pub fn topic_polarity(&self, topic: usize) -> f64 {
        if topic.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Clean vote of a legislator with ideal point `ideal`, before label
    /// noise: yes iff the ideal point and the bill polarity share a sign.
    pub fn clean_vote(&self, topic: usize, sponsor: Party, ideal: f64) -> bool {
        let polarity = if self.flip_topic_polarity_on_majority_change {
            if sponsor == Party::R {
                1.0
            } else {
                -1.0
            }
        } else {
            self.topic_polarity(topic)
        };
        ideal * polarity > 0.0
    }

    /// Legislators of one party sitting in session `index`.
    pub fn seats(&self, index: usize) -> usize {
        self.legislators_per_party
            + if index > 0 {
                self.new_legislators_per_session
            } else {
                0
            }
    }
}

pub(crate) fn other(p: Party) -> Party {
    match p {
        Party::R => Party::D,
        _ => Party::R,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agenda_split_preserves_marginal_rate() {
        let spec = SynthSpec {
            topic_agenda_coupling: 0.9,
            ..SynthSpec::default()
        };
        assert_eq!(spec.agenda_topics(), 4);
        for majority in [Party::R, Party::D] {
            let mean: f64 = (0..spec.topics)
                .map(|t| spec.majority_sponsor_prob(t, majority))
                .sum::<f64>()
                / spec.topics as f64;
            assert!((mean - 0.75).abs() < 1e-12);
        }
    }

    #[test]
    fn validation() {
        assert!(SynthSpec::default().validate().is_ok());
        let bad = [
            SynthSpec {
                topics: 1,
                ..SynthSpec::default()
            },
            SynthSpec {
                vote_noise: 1.5,
                ..SynthSpec::default()
            },
            SynthSpec {
                sponsor_majority_prob: -0.1,
                ..SynthSpec::default()
            },
            SynthSpec {
                sessions: vec![],
                ..SynthSpec::default()
            },
        ];
        for spec in bad {
            assert!(spec.validate().is_err());
        }
    }
}
