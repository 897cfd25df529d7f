//! Label types shared by every engine: the ternary polarity, the signed
//! valence score and Ekman's emotion categories.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown {kind} `{value}`")]
pub struct UnknownLabel {
    pub kind: &'static str,
    pub value: String,
}

/// Ternary sentiment label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
    Neutral,
}

impl Polarity {
    /// Fixed order also used to break classifier vote ties.
    pub const ALL: [Polarity; 3] = [Polarity::Positive, Polarity::Negative, Polarity::Neutral];

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
            Polarity::Neutral => "neutral",
        }
    }

    pub fn index(self) -> usize {
        match self {
            Polarity::Positive => 0,
            Polarity::Negative => 1,
            Polarity::Neutral => 2,
        }
    }

    /// Canonical score for a bare label: +1, -1 or 0.
    pub fn unit_score(self) -> f64 {
        match self {
            Polarity::Positive => 1.0,
            Polarity::Negative => -1.0,
            Polarity::Neutral => 0.0,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Polarity {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive" => Ok(Polarity::Positive),
            "negative" => Ok(Polarity::Negative),
            "neutral" => Ok(Polarity::Neutral),
            _ => Err(UnknownLabel {
                kind: "polarity label",
                value: s.to_owned(),
            }),
        }
    }
}

/// Signed sentiment score in `[-1, 1]` with its ternary label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Valence {
    pub score: f64,
    pub label: Polarity,
}

impl Valence {
    /// Neutrality threshold: only an exactly-zero score is neutral.
    pub const DEFAULT_THRESHOLD: f64 = 0.0;

    pub const NEUTRAL: Valence = Valence {
        score: 0.0,
        label: Polarity::Neutral,
    };

    /// Builds a valence with the default threshold. The score is clamped to
    /// `[-1, 1]`.
    pub fn from_score(score: f64) -> Self {
        Self::with_threshold(score, Self::DEFAULT_THRESHOLD)
    }

    pub fn with_threshold(score: f64, threshold: f64) -> Self {
        let score = if score.is_nan() { 0.0 } else { score.clamp(-1.0, 1.0) };
        // normalise -0.0
        let score = if score == 0.0 { 0.0 } else { score };
        let label = if score > threshold {
            Polarity::Positive
        } else if score < -threshold {
            Polarity::Negative
        } else {
            Polarity::Neutral
        };
        Valence { score, label }
    }

    /// Arithmetic mean of the given scores; an empty input is neutral.
    pub fn mean<I: IntoIterator<Item = f64>>(scores: I) -> Self {
        let (sum, n) = scores
            .into_iter()
            .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
        if n == 0 {
            Valence::NEUTRAL
        } else {
            Valence::from_score(sum / n as f64)
        }
    }
}

/// Ekman's six basic emotions plus `Neutral`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmotionLabel {
    Joy,
    Fear,
    Sadness,
    Anger,
    Disgust,
    Surprise,
    Neutral,
}

impl EmotionLabel {
    pub const ALL: [EmotionLabel; 7] = [
        EmotionLabel::Joy,
        EmotionLabel::Fear,
        EmotionLabel::Sadness,
        EmotionLabel::Anger,
        EmotionLabel::Disgust,
        EmotionLabel::Surprise,
        EmotionLabel::Neutral,
    ];

    /// The six non-neutral emotions in tie-break priority order.
    pub const PRIORITY: [EmotionLabel; 6] = [
        EmotionLabel::Joy,
        EmotionLabel::Sadness,
        EmotionLabel::Anger,
        EmotionLabel::Fear,
        EmotionLabel::Disgust,
        EmotionLabel::Surprise,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EmotionLabel::Joy => "joy",
            EmotionLabel::Fear => "fear",
            EmotionLabel::Sadness => "sadness",
            EmotionLabel::Anger => "anger",
            EmotionLabel::Disgust => "disgust",
            EmotionLabel::Surprise => "surprise",
            EmotionLabel::Neutral => "neutral",
        }
    }

    pub fn is_neutral(self) -> bool {
        self == EmotionLabel::Neutral
    }

    /// Position in [`EmotionLabel::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    /// Rank in the tie-break priority (lower wins). Neutral ranks last.
    pub fn priority(self) -> usize {
        EmotionLabel::PRIORITY
            .iter()
            .position(|&e| e == self)
            .unwrap_or(EmotionLabel::PRIORITY.len())
    }

    /// Parses one of the six Ekman names; `neutral` is rejected.
    pub fn parse_ekman(s: &str) -> Result<Self, UnknownLabel> {
        match s.parse::<EmotionLabel>() {
            Ok(EmotionLabel::Neutral) | Err(_) => Err(UnknownLabel {
                kind: "emotion",
                value: s.to_owned(),
            }),
            Ok(e) => Ok(e),
        }
    }
}

impl fmt::Display for EmotionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EmotionLabel {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EmotionLabel::ALL
            .iter()
            .copied()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| UnknownLabel {
                kind: "emotion",
                value: s.to_owned(),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_follows_score_sign() {
        assert_eq!(Valence::from_score(0.3).label, Polarity::Positive);
        assert_eq!(Valence::from_score(-0.3).label, Polarity::Negative);
        assert_eq!(Valence::from_score(0.0).label, Polarity::Neutral);
        assert_eq!(Valence::from_score(-0.0).score.to_bits(), 0.0f64.to_bits());
    }

    #[test]
    fn mean_of_nothing_is_neutral() {
        assert_eq!(Valence::mean(std::iter::empty()), Valence::NEUTRAL);
        assert_eq!(Valence::mean([1.0, -1.0]), Valence::NEUTRAL);
        assert_eq!(Valence::mean([1.0]).label, Polarity::Positive);
    }

    #[test]
    fn ekman_parse_rejects_neutral() {
        assert!(EmotionLabel::parse_ekman("neutral").is_err());
        assert!(EmotionLabel::parse_ekman("bliss").is_err());
        assert_eq!(EmotionLabel::parse_ekman("joy").unwrap(), EmotionLabel::Joy);
    }

    #[test]
    fn priority_order() {
        let mut all = EmotionLabel::ALL.to_vec();
        all.sort_by_key(|e| e.priority());
        assert_eq!(all[0], EmotionLabel::Joy);
        assert_eq!(all[1], EmotionLabel::Sadness);
        assert_eq!(all[6], EmotionLabel::Neutral);
    }
}
