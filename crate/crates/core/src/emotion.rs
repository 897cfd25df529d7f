//! Keyword-spotting emotion detector.
//!
//! Hits come from the emotion lexicon, the emoticon table and a keyphrase
//! list. A lexicon or smiley hit preceded by a negation particle within
//! three tokens is inverted before the hits are resolved to a single
//! emotion by frequency.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::DataError;
use crate::label::{EmotionLabel, Valence};
use crate::lexicon::EmotionLexicon;
use crate::text::{normalize, tokenize, EmoticonTable, Pipeline, Pos, Sentence, Span};
use crate::tsv;

const BUNDLED_KEYPHRASES: &str = include_str!("../data/keyphrases.tsv");

const NEGATION_PARTICLES: &[&str] = &["not", "n't", "no", "never", "nobody"];

/// How many preceding tokens are searched for a negation particle.
pub const NEGATION_WINDOW: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HitOrigin {
    Lexicon,
    Smiley,
    Keyphrase,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmotionHit {
    /// Matched token, or first token of a keyphrase.
    pub token: Option<usize>,
    /// The keyphrase for keyphrase hits.
    pub filter: Option<String>,
    pub emotion: EmotionLabel,
    pub origin: HitOrigin,
    pub negated: bool,
}

impl EmotionHit {
    /// The emotion after applying negation.
    pub fn effective(&self) -> EmotionLabel {
        if self.negated {
            invert_emotion(self.emotion)
        } else {
            self.emotion
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Keyphrase {
    words: Vec<String>,
    phrase: String,
    emotion: EmotionLabel,
}

/// Exact lowercase multi-token phrases.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KeyphraseTable {
    phrases: Vec<Keyphrase>,
}

impl KeyphraseTable {
    /// Reads `phrase<TAB>emotion` lines.
    pub fn load<R: BufRead>(source: R) -> Result<Self, DataError> {
        let mut phrases = Vec::new();
        for rec in tsv::read_records(source)? {
            rec.expect_columns(2)?;
            let phrase = normalize(rec.fields[0].trim()).to_lowercase();
            let words: Vec<String> = tokenize(&phrase).into_iter().map(|t| t.surface).collect();
            if words.is_empty() {
                return Err(DataError::line(rec.line, "empty keyphrase"));
            }
            let emotion = EmotionLabel::parse_ekman(rec.fields[1].trim())
                .map_err(|e| DataError::line(rec.line, e.to_string()))?;
            phrases.push(Keyphrase { words, phrase, emotion });
        }
        Ok(KeyphraseTable { phrases })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, DataError> {
        Self::load(BufReader::new(File::open(path)?))
    }

    pub fn bundled() -> Self {
        Self::load(BUNDLED_KEYPHRASES.as_bytes()).expect("bundled keyphrases are valid")
    }

    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }
}

/// Smiley and keyphrase filters applied alongside the lexicon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmotionFilters {
    pub emoticons: EmoticonTable,
    pub keyphrases: KeyphraseTable,
}

impl Default for EmotionFilters {
    fn default() -> Self {
        EmotionFilters {
            emoticons: EmoticonTable::default(),
            keyphrases: KeyphraseTable::bundled(),
        }
    }
}

fn is_negation_particle(surface: &str) -> bool {
    let lower = surface.to_lowercase().replace('\u{2019}', "'");
    NEGATION_PARTICLES.contains(&lower.as_str())
}

fn negated_at(sentence: &Sentence, index: usize) -> bool {
    let from = index.saturating_sub(NEGATION_WINDOW);
    sentence.tokens[from..index]
        .iter()
        .any(|t| is_negation_particle(&t.surface))
}

pub fn detect_hits(sentence: &Sentence, lexicon: &EmotionLexicon, filters: &EmotionFilters) -> Vec<EmotionHit> {
    let mut hits = Vec::new();
    for t in &sentence.tokens {
        let found = if t.pos == Pos::Emoticon {
            filters.emoticons.get(&t.surface).map(|e| (e, HitOrigin::Smiley))
        } else {
            lexicon.lookup(t).map(|e| (e, HitOrigin::Lexicon))
        };
        if let Some((emotion, origin)) = found {
            hits.push(EmotionHit {
                token: Some(t.index),
                filter: None,
                emotion,
                origin,
                negated: negated_at(sentence, t.index),
            });
        }
    }

    let lowered: Vec<String> = sentence.tokens.iter().map(|t| t.surface.to_lowercase()).collect();
    for kp in &filters.keyphrases.phrases {
        let n = kp.words.len();
        if n > lowered.len() {
            continue;
        }
        for start in 0..=lowered.len() - n {
            if lowered[start..start + n] == kp.words[..] {
                hits.push(EmotionHit {
                    token: Some(start),
                    filter: Some(kp.phrase.clone()),
                    emotion: kp.emotion,
                    origin: HitOrigin::Keyphrase,
                    negated: false,
                });
            }
        }
    }
    hits
}

/// joy and sadness are mutual opposites; a negated fear, anger, disgust or
/// surprise becomes neutral.
pub fn invert_emotion(label: EmotionLabel) -> EmotionLabel {
    match label {
        EmotionLabel::Joy => EmotionLabel::Sadness,
        EmotionLabel::Sadness => EmotionLabel::Joy,
        _ => EmotionLabel::Neutral,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmotionOutcome {
    pub label: EmotionLabel,
    /// Winner count over all non-neutral votes.
    pub confidence: f64,
}

impl EmotionOutcome {
    pub const NEUTRAL: EmotionOutcome = EmotionOutcome {
        label: EmotionLabel::Neutral,
        confidence: 1.0,
    };
}

/// Most frequent non-neutral label, ties broken by
/// [`EmotionLabel::PRIORITY`].
pub fn resolve_labels<I: IntoIterator<Item = EmotionLabel>>(labels: I) -> EmotionOutcome {
    let mut counts = [0usize; 7];
    for l in labels {
        counts[l.index()] += 1;
    }
    let total: usize = EmotionLabel::PRIORITY.iter().map(|e| counts[e.index()]).sum();
    if total == 0 {
        return EmotionOutcome::NEUTRAL;
    }
    // PRIORITY order plus strict `>` keeps the higher-priority label on ties
    let mut best = EmotionLabel::PRIORITY[0];
    for &e in &EmotionLabel::PRIORITY[1..] {
        if counts[e.index()] > counts[best.index()] {
            best = e;
        }
    }
    EmotionOutcome {
        label: best,
        confidence: counts[best.index()] as f64 / total as f64,
    }
}

pub fn resolve_emotion(hits: &[EmotionHit]) -> EmotionOutcome {
    resolve_labels(hits.iter().map(EmotionHit::effective))
}

/// joy is positive, neutral is neutral, every other emotion is negative.
pub fn emotion_to_valence(label: EmotionLabel) -> Valence {
    match label {
        EmotionLabel::Joy => Valence::from_score(1.0),
        EmotionLabel::Neutral => Valence::NEUTRAL,
        _ => Valence::from_score(-1.0),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceEmotion {
    pub span: Span,
    pub hits: Vec<EmotionHit>,
    pub outcome: EmotionOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmotionAnalysis {
    pub sentences: Vec<SentenceEmotion>,
    /// Resolution over the sentence winners.
    pub outcome: EmotionOutcome,
}

pub fn detect_emotion(
    text: &str,
    pipeline: &Pipeline,
    lexicon: &EmotionLexicon,
    filters: &EmotionFilters,
) -> EmotionAnalysis {
    let sentences: Vec<SentenceEmotion> = pipeline
        .sentences(text)
        .iter()
        .map(|s| {
            let hits = detect_hits(s, lexicon, filters);
            SentenceEmotion {
                span: s.source_span.clone(),
                outcome: resolve_emotion(&hits),
                hits,
            }
        })
        .collect();
    let outcome = resolve_labels(sentences.iter().map(|s| s.outcome.label));
    EmotionAnalysis { sentences, outcome }
}
