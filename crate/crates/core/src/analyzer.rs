//! One entry point over the four engines.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::emotion::{detect_emotion, emotion_to_valence, EmotionAnalysis, EmotionFilters};
use crate::emotionml::{emit_category_doc, emit_dimension_doc, EmotionDocument, Vocabularies};
use crate::eval::TernaryClassifier;
use crate::forest::{ForestModel, Prediction};
use crate::label::{Polarity, Valence};
use crate::lexicon::{EmotionLexicon, PolarityLexicon};
use crate::symbolic::{analyze_sentiment_symbolic, lexical_baseline, RuleSet, SymbolicAnalysis};
use crate::text::Pipeline;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Lexical,
    Symbolic,
    Statistical,
    Emotion,
}

impl Engine {
    pub const ALL: [Engine; 4] = [Engine::Lexical, Engine::Symbolic, Engine::Statistical, Engine::Emotion];

    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Lexical => "lexical",
            Engine::Symbolic => "symbolic",
            Engine::Statistical => "statistical",
            Engine::Emotion => "emotion",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown engine `{0}` (expected lexical, symbolic, statistical or emotion)")]
pub struct UnknownEngine(pub String);

impl FromStr for Engine {
    type Err = UnknownEngine;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Engine::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| UnknownEngine(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("the statistical engine needs a trained model")]
    NoModel,
}

/// Everything the engines read. Immutable once built.
#[derive(Debug, Clone, Default)]
pub struct Resources {
    pub pipeline: Pipeline,
    pub polarity: PolarityLexicon,
    pub emotions: EmotionLexicon,
    pub rules: RuleSet,
    pub filters: EmotionFilters,
    pub model: Option<Arc<ForestModel>>,
    pub vocabularies: Vocabularies,
}

impl Resources {
    /// Bundled seed lexicons, built-in rules and no model.
    pub fn seed() -> Self {
        Resources {
            polarity: PolarityLexicon::seed(),
            emotions: EmotionLexicon::seed(),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Detail {
    Lexical,
    Symbolic(SymbolicAnalysis),
    Statistical(Prediction),
    Emotion(EmotionAnalysis),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisResult {
    pub engine: Engine,
    pub valence: Valence,
    pub detail: Detail,
}

impl AnalysisResult {
    /// Category form for the emotion engine, valence dimension otherwise.
    pub fn to_document(&self, vocab: &Vocabularies) -> EmotionDocument {
        match &self.detail {
            Detail::Emotion(e) => emit_category_doc(e.outcome.label, e.outcome.confidence, vocab),
            _ => emit_dimension_doc(self.valence, vocab),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Analyzer {
    pub resources: Resources,
}

impl Analyzer {
    pub fn new(resources: Resources) -> Self {
        Analyzer { resources }
    }

    pub fn seed() -> Self {
        Self::new(Resources::seed())
    }

    pub fn analyze(&self, text: &str, engine: Engine) -> Result<AnalysisResult, AnalysisError> {
        let r = &self.resources;
        let (valence, detail) = match engine {
            Engine::Lexical => (lexical_baseline(text, &r.pipeline, &r.polarity), Detail::Lexical),
            Engine::Symbolic => {
                let a = analyze_sentiment_symbolic(text, &r.pipeline, &r.polarity, &r.rules);
                (a.valence, Detail::Symbolic(a))
            }
            Engine::Statistical => {
                let model = r.model.as_ref().ok_or(AnalysisError::NoModel)?;
                let p = model.predict_text(text, &r.pipeline);
                (p.valence(), Detail::Statistical(p))
            }
            Engine::Emotion => {
                let e = detect_emotion(text, &r.pipeline, &r.emotions, &r.filters);
                (emotion_to_valence(e.outcome.label), Detail::Emotion(e))
            }
        };
        Ok(AnalysisResult { engine, valence, detail })
    }

    /// Ternary view of one engine, for the evaluation harness.
    pub fn classifier(&self, engine: Engine) -> Result<EngineClassifier<'_>, AnalysisError> {
        if engine == Engine::Statistical && self.resources.model.is_none() {
            return Err(AnalysisError::NoModel);
        }
        Ok(EngineClassifier { analyzer: self, engine })
    }
}

pub struct EngineClassifier<'a> {
    analyzer: &'a Analyzer,
    engine: Engine,
}

impl TernaryClassifier for EngineClassifier<'_> {
    fn engine_id(&self) -> String {
        self.engine.as_str().to_owned()
    }

    fn classify(&self, text: &str) -> Polarity {
        self.analyzer
            .analyze(text, self.engine)
            .expect("model presence checked when the classifier was built")
            .valence
            .label
    }
}
