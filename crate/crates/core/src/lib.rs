//! Sentiment and emotion analysis: a text pipeline, a rule-based valence
//! engine, a keyword emotion detector, a random forest classifier, an
//! EmotionML layer, channel aggregation and evaluation tooling.

pub mod aggregator;
pub mod analyzer;
pub mod corpus;
pub mod emotion;
pub mod emotionml;
pub mod error;
pub mod eval;
pub mod forest;
pub mod gateway;
pub mod label;
pub mod lexicon;
pub mod symbolic;
pub mod synthetic;
pub mod text;
mod tsv;

pub use analyzer::{AnalysisResult, Analyzer, Engine, Resources};
pub use error::DataError;
pub use label::{EmotionLabel, Polarity, Valence};
pub use lexicon::{EmotionLexicon, PolarityLexicon};
pub use symbolic::RuleSet;
pub use text::Pipeline;
