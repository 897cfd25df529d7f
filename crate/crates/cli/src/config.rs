//! Settings from the config file, environment and flags.
//!
//! Flags override environment variables, which override the file.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;
use valence_core::aggregator::AggregatorConfig;
use valence_core::emotion::{EmotionFilters, KeyphraseTable};
use valence_core::emotionml::{Vocabularies, Vocabulary};
use valence_core::forest::ForestModel;
use valence_core::gateway::{IdentityTranslator, MockTranslator, Translator};
use valence_core::text::EmoticonTable;
use valence_core::{EmotionLexicon, PolarityLexicon, Resources, RuleSet};

use crate::CliError;

pub const DEFAULT_HOST: &str = "127.0.0.1";
pub const DEFAULT_PORT: u16 = 8080;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VocabularyConfig {
    pub category_set: Option<String>,
    pub category_items: Option<Vec<String>>,
    pub dimension_set: Option<String>,
    pub dimension_items: Option<Vec<String>>,
}

/// The config file, all keys optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub host: Option<String>,
    pub port: Option<u16>,
    pub polarity_lexicon: Option<PathBuf>,
    pub emotion_lexicon: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub keyphrases: Option<PathBuf>,
    pub emoticons: Option<PathBuf>,
    pub model: Option<PathBuf>,
    /// `identity` or `mock`.
    pub translator: Option<String>,
    /// Language -> word -> English word, for the mock translator.
    pub mock_translations: Option<HashMap<String, HashMap<String, String>>>,
    pub window: Option<f64>,
    pub capacity: Option<usize>,
    pub vocabulary: Option<VocabularyConfig>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }
}

/// Paths given as flags.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub polarity_lexicon: Option<PathBuf>,
    pub emotion_lexicon: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub keyphrases: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub host: Option<String>,
    pub port: Option<u16>,
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub host: String,
    pub port: u16,
    pub polarity_lexicon: Option<PathBuf>,
    pub emotion_lexicon: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub keyphrases: Option<PathBuf>,
    pub emoticons: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub translator: String,
    pub mock_translations: HashMap<String, HashMap<String, String>>,
    pub aggregator: AggregatorConfig,
    pub vocabulary: VocabularyConfig,
}

impl Settings {
    pub fn resolve(
        file: FileConfig,
        flags: Overrides,
        env: impl Fn(&str) -> Option<String>,
    ) -> Result<Self, CliError> {
        let path_env = |key: &str| env(key).filter(|v| !v.is_empty()).map(PathBuf::from);
        let port = match (flags.port, env("VALENCE_PORT")) {
            (Some(p), _) => p,
            (None, Some(v)) => v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("VALENCE_PORT `{v}` is not a port number")))?,
            (None, None) => file.port.unwrap_or(DEFAULT_PORT),
        };
        let defaults = AggregatorConfig::default();
        Ok(Settings {
            host: flags.host.or(file.host).unwrap_or_else(|| DEFAULT_HOST.to_owned()),
            port,
            polarity_lexicon: flags
                .polarity_lexicon
                .or_else(|| path_env("VALENCE_POLARITY_LEXICON"))
                .or(file.polarity_lexicon),
            emotion_lexicon: flags
                .emotion_lexicon
                .or_else(|| path_env("VALENCE_EMOTION_LEXICON"))
                .or(file.emotion_lexicon),
            rules: flags.rules.or_else(|| path_env("VALENCE_RULES")).or(file.rules),
            keyphrases: flags.keyphrases.or(file.keyphrases),
            emoticons: file.emoticons,
            model: flags.model.or_else(|| path_env("VALENCE_MODEL")).or(file.model),
            translator: file.translator.unwrap_or_else(|| "identity".to_owned()),
            mock_translations: file.mock_translations.unwrap_or_default(),
            aggregator: AggregatorConfig {
                window: file.window.unwrap_or(defaults.window),
                capacity: file.capacity.unwrap_or(defaults.capacity),
            },
            vocabulary: file.vocabulary.unwrap_or_default(),
        })
    }

    fn data<T, E: std::fmt::Display>(path: &Path, r: Result<T, E>) -> Result<T, CliError> {
        r.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }

    pub fn resources(&self) -> Result<Resources, CliError> {
        let mut r = Resources::seed();
        if let Some(p) = &self.polarity_lexicon {
            r.polarity = Self::data(p, PolarityLexicon::from_path(p))?;
            for d in r.polarity.diagnostics() {
                log::warn!("{}: line {}: {}", p.display(), d.line, d.message);
            }
        }
        if let Some(p) = &self.emotion_lexicon {
            r.emotions = Self::data(p, EmotionLexicon::from_path(p))?;
        }
        if let Some(p) = &self.rules {
            r.rules = Self::data(p, RuleSet::from_path(p))?;
        }
        let mut filters = EmotionFilters::default();
        if let Some(p) = &self.keyphrases {
            filters.keyphrases = Self::data(p, KeyphraseTable::from_path(p))?;
        }
        if let Some(p) = &self.emoticons {
            let table = Self::data(p, EmoticonTable::from_path(p))?;
            r.pipeline.emoticons = table.clone();
            filters.emoticons = table;
        }
        r.filters = filters;
        if let Some(p) = &self.model {
            r.model = Some(Arc::new(Self::data(p, ForestModel::load(p))?));
        }
        r.vocabularies = self.vocabularies()?;
        Ok(r)
    }

    fn vocabularies(&self) -> Result<Vocabularies, CliError> {
        let mut v = Vocabularies::default();
        let c = &self.vocabulary;
        let pick = |base: &mut Vocabulary, uri: &Option<String>, items: &Option<Vec<String>>| -> Result<(), CliError> {
            if let Some(u) = uri {
                if u.trim().is_empty() {
                    return Err(CliError::Data("vocabulary URI is empty".into()));
                }
                base.uri = u.clone();
            }
            if let Some(i) = items {
                if i.is_empty() {
                    return Err(CliError::Data("vocabulary item list is empty".into()));
                }
                base.items = i.clone();
            }
            Ok(())
        };
        pick(&mut v.category, &c.category_set, &c.category_items)?;
        pick(&mut v.dimension, &c.dimension_set, &c.dimension_items)?;
        Ok(v)
    }

    pub fn translator(&self) -> Result<Arc<dyn Translator>, CliError> {
        match self.translator.as_str() {
            "identity" => Ok(Arc::new(IdentityTranslator)),
            "mock" => Ok(Arc::new(MockTranslator {
                dictionaries: self.mock_translations.clone(),
            })),
            other => Err(CliError::Data(format!("unknown translator `{other}` (expected identity or mock)"))),
        }
    }
}
