//! Prior-polarity and emotion lexicons.
//!
//! Both are read from UTF-8 `key<TAB>value` files with `#` comments. Keys
//! are stored lowercase. Lookup tries the lowercased surface first and
//! falls back to the token's stem.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::DataError;
use crate::label::EmotionLabel;
use crate::text::Token;
use crate::tsv;

const SEED_POLARITY: &str = include_str!("../data/polarity.tsv");
const SEED_EMOTIONS: &str = include_str!("../data/emotions.tsv");

/// Non-fatal problem found while loading, such as a duplicate key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon<V> {
    entries: BTreeMap<String, V>,
    diagnostics: Vec<Diagnostic>,
}

pub type PolarityLexicon = Lexicon<f64>;
pub type EmotionLexicon = Lexicon<EmotionLabel>;

impl<V: Copy> Lexicon<V> {
    fn load_with<R, F>(source: R, parse: F) -> Result<Self, DataError>
    where
        R: BufRead,
        F: Fn(&str) -> Result<V, String>,
    {
        let mut entries = BTreeMap::new();
        let mut diagnostics = Vec::new();
        for rec in tsv::read_records(source)? {
            rec.expect_columns(2)?;
            let key = rec.fields[0].trim().to_lowercase();
            if key.is_empty() {
                return Err(DataError::line(rec.line, "empty key"));
            }
            let value = parse(rec.fields[1].trim()).map_err(|m| DataError::line(rec.line, m))?;
            if entries.insert(key.clone(), value).is_some() {
                log::warn!("lexicon line {}: duplicate key `{key}`, keeping the later entry", rec.line);
                diagnostics.push(Diagnostic {
                    line: rec.line,
                    message: format!("duplicate key `{key}`; later entry wins"),
                });
            }
        }
        Ok(Lexicon { entries, diagnostics })
    }

    pub fn get(&self, key: &str) -> Option<V> {
        self.entries.get(key).copied()
    }

    /// Surface match first, then stem match.
    pub fn lookup(&self, token: &Token) -> Option<V> {
        let surface = token.surface.to_lowercase();
        self.get(&surface).or_else(|| self.get(&token.stem))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, V)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn diagnostics(&self) -> &[Diagnostic] {
        &self.diagnostics
    }
}

impl<V> Default for Lexicon<V> {
    fn default() -> Self {
        Lexicon {
            entries: BTreeMap::new(),
            diagnostics: Vec::new(),
        }
    }
}

fn parse_prior(field: &str) -> Result<f64, String> {
    let v: f64 = field
        .parse()
        .map_err(|_| format!("polarity `{field}` is not a number"))?;
    if !v.is_finite() || v.abs() > 1.0 {
        return Err(format!("polarity {field} outside [-1, 1]"));
    }
    Ok(v)
}

impl PolarityLexicon {
    pub fn load<R: BufRead>(source: R) -> Result<Self, DataError> {
        Self::load_with(source, parse_prior)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, DataError> {
        Self::load(BufReader::new(File::open(path)?))
    }

    /// The bundled seed lexicon.
    pub fn seed() -> Self {
        Self::load(SEED_POLARITY.as_bytes()).expect("seed polarity lexicon is valid")
    }

    /// Writes the lexicon back in the file format `load` reads.
    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (k, v) in &self.entries {
            writeln!(out, "{k}\t{v:?}")?;
        }
        Ok(())
    }
}

impl EmotionLexicon {
    pub fn load<R: BufRead>(source: R) -> Result<Self, DataError> {
        Self::load_with(source, |f| EmotionLabel::parse_ekman(f).map_err(|e| e.to_string()))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, DataError> {
        Self::load(BufReader::new(File::open(path)?))
    }

    pub fn seed() -> Self {
        Self::load(SEED_EMOTIONS.as_bytes()).expect("seed emotion lexicon is valid")
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (k, v) in &self.entries {
            writeln!(out, "{k}\t{v}")?;
        }
        Ok(())
    }
}

/// Prior polarity of `token`: surface match, else stem match.
pub fn lookup_prior(lexicon: &PolarityLexicon, token: &Token) -> Option<f64> {
    lexicon.lookup(token)
}

pub fn lookup_emotion(lexicon: &EmotionLexicon, token: &Token) -> Option<EmotionLabel> {
    lexicon.lookup(token)
}
