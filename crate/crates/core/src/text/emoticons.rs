use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::DataError;
use crate::label::EmotionLabel;
use crate::tsv;

const BUNDLED: &str = include_str!("../../data/emoticons.tsv");

/// Emoticon surface forms and the emotion each one signals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmoticonTable {
    entries: BTreeMap<String, EmotionLabel>,
    /// Surfaces sorted longest first so matching is greedy.
    by_length: Vec<String>,
}

impl EmoticonTable {
    /// Reads `emoticon<TAB>emotion` lines. Emoticons are case-sensitive.
    pub fn load<R: BufRead>(source: R) -> Result<Self, DataError> {
        let mut entries = BTreeMap::new();
        for rec in tsv::read_records(source)? {
            rec.expect_columns(2)?;
            let surface = rec.fields[0].trim();
            if surface.is_empty() || surface.chars().any(char::is_whitespace) {
                return Err(DataError::line(rec.line, "emoticon must be non-empty without whitespace"));
            }
            let emotion = EmotionLabel::parse_ekman(rec.fields[1].trim())
                .map_err(|e| DataError::line(rec.line, e.to_string()))?;
            entries.insert(surface.to_owned(), emotion);
        }
        Ok(Self::from_entries(entries))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, DataError> {
        Self::load(BufReader::new(File::open(path)?))
    }

    fn from_entries(entries: BTreeMap<String, EmotionLabel>) -> Self {
        let mut by_length: Vec<String> = entries.keys().cloned().collect();
        by_length.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        EmoticonTable { entries, by_length }
    }

    pub fn get(&self, surface: &str) -> Option<EmotionLabel> {
        self.entries.get(surface).copied()
    }

    pub fn contains(&self, surface: &str) -> bool {
        self.entries.contains_key(surface)
    }

    /// Longest emoticon that `text` starts with.
    pub fn match_prefix(&self, text: &str) -> Option<&str> {
        self.by_length
            .iter()
            .find(|e| text.starts_with(e.as_str()))
            .map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, EmotionLabel)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl Default for EmoticonTable {
    fn default() -> Self {
        EmoticonTable::load(BUNDLED.as_bytes()).expect("bundled emoticon table is valid")
    }
}
