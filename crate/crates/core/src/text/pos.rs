use std::collections::HashMap;
use std::io::BufRead;

use super::{EmoticonTable, Pos, Token};
use crate::error::DataError;
use crate::tsv;

const BUNDLED: &str = include_str!("../../data/tags.tsv");

/// Word form to tag table consulted before the suffix heuristics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagLexicon {
    tags: HashMap<String, Pos>,
}

impl TagLexicon {
    /// Reads `surface<TAB>tag` lines; surfaces are lowercased.
    pub fn load<R: BufRead>(source: R) -> Result<Self, DataError> {
        let mut tags = HashMap::new();
        for rec in tsv::read_records(source)? {
            rec.expect_columns(2)?;
            let surface = rec.fields[0].trim().to_lowercase();
            if surface.is_empty() {
                return Err(DataError::line(rec.line, "empty surface"));
            }
            let tag = rec.fields[1]
                .trim()
                .parse::<Pos>()
                .map_err(|e| DataError::line(rec.line, e))?;
            tags.insert(surface, tag);
        }
        Ok(TagLexicon { tags })
    }

    pub fn get(&self, lower: &str) -> Option<Pos> {
        self.tags.get(lower).copied()
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }
}

impl Default for TagLexicon {
    fn default() -> Self {
        TagLexicon::load(BUNDLED.as_bytes()).expect("bundled tag lexicon is valid")
    }
}

/// Tags tokens with the bundled tables.
pub fn pos_tag(tokens: Vec<Token>) -> Vec<Token> {
    pos_tag_with(tokens, &TagLexicon::default(), &EmoticonTable::default())
}

pub(crate) fn pos_tag_with(mut tokens: Vec<Token>, lexicon: &TagLexicon, emoticons: &EmoticonTable) -> Vec<Token> {
    for t in &mut tokens {
        t.pos = tag_one(&t.surface, lexicon, emoticons);
    }
    tokens
}

fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '\u{2018}'..='\u{201F}' | '\u{2010}'..='\u{2015}' | '\u{2026}' | '\u{00AB}' | '\u{00BB}' | '\u{00BF}' | '\u{00A1}'
        )
}

fn tag_one(surface: &str, lexicon: &TagLexicon, emoticons: &EmoticonTable) -> Pos {
    if emoticons.contains(surface) {
        return Pos::Emoticon;
    }
    if surface.chars().all(is_punctuation) {
        return Pos::Punct;
    }
    if !surface.chars().any(char::is_alphanumeric) {
        return Pos::Other;
    }
    if surface.chars().all(|c| c.is_numeric() || c == '.' || c == ',') {
        return Pos::Num;
    }
    let lower = surface.to_lowercase().replace('\u{2019}', "'");
    if let Some(tag) = lexicon.get(&lower) {
        return tag;
    }
    if let Some(tag) = suffix_tag(&lower, lexicon) {
        return tag;
    }
    Pos::Noun
}

fn suffix_tag(lower: &str, lexicon: &TagLexicon) -> Option<Pos> {
    let n = lower.chars().count();
    let ends = |s: &str| lower.ends_with(s) && n > s.len() + 1;
    if ends("ly") {
        return Some(Pos::Adv);
    }
    if ends("ing") || ends("ed") {
        return Some(Pos::Verb);
    }
    if ["ness", "ment", "tion", "sion", "ity", "ism", "ship", "hood", "ance", "ence", "ist"]
        .iter()
        .any(|s| ends(s))
    {
        return Some(Pos::Noun);
    }
    if ["ous", "ful", "ive", "able", "ible", "less", "ical", "ic", "ish", "ary"]
        .iter()
        .any(|s| ends(s))
    {
        return Some(Pos::Adj);
    }
    if ["ize", "ise", "ify"].iter().any(|s| ends(s)) {
        return Some(Pos::Verb);
    }
    // plural nouns and third-person verbs take the tag of their base form
    if let Some(base) = lower.strip_suffix("ies") {
        if let Some(tag @ (Pos::Noun | Pos::Verb)) = lexicon.get(&format!("{base}y")) {
            return Some(tag);
        }
    }
    if let Some(base) = lower.strip_suffix("es") {
        if let Some(tag @ (Pos::Noun | Pos::Verb)) = lexicon.get(base) {
            return Some(tag);
        }
    }
    if let Some(base) = lower.strip_suffix('s') {
        if let Some(tag @ (Pos::Noun | Pos::Verb)) = lexicon.get(base) {
            return Some(tag);
        }
    }
    if ends("er") || ends("or") {
        return Some(Pos::Noun);
    }
    None
}
