//! Linguistic preprocessing: tokenization, sentence splitting, POS tagging,
//! stemming and a shallow adjacency-based dependency extraction.

mod emoticons;
mod parse;
pub mod porter;
mod pos;
mod sentences;
mod tokenize;

use std::fmt;
use std::io::BufRead;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::DataError;

pub use emoticons::EmoticonTable;
pub use parse::{clause_ranges, is_negator, shallow_parse};
pub use porter::stem;
pub use pos::{pos_tag, TagLexicon};
pub use sentences::split_sentences;
pub use tokenize::tokenize;

/// Coarse part-of-speech tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Pos {
    Noun,
    Verb,
    Adj,
    Adv,
    Part,
    Pron,
    Det,
    Adp,
    Conj,
    Num,
    Punct,
    Emoticon,
    Other,
}

impl Pos {
    pub const ALL: [Pos; 13] = [
        Pos::Noun,
        Pos::Verb,
        Pos::Adj,
        Pos::Adv,
        Pos::Part,
        Pos::Pron,
        Pos::Det,
        Pos::Adp,
        Pos::Conj,
        Pos::Num,
        Pos::Punct,
        Pos::Emoticon,
        Pos::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Noun => "NOUN",
            Pos::Verb => "VERB",
            Pos::Adj => "ADJ",
            Pos::Adv => "ADV",
            Pos::Part => "PART",
            Pos::Pron => "PRON",
            Pos::Det => "DET",
            Pos::Adp => "ADP",
            Pos::Conj => "CONJ",
            Pos::Num => "NUM",
            Pos::Punct => "PUNCT",
            Pos::Emoticon => "EMOTICON",
            Pos::Other => "OTHER",
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pos::ALL
            .iter()
            .copied()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown POS tag `{s}`"))
    }
}

/// Byte offsets into the NFC-normalized text, `start` inclusive.
pub type Span = Range<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub stem: String,
    pub pos: Pos,
    pub span: Span,
    pub index: usize,
}

impl Token {
    /// A token with only its surface and span filled in.
    pub fn raw(surface: impl Into<String>, span: Span, index: usize) -> Self {
        Token {
            surface: surface.into(),
            stem: String::new(),
            pos: Pos::Other,
            span,
            index,
        }
    }

    pub fn lower(&self) -> String {
        self.surface.to_lowercase()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Neg,
    Amod,
    Dobj,
    Nsubj,
    Advmod,
    ConjBut,
}

impl Relation {
    pub const ALL: [Relation; 6] = [
        Relation::Neg,
        Relation::Amod,
        Relation::Dobj,
        Relation::Nsubj,
        Relation::Advmod,
        Relation::ConjBut,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Neg => "neg",
            Relation::Amod => "amod",
            Relation::Dobj => "dobj",
            Relation::Nsubj => "nsubj",
            Relation::Advmod => "advmod",
            Relation::ConjBut => "conj_but",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Relation::ALL
            .iter()
            .copied()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown relation `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DependencyEdge {
    pub relation: Relation,
    pub governor: usize,
    pub dependent: usize,
}

impl fmt::Display for DependencyEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}, {})", self.relation, self.governor, self.dependent)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub tokens: Vec<Token>,
    pub edges: Vec<DependencyEdge>,
    pub source_span: Span,
}

impl Sentence {
    pub fn edges_of(&self, relation: Relation) -> impl Iterator<Item = &DependencyEdge> {
        self.edges.iter().filter(move |e| e.relation == relation)
    }
}

/// NFC normalization applied before any spans are computed.
pub fn normalize(text: &str) -> String {
    text.nfc().collect()
}

/// The full preprocessing chain with its two data tables.
#[derive(Debug, Clone, Default)]
pub struct Pipeline {
    pub tags: TagLexicon,
    pub emoticons: EmoticonTable,
}

impl Pipeline {
    pub fn new(tags: TagLexicon, emoticons: EmoticonTable) -> Self {
        Pipeline { tags, emoticons }
    }

    pub fn with_tag_lexicon<R: BufRead>(mut self, source: R) -> Result<Self, DataError> {
        self.tags = TagLexicon::load(source)?;
        Ok(self)
    }

    pub fn with_emoticons<R: BufRead>(mut self, source: R) -> Result<Self, DataError> {
        self.emoticons = EmoticonTable::load(source)?;
        Ok(self)
    }

    /// Tokenizes, tags, stems and parses a single sentence of already
    /// normalized text. Spans are relative to `text`.
    pub fn sentence(&self, text: &str) -> Sentence {
        self.sentence_at(text, 0..text.len())
    }

    fn sentence_at(&self, doc: &str, span: Span) -> Sentence {
        let offset = span.start;
        let mut tokens = tokenize::tokenize_with(&doc[span.clone()], &self.emoticons);
        for t in &mut tokens {
            t.span = t.span.start + offset..t.span.end + offset;
            t.stem = stem(&t.surface);
        }
        let tokens = pos::pos_tag_with(tokens, &self.tags, &self.emoticons);
        let mut sentence = Sentence {
            tokens,
            edges: Vec::new(),
            source_span: span,
        };
        sentence.edges = shallow_parse(&sentence);
        sentence
    }

    /// Normalizes `text` and runs the full chain sentence by sentence.
    /// Returns the normalized text the spans refer to.
    pub fn process(&self, text: &str) -> (String, Vec<Sentence>) {
        let normalized = normalize(text);
        let sentences = split_sentences(&normalized)
            .into_iter()
            .map(|span| self.sentence_at(&normalized, span))
            .collect();
        (normalized, sentences)
    }

    pub fn sentences(&self, text: &str) -> Vec<Sentence> {
        self.process(text).1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pipeline() -> Pipeline {
        Pipeline::default()
    }

    #[test]
    fn pipeline_fills_everything() {
        let s = pipeline().sentence("it's not good");
        let surfaces: Vec<_> = s.tokens.iter().map(|t| t.surface.as_str()).collect();
        assert_eq!(surfaces, ["it", "'s", "not", "good"]);
        assert_eq!(s.tokens[3].pos, Pos::Adj);
        assert_eq!(s.tokens[2].pos, Pos::Part);
        assert!(s.edges.contains(&DependencyEdge {
            relation: Relation::Neg,
            governor: 3,
            dependent: 2
        }));
        assert!(s.tokens.iter().all(|t| !t.stem.is_empty()));
    }

    #[test]
    fn document_spans_are_absolute() {
        let (norm, sents) = pipeline().process("It is good. It is bad.");
        assert_eq!(sents.len(), 2);
        let bad = &sents[1].tokens[2];
        assert_eq!(&norm[bad.span.clone()], "bad");
    }

    #[test]
    fn nfc_before_spans() {
        // "e" + combining acute accent
        let (norm, sents) = pipeline().process("cafe\u{301} ok");
        assert_eq!(norm, "caf\u{e9} ok");
        assert_eq!(sents[0].tokens[0].surface, "caf\u{e9}");
        assert_eq!(sents[0].tokens[1].span, 6..8);
    }
}
