//! EmotionML documents: construction, serialization and validation.
//!
//! Vocabularies are declared locally and never fetched. Only what the
//! service emits is supported: one `emotion` holding `category` and
//! `dimension` descriptors.

use std::collections::HashSet;
use std::fmt;
use std::io::Cursor;

use quick_xml::events::{BytesDecl, BytesStart, Event};
use quick_xml::name::{Namespace, ResolveResult};
use quick_xml::reader::NsReader;
use quick_xml::Writer;
use serde::{Deserialize, Serialize};

use crate::label::{EmotionLabel, Valence};

pub const NAMESPACE: &str = "http://www.w3.org/2009/10/emotionml";
pub const MEDIA_TYPE: &str = "application/emotionml+xml";
pub const FALLBACK_MEDIA_TYPE: &str = "application/xml";
pub const BIG6_URI: &str = "http://www.w3.org/TR/emotion-voc/xml#big6";
pub const FSRE_DIMENSIONS_URI: &str = "http://www.w3.org/TR/emotion-voc/xml#fsre-dimensions";
pub const VALENCE_DIMENSION: &str = "valence";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub uri: String,
    pub items: Vec<String>,
}

impl Vocabulary {
    pub fn new(uri: impl Into<String>, items: &[&str]) -> Self {
        Vocabulary {
            uri: uri.into(),
            items: items.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn big6() -> Self {
        let names: Vec<&str> = EmotionLabel::PRIORITY.iter().map(|e| e.as_str()).collect();
        Self::new(BIG6_URI, &names)
    }

    pub fn fsre_dimensions() -> Self {
        Self::new(FSRE_DIMENSIONS_URI, &["valence", "potency", "arousal", "unpredictability"])
    }

    pub fn contains(&self, name: &str) -> bool {
        self.items.iter().any(|i| i == name)
    }
}

/// The category and dimension sets used for emitting and validating.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabularies {
    pub category: Vocabulary,
    pub dimension: Vocabulary,
}

impl Default for Vocabularies {
    fn default() -> Self {
        Vocabularies {
            category: Vocabulary::big6(),
            dimension: Vocabulary::fsre_dimensions(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Category {
    pub name: String,
    pub confidence: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dimension {
    pub name: String,
    pub value: f64,
    pub confidence: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EmotionDocument {
    pub category_set: Option<String>,
    pub dimension_set: Option<String>,
    pub categories: Vec<Category>,
    pub dimensions: Vec<Dimension>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorClass {
    Malformed,
    WrongNamespace,
    OutOfRange,
    UnknownName,
    UnknownVocabulary,
    DuplicateName,
    NoDescriptor,
}

impl ErrorClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorClass::Malformed => "malformed",
            ErrorClass::WrongNamespace => "wrong-namespace",
            ErrorClass::OutOfRange => "out-of-range",
            ErrorClass::UnknownName => "unknown-name",
            ErrorClass::UnknownVocabulary => "unknown-vocabulary",
            ErrorClass::DuplicateName => "duplicate-name",
            ErrorClass::NoDescriptor => "no-descriptor",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationError {
    pub class: ErrorClass,
    pub message: String,
}

impl ValidationError {
    fn new(class: ErrorClass, message: impl Into<String>) -> Self {
        ValidationError {
            class,
            message: message.into(),
        }
    }
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.class.as_str(), self.message)
    }
}

/// Maps a score in [-1, 1] onto [0, 1].
pub fn valence_to_unit(score: f64) -> f64 {
    (score + 1.0) / 2.0
}

pub fn emit_dimension_doc(valence: Valence, vocab: &Vocabularies) -> EmotionDocument {
    EmotionDocument {
        category_set: None,
        dimension_set: Some(vocab.dimension.uri.clone()),
        categories: Vec::new(),
        dimensions: vec![Dimension {
            name: VALENCE_DIMENSION.to_owned(),
            value: valence_to_unit(valence.score),
            confidence: None,
        }],
    }
}

/// A category document; neutral becomes the dimension form at 0.5.
pub fn emit_category_doc(label: EmotionLabel, confidence: f64, vocab: &Vocabularies) -> EmotionDocument {
    if label.is_neutral() {
        return emit_dimension_doc(Valence::NEUTRAL, vocab);
    }
    EmotionDocument {
        category_set: Some(vocab.category.uri.clone()),
        dimension_set: None,
        categories: vec![Category {
            name: label.as_str().to_owned(),
            confidence: Some(confidence),
        }],
        dimensions: Vec::new(),
    }
}

fn in_unit(v: f64) -> bool {
    (0.0..=1.0).contains(&v)
}

/// Checks descriptor presence, ranges, name uniqueness and vocabulary
/// membership, returning every violation found.
pub fn validate(doc: &EmotionDocument, vocab: &Vocabularies) -> Vec<ValidationError> {
    use ErrorClass::*;
    let mut errors = Vec::new();
    if doc.categories.is_empty() && doc.dimensions.is_empty() {
        errors.push(ValidationError::new(NoDescriptor, "emotion has no descriptor"));
    }

    let check_set = |set: &Option<String>, known: &Vocabulary, kind: &str, used: bool, errors: &mut Vec<_>| -> bool {
        match set {
            Some(uri) if *uri == known.uri => true,
            Some(uri) => {
                errors.push(ValidationError::new(UnknownVocabulary, format!("{kind} set `{uri}` is not declared")));
                false
            }
            None if used => {
                errors.push(ValidationError::new(UnknownVocabulary, format!("{kind} used without a {kind} set")));
                false
            }
            None => false,
        }
    };
    let cat_ok = check_set(&doc.category_set, &vocab.category, "category", !doc.categories.is_empty(), &mut errors);
    let dim_ok = check_set(&doc.dimension_set, &vocab.dimension, "dimension", !doc.dimensions.is_empty(), &mut errors);

    let mut seen = HashSet::new();
    for c in &doc.categories {
        if !seen.insert(c.name.as_str()) {
            errors.push(ValidationError::new(DuplicateName, format!("category `{}` repeated", c.name)));
        }
        if cat_ok && !vocab.category.contains(&c.name) {
            errors.push(ValidationError::new(UnknownName, format!("category `{}` not in vocabulary", c.name)));
        }
        if let Some(conf) = c.confidence {
            if !in_unit(conf) {
                errors.push(ValidationError::new(OutOfRange, format!("category confidence {conf} outside [0, 1]")));
            }
        }
    }
    let mut seen = HashSet::new();
    for d in &doc.dimensions {
        if !seen.insert(d.name.as_str()) {
            errors.push(ValidationError::new(DuplicateName, format!("dimension `{}` repeated", d.name)));
        }
        if dim_ok && !vocab.dimension.contains(&d.name) {
            errors.push(ValidationError::new(UnknownName, format!("dimension `{}` not in vocabulary", d.name)));
        }
        if !in_unit(d.value) {
            errors.push(ValidationError::new(OutOfRange, format!("dimension value {} outside [0, 1]", d.value)));
        }
        if let Some(conf) = d.confidence {
            if !in_unit(conf) {
                errors.push(ValidationError::new(OutOfRange, format!("dimension confidence {conf} outside [0, 1]")));
            }
        }
    }
    errors
}

/// Shortest decimal that parses back to the same value.
fn number(v: f64) -> String {
    format!("{v}")
}

/// Serializes a valid document. Attribute order is fixed.
pub fn serialize(doc: &EmotionDocument, vocab: &Vocabularies) -> Result<String, Vec<ValidationError>> {
    let errors = validate(doc, vocab);
    if !errors.is_empty() {
        return Err(errors);
    }
    let mut w = Writer::new_with_indent(Cursor::new(Vec::new()), b' ', 2);
    let io = |e: std::io::Error| vec![ValidationError::new(ErrorClass::Malformed, e.to_string())];

    w.write_event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None))).map_err(io)?;
    let mut root = BytesStart::new("emotionml");
    root.push_attribute(("xmlns", NAMESPACE));
    root.push_attribute(("version", "1.0"));
    if let Some(s) = &doc.category_set {
        root.push_attribute(("category-set", s.as_str()));
    }
    if let Some(s) = &doc.dimension_set {
        root.push_attribute(("dimension-set", s.as_str()));
    }
    w.write_event(Event::Start(root)).map_err(io)?;
    w.write_event(Event::Start(BytesStart::new("emotion"))).map_err(io)?;
    for c in &doc.categories {
        let mut e = BytesStart::new("category");
        e.push_attribute(("name", c.name.as_str()));
        if let Some(conf) = c.confidence {
            e.push_attribute(("confidence", number(conf).as_str()));
        }
        w.write_event(Event::Empty(e)).map_err(io)?;
    }
    for d in &doc.dimensions {
        let mut e = BytesStart::new("dimension");
        e.push_attribute(("name", d.name.as_str()));
        e.push_attribute(("value", number(d.value).as_str()));
        if let Some(conf) = d.confidence {
            e.push_attribute(("confidence", number(conf).as_str()));
        }
        w.write_event(Event::Empty(e)).map_err(io)?;
    }
    w.write_event(Event::End(BytesStart::new("emotion").to_end())).map_err(io)?;
    w.write_event(Event::End(BytesStart::new("emotionml").to_end())).map_err(io)?;
    let mut out = String::from_utf8(w.into_inner().into_inner()).expect("writer emits UTF-8");
    out.push('\n');
    Ok(out)
}

struct Attrs {
    pairs: Vec<(String, String)>,
}

impl Attrs {
    fn read(e: &BytesStart<'_>) -> Result<Self, String> {
        let mut pairs = Vec::new();
        for a in e.attributes() {
            let a = a.map_err(|e| e.to_string())?;
            let key = String::from_utf8_lossy(a.key.as_ref()).into_owned();
            if key == "xmlns" || key.starts_with("xmlns:") {
                continue;
            }
            let value = a.unescape_value().map_err(|e| e.to_string())?.into_owned();
            pairs.push((key, value));
        }
        Ok(Attrs { pairs })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.pairs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn number(&self, key: &str, errors: &mut Vec<ValidationError>) -> Option<f64> {
        let raw = self.get(key)?;
        match raw.trim().parse::<f64>() {
            Ok(v) => Some(v),
            Err(_) => {
                errors.push(ValidationError::new(ErrorClass::Malformed, format!("{key} `{raw}` is not a number")));
                // keeps the descriptor so later checks still run
                Some(f64::NAN)
            }
        }
    }
}

/// Parses EmotionML and validates it against `vocab`, collecting every
/// violation. Malformed XML stops parsing at the first syntax error.
pub fn parse_and_validate(xml: &str, vocab: &Vocabularies) -> Result<EmotionDocument, Vec<ValidationError>> {
    use ErrorClass::*;
    let mut reader = NsReader::from_str(xml);
    reader.config_mut().trim_text(true);
    let mut errors = Vec::new();
    let mut doc = EmotionDocument::default();
    let mut depth = 0usize;
    let mut seen_root = false;
    let mut emotions = 0usize;

    loop {
        let (ns, event) = match reader.read_resolved_event() {
            Ok(x) => x,
            Err(e) => {
                errors.push(ValidationError::new(Malformed, format!("at byte {}: {e}", reader.buffer_position())));
                return Err(errors);
            }
        };
        let (start, empty) = match &event {
            Event::Start(e) => (Some(e.clone()), false),
            Event::Empty(e) => (Some(e.clone()), true),
            Event::End(_) => {
                depth -= 1;
                continue;
            }
            Event::Text(t) => {
                let text = String::from_utf8_lossy(t.as_ref()).into_owned();
                errors.push(ValidationError::new(Malformed, format!("unexpected text `{}`", text.trim())));
                continue;
            }
            Event::CData(_) => {
                errors.push(ValidationError::new(Malformed, "unexpected CDATA"));
                continue;
            }
            Event::Eof => break,
            _ => continue,
        };
        let e = start.expect("start or empty");
        let local = String::from_utf8_lossy(e.local_name().as_ref()).into_owned();
        let in_ns = matches!(ns, ResolveResult::Bound(Namespace(n)) if n == NAMESPACE.as_bytes());
        if !in_ns {
            errors.push(ValidationError::new(
                WrongNamespace,
                format!("element `{local}` is not in the EmotionML namespace"),
            ));
        }
        let attrs = match Attrs::read(&e) {
            Ok(a) => a,
            Err(m) => {
                errors.push(ValidationError::new(Malformed, m));
                return Err(errors);
            }
        };

        match (depth, local.as_str()) {
            (0, "emotionml") if !seen_root => {
                seen_root = true;
                doc.category_set = attrs.get("category-set").map(str::to_owned);
                doc.dimension_set = attrs.get("dimension-set").map(str::to_owned);
                if attrs.get("version").is_some_and(|v| v != "1.0") {
                    errors.push(ValidationError::new(Malformed, "version must be 1.0"));
                }
            }
            (1, "emotion") => {
                emotions += 1;
                if let Some(s) = attrs.get("category-set") {
                    doc.category_set = Some(s.to_owned());
                }
                if let Some(s) = attrs.get("dimension-set") {
                    doc.dimension_set = Some(s.to_owned());
                }
            }
            (2, "category") => match attrs.get("name") {
                Some(name) => doc.categories.push(Category {
                    name: name.to_owned(),
                    confidence: attrs.number("confidence", &mut errors),
                }),
                None => errors.push(ValidationError::new(Malformed, "category without name")),
            },
            (2, "dimension") => match (attrs.get("name"), attrs.number("value", &mut errors)) {
                (Some(name), Some(value)) => doc.dimensions.push(Dimension {
                    name: name.to_owned(),
                    value,
                    confidence: attrs.number("confidence", &mut errors),
                }),
                _ => errors.push(ValidationError::new(Malformed, "dimension needs name and value")),
            },
            _ => errors.push(ValidationError::new(Malformed, format!("unexpected element `{local}` at depth {depth}"))),
        }
        if !empty {
            depth += 1;
        }
    }

    if depth != 0 {
        errors.push(ValidationError::new(Malformed, "unclosed element at end of input"));
        return Err(errors);
    }
    if !seen_root {
        errors.push(ValidationError::new(Malformed, "no emotionml root element"));
        return Err(errors);
    }
    if emotions > 1 {
        errors.push(ValidationError::new(Malformed, format!("expected one emotion, found {emotions}")));
    }
    // NaN placeholders already produced a Malformed error
    let mut semantic = validate(&doc, vocab);
    semantic.retain(|e| !(e.class == OutOfRange && e.message.contains("NaN")));
    errors.extend(semantic);
    if errors.is_empty() {
        Ok(doc)
    } else {
        Err(errors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v() -> Vocabularies {
        Vocabularies::default()
    }

    fn classes(xml: &str) -> Vec<ErrorClass> {
        parse_and_validate(xml, &v()).unwrap_err().into_iter().map(|e| e.class).collect()
    }

    fn wrap(inner: &str) -> String {
        format!(
            "<emotionml xmlns=\"{NAMESPACE}\" version=\"1.0\" category-set=\"{BIG6_URI}\" \
             dimension-set=\"{FSRE_DIMENSIONS_URI}\"><emotion>{inner}</emotion></emotionml>"
        )
    }

    #[test]
    fn affine_map() {
        assert_eq!(valence_to_unit(-1.0), 0.0);
        assert_eq!(valence_to_unit(0.0), 0.5);
        assert_eq!(valence_to_unit(1.0), 1.0);
        assert_eq!(valence_to_unit(-0.5), 0.25);
    }

    #[test]
    fn dimension_document() {
        let doc = emit_dimension_doc(Valence::NEUTRAL, &v());
        let xml = serialize(&doc, &v()).unwrap();
        assert!(xml.contains(r#"<dimension name="valence" value="0.5"/>"#), "{xml}");
        assert!(xml.contains(&format!(r#"xmlns="{NAMESPACE}""#)));
        assert_eq!(parse_and_validate(&xml, &v()).unwrap(), doc);
    }

    #[test]
    fn category_documents() {
        let doc = emit_category_doc(EmotionLabel::Joy, 1.0, &v());
        let xml = serialize(&doc, &v()).unwrap();
        assert!(xml.contains(r#"category name="joy""#), "{xml}");
        let doc = emit_category_doc(EmotionLabel::Fear, 2.0 / 3.0, &v());
        assert_eq!(doc.categories[0].confidence, Some(2.0 / 3.0));
        assert_eq!(parse_and_validate(&serialize(&doc, &v()).unwrap(), &v()).unwrap(), doc);
        let neutral = emit_category_doc(EmotionLabel::Neutral, 1.0, &v());
        assert!(neutral.categories.is_empty());
        assert_eq!(neutral.dimensions[0].value, 0.5);
    }

    #[test]
    fn serializer_refuses_invalid_documents() {
        let mut doc = emit_dimension_doc(Valence::NEUTRAL, &v());
        doc.dimensions[0].value = 1.5;
        let errs = serialize(&doc, &v()).unwrap_err();
        assert_eq!(errs[0].class, ErrorClass::OutOfRange);
        assert_eq!(serialize(&EmotionDocument::default(), &v()).unwrap_err()[0].class, ErrorClass::NoDescriptor);
    }

    #[test]
    fn invalid_fixtures() {
        assert_eq!(classes(&wrap(r#"<dimension name="valence" value="1.5"/>"#)), [ErrorClass::OutOfRange]);
        assert_eq!(classes(&wrap(r#"<category name="bliss"/>"#)), [ErrorClass::UnknownName]);
        assert_eq!(classes(&wrap("")), [ErrorClass::NoDescriptor]);
        assert_eq!(classes(&wrap(r#"<dimension name="valence" value="x"/>"#)), [ErrorClass::Malformed]);
        assert_eq!(classes("<emotionml"), [ErrorClass::Malformed]);
        assert_eq!(classes(""), [ErrorClass::Malformed]);
        assert_eq!(classes(&format!("<emotionml xmlns=\"{NAMESPACE}\">")), [ErrorClass::Malformed]);
        let wrong = wrap(r#"<category name="joy"/>"#).replace(NAMESPACE, "urn:other");
        assert!(classes(&wrong).contains(&ErrorClass::WrongNamespace));
        let unknown_set = wrap(r#"<category name="joy"/>"#).replace(BIG6_URI, "urn:mine");
        assert_eq!(classes(&unknown_set), [ErrorClass::UnknownVocabulary]);
        let dup = wrap(r#"<category name="joy"/><category name="joy"/>"#);
        assert_eq!(classes(&dup), [ErrorClass::DuplicateName]);
    }

    #[test]
    fn all_violations_are_collected() {
        let xml = wrap(r#"<category name="bliss" confidence="2"/><dimension name="valence" value="-1"/>"#);
        let mut got = classes(&xml);
        got.sort_by_key(|c| c.as_str());
        assert_eq!(got, [ErrorClass::OutOfRange, ErrorClass::OutOfRange, ErrorClass::UnknownName]);
    }

    #[test]
    fn prefixed_namespace_is_accepted() {
        let xml = format!(
            "<e:emotionml xmlns:e=\"{NAMESPACE}\" category-set=\"{BIG6_URI}\">\
             <e:emotion><e:category name=\"anger\"/></e:emotion></e:emotionml>"
        );
        let doc = parse_and_validate(&xml, &v()).unwrap();
        assert_eq!(doc.categories[0].name, "anger");
    }

    fn doc_strategy() -> impl Strategy<Value = EmotionDocument> {
        let unit = prop_oneof![Just(0.0), Just(1.0), 0.0f64..=1.0];
        let cats = prop::sample::subsequence(Vocabulary::big6().items, 0..=6)
            .prop_flat_map(move |names| {
                let n = names.len();
                (Just(names), prop::collection::vec(prop::option::of(0.0f64..=1.0), n))
            })
            .prop_map(|(names, confs)| {
                names
                    .into_iter()
                    .zip(confs)
                    .map(|(name, confidence)| Category { name, confidence })
                    .collect::<Vec<_>>()
            });
        let dims = prop::sample::subsequence(Vocabulary::fsre_dimensions().items, 0..=4)
            .prop_flat_map(move |names| {
                let n = names.len();
                (
                    Just(names),
                    prop::collection::vec(unit.clone(), n),
                    prop::collection::vec(prop::option::of(0.0f64..=1.0), n),
                )
            })
            .prop_map(|(names, values, confs)| {
                names
                    .into_iter()
                    .zip(values)
                    .zip(confs)
                    .map(|((name, value), confidence)| Dimension { name, value, confidence })
                    .collect::<Vec<_>>()
            });
        (cats, dims)
            .prop_filter("needs a descriptor", |(c, d)| !c.is_empty() || !d.is_empty())
            .prop_map(|(categories, dimensions)| EmotionDocument {
                category_set: (!categories.is_empty()).then(|| BIG6_URI.to_owned()),
                dimension_set: (!dimensions.is_empty()).then(|| FSRE_DIMENSIONS_URI.to_owned()),
                categories,
                dimensions,
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn round_trip(doc in doc_strategy()) {
            let xml = serialize(&doc, &v()).unwrap();
            prop_assert_eq!(&serialize(&doc, &v()).unwrap(), &xml);
            prop_assert_eq!(parse_and_validate(&xml, &v()).unwrap(), doc);
        }

        #[test]
        fn affine_map_is_monotone(x in -1.0f64..=1.0, y in -1.0f64..=1.0) {
            let (a, b) = if x <= y { (x, y) } else { (y, x) };
            prop_assert!(valence_to_unit(a) <= valence_to_unit(b));
            if b - a > 4.0 * f64::EPSILON {
                prop_assert!(valence_to_unit(a) < valence_to_unit(b));
            }
            prop_assert!(in_unit(valence_to_unit(a)));
        }
    }
}
