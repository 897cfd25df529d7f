//! Transport-independent request handling for the web service.
//!
//! Handlers take raw query values and body bytes and return a status, a
//! content type and a body. The HTTP layer only routes.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::aggregator::{Aggregator, AggregatorConfig, Message};
use crate::analyzer::{AnalysisError, Analyzer, Engine};
use crate::emotion::detect_emotion;
use crate::emotionml::{serialize, valence_to_unit, MEDIA_TYPE};
use crate::label::EmotionLabel;

pub const MAX_BODY_BYTES: usize = 64 * 1024;
pub const DEFAULT_ENGINE: Engine = Engine::Symbolic;
pub const JSON: &str = "application/json";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslationError {
    #[error("translation unavailable: backend `{backend}` cannot translate from `{lang}`")]
    Unavailable { backend: String, lang: String },
}

/// Primary language subtag, lowercased: `en-US` gives `en`.
pub fn primary_language(tag: &str) -> String {
    tag.split(['-', '_']).next().unwrap_or("").trim().to_ascii_lowercase()
}

pub fn is_english(tag: &str) -> bool {
    primary_language(tag) == "en"
}

pub trait Translator: Send + Sync + fmt::Debug {
    fn backend(&self) -> &str;
    /// Translates into English. English input is returned unchanged.
    fn translate(&self, text: &str, lang: &str) -> Result<String, TranslationError>;
}

/// Passes English through and refuses everything else.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityTranslator;

impl Translator for IdentityTranslator {
    fn backend(&self) -> &str {
        "identity"
    }

    fn translate(&self, text: &str, lang: &str) -> Result<String, TranslationError> {
        if is_english(lang) {
            Ok(text.to_owned())
        } else {
            Err(TranslationError::Unavailable {
                backend: self.backend().to_owned(),
                lang: lang.to_owned(),
            })
        }
    }
}

/// Word-for-word dictionary translation, for tests and demos.
#[derive(Debug, Clone, Default)]
pub struct MockTranslator {
    /// Language -> (source word -> English word).
    pub dictionaries: HashMap<String, HashMap<String, String>>,
}

impl MockTranslator {
    pub fn with_words(lang: &str, words: &[(&str, &str)]) -> Self {
        let mut m = MockTranslator::default();
        m.dictionaries.insert(
            primary_language(lang),
            words.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        );
        m
    }
}

impl Translator for MockTranslator {
    fn backend(&self) -> &str {
        "mock"
    }

    fn translate(&self, text: &str, lang: &str) -> Result<String, TranslationError> {
        if is_english(lang) {
            return Ok(text.to_owned());
        }
        let dict = self
            .dictionaries
            .get(&primary_language(lang))
            .ok_or_else(|| TranslationError::Unavailable {
                backend: self.backend().to_owned(),
                lang: lang.to_owned(),
            })?;
        let words: Vec<String> = text
            .split_whitespace()
            .map(|w| {
                let core = w.trim_matches(|c: char| !c.is_alphanumeric());
                match dict.get(&core.to_lowercase()) {
                    Some(t) if !core.is_empty() => w.replacen(core, t, 1),
                    _ => w.to_owned(),
                }
            })
            .collect();
        Ok(words.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub status: u16,
    pub content_type: &'static str,
    pub body: String,
}

impl Response {
    fn json<T: Serialize>(status: u16, value: &T) -> Self {
        Response {
            status,
            content_type: JSON,
            body: serde_json::to_string(value).expect("response serializes"),
        }
    }

    fn error(status: u16, message: impl fmt::Display) -> Self {
        Self::json(status, &json!({ "error": message.to_string() }))
    }
}

/// A validated analysis request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalyzeRequest {
    pub text: String,
    pub engine: Engine,
    pub lang: String,
}

impl AnalyzeRequest {
    /// Validates body size, encoding, emptiness and engine name.
    pub fn parse(body: &[u8], engine: Option<&str>, lang: Option<&str>) -> Result<Self, Response> {
        if body.len() > MAX_BODY_BYTES {
            return Err(Response::error(400, format!("body exceeds {MAX_BODY_BYTES} bytes")));
        }
        let text = std::str::from_utf8(body).map_err(|_| Response::error(400, "body is not UTF-8"))?;
        if text.trim().is_empty() {
            return Err(Response::error(400, "body is empty"));
        }
        let engine = match engine {
            None => DEFAULT_ENGINE,
            Some(e) => e.parse().map_err(|e| Response::error(400, e))?,
        };
        let lang = lang.unwrap_or("en").trim();
        if lang.is_empty() {
            return Err(Response::error(400, "lang is empty"));
        }
        Ok(AnalyzeRequest {
            text: text.to_owned(),
            engine,
            lang: lang.to_owned(),
        })
    }
}

fn parse_number(name: &str, raw: Option<&str>) -> Result<Option<f64>, Response> {
    match raw {
        None => Ok(None),
        Some(s) => match s.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Some(v)),
            _ => Err(Response::error(400, format!("{name} `{s}` is not a finite number"))),
        },
    }
}

/// Shared state of the service. Analysis resources never change after
/// construction; channels are the only mutable part.
#[derive(Debug)]
pub struct Service {
    analyzer: Analyzer,
    translator: Arc<dyn Translator>,
    aggregator: Aggregator,
}

impl Service {
    pub fn new(analyzer: Analyzer, translator: Arc<dyn Translator>, aggregator: AggregatorConfig) -> Self {
        Service {
            analyzer,
            translator,
            aggregator: Aggregator::new(aggregator),
        }
    }

    pub fn analyzer(&self) -> &Analyzer {
        &self.analyzer
    }

    pub fn aggregator(&self) -> &Aggregator {
        &self.aggregator
    }

    fn translated(&self, req: &AnalyzeRequest) -> Result<String, Response> {
        self.translator
            .translate(&req.text, &req.lang)
            .map_err(|e| Response::error(422, e))
    }

    fn analysis_error(e: AnalysisError) -> Response {
        match e {
            AnalysisError::NoModel => Response::error(503, e),
        }
    }

    /// `POST /analyze`: EmotionML for the requested engine.
    pub fn handle_analyze(&self, body: &[u8], engine: Option<&str>, lang: Option<&str>) -> Response {
        let req = match AnalyzeRequest::parse(body, engine, lang) {
            Ok(r) => r,
            Err(resp) => return resp,
        };
        let text = match self.translated(&req) {
            Ok(t) => t,
            Err(resp) => return resp,
        };
        let result = match self.analyzer.analyze(&text, req.engine) {
            Ok(r) => r,
            Err(e) => return Self::analysis_error(e),
        };
        let vocab = &self.analyzer.resources.vocabularies;
        match serialize(&result.to_document(vocab), vocab) {
            Ok(xml) => Response {
                status: 200,
                content_type: MEDIA_TYPE,
                body: xml,
            },
            Err(errors) => {
                let msg: Vec<String> = errors.iter().map(ToString::to_string).collect();
                Response::error(500, msg.join("; "))
            }
        }
    }

    /// `POST /channels/{id}/messages`. The score comes from the requested
    /// engine; the emotion label always comes from the emotion detector.
    pub fn handle_channel_message(
        &self,
        channel: &str,
        body: &[u8],
        engine: Option<&str>,
        lang: Option<&str>,
        t: Option<&str>,
        now: f64,
    ) -> Response {
        let req = match AnalyzeRequest::parse(body, engine, lang) {
            Ok(r) => r,
            Err(resp) => return resp,
        };
        let t = match parse_number("t", t) {
            Ok(t) => t.unwrap_or(now),
            Err(resp) => return resp,
        };
        let text = match self.translated(&req) {
            Ok(t) => t,
            Err(resp) => return resp,
        };
        let result = match self.analyzer.analyze(&text, req.engine) {
            Ok(r) => r,
            Err(e) => return Self::analysis_error(e),
        };
        let r = &self.analyzer.resources;
        let emotion = detect_emotion(&text, &r.pipeline, &r.emotions, &r.filters).outcome.label;
        let message = Message {
            t,
            score: result.valence.score,
            emotion,
        };
        match self.aggregator.add_message(channel, message) {
            Ok(count) => Response::json(
                200,
                &json!({
                    "channel": channel,
                    "count": count,
                    "t": t,
                    "score": message.score,
                    "label": result.valence.label.as_str(),
                    "emotion": emotion.as_str(),
                }),
            ),
            Err(e) => Response::error(400, e),
        }
    }

    /// `GET /channels/{id}/gauge`. Unknown channels read as empty.
    pub fn handle_gauge(&self, channel: &str, window: Option<&str>, now: Option<&str>, clock: f64) -> Response {
        let (window, now) = match (parse_number("window", window), parse_number("now", now)) {
            (Ok(w), Ok(n)) => (w, n.unwrap_or(clock)),
            (Err(r), _) | (_, Err(r)) => return r,
        };
        let gauge = match self.aggregator.gauge(channel, window, now) {
            Ok(g) => g,
            Err(e) => return Response::error(400, e),
        };
        let dominant = match self.aggregator.dominant_emotion(channel, window, now) {
            Ok(d) => d,
            Err(e) => return Response::error(400, e),
        };
        let histogram: serde_json::Map<String, serde_json::Value> = EmotionLabel::ALL
            .iter()
            .map(|e| (e.as_str().to_owned(), json!(dominant.histogram[e.index()])))
            .collect();
        Response::json(
            200,
            &json!({
                "channel": channel,
                "mean": gauge.mean,
                "gauge": valence_to_unit(gauge.mean),
                "count": gauge.count,
                "empty": gauge.empty,
                "window": gauge.to - gauge.from,
                "from": gauge.from,
                "to": gauge.to,
                "dominant_emotion": dominant.label.as_str(),
                "histogram": histogram,
            }),
        )
    }

    /// `GET /health`.
    pub fn handle_health(&self) -> Response {
        Response::json(
            200,
            &json!({
                "status": "ok",
                "model": self.analyzer.resources.model.is_some(),
                "translator": self.translator.backend(),
            }),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emotionml::{parse_and_validate, Vocabularies};
    use crate::synthetic::separable_corpus;
    use crate::forest::{ForestConfig, ForestModel, LabeledExample};

    fn service() -> Service {
        Service::new(Analyzer::seed(), Arc::new(IdentityTranslator), AggregatorConfig::default())
    }

    fn value(body: &str) -> serde_json::Value {
        serde_json::from_str(body).unwrap()
    }

    #[test]
    fn translators() {
        assert_eq!(IdentityTranslator.translate("good", "en").unwrap(), "good");
        assert_eq!(IdentityTranslator.translate("good", "en-GB").unwrap(), "good");
        assert!(IdentityTranslator.translate("bueno", "es").is_err());
        let mock = MockTranslator::with_words("es", &[("bueno", "good"), ("no", "not")]);
        assert_eq!(mock.translate("bueno", "es").unwrap(), "good");
        assert_eq!(mock.translate("no es bueno!", "es-MX").unwrap(), "not es good!");
        assert!(mock.translate("gut", "de").is_err());
    }

    #[test]
    fn analyze_symbolic_and_emotion() {
        let s = service();
        let r = s.handle_analyze(b"it's not good", Some("symbolic"), None);
        assert_eq!((r.status, r.content_type), (200, MEDIA_TYPE));
        let doc = parse_and_validate(&r.body, &Vocabularies::default()).unwrap();
        assert_eq!(doc.dimensions[0].value, 0.0);

        let r = s.handle_analyze(b"I am happy", Some("emotion"), None);
        let doc = parse_and_validate(&r.body, &Vocabularies::default()).unwrap();
        assert_eq!(doc.categories[0].name, "joy");
    }

    #[test]
    fn analyze_errors() {
        let s = service();
        assert_eq!(s.handle_analyze(b"good", Some("foo"), None).status, 400);
        assert_eq!(s.handle_analyze(b"  \n", None, None).status, 400);
        assert_eq!(s.handle_analyze(&vec![b'a'; MAX_BODY_BYTES + 1], None, None).status, 400);
        assert_eq!(s.handle_analyze(&[0xff, 0xfe], None, None).status, 400);
        assert_eq!(s.handle_analyze(b"bueno", None, Some("es")).status, 422);
        assert_eq!(s.handle_analyze(b"good", Some("statistical"), None).status, 503);
        assert_eq!(s.handle_analyze(&vec![b'a'; MAX_BODY_BYTES], Some("lexical"), None).status, 200);
    }

    #[test]
    fn mock_translation_path() {
        let s = Service::new(
            Analyzer::seed(),
            Arc::new(MockTranslator::with_words("es", &[("bueno", "good")])),
            AggregatorConfig::default(),
        );
        let r = s.handle_analyze(b"bueno", Some("lexical"), Some("es"));
        assert_eq!(r.status, 200);
        let doc = parse_and_validate(&r.body, &Vocabularies::default()).unwrap();
        assert_eq!(doc.dimensions[0].value, 1.0);
    }

    #[test]
    fn statistical_with_model() {
        let mut analyzer = Analyzer::seed();
        let p = analyzer.resources.pipeline.clone();
        let examples: Vec<_> = separable_corpus(1)
            .iter()
            .map(|e| LabeledExample::from_text(&e.text, e.label, &p))
            .collect();
        let model = ForestModel::train(&examples, &ForestConfig { trees: 10, ..Default::default() }).unwrap();
        analyzer.resources.model = Some(Arc::new(model));
        let s = Service::new(analyzer, Arc::new(IdentityTranslator), AggregatorConfig::default());
        let r = s.handle_analyze(b"a splendid day", Some("statistical"), None);
        assert_eq!(r.status, 200);
        let doc = parse_and_validate(&r.body, &Vocabularies::default()).unwrap();
        assert_eq!(doc.dimensions[0].value, 1.0);
    }

    #[test]
    fn channels_and_gauge() {
        let s = service();
        let r = s.handle_channel_message("room", b"this is good", Some("lexical"), None, Some("10"), 0.0);
        assert_eq!(r.status, 200);
        assert_eq!(value(&r.body)["count"], 1);
        let r = s.handle_channel_message("room", b"this is bad", Some("lexical"), None, Some("11"), 0.0);
        assert_eq!(value(&r.body)["count"], 2);

        let g = value(&s.handle_gauge("room", Some("60"), Some("20"), 0.0).body);
        assert_eq!(g["mean"], 0.0);
        assert_eq!(g["gauge"], 0.5);
        assert_eq!(g["count"], 2);

        let before = value(&s.handle_gauge("room", Some("60"), Some("20"), 0.0).body);
        assert_eq!(s.handle_channel_message("room", b"good", Some("foo"), None, None, 12.0).status, 400);
        assert_eq!(value(&s.handle_gauge("room", Some("60"), Some("20"), 0.0).body), before);

        let empty = value(&s.handle_gauge("nobody-here", None, None, 0.0).body);
        assert_eq!(empty["count"], 0);
        assert_eq!(empty["empty"], true);
        assert_eq!(s.handle_gauge("room", Some("-1"), None, 0.0).status, 400);
        assert_eq!(s.handle_gauge("room", Some("abc"), None, 0.0).status, 400);
        assert_eq!(s.handle_channel_message(&"x".repeat(200), b"good", None, None, None, 0.0).status, 400);
    }

    #[test]
    fn gauge_reports_dominant_emotion() {
        let s = service();
        s.handle_channel_message("c", b"I am so happy", Some("emotion"), None, Some("1"), 0.0);
        s.handle_channel_message("c", b"I am afraid", Some("emotion"), None, Some("2"), 0.0);
        let g = value(&s.handle_gauge("c", Some("10"), Some("5"), 0.0).body);
        assert_eq!(g["mean"], 0.0);
        assert_eq!(g["histogram"]["joy"], 1);
        assert_eq!(g["histogram"]["fear"], 1);
        assert_eq!(g["dominant_emotion"], "joy");
    }

    #[test]
    fn health() {
        let r = service().handle_health();
        assert_eq!(r.status, 200);
        assert_eq!(value(&r.body)["status"], "ok");
    }
}
