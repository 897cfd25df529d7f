//! Gold dataset readers and accuracy scoring.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::io::BufRead;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::emotion::{emotion_to_valence, resolve_labels};
use crate::error::DataError;
use crate::forest::{ForestConfig, ForestModel, LabeledExample, TrainError};
use crate::label::{EmotionLabel, Polarity};
use crate::text::Pipeline;
use crate::tsv;

/// Column order of affective gold lines.
pub const AFFECTIVE_COLUMNS: [EmotionLabel; 6] = [
    EmotionLabel::Anger,
    EmotionLabel::Disgust,
    EmotionLabel::Fear,
    EmotionLabel::Joy,
    EmotionLabel::Sadness,
    EmotionLabel::Surprise,
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Gold {
    Ternary(Polarity),
    Affective {
        /// Scores in [0, 100], in [`AFFECTIVE_COLUMNS`] order.
        emotions: [f64; 6],
        /// In [-100, 100] when a valence file is given.
        valence: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldRecord {
    pub id: String,
    pub text: String,
    pub gold: Gold,
}

/// `id<TAB>label<TAB>text` lines.
pub fn read_ternary_dataset<R: BufRead>(source: R) -> Result<Vec<GoldRecord>, DataError> {
    let mut out = Vec::new();
    for rec in tsv::read_records(source)? {
        rec.expect_columns(3)?;
        let label: Polarity = rec.fields[1]
            .trim()
            .parse()
            .map_err(|e: crate::label::UnknownLabel| DataError::line(rec.line, e.to_string()))?;
        out.push(GoldRecord {
            id: rec.fields[0].trim().to_owned(),
            text: rec.fields[2].clone(),
            gold: Gold::Ternary(label),
        });
    }
    Ok(out)
}

fn read_id_text<R: BufRead>(source: R) -> Result<Vec<(usize, String, String)>, DataError> {
    let mut out = Vec::new();
    for rec in tsv::read_records(source)? {
        rec.expect_columns(2)?;
        out.push((rec.line, rec.fields[0].trim().to_owned(), rec.fields[1].clone()));
    }
    Ok(out)
}

fn read_scores<R: BufRead>(
    source: R,
    columns: usize,
    range: (f64, f64),
) -> Result<Vec<(usize, String, Vec<f64>)>, DataError> {
    let mut out = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let n = i + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() || fields[0].starts_with('#') {
            continue;
        }
        if fields.len() != columns + 1 {
            return Err(DataError::line(n, format!("expected {} fields, found {}", columns + 1, fields.len())));
        }
        let mut scores = Vec::with_capacity(columns);
        for f in &fields[1..] {
            let v: f64 = f.parse().map_err(|_| DataError::line(n, format!("score `{f}` is not a number")))?;
            if !(range.0..=range.1).contains(&v) {
                return Err(DataError::line(n, format!("score {v} outside [{}, {}]", range.0, range.1)));
            }
            scores.push(v);
        }
        out.push((n, fields[0].to_owned(), scores));
    }
    Ok(out)
}

/// Joins `id<TAB>headline` lines with space-separated gold lines
/// `id anger disgust fear joy sadness surprise`, plus optional
/// `id valence` lines. Every id must appear in every file.
pub fn read_affective_dataset<T: BufRead, G: BufRead, V: BufRead>(
    text: T,
    gold: G,
    valence: Option<V>,
) -> Result<Vec<GoldRecord>, DataError> {
    let texts = read_id_text(text)?;
    let mut emotions: HashMap<String, (usize, [f64; 6])> = HashMap::new();
    for (line, id, scores) in read_scores(gold, 6, (0.0, 100.0))? {
        let arr: [f64; 6] = scores.try_into().expect("six columns checked");
        if emotions.insert(id.clone(), (line, arr)).is_some() {
            return Err(DataError::line(line, format!("gold id `{id}` repeated")));
        }
    }
    let mut valences: Option<HashMap<String, (usize, f64)>> = None;
    if let Some(v) = valence {
        let mut map = HashMap::new();
        for (line, id, scores) in read_scores(v, 1, (-100.0, 100.0))? {
            if map.insert(id.clone(), (line, scores[0])).is_some() {
                return Err(DataError::line(line, format!("valence id `{id}` repeated")));
            }
        }
        valences = Some(map);
    }

    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(texts.len());
    for (line, id, headline) in texts {
        if !seen.insert(id.clone()) {
            return Err(DataError::line(line, format!("text id `{id}` repeated")));
        }
        let (_, scores) = emotions
            .get(&id)
            .ok_or_else(|| DataError::line(line, format!("text id `{id}` has no gold line")))?;
        let v = match &valences {
            Some(map) => Some(
                map.get(&id)
                    .ok_or_else(|| DataError::line(line, format!("text id `{id}` has no valence line")))?
                    .1,
            ),
            None => None,
        };
        out.push(GoldRecord {
            id,
            text: headline,
            gold: Gold::Affective {
                emotions: *scores,
                valence: v,
            },
        });
    }
    let mut orphans: Vec<(usize, &String)> =
        emotions.iter().filter(|(id, _)| !seen.contains(*id)).map(|(id, (l, _))| (*l, id)).collect();
    if let Some(map) = &valences {
        orphans.extend(map.iter().filter(|(id, _)| !seen.contains(*id)).map(|(id, (l, _))| (*l, id)));
    }
    orphans.sort();
    if let Some((line, id)) = orphans.first() {
        return Err(DataError::Invalid(format!("gold line {line}: id `{id}` missing from the text file")));
    }
    Ok(out)
}

/// Dominant gold emotion mapped to a polarity; all-zero scores are neutral.
pub fn gold_to_ternary(record: &GoldRecord) -> Polarity {
    match &record.gold {
        Gold::Ternary(p) => *p,
        Gold::Affective { emotions, .. } => {
            let max = emotions.iter().cloned().fold(0.0, f64::max);
            if max <= 0.0 {
                return Polarity::Neutral;
            }
            let top = AFFECTIVE_COLUMNS
                .iter()
                .zip(emotions)
                .filter(|(_, &s)| s == max)
                .map(|(e, _)| *e);
            emotion_to_valence(resolve_labels(top).label).label
        }
    }
}

/// Anything that assigns a polarity to a text.
pub trait TernaryClassifier: Sync {
    fn engine_id(&self) -> String;
    fn classify(&self, text: &str) -> Polarity;
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no records to evaluate")]
    Empty,
    #[error(transparent)]
    Train(#[from] TrainError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub engine: String,
    pub dataset: String,
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
    /// `confusion[gold][predicted]`, both in [`Polarity::ALL`] order.
    pub confusion: [[usize; 3]; 3],
}

impl EvalReport {
    pub fn from_pairs(engine: &str, dataset: &str, pairs: impl IntoIterator<Item = (Polarity, Polarity)>) -> Self {
        let mut confusion = [[0usize; 3]; 3];
        for (gold, predicted) in pairs {
            confusion[gold.index()][predicted.index()] += 1;
        }
        let total: usize = confusion.iter().flatten().sum();
        let correct: usize = (0..3).map(|i| confusion[i][i]).sum();
        EvalReport {
            engine: engine.to_owned(),
            dataset: dataset.to_owned(),
            correct,
            total,
            accuracy: if total == 0 { 0.0 } else { correct as f64 / total as f64 },
            confusion,
        }
    }

    pub fn gold_count(&self, label: Polarity) -> usize {
        self.confusion[label.index()].iter().sum()
    }

    pub fn predicted_count(&self, label: Polarity) -> usize {
        self.confusion.iter().map(|row| row[label.index()]).sum()
    }

    /// `key=value` lines.
    pub fn to_key_values(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "engine={}", self.engine);
        let _ = writeln!(s, "dataset={}", self.dataset);
        let _ = writeln!(s, "correct={}", self.correct);
        let _ = writeln!(s, "total={}", self.total);
        let _ = writeln!(s, "accuracy={:.6}", self.accuracy);
        for g in Polarity::ALL {
            for p in Polarity::ALL {
                let _ = writeln!(s, "confusion.{}.{}={}", g.as_str(), p.as_str(), self.confusion[g.index()][p.index()]);
            }
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "engine:   {}", self.engine);
        let _ = writeln!(s, "dataset:  {}", self.dataset);
        let _ = writeln!(
            s,
            "accuracy: {:.2}% ({}/{})",
            100.0 * self.accuracy,
            self.correct,
            self.total
        );
        let _ = writeln!(s, "{:>10} {:>9} {:>9} {:>9}", "gold\\pred", "positive", "negative", "neutral");
        for g in Polarity::ALL {
            let row = &self.confusion[g.index()];
            let _ = writeln!(s, "{:>10} {:>9} {:>9} {:>9}", g.as_str(), row[0], row[1], row[2]);
        }
        s
    }
}

pub fn evaluate(engine: &dyn TernaryClassifier, records: &[GoldRecord], dataset: &str) -> Result<EvalReport, EvalError> {
    if records.is_empty() {
        return Err(EvalError::Empty);
    }
    let pairs: Vec<(Polarity, Polarity)> = records
        .par_iter()
        .map(|r| (gold_to_ternary(r), engine.classify(&r.text)))
        .collect();
    Ok(EvalReport::from_pairs(&engine.engine_id(), dataset, pairs))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossDomainReport {
    pub report: EvalReport,
    /// Ids present in both sets; reported, not rejected.
    pub overlapping_ids: Vec<String>,
}

pub struct ForestClassifier<'a> {
    pub model: &'a ForestModel,
    pub pipeline: &'a Pipeline,
}

impl TernaryClassifier for ForestClassifier<'_> {
    fn engine_id(&self) -> String {
        "statistical".to_owned()
    }

    fn classify(&self, text: &str) -> Polarity {
        self.model.predict_text(text, self.pipeline).label
    }
}

pub fn to_examples(records: &[GoldRecord], pipeline: &Pipeline) -> Vec<LabeledExample> {
    records
        .par_iter()
        .map(|r| LabeledExample::from_text(&r.text, gold_to_ternary(r), pipeline))
        .collect()
}

/// Trains on all of `train` and scores on `test`.
pub fn cross_domain_eval(
    train: &[GoldRecord],
    test: &[GoldRecord],
    config: &ForestConfig,
    pipeline: &Pipeline,
    dataset: &str,
) -> Result<CrossDomainReport, EvalError> {
    if train.is_empty() || test.is_empty() {
        return Err(EvalError::Empty);
    }
    let model = ForestModel::train(&to_examples(train, pipeline), config)?;
    let report = evaluate(&ForestClassifier { model: &model, pipeline }, test, dataset)?;
    let train_ids: BTreeSet<&str> = train.iter().map(|r| r.id.as_str()).collect();
    let overlapping_ids = test
        .iter()
        .filter(|r| train_ids.contains(r.id.as_str()))
        .map(|r| r.id.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    Ok(CrossDomainReport { report, overlapping_ids })
}
