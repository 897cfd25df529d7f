//! Random forest over binary bag-of-features vectors.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::DataError;
use crate::label::{Polarity, Valence};
use crate::text::{Pipeline, Pos, Sentence};

pub const FORMAT_VERSION: u32 = 1;

/// Sorted, duplicate-free feature identifiers such as `stem:good` or
/// `pos:ADJ`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FeatureVector(BTreeSet<String>);

impl FeatureVector {
    pub fn contains(&self, feature: &str) -> bool {
        self.0.contains(feature)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn union(mut self, other: FeatureVector) -> FeatureVector {
        self.0.extend(other.0);
        self
    }
}

impl<S: Into<String>> FromIterator<S> for FeatureVector {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        FeatureVector(iter.into_iter().map(Into::into).collect())
    }
}

pub fn extract_features(sentence: &Sentence) -> FeatureVector {
    let mut set = BTreeSet::new();
    for t in &sentence.tokens {
        if t.pos != Pos::Punct {
            set.insert(format!("stem:{}", t.stem));
        }
        set.insert(format!("pos:{}", t.pos.as_str()));
    }
    FeatureVector(set)
}

/// Union of the features of every sentence in `text`.
pub fn extract_text_features(text: &str, pipeline: &Pipeline) -> FeatureVector {
    pipeline
        .sentences(text)
        .iter()
        .map(extract_features)
        .fold(FeatureVector::default(), FeatureVector::union)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub features: FeatureVector,
    pub label: Polarity,
}

impl LabeledExample {
    pub fn from_text(text: &str, label: Polarity, pipeline: &Pipeline) -> Self {
        LabeledExample {
            features: extract_text_features(text, pipeline),
            label,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub trees: usize,
    pub max_depth: usize,
    pub seed: u64,
    /// Candidate features per split; `None` means ceil(sqrt(|vocabulary|)).
    pub features_per_split: Option<usize>,
    pub bootstrap: bool,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            trees: 100,
            max_depth: 16,
            seed: 42,
            features_per_split: None,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrainError {
    #[error("training needs at least 2 examples, got {0}")]
    TooFewExamples(usize),
    #[error("training data has a single label")]
    SingleLabel,
    #[error("tree count must be positive")]
    NoTrees,
    #[error("fold count {k} is invalid for {n} examples")]
    BadFoldCount { k: usize, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Node {
    /// Routes to `present` when the feature is in the vector.
    Split { feature: u32, present: u32, absent: u32 },
    /// Class counts in [`Polarity::ALL`] order.
    Leaf { counts: [u32; 3] },
}

/// Nodes in a flat arena; node 0 is the root and children follow parents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    fn leaf_for(&self, has: impl Fn(u32) -> bool) -> [u32; 3] {
        let mut at = 0usize;
        loop {
            match self.nodes[at] {
                Node::Leaf { counts } => return counts,
                Node::Split { feature, present, absent } => {
                    at = if has(feature) { present } else { absent } as usize;
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { present, absent, .. } => {
                    1 + walk(nodes, present as usize).max(walk(nodes, absent as usize))
                }
            }
        }
        walk(&self.nodes, 0)
    }
}

/// Plurality over [`Polarity::ALL`] order; earlier classes win ties.
fn plurality<T: PartialOrd + Copy>(counts: &[T; 3]) -> Polarity {
    let mut best = 0;
    for i in 1..3 {
        if counts[i] > counts[best] {
            best = i;
        }
    }
    Polarity::ALL[best]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub format_version: u32,
    pub config: ForestConfig,
    pub vocabulary: Vec<String>,
    pub trees: Vec<DecisionTree>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: Polarity,
    /// Vote fractions in [`Polarity::ALL`] order.
    pub scores: [f64; 3],
}

impl Prediction {
    /// The predicted label's unit score.
    pub fn valence(&self) -> Valence {
        Valence::from_score(self.label.unit_score())
    }
}

struct Encoded {
    /// Dense bitset over the vocabulary.
    bits: Vec<u64>,
    label: usize,
}

impl Encoded {
    fn has(&self, f: usize) -> bool {
        self.bits[f / 64] >> (f % 64) & 1 == 1
    }
}

fn gini(counts: &[usize; 3], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

fn class_counts(data: &[Encoded], rows: &[usize]) -> [usize; 3] {
    let mut c = [0; 3];
    for &r in rows {
        c[data[r].label] += 1;
    }
    c
}

struct Builder<'a> {
    data: &'a [Encoded],
    vocab: usize,
    max_depth: usize,
    mtry: usize,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn leaf(&mut self, counts: [usize; 3]) -> u32 {
        self.nodes.push(Node::Leaf {
            counts: counts.map(|c| c as u32),
        });
        (self.nodes.len() - 1) as u32
    }

    fn build(&mut self, rows: Vec<usize>, depth: usize) -> u32 {
        let counts = class_counts(self.data, &rows);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || depth >= self.max_depth {
            return self.leaf(counts);
        }
        // features that actually separate the rows at this node
        let candidates: Vec<usize> = (0..self.vocab)
            .filter(|&f| {
                let present = rows.iter().filter(|&&r| self.data[r].has(f)).count();
                present > 0 && present < rows.len()
            })
            .collect();
        if candidates.is_empty() {
            return self.leaf(counts);
        }
        let take = self.mtry.min(candidates.len());
        let mut sampled: Vec<usize> = index::sample(&mut self.rng, candidates.len(), take)
            .into_iter()
            .map(|i| candidates[i])
            .collect();
        sampled.sort_unstable();

        let n = rows.len();
        let mut best = (f64::INFINITY, 0usize);
        for &f in &sampled {
            let mut yes = [0usize; 3];
            let mut n_yes = 0;
            for &r in &rows {
                if self.data[r].has(f) {
                    yes[self.data[r].label] += 1;
                    n_yes += 1;
                }
            }
            let no = [counts[0] - yes[0], counts[1] - yes[1], counts[2] - yes[2]];
            let impurity =
                (n_yes as f64 * gini(&yes, n_yes) + (n - n_yes) as f64 * gini(&no, n - n_yes)) / n as f64;
            if impurity < best.0 {
                best = (impurity, f);
            }
        }
        let feature = best.1;
        let (present, absent): (Vec<usize>, Vec<usize>) = rows.into_iter().partition(|&r| self.data[r].has(feature));

        let at = self.nodes.len();
        self.nodes.push(Node::Leaf { counts: [0; 3] });
        let p = self.build(present, depth + 1);
        let a = self.build(absent, depth + 1);
        self.nodes[at] = Node::Split {
            feature: feature as u32,
            present: p,
            absent: a,
        };
        at as u32
    }
}

fn tree_seed(seed: u64, tree: usize) -> u64 {
    seed.wrapping_add(tree as u64)
}

impl ForestModel {
    pub fn train(examples: &[LabeledExample], config: &ForestConfig) -> Result<Self, TrainError> {
        if config.trees == 0 {
            return Err(TrainError::NoTrees);
        }
        if examples.len() < 2 {
            return Err(TrainError::TooFewExamples(examples.len()));
        }
        let labels: BTreeSet<Polarity> = examples.iter().map(|e| e.label).collect();
        if labels.len() < 2 {
            return Err(TrainError::SingleLabel);
        }

        let vocabulary: Vec<String> = examples
            .iter()
            .flat_map(|e| e.features.iter())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .map(str::to_owned)
            .collect();
        let ids: BTreeMap<&str, usize> = vocabulary.iter().enumerate().map(|(i, f)| (f.as_str(), i)).collect();
        let words = vocabulary.len().div_ceil(64);
        let data: Vec<Encoded> = examples
            .iter()
            .map(|e| {
                let mut bits = vec![0u64; words];
                for f in e.features.iter() {
                    let i = ids[f];
                    bits[i / 64] |= 1 << (i % 64);
                }
                Encoded {
                    bits,
                    label: e.label.index(),
                }
            })
            .collect();

        let mtry = config
            .features_per_split
            .unwrap_or_else(|| (vocabulary.len() as f64).sqrt().ceil() as usize)
            .max(1);
        let n = data.len();
        let trees = (0..config.trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(tree_seed(config.seed, t));
                let rows: Vec<usize> = if config.bootstrap {
                    (0..n).map(|_| rng.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                let mut b = Builder {
                    data: &data,
                    vocab: vocabulary.len(),
                    max_depth: config.max_depth,
                    mtry,
                    rng,
                    nodes: Vec::new(),
                };
                b.build(rows, 0);
                DecisionTree { nodes: b.nodes }
            })
            .collect();

        Ok(ForestModel {
            format_version: FORMAT_VERSION,
            config: *config,
            vocabulary,
            trees,
        })
    }

    /// A one-leaf model that always predicts the most frequent label.
    pub fn majority(examples: &[LabeledExample], config: &ForestConfig) -> Self {
        let mut counts = [0u32; 3];
        for e in examples {
            counts[e.label.index()] += 1;
        }
        if counts == [0; 3] {
            counts[Polarity::Neutral.index()] = 1;
        }
        ForestModel {
            format_version: FORMAT_VERSION,
            config: ForestConfig { trees: 1, ..*config },
            vocabulary: Vec::new(),
            trees: vec![DecisionTree {
                nodes: vec![Node::Leaf { counts }],
            }],
        }
    }

    /// Trains a forest, or the majority model when only one label is present.
    pub fn train_or_majority(examples: &[LabeledExample], config: &ForestConfig) -> Result<Self, TrainError> {
        match Self::train(examples, config) {
            Err(TrainError::SingleLabel | TrainError::TooFewExamples(_)) if !examples.is_empty() => {
                Ok(Self::majority(examples, config))
            }
            other => other,
        }
    }

    pub fn predict(&self, features: &FeatureVector) -> Prediction {
        let present: Vec<bool> = self.vocabulary.iter().map(|f| features.contains(f)).collect();
        let mut votes = [0usize; 3];
        for tree in &self.trees {
            let leaf = tree.leaf_for(|f| present[f as usize]);
            votes[plurality(&leaf).index()] += 1;
        }
        let total = self.trees.len() as f64;
        Prediction {
            label: plurality(&votes),
            scores: votes.map(|v| v as f64 / total),
        }
    }

    pub fn predict_sentence(&self, sentence: &Sentence) -> Prediction {
        self.predict(&extract_features(sentence))
    }

    pub fn predict_text(&self, text: &str, pipeline: &Pipeline) -> Prediction {
        self.predict(&extract_text_features(text, pipeline))
    }

    /// Checks the structural invariants of a deserialized model.
    pub fn validate(&self) -> Result<(), DataError> {
        let bad = |m: String| Err(DataError::Invalid(m));
        if self.format_version != FORMAT_VERSION {
            return bad(format!(
                "model format version {} is not supported (expected {FORMAT_VERSION})",
                self.format_version
            ));
        }
        if self.trees.is_empty() {
            return bad("model has no trees".into());
        }
        for (t, tree) in self.trees.iter().enumerate() {
            if tree.nodes.is_empty() {
                return bad(format!("tree {t} is empty"));
            }
            for (i, node) in tree.nodes.iter().enumerate() {
                match *node {
                    Node::Leaf { counts } => {
                        if counts.iter().all(|&c| c == 0) {
                            return bad(format!("tree {t} node {i}: empty leaf"));
                        }
                    }
                    Node::Split { feature, present, absent } => {
                        let len = tree.nodes.len();
                        if feature as usize >= self.vocabulary.len() {
                            return bad(format!("tree {t} node {i}: feature {feature} not in vocabulary"));
                        }
                        for c in [present, absent] {
                            if c as usize <= i || c as usize >= len {
                                return bad(format!("tree {t} node {i}: bad child {c}"));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, DataError> {
        let model: ForestModel = serde_json::from_str(text).map_err(|e| DataError::Invalid(format!("model: {e}")))?;
        model.validate()?;
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), DataError> {
        let mut out = BufWriter::new(File::create(path)?);
        serde_json::to_writer(&mut out, self).map_err(|e| DataError::Invalid(e.to_string()))?;
        out.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DataError> {
        let model: ForestModel = serde_json::from_reader(BufReader::new(File::open(path)?))
            .map_err(|e| DataError::Invalid(format!("model: {e}")))?;
        model.validate()?;
        Ok(model)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    /// Total correct over total examples.
    pub accuracy: f64,
    pub fold_accuracies: Vec<f64>,
    /// Example indexes held out in each fold.
    pub folds: Vec<Vec<usize>>,
}

/// Seeded shuffle split into `k` folds whose sizes differ by at most one.
pub fn make_folds(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>, TrainError> {
    if k < 2 || k > n {
        return Err(TrainError::BadFoldCount { k, n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut at = 0;
    for j in 0..k {
        let size = base + usize::from(j < extra);
        folds.push(order[at..at + size].to_vec());
        at += size;
    }
    Ok(folds)
}

/// k-fold cross-validation. Folds whose training part has one label use
/// the majority model.
pub fn cross_validate(
    examples: &[LabeledExample],
    k: usize,
    seed: u64,
    config: &ForestConfig,
) -> Result<CvReport, TrainError> {
    let folds = make_folds(examples.len(), k, seed)?;
    let results: Vec<Result<usize, TrainError>> = folds
        .par_iter()
        .map(|held_out| {
            let mut test = vec![false; examples.len()];
            for &i in held_out {
                test[i] = true;
            }
            let train: Vec<LabeledExample> = examples
                .iter()
                .zip(&test)
                .filter(|(_, &t)| !t)
                .map(|(e, _)| e.clone())
                .collect();
            let model = ForestModel::train_or_majority(&train, config)?;
            Ok(held_out
                .iter()
                .filter(|&&i| model.predict(&examples[i].features).label == examples[i].label)
                .count())
        })
        .collect();
    let mut correct = Vec::with_capacity(k);
    for r in results {
        correct.push(r?);
    }
    let fold_accuracies = correct
        .iter()
        .zip(&folds)
        .map(|(&c, f)| c as f64 / f.len() as f64)
        .collect();
    Ok(CvReport {
        accuracy: correct.iter().sum::<usize>() as f64 / examples.len() as f64,
        fold_accuracies,
        folds,
    })
}
