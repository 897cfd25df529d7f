//! Symbolic sentiment engine.
//!
//! Words receive their prior polarity from a lexicon; dependency-triggered
//! rules then flip, neutralize or transfer those valences to obtain
//! contextual values, and the sentence valence is the mean over the
//! remaining valence bearers. Every rule application is recorded in a
//! [`RuleTrace`].

mod rules;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use rules::{Condition, Effect, RuleSet, Trigger, ValenceRule};

use crate::label::Valence;
use crate::lexicon::PolarityLexicon;
use crate::text::{clause_ranges, Pipeline, Pos, Sentence, Span};

const IRREALIS_MARKERS: &[&str] = &["would", "could", "should", "if"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValenceAnnotation {
    pub index: usize,
    pub prior: Option<f64>,
    pub contextual: Option<f64>,
    pub applied_rules: Vec<String>,
    /// Set when a modifier rule folded this token into its head's phrase;
    /// the token then no longer counts as a bearer.
    pub absorbed_into: Option<usize>,
}

impl ValenceAnnotation {
    /// Carries a valence that counts towards the sentence score.
    pub fn is_bearer(&self) -> bool {
        self.contextual.is_some() && self.absorbed_into.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub rule: String,
    pub effect: Effect,
    /// Token whose contextual valence changed.
    pub target: usize,
    pub governor: usize,
    pub dependent: usize,
    pub before: f64,
    pub after: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RuleTrace {
    pub steps: Vec<TraceStep>,
}

impl RuleTrace {
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    /// Steps that touched `token`, in order.
    pub fn for_token(&self, token: usize) -> impl Iterator<Item = &TraceStep> {
        self.steps.iter().filter(move |s| s.target == token)
    }

    pub fn count_effect(&self, effect: Effect) -> usize {
        self.steps.iter().filter(|s| s.effect == effect).count()
    }

    /// One tab-separated line per step:
    /// `step rule effect target governor dependent before after`.
    pub fn to_lines(&self) -> Vec<String> {
        self.steps
            .iter()
            .enumerate()
            .map(|(i, s)| {
                format!(
                    "{i}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    s.rule, s.effect, s.target, s.governor, s.dependent, s.before, s.after
                )
            })
            .collect()
    }

    /// Human-readable rendering with token surfaces.
    pub fn render(&self, sentence: &Sentence) -> String {
        let word = |i: usize| sentence.tokens.get(i).map_or("?", |t| t.surface.as_str());
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&format!(
                "{} {} `{}` {:+} -> {:+} (governor `{}`, dependent `{}`)\n",
                s.rule,
                s.effect,
                word(s.target),
                s.before,
                s.after,
                word(s.governor),
                word(s.dependent)
            ));
        }
        out
    }
}

impl fmt::Display for RuleTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.to_lines() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

fn flip(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        -v
    }
}

/// One annotation per token with its lexicon prior; contextual starts equal
/// to the prior.
pub fn assign_prior_valences(sentence: &Sentence, lexicon: &PolarityLexicon) -> Vec<ValenceAnnotation> {
    sentence
        .tokens
        .iter()
        .map(|t| {
            let prior = lexicon.lookup(t);
            ValenceAnnotation {
                index: t.index,
                prior,
                contextual: prior,
                applied_rules: Vec::new(),
                absorbed_into: None,
            }
        })
        .collect()
}

struct Pass<'a> {
    sentence: &'a Sentence,
    ann: Vec<ValenceAnnotation>,
    trace: RuleTrace,
    clauses: Vec<std::ops::Range<usize>>,
}

impl Pass<'_> {
    fn set(&mut self, rule: &ValenceRule, target: usize, governor: usize, dependent: usize, after: f64) {
        let a = &mut self.ann[target];
        let before = a.contextual.unwrap_or(0.0);
        a.contextual = Some(after);
        a.applied_rules.push(rule.id.clone());
        self.trace.steps.push(TraceStep {
            rule: rule.id.clone(),
            effect: rule.effect,
            target,
            governor,
            dependent,
            before,
            after,
        });
    }

    fn value(&self, i: usize) -> f64 {
        self.ann[i].contextual.unwrap_or(0.0)
    }

    fn clause_of(&self, i: usize) -> std::ops::Range<usize> {
        self.clauses
            .iter()
            .find(|c| c.contains(&i))
            .cloned()
            .unwrap_or(i..i + 1)
    }

    fn apply_clause_rule(&mut self, rule: &ValenceRule) {
        for clause in self.clauses.clone() {
            let marker = clause.clone().find(|&i| {
                let w = self.sentence.tokens[i].surface.to_lowercase();
                IRREALIS_MARKERS.contains(&w.as_str())
            });
            let Some(marker) = marker else { continue };
            for i in clause {
                if !self.ann[i].is_bearer() {
                    continue;
                }
                let after = match rule.effect {
                    Effect::Neutralize => 0.0,
                    Effect::Flip => flip(self.value(i)),
                    Effect::Transfer => continue,
                };
                self.set(rule, i, marker, i, after);
            }
        }
    }

    fn condition_holds(&self, rule: &ValenceRule, governor: usize, dependent: usize) -> bool {
        let pos = self.sentence.tokens[governor].pos;
        match rule.condition {
            Condition::DependentNegative => {
                self.ann[dependent].is_bearer() && self.ann[dependent].prior.is_some_and(|p| p < 0.0)
            }
            Condition::GovernorVerb => pos == Pos::Verb,
            Condition::GovernorAdjNoun => matches!(pos, Pos::Adj | Pos::Noun),
            Condition::Any => true,
            Condition::Irrealis => false,
        }
    }

    /// The governor itself when it bears a valence; for a verb, otherwise
    /// the nearest bearer to its right within the same clause.
    fn edge_target(&self, governor: usize) -> Option<usize> {
        if self.ann[governor].is_bearer() {
            return Some(governor);
        }
        if self.sentence.tokens[governor].pos != Pos::Verb {
            return None;
        }
        let clause = self.clause_of(governor);
        (governor + 1..clause.end).find(|&i| self.ann[i].is_bearer())
    }

    fn apply_edge_rule(&mut self, rule: &ValenceRule) {
        let Trigger::Edge(relation) = rule.trigger else { return };
        let mut edges: Vec<_> = self.sentence.edges_of(relation).copied().collect();
        edges.sort_by_key(|e| (e.dependent, e.governor));
        let absorbs = relation == crate::text::Relation::Amod;

        for e in edges {
            if !self.condition_holds(rule, e.governor, e.dependent) {
                continue;
            }
            match rule.effect {
                Effect::Transfer => {
                    if !self.ann[e.dependent].is_bearer() {
                        continue;
                    }
                    let moved = self.value(e.dependent);
                    self.absorb(rule, e.dependent, e.governor);
                    self.set(rule, e.governor, e.governor, e.dependent, moved);
                }
                Effect::Flip | Effect::Neutralize => {
                    let target = if absorbs {
                        Some(e.governor).filter(|&g| self.ann[g].is_bearer())
                    } else {
                        self.edge_target(e.governor)
                    };
                    let Some(target) = target else { continue };
                    let after = if rule.effect == Effect::Flip {
                        flip(self.value(target))
                    } else {
                        0.0
                    };
                    if absorbs && self.ann[e.dependent].is_bearer() {
                        self.absorb(rule, e.dependent, e.governor);
                    }
                    self.set(rule, target, e.governor, e.dependent, after);
                }
            }
        }
    }

    fn absorb(&mut self, rule: &ValenceRule, dependent: usize, governor: usize) {
        let a = &mut self.ann[dependent];
        a.absorbed_into = Some(governor);
        a.applied_rules.push(rule.id.clone());
    }
}

/// Applies `rules` in pass order, each as one left-to-right sweep.
pub fn apply_valence_rules(
    annotations: Vec<ValenceAnnotation>,
    sentence: &Sentence,
    rules: &RuleSet,
) -> (Vec<ValenceAnnotation>, RuleTrace) {
    let mut pass = Pass {
        sentence,
        ann: annotations,
        trace: RuleTrace::default(),
        clauses: clause_ranges(sentence),
    };
    for rule in rules.rules() {
        match rule.trigger {
            Trigger::Clause => pass.apply_clause_rule(rule),
            Trigger::Edge(_) => pass.apply_edge_rule(rule),
        }
    }
    (pass.ann, pass.trace)
}

/// Mean contextual valence over bearers; no bearers is neutral.
pub fn sentence_valence(annotations: &[ValenceAnnotation]) -> Valence {
    Valence::mean(
        annotations
            .iter()
            .filter(|a| a.is_bearer())
            .map(|a| a.contextual.unwrap_or(0.0)),
    )
}

/// Mean prior valence over all lexicon words, ignoring context.
pub fn lexical_baseline_valence(sentence: &Sentence, lexicon: &PolarityLexicon) -> Valence {
    Valence::mean(sentence.tokens.iter().filter_map(|t| lexicon.lookup(t)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceSentiment {
    pub span: Span,
    pub valence: Valence,
    pub annotations: Vec<ValenceAnnotation>,
    pub trace: RuleTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolicAnalysis {
    pub sentences: Vec<SentenceSentiment>,
    /// Mean of the sentence scores.
    pub valence: Valence,
}

/// Runs one preprocessed sentence through priors, rules and aggregation.
pub fn analyze_sentence(sentence: &Sentence, lexicon: &PolarityLexicon, rules: &RuleSet) -> SentenceSentiment {
    let priors = assign_prior_valences(sentence, lexicon);
    let (annotations, trace) = apply_valence_rules(priors, sentence, rules);
    SentenceSentiment {
        span: sentence.source_span.clone(),
        valence: sentence_valence(&annotations),
        annotations,
        trace,
    }
}

pub fn analyze_sentiment_symbolic(
    text: &str,
    pipeline: &Pipeline,
    lexicon: &PolarityLexicon,
    rules: &RuleSet,
) -> SymbolicAnalysis {
    let sentences: Vec<_> = pipeline
        .sentences(text)
        .iter()
        .map(|s| analyze_sentence(s, lexicon, rules))
        .collect();
    let valence = Valence::mean(sentences.iter().map(|s| s.valence.score));
    SymbolicAnalysis { sentences, valence }
}

/// The baseline over a whole text: mean of per-sentence baseline scores.
pub fn lexical_baseline(text: &str, pipeline: &Pipeline, lexicon: &PolarityLexicon) -> Valence {
    Valence::mean(
        pipeline
            .sentences(text)
            .iter()
            .map(|s| lexical_baseline_valence(s, lexicon).score),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::Polarity;
    use proptest::prelude::*;

    struct Fixture {
        pipeline: Pipeline,
        lexicon: PolarityLexicon,
        rules: RuleSet,
    }

    fn fx() -> Fixture {
        Fixture {
            pipeline: Pipeline::default(),
            lexicon: PolarityLexicon::seed(),
            rules: RuleSet::builtin(),
        }
    }

    impl Fixture {
        fn sentence(&self, text: &str) -> SentenceSentiment {
            analyze_sentence(&self.pipeline.sentence(text), &self.lexicon, &self.rules)
        }
    }

    #[test]
    fn priors_for_aspects_example() {
        let f = fx();
        let s = f.pipeline.sentence("this camera is awesome but too expensive");
        let ann = assign_prior_valences(&s, &f.lexicon);
        let priors: Vec<_> = ann.iter().map(|a| a.prior).collect();
        assert_eq!(priors, [None, None, None, Some(1.0), None, None, Some(-1.0)]);
        assert!(ann.iter().all(|a| a.contextual == a.prior));
    }

    #[test]
    fn priors_for_empty_and_negation() {
        let f = fx();
        assert!(assign_prior_valences(&f.pipeline.sentence(""), &f.lexicon).is_empty());
        let s = f.pipeline.sentence("it's not good");
        let priors: Vec<_> = assign_prior_valences(&s, &f.lexicon).iter().map(|a| a.prior).collect();
        assert_eq!(priors, [None, None, None, Some(1.0)]);
    }

    #[test]
    fn worked_example_two_flips() {
        let f = fx();
        let r = f.sentence("I don't think it's a missed opportunity");
        assert_eq!(r.valence.label, Polarity::Positive);
        let flips: Vec<_> = r.trace.steps.iter().map(|s| (s.rule.as_str(), s.effect)).collect();
        assert_eq!(flips, [("R1", Effect::Flip), ("R2", Effect::Flip)]);
        // "missed" folded into "opportunity"
        assert_eq!(r.annotations[7].absorbed_into, Some(8));
        assert_eq!(r.annotations[8].contextual, Some(1.0));
    }

    #[test]
    fn simple_negation() {
        let r = fx().sentence("it's not good");
        assert_eq!(r.annotations[3].contextual, Some(-1.0));
        assert_eq!(r.valence, Valence::from_score(-1.0));
        assert_eq!(r.trace.steps[0].rule, "R3");
    }

    #[test]
    fn irrealis_neutralizes() {
        let r = fx().sentence("it would be good if...");
        assert_eq!(r.annotations[3].contextual, Some(0.0));
        assert_eq!(r.valence, Valence::NEUTRAL);
        assert_eq!(r.trace.steps[0].effect, Effect::Neutralize);
    }

    #[test]
    fn neutralized_bearer_stays_zero_after_flip() {
        let r = fx().sentence("it would not be good");
        let good = r.annotations.iter().find(|a| a.prior.is_some()).unwrap();
        assert_eq!(good.contextual, Some(0.0));
        assert!(r.trace.count_effect(Effect::Flip) >= 1);
        assert_eq!(r.valence.label, Polarity::Neutral);
    }

    #[test]
    fn combiner() {
        let ann = |v: &[f64]| -> Vec<ValenceAnnotation> {
            v.iter()
                .enumerate()
                .map(|(i, &x)| ValenceAnnotation {
                    index: i,
                    prior: Some(x),
                    contextual: Some(x),
                    applied_rules: vec![],
                    absorbed_into: None,
                })
                .collect()
        };
        assert_eq!(sentence_valence(&ann(&[1.0])), Valence::from_score(1.0));
        assert_eq!(sentence_valence(&[]), Valence::NEUTRAL);
        assert_eq!(sentence_valence(&ann(&[1.0, -1.0])), Valence::NEUTRAL);
    }

    #[test]
    fn baseline_ignores_context() {
        let f = fx();
        let v = lexical_baseline_valence(&f.pipeline.sentence("it's not good"), &f.lexicon);
        assert_eq!(v, Valence::from_score(1.0));
        assert_eq!(lexical_baseline_valence(&f.pipeline.sentence(""), &f.lexicon), Valence::NEUTRAL);
        let v = lexical_baseline_valence(&f.pipeline.sentence("I don't think it's a missed opportunity"), &f.lexicon);
        assert_eq!(v, Valence::NEUTRAL);
    }

    #[test]
    fn end_to_end_examples() {
        let f = fx();
        for (text, label) in [
            ("I don't think it's a missed opportunity", Polarity::Positive),
            ("it's not good", Polarity::Negative),
            ("no one thinks it is good", Polarity::Negative),
            ("", Polarity::Neutral),
        ] {
            let a = analyze_sentiment_symbolic(text, &f.pipeline, &f.lexicon, &f.rules);
            assert_eq!(a.valence.label, label, "{text}");
        }
    }

    #[test]
    fn document_is_mean_of_sentences() {
        let f = fx();
        let a = analyze_sentiment_symbolic("It is good. It is not good. It is bad.", &f.pipeline, &f.lexicon, &f.rules);
        assert_eq!(a.sentences.len(), 3);
        assert!((a.valence.score - (-1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn transfer_moves_valence_to_governor() {
        let f = fx();
        let rules = RuleSet::load("T\tamod\tany\ttransfer\n".as_bytes()).unwrap();
        let s = f.pipeline.sentence("a terrible printer");
        let r = analyze_sentence(&s, &f.lexicon, &rules);
        assert_eq!(r.annotations[1].absorbed_into, Some(2));
        assert_eq!(r.annotations[2].contextual, Some(-1.0));
        assert_eq!(r.valence.score, -1.0);
    }

    #[test]
    fn trace_renders() {
        let f = fx();
        let s = f.pipeline.sentence("it's not good");
        let r = analyze_sentence(&s, &f.lexicon, &f.rules);
        assert_eq!(r.trace.to_lines(), ["0\tR3\tflip\t3\t3\t2\t1\t-1"]);
        assert!(r.trace.render(&s).contains("R3 flip `good` +1 -> -1"));
    }

    const WORDS: &[&str] = &[
        "not", "n't", "no", "never", "good", "bad", "missed", "opportunity", "would", "if", "but", "think", "do",
        "it", "is", "a", "the", "terrible", "very", "camera", "awesome", "expensive", "hate", "love", "nobody",
        "could", "problem", ".", "really",
    ];

    fn sentence_strategy() -> impl Strategy<Value = String> {
        prop::collection::vec(prop::sample::select(WORDS), 0..14).prop_map(|w| w.join(" "))
    }

    proptest! {
        #[test]
        fn trace_and_annotation_invariants(text in sentence_strategy()) {
            let f = fx();
            let s = f.pipeline.sentence(&text);
            let r = analyze_sentence(&s, &f.lexicon, &f.rules);
            for a in &r.annotations {
                if let Some(p) = a.prior {
                    let c = a.contextual.unwrap();
                    prop_assert!(c == 0.0 || c.abs() == p.abs());
                    let steps: Vec<_> = r.trace.for_token(a.index).collect();
                    let flips = steps.iter().filter(|s| s.effect == Effect::Flip).count();
                    let neutralized = steps.iter().any(|s| s.effect == Effect::Neutralize);
                    if neutralized {
                        prop_assert_eq!(c, 0.0);
                    } else if flips % 2 == 0 {
                        prop_assert_eq!(c, p);
                    }
                    for w in steps.windows(2) {
                        prop_assert_eq!(w[0].after, w[1].before);
                    }
                } else {
                    prop_assert!(a.contextual.is_none());
                }
            }
        }

        #[test]
        fn rule_free_sentences_agree_with_baseline(text in sentence_strategy()) {
            let f = fx();
            let s = f.pipeline.sentence(&text);
            let r = analyze_sentence(&s, &f.lexicon, &f.rules);
            if r.trace.is_empty() && r.annotations.iter().all(|a| a.absorbed_into.is_none()) {
                prop_assert_eq!(r.valence.label, lexical_baseline_valence(&s, &f.lexicon).label);
            }
        }

        #[test]
        fn deterministic(text in sentence_strategy()) {
            let f = fx();
            prop_assert_eq!(f.sentence(&text), f.sentence(&text));
        }

        #[test]
        fn flip_is_an_involution(v in -1.0f64..=1.0) {
            prop_assert_eq!(flip(flip(v)), if v == 0.0 { 0.0 } else { v });
            prop_assert_eq!(flip(0.0), 0.0);
        }
    }
}
