//! The bundled phenomenon corpus and the suite that scores engines on it.

use std::collections::{BTreeMap, HashSet};
use std::fmt::{self, Write as _};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::DataError;
use crate::eval::{EvalError, TernaryClassifier};
use crate::label::Polarity;
use crate::lexicon::PolarityLexicon;
use crate::symbolic::{analyze_sentence, RuleSet};
use crate::text::Pipeline;
use crate::tsv;

const BUNDLED: &str = include_str!("../data/phenomena.tsv");

/// Id prefix of the reference cases kept verbatim.
pub const VERBATIM_PREFIX: &str = "t1-";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phenomenon {
    Negation,
    Irrealis,
    Presupposition,
    WordSense,
    PointOfView,
    CommonSense,
    MultipleEntities,
    MultipleAspects,
    MultipleHolders,
    MultipleTime,
}

impl Phenomenon {
    pub const ALL: [Phenomenon; 10] = [
        Phenomenon::Negation,
        Phenomenon::Irrealis,
        Phenomenon::Presupposition,
        Phenomenon::WordSense,
        Phenomenon::PointOfView,
        Phenomenon::CommonSense,
        Phenomenon::MultipleEntities,
        Phenomenon::MultipleAspects,
        Phenomenon::MultipleHolders,
        Phenomenon::MultipleTime,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Phenomenon::Negation => "negation",
            Phenomenon::Irrealis => "irrealis",
            Phenomenon::Presupposition => "presupposition",
            Phenomenon::WordSense => "word_sense",
            Phenomenon::PointOfView => "point_of_view",
            Phenomenon::CommonSense => "common_sense",
            Phenomenon::MultipleEntities => "multiple_entities",
            Phenomenon::MultipleAspects => "multiple_aspects",
            Phenomenon::MultipleHolders => "multiple_holders",
            Phenomenon::MultipleTime => "multiple_time",
        }
    }
}

impl fmt::Display for Phenomenon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Phenomenon {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Phenomenon::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown phenomenon `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhenomenonCase {
    pub id: String,
    pub phenomenon: Phenomenon,
    pub supported: bool,
    pub expected: Polarity,
    pub text: String,
}

impl PhenomenonCase {
    pub fn is_verbatim(&self) -> bool {
        self.id.starts_with(VERBATIM_PREFIX)
    }
}

/// Reads `id<TAB>phenomenon<TAB>supported<TAB>expected<TAB>text` lines.
pub fn load_corpus<R: BufRead>(source: R) -> Result<Vec<PhenomenonCase>, DataError> {
    let mut ids = HashSet::new();
    let mut out = Vec::new();
    for rec in tsv::read_records(source)? {
        rec.expect_columns(5)?;
        let f = |i: usize| rec.fields[i].trim();
        let err = |m: String| DataError::line(rec.line, m);
        if !ids.insert(f(0).to_owned()) {
            return Err(err(format!("duplicate case id `{}`", f(0))));
        }
        let supported = match f(2) {
            "true" => true,
            "false" => false,
            other => return Err(err(format!("supported must be true or false, got `{other}`"))),
        };
        out.push(PhenomenonCase {
            id: f(0).to_owned(),
            phenomenon: f(1).parse().map_err(err)?,
            supported,
            expected: f(3).parse().map_err(|e: crate::label::UnknownLabel| err(e.to_string()))?,
            text: rec.fields[4].clone(),
        });
    }
    Ok(out)
}

pub fn corpus_from_path(path: impl AsRef<Path>) -> Result<Vec<PhenomenonCase>, DataError> {
    load_corpus(BufReader::new(File::open(path)?))
}

pub fn bundled_corpus() -> Vec<PhenomenonCase> {
    load_corpus(BUNDLED.as_bytes()).expect("bundled corpus is valid")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseResult {
    pub id: String,
    pub phenomenon: Phenomenon,
    pub supported: bool,
    pub expected: Polarity,
    pub predicted: Polarity,
}

impl CaseResult {
    pub fn correct(&self) -> bool {
        self.expected == self.predicted
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Tally {
    pub correct: usize,
    pub total: usize,
}

impl Tally {
    fn add(&mut self, ok: bool) {
        self.total += 1;
        self.correct += usize::from(ok);
    }

    /// 0 for an empty tally.
    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub engine: String,
    pub cases: Vec<CaseResult>,
    pub overall: Tally,
    pub supported: Tally,
    pub unsupported: Tally,
    pub per_phenomenon: BTreeMap<Phenomenon, Tally>,
}

impl SuiteReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let pct = |t: &Tally| format!("{:6.2}% ({}/{})", 100.0 * t.accuracy(), t.correct, t.total);
        let _ = writeln!(s, "engine: {}", self.engine);
        let _ = writeln!(s, "  overall      {}", pct(&self.overall));
        let _ = writeln!(s, "  supported    {}", pct(&self.supported));
        let _ = writeln!(s, "  unsupported  {}", pct(&self.unsupported));
        for (p, t) in &self.per_phenomenon {
            let _ = writeln!(s, "  {:<18} {}", p.as_str(), pct(t));
        }
        s
    }
}

pub fn run_phenomenon_suite(engine: &dyn TernaryClassifier, corpus: &[PhenomenonCase]) -> Result<SuiteReport, EvalError> {
    if corpus.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut report = SuiteReport {
        engine: engine.engine_id(),
        cases: Vec::with_capacity(corpus.len()),
        overall: Tally::default(),
        supported: Tally::default(),
        unsupported: Tally::default(),
        per_phenomenon: BTreeMap::new(),
    };
    for c in corpus {
        let r = CaseResult {
            id: c.id.clone(),
            phenomenon: c.phenomenon,
            supported: c.supported,
            expected: c.expected,
            predicted: engine.classify(&c.text),
        };
        let ok = r.correct();
        report.overall.add(ok);
        if c.supported {
            report.supported.add(ok);
        } else {
            report.unsupported.add(ok);
        }
        report.per_phenomenon.entry(c.phenomenon).or_default().add(ok);
        report.cases.push(r);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub symbolic: SuiteReport,
    pub baseline: SuiteReport,
    /// Overall accuracy difference in percentage points.
    pub delta_pp: f64,
    pub supported_delta_pp: f64,
}

pub fn compare(
    symbolic: &dyn TernaryClassifier,
    baseline: &dyn TernaryClassifier,
    corpus: &[PhenomenonCase],
) -> Result<Comparison, EvalError> {
    let symbolic = run_phenomenon_suite(symbolic, corpus)?;
    let baseline = run_phenomenon_suite(baseline, corpus)?;
    Ok(Comparison {
        delta_pp: 100.0 * (symbolic.overall.accuracy() - baseline.overall.accuracy()),
        supported_delta_pp: 100.0 * (symbolic.supported.accuracy() - baseline.supported.accuracy()),
        symbolic,
        baseline,
    })
}

/// Rule traces of every case, in the committed trace file format.
pub fn trace_corpus(corpus: &[PhenomenonCase], pipeline: &Pipeline, lexicon: &PolarityLexicon, rules: &RuleSet) -> String {
    let mut out = String::new();
    for c in corpus {
        let _ = writeln!(out, "## {}\t{}\texpected {}", c.id, c.text, c.expected);
        let sentences = pipeline.sentences(&c.text);
        let mut scores = Vec::new();
        for s in &sentences {
            let a = analyze_sentence(s, lexicon, rules);
            for ann in &a.annotations {
                if let Some(prior) = ann.prior {
                    let _ = writeln!(out, "prior `{}` {:+}", s.tokens[ann.index].surface, prior);
                }
            }
            out.push_str(&a.trace.render(s));
            scores.push(a.valence.score);
        }
        let v = crate::label::Valence::mean(scores);
        let _ = writeln!(out, "=> {:+} {}\n", v.score, v.label);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::{Analyzer, Engine};

    #[test]
    fn loads_rows() {
        let c = load_corpus("a\tnegation\ttrue\tnegative\tit's not good\n".as_bytes()).unwrap();
        assert_eq!(c[0].phenomenon, Phenomenon::Negation);
        assert_eq!(c[0].expected, Polarity::Negative);
        let c = load_corpus("b\tirrealis\ttrue\tneutral\tit would be good if...\n".as_bytes()).unwrap();
        assert_eq!(c[0].text, "it would be good if...");
        for bad in [
            "a\tsarcasm\ttrue\tnegative\tyeah right\n",
            "a\tnegation\tyes\tnegative\tx\n",
            "a\tnegation\ttrue\tbad\tx\n",
            "a\tnegation\ttrue\tnegative\n",
            "a\tnegation\ttrue\tnegative\tx\na\tnegation\ttrue\tnegative\ty\n",
        ] {
            assert!(load_corpus(bad.as_bytes()).is_err(), "{bad}");
        }
    }

    #[test]
    fn bundled_covers_every_row() {
        let c = bundled_corpus();
        for p in Phenomenon::ALL {
            assert!(c.iter().filter(|x| x.phenomenon == p).count() >= 2, "{p}");
            assert!(c.iter().any(|x| x.phenomenon == p && x.is_verbatim()), "{p}");
        }
    }

    #[test]
    fn verbatim_polarities() {
        let expected = [
            ("it's not good", Polarity::Negative),
            ("no one thinks it is good", Polarity::Negative),
            ("it would be good if...", Polarity::Neutral),
            ("if it is good then ...", Polarity::Neutral),
            ("how to fix this terrible printer?", Polarity::Negative),
            ("can you give me a good advice?", Polarity::Neutral),
            ("this camera sucks", Polarity::Negative),
            ("this vaccum cleaner sucks", Polarity::Positive),
            ("this washer uses a lot of water", Polarity::Negative),
        ];
        let c = bundled_corpus();
        for (text, label) in expected {
            let case = c.iter().find(|x| x.text == text).unwrap_or_else(|| panic!("{text}"));
            assert!(case.is_verbatim());
            assert_eq!(case.expected, label, "{text}");
        }
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let a = Analyzer::seed();
        assert!(run_phenomenon_suite(&a.classifier(Engine::Symbolic).unwrap(), &[]).is_err());
    }

    #[test]
    fn negation_cases() {
        let a = Analyzer::seed();
        let neg: Vec<_> = bundled_corpus()
            .into_iter()
            .filter(|c| c.phenomenon == Phenomenon::Negation)
            .collect();
        let sym = run_phenomenon_suite(&a.classifier(Engine::Symbolic).unwrap(), &neg).unwrap();
        assert_eq!(sym.overall.accuracy(), 1.0, "{}", sym.to_text());
        let flipped: Vec<_> = neg
            .iter()
            .filter(|c| c.expected == Polarity::Negative && !c.id.starts_with("mod-"))
            .cloned()
            .collect();
        let base = run_phenomenon_suite(&a.classifier(Engine::Lexical).unwrap(), &flipped).unwrap();
        assert_eq!(base.overall.accuracy(), 0.0, "{}", base.to_text());
    }

    #[test]
    fn rule_gain() {
        let a = Analyzer::seed();
        let cmp = compare(
            &a.classifier(Engine::Symbolic).unwrap(),
            &a.classifier(Engine::Lexical).unwrap(),
            &bundled_corpus(),
        )
        .unwrap();
        assert!(cmp.delta_pp >= 5.0);
        assert!(cmp.symbolic.supported.accuracy() >= 0.9);
        assert!(cmp.symbolic.supported.accuracy() > cmp.baseline.supported.accuracy());
    }

    #[test]
    fn committed_traces_match_the_engine() {
        let a = Analyzer::seed();
        let r = &a.resources;
        let got = trace_corpus(&bundled_corpus(), &r.pipeline, &r.polarity, &r.rules);
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/phenomena.trace");
        if std::env::var_os("UPDATE_TRACES").is_some() {
            std::fs::write(path, &got).unwrap();
        }
        let committed = std::fs::read_to_string(path).expect("trace file present");
        assert_eq!(committed, got, "rerun with UPDATE_TRACES=1 after reviewing the diff");
    }
}
