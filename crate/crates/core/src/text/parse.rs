//! Adjacency-pattern dependency extraction.
//!
//! Patterns, applied per clause (clauses are separated by `but`):
//!
//! * `neg`: the nearest VERB, ADJ or NOUN after a negator governs it,
//!   stopping at punctuation or conjunctions.
//! * `amod`: ADJ or VERB participle immediately before a NOUN.
//! * `advmod`: ADV immediately before an ADJ.
//! * `dobj`: VERB and the nearest NOUN to its right, unless another VERB
//!   intervenes.
//! * `nsubj`: the first VERB and the leftmost PRON or NOUN before it.
//! * `conj_but`: the heads of the clauses on either side of `but`.

use std::collections::BTreeSet;
use std::ops::Range;

use super::{DependencyEdge, Pos, Relation, Sentence, Token};

const NEGATORS: &[&str] = &["not", "n't", "no", "never", "nobody", "none", "nothing", "neither", "nor", "cannot"];

fn lower(t: &Token) -> String {
    t.surface.to_lowercase().replace('\u{2019}', "'")
}

/// Whether the token is a negation particle.
pub fn is_negator(t: &Token) -> bool {
    NEGATORS.contains(&lower(t).as_str())
}

fn is_but(t: &Token) -> bool {
    lower(t) == "but"
}

fn is_participle(t: &Token) -> bool {
    if t.pos != Pos::Verb {
        return false;
    }
    let l = lower(t);
    l.len() > 4 && (l.ends_with("ed") || l.ends_with("en") || l.ends_with("ing"))
}

/// Token index ranges of the clauses of `sentence`. `but` tokens belong to
/// no clause.
pub fn clause_ranges(sentence: &Sentence) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for t in &sentence.tokens {
        if is_but(t) {
            out.push(start..t.index);
            start = t.index + 1;
        }
    }
    out.push(start..sentence.tokens.len());
    out
}

pub fn shallow_parse(sentence: &Sentence) -> Vec<DependencyEdge> {
    let toks = &sentence.tokens;
    let mut edges = BTreeSet::new();
    let mut add = |relation, governor: usize, dependent: usize| {
        if governor != dependent {
            edges.insert(DependencyEdge {
                relation,
                governor,
                dependent,
            });
        }
    };

    let clauses = clause_ranges(sentence);
    let mut heads = Vec::with_capacity(clauses.len());
    for clause in &clauses {
        let mut modifiers = BTreeSet::new();

        for i in clause.clone() {
            if i + 1 >= clause.end {
                break;
            }
            let (a, b) = (&toks[i], &toks[i + 1]);
            if b.pos == Pos::Noun && (a.pos == Pos::Adj || is_participle(a)) {
                add(Relation::Amod, i + 1, i);
                modifiers.insert(i);
            }
            if a.pos == Pos::Adv && b.pos == Pos::Adj {
                add(Relation::Advmod, i + 1, i);
            }
        }

        for i in clause.clone().filter(|&i| is_negator(&toks[i])) {
            for (j, t) in toks.iter().enumerate().take(clause.end).skip(i + 1) {
                if matches!(t.pos, Pos::Punct | Pos::Conj) {
                    break;
                }
                if matches!(t.pos, Pos::Verb | Pos::Adj | Pos::Noun) && !is_negator(t) {
                    add(Relation::Neg, j, i);
                    break;
                }
            }
        }

        let is_verb = |i: usize| toks[i].pos == Pos::Verb && !modifiers.contains(&i);
        for v in clause.clone().filter(|&i| is_verb(i)) {
            for (j, t) in toks.iter().enumerate().take(clause.end).skip(v + 1) {
                if is_verb(j) || t.pos == Pos::Punct {
                    break;
                }
                if t.pos == Pos::Noun {
                    add(Relation::Dobj, v, j);
                    break;
                }
            }
        }

        let first_verb = clause.clone().find(|&i| is_verb(i));
        if let Some(v) = first_verb {
            if let Some(s) = (clause.start..v).find(|&i| matches!(toks[i].pos, Pos::Pron | Pos::Noun)) {
                add(Relation::Nsubj, v, s);
            }
        }

        let head = first_verb
            .or_else(|| clause.clone().find(|&i| toks[i].pos == Pos::Adj))
            .or_else(|| clause.clone().find(|&i| toks[i].pos == Pos::Noun))
            .or_else(|| (!clause.is_empty()).then_some(clause.start));
        heads.push(head);
    }

    for pair in heads.windows(2) {
        if let (Some(left), Some(right)) = (pair[0], pair[1]) {
            add(Relation::ConjBut, left, right);
        }
    }

    edges.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::Pipeline;

    fn edges(text: &str) -> Vec<(Relation, usize, usize)> {
        Pipeline::default()
            .sentence(text)
            .edges
            .into_iter()
            .map(|e| (e.relation, e.governor, e.dependent))
            .collect()
    }

    #[test]
    fn single_token_has_no_edges() {
        assert!(edges("good").is_empty());
        assert!(edges("").is_empty());
    }

    #[test]
    fn negation() {
        assert_eq!(edges("not good"), [(Relation::Neg, 1, 0)]);
    }

    #[test]
    fn participle_modifier() {
        assert_eq!(edges("missed opportunity"), [(Relation::Amod, 1, 0)]);
    }

    #[test]
    fn worked_example() {
        // I do n't think it 's a missed opportunity
        // 0 1  2    3    4  5  6 7      8
        let e = edges("I don't think it's a missed opportunity");
        assert!(e.contains(&(Relation::Neg, 3, 2)));
        assert!(e.contains(&(Relation::Amod, 8, 7)));
        assert!(e.contains(&(Relation::Nsubj, 1, 0)));
    }

    #[test]
    fn negation_skips_determiners_and_numbers() {
        // no one thinks it is good
        assert!(edges("no one thinks it is good").contains(&(Relation::Neg, 2, 0)));
        assert!(edges("it is not a problem").contains(&(Relation::Neg, 4, 2)));
    }

    #[test]
    fn adverb_and_but() {
        // this camera is awesome but too expensive
        // 0    1      2  3       4   5   6
        let e = edges("this camera is awesome but too expensive");
        assert!(e.contains(&(Relation::Advmod, 6, 5)));
        assert!(e.contains(&(Relation::ConjBut, 2, 6)));
        assert!(e.contains(&(Relation::Nsubj, 2, 1)));
    }

    #[test]
    fn edges_satisfy_invariants() {
        let p = Pipeline::default();
        for text in [
            "I don't think it's a missed opportunity",
            "Ann hates cheese but Bob loves it",
            "not not not",
            "but but but",
            "the very good old camera is not bad but the price is terrible",
        ] {
            let s = p.sentence(text);
            let mut seen = BTreeSet::new();
            for e in &s.edges {
                assert_ne!(e.governor, e.dependent);
                assert!(e.governor < s.tokens.len() && e.dependent < s.tokens.len());
                assert!(seen.insert(*e));
            }
        }
    }
}
