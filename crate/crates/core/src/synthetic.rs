//! Seeded synthetic corpora whose label is fixed by a single keyword.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::label::Polarity;

/// Label-determining keywords, shared by every domain.
pub const KEYWORDS: [(Polarity, &str); 3] = [
    (Polarity::Positive, "splendid"),
    (Polarity::Negative, "dreadful"),
    (Polarity::Neutral, "scheduled"),
];

const GENERAL_FILLER: &[&str] = &[
    "the", "a", "this", "that", "it", "was", "is", "really", "quite", "we", "they", "our", "today", "yesterday",
    "again", "very", "and", "with", "for", "on", "at", "then", "here", "there",
];

const FILLER_A: &[&str] = &[
    "camera", "battery", "screen", "charger", "laptop", "keyboard", "speaker", "cable", "lens", "printer",
    "router", "monitor", "tablet", "headset", "drive",
];

const FILLER_B: &[&str] = &[
    "pasta", "waiter", "dessert", "menu", "table", "soup", "kitchen", "salad", "chef", "wine", "bread",
    "terrace", "pizza", "coffee", "breakfast",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    /// Shared filler only.
    General,
    /// Electronics filler.
    A,
    /// Restaurant filler.
    B,
}

impl Domain {
    pub fn filler(self) -> Vec<&'static str> {
        let topical: &[&str] = match self {
            Domain::General => &[],
            Domain::A => FILLER_A,
            Domain::B => FILLER_B,
        };
        GENERAL_FILLER.iter().chain(topical).copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticExample {
    pub id: String,
    pub text: String,
    pub label: Polarity,
}

pub fn keyword(label: Polarity) -> &'static str {
    KEYWORDS.iter().find(|(l, _)| *l == label).map(|(_, k)| *k).unwrap()
}

/// `n` examples with labels cycling through the three classes. Each text is
/// 4 to 8 filler words plus the label's keyword at a random position.
pub fn generate(domain: Domain, n: usize, seed: u64) -> Vec<SyntheticExample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let filler = domain.filler();
    let prefix = match domain {
        Domain::General => "g",
        Domain::A => "a",
        Domain::B => "b",
    };
    let mut out: Vec<SyntheticExample> = (0..n)
        .map(|i| {
            let label = Polarity::ALL[i % 3];
            let len = rng.random_range(4..=8);
            let mut words: Vec<&str> = (0..len).map(|_| *filler.choose(&mut rng).unwrap()).collect();
            let at = rng.random_range(0..=words.len());
            words.insert(at, keyword(label));
            SyntheticExample {
                id: format!("{prefix}{i:04}"),
                text: words.join(" "),
                label,
            }
        })
        .collect();
    out.shuffle(&mut rng);
    out
}

/// The 200-example separable corpus.
pub fn separable_corpus(seed: u64) -> Vec<SyntheticExample> {
    generate(Domain::General, 200, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn label_is_the_keyword() {
        for e in separable_corpus(7) {
            let present: Vec<Polarity> = KEYWORDS
                .iter()
                .filter(|(_, k)| e.text.split(' ').any(|w| w == *k))
                .map(|(l, _)| *l)
                .collect();
            assert_eq!(present, [e.label], "{}", e.text);
        }
    }

    #[test]
    fn deterministic_and_balanced() {
        assert_eq!(separable_corpus(3), separable_corpus(3));
        assert_ne!(separable_corpus(3), separable_corpus(4));
        let c = separable_corpus(1);
        assert_eq!(c.len(), 200);
        for l in Polarity::ALL {
            let n = c.iter().filter(|e| e.label == l).count();
            assert!((66..=67).contains(&n));
        }
    }

    #[test]
    fn domains_share_only_general_words_and_keywords() {
        let words = |d| -> HashSet<String> {
            generate(d, 90, 5)
                .iter()
                .flat_map(|e| e.text.split(' ').map(str::to_owned).collect::<Vec<_>>())
                .collect()
        };
        let shared: HashSet<String> = words(Domain::A).intersection(&words(Domain::B)).cloned().collect();
        for w in &shared {
            assert!(GENERAL_FILLER.contains(&w.as_str()) || KEYWORDS.iter().any(|(_, k)| k == w), "{w}");
        }
        let a: HashSet<&str> = FILLER_A.iter().copied().collect();
        assert!(FILLER_B.iter().all(|w| !a.contains(w)));
    }
}
