//! Shared inputs for the benchmarks.

use valence_core::forest::LabeledExample;
use valence_core::synthetic::separable_corpus;
use valence_core::Pipeline;

pub const SENTENCES: &[&str] = &[
    "I don't think it's a missed opportunity",
    "The screen is bright but the battery life is terrible.",
    "It would be good if the support team answered emails.",
    "I am so happy with this camera :)",
    "Nobody was angry, though the delay was annoying and the food was cold.",
];

/// A paragraph made of every sentence, repeated `times`.
pub fn paragraph(times: usize) -> String {
    let mut s = String::new();
    for _ in 0..times {
        for t in SENTENCES {
            s.push_str(t);
            if !t.ends_with('.') {
                s.push('.');
            }
            s.push(' ');
        }
    }
    s
}

pub fn synthetic_examples(pipeline: &Pipeline) -> Vec<LabeledExample> {
    separable_corpus(42)
        .iter()
        .map(|e| LabeledExample::from_text(&e.text, e.label, pipeline))
        .collect()
}
