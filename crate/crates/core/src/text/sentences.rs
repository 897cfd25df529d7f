use super::Span;

/// Lowercase tokens ending in `.` after which no boundary is placed.
const ABBREVIATIONS: &[&str] = &[
    "e.g.", "i.e.", "etc.", "vs.", "cf.", "mr.", "mrs.", "ms.", "dr.", "prof.", "st.", "jr.", "sr.",
    "inc.", "ltd.", "co.", "corp.", "no.", "fig.", "approx.", "dept.", "est.", "u.s.", "a.m.", "p.m.",
];

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_closer(c: char) -> bool {
    matches!(c, ')' | ']' | '"' | '\'' | '\u{201D}' | '\u{2019}')
}

/// Splits `text` into sentence spans.
///
/// A boundary follows a run of `.`, `!` or `?` (plus closing quotes or
/// brackets) when the next non-whitespace character is uppercase. A lone
/// `.` closing a known abbreviation or a single-letter initial is not a
/// boundary. Spans are trimmed of surrounding whitespace.
pub fn split_sentences(text: &str) -> Vec<Span> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut spans = Vec::new();
    let mut seg_start = 0;
    let mut i = 0;
    while i < chars.len() {
        let (_, c) = chars[i];
        if !is_terminator(c) {
            i += 1;
            continue;
        }
        let run_start = i;
        while i < chars.len() && is_terminator(chars[i].1) {
            i += 1;
        }
        let lone_period = i - run_start == 1 && c == '.';
        while i < chars.len() && is_closer(chars[i].1) {
            i += 1;
        }
        let boundary_at = chars.get(i).map_or(text.len(), |&(b, _)| b);
        let mut j = i;
        while j < chars.len() && chars[j].1.is_whitespace() {
            j += 1;
        }
        if j == i || j >= chars.len() {
            continue;
        }
        if !chars[j].1.is_uppercase() {
            continue;
        }
        if lone_period && is_abbreviation(text, chars[run_start].0) {
            continue;
        }
        push_trimmed(&mut spans, text, seg_start..boundary_at);
        seg_start = boundary_at;
    }
    push_trimmed(&mut spans, text, seg_start..text.len());
    spans
}

/// Whether the whitespace-delimited word ending with the period at
/// `period_at` is an abbreviation or an initial.
fn is_abbreviation(text: &str, period_at: usize) -> bool {
    let before = &text[..period_at];
    let word_start = before
        .char_indices()
        .rev()
        .find(|(_, c)| c.is_whitespace())
        .map_or(0, |(i, c)| i + c.len_utf8());
    let word = text[word_start..=period_at].trim_start_matches(['(', '[', '"', '\'']);
    let lower = word.to_lowercase();
    if ABBREVIATIONS.contains(&lower.as_str()) {
        return true;
    }
    let mut letters = word.chars();
    matches!((letters.next(), letters.next(), letters.next()), (Some(l), Some('.'), None) if l.is_alphabetic())
}

fn push_trimmed(spans: &mut Vec<Span>, text: &str, span: Span) {
    let slice = &text[span.clone()];
    let lead = slice.len() - slice.trim_start().len();
    let trail = slice.len() - slice.trim_end().len();
    if lead + trail < slice.len() {
        spans.push(span.start + lead..span.end - trail);
    }
}
