use super::{normalize, EmoticonTable, Token};

/// Clitic endings split off the preceding word (after the apostrophe).
const CLITICS: [&str; 6] = ["s", "m", "re", "ve", "ll", "d"];

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn char_at(text: &str, i: usize) -> Option<char> {
    text.get(i..).and_then(|s| s.chars().next())
}

/// Tokenizes `text` after NFC normalization, using the bundled emoticon
/// table. Token spans refer to the normalized string. Stems and tags are
/// left empty.
pub fn tokenize(text: &str) -> Vec<Token> {
    tokenize_with(&normalize(text), &EmoticonTable::default())
}

/// Tokenizes already-normalized text.
pub(crate) fn tokenize_with(text: &str, emoticons: &EmoticonTable) -> Vec<Token> {
    let mut tokens = Vec::new();
    let push = |tokens: &mut Vec<Token>, start: usize, end: usize| {
        let index = tokens.len();
        tokens.push(Token::raw(&text[start..end], start..end, index));
    };

    let mut i = 0;
    while let Some(c) = char_at(text, i) {
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }

        if let Some(emo) = emoticons.match_prefix(&text[i..]) {
            let end = i + emo.len();
            let ends_in_word_char = emo.chars().last().is_some_and(is_word_char);
            let followed_by_word = char_at(text, end).is_some_and(is_word_char);
            if !(ends_in_word_char && followed_by_word) {
                push(&mut tokens, i, end);
                i = end;
                continue;
            }
        }

        if is_word_char(c) {
            let end = scan_word(text, i);
            for (s, e) in split_clitics(text, i, end) {
                push(&mut tokens, s, e);
            }
            i = end;
            continue;
        }

        if is_apostrophe(c) {
            if let Some(end) = standalone_clitic(text, i) {
                push(&mut tokens, i, end);
                i = end;
                continue;
            }
        }

        // run of one repeated symbol ("...", "!!")
        let mut end = i + c.len_utf8();
        while char_at(text, end) == Some(c) {
            end += c.len_utf8();
        }
        push(&mut tokens, i, end);
        i = end;
    }
    tokens
}

/// Alphanumerics joined by single internal apostrophes or hyphens.
fn scan_word(text: &str, start: usize) -> usize {
    let mut end = start;
    loop {
        while let Some(c) = char_at(text, end).filter(|&c| is_word_char(c)) {
            end += c.len_utf8();
        }
        match char_at(text, end) {
            Some(j) if is_apostrophe(j) || j == '-' => {
                let after = end + j.len_utf8();
                if char_at(text, after).is_some_and(is_word_char) {
                    end = after;
                } else {
                    return end;
                }
            }
            _ => return end,
        }
    }
}

/// `'s`, `'ll`, ... standing on their own, not followed by a word character.
fn standalone_clitic(text: &str, start: usize) -> Option<usize> {
    let apos = char_at(text, start)?;
    let rest_start = start + apos.len_utf8();
    let rest = &text[rest_start..];
    CLITICS.iter().find_map(|cl| {
        let candidate = rest.get(..cl.len())?;
        if !candidate.eq_ignore_ascii_case(cl) {
            return None;
        }
        let end = rest_start + cl.len();
        if char_at(text, end).is_some_and(is_word_char) {
            None
        } else {
            Some(end)
        }
    })
}

/// Splits trailing clitics off the word `text[start..end]`, innermost last:
/// `don't` -> `do` + `n't`, `I'd've` -> `I` + `'d` + `'ve`.
fn split_clitics(text: &str, start: usize, end: usize) -> Vec<(usize, usize)> {
    let mut suffixes = Vec::new();
    let mut stop = end;
    loop {
        let word = &text[start..stop];
        if let Some(cut) = negation_cut(word) {
            suffixes.push((start + cut, stop));
            stop = start + cut;
            continue;
        }
        let found = CLITICS.iter().find_map(|cl| {
            let tail_len = cl.len();
            if word.len() <= tail_len || !word.is_char_boundary(word.len() - tail_len) {
                return None;
            }
            let (head, tail) = word.split_at(word.len() - tail_len);
            if !tail.eq_ignore_ascii_case(cl) {
                return None;
            }
            let apos = head.chars().last().filter(|&c| is_apostrophe(c))?;
            let cut = head.len() - apos.len_utf8();
            (cut > 0).then_some(cut)
        });
        match found {
            Some(cut) => {
                suffixes.push((start + cut, stop));
                stop = start + cut;
            }
            None => break,
        }
    }
    let mut pieces = vec![(start, stop)];
    pieces.extend(suffixes.into_iter().rev());
    pieces
}

/// Byte offset of `n't` at the end of `word`, when preceded by a word
/// character.
fn negation_cut(word: &str) -> Option<usize> {
    let mut rev = word.char_indices().rev();
    let (_, t) = rev.next()?;
    let (_, a) = rev.next()?;
    let (n_at, n) = rev.next()?;
    let (_, before) = rev.next()?;
    let matches = t.eq_ignore_ascii_case(&'t')
        && is_apostrophe(a)
        && n.eq_ignore_ascii_case(&'n')
        && is_word_char(before);
    matches.then_some(n_at)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn surfaces(text: &str) -> Vec<String> {
        tokenize(text).into_iter().map(|t| t.surface).collect()
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("   \n\t").is_empty());
    }

    #[test]
    fn clitics_are_split() {
        assert_eq!(surfaces("it's not good"), ["it", "'s", "not", "good"]);
        assert_eq!(surfaces("I don't think"), ["I", "do", "n't", "think"]);
        assert_eq!(surfaces("I'd've"), ["I", "'d", "'ve"]);
        assert_eq!(surfaces("we're here, they'll go"), ["we", "'re", "here", ",", "they", "'ll", "go"]);
        assert_eq!(surfaces("I\u{2019}m fine"), ["I", "\u{2019}m", "fine"]);
        assert_eq!(surfaces("can't"), ["ca", "n't"]);
    }

    #[test]
    fn inner_apostrophes_and_hyphens_stay() {
        assert_eq!(surfaces("rock'n'roll o'clock well-known"), ["rock'n'roll", "o'clock", "well-known"]);
    }

    #[test]
    fn emoticons_are_single_tokens() {
        let toks = tokenize("awesome :)");
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[1].surface, ":)");
        assert_eq!(toks[1].span, 8..10);
        assert_eq!(surfaces("great:-(!"), ["great", ":-(", "!"]);
        assert_eq!(surfaces(":Dude"), [":", "Dude"]);
    }

    #[test]
    fn punctuation_is_split() {
        assert_eq!(surfaces("good... really?!"), ["good", "...", "really", "?", "!"]);
    }

    #[test]
    fn indices_are_positions() {
        for (i, t) in tokenize("a b c").iter().enumerate() {
            assert_eq!(t.index, i);
        }
    }

    fn reassemble(text: &str, tokens: &[Token]) -> String {
        let mut out = String::new();
        let mut last = 0;
        for t in tokens {
            out.push_str(&text[last..t.span.start]);
            out.push_str(&t.surface);
            last = t.span.end;
        }
        out.push_str(&text[last..]);
        out
    }

    fn text_strategy() -> impl Strategy<Value = String> {
        let pieces = prop::sample::select(vec![
            "a", "B", "z", "9", "'", "\u{2019}", "-", " ", "  ", "\t", ".", "!", "?", ",", ":", ")", "(", "D",
            ";", "n", "t", "s", "ll", "ve", "é", "\u{301}", "\u{1F600}", "\n",
        ]);
        prop::collection::vec(pieces, 0..40).prop_map(|v| v.concat())
    }

    proptest! {
        #[test]
        fn round_trip_reproduces_normalized_input(text in text_strategy()) {
            let norm = normalize(&text);
            let toks = tokenize(&text);
            prop_assert_eq!(reassemble(&norm, &toks), norm.clone());
            for w in toks.windows(2) {
                prop_assert!(w[0].span.end <= w[1].span.start);
            }
            for t in &toks {
                prop_assert!(t.span.start < t.span.end);
                prop_assert_eq!(&norm[t.span.clone()], t.surface.as_str());
                prop_assert!(!t.surface.chars().any(char::is_whitespace));
            }
        }

        #[test]
        fn retokenizing_joined_surfaces_is_stable(text in text_strategy()) {
            let first = surfaces(&text);
            let again = surfaces(&first.join(" "));
            prop_assert_eq!(first, again);
        }
    }
}
