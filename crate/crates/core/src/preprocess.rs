//! Sentence boundary detection and tokenization.
//!
//! Sentence boundaries are `.`, `!`, `;` and line breaks. A `.` between two digits or at the
//! end of a listed abbreviation is not a boundary, and `?` never is: in clinical notes it
//! usually precedes the diagnosis under consideration. Two or more consecutive newlines always
//! end a sentence; a single newline does so only when the line does not end in a comma or a
//! conjunction.

use std::collections::HashSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::{Span, Token};

const DEFAULT_ABBREVIATIONS: &str = include_str!("../data/abbreviations.txt");

/// Punctuation that always forms a token of its own.
const STANDALONE: &[char] = &[',', '?', '+', '(', ')', '/', ':'];

const LINE_CONTINUATIONS: &[&str] = &["and", "or", "but"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abbreviations {
    entries: HashSet<String>,
}

impl Default for Abbreviations {
    fn default() -> Self {
        Abbreviations::parse(DEFAULT_ABBREVIATIONS)
    }
}

impl Abbreviations {
    pub fn empty() -> Self {
        Abbreviations {
            entries: HashSet::new(),
        }
    }

    /// One abbreviation per line, `#` starts a comment line.
    pub fn parse(text: &str) -> Self {
        let entries = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Abbreviations { entries }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Abbreviations::parse(&text))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains(word)
    }

    pub fn insert(&mut self, word: &str) {
        self.entries.insert(word.trim().to_lowercase());
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A sentence cut from a note. `tokens` stays empty until [`tokenize`] runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceBuffer {
    pub raw: String,
    pub span: Span,
    pub tokens: Vec<Token>,
}

/// Split a note into sentences. Terminal punctuation and surrounding whitespace fall into the
/// gaps between sentences, so sentence spans never overlap and every non-whitespace,
/// non-terminator character lies inside exactly one sentence.
pub fn split_sentences(note: &str, abbreviations: &Abbreviations) -> Vec<SentenceBuffer> {
    let chars: Vec<(usize, char)> = note.char_indices().collect();
    let mut out = Vec::new();
    // char index of the first non-whitespace char of the open sentence
    let mut open: Option<usize> = None;
    let mut i = 0;
    while i < chars.len() {
        let (_, c) = chars[i];
        let boundary = match c {
            '!' | ';' => Some(i + 1),
            '.' if !period_continues(&chars, i, abbreviations) => Some(i + 1),
            '\n' => newline_boundary(&chars, i),
            _ => None,
        };
        match boundary {
            Some(resume) => {
                if let Some(start) = open.take() {
                    push_sentence(note, &chars, start, i, &mut out);
                }
                i = resume;
            }
            None => {
                if open.is_none() && !c.is_whitespace() {
                    open = Some(i);
                }
                i += 1;
            }
        }
    }
    if let Some(start) = open {
        push_sentence(note, &chars, start, chars.len(), &mut out);
    }
    out
}

/// Close a sentence spanning chars `[start, end)`, trimming trailing whitespace.
fn push_sentence(
    note: &str,
    chars: &[(usize, char)],
    start: usize,
    mut end: usize,
    out: &mut Vec<SentenceBuffer>,
) {
    while end > start && chars[end - 1].1.is_whitespace() {
        end -= 1;
    }
    if end <= start {
        return;
    }
    let byte_start = chars[start].0;
    let byte_end = chars.get(end).map_or(note.len(), |&(b, _)| b);
    out.push(SentenceBuffer {
        raw: note[byte_start..byte_end].to_string(),
        span: Span {
            start,
            end,
            sentence_index: out.len(),
        },
        tokens: Vec::new(),
    });
}

fn period_continues(chars: &[(usize, char)], i: usize, abbreviations: &Abbreviations) -> bool {
    let prev = i.checked_sub(1).map(|p| chars[p].1);
    let next = chars.get(i + 1).map(|&(_, c)| c);
    if matches!((prev, next), (Some(p), Some(n)) if p.is_ascii_digit() && n.is_ascii_digit()) {
        return true;
    }
    if abbreviations.is_empty() {
        return false;
    }
    // the whitespace-delimited chunk holding this period
    let mut lo = i;
    while lo > 0 && !chars[lo - 1].1.is_whitespace() {
        lo -= 1;
    }
    let mut hi = i + 1;
    while hi < chars.len() && !chars[hi].1.is_whitespace() {
        hi += 1;
    }
    let chunk: String = chars[lo..hi].iter().map(|&(_, c)| c).collect();
    let chunk = chunk
        .trim_start_matches(['(', '"', '\''])
        .trim_end_matches([',', ')', ':', '"', '\''])
        .to_lowercase();
    abbreviations.contains(&chunk)
}

/// If the newline at `i` ends a sentence, the char index to resume scanning from.
fn newline_boundary(chars: &[(usize, char)], i: usize) -> Option<usize> {
    let mut j = i + 1;
    let mut newlines = 1;
    while j < chars.len() && chars[j].1.is_whitespace() {
        if chars[j].1 == '\n' {
            newlines += 1;
        }
        j += 1;
    }
    if newlines >= 2 {
        return Some(j);
    }
    // single line break: look at how the line ends
    let mut k = i;
    while k > 0 && chars[k - 1].1.is_whitespace() {
        k -= 1;
    }
    if k == 0 {
        return Some(j);
    }
    if chars[k - 1].1 == ',' {
        return None;
    }
    let mut w = k;
    while w > 0 && chars[w - 1].1.is_alphabetic() {
        w -= 1;
    }
    let last_word: String = chars[w..k].iter().map(|&(_, c)| c).collect();
    let last_word = last_word.to_lowercase();
    if LINE_CONTINUATIONS.contains(&last_word.as_str()) {
        None
    } else {
        Some(j)
    }
}

/// Lower-cased match key for a surface token. Typographic apostrophes fold to `'`.
pub fn normalize(raw: &str) -> String {
    raw.chars()
        .flat_map(char::to_lowercase)
        .map(|c| if c == '\u{2019}' || c == '\u{2018}' { '\'' } else { c })
        .collect()
}

/// Fill `sentence.tokens`. Whitespace separates tokens; `, ? + ( ) / :` are tokens on their
/// own; hyphens, apostrophes and inner periods stay inside words.
pub fn tokenize(mut sentence: SentenceBuffer) -> SentenceBuffer {
    sentence.tokens = tokenize_str(
        &sentence.raw,
        sentence.span.start,
        sentence.span.sentence_index,
    );
    sentence
}

/// Tokenize `text` whose first char sits at note offset `base`.
pub fn tokenize_str(text: &str, base: usize, sentence_index: usize) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut word_start: Option<(usize, usize)> = None; // (byte, char)
    let mut char_pos = 0;

    let flush = |tokens: &mut Vec<Token>, from: (usize, usize), to_byte: usize, to_char| {
        let raw = &text[from.0..to_byte];
        tokens.push(Token {
            text: normalize(raw),
            raw: raw.to_string(),
            span: Span {
                start: base + from.1,
                end: base + to_char,
                sentence_index,
            },
            index: tokens.len(),
        });
    };

    for (b, c) in text.char_indices() {
        if c.is_whitespace() || STANDALONE.contains(&c) {
            if let Some(start) = word_start.take() {
                flush(&mut tokens, start, b, char_pos);
            }
            if !c.is_whitespace() {
                flush(&mut tokens, (b, char_pos), b + c.len_utf8(), char_pos + 1);
            }
        } else if word_start.is_none() {
            word_start = Some((b, char_pos));
        }
        char_pos += 1;
    }
    if let Some(start) = word_start {
        flush(&mut tokens, start, text.len(), char_pos);
    }
    tokens
}

/// Split and tokenize in one go.
pub fn preprocess(note: &str, abbreviations: &Abbreviations) -> Vec<SentenceBuffer> {
    split_sentences(note, abbreviations)
        .into_iter()
        .map(tokenize)
        .collect()
}
