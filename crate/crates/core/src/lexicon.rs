//! Phrase dictionary stored as a prefix tree whose edges are whole tokens.
//!
//! Each node keeps its children in a hash map, so walking a phrase costs one hash lookup per
//! token regardless of how many terms are loaded. A node may both end a phrase and continue
//! into longer ones ("heart" / "heart attack").

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::preprocess::tokenize_str;
use crate::types::{SemanticRole, Token};

const BASE_DICTIONARY: &str = include_str!("../data/base_dictionary.tsv");

/// What a complete phrase maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhrasePayload {
    pub codes: BTreeSet<String>,
    pub role: SemanticRole,
}

#[derive(Debug, Default, Clone)]
pub struct TrieNode {
    children: HashMap<String, TrieNode>,
    payload: Option<PhrasePayload>,
}

impl TrieNode {
    pub fn child(&self, token: &str) -> Option<&TrieNode> {
        self.children.get(token)
    }

    pub fn payload(&self) -> Option<&PhrasePayload> {
        self.payload.as_ref()
    }

    pub fn has_children(&self) -> bool {
        !self.children.is_empty()
    }
}

#[derive(Debug, Default, Clone)]
pub struct Lexicon {
    root: TrieNode,
    /// phrase (tokens joined by a space) -> role
    role_index: HashMap<String, SemanticRole>,
}

impl Lexicon {
    /// An empty dictionary, without the built-in words.
    pub fn new() -> Self {
        Lexicon::default()
    }

    /// Dictionary pre-populated with grammatical words and meaning cues.
    pub fn base() -> Self {
        let mut lexicon = Lexicon::new();
        lexicon
            .load_terms_str(BASE_DICTIONARY, Path::new("<base dictionary>"))
            .expect("built-in dictionary is well formed");
        lexicon
    }

    /// Number of distinct phrases.
    pub fn term_count(&self) -> usize {
        self.role_index.len()
    }

    pub fn root(&self) -> &TrieNode {
        &self.root
    }

    /// Add `code` under the phrase spelled by `phrase_tokens`. Re-adding a phrase with the
    /// same role merges the code sets; a different role is rejected.
    pub fn add_term<S: AsRef<str>>(
        &mut self,
        phrase_tokens: &[S],
        code: &str,
        role: SemanticRole,
    ) -> Result<()> {
        if phrase_tokens.is_empty() || phrase_tokens.iter().any(|t| t.as_ref().is_empty()) {
            return Err(Error::EmptyPhrase);
        }
        let code = code.trim();
        if code.is_empty() {
            return Err(Error::EmptyCodes);
        }
        let key = phrase_tokens
            .iter()
            .map(|t| t.as_ref().to_lowercase())
            .collect::<Vec<_>>()
            .join(" ");
        if let Some(&existing) = self.role_index.get(&key) {
            if existing != role {
                return Err(Error::RoleConflict {
                    phrase: key,
                    existing,
                    requested: role,
                });
            }
        }

        let mut node = &mut self.root;
        for token in phrase_tokens {
            node = node
                .children
                .entry(token.as_ref().to_lowercase())
                .or_default();
        }
        node.payload
            .get_or_insert_with(|| PhrasePayload {
                codes: BTreeSet::new(),
                role,
            })
            .codes
            .insert(code.to_string());
        self.role_index.insert(key, role);
        Ok(())
    }

    /// Tokenize `phrase` the same way sentences are tokenized, then [`add_term`](Self::add_term).
    pub fn add_phrase(&mut self, phrase: &str, code: &str, role: SemanticRole) -> Result<()> {
        let tokens: Vec<String> = tokenize_str(phrase, 0, 0)
            .into_iter()
            .map(|t| t.text)
            .collect();
        self.add_term(&tokens, code, role)
    }

    /// Node reached by walking `tokens` from the root.
    pub fn walk<'a, I, S>(&self, tokens: I) -> Option<&TrieNode>
    where
        I: IntoIterator<Item = &'a S>,
        S: AsRef<str> + ?Sized + 'a,
    {
        let mut node = &self.root;
        for t in tokens {
            node = node.children.get(t.as_ref())?;
        }
        Some(node)
    }

    /// Payload of the exact phrase `tokens`, if it is a complete dictionary entry.
    pub fn lookup<'a, I, S>(&self, tokens: I) -> Option<&PhrasePayload>
    where
        I: IntoIterator<Item = &'a S>,
        S: AsRef<str> + ?Sized + 'a,
    {
        self.walk(tokens)?.payload.as_ref()
    }

    /// Longest complete phrase starting at `tokens[start]`, as a half-open end index.
    pub fn longest_match<S: AsRef<str>>(
        &self,
        tokens: &[S],
        start: usize,
    ) -> Option<(usize, &PhrasePayload)> {
        let mut node = &self.root;
        let mut best = None;
        for (i, t) in tokens.iter().enumerate().skip(start) {
            match node.children.get(t.as_ref()) {
                Some(next) => node = next,
                None => break,
            }
            if let Some(p) = &node.payload {
                best = Some((i + 1, p));
            }
        }
        best
    }

    pub fn role_of(&self, phrase: &str) -> Option<SemanticRole> {
        let key = tokenize_str(phrase, 0, 0)
            .into_iter()
            .map(|t| t.text)
            .collect::<Vec<_>>()
            .join(" ");
        self.role_index.get(&key).copied()
    }

    pub fn load_term_file(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.load_terms_str(&text, path)
    }

    /// Parse TSV `phrase<TAB>code<TAB>role` lines. `origin` is only used in error messages.
    pub fn load_terms_str(&mut self, text: &str, origin: &Path) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(Error::parse(
                    origin,
                    line_no,
                    format!("expected 3 tab-separated fields, found {}", fields.len()),
                ));
            }
            let (phrase, code, role) = (fields[0].trim(), fields[1].trim(), fields[2]);
            if phrase.is_empty() || code.is_empty() {
                return Err(Error::parse(origin, line_no, "empty phrase or code"));
            }
            let role: SemanticRole = role
                .parse()
                .map_err(|e: Error| Error::parse(origin, line_no, e.to_string()))?;
            self.add_phrase(phrase, code, role)
                .map_err(|e| Error::parse(origin, line_no, e.to_string()))?;
        }
        Ok(())
    }

    /// Every entry as `(phrase, codes, role)`, sorted by phrase.
    pub fn entries(&self) -> Vec<(String, &PhrasePayload)> {
        let mut out = Vec::with_capacity(self.term_count());
        let mut path = Vec::new();
        collect(&self.root, &mut path, &mut out);
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Render the whole dictionary in the term-file format, one line per (phrase, code).
    pub fn export_tsv(&self) -> String {
        let mut out = String::new();
        for (phrase, payload) in self.entries() {
            for code in &payload.codes {
                let _ = writeln!(out, "{phrase}\t{code}\t{}", payload.role);
            }
        }
        out
    }
}

fn collect<'a>(
    node: &'a TrieNode,
    path: &mut Vec<&'a str>,
    out: &mut Vec<(String, &'a PhrasePayload)>,
) {
    if let Some(p) = &node.payload {
        out.push((path.join(" "), p));
    }
    for (token, child) in &node.children {
        path.push(token);
        collect(child, path, out);
        path.pop();
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.text
    }
}
