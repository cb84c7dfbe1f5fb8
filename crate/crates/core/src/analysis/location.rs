//! Nested anatomical locations.
//!
//! Two patterns build trees, and they chain:
//!
//! * `A B` (adjacent locations): the later one is the head, `B (A)`; `A B C` gives `C (B (A))`.
//! * `A of|in|within [the] B`: the earlier one is the head, `A (B)`.
//!
//! Completed trees separated by commas or "and"/"or" are siblings. They attach to the fact
//! they belong to: the fact before them when it is followed by a preposition
//! ("defects in the ..."), otherwise the next fact in the sentence. Trees left over at the end
//! go to the last fact seen, or are dropped when the sentence has none.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::preprocess::tokenize_str;
use crate::types::{AnnotatedSentence, SemanticRole};

use SemanticRole::*;

const NESTING_PREPOSITIONS: &[&str] = &["of", "in", "within"];

/// Optional domain knowledge: which location contains which.
///
/// Consulted for lists like "anterior basal segment and superior segment of the right lower
/// lobe": when a bare list item is known to lie inside the nested part of a later sibling,
/// that nested part is shared with it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LocationHierarchy {
    parents: HashMap<String, String>,
}

fn phrase_key(phrase: &str) -> String {
    tokenize_str(phrase, 0, 0)
        .into_iter()
        .map(|t| t.text)
        .collect::<Vec<_>>()
        .join(" ")
}

impl LocationHierarchy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, child: &str, parent: &str) {
        self.parents.insert(phrase_key(child), phrase_key(parent));
    }

    pub fn parent_of(&self, child: &str) -> Option<&str> {
        self.parents.get(child).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.parents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parents.is_empty()
    }

    /// TSV `child<TAB>parent`, `#` comment lines.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut h = LocationHierarchy::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            match line.split('\t').collect::<Vec<_>>()[..] {
                [child, parent] if !child.trim().is_empty() && !parent.trim().is_empty() => {
                    h.insert(child, parent)
                }
                _ => {
                    return Err(Error::parse(
                        origin,
                        n + 1,
                        "expected child<TAB>parent",
                    ))
                }
            }
        }
        Ok(h)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Prev {
    Location,
    /// A nesting preposition (and maybe articles) right after a location.
    Nesting,
    Fact,
    Other,
}

struct Builder<'h> {
    hierarchy: Option<&'h LocationHierarchy>,
    /// Head of the adjacent-location chain being read.
    chain: Option<usize>,
    /// Heads waiting for the tree after their "of".
    awaiting: Vec<usize>,
    /// Child each head received through a nesting preposition.
    nested: Vec<Option<usize>>,
    /// Fact that trailing trees attach to.
    anchor: Option<usize>,
    /// Trees read before their fact.
    buffer: Vec<usize>,
    /// Roots of the current comma / and / or list.
    siblings: Vec<usize>,
    last_fact: Option<usize>,
}

impl Builder<'_> {
    fn close(&mut self, s: &mut AnnotatedSentence) {
        let mut root = self.chain.take();
        while let Some(head) = self.awaiting.pop() {
            if let Some(child) = root {
                if s.attach(head, child) {
                    self.nested[head] = Some(child);
                }
            }
            root = Some(head);
        }
        if let Some(root) = root {
            self.emit(s, root);
        }
    }

    fn emit(&mut self, s: &mut AnnotatedSentence, root: usize) {
        if let (Some(h), Some(inner)) = (self.hierarchy, self.nested[root]) {
            let inner_text = s.objects[inner].text.clone();
            for &sib in &self.siblings {
                let bare = s.objects[sib].modifiers.is_empty();
                if bare && h.parent_of(&s.objects[sib].text) == Some(inner_text.as_str()) {
                    s.attach(sib, inner);
                }
            }
        }
        self.siblings.push(root);
        match self.anchor {
            Some(fact) => {
                s.attach(fact, root);
            }
            None => self.buffer.push(root),
        }
    }
}

pub fn analyze_locations(s: &mut AnnotatedSentence, hierarchy: Option<&LocationHierarchy>) -> usize {
    let n = s.objects.len();
    let mut b = Builder {
        hierarchy,
        chain: None,
        awaiting: Vec::new(),
        nested: vec![None; n],
        anchor: None,
        buffer: Vec::new(),
        siblings: Vec::new(),
        last_fact: None,
    };
    let mut prev = Prev::Other;
    for i in 0..n {
        let role = s.objects[i].role;
        prev = match role {
            Location => {
                if prev == Prev::Location {
                    if let Some(c) = b.chain {
                        s.attach(i, c);
                    }
                }
                b.chain = Some(i);
                Prev::Location
            }
            Preposition
                if prev == Prev::Location
                    && NESTING_PREPOSITIONS.contains(&s.objects[i].text.as_str()) =>
            {
                b.awaiting.extend(b.chain.take());
                Prev::Nesting
            }
            Article if prev == Prev::Nesting => Prev::Nesting,
            _ => {
                b.close(s);
                match role {
                    Fact(_) => {
                        let target = b.anchor.unwrap_or(i);
                        for root in std::mem::take(&mut b.buffer) {
                            s.attach(target, root);
                        }
                        b.anchor = None;
                        b.last_fact = Some(i);
                        b.siblings.clear();
                        Prev::Fact
                    }
                    Preposition if prev == Prev::Fact => {
                        b.anchor = b.last_fact;
                        Prev::Other
                    }
                    Comma | Article => Prev::Other,
                    Conjunction if s.objects[i].text != "but" => Prev::Other,
                    _ => {
                        b.siblings.clear();
                        Prev::Other
                    }
                }
            }
        };
    }
    b.close(s);
    if let Some(fact) = b.last_fact {
        for root in std::mem::take(&mut b.buffer) {
            s.attach(fact, root);
        }
    }
    n
}
