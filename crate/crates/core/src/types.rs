//! Shared vocabulary: spans, tokens, semantic roles and semantic objects.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Character range in the source note, tagged with the sentence it belongs to.
///
/// Offsets count Unicode scalar values, not bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub sentence_index: usize,
}

impl Span {
    pub fn new(start: usize, end: usize, sentence_index: usize) -> Result<Self> {
        if start >= end {
            return Err(Error::InvalidSpan { start, end });
        }
        Ok(Span {
            start,
            end,
            sentence_index,
        })
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }

    /// Smallest span covering both.
    pub fn union(&self, other: &Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
            sentence_index: self.sentence_index,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    /// Lower-cased match key.
    pub text: String,
    pub raw: String,
    pub span: Span,
    pub index: usize,
}

/// Inclusive range of token indices covered by a semantic object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TokenRange {
    pub first: usize,
    pub last: usize,
}

impl TokenRange {
    pub fn new(first: usize, last: usize) -> Self {
        debug_assert!(first <= last);
        TokenRange { first, last }
    }

    pub fn len(&self) -> usize {
        self.last - self.first + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Half-open end, handy for slicing token vectors.
    pub fn end(&self) -> usize {
        self.last + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoleFamily {
    Grammatical,
    MeaningCue,
    MedicalTerm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FactKind {
    Disorder,
    Finding,
    Procedure,
    Test,
    Substance,
}

impl FactKind {
    pub const ALL: [FactKind; 5] = [
        FactKind::Disorder,
        FactKind::Finding,
        FactKind::Procedure,
        FactKind::Test,
        FactKind::Substance,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FactKind::Disorder => "Disorder",
            FactKind::Finding => "Finding",
            FactKind::Procedure => "Procedure",
            FactKind::Test => "Test",
            FactKind::Substance => "Substance",
        }
    }
}

impl FromStr for FactKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FactKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownRole(format!("Fact:{s}")))
    }
}

/// The function a phrase plays in a sentence. Every dictionary entry carries exactly one.
///
/// Spelled in term files and JSON as `Family:Subkind` for facts (`Fact:Disorder`) and
/// as the bare variant name otherwise (`NegationCue`, `Location`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum SemanticRole {
    // grammatical words
    Pronoun,
    Conjunction,
    Preposition,
    LinkVerbPositive,
    LinkVerbNegative,
    AuxVerbPositive,
    AuxVerbNegative,
    Article,
    Comma,
    ParticipleConfirmation,
    // meaning cues
    ConfirmationCue,
    NegationCue,
    BackwardConfirmationCue,
    BackwardNegationCue,
    SpeculationCue,
    IgnoreCue,
    // medical terms
    Fact(FactKind),
    Modifier,
    FactAttribute,
    Location,
    Relative,
}

impl SemanticRole {
    pub const ALL: [SemanticRole; 25] = [
        SemanticRole::Pronoun,
        SemanticRole::Conjunction,
        SemanticRole::Preposition,
        SemanticRole::LinkVerbPositive,
        SemanticRole::LinkVerbNegative,
        SemanticRole::AuxVerbPositive,
        SemanticRole::AuxVerbNegative,
        SemanticRole::Article,
        SemanticRole::Comma,
        SemanticRole::ParticipleConfirmation,
        SemanticRole::ConfirmationCue,
        SemanticRole::NegationCue,
        SemanticRole::BackwardConfirmationCue,
        SemanticRole::BackwardNegationCue,
        SemanticRole::SpeculationCue,
        SemanticRole::IgnoreCue,
        SemanticRole::Fact(FactKind::Disorder),
        SemanticRole::Fact(FactKind::Finding),
        SemanticRole::Fact(FactKind::Procedure),
        SemanticRole::Fact(FactKind::Test),
        SemanticRole::Fact(FactKind::Substance),
        SemanticRole::Modifier,
        SemanticRole::FactAttribute,
        SemanticRole::Location,
        SemanticRole::Relative,
    ];

    pub fn family(&self) -> RoleFamily {
        use SemanticRole::*;
        match self {
            Pronoun | Conjunction | Preposition | LinkVerbPositive | LinkVerbNegative
            | AuxVerbPositive | AuxVerbNegative | Article | Comma | ParticipleConfirmation => {
                RoleFamily::Grammatical
            }
            ConfirmationCue | NegationCue | BackwardConfirmationCue | BackwardNegationCue
            | SpeculationCue | IgnoreCue => RoleFamily::MeaningCue,
            Fact(_) | Modifier | FactAttribute | Location | Relative => RoleFamily::MedicalTerm,
        }
    }

    pub fn is_fact(&self) -> bool {
        matches!(self, SemanticRole::Fact(_))
    }

    pub fn is_medical(&self) -> bool {
        self.family() == RoleFamily::MedicalTerm
    }

    pub fn fact_kind(&self) -> Option<FactKind> {
        match self {
            SemanticRole::Fact(kind) => Some(*kind),
            _ => None,
        }
    }

    fn name(&self) -> &'static str {
        use SemanticRole::*;
        match self {
            Pronoun => "Pronoun",
            Conjunction => "Conjunction",
            Preposition => "Preposition",
            LinkVerbPositive => "LinkVerbPositive",
            LinkVerbNegative => "LinkVerbNegative",
            AuxVerbPositive => "AuxVerbPositive",
            AuxVerbNegative => "AuxVerbNegative",
            Article => "Article",
            Comma => "Comma",
            ParticipleConfirmation => "ParticipleConfirmation",
            ConfirmationCue => "ConfirmationCue",
            NegationCue => "NegationCue",
            BackwardConfirmationCue => "BackwardConfirmationCue",
            BackwardNegationCue => "BackwardNegationCue",
            SpeculationCue => "SpeculationCue",
            IgnoreCue => "IgnoreCue",
            Fact(_) => "Fact",
            Modifier => "Modifier",
            FactAttribute => "FactAttribute",
            Location => "Location",
            Relative => "Relative",
        }
    }
}

impl fmt::Display for SemanticRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemanticRole::Fact(kind) => write!(f, "Fact:{}", kind.as_str()),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for SemanticRole {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((family, sub)) = s.split_once(':') {
            if family.trim().eq_ignore_ascii_case("fact") {
                return Ok(SemanticRole::Fact(sub.parse()?));
            }
            return Err(Error::UnknownRole(s.to_string()));
        }
        SemanticRole::ALL
            .into_iter()
            .filter(|r| !r.is_fact())
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownRole(s.to_string()))
    }
}

impl From<SemanticRole> for String {
    fn from(role: SemanticRole) -> String {
        role.to_string()
    }
}

impl TryFrom<String> for SemanticRole {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Presence {
    #[default]
    Yes,
    No,
    Maybe,
}

impl fmt::Display for Presence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Presence::Yes => "YES",
            Presence::No => "NO",
            Presence::Maybe => "MAYBE",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Experiencer {
    #[default]
    #[serde(rename = "SELF")]
    Patient,
    Family,
}

impl fmt::Display for Experiencer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiencer::Patient => "SELF",
            Experiencer::Family => "FAMILY",
        })
    }
}

/// One recognized phrase occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemanticObject {
    /// Normalized (lower-cased, single-spaced) phrase text.
    pub text: String,
    pub codes: BTreeSet<String>,
    pub role: SemanticRole,
    pub span: Span,
    pub token_range: TokenRange,
    pub presence: Presence,
    pub experiencer: Experiencer,
    pub ignored: bool,
    /// Indices of child objects in the owning sentence, in attachment order.
    pub modifiers: Vec<usize>,
    /// Produced by conjunction expansion rather than read verbatim.
    pub synthetic: bool,
    /// Index of the meaning cue that decided `presence`, if any.
    pub cue: Option<usize>,
}

impl SemanticObject {
    pub fn new(
        text: impl Into<String>,
        codes: impl IntoIterator<Item = impl Into<String>>,
        role: SemanticRole,
        span: Span,
        token_range: TokenRange,
    ) -> Result<Self> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(Error::EmptyText);
        }
        let codes: BTreeSet<String> = codes.into_iter().map(Into::into).collect();
        if codes.is_empty() {
            return Err(Error::EmptyCodes);
        }
        if span.start >= span.end {
            return Err(Error::InvalidSpan {
                start: span.start,
                end: span.end,
            });
        }
        Ok(SemanticObject {
            text,
            codes,
            role,
            span,
            token_range,
            presence: Presence::Yes,
            experiencer: Experiencer::Patient,
            ignored: false,
            modifiers: Vec::new(),
            synthetic: false,
            cue: None,
        })
    }

    /// Clears everything the analyzers fill in.
    pub fn reset_analysis(&mut self) {
        self.presence = Presence::Yes;
        self.experiencer = Experiencer::Patient;
        self.ignored = false;
        self.modifiers.clear();
        self.cue = None;
    }
}

/// A sentence with its tokens and the semantic objects found in it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedSentence {
    pub index: usize,
    pub raw: String,
    pub span: Span,
    pub tokens: Vec<Token>,
    /// Ordered by `token_range.first`.
    pub objects: Vec<SemanticObject>,
}

impl AnnotatedSentence {
    pub fn facts(&self) -> impl Iterator<Item = (usize, &SemanticObject)> {
        self.objects
            .iter()
            .enumerate()
            .filter(|(_, o)| o.role.is_fact())
    }

    /// Whether `idx` is a child of some other object.
    pub fn is_attached(&self, idx: usize) -> bool {
        self.objects.iter().any(|o| o.modifiers.contains(&idx))
    }

    /// Append `child` to `parent`'s modifiers unless it is already there or would close a cycle.
    pub fn attach(&mut self, parent: usize, child: usize) -> bool {
        if parent == child
            || self.objects[parent].modifiers.contains(&child)
            || self.reaches(child, parent)
        {
            return false;
        }
        self.objects[parent].modifiers.push(child);
        true
    }

    /// Is `target` reachable from `from` through modifier links?
    pub fn reaches(&self, from: usize, target: usize) -> bool {
        let mut stack = vec![from];
        let mut seen = vec![false; self.objects.len()];
        while let Some(i) = stack.pop() {
            if i == target {
                return true;
            }
            if std::mem::replace(&mut seen[i], true) {
                continue;
            }
            stack.extend(self.objects[i].modifiers.iter().copied());
        }
        false
    }

    pub fn reset_analysis(&mut self) {
        for o in &mut self.objects {
            o.reset_analysis();
        }
    }

    /// Drop objects flagged in `remove`, renumbering modifier and cue references.
    pub(crate) fn remove_objects(&mut self, remove: &[bool]) {
        let mut remap = Vec::with_capacity(self.objects.len());
        let mut next = 0;
        for &r in remove {
            remap.push(if r { None } else { Some(next) });
            next += usize::from(!r);
        }
        let old = std::mem::take(&mut self.objects);
        for (mut obj, keep) in old.into_iter().zip(remove.iter().map(|r| !r)) {
            if !keep {
                continue;
            }
            obj.modifiers = obj.modifiers.iter().filter_map(|&m| remap[m]).collect();
            obj.cue = obj.cue.and_then(|c| remap[c]);
            self.objects.push(obj);
        }
    }
}
