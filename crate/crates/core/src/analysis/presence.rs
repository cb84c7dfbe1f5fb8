//! Presence: YES / NO / MAYBE for every fact, from negation, confirmation and speculation cues.
//!
//! A single left-to-right pass. Forward cues open a scope that lasts until the sentence
//! ends, "but", another forward cue, a clause break, or a gap of more than
//! `forward_scope_max_gap` unmatched tokens since the last object read inside the scope.
//! Backward cues ("is not found", "was removed") act on the nearest preceding fact together
//! with the facts listed alongside it.

use crate::types::{AnnotatedSentence, Presence, SemanticRole};

use super::PipelineConfig;

use SemanticRole::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Positive,
    Negated,
    Speculated,
    /// Positive, but decided by a cue rather than by default.
    Confirmed,
}

/// Progress through "no <attribute> <preposition> <fact>".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttributeScope {
    None,
    /// Negated attribute read right after its cue.
    Attribute(usize),
    /// ... followed by a preposition.
    Preposition(usize),
}

#[derive(Debug, Clone)]
pub struct AnalyzerState {
    pub mode: Mode,
    /// Cue that opened the current scope.
    pub last_cue: Option<usize>,
    /// Last token of the last object read while a scope was open.
    pub last_token: Option<usize>,
    pub pending: AttributeScope,
}

impl AnalyzerState {
    fn new() -> Self {
        AnalyzerState {
            mode: Mode::Positive,
            last_cue: None,
            last_token: None,
            pending: AttributeScope::None,
        }
    }

    fn open(&mut self, mode: Mode, cue: usize) {
        self.mode = mode;
        self.last_cue = Some(cue);
    }

    fn close(&mut self) {
        self.mode = Mode::Positive;
        self.last_cue = None;
        self.last_token = None;
        self.pending = AttributeScope::None;
    }

    fn verdict(&self) -> (Presence, Option<usize>) {
        match self.mode {
            Mode::Positive => (Presence::Yes, None),
            Mode::Negated => (Presence::No, self.last_cue),
            Mode::Speculated => (Presence::Maybe, self.last_cue),
            Mode::Confirmed => (Presence::Yes, self.last_cue),
        }
    }
}

fn is_list_conjunction(s: &AnnotatedSentence, i: usize) -> bool {
    s.objects[i].role == Conjunction && s.objects[i].text != "but"
}

/// "to suggest": an infinitival cue that stays inside the clause before it.
fn follows_to(s: &AnnotatedSentence, i: usize) -> bool {
    i > 0 && s.objects[i - 1].role == Preposition && s.objects[i - 1].text == "to"
}

/// ", suggesting" or "and it suggests": the cue opens a new clause.
fn opens_clause(s: &AnnotatedSentence, i: usize) -> bool {
    match i {
        0 => false,
        1 => s.objects[0].role == Comma,
        _ => {
            let prev = s.objects[i - 1].role;
            prev == Comma || (prev == Pronoun && s.objects[i - 2].role == Conjunction)
        }
    }
}

/// Nearest fact before `cue`, plus facts chained to it by commas, "and"/"or" and the
/// modifiers, locations and function words that can sit inside such a list.
fn fact_group(s: &AnnotatedSentence, cue: usize) -> Vec<usize> {
    let Some(head) = (0..cue).rev().find(|&j| s.objects[j].role.is_fact()) else {
        return Vec::new();
    };
    let mut group = vec![head];
    for j in (0..head).rev() {
        match s.objects[j].role {
            Fact(_) => group.push(j),
            Comma | Modifier | Location | FactAttribute | Article | Preposition => {}
            Conjunction if is_list_conjunction(s, j) => {}
            _ => break,
        }
    }
    group
}

pub fn analyze_presence(s: &mut AnnotatedSentence, config: &PipelineConfig) -> usize {
    let n = s.objects.len();
    let mut st = AnalyzerState::new();
    let mut seen_fact = false;
    for i in 0..n {
        let role = s.objects[i].role;
        let range = s.objects[i].token_range;

        if st.mode != Mode::Positive {
            if let Some(last) = st.last_token {
                if range.first > last + 1 + config.forward_scope_max_gap {
                    st.close();
                }
            }
        }

        let mut keep_pending = false;
        match role {
            NegationCue => st.open(Mode::Negated, i),
            ConfirmationCue => st.open(Mode::Confirmed, i),
            SpeculationCue => {
                if st.mode == Mode::Negated && follows_to(s, i) {
                    // stays inside the negated clause
                } else if seen_fact && opens_clause(s, i) {
                    st.open(Mode::Confirmed, i);
                } else {
                    st.open(Mode::Speculated, i);
                }
            }
            BackwardNegationCue => {
                for f in fact_group(s, i) {
                    s.objects[f].presence = Presence::No;
                    s.objects[f].cue = Some(i);
                }
            }
            BackwardConfirmationCue => {
                for f in fact_group(s, i) {
                    if s.objects[f].cue.is_none() {
                        s.objects[f].presence = Presence::Yes;
                        s.objects[f].cue = Some(i);
                    }
                }
            }
            Conjunction if s.objects[i].text == "but" => st.close(),
            Pronoun if i > 0 && s.objects[i - 1].role == Conjunction => st.close(),
            FactAttribute => {
                let (presence, cue) = st.verdict();
                s.objects[i].presence = presence;
                s.objects[i].cue = cue;
                if st.mode == Mode::Negated && st.last_cue == Some(i.wrapping_sub(1)) {
                    st.pending = AttributeScope::Attribute(i);
                    keep_pending = true;
                }
            }
            Preposition => {
                if let AttributeScope::Attribute(a) | AttributeScope::Preposition(a) = st.pending
                {
                    st.pending = AttributeScope::Preposition(a);
                    keep_pending = true;
                }
            }
            Article => keep_pending = true,
            Fact(_) => {
                seen_fact = true;
                if let AttributeScope::Preposition(attr) = st.pending {
                    // the negation covers the attribute only
                    s.objects[i].presence = Presence::Yes;
                    s.objects[i].cue = None;
                    s.attach(i, attr);
                    st.close();
                } else {
                    let (presence, cue) = st.verdict();
                    s.objects[i].presence = presence;
                    s.objects[i].cue = cue;
                }
            }
            _ => {}
        }
        if !keep_pending {
            st.pending = AttributeScope::None;
        }
        if st.mode != Mode::Positive {
            st.last_token = Some(range.last);
        }
    }
    n
}
