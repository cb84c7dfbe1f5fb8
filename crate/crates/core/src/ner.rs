//! Named entity recognition: greedy longest-leftmost phrase matching followed by a
//! conjunction expansion pass that distributes shared prefixes and suffixes over list items.

use std::ops::Range;

use crate::lexicon::{Lexicon, PhrasePayload};
use crate::preprocess::SentenceBuffer;
use crate::types::{AnnotatedSentence, SemanticObject, SemanticRole, Span, Token, TokenRange};

/// Longest list item (in tokens) considered during expansion.
const MAX_ITEM_TOKENS: usize = 5;

/// Result of walking the dictionary from one start position.
#[derive(Debug, Clone, Copy)]
pub struct MatchCandidate<'a> {
    pub start: usize,
    /// Half-open end of the longest complete phrase, or `start` when there is none.
    pub end: usize,
    pub payload: Option<&'a PhrasePayload>,
    /// Tokens consumed along the trie before the walk stalled.
    pub partial_depth: usize,
}

impl MatchCandidate<'_> {
    pub fn is_complete(&self) -> bool {
        self.payload.is_some()
    }
}

pub fn match_at<'a>(lexicon: &'a Lexicon, tokens: &[Token], start: usize) -> MatchCandidate<'a> {
    let mut node = lexicon.root();
    let mut candidate = MatchCandidate {
        start,
        end: start,
        payload: None,
        partial_depth: 0,
    };
    for (i, tok) in tokens.iter().enumerate().skip(start) {
        match node.child(&tok.text) {
            Some(next) => node = next,
            None => break,
        }
        candidate.partial_depth += 1;
        if let Some(p) = node.payload() {
            candidate.end = i + 1;
            candidate.payload = Some(p);
        }
    }
    candidate
}

fn make_object(
    tokens: &[Token],
    range: Range<usize>,
    text: String,
    payload: &PhrasePayload,
    synthetic: bool,
) -> SemanticObject {
    let first = &tokens[range.start];
    let last = &tokens[range.end - 1];
    SemanticObject {
        text,
        codes: payload.codes.clone(),
        role: payload.role,
        span: Span {
            start: first.span.start,
            end: last.span.end,
            sentence_index: first.span.sentence_index,
        },
        token_range: TokenRange::new(range.start, range.end - 1),
        presence: Default::default(),
        experiencer: Default::default(),
        ignored: false,
        modifiers: Vec::new(),
        synthetic,
        cue: None,
    }
}

fn joined(tokens: &[Token]) -> String {
    let mut s = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        s.push_str(&t.text);
    }
    s
}

/// Scan left to right, emitting the longest phrase at each position and resuming after it.
/// Tokens that start no phrase produce nothing.
pub fn recognize(lexicon: &Lexicon, sentence: &SentenceBuffer) -> AnnotatedSentence {
    let tokens = &sentence.tokens;
    let mut objects = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let candidate = match_at(lexicon, tokens, i);
        match candidate.payload {
            Some(payload) => {
                let range = i..candidate.end;
                let text = joined(&tokens[range.clone()]);
                objects.push(make_object(tokens, range, text, payload, false));
                i = candidate.end;
            }
            None => i += 1,
        }
    }
    AnnotatedSentence {
        index: sentence.span.sentence_index,
        raw: sentence.raw.clone(),
        span: sentence.span,
        tokens: tokens.clone(),
        objects,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    /// Unmatched, or covered by a medical term: usable inside a list item.
    Free,
    Comma,
    /// "and" / "or"
    Conjunction,
    /// Any other grammatical word or cue.
    Block,
}

fn classify(annotated: &AnnotatedSentence) -> Vec<Slot> {
    let mut slots = vec![Slot::Free; annotated.tokens.len()];
    for obj in &annotated.objects {
        let slot = match obj.role {
            SemanticRole::Comma => Slot::Comma,
            SemanticRole::Conjunction if obj.text == "and" || obj.text == "or" => {
                Slot::Conjunction
            }
            role if role.is_medical() => continue,
            _ => Slot::Block,
        };
        for s in &mut slots[obj.token_range.first..obj.token_range.end()] {
            *s = slot;
        }
    }
    slots
}

/// A list `X1 (, Xi)* (,)? and|or Xn` located around one conjunction.
#[derive(Debug)]
struct ListGroup {
    /// Where X1 may start: X1 ends at `first.end` and starts anywhere inside.
    first: Range<usize>,
    middle: Vec<Range<usize>>,
    /// Tokens after the conjunction that Xn may extend over.
    last: Range<usize>,
}

fn find_group(slots: &[Slot], conj: usize) -> Option<ListGroup> {
    let free_run_before = |end: usize| {
        let mut start = end;
        while start > 0 && slots[start - 1] == Slot::Free && end - start < MAX_ITEM_TOKENS {
            start -= 1;
        }
        start
    };

    let mut sep = if conj > 0 && slots[conj - 1] == Slot::Comma {
        conj - 1
    } else {
        conj
    };
    let mut middle = Vec::new();
    let first = loop {
        let start = free_run_before(sep);
        if start == sep {
            return None;
        }
        if start > 0 && slots[start - 1] == Slot::Comma {
            middle.push(start..sep);
            sep = start - 1;
        } else {
            break start..sep;
        }
    };
    middle.reverse();

    let mut end = conj + 1;
    while end < slots.len() && slots[end] == Slot::Free && end - conj - 1 < MAX_ITEM_TOKENS {
        end += 1;
    }
    if end == conj + 1 {
        return None;
    }
    Some(ListGroup {
        first,
        middle,
        last: conj + 1..end,
    })
}

/// One rewritten list item: the tokens it was read from and the phrase it now denotes.
struct Expanded {
    source: Range<usize>,
    phrase: Vec<usize>,
}

fn texts<'t>(tokens: &'t [Token], idx: &[usize]) -> impl Iterator<Item = &'t str> + Clone + 't {
    let idx = idx.to_vec();
    idx.into_iter().map(move |i| tokens[i].text.as_str())
}

fn complete(lexicon: &Lexicon, tokens: &[Token], idx: &[usize]) -> bool {
    let mut node = lexicon.root();
    for &i in idx {
        match node.child(&tokens[i].text) {
            Some(n) => node = n,
            None => return false,
        }
    }
    node.payload().is_some()
}

/// Ends `e` (half-open) such that `prefix ++ tokens[from..e]` is a complete phrase.
fn complete_ends(
    lexicon: &Lexicon,
    tokens: &[Token],
    prefix: &[usize],
    range: Range<usize>,
) -> Vec<usize> {
    let Some(mut node) = lexicon.walk(texts(tokens, prefix).collect::<Vec<_>>()) else {
        return Vec::new();
    };
    let mut ends = Vec::new();
    for i in range {
        match node.child(&tokens[i].text) {
            Some(n) => node = n,
            None => break,
        }
        if node.payload().is_some() {
            ends.push(i + 1);
        }
    }
    ends
}

/// Find prefix P (leading part of X1) and suffix S (trailing part of Xn), not both empty,
/// such that X1·S, P·Xi·S and P·Xn are all dictionary phrases. Suffix-only sharing is tried
/// before anything involving a prefix; longer suffixes before shorter ones.
fn share(lexicon: &Lexicon, tokens: &[Token], group: &ListGroup) -> Option<Vec<Expanded>> {
    let sep1 = group.first.end;
    let cat = |parts: &[Range<usize>]| -> Vec<usize> {
        parts.iter().flat_map(|r| r.clone()).collect()
    };

    let try_combo = |x1: Range<usize>, prefix: Range<usize>, xn_end: usize, s_start: usize| {
        let suffix = s_start..xn_end;
        if prefix.is_empty() && suffix.is_empty() {
            return None;
        }
        let mut out = Vec::with_capacity(group.middle.len() + 2);
        let first = cat(&[x1.clone(), suffix.clone()]);
        if !complete(lexicon, tokens, &first) {
            return None;
        }
        out.push(Expanded {
            source: x1,
            phrase: first,
        });
        for mid in &group.middle {
            let phrase = cat(&[prefix.clone(), mid.clone(), suffix.clone()]);
            if !complete(lexicon, tokens, &phrase) {
                return None;
            }
            out.push(Expanded {
                source: mid.clone(),
                phrase,
            });
        }
        let xn = group.last.start..xn_end;
        out.push(Expanded {
            source: xn.clone(),
            phrase: cat(&[prefix, xn]),
        });
        Some(out)
    };

    // suffix sharing
    for xn_end in complete_ends(lexicon, tokens, &[], group.last.clone())
        .into_iter()
        .rev()
    {
        for s_start in group.last.start + 1..xn_end {
            for a in (group.first.start..sep1).rev() {
                if let Some(out) = try_combo(a..sep1, a..a, xn_end, s_start) {
                    return Some(out);
                }
            }
        }
    }

    // prefix sharing, optionally combined with a suffix
    for p_len in 1..group.first.len() {
        for a in group.first.start..=sep1 - p_len - 1 {
            let prefix = a..a + p_len;
            let prefix_idx: Vec<usize> = prefix.clone().collect();
            for xn_end in complete_ends(lexicon, tokens, &prefix_idx, group.last.clone())
                .into_iter()
                .rev()
            {
                for s_start in group.last.start + 1..=xn_end {
                    if let Some(out) = try_combo(a..sep1, prefix.clone(), xn_end, s_start) {
                        return Some(out);
                    }
                }
            }
        }
    }
    None
}

/// Rewrite `X1, X2, and Xn` lists whose items share a leading or trailing segment into one
/// synthetic object per item ("no mediastinal, hilar, or axillary lymphadenopathy" ->
/// mediastinal / hilar / axillary lymphadenopathy). A group is expanded only when every
/// generated phrase is in the dictionary; otherwise it is left alone. Objects lying inside an
/// expanded item (the bare "lymphadenopathy" of the last item, say) are replaced by it.
/// Running the pass twice changes nothing.
pub fn expand_conjunctions(lexicon: &Lexicon, mut annotated: AnnotatedSentence) -> AnnotatedSentence {
    let slots = classify(&annotated);
    let tokens = &annotated.tokens;
    let mut added: Vec<SemanticObject> = Vec::new();
    for conj in (0..slots.len()).filter(|&i| slots[i] == Slot::Conjunction) {
        let Some(group) = find_group(&slots, conj) else {
            continue;
        };
        let Some(items) = share(lexicon, tokens, &group) else {
            continue;
        };
        for item in items {
            let phrase_tokens: Vec<Token> = item.phrase.iter().map(|&i| tokens[i].clone()).collect();
            let text = joined(&phrase_tokens);
            let range = TokenRange::new(item.source.start, item.source.end - 1);
            let exists = annotated
                .objects
                .iter()
                .chain(added.iter())
                .any(|o| o.token_range == range && o.text == text);
            if exists {
                continue;
            }
            let payload = lexicon
                .lookup(phrase_tokens.iter())
                .expect("expansion only yields complete phrases");
            added.push(make_object(tokens, item.source, text, payload, true));
        }
    }
    if !added.is_empty() {
        debug_assert!(annotated.objects.iter().all(|o| o.modifiers.is_empty()));
        annotated.objects.retain(|o| {
            !added.iter().any(|a| {
                a.token_range.first <= o.token_range.first && o.token_range.last <= a.token_range.last
            })
        });
        annotated.objects.extend(added);
        annotated.objects.sort_by_key(|o| o.token_range.first);
    }
    annotated
}

/// `recognize` followed by `expand_conjunctions`.
pub fn annotate(lexicon: &Lexicon, sentence: &SentenceBuffer) -> AnnotatedSentence {
    expand_conjunctions(lexicon, recognize(lexicon, sentence))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::{tokenize, Abbreviations, split_sentences};
    use crate::types::FactKind;

    const FINDING: SemanticRole = SemanticRole::Fact(FactKind::Finding);

    fn sentence(text: &str) -> SentenceBuffer {
        tokenize(split_sentences(text, &Abbreviations::default()).remove(0))
    }

    fn lexicon(terms: &[(&str, SemanticRole)]) -> Lexicon {
        let mut lex = Lexicon::base();
        for (phrase, role) in terms {
            lex.add_phrase(phrase, &format!("C-{}", phrase.replace(' ', "-")), *role)
                .unwrap();
        }
        lex
    }

    fn texts_of(a: &AnnotatedSentence, role: SemanticRole) -> Vec<&str> {
        a.objects
            .iter()
            .filter(|o| o.role == role)
            .map(|o| o.text.as_str())
            .collect()
    }

    #[test]
    fn heart_attack_scan_resumes_after_match() {
        let lex = lexicon(&[
            ("heart", SemanticRole::Location),
            ("heart attack", SemanticRole::Fact(FactKind::Disorder)),
        ]);
        let a = recognize(&lex, &sentence("patient had a heart attack in 2006"));
        let texts: Vec<_> = a.objects.iter().map(|o| o.text.as_str()).collect();
        assert_eq!(texts, ["had", "a", "heart attack", "in"]);
        let mi = &a.objects[2];
        assert_eq!((mi.token_range.first, mi.token_range.last), (3, 4));
        assert_eq!(a.objects[3].token_range.first, 5);
    }

    #[test]
    fn no_dictionary_tokens_no_objects() {
        let a = recognize(&Lexicon::new(), &sentence("patient feels well"));
        assert!(a.objects.is_empty());
    }

    #[test]
    fn match_candidate_reports_partial_depth() {
        let lex = lexicon(&[("mediastinal lymphadenopathy", FINDING)]);
        let s = sentence("mediastinal , hilar");
        let c = match_at(&lex, &s.tokens, 0);
        assert!(!c.is_complete());
        assert_eq!(c.partial_depth, 1);
    }

    #[test]
    fn suffix_sharing() {
        let lex = lexicon(&[
            ("mediastinal lymphadenopathy", FINDING),
            ("hilar lymphadenopathy", FINDING),
            ("axillary lymphadenopathy", FINDING),
        ]);
        let a = annotate(&lex, &sentence("no mediastinal, hilar, or axillary lymphadenopathy"));
        assert_eq!(
            texts_of(&a, FINDING),
            [
                "mediastinal lymphadenopathy",
                "hilar lymphadenopathy",
                "axillary lymphadenopathy"
            ]
        );
        let synthetic: Vec<bool> = a.objects.iter().filter(|o| o.role == FINDING).map(|o| o.synthetic).collect();
        assert_eq!(synthetic, [true, true, false]);
        // synthetic objects carry the span of their list item
        let med = a.objects.iter().find(|o| o.text.starts_with("mediastinal")).unwrap();
        assert_eq!((med.span.start, med.span.end), (3, 14));
    }

    #[test]
    fn prefix_and_suffix_sharing() {
        let lex = lexicon(&[
            ("right upper lobes", SemanticRole::Location),
            ("right middle lobes", SemanticRole::Location),
            ("right lower lobes", SemanticRole::Location),
        ]);
        let a = annotate(&lex, &sentence("right upper, middle, and lower lobes"));
        assert_eq!(
            texts_of(&a, SemanticRole::Location),
            ["right upper lobes", "right middle lobes", "right lower lobes"]
        );
        assert!(a.objects.iter().filter(|o| o.role == SemanticRole::Location).all(|o| o.synthetic));
    }

    #[test]
    fn pure_prefix_sharing() {
        let lex = lexicon(&[
            ("left kidney", SemanticRole::Location),
            ("left ureter", SemanticRole::Location),
        ]);
        let a = annotate(&lex, &sentence("left kidney and ureter"));
        assert_eq!(texts_of(&a, SemanticRole::Location), ["left kidney", "left ureter"]);
    }

    #[test]
    fn incomplete_candidates_leave_sentence_alone() {
        let lex = lexicon(&[("swollen joints", FINDING)]);
        let before = recognize(&lex, &sentence("red, itchy, or swollen"));
        let after = expand_conjunctions(&lex, before.clone());
        assert_eq!(before, after);

        // only two of three candidates complete: no expansion at all
        let lex = lexicon(&[
            ("mediastinal lymphadenopathy", FINDING),
            ("axillary lymphadenopathy", FINDING),
        ]);
        let a = annotate(&lex, &sentence("no mediastinal, hilar, or axillary lymphadenopathy"));
        assert_eq!(texts_of(&a, FINDING), ["axillary lymphadenopathy"]);
    }

    #[test]
    fn but_is_not_a_list_conjunction() {
        let lex = lexicon(&[
            ("mediastinal lymphadenopathy", FINDING),
            ("axillary lymphadenopathy", FINDING),
        ]);
        let a = annotate(&lex, &sentence("mediastinal but axillary lymphadenopathy"));
        assert_eq!(texts_of(&a, FINDING), ["axillary lymphadenopathy"]);
    }

    #[test]
    fn expansion_is_idempotent() {
        let lex = lexicon(&[
            ("right upper lobes", SemanticRole::Location),
            ("right middle lobes", SemanticRole::Location),
            ("right lower lobes", SemanticRole::Location),
        ]);
        let once = annotate(&lex, &sentence("right upper, middle, and lower lobes"));
        let twice = expand_conjunctions(&lex, once.clone());
        assert_eq!(once, twice);
    }
}
