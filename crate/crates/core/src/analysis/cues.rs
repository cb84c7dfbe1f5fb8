use crate::types::{AnnotatedSentence, SemanticRole};

use SemanticRole::*;

/// Previous object if it ends on the token right before `i` starts.
fn adjacent_prev(s: &AnnotatedSentence, remove: &[bool], i: usize) -> Option<usize> {
    let j = i.checked_sub(1)?;
    if remove[j] || s.objects[j].token_range.last + 1 != s.objects[i].token_range.first {
        return None;
    }
    Some(j)
}

/// Fuse participles and removal verbs with the verbs and negations right before them.
///
/// | combination                 | result                  |
/// |-----------------------------|-------------------------|
/// | found                       | ConfirmationCue         |
/// | not + found                 | BackwardNegationCue     |
/// | have + found                | ConfirmationCue         |
/// | haven't + found             | NegationCue             |
/// | have + been + found         | BackwardConfirmationCue |
/// | haven't + been + found      | BackwardNegationCue     |
/// | is + found                  | BackwardConfirmationCue |
/// | isn't + found               | BackwardNegationCue     |
/// | was + removed               | BackwardNegationCue     |
/// | wasn't + removed            | BackwardConfirmationCue |
///
/// Returns the number of objects read.
pub fn merge_cues(s: &mut AnnotatedSentence) -> usize {
    let n = s.objects.len();
    let mut remove = vec![false; n];
    for i in 0..n {
        let role = s.objects[i].role;
        let prev = adjacent_prev(s, &remove, i);
        let prev_role = prev.map(|p| s.objects[p].role);
        let (merged, fused): (SemanticRole, Vec<usize>) = match role {
            ParticipleConfirmation => match (prev, prev_role) {
                (Some(p), Some(LinkVerbPositive)) => {
                    let pp = adjacent_prev(s, &remove, p);
                    match pp.map(|q| s.objects[q].role) {
                        Some(AuxVerbPositive) => (BackwardConfirmationCue, vec![pp.unwrap(), p]),
                        Some(AuxVerbNegative) => (BackwardNegationCue, vec![pp.unwrap(), p]),
                        _ => (BackwardConfirmationCue, vec![p]),
                    }
                }
                (Some(p), Some(LinkVerbNegative)) => (BackwardNegationCue, vec![p]),
                (Some(p), Some(AuxVerbPositive)) => (ConfirmationCue, vec![p]),
                (Some(p), Some(AuxVerbNegative)) => (NegationCue, vec![p]),
                (Some(p), Some(NegationCue)) if s.objects[p].text == "not" => {
                    (BackwardNegationCue, vec![p])
                }
                _ => (ConfirmationCue, vec![]),
            },
            BackwardNegationCue => match (prev, prev_role) {
                (Some(p), Some(LinkVerbPositive)) => (BackwardNegationCue, vec![p]),
                (Some(p), Some(LinkVerbNegative)) => (BackwardConfirmationCue, vec![p]),
                _ => continue,
            },
            _ => continue,
        };

        for &f in &fused {
            remove[f] = true;
        }
        if let Some(&first) = fused.first() {
            let text = fused
                .iter()
                .chain(std::iter::once(&i))
                .map(|&k| s.objects[k].text.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            let span = s.objects[first].span.union(&s.objects[i].span);
            let first_token = s.objects[first].token_range.first;
            let codes: Vec<String> = fused
                .iter()
                .flat_map(|&k| s.objects[k].codes.iter().cloned())
                .collect();
            let obj = &mut s.objects[i];
            obj.text = text;
            obj.span = span;
            obj.token_range.first = first_token;
            obj.codes.extend(codes);
        }
        s.objects[i].role = merged;
    }
    if remove.iter().any(|&r| r) {
        s.remove_objects(&remove);
    }
    n
}
