use crate::types::{AnnotatedSentence, Presence, SemanticRole};

/// An ignore cue ("assess for", "exam", ...) puts every fact of the sentence out of play
/// unless a confirmation or negation cue decided that fact's presence. Ignored facts read
/// MAYBE.
pub fn analyze_ignore(s: &mut AnnotatedSentence) -> usize {
    let n = s.objects.len();
    if !s.objects.iter().any(|o| o.role == SemanticRole::IgnoreCue) {
        return n;
    }
    for i in 0..n {
        if !s.objects[i].role.is_fact() {
            continue;
        }
        let governed = s.objects[i].cue.is_some_and(|c| {
            matches!(
                s.objects[c].role,
                SemanticRole::ConfirmationCue
                    | SemanticRole::NegationCue
                    | SemanticRole::BackwardConfirmationCue
                    | SemanticRole::BackwardNegationCue
            )
        });
        if !governed {
            s.objects[i].ignored = true;
            s.objects[i].presence = Presence::Maybe;
        }
    }
    n
}
