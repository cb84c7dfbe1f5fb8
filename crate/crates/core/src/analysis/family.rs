use crate::types::{AnnotatedSentence, Experiencer, SemanticRole};

/// Any relative mentioned in the sentence makes every fact in it family history.
pub fn analyze_family(s: &mut AnnotatedSentence) -> usize {
    if s.objects.iter().any(|o| o.role == SemanticRole::Relative) {
        for o in s.objects.iter_mut().filter(|o| o.role.is_fact()) {
            o.experiencer = Experiencer::Family;
        }
    }
    s.objects.len()
}
