use crate::types::{AnnotatedSentence, SemanticRole};

/// Attach every still-unattached modifier or fact attribute, flat, to the nearest fact
/// after it, or failing that the nearest fact before it.
pub fn analyze_modifiers(s: &mut AnnotatedSentence) -> usize {
    let n = s.objects.len();
    let mut attached = vec![false; n];
    for o in &s.objects {
        for &m in &o.modifiers {
            attached[m] = true;
        }
    }
    #[allow(clippy::needless_range_loop)]
    for i in 0..n {
        if attached[i]
            || !matches!(
                s.objects[i].role,
                SemanticRole::Modifier | SemanticRole::FactAttribute
            )
        {
            continue;
        }
        let is_fact = |j: &usize| s.objects[*j].role.is_fact();
        let target = (i + 1..n)
            .find(is_fact)
            .or_else(|| (0..i).rev().find(is_fact));
        if let Some(fact) = target {
            attached[i] = s.attach(fact, i);
        }
    }
    n
}
