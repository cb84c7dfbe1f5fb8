//! Fact records: the only objects a note's analysis hands back. Locations, modifiers and
//! attributes appear nested inside the facts they describe.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::types::{AnnotatedSentence, Experiencer, FactKind, Presence, SemanticRole};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModifierNode {
    pub text: String,
    pub codes: BTreeSet<String>,
    pub role: SemanticRole,
    pub presence: Presence,
    pub children: Vec<ModifierNode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharRange {
    pub start: usize,
    pub end: usize,
}

/// Field order here is the JSONL key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactRecord {
    pub note_id: String,
    pub sentence_index: usize,
    pub text: String,
    pub codes: BTreeSet<String>,
    pub kind: FactKind,
    pub presence: Presence,
    pub experiencer: Experiencer,
    pub ignored: bool,
    pub modifiers: Vec<ModifierNode>,
    pub span: CharRange,
    pub synthetic: bool,
}

impl FactRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("fact records always serialize")
    }

    pub fn from_json(line: &str) -> serde_json::Result<Self> {
        serde_json::from_str(line)
    }

    pub fn render(&self) -> String {
        render_text(self)
    }
}

fn build_nodes(s: &AnnotatedSentence, children: &[usize], path: &mut Vec<usize>) -> Vec<ModifierNode> {
    let mut out = Vec::with_capacity(children.len());
    for &c in children {
        if path.contains(&c) {
            continue;
        }
        let obj = &s.objects[c];
        path.push(c);
        let nested = build_nodes(s, &obj.modifiers, path);
        path.pop();
        out.push(ModifierNode {
            text: obj.text.clone(),
            codes: obj.codes.clone(),
            role: obj.role,
            presence: obj.presence,
            children: nested,
        });
    }
    out
}

/// One record per fact, in sentence order, then left-to-right order within a sentence.
pub fn to_records(note_id: &str, sentences: &[AnnotatedSentence]) -> Vec<FactRecord> {
    let mut records = Vec::new();
    for s in sentences {
        for (i, obj) in s.facts() {
            let Some(kind) = obj.role.fact_kind() else {
                continue;
            };
            let mut path = vec![i];
            records.push(FactRecord {
                note_id: note_id.to_string(),
                sentence_index: s.index,
                text: obj.text.clone(),
                codes: obj.codes.clone(),
                kind,
                presence: obj.presence,
                experiencer: obj.experiencer,
                ignored: obj.ignored,
                modifiers: build_nodes(s, &obj.modifiers, &mut path),
                span: CharRange {
                    start: obj.span.start,
                    end: obj.span.end,
                },
                synthetic: obj.synthetic,
            });
        }
    }
    records
}

fn push_nodes(out: &mut String, nodes: &[ModifierNode]) {
    out.push_str(" (");
    for (i, node) in nodes.iter().enumerate() {
        if i > 0 {
            out.push_str("; ");
        }
        out.push_str(&node.text);
        if !node.children.is_empty() {
            push_nodes(out, &node.children);
        }
    }
    out.push(')');
}

/// `text: PRESENCE (mod; mod (nested (deeper)); ...)`, without the parentheses when the fact
/// has no modifiers.
pub fn render_text(record: &FactRecord) -> String {
    let mut out = format!("{}: {}", record.text, record.presence);
    if !record.modifiers.is_empty() {
        push_nodes(&mut out, &record.modifiers);
    }
    out
}

/// Just the parenthesized modifier list, e.g. `segment (pulmonary arteries (left lower lobe))`.
pub fn render_modifiers(nodes: &[ModifierNode]) -> String {
    let mut out = String::new();
    push_nodes(&mut out, nodes);
    out[2..out.len() - 1].to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(text: &str, children: Vec<ModifierNode>) -> ModifierNode {
        ModifierNode {
            text: text.into(),
            codes: [format!("C-{text}")].into(),
            role: SemanticRole::Location,
            presence: Presence::Yes,
            children,
        }
    }

    fn record(text: &str, modifiers: Vec<ModifierNode>) -> FactRecord {
        FactRecord {
            note_id: "n1".into(),
            sentence_index: 0,
            text: text.into(),
            codes: ["C-1".to_string()].into(),
            kind: FactKind::Finding,
            presence: Presence::Yes,
            experiencer: Experiencer::Patient,
            ignored: false,
            modifiers,
            span: CharRange { start: 0, end: 2 },
            synthetic: false,
        }
    }

    #[test]
    fn bare_fact() {
        assert_eq!(render_text(&record("pe", vec![])), "pe: YES");
    }

    #[test]
    fn nested_and_flat_modifiers() {
        let r = record(
            "filling defects",
            vec![
                node("right upper lobe", vec![]),
                node("superior segment", vec![node("right lower lobe", vec![])]),
                node("segmental", vec![]),
                node("subsegmental", vec![]),
            ],
        );
        assert_eq!(
            render_text(&r),
            "filling defects: YES (right upper lobe; superior segment (right lower lobe); segmental; subsegmental)"
        );
    }

    #[test]
    fn deep_nesting() {
        let mods = vec![
            node(
                "segment",
                vec![node("pulmonary arteries", vec![node("left lower lobe", vec![])])],
            ),
            node("subsegmental", vec![]),
        ];
        assert_eq!(
            render_modifiers(&mods),
            "segment (pulmonary arteries (left lower lobe)); subsegmental"
        );
        let mut r = record("filling defect", mods);
        r.presence = Presence::Maybe;
        assert_eq!(
            render_text(&r),
            "filling defect: MAYBE (segment (pulmonary arteries (left lower lobe)); subsegmental)"
        );
    }

    #[test]
    fn rendering_keeps_structure_apart() {
        let a = record("x", vec![node("a", vec![node("b", vec![])])]);
        let b = record("x", vec![node("a", vec![]), node("b", vec![])]);
        assert_ne!(render_text(&a), render_text(&b));
    }

    #[test]
    fn json_key_order_and_round_trip() {
        let r = record("pe", vec![node("rll", vec![])]);
        let line = r.to_json();
        let keys = [
            "note_id", "sentence_index", "text", "codes", "kind", "presence", "experiencer",
            "ignored", "modifiers", "span", "synthetic",
        ];
        let mut last = 0;
        for k in keys {
            let at = line.find(&format!("\"{k}\":")).unwrap();
            assert!(at >= last, "{k} out of order in {line}");
            last = at;
        }
        assert!(line.contains("\"experiencer\":\"SELF\""));
        assert_eq!(FactRecord::from_json(&line).unwrap(), r);
    }
}
