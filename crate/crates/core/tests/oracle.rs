//! `recognize` against a brute-force longest-prefix scanner over a plain phrase set.

use std::collections::HashSet;

use narrex_core::preprocess::{preprocess, Abbreviations};
use narrex_core::{ner, FactKind, Lexicon, SemanticRole};
use proptest::prelude::*;

const VOCAB: &[&str] = &["a", "b", "c", "d", "e", "f", "lobe", "right", "x", "y"];

fn oracle(phrases: &HashSet<Vec<String>>, tokens: &[String], max_len: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let longest = (1..=max_len.min(tokens.len() - i))
            .rev()
            .find(|&len| phrases.contains(&tokens[i..i + len].to_vec()));
        match longest {
            Some(len) => {
                out.push((i, i + len - 1));
                i += len;
            }
            None => i += 1,
        }
    }
    out
}

fn word() -> impl Strategy<Value = String> {
    prop::sample::select(VOCAB).prop_map(str::to_string)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1500))]

    #[test]
    fn recognize_matches_oracle(
        dictionary in prop::collection::vec(prop::collection::vec(word(), 1..5), 0..40),
        sentence in prop::collection::vec(word(), 0..30),
    ) {
        let mut lexicon = Lexicon::new();
        let mut phrases = HashSet::new();
        for (i, phrase) in dictionary.iter().enumerate() {
            lexicon
                .add_term(phrase, &format!("C{i}"), SemanticRole::Fact(FactKind::Finding))
                .unwrap();
            phrases.insert(phrase.clone());
        }
        prop_assert_eq!(lexicon.term_count(), phrases.len());

        let text = sentence.join(" ");
        let buffers = preprocess(&text, &Abbreviations::empty());
        let expected = oracle(&phrases, &sentence, 4);
        if sentence.is_empty() {
            prop_assert!(buffers.is_empty());
            return Ok(());
        }
        prop_assert_eq!(buffers.len(), 1);
        let annotated = ner::recognize(&lexicon, &buffers[0]);
        let got: Vec<(usize, usize)> = annotated
            .objects
            .iter()
            .map(|o| (o.token_range.first, o.token_range.last))
            .collect();
        prop_assert_eq!(got, expected);
        for o in &annotated.objects {
            let joined = sentence[o.token_range.first..=o.token_range.last].join(" ");
            prop_assert_eq!(&o.text, &joined);
            prop_assert_eq!(&text.chars().skip(o.span.start).take(o.span.len()).collect::<String>(), &joined);
        }
    }
}
