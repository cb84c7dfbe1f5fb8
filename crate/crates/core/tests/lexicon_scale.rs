use std::io::Write;

use narrex_core::{Lexicon, SemanticRole};

#[test]
fn ten_thousand_line_term_file() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    for i in 0..10_000 {
        writeln!(file, "term{i} word{}\tC{i:05}\tFact:Finding", i % 97).unwrap();
    }
    // a repeated phrase with another code adds no new term
    writeln!(file, "term0 word0\tC99999\tFact:Finding").unwrap();
    file.flush().unwrap();

    let base = Lexicon::base().term_count();
    let mut lexicon = Lexicon::base();
    lexicon.load_term_file(file.path()).unwrap();
    assert_eq!(lexicon.term_count(), base + 10_000);
    let payload = lexicon.lookup(["term0", "word0"]).unwrap();
    assert_eq!(payload.codes.len(), 2);
    assert_eq!(lexicon.role_of("TERM9999 word8"), Some(SemanticRole::Fact(narrex_core::FactKind::Finding)));
}

#[test]
fn exported_dictionary_reloads_identically() {
    let mut lexicon = Lexicon::base();
    lexicon
        .load_terms_str(narrex_core::corpus::FIXTURE_TERMS, std::path::Path::new("fixture"))
        .unwrap();
    let mut again = Lexicon::new();
    again
        .load_terms_str(&lexicon.export_tsv(), std::path::Path::new("export"))
        .unwrap();
    assert_eq!(again.term_count(), lexicon.term_count());
    assert_eq!(again.export_tsv(), lexicon.export_tsv());
}
