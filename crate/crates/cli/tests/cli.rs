use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use narrex_core::corpus::{FIXTURE_HIERARCHY, FIXTURE_TERMS};
use narrex_core::FactRecord;

fn narrex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_narrex")).args(args).output().unwrap()
}

fn fixture(dir: &Path) -> PathBuf {
    let path = dir.join("terms.tsv");
    fs::write(&path, FIXTURE_TERMS).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn jsonl_in_jsonl_out() {
    let dir = tempfile::tempdir().unwrap();
    let dict = fixture(dir.path());
    let input = dir.path().join("notes.jsonl");
    fs::write(
        &input,
        "{\"id\":\"a\",\"text\":\"No PE. Small effusion.\"}\n{\"id\":\"b\",\"text\":\"Mother had DM.\"}\n",
    )
    .unwrap();
    let out = dir.path().join("out.jsonl");
    let o = narrex(&["--dict", s(&dict), "--input", s(&input), "--output", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let records: Vec<FactRecord> = fs::read_to_string(&out)
        .unwrap()
        .lines()
        .map(|l| FactRecord::from_json(l).unwrap())
        .collect();
    let summary: Vec<_> = records
        .iter()
        .map(|r| format!("{} {} {} {}", r.note_id, r.text, r.presence, r.experiencer))
        .collect();
    assert_eq!(summary, ["a pe NO SELF", "a effusion YES SELF", "b dm YES FAMILY"]);
}

#[test]
fn render_prints_nested_strings() {
    let dir = tempfile::tempdir().unwrap();
    let dict = fixture(dir.path());
    let note = dir.path().join("ctpa.txt");
    fs::write(&note, "There are segmental and subsegmental filling defects in the right upper lobe, superior segment of the right lower lobe, and subsegmental filling defect in the in the anterolateral segment of the left lower lobe pulmonary arteries.").unwrap();
    let o = narrex(&["--dict", s(&dict), "--input", s(&note), "--render"]);
    assert!(o.status.success());
    assert_eq!(
        String::from_utf8(o.stdout).unwrap(),
        "# ctpa.txt\n\
         filling defects: YES (right upper lobe; superior segment (right lower lobe); segmental; subsegmental)\n\
         filling defect: YES (segment (pulmonary arteries (left lower lobe)); subsegmental)\n"
    );
}

#[test]
fn hierarchy_flag_is_applied() {
    let dir = tempfile::tempdir().unwrap();
    let dict = fixture(dir.path());
    let hierarchy = dir.path().join("h.tsv");
    fs::write(&hierarchy, FIXTURE_HIERARCHY).unwrap();
    let note = dir.path().join("n.txt");
    fs::write(&note, "Filling defects in the anterior basal segment and superior segment of the right lower lobe.").unwrap();
    let o = narrex(&["--dict", s(&dict), "--input", s(&note), "--render", "--hierarchy", s(&hierarchy)]);
    assert!(String::from_utf8(o.stdout)
        .unwrap()
        .contains("anterior basal segment (right lower lobe); superior segment (right lower lobe)"));
}

#[test]
fn directory_input_uses_file_names() {
    let dir = tempfile::tempdir().unwrap();
    let dict = fixture(dir.path());
    let notes = dir.path().join("notes");
    fs::create_dir(&notes).unwrap();
    fs::write(notes.join("b.txt"), "Atelectasis.").unwrap();
    fs::write(notes.join("a.txt"), "Pneumonia.").unwrap();
    let o = narrex(&["--dict", s(&dict), "--input", s(&notes)]);
    let ids: Vec<String> = String::from_utf8(o.stdout)
        .unwrap()
        .lines()
        .map(|l| FactRecord::from_json(l).unwrap().note_id)
        .collect();
    assert_eq!(ids, ["a.txt", "b.txt"]);
}

#[test]
fn stdin_and_malformed_lines() {
    let dir = tempfile::tempdir().unwrap();
    let dict = fixture(dir.path());
    let mut child = Command::new(env!("CARGO_BIN_EXE_narrex"))
        .args(["--dict", s(&dict), "--bench", "--include-ignored"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"{\"id\":\"1\",\"text\":\"Assess for PE.\"}\n{broken\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 1);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("<stdin>:2: skipping malformed line"), "{err}");
    assert!(err.contains("notes_processed=1 "), "{err}");
    assert!(err.contains("malformed_lines=1"), "{err}");
}

#[test]
fn missing_dictionary_exits_2() {
    let o = narrex(&["--dict", "/nonexistent/terms.tsv", "--input", "-"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("/nonexistent/terms.tsv"));
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.toml");
    fs::write(&config, "[pipeline]\nanalyzers = [\"presence\", \"negex\"]\n").unwrap();
    let o = narrex(&["--config", s(&config), "--input", "-"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("negex"));
}

#[test]
fn config_can_disable_an_analyzer() {
    let dir = tempfile::tempdir().unwrap();
    let dict = fixture(dir.path());
    let config = dir.path().join("c.toml");
    fs::write(&config, "[pipeline]\nanalyzers = [\"merge_cues\", \"locations\", \"modifiers\"]\n").unwrap();
    let note = dir.path().join("n.txt");
    fs::write(&note, "No PE.").unwrap();
    let o = narrex(&["--dict", s(&dict), "--config", s(&config), "--input", s(&note), "--render"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "# n.txt\npe: YES\n");
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for p in [&a, &b] {
        let o = narrex(&["generate", "--notes", "10", "--seed", "1", "--output", s(p)]);
        assert!(o.status.success());
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 10);
    assert_eq!(narrex(&["generate", "--notes", "0"]).status.code(), Some(2));
}
