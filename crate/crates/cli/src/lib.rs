//! Batch processing of note corpora: reader -> worker pool -> single writer.

use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crossbeam::channel;
use narrex_core::{render_text, Engine, FactRecord, Note};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Engine(#[from] narrex_core::Error),
    #[error("cannot read input {path}: {source}")]
    Input { path: PathBuf, source: io::Error },
    #[error("cannot write output: {0}")]
    Output(#[source] io::Error),
    #[error("a worker thread panicked")]
    Worker,
}

impl CliError {
    /// 2 for bad configuration or unreadable input, 1 for failures mid-run.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Engine(_) | CliError::Input { .. } => 2,
            CliError::Output(_) | CliError::Worker => 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunStats {
    pub notes_processed: u64,
    /// Input bytes consumed, including skipped lines.
    pub bytes_processed: u64,
    pub wall_ms: f64,
    /// Sum of the time spent inside `process_note`.
    pub engine_ms: f64,
    pub malformed_lines: u64,
    pub facts_emitted: u64,
}

impl fmt::Display for RunStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "notes_processed={} bytes_processed={} wall_ms={:.0} engine_ms={:.0} malformed_lines={} facts_emitted={}",
            self.notes_processed,
            self.bytes_processed,
            self.wall_ms,
            self.engine_ms,
            self.malformed_lines,
            self.facts_emitted
        )
    }
}

/// Where notes come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputSource {
    /// JSONL on standard input.
    Stdin,
    /// `{"id": ..., "text": ...}` per line.
    Jsonl(PathBuf),
    /// Whole file is one note, id = file name.
    TextFile(PathBuf),
    /// Every regular file is one note, id = file name, in name order.
    Directory(PathBuf),
}

impl InputSource {
    pub fn from_arg(arg: &str) -> Result<Self, CliError> {
        if arg == "-" {
            return Ok(InputSource::Stdin);
        }
        let path = PathBuf::from(arg);
        let meta = fs::metadata(&path).map_err(|source| CliError::Input {
            path: path.clone(),
            source,
        })?;
        Ok(if meta.is_dir() {
            InputSource::Directory(path)
        } else if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("jsonl")) {
            InputSource::Jsonl(path)
        } else {
            InputSource::TextFile(path)
        })
    }
}

#[derive(Debug)]
enum Item {
    Note(Note),
    Malformed,
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn input_error(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Input {
        path: path.to_path_buf(),
        source,
    }
}

fn read_jsonl<R: BufRead>(
    mut reader: R,
    origin: &Path,
    emit: &mut dyn FnMut(Item, u64) -> bool,
) -> Result<(), CliError> {
    let mut line = String::new();
    let mut number = 0;
    loop {
        line.clear();
        let n = reader.read_line(&mut line).map_err(input_error(origin))?;
        if n == 0 {
            return Ok(());
        }
        number += 1;
        if line.trim().is_empty() {
            continue;
        }
        let item = match serde_json::from_str::<Note>(&line) {
            Ok(note) => Item::Note(note),
            Err(e) => {
                eprintln!("warning: {}:{number}: skipping malformed line: {e}", origin.display());
                Item::Malformed
            }
        };
        if !emit(item, n as u64) {
            return Ok(());
        }
    }
}

fn read_text_note(path: &Path, emit: &mut dyn FnMut(Item, u64) -> bool) -> Result<bool, CliError> {
    let bytes = fs::read(path).map_err(input_error(path))?;
    let size = bytes.len() as u64;
    let item = match String::from_utf8(bytes) {
        Ok(text) => Item::Note(Note {
            id: file_name(path),
            text,
        }),
        Err(_) => {
            eprintln!("warning: {}: skipping file that is not UTF-8", path.display());
            Item::Malformed
        }
    };
    Ok(emit(item, size))
}

/// Calls `emit` with each note (or malformed entry) and its size in bytes, in input order,
/// until the input ends or `emit` returns false.
fn read_input(input: &InputSource, emit: &mut dyn FnMut(Item, u64) -> bool) -> Result<(), CliError> {
    match input {
        InputSource::Stdin => read_jsonl(io::stdin().lock(), Path::new("<stdin>"), emit),
        InputSource::Jsonl(path) => {
            let file = File::open(path).map_err(input_error(path))?;
            read_jsonl(BufReader::with_capacity(1 << 16, file), path, emit)
        }
        InputSource::TextFile(path) => read_text_note(path, emit).map(|_| ()),
        InputSource::Directory(dir) => {
            let mut files = Vec::new();
            for entry in fs::read_dir(dir).map_err(input_error(dir))? {
                let entry = entry.map_err(input_error(dir))?;
                if entry.file_type().map_err(input_error(dir))?.is_file() {
                    files.push(entry.path());
                }
            }
            files.sort();
            for path in files {
                if !read_text_note(&path, emit)? {
                    break;
                }
            }
            Ok(())
        }
    }
}

/// Reads every note of `input` into memory.
pub fn read_notes(input: &InputSource) -> Result<(Vec<Note>, RunStats), CliError> {
    let mut notes = Vec::new();
    let mut stats = RunStats::default();
    read_input(input, &mut |item, bytes| {
        stats.bytes_processed += bytes;
        match item {
            Item::Note(n) => notes.push(n),
            Item::Malformed => stats.malformed_lines += 1,
        }
        true
    })?;
    Ok((notes, stats))
}

#[derive(Debug, Clone)]
pub struct BatchOptions {
    pub threads: usize,
    /// Keep input order when threads > 1.
    pub sorted: bool,
    /// Rendered text instead of JSONL.
    pub render: bool,
    pub include_ignored: bool,
}

impl Default for BatchOptions {
    fn default() -> Self {
        BatchOptions {
            threads: 1,
            sorted: false,
            render: false,
            include_ignored: false,
        }
    }
}

/// Output for one note, plus how many records it holds.
pub fn format_records(note_id: &str, records: &[FactRecord], opts: &BatchOptions) -> (String, u64) {
    let mut out = String::new();
    let mut count = 0;
    for r in records.iter().filter(|r| opts.include_ignored || !r.ignored) {
        if opts.render {
            if count == 0 {
                out.push_str("# ");
                out.push_str(note_id);
                out.push('\n');
            }
            out.push_str(&render_text(r));
        } else {
            out.push_str(&r.to_json());
        }
        out.push('\n');
        count += 1;
    }
    (out, count)
}

struct Processed {
    seq: u64,
    chunk: String,
    facts: u64,
    engine: Duration,
}

fn process(engine: &Engine, seq: u64, note: &Note, opts: &BatchOptions) -> Processed {
    let start = Instant::now();
    let records = engine.process_note(&note.id, &note.text);
    let engine_time = start.elapsed();
    let (chunk, facts) = format_records(&note.id, &records, opts);
    Processed {
        seq,
        chunk,
        facts,
        engine: engine_time,
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

/// Process `input` with `engine` and write the records to `out`.
///
/// `wall_ms` covers reading, processing and writing; building the engine is not included.
pub fn run_batch<W: Write>(
    engine: &Engine,
    input: &InputSource,
    out: W,
    opts: &BatchOptions,
) -> Result<RunStats, CliError> {
    let started = Instant::now();
    let mut stats = if opts.threads <= 1 {
        run_sequential(engine, input, out, opts)?
    } else {
        run_parallel(engine, input, out, opts)?
    };
    stats.wall_ms = ms(started.elapsed());
    Ok(stats)
}

fn run_sequential<W: Write>(
    engine: &Engine,
    input: &InputSource,
    out: W,
    opts: &BatchOptions,
) -> Result<RunStats, CliError> {
    let mut out = io::BufWriter::with_capacity(1 << 16, out);
    let mut stats = RunStats::default();
    let mut engine_time = Duration::ZERO;
    let mut write_error = None;
    let mut seq = 0;
    read_input(input, &mut |item, bytes| {
        stats.bytes_processed += bytes;
        let note = match item {
            Item::Note(note) => note,
            Item::Malformed => {
                stats.malformed_lines += 1;
                return true;
            }
        };
        let p = process(engine, seq, &note, opts);
        seq += 1;
        stats.notes_processed += 1;
        stats.facts_emitted += p.facts;
        engine_time += p.engine;
        if let Err(e) = out.write_all(p.chunk.as_bytes()) {
            write_error = Some(e);
            return false;
        }
        true
    })?;
    if let Some(e) = write_error {
        return Err(CliError::Output(e));
    }
    out.flush().map_err(CliError::Output)?;
    stats.engine_ms = ms(engine_time);
    Ok(stats)
}

fn run_parallel<W: Write>(
    engine: &Engine,
    input: &InputSource,
    out: W,
    opts: &BatchOptions,
) -> Result<RunStats, CliError> {
    let (note_tx, note_rx) = channel::bounded::<(u64, Note)>(opts.threads * 64);
    let (done_tx, done_rx) = channel::bounded::<Processed>(opts.threads * 64);

    std::thread::scope(|scope| {
        let reader = scope.spawn(move || {
            let mut stats = RunStats::default();
            let mut seq = 0;
            let result = read_input(input, &mut |item, bytes| {
                stats.bytes_processed += bytes;
                match item {
                    Item::Note(note) => {
                        let sent = note_tx.send((seq, note)).is_ok();
                        seq += 1;
                        sent
                    }
                    Item::Malformed => {
                        stats.malformed_lines += 1;
                        true
                    }
                }
            });
            result.map(|_| stats)
        });

        for _ in 0..opts.threads {
            let note_rx = note_rx.clone();
            let done_tx = done_tx.clone();
            scope.spawn(move || {
                for (seq, note) in note_rx {
                    if done_tx.send(process(engine, seq, &note, opts)).is_err() {
                        break;
                    }
                }
            });
        }
        drop(note_rx);
        drop(done_tx);

        let written = write_results(out, done_rx, opts.sorted);
        let read = reader.join().map_err(|_| CliError::Worker)?;
        let (notes, facts, engine_time) = written?;
        let mut stats = read?;
        stats.notes_processed = notes;
        stats.facts_emitted = facts;
        stats.engine_ms = ms(engine_time);
        Ok(stats)
    })
}

fn write_results<W: Write>(
    out: W,
    done: channel::Receiver<Processed>,
    sorted: bool,
) -> Result<(u64, u64, Duration), CliError> {
    let mut out = io::BufWriter::with_capacity(1 << 16, out);
    let mut notes = 0;
    let mut facts = 0;
    let mut engine_time = Duration::ZERO;
    let mut pending = std::collections::BTreeMap::new();
    let mut next = 0;
    for p in done {
        notes += 1;
        facts += p.facts;
        engine_time += p.engine;
        if !sorted {
            out.write_all(p.chunk.as_bytes()).map_err(CliError::Output)?;
            continue;
        }
        pending.insert(p.seq, p.chunk);
        while let Some(chunk) = pending.remove(&next) {
            out.write_all(chunk.as_bytes()).map_err(CliError::Output)?;
            next += 1;
        }
    }
    for chunk in pending.into_values() {
        out.write_all(chunk.as_bytes()).map_err(CliError::Output)?;
    }
    out.flush().map_err(CliError::Output)?;
    Ok((notes, facts, engine_time))
}

#[cfg(test)]
mod tests {
    use super::*;
    use narrex_core::corpus::FIXTURE_TERMS;

    fn engine() -> Engine {
        Engine::builder().terms(FIXTURE_TERMS).build().unwrap()
    }

    fn jsonl(dir: &Path, lines: &[&str]) -> InputSource {
        let path = dir.join("notes.jsonl");
        fs::write(&path, lines.join("\n")).unwrap();
        InputSource::from_arg(path.to_str().unwrap()).unwrap()
    }

    #[test]
    fn input_kinds() {
        let dir = tempfile::tempdir().unwrap();
        let text = dir.path().join("a.txt");
        fs::write(&text, "PE.").unwrap();
        assert_eq!(InputSource::from_arg("-").unwrap(), InputSource::Stdin);
        assert!(matches!(
            InputSource::from_arg(dir.path().to_str().unwrap()).unwrap(),
            InputSource::Directory(_)
        ));
        assert!(matches!(
            InputSource::from_arg(text.to_str().unwrap()).unwrap(),
            InputSource::TextFile(_)
        ));
        let missing = InputSource::from_arg("/nonexistent/notes.jsonl").unwrap_err();
        assert_eq!(missing.exit_code(), 2);
    }

    #[test]
    fn malformed_lines_are_counted() {
        let dir = tempfile::tempdir().unwrap();
        let input = jsonl(
            dir.path(),
            &[
                r#"{"id":"1","text":"No PE."}"#,
                "not json",
                "",
                r#"{"id":"2"}"#,
                r#"{"id":"3","text":"Effusion."}"#,
            ],
        );
        let mut out = Vec::new();
        let stats = run_batch(&engine(), &input, &mut out, &BatchOptions::default()).unwrap();
        assert_eq!(stats.notes_processed, 2);
        assert_eq!(stats.malformed_lines, 2);
        assert_eq!(stats.facts_emitted, 2);
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(stats.engine_ms <= stats.wall_ms);
    }

    #[test]
    fn ignored_records_are_filtered_by_default() {
        let dir = tempfile::tempdir().unwrap();
        let input = jsonl(dir.path(), &[r#"{"id":"1","text":"Assess for PE. Effusion."}"#]);
        let mut out = Vec::new();
        run_batch(&engine(), &input, &mut out, &BatchOptions::default()).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().lines().count(), 1);
        let mut out = Vec::new();
        let opts = BatchOptions {
            include_ignored: true,
            ..BatchOptions::default()
        };
        run_batch(&engine(), &input, &mut out, &opts).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().lines().count(), 2);
    }

    #[test]
    fn sorted_parallel_output_matches_sequential() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        narrex_core::corpus::write_jsonl(
            File::create(&path).unwrap(),
            narrex_core::corpus::generate_synthetic_corpus(60, 2),
        )
        .unwrap();
        let input = InputSource::Jsonl(path);
        let mut one = Vec::new();
        run_batch(&engine(), &input, &mut one, &BatchOptions::default()).unwrap();
        let opts = BatchOptions {
            threads: 4,
            sorted: true,
            ..BatchOptions::default()
        };
        let mut four = Vec::new();
        let stats = run_batch(&engine(), &input, &mut four, &opts).unwrap();
        assert_eq!(stats.notes_processed, 60);
        assert_eq!(one, four);
    }

    #[test]
    fn render_groups_by_note() {
        let (text, n) = format_records(
            "n1",
            &engine().process_note("n1", "Severe PE."),
            &BatchOptions {
                render: true,
                ..BatchOptions::default()
            },
        );
        assert_eq!(n, 1);
        assert_eq!(text, "# n1\npe: YES (severe)\n");
    }
}
