use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use narrex_cli::{run_batch, BatchOptions, CliError, InputSource};
use narrex_core::corpus::{synthetic_notes, write_jsonl, DEFAULT_MEAN_NOTE_BYTES};
use narrex_core::preprocess::Abbreviations;
use narrex_core::{Engine, EngineConfig, LocationHierarchy};

/// Extract facts (findings, disorders, procedures, tests, substances) from clinical notes,
/// with presence, nested locations, modifiers, ignore status and experiencer.
#[derive(Debug, Parser)]
#[command(name = "narrex", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a seeded synthetic corpus as JSONL ({"id", "text"} per line).
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Term file (phrase<TAB>code<TAB>role); repeatable, loaded on top of the base dictionary.
    #[arg(long = "dict", value_name = "TSV")]
    dicts: Vec<PathBuf>,
    /// JSONL file (*.jsonl), plain-text file, directory of notes, or - for JSONL on stdin.
    #[arg(long, value_name = "PATH", default_value = "-")]
    input: String,
    /// Output file, or - for stdout.
    #[arg(long, value_name = "PATH", default_value = "-")]
    output: String,
    /// Print `fact: PRESENCE (modifiers)` lines instead of JSONL.
    #[arg(long)]
    render: bool,
    /// Also emit facts put out of play by ignore cues.
    #[arg(long)]
    include_ignored: bool,
    /// Abbreviation list replacing the built-in one (one per line, with its period).
    #[arg(long, value_name = "FILE")]
    abbrev: Option<PathBuf>,
    /// Location hierarchy (child<TAB>parent).
    #[arg(long, value_name = "TSV")]
    hierarchy: Option<PathBuf>,
    /// Engine configuration (TOML, [pipeline] table).
    #[arg(long, value_name = "TOML")]
    config: Option<PathBuf>,
    /// Print run statistics to stderr.
    #[arg(long)]
    bench: bool,
    /// Worker threads.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    threads: u16,
    /// Keep input note order when --threads > 1.
    #[arg(long)]
    sorted: bool,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 10_330)]
    notes: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Average JSONL line length in bytes.
    #[arg(long, default_value_t = DEFAULT_MEAN_NOTE_BYTES)]
    mean_bytes: usize,
    #[arg(long, value_name = "PATH", default_value = "-")]
    output: String,
}

fn open_output(path: &str) -> io::Result<Box<dyn Write>> {
    Ok(if path == "-" {
        Box::new(io::stdout().lock())
    } else {
        Box::new(File::create(path)?)
    })
}

fn build_engine(args: &RunArgs) -> Result<Engine, CliError> {
    let mut builder = Engine::builder();
    for dict in &args.dicts {
        builder = builder.term_file(dict);
    }
    if let Some(path) = &args.config {
        builder = builder.config(EngineConfig::load(path)?);
    }
    if let Some(path) = &args.abbrev {
        builder = builder.abbreviations(Abbreviations::load(path)?);
    }
    if let Some(path) = &args.hierarchy {
        builder = builder.hierarchy(LocationHierarchy::load(path)?);
    }
    Ok(builder.build()?)
}

fn run(args: RunArgs) -> Result<(), CliError> {
    let engine = build_engine(&args)?;
    let input = InputSource::from_arg(&args.input)?;
    let out = open_output(&args.output).map_err(CliError::Output)?;
    let opts = BatchOptions {
        threads: args.threads.into(),
        sorted: args.sorted,
        render: args.render,
        include_ignored: args.include_ignored,
    };
    let stats = run_batch(&engine, &input, out, &opts)?;
    if args.bench {
        eprintln!("{stats}");
    }
    Ok(())
}

fn generate(args: GenerateArgs) -> io::Result<()> {
    if args.notes == 0 || args.mean_bytes < 200 {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            "--notes must be positive and --mean-bytes at least 200",
        ));
    }
    let out = io::BufWriter::new(open_output(&args.output)?);
    write_jsonl(out, synthetic_notes(args.notes, args.seed, args.mean_bytes))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Some(Command::Generate(args)) => generate(args).map_err(|e| (2, e.to_string())),
        None => run(cli.run).map_err(|e| (e.exit_code(), e.to_string())),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("narrex: {message}");
            ExitCode::from(code as u8)
        }
    }
}
