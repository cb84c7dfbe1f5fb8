//! One-call note processing: sentences -> tokens -> phrases -> analyzers -> fact records.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{LocationHierarchy, Pipeline, PipelineConfig};
use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::ner;
use crate::output::{to_records, FactRecord};
use crate::preprocess::{preprocess, Abbreviations};
use crate::types::AnnotatedSentence;

/// Input record: `{"id": ..., "text": ...}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Note {
    pub id: String,
    pub text: String,
}

/// Engine configuration file (TOML).
///
/// ```toml
/// [pipeline]
/// analyzers = ["merge_cues", "presence", "locations", "modifiers", "ignore", "family"]
/// forward_scope_max_gap = 8
/// ```
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub pipeline: PipelineConfig,
}

impl EngineConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Default)]
pub struct EngineBuilder {
    term_files: Vec<PathBuf>,
    term_texts: Vec<String>,
    config: EngineConfig,
    abbreviations: Option<Abbreviations>,
    hierarchy: Option<LocationHierarchy>,
}

impl EngineBuilder {
    pub fn term_file(mut self, path: impl Into<PathBuf>) -> Self {
        self.term_files.push(path.into());
        self
    }

    /// Terms given inline in the term-file format.
    pub fn terms(mut self, tsv: impl Into<String>) -> Self {
        self.term_texts.push(tsv.into());
        self
    }

    pub fn config(mut self, config: EngineConfig) -> Self {
        self.config = config;
        self
    }

    pub fn pipeline(mut self, pipeline: PipelineConfig) -> Self {
        self.config.pipeline = pipeline;
        self
    }

    pub fn abbreviations(mut self, abbreviations: Abbreviations) -> Self {
        self.abbreviations = Some(abbreviations);
        self
    }

    pub fn hierarchy(mut self, hierarchy: LocationHierarchy) -> Self {
        self.hierarchy = Some(hierarchy);
        self
    }

    pub fn build(self) -> Result<Engine> {
        let mut lexicon = Lexicon::base();
        for path in &self.term_files {
            lexicon.load_term_file(path)?;
        }
        for (i, text) in self.term_texts.iter().enumerate() {
            lexicon.load_terms_str(text, Path::new(&format!("<inline terms #{}>", i + 1)))?;
        }
        let mut pipeline = Pipeline::new(self.config.pipeline)?;
        if let Some(h) = self.hierarchy {
            pipeline = pipeline.with_hierarchy(h);
        }
        Ok(Engine {
            lexicon,
            pipeline,
            abbreviations: self.abbreviations.unwrap_or_default(),
        })
    }
}

/// Frozen dictionary plus pipeline. Immutable once built, so one engine can serve any number
/// of threads.
#[derive(Debug, Clone)]
pub struct Engine {
    lexicon: Lexicon,
    pipeline: Pipeline,
    abbreviations: Abbreviations,
}

impl Engine {
    pub fn builder() -> EngineBuilder {
        EngineBuilder::default()
    }

    /// Base dictionary plus `term_files`, with the given pipeline.
    pub fn build<P: AsRef<Path>>(term_files: &[P], config: PipelineConfig) -> Result<Self> {
        term_files
            .iter()
            .fold(Engine::builder(), |b, p| b.term_file(p.as_ref()))
            .pipeline(config)
            .build()
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn pipeline(&self) -> &Pipeline {
        &self.pipeline
    }

    pub fn abbreviations(&self) -> &Abbreviations {
        &self.abbreviations
    }

    /// Fully analyzed sentences, before they are reduced to fact records.
    pub fn annotate_note(&self, text: &str) -> Vec<AnnotatedSentence> {
        preprocess(text, &self.abbreviations)
            .iter()
            .map(|sentence| {
                let mut annotated = ner::annotate(&self.lexicon, sentence);
                self.pipeline.run(&mut annotated);
                annotated
            })
            .collect()
    }

    pub fn process_note(&self, note_id: &str, text: &str) -> Vec<FactRecord> {
        to_records(note_id, &self.annotate_note(text))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Presence;

    #[test]
    fn base_only_engine() {
        let engine = Engine::build::<&str>(&[], PipelineConfig::default()).unwrap();
        assert_eq!(engine.lexicon().term_count(), Lexicon::base().term_count());
        assert!(engine.process_note("n", "").is_empty());
    }

    #[test]
    fn conflicting_roles_across_sources_fail() {
        let err = Engine::builder()
            .terms("pe\tC-PE\tFact:Disorder\n")
            .terms("pe\tC-PEX\tFact:Test\n")
            .build()
            .unwrap_err();
        assert!(err.to_string().contains("inline terms #2"), "{err}");
    }

    #[test]
    fn unknown_analyzer_is_a_config_error() {
        let config = EngineConfig::parse("[pipeline]\nanalyzers = [\"presence\", \"sentiment\"]\n");
        let err = Engine::builder().config(config.unwrap()).build().unwrap_err();
        assert!(matches!(err, Error::UnknownAnalyzer(ref n) if n == "sentiment"));
        assert!(EngineConfig::parse("[pipeline]\nbogus = 1\n").is_err());
    }

    #[test]
    fn process_note_is_repeatable() {
        let engine = Engine::builder()
            .terms("pe\tC-PE\tFact:Disorder\nfilling defects\tC-FD\tFact:Finding\n")
            .build()
            .unwrap();
        let text = "No filling defects. PE is present.";
        let a = engine.process_note("n", text);
        assert_eq!(a, engine.process_note("n", text));
        assert_eq!(a.len(), 2);
        assert_eq!(a[0].presence, Presence::No);
        assert_eq!(a[1].presence, Presence::Yes);
        assert_eq!(a[1].sentence_index, 1);
    }
}
