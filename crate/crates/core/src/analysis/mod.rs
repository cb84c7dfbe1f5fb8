//! The analyzer pipeline. Each analyzer reads a sentence's semantic objects once, left to
//! right, and updates their attributes; each returns how many objects it read.

mod cues;
mod family;
mod ignore;
mod location;
mod modifiers;
mod presence;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::AnnotatedSentence;

pub use cues::merge_cues;
pub use family::analyze_family;
pub use ignore::analyze_ignore;
pub use location::{analyze_locations, LocationHierarchy};
pub use modifiers::analyze_modifiers;
pub use presence::{analyze_presence, AnalyzerState, AttributeScope, Mode};

pub const DEFAULT_FORWARD_SCOPE_MAX_GAP: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Analyzer {
    MergeCues,
    Presence,
    Locations,
    Modifiers,
    Ignore,
    Family,
}

impl Analyzer {
    pub const DEFAULT_ORDER: [Analyzer; 6] = [
        Analyzer::MergeCues,
        Analyzer::Presence,
        Analyzer::Locations,
        Analyzer::Modifiers,
        Analyzer::Ignore,
        Analyzer::Family,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Analyzer::MergeCues => "merge_cues",
            Analyzer::Presence => "presence",
            Analyzer::Locations => "locations",
            Analyzer::Modifiers => "modifiers",
            Analyzer::Ignore => "ignore",
            Analyzer::Family => "family",
        }
    }
}

impl fmt::Display for Analyzer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Analyzer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Analyzer::DEFAULT_ORDER
            .into_iter()
            .find(|a| a.name() == s.trim())
            .ok_or_else(|| Error::UnknownAnalyzer(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Analyzer names in run order; leaving one out disables it.
    pub analyzers: Vec<String>,
    /// How many unmatched tokens a forward cue's scope may skip.
    pub forward_scope_max_gap: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            analyzers: Analyzer::DEFAULT_ORDER
                .iter()
                .map(|a| a.name().to_string())
                .collect(),
            forward_scope_max_gap: DEFAULT_FORWARD_SCOPE_MAX_GAP,
        }
    }
}

impl PipelineConfig {
    pub fn without(mut self, analyzer: Analyzer) -> Self {
        self.analyzers.retain(|a| a != analyzer.name());
        self
    }
}

/// Pairs (earlier, later) that must keep their relative order when both are enabled.
const ORDER_CONSTRAINTS: &[(Analyzer, Analyzer)] = &[
    (Analyzer::MergeCues, Analyzer::Presence),
    (Analyzer::Presence, Analyzer::Locations),
    (Analyzer::Locations, Analyzer::Modifiers),
    (Analyzer::MergeCues, Analyzer::Ignore),
    (Analyzer::Presence, Analyzer::Ignore),
    (Analyzer::Locations, Analyzer::Ignore),
    (Analyzer::Modifiers, Analyzer::Ignore),
    (Analyzer::MergeCues, Analyzer::Family),
    (Analyzer::Presence, Analyzer::Family),
    (Analyzer::Locations, Analyzer::Family),
    (Analyzer::Modifiers, Analyzer::Family),
];

/// Validated, immutable analyzer pipeline.
#[derive(Debug, Clone)]
pub struct Pipeline {
    analyzers: Vec<Analyzer>,
    config: PipelineConfig,
    hierarchy: Option<LocationHierarchy>,
}

impl Default for Pipeline {
    fn default() -> Self {
        Pipeline::new(PipelineConfig::default()).expect("default pipeline is valid")
    }
}

impl Pipeline {
    pub fn new(config: PipelineConfig) -> Result<Self> {
        let mut analyzers = Vec::with_capacity(config.analyzers.len());
        for name in &config.analyzers {
            let a: Analyzer = name.parse()?;
            if analyzers.contains(&a) {
                return Err(Error::InvalidPipeline(format!("{a} listed twice")));
            }
            analyzers.push(a);
        }
        let pos = |a: Analyzer| analyzers.iter().position(|x| *x == a);
        for &(before, after) in ORDER_CONSTRAINTS {
            if let (Some(b), Some(a)) = (pos(before), pos(after)) {
                if b > a {
                    return Err(Error::InvalidPipeline(format!(
                        "{before} must run before {after}"
                    )));
                }
            }
        }
        Ok(Pipeline {
            analyzers,
            config,
            hierarchy: None,
        })
    }

    pub fn with_hierarchy(mut self, hierarchy: LocationHierarchy) -> Self {
        self.hierarchy = Some(hierarchy);
        self
    }

    pub fn analyzers(&self) -> &[Analyzer] {
        &self.analyzers
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn hierarchy(&self) -> Option<&LocationHierarchy> {
        self.hierarchy.as_ref()
    }

    pub fn run_one(&self, analyzer: Analyzer, s: &mut AnnotatedSentence) -> usize {
        match analyzer {
            Analyzer::MergeCues => merge_cues(s),
            Analyzer::Presence => analyze_presence(s, &self.config),
            Analyzer::Locations => analyze_locations(s, self.hierarchy.as_ref()),
            Analyzer::Modifiers => analyze_modifiers(s),
            Analyzer::Ignore => analyze_ignore(s),
            Analyzer::Family => analyze_family(s),
        }
    }

    /// Clear previous analysis results, then run every enabled analyzer in order.
    /// Returns the number of objects each analyzer read.
    pub fn run(&self, s: &mut AnnotatedSentence) -> Vec<(Analyzer, usize)> {
        s.reset_analysis();
        self.analyzers
            .iter()
            .map(|&a| (a, self.run_one(a, s)))
            .collect()
    }
}

pub fn run_pipeline(s: &mut AnnotatedSentence, pipeline: &Pipeline) {
    pipeline.run(s);
}
