//! Clinical narrative information extraction.
//!
//! Notes are split into sentences and tokens, phrases are recognized with a token-level
//! prefix tree (longest leftmost match, with conjunction expansion), and a pipeline of
//! finite-state analyzers then decides presence, nested anatomical location, generic
//! modifiers, ignore status and experiencer for every recognized fact.

pub mod analysis;
pub mod corpus;
pub mod engine;
pub mod error;
pub mod lexicon;
pub mod ner;
pub mod output;
pub mod preprocess;
pub mod types;

pub use analysis::{Analyzer, LocationHierarchy, Pipeline, PipelineConfig};
pub use engine::{Engine, EngineBuilder, EngineConfig, Note};
pub use error::{Error, Result};
pub use lexicon::{Lexicon, PhrasePayload};
pub use output::{render_text, CharRange, FactRecord, ModifierNode};
pub use preprocess::{Abbreviations, SentenceBuffer};
pub use types::{
    AnnotatedSentence, Experiencer, FactKind, Presence, RoleFamily, SemanticObject, SemanticRole,
    Span, Token, TokenRange,
};
