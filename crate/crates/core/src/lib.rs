//! Selectional preferences learned from sense-tagged verb–subject and
//! verb–object triples over a concept taxonomy.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, model dumps,
//! reports and the command-line tool live in the `selpref` crate.
//!
//! * [`taxonomy`]: concept DAG with reflexive subsumption and cached closures.
//! * [`corpus`]: sense inventory, triples and direct frequency counts.
//! * [`prefmodel`]: class-frequency estimates and the word-to-word,
//!   word-to-class and class-to-class models.
//! * [`wsd`]: noun sense decisions, explanations and baselines.
//! * [`eval`]: cross-validation and document holdout with
//!   precision/coverage/recall.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod corpus;
pub mod eval;
#[cfg(any(test, feature = "oracle"))]
pub mod oracle;
pub mod prefmodel;
pub mod taxonomy;
pub mod wsd;

pub use corpus::{CorpusError, FrequencyTables, Relation, SenseInventory, Triple};
pub use eval::{EvalError, EvalReport, Evaluation, Metrics, Protocol, RandomBaseline, Scope};
pub use prefmodel::{ClassEstimates, ModelError, ModelKind, PreferenceModel, PreferenceScore, Term, VerbSide};
pub use taxonomy::{ConceptEntry, ConceptId, ConceptIx, Pos, Taxonomy, TaxonomyError};
pub use wsd::{Answer, Disambiguator, Explanation, System, WsdDecision, WsdError, WsdInstance};
