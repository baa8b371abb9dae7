//! Incremental detection and correction of speech repairs.
//!
//! Words are fed one at a time to a pattern builder that runs in lockstep
//! with a part-of-speech tagger. Candidate repairs are checked against ten
//! well-formedness rules, judged by a repair-aware Markov model and removed
//! from the stream as soon as they are accepted.

pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod evidence;
pub mod filter;
pub mod pattern;
pub mod pipeline;
pub mod tagger;

pub use config::{Config, EditingClass};
pub use corpus::{AnnotatedTurn, GoldRepair, RepairClass, Token};
pub use error::{Error, Result};
pub use eval::{EvalReport, Prediction, Ratio};
pub use evidence::{MatchType, RepairEvidence};
pub use filter::{classify_candidate, score_gap, GapContext, GapDecision, Verdict};
pub use pattern::{JudgedRepair, PatternBuilder, RepairPattern};
pub use pipeline::{process_corpus, process_turn, TurnResult};
pub use tagger::{RepairState, TaggerModel};
