//! Streaming detection and correction over turns.

use std::fmt::Write as _;

use crate::config::Config;
use crate::corpus::{apply_freshstart_breaks, AnnotatedTurn, RepairClass, Token};
use crate::filter::{classify_candidate, Verdict};
use crate::pattern::{Accepted, Decision, LiveToken, PatternBuilder, PatternRecord, RepairPattern, TraceEvent};
use crate::tagger::TaggerModel;

pub use crate::pattern::JudgedRepair;

/// The judge used by the pipeline: outright acceptance of abridged shapes
/// and word repetitions, the model for everything else.
pub fn model_judge(model: &TaggerModel) -> impl FnMut(&RepairPattern, &[LiveToken]) -> Decision + '_ {
    move |pattern, tokens| {
        let c = match classify_candidate(pattern, tokens, model) {
            Ok(c) => c,
            Err(e) => return Decision::reject(format!("reject ({e})")),
        };
        let mut note = match c.verdict {
            Verdict::AcceptModification => "modification",
            Verdict::AcceptAbridged => "abridged",
            Verdict::Reject => "reject",
        }
        .to_string();
        let _ = write!(note, " ({})", c.reason);
        if let Some(s) = &c.scores {
            let _ = write!(note, "; repair {}; fluent {}", s.repair, s.fluent);
        }
        let accepted = c.verdict.class().map(|klass| Accepted {
            klass,
            correction: pattern.derive_correction(tokens, klass),
        });
        Decision { accepted, note }
    }
}

/// Output of one stretch of words processed without interruption.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentResult {
    pub corrected: Vec<Token>,
    pub repairs: Vec<JudgedRepair>,
    pub trace: Vec<TraceEvent>,
    pub records: Vec<PatternRecord>,
}

/// Runs the builder over one segment with the given judge.
pub fn process_segment<J>(tokens: &[Token], model: &TaggerModel, config: &Config, judge: &mut J) -> SegmentResult
where
    J: FnMut(&RepairPattern, &[LiveToken]) -> Decision,
{
    let mut builder = PatternBuilder::new(model, config);
    for t in tokens {
        builder.push(t, judge);
    }
    builder.finish(judge);
    let (live, repairs, trace, records) = builder.into_parts();
    let mut corrected = Vec::with_capacity(live.len());
    let mut it = tokens.iter();
    for l in &live {
        if let Some(t) = it.find(|t| t.position == l.position) {
            corrected.push(t.clone());
        }
    }
    SegmentResult {
        corrected,
        repairs,
        trace,
        records,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TurnResult {
    pub id: String,
    pub corrected: Vec<Token>,
    /// Accepted repairs, in the order they were decided.
    pub repairs: Vec<JudgedRepair>,
    pub trace: Vec<TraceEvent>,
}

impl TurnResult {
    pub fn corrected_text(&self) -> String {
        crate::corpus::surface_text(&self.corrected)
    }
}

/// Processes one turn. Fresh-start breaks split the turn into segments
/// that are processed independently.
pub fn process_turn(turn: &AnnotatedTurn, model: &TaggerModel, config: &Config) -> TurnResult {
    let mut judge = model_judge(model);
    let mut out = TurnResult {
        id: turn.id.clone(),
        corrected: Vec::new(),
        repairs: Vec::new(),
        trace: Vec::new(),
    };
    for seg in apply_freshstart_breaks(turn) {
        let r = process_segment(&seg.tokens, model, config, &mut judge);
        out.corrected.extend(r.corrected);
        out.repairs.extend(r.repairs);
        out.trace.extend(r.trace);
    }
    out
}

/// Aggregate counts over a processed corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CorpusStats {
    pub turns: usize,
    pub words: usize,
    pub repairs: usize,
    pub modification: usize,
    pub abridged: usize,
    pub deleted_words: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CorpusResult {
    pub turns: Vec<TurnResult>,
    pub stats: CorpusStats,
}

pub fn process_corpus(turns: &[AnnotatedTurn], model: &TaggerModel, config: &Config) -> CorpusResult {
    let mut result = CorpusResult::default();
    for turn in turns {
        let r = process_turn(turn, model, config);
        let s = &mut result.stats;
        s.turns += 1;
        s.words += turn.len();
        s.repairs += r.repairs.len();
        s.modification += r.repairs.iter().filter(|j| j.klass == RepairClass::Modification).count();
        s.abridged += r.repairs.iter().filter(|j| j.klass == RepairClass::Abridged).count();
        s.deleted_words += turn.len() - r.corrected.len();
        result.turns.push(r);
    }
    result
}

/// Renders a turn's trace, one event per line, headed by the turn id.
pub fn format_trace(result: &TurnResult) -> String {
    let mut out = format!("turn {}\n", result.id);
    for e in &result.trace {
        let _ = writeln!(out, "{e}");
    }
    out
}
