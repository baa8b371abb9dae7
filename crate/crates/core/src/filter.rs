//! Judging candidate modification repairs against fluent speech.
//!
//! At the candidate interruption point the tagger either takes a repair
//! transition or a fluent one. Each path is scored as
//! `log P(R|C_i) + log P(C_{i+1}|C_i, R) + log P(F|R) + log P(E|R) + log P(M|R)`
//! and the repair path must score strictly higher to win.

use std::fmt;

use crate::corpus::RepairClass;
use crate::error::{Error, Result};
use crate::evidence::{MatchType, RepairEvidence};
use crate::pattern::{CorrKind, LiveToken, RepairPattern};
use crate::config::EditingClass;
use crate::tagger::{RepairState, TaggerModel};

/// Tags on either side of the interruption point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapContext {
    /// Tag of the last word before the gap.
    pub before: usize,
    /// Tag of the first resumed word, editing terms skipped. `None` when
    /// the stream ends at the gap.
    pub after: Option<usize>,
}

/// The five log terms of one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathScore {
    pub prior: f64,
    pub transition: f64,
    pub fragment: f64,
    pub editing: f64,
    pub matches: f64,
}

impl PathScore {
    pub fn total(&self) -> f64 {
        self.prior + self.transition + self.fragment + self.editing + self.matches
    }
}

impl fmt::Display for PathScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:.4} = prior {:.4} + trans {:.4} + F {:.4} + E {:.4} + M {:.4}",
            self.total(),
            self.prior,
            self.transition,
            self.fragment,
            self.editing,
            self.matches
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapDecision {
    pub gap: usize,
    pub repair: PathScore,
    pub fluent: PathScore,
    pub verdict: RepairState,
}

impl GapDecision {
    /// Repair score minus fluent score.
    pub fn margin(&self) -> f64 {
        self.repair.total() - self.fluent.total()
    }
}

fn check_model(model: &TaggerModel, context: &GapContext) -> Result<()> {
    let n = model.num_tags();
    let shaped = n > 0
        && model.repair_prior.len() == n
        && model.trans_fluent.len() == n
        && model.trans_repair.len() == n;
    if !shaped {
        return Err(Error::Training("model has no trained tables".into()));
    }
    if context.before >= n || context.after.is_some_and(|t| t >= n) {
        return Err(Error::Training("gap context names a tag outside the model".into()));
    }
    Ok(())
}

fn path(model: &TaggerModel, context: &GapContext, evidence: &RepairEvidence, state: RepairState) -> PathScore {
    let c = &model.clue_output;
    let p_repair = model.repair_prior[context.before];
    let (prior, table) = match state {
        RepairState::Repair => (p_repair, &model.trans_repair),
        RepairState::Fluent => (1.0 - p_repair, &model.trans_fluent),
    };
    PathScore {
        prior: prior.ln(),
        transition: context.after.map_or(0.0, |t| table[context.before][t].ln()),
        fragment: c.fragment_p(state, evidence.fragment).ln(),
        editing: c.editing_p(state, evidence.editing).ln(),
        matches: c.matches_p(state, evidence.matches).ln(),
    }
}

/// Scores both paths at a candidate gap.
pub fn score_gap(gap: usize, context: &GapContext, evidence: &RepairEvidence, model: &TaggerModel) -> Result<GapDecision> {
    check_model(model, context)?;
    let repair = path(model, context, evidence, RepairState::Repair);
    let fluent = path(model, context, evidence, RepairState::Fluent);
    let verdict = if repair.total() > fluent.total() {
        RepairState::Repair
    } else {
        RepairState::Fluent
    };
    Ok(GapDecision {
        gap,
        repair,
        fluent,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    AcceptModification,
    AcceptAbridged,
    Reject,
}

impl Verdict {
    pub fn class(self) -> Option<RepairClass> {
        match self {
            Verdict::AcceptModification => Some(RepairClass::Modification),
            Verdict::AcceptAbridged => Some(RepairClass::Abridged),
            Verdict::Reject => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub verdict: Verdict,
    /// Present when the model was consulted.
    pub scores: Option<GapDecision>,
    pub reason: &'static str,
}

/// Evidence read off a pattern: fragment presence, class of the first
/// editing term, and the kinds of correspondences.
pub fn pattern_evidence(pattern: &RepairPattern) -> RepairEvidence {
    let m = pattern.corrs.iter().filter(|c| c.kind == CorrKind::Match).count();
    let r = pattern.corrs.len() - m;
    RepairEvidence {
        fragment: pattern.fragment.is_some(),
        editing: pattern.editing_classes.first().copied().unwrap_or(EditingClass::None),
        matches: MatchType::from_counts(m, r),
    }
}

/// Tags around the pattern's interruption point in the live stream.
pub fn pattern_context(pattern: &RepairPattern, tokens: &[LiveToken]) -> Option<(usize, GapContext)> {
    let gap = pattern.interruption_gap(tokens)?;
    let before = tokens.get(gap.checked_sub(1)?)?.tag;
    let resume = pattern.editing.as_ref().map_or(gap, |r| r.end);
    let after = tokens.get(resume).map(|t| t.tag);
    Some((gap, GapContext { before, after }))
}

/// Word repetitions: only matches, the same number on each side, nothing
/// unmatched on either side.
pub fn is_repetition(pattern_string: &str) -> bool {
    let core: String = pattern_string.chars().filter(|c| !matches!(c, '-' | 'e')).collect();
    let Some((left, right)) = core.split_once('.') else {
        return false;
    };
    !left.is_empty() && left.len() == right.len() && left.chars().chain(right.chars()).all(|c| c == 'm')
}

/// Decides a judgeable pattern. Abridged shapes and word repetitions are
/// accepted outright; the rest go to the model, and a rejected candidate
/// that holds a fragment or filled pause is kept as an abridged repair.
pub fn classify_candidate(pattern: &RepairPattern, tokens: &[LiveToken], model: &TaggerModel) -> Result<Classification> {
    let accept = |verdict, scores, reason| Ok(Classification { verdict, scores, reason });
    if pattern.corrs.is_empty() {
        return accept(Verdict::AcceptAbridged, None, "abridged shape");
    }
    if is_repetition(&pattern.pattern_string(tokens)) {
        return accept(Verdict::AcceptModification, None, "word repetition");
    }
    let Some((gap, context)) = pattern_context(pattern, tokens) else {
        return accept(Verdict::Reject, None, "no interruption point");
    };
    let decision = score_gap(gap, &context, &pattern_evidence(pattern), model)?;
    let fallback = pattern.fragment.is_some() || pattern.has_filled_pause();
    match decision.verdict {
        RepairState::Repair => accept(Verdict::AcceptModification, Some(decision), "model prefers repair"),
        RepairState::Fluent if fallback => accept(Verdict::AcceptAbridged, Some(decision), "fluent, kept as abridged"),
        RepairState::Fluent => accept(Verdict::Reject, Some(decision), "model prefers fluent"),
    }
}
