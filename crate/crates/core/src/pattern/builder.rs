//! The word-at-a-time pattern builder.
//!
//! One pattern is built at a time. Each new word is tagged, checked for
//! clues, and offered to the pattern under construction; a pattern that can
//! no longer grow, or whose clue is contradicted, is judged and, if
//! accepted, its removed text and editing terms leave the stream before the
//! next word arrives.

use std::collections::HashSet;
use std::fmt;

use super::clues::{detect_clues, Clue, ClueKind};
use super::rules::{intervening, try_add, RuleId};
use super::{
    CorrKind, Correction, Correspondence, Lexicon, LiveToken, LocalJudgement, Origin, RepairPattern,
};
use crate::config::Config;
use crate::corpus::{RepairClass, Token};

/// Why a pattern was sent to be judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlushReason {
    /// Every word of the pattern is accounted for.
    Complete,
    /// A new clue contradicts the pattern.
    Inconsistent,
    /// No later word can join the pattern.
    Closed,
    /// End of input.
    End,
}

impl fmt::Display for FlushReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlushReason::Complete => "complete",
            FlushReason::Inconsistent => "inconsistent",
            FlushReason::Closed => "closed",
            FlushReason::End => "end",
        })
    }
}

/// An accepted repair as the judge wants it applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Accepted {
    pub klass: RepairClass,
    pub correction: Correction,
}

/// The judge's answer for one pattern, with a note for the trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub accepted: Option<Accepted>,
    pub note: String,
}

impl Decision {
    pub fn reject(note: impl Into<String>) -> Self {
        Decision {
            accepted: None,
            note: note.into(),
        }
    }
}

/// A word as shown in the trace: turn position and surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordRef {
    pub position: usize,
    pub surface: String,
}

impl fmt::Display for WordRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.position, self.surface)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceEvent {
    Word {
        word: WordRef,
        tag: String,
        clues: Vec<ClueKind>,
    },
    Start {
        seed: ClueKind,
    },
    EditingTerm {
        words: Vec<WordRef>,
    },
    Accept {
        kind: CorrKind,
        left: WordRef,
        right: WordRef,
        origin: Origin,
    },
    Reject {
        kind: CorrKind,
        left: WordRef,
        right: WordRef,
        rule: RuleId,
    },
    Judge {
        reason: FlushReason,
        judgement: LocalJudgement,
        pattern: String,
    },
    Decision {
        note: String,
    },
    Deleted {
        positions: Vec<usize>,
        /// Stream after the deletion, up to the current word.
        text: String,
        consumed: usize,
    },
    Retag {
        from: usize,
    },
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Word { word, tag, clues } => {
                write!(f, "word {word} {tag}")?;
                if !clues.is_empty() {
                    let c: Vec<&str> = clues.iter().map(|c| c.as_str()).collect();
                    write!(f, " clues={}", c.join(","))?;
                }
                Ok(())
            }
            TraceEvent::Start { seed } => write!(f, "  start {seed}"),
            TraceEvent::EditingTerm { words } => {
                let w: Vec<String> = words.iter().map(|w| w.to_string()).collect();
                write!(f, "  editing {}", w.join(" "))
            }
            TraceEvent::Accept {
                kind,
                left,
                right,
                origin,
            } => {
                let o = match origin {
                    Origin::Clue => "clue",
                    Origin::Search => "search",
                };
                write!(f, "  accept {} {left} {right} {o}", kind.letter())
            }
            TraceEvent::Reject {
                kind,
                left,
                right,
                rule,
            } => write!(f, "  reject {} {left} {right} rule {rule}", kind.letter()),
            TraceEvent::Judge {
                reason,
                judgement,
                pattern,
            } => write!(f, "  judge {reason} {judgement} {pattern}"),
            TraceEvent::Decision { note } => write!(f, "  decision {note}"),
            TraceEvent::Deleted {
                positions,
                text,
                consumed,
            } => {
                let p: Vec<String> = positions.iter().map(|p| p.to_string()).collect();
                write!(f, "  delete {} -> {text:?} after {consumed} words", p.join(","))
            }
            TraceEvent::Retag { from } => write!(f, "  retag from {from}"),
        }
    }
}

/// Snapshot of a pattern at the moment it was judged.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternRecord {
    pub pattern: RepairPattern,
    pub judgement: LocalJudgement,
    pub reason: FlushReason,
    /// Stream index of the word that started the pattern.
    pub created_at: usize,
    /// Last stream index offered to the pattern.
    pub through: usize,
    pub tokens: Vec<LiveToken>,
}

/// An accepted repair in turn positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JudgedRepair {
    pub klass: RepairClass,
    /// Turn position of the first word after the interruption point.
    pub gap: usize,
    pub removed: Vec<usize>,
    pub editing: Vec<usize>,
    pub pattern: String,
    /// Words consumed when the decision was made; end-of-input decisions
    /// count one past the input length.
    pub decided_at: usize,
}

impl JudgedRepair {
    pub fn deleted(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.removed.iter().chain(&self.editing).copied().collect();
        v.sort_unstable();
        v
    }
}

struct Active {
    pattern: RepairPattern,
    created_at: usize,
}

pub struct PatternBuilder<'a, L: Lexicon> {
    lex: &'a L,
    config: &'a Config,
    live: Vec<LiveToken>,
    active: Option<Active>,
    rejected: HashSet<(usize, usize, RuleId)>,
    consumed: usize,
    at_end: bool,
    trace: Vec<TraceEvent>,
    records: Vec<PatternRecord>,
    repairs: Vec<JudgedRepair>,
    /// Candidate search looks back at most this many words.
    search_reach: usize,
}

impl<'a, L: Lexicon> PatternBuilder<'a, L> {
    pub fn new(lex: &'a L, config: &'a Config) -> Self {
        PatternBuilder {
            lex,
            config,
            live: Vec::new(),
            active: None,
            rejected: HashSet::new(),
            consumed: 0,
            at_end: false,
            trace: Vec::new(),
            records: Vec::new(),
            repairs: Vec::new(),
            search_reach: 3 * config.window,
        }
    }

    pub fn live(&self) -> &[LiveToken] {
        &self.live
    }

    pub fn trace(&self) -> &[TraceEvent] {
        &self.trace
    }

    pub fn records(&self) -> &[PatternRecord] {
        &self.records
    }

    pub fn repairs(&self) -> &[JudgedRepair] {
        &self.repairs
    }

    pub fn into_parts(self) -> (Vec<LiveToken>, Vec<JudgedRepair>, Vec<TraceEvent>, Vec<PatternRecord>) {
        (self.live, self.repairs, self.trace, self.records)
    }

    pub fn pattern(&self) -> Option<&RepairPattern> {
        self.active.as_ref().map(|a| &a.pattern)
    }

    fn word(&self, i: usize) -> WordRef {
        WordRef {
            position: self.live[i].position,
            surface: self.live[i].surface.clone(),
        }
    }

    /// Feeds one word.
    pub fn push<J>(&mut self, token: &Token, judge: &mut J)
    where
        J: FnMut(&RepairPattern, &[LiveToken]) -> Decision,
    {
        self.consumed += 1;
        let prev = self.live.last().map(|t| t.tag);
        self.live.push(LiveToken {
            position: token.position,
            surface: token.surface.clone(),
            is_fragment: token.is_fragment,
            filled_pause: self.config.is_filled_pause(&token.surface),
            category: self.lex.likely(&token.surface),
            tag: self.lex.next_tag(prev, &token.surface, token.is_fragment),
        });

        if self.is_closed() {
            self.flush(FlushReason::Closed, judge);
        }
        let mut clues = self.clues();
        let n = self.live.len() - 1;
        self.trace.push(TraceEvent::Word {
            word: self.word(n),
            tag: self.lex.category_name(self.live[n].tag).to_string(),
            clues: clues.iter().map(Clue::kind).collect(),
        });

        if self.active.is_some() {
            if let Some(c) = clues.iter().find(|c| self.consistent(c)).cloned() {
                self.apply(&c);
            } else if !clues.is_empty() {
                self.flush(FlushReason::Inconsistent, judge);
                clues = self.clues();
                if let Some(c) = clues.first() {
                    self.start(c);
                }
            }
        } else if let Some(c) = clues.first() {
            self.start(c);
        }

        if self.active.is_some() {
            self.search();
            let p = &self.active.as_ref().expect("active").pattern;
            if p.is_complete() && p.judge_locally(&self.live) == LocalJudgement::Judgeable {
                self.flush(FlushReason::Complete, judge);
            }
        }
    }

    /// Judges whatever pattern is still open at the end of input.
    pub fn finish<J>(&mut self, judge: &mut J)
    where
        J: FnMut(&RepairPattern, &[LiveToken]) -> Decision,
    {
        self.at_end = true;
        self.flush(FlushReason::End, judge);
    }

    fn clues(&self) -> Vec<Clue> {
        detect_clues(&self.live, self.pattern(), self.lex, self.config)
    }

    /// The newest word cannot extend the pattern: more than the allowed
    /// resumed-side distance has passed since its last word, or, with no
    /// correspondences yet, a first correspondence would span too many words.
    fn is_closed(&self) -> bool {
        let Some(a) = &self.active else {
            return false;
        };
        let p = &a.pattern;
        let n = self.live.len() - 1;
        if !p.corrs.is_empty() {
            let last = p.last_index().expect("pattern has words");
            return n - last - 1 > self.config.rules.resumed_gap;
        }
        let after = p.last_index().map_or(n, |i| i + 1);
        intervening(p, &self.live, after.saturating_sub(1), n) > self.config.rules.first_correspondence_gap
    }

    fn clue_moves(&self, clue: &Clue) -> Vec<Correspondence> {
        match *clue {
            Clue::SingleMatch { left, right } => vec![Correspondence::new(CorrKind::Match, left, right, Origin::Clue)],
            Clue::AdjacentReplacement { left, right } => {
                vec![Correspondence::new(CorrKind::Replacement, left, right, Origin::Clue)]
            }
            Clue::DoubleMatch { left, right } => vec![
                Correspondence::new(CorrKind::Match, left, right, Origin::Clue),
                Correspondence::new(CorrKind::Match, left + 1, right + 1, Origin::Clue),
            ],
            _ => Vec::new(),
        }
    }

    fn consistent(&self, clue: &Clue) -> bool {
        let p = &self.active.as_ref().expect("active").pattern;
        match clue {
            Clue::Fragment { .. } => false,
            Clue::EditingTerm { span, .. } => match (&p.editing, p.fixed_gap) {
                (Some(r), _) => span.start == r.end && !span.clone().any(|i| p.uses(i)),
                (None, Some(g)) => span.start == g && !span.clone().any(|i| p.uses(i)),
                (None, None) => false,
            },
            _ => {
                let mut q = p.clone();
                for c in self.clue_moves(clue) {
                    if q.corrs.iter().any(|o| o.left == c.left && o.right == c.right) {
                        continue;
                    }
                    if try_add(&q, &c, &self.live, &self.config.rules).is_err() {
                        return false;
                    }
                    q.corrs.push(c);
                }
                true
            }
        }
    }

    fn add(&mut self, c: Correspondence) {
        let (left, right) = (self.word(c.left), self.word(c.right));
        self.trace.push(TraceEvent::Accept {
            kind: c.kind,
            left,
            right,
            origin: c.origin,
        });
        self.active.as_mut().expect("active").pattern.corrs.push(c);
    }

    fn apply(&mut self, clue: &Clue) {
        if let Clue::EditingTerm { span, class } = clue {
            let words = span.clone().map(|i| self.word(i)).collect();
            self.trace.push(TraceEvent::EditingTerm { words });
            let p = &mut self.active.as_mut().expect("active").pattern;
            let start = p.editing.as_ref().map_or(span.start, |r| r.start);
            p.editing = Some(start..span.end);
            p.editing_classes.push(*class);
            p.fixed_gap.get_or_insert(start);
            return;
        }
        for c in self.clue_moves(clue) {
            let p = &self.active.as_ref().expect("active").pattern;
            if !p.corrs.iter().any(|o| o.left == c.left && o.right == c.right) {
                self.add(c);
            }
        }
    }

    fn start(&mut self, clue: &Clue) {
        let n = self.live.len() - 1;
        self.trace.push(TraceEvent::Start { seed: clue.kind() });
        self.rejected.clear();
        let mut p = RepairPattern::empty(clue.kind());
        match clue {
            Clue::Fragment { at } => {
                p.fragment = Some(*at);
                p.fixed_gap = Some(at + 1);
            }
            Clue::EditingTerm { span, class } => {
                p.editing = Some(span.clone());
                p.editing_classes.push(*class);
                p.fixed_gap = Some(span.start);
            }
            _ => {}
        }
        self.active = Some(Active {
            pattern: p,
            created_at: n,
        });
        if let Clue::EditingTerm { span, .. } = clue {
            let words = span.clone().map(|i| self.word(i)).collect();
            self.trace.push(TraceEvent::EditingTerm { words });
        }
        for c in self.clue_moves(clue) {
            self.add(c);
        }
    }

    fn candidate(&self, p: &RepairPattern, l: usize, r: usize) -> Option<CorrKind> {
        let (a, b) = (&self.live[l], &self.live[r]);
        let filler = |i: usize| self.live[i].is_fragment || self.live[i].filled_pause || p.is_editing(i);
        if p.uses(l) || p.uses(r) || filler(l) || filler(r) {
            return None;
        }
        let straddles = match p.fixed_gap {
            Some(g) => l < g && g <= r,
            None => {
                p.max_left().map_or(l, |x| x.max(l)) < p.min_right().map_or(r, |x| x.min(r))
            }
        };
        if !straddles {
            return None;
        }
        if a.surface == b.surface {
            Some(CorrKind::Match)
        } else if a.category == b.category && self.lex.replaceable(a.category) {
            Some(CorrKind::Replacement)
        } else {
            None
        }
    }

    /// Adds correspondences until none is addable, preferring the one on
    /// the most recent pair of words.
    fn search(&mut self) {
        let n = self.live.len() - 1;
        let floor = n.saturating_sub(self.search_reach);
        loop {
            let p = &self.active.as_ref().expect("active").pattern;
            let mut best = None;
            let mut rejections = Vec::new();
            for r in (floor..=n).rev() {
                for l in (floor..r).rev() {
                    let Some(kind) = self.candidate(p, l, r) else {
                        continue;
                    };
                    let c = Correspondence::new(kind, l, r, Origin::Search);
                    match try_add(p, &c, &self.live, &self.config.rules) {
                        Ok(()) => {
                            if best.is_none() {
                                best = Some(c);
                            }
                        }
                        Err(rule) => rejections.push((c, rule)),
                    }
                }
            }
            for (c, rule) in rejections {
                if self.rejected.insert((c.left, c.right, rule)) {
                    self.trace.push(TraceEvent::Reject {
                        kind: c.kind,
                        left: self.word(c.left),
                        right: self.word(c.right),
                        rule,
                    });
                }
            }
            match best {
                Some(c) => self.add(c),
                None => break,
            }
        }
    }

    fn flush<J>(&mut self, reason: FlushReason, judge: &mut J)
    where
        J: FnMut(&RepairPattern, &[LiveToken]) -> Decision,
    {
        let Some(active) = self.active.take() else {
            return;
        };
        self.rejected.clear();
        let p = active.pattern;
        let judgement = p.judge_locally(&self.live);
        let pattern = p.pattern_string(&self.live);
        let through = match reason {
            FlushReason::Complete | FlushReason::End => self.live.len() - 1,
            _ => self.live.len() - 2,
        };
        self.trace.push(TraceEvent::Judge {
            reason,
            judgement,
            pattern: pattern.clone(),
        });
        self.records.push(PatternRecord {
            pattern: p.clone(),
            judgement,
            reason,
            created_at: active.created_at,
            through,
            tokens: self.live.clone(),
        });
        if judgement != LocalJudgement::Judgeable {
            return;
        }
        let decision = judge(&p, &self.live);
        self.trace.push(TraceEvent::Decision { note: decision.note });
        let Some(acc) = decision.accepted else {
            return;
        };
        let gap = p.interruption_gap(&self.live).expect("judgeable pattern has a gap");
        let gap_position = match self.live.get(gap) {
            Some(t) => t.position,
            None => self.live.last().map_or(0, |t| t.position + 1),
        };
        let pos = |set: &std::collections::BTreeSet<usize>| -> Vec<usize> {
            set.iter().map(|&i| self.live[i].position).collect()
        };
        self.repairs.push(JudgedRepair {
            klass: acc.klass,
            gap: gap_position,
            removed: pos(&acc.correction.removed),
            editing: pos(&acc.correction.editing),
            pattern,
            decided_at: self.consumed + usize::from(self.at_end),
        });
        let doomed = acc.correction.all();
        let Some(&first) = doomed.iter().next() else {
            return;
        };
        let positions = doomed.iter().map(|&i| self.live[i].position).collect();
        let mut i = 0;
        self.live.retain(|_| {
            let keep = !doomed.contains(&i);
            i += 1;
            keep
        });
        for k in first..self.live.len() {
            let prev = k.checked_sub(1).map(|j| self.live[j].tag);
            let t = &self.live[k];
            self.live[k].tag = self.lex.next_tag(prev, &t.surface, t.is_fragment);
        }
        let text = self.live.iter().map(|t| t.surface.as_str()).collect::<Vec<_>>().join(" ");
        self.trace.push(TraceEvent::Deleted {
            positions,
            text,
            consumed: self.consumed,
        });
        if first < self.live.len() {
            self.trace.push(TraceEvent::Retag {
                from: self.live[first].position,
            });
        }
    }
}
