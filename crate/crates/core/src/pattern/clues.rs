//! Detection clues anchored at the newest word of the stream.

use std::fmt;
use std::ops::Range;

use super::{Lexicon, LiveToken, RepairPattern};
use crate::config::{Config, EditingClass};

/// Clue kinds in priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClueKind {
    Fragment,
    EditingTerm,
    DoubleMatch,
    SingleMatch,
    AdjacentReplacement,
}

impl ClueKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClueKind::Fragment => "fragment",
            ClueKind::EditingTerm => "et",
            ClueKind::DoubleMatch => "mm--mm",
            ClueKind::SingleMatch => "m-m",
            ClueKind::AdjacentReplacement => "rr",
        }
    }
}

impl fmt::Display for ClueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Clue {
    Fragment { at: usize },
    EditingTerm { span: Range<usize>, class: EditingClass },
    /// Words `left, left + 1` match `right, right + 1`.
    DoubleMatch { left: usize, right: usize },
    SingleMatch { left: usize, right: usize },
    AdjacentReplacement { left: usize, right: usize },
}

impl Clue {
    pub fn kind(&self) -> ClueKind {
        match self {
            Clue::Fragment { .. } => ClueKind::Fragment,
            Clue::EditingTerm { .. } => ClueKind::EditingTerm,
            Clue::DoubleMatch { .. } => ClueKind::DoubleMatch,
            Clue::SingleMatch { .. } => ClueKind::SingleMatch,
            Clue::AdjacentReplacement { .. } => ClueKind::AdjacentReplacement,
        }
    }
}

/// Clues fired by the last word of `tokens`, strongest first. Words that
/// are fragments, filled pauses or editing terms of `pattern` are skipped
/// when counting intervening words and never anchor a match.
pub fn detect_clues<L: Lexicon>(
    tokens: &[LiveToken],
    pattern: Option<&RepairPattern>,
    lex: &L,
    config: &Config,
) -> Vec<Clue> {
    let Some(n) = tokens.len().checked_sub(1) else {
        return Vec::new();
    };
    let excluded = |i: usize| {
        tokens[i].is_fragment || tokens[i].filled_pause || pattern.is_some_and(|p| p.is_editing(i))
    };
    let between = |a: usize, b: usize| (a + 1..b).filter(|&i| !excluded(i)).count();
    let same = |a: usize, b: usize| tokens[a].surface == tokens[b].surface;
    let history = config.window;
    let mut clues = Vec::new();

    if tokens[n].is_fragment {
        clues.push(Clue::Fragment { at: n });
    }
    if let Some(class) = config.filled_pause(&tokens[n].surface) {
        clues.push(Clue::EditingTerm {
            span: n..n + 1,
            class,
        });
    } else if !tokens[n].is_fragment {
        let words: Vec<&str> = tokens.iter().map(|t| t.surface.as_str()).collect();
        if let Some(k) = config.cue_phrase_ending(&words) {
            clues.push(Clue::EditingTerm {
                span: n + 1 - k..n + 1,
                class: EditingClass::Cue,
            });
        }
    }
    if excluded(n) || !clues.is_empty() {
        return clues;
    }
    let floor = n.saturating_sub(history);

    if n >= 3 && !excluded(n - 1) {
        let mut j = n - 2;
        while j > floor {
            j -= 1;
            if between(j + 1, n - 1) > config.rules.double_match_gap {
                break;
            }
            if !excluded(j) && !excluded(j + 1) && same(j, n - 1) && same(j + 1, n) {
                clues.push(Clue::DoubleMatch { left: j, right: n - 1 });
                break;
            }
        }
    }
    for j in (floor..n).rev() {
        if between(j, n) > config.rules.single_match_gap {
            break;
        }
        if !excluded(j) && same(j, n) {
            clues.push(Clue::SingleMatch { left: j, right: n });
            break;
        }
    }
    if let Some(p) = (0..n).rev().find(|&i| !excluded(i)) {
        let (a, b) = (&tokens[p], &tokens[n]);
        if a.category == b.category && a.surface != b.surface && lex.replaceable(a.category) {
            clues.push(Clue::AdjacentReplacement { left: p, right: n });
        }
    }
    clues
}
