//! Repair patterns: candidate labelings built word by word from detection
//! clues and word correspondences.

mod builder;
mod clues;
mod rules;

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;

pub use builder::{Accepted, Decision, FlushReason, JudgedRepair, PatternBuilder, PatternRecord, TraceEvent, WordRef};
pub use clues::{detect_clues, Clue, ClueKind};
pub use rules::{try_add, validate, RuleId};

use crate::config::{Config, EditingClass};
use crate::corpus::RepairClass;

/// Category lookups the builder needs from a tagger.
pub trait Lexicon {
    /// Context-free category used for replacement candidacy.
    fn likely(&self, word: &str) -> usize;
    /// Lockstep tag of the next word given the previous tag.
    fn next_tag(&self, prev: Option<usize>, word: &str, is_fragment: bool) -> usize;
    /// Whether words of this category may take part in a replacement.
    fn replaceable(&self, category: usize) -> bool;
    fn category_name(&self, category: usize) -> &str;
}

impl Lexicon for crate::tagger::TaggerModel {
    fn likely(&self, word: &str) -> usize {
        self.likely_category(word)
    }

    fn next_tag(&self, prev: Option<usize>, word: &str, is_fragment: bool) -> usize {
        crate::tagger::TaggerModel::next_tag(self, prev, word, is_fragment)
    }

    fn replaceable(&self, category: usize) -> bool {
        !matches!(self.tag_name(category), "FRAG" | "FILLED_PAUSE")
    }

    fn category_name(&self, category: usize) -> &str {
        self.tag_name(category)
    }
}

/// A word in the builder's stream. Deleted words leave the stream, so
/// indices into it shift while `position` keeps the turn offset.
#[derive(Debug, Clone, PartialEq)]
pub struct LiveToken {
    pub position: usize,
    pub surface: String,
    pub is_fragment: bool,
    pub filled_pause: bool,
    /// Context-free category.
    pub category: usize,
    /// Lockstep tag.
    pub tag: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CorrKind {
    Match,
    Replacement,
}

impl CorrKind {
    pub fn letter(self) -> char {
        match self {
            CorrKind::Match => 'm',
            CorrKind::Replacement => 'r',
        }
    }
}

/// Whether a correspondence came from a detection clue or from search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    Clue,
    Search,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Correspondence {
    pub kind: CorrKind,
    pub left: usize,
    pub right: usize,
    pub origin: Origin,
}

impl Correspondence {
    pub fn new(kind: CorrKind, left: usize, right: usize, origin: Origin) -> Self {
        Correspondence {
            kind,
            left,
            right,
            origin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalJudgement {
    NotARepair,
    Judgeable,
    StillBuilding,
}

impl fmt::Display for LocalJudgement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LocalJudgement::NotARepair => "not-a-repair",
            LocalJudgement::Judgeable => "judgeable",
            LocalJudgement::StillBuilding => "still-building",
        })
    }
}

/// A candidate repair over the live stream.
#[derive(Debug, Clone, PartialEq)]
pub struct RepairPattern {
    pub seed: ClueKind,
    /// Correspondences in the order they were added.
    pub corrs: Vec<Correspondence>,
    pub editing: Option<Range<usize>>,
    /// Class of each editing-term unit, in order.
    pub editing_classes: Vec<EditingClass>,
    pub fragment: Option<usize>,
    /// Interruption gap fixed by a fragment or editing term. Gap `g` lies
    /// between stream indices `g - 1` and `g`.
    pub fixed_gap: Option<usize>,
}

impl RepairPattern {
    pub fn empty(seed: ClueKind) -> Self {
        RepairPattern {
            seed,
            corrs: Vec::new(),
            editing: None,
            editing_classes: Vec::new(),
            fragment: None,
            fixed_gap: None,
        }
    }

    pub fn is_editing(&self, i: usize) -> bool {
        self.editing.as_ref().is_some_and(|r| r.contains(&i))
    }

    pub fn uses(&self, i: usize) -> bool {
        self.corrs.iter().any(|c| c.left == i || c.right == i)
    }

    pub fn max_left(&self) -> Option<usize> {
        self.corrs.iter().map(|c| c.left).max()
    }

    pub fn min_left(&self) -> Option<usize> {
        self.corrs.iter().map(|c| c.left).min()
    }

    pub fn min_right(&self) -> Option<usize> {
        self.corrs.iter().map(|c| c.right).min()
    }

    pub fn max_right(&self) -> Option<usize> {
        self.corrs.iter().map(|c| c.right).max()
    }

    /// Correspondences ordered by left position.
    pub fn sorted(&self) -> Vec<Correspondence> {
        let mut v = self.corrs.clone();
        v.sort_by_key(|c| c.left);
        v
    }

    /// Interruption gap if it is determined: fixed by a fragment or editing
    /// term, or implied when nothing lies between the two halves.
    pub fn interruption_gap(&self, tokens: &[LiveToken]) -> Option<usize> {
        if self.fixed_gap.is_some() {
            return self.fixed_gap;
        }
        let (l, r) = (self.max_left()?, self.min_right()?);
        let unaccounted = (l + 1..r).any(|i| !tokens[i].is_fragment && !tokens[i].filled_pause);
        (!unaccounted).then_some(l + 1)
    }

    /// Last stream index the pattern covers.
    pub fn last_index(&self) -> Option<usize> {
        [
            self.max_right(),
            self.editing.as_ref().map(|r| r.end - 1),
            self.fragment,
        ]
        .into_iter()
        .flatten()
        .max()
    }

    /// Every word from the first removed correspondence to the last resumed
    /// one is a correspondence member, the fragment or an editing term.
    pub fn is_complete(&self) -> bool {
        let (Some(lo), Some(hi)) = (self.min_left(), self.max_right()) else {
            return false;
        };
        (lo..=hi).all(|i| self.uses(i) || self.fragment == Some(i) || self.is_editing(i))
    }

    pub fn only_cue_phrases(&self) -> bool {
        self.corrs.is_empty()
            && self.fragment.is_none()
            && !self.editing_classes.is_empty()
            && self.editing_classes.iter().all(|c| *c == EditingClass::Cue)
    }

    pub fn has_filled_pause(&self) -> bool {
        self.editing_classes
            .iter()
            .any(|c| matches!(c, EditingClass::Uh | EditingClass::Um))
    }

    /// Classification of the pattern for judging.
    pub fn judge_locally(&self, tokens: &[LiveToken]) -> LocalJudgement {
        if self.only_cue_phrases() {
            LocalJudgement::NotARepair
        } else if self.editing.is_some() || self.fragment.is_some() || self.interruption_gap(tokens).is_some() {
            LocalJudgement::Judgeable
        } else {
            LocalJudgement::StillBuilding
        }
    }

    /// First index of the removed text.
    pub fn start(&self, tokens: &[LiveToken]) -> Option<usize> {
        self.min_left()
            .or(self.fragment)
            .or_else(|| self.interruption_gap(tokens))
    }

    /// Pattern string over the alphabet m r x - . e.
    pub fn pattern_string(&self, tokens: &[LiveToken]) -> String {
        let Some(gap) = self.interruption_gap(tokens) else {
            return String::new();
        };
        let start = self.start(tokens).unwrap_or(gap).min(gap);
        let end = self
            .last_index()
            .map_or(gap, |i| i + 1)
            .max(gap);
        let mut s = String::new();
        for i in start..end {
            if i == gap {
                s.push('.');
            }
            let c = if let Some(c) = self.corrs.iter().find(|c| c.left == i || c.right == i) {
                c.kind.letter()
            } else if self.fragment == Some(i) {
                '-'
            } else if self.is_editing(i) {
                'e'
            } else {
                'x'
            };
            s.push(c);
        }
        if end == gap {
            s.push('.');
        }
        s
    }

    /// Stream indices deleted when the pattern is accepted as `klass`:
    /// the removed text and editing terms for a modification, the fragment
    /// and editing terms for an abridged repair.
    pub fn derive_correction(&self, tokens: &[LiveToken], klass: RepairClass) -> Correction {
        let editing: BTreeSet<usize> = self.editing.clone().into_iter().flatten().collect();
        let removed: BTreeSet<usize> = match klass {
            RepairClass::Modification => match (self.start(tokens), self.interruption_gap(tokens)) {
                (Some(s), Some(g)) => (s..g).collect(),
                _ => BTreeSet::new(),
            },
            RepairClass::Abridged => self.fragment.into_iter().collect(),
        };
        Correction { removed, editing }
    }
}

/// Deleted stream indices of an accepted repair.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Correction {
    pub removed: BTreeSet<usize>,
    pub editing: BTreeSet<usize>,
}

impl Correction {
    pub fn all(&self) -> BTreeSet<usize> {
        self.removed.union(&self.editing).copied().collect()
    }
}

/// Stream view of a plain token sequence, for callers outside the builder.
pub fn live_tokens<L: Lexicon>(tokens: &[crate::corpus::Token], lex: &L, config: &Config) -> Vec<LiveToken> {
    let mut out: Vec<LiveToken> = Vec::with_capacity(tokens.len());
    for t in tokens {
        let prev = out.last().map(|p| p.tag);
        out.push(LiveToken {
            position: t.position,
            surface: t.surface.clone(),
            is_fragment: t.is_fragment,
            filled_pause: config.is_filled_pause(&t.surface),
            category: lex.likely(&t.surface),
            tag: lex.next_tag(prev, &t.surface, t.is_fragment),
        });
    }
    out
}

#[cfg(test)]
pub(crate) mod test_lexicon {
    use super::Lexicon;
    use std::collections::HashMap;

    /// Word-to-category table; unknown words get category 0.
    pub struct ToyLexicon {
        pub names: Vec<String>,
        pub words: HashMap<String, usize>,
    }

    impl ToyLexicon {
        pub fn new(entries: &[(&str, &str)]) -> Self {
            let mut names = vec!["N".to_string(), "FRAG".to_string(), "FILLED_PAUSE".to_string()];
            let mut words = HashMap::new();
            for (w, c) in entries {
                let id = match names.iter().position(|n| n == c) {
                    Some(i) => i,
                    None => {
                        names.push(c.to_string());
                        names.len() - 1
                    }
                };
                words.insert(w.to_string(), id);
            }
            ToyLexicon { names, words }
        }
    }

    impl Lexicon for ToyLexicon {
        fn likely(&self, word: &str) -> usize {
            if word.ends_with('-') {
                return 1;
            }
            self.words.get(word).copied().unwrap_or(0)
        }

        fn next_tag(&self, _prev: Option<usize>, word: &str, _is_fragment: bool) -> usize {
            self.likely(word)
        }

        fn replaceable(&self, category: usize) -> bool {
            category != 1 && category != 2
        }

        fn category_name(&self, category: usize) -> &str {
            &self.names[category]
        }
    }
}
