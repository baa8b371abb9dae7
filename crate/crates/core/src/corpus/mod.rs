//! Turn-segmented transcripts and the repair annotation scheme.
//!
//! One turn per line:
//!
//! ```text
//! # comment
//! utt60: go/m1 to/m2 oran-/x <int> um/et go/m1 to/m2 Corning
//! ```
//!
//! A token is `surface[@TAG][/LABEL]` with `LABEL` one of `m<k>`, `r<k>`,
//! `x`, `et`. `<int>` marks an interruption point in the gap where it
//! appears and `<break>` a fresh-start cancel. Surfaces are lowercased on
//! input.

mod synth;

pub use synth::{synth_tag_of, synthesize_corpus, InjectedKind, SynthSpec, SynthTurn, SYNTH_TAGSET};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::ops::Range;
use std::sync::Arc;

use crate::error::{Error, Result};

/// One transcribed word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub is_fragment: bool,
    /// Index within the turn; preserved through segmentation and correction.
    pub position: usize,
    pub turn_id: Arc<str>,
}

impl Token {
    pub fn new(raw: &str, position: usize, turn_id: Arc<str>) -> std::result::Result<Token, String> {
        if raw.is_empty() {
            return Err("empty token".into());
        }
        if raw == "-" || raw.ends_with("--") {
            return Err(format!("invalid fragment {raw:?}"));
        }
        if raw.contains(['/', '@']) || raw.chars().any(char::is_whitespace) {
            return Err(format!("invalid character in token {raw:?}"));
        }
        Ok(Token {
            surface: raw.to_lowercase(),
            is_fragment: raw.ends_with('-'),
            position,
            turn_id,
        })
    }

    /// Tokenizes whitespace-separated plain text into a turn's tokens.
    pub fn sequence(turn_id: &str, text: &str) -> std::result::Result<Vec<Token>, String> {
        let id: Arc<str> = Arc::from(turn_id);
        text.split_whitespace()
            .enumerate()
            .map(|(i, w)| Token::new(w, i, id.clone()))
            .collect()
    }
}

/// Joins token surfaces with single spaces.
pub fn surface_text(tokens: &[Token]) -> String {
    tokens
        .iter()
        .map(|t| t.surface.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LabelKind {
    Match,
    Replacement,
    Other,
    EditingTerm,
    Fragment,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnnotationLabel {
    pub kind: LabelKind,
    /// Present iff `kind` is `Match` or `Replacement`.
    pub pair_index: Option<u32>,
}

impl AnnotationLabel {
    pub const NONE: AnnotationLabel = AnnotationLabel {
        kind: LabelKind::None,
        pair_index: None,
    };

    pub fn simple(kind: LabelKind) -> Self {
        debug_assert!(!matches!(kind, LabelKind::Match | LabelKind::Replacement));
        AnnotationLabel {
            kind,
            pair_index: None,
        }
    }

    pub fn pair(kind: LabelKind, index: u32) -> Self {
        debug_assert!(matches!(kind, LabelKind::Match | LabelKind::Replacement));
        AnnotationLabel {
            kind,
            pair_index: Some(index),
        }
    }

    fn parse(text: &str, is_fragment: bool) -> std::result::Result<Self, String> {
        let bad = || format!("malformed label {text:?}");
        match text {
            "x" if is_fragment => Ok(Self::simple(LabelKind::Fragment)),
            "x" => Ok(Self::simple(LabelKind::Other)),
            "et" => Ok(Self::simple(LabelKind::EditingTerm)),
            _ => {
                let kind = match text.as_bytes().first() {
                    Some(b'm') => LabelKind::Match,
                    Some(b'r') => LabelKind::Replacement,
                    _ => return Err(bad()),
                };
                let digits = &text[1..];
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad());
                }
                let index: u32 = digits.parse().map_err(|_| bad())?;
                if index == 0 {
                    return Err(bad());
                }
                Ok(Self::pair(kind, index))
            }
        }
    }

    /// Label text as written in corpus files; `None` for unlabeled tokens.
    pub fn code(&self) -> Option<String> {
        match self.kind {
            LabelKind::Match => Some(format!("m{}", self.pair_index.unwrap_or(0))),
            LabelKind::Replacement => Some(format!("r{}", self.pair_index.unwrap_or(0))),
            LabelKind::Other | LabelKind::Fragment => Some("x".into()),
            LabelKind::EditingTerm => Some("et".into()),
            LabelKind::None => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedTurn {
    pub id: String,
    pub tokens: Vec<Token>,
    pub labels: Vec<AnnotationLabel>,
    /// Gold part-of-speech tag names, when the corpus carries them.
    pub tags: Vec<Option<String>>,
    /// Gap `i` sits between token `i - 1` and token `i`.
    pub interruption_points: BTreeSet<usize>,
    pub freshstart_breaks: BTreeSet<usize>,
}

impl AnnotatedTurn {
    /// An unannotated turn from plain text.
    pub fn from_text(id: &str, text: &str) -> std::result::Result<Self, String> {
        let tokens = Token::sequence(id, text)?;
        let n = tokens.len();
        Ok(AnnotatedTurn {
            id: id.to_string(),
            tokens,
            labels: vec![AnnotationLabel::NONE; n],
            tags: vec![None; n],
            interruption_points: BTreeSet::new(),
            freshstart_breaks: BTreeSet::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn text(&self) -> String {
        surface_text(&self.tokens)
    }

    /// Correspondence pairs by index, as (left, right) token positions.
    pub fn pairs(&self) -> BTreeMap<u32, (usize, usize)> {
        let mut members: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, l) in self.labels.iter().enumerate() {
            if let Some(k) = l.pair_index {
                members.entry(k).or_default().push(i);
            }
        }
        members
            .into_iter()
            .filter(|(_, v)| v.len() == 2)
            .map(|(k, v)| (k, (v[0], v[1])))
            .collect()
    }

    /// Pairs owned by the interruption point at `gap`: those whose nearest
    /// interruption point at or left of the right word is `gap`.
    pub fn pairs_of_gap(&self, gap: usize) -> Vec<(u32, usize, usize)> {
        self.pairs()
            .into_iter()
            .filter(|(_, (l, r))| {
                self.interruption_points.range(l + 1..=*r).next_back() == Some(&gap)
            })
            .map(|(k, (l, r))| (k, l, r))
            .collect()
    }

    /// Derives the gold repairs implied by the annotation, one per
    /// interruption point, in left-to-right order.
    pub fn gold_repairs(&self) -> std::result::Result<Vec<GoldRepair>, String> {
        let pairs = self.pairs();
        let ints: Vec<usize> = self.interruption_points.iter().copied().collect();
        let kind = |i: usize| self.labels[i].kind;
        let mut out = Vec::with_capacity(ints.len());
        for &gap in &ints {
            let mut et_end = gap;
            while et_end < self.len() && kind(et_end) == LabelKind::EditingTerm {
                et_end += 1;
            }
            let owned: Vec<(usize, usize)> = pairs
                .values()
                .copied()
                .filter(|&(l, r)| ints.iter().filter(|&&g| l < g && g <= r).max() == Some(&gap))
                .collect();
            let mut start = owned.iter().map(|p| p.0).min().unwrap_or(gap);
            if owned.is_empty() {
                while start > 0 && matches!(kind(start - 1), LabelKind::Other | LabelKind::Fragment) {
                    start -= 1;
                }
            }
            for p in start..gap.saturating_sub(1) {
                if self.tokens[p].is_fragment && !self.interruption_points.contains(&(p + 1)) {
                    return Err(format!(
                        "fragment {:?} is not adjacent to an interruption point",
                        self.tokens[p].surface
                    ));
                }
            }
            let mut end = owned.iter().map(|p| p.1 + 1).max().unwrap_or(et_end).max(et_end);
            while end < self.len() && kind(end) == LabelKind::Other {
                end += 1;
            }
            let has_other = (start..gap)
                .chain(et_end..end)
                .any(|i| kind(i) == LabelKind::Other);
            let klass = if !owned.is_empty() || has_other {
                RepairClass::Modification
            } else {
                RepairClass::Abridged
            };
            if start == gap && et_end == gap && end == et_end {
                return Err(format!("interruption point at gap {gap} marks an empty repair"));
            }
            out.push(GoldRepair {
                removed: start..gap,
                editing: gap..et_end,
                resumed: et_end..end,
                klass,
            });
        }
        Ok(out)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        let mut members: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, l) in self.labels.iter().enumerate() {
            if let Some(k) = l.pair_index {
                members.entry(k).or_default().push(i);
            }
        }
        for (k, v) in &members {
            match v.len() {
                1 => return Err(format!("dangling correspondence index {k}")),
                2 => {}
                n => return Err(format!("correspondence index {k} used {n} times")),
            }
            let (l, r) = (v[0], v[1]);
            if self.labels[l].kind != self.labels[r].kind {
                return Err(format!("correspondence index {k} mixes m and r"));
            }
            if !self.interruption_points.iter().any(|&g| l < g && g <= r) {
                return Err(format!(
                    "correspondence index {k} does not straddle an interruption point"
                ));
            }
            if self.freshstart_breaks.iter().any(|&b| l < b && b <= r) {
                return Err(format!("correspondence index {k} crosses a fresh-start break"));
            }
        }
        for &g in &self.interruption_points {
            if g >= self.len() {
                return Err(format!("interruption point at gap {g} is outside the turn"));
            }
            if self.freshstart_breaks.contains(&g) {
                return Err(format!("gap {g} is marked both <int> and <break>"));
            }
        }
        // Editing terms must follow an interruption point or a break.
        let mut attached = false;
        for i in 0..self.len() {
            let at_gap = self.interruption_points.contains(&i) || self.freshstart_breaks.contains(&i);
            if self.labels[i].kind == LabelKind::EditingTerm {
                attached |= at_gap;
                if !attached {
                    return Err(format!(
                        "editing term {:?} does not follow an interruption point",
                        self.tokens[i].surface
                    ));
                }
            } else {
                attached = false;
            }
        }
        self.gold_repairs().map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RepairClass {
    Modification,
    Abridged,
}

impl RepairClass {
    pub fn as_str(self) -> &'static str {
        match self {
            RepairClass::Modification => "modification",
            RepairClass::Abridged => "abridged",
        }
    }
}

/// A hand-annotated repair in token indices of its turn (or segment).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldRepair {
    pub removed: Range<usize>,
    pub editing: Range<usize>,
    pub resumed: Range<usize>,
    pub klass: RepairClass,
}

impl GoldRepair {
    /// The interruption gap.
    pub fn gap(&self) -> usize {
        self.removed.end
    }
}

/// The repair-pattern string of a gold repair, e.g. `mm-.emm`.
pub fn pattern_string(turn: &AnnotatedTurn, repair: &GoldRepair) -> String {
    let letter = |i: usize| {
        if turn.tokens[i].is_fragment {
            return '-';
        }
        match turn.labels[i].kind {
            LabelKind::Match => 'm',
            LabelKind::Replacement => 'r',
            LabelKind::EditingTerm => 'e',
            _ => 'x',
        }
    };
    let mut s: String = repair.removed.clone().map(letter).collect();
    s.push('.');
    s.extend(repair.editing.clone().map(|_| 'e'));
    s.extend(repair.resumed.clone().map(letter));
    s
}

/// Splits a turn at its fresh-start breaks, dropping the editing terms that
/// immediately follow each break. Segments keep token positions; their
/// interruption points are re-indexed locally. Empty segments are dropped.
pub fn apply_freshstart_breaks(turn: &AnnotatedTurn) -> Vec<AnnotatedTurn> {
    if turn.freshstart_breaks.is_empty() {
        return vec![turn.clone()];
    }
    let mut bounds: Vec<usize> = vec![0];
    bounds.extend(turn.freshstart_breaks.iter().copied().filter(|&b| b > 0 && b < turn.len()));
    bounds.push(turn.len());
    bounds.dedup();
    let mut out = Vec::new();
    for w in bounds.windows(2) {
        let (mut from, to) = (w[0], w[1]);
        if turn.freshstart_breaks.contains(&from) {
            while from < to && turn.labels[from].kind == LabelKind::EditingTerm {
                from += 1;
            }
        }
        if from >= to {
            continue;
        }
        out.push(AnnotatedTurn {
            id: turn.id.clone(),
            tokens: turn.tokens[from..to].to_vec(),
            labels: turn.labels[from..to].to_vec(),
            tags: turn.tags[from..to].to_vec(),
            interruption_points: turn
                .interruption_points
                .iter()
                .filter(|&&g| g >= from && g < to)
                .map(|&g| g - from)
                .collect(),
            freshstart_breaks: BTreeSet::new(),
        });
    }
    out
}

/// Parses a corpus file. Blank lines and lines starting with `#` are skipped.
pub fn parse_turns(text: &str) -> Result<Vec<AnnotatedTurn>> {
    let mut turns = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        turns.push(parse_line(line).map_err(|m| Error::parse(lineno, m))?);
    }
    Ok(turns)
}

fn parse_line(line: &str) -> std::result::Result<AnnotatedTurn, String> {
    let (id, body) = line
        .split_once(':')
        .ok_or_else(|| "missing turn id prefix".to_string())?;
    let id = id.trim();
    if id.is_empty() || id.chars().any(char::is_whitespace) {
        return Err(format!("invalid turn id {id:?}"));
    }
    let turn_id: Arc<str> = Arc::from(id);
    let mut turn = AnnotatedTurn {
        id: id.to_string(),
        tokens: Vec::new(),
        labels: Vec::new(),
        tags: Vec::new(),
        interruption_points: BTreeSet::new(),
        freshstart_breaks: BTreeSet::new(),
    };
    for piece in body.split_whitespace() {
        let gap = turn.tokens.len();
        match piece {
            "<int>" => {
                if !turn.interruption_points.insert(gap) {
                    return Err(format!("duplicate <int> at gap {gap}"));
                }
                continue;
            }
            "<break>" => {
                if !turn.freshstart_breaks.insert(gap) {
                    return Err(format!("duplicate <break> at gap {gap}"));
                }
                continue;
            }
            _ if piece.starts_with('<') => return Err(format!("unknown marker {piece:?}")),
            _ => {}
        }
        let (rest, label) = match piece.rsplit_once('/') {
            Some((rest, label)) => (rest, Some(label)),
            None => (piece, None),
        };
        let (surface, tag) = match rest.split_once('@') {
            Some((s, t)) => (s, Some(t)),
            None => (rest, None),
        };
        if let Some(t) = tag {
            if t.is_empty() || !t.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(format!("malformed tag in {piece:?}"));
            }
        }
        let token = Token::new(surface, gap, turn_id.clone())?;
        let label = match label {
            Some(l) => AnnotationLabel::parse(l, token.is_fragment)?,
            None => AnnotationLabel::NONE,
        };
        turn.tokens.push(token);
        turn.labels.push(label);
        turn.tags.push(tag.map(str::to_string));
    }
    turn.validate()?;
    Ok(turn)
}

/// Writes turns in the corpus format.
pub fn serialize_turns(turns: &[AnnotatedTurn]) -> String {
    let mut out = String::new();
    for turn in turns {
        out.push_str(&serialize_turn(turn));
        out.push('\n');
    }
    out
}

pub fn serialize_turn(turn: &AnnotatedTurn) -> String {
    let mut line = format!("{}:", turn.id);
    for gap in 0..=turn.len() {
        if turn.freshstart_breaks.contains(&gap) {
            line.push_str(" <break>");
        }
        if turn.interruption_points.contains(&gap) {
            line.push_str(" <int>");
        }
        if gap == turn.len() {
            break;
        }
        let _ = write!(line, " {}", turn.tokens[gap].surface);
        if let Some(tag) = &turn.tags[gap] {
            let _ = write!(line, "@{tag}");
        }
        if let Some(code) = turn.labels[gap].code() {
            let _ = write!(line, "/{code}");
        }
    }
    line
}
