//! First-order Markov part-of-speech model with a repair state on every
//! inter-word transition.
//!
//! Each gap between words is either fluent or the interruption point of a
//! modification repair. The model holds the ordinary tagging tables plus
//! the repair prior, the repair-specific category transitions and the clue
//! output distributions for both states. All tables are add-alpha smoothed
//! relative frequencies.

mod model_file;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::config::{Config, EditingClass};
use crate::corpus::{apply_freshstart_breaks, AnnotatedTurn, LabelKind, RepairClass, Token};
use crate::error::{Error, Result};
use crate::evidence::{editing_class, lexical_gap_evidence, MatchType, RepairEvidence};

/// Reserved lexical row for words never seen in training.
pub const UNKNOWN_WORD: &str = "<unk>";

/// Tag given to hyphen-terminated fragments.
pub const FRAGMENT_TAG: &str = "FRAG";

pub const DEFAULT_TAGSET: &[&str] = &[
    "N", "NP", "PRO", "V", "MD", "BE", "D", "ADJ", "ADV", "P", "TO", "PRT", "CONJ", "NUM", "WH",
    "NEG", "AC", "OTHER", "FILLED_PAUSE", "FRAG",
];

/// Words of history used when reading gap evidence off fluent text.
pub const EVIDENCE_REACH: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RepairState {
    Repair,
    Fluent,
}

impl RepairState {
    pub fn index(self) -> usize {
        match self {
            RepairState::Repair => 0,
            RepairState::Fluent => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RepairState::Repair => "repair",
            RepairState::Fluent => "fluent",
        }
    }
}

/// P(F|R), P(E|R), P(M|R), indexed by `RepairState::index`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClueOutput {
    pub fragment: [[f64; 2]; 2],
    pub editing: [[f64; 4]; 2],
    pub matches: [[f64; 5]; 2],
}

impl ClueOutput {
    pub fn fragment_p(&self, state: RepairState, present: bool) -> f64 {
        self.fragment[state.index()][usize::from(present)]
    }

    pub fn editing_p(&self, state: RepairState, class: EditingClass) -> f64 {
        self.editing[state.index()][class.index()]
    }

    pub fn matches_p(&self, state: RepairState, m: MatchType) -> f64 {
        self.matches[state.index()][m.index()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaggerModel {
    pub alpha: f64,
    pub tagset: Vec<String>,
    /// Index of the tag given to unknown words.
    pub open_class: usize,
    /// Known words in lexical order; the unknown-word row follows them.
    pub vocab: Vec<String>,
    /// P(w|C) as `lexical[tag][word]`, with `vocab.len()` the unknown row.
    pub lexical: Vec<Vec<f64>>,
    /// P(C) for the first word of a segment.
    pub initial: Vec<f64>,
    /// Unconditional P(C), used by `likely_category`.
    pub tag_prior: Vec<f64>,
    /// P(C_next | C, fluent) as `trans_fluent[from][to]`.
    pub trans_fluent: Vec<Vec<f64>>,
    /// P(C_next | C, repair).
    pub trans_repair: Vec<Vec<f64>>,
    /// P(repair | C) for the gap following a word tagged C.
    pub repair_prior: Vec<f64>,
    pub clue_output: ClueOutput,
    word_index: HashMap<String, usize>,
    tag_index: HashMap<String, usize>,
}

fn smooth(counts: &[f64], alpha: f64) -> Vec<f64> {
    let total: f64 = counts.iter().sum::<f64>() + alpha * counts.len() as f64;
    counts.iter().map(|c| (c + alpha) / total).collect()
}

fn smooth_array<const K: usize>(counts: [f64; K], alpha: f64) -> [f64; K] {
    let v = smooth(&counts, alpha);
    let mut out = [0.0; K];
    out.copy_from_slice(&v);
    out
}

/// Gold evidence for the interruption point of an annotated modification repair.
fn gold_evidence(turn: &AnnotatedTurn, removed_end: usize, editing: &std::ops::Range<usize>, config: &Config) -> RepairEvidence {
    let fragment = removed_end > 0 && turn.tokens[removed_end - 1].is_fragment;
    let words: Vec<&str> = turn.tokens[editing.clone()].iter().map(|t| t.surface.as_str()).collect();
    let editing = editing_class(&words, config);
    let gap = removed_end;
    let mut matches = BTreeSet::new();
    let mut replacements = BTreeSet::new();
    for (k, l, _) in turn.pairs_of_gap(gap) {
        match turn.labels[l].kind {
            LabelKind::Match => matches.insert(k),
            _ => replacements.insert(k),
        };
    }
    RepairEvidence {
        fragment,
        editing,
        matches: MatchType::from_counts(matches.len(), replacements.len()),
    }
}

impl TaggerModel {
    /// Estimates every table from gold-tagged, gold-annotated turns.
    pub fn train(turns: &[AnnotatedTurn], tagset: &[String], config: &Config) -> Result<TaggerModel> {
        config.validate()?;
        if tagset.is_empty() {
            return Err(Error::Training("empty tagset".into()));
        }
        let tag_index: HashMap<String, usize> =
            tagset.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        if tag_index.len() != tagset.len() {
            return Err(Error::Training("duplicate tag in tagset".into()));
        }
        let open_class = *tag_index
            .get(&config.open_class)
            .ok_or_else(|| Error::Training(format!("open class {} is not in the tagset", config.open_class)))?;
        let n = tagset.len();
        let alpha = config.alpha;

        let mut word_tag: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        let mut tag_count = vec![0.0; n];
        let mut initial = vec![0.0; n];
        let mut fluent = vec![vec![0.0; n]; n];
        let mut repair = vec![vec![0.0; n]; n];
        let mut gaps_after = vec![0.0; n];
        let mut repairs_after = vec![0.0; n];
        let mut fragment = [[0.0; 2]; 2];
        let mut editing = [[0.0; 4]; 2];
        let mut matches = [[0.0; 5]; 2];
        let mut words_seen = 0usize;

        for turn in turns {
            for seg in apply_freshstart_breaks(turn) {
                if seg.is_empty() {
                    continue;
                }
                let mut tags = Vec::with_capacity(seg.len());
                for (tok, tag) in seg.tokens.iter().zip(&seg.tags) {
                    let name = tag.as_ref().ok_or_else(|| {
                        Error::Training(format!("turn {}: token {:?} has no gold tag", seg.id, tok.surface))
                    })?;
                    let id = *tag_index.get(name).ok_or_else(|| {
                        Error::Training(format!("turn {}: tag {name} is not in the tagset", seg.id))
                    })?;
                    if tok.surface == UNKNOWN_WORD || tok.surface.starts_with(['#', '[']) {
                        return Err(Error::Training(format!(
                            "turn {}: word {:?} cannot be stored in a model file",
                            seg.id, tok.surface
                        )));
                    }
                    tags.push(id);
                    tag_count[id] += 1.0;
                    word_tag.entry(tok.surface.clone()).or_insert_with(|| vec![0.0; n])[id] += 1.0;
                    words_seen += 1;
                }
                let gold = seg.gold_repairs().map_err(|m| Error::Training(format!("turn {}: {m}", seg.id)))?;
                let mut repair_gaps = BTreeMap::new();
                for g in gold.iter().filter(|g| g.klass == RepairClass::Modification) {
                    repair_gaps.insert(g.gap(), g.clone());
                }
                initial[tags[0]] += 1.0;
                let words: Vec<&str> = seg.tokens.iter().map(|t| t.surface.as_str()).collect();
                let frags: Vec<bool> = seg.tokens.iter().map(|t| t.is_fragment).collect();
                for gap in 1..seg.len() {
                    let before = tags[gap - 1];
                    gaps_after[before] += 1.0;
                    let (state, evidence) = match repair_gaps.get(&gap) {
                        Some(g) => {
                            repairs_after[before] += 1.0;
                            if g.editing.end < seg.len() {
                                repair[before][tags[g.editing.end]] += 1.0;
                            }
                            (RepairState::Repair, gold_evidence(&seg, gap, &g.editing, config))
                        }
                        None => {
                            fluent[before][tags[gap]] += 1.0;
                            let e = lexical_gap_evidence(&words, &frags, &tags, gap, EVIDENCE_REACH, config);
                            (RepairState::Fluent, e)
                        }
                    };
                    let s = state.index();
                    fragment[s][usize::from(evidence.fragment)] += 1.0;
                    editing[s][evidence.editing.index()] += 1.0;
                    matches[s][evidence.matches.index()] += 1.0;
                }
            }
        }
        if words_seen == 0 {
            return Err(Error::Training("empty corpus".into()));
        }

        let vocab: Vec<String> = word_tag.keys().cloned().collect();
        let mut hapax = vec![0.0; n];
        for counts in word_tag.values() {
            if counts.iter().sum::<f64>() == 1.0 {
                let t = counts.iter().position(|c| *c == 1.0).expect("single count");
                hapax[t] += 1.0;
            }
        }
        let rows = vocab.len() + 1;
        let lexical = (0..n)
            .map(|t| {
                let denom = tag_count[t] + hapax[t] + alpha * rows as f64;
                let mut row: Vec<f64> = vocab.iter().map(|w| (word_tag[w][t] + alpha) / denom).collect();
                row.push((hapax[t] + alpha) / denom);
                row
            })
            .collect();
        let repair_prior = (0..n)
            .map(|t| (repairs_after[t] + alpha) / (gaps_after[t] + 2.0 * alpha))
            .collect();

        let mut model = TaggerModel {
            alpha,
            tagset: tagset.to_vec(),
            open_class,
            vocab,
            lexical,
            initial: smooth(&initial, alpha),
            tag_prior: smooth(&tag_count, alpha),
            trans_fluent: fluent.iter().map(|r| smooth(r, alpha)).collect(),
            trans_repair: repair.iter().map(|r| smooth(r, alpha)).collect(),
            repair_prior,
            clue_output: ClueOutput {
                fragment: [smooth_array(fragment[0], alpha), smooth_array(fragment[1], alpha)],
                editing: [smooth_array(editing[0], alpha), smooth_array(editing[1], alpha)],
                matches: [smooth_array(matches[0], alpha), smooth_array(matches[1], alpha)],
            },
            word_index: HashMap::new(),
            tag_index: HashMap::new(),
        };
        model.reindex();
        Ok(model)
    }

    fn reindex(&mut self) {
        self.word_index = self.vocab.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        self.tag_index = self.tagset.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    }

    pub fn num_tags(&self) -> usize {
        self.tagset.len()
    }

    pub fn tag_id(&self, name: &str) -> Option<usize> {
        self.tag_index.get(name).copied()
    }

    pub fn tag_name(&self, id: usize) -> &str {
        &self.tagset[id]
    }

    fn fragment_tag(&self) -> Option<usize> {
        self.tag_id(FRAGMENT_TAG)
    }

    fn word_row(&self, word: &str) -> usize {
        self.word_index.get(word).copied().unwrap_or(self.vocab.len())
    }

    pub fn is_known(&self, word: &str) -> bool {
        self.word_index.contains_key(word)
    }

    /// log P(w|C). Fragments are emitted only by the fragment tag.
    pub fn log_emission(&self, word: &str, is_fragment: bool, tag: usize) -> f64 {
        if is_fragment {
            if let Some(f) = self.fragment_tag() {
                return if tag == f { 0.0 } else { f64::NEG_INFINITY };
            }
        }
        self.lexical[tag][self.word_row(word)].ln()
    }

    /// Most probable tag sequence under fluent transitions. Ties go to the
    /// lowest tag id.
    pub fn viterbi(&self, tokens: &[Token]) -> Vec<usize> {
        if tokens.is_empty() {
            return Vec::new();
        }
        let n = self.num_tags();
        let emit = |tok: &Token, t: usize| self.log_emission(&tok.surface, tok.is_fragment, t);
        let mut score: Vec<f64> = (0..n).map(|t| self.initial[t].ln() + emit(&tokens[0], t)).collect();
        let mut back: Vec<Vec<usize>> = Vec::with_capacity(tokens.len());
        for tok in &tokens[1..] {
            let mut next = vec![f64::NEG_INFINITY; n];
            let mut ptr = vec![0; n];
            for to in 0..n {
                let e = emit(tok, to);
                for (from, s) in score.iter().enumerate() {
                    let v = s + self.trans_fluent[from][to].ln() + e;
                    if v > next[to] {
                        next[to] = v;
                        ptr[to] = from;
                    }
                }
            }
            back.push(ptr);
            score = next;
        }
        let mut best = 0;
        for t in 1..n {
            if score[t] > score[best] {
                best = t;
            }
        }
        let mut path = vec![best];
        for ptr in back.iter().rev() {
            best = ptr[best];
            path.push(best);
        }
        path.reverse();
        path
    }

    /// Log probability of one tag path over `tokens` with fluent transitions.
    pub fn path_log_prob(&self, tokens: &[Token], tags: &[usize]) -> f64 {
        let mut lp = 0.0;
        for (i, (tok, &t)) in tokens.iter().zip(tags).enumerate() {
            lp += if i == 0 {
                self.initial[t].ln()
            } else {
                self.trans_fluent[tags[i - 1]][t].ln()
            };
            lp += self.log_emission(&tok.surface, tok.is_fragment, t);
        }
        lp
    }

    /// Context-free category of a word: argmax P(w|C)P(C) for known words,
    /// the open class otherwise.
    pub fn likely_category(&self, word: &str) -> usize {
        if word.ends_with('-') {
            if let Some(f) = self.fragment_tag() {
                return f;
            }
        }
        let Some(&row) = self.word_index.get(word) else {
            return self.open_class;
        };
        let mut best = 0;
        let mut best_p = f64::NEG_INFINITY;
        for t in 0..self.num_tags() {
            let p = self.lexical[t][row].ln() + self.tag_prior[t].ln();
            if p > best_p {
                best_p = p;
                best = t;
            }
        }
        best
    }

    /// Greedy lockstep tag for the next word given the previous tag:
    /// argmax P(w|C) max_R P(R|prev) P(C|prev, R), or P(w|C) P(C) at
    /// segment start.
    pub fn next_tag(&self, prev: Option<usize>, word: &str, is_fragment: bool) -> usize {
        if is_fragment {
            if let Some(f) = self.fragment_tag() {
                return f;
            }
        }
        let row = self.word_row(word);
        let mut best = 0;
        let mut best_p = f64::NEG_INFINITY;
        for t in 0..self.num_tags() {
            let trans = match prev {
                Some(p) => {
                    let r = self.repair_prior[p];
                    ((1.0 - r) * self.trans_fluent[p][t]).max(r * self.trans_repair[p][t])
                }
                None => self.initial[t],
            };
            let v = trans.ln() + self.lexical[t][row].ln();
            if v > best_p {
                best_p = v;
                best = t;
            }
        }
        best
    }

    pub fn to_text(&self) -> String {
        model_file::write(self)
    }

    pub fn from_text(text: &str) -> Result<TaggerModel> {
        let mut m = model_file::read(text)?;
        m.reindex();
        Ok(m)
    }
}

/// Reads a tagset file: one tag per line, `#` comments allowed.
pub fn parse_tagset(text: &str) -> Result<Vec<String>> {
    let mut tags = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.split_whitespace().count() != 1 {
            return Err(Error::parse(i + 1, format!("expected one tag, got {line:?}")));
        }
        if tags.iter().any(|t| t == line) {
            return Err(Error::parse(i + 1, format!("duplicate tag {line}")));
        }
        tags.push(line.to_string());
    }
    Ok(tags)
}

pub fn default_tagset() -> Vec<String> {
    DEFAULT_TAGSET.iter().map(|s| s.to_string()).collect()
}
