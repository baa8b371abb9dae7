//! Seeded generator of gold-annotated dialog turns.
//!
//! Fluent clauses are drawn from a small transport-planning grammar in which
//! every word has exactly one tag. Repairs are injected into clauses with the
//! requested proportions and carry full `m`/`r`/`x`/`et` annotation.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AnnotatedTurn, AnnotationLabel, GoldRepair, LabelKind, Token};
use crate::error::{Error, Result};

/// Tag inventory of the generator's lexicon.
pub const SYNTH_TAGSET: &[&str] = &[
    "N", "NP", "PRO", "V", "MD", "BE", "D", "ADJ", "ADV", "P", "TO", "PRT", "CONJ", "NUM", "WH",
    "NEG", "AC", "OTHER", "FILLED_PAUSE", "FRAG",
];

const LEXICON: &[(&str, &[&str])] = &[
    (
        "N",
        &[
            "engine", "boxcar", "tanker", "train", "oranges", "bananas", "juice", "load",
            "factory", "car", "track", "station", "crates", "cargo", "trip", "plan", "boxcars",
            "route",
        ],
    ),
    ("NP", &["avon", "bath", "corning", "dansville", "elmira"]),
    ("PRO", &["i", "we", "you", "it", "they"]),
    (
        "V",
        &[
            "take", "pick", "send", "get", "need", "have", "go", "make", "move", "bring",
            "think", "manage", "want", "hook", "use", "unload", "fill", "ship", "mean", "guess",
            "say", "start",
        ],
    ),
    ("MD", &["can", "will", "should", "could"]),
    ("BE", &["is", "are"]),
    ("D", &["the", "a", "that", "this", "each"]),
    ("ADJ", &["entire", "empty", "big", "red", "full", "other", "next", "first"]),
    ("ADV", &["then", "now", "quickly", "there", "also", "again", "more"]),
    ("P", &["at", "from", "of", "with", "in", "on", "into", "through", "by", "for"]),
    ("TO", &["to"]),
    ("PRT", &["up", "back", "off", "down", "out"]),
    ("CONJ", &["and", "but", "so", "or"]),
    ("NUM", &["one", "two", "three", "four", "five"]),
    ("WH", &["how", "what", "where", "when"]),
    ("NEG", &["not"]),
    ("AC", &["okay", "well", "sorry"]),
    ("OTHER", &["let's", "see"]),
    ("FILLED_PAUSE", &["um", "uh", "er"]),
];

/// Tags whose words may stand in for one another in a replacement.
const REPLACEABLE: &[&str] = &["N", "NP", "V", "ADJ", "NUM", "P", "PRO", "D", "PRT"];

#[derive(Clone, Copy)]
enum Slot {
    Tag(&'static str),
    Maybe(&'static str),
    Lit(&'static str),
}

use Slot::{Lit, Maybe, Tag};

const TEMPLATES: &[&[Slot]] = &[
    &[Tag("PRO"), Maybe("MD"), Tag("V"), Tag("D"), Tag("N"), Lit("to"), Tag("NP")],
    &[Tag("PRO"), Tag("V"), Tag("PRT"), Tag("D"), Tag("N"), Lit("of"), Tag("N"), Lit("at"), Tag("NP")],
    &[Tag("PRO"), Tag("V"), Lit("to"), Tag("V"), Tag("D"), Tag("N"), Lit("to"), Tag("NP")],
    &[Tag("CONJ"), Tag("ADV"), Tag("PRO"), Tag("V"), Tag("D"), Tag("ADJ"), Tag("N")],
    &[Tag("D"), Tag("N"), Tag("BE"), Tag("P"), Tag("NP")],
    &[Tag("PRO"), Tag("V"), Tag("NUM"), Tag("N"), Tag("P"), Tag("NP")],
    &[Tag("PRO"), Tag("MD"), Tag("V"), Tag("D"), Tag("N"), Tag("ADV")],
    &[Tag("WH"), Tag("MD"), Tag("PRO"), Tag("V"), Tag("D"), Tag("N")],
    &[Tag("AC"), Tag("PRO"), Tag("V"), Tag("D"), Tag("N"), Tag("P"), Tag("NP")],
    &[Tag("PRO"), Tag("MD"), Tag("NEG"), Tag("V"), Tag("D"), Tag("ADJ"), Tag("N")],
];

/// Generator parameters. Every rate is a probability in [0, 1]; the five
/// repair-type weights give the mix of injected repairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub turns: usize,
    /// Probability that a clause hosts a repair.
    pub repair_rate: f64,
    pub word_repetition: f64,
    pub larger_repetition: f64,
    pub replacement: f64,
    pub other: f64,
    pub abridged: f64,
    /// Fragment rate among modification repairs.
    pub fragment_rate: f64,
    /// Editing-term rate among modification repairs.
    pub editing_term_rate: f64,
    /// Fragment rate among abridged repairs; the rest carry a filled pause.
    pub abridged_fragment_rate: f64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        // 179/58/72/141 modification and 267 abridged out of 717 repairs.
        SynthSpec {
            turns: 1000,
            repair_rate: 0.3,
            word_repetition: 179.0 / 717.0,
            larger_repetition: 58.0 / 717.0,
            replacement: 72.0 / 717.0,
            other: 141.0 / 717.0,
            abridged: 267.0 / 717.0,
            fragment_rate: 0.147,
            editing_term_rate: 0.193,
            abridged_fragment_rate: 0.464,
        }
    }
}

impl SynthSpec {
    /// A spec that injects no repairs.
    pub fn fluent(turns: usize) -> Self {
        SynthSpec {
            turns,
            repair_rate: 0.0,
            word_repetition: 0.0,
            larger_repetition: 0.0,
            replacement: 0.0,
            other: 0.0,
            abridged: 0.0,
            fragment_rate: 0.0,
            editing_term_rate: 0.0,
            abridged_fragment_rate: 0.0,
        }
    }

    pub fn from_toml(text: &str) -> Result<SynthSpec> {
        let spec: SynthSpec = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("repair_rate", self.repair_rate),
            ("word_repetition", self.word_repetition),
            ("larger_repetition", self.larger_repetition),
            ("replacement", self.replacement),
            ("other", self.other),
            ("abridged", self.abridged),
            ("fragment_rate", self.fragment_rate),
            ("editing_term_rate", self.editing_term_rate),
            ("abridged_fragment_rate", self.abridged_fragment_rate),
        ];
        for (name, r) in rates {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::Config(format!("{name} = {r} is outside [0, 1]")));
            }
        }
        Ok(())
    }

    fn type_weights(&self) -> [f64; 5] {
        [
            self.word_repetition,
            self.larger_repetition,
            self.replacement,
            self.other,
            self.abridged,
        ]
    }
}

/// Kind of injected repair, following the breakdown used for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InjectedKind {
    WordRepetition,
    LargerRepetition,
    WordReplacement,
    Other,
    Abridged,
}

impl InjectedKind {
    const ALL: [InjectedKind; 5] = [
        InjectedKind::WordRepetition,
        InjectedKind::LargerRepetition,
        InjectedKind::WordReplacement,
        InjectedKind::Other,
        InjectedKind::Abridged,
    ];
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthTurn {
    pub turn: AnnotatedTurn,
    pub gold: Vec<GoldRepair>,
    pub kinds: Vec<InjectedKind>,
}

/// Generates `spec.turns` annotated turns. Output depends only on
/// `spec` and `seed`.
pub fn synthesize_corpus(spec: &SynthSpec, seed: u64) -> Result<Vec<SynthTurn>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..spec.turns)
        .map(|i| Ok(generate_turn(spec, &mut rng, format!("syn-{i:06}"))))
        .collect()
}

fn words_of(tag: &str) -> &'static [&'static str] {
    LEXICON
        .iter()
        .find(|(t, _)| *t == tag)
        .map(|(_, w)| *w)
        .unwrap_or(&[])
}

/// The generator's tag for a word, if it is in the lexicon.
pub fn synth_tag_of(word: &str) -> Option<&'static str> {
    LEXICON
        .iter()
        .find(|(_, ws)| ws.contains(&word))
        .map(|(t, _)| *t)
}

#[derive(Clone)]
struct Word {
    surface: String,
    tag: &'static str,
    label: AnnotationLabel,
}

impl Word {
    fn plain(surface: &str, tag: &'static str) -> Self {
        Word {
            surface: surface.to_string(),
            tag,
            label: AnnotationLabel::NONE,
        }
    }

    fn labeled(&self, label: AnnotationLabel) -> Self {
        Word {
            label,
            ..self.clone()
        }
    }
}

struct TurnBuilder {
    words: Vec<Word>,
    ints: BTreeSet<usize>,
    gold: Vec<GoldRepair>,
    kinds: Vec<InjectedKind>,
    next_pair: u32,
}

impl TurnBuilder {
    fn pair(&mut self) -> u32 {
        self.next_pair += 1;
        self.next_pair
    }
}

fn clause(rng: &mut ChaCha8Rng) -> Vec<Word> {
    let template = TEMPLATES.choose(rng).expect("templates");
    let mut out = Vec::new();
    for slot in template.iter() {
        match *slot {
            Lit(w) => out.push(Word::plain(w, synth_tag_of(w).expect("lexicon word"))),
            Tag(t) => out.push(Word::plain(words_of(t).choose(rng).expect("words"), tag_static(t))),
            Maybe(t) => {
                if rng.gen_bool(0.5) {
                    out.push(Word::plain(words_of(t).choose(rng).expect("words"), tag_static(t)));
                }
            }
        }
    }
    out
}

fn tag_static(tag: &str) -> &'static str {
    SYNTH_TAGSET.iter().find(|t| **t == tag).copied().expect("known tag")
}

fn alternative(rng: &mut ChaCha8Rng, word: &Word) -> Option<Word> {
    if !REPLACEABLE.contains(&word.tag) {
        return None;
    }
    let options: Vec<&str> = words_of(word.tag)
        .iter()
        .copied()
        .filter(|w| *w != word.surface)
        .collect();
    options.choose(rng).map(|w| Word::plain(w, word.tag))
}

fn fragment_of(word: &str) -> Word {
    let chars: Vec<char> = word.chars().collect();
    let keep = chars.len().div_ceil(2).clamp(1, chars.len().max(1));
    let mut s: String = chars[..keep].iter().collect();
    s.push('-');
    Word {
        surface: s,
        tag: "FRAG",
        label: AnnotationLabel::simple(LabelKind::Fragment),
    }
}

const MOD_TERMS: &[(&[&str], f64)] = &[
    (&["uh"], 0.6),
    (&["um"], 0.15),
    (&["er"], 0.1),
    (&["i", "mean"], 0.1),
    (&["well"], 0.05),
];

const ABRIDGED_TERMS: &[(&[&str], f64)] = &[(&["um"], 0.6), (&["uh"], 0.33), (&["er"], 0.07)];

fn editing_terms(rng: &mut ChaCha8Rng, table: &[(&[&str], f64)]) -> Vec<Word> {
    let total: f64 = table.iter().map(|(_, w)| w).sum();
    let mut x = rng.gen::<f64>() * total;
    let mut choice = table[0].0;
    for (words, w) in table {
        if x < *w {
            choice = words;
            break;
        }
        x -= w;
    }
    choice
        .iter()
        .map(|w| {
            let tag = if matches!(*w, "um" | "uh" | "er") {
                "FILLED_PAUSE"
            } else {
                synth_tag_of(w).expect("lexicon word")
            };
            Word::plain(w, tag).labeled(AnnotationLabel::simple(LabelKind::EditingTerm))
        })
        .collect()
}

fn pick_kind(rng: &mut ChaCha8Rng, spec: &SynthSpec) -> Option<InjectedKind> {
    let weights = spec.type_weights();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let mut x = rng.gen::<f64>() * total;
    for (kind, w) in InjectedKind::ALL.iter().zip(weights) {
        if x < w {
            return Some(*kind);
        }
        x -= w;
    }
    Some(InjectedKind::Abridged)
}

/// Removed words, resumed words (labels attached), and whether the repair
/// must carry a fragment or editing term to be well formed.
struct Shape {
    at: usize,
    removed: Vec<Word>,
    resumed_len: usize,
    resumed_labels: Vec<AnnotationLabel>,
    needs_signal: bool,
    modification: bool,
}

fn shape(rng: &mut ChaCha8Rng, b: &mut TurnBuilder, kind: InjectedKind, clause: &[Word]) -> Option<Shape> {
    let n = clause.len();
    let positions: Vec<usize> = (0..n).collect();
    match kind {
        InjectedKind::WordRepetition => {
            let at = *positions[..n - 1].choose(rng)?;
            let k = b.pair();
            Some(Shape {
                at,
                removed: vec![clause[at].labeled(AnnotationLabel::pair(LabelKind::Match, k))],
                resumed_len: 1,
                resumed_labels: vec![AnnotationLabel::pair(LabelKind::Match, k)],
                needs_signal: false,
                modification: true,
            })
        }
        InjectedKind::LargerRepetition => {
            let len = rng.gen_range(2..=3);
            if n < len + 1 {
                return None;
            }
            let at = *positions[..n - len].choose(rng)?;
            let mut removed = Vec::new();
            let mut resumed_labels = Vec::new();
            for w in &clause[at..at + len] {
                let k = b.pair();
                removed.push(w.labeled(AnnotationLabel::pair(LabelKind::Match, k)));
                resumed_labels.push(AnnotationLabel::pair(LabelKind::Match, k));
            }
            Some(Shape {
                at,
                removed,
                resumed_len: len,
                resumed_labels,
                needs_signal: false,
                modification: true,
            })
        }
        InjectedKind::WordReplacement => {
            let eligible: Vec<usize> = (0..n).filter(|&i| REPLACEABLE.contains(&clause[i].tag)).collect();
            let at = *eligible.choose(rng)?;
            let alt = alternative(rng, &clause[at])?;
            let k = b.pair();
            Some(Shape {
                at,
                removed: vec![alt.labeled(AnnotationLabel::pair(LabelKind::Replacement, k))],
                resumed_len: 1,
                resumed_labels: vec![AnnotationLabel::pair(LabelKind::Replacement, k)],
                needs_signal: false,
                modification: true,
            })
        }
        InjectedKind::Other => {
            // mr.mr, rm.rm, mmr.mmr or mx.m.
            let variant = rng.gen_range(0..100);
            let (template, signal): (&[char], bool) = match variant {
                0..=39 => (&['m', 'r'], false),
                40..=59 => (&['r', 'm'], false),
                60..=84 => (&['m', 'm', 'r'], false),
                _ => (&['m', 'x'], true),
            };
            let span = template.iter().filter(|c| **c != 'x').count();
            if n < span + 1 {
                return None;
            }
            let starts: Vec<usize> = (0..n - span)
                .filter(|&s| {
                    template
                        .iter()
                        .filter(|c| **c != 'x')
                        .enumerate()
                        .all(|(j, c)| *c != 'r' || REPLACEABLE.contains(&clause[s + j].tag))
                })
                .collect();
            let at = *starts.choose(rng)?;
            let mut removed = Vec::new();
            let mut resumed_labels = Vec::new();
            let mut j = 0;
            for c in template {
                match c {
                    'm' => {
                        let k = b.pair();
                        removed.push(clause[at + j].labeled(AnnotationLabel::pair(LabelKind::Match, k)));
                        resumed_labels.push(AnnotationLabel::pair(LabelKind::Match, k));
                        j += 1;
                    }
                    'r' => {
                        let alt = alternative(rng, &clause[at + j])?;
                        let k = b.pair();
                        removed.push(alt.labeled(AnnotationLabel::pair(LabelKind::Replacement, k)));
                        resumed_labels.push(AnnotationLabel::pair(LabelKind::Replacement, k));
                        j += 1;
                    }
                    _ => {
                        let tag = if rng.gen_bool(0.5) { "ADJ" } else { "ADV" };
                        let w = words_of(tag).choose(rng)?;
                        removed.push(Word::plain(w, tag).labeled(AnnotationLabel::simple(LabelKind::Other)));
                    }
                }
            }
            // Replacement words may coincide with a matched neighbour; skip
            // such shapes rather than emit an ambiguous labeling.
            let surfaces: BTreeSet<&str> = removed.iter().map(|w| w.surface.as_str()).collect();
            if surfaces.len() != removed.len() {
                return None;
            }
            Some(Shape {
                at,
                removed,
                resumed_len: span,
                resumed_labels,
                needs_signal: signal,
                modification: true,
            })
        }
        InjectedKind::Abridged => {
            let at = *positions[1..].choose(rng)?;
            Some(Shape {
                at,
                removed: Vec::new(),
                resumed_len: 0,
                resumed_labels: Vec::new(),
                needs_signal: true,
                modification: false,
            })
        }
    }
}

fn inject(rng: &mut ChaCha8Rng, spec: &SynthSpec, b: &mut TurnBuilder, clause: Vec<Word>) {
    let Some(kind) = pick_kind(rng, spec) else {
        b.words.extend(clause);
        return;
    };
    let saved_pair = b.next_pair;
    let Some(shape) = shape(rng, b, kind, &clause) else {
        b.next_pair = saved_pair;
        b.words.extend(clause);
        return;
    };
    let (mut frag, mut et) = if shape.modification {
        (rng.gen_bool(spec.fragment_rate), rng.gen_bool(spec.editing_term_rate))
    } else {
        let f = rng.gen_bool(spec.abridged_fragment_rate);
        (f, !f || rng.gen_bool(0.15))
    };
    if shape.needs_signal && !frag && !et {
        et = true;
    }
    let resume_word = &clause[shape.at].surface;
    if frag && resume_word.chars().count() < 2 {
        frag = false;
        et |= shape.needs_signal;
    }

    b.words.extend(clause[..shape.at].iter().cloned());
    let start = b.words.len();
    b.words.extend(shape.removed.iter().cloned());
    if frag {
        b.words.push(fragment_of(resume_word));
    }
    let gap = b.words.len();
    if et {
        let table = if shape.modification { MOD_TERMS } else { ABRIDGED_TERMS };
        b.words.extend(editing_terms(rng, table));
    }
    let et_end = b.words.len();
    for (j, w) in clause[shape.at..].iter().enumerate() {
        match shape.resumed_labels.get(j) {
            Some(l) => b.words.push(w.labeled(*l)),
            None => b.words.push(w.clone()),
        }
    }
    b.ints.insert(gap);
    b.gold.push(GoldRepair {
        removed: start..gap,
        editing: gap..et_end,
        resumed: et_end..et_end + shape.resumed_len,
        klass: if shape.modification {
            super::RepairClass::Modification
        } else {
            super::RepairClass::Abridged
        },
    });
    b.kinds.push(kind);
}

fn generate_turn(spec: &SynthSpec, rng: &mut ChaCha8Rng, id: String) -> SynthTurn {
    let mut b = TurnBuilder {
        words: Vec::new(),
        ints: BTreeSet::new(),
        gold: Vec::new(),
        kinds: Vec::new(),
        next_pair: 0,
    };
    let clauses = rng.gen_range(1..=3);
    for _ in 0..clauses {
        let c = clause(rng);
        if spec.repair_rate > 0.0 && rng.gen_bool(spec.repair_rate) {
            inject(rng, spec, &mut b, c);
        } else {
            b.words.extend(c);
        }
    }
    let turn_id: Arc<str> = Arc::from(id.as_str());
    let tokens = b
        .words
        .iter()
        .enumerate()
        .map(|(i, w)| Token::new(&w.surface, i, turn_id.clone()).expect("generated token"))
        .collect();
    let turn = AnnotatedTurn {
        id,
        tokens,
        labels: b.words.iter().map(|w| w.label).collect(),
        tags: b.words.iter().map(|w| Some(w.tag.to_string())).collect(),
        interruption_points: b.ints,
        freshstart_breaks: BTreeSet::new(),
    };
    SynthTurn {
        turn,
        gold: b.gold,
        kinds: b.kinds,
    }
}
