//! Detection and correction recall and precision.
//!
//! A prediction detects a gold repair when both put the interruption point
//! in the same gap. It also corrects it when it deletes exactly the words
//! the gold repair deletes, leaving out words already deleted by gold
//! repairs with earlier interruption points.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use crate::corpus::{AnnotatedTurn, GoldRepair, RepairClass};
use crate::error::{Error, Result};
use crate::pattern::JudgedRepair;

/// A predicted repair in turn positions, as read from a predictions file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prediction {
    pub gap: usize,
    pub klass: RepairClass,
    pub removed: Vec<usize>,
    pub editing: Vec<usize>,
    pub pattern: String,
}

impl Prediction {
    pub fn deleted(&self) -> BTreeSet<usize> {
        self.removed.iter().chain(&self.editing).copied().collect()
    }
}

impl From<&JudgedRepair> for Prediction {
    fn from(j: &JudgedRepair) -> Self {
        Prediction {
            gap: j.gap,
            klass: j.klass,
            removed: j.removed.clone(),
            editing: j.editing.clone(),
            pattern: j.pattern.clone(),
        }
    }
}

/// A count ratio kept exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Ratio {
    pub num: usize,
    pub den: usize,
}

impl Ratio {
    /// The ratio as a float; an empty denominator reads as zero.
    pub fn value(&self) -> f64 {
        if self.den == 0 {
            0.0
        } else {
            self.num as f64 / self.den as f64
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvalReport {
    pub detection_recall: Ratio,
    pub detection_precision: Ratio,
    pub correction_recall: Ratio,
    pub correction_precision: Ratio,
}

impl EvalReport {
    pub fn gold(&self) -> usize {
        self.detection_recall.den
    }

    pub fn predicted(&self) -> usize {
        self.detection_precision.den
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<12} {:>16} {:>16}", "", "recall", "precision");
        for (name, r, p) in [
            ("detection", self.detection_recall, self.detection_precision),
            ("correction", self.correction_recall, self.correction_precision),
        ] {
            let cell = |x: Ratio| format!("{:.3} ({x})", x.value());
            let _ = writeln!(out, "{name:<12} {:>16} {:>16}", cell(r), cell(p));
        }
        out
    }

    pub fn key_values(&self) -> String {
        let mut out = format!("gold={}\npredicted={}\n", self.gold(), self.predicted());
        for (key, r) in [
            ("detection_recall", self.detection_recall),
            ("detection_precision", self.detection_precision),
            ("correction_recall", self.correction_recall),
            ("correction_precision", self.correction_precision),
        ] {
            let _ = writeln!(out, "{key}={} {:.6}", r, r.value());
        }
        out
    }
}

/// Gold repairs of one turn, each with the set of positions its correction
/// deletes.
fn gold_targets(gold: &[GoldRepair]) -> Vec<(usize, BTreeSet<usize>)> {
    let own = |g: &GoldRepair| -> BTreeSet<usize> { g.removed.clone().chain(g.editing.clone()).collect() };
    gold.iter()
        .map(|g| {
            let earlier: BTreeSet<usize> = gold.iter().filter(|o| o.gap() < g.gap()).flat_map(own).collect();
            (g.gap(), own(g).difference(&earlier).copied().collect())
        })
        .collect()
}

/// Counts (detected, corrected) for one turn.
pub fn score_turn(gold: &[GoldRepair], predicted: &[Prediction]) -> (usize, usize) {
    let targets = gold_targets(gold);
    let mut order: Vec<usize> = (0..targets.len()).collect();
    order.sort_by_key(|&i| targets[i].0);
    let mut preds: Vec<&Prediction> = predicted.iter().collect();
    preds.sort_by_key(|p| p.gap);
    let mut used = vec![false; targets.len()];
    let (mut detected, mut corrected) = (0, 0);
    for p in preds {
        let Some(&i) = order.iter().find(|&&i| !used[i] && targets[i].0 == p.gap) else {
            continue;
        };
        used[i] = true;
        detected += 1;
        if p.deleted() == targets[i].1 {
            corrected += 1;
        }
    }
    (detected, corrected)
}

/// Scores turn-aligned gold and predicted repairs. Turn ids must agree.
pub fn score(gold: &[(&str, Vec<GoldRepair>)], predicted: &[(&str, Vec<Prediction>)]) -> Result<EvalReport> {
    if gold.len() != predicted.len() {
        return Err(Error::TurnMismatch {
            gold: format!("{} turns", gold.len()),
            predicted: format!("{} turns", predicted.len()),
        });
    }
    let mut r = EvalReport::default();
    for ((gid, g), (pid, p)) in gold.iter().zip(predicted) {
        if gid != pid {
            return Err(Error::TurnMismatch {
                gold: gid.to_string(),
                predicted: pid.to_string(),
            });
        }
        let (d, c) = score_turn(g, p);
        r.detection_recall.num += d;
        r.detection_recall.den += g.len();
        r.detection_precision.num += d;
        r.detection_precision.den += p.len();
        r.correction_recall.num += c;
        r.correction_recall.den += g.len();
        r.correction_precision.num += c;
        r.correction_precision.den += p.len();
    }
    Ok(r)
}

/// Aligns predictions by turn id with a gold corpus and scores them. Turns
/// absent from `predicted` have no predictions; ids not in the corpus are
/// an error.
pub fn score_corpus(turns: &[AnnotatedTurn], predicted: &BTreeMap<String, Vec<Prediction>>) -> Result<EvalReport> {
    let ids: BTreeSet<&str> = turns.iter().map(|t| t.id.as_str()).collect();
    if let Some(extra) = predicted.keys().find(|k| !ids.contains(k.as_str())) {
        return Err(Error::TurnMismatch {
            gold: "no such turn".into(),
            predicted: extra.clone(),
        });
    }
    let mut gold = Vec::with_capacity(turns.len());
    let mut pred = Vec::with_capacity(turns.len());
    for t in turns {
        let g = t.gold_repairs().map_err(|e| Error::Config(format!("turn {}: {e}", t.id)))?;
        gold.push((t.id.as_str(), g));
        pred.push((t.id.as_str(), predicted.get(&t.id).cloned().unwrap_or_default()));
    }
    score(&gold, &pred)
}

fn list(v: &[usize]) -> String {
    if v.is_empty() {
        "-".into()
    } else {
        v.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
    }
}

/// One predictions-file line: `turn gap class removed editing pattern`,
/// with position lists comma-separated and `-` for empty.
pub fn prediction_line(turn_id: &str, p: &Prediction) -> String {
    format!(
        "{turn_id} {} {} {} {} {}",
        p.gap,
        p.klass.as_str(),
        list(&p.removed),
        list(&p.editing),
        p.pattern
    )
}

fn parse_list(line: usize, s: &str) -> Result<Vec<usize>> {
    if s == "-" {
        return Ok(Vec::new());
    }
    let v: Vec<usize> = s
        .split(',')
        .map(|x| x.parse().map_err(|_| Error::parse(line, format!("bad position {x:?}"))))
        .collect::<Result<_>>()?;
    if v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::parse(line, "positions must be strictly increasing"));
    }
    Ok(v)
}

/// Parses a predictions file into per-turn lists. Blank and `#` lines are
/// skipped.
pub fn parse_predictions(text: &str) -> Result<BTreeMap<String, Vec<Prediction>>> {
    let mut out: BTreeMap<String, Vec<Prediction>> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = s.split_whitespace().collect();
        if f.len() != 6 {
            return Err(Error::parse(line, format!("expected 6 fields, found {}", f.len())));
        }
        let gap = f[1]
            .parse()
            .map_err(|_| Error::parse(line, format!("bad gap {:?}", f[1])))?;
        let klass = match f[2] {
            "modification" => RepairClass::Modification,
            "abridged" => RepairClass::Abridged,
            other => return Err(Error::parse(line, format!("unknown class {other:?}"))),
        };
        if !f[5].chars().all(|c| "mrx-.e".contains(c)) || f[5].matches('.').count() != 1 {
            return Err(Error::parse(line, format!("bad pattern {:?}", f[5])));
        }
        out.entry(f[0].to_string()).or_default().push(Prediction {
            gap,
            klass,
            removed: parse_list(line, f[3])?,
            editing: parse_list(line, f[4])?,
            pattern: f[5].to_string(),
        });
    }
    Ok(out)
}
