//! Sectioned text format for `TaggerModel`.
//!
//! ```text
//! speech-repair-model 1
//! alpha 0.1
//! open_class N
//!
//! [tagset]
//! N
//! V
//! [lexical]
//! engine 0.25 0.001
//! <unk> 0.01 0.02
//! [initial]
//! 0.6 0.4
//! [tag_prior]
//! 0.5 0.5
//! [trans_fluent]
//! N 0.3 0.7
//! V 0.8 0.2
//! [trans_repair]
//! N 0.5 0.5
//! V 0.5 0.5
//! [repair_prior]
//! N 0.02
//! V 0.01
//! [clue_output]
//! fragment repair 0.8 0.2
//! fragment fluent 0.99 0.01
//! editing repair 0.7 0.2 0.05 0.05
//! editing fluent 0.97 0.01 0.01 0.01
//! matches repair 0.2 0.3 0.2 0.2 0.1
//! matches fluent 0.8 0.1 0.04 0.05 0.01
//! ```
//!
//! Lexical rows list P(w|C) for each tag in tagset order, so each column is
//! a distribution. Every other row is a distribution on its own. Floats are
//! written in shortest round-trip decimal form, so a write/read cycle is
//! exact.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{ClueOutput, TaggerModel, UNKNOWN_WORD};
use crate::config::EditingClass;
use crate::error::{Error, Result};
use crate::evidence::MatchType;

const MAGIC: &str = "speech-repair-model";
const VERSION: u32 = 1;
const SECTIONS: [&str; 8] = [
    "tagset",
    "lexical",
    "initial",
    "tag_prior",
    "trans_fluent",
    "trans_repair",
    "repair_prior",
    "clue_output",
];
const TOLERANCE: f64 = 1e-9;

fn join(v: &[f64]) -> String {
    v.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ")
}

pub(super) fn write(m: &TaggerModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "alpha {}", m.alpha);
    let _ = writeln!(out, "open_class {}", m.tagset[m.open_class]);
    out.push_str("\n[tagset]\n");
    for t in &m.tagset {
        let _ = writeln!(out, "{t}");
    }
    out.push_str("\n[lexical]\n");
    for (w, word) in m.vocab.iter().map(String::as_str).chain([UNKNOWN_WORD]).enumerate() {
        let col: Vec<f64> = m.lexical.iter().map(|row| row[w]).collect();
        let _ = writeln!(out, "{word} {}", join(&col));
    }
    let _ = writeln!(out, "\n[initial]\n{}", join(&m.initial));
    let _ = writeln!(out, "\n[tag_prior]\n{}", join(&m.tag_prior));
    for (name, table) in [("trans_fluent", &m.trans_fluent), ("trans_repair", &m.trans_repair)] {
        let _ = writeln!(out, "\n[{name}]");
        for (t, row) in m.tagset.iter().zip(table) {
            let _ = writeln!(out, "{t} {}", join(row));
        }
    }
    out.push_str("\n[repair_prior]\n");
    for (t, p) in m.tagset.iter().zip(&m.repair_prior) {
        let _ = writeln!(out, "{t} {p}");
    }
    out.push_str("\n[clue_output]\n");
    let c = &m.clue_output;
    let _ = writeln!(out, "# fragment: absent present");
    let _ = writeln!(
        out,
        "# editing: {}",
        EditingClass::ALL.map(EditingClass::as_str).join(" ")
    );
    let _ = writeln!(out, "# matches: {}", MatchType::ALL.map(MatchType::as_str).join(" "));
    for (s, state) in ["repair", "fluent"].iter().enumerate() {
        let _ = writeln!(out, "fragment {state} {}", join(&c.fragment[s]));
        let _ = writeln!(out, "editing {state} {}", join(&c.editing[s]));
        let _ = writeln!(out, "matches {state} {}", join(&c.matches[s]));
    }
    out
}

struct Line<'a> {
    no: usize,
    fields: Vec<&'a str>,
}

fn prob(line: usize, s: &str) -> Result<f64> {
    let p: f64 = s
        .parse()
        .map_err(|_| Error::model(line, format!("invalid number {s:?}")))?;
    if !(p.is_finite() && p > 0.0 && p <= 1.0) {
        return Err(Error::model(line, format!("probability {s} outside (0, 1]")));
    }
    Ok(p)
}

fn probs(line: &Line, skip: usize, expect: usize) -> Result<Vec<f64>> {
    let vals = &line.fields[skip.min(line.fields.len())..];
    if vals.len() != expect {
        return Err(Error::model(
            line.no,
            format!("expected {expect} probabilities, found {}", vals.len()),
        ));
    }
    vals.iter().map(|s| prob(line.no, s)).collect()
}

fn check_sum(line: usize, what: &str, v: &[f64]) -> Result<()> {
    let s: f64 = v.iter().sum();
    if (s - 1.0).abs() > TOLERANCE {
        return Err(Error::model(line, format!("{what} sums to {s}, not 1")));
    }
    Ok(())
}

fn header<'a>(lines: &mut std::slice::Iter<'a, Line<'a>>, key: &str) -> Result<&'a Line<'a>> {
    let line = lines
        .next()
        .ok_or_else(|| Error::model(0, format!("missing {key} header")))?;
    if line.fields.len() != 2 || line.fields[0] != key {
        return Err(Error::model(line.no, format!("expected `{key} <value>`")));
    }
    Ok(line)
}

fn tagged_rows(
    section: &[&Line],
    tagset: &[String],
    width: usize,
    header_line: usize,
    name: &str,
) -> Result<Vec<Vec<f64>>> {
    if section.len() != tagset.len() {
        return Err(Error::model(
            header_line,
            format!("[{name}] has {} rows for {} tags", section.len(), tagset.len()),
        ));
    }
    section
        .iter()
        .zip(tagset)
        .map(|(line, tag)| {
            if line.fields[0] != tag {
                return Err(Error::model(line.no, format!("expected row for tag {tag}")));
            }
            probs(line, 1, width)
        })
        .collect()
}

fn single_row(section: &[&Line], width: usize, header_line: usize, name: &str) -> Result<Vec<f64>> {
    match section {
        [line] => {
            let v = probs(line, 0, width)?;
            check_sum(line.no, name, &v)?;
            Ok(v)
        }
        _ => Err(Error::model(header_line, format!("[{name}] must have exactly one row"))),
    }
}

pub(super) fn read(text: &str) -> Result<TaggerModel> {
    let lines: Vec<Line> = text
        .lines()
        .enumerate()
        .map(|(i, l)| Line {
            no: i + 1,
            fields: l.split_whitespace().collect(),
        })
        .filter(|l| !l.fields.is_empty() && !l.fields[0].starts_with('#'))
        .collect();
    let mut it = lines.iter();
    let magic = it
        .next()
        .ok_or_else(|| Error::model(0, "empty model file"))?;
    if magic.fields.len() != 2 || magic.fields[0] != MAGIC {
        return Err(Error::model(magic.no, "not a speech-repair model file"));
    }
    if magic.fields[1] != VERSION.to_string() {
        return Err(Error::model(
            magic.no,
            format!("unsupported model version {}", magic.fields[1]),
        ));
    }
    let alpha_line = header(&mut it, "alpha")?;
    let alpha: f64 = alpha_line.fields[1]
        .parse()
        .ok()
        .filter(|a: &f64| a.is_finite() && *a > 0.0)
        .ok_or_else(|| Error::model(alpha_line.no, "alpha must be a positive number"))?;
    let open_line = header(&mut it, "open_class")?;

    let mut sections: Vec<(usize, Vec<&Line>)> = Vec::new();
    for line in it {
        let first = line.fields[0];
        if first.starts_with('[') {
            let expected = SECTIONS.get(sections.len());
            let name = first.trim_start_matches('[').trim_end_matches(']');
            if line.fields.len() != 1 || !first.ends_with(']') || expected != Some(&name) {
                return Err(Error::model(
                    line.no,
                    match expected {
                        Some(e) => format!("expected section [{e}], found {first}"),
                        None => format!("unexpected section {first}"),
                    },
                ));
            }
            sections.push((line.no, Vec::new()));
        } else {
            match sections.last_mut() {
                Some((_, body)) => body.push(line),
                None => return Err(Error::model(line.no, "data before the first section")),
            }
        }
    }
    if sections.len() != SECTIONS.len() {
        let last = lines.last().map_or(0, |l| l.no);
        return Err(Error::model(
            last,
            format!("missing section [{}]", SECTIONS[sections.len()]),
        ));
    }

    let (tag_line, tag_rows) = &sections[0];
    let mut tagset = Vec::new();
    for line in tag_rows {
        if line.fields.len() != 1 {
            return Err(Error::model(line.no, "expected one tag per line"));
        }
        if tagset.iter().any(|t| t == line.fields[0]) {
            return Err(Error::model(line.no, format!("duplicate tag {}", line.fields[0])));
        }
        tagset.push(line.fields[0].to_string());
    }
    if tagset.is_empty() {
        return Err(Error::model(*tag_line, "empty tagset"));
    }
    let n = tagset.len();
    let open_class = tagset
        .iter()
        .position(|t| t == open_line.fields[1])
        .ok_or_else(|| Error::model(open_line.no, "open class is not in the tagset"))?;

    let (lex_line, lex_rows) = &sections[1];
    let mut vocab = Vec::new();
    let mut lexical = vec![Vec::with_capacity(lex_rows.len()); n];
    let mut seen = HashMap::new();
    for (i, line) in lex_rows.iter().enumerate() {
        let word = line.fields[0];
        let last = i + 1 == lex_rows.len();
        if last != (word == UNKNOWN_WORD) {
            return Err(Error::model(
                line.no,
                format!("{UNKNOWN_WORD} must be the last lexical row"),
            ));
        }
        if seen.insert(word, line.no).is_some() {
            return Err(Error::model(line.no, format!("duplicate word {word}")));
        }
        for (t, p) in probs(line, 1, n)?.into_iter().enumerate() {
            lexical[t].push(p);
        }
        if !last {
            vocab.push(word.to_string());
        }
    }
    if lex_rows.is_empty() {
        return Err(Error::model(*lex_line, "empty lexical table"));
    }
    for (t, col) in lexical.iter().enumerate() {
        check_sum(*lex_line, &format!("lexical column {}", tagset[t]), col)?;
    }

    let initial = single_row(&sections[2].1, n, sections[2].0, "initial")?;
    let tag_prior = single_row(&sections[3].1, n, sections[3].0, "tag_prior")?;
    let mut tables = Vec::new();
    for (idx, name) in [(4, "trans_fluent"), (5, "trans_repair")] {
        let rows = tagged_rows(&sections[idx].1, &tagset, n, sections[idx].0, name)?;
        for (line, row) in sections[idx].1.iter().zip(&rows) {
            check_sum(line.no, name, row)?;
        }
        tables.push(rows);
    }
    let trans_repair = tables.pop().expect("two tables");
    let trans_fluent = tables.pop().expect("two tables");
    let repair_prior: Vec<f64> = tagged_rows(&sections[6].1, &tagset, 1, sections[6].0, "repair_prior")?
        .into_iter()
        .map(|r| r[0])
        .collect();
    for (line, p) in sections[6].1.iter().zip(&repair_prior) {
        if *p >= 1.0 {
            return Err(Error::model(line.no, "repair prior must be below 1"));
        }
    }

    let mut fragment = [[0.0; 2]; 2];
    let mut editing = [[0.0; 4]; 2];
    let mut matches = [[0.0; 5]; 2];
    let mut filled = [[false; 2]; 3];
    let (clue_line, clue_rows) = &sections[7];
    for line in clue_rows {
        let state = match line.fields.get(1) {
            Some(&"repair") => 0,
            Some(&"fluent") => 1,
            _ => return Err(Error::model(line.no, "expected `repair` or `fluent`")),
        };
        let (var, dest): (usize, &mut [f64]) = match line.fields[0] {
            "fragment" => (0, &mut fragment[state]),
            "editing" => (1, &mut editing[state]),
            "matches" => (2, &mut matches[state]),
            other => return Err(Error::model(line.no, format!("unknown clue variable {other}"))),
        };
        if filled[var][state] {
            return Err(Error::model(line.no, "duplicate clue row"));
        }
        let v = probs(line, 2, dest.len())?;
        check_sum(line.no, line.fields[0], &v)?;
        dest.copy_from_slice(&v);
        filled[var][state] = true;
    }
    if filled.iter().flatten().any(|f| !f) {
        return Err(Error::model(*clue_line, "clue_output needs six rows"));
    }

    Ok(TaggerModel {
        alpha,
        tagset,
        open_class,
        vocab,
        lexical,
        initial,
        tag_prior,
        trans_fluent,
        trans_repair,
        repair_prior,
        clue_output: ClueOutput {
            fragment,
            editing,
            matches,
        },
        word_index: HashMap::new(),
        tag_index: HashMap::new(),
    })
}
