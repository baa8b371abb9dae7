//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use speech_repair::corpus::{synthesize_corpus, SynthSpec};
use speech_repair::eval::{score, Prediction, Ratio};
use speech_repair::filter::{score_gap, GapContext};
use speech_repair::pattern::{
    CorrKind, Decision, Lexicon, LiveToken, LocalJudgement, Origin, PatternBuilder, RepairPattern, TraceEvent,
};
use speech_repair::pipeline::{process_segment, process_turn, model_judge};
use speech_repair::tagger::default_tagset;
use speech_repair::{AnnotatedTurn, Config, EditingClass, GoldRepair, MatchType, RepairEvidence, RepairState, TaggerModel, Token};

type Outcome = Result<String, String>;

fn synth(turns: usize, seed: u64) -> Vec<AnnotatedTurn> {
    let spec = SynthSpec {
        turns,
        ..SynthSpec::default()
    };
    synthesize_corpus(&spec, seed).unwrap().into_iter().map(|s| s.turn).collect()
}

fn trained_model() -> TaggerModel {
    TaggerModel::train(&synth(1000, 1), &default_tagset(), &Config::default()).unwrap()
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run_text(model: &TaggerModel, id: &str, text: &str) -> speech_repair::TurnResult {
    process_turn(&AnnotatedTurn::from_text(id, text).unwrap(), model, &Config::default())
}

fn criterion_1(model: &TaggerModel) -> Outcome {
    let turn = AnnotatedTurn::from_text("ex", "go to oran- um go to Corning").unwrap();
    let config = Config::default();
    run_text(model, "warm", "the the engine uh is at avon");
    let start = Instant::now();
    let r = process_turn(&turn, model, &config);
    let elapsed = start.elapsed();
    check(r.repairs.len() == 1, || format!("{} repairs", r.repairs.len()))?;
    check(r.repairs[0].pattern == "mm-.emm", || format!("pattern {}", r.repairs[0].pattern))?;
    check(r.corrected_text() == "go to corning", || format!("text {:?}", r.corrected_text()))?;
    check(elapsed < Duration::from_millis(1), || format!("took {elapsed:?}"))?;
    Ok(format!("mm-.emm -> \"go to corning\" in {elapsed:?}"))
}

fn criterion_2(model: &TaggerModel) -> Outcome {
    let r = run_text(model, "utt76", "I think we need to uh I need");
    let events: Vec<String> = r
        .trace
        .iter()
        .filter(|e| matches!(e, TraceEvent::Accept { .. } | TraceEvent::Reject { .. }))
        .map(|e| e.to_string().trim().to_string())
        .collect();
    let involved = |e: &String| e.starts_with("accept") || e.contains(" 0:i 6:i ");
    let got: Vec<&String> = events.iter().filter(|e| involved(e)).collect();
    let want = [
        "reject m 0:i 6:i rule 6",
        "accept m 3:need 7:need clue",
        "reject m 0:i 6:i rule 9",
        "accept r 2:we 6:i search",
    ];
    check(got == want, || format!("events {events:?}"))?;
    check(r.repairs.len() == 1 && r.repairs[0].pattern == "rmx.erm", || {
        format!("repairs {:?}", r.repairs)
    })?;
    Ok(format!("rule 6, need-need, rule 9, we->i; labels r m et r m; full: {}", events.join(" | ")))
}

fn criterion_3(model: &TaggerModel) -> Outcome {
    let text = "and pick up um the en- I guess the entire um p- pick up the load of oranges at Corning";
    let words: Vec<&str> = text.split(' ').collect();
    let r = run_text(model, "utt26", text);
    let mut intermediate = Vec::new();
    for e in &r.trace {
        if let TraceEvent::Deleted { text: live, consumed, .. } = e {
            let mut s = live.clone();
            for w in &words[(*consumed).min(words.len())..] {
                s.push(' ');
                s.push_str(&w.to_lowercase());
            }
            intermediate.push(s.trim().to_string());
        }
    }
    let patterns: Vec<&str> = r.repairs.iter().map(|j| j.pattern.as_str()).collect();
    check(patterns == [".e", "m-.eem", ".e", "mmmx-.mmm"], || format!("patterns {patterns:?}"))?;
    let want = [
        "and pick up the entire um p- pick up the load of oranges at corning",
        "and pick up the entire p- pick up the load of oranges at corning",
        "and pick up the load of oranges at corning",
    ];
    check(intermediate.len() == 4 && intermediate[1..] == want, || format!("texts {intermediate:?}"))?;
    check(r.corrected_text() == want[2], || r.corrected_text())?;
    Ok(format!("four repairs {patterns:?}; three intermediate texts match"))
}

fn criterion_4(model: &TaggerModel) -> Outcome {
    let r = run_text(model, "utt46", "you have w- one you have two boxcar");
    check(r.repairs.len() == 1, || format!("{} repairs", r.repairs.len()))?;
    check(r.repairs[0].pattern == "mm-.xmm", || r.repairs[0].pattern.clone())?;
    check(r.corrected_text() == "one you have two boxcar", || r.corrected_text())?;
    Ok("greedy you/have matches absorb the first repair: \"one you have two boxcar\"".into())
}

// ---- oracle equivalence ----

struct WindowLexicon;

const X: usize = 0;
const Y: usize = 1;
const Z: usize = 2;
const FRAG: usize = 3;
const PAUSE: usize = 4;

impl Lexicon for WindowLexicon {
    fn likely(&self, word: &str) -> usize {
        match word {
            w if w.ends_with('-') => FRAG,
            "uh" | "um" => PAUSE,
            "a" | "b" | "c" | "d" => X,
            "e" | "f" => Y,
            _ => Z,
        }
    }
    fn next_tag(&self, _prev: Option<usize>, word: &str, _is_fragment: bool) -> usize {
        self.likely(word)
    }
    fn replaceable(&self, category: usize) -> bool {
        category == X || category == Y
    }
    fn category_name(&self, category: usize) -> &str {
        ["X", "Y", "Z", "FRAG", "PAUSE"][category]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct OCorr {
    replacement: bool,
    l: usize,
    r: usize,
    clue: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
struct OPattern {
    corrs: Vec<OCorr>,
    editing: Option<(usize, usize)>,
    fragment: Option<usize>,
    gap: Option<usize>,
}

fn pause(t: &LiveToken) -> bool {
    t.surface == "uh" || t.surface == "um"
}

fn filler(toks: &[LiveToken], p: &OPattern, i: usize) -> bool {
    toks[i].is_fragment || pause(&toks[i]) || p.editing.is_some_and(|(a, b)| a <= i && i < b)
}

fn count_between(toks: &[LiveToken], p: &OPattern, a: usize, b: usize) -> usize {
    (a + 1..b).filter(|&i| !filler(toks, p, i)).count()
}

/// Rules 1 to 10 on a whole pattern. Rule 6 applies to the first
/// correspondence added when it came from search. `known_gap` demands an
/// interruption point.
fn static_rules(toks: &[LiveToken], p: &OPattern, known_gap: bool) -> Result<(), u8> {
    let gap = p.gap.or_else(|| {
        let ml = p.corrs.iter().map(|c| c.l).max()?;
        let mr = p.corrs.iter().map(|c| c.r).min()?;
        (ml < mr && (ml + 1..mr).all(|i| toks[i].is_fragment || pause(&toks[i]))).then_some(ml + 1)
    });
    if let Some((a, b)) = p.editing {
        if a >= b || b > toks.len() || !(a..b).all(|i| pause(&toks[i])) {
            return Err(1);
        }
        if gap != Some(a) {
            return Err(2);
        }
    }
    if let Some(f) = p.fragment {
        if gap != Some(f + 1) || !toks[f].is_fragment {
            return Err(3);
        }
    }
    if known_gap && gap.is_none() {
        return Err(4);
    }
    let mut seen = BTreeSet::new();
    for c in &p.corrs {
        let straddle = match gap {
            Some(g) => c.l < g && g <= c.r,
            None => {
                p.corrs.iter().map(|o| o.l).max().unwrap() < p.corrs.iter().map(|o| o.r).min().unwrap()
            }
        };
        let (a, b) = (&toks[c.l], &toks[c.r]);
        let kind_ok = if c.replacement {
            a.surface != b.surface && a.category == b.category && a.category <= Y
        } else {
            a.surface == b.surface
        };
        if !straddle || c.r >= toks.len() || filler(toks, p, c.l) || filler(toks, p, c.r) || !kind_ok {
            return Err(4);
        }
        if !seen.insert(c.l) || !seen.insert(c.r) {
            return Err(4);
        }
    }
    for (i, a) in p.corrs.iter().enumerate() {
        for b in &p.corrs[i + 1..] {
            if (a.l < b.l) != (a.r < b.r) {
                return Err(5);
            }
        }
    }
    if let Some(first) = p.corrs.first() {
        if !first.clue && count_between(toks, p, first.l, first.r) > 3 {
            return Err(6);
        }
    }
    let mut sorted = p.corrs.clone();
    sorted.sort_by_key(|c| c.l);
    let d: Vec<(usize, usize)> = sorted.windows(2).map(|w| (w[1].l - w[0].l - 1, w[1].r - w[0].r - 1)).collect();
    if d.iter().any(|&(x, _)| x > 4) {
        return Err(7);
    }
    if d.iter().any(|&(_, y)| y > 4) {
        return Err(8);
    }
    if d.iter().any(|&(x, y)| x > y + 1) {
        return Err(9);
    }
    for (i, c) in sorted.iter().enumerate() {
        if !c.replacement || c.clue || (c.l + 1..c.r).all(|k| filler(toks, p, k)) {
            continue;
        }
        let tight = (i > 0 && d[i - 1] == (0, 0)) || (i < d.len() && d[i] == (0, 0));
        if !tight {
            return Err(10);
        }
    }
    Ok(())
}

fn addable(toks: &[LiveToken], p: &OPattern, c: OCorr) -> bool {
    let mut q = p.clone();
    q.corrs.push(c);
    static_rules(toks, &q, false).is_ok()
}

fn used(p: &OPattern, i: usize) -> bool {
    p.corrs.iter().any(|c| c.l == i || c.r == i)
}

/// Exhaustive recency-preferred search: every pair of words is tried, and
/// the addable pair with the latest right word (then latest left word)
/// joins, until none does.
fn oracle_search(toks: &[LiveToken], p: &mut OPattern, k: usize) {
    loop {
        let mut best = None;
        'outer: for r in (0..=k).rev() {
            for l in (0..r).rev() {
                if used(p, l) || used(p, r) || filler(toks, p, l) || filler(toks, p, r) {
                    continue;
                }
                let (a, b) = (&toks[l], &toks[r]);
                let replacement = if a.surface == b.surface {
                    false
                } else if a.category == b.category && a.category <= Y {
                    true
                } else {
                    continue;
                };
                let c = OCorr {
                    replacement,
                    l,
                    r,
                    clue: false,
                };
                if addable(toks, p, c) {
                    best = Some(c);
                    break 'outer;
                }
            }
        }
        match best {
            Some(c) => p.corrs.push(c),
            None => return,
        }
    }
}

/// Match clues at word `k`, strongest first, as lists of pairs.
fn oracle_clues(toks: &[LiveToken], p: &OPattern, k: usize) -> Vec<Vec<OCorr>> {
    let m = |l, r| OCorr {
        replacement: false,
        l,
        r,
        clue: true,
    };
    let mut out = Vec::new();
    if k >= 3 && !filler(toks, p, k - 1) {
        let hit = (0..k - 2).rev().find(|&j| {
            !filler(toks, p, j)
                && !filler(toks, p, j + 1)
                && toks[j].surface == toks[k - 1].surface
                && toks[j + 1].surface == toks[k].surface
                && count_between(toks, p, j + 1, k - 1) <= 6
        });
        if let Some(j) = hit {
            out.push(vec![m(j, k - 1), m(j + 1, k)]);
        }
    }
    if let Some(j) = (0..k)
        .rev()
        .find(|&j| !filler(toks, p, j) && toks[j].surface == toks[k].surface && count_between(toks, p, j, k) <= 3)
    {
        out.push(vec![m(j, k)]);
    }
    if let Some(j) = (0..k).rev().find(|&j| !filler(toks, p, j)) {
        let (a, b) = (&toks[j], &toks[k]);
        if a.category == b.category && a.surface != b.surface && a.category <= Y {
            out.push(vec![OCorr {
                replacement: true,
                ..m(j, k)
            }]);
        }
    }
    out
}

fn replay(toks: &[LiveToken], created: usize, through: usize) -> Result<OPattern, String> {
    let mut p = OPattern::default();
    if toks[created].is_fragment {
        p.fragment = Some(created);
        p.gap = Some(created + 1);
    } else {
        p.editing = Some((created, created + 1));
        p.gap = Some(created);
    }
    oracle_search(toks, &mut p, created);
    for k in created + 1..=through {
        if toks[k].is_fragment {
            return Err(format!("fragment at {k} inside a pattern"));
        }
        if pause(&toks[k]) {
            let fits = match p.editing {
                Some((_, b)) => b == k,
                None => p.gap == Some(k) && !used(&p, k),
            };
            if !fits {
                return Err(format!("editing term at {k} does not fit"));
            }
            let a = p.editing.map_or(k, |(a, _)| a);
            p.editing = Some((a, k + 1));
        } else {
            let clues = oracle_clues(toks, &p, k);
            let mut applied = clues.is_empty();
            for pairs in &clues {
                let mut q = p.clone();
                let ok = pairs.iter().all(|c| {
                    if q.corrs.iter().any(|o| o.l == c.l && o.r == c.r) {
                        return true;
                    }
                    let fine = addable(toks, &q, *c);
                    q.corrs.push(*c);
                    fine
                });
                if ok {
                    p = q;
                    applied = true;
                    break;
                }
            }
            if !applied {
                return Err(format!("no consistent clue at {k}"));
            }
        }
        oracle_search(toks, &mut p, k);
    }
    Ok(p)
}

fn as_oracle(p: &RepairPattern) -> OPattern {
    OPattern {
        corrs: p
            .corrs
            .iter()
            .map(|c| OCorr {
                replacement: c.kind == CorrKind::Replacement,
                l: c.left,
                r: c.right,
                clue: c.origin == Origin::Clue,
            })
            .collect(),
        editing: p.editing.as_ref().map(|r| (r.start, r.end)),
        fragment: p.fragment,
        gap: p.fixed_gap,
    }
}

fn random_window(rng: &mut ChaCha8Rng, id: usize) -> Vec<Token> {
    const WORDS: &[(&str, u32)] = &[
        ("a", 10),
        ("b", 10),
        ("c", 8),
        ("d", 6),
        ("e", 8),
        ("f", 6),
        ("g", 6),
        ("uh", 8),
        ("um", 5),
        ("a-", 5),
        ("e-", 4),
    ];
    let total: u32 = WORDS.iter().map(|w| w.1).sum();
    let len = rng.gen_range(2..=10);
    let turn: std::sync::Arc<str> = format!("w{id}").into();
    (0..len)
        .map(|i| {
            let mut x = rng.gen_range(0..total);
            let w = WORDS
                .iter()
                .find(|(_, weight)| {
                    if x < *weight {
                        true
                    } else {
                        x -= weight;
                        false
                    }
                })
                .unwrap()
                .0;
            Token::new(w, i, turn.clone()).unwrap()
        })
        .collect()
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let config = Config::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut judged, mut replayed) = (0, 0);
    for w in 0..10_000 {
        let tokens = random_window(&mut rng, w);
        let mut b = PatternBuilder::new(&WindowLexicon, &config);
        let mut judge = |_: &RepairPattern, _: &[LiveToken]| Decision::reject("oracle run");
        for t in &tokens {
            b.push(t, &mut judge);
        }
        b.finish(&mut judge);
        for rec in b.records() {
            if rec.judgement != LocalJudgement::Judgeable {
                continue;
            }
            judged += 1;
            let got = as_oracle(&rec.pattern);
            let words: Vec<&str> = rec.tokens.iter().map(|t| t.surface.as_str()).collect();
            static_rules(&rec.tokens, &got, true)
                .map_err(|rule| format!("window {words:?}: rule {rule} broken by {got:?}"))?;
            let seed = &rec.tokens[rec.created_at];
            if !(seed.is_fragment || pause(seed)) {
                continue;
            }
            replayed += 1;
            let want = replay(&rec.tokens, rec.created_at, rec.through).map_err(|e| format!("window {words:?}: {e}"))?;
            check(want == got, || format!("window {words:?}: oracle {want:?}, builder {got:?}"))?;
        }
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "10000 windows, {judged} judgeable patterns satisfy all rules, {replayed} match the oracle, {elapsed:.2?}"
    ))
}

// ---- Viterbi against brute force ----

fn random_stochastic(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s).collect()
}

fn row(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn random_model(rng: &mut ChaCha8Rng) -> (TaggerModel, Vec<String>) {
    let tags = rng.gen_range(1..=4);
    let vocab: Vec<String> = (0..rng.gen_range(1..=4)).map(|i| format!("w{i}")).collect();
    let names: Vec<String> = (0..tags).map(|t| format!("T{t}")).collect();
    let mut text = format!("speech-repair-model 1\nalpha 0.1\nopen_class T0\n\n[tagset]\n{}\n\n[lexical]\n", names.join("\n"));
    let columns: Vec<Vec<f64>> = (0..tags).map(|_| random_stochastic(rng, vocab.len() + 1)).collect();
    for (w, word) in vocab.iter().map(String::as_str).chain(["<unk>"]).enumerate() {
        let col: Vec<f64> = columns.iter().map(|c| c[w]).collect();
        text += &format!("{word} {}\n", row(&col));
    }
    text += &format!("\n[initial]\n{}\n", row(&random_stochastic(rng, tags)));
    text += &format!("\n[tag_prior]\n{}\n", row(&random_stochastic(rng, tags)));
    for section in ["trans_fluent", "trans_repair"] {
        text += &format!("\n[{section}]\n");
        for n in &names {
            text += &format!("{n} {}\n", row(&random_stochastic(rng, tags)));
        }
    }
    text += "\n[repair_prior]\n";
    for n in &names {
        text += &format!("{n} 0.1\n");
    }
    text += "\n[clue_output]\n";
    for state in ["repair", "fluent"] {
        text += &format!("fragment {state} 0.5 0.5\nediting {state} 0.25 0.25 0.25 0.25\n");
        text += &format!("matches {state} 0.2 0.2 0.2 0.2 0.2\n");
    }
    let mut words = vocab.clone();
    words.push("zz".into());
    (TaggerModel::from_text(&text).unwrap(), words)
}

fn brute_force(m: &TaggerModel, words: &[&str]) -> (f64, Vec<usize>) {
    let n = m.num_tags();
    let lex = |w: &str, t: usize| {
        let idx = m.vocab.iter().position(|v| v == w).unwrap_or(m.vocab.len());
        m.lexical[t][idx]
    };
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for code in 0..n.pow(words.len() as u32) {
        let path: Vec<usize> = (0..words.len()).map(|i| code / n.pow(i as u32) % n).collect();
        let mut p = m.initial[path[0]] * lex(words[0], path[0]);
        for i in 1..words.len() {
            p *= m.trans_fluent[path[i - 1]][path[i]] * lex(words[i], path[i]);
        }
        if p.ln() > best.0 {
            best = (p.ln(), path);
        }
    }
    best
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for k in 0..1000 {
        let (m, vocab) = random_model(&mut rng);
        let len = rng.gen_range(1..=6);
        let words: Vec<&str> = (0..len).map(|_| vocab[rng.gen_range(0..vocab.len())].as_str()).collect();
        let tokens = Token::sequence("v", &words.join(" ")).unwrap();
        let path = m.viterbi(&tokens);
        let (best, _) = brute_force(&m, &words);
        let got = m.path_log_prob(&tokens, &path);
        check((got - best).abs() <= 1e-9 * best.abs().max(1.0), || {
            format!("model {k}: viterbi {got} vs brute force {best} on {words:?}")
        })?;
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("1000 random models, no mismatches, {elapsed:.2?}"))
}

// ---- filter arithmetic ----

fn criterion_7() -> Outcome {
    let m = TaggerModel::from_text(include_str!("data/toy.model")).unwrap();
    let close = |a: f64, b: f64| (a - b).abs() < 1e-9;
    // before N, after V, no fragment, "uh", single match
    let ctx = GapContext {
        before: 1,
        after: Some(2),
    };
    let ev = RepairEvidence {
        fragment: false,
        editing: EditingClass::Uh,
        matches: MatchType::Single,
    };
    let d = score_gap(3, &ctx, &ev, &m).map_err(|e| e.to_string())?;
    let terms = [d.repair.prior, d.repair.transition, d.repair.fragment, d.repair.editing, d.repair.matches];
    let hand = [0.1f64.ln(), 0.25f64.ln(), 0.4f64.ln(), 0.4f64.ln(), 0.4f64.ln()];
    check(terms.iter().zip(hand).all(|(a, b)| close(*a, b)), || format!("terms {terms:?}"))?;
    check(close(d.repair.total(), (0.1 * 0.25 * 0.4 * 0.4 * 0.4f64).ln()), || format!("{d:?}"))?;
    check(close(d.fluent.total(), (0.9 * 0.5 * 0.99 * 0.02 * 0.3f64).ln()), || format!("{d:?}"))?;
    check(d.verdict == RepairState::Fluent, || "case 1 verdict".into())?;

    // before D, after N, fragment, no editing term, double match
    let ctx2 = GapContext {
        before: 0,
        after: Some(1),
    };
    let ev2 = RepairEvidence {
        fragment: true,
        editing: EditingClass::None,
        matches: MatchType::Double,
    };
    let d2 = score_gap(2, &ctx2, &ev2, &m).map_err(|e| e.to_string())?;
    check(close(d2.repair.total(), (0.2 * 0.2 * 0.6 * 0.3 * 0.2f64).ln()), || format!("{d2:?}"))?;
    check(close(d2.fluent.total(), (0.8 * 0.8 * 0.01 * 0.9 * 0.05f64).ln()), || format!("{d2:?}"))?;
    check(d2.verdict == RepairState::Repair, || "case 2 verdict".into())?;

    // exchanging the repair and fluent parameters negates the difference
    let mut swapped = m.clone();
    swapped.repair_prior = m.repair_prior.iter().map(|p| 1.0 - p).collect();
    std::mem::swap(&mut swapped.trans_fluent, &mut swapped.trans_repair);
    swapped.clue_output.fragment.swap(0, 1);
    swapped.clue_output.editing.swap(0, 1);
    swapped.clue_output.matches.swap(0, 1);
    for (c, e) in [(ctx, ev), (ctx2, ev2)] {
        let a = score_gap(1, &c, &e, &m).map_err(|e| e.to_string())?;
        let b = score_gap(1, &c, &e, &swapped).map_err(|e| e.to_string())?;
        check(close(a.margin(), -b.margin()), || format!("{} vs {}", a.margin(), b.margin()))?;
    }
    Ok(format!(
        "hand sums match; margins {:.6} and {:.6}; exchange negates",
        d.margin(),
        d2.margin()
    ))
}

// ---- synthetic benchmark ----

fn criterion_8(model: &TaggerModel) -> Outcome {
    let start = Instant::now();
    let test = synth(1000, 2);
    let config = Config::default();
    let result = speech_repair::process_corpus(&test, model, &config);
    let gold: Vec<(&str, Vec<GoldRepair>)> = test.iter().map(|t| (t.id.as_str(), t.gold_repairs().unwrap())).collect();
    let pred: Vec<(&str, Vec<Prediction>)> = result
        .turns
        .iter()
        .map(|r| (r.id.as_str(), r.repairs.iter().map(Prediction::from).collect()))
        .collect();
    let rep = score(&gold, &pred).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let summary = format!(
        "detection {} / {}, correction {} / {} (recall / precision), {elapsed:.2?}",
        rep.detection_recall, rep.detection_precision, rep.correction_recall, rep.correction_precision
    );
    check(rep.detection_recall.value() >= 0.90, || summary.clone())?;
    check(rep.correction_recall.value() >= 0.85, || summary.clone())?;
    check(rep.detection_precision.value() >= 0.80, || summary.clone())?;
    check(rep.correction_precision.value() >= 0.80, || summary.clone())?;
    check(elapsed < Duration::from_secs(30), || summary.clone())?;
    Ok(summary)
}

// ---- online commitment ----

fn criterion_9(model: &TaggerModel) -> Outcome {
    let config = Config::default();
    let turns = synth(1000, 9);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut compared = 0;
    for t in &turns {
        let mut judge = model_judge(model);
        let full = process_segment(&t.tokens, model, &config, &mut judge);
        let cut = rng.gen_range(1..=t.len());
        let prefix = process_segment(&t.tokens[..cut], model, &config, &mut judge);
        let inside = |v: &[speech_repair::JudgedRepair]| -> Vec<speech_repair::JudgedRepair> {
            v.iter().filter(|j| j.decided_at <= cut).cloned().collect()
        };
        let (a, b) = (inside(&full.repairs), inside(&prefix.repairs));
        check(a == b, || format!("turn {} cut at {cut}: {a:?} vs {b:?}", t.id))?;
        compared += a.len();
    }
    Ok(format!("1000 turns, {compared} decisions unchanged by the suffix"))
}

// ---- evaluator against a naive scorer ----

/// Deletes gold repairs one at a time in gap order and records what each
/// one actually removes from the remaining words.
fn naive_targets(turn: &AnnotatedTurn, gold: &[GoldRepair]) -> Vec<(usize, Vec<usize>)> {
    let mut alive: Vec<usize> = (0..turn.len()).collect();
    let mut order: Vec<&GoldRepair> = gold.iter().collect();
    order.sort_by_key(|g| g.gap());
    let mut out = Vec::new();
    for g in order {
        let span: Vec<usize> = g.removed.clone().chain(g.editing.clone()).collect();
        let gone: Vec<usize> = alive.iter().copied().filter(|p| span.contains(p)).collect();
        alive.retain(|p| !span.contains(p));
        out.push((g.gap(), gone));
    }
    out
}

fn naive_score(turns: &[AnnotatedTurn], preds: &[Vec<Prediction>]) -> [Ratio; 4] {
    let (mut gold_n, mut pred_n, mut det, mut cor) = (0, 0, 0, 0);
    for (t, ps) in turns.iter().zip(preds) {
        let targets = naive_targets(t, &t.gold_repairs().unwrap());
        gold_n += targets.len();
        pred_n += ps.len();
        for p in ps {
            if let Some((_, gone)) = targets.iter().find(|(g, _)| *g == p.gap) {
                det += 1;
                let mut mine: Vec<usize> = p.removed.iter().chain(&p.editing).copied().collect();
                mine.sort_unstable();
                if &mine == gone {
                    cor += 1;
                }
            }
        }
    }
    let r = |num, den| Ratio { num, den };
    [r(det, gold_n), r(det, pred_n), r(cor, gold_n), r(cor, pred_n)]
}

fn random_predictions(rng: &mut ChaCha8Rng, t: &AnnotatedTurn) -> Vec<Prediction> {
    let mut out: Vec<Prediction> = Vec::new();
    let targets = naive_targets(t, &t.gold_repairs().unwrap());
    for (gap, gone) in targets {
        let roll = rng.gen_range(0..4);
        if roll == 0 {
            continue;
        }
        let mut deleted = gone.clone();
        if roll == 2 {
            deleted.retain(|_| rng.gen_bool(0.5));
        }
        let gap = if roll == 3 && gap + 1 < t.len() { gap + 1 } else { gap };
        out.push(Prediction {
            gap,
            klass: speech_repair::RepairClass::Modification,
            removed: deleted.iter().copied().filter(|&p| p < gap).collect(),
            editing: deleted.iter().copied().filter(|&p| p >= gap).collect(),
            pattern: "m.m".into(),
        });
    }
    if rng.gen_bool(0.3) && t.len() > 2 {
        let gap = rng.gen_range(1..t.len());
        out.push(Prediction {
            gap,
            klass: speech_repair::RepairClass::Abridged,
            removed: vec![],
            editing: vec![gap],
            pattern: ".e".into(),
        });
    }
    let mut gaps = BTreeSet::new();
    out.retain(|p| gaps.insert(p.gap));
    out
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let corpus = synth(2000, 10);
    for k in 0..100 {
        let turns: Vec<AnnotatedTurn> = corpus[k * 20..k * 20 + 20].to_vec();
        let preds: Vec<Vec<Prediction>> = turns.iter().map(|t| random_predictions(&mut rng, t)).collect();
        let gold: Vec<(&str, Vec<GoldRepair>)> = turns.iter().map(|t| (t.id.as_str(), t.gold_repairs().unwrap())).collect();
        let pred: Vec<(&str, Vec<Prediction>)> = turns.iter().map(|t| t.id.as_str()).zip(preds.clone()).collect();
        let r = score(&gold, &pred).map_err(|e| e.to_string())?;
        let got = [r.detection_recall, r.detection_precision, r.correction_recall, r.correction_precision];
        let want = naive_score(&turns, &preds);
        check(got == want, || format!("pairing {k}: {got:?} vs {want:?}"))?;
    }
    Ok("100 pairings, exact agreement with the naive scorer".into())
}

fn main() {
    let model = trained_model();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("annotation example", Box::new(|| criterion_1(&model))),
        ("rule walkthrough", Box::new(|| criterion_2(&model))),
        ("overlapping repairs", Box::new(|| criterion_3(&model))),
        ("documented mis-correction", Box::new(|| criterion_4(&model))),
        ("oracle equivalence", Box::new(criterion_5)),
        ("viterbi vs brute force", Box::new(criterion_6)),
        ("filter arithmetic", Box::new(criterion_7)),
        ("synthetic benchmark", Box::new(|| criterion_8(&model))),
        ("online commitment", Box::new(|| criterion_9(&model))),
        ("evaluator arithmetic", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
