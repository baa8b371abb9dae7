//! The ten well-formedness rules for repair patterns.
//!
//! 1. editing terms are adjacent;
//! 2. editing terms start at the interruption gap;
//! 3. a fragment sits immediately before the gap;
//! 4. correspondences straddle the gap and avoid fragments and editing terms;
//! 5. correspondences are cross-serial;
//! 6. a first correspondence spans a bounded number of words;
//! 7. and 8. adjacent correspondences are close on each side;
//! 9. the removed side may drop at most a bounded number of words;
//! 10. a replacement is adjacent, or sits next to a tight correspondence.

use super::{CorrKind, Correspondence, LiveToken, Origin, RepairPattern};
use crate::config::RuleLimits;

pub type RuleId = u8;

fn excluded(p: &RepairPattern, tokens: &[LiveToken], i: usize) -> bool {
    tokens[i].is_fragment || tokens[i].filled_pause || p.is_editing(i)
}

/// Words strictly between `a` and `b`, not counting fragments, filled
/// pauses or the pattern's editing terms.
pub(crate) fn intervening(p: &RepairPattern, tokens: &[LiveToken], a: usize, b: usize) -> usize {
    (a + 1..b).filter(|&i| !excluded(p, tokens, i)).count()
}

fn straddles(p: &RepairPattern, tokens: &[LiveToken], c: &Correspondence) -> bool {
    match p.fixed_gap {
        Some(g) => c.left < g && g <= c.right,
        None => {
            let max_left = p.max_left().map_or(c.left, |l| l.max(c.left));
            let min_right = p.min_right().map_or(c.right, |r| r.min(c.right));
            max_left < min_right && c.right < tokens.len()
        }
    }
}

fn rule4(p: &RepairPattern, tokens: &[LiveToken], c: &Correspondence) -> bool {
    c.left < c.right
        && c.right < tokens.len()
        && !excluded(p, tokens, c.left)
        && !excluded(p, tokens, c.right)
        && straddles(p, tokens, c)
}

fn cross_serial(a: &Correspondence, b: &Correspondence) -> bool {
    a.left != b.left && a.right != b.right && (a.left < b.left) == (a.right < b.right)
}

/// (removed-side, resumed-side) raw word counts between two adjacent
/// correspondences, `a` before `b`.
fn distances(a: &Correspondence, b: &Correspondence) -> (usize, usize) {
    (b.left - a.left - 1, b.right - a.right - 1)
}

fn neighbours(sorted: &[Correspondence], c: &Correspondence) -> Vec<(Correspondence, Correspondence)> {
    let idx = sorted.partition_point(|o| o.left < c.left);
    let mut out = Vec::new();
    if idx > 0 {
        out.push((sorted[idx - 1], *c));
    }
    if idx < sorted.len() {
        out.push((*c, sorted[idx]));
    }
    out
}

fn only_fillers_between(p: &RepairPattern, tokens: &[LiveToken], c: &Correspondence) -> bool {
    (c.left + 1..c.right).all(|i| excluded(p, tokens, i))
}

/// Checks whether `c` can join the pattern. Returns the lowest-numbered
/// violated rule otherwise.
pub fn try_add(
    p: &RepairPattern,
    c: &Correspondence,
    tokens: &[LiveToken],
    limits: &RuleLimits,
) -> Result<(), RuleId> {
    if p.uses(c.left) || p.uses(c.right) || !rule4(p, tokens, c) {
        return Err(4);
    }
    if !p.corrs.iter().all(|o| cross_serial(o, c)) {
        return Err(5);
    }
    if p.corrs.is_empty()
        && c.origin == Origin::Search
        && intervening(p, tokens, c.left, c.right) > limits.first_correspondence_gap
    {
        return Err(6);
    }
    let pairs = neighbours(&p.sorted(), c);
    let dists: Vec<(usize, usize)> = pairs.iter().map(|(a, b)| distances(a, b)).collect();
    if dists.iter().any(|(x, _)| *x > limits.removed_gap) {
        return Err(7);
    }
    if dists.iter().any(|(_, y)| *y > limits.resumed_gap) {
        return Err(8);
    }
    if dists.iter().any(|(x, y)| *x > y + limits.drop_slack) {
        return Err(9);
    }
    if c.kind == CorrKind::Replacement
        && c.origin == Origin::Search
        && !only_fillers_between(p, tokens, c)
        && !dists.contains(&(0, 0))
    {
        return Err(10);
    }
    Ok(())
}

/// Checks a finished pattern against all ten rules.
pub fn validate(p: &RepairPattern, tokens: &[LiveToken], limits: &RuleLimits) -> Result<(), RuleId> {
    let gap = p.interruption_gap(tokens);
    if let Some(r) = &p.editing {
        if r.is_empty() || r.end > tokens.len() {
            return Err(1);
        }
        if gap != Some(r.start) {
            return Err(2);
        }
    }
    if let Some(f) = p.fragment {
        if gap != Some(f + 1) || !tokens[f].is_fragment {
            return Err(3);
        }
    }
    let Some(g) = gap else {
        return if p.corrs.is_empty() { Ok(()) } else { Err(4) };
    };
    for c in &p.corrs {
        let on_filler = excluded(p, tokens, c.left) || excluded(p, tokens, c.right);
        if !(c.left < g && g <= c.right && c.right < tokens.len()) || on_filler {
            return Err(4);
        }
    }
    for (i, a) in p.corrs.iter().enumerate() {
        if p.corrs[i + 1..].iter().any(|b| !cross_serial(a, b)) {
            return Err(5);
        }
    }
    if !p.corrs.is_empty()
        && !p.corrs.iter().any(|c| {
            c.origin == Origin::Clue
                || intervening(p, tokens, c.left, c.right) <= limits.first_correspondence_gap
        })
    {
        return Err(6);
    }
    let sorted = p.sorted();
    let dists: Vec<(usize, usize)> = sorted.windows(2).map(|w| distances(&w[0], &w[1])).collect();
    if dists.iter().any(|(x, _)| *x > limits.removed_gap) {
        return Err(7);
    }
    if dists.iter().any(|(_, y)| *y > limits.resumed_gap) {
        return Err(8);
    }
    if dists.iter().any(|(x, y)| *x > y + limits.drop_slack) {
        return Err(9);
    }
    for (i, c) in sorted.iter().enumerate() {
        if c.kind != CorrKind::Replacement || c.origin == Origin::Clue || only_fillers_between(p, tokens, c) {
            continue;
        }
        let tight_before = i > 0 && dists[i - 1] == (0, 0);
        let tight_after = i < dists.len() && dists[i] == (0, 0);
        if !tight_before && !tight_after {
            return Err(10);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Config, EditingClass};
    use crate::corpus::Token;
    use crate::pattern::test_lexicon::ToyLexicon;
    use crate::pattern::{live_tokens, ClueKind};

    fn utt76() -> (Vec<LiveToken>, RepairPattern) {
        let lex = ToyLexicon::new(&[("i", "PRO"), ("we", "PRO"), ("uh", "FILLED_PAUSE"), ("need", "V")]);
        let toks = live_tokens(
            &Token::sequence("t", "i think we need to uh i need").unwrap(),
            &lex,
            &Config::default(),
        );
        let mut p = RepairPattern::empty(ClueKind::EditingTerm);
        p.editing = Some(5..6);
        p.fixed_gap = Some(5);
        p.editing_classes = vec![EditingClass::Uh];
        (toks, p)
    }

    #[test]
    fn walkthrough_rule_decisions() {
        let limits = RuleLimits::default();
        let (toks, mut p) = utt76();
        let ii = Correspondence::new(CorrKind::Match, 0, 6, Origin::Search);
        assert_eq!(try_add(&p, &ii, &toks, &limits), Err(6));
        let need = Correspondence::new(CorrKind::Match, 3, 7, Origin::Search);
        assert_eq!(try_add(&p, &need, &toks, &limits), Ok(()));
        p.corrs.push(need);
        assert_eq!(try_add(&p, &ii, &toks, &limits), Err(9));
        let we_i = Correspondence::new(CorrKind::Replacement, 2, 6, Origin::Search);
        assert_eq!(try_add(&p, &we_i, &toks, &limits), Ok(()));
        p.corrs.push(we_i);
        assert_eq!(validate(&p, &toks, &limits), Ok(()));
        assert_eq!(p.pattern_string(&toks), "rmx.erm");
    }

    #[test]
    fn isolated_search_replacement_breaks_rule_ten() {
        let limits = RuleLimits::default();
        let (toks, p) = utt76();
        let we_i = Correspondence::new(CorrKind::Replacement, 2, 6, Origin::Search);
        assert_eq!(try_add(&p, &we_i, &toks, &limits), Err(10));
        let from_clue = Correspondence { origin: Origin::Clue, ..we_i };
        assert_eq!(try_add(&p, &from_clue, &toks, &limits), Ok(()));
    }

    #[test]
    fn embedded_correspondences_break_rule_five() {
        let limits = RuleLimits::default();
        let (toks, mut p) = utt76();
        p.corrs.push(Correspondence::new(CorrKind::Match, 3, 7, Origin::Search));
        let embedded = Correspondence::new(CorrKind::Match, 4, 6, Origin::Clue);
        assert_eq!(try_add(&p, &embedded, &toks, &limits), Err(5));
        let crossing = Correspondence::new(CorrKind::Match, 4, 6, Origin::Clue);
        let mut q = p.clone();
        q.editing = None;
        q.fixed_gap = None;
        q.editing_classes.clear();
        assert_eq!(try_add(&q, &crossing, &toks, &limits), Err(5));
    }

    #[test]
    fn validator_flags_structural_rules() {
        let limits = RuleLimits::default();
        let (toks, mut p) = utt76();
        p.fixed_gap = Some(4);
        assert_eq!(validate(&p, &toks, &limits), Err(2));
        let (toks, mut p) = utt76();
        p.fragment = Some(3);
        assert_eq!(validate(&p, &toks, &limits), Err(3));
    }
}
