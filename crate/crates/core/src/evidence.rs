//! Clue variables observed at a candidate interruption point.

use crate::config::{Config, EditingClass};

/// Summary of the word correspondences seen across a gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MatchType {
    None,
    Single,
    Double,
    Replacement,
    Mixed,
}

impl MatchType {
    pub const ALL: [MatchType; 5] = [
        MatchType::None,
        MatchType::Single,
        MatchType::Double,
        MatchType::Replacement,
        MatchType::Mixed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MatchType::None => "none",
            MatchType::Single => "single",
            MatchType::Double => "double",
            MatchType::Replacement => "replacement",
            MatchType::Mixed => "mixed",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Summary from counts of matches and replacements.
    pub fn from_counts(matches: usize, replacements: usize) -> MatchType {
        match (matches, replacements) {
            (0, 0) => MatchType::None,
            (0, _) => MatchType::Replacement,
            (_, r) if r > 0 => MatchType::Mixed,
            (1, _) => MatchType::Single,
            _ => MatchType::Double,
        }
    }
}

/// Fragment, editing-term and match evidence at one gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RepairEvidence {
    pub fragment: bool,
    pub editing: EditingClass,
    pub matches: MatchType,
}

impl RepairEvidence {
    pub const NONE: RepairEvidence = RepairEvidence {
        fragment: false,
        editing: EditingClass::None,
        matches: MatchType::None,
    };
}

/// Editing-term class of a run of editing-term words.
pub fn editing_class(words: &[&str], config: &Config) -> EditingClass {
    if words.is_empty() {
        return EditingClass::None;
    }
    config
        .editing_term_starting(words)
        .map(|(_, c)| c)
        .unwrap_or(EditingClass::Cue)
}

/// Evidence read off the surface of a gap in text with no annotation:
/// the fragment before it, the longest editing term starting at it, and
/// matches between up to `reach` words on either side.
pub fn lexical_gap_evidence(
    words: &[&str],
    fragments: &[bool],
    tags: &[usize],
    gap: usize,
    reach: usize,
    config: &Config,
) -> RepairEvidence {
    let fragment = gap > 0 && fragments[gap - 1];
    let (et_len, editing) = config
        .editing_term_starting(&words[gap..])
        .unwrap_or((0, EditingClass::None));
    let excluded = |i: usize| fragments[i] || config.is_filled_pause(words[i]);
    let left: Vec<usize> = (0..gap).rev().filter(|&i| !excluded(i)).take(reach).collect();
    let right: Vec<usize> = (gap + et_len..words.len())
        .filter(|&i| !excluded(i))
        .take(reach)
        .collect();
    let matches = right
        .iter()
        .filter(|&&r| left.iter().any(|&l| words[l] == words[r]))
        .count();
    let replacement = match (left.first(), right.first()) {
        (Some(&l), Some(&r)) => tags[l] == tags[r] && words[l] != words[r],
        _ => false,
    };
    RepairEvidence {
        fragment,
        editing,
        matches: MatchType::from_counts(matches, usize::from(replacement)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn match_type_from_counts() {
        assert_eq!(MatchType::from_counts(0, 0), MatchType::None);
        assert_eq!(MatchType::from_counts(1, 0), MatchType::Single);
        assert_eq!(MatchType::from_counts(3, 0), MatchType::Double);
        assert_eq!(MatchType::from_counts(0, 2), MatchType::Replacement);
        assert_eq!(MatchType::from_counts(2, 1), MatchType::Mixed);
    }

    #[test]
    fn gap_evidence_reads_fragment_terms_and_matches() {
        let c = Config::default();
        let words = ["go", "to", "oran-", "um", "go", "to", "corning"];
        let frags = [false, false, true, false, false, false, false];
        let tags = [0, 1, 2, 3, 0, 1, 4];
        let e = lexical_gap_evidence(&words, &frags, &tags, 3, 4, &c);
        assert!(e.fragment);
        assert_eq!(e.editing, EditingClass::Um);
        assert_eq!(e.matches, MatchType::Double);
        let e = lexical_gap_evidence(&words, &frags, &tags, 6, 4, &c);
        assert_eq!(e, RepairEvidence::NONE);
    }
}
