//! Run configuration: editing-term lexicon, smoothing and rule thresholds.
//!
//! Loaded from a versioned TOML file; every field has a default so an empty
//! file is a valid configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CONFIG_VERSION: u32 = 1;

/// Editing-term identity classes used as repair evidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EditingClass {
    None,
    Uh,
    Um,
    Cue,
}

impl EditingClass {
    pub const ALL: [EditingClass; 4] = [
        EditingClass::None,
        EditingClass::Uh,
        EditingClass::Um,
        EditingClass::Cue,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EditingClass::None => "none",
            EditingClass::Uh => "uh",
            EditingClass::Um => "um",
            EditingClass::Cue => "cue",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Distance limits applied while building repair patterns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RuleLimits {
    /// Intervening words allowed by the single-match clue.
    pub single_match_gap: usize,
    /// Intervening words allowed by the adjacent double-match clue.
    pub double_match_gap: usize,
    /// Intervening words for a first correspondence found by search.
    pub first_correspondence_gap: usize,
    /// Removed-side distance between adjacent correspondences.
    pub removed_gap: usize,
    /// Resumed-side distance between adjacent correspondences.
    pub resumed_gap: usize,
    /// How many more words the removed side may have than the resumed side.
    pub drop_slack: usize,
}

impl Default for RuleLimits {
    fn default() -> Self {
        RuleLimits {
            single_match_gap: 3,
            double_match_gap: 6,
            first_correspondence_gap: 3,
            removed_gap: 4,
            resumed_gap: 4,
            drop_slack: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub version: u32,
    /// Add-alpha smoothing constant for every estimated table.
    pub alpha: f64,
    /// Tag given to unknown words by `likely_category`.
    pub open_class: String,
    /// Tokens of history scanned for clues.
    pub window: usize,
    pub uh_class: Vec<String>,
    pub um_class: Vec<String>,
    /// Cue phrases; multi-word entries are space separated.
    pub cue_phrases: Vec<String>,
    pub rules: RuleLimits,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            version: CONFIG_VERSION,
            alpha: 0.1,
            open_class: "N".to_string(),
            window: 10,
            uh_class: vec!["uh".into(), "er".into()],
            um_class: vec!["um".into()],
            cue_phrases: ["i mean", "i guess", "well", "let's see", "sorry", "okay"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            rules: RuleLimits::default(),
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Config> {
        let config: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {}",
                self.version
            )));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Config(format!("alpha must be positive, got {}", self.alpha)));
        }
        if self.window == 0 {
            return Err(Error::Config("window must be at least 1".into()));
        }
        if self.cue_phrases.iter().any(|p| p.split_whitespace().next().is_none()) {
            return Err(Error::Config("empty cue phrase".into()));
        }
        Ok(())
    }

    /// Class of a single-word filled pause, if `word` is one.
    pub fn filled_pause(&self, word: &str) -> Option<EditingClass> {
        if self.uh_class.iter().any(|w| w == word) {
            Some(EditingClass::Uh)
        } else if self.um_class.iter().any(|w| w == word) {
            Some(EditingClass::Um)
        } else {
            None
        }
    }

    pub fn is_filled_pause(&self, word: &str) -> bool {
        self.filled_pause(word).is_some()
    }

    fn cue_words(&self) -> impl Iterator<Item = Vec<&str>> {
        self.cue_phrases
            .iter()
            .map(|p| p.split_whitespace().collect::<Vec<_>>())
    }

    /// Longest cue phrase whose last word is the last element of `words`.
    /// Returns its length in words.
    pub fn cue_phrase_ending(&self, words: &[&str]) -> Option<usize> {
        self.cue_words()
            .filter(|p| p.len() <= words.len() && words[words.len() - p.len()..] == p[..])
            .map(|p| p.len())
            .max()
    }

    /// Longest editing term (filled pause or cue phrase) starting at
    /// `words[0]`, as (length, class).
    pub fn editing_term_starting(&self, words: &[&str]) -> Option<(usize, EditingClass)> {
        let first = words.first()?;
        let cue = self
            .cue_words()
            .filter(|p| p.len() <= words.len() && words[..p.len()] == p[..])
            .map(|p| p.len())
            .max();
        match (cue, self.filled_pause(first)) {
            (Some(n), _) => Some((n, EditingClass::Cue)),
            (None, Some(class)) => Some((1, class)),
            (None, None) => None,
        }
    }
}
