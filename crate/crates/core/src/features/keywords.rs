//! Wording lexicons and the fallback part-of-speech counter.

use std::collections::HashSet;
use std::path::Path;

use crate::corpus::{is_pseudo_id, PosCounts, TokenId, Vocabulary};
use crate::error::Result;
use crate::textnorm::read_lexicon_file;

/// Share-request, good and bad keyword lists, lowercase tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordConfig {
    pub share_request: Vec<String>,
    pub good: Vec<String>,
    pub bad: Vec<String>,
}

impl Default for KeywordConfig {
    fn default() -> Self {
        KeywordConfig {
            share_request: vec!["rt".into(), "spread".into(), "share".into()],
            good: Vec::new(),
            bad: Vec::new(),
        }
    }
}

impl KeywordConfig {
    /// Loads whichever lists are given; the rest keep their defaults.
    pub fn from_files(share: Option<&Path>, good: Option<&Path>, bad: Option<&Path>) -> Result<Self> {
        let mut cfg = KeywordConfig::default();
        let lower = |v: Vec<String>| v.into_iter().map(|w| w.to_lowercase()).collect();
        if let Some(p) = share {
            cfg.share_request = lower(read_lexicon_file(p)?);
        }
        if let Some(p) = good {
            cfg.good = lower(read_lexicon_file(p)?);
        }
        if let Some(p) = bad {
            cfg.bad = lower(read_lexicon_file(p)?);
        }
        Ok(cfg)
    }

    /// Maps the word lists to token ids. Words absent from the vocabulary
    /// cannot occur in encoded tweets and are dropped; without a vocabulary
    /// every list resolves empty.
    pub fn resolve(&self, vocab: Option<&Vocabulary>) -> ResolvedKeywords {
        let ids = |words: &[String]| -> HashSet<TokenId> {
            vocab
                .map(|v| words.iter().filter_map(|w| v.id(w)).collect())
                .unwrap_or_default()
        };
        ResolvedKeywords {
            share_request: ids(&self.share_request),
            good: ids(&self.good),
            bad: ids(&self.bad),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResolvedKeywords {
    pub share_request: HashSet<TokenId>,
    pub good: HashSet<TokenId>,
    pub bad: HashSet<TokenId>,
}

impl ResolvedKeywords {
    pub fn share_count(&self, tokens: &[TokenId]) -> usize {
        tokens.iter().filter(|t| self.share_request.contains(t)).count()
    }

    pub fn good_minus_bad(&self, tokens: &[TokenId]) -> i64 {
        let good = tokens.iter().filter(|t| self.good.contains(t)).count() as i64;
        let bad = tokens.iter().filter(|t| self.bad.contains(t)).count() as i64;
        good - bad
    }
}

// Closed-class words never counted as nouns or verbs.
const FUNCTION_WORDS: &[&str] = &[
    "a", "an", "the", "this", "that", "these", "those", "i", "me", "my", "you", "your", "he", "him", "his",
    "she", "her", "it", "its", "we", "us", "our", "they", "them", "their", "and", "or", "but", "nor", "so",
    "yet", "if", "then", "than", "because", "while", "of", "in", "on", "at", "to", "for", "from", "by",
    "with", "about", "into", "over", "under", "after", "before", "up", "down", "out", "off", "not", "no",
    "very", "too", "also", "just", "all", "some", "any", "each", "every", "what", "which", "who", "whom",
    "whose", "when", "where", "why", "how", "there", "here", "now", "rt",
];

// Adjective and adverb endings.
const NON_NOUN_VERB_SUFFIXES: &[&str] = &["ly", "ous", "ful", "ive", "less", "able", "ible", "ical"];

/// Heuristic noun+verb test on a lowercase word: alphabetic, at least two
/// characters, not a function word, and not carrying an adjective/adverb
/// suffix. An approximation of a real tagger.
pub fn looks_like_noun_or_verb(word: &str) -> bool {
    word.chars().count() >= 2
        && word.chars().all(char::is_alphabetic)
        && !FUNCTION_WORDS.contains(&word)
        && !NON_NOUN_VERB_SUFFIXES
            .iter()
            .any(|s| word.len() > s.len() + 2 && word.ends_with(s))
}

/// Part-of-speech counts from the vocabulary strings: articles by closed
/// lexicon, nouns and verbs by [`looks_like_noun_or_verb`]. Zero without a
/// vocabulary.
pub fn fallback_pos_counts(tokens: &[TokenId], vocab: Option<&Vocabulary>) -> PosCounts {
    let mut counts = PosCounts {
        nouns_verbs: 0,
        definite_articles: 0,
        indefinite_articles: 0,
    };
    let Some(vocab) = vocab else {
        return counts;
    };
    for &t in tokens {
        if is_pseudo_id(t) {
            continue;
        }
        let Some(word) = vocab.word(t) else { continue };
        match word {
            "the" => counts.definite_articles += 1,
            "a" | "an" => counts.indefinite_articles += 1,
            w if looks_like_noun_or_verb(w) => counts.nouns_verbs += 1,
            _ => {}
        }
    }
    counts
}
