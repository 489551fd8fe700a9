//! Tweet tokenization and normalization.
//!
//! URLs, numbers and smileys are collapsed into pseudo-tokens so the
//! downstream similarity features generalize over them; every remaining
//! token is lowercased. Surface facts that the features need (raw length,
//! URL/hashtag/exclamation presence, mentions) are recorded before the
//! replacement loses them.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const URL_TOKEN: &str = "_url_";
pub const NUM_TOKEN: &str = "_num_";
pub const LOVE_TOKEN: &str = "_love_";
pub const POSITIVE_TOKEN: &str = "_pos_";
pub const NEGATIVE_TOKEN: &str = "_neg_";
pub const NEUTRAL_TOKEN: &str = "_neutral_";

/// Pseudo-tokens in reserved-id order (see `corpus::Vocabulary`).
pub const PSEUDO_TOKENS: [&str; 6] = [
    URL_TOKEN,
    NUM_TOKEN,
    LOVE_TOKEN,
    POSITIVE_TOKEN,
    NEGATIVE_TOKEN,
    NEUTRAL_TOKEN,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SmileyClass {
    Love,
    Positive,
    Negative,
    Neutral,
}

impl SmileyClass {
    pub const ALL: [SmileyClass; 4] = [
        SmileyClass::Love,
        SmileyClass::Positive,
        SmileyClass::Negative,
        SmileyClass::Neutral,
    ];

    pub fn pseudo_token(self) -> &'static str {
        match self {
            SmileyClass::Love => LOVE_TOKEN,
            SmileyClass::Positive => POSITIVE_TOKEN,
            SmileyClass::Negative => NEGATIVE_TOKEN,
            SmileyClass::Neutral => NEUTRAL_TOKEN,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmileyCounts {
    pub love: usize,
    pub positive: usize,
    pub negative: usize,
    pub neutral: usize,
}

impl SmileyCounts {
    pub fn get(&self, class: SmileyClass) -> usize {
        match class {
            SmileyClass::Love => self.love,
            SmileyClass::Positive => self.positive,
            SmileyClass::Negative => self.negative,
            SmileyClass::Neutral => self.neutral,
        }
    }

    fn bump(&mut self, class: SmileyClass) {
        match class {
            SmileyClass::Love => self.love += 1,
            SmileyClass::Positive => self.positive += 1,
            SmileyClass::Negative => self.negative += 1,
            SmileyClass::Neutral => self.neutral += 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedTweet {
    pub tokens: Vec<String>,
    /// Character count of the raw text.
    pub char_length: usize,
    pub has_url: bool,
    /// Never set from text; photos are attachments and come from record metadata.
    pub has_photo: bool,
    /// Mentioned account names, lowercased, without the `@`.
    pub mentions: Vec<String>,
    pub has_hashtag: bool,
    pub has_exclamation: bool,
    pub smiley_counts: SmileyCounts,
}

/// Smiley classes and URL prefixes used by [`Normalizer`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    smileys: HashMap<String, SmileyClass>,
    url_prefixes: Vec<String>,
}

impl Default for Lexicon {
    fn default() -> Self {
        let mut smileys = HashMap::new();
        let defaults: [(SmileyClass, &[&str]); 4] = [
            (SmileyClass::Love, &["<3", "\u{2665}"]),
            (SmileyClass::Positive, &[":)", ":-)", ":D", "=)", ";)"]),
            (SmileyClass::Negative, &[":(", ":-(", ":'("]),
            (SmileyClass::Neutral, &[":|", ":-|"]),
        ];
        for (class, entries) in defaults {
            for entry in entries {
                smileys.insert((*entry).to_string(), class);
            }
        }
        Lexicon {
            smileys,
            url_prefixes: vec!["http://".into(), "https://".into(), "www.".into()],
        }
    }
}

impl Lexicon {
    pub fn new(
        smileys: impl IntoIterator<Item = (String, SmileyClass)>,
        url_prefixes: impl IntoIterator<Item = String>,
    ) -> Self {
        Lexicon {
            smileys: smileys.into_iter().collect(),
            url_prefixes: url_prefixes.into_iter().map(|p| p.to_ascii_lowercase()).collect(),
        }
    }

    /// Builds a lexicon from one file per smiley class plus an optional URL
    /// prefix file. Omitted files fall back to the built-in entries.
    pub fn from_files(smiley_files: &[(SmileyClass, &Path)], url_prefix_file: Option<&Path>) -> Result<Self> {
        let mut lexicon = Lexicon::default();
        for &(class, path) in smiley_files {
            lexicon.smileys.retain(|_, c| *c != class);
            for entry in read_lexicon_file(path)? {
                lexicon.smileys.insert(entry, class);
            }
        }
        if let Some(path) = url_prefix_file {
            lexicon.url_prefixes = read_lexicon_file(path)?
                .into_iter()
                .map(|p| p.to_ascii_lowercase())
                .collect();
        }
        Ok(lexicon)
    }

    pub fn smiley_class(&self, token: &str) -> Option<SmileyClass> {
        self.smileys.get(token).copied()
    }

    pub fn smileys(&self) -> impl Iterator<Item = (&str, SmileyClass)> {
        self.smileys.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn url_prefixes(&self) -> &[String] {
        &self.url_prefixes
    }

    /// Byte offset of the earliest URL prefix inside `chunk`, ASCII case-insensitive.
    fn find_url(&self, chunk: &str) -> Option<usize> {
        let lower = chunk.to_ascii_lowercase();
        self.url_prefixes
            .iter()
            .filter(|p| !p.is_empty())
            .filter_map(|p| lower.find(p.as_str()))
            .min()
    }
}

/// Reads a UTF-8 lexicon file: one entry per line, blank lines ignored.
pub fn read_lexicon_file(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

fn segment_pattern() -> &'static Regex {
    static PATTERN: OnceLock<Regex> = OnceLock::new();
    PATTERN.get_or_init(|| {
        // mentions, hashtags, signed/separated numbers (only when followed by a
        // word boundary, so "2nd" stays a word), words, single punctuation chars
        Regex::new(r"@\w+|#\w+|[+-]?\d+(?:[.,]\d+)*\b|\w+|[^\w\s]").expect("valid pattern")
    })
}

fn number_pattern() -> &'static Regex {
    static PATTERN: OnceLock<Regex> = OnceLock::new();
    PATTERN.get_or_init(|| Regex::new(r"^[+-]?\d+(?:[.,]\d+)*$").expect("valid pattern"))
}

#[derive(Debug, Clone, Default)]
pub struct Normalizer {
    lexicon: Lexicon,
}

impl Normalizer {
    pub fn new(lexicon: Lexicon) -> Self {
        Normalizer { lexicon }
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn normalize(&self, raw_text: &str) -> NormalizedTweet {
        let mut out = NormalizedTweet {
            char_length: raw_text.chars().count(),
            has_exclamation: raw_text.contains('!'),
            ..NormalizedTweet::default()
        };

        for chunk in raw_text.split_whitespace() {
            if let Some(class) = self.lexicon.smiley_class(chunk) {
                self.push_smiley(&mut out, class);
                continue;
            }
            match self.lexicon.find_url(chunk) {
                Some(at) => {
                    self.scan_segment(&mut out, &chunk[..at]);
                    out.tokens.push(URL_TOKEN.to_string());
                    out.has_url = true;
                }
                None => self.scan_segment(&mut out, chunk),
            }
        }
        out
    }

    fn push_smiley(&self, out: &mut NormalizedTweet, class: SmileyClass) {
        out.tokens.push(class.pseudo_token().to_string());
        out.smiley_counts.bump(class);
    }

    fn scan_segment(&self, out: &mut NormalizedTweet, segment: &str) {
        for m in segment_pattern().find_iter(segment) {
            let piece = m.as_str();
            if let Some(class) = self.lexicon.smiley_class(piece) {
                self.push_smiley(out, class);
            } else if let Some(name) = piece.strip_prefix('@') {
                let name = name.to_lowercase();
                out.tokens.push(format!("@{name}"));
                out.mentions.push(name);
            } else if piece.starts_with('#') && piece.len() > 1 {
                out.has_hashtag = true;
                out.tokens.push(piece.to_lowercase());
            } else if number_pattern().is_match(piece) {
                out.tokens.push(NUM_TOKEN.to_string());
            } else {
                out.tokens.push(piece.to_lowercase());
            }
        }
    }
}

/// Normalizes with the default lexicon.
pub fn normalize(raw_text: &str) -> NormalizedTweet {
    static DEFAULT: OnceLock<Normalizer> = OnceLock::new();
    DEFAULT.get_or_init(Normalizer::default).normalize(raw_text)
}

/// Joins tokens with single spaces.
pub fn detokenize(tokens: &[String]) -> String {
    tokens.join(" ")
}

pub fn is_pseudo_token(token: &str) -> bool {
    PSEUDO_TOKENS.contains(&token)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(t: &NormalizedTweet) -> Vec<&str> {
        t.tokens.iter().map(String::as_str).collect()
    }

    #[test]
    fn mention_and_exclamation() {
        let t = normalize("hi @Alice !");
        assert_eq!(toks(&t), ["hi", "@alice", "!"]);
        assert_eq!(t.mentions, ["alice"]);
        assert!(t.has_exclamation);
        assert_eq!(t.char_length, 11);
        assert!(!t.has_url && !t.has_hashtag);
    }

    #[test]
    fn numbers_and_love() {
        let t = normalize("WOW 100 points <3");
        assert_eq!(toks(&t), ["wow", "_num_", "points", "_love_"]);
        assert_eq!(t.smiley_counts.love, 1);
    }

    #[test]
    fn url_hashtag_negative() {
        let t = normalize("read https://t.co/x #news :-(");
        assert_eq!(toks(&t), ["read", "_url_", "#news", "_neg_"]);
        assert!(t.has_url);
        assert!(t.has_hashtag);
        assert_eq!(t.smiley_counts.negative, 1);
    }

    #[test]
    fn empty_input() {
        let t = normalize("");
        assert!(t.tokens.is_empty());
        assert_eq!(t, NormalizedTweet::default());
    }

    #[test]
    fn number_forms() {
        let t = normalize("-3.5 1,000 +7 2nd 10.");
        assert_eq!(toks(&t), ["_num_", "_num_", "_num_", "2nd", "_num_", "."]);
    }

    #[test]
    fn url_inside_chunk() {
        let t = normalize("(see HTTP://Example.com/A) www.foo.org");
        assert_eq!(toks(&t), ["(", "see", "_url_", "_url_"]);
    }

    #[test]
    fn embedded_single_char_smiley() {
        let t = normalize("I\u{2665}NY");
        assert_eq!(toks(&t), ["i", "_love_", "ny"]);
    }

    #[test]
    fn custom_lexicon_files() {
        let dir = tempfile::tempdir().unwrap();
        let love = dir.path().join("love.txt");
        std::fs::write(&love, "xoxo\n\n").unwrap();
        let urls = dir.path().join("urls.txt");
        std::fs::write(&urls, "ftp://\n").unwrap();
        let lex = Lexicon::from_files(&[(SmileyClass::Love, love.as_path())], Some(&urls)).unwrap();
        let n = Normalizer::new(lex);
        let t = n.normalize("xoxo <3 ftp://a http://b");
        assert_eq!(
            t.tokens,
            ["_love_", "<", "_num_", "_url_", "http", ":", "/", "/", "b"]
        );
    }

    fn smiley_tokens(t: &NormalizedTweet) -> usize {
        t.tokens
            .iter()
            .filter(|tok| SmileyClass::ALL.iter().any(|c| c.pseudo_token() == tok.as_str()))
            .count()
    }

    proptest::proptest! {
        #[test]
        fn renormalizing_is_idempotent(text in "[a-zA-Z0-9 @#!:;()<>.,/_\\-]{0,60}|(hi|:\\)|<3|http://x|#tag|@Bob| )*") {
            let once = normalize(&text);
            let twice = normalize(&detokenize(&once.tokens));
            proptest::prop_assert_eq!(&once.tokens, &twice.tokens);
            proptest::prop_assert_eq!(once, normalize(&text));
        }

        #[test]
        fn tokens_are_lowercase_and_nonblank(text in "\\PC{0,80}") {
            let t = normalize(&text);
            for tok in &t.tokens {
                proptest::prop_assert!(!tok.is_empty());
                proptest::prop_assert!(!tok.chars().any(char::is_whitespace));
                proptest::prop_assert_eq!(tok.to_lowercase(), tok.clone());
            }
            proptest::prop_assert_eq!(t.char_length, text.chars().count());
            proptest::prop_assert_eq!(SmileyClass::ALL.iter().map(|&c| t.smiley_counts.get(c)).sum::<usize>(), smiley_tokens(&t));
            proptest::prop_assert_eq!(t.has_url, t.tokens.iter().any(|tok| tok == URL_TOKEN));
        }
    }
}
