//! Encoded dataset records and their line-delimited JSON files.
//!
//! A corpus is three record files (profiles, history events, instances)
//! plus an optional vocabulary mapping token ids back to strings. Token ids
//! 0..=5 are reserved for the pseudo-tokens so pseudo-class membership can
//! be tested without the vocabulary. Field names are listed in
//! `docs/FORMATS.md`.

pub mod synth;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textnorm::{NormalizedTweet, SmileyClass, PSEUDO_TOKENS};

pub type UserId = u64;
pub type TweetId = u64;
pub type InstanceId = u64;
pub type TokenId = u32;
/// Seconds since the Unix epoch, UTC.
pub type Timestamp = i64;

pub const URL_ID: TokenId = 0;
pub const NUM_ID: TokenId = 1;
pub const LOVE_ID: TokenId = 2;
pub const POSITIVE_ID: TokenId = 3;
pub const NEGATIVE_ID: TokenId = 4;
pub const NEUTRAL_ID: TokenId = 5;
pub const RESERVED_IDS: TokenId = 6;

pub fn is_pseudo_id(id: TokenId) -> bool {
    id < RESERVED_IDS
}

pub fn smiley_id(class: SmileyClass) -> TokenId {
    match class {
        SmileyClass::Love => LOVE_ID,
        SmileyClass::Positive => POSITIVE_ID,
        SmileyClass::Negative => NEGATIVE_ID,
        SmileyClass::Neutral => NEUTRAL_ID,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserProfile {
    pub user_id: UserId,
    pub followers: u64,
    pub following: u64,
    pub statuses: u64,
    pub listed: u64,
    pub verified: bool,
    pub account_age_days: u64,
    pub has_profile_url: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub klout: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub klout_delta_1d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub klout_delta_7d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub klout_delta_30d: Option<f64>,
    /// Users this user follows.
    #[serde(default)]
    pub neighbours: BTreeSet<UserId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Authored,
    Retweeted,
    Seen,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEvent {
    pub user_id: UserId,
    pub tweet_id: TweetId,
    pub action: Action,
    pub timestamp: Timestamp,
    pub tokens: Vec<TokenId>,
    /// Accounts mentioned by the tweet; may lie outside the corpus.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mentions: Vec<UserId>,
    /// For `retweeted` and `seen`: the user the tweet was received from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_user: Option<UserId>,
}

impl HistoryEvent {
    fn sort_key(&self) -> (Timestamp, TweetId, UserId, Action) {
        (self.timestamp, self.tweet_id, self.user_id, self.action)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosCounts {
    pub nouns_verbs: u32,
    pub definite_articles: u32,
    pub indefinite_articles: u32,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EncodedTweet {
    pub tokens: Vec<TokenId>,
    pub char_length: u32,
    pub has_url: bool,
    pub has_hashtag: bool,
    pub has_exclamation: bool,
    pub has_photo: bool,
    /// Accounts mentioned by the tweet; may lie outside the corpus.
    #[serde(default)]
    pub mentions: Vec<UserId>,
    pub global_retweet_count: u64,
    pub global_favourite_count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos_counts: Option<PosCounts>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub instance_id: InstanceId,
    pub tweet_id: TweetId,
    pub author_id: UserId,
    pub sender_id: UserId,
    pub recipient_id: UserId,
    pub timestamp: Timestamp,
    #[serde(with = "label_01")]
    pub label: bool,
    pub tweet: EncodedTweet,
}

mod label_01 {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(label: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(u8::from(*label))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(de::Error::custom(format!("label must be 0 or 1, got {other}"))),
        }
    }
}

/// Token id ↔ string table. Ids 0..=5 are always the pseudo-tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    ids: HashMap<String, TokenId>,
}

impl Default for Vocabulary {
    fn default() -> Self {
        let mut vocab = Vocabulary {
            words: Vec::new(),
            ids: HashMap::new(),
        };
        for token in PSEUDO_TOKENS {
            vocab.intern(token);
        }
        vocab
    }
}

impl Vocabulary {
    pub fn intern(&mut self, word: &str) -> TokenId {
        if let Some(&id) = self.ids.get(word) {
            return id;
        }
        let id = self.words.len() as TokenId;
        self.words.push(word.to_string());
        self.ids.insert(word.to_string(), id);
        id
    }

    pub fn id(&self, word: &str) -> Option<TokenId> {
        self.ids.get(word).copied()
    }

    pub fn word(&self, id: TokenId) -> Option<&str> {
        self.words.get(id as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Encodes a normalized tweet. `resolve_mention` maps account names to user ids.
    pub fn encode_tweet(
        &mut self,
        tweet: &NormalizedTweet,
        mut resolve_mention: impl FnMut(&str) -> UserId,
    ) -> EncodedTweet {
        EncodedTweet {
            tokens: tweet.tokens.iter().map(|t| self.intern(t)).collect(),
            char_length: tweet.char_length as u32,
            has_url: tweet.has_url,
            has_hashtag: tweet.has_hashtag,
            has_exclamation: tweet.has_exclamation,
            has_photo: tweet.has_photo,
            mentions: tweet.mentions.iter().map(|m| resolve_mention(m)).collect(),
            ..EncodedTweet::default()
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut vocab = Vocabulary {
            words: Vec::new(),
            ids: HashMap::new(),
        };
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let word = line.map_err(|e| Error::io(path, e))?;
            if i < PSEUDO_TOKENS.len() && word != PSEUDO_TOKENS[i] {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: format!("reserved id {i} must be {}", PSEUDO_TOKENS[i]),
                });
            }
            if vocab.ids.contains_key(&word) {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: format!("duplicate token {word:?}"),
                });
            }
            vocab.intern(&word);
        }
        if vocab.words.len() < PSEUDO_TOKENS.len() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: vocab.words.len() + 1,
                message: "vocabulary is missing the reserved pseudo-tokens".into(),
            });
        }
        Ok(vocab)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        for word in &self.words {
            writeln!(out, "{word}").map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusPaths {
    pub profiles: PathBuf,
    pub history: PathBuf,
    pub instances: PathBuf,
    pub vocab: Option<PathBuf>,
}

impl CorpusPaths {
    pub const PROFILES: &'static str = "profiles.jsonl";
    pub const HISTORY: &'static str = "history.jsonl";
    pub const INSTANCES: &'static str = "instances.jsonl";
    pub const VOCAB: &'static str = "vocab.txt";

    /// Standard file names inside `dir`; the vocabulary is used only if present.
    pub fn in_dir(dir: &Path) -> Self {
        let vocab = dir.join(Self::VOCAB);
        CorpusPaths {
            profiles: dir.join(Self::PROFILES),
            history: dir.join(Self::HISTORY),
            instances: dir.join(Self::INSTANCES),
            vocab: vocab.exists().then_some(vocab),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Corpus {
    pub profiles: BTreeMap<UserId, UserProfile>,
    /// Sorted by (timestamp, tweet_id, user_id, action).
    pub events: Vec<HistoryEvent>,
    pub instances: Vec<Instance>,
    pub vocab: Option<Vocabulary>,
}

impl Corpus {
    /// Sorts events and checks referential integrity.
    pub fn new(
        profiles: impl IntoIterator<Item = UserProfile>,
        mut events: Vec<HistoryEvent>,
        instances: Vec<Instance>,
        vocab: Option<Vocabulary>,
    ) -> Result<Self> {
        events.sort_by_key(HistoryEvent::sort_key);
        let corpus = Corpus {
            profiles: profiles.into_iter().map(|p| (p.user_id, p)).collect(),
            events,
            instances,
            vocab,
        };
        corpus.validate()?;
        Ok(corpus)
    }

    pub fn validate(&self) -> Result<()> {
        let known = |id: UserId, role: &'static str, context: String| -> Result<()> {
            if self.profiles.contains_key(&id) {
                Ok(())
            } else {
                Err(Error::DanglingUser {
                    user_id: id,
                    role,
                    context,
                })
            }
        };
        for p in self.profiles.values() {
            if p.neighbours.contains(&p.user_id) {
                return Err(Error::InvalidConfig(format!(
                    "user {} lists itself as a neighbour",
                    p.user_id
                )));
            }
            if let Some(k) = p.klout {
                if !(0.0..=100.0).contains(&k) {
                    return Err(Error::InvalidConfig(format!(
                        "user {} has klout {k} outside [0, 100]",
                        p.user_id
                    )));
                }
            }
            for &n in &p.neighbours {
                known(n, "neighbour", format!("of user {}", p.user_id))?;
            }
        }
        for e in &self.events {
            known(e.user_id, "event user", format!("tweet {}", e.tweet_id))?;
            if let Some(s) = e.source_user {
                known(s, "event source", format!("tweet {}", e.tweet_id))?;
            }
        }
        let mut ids = HashSet::with_capacity(self.instances.len());
        for inst in &self.instances {
            if !ids.insert(inst.instance_id) {
                return Err(Error::DuplicateInstance(inst.instance_id));
            }
            let ctx = || format!("instance {}", inst.instance_id);
            known(inst.sender_id, "sender", ctx())?;
            known(inst.recipient_id, "recipient", ctx())?;
            known(inst.author_id, "author", ctx())?;
            if inst.sender_id == inst.recipient_id {
                return Err(Error::InvalidConfig(format!(
                    "instance {} has sender equal to recipient",
                    inst.instance_id
                )));
            }
        }
        Ok(())
    }

    pub fn profile(&self, user: UserId) -> Option<&UserProfile> {
        self.profiles.get(&user)
    }

    pub fn instance_index(&self) -> HashMap<InstanceId, usize> {
        self.instances
            .iter()
            .enumerate()
            .map(|(i, inst)| (inst.instance_id, i))
            .collect()
    }

    /// One token sequence per distinct tweet id across events and instances,
    /// the default background collection for IDF estimation.
    pub fn distinct_tweets(&self) -> Vec<&[TokenId]> {
        let mut by_id: BTreeMap<TweetId, &[TokenId]> = BTreeMap::new();
        for e in &self.events {
            by_id.entry(e.tweet_id).or_insert(&e.tokens);
        }
        for inst in &self.instances {
            by_id.entry(inst.tweet_id).or_insert(&inst.tweet.tokens);
        }
        by_id.into_values().collect()
    }
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

fn write_jsonl<'a, T: Serialize + 'a>(path: &Path, records: impl IntoIterator<Item = &'a T>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for record in records {
        serde_json::to_writer(&mut out, record).map_err(|e| Error::io(path, e.into()))?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn load_corpus(paths: &CorpusPaths) -> Result<Corpus> {
    let profiles: Vec<UserProfile> = read_jsonl(&paths.profiles)?;
    let events: Vec<HistoryEvent> = read_jsonl(&paths.history)?;
    let instances: Vec<Instance> = read_jsonl(&paths.instances)?;
    let vocab = paths.vocab.as_deref().map(Vocabulary::load).transpose()?;
    let mut seen = HashSet::new();
    for p in &profiles {
        if !seen.insert(p.user_id) {
            return Err(Error::InvalidConfig(format!(
                "{}: duplicate profile for user {}",
                paths.profiles.display(),
                p.user_id
            )));
        }
    }
    Corpus::new(profiles, events, instances, vocab)
}

pub fn write_corpus(corpus: &Corpus, paths: &CorpusPaths) -> Result<()> {
    for path in [&paths.profiles, &paths.history, &paths.instances] {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            if !parent.is_dir() {
                return Err(Error::io(
                    parent,
                    std::io::Error::new(std::io::ErrorKind::NotFound, "output directory does not exist"),
                ));
            }
        }
    }
    write_jsonl(&paths.profiles, corpus.profiles.values())?;
    write_jsonl(&paths.history, &corpus.events)?;
    write_jsonl(&paths.instances, &corpus.instances)?;
    if let (Some(vocab), Some(path)) = (&corpus.vocab, &paths.vocab) {
        vocab.write(path)?;
    }
    Ok(())
}

/// Convenience for directories laid out with [`CorpusPaths::in_dir`].
pub fn write_corpus_dir(corpus: &Corpus, dir: &Path) -> Result<()> {
    let mut paths = CorpusPaths::in_dir(dir);
    if corpus.vocab.is_some() {
        paths.vocab = Some(dir.join(CorpusPaths::VOCAB));
    } else if let Some(stale) = paths.vocab.take() {
        fs::remove_file(&stale).map_err(|e| Error::io(&stale, e))?;
    }
    write_corpus(corpus, &paths)
}

pub fn load_corpus_dir(dir: &Path) -> Result<Corpus> {
    load_corpus(&CorpusPaths::in_dir(dir))
}
