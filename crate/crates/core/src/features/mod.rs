//! The fifty recipient-specific features, FT1 through FT50.
//!
//! | group | ids       | looks at                                   |
//! |-------|-----------|--------------------------------------------|
//! | 1     | FT1–FT9   | the tweet itself                           |
//! | 2     | FT10–FT13 | similarity to sender/recipient collections |
//! | 3     | FT14–FT35 | sender and recipient profiles              |
//! | 4     | FT36–FT41 | sender/recipient interaction               |
//! | 5     | FT42–FT43 | similarity to the recipient's last week    |
//! | 6     | FT44–FT45 | the recipient's neighbours                 |
//! | 7     | FT46–FT50 | wording                                    |
//!
//! All history-derived values only use events strictly before the instance
//! timestamp, and the incoming tweet is left out of every collection.

mod keywords;
mod scaling;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Instance, InstanceId, TokenId, UserProfile};
use crate::history::{HistoryQuery, Stream, UserHistoryIndex, DEFAULT_CAP, WEEK_SECS};
use crate::vectorspace::{avg_cosine, vectorize, IdfTable, SparseVector};

pub use keywords::{fallback_pos_counts, looks_like_noun_or_verb, KeywordConfig, ResolvedKeywords};
pub use scaling::{apply_scaling, fit_scaling, is_scaled, ScaleRange, ScalingParams, SCALED_FEATURES};

pub const NUM_FEATURES: usize = 50;

/// Feature number in `1..=50`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct FeatureId(u8);

impl FeatureId {
    pub fn new(n: u8) -> Option<Self> {
        (1..=NUM_FEATURES as u8).contains(&n).then_some(FeatureId(n))
    }

    pub fn from_index(i: usize) -> Self {
        assert!(i < NUM_FEATURES, "feature index {i} out of range");
        FeatureId(i as u8 + 1)
    }

    pub fn number(self) -> u8 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn all() -> impl Iterator<Item = FeatureId> {
        (1..=NUM_FEATURES as u8).map(FeatureId)
    }
}

impl TryFrom<u8> for FeatureId {
    type Error = String;

    fn try_from(n: u8) -> Result<Self, Self::Error> {
        FeatureId::new(n).ok_or_else(|| format!("feature id {n} outside 1..=50"))
    }
}

impl From<FeatureId> for u8 {
    fn from(id: FeatureId) -> u8 {
        id.0
    }
}

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FT{}", self.0)
    }
}

impl FromStr for FeatureId {
    type Err = String;

    /// Accepts `FT10`, `ft10` or `10`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s.strip_prefix("FT").or_else(|| s.strip_prefix("ft")).unwrap_or(s);
        let n: u8 = digits.parse().map_err(|_| format!("bad feature id {s:?}"))?;
        FeatureId::try_from(n)
    }
}

/// Shorthand for tests and tables: panics outside `1..=50`.
pub fn ft(n: u8) -> FeatureId {
    FeatureId::new(n).unwrap_or_else(|| panic!("FT{n} does not exist"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub instance_id: InstanceId,
    pub label: bool,
    /// FT1..FT50 in order.
    pub values: Vec<f64>,
    /// FT47–FT49 came from the fallback tagger rather than supplied counts.
    pub approximate_pos: bool,
}

impl FeatureVector {
    pub fn zeros(instance_id: InstanceId, label: bool) -> Self {
        FeatureVector {
            instance_id,
            label,
            values: vec![0.0; NUM_FEATURES],
            approximate_pos: false,
        }
    }

    pub fn get(&self, id: FeatureId) -> f64 {
        self.values[id.index()]
    }

    pub fn set(&mut self, id: FeatureId, x: f64) {
        self.values[id.index()] = x;
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// FT1–FT9 from the tweet record.
pub fn extract_group1(instance: &Instance) -> [f64; 9] {
    let t = &instance.tweet;
    [
        t.char_length as f64,
        flag(t.has_url),
        flag(!t.mentions.is_empty()),
        flag(t.has_hashtag),
        t.global_retweet_count as f64,
        t.global_favourite_count as f64,
        flag(t.has_exclamation),
        flag(t.has_photo),
        t.mentions.len() as f64,
    ]
}

fn profile_block(p: &UserProfile) -> [f64; 11] {
    [
        p.followers as f64,
        p.following as f64,
        p.statuses as f64,
        p.listed as f64,
        flag(p.verified),
        p.account_age_days as f64,
        flag(p.has_profile_url),
        p.klout.unwrap_or(0.0),
        p.klout_delta_1d.unwrap_or(0.0),
        p.klout_delta_7d.unwrap_or(0.0),
        p.klout_delta_30d.unwrap_or(0.0),
    ]
}

/// FT14–FT24 for the sender followed by FT25–FT35 for the recipient.
/// Missing Klout values read as 0.
pub fn extract_group3(sender: &UserProfile, recipient: &UserProfile) -> [f64; 22] {
    let mut out = [0.0; 22];
    out[..11].copy_from_slice(&profile_block(sender));
    out[11..].copy_from_slice(&profile_block(recipient));
    out
}

/// FT46–FT50. Supplied part-of-speech counts win over the fallback tagger;
/// the flag reports whether the fallback was used.
pub fn extract_group7(
    instance: &Instance,
    keywords: &ResolvedKeywords,
    vocab: Option<&crate::corpus::Vocabulary>,
) -> ([f64; 5], bool) {
    let tokens = &instance.tweet.tokens;
    let (pos, approximate) = match instance.tweet.pos_counts {
        Some(p) => (p, false),
        None => (fallback_pos_counts(tokens, vocab), true),
    };
    (
        [
            keywords.share_count(tokens) as f64,
            pos.nouns_verbs as f64,
            pos.definite_articles as f64,
            pos.indefinite_articles as f64,
            keywords.good_minus_bad(tokens) as f64,
        ],
        approximate,
    )
}

/// Which collection members get averaged against: the incoming tweet is
/// excluded and at most `cap` of the most recent events are used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollectionPolicy {
    pub cap: usize,
}

impl Default for CollectionPolicy {
    fn default() -> Self {
        CollectionPolicy { cap: DEFAULT_CAP }
    }
}

/// Immutable state shared by all extractions over one corpus.
pub struct FeatureContext<'a> {
    corpus: &'a Corpus,
    history: UserHistoryIndex<'a>,
    idf: &'a IdfTable,
    event_vectors: Vec<SparseVector>,
    keywords: ResolvedKeywords,
    policy: CollectionPolicy,
}

impl<'a> FeatureContext<'a> {
    pub fn new(
        corpus: &'a Corpus,
        idf: &'a IdfTable,
        keywords: &KeywordConfig,
        policy: CollectionPolicy,
    ) -> Self {
        let event_vectors = corpus
            .events
            .par_iter()
            .map(|e| vectorize(&e.tokens, idf))
            .collect();
        FeatureContext {
            corpus,
            history: UserHistoryIndex::from_corpus(corpus),
            idf,
            event_vectors,
            keywords: keywords.resolve(corpus.vocab.as_ref()),
            policy,
        }
    }

    pub fn history(&self) -> &UserHistoryIndex<'a> {
        &self.history
    }

    pub fn corpus(&self) -> &'a Corpus {
        self.corpus
    }

    fn similarity(
        &self,
        target: &SparseVector,
        user: u64,
        stream: Stream,
        instance: &Instance,
        window: Option<i64>,
    ) -> f64 {
        let q = HistoryQuery::before(instance.timestamp)
            .window(window)
            .cap(self.policy.cap)
            .excluding(instance.tweet_id);
        let members = self.history.collection(user, stream, q);
        avg_cosine(target, members.iter().map(|&i| &self.event_vectors[i]))
    }

    fn tweet_vector(&self, instance: &Instance) -> SparseVector {
        vectorize(&instance.tweet.tokens, self.idf)
    }

    /// FT10–FT13.
    pub fn extract_group2(&self, instance: &Instance) -> [f64; 4] {
        let t = self.tweet_vector(instance);
        self.group2_with(&t, instance)
    }

    fn group2_with(&self, t: &SparseVector, instance: &Instance) -> [f64; 4] {
        let (s, r) = (instance.sender_id, instance.recipient_id);
        [
            self.similarity(t, s, Stream::Posts, instance, None),
            self.similarity(t, r, Stream::Posts, instance, None),
            self.similarity(t, r, Stream::Seen, instance, None),
            self.similarity(t, r, Stream::Retweets, instance, None),
        ]
    }

    /// FT36–FT41. "Ever" means before the instance timestamp.
    pub fn extract_group4(&self, instance: &Instance) -> [f64; 6] {
        let (s, r, t) = (instance.sender_id, instance.recipient_id, instance.timestamp);
        let sr = self.history.interaction(s, r, t);
        let rs = self.history.interaction(r, s, t);
        [
            flag(instance.tweet.mentions.contains(&r)),
            flag(sr.a_mentioned_b > 0),
            flag(rs.a_mentioned_b > 0),
            flag(sr.a_retweeted_b > 0),
            flag(rs.a_retweeted_b > 0),
            rs.a_retweeted_b as f64,
        ]
    }

    /// FT42–FT43.
    pub fn extract_group5(&self, instance: &Instance) -> [f64; 2] {
        let t = self.tweet_vector(instance);
        self.group5_with(&t, instance)
    }

    fn group5_with(&self, t: &SparseVector, instance: &Instance) -> [f64; 2] {
        let r = instance.recipient_id;
        [
            self.similarity(t, r, Stream::Seen, instance, Some(WEEK_SECS)),
            self.similarity(t, r, Stream::Retweets, instance, Some(WEEK_SECS)),
        ]
    }

    /// FT44–FT45.
    pub fn extract_group6(&self, instance: &Instance) -> [f64; 2] {
        let author_is_neighbour = self
            .history
            .neighbours(instance.recipient_id)
            .is_some_and(|n| n.contains(&instance.author_id));
        [
            flag(author_is_neighbour),
            self.history
                .neighbour_retweets(instance.tweet_id, instance.recipient_id, instance.timestamp)
                as f64,
        ]
    }

    pub fn extract_group7(&self, instance: &Instance) -> ([f64; 5], bool) {
        extract_group7(instance, &self.keywords, self.corpus.vocab.as_ref())
    }

    /// Full FT1..FT50 vector. Profiles are guaranteed by corpus validation.
    pub fn assemble(&self, instance: &Instance) -> FeatureVector {
        let sender = self.corpus.profile(instance.sender_id).expect("validated sender");
        let recipient = self
            .corpus
            .profile(instance.recipient_id)
            .expect("validated recipient");
        let t = self.tweet_vector(instance);
        let (g7, approximate_pos) = self.extract_group7(instance);

        let mut values = Vec::with_capacity(NUM_FEATURES);
        values.extend(extract_group1(instance));
        values.extend(self.group2_with(&t, instance));
        values.extend(extract_group3(sender, recipient));
        values.extend(self.extract_group4(instance));
        values.extend(self.group5_with(&t, instance));
        values.extend(self.extract_group6(instance));
        values.extend(g7);
        debug_assert_eq!(values.len(), NUM_FEATURES);

        FeatureVector {
            instance_id: instance.instance_id,
            label: instance.label,
            values,
            approximate_pos,
        }
    }

    /// Vectors for `instances` in input order; runs in parallel.
    pub fn assemble_all(&self, instances: &[&Instance]) -> Vec<FeatureVector> {
        instances.par_iter().map(|i| self.assemble(i)).collect()
    }
}

/// IDF over one document per distinct tweet in the corpus.
pub fn background_idf(corpus: &Corpus) -> IdfTable<TokenId> {
    IdfTable::build(corpus.distinct_tweets())
}

#[cfg(test)]
mod tests;
