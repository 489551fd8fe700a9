//! Seeded synthetic corpora with a planted retweet model.
//!
//! Every user has a main topic and follows `neighbours_per_user` others,
//! mostly users sharing that topic. Users post topical tweets and share
//! (retweet) other users' tweets; each post or share reaches the poster's
//! followers as an incoming instance. Day 0 is a warm-up that produces
//! history but no instances.
//!
//! Instances are labelled in arrival order. For each one the generator
//! computes FT10, FT13, FT41 and FT44 exactly as the feature pipeline will
//! (same IDF, same collections) and draws the label from
//!
//! ```text
//! P(retweet) = sigmoid(b + s * (n10 + n13 + n41 + n44)),   n_i = [FT_i >= c_i]
//! b = logit(retweet_rate) - 3.2 * s
//! ```
//!
//! with `s = signal_strength`, so for large `s` a tweet is retweeted when
//! it is typical of its sender, resembles the recipient's retweets, comes
//! from a sender the recipient has retweeted before and was written by
//! someone the recipient follows. A positive label appends a
//! retweet by the recipient a little later, which feeds later values of
//! FT10, FT13 and FT41. With `s = 0` labels are independent of everything.
//!
//! Profile Klout scores are a log composite of reach and activity:
//! `klout = min(100, 8 ln(1 + followers) + 4 ln(1 + statuses))`.

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use super::{
    Action, Corpus, EncodedTweet, HistoryEvent, Instance, Timestamp, TokenId, TweetId, UserId, UserProfile,
    Vocabulary, NUM_ID, URL_ID,
};
use crate::error::{Error, Result};
use crate::features::{ft, FeatureId};
use crate::history::DEFAULT_CAP;
use crate::learner::sigmoid;
use crate::vectorspace::{avg_cosine, vectorize, IdfTable, SparseVector};

const DAY: i64 = 86_400;
const EPOCH: Timestamp = 1_400_000_000;
const POSTS_PER_DAY: f64 = 2.0;
const SHARES_PER_DAY: f64 = 0.5;
const ON_TOPIC: f64 = 0.85;
const TOPIC_WORD: f64 = 0.8;
const SAME_TOPIC_NEIGHBOURS: f64 = 0.7;
const SIMILARITY_STEP: f64 = 0.06;
const COMMON_WORDS: [&str; 12] = [
    "the", "a", "an", "rt", "share", "spread", "and", "to", "of", "is", "in", "on",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub num_recipients: usize,
    pub neighbours_per_user: usize,
    pub vocab_size: usize,
    pub topics: usize,
    pub days: u32,
    pub retweet_rate: f64,
    pub signal_strength: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            num_recipients: 100,
            neighbours_per_user: 8,
            vocab_size: 600,
            topics: 12,
            days: 30,
            retweet_rate: 0.2,
            signal_strength: 8.0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.num_recipients < 2 {
            return bad(format!(
                "num_recipients must be at least 2, got {}",
                self.num_recipients
            ));
        }
        if self.neighbours_per_user == 0 || self.neighbours_per_user >= self.num_recipients {
            return bad(format!(
                "neighbours_per_user must be in 1..{}, got {}",
                self.num_recipients, self.neighbours_per_user
            ));
        }
        if self.topics == 0 || self.vocab_size < self.topics {
            return bad(format!(
                "need topics >= 1 and vocab_size >= topics, got {} and {}",
                self.topics, self.vocab_size
            ));
        }
        if self.days == 0 {
            return bad("days must be positive".into());
        }
        if !(self.retweet_rate > 0.0 && self.retweet_rate < 1.0) {
            return bad(format!(
                "retweet_rate must lie in (0, 1), got {}",
                self.retweet_rate
            ));
        }
        if !(self.signal_strength.is_finite() && self.signal_strength >= 0.0) {
            return bad(format!(
                "signal_strength must be finite and non-negative, got {}",
                self.signal_strength
            ));
        }
        Ok(())
    }

    pub fn planted_model(&self) -> PlantedModel {
        let s = self.signal_strength;
        let term = |n: u8, coefficient: f64, threshold: f64| PlantedTerm {
            feature: ft(n),
            coefficient,
            threshold,
        };
        PlantedModel {
            terms: vec![
                term(10, s, SIMILARITY_STEP),
                term(13, s, SIMILARITY_STEP),
                term(41, s, 1.0),
                term(44, s, 1.0),
            ],
            intercept: logit(self.retweet_rate) - 3.2 * s,
        }
    }
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantedTerm {
    pub feature: FeatureId,
    pub coefficient: f64,
    /// The input is 1 when the raw value reaches this, else 0.
    pub threshold: f64,
}

impl PlantedTerm {
    fn input(&self, raw: f64) -> f64 {
        if raw >= self.threshold {
            1.0
        } else {
            0.0
        }
    }
}

/// The logistic model labels were drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedModel {
    pub terms: Vec<PlantedTerm>,
    pub intercept: f64,
}

impl PlantedModel {
    /// Log-odds of a retweet given raw FT1..FT50 values.
    pub fn logit(&self, values: &[f64]) -> f64 {
        self.intercept
            + self
                .terms
                .iter()
                .map(|t| t.coefficient * t.input(values[t.feature.index()]))
                .sum::<f64>()
    }

    fn logit_from(&self, raw: [f64; 4]) -> f64 {
        self.intercept
            + self
                .terms
                .iter()
                .zip(raw)
                .map(|(t, x)| t.coefficient * t.input(x))
                .sum::<f64>()
    }

    /// Log-odds among instances that survive dataset construction, before
    /// rebalancing. Negatives from senders the recipient never retweeted are
    /// dropped there, so such instances are certainly positive.
    pub fn surviving_logit(&self, values: &[f64]) -> f64 {
        if values[ft(40).index()] == 0.0 {
            f64::INFINITY
        } else {
            self.logit(values)
        }
    }

    /// Bayes decision on a rebalanced sample of surviving instances:
    /// `prior_shift = logit(sample rate) - logit(surviving rate)`.
    pub fn classify(&self, values: &[f64], prior_shift: f64) -> bool {
        self.surviving_logit(values) + prior_shift >= 0.0
    }
}

struct Post {
    id: TweetId,
    author: UserId,
    ts: Timestamp,
    tokens: Vec<TokenId>,
    mentions: Vec<UserId>,
    char_length: u32,
    has_hashtag: bool,
    has_exclamation: bool,
    has_photo: bool,
    global_retweets: u64,
    global_favourites: u64,
}

struct Share {
    user: UserId,
    post: usize,
    ts: Timestamp,
}

struct Arrival {
    ts: Timestamp,
    recipient: UserId,
    sender: UserId,
    post: usize,
}

/// Time-ordered stream entries for one user, keyed like corpus event order.
#[derive(Default)]
struct Stream {
    entries: Vec<((Timestamp, TweetId, Action), usize)>,
}

impl Stream {
    fn insert(&mut self, key: (Timestamp, TweetId, Action), post: usize) {
        let at = self.entries.partition_point(|(k, _)| *k <= key);
        self.entries.insert(at, (key, post));
    }

    fn similarity(
        &self,
        target: &SparseVector,
        vectors: &[SparseVector],
        before: Timestamp,
        exclude: TweetId,
    ) -> f64 {
        let hi = self.entries.partition_point(|((ts, _, _), _)| *ts < before);
        let mut picked: Vec<usize> = self.entries[..hi]
            .iter()
            .rev()
            .filter(|((_, id, _), _)| *id != exclude)
            .take(DEFAULT_CAP)
            .map(|(_, p)| *p)
            .collect();
        picked.reverse();
        avg_cosine(target, picked.iter().map(|&p| &vectors[p]))
    }
}

/// Post and retweet streams plus retweet-by-source counts, updated as
/// labels are drawn.
#[derive(Default)]
struct LiveHistory {
    posts: HashMap<UserId, Stream>,
    retweets: HashMap<UserId, Stream>,
    retweeted: HashMap<(UserId, UserId), Vec<Timestamp>>,
}

impl LiveHistory {
    fn record_retweet(&mut self, user: UserId, source: UserId, post: usize, tweet: TweetId, ts: Timestamp) {
        let key = (ts, tweet, Action::Retweeted);
        self.posts.entry(user).or_default().insert(key, post);
        self.retweets.entry(user).or_default().insert(key, post);
        let times = self.retweeted.entry((user, source)).or_default();
        let at = times.partition_point(|&t| t <= ts);
        times.insert(at, ts);
    }
}

/// Generates a corpus with vocabulary. The planted model is
/// `config.planted_model()`.
pub fn generate_synthetic(config: &SynthConfig, seed: u64) -> Result<Corpus> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = config.num_recipients;
    let users: Vec<UserId> = (1..=n as u64).collect();

    let mut vocab = Vocabulary::default();
    let common: Vec<TokenId> = COMMON_WORDS.iter().map(|w| vocab.intern(w)).collect();
    let topic_words: Vec<Vec<TokenId>> = (0..config.topics)
        .map(|t| {
            let size = config.vocab_size / config.topics + usize::from(t < config.vocab_size % config.topics);
            (0..size).map(|j| vocab.intern(&format!("t{t}w{j}"))).collect()
        })
        .collect();

    let main_topic: Vec<usize> = users.iter().map(|_| rng.random_range(0..config.topics)).collect();
    let topic_of = |u: UserId| main_topic[(u - 1) as usize];
    let neighbours: Vec<BTreeSet<UserId>> = users
        .iter()
        .map(|&u| {
            let (same, other): (Vec<UserId>, Vec<UserId>) = users
                .iter()
                .copied()
                .filter(|&v| v != u)
                .partition(|&v| topic_of(v) == topic_of(u));
            let k = config.neighbours_per_user;
            let want_same = ((k as f64 * SAME_TOPIC_NEIGHBOURS).round() as usize).min(same.len());
            let take_same = want_same.max(k.saturating_sub(other.len()));
            let mut chosen = BTreeSet::new();
            for i in sample(&mut rng, same.len(), take_same) {
                chosen.insert(same[i]);
            }
            for i in sample(&mut rng, other.len(), k - take_same) {
                chosen.insert(other[i]);
            }
            chosen
        })
        .collect();
    let mut followers: Vec<Vec<UserId>> = vec![Vec::new(); n];
    for (&u, ns) in users.iter().zip(&neighbours) {
        for &v in ns {
            followers[(v - 1) as usize].push(u);
        }
    }

    let posts_dist = Poisson::new(POSTS_PER_DAY).expect("positive rate");
    let shares_dist = Poisson::new(SHARES_PER_DAY).expect("positive rate");
    let popularity = Poisson::new(3.0).expect("positive rate");

    let mut posts: Vec<Post> = Vec::new();
    for day in 0..=config.days as i64 {
        for &u in &users {
            let count = posts_dist.sample(&mut rng) as usize;
            for _ in 0..count {
                let ts = EPOCH + day * DAY + rng.random_range(0..DAY);
                let topic = if rng.random::<f64>() < ON_TOPIC {
                    topic_of(u)
                } else {
                    rng.random_range(0..config.topics)
                };
                let len = rng.random_range(6..=12);
                let mut tokens: Vec<TokenId> = (0..len)
                    .map(|_| {
                        let words = &topic_words[topic];
                        if rng.random::<f64>() < TOPIC_WORD {
                            words[rng.random_range(0..words.len())]
                        } else {
                            common[rng.random_range(0..common.len())]
                        }
                    })
                    .collect();
                if rng.random::<f64>() < 0.3 {
                    tokens.push(URL_ID);
                }
                if rng.random::<f64>() < 0.1 {
                    tokens.insert(rng.random_range(0..tokens.len()), NUM_ID);
                }
                let mentions = if rng.random::<f64>() < 0.1 {
                    let ns: Vec<UserId> = neighbours[(u - 1) as usize].iter().copied().collect();
                    vec![ns[rng.random_range(0..ns.len())]]
                } else {
                    Vec::new()
                };
                let char_length = tokens
                    .iter()
                    .map(|&t| vocab.word(t).map_or(0, str::len) + 1)
                    .sum::<usize>()
                    .saturating_sub(1) as u32;
                posts.push(Post {
                    id: 0,
                    author: u,
                    ts,
                    tokens,
                    mentions,
                    char_length,
                    has_hashtag: rng.random::<f64>() < 0.2,
                    has_exclamation: rng.random::<f64>() < 0.15,
                    has_photo: rng.random::<f64>() < 0.2,
                    global_retweets: popularity.sample(&mut rng) as u64,
                    global_favourites: popularity.sample(&mut rng) as u64,
                });
            }
        }
    }
    posts.sort_by_key(|p| (p.ts, p.author));
    for (i, p) in posts.iter_mut().enumerate() {
        p.id = i as u64 + 1;
    }
    let mut posts_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, p) in posts.iter().enumerate() {
        posts_of[(p.author - 1) as usize].push(i);
    }

    let mut shares: Vec<Share> = Vec::new();
    let warmup_end = EPOCH + DAY;
    for day in 1..=config.days as i64 {
        for &u in &users {
            let count = shares_dist.sample(&mut rng) as usize;
            for _ in 0..count {
                let ts = EPOCH + day * DAY + rng.random_range(0..DAY);
                let available = posts.partition_point(|p| p.ts < ts);
                let mut pick = None;
                for _ in 0..8 {
                    let i = rng.random_range(available.saturating_sub(4 * n)..available);
                    if posts[i].author == u {
                        continue;
                    }
                    let on_topic = posts[i]
                        .tokens
                        .iter()
                        .any(|t| topic_words[topic_of(u)].contains(t));
                    pick = Some(i);
                    if on_topic {
                        break;
                    }
                }
                if let Some(post) = pick {
                    shares.push(Share { user: u, post, ts });
                }
            }
        }
    }

    let mut events: Vec<HistoryEvent> = posts
        .iter()
        .map(|p| HistoryEvent {
            user_id: p.author,
            tweet_id: p.id,
            action: Action::Authored,
            timestamp: p.ts,
            tokens: p.tokens.clone(),
            mentions: p.mentions.clone(),
            source_user: None,
        })
        .collect();
    events.extend(shares.iter().map(|s| HistoryEvent {
        user_id: s.user,
        tweet_id: posts[s.post].id,
        action: Action::Retweeted,
        timestamp: s.ts,
        tokens: posts[s.post].tokens.clone(),
        mentions: posts[s.post].mentions.clone(),
        source_user: Some(posts[s.post].author),
    }));

    let mut arrivals: Vec<Arrival> = Vec::new();
    let mut delivered: HashSet<(UserId, TweetId)> = HashSet::new();
    let mut outgoing: Vec<(Timestamp, UserId, usize)> = posts
        .iter()
        .enumerate()
        .map(|(i, p)| (p.ts, p.author, i))
        .chain(shares.iter().map(|s| (s.ts, s.user, s.post)))
        .collect();
    outgoing.sort_unstable();
    for (ts, sender, post) in outgoing {
        for &r in &followers[(sender - 1) as usize] {
            if r == posts[post].author || !delivered.insert((r, posts[post].id)) {
                continue;
            }
            let at = ts + rng.random_range(1..=600);
            events.push(HistoryEvent {
                user_id: r,
                tweet_id: posts[post].id,
                action: Action::Seen,
                timestamp: at,
                tokens: posts[post].tokens.clone(),
                mentions: posts[post].mentions.clone(),
                source_user: Some(sender),
            });
            if at >= warmup_end {
                arrivals.push(Arrival {
                    ts: at,
                    recipient: r,
                    sender,
                    post,
                });
            }
        }
    }
    arrivals.sort_by_key(|a| (a.ts, a.recipient, posts[a.post].id));

    let idf = IdfTable::build(posts.iter().map(|p| &p.tokens));
    let vectors: Vec<SparseVector> = posts.iter().map(|p| vectorize(&p.tokens, &idf)).collect();
    let mut state = LiveHistory::default();
    for (p, post) in posts.iter().enumerate() {
        let key = (post.ts, post.id, Action::Authored);
        state.posts.entry(post.author).or_default().insert(key, p);
    }
    for s in &shares {
        state.record_retweet(s.user, posts[s.post].author, s.post, posts[s.post].id, s.ts);
    }

    let planted = config.planted_model();
    let empty = Stream::default();
    let mut instances = Vec::with_capacity(arrivals.len());
    for (i, a) in arrivals.iter().enumerate() {
        let p = &posts[a.post];
        let target = &vectors[a.post];
        let ft10 = state
            .posts
            .get(&a.sender)
            .unwrap_or(&empty)
            .similarity(target, &vectors, a.ts, p.id);
        let ft13 = state
            .retweets
            .get(&a.recipient)
            .unwrap_or(&empty)
            .similarity(target, &vectors, a.ts, p.id);
        let ft41 = state
            .retweeted
            .get(&(a.recipient, a.sender))
            .map_or(0, |ts| ts.partition_point(|&t| t < a.ts)) as f64;
        let ft44 = if neighbours[(a.recipient - 1) as usize].contains(&p.author) {
            1.0
        } else {
            0.0
        };
        let prob = sigmoid(planted.logit_from([ft10, ft13, ft41, ft44]));
        let label = rng.random::<f64>() < prob;
        let delay = rng.random_range(60..=3600);
        if label {
            let ts = a.ts + delay;
            state.record_retweet(a.recipient, a.sender, a.post, p.id, ts);
            events.push(HistoryEvent {
                user_id: a.recipient,
                tweet_id: p.id,
                action: Action::Retweeted,
                timestamp: ts,
                tokens: p.tokens.clone(),
                mentions: p.mentions.clone(),
                source_user: Some(a.sender),
            });
        }
        instances.push(Instance {
            instance_id: i as u64 + 1,
            tweet_id: p.id,
            author_id: p.author,
            sender_id: a.sender,
            recipient_id: a.recipient,
            timestamp: a.ts,
            label,
            tweet: EncodedTweet {
                tokens: p.tokens.clone(),
                char_length: p.char_length,
                has_url: p.tokens.contains(&URL_ID),
                has_hashtag: p.has_hashtag,
                has_exclamation: p.has_exclamation,
                has_photo: p.has_photo,
                mentions: p.mentions.clone(),
                global_retweet_count: p.global_retweets,
                global_favourite_count: p.global_favourites,
                pos_counts: None,
            },
        });
    }

    let delta = Normal::new(0.0, 1.0).expect("valid normal");
    let profiles: Vec<UserProfile> = users
        .iter()
        .map(|&u| {
            let idx = (u - 1) as usize;
            let followers_count = followers[idx].len() as u64 * 40 + rng.random_range(0..400);
            let statuses = posts_of[idx].len() as u64 + rng.random_range(0..2000);
            let klout =
                (8.0 * (1.0 + followers_count as f64).ln() + 4.0 * (1.0 + statuses as f64).ln()).min(100.0);
            let mut round = |scale: f64| (delta.sample(&mut rng) * scale * 100.0).round() / 100.0;
            let (d1, d7, d30) = (round(0.5), round(1.5), round(3.0));
            UserProfile {
                user_id: u,
                followers: followers_count,
                following: neighbours[idx].len() as u64,
                statuses,
                listed: rng.random_range(0..50),
                verified: rng.random::<f64>() < 0.05,
                account_age_days: rng.random_range(100..3000),
                has_profile_url: rng.random::<bool>(),
                klout: Some((klout * 100.0).round() / 100.0),
                klout_delta_1d: Some(d1),
                klout_delta_7d: Some(d7),
                klout_delta_30d: Some(d30),
                neighbours: neighbours[idx].clone(),
            }
        })
        .collect();

    Corpus::new(profiles, events, instances, Some(vocab))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::dataset::is_excluded_negative;
    use crate::experiments::evaluation::Metrics;
    use crate::features::{background_idf, CollectionPolicy, FeatureContext, KeywordConfig};

    fn small(signal: f64) -> SynthConfig {
        SynthConfig {
            num_recipients: 30,
            neighbours_per_user: 5,
            days: 12,
            signal_strength: signal,
            ..SynthConfig::default()
        }
    }

    /// Feature vectors of the instances that survive the easy/inactive
    /// negative filter.
    fn surviving_vectors(corpus: &Corpus) -> Vec<crate::features::FeatureVector> {
        let idf = background_idf(corpus);
        let ctx = FeatureContext::new(
            corpus,
            &idf,
            &KeywordConfig::default(),
            CollectionPolicy::default(),
        );
        let kept: Vec<&Instance> = corpus
            .instances
            .iter()
            .filter(|i| !is_excluded_negative(ctx.history(), i))
            .collect();
        ctx.assemble_all(&kept)
    }

    /// Bayes F1 on a balanced sample: all surviving positives plus an equal
    /// number of evenly spaced surviving negatives.
    fn balanced_bayes_f1(corpus: &Corpus, planted: &PlantedModel) -> f64 {
        let vs = surviving_vectors(corpus);
        let (pos, neg): (Vec<_>, Vec<_>) = vs.iter().partition(|v| v.label);
        let take = pos.len().min(neg.len());
        let shift = -logit(pos.len() as f64 / vs.len() as f64);
        Metrics::from_predictions(
            (0..take)
                .flat_map(|i| [pos[i * pos.len() / take], neg[i * neg.len() / take]])
                .map(|v| (planted.classify(&v.values, shift), v.label)),
        )
        .f1
    }

    #[test]
    fn config_validation() {
        assert!(SynthConfig::default().validate().is_ok());
        for bad in [
            SynthConfig {
                retweet_rate: 1.0,
                ..small(1.0)
            },
            SynthConfig {
                num_recipients: 1,
                ..small(1.0)
            },
            SynthConfig {
                neighbours_per_user: 30,
                ..small(1.0)
            },
            SynthConfig {
                topics: 0,
                ..small(1.0)
            },
            SynthConfig {
                days: 0,
                ..small(1.0)
            },
            SynthConfig {
                signal_strength: f64::NAN,
                ..small(1.0)
            },
        ] {
            assert!(generate_synthetic(&bad, 0).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn same_seed_same_corpus() {
        let a = generate_synthetic(&small(8.0), 7).unwrap();
        let b = generate_synthetic(&small(8.0), 7).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic(&small(8.0), 8).unwrap();
        assert_ne!(a, c);
        assert!(a.validate().is_ok());
        assert!(!a.instances.is_empty());
    }

    #[test]
    fn generator_features_match_pipeline() {
        let config = small(8.0);
        let corpus = generate_synthetic(&config, 3).unwrap();
        let planted = config.planted_model();
        let idf = background_idf(&corpus);
        let ctx = FeatureContext::new(
            &corpus,
            &idf,
            &KeywordConfig::default(),
            CollectionPolicy::default(),
        );
        for inst in corpus.instances.iter().step_by(17) {
            let v = ctx.assemble(inst);
            assert!(planted.logit(&v.values).is_finite());
        }
    }

    #[test]
    fn zero_signal_labels_ignore_features() {
        let config = SynthConfig {
            days: 20,
            ..small(0.0)
        };
        let corpus = generate_synthetic(&config, 11).unwrap();
        let idf = background_idf(&corpus);
        let ctx = FeatureContext::new(
            &corpus,
            &idf,
            &KeywordConfig::default(),
            CollectionPolicy::default(),
        );
        let all: Vec<&Instance> = corpus.instances.iter().collect();
        let vs = ctx.assemble_all(&all);
        let labels: Vec<f64> = vs.iter().map(|v| f64::from(u8::from(v.label))).collect();
        let rate = labels.iter().sum::<f64>() / labels.len() as f64;
        assert!((rate - config.retweet_rate).abs() < 0.03, "{rate}");
        for id in [10, 13, 44] {
            let column: Vec<f64> = vs.iter().map(|v| v.get(ft(id))).collect();
            let r = crate::experiments::ranking::pearson(&column, &labels).unwrap();
            assert!(r.abs() < 0.05, "FT{id} r={r}");
        }
    }

    #[test]
    fn strong_signal_bayes_rule_and_monotonicity() {
        let mut previous = 0.0;
        for signal in [2.0, 4.0, 8.0] {
            let config = small(signal);
            let corpus = generate_synthetic(&config, 5).unwrap();
            let f1 = balanced_bayes_f1(&corpus, &config.planted_model());
            assert!(f1 >= previous - 1e-9, "signal {signal}: {f1} < {previous}");
            previous = f1;
        }
        assert!(previous >= 0.95, "Bayes F1 at signal 8 is {previous}");
    }
}
