//! Time-aware per-user views over history events.
//!
//! Every query takes a cut-off time and only ever looks at events with a
//! timestamp strictly before it; this is what keeps future information out
//! of the features.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::corpus::{Action, Corpus, HistoryEvent, Timestamp, TokenId, TweetId, UserId, UserProfile};

pub const WEEK_SECS: i64 = 7 * 24 * 3600;
pub const DEFAULT_CAP: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// Authored and retweeted.
    Posts,
    Retweets,
    Seen,
}

/// Parameters of a collection query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HistoryQuery {
    pub before: Timestamp,
    /// Restricts to `[before - window, before)`.
    pub window: Option<i64>,
    pub cap: usize,
    /// Tweet to leave out of the collection (the incoming tweet itself).
    pub exclude: Option<TweetId>,
}

impl HistoryQuery {
    pub fn before(before: Timestamp) -> Self {
        HistoryQuery {
            before,
            window: None,
            cap: DEFAULT_CAP,
            exclude: None,
        }
    }

    pub fn window(mut self, window: Option<i64>) -> Self {
        self.window = window;
        self
    }

    pub fn cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn excluding(mut self, tweet: TweetId) -> Self {
        self.exclude = Some(tweet);
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Interaction {
    pub a_mentioned_b: usize,
    pub a_retweeted_b: usize,
}

#[derive(Debug, Default)]
struct UserStreams {
    posts: Vec<usize>,
    retweets: Vec<usize>,
    seen: Vec<usize>,
}

pub struct UserHistoryIndex<'a> {
    events: &'a [HistoryEvent],
    profiles: &'a BTreeMap<UserId, UserProfile>,
    users: HashMap<UserId, UserStreams>,
    mentions: HashMap<(UserId, UserId), Vec<Timestamp>>,
    retweeted: HashMap<(UserId, UserId), Vec<Timestamp>>,
    retweeters: HashMap<TweetId, Vec<(Timestamp, UserId)>>,
}

impl<'a> UserHistoryIndex<'a> {
    pub fn from_corpus(corpus: &'a Corpus) -> Self {
        Self::build(&corpus.events, &corpus.profiles)
    }

    /// `events` must be sorted by timestamp, as `Corpus` guarantees.
    pub fn build(events: &'a [HistoryEvent], profiles: &'a BTreeMap<UserId, UserProfile>) -> Self {
        debug_assert!(events.windows(2).all(|w| w[0].timestamp <= w[1].timestamp));
        let mut users: HashMap<UserId, UserStreams> = HashMap::new();
        let mut mentions: HashMap<(UserId, UserId), Vec<Timestamp>> = HashMap::new();
        let mut retweeted: HashMap<(UserId, UserId), Vec<Timestamp>> = HashMap::new();
        let mut retweeters: HashMap<TweetId, Vec<(Timestamp, UserId)>> = HashMap::new();

        for (i, e) in events.iter().enumerate() {
            let streams = users.entry(e.user_id).or_default();
            match e.action {
                Action::Authored => {
                    streams.posts.push(i);
                    for &m in &e.mentions {
                        mentions.entry((e.user_id, m)).or_default().push(e.timestamp);
                    }
                }
                Action::Retweeted => {
                    streams.posts.push(i);
                    streams.retweets.push(i);
                    if let Some(src) = e.source_user {
                        retweeted.entry((e.user_id, src)).or_default().push(e.timestamp);
                    }
                    retweeters
                        .entry(e.tweet_id)
                        .or_default()
                        .push((e.timestamp, e.user_id));
                }
                Action::Seen => streams.seen.push(i),
            }
        }

        UserHistoryIndex {
            events,
            profiles,
            users,
            mentions,
            retweeted,
            retweeters,
        }
    }

    pub fn events(&self) -> &'a [HistoryEvent] {
        self.events
    }

    /// Indices into the event slice, oldest first, of the most recent
    /// `q.cap` matching events.
    pub fn collection(&self, user: UserId, stream: Stream, q: HistoryQuery) -> Vec<usize> {
        let Some(streams) = self.users.get(&user) else {
            return Vec::new();
        };
        let list = match stream {
            Stream::Posts => &streams.posts,
            Stream::Retweets => &streams.retweets,
            Stream::Seen => &streams.seen,
        };
        let ts = |&i: &usize| self.events[i].timestamp;
        let hi = list.partition_point(|i| ts(i) < q.before);
        let lo = match q.window {
            Some(w) => list[..hi].partition_point(|i| ts(i) < q.before - w),
            None => 0,
        };
        let mut picked: Vec<usize> = list[lo..hi]
            .iter()
            .rev()
            .filter(|&&i| Some(self.events[i].tweet_id) != q.exclude)
            .take(q.cap)
            .copied()
            .collect();
        picked.reverse();
        picked
    }

    fn tokens_of(&self, indices: Vec<usize>) -> Vec<&'a [TokenId]> {
        indices
            .into_iter()
            .map(|i| self.events[i].tokens.as_slice())
            .collect()
    }

    pub fn posts_by(&self, user: UserId, before: Timestamp, cap: usize) -> Vec<&'a [TokenId]> {
        self.tokens_of(self.collection(user, Stream::Posts, HistoryQuery::before(before).cap(cap)))
    }

    pub fn retweets_by(
        &self,
        user: UserId,
        before: Timestamp,
        window: Option<i64>,
        cap: usize,
    ) -> Vec<&'a [TokenId]> {
        let q = HistoryQuery::before(before).window(window).cap(cap);
        self.tokens_of(self.collection(user, Stream::Retweets, q))
    }

    pub fn seen_by(
        &self,
        recipient: UserId,
        before: Timestamp,
        window: Option<i64>,
        cap: usize,
    ) -> Vec<&'a [TokenId]> {
        let q = HistoryQuery::before(before).window(window).cap(cap);
        self.tokens_of(self.collection(recipient, Stream::Seen, q))
    }

    /// Mentions by `a` of `b` in authored tweets and retweets by `a` of
    /// tweets received from `b`, both strictly before `before`.
    pub fn interaction(&self, a: UserId, b: UserId, before: Timestamp) -> Interaction {
        let count = |m: &HashMap<(UserId, UserId), Vec<Timestamp>>| {
            m.get(&(a, b)).map_or(0, |ts| ts.partition_point(|&t| t < before))
        };
        Interaction {
            a_mentioned_b: count(&self.mentions),
            a_retweeted_b: count(&self.retweeted),
        }
    }

    pub fn neighbours(&self, user: UserId) -> Option<&'a BTreeSet<UserId>> {
        self.profiles.get(&user).map(|p| &p.neighbours)
    }

    /// Distinct neighbours of `recipient` that retweeted `tweet` strictly before `before`.
    pub fn neighbour_retweets(&self, tweet: TweetId, recipient: UserId, before: Timestamp) -> usize {
        let (Some(list), Some(neighbours)) = (self.retweeters.get(&tweet), self.neighbours(recipient)) else {
            return 0;
        };
        let mut counted = BTreeSet::new();
        for &(ts, user) in list {
            if ts >= before {
                break;
            }
            if neighbours.contains(&user) {
                counted.insert(user);
            }
        }
        counted.len()
    }

    /// Whether `user` authored or retweeted anything in `[from, before)`.
    pub fn posted_between(&self, user: UserId, from: Timestamp, before: Timestamp) -> bool {
        let q = HistoryQuery::before(before).window(Some(before - from)).cap(1);
        !self.collection(user, Stream::Posts, q).is_empty()
    }
}
