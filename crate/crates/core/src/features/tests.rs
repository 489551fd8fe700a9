use std::collections::BTreeSet;

use super::*;
use crate::corpus::{Action, EncodedTweet, HistoryEvent, PosCounts, Vocabulary};
use crate::textnorm::normalize;
use crate::vectorspace::avg_similarity;

const DAY: i64 = 24 * 3600;

struct World {
    profiles: Vec<UserProfile>,
    events: Vec<HistoryEvent>,
    vocab: Vocabulary,
    next_tweet: u64,
}

impl World {
    fn new(users: &[u64]) -> Self {
        World {
            profiles: users.iter().map(|&u| blank_profile(u)).collect(),
            events: Vec::new(),
            vocab: Vocabulary::default(),
            next_tweet: 1000,
        }
    }

    fn follow(&mut self, user: u64, neighbour: u64) {
        let p = self.profiles.iter_mut().find(|p| p.user_id == user).unwrap();
        p.neighbours.insert(neighbour);
    }

    fn tokens(&mut self, text: &str) -> Vec<TokenId> {
        normalize(text)
            .tokens
            .iter()
            .map(|t| self.vocab.intern(t))
            .collect()
    }

    fn event(&mut self, user: u64, action: Action, ts: i64, text: &str) -> u64 {
        self.next_tweet += 1;
        let id = self.next_tweet;
        self.event_for(user, id, action, ts, text, None);
        id
    }

    fn event_for(&mut self, user: u64, tweet: u64, action: Action, ts: i64, text: &str, source: Option<u64>) {
        let tokens = self.tokens(text);
        self.events.push(HistoryEvent {
            user_id: user,
            tweet_id: tweet,
            action,
            timestamp: ts,
            tokens,
            mentions: vec![],
            source_user: source,
        });
    }

    fn instance(&mut self, id: u64, sender: u64, recipient: u64, ts: i64, text: &str) -> Instance {
        let norm = normalize(text);
        let mut tweet = self
            .vocab
            .encode_tweet(&norm, |name| name.trim_start_matches('u').parse().unwrap_or(0));
        tweet.global_retweet_count = 0;
        Instance {
            instance_id: id,
            tweet_id: 1 + id,
            author_id: sender,
            sender_id: sender,
            recipient_id: recipient,
            timestamp: ts,
            label: false,
            tweet,
        }
    }

    fn corpus(&self, instances: Vec<Instance>) -> Corpus {
        Corpus::new(
            self.profiles.clone(),
            self.events.clone(),
            instances,
            Some(self.vocab.clone()),
        )
        .unwrap()
    }
}

fn blank_profile(id: u64) -> UserProfile {
    UserProfile {
        user_id: id,
        followers: 0,
        following: 0,
        statuses: 0,
        listed: 0,
        verified: false,
        account_age_days: 0,
        has_profile_url: false,
        klout: None,
        klout_delta_1d: None,
        klout_delta_7d: None,
        klout_delta_30d: None,
        neighbours: BTreeSet::new(),
    }
}

fn vectors(corpus: &Corpus) -> Vec<FeatureVector> {
    let idf = background_idf(corpus);
    let ctx = FeatureContext::new(
        corpus,
        &idf,
        &KeywordConfig::default(),
        CollectionPolicy::default(),
    );
    let refs: Vec<&Instance> = corpus.instances.iter().collect();
    ctx.assemble_all(&refs)
}

#[test]
fn feature_ids() {
    assert_eq!("FT10".parse::<FeatureId>().unwrap(), ft(10));
    assert_eq!("43".parse::<FeatureId>().unwrap(), ft(43));
    assert!("FT0".parse::<FeatureId>().is_err());
    assert!("FT51".parse::<FeatureId>().is_err());
    assert_eq!(ft(1).index(), 0);
    assert_eq!(FeatureId::all().count(), 50);
    assert_eq!(serde_json::to_string(&ft(7)).unwrap(), "7");
}

#[test]
fn group1_rules() {
    let mut w = World::new(&[1, 2]);
    let inst = w.instance(1, 2, 1, 100, "hi @Alice !");
    let g = extract_group1(&inst);
    assert_eq!(g[0], 11.0); // FT1
    assert_eq!(g[1], 0.0); // FT2
    assert_eq!(g[2], 1.0); // FT3
    assert_eq!(g[3], 0.0); // FT4
    assert_eq!(g[6], 1.0); // FT7
    assert_eq!(g[8], 1.0); // FT9

    let mut inst = w.instance(2, 2, 1, 100, "plain");
    inst.tweet.global_retweet_count = 17;
    inst.tweet.has_photo = true;
    let g = extract_group1(&inst);
    assert_eq!(g[4], 17.0);
    assert_eq!(g[7], 1.0);
}

#[test]
fn group2_sender_history() {
    let mut w = World::new(&[1, 2, 3]);
    let fresh = w.instance(1, 3, 1, 100 * DAY, "breaking election news tonight");
    w.event(2, Action::Authored, 10 * DAY, "breaking election news tonight");
    let same = w.instance(2, 2, 1, 100 * DAY, "breaking election news tonight");
    let corpus = w.corpus(vec![fresh, same]);
    let idf = background_idf(&corpus);
    let ctx = FeatureContext::new(
        &corpus,
        &idf,
        &KeywordConfig::default(),
        CollectionPolicy::default(),
    );
    assert_eq!(ctx.extract_group2(&corpus.instances[0])[0], 0.0);
    assert!((ctx.extract_group2(&corpus.instances[1])[0] - 1.0).abs() < 1e-12);
}

#[test]
fn group2_against_naive_oracle() {
    let mut w = World::new(&[1, 2]);
    let texts = [
        "markets rally on rate cut",
        "rate cut expected",
        "football results tonight",
    ];
    for (i, t) in texts.iter().enumerate() {
        w.event(2, Action::Authored, (i as i64 + 1) * DAY, t);
    }
    w.event(1, Action::Retweeted, 2 * DAY, "rate cut expected soon");
    w.event(1, Action::Seen, 3 * DAY, "markets");
    let inst = w.instance(1, 2, 1, 10 * DAY, "rate cut markets");
    let corpus = w.corpus(vec![inst]);
    let idf = background_idf(&corpus);
    let ctx = FeatureContext::new(
        &corpus,
        &idf,
        &KeywordConfig::default(),
        CollectionPolicy::default(),
    );
    let inst = &corpus.instances[0];
    let g = ctx.extract_group2(inst);

    let collect = |user: u64, pick: &dyn Fn(Action) -> bool| -> Vec<Vec<TokenId>> {
        corpus
            .events
            .iter()
            .filter(|e| e.user_id == user && pick(e.action) && e.timestamp < inst.timestamp)
            .map(|e| e.tokens.clone())
            .collect()
    };
    let posts = |a: Action| matches!(a, Action::Authored | Action::Retweeted);
    let expected = [
        avg_similarity(&inst.tweet.tokens, &collect(2, &posts), &idf),
        avg_similarity(&inst.tweet.tokens, &collect(1, &posts), &idf),
        avg_similarity(&inst.tweet.tokens, &collect(1, &|a| a == Action::Seen), &idf),
        avg_similarity(&inst.tweet.tokens, &collect(1, &|a| a == Action::Retweeted), &idf),
    ];
    for (got, want) in g.iter().zip(expected) {
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
    assert!(g[0] > 0.0 && g[0] < 1.0);
}

#[test]
fn incoming_tweet_excluded_from_collections() {
    let mut w = World::new(&[1, 2]);
    let inst = w.instance(1, 2, 1, 10 * DAY, "exclusive scoop");
    let tweet_id = inst.tweet_id;
    w.event_for(2, tweet_id, Action::Authored, DAY, "exclusive scoop", None);
    let corpus = w.corpus(vec![inst]);
    assert_eq!(vectors(&corpus)[0].get(ft(10)), 0.0);
}

#[test]
fn group3_mapping() {
    let mut sender = blank_profile(2);
    sender.verified = true;
    sender.klout = Some(55.0);
    sender.followers = 1234;
    let recipient = blank_profile(1);
    let g = extract_group3(&sender, &recipient);
    assert_eq!(g[0], 1234.0); // FT14
    assert_eq!(g[18 - 14], 1.0); // FT18
    assert_eq!(g[21 - 14], 55.0); // FT21
    assert_eq!(g[22 - 14], 0.0); // FT22 missing delta
    assert_eq!(g[32 - 14], 0.0); // FT32 missing klout
}

#[test]
fn group4_interactions() {
    let mut w = World::new(&[1, 2]);
    for d in 1..=3 {
        let id = 500 + d as u64;
        w.event_for(1, id, Action::Retweeted, d * DAY, "something", Some(2));
    }
    let mut early = w.instance(1, 2, 1, 2 * DAY, "hello @u1");
    early.tweet.mentions = vec![1];
    let late = w.instance(2, 2, 1, 10 * DAY, "hello");
    let corpus = w.corpus(vec![early, late]);
    let v = vectors(&corpus);
    assert_eq!(v[0].get(ft(36)), 1.0);
    assert_eq!(v[0].get(ft(41)), 1.0);
    assert_eq!(v[1].get(ft(36)), 0.0);
    assert_eq!(v[1].get(ft(40)), 1.0);
    assert_eq!(v[1].get(ft(41)), 3.0);
    assert_eq!(v[1].get(ft(39)), 0.0);
}

#[test]
fn group5_window() {
    let mut w = World::new(&[1, 2]);
    w.event(1, Action::Retweeted, 2 * DAY, "old topic");
    let quiet = w.instance(1, 2, 1, 20 * DAY, "old topic");
    w.event(1, Action::Retweeted, 29 * DAY, "fresh topic");
    w.event(1, Action::Seen, 29 * DAY, "fresh topic");
    let recent = w.instance(2, 2, 1, 30 * DAY, "fresh topic");
    let corpus = w.corpus(vec![quiet, recent]);
    let v = vectors(&corpus);
    assert_eq!((v[0].get(ft(42)), v[0].get(ft(43))), (0.0, 0.0));
    assert!((v[1].get(ft(42)) - 1.0).abs() < 1e-12);
    assert!((v[1].get(ft(43)) - 1.0).abs() < 1e-12);
}

#[test]
fn group6_neighbours() {
    let mut w = World::new(&[1, 2, 3, 4]);
    w.follow(1, 2);
    w.follow(1, 3);
    let inst = w.instance(1, 2, 1, 10 * DAY, "news");
    let tid = inst.tweet_id;
    w.event_for(2, tid, Action::Retweeted, DAY, "news", Some(4));
    w.event_for(3, tid, Action::Retweeted, 2 * DAY, "news", Some(4));
    w.event_for(3, tid, Action::Retweeted, 3 * DAY, "news", Some(4));
    w.event_for(4, tid, Action::Retweeted, 3 * DAY, "news", None);
    let mut via_retweet = w.instance(2, 2, 4, 10 * DAY, "news");
    via_retweet.author_id = 3;
    let corpus = w.corpus(vec![inst, via_retweet]);
    let v = vectors(&corpus);
    assert_eq!(v[0].get(ft(44)), 1.0);
    assert_eq!(v[0].get(ft(45)), 2.0);
    // recipient 4 follows nobody
    assert_eq!(v[1].get(ft(44)), 0.0);
    assert_eq!(v[1].get(ft(45)), 0.0);
}

#[test]
fn group7_wording() {
    let mut w = World::new(&[1, 2]);
    let share = w.instance(1, 2, 1, DAY, "please rt and share");
    let articles = w.instance(2, 2, 1, DAY, "the the a");
    let mut supplied = w.instance(3, 2, 1, DAY, "the");
    supplied.tweet.pos_counts = Some(PosCounts {
        nouns_verbs: 4,
        definite_articles: 0,
        indefinite_articles: 2,
    });
    let corpus = w.corpus(vec![share, articles, supplied]);
    let v = vectors(&corpus);
    assert_eq!(v[0].get(ft(46)), 2.0);
    assert_eq!((v[1].get(ft(48)), v[1].get(ft(49))), (2.0, 1.0));
    assert_eq!(v[1].get(ft(50)), 0.0);
    assert!(v[1].approximate_pos);
    assert_eq!(
        (v[2].get(ft(47)), v[2].get(ft(48)), v[2].get(ft(49))),
        (4.0, 0.0, 2.0)
    );
    assert!(!v[2].approximate_pos);
}

#[test]
fn personalization_changes_recipient_coordinates_only() {
    let mut w = World::new(&[1, 2, 3]);
    // recipient 1 retweets sender 3 about the same topic; recipient 2 does not
    w.event_for(1, 900, Action::Retweeted, DAY, "solar power record", Some(3));
    w.event_for(1, 901, Action::Retweeted, 2 * DAY, "solar panels cheap", Some(3));
    w.event(2, Action::Authored, DAY, "cooking pasta tonight");
    w.event(3, Action::Authored, DAY, "wind farms expand");
    let a = w.instance(1, 3, 1, 10 * DAY, "solar power surges");
    let mut b = w.instance(2, 3, 2, 10 * DAY, "solar power surges");
    b.tweet_id = a.tweet_id;
    let corpus = w.corpus(vec![a, b]);
    let v = vectors(&corpus);
    for id in [11, 13, 41] {
        assert_ne!(v[0].get(ft(id)), v[1].get(ft(id)), "FT{id}");
    }
    let recipient_dependent: BTreeSet<u8> = [11, 12, 13].into_iter().chain(25..=36).chain(37..=45).collect();
    for id in FeatureId::all() {
        if !recipient_dependent.contains(&id.number()) {
            assert_eq!(v[0].get(id), v[1].get(id), "{id}");
        }
    }
}

#[test]
fn assembled_vector_shape_and_bounds() {
    let mut w = World::new(&[1, 2]);
    w.event(2, Action::Authored, DAY, "a b c");
    let inst = w.instance(1, 2, 1, 2 * DAY, "b c d");
    let corpus = w.corpus(vec![inst]);
    let v = &vectors(&corpus)[0];
    assert_eq!(v.values.len(), NUM_FEATURES);
    for id in [10, 11, 12, 13, 42, 43] {
        assert!((0.0..=1.0).contains(&v.get(ft(id))));
    }
    let scaled = apply_scaling(v, &fit_scaling(std::slice::from_ref(v)));
    assert!(scaled.values.iter().all(|x| (0.0..=1.0).contains(x)));
}

#[test]
fn tweet_without_vocab_has_zero_wording() {
    let inst = Instance {
        instance_id: 1,
        tweet_id: 1,
        author_id: 2,
        sender_id: 2,
        recipient_id: 1,
        timestamp: 0,
        label: true,
        tweet: EncodedTweet {
            tokens: vec![6, 7, 8],
            ..EncodedTweet::default()
        },
    };
    let kw = KeywordConfig::default().resolve(None);
    let (g7, approx) = extract_group7(&inst, &kw, None);
    assert_eq!(g7, [0.0; 5]);
    assert!(approx);
}
