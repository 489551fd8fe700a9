//! Balanced batches and the train/dev/test splits.

use std::collections::{BTreeMap, HashMap};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Instance, InstanceId, Timestamp, TweetId, UserId};
use crate::error::{Error, Result};
use crate::history::{UserHistoryIndex, WEEK_SECS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub batch_pos: usize,
    pub batch_neg: usize,
    pub train_batches: usize,
    pub dev_batches: usize,
    pub test_batches: usize,
    pub unbalanced_pos_per_batch: usize,
    pub unbalanced_neg_per_batch: usize,
    pub seed: u64,
}

impl Default for SplitSpec {
    /// 140 batches of 475 + 475; 120/10/10; 5% positives when unbalanced.
    fn default() -> Self {
        SplitSpec {
            batch_pos: 475,
            batch_neg: 475,
            train_batches: 120,
            dev_batches: 10,
            test_batches: 10,
            unbalanced_pos_per_batch: 25,
            unbalanced_neg_per_batch: 475,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn total_batches(&self) -> usize {
        self.train_batches + self.dev_batches + self.test_batches
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("batch_pos", self.batch_pos),
            ("batch_neg", self.batch_neg),
            ("train_batches", self.train_batches),
            ("dev_batches", self.dev_batches),
            ("test_batches", self.test_batches),
            ("unbalanced_pos_per_batch", self.unbalanced_pos_per_batch),
            ("unbalanced_neg_per_batch", self.unbalanced_neg_per_batch),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::InvalidConfig(format!("{name} must be positive")));
        }
        if self.unbalanced_pos_per_batch > self.batch_pos || self.unbalanced_neg_per_batch > self.batch_neg {
            return Err(Error::InvalidConfig(
                "unbalanced per-batch counts cannot exceed the balanced ones".into(),
            ));
        }
        Ok(())
    }
}

/// Instance ids of one batch, each list in temporal order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Batch {
    pub positives: Vec<InstanceId>,
    pub negatives: Vec<InstanceId>,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.positives.len() + self.negatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ids(&self) -> impl Iterator<Item = InstanceId> + '_ {
        self.positives.iter().chain(&self.negatives).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSplits {
    pub spec: SplitSpec,
    pub train: Vec<Batch>,
    pub dev: Vec<Batch>,
    pub test: Vec<Batch>,
    pub dev_unbalanced: Vec<Batch>,
    pub test_unbalanced: Vec<Batch>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalSet {
    Dev,
    DevUnbalanced,
    Test,
    TestUnbalanced,
}

impl EvalSet {
    pub const ALL: [EvalSet; 4] = [
        EvalSet::Dev,
        EvalSet::DevUnbalanced,
        EvalSet::Test,
        EvalSet::TestUnbalanced,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EvalSet::Dev => "dev",
            EvalSet::DevUnbalanced => "dev-unbalanced",
            EvalSet::Test => "test",
            EvalSet::TestUnbalanced => "test-unbalanced",
        }
    }
}

impl std::str::FromStr for EvalSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EvalSet::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            format!("unknown evaluation set {s:?}; expected dev, dev-unbalanced, test or test-unbalanced")
        })
    }
}

impl DatasetSplits {
    pub fn eval_batches(&self, set: EvalSet) -> &[Batch] {
        match set {
            EvalSet::Dev => &self.dev,
            EvalSet::DevUnbalanced => &self.dev_unbalanced,
            EvalSet::Test => &self.test,
            EvalSet::TestUnbalanced => &self.test_unbalanced,
        }
    }

    pub fn train_ids(&self, k: usize) -> Vec<InstanceId> {
        self.train.iter().take(k).flat_map(Batch::ids).collect()
    }

    pub fn eval_ids(&self, set: EvalSet) -> Vec<InstanceId> {
        self.eval_batches(set).iter().flat_map(Batch::ids).collect()
    }
}

/// Negatives from senders the recipient never retweeted, or from senders
/// with no posts in the week before the instance.
pub fn is_excluded_negative(history: &UserHistoryIndex<'_>, inst: &Instance) -> bool {
    if inst.label {
        return false;
    }
    let t = inst.timestamp;
    let easy = history
        .interaction(inst.recipient_id, inst.sender_id, t)
        .a_retweeted_b
        == 0;
    let inactive = !history.posted_between(inst.sender_id, t - WEEK_SECS, t);
    easy || inactive
}

fn temporal_key(inst: &Instance) -> (Timestamp, InstanceId) {
    (inst.timestamp, inst.instance_id)
}

/// Builds balanced batches and the derived splits:
/// filter excluded negatives, downsample negatives per recipient, drop
/// duplicate arrivals of a tweet to the same recipient (earliest wins), sort
/// each class by time, cut into batches, split, and downsample dev/test
/// batches for the unbalanced sets.
pub fn build_dataset(corpus: &Corpus, spec: &SplitSpec) -> Result<DatasetSplits> {
    spec.validate()?;
    let history = UserHistoryIndex::from_corpus(corpus);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut by_recipient: BTreeMap<UserId, (Vec<&Instance>, Vec<&Instance>)> = BTreeMap::new();
    for inst in &corpus.instances {
        if is_excluded_negative(&history, inst) {
            continue;
        }
        let entry = by_recipient.entry(inst.recipient_id).or_default();
        if inst.label {
            entry.0.push(inst);
        } else {
            entry.1.push(inst);
        }
    }

    let mut kept: Vec<&Instance> = Vec::new();
    for (_, (pos, mut neg)) in by_recipient {
        neg.sort_by_key(|i| temporal_key(i));
        if neg.len() > pos.len() {
            let mut chosen = sample(&mut rng, neg.len(), pos.len()).into_vec();
            chosen.sort_unstable();
            neg = chosen.into_iter().map(|i| neg[i]).collect();
        }
        kept.extend(pos);
        kept.extend(neg);
    }

    let mut earliest: HashMap<(UserId, TweetId), &Instance> = HashMap::new();
    for inst in kept {
        earliest
            .entry((inst.recipient_id, inst.tweet_id))
            .and_modify(|cur| {
                if temporal_key(inst) < temporal_key(cur) {
                    *cur = inst;
                }
            })
            .or_insert(inst);
    }

    let (mut positives, mut negatives): (Vec<&Instance>, Vec<&Instance>) =
        earliest.into_values().partition(|i| i.label);
    positives.sort_by_key(|i| temporal_key(i));
    negatives.sort_by_key(|i| temporal_key(i));

    let requested = spec.total_batches();
    let achievable = (positives.len() / spec.batch_pos).min(negatives.len() / spec.batch_neg);
    if achievable < requested {
        return Err(Error::InsufficientInstances {
            positives: positives.len(),
            negatives: negatives.len(),
            achievable,
            requested,
        });
    }

    let batches: Vec<Batch> = (0..requested)
        .map(|b| Batch {
            positives: positives[b * spec.batch_pos..(b + 1) * spec.batch_pos]
                .iter()
                .map(|i| i.instance_id)
                .collect(),
            negatives: negatives[b * spec.batch_neg..(b + 1) * spec.batch_neg]
                .iter()
                .map(|i| i.instance_id)
                .collect(),
        })
        .collect();

    let train = batches[..spec.train_batches].to_vec();
    let dev = batches[spec.train_batches..spec.train_batches + spec.dev_batches].to_vec();
    let test = batches[spec.train_batches + spec.dev_batches..].to_vec();

    let mut unbalance = |batches: &[Batch]| -> Vec<Batch> {
        batches
            .iter()
            .map(|b| Batch {
                positives: subsample(&mut rng, &b.positives, spec.unbalanced_pos_per_batch),
                negatives: subsample(&mut rng, &b.negatives, spec.unbalanced_neg_per_batch),
            })
            .collect()
    };
    let dev_unbalanced = unbalance(&dev);
    let test_unbalanced = unbalance(&test);

    Ok(DatasetSplits {
        spec: *spec,
        train,
        dev,
        test,
        dev_unbalanced,
        test_unbalanced,
    })
}

/// `k` items of `ids` chosen at random, kept in their original order.
/// Returns `ids` unchanged when `k` covers it.
fn subsample(rng: &mut ChaCha8Rng, ids: &[InstanceId], k: usize) -> Vec<InstanceId> {
    if k >= ids.len() {
        return ids.to_vec();
    }
    let mut chosen = sample(rng, ids.len(), k).into_vec();
    chosen.sort_unstable();
    chosen.into_iter().map(|i| ids[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Action, EncodedTweet, HistoryEvent, UserProfile};
    use std::collections::BTreeSet;

    const DAY: i64 = 86_400;

    fn profile(id: u64) -> UserProfile {
        UserProfile {
            user_id: id,
            followers: 1,
            following: 1,
            statuses: 1,
            listed: 0,
            verified: false,
            account_age_days: 1,
            has_profile_url: false,
            klout: None,
            klout_delta_1d: None,
            klout_delta_7d: None,
            klout_delta_30d: None,
            neighbours: BTreeSet::new(),
        }
    }

    fn inst(id: u64, tweet: u64, sender: u64, recipient: u64, ts: i64, label: bool) -> Instance {
        Instance {
            instance_id: id,
            tweet_id: tweet,
            author_id: sender,
            sender_id: sender,
            recipient_id: recipient,
            timestamp: ts,
            label,
            tweet: EncodedTweet::default(),
        }
    }

    /// Sender 2 posts daily and was retweeted by recipient 1 on day 0, so no
    /// negative from 2 to 1 after day 1 gets filtered.
    fn active_world(instances: Vec<Instance>) -> Corpus {
        let mut events = vec![HistoryEvent {
            user_id: 1,
            tweet_id: 1,
            action: Action::Retweeted,
            timestamp: 0,
            tokens: vec![],
            mentions: vec![],
            source_user: Some(2),
        }];
        for d in 0..400 {
            events.push(HistoryEvent {
                user_id: 2,
                tweet_id: 10_000 + d,
                action: Action::Authored,
                timestamp: d as i64 * DAY,
                tokens: vec![],
                mentions: vec![],
                source_user: None,
            });
        }
        Corpus::new([profile(1), profile(2), profile(3)], events, instances, None).unwrap()
    }

    fn tiny_spec() -> SplitSpec {
        SplitSpec {
            batch_pos: 2,
            batch_neg: 2,
            train_batches: 3,
            dev_batches: 1,
            test_batches: 1,
            unbalanced_pos_per_batch: 1,
            unbalanced_neg_per_batch: 2,
            seed: 7,
        }
    }

    fn balanced_instances(n: u64) -> Vec<Instance> {
        (0..2 * n)
            .map(|i| inst(i, 100 + i, 2, 1, DAY + (i as i64) * 3600, i % 2 == 0))
            .collect()
    }

    #[test]
    fn batch_counts() {
        let corpus = active_world(balanced_instances(10));
        let s = build_dataset(&corpus, &tiny_spec()).unwrap();
        assert_eq!(s.train.len(), 3);
        assert_eq!((s.dev.len(), s.test.len()), (1, 1));
        assert!(s
            .train
            .iter()
            .all(|b| b.positives.len() == 2 && b.negatives.len() == 2));
        assert_eq!(s.dev_unbalanced[0].positives.len(), 1);
        assert_eq!(s.dev_unbalanced[0].negatives, s.dev[0].negatives);
        assert!(s.dev[0].positives.contains(&s.dev_unbalanced[0].positives[0]));
    }

    #[test]
    fn too_small_reports_achievable() {
        let corpus = active_world(balanced_instances(6));
        match build_dataset(&corpus, &tiny_spec()) {
            Err(Error::InsufficientInstances {
                achievable: 3,
                requested: 5,
                ..
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn earliest_duplicate_kept() {
        let mut instances = balanced_instances(10);
        // a later arrival of tweet 100 (instance 0) through another sender
        instances.push(inst(99, 100, 3, 1, 30 * DAY, true));
        let corpus = active_world(instances);
        let s = build_dataset(&corpus, &tiny_spec()).unwrap();
        let all: Vec<u64> = s
            .train
            .iter()
            .chain(&s.dev)
            .chain(&s.test)
            .flat_map(Batch::ids)
            .collect();
        assert!(all.contains(&0));
        assert!(!all.contains(&99));
    }

    #[test]
    fn easy_and_inactive_negatives_dropped() {
        let mut instances = balanced_instances(10);
        // recipient 1 never retweeted sender 3
        instances.push(inst(200, 900, 3, 1, 2 * DAY, false));
        // sender 2 silent in the week before day 500
        instances.push(inst(201, 901, 2, 1, 500 * DAY, false));
        let corpus = active_world(instances);
        let history = UserHistoryIndex::from_corpus(&corpus);
        let find = |id| corpus.instances.iter().find(|i| i.instance_id == id).unwrap();
        assert!(is_excluded_negative(&history, find(200)));
        assert!(is_excluded_negative(&history, find(201)));
        assert!(!is_excluded_negative(&history, find(1)));
    }

    #[test]
    fn negatives_downsampled_per_recipient() {
        let mut instances = balanced_instances(10);
        for i in 0..30 {
            instances.push(inst(300 + i, 3000 + i, 2, 1, 2 * DAY + i as i64, false));
        }
        let corpus = active_world(instances);
        let spec = SplitSpec {
            train_batches: 1,
            ..tiny_spec()
        };
        let s = build_dataset(&corpus, &spec).unwrap();
        let again = build_dataset(&corpus, &spec).unwrap();
        assert_eq!(s, again);
        let negatives = |s: &DatasetSplits| -> Vec<InstanceId> {
            s.train
                .iter()
                .chain(&s.dev)
                .chain(&s.test)
                .flat_map(|b| b.negatives.clone())
                .collect()
        };
        let varies = (8..16).any(|seed| {
            let other = build_dataset(&corpus, &SplitSpec { seed, ..spec }).unwrap();
            negatives(&other) != negatives(&s)
        });
        assert!(varies, "downsampling ignores the seed");
    }

    #[test]
    fn spec_validation() {
        assert!(SplitSpec::default().validate().is_ok());
        let bad = SplitSpec {
            unbalanced_pos_per_batch: 500,
            ..SplitSpec::default()
        };
        assert!(bad.validate().is_err());
        let zero = SplitSpec {
            dev_batches: 0,
            ..SplitSpec::default()
        };
        assert!(zero.validate().is_err());
    }

    #[test]
    fn eval_set_names() {
        for set in EvalSet::ALL {
            assert_eq!(set.name().parse::<EvalSet>().unwrap(), set);
        }
        assert!("train".parse::<EvalSet>().is_err());
    }
}
