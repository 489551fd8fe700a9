//! TF-IDF vectors and average cosine similarity.
//!
//! Weights are raw term count times smoothed IDF, `ln((N+1)/(df+1)) + 1`,
//! then L2-normalized. Vectors keep their entries sorted by token so every
//! sum runs in the same order and results are bitwise reproducible.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

#[derive(Debug, Clone, PartialEq)]
pub struct IdfTable<T: Eq + Hash = u32> {
    doc_count: usize,
    doc_frequency: HashMap<T, usize>,
}

impl<T: Eq + Hash + Clone> IdfTable<T> {
    /// Counts, per token, the number of documents containing it.
    pub fn build<'a, D, I>(corpus: D) -> Self
    where
        D: IntoIterator<Item = I>,
        I: IntoIterator<Item = &'a T>,
        T: 'a,
    {
        let mut doc_frequency: HashMap<T, usize> = HashMap::new();
        let mut doc_count = 0;
        let mut seen: Vec<&T> = Vec::new();
        for doc in corpus {
            doc_count += 1;
            seen.clear();
            for token in doc {
                if !seen.contains(&token) {
                    seen.push(token);
                }
            }
            for token in &seen {
                *doc_frequency.entry((*token).clone()).or_default() += 1;
            }
        }
        IdfTable {
            doc_count,
            doc_frequency,
        }
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    /// Document frequency, 0 for unseen tokens.
    pub fn df(&self, token: &T) -> usize {
        self.doc_frequency.get(token).copied().unwrap_or(0)
    }

    pub fn idf(&self, token: &T) -> f64 {
        let n = self.doc_count as f64;
        let df = self.df(token) as f64;
        ((n + 1.0) / (df + 1.0)).ln() + 1.0
    }

    pub fn vocabulary_len(&self) -> usize {
        self.doc_frequency.len()
    }
}

/// L2-normalized sparse vector; the empty vector is the zero vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector<T = u32> {
    entries: Vec<(T, f64)>,
}

impl<T: Ord + Clone> SparseVector<T> {
    pub fn zero() -> Self {
        SparseVector { entries: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(T, f64)] {
        &self.entries
    }

    pub fn weight(&self, token: &T) -> f64 {
        self.entries
            .binary_search_by(|(t, _)| t.cmp(token))
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w * w).sum::<f64>().sqrt()
    }
}

pub fn vectorize<'a, T>(tokens: impl IntoIterator<Item = &'a T>, idf: &IdfTable<T>) -> SparseVector<T>
where
    T: Ord + Eq + Hash + Clone + 'a,
{
    let mut counts: BTreeMap<&T, usize> = BTreeMap::new();
    for token in tokens {
        *counts.entry(token).or_default() += 1;
    }
    let mut entries: Vec<(T, f64)> = counts
        .into_iter()
        .map(|(t, c)| (t.clone(), c as f64 * idf.idf(t)))
        .collect();
    let norm = entries.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
    if norm > 0.0 {
        for (_, w) in &mut entries {
            *w /= norm;
        }
    } else {
        entries.clear();
    }
    SparseVector { entries }
}

/// Dot product of two normalized vectors, clamped to [0, 1] against rounding.
pub fn cosine<T: Ord>(u: &SparseVector<T>, v: &SparseVector<T>) -> f64 {
    let (a, b) = (&u.entries, &v.entries);
    let (mut i, mut j) = (0, 0);
    let mut dot = 0.0;
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dot += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    dot.clamp(0.0, 1.0)
}

/// Mean cosine between `target` and each member of `collection`; 0 when empty.
pub fn avg_cosine<'a, T: Ord + 'a>(
    target: &SparseVector<T>,
    collection: impl IntoIterator<Item = &'a SparseVector<T>>,
) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for member in collection {
        sum += cosine(target, member);
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).clamp(0.0, 1.0)
    }
}

pub fn avg_similarity<T, D>(target: &[T], collection: &[D], idf: &IdfTable<T>) -> f64
where
    T: Ord + Eq + Hash + Clone,
    D: AsRef<[T]>,
{
    let t = vectorize(target, idf);
    let members: Vec<SparseVector<T>> = collection.iter().map(|c| vectorize(c.as_ref(), idf)).collect();
    avg_cosine(&t, &members)
}
