//! Sparse bag-of-words / bag-of-tags vectors with a training-side
//! vocabulary and L2 normalization.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::num::Real;

/// Minimum corpus occurrence count (exclusive) for a term to enter the
/// vocabulary.
pub const MIN_TERM_COUNT: usize = 5;

/// Term-to-column index built on the training split only.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Vocabulary {
    terms: BTreeMap<String, usize>,
}

impl Vocabulary {
    /// Keep terms occurring more than `MIN_TERM_COUNT` times across the
    /// training token sequences; indices assigned in sorted term order.
    pub fn build<'a, I>(token_seqs: I) -> Self
    where
        I: IntoIterator<Item = &'a [String]>,
    {
        Self::build_with_min(token_seqs, MIN_TERM_COUNT)
    }

    pub fn build_with_min<'a, I>(token_seqs: I, min_count: usize) -> Self
    where
        I: IntoIterator<Item = &'a [String]>,
    {
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for seq in token_seqs {
            for t in seq {
                *counts.entry(t.as_str()).or_default() += 1;
            }
        }
        let mut kept: Vec<&str> = counts
            .iter()
            .filter(|(_, &c)| c > min_count)
            .map(|(t, _)| *t)
            .collect();
        kept.sort_unstable();
        Vocabulary {
            terms: kept
                .into_iter()
                .enumerate()
                .map(|(i, t)| (t.to_string(), i))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.terms.get(term).copied()
    }

    /// Terms in index order.
    pub fn terms(&self) -> Vec<&str> {
        let mut v: Vec<(&str, usize)> = self.terms.iter().map(|(t, &i)| (t.as_str(), i)).collect();
        v.sort_by_key(|&(_, i)| i);
        v.into_iter().map(|(t, _)| t).collect()
    }
}

/// L2-normalized term-frequency vector; all-zero when every term is
/// out-of-vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector<R: Real> {
    weights: BTreeMap<usize, R>,
}

impl<R: Real> SparseVector<R> {
    pub fn get(&self, index: usize) -> R {
        self.weights.get(&index).copied().unwrap_or_else(R::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, R)> + '_ {
        self.weights.iter().map(|(&i, &w)| (i, w))
    }

    pub fn nnz(&self) -> usize {
        self.weights.len()
    }

    pub fn norm(&self) -> R {
        self.weights
            .values()
            .map(|w| *w * *w)
            .sum::<R>()
            .sqrt()
    }
}

/// Term-frequency vector over the vocabulary, L2-normalized. Out-of-vocab
/// terms are dropped.
pub fn tf_vector<R: Real>(tokens: &[String], vocab: &Vocabulary) -> SparseVector<R> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for t in tokens {
        if let Some(i) = vocab.index_of(t) {
            *counts.entry(i).or_default() += 1;
        }
    }
    let norm = (counts.values().map(|&c| (c * c) as f64).sum::<f64>()).sqrt();
    let weights = if norm == 0.0 {
        BTreeMap::new()
    } else {
        counts
            .into_iter()
            .map(|(i, c)| (i, R::from_f64_c(c as f64 / norm)))
            .collect()
    };
    SparseVector { weights }
}
