//! Paired prediction tasks: Jaccard-matched positive/negative argument
//! pairs, word-count truncation, the date-based split, and the
//! opinion-malleability dataset.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{rooted_path_units, tree_passes, CorpusFilter, DiscussionTree, RootedPathUnit};
use crate::features::tokenize::{is_sentinel, tokenize_words};
use crate::features::Variant;
use crate::lexicons::Lexicon;

/// Train/heldout boundary: 2015-05-08 00:00 UTC. Posts strictly before it
/// are training data.
pub const TRAIN_BOUNDARY_UTC: i64 = 1_431_043_200;
/// End of the heldout window: 2015-09-01 00:00 UTC (exclusive).
pub const HELDOUT_END_UTC: i64 = 1_441_065_600;

/// Minimum unique challengers for a tree to enter pair construction.
pub const MIN_CHALLENGERS: usize = 10;
/// Minimum words in each member's root reply.
pub const MIN_ROOT_REPLY_WORDS: usize = 50;
/// Minimum qualifying unsuccessful units per tree.
pub const MIN_UNSUCCESSFUL_UNITS: usize = 3;

/// A delta-winning unit matched with its most topically similar
/// unsuccessful unit from the same tree.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArgumentPair {
    pub tree_id: String,
    pub positive_unit: RootedPathUnit,
    pub negative_unit: RootedPathUnit,
    pub jaccard_score: f64,
    /// Variant → (positive text, negative text).
    pub variant_texts: BTreeMap<Variant, (String, String)>,
}

/// One original post for the malleability task.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MalleabilityInstance {
    pub tree_id: String,
    pub op_text: String,
    pub label: bool,
    pub created_utc: i64,
}

/// Counters for winners that could not be paired.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairingDiagnostics {
    /// Trees rejected by the challenger / unsuccessful-unit thresholds.
    pub trees_skipped: usize,
    /// Winning units with no qualifying negative.
    pub winners_without_candidate: usize,
    /// Winning units under the root-reply word minimum.
    pub winners_too_short: usize,
}

/// |a∩b| / |a∪b|; 0 when both sets are empty.
pub fn jaccard(a: &HashSet<String>, b: &HashSet<String>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.union(b).count();
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

fn word_set(text: &str, stopwords: &Lexicon) -> HashSet<String> {
    tokenize_words(text)
        .into_iter()
        .filter(|t| !is_sentinel(t) && !stopwords.contains_word(t))
        .collect()
}

fn word_count(text: &str) -> usize {
    tokenize_words(text).iter().filter(|t| !is_sentinel(t)).count()
}

/// Build one pair per delta-winning unit.
///
/// Trees need at least 10 unique challengers and at least 3 unsuccessful
/// units whose root replies precede the OP's last comment. Both members'
/// root replies must have at least 50 words. The negative is the
/// unsuccessful unit maximizing Jaccard similarity of stopword-stripped
/// root-reply word sets; ties go to the earliest candidate root reply.
/// Output is sorted by (tree id, positive root-reply timestamp) and is
/// invariant to input tree order.
pub fn build_pairs(
    trees: &[DiscussionTree],
    stopwords: &Lexicon,
) -> (Vec<ArgumentPair>, PairingDiagnostics) {
    let mut pairs: Vec<(i64, ArgumentPair)> = Vec::new();
    let mut diag = PairingDiagnostics::default();
    for tree in trees {
        if tree.challengers_in_entry_order().len() < MIN_CHALLENGERS {
            diag.trees_skipped += 1;
            continue;
        }
        let op_last = tree
            .nodes
            .iter()
            .filter(|n| n.is_op)
            .map(|n| n.created_utc)
            .max();
        let Some(op_last) = op_last else {
            diag.trees_skipped += 1;
            continue;
        };
        let units = rooted_path_units(tree);
        let candidates: Vec<&RootedPathUnit> = units
            .iter()
            .filter(|u| {
                !u.delta_winning
                    && u.root_reply_time(tree) < op_last
                    && word_count(&u.root_reply_text(tree)) >= MIN_ROOT_REPLY_WORDS
            })
            .collect();
        if candidates.len() < MIN_UNSUCCESSFUL_UNITS {
            diag.trees_skipped += 1;
            continue;
        }
        for winner in units.iter().filter(|u| u.delta_winning) {
            let pos_text = winner.root_reply_text(tree);
            if word_count(&pos_text) < MIN_ROOT_REPLY_WORDS {
                diag.winners_too_short += 1;
                continue;
            }
            let pos_set = word_set(&pos_text, stopwords);
            let mut best: Option<(&RootedPathUnit, f64)> = None;
            for cand in &candidates {
                let score = jaccard(&pos_set, &word_set(&cand.root_reply_text(tree), stopwords));
                let better = match best {
                    None => true,
                    Some((b, s)) => {
                        score > s
                            || (score == s
                                && (cand.root_reply_time(tree), &cand.root_reply_id)
                                    < (b.root_reply_time(tree), &b.root_reply_id))
                    }
                };
                if better {
                    best = Some((cand, score));
                }
            }
            let Some((negative, score)) = best else {
                diag.winners_without_candidate += 1;
                continue;
            };
            let neg_text = negative.root_reply_text(tree);
            let mut variant_texts = BTreeMap::new();
            variant_texts.insert(Variant::RootReply, (pos_text.clone(), neg_text.clone()));
            variant_texts.insert(
                Variant::FullPath,
                (winner.full_path_text(tree), negative.full_path_text(tree)),
            );
            let mut pair = ArgumentPair {
                tree_id: tree.id.clone(),
                positive_unit: winner.clone(),
                negative_unit: (*negative).clone(),
                jaccard_score: score,
                variant_texts,
            };
            truncate_pair(&mut pair);
            pairs.push((winner.root_reply_time(tree), pair));
        }
    }
    pairs.sort_by(|(ta, a), (tb, b)| {
        (&a.tree_id, ta, &a.positive_unit.node_ids).cmp(&(&b.tree_id, tb, &b.positive_unit.node_ids))
    });
    (pairs.into_iter().map(|(_, p)| p).collect(), diag)
}

/// Word-prefix of `text` containing exactly `target` words; sentinel
/// tokens inside the prefix are kept but not counted.
fn word_prefix(text: &str, target: usize) -> String {
    let mut kept = Vec::new();
    let mut words = 0usize;
    for token in tokenize_words(text) {
        if words == target {
            break;
        }
        if !is_sentinel(&token) {
            words += 1;
        }
        kept.push(token);
    }
    kept.join(" ")
}

/// Populate the root_truncated variant: the longer root reply is cut (by
/// word) to the shorter's word count; equal lengths leave both unchanged.
pub fn truncate_pair(pair: &mut ArgumentPair) {
    let Some((pos, neg)) = pair.variant_texts.get(&Variant::RootReply).cloned() else {
        return;
    };
    let (np, nn) = (word_count(&pos), word_count(&neg));
    let truncated = match np.cmp(&nn) {
        std::cmp::Ordering::Equal => (pos, neg),
        std::cmp::Ordering::Greater => (word_prefix(&pos, nn), neg),
        std::cmp::Ordering::Less => (pos, word_prefix(&neg, np)),
    };
    pair.variant_texts.insert(Variant::RootTruncated, truncated);
}

/// Split by original-post timestamp: train strictly before `boundary`,
/// heldout in [`boundary`, `end`). Later items are dropped.
pub fn split_by_date<T>(
    items: Vec<T>,
    created_utc: impl Fn(&T) -> i64,
    boundary: i64,
    end: i64,
) -> (Vec<T>, Vec<T>) {
    let mut train = Vec::new();
    let mut heldout = Vec::new();
    for item in items {
        let t = created_utc(&item);
        if t < boundary {
            train.push(item);
        } else if t < end {
            heldout.push(item);
        }
    }
    (train, heldout)
}

/// One instance per tree passing the malleability filters (≥10 challenger
/// replies, ≥1 OP reply, post does not contain "changed"); the label is
/// whether the OP awarded any delta.
pub fn build_malleability_dataset(trees: &[DiscussionTree]) -> Vec<MalleabilityInstance> {
    let filter = CorpusFilter::malleability();
    let mut out: Vec<MalleabilityInstance> = trees
        .iter()
        .filter(|t| tree_passes(t, &filter))
        .map(|t| MalleabilityInstance {
            tree_id: t.id.clone(),
            op_text: t.op_text(),
            label: t.has_delta(),
            created_utc: t.created_utc,
        })
        .collect();
    out.sort_by(|a, b| a.tree_id.cmp(&b.tree_id));
    out
}

/// The positive units of a pair list, as a set of (tree, node-id) keys;
/// used to assert positives never repeat.
pub fn positive_keys(pairs: &[ArgumentPair]) -> BTreeSet<(String, Vec<String>)> {
    pairs
        .iter()
        .map(|p| (p.tree_id.clone(), p.positive_unit.node_ids.clone()))
        .collect()
}
