//! Interaction-dynamics tables: success rate against entry order,
//! back-and-forth depth, challenger count, subtree composition, and
//! challenger experience.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{enumerate_paths, path_to_node, DiscussionTree, DELETED_AUTHOR};
use crate::num::Real;

/// A success proportion inside one bin, with the standard error of a
/// proportion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedRate<R: Real> {
    pub bin_key: i64,
    pub trials: usize,
    pub successes: usize,
    pub rate: R,
    pub stderr: R,
}

impl<R: Real> BinnedRate<R> {
    pub fn from_counts(bin_key: i64, trials: usize, successes: usize) -> Self {
        assert!(successes <= trials, "successes exceed trials in bin {bin_key}");
        let n = R::from_count(trials);
        let rate = if trials == 0 {
            R::zero()
        } else {
            R::from_count(successes) / n
        };
        let stderr = if trials == 0 {
            R::zero()
        } else {
            (rate * (R::one() - rate) / n).sqrt()
        };
        BinnedRate {
            bin_key,
            trials,
            successes,
            rate,
            stderr,
        }
    }
}

fn finish<R: Real>(counts: BTreeMap<i64, (usize, usize)>) -> Vec<BinnedRate<R>> {
    counts
        .into_iter()
        .map(|(bin, (trials, successes))| BinnedRate::from_counts(bin, trials, successes))
        .collect()
}

fn bump(counts: &mut BTreeMap<i64, (usize, usize)>, bin: i64, success: bool) {
    let entry = counts.entry(bin).or_insert((0, 0));
    entry.0 += 1;
    if success {
        entry.1 += 1;
    }
}

/// Delta rate of the k-th challenger to enter a discussion (1-based).
///
/// Only trees with at least `min_challengers` unique challengers count.
/// With `first_time_only`, a challenger is counted only when this tree
/// holds their earliest comment anywhere in `trees` (ties broken by
/// comment id).
pub fn entry_order_table<R: Real>(
    trees: &[DiscussionTree],
    min_challengers: usize,
    first_time_only: bool,
) -> Vec<BinnedRate<R>> {
    // Global first appearance per author, for the first-timer restriction.
    let mut global_first: BTreeMap<&str, (i64, &str)> = BTreeMap::new();
    if first_time_only {
        for tree in trees {
            for n in &tree.nodes {
                if n.is_op || n.is_deltabot || n.author == DELETED_AUTHOR {
                    continue;
                }
                let key = (n.created_utc, n.id.as_str());
                global_first
                    .entry(n.author.as_str())
                    .and_modify(|v| {
                        if key < *v {
                            *v = key;
                        }
                    })
                    .or_insert(key);
            }
        }
    }
    let mut counts: BTreeMap<i64, (usize, usize)> = BTreeMap::new();
    for tree in trees {
        let order = tree.challengers_in_entry_order();
        if order.len() < min_challengers {
            continue;
        }
        let winners = tree.delta_recipients();
        for (idx, author) in order.iter().enumerate() {
            if first_time_only {
                let first_here = tree
                    .nodes
                    .iter()
                    .filter(|n| n.author == *author)
                    .map(|n| (n.created_utc, n.id.as_str()))
                    .min()
                    .expect("challenger has a comment");
                if global_first.get(author) != Some(&first_here) {
                    continue;
                }
            }
            bump(&mut counts, (idx + 1) as i64, winners.contains(author));
        }
    }
    finish(counts)
}

/// Root-to-leaf paths under consideration: in a delta-winning subtree only
/// the paths ending at awarded comments count, elsewhere every path.
fn considered_paths(tree: &DiscussionTree) -> Vec<Vec<String>> {
    let awarded: HashSet<&str> = tree
        .delta_awards
        .iter()
        .map(|a| a.awarded_to_node.as_str())
        .collect();
    let mut winning_subtrees: HashSet<String> = HashSet::new();
    for award in &tree.delta_awards {
        if let Some(root) = crate::corpus::subtree_root_of(tree, &award.awarded_to_node) {
            winning_subtrees.insert(root);
        }
    }
    let mut out = Vec::new();
    for node_id in awarded.iter() {
        if let Some(path) = path_to_node(tree, node_id) {
            out.push(path);
        }
    }
    for path in enumerate_paths(tree) {
        let Some(first) = path.first() else { continue };
        let subtree = crate::corpus::subtree_root_of(tree, first);
        let in_winning = subtree.map(|s| winning_subtrees.contains(&s)).unwrap_or(false);
        if !in_winning {
            out.push(path);
        }
    }
    out
}

/// Delta rate of one-on-one exchanges, binned by how many comments the
/// root challenger wrote on the path. Paths with any third author are
/// excluded.
pub fn back_and_forth_table<R: Real>(trees: &[DiscussionTree]) -> Vec<BinnedRate<R>> {
    let mut counts: BTreeMap<i64, (usize, usize)> = BTreeMap::new();
    for tree in trees {
        let awarded: HashSet<&str> = tree
            .delta_awards
            .iter()
            .map(|a| a.awarded_to_node.as_str())
            .collect();
        for path in considered_paths(tree) {
            let Some(first) = path.first() else { continue };
            let Some(first_node) = tree.node(first) else { continue };
            let challenger = first_node.author.clone();
            if first_node.is_op || first_node.is_deltabot || challenger == DELETED_AUTHOR {
                continue;
            }
            let mut only_pair = true;
            let mut challenger_comments = 0usize;
            let mut success = false;
            for id in &path {
                let Some(node) = tree.node(id) else { continue };
                if node.author == challenger {
                    challenger_comments += 1;
                } else if !node.is_op {
                    only_pair = false;
                    break;
                }
                if awarded.contains(id.as_str()) {
                    success = true;
                }
            }
            if only_pair && challenger_comments > 0 {
                bump(&mut counts, challenger_comments as i64, success);
            }
        }
    }
    finish(counts)
}

/// Tree-level conversion rate binned by floor(log2(unique challengers)).
pub fn conversion_by_challengers<R: Real>(trees: &[DiscussionTree]) -> Vec<BinnedRate<R>> {
    let mut counts: BTreeMap<i64, (usize, usize)> = BTreeMap::new();
    for tree in trees {
        let n = tree.challengers_in_entry_order().len();
        if n == 0 {
            continue;
        }
        let bin = (n as f64).log2().floor() as i64;
        bump(&mut counts, bin, tree.has_delta());
    }
    finish(counts)
}

/// Delta rate of small subtrees (root reply plus descendants), split by
/// whether their non-OP comments come from one challenger or several.
///
/// A subtree's comment count excludes DeltaBot comments and the OP replies
/// that award deltas, matching the path enumeration.
pub fn subtree_comparison<R: Real>(
    trees: &[DiscussionTree],
    size_range: std::ops::RangeInclusive<usize>,
) -> (Vec<BinnedRate<R>>, Vec<BinnedRate<R>>) {
    let mut single: BTreeMap<i64, (usize, usize)> = BTreeMap::new();
    let mut multi: BTreeMap<i64, (usize, usize)> = BTreeMap::new();
    for tree in trees {
        let awarding: HashSet<&str> = tree
            .delta_awards
            .iter()
            .map(|a| a.awarding_node.as_str())
            .collect();
        let awarded: HashSet<&str> = tree
            .delta_awards
            .iter()
            .map(|a| a.awarded_to_node.as_str())
            .collect();
        for reply in tree.root_replies() {
            if reply.is_deltabot {
                continue;
            }
            // Breadth-first collection of the subtree's node ids.
            let mut stack = vec![reply.id.clone()];
            let mut members: Vec<&crate::corpus::CommentNode> = Vec::new();
            while let Some(id) = stack.pop() {
                if let Some(node) = tree.node(&id) {
                    members.push(node);
                }
                for child in tree.children_of(&id) {
                    stack.push(child.id.clone());
                }
            }
            let counted: Vec<&&crate::corpus::CommentNode> = members
                .iter()
                .filter(|n| !n.is_deltabot && !awarding.contains(n.id.as_str()))
                .collect();
            let size = counted.len();
            if !size_range.contains(&size) {
                continue;
            }
            let challengers: HashSet<&str> = counted
                .iter()
                .filter(|n| !n.is_op)
                .map(|n| n.author.as_str())
                .collect();
            if challengers.is_empty() {
                continue;
            }
            let success = members.iter().any(|n| awarded.contains(n.id.as_str()));
            let target = if challengers.len() == 1 {
                &mut single
            } else {
                &mut multi
            };
            bump(target, size as i64, success);
        }
    }
    (finish(single), finish(multi))
}

/// One challenger attempt: a tree where the author wrote at least one root
/// reply. Success means the OP awarded that author a delta in the tree.
#[derive(Debug, Clone)]
struct Attempt {
    time: i64,
    tree_id: String,
    success: bool,
}

fn collect_attempts(trees: &[DiscussionTree]) -> BTreeMap<String, Vec<Attempt>> {
    let mut by_author: BTreeMap<String, Vec<Attempt>> = BTreeMap::new();
    for tree in trees {
        let winners = tree.delta_recipients();
        let mut seen: BTreeMap<&str, i64> = BTreeMap::new();
        for reply in tree.root_replies() {
            if reply.is_op || reply.is_deltabot || reply.author == DELETED_AUTHOR {
                continue;
            }
            let t = seen.entry(reply.author.as_str()).or_insert(reply.created_utc);
            if reply.created_utc < *t {
                *t = reply.created_utc;
            }
        }
        for (author, time) in seen {
            by_author.entry(author.to_string()).or_default().push(Attempt {
                time,
                tree_id: tree.id.clone(),
                success: winners.contains(author),
            });
        }
    }
    for attempts in by_author.values_mut() {
        attempts.sort_by(|a, b| (a.time, &a.tree_id).cmp(&(b.time, &b.tree_id)));
    }
    by_author
}

/// Split `n` items into 4 time-ordered chunks whose sizes differ by at
/// most one, earliest chunks taking the remainder (18 → 5, 5, 4, 4).
pub fn chunk_sizes(n: usize) -> [usize; 4] {
    let base = n / 4;
    let extra = n % 4;
    let mut sizes = [base; 4];
    for size in sizes.iter_mut().take(extra) {
        *size += 1;
    }
    sizes
}

/// Experience tables: per-attempt delta rate against log2 of the author's
/// total attempts, and against lifetime quarter for authors with at least
/// 16 attempts.
pub fn experience_tables<R: Real>(
    trees: &[DiscussionTree],
) -> (Vec<BinnedRate<R>>, Vec<BinnedRate<R>>) {
    let by_author = collect_attempts(trees);
    let mut by_count: BTreeMap<i64, (usize, usize)> = BTreeMap::new();
    let mut by_quarter: BTreeMap<i64, (usize, usize)> = BTreeMap::new();
    for attempts in by_author.values() {
        let n = attempts.len();
        let bin = (n as f64).log2().floor() as i64;
        for a in attempts {
            bump(&mut by_count, bin, a.success);
        }
        if n >= 16 {
            let sizes = chunk_sizes(n);
            let mut offset = 0usize;
            for (quarter, &size) in sizes.iter().enumerate() {
                for a in &attempts[offset..offset + size] {
                    bump(&mut by_quarter, (quarter + 1) as i64, a.success);
                }
                offset += size;
            }
        }
    }
    (finish(by_count), finish(by_quarter))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_tree, CommentRecord, CorpusConfig, TreeRecord};

    fn record(id: &str, comments: Vec<CommentRecord>) -> TreeRecord {
        let comments = comments
            .into_iter()
            .map(|mut c| {
                if c.parent_id.is_empty() {
                    c.parent_id = id.to_string();
                }
                c
            })
            .collect();
        TreeRecord {
            id: id.to_string(),
            title: format!("CMV: {id}"),
            author: "op".to_string(),
            body: "view".to_string(),
            created_utc: 0,
            comments,
        }
    }

    fn comment(id: &str, author: &str, t: i64, parent: Option<&str>, body: &str) -> CommentRecord {
        CommentRecord {
            id: id.to_string(),
            author: author.to_string(),
            created_utc: t,
            parent_id: parent.unwrap_or("").to_string(),
            body: body.to_string(),
        }
    }

    fn parse(record: &TreeRecord) -> DiscussionTree {
        parse_tree(record, &CorpusConfig::default()).unwrap()
    }

    /// op; challengers a then b; a wins via an OP reply with a marker.
    fn winning_tree(id: &str) -> DiscussionTree {
        parse(&record(
            id,
            vec![
                comment("a1", "a", 10, None, "first in"),
                comment("b1", "b", 20, None, "second in"),
                comment("o1", "op", 30, Some("a1"), "∆ fair point"),
            ],
        ))
    }

    #[test]
    fn first_entrant_win_lands_in_bin_one() {
        let trees = vec![winning_tree("t1")];
        let table: Vec<BinnedRate<f64>> = entry_order_table(&trees, 1, false);
        assert_eq!(table.len(), 2);
        assert_eq!(table[0].bin_key, 1);
        assert_eq!((table[0].trials, table[0].successes), (1, 1));
        assert_eq!((table[1].trials, table[1].successes), (1, 0));
    }

    #[test]
    fn entry_order_respects_min_challengers() {
        let trees = vec![winning_tree("t1")];
        let table: Vec<BinnedRate<f64>> = entry_order_table(&trees, 3, false);
        assert!(table.is_empty());
    }

    #[test]
    fn first_time_only_drops_repeat_challengers() {
        // author a appears in t1 (t=10) and again in t2 (t=100)
        let t1 = winning_tree("t1");
        let t2 = parse(&record(
            "t2",
            vec![comment("a9", "a", 100, None, "again")],
        ));
        let trees = vec![t1, t2];
        let table: Vec<BinnedRate<f64>> = entry_order_table(&trees, 1, true);
        // a counts in t1 only; b counts in t1; t2 contributes nothing
        let total: usize = table.iter().map(|b| b.trials).sum();
        assert_eq!(total, 2);
    }

    #[test]
    fn back_and_forth_counts_challenger_comments() {
        // a → op → a, no delta: k = 2, failure
        let tree = parse(&record(
            "t1",
            vec![
                comment("a1", "a", 10, None, "claim"),
                comment("o1", "op", 20, Some("a1"), "pushback"),
                comment("a2", "a", 30, Some("o1"), "rebuttal"),
            ],
        ));
        let table: Vec<BinnedRate<f64>> = back_and_forth_table(&[tree]);
        assert_eq!(table.len(), 1);
        assert_eq!(table[0].bin_key, 2);
        assert_eq!((table[0].trials, table[0].successes), (1, 0));
    }

    #[test]
    fn back_and_forth_excludes_third_authors() {
        let tree = parse(&record(
            "t1",
            vec![
                comment("a1", "a", 10, None, "claim"),
                comment("c1", "c", 20, Some("a1"), "interjection"),
            ],
        ));
        let table: Vec<BinnedRate<f64>> = back_and_forth_table(&[tree]);
        assert!(table.is_empty());
    }

    #[test]
    fn back_and_forth_uses_only_the_winning_path() {
        // winning subtree: a1 has two branches; delta on a2 only
        let tree = parse(&record(
            "t1",
            vec![
                comment("a1", "a", 10, None, "claim"),
                comment("o1", "op", 20, Some("a1"), "hm"),
                comment("a2", "a", 30, Some("o1"), "rebuttal"),
                comment("o2", "op", 40, Some("a2"), "∆ convinced"),
                comment("a3", "a", 50, Some("a1"), "side branch"),
            ],
        ));
        let table: Vec<BinnedRate<f64>> = back_and_forth_table(&[tree]);
        // only the a1→o1→a2 path counts: k=2, success
        assert_eq!(table.len(), 1);
        assert_eq!(table[0].bin_key, 2);
        assert_eq!((table[0].trials, table[0].successes), (1, 1));
    }

    #[test]
    fn conversion_bins_by_log2() {
        let mut comments = Vec::new();
        for i in 0..10 {
            comments.push(comment(&format!("c{i:02}"), &format!("u{i}"), 10 + i, None, "x"));
        }
        let ten = parse(&record("t1", comments));
        let one = parse(&record("t2", vec![comment("a1", "a", 10, None, "x")]));
        let table: Vec<BinnedRate<f64>> = conversion_by_challengers(&[ten, one]);
        let bins: Vec<i64> = table.iter().map(|b| b.bin_key).collect();
        assert_eq!(bins, vec![0, 3]);
    }

    #[test]
    fn subtree_single_vs_multi() {
        // single-challenger subtree of 3 comments, wins
        let tree = parse(&record(
            "t1",
            vec![
                comment("a1", "a", 10, None, "claim"),
                comment("o1", "op", 20, Some("a1"), "hm"),
                comment("a2", "a", 30, Some("o1"), "more"),
                comment("o2", "op", 40, Some("a2"), "∆ ok"),
                // multi-challenger subtree of 2 comments, loses
                comment("b1", "b", 50, None, "other claim"),
                comment("c1", "c", 60, Some("b1"), "agree"),
            ],
        ));
        let (single, multi): (Vec<BinnedRate<f64>>, Vec<BinnedRate<f64>>) =
            subtree_comparison(&[tree], 2..=4);
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].bin_key, 3);
        assert_eq!((single[0].trials, single[0].successes), (1, 1));
        assert_eq!(multi.len(), 1);
        assert_eq!(multi[0].bin_key, 2);
        assert_eq!((multi[0].trials, multi[0].successes), (1, 0));
    }

    #[test]
    fn chunk_sizes_examples() {
        assert_eq!(chunk_sizes(16), [4, 4, 4, 4]);
        assert_eq!(chunk_sizes(18), [5, 5, 4, 4]);
        assert_eq!(chunk_sizes(17), [5, 4, 4, 4]);
    }

    #[test]
    fn experience_counts_attempts_and_quarters() {
        // author a attempts in 16 trees, winning the last 4
        let mut trees = Vec::new();
        for i in 0..16 {
            let body = "claim";
            let mut comments = vec![comment("a1", "a", 10 + i, None, body)];
            if i >= 12 {
                comments.push(comment("o1", "op", 20 + i, Some("a1"), "∆ yes"));
            }
            trees.push(parse(&record(&format!("t{i:02}"), comments)));
        }
        let (by_count, by_quarter): (Vec<BinnedRate<f64>>, Vec<BinnedRate<f64>>) =
            experience_tables(&trees);
        assert_eq!(by_count.len(), 1);
        assert_eq!(by_count[0].bin_key, 4); // log2(16)
        assert_eq!((by_count[0].trials, by_count[0].successes), (16, 4));
        assert_eq!(by_quarter.len(), 4);
        assert_eq!(by_quarter[3].successes, 4);
        assert_eq!(by_quarter[0].successes, 0);
    }

    #[test]
    fn tables_are_input_order_invariant() {
        let a = winning_tree("t1");
        let b = parse(&record("t2", vec![comment("x1", "x", 5, None, "claim")]));
        let fwd: Vec<BinnedRate<f64>> = entry_order_table(&[a.clone(), b.clone()], 1, false);
        let rev: Vec<BinnedRate<f64>> = entry_order_table(&[b, a], 1, false);
        assert_eq!(fwd, rev);
    }
}
