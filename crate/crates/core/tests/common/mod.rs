//! Deliberately naïve re-implementations of the statistics under test.
//! Everything here favors directness over speed so the main implementations
//! can be checked against an independent formulation.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use persuasion::corpus::{CommentNode, CorpusConfig, DiscussionTree, DELETED_AUTHOR};
use persuasion::lexicons::Lexicon;
use persuasion::synth::FIXTURE_SEED;

pub type Counts = BTreeMap<i64, (usize, usize)>;

pub fn fixture_trees() -> Vec<DiscussionTree> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/trees_50.jsonl");
    let file = std::fs::File::open(path).expect("bundled fixture present");
    let (trees, stats) = persuasion::corpus::read_corpus(
        std::io::BufReader::new(file),
        &CorpusConfig::default(),
    )
    .expect("fixture parses");
    assert_eq!(stats.skipped_malformed, 0);
    assert_eq!(trees.len(), 50);
    trees
}

/// Guard against silent drift between the generator and the checked-in file.
pub fn assert_fixture_matches_generator() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/trees_50.jsonl");
    let on_disk = std::fs::read_to_string(path).expect("bundled fixture present");
    let mut regenerated = String::new();
    for record in persuasion::synth::generate_corpus(50, FIXTURE_SEED) {
        regenerated.push_str(&serde_json::to_string(&record).unwrap());
        regenerated.push('\n');
    }
    assert_eq!(on_disk, regenerated, "fixture no longer matches generator");
}

fn bump(counts: &mut Counts, bin: i64, success: bool) {
    let e = counts.entry(bin).or_insert((0, 0));
    e.0 += 1;
    if success {
        e.1 += 1;
    }
}

pub fn counts_of<R: persuasion::Real>(table: &[persuasion::dynamics::BinnedRate<R>]) -> Counts {
    table
        .iter()
        .map(|b| (b.bin_key, (b.trials, b.successes)))
        .collect()
}

fn is_challenger(n: &CommentNode) -> bool {
    !n.is_op && !n.is_deltabot && n.author != DELETED_AUTHOR
}

/// Authors ordered by first comment (time, id), skipping OP/bot/deleted.
fn entry_order(tree: &DiscussionTree) -> Vec<String> {
    let mut first: HashMap<&str, (i64, &str)> = HashMap::new();
    for n in &tree.nodes {
        if !is_challenger(n) {
            continue;
        }
        let key = (n.created_utc, n.id.as_str());
        match first.get_mut(n.author.as_str()) {
            Some(v) if *v <= key => {}
            Some(v) => *v = key,
            None => {
                first.insert(&n.author, key);
            }
        }
    }
    let mut pairs: Vec<(&str, (i64, &str))> = first.into_iter().collect();
    pairs.sort_by_key(|(_, k)| *k);
    pairs.into_iter().map(|(a, _)| a.to_string()).collect()
}

pub fn naive_entry_order(
    trees: &[DiscussionTree],
    min_challengers: usize,
    first_time_only: bool,
) -> Counts {
    // earliest comment anywhere per author
    let mut global: HashMap<&str, (i64, &str)> = HashMap::new();
    for tree in trees {
        for n in &tree.nodes {
            if !is_challenger(n) {
                continue;
            }
            let key = (n.created_utc, n.id.as_str());
            let slot = global.entry(&n.author).or_insert(key);
            if key < *slot {
                *slot = key;
            }
        }
    }
    let mut counts = Counts::new();
    for tree in trees {
        let order = entry_order(tree);
        if order.len() < min_challengers {
            continue;
        }
        let winners: HashSet<&str> = tree
            .delta_awards
            .iter()
            .map(|a| a.awarded_to_author.as_str())
            .collect();
        for (rank, author) in order.iter().enumerate() {
            if first_time_only {
                let here = tree
                    .nodes
                    .iter()
                    .filter(|n| &n.author == author)
                    .map(|n| (n.created_utc, n.id.as_str()))
                    .min()
                    .unwrap();
                if global[author.as_str()] != here {
                    continue;
                }
            }
            bump(&mut counts, rank as i64 + 1, winners.contains(author.as_str()));
        }
    }
    counts
}

fn children_map(tree: &DiscussionTree) -> HashMap<&str, Vec<&CommentNode>> {
    let mut map: HashMap<&str, Vec<&CommentNode>> = HashMap::new();
    for n in &tree.nodes {
        if let Some(p) = n.parent_id.as_deref() {
            map.entry(p).or_default().push(n);
        }
    }
    for v in map.values_mut() {
        v.sort_by(|a, b| (a.created_utc, &a.id).cmp(&(b.created_utc, &b.id)));
    }
    map
}

fn excluded_ids(tree: &DiscussionTree) -> HashSet<&str> {
    let mut ex: HashSet<&str> = tree
        .nodes
        .iter()
        .filter(|n| n.is_deltabot)
        .map(|n| n.id.as_str())
        .collect();
    for a in &tree.delta_awards {
        ex.insert(a.awarding_node.as_str());
    }
    ex
}

/// Root-to-leaf node-id paths with excluded nodes dropped, by plain
/// recursion from each root reply.
pub fn naive_paths(tree: &DiscussionTree) -> Vec<Vec<String>> {
    let children = children_map(tree);
    let excluded = excluded_ids(tree);
    fn descend<'a>(
        node: &'a CommentNode,
        children: &HashMap<&str, Vec<&'a CommentNode>>,
        excluded: &HashSet<&str>,
        prefix: &mut Vec<String>,
        out: &mut Vec<Vec<String>>,
    ) {
        let kept = !excluded.contains(node.id.as_str());
        if kept {
            prefix.push(node.id.clone());
        }
        match children.get(node.id.as_str()) {
            Some(kids) if !kids.is_empty() => {
                for kid in kids {
                    descend(kid, children, excluded, prefix, out);
                }
            }
            _ => {
                if !prefix.is_empty() {
                    out.push(prefix.clone());
                }
            }
        }
        if kept {
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    let mut roots: Vec<&CommentNode> = tree
        .nodes
        .iter()
        .filter(|n| n.parent_id.as_deref() == Some(tree.root.id.as_str()))
        .collect();
    roots.sort_by(|a, b| (a.created_utc, &a.id).cmp(&(b.created_utc, &b.id)));
    for root in roots {
        descend(root, &children, &excluded, &mut Vec::new(), &mut out);
    }
    out
}

fn subtree_root<'a>(tree: &'a DiscussionTree, id: &str) -> Option<&'a str> {
    let by_id: HashMap<&str, &CommentNode> =
        tree.nodes.iter().map(|n| (n.id.as_str(), n)).collect();
    let mut cur = *by_id.get(id)?;
    loop {
        match cur.parent_id.as_deref() {
            Some(p) if p == tree.root.id => return Some(&cur.id),
            Some(p) => cur = by_id.get(p)?,
            None => return None,
        }
    }
}

/// Paths considered for success statistics: in a delta-winning subtree only
/// the prefixes ending at awarded nodes, elsewhere every path.
pub fn naive_considered_paths(tree: &DiscussionTree) -> Vec<Vec<String>> {
    let awarded: BTreeSet<&str> = tree
        .delta_awards
        .iter()
        .map(|a| a.awarded_to_node.as_str())
        .collect();
    let winning: HashSet<&str> = awarded
        .iter()
        .filter_map(|id| subtree_root(tree, id))
        .collect();
    let mut out = Vec::new();
    for target in &awarded {
        for path in naive_paths(tree) {
            if let Some(pos) = path.iter().position(|id| id == target) {
                let prefix = path[..=pos].to_vec();
                if !out.contains(&prefix) {
                    out.push(prefix);
                }
                break;
            }
        }
    }
    for path in naive_paths(tree) {
        let root_of = subtree_root(tree, &path[0]);
        if root_of.map(|r| winning.contains(r)) != Some(true) {
            out.push(path);
        }
    }
    out
}

pub fn naive_back_and_forth(trees: &[DiscussionTree]) -> Counts {
    let mut counts = Counts::new();
    for tree in trees {
        let awarded: HashSet<&str> = tree
            .delta_awards
            .iter()
            .map(|a| a.awarded_to_node.as_str())
            .collect();
        for path in naive_considered_paths(tree) {
            let first = tree.node(&path[0]).unwrap();
            if !is_challenger(first) {
                continue;
            }
            let challenger = first.author.clone();
            let mut k = 0usize;
            let mut clean = true;
            let mut success = false;
            for id in &path {
                let node = tree.node(id).unwrap();
                if node.author == challenger {
                    k += 1;
                } else if !node.is_op {
                    clean = false;
                    break;
                }
                if awarded.contains(id.as_str()) {
                    success = true;
                }
            }
            if clean && k > 0 {
                bump(&mut counts, k as i64, success);
            }
        }
    }
    counts
}

pub fn naive_conversion(trees: &[DiscussionTree]) -> Counts {
    let mut counts = Counts::new();
    for tree in trees {
        let n = entry_order(tree).len();
        if n == 0 {
            continue;
        }
        let mut bin = 0i64;
        let mut cap = 2usize;
        while cap <= n {
            bin += 1;
            cap *= 2;
        }
        bump(&mut counts, bin, !tree.delta_awards.is_empty());
    }
    counts
}

pub fn naive_subtree_comparison(
    trees: &[DiscussionTree],
    lo: usize,
    hi: usize,
) -> (Counts, Counts) {
    let mut single = Counts::new();
    let mut multi = Counts::new();
    for tree in trees {
        let children = children_map(tree);
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
        for reply in tree
            .nodes
            .iter()
            .filter(|n| n.parent_id.as_deref() == Some(tree.root.id.as_str()))
        {
            if reply.is_deltabot {
                continue;
            }
            let mut members = vec![reply];
            let mut queue = vec![reply];
            while let Some(cur) = queue.pop() {
                if let Some(kids) = children.get(cur.id.as_str()) {
                    for kid in kids {
                        members.push(kid);
                        queue.push(kid);
                    }
                }
            }
            let size = members
                .iter()
                .filter(|n| !n.is_deltabot && !awarding.contains(n.id.as_str()))
                .count();
            if size < lo || size > hi {
                continue;
            }
            let challengers: HashSet<&str> = members
                .iter()
                .filter(|n| !n.is_deltabot && !awarding.contains(n.id.as_str()) && !n.is_op)
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
    (single, multi)
}

pub fn naive_experience(trees: &[DiscussionTree]) -> (Counts, Counts) {
    // (time, tree id, success) per author, one attempt per tree with a root reply
    let mut attempts: BTreeMap<String, Vec<(i64, String, bool)>> = BTreeMap::new();
    for tree in trees {
        let winners: HashSet<&str> = tree
            .delta_awards
            .iter()
            .map(|a| a.awarded_to_author.as_str())
            .collect();
        let mut earliest: BTreeMap<&str, i64> = BTreeMap::new();
        for n in &tree.nodes {
            if n.parent_id.as_deref() != Some(tree.root.id.as_str()) || !is_challenger(n) {
                continue;
            }
            let t = earliest.entry(&n.author).or_insert(n.created_utc);
            if n.created_utc < *t {
                *t = n.created_utc;
            }
        }
        for (author, t) in earliest {
            attempts.entry(author.to_string()).or_default().push((
                t,
                tree.id.clone(),
                winners.contains(author),
            ));
        }
    }
    let mut by_count = Counts::new();
    let mut by_quarter = Counts::new();
    for list in attempts.values_mut() {
        list.sort();
        let n = list.len();
        let mut bin = 0i64;
        let mut cap = 2usize;
        while cap <= n {
            bin += 1;
            cap *= 2;
        }
        for (_, _, success) in list.iter() {
            bump(&mut by_count, bin, *success);
        }
        if n >= 16 {
            for (i, (_, _, success)) in list.iter().enumerate() {
                // chunk boundaries: first n%4 chunks hold ceil(n/4)
                let big = n / 4 + 1;
                let small = n / 4;
                let n_big = n % 4;
                let quarter = if i < n_big * big {
                    i / big
                } else {
                    n_big + (i - n_big * big) / small
                };
                bump(&mut by_quarter, quarter as i64 + 1, *success);
            }
        }
    }
    (by_count, by_quarter)
}

// ---------------------------------------------------------------------------
// Pair selection
// ---------------------------------------------------------------------------

fn clean_words(text: &str, stopwords: &Lexicon) -> BTreeSet<String> {
    persuasion::features::tokenize::tokenize_words(text)
        .into_iter()
        .filter(|t| !persuasion::features::tokenize::is_sentinel(t))
        .filter(|t| !stopwords.contains_word(t))
        .collect()
}

fn word_count(text: &str) -> usize {
    persuasion::features::tokenize::tokenize_words(text)
        .iter()
        .filter(|t| !persuasion::features::tokenize::is_sentinel(t))
        .count()
}

/// For each tree, the (winner root-reply id, chosen negative root-reply id)
/// pairs, selected by exhaustive Jaccard comparison over naïvely derived
/// units.
pub fn naive_pair_selection(
    tree: &DiscussionTree,
    stopwords: &Lexicon,
) -> Vec<(String, String, f64)> {
    if entry_order(tree).len() < 10 {
        return Vec::new();
    }
    let Some(op_last) = tree
        .nodes
        .iter()
        .filter(|n| n.is_op)
        .map(|n| n.created_utc)
        .max()
    else {
        return Vec::new();
    };
    let awarded: HashSet<&str> = tree
        .delta_awards
        .iter()
        .map(|a| a.awarded_to_node.as_str())
        .collect();
    // units: challenger-authored nodes along each considered path, deduped
    let mut units: Vec<(Vec<String>, bool)> = Vec::new();
    let mut seen: HashSet<BTreeSet<String>> = HashSet::new();
    let mut paths = Vec::new();
    for path in naive_paths(tree) {
        let root_of = subtree_root(tree, &path[0]);
        let winning: HashSet<&str> = awarded
            .iter()
            .filter_map(|id| subtree_root(tree, id))
            .collect();
        if root_of.map(|r| winning.contains(r)) != Some(true) {
            paths.push(path);
        }
    }
    let mut awarded_sorted: Vec<&str> = awarded.iter().copied().collect();
    awarded_sorted.sort_unstable();
    for target in awarded_sorted {
        for path in naive_paths(tree) {
            if let Some(pos) = path.iter().position(|id| id == target) {
                paths.push(path[..=pos].to_vec());
                break;
            }
        }
    }
    for path in paths {
        let challenger = &tree.node(&path[0]).unwrap().author;
        let ids: Vec<String> = path
            .iter()
            .filter(|id| &tree.node(id).unwrap().author == challenger)
            .cloned()
            .collect();
        if ids.is_empty() {
            continue;
        }
        if !seen.insert(ids.iter().cloned().collect()) {
            continue;
        }
        let wins = ids.iter().any(|id| awarded.contains(id.as_str()));
        units.push((ids, wins));
    }
    let reply_text = |id: &str| tree.node(id).unwrap().body_clean.clone();
    let candidates: Vec<&(Vec<String>, bool)> = units
        .iter()
        .filter(|(ids, wins)| {
            !wins
                && tree.node(&ids[0]).unwrap().created_utc < op_last
                && word_count(&reply_text(&ids[0])) >= 50
        })
        .collect();
    if candidates.len() < 3 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (ids, wins) in &units {
        if !wins || word_count(&reply_text(&ids[0])) < 50 {
            continue;
        }
        let pos_set = clean_words(&reply_text(&ids[0]), stopwords);
        let mut best: Option<(&str, f64, (i64, String))> = None;
        for (cids, _) in &candidates {
            let neg_set = clean_words(&reply_text(&cids[0]), stopwords);
            let inter = pos_set.intersection(&neg_set).count() as f64;
            let union = pos_set.union(&neg_set).count() as f64;
            let score = if union == 0.0 { 0.0 } else { inter / union };
            let node = tree.node(&cids[0]).unwrap();
            let order = (node.created_utc, node.id.clone());
            let take = match &best {
                None => true,
                Some((_, s, o)) => score > *s || (score == *s && order < *o),
            };
            if take {
                best = Some((&cids[0], score, order));
            }
        }
        if let Some((neg, score, _)) = best {
            out.push((ids[0].clone(), neg.to_string(), score));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Statistical tests
// ---------------------------------------------------------------------------

/// Exact two-sided McNemar p by integer binomial coefficients.
pub fn naive_mcnemar_exact(b: usize, c: usize) -> f64 {
    let n = b + c;
    if n == 0 {
        return 1.0;
    }
    let k = b.min(c);
    let mut tail = 0.0f64;
    for i in 0..=k {
        let mut coef = 1u128;
        for j in 0..i {
            coef = coef * (n - j) as u128 / (j + 1) as u128;
        }
        tail += coef as f64 / 2f64.powi(n as i32);
    }
    (2.0 * tail).min(1.0)
}

/// Upper-tail probability of a chi-square with 1 degree of freedom, by
/// Simpson integration of the density.
pub fn naive_chi2_1_sf(stat: f64) -> f64 {
    let pdf = |x: f64| (-x / 2.0).exp() / (2.0 * std::f64::consts::PI * x).sqrt();
    let (a, b) = (stat.max(1e-12), stat + 120.0);
    let n = 400_000usize; // even
    let h = (b - a) / n as f64;
    let mut acc = pdf(a) + pdf(b);
    for i in 1..n {
        let x = a + i as f64 * h;
        acc += pdf(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// Sign-flip permutation p with its own RNG (shifted seed stream).
pub fn naive_permutation(diffs: &[f64], n_resamples: usize, seed: u64) -> f64 {
    use rand::{Rng, SeedableRng};
    if diffs.is_empty() {
        return 1.0;
    }
    let observed: f64 = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15);
    let mut hits = 0usize;
    for _ in 0..n_resamples {
        let m: f64 = diffs
            .iter()
            .map(|&d| if rng.gen::<bool>() { d } else { -d })
            .sum::<f64>()
            / diffs.len() as f64;
        if m >= observed {
            hits += 1;
        }
    }
    (1 + hits) as f64 / (n_resamples + 1) as f64
}

/// Rank-free Mann-Whitney AUC by direct pair comparison.
pub fn naive_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let pos: Vec<f64> = scores
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l)
        .map(|(s, _)| *s)
        .collect();
    let neg: Vec<f64> = scores
        .iter()
        .zip(labels)
        .filter(|(_, &l)| !l)
        .map(|(s, _)| *s)
        .collect();
    let mut acc = 0.0;
    for &p in &pos {
        for &n in &neg {
            acc += if p > n {
                1.0
            } else if p == n {
                0.5
            } else {
                0.0
            };
        }
    }
    acc / (pos.len() * neg.len()) as f64
}

/// Bootstrap-under-null p with an independent RNG.
pub fn naive_bootstrap(scores: &[f64], labels: &[bool], n_resamples: usize, seed: u64) -> f64 {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed.wrapping_mul(0xDEAD_BEEF).wrapping_add(7));
    let mut at_or_below = 0usize;
    for _ in 0..n_resamples {
        let idx: Vec<usize> = (0..scores.len())
            .map(|_| rng.gen_range(0..scores.len()))
            .collect();
        let s: Vec<f64> = idx.iter().map(|&i| scores[i]).collect();
        let l: Vec<bool> = idx.iter().map(|&i| labels[i]).collect();
        let n_pos = l.iter().filter(|&&x| x).count();
        if n_pos == 0 || n_pos == l.len() || naive_auc(&s, &l) <= 0.5 {
            at_or_below += 1;
        }
    }
    at_or_below as f64 / n_resamples as f64
}

/// Quarter split by explicit index arithmetic rather than slicing.
pub fn naive_quarters(tokens: &[String]) -> [Vec<String>; 4] {
    let n = tokens.len();
    let mut out: [Vec<String>; 4] = Default::default();
    for (i, t) in tokens.iter().enumerate() {
        let big = n / 4 + 1;
        let small = n / 4;
        let n_big = n % 4;
        let q = if i < n_big * big {
            i / big
        } else {
            n_big + (i - n_big * big) / small.max(1)
        };
        out[q.min(3)].push(t.clone());
    }
    out
}
