//! Discussion-tree ingestion: schema parsing, text normalization, delta
//! detection, path/unit enumeration and corpus filtering.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Sentinel standing in for a removed blockquote line.
pub const QUOTE_SENTINEL: &str = "⟦QUOTE⟧";
/// Sentinel standing in for a removed URL.
pub const URL_SENTINEL: &str = "⟦URL⟧";

/// Author string Reddit substitutes for deleted accounts.
pub const DELETED_AUTHOR: &str = "[deleted]";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("tree {tree_id}: original poster is \"[deleted]\"")]
    DeletedAuthor { tree_id: String },
    #[error("malformed record: {detail}")]
    MalformedRecord { detail: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// One comment (or the original post) in a discussion tree.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommentNode {
    pub id: String,
    pub author: String,
    pub created_utc: i64,
    /// `None` for the original post.
    pub parent_id: Option<String>,
    /// Original Markdown source.
    pub body_raw: String,
    /// Edits removed, blockquotes and URLs replaced by sentinel tokens.
    pub body_clean: String,
    pub is_op: bool,
    pub is_deltabot: bool,
}

/// An explicit view-change acknowledgment by the original poster.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaAward {
    /// The comment being credited with the view change.
    pub awarded_to_node: String,
    pub awarded_to_author: String,
    /// The OP reply that contains the delta marker.
    pub awarding_node: String,
    /// Whether a DeltaBot confirmation reply is present under the awarding node.
    pub confirmed_by_deltabot: bool,
}

/// A full discussion: original post plus every comment that survived parsing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscussionTree {
    pub id: String,
    pub title: String,
    pub op_author: String,
    pub created_utc: i64,
    /// The original post as a node (`parent_id` is `None`).
    pub root: CommentNode,
    /// Comments only, sorted by `(created_utc, id)`.
    pub nodes: Vec<CommentNode>,
    pub delta_awards: Vec<DeltaAward>,
    /// Comments dropped because their parent chain did not reach the root.
    pub orphan_count: usize,
    /// Delta markers found in OP replies directly under the original post.
    pub dangling_delta_count: usize,
}

impl DiscussionTree {
    pub fn node(&self, id: &str) -> Option<&CommentNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Children of a node id (the root id yields the root replies), sorted by
    /// `(created_utc, id)`.
    pub fn children_of(&self, id: &str) -> Vec<&CommentNode> {
        let mut out: Vec<&CommentNode> = self
            .nodes
            .iter()
            .filter(|n| n.parent_id.as_deref() == Some(id))
            .collect();
        out.sort_by(|a, b| (a.created_utc, &a.id).cmp(&(b.created_utc, &b.id)));
        out
    }

    /// Direct replies to the original post.
    pub fn root_replies(&self) -> Vec<&CommentNode> {
        self.children_of(&self.root.id)
    }

    /// Comment authors other than the OP, DeltaBot and "[deleted]",
    /// ordered by the timestamp of each author's first comment
    /// (ties broken by comment id).
    pub fn challengers_in_entry_order(&self) -> Vec<&str> {
        let mut first_seen: BTreeMap<&str, (i64, &str)> = BTreeMap::new();
        for n in &self.nodes {
            if n.is_op || n.is_deltabot || n.author == DELETED_AUTHOR {
                continue;
            }
            let key = (n.created_utc, n.id.as_str());
            first_seen
                .entry(n.author.as_str())
                .and_modify(|v| {
                    if key < *v {
                        *v = key;
                    }
                })
                .or_insert(key);
        }
        let mut authors: Vec<(&str, (i64, &str))> = first_seen.into_iter().collect();
        authors.sort_by(|a, b| a.1.cmp(&b.1));
        authors.into_iter().map(|(a, _)| a).collect()
    }

    /// Number of replies from challengers (non-OP, non-DeltaBot, non-deleted).
    pub fn challenger_reply_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| !n.is_op && !n.is_deltabot && n.author != DELETED_AUTHOR)
            .count()
    }

    /// Number of replies the OP made (excluding the original post itself).
    pub fn op_reply_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_op).count()
    }

    /// Whether the OP awarded at least one delta.
    pub fn has_delta(&self) -> bool {
        !self.delta_awards.is_empty()
    }

    /// Authors who received at least one delta in this tree.
    pub fn delta_recipients(&self) -> HashSet<&str> {
        self.delta_awards
            .iter()
            .map(|a| a.awarded_to_author.as_str())
            .collect()
    }

    /// Title plus normalized body of the original post.
    pub fn op_text(&self) -> String {
        if self.root.body_clean.is_empty() {
            self.title.clone()
        } else {
            format!("{}\n\n{}", self.title, self.root.body_clean)
        }
    }
}

/// A root challenger's comments along one root-to-leaf path.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RootedPathUnit {
    pub tree_id: String,
    pub challenger: String,
    /// The unit's comment ids in path order; the first is the root reply.
    pub node_ids: Vec<String>,
    pub root_reply_id: String,
    pub delta_winning: bool,
}

impl RootedPathUnit {
    fn id_set(&self) -> BTreeSet<&str> {
        self.node_ids.iter().map(|s| s.as_str()).collect()
    }
}

/// Filtering thresholds applied before the dynamics and prediction analyses.
#[derive(Debug, Clone)]
pub struct CorpusFilter {
    pub min_challenger_replies: usize,
    pub min_op_replies: usize,
    /// Trees whose original post contains any of these words are dropped.
    pub exclude_body_words: Vec<String>,
}

impl Default for CorpusFilter {
    fn default() -> Self {
        Self {
            min_challenger_replies: 10,
            min_op_replies: 1,
            exclude_body_words: Vec::new(),
        }
    }
}

impl CorpusFilter {
    /// Filter used for the opinion-malleability task: additionally drops
    /// posts containing the word "changed".
    pub fn malleability() -> Self {
        Self {
            exclude_body_words: vec!["changed".to_string()],
            ..Self::default()
        }
    }
}

/// Knobs for parsing: delta markers, bot identity, edit-removal pattern.
#[derive(Debug, Clone)]
pub struct CorpusConfig {
    pub delta_markers: Vec<String>,
    pub deltabot_author: String,
    /// Lines whose first token matches this start an edit block; the block
    /// extends to the end of the paragraph.
    pub edit_line_pattern: Regex,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            delta_markers: vec![
                "∆".to_string(),
                "Δ".to_string(),
                "&#8710;".to_string(),
                "!delta".to_string(),
            ],
            deltabot_author: "DeltaBot".to_string(),
            edit_line_pattern: Regex::new(r"^(EDIT|Edit|edit)\s*[:\d]").unwrap(),
        }
    }
}

impl CorpusConfig {
    fn body_has_marker(&self, body: &str) -> bool {
        let lower = body.to_lowercase();
        self.delta_markers.iter().any(|m| {
            if m.chars().all(|c| c.is_ascii()) {
                lower.contains(&m.to_lowercase())
            } else {
                body.contains(m.as_str())
            }
        })
    }
}

// ---------------------------------------------------------------------------
// Normalized input schema
// ---------------------------------------------------------------------------

/// One line of the normalized line-delimited JSON corpus.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeRecord {
    pub id: String,
    pub title: String,
    pub author: String,
    pub body: String,
    pub created_utc: i64,
    pub comments: Vec<CommentRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommentRecord {
    pub id: String,
    pub author: String,
    pub body: String,
    pub created_utc: i64,
    pub parent_id: String,
}

impl From<&DiscussionTree> for TreeRecord {
    fn from(tree: &DiscussionTree) -> Self {
        TreeRecord {
            id: tree.id.clone(),
            title: tree.title.clone(),
            author: tree.op_author.clone(),
            body: tree.root.body_raw.clone(),
            created_utc: tree.created_utc,
            comments: tree
                .nodes
                .iter()
                .map(|n| CommentRecord {
                    id: n.id.clone(),
                    author: n.author.clone(),
                    body: n.body_raw.clone(),
                    created_utc: n.created_utc,
                    parent_id: n.parent_id.clone().unwrap_or_default(),
                })
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Text normalization
// ---------------------------------------------------------------------------

fn url_regex() -> &'static Regex {
    use std::sync::OnceLock;
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r#"(?:https?://|www\.)[^\s<>()\[\]"']+"#).unwrap())
}

/// Remove explicit edits, replace blockquote lines and URLs with sentinels.
///
/// Idempotent; Markdown markers other than blockquotes are preserved so the
/// formatting features can still read them from `body_raw`.
pub fn normalize_text(body_raw: &str) -> String {
    normalize_text_with(body_raw, &CorpusConfig::default().edit_line_pattern)
}

pub fn normalize_text_with(body_raw: &str, edit_line_pattern: &Regex) -> String {
    let mut kept: Vec<String> = Vec::new();
    let mut skipping_edit = false;
    for line in body_raw.lines() {
        let trimmed = line.trim_start();
        if trimmed.is_empty() {
            skipping_edit = false;
            kept.push(String::new());
            continue;
        }
        if skipping_edit {
            continue;
        }
        if edit_line_pattern.is_match(trimmed) {
            skipping_edit = true;
            continue;
        }
        if trimmed.starts_with('>') {
            kept.push(QUOTE_SENTINEL.to_string());
            continue;
        }
        kept.push(url_regex().replace_all(line, URL_SENTINEL).into_owned());
    }
    let mut out = kept.join("\n");
    while out.ends_with('\n') || out.ends_with(' ') {
        out.pop();
    }
    out
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// Parse a normalized record into a validated tree.
///
/// Orphaned comments (parent chain not reaching the root) are dropped and
/// counted; comments are sorted by timestamp; delta awards are detected.
pub fn parse_tree(record: &TreeRecord, config: &CorpusConfig) -> Result<DiscussionTree, CorpusError> {
    if record.author == DELETED_AUTHOR {
        return Err(CorpusError::DeletedAuthor {
            tree_id: record.id.clone(),
        });
    }
    if record.id.is_empty() {
        return Err(CorpusError::MalformedRecord {
            detail: "empty tree id".to_string(),
        });
    }
    let mut seen: HashSet<&str> = HashSet::new();
    seen.insert(record.id.as_str());
    for c in &record.comments {
        if c.id.is_empty() {
            return Err(CorpusError::MalformedRecord {
                detail: format!("tree {}: comment with empty id", record.id),
            });
        }
        if !seen.insert(c.id.as_str()) {
            return Err(CorpusError::MalformedRecord {
                detail: format!("tree {}: duplicate comment id {}", record.id, c.id),
            });
        }
    }

    // Keep only comments reachable from the root; everything else is an orphan.
    let by_parent: HashMap<&str, Vec<&CommentRecord>> = {
        let mut m: HashMap<&str, Vec<&CommentRecord>> = HashMap::new();
        for c in &record.comments {
            m.entry(c.parent_id.as_str()).or_default().push(c);
        }
        m
    };
    let mut reachable: HashSet<&str> = HashSet::new();
    let mut stack = vec![record.id.as_str()];
    while let Some(id) = stack.pop() {
        if let Some(children) = by_parent.get(id) {
            for c in children {
                if reachable.insert(c.id.as_str()) {
                    stack.push(c.id.as_str());
                }
            }
        }
    }
    let orphan_count = record.comments.len() - reachable.len();

    let mut nodes: Vec<CommentNode> = record
        .comments
        .iter()
        .filter(|c| reachable.contains(c.id.as_str()))
        .map(|c| CommentNode {
            id: c.id.clone(),
            author: c.author.clone(),
            created_utc: c.created_utc,
            parent_id: Some(c.parent_id.clone()),
            body_raw: c.body.clone(),
            body_clean: normalize_text_with(&c.body, &config.edit_line_pattern),
            is_op: c.author == record.author,
            is_deltabot: c.author == config.deltabot_author,
        })
        .collect();
    nodes.sort_by(|a, b| (a.created_utc, &a.id).cmp(&(b.created_utc, &b.id)));

    let root = CommentNode {
        id: record.id.clone(),
        author: record.author.clone(),
        created_utc: record.created_utc,
        parent_id: None,
        body_raw: record.body.clone(),
        body_clean: normalize_text_with(&record.body, &config.edit_line_pattern),
        is_op: true,
        is_deltabot: false,
    };

    let mut tree = DiscussionTree {
        id: record.id.clone(),
        title: record.title.clone(),
        op_author: record.author.clone(),
        created_utc: record.created_utc,
        root,
        nodes,
        delta_awards: Vec::new(),
        orphan_count,
        dangling_delta_count: 0,
    };
    let (awards, dangling) = scan_delta_awards(&tree, config);
    tree.delta_awards = awards;
    tree.dangling_delta_count = dangling;
    Ok(tree)
}

/// Detect delta awards: OP replies containing a marker credit their parent.
///
/// Markers inside the original post body never produce an award; a marker in
/// an OP reply directly under the root is a dangling delta and is only
/// counted. Order-independent over node input order.
pub fn detect_delta_awards(tree: &DiscussionTree, config: &CorpusConfig) -> Vec<DeltaAward> {
    scan_delta_awards(tree, config).0
}

fn scan_delta_awards(tree: &DiscussionTree, config: &CorpusConfig) -> (Vec<DeltaAward>, usize) {
    let by_id: HashMap<&str, &CommentNode> =
        tree.nodes.iter().map(|n| (n.id.as_str(), n)).collect();
    let mut awards = Vec::new();
    let mut dangling = 0;
    let mut ordered: Vec<&CommentNode> = tree.nodes.iter().collect();
    ordered.sort_by(|a, b| (a.created_utc, &a.id).cmp(&(b.created_utc, &b.id)));
    for node in ordered {
        if !node.is_op || !config.body_has_marker(&node.body_clean) {
            continue;
        }
        let parent_id = node.parent_id.as_deref().unwrap_or_default();
        if parent_id == tree.root.id {
            dangling += 1;
            continue;
        }
        let Some(parent) = by_id.get(parent_id) else {
            continue;
        };
        if parent.is_op || parent.is_deltabot || parent.author == tree.op_author {
            continue;
        }
        let confirmed = tree
            .nodes
            .iter()
            .any(|c| c.parent_id.as_deref() == Some(node.id.as_str()) && c.is_deltabot);
        awards.push(DeltaAward {
            awarded_to_node: parent.id.clone(),
            awarded_to_author: parent.author.clone(),
            awarding_node: node.id.clone(),
            confirmed_by_deltabot: confirmed,
        });
    }
    (awards, dangling)
}

// ---------------------------------------------------------------------------
// Paths and rooted path-units
// ---------------------------------------------------------------------------

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

/// One path per leaf, from root reply to leaf, with DeltaBot replies and the
/// OP's delta-awarding comments dropped from the sequence. Empty sequences
/// are omitted.
pub fn enumerate_paths(tree: &DiscussionTree) -> Vec<Vec<String>> {
    let excluded = excluded_ids(tree);
    let by_id: HashMap<&str, &CommentNode> =
        tree.nodes.iter().map(|n| (n.id.as_str(), n)).collect();
    let has_children: HashSet<&str> = tree
        .nodes
        .iter()
        .filter_map(|n| n.parent_id.as_deref())
        .filter(|p| *p != tree.root.id)
        .collect();
    let mut leaves: Vec<&CommentNode> = tree
        .nodes
        .iter()
        .filter(|n| !has_children.contains(n.id.as_str()))
        .collect();
    leaves.sort_by(|a, b| (a.created_utc, &a.id).cmp(&(b.created_utc, &b.id)));

    let mut paths = Vec::new();
    for leaf in leaves {
        let mut seq: Vec<String> = Vec::new();
        let mut cur = Some(leaf);
        while let Some(node) = cur {
            if !excluded.contains(node.id.as_str()) {
                seq.push(node.id.clone());
            }
            cur = node
                .parent_id
                .as_deref()
                .filter(|p| *p != tree.root.id)
                .and_then(|p| by_id.get(p).copied());
        }
        seq.reverse();
        if !seq.is_empty() {
            paths.push(seq);
        }
    }
    paths
}

/// Root-reply-to-target node sequence with excluded nodes dropped.
pub fn path_to_node(tree: &DiscussionTree, target: &str) -> Option<Vec<String>> {
    let excluded = excluded_ids(tree);
    let by_id: HashMap<&str, &CommentNode> =
        tree.nodes.iter().map(|n| (n.id.as_str(), n)).collect();
    let mut seq = Vec::new();
    let mut cur = by_id.get(target).copied();
    cur?;
    while let Some(node) = cur {
        if !excluded.contains(node.id.as_str()) {
            seq.push(node.id.clone());
        }
        cur = node
            .parent_id
            .as_deref()
            .filter(|p| *p != tree.root.id)
            .and_then(|p| by_id.get(p).copied());
    }
    seq.reverse();
    if seq.is_empty() {
        None
    } else {
        Some(seq)
    }
}

/// The root reply id a node descends from, following parent links.
pub fn subtree_root_of(tree: &DiscussionTree, node_id: &str) -> Option<String> {
    let by_id: HashMap<&str, &CommentNode> =
        tree.nodes.iter().map(|n| (n.id.as_str(), n)).collect();
    let mut cur = by_id.get(node_id).copied()?;
    loop {
        match cur.parent_id.as_deref() {
            Some(p) if p == tree.root.id => return Some(cur.id.clone()),
            Some(p) => cur = by_id.get(p).copied()?,
            None => return None,
        }
    }
}

/// Extract rooted path-units.
///
/// In a subtree where a delta was awarded only the winning paths (root reply
/// to awarded node) are considered; other subtrees contribute every path.
/// Units with identical node-id sets are deduplicated.
pub fn rooted_path_units(tree: &DiscussionTree) -> Vec<RootedPathUnit> {
    let by_id: HashMap<&str, &CommentNode> =
        tree.nodes.iter().map(|n| (n.id.as_str(), n)).collect();
    let awarded_ids: HashSet<&str> = tree
        .delta_awards
        .iter()
        .map(|a| a.awarded_to_node.as_str())
        .collect();
    let winning_subtrees: HashSet<String> = awarded_ids
        .iter()
        .filter_map(|id| subtree_root_of(tree, id))
        .collect();

    let mut candidate_paths: Vec<Vec<String>> = Vec::new();
    for path in enumerate_paths(tree) {
        let subtree = &path[0];
        if !winning_subtrees.contains(subtree) {
            candidate_paths.push(path);
        }
    }
    // Winning subtrees: only the paths terminating at an awarded node.
    let mut awarded_sorted: Vec<&str> = awarded_ids.iter().copied().collect();
    awarded_sorted.sort_unstable();
    for awarded in awarded_sorted {
        if let Some(path) = path_to_node(tree, awarded) {
            candidate_paths.push(path);
        }
    }

    let mut units: Vec<RootedPathUnit> = Vec::new();
    let mut seen: HashSet<BTreeSet<String>> = HashSet::new();
    for path in candidate_paths {
        let Some(first) = by_id.get(path[0].as_str()) else {
            continue;
        };
        let challenger = first.author.clone();
        let node_ids: Vec<String> = path
            .iter()
            .filter(|id| by_id.get(id.as_str()).map(|n| n.author == challenger) == Some(true))
            .cloned()
            .collect();
        if node_ids.is_empty() {
            continue;
        }
        let key: BTreeSet<String> = node_ids.iter().cloned().collect();
        if !seen.insert(key) {
            continue;
        }
        let delta_winning = node_ids.iter().any(|id| awarded_ids.contains(id.as_str()));
        units.push(RootedPathUnit {
            tree_id: tree.id.clone(),
            challenger,
            root_reply_id: node_ids[0].clone(),
            node_ids,
            delta_winning,
        });
    }
    units
}

impl RootedPathUnit {
    /// Timestamp of the unit's root reply.
    pub fn root_reply_time(&self, tree: &DiscussionTree) -> i64 {
        tree.node(&self.root_reply_id)
            .map(|n| n.created_utc)
            .unwrap_or(i64::MAX)
    }

    /// Normalized text of the root reply only.
    pub fn root_reply_text(&self, tree: &DiscussionTree) -> String {
        tree.node(&self.root_reply_id)
            .map(|n| n.body_clean.clone())
            .unwrap_or_default()
    }

    /// Normalized text of every comment in the unit, concatenated in order.
    pub fn full_path_text(&self, tree: &DiscussionTree) -> String {
        self.node_ids
            .iter()
            .filter_map(|id| tree.node(id))
            .map(|n| n.body_clean.as_str())
            .collect::<Vec<_>>()
            .join("\n\n")
    }

    pub fn dedup_key(&self) -> BTreeSet<&str> {
        self.id_set()
    }
}

// ---------------------------------------------------------------------------
// Filtering
// ---------------------------------------------------------------------------

fn post_words(tree: &DiscussionTree) -> HashSet<String> {
    format!("{} {}", tree.title, tree.root.body_raw)
        .to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(|w| w.to_string())
        .collect()
}

/// Whether a tree passes the given thresholds.
pub fn tree_passes(tree: &DiscussionTree, filter: &CorpusFilter) -> bool {
    if tree.challenger_reply_count() < filter.min_challenger_replies {
        return false;
    }
    if tree.op_reply_count() < filter.min_op_replies {
        return false;
    }
    if !filter.exclude_body_words.is_empty() {
        let words = post_words(tree);
        if filter
            .exclude_body_words
            .iter()
            .any(|w| words.contains(&w.to_lowercase()))
        {
            return false;
        }
    }
    true
}

/// Keep trees meeting all thresholds, in input order.
pub fn filter_trees<'a>(
    trees: &'a [DiscussionTree],
    filter: &CorpusFilter,
) -> Vec<&'a DiscussionTree> {
    trees.iter().filter(|t| tree_passes(t, filter)).collect()
}

// ---------------------------------------------------------------------------
// Line-delimited JSON i/o and the raw-dump adapter
// ---------------------------------------------------------------------------

/// Outcome of reading a corpus file.
#[derive(Debug, Default)]
pub struct IngestStats {
    pub trees: usize,
    pub skipped_deleted_op: usize,
    pub skipped_malformed: usize,
    pub orphan_comments: usize,
    /// Diagnostics with 1-based line numbers.
    pub diagnostics: Vec<String>,
}

/// Read normalized line-delimited JSON, parsing each record.
pub fn read_corpus<R: std::io::BufRead>(
    reader: R,
    config: &CorpusConfig,
) -> Result<(Vec<DiscussionTree>, IngestStats), CorpusError> {
    let mut trees = Vec::new();
    let mut stats = IngestStats::default();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: TreeRecord = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                stats.skipped_malformed += 1;
                stats
                    .diagnostics
                    .push(format!("line {}: {}", lineno + 1, e));
                continue;
            }
        };
        match parse_tree(&record, config) {
            Ok(tree) => {
                stats.orphan_comments += tree.orphan_count;
                trees.push(tree);
            }
            Err(CorpusError::DeletedAuthor { tree_id }) => {
                stats.skipped_deleted_op += 1;
                stats
                    .diagnostics
                    .push(format!("line {}: tree {} has deleted OP", lineno + 1, tree_id));
            }
            Err(e) => {
                stats.skipped_malformed += 1;
                stats.diagnostics.push(format!("line {}: {}", lineno + 1, e));
            }
        }
    }
    stats.trees = trees.len();
    Ok((trees, stats))
}

/// Write trees back out in the normalized schema, one JSON object per line.
pub fn write_corpus<W: std::io::Write>(
    mut writer: W,
    trees: &[&DiscussionTree],
) -> Result<(), CorpusError> {
    for tree in trees {
        let record = TreeRecord::from(*tree);
        serde_json::to_writer(&mut writer, &record)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Convert one raw Reddit-style submission object (nested or flat comment
/// lists, `t1_`/`t3_` prefixed ids, `selftext` bodies) into the normalized
/// schema.
pub fn adapt_raw_record(value: &serde_json::Value) -> Result<TreeRecord, CorpusError> {
    let obj = value.as_object().ok_or_else(|| CorpusError::MalformedRecord {
        detail: "record is not an object".to_string(),
    })?;
    let id = strip_kind_prefix(
        obj.get("name")
            .and_then(|v| v.as_str())
            .or_else(|| obj.get("id").and_then(|v| v.as_str()))
            .ok_or_else(|| CorpusError::MalformedRecord {
                detail: "submission missing id".to_string(),
            })?,
    )
    .to_string();
    let title = obj
        .get("title")
        .and_then(|v| v.as_str())
        .unwrap_or_default()
        .to_string();
    let author = json_author(obj);
    let body = obj
        .get("selftext")
        .or_else(|| obj.get("body"))
        .and_then(|v| v.as_str())
        .unwrap_or_default()
        .to_string();
    let created_utc = json_timestamp(obj).ok_or_else(|| CorpusError::MalformedRecord {
        detail: format!("submission {id} missing created_utc"),
    })?;

    let mut comments = Vec::new();
    if let Some(list) = obj.get("comments").and_then(|v| v.as_array()) {
        for c in list {
            collect_raw_comment(c, &id, &mut comments)?;
        }
    }
    Ok(TreeRecord {
        id,
        title,
        author,
        body,
        created_utc,
        comments,
    })
}

fn collect_raw_comment(
    value: &serde_json::Value,
    default_parent: &str,
    out: &mut Vec<CommentRecord>,
) -> Result<(), CorpusError> {
    let obj = value.as_object().ok_or_else(|| CorpusError::MalformedRecord {
        detail: "comment is not an object".to_string(),
    })?;
    let id = strip_kind_prefix(
        obj.get("name")
            .and_then(|v| v.as_str())
            .or_else(|| obj.get("id").and_then(|v| v.as_str()))
            .ok_or_else(|| CorpusError::MalformedRecord {
                detail: "comment missing id".to_string(),
            })?,
    )
    .to_string();
    let parent_id = obj
        .get("parent_id")
        .and_then(|v| v.as_str())
        .map(strip_kind_prefix)
        .unwrap_or(default_parent)
        .to_string();
    let created_utc = json_timestamp(obj).ok_or_else(|| CorpusError::MalformedRecord {
        detail: format!("comment {id} missing created_utc"),
    })?;
    out.push(CommentRecord {
        id: id.clone(),
        author: json_author(obj),
        body: obj
            .get("body")
            .and_then(|v| v.as_str())
            .unwrap_or_default()
            .to_string(),
        created_utc,
        parent_id,
    });
    // Nested dumps carry children under "replies" or "children".
    for key in ["replies", "children"] {
        if let Some(list) = obj.get(key).and_then(|v| v.as_array()) {
            for c in list {
                collect_raw_comment(c, &id, out)?;
            }
        }
    }
    Ok(())
}

fn json_author(obj: &serde_json::Map<String, serde_json::Value>) -> String {
    match obj.get("author") {
        Some(serde_json::Value::String(s)) => s.clone(),
        Some(serde_json::Value::Object(o)) => o
            .get("name")
            .and_then(|v| v.as_str())
            .unwrap_or(DELETED_AUTHOR)
            .to_string(),
        _ => DELETED_AUTHOR.to_string(),
    }
}

fn json_timestamp(obj: &serde_json::Map<String, serde_json::Value>) -> Option<i64> {
    let v = obj.get("created_utc").or_else(|| obj.get("created"))?;
    match v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .or_else(|| n.as_f64().map(|f| f as i64)),
        serde_json::Value::String(s) => s.parse::<f64>().ok().map(|f| f as i64),
        _ => None,
    }
}

fn strip_kind_prefix(id: &str) -> &str {
    id.strip_prefix("t1_")
        .or_else(|| id.strip_prefix("t3_"))
        .unwrap_or(id)
}
