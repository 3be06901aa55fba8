//! Command implementations: each reads its upstream artifacts, validates
//! the config-hash chain, and emits the artifacts for the next stage.

use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use chrono::{TimeZone, Utc};
use serde::{Deserialize, Serialize};

use persuasion::corpus::{
    self, adapt_raw_record, filter_trees, parse_tree, CorpusConfig, CorpusFilter, DiscussionTree,
};
use persuasion::dynamics;
use persuasion::features::{
    build_registry, dense_features, dense_features_single, diff_row, row_from, sparse_columns,
    tokenize::TokenizedText, ExtractionContext, Family, FeatureMatrix, FeatureVector, RuleTagger,
    Variant, Vocabulary,
};
use persuasion::models::{
    auc, bootstrap_test, mcnemar, pair_predict, pairwise_accuracy_from_scores, permutation_test,
    significance_table, train_l1_logreg, train_weighted_logreg, EvalReport, LogRegModel,
    PairOutcome, Penalty,
};
use persuasion::pairing::{
    build_malleability_dataset, build_pairs, split_by_date, ArgumentPair, MalleabilityInstance,
};
use persuasion::report::{check_artifact, write_json_artifact, write_rates_csv, write_significance_csv};
use persuasion::Resources;

use crate::config::{RunConfig, Task};

type Scalar = persuasion::Scalar;

pub const CORPUS_FILE: &str = "corpus.jsonl";
pub const PAIRS_FILE: &str = "pairs.jsonl";
pub const MALLEABILITY_FILE: &str = "malleability.csv";

/// One pair plus its split tag and the OP grouping key.
#[derive(Debug, Serialize, Deserialize)]
pub struct PairRecord {
    pub split: String,
    pub op_author: String,
    #[serde(flatten)]
    pub pair: ArgumentPair,
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
struct IngestReport {
    trees: usize,
    comments: usize,
    op_replies: usize,
    participants: usize,
    trees_with_delta: usize,
    skipped_deleted_op: usize,
    skipped_malformed: usize,
    orphan_comments: usize,
    /// month (YYYY-MM) → (trees, comments); the posting-activity series.
    monthly_activity: BTreeMap<String, (usize, usize)>,
    diagnostics: Vec<String>,
}

fn month_key(ts: i64) -> String {
    match Utc.timestamp_opt(ts, 0).single() {
        Some(dt) => dt.format("%Y-%m").to_string(),
        None => "invalid".to_string(),
    }
}

pub fn cmd_ingest(config: &RunConfig, input: &Path, out: &Path, raw: bool) -> anyhow::Result<()> {
    std::fs::create_dir_all(out)?;
    let file = std::fs::File::open(input)
        .with_context(|| format!("cannot open input {}", input.display()))?;
    let reader = std::io::BufReader::new(file);
    let parse_config = CorpusConfig::default();
    let (trees, stats) = if raw {
        let mut trees = Vec::new();
        let mut stats = corpus::IngestStats::default();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let value: serde_json::Value = match serde_json::from_str(&line) {
                Ok(v) => v,
                Err(e) => {
                    stats.skipped_malformed += 1;
                    stats.diagnostics.push(format!("line {}: {e}", lineno + 1));
                    continue;
                }
            };
            match adapt_raw_record(&value).and_then(|r| parse_tree(&r, &parse_config)) {
                Ok(tree) => {
                    stats.orphan_comments += tree.orphan_count;
                    trees.push(tree);
                }
                Err(corpus::CorpusError::DeletedAuthor { tree_id }) => {
                    stats.skipped_deleted_op += 1;
                    stats
                        .diagnostics
                        .push(format!("line {}: tree {tree_id} has deleted OP", lineno + 1));
                }
                Err(e) => {
                    stats.skipped_malformed += 1;
                    stats.diagnostics.push(format!("line {}: {e}", lineno + 1));
                }
            }
        }
        stats.trees = trees.len();
        (trees, stats)
    } else {
        corpus::read_corpus(reader, &parse_config)?
    };

    let corpus_path = out.join(CORPUS_FILE);
    let refs: Vec<&DiscussionTree> = trees.iter().collect();
    let file = std::fs::File::create(&corpus_path)?;
    corpus::write_corpus(std::io::BufWriter::new(file), &refs)?;

    let mut monthly: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    let mut participants: HashSet<&str> = HashSet::new();
    let mut comments = 0usize;
    let mut op_replies = 0usize;
    for tree in &trees {
        let entry = monthly.entry(month_key(tree.created_utc)).or_default();
        entry.0 += 1;
        participants.insert(tree.op_author.as_str());
        for node in &tree.nodes {
            comments += 1;
            monthly.entry(month_key(node.created_utc)).or_default().1 += 1;
            participants.insert(node.author.as_str());
            if node.is_op {
                op_replies += 1;
            }
        }
    }
    let report = IngestReport {
        trees: trees.len(),
        comments,
        op_replies,
        participants: participants.len(),
        trees_with_delta: trees.iter().filter(|t| t.has_delta()).count(),
        skipped_deleted_op: stats.skipped_deleted_op,
        skipped_malformed: stats.skipped_malformed,
        orphan_comments: stats.orphan_comments,
        monthly_activity: monthly,
        diagnostics: stats.diagnostics,
    };
    write_json_artifact(&out.join("ingest_report.json"), &report, &config.hash())?;
    // the corpus itself is hash-stamped via a sidecar, keeping the JSONL plain
    std::fs::write(out.join("corpus.hash"), format!("{}\n", config.hash()))?;
    Ok(())
}

fn load_corpus(out: &Path, config: &RunConfig) -> anyhow::Result<Vec<DiscussionTree>> {
    let hash_path = out.join("corpus.hash");
    if hash_path.exists() {
        let found = std::fs::read_to_string(&hash_path)?.trim().to_string();
        if found != config.hash() {
            return Err(persuasion::report::ReportError::StaleArtifact {
                path: out.join(CORPUS_FILE).display().to_string(),
                expected: config.hash(),
                found,
            }
            .into());
        }
    }
    let path = out.join(CORPUS_FILE);
    let file = std::fs::File::open(&path)
        .with_context(|| format!("missing corpus artifact {}; run ingest first", path.display()))?;
    let (trees, _) = corpus::read_corpus(std::io::BufReader::new(file), &CorpusConfig::default())?;
    Ok(trees)
}

// ---------------------------------------------------------------------------
// dynamics
// ---------------------------------------------------------------------------

pub fn cmd_dynamics(config: &RunConfig, out: &Path) -> anyhow::Result<()> {
    let trees = load_corpus(out, config)?;
    let filter = CorpusFilter::default();
    let filtered: Vec<DiscussionTree> = filter_trees(&trees, &filter)
        .into_iter()
        .cloned()
        .collect();
    let hash = config.hash();
    let fig4a: Vec<dynamics::BinnedRate<Scalar>> = dynamics::entry_order_table(&trees, 10, false);
    write_rates_csv(&out.join("fig4a.csv"), &fig4a, &hash)?;
    let fig4b: Vec<dynamics::BinnedRate<Scalar>> = dynamics::back_and_forth_table(&filtered);
    write_rates_csv(&out.join("fig4b.csv"), &fig4b, &hash)?;
    let fig5a: Vec<dynamics::BinnedRate<Scalar>> = dynamics::conversion_by_challengers(&filtered);
    write_rates_csv(&out.join("fig5a.csv"), &fig5a, &hash)?;
    let (single, multi): (Vec<dynamics::BinnedRate<Scalar>>, _) =
        dynamics::subtree_comparison(&filtered, 2..=4);
    write_rates_csv(&out.join("fig5b.csv"), &single, &hash)?;
    write_rates_csv(&out.join("fig5b_multi.csv"), &multi, &hash)?;
    let (fig10a, fig10b): (Vec<dynamics::BinnedRate<Scalar>>, _) =
        dynamics::experience_tables(&trees);
    write_rates_csv(&out.join("fig10a.csv"), &fig10a, &hash)?;
    write_rates_csv(&out.join("fig10b.csv"), &fig10b, &hash)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// pairs
// ---------------------------------------------------------------------------

pub fn cmd_pairs(config: &RunConfig, out: &Path) -> anyhow::Result<()> {
    let trees = load_corpus(out, config)?;
    let resources = Resources::load(&config.resources)?;
    let (pairs, diag) = build_pairs(&trees, &resources.stopwords);
    let by_id: BTreeMap<&str, &DiscussionTree> =
        trees.iter().map(|t| (t.id.as_str(), t)).collect();
    let created = |p: &ArgumentPair| by_id.get(p.tree_id.as_str()).map_or(0, |t| t.created_utc);
    let (train, heldout) = split_by_date(
        pairs,
        created,
        config.train_boundary,
        config.heldout_end,
    );
    let path = out.join(PAIRS_FILE);
    let mut file = std::fs::File::create(&path)?;
    writeln!(file, "# config_hash={}", config.hash())?;
    for (split, list) in [("train", &train), ("heldout", &heldout)] {
        for pair in list {
            let record = PairRecord {
                split: split.to_string(),
                op_author: by_id
                    .get(pair.tree_id.as_str())
                    .map_or(String::new(), |t| t.op_author.clone()),
                pair: pair.clone(),
            };
            serde_json::to_writer(&mut file, &record)?;
            file.write_all(b"\n")?;
        }
    }
    eprintln!(
        "pairs: {} train, {} heldout ({} trees skipped, {} winners unmatched, {} too short)",
        train.len(),
        heldout.len(),
        diag.trees_skipped,
        diag.winners_without_candidate,
        diag.winners_too_short
    );

    let instances = build_malleability_dataset(&trees);
    let (m_train, m_heldout) = split_by_date(
        instances,
        |i: &MalleabilityInstance| i.created_utc,
        config.train_boundary,
        config.heldout_end,
    );
    let mut csv = String::new();
    csv.push_str(&format!("# config_hash={}\n", config.hash()));
    csv.push_str("tree_id,label,split\n");
    for (split, list) in [("train", &m_train), ("heldout", &m_heldout)] {
        for inst in list {
            csv.push_str(&format!("{},{},{}\n", inst.tree_id, inst.label as u8, split));
        }
    }
    std::fs::write(out.join(MALLEABILITY_FILE), csv)?;
    Ok(())
}

fn load_pairs(out: &Path, config: &RunConfig) -> anyhow::Result<Vec<PairRecord>> {
    let path = out.join(PAIRS_FILE);
    check_artifact(&path, &config.hash())?;
    let file = std::fs::File::open(&path)?;
    let mut records = Vec::new();
    for line in std::io::BufReader::new(file).lines() {
        let line = line?;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line)?);
    }
    Ok(records)
}

fn load_malleability_splits(
    out: &Path,
    config: &RunConfig,
) -> anyhow::Result<Vec<(String, bool, String)>> {
    let path = out.join(MALLEABILITY_FILE);
    check_artifact(&path, &config.hash())?;
    let text = std::fs::read_to_string(&path)?;
    let mut rows = Vec::new();
    for line in text.lines().skip(2) {
        let mut parts = line.split(',');
        if let (Some(id), Some(label), Some(split)) = (parts.next(), parts.next(), parts.next()) {
            rows.push((id.to_string(), label == "1", split.to_string()));
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// features
// ---------------------------------------------------------------------------

/// Dense + sparse matrices for one split of the pair task.
#[derive(Debug, Serialize, Deserialize)]
pub struct PairMatrices {
    pub diff: FeatureMatrix<Scalar>,
    pub pos: FeatureMatrix<Scalar>,
    pub neg: FeatureMatrix<Scalar>,
    /// OP author per pair, the CV grouping key.
    pub groups: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MalleabilityMatrices {
    pub x: FeatureMatrix<Scalar>,
    pub labels: Vec<bool>,
    pub groups: Vec<String>,
}

fn features_file(out: &Path, task: Task, variant: Variant) -> PathBuf {
    match task {
        Task::Pair => out.join(format!("features_pair_{variant}.json")),
        Task::Malleability => out.join("features_malleability.json"),
    }
}

fn model_file(out: &Path, task: Task, variant: Variant) -> PathBuf {
    match task {
        Task::Pair => out.join(format!("model_pair_{variant}.json")),
        Task::Malleability => out.join("model_malleability.json"),
    }
}

fn tokenize_pair_texts<'a>(
    records: &'a [PairRecord],
    variant: Variant,
    resources: &Resources,
) -> Vec<(&'a PairRecord, TokenizedText, TokenizedText)> {
    records
        .iter()
        .filter(|r| r.pair.variant_texts.contains_key(&variant))
        .map(|r| {
            let (pos, neg) = &r.pair.variant_texts[&variant];
            let (pos_tok, neg_tok) = if variant == Variant::RootTruncated {
                (
                    TokenizedText::truncated(pos, &resources.stopwords),
                    TokenizedText::truncated(neg, &resources.stopwords),
                )
            } else {
                (
                    TokenizedText::new(pos, pos, &resources.stopwords),
                    TokenizedText::new(neg, neg, &resources.stopwords),
                )
            };
            (r, pos_tok, neg_tok)
        })
        .collect()
}

fn build_pair_matrices(
    records: &[PairRecord],
    ops: &BTreeMap<String, TokenizedText>,
    variant: Variant,
    config: &RunConfig,
    resources: &Resources,
    vocab: Option<&(Vocabulary, Vocabulary)>,
) -> PairMatrices {
    let families = config.families.iter().copied().collect();
    let tokenized = tokenize_pair_texts(records, variant, resources);
    let mut pos_vecs: Vec<FeatureVector<Scalar>> = Vec::new();
    let mut neg_vecs: Vec<FeatureVector<Scalar>> = Vec::new();
    let mut groups = Vec::new();
    for (record, pos_tok, neg_tok) in &tokenized {
        let op = &ops[&record.pair.tree_id];
        pos_vecs.push(dense_features(pos_tok, op, &families, resources));
        neg_vecs.push(dense_features(neg_tok, op, &families, resources));
        groups.push(record.op_author.clone());
    }
    let refs: Vec<&FeatureVector<Scalar>> = pos_vecs.iter().chain(neg_vecs.iter()).collect();
    let mut names = build_registry(&refs);
    let mut pos_rows: Vec<Vec<Option<Scalar>>> =
        pos_vecs.iter().map(|v| row_from(v, &names)).collect();
    let mut neg_rows: Vec<Vec<Option<Scalar>>> =
        neg_vecs.iter().map(|v| row_from(v, &names)).collect();
    if let Some((bow_vocab, pos_vocab)) = vocab {
        let tagger = RuleTagger;
        let ctx = ExtractionContext {
            resources,
            bow_vocab: Some(bow_vocab),
            pos_vocab: Some(pos_vocab),
            tagger: Some(&tagger),
        };
        let mut sparse_names: Option<Vec<String>> = None;
        for (rows, side) in [(&mut pos_rows, 0usize), (&mut neg_rows, 1usize)] {
            for (i, row) in rows.iter_mut().enumerate() {
                let tok = if side == 0 {
                    &tokenized[i].1
                } else {
                    &tokenized[i].2
                };
                let (n, v) = sparse_columns(&tok.tokens, &ctx, &families)
                    .expect("vocabularies provided");
                if sparse_names.is_none() {
                    sparse_names = Some(n);
                }
                row.extend(v.into_iter().map(Some));
            }
        }
        if let Some(n) = sparse_names {
            names.extend(n);
        }
    }
    let diff_rows: Vec<Vec<Option<Scalar>>> = pos_rows
        .iter()
        .zip(&neg_rows)
        .map(|(p, n)| diff_row(p, n))
        .collect();
    PairMatrices {
        diff: FeatureMatrix {
            names: names.clone(),
            rows: diff_rows,
        },
        pos: FeatureMatrix {
            names: names.clone(),
            rows: pos_rows,
        },
        neg: FeatureMatrix {
            names,
            rows: neg_rows,
        },
        groups,
    }
}

fn op_tokens(trees: &[DiscussionTree], resources: &Resources) -> BTreeMap<String, TokenizedText> {
    trees
        .iter()
        .map(|t| {
            let text = t.op_text();
            (
                t.id.clone(),
                TokenizedText::new(&text, &t.root.body_raw, &resources.stopwords),
            )
        })
        .collect()
}

fn sparse_vocabs(
    records: &[PairRecord],
    variant: Variant,
    config: &RunConfig,
    resources: &Resources,
) -> Option<(Vocabulary, Vocabulary)> {
    let wants_bow = config.families.contains(&Family::Bow);
    let wants_pos = config.families.contains(&Family::Pos);
    if !wants_bow && !wants_pos {
        return None;
    }
    let train_tokens: Vec<Vec<String>> = tokenize_pair_texts(records, variant, resources)
        .into_iter()
        .flat_map(|(_, p, n)| [p.tokens, n.tokens])
        .collect();
    let bow = Vocabulary::build(train_tokens.iter().map(|t| t.as_slice()));
    let tagger = RuleTagger;
    use persuasion::features::PosAnnotator;
    let tag_seqs: Vec<Vec<String>> = train_tokens.iter().map(|t| tagger.tag(t)).collect();
    let pos = Vocabulary::build_with_min(tag_seqs.iter().map(|t| t.as_slice()), 0);
    Some((bow, pos))
}

pub fn cmd_features(config: &RunConfig, out: &Path) -> anyhow::Result<()> {
    let trees = load_corpus(out, config)?;
    let resources = Resources::load(&config.resources)?;
    let hash = config.hash();
    match config.task {
        Task::Pair => {
            let records = load_pairs(out, config)?;
            let ops = op_tokens(&trees, &resources);
            let (train_records, heldout_records): (Vec<PairRecord>, Vec<PairRecord>) =
                records.into_iter().partition(|r| r.split == "train");
            let vocab = sparse_vocabs(&train_records, config.variant, config, &resources);
            let train_m = build_pair_matrices(
                &train_records,
                &ops,
                config.variant,
                config,
                &resources,
                vocab.as_ref(),
            );
            let heldout_m = build_pair_matrices(
                &heldout_records,
                &ops,
                config.variant,
                config,
                &resources,
                vocab.as_ref(),
            );
            let bundle = serde_json::json!({ "train": train_m, "heldout": heldout_m });
            write_json_artifact(&features_file(out, Task::Pair, config.variant), &bundle, &hash)?;
        }
        Task::Malleability => {
            let rows = load_malleability_splits(out, config)?;
            let by_id: BTreeMap<&str, &DiscussionTree> =
                trees.iter().map(|t| (t.id.as_str(), t)).collect();
            let families = config.families.iter().copied().collect();
            let mut split_bundles = BTreeMap::new();
            for split in ["train", "heldout"] {
                let mut vecs = Vec::new();
                let mut labels = Vec::new();
                let mut groups = Vec::new();
                for (tree_id, label, s) in rows.iter().filter(|(_, _, s)| s == split) {
                    let Some(tree) = by_id.get(tree_id.as_str()) else {
                        continue;
                    };
                    let _ = s;
                    let text = tree.op_text();
                    let tok = TokenizedText::new(&text, &tree.root.body_raw, &resources.stopwords);
                    vecs.push(dense_features_single(&tok, &families, &resources));
                    labels.push(*label);
                    groups.push(tree.op_author.clone());
                }
                let refs: Vec<&FeatureVector<Scalar>> = vecs.iter().collect();
                let names = build_registry(&refs);
                let rows_m: Vec<Vec<Option<Scalar>>> =
                    vecs.iter().map(|v| row_from(v, &names)).collect();
                split_bundles.insert(
                    split,
                    MalleabilityMatrices {
                        x: FeatureMatrix {
                            names,
                            rows: rows_m,
                        },
                        labels,
                        groups,
                    },
                );
            }
            write_json_artifact(
                &features_file(out, Task::Malleability, config.variant),
                &split_bundles,
                &hash,
            )?;
        }
    }
    Ok(())
}

fn read_json_artifact<T: for<'de> Deserialize<'de>>(
    path: &Path,
    config: &RunConfig,
) -> anyhow::Result<T> {
    check_artifact(path, &config.hash())?;
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("missing artifact {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    Ok(serde_json::from_value(value["data"].clone())?)
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub model: LogRegModel<Scalar>,
    pub names: Vec<String>,
}

pub fn cmd_train(config: &RunConfig, out: &Path) -> anyhow::Result<()> {
    let hash = config.hash();
    match config.task {
        Task::Pair => {
            let bundle: serde_json::Value =
                read_json_artifact(&features_file(out, Task::Pair, config.variant), config)?;
            let train: PairMatrices = serde_json::from_value(bundle["train"].clone())?;
            let model = train_l1_logreg(&train.diff, &train.groups, &config.lambda_grid)?;
            eprintln!(
                "pair model ({}): lambda {}, cv accuracy {:.3}",
                config.variant, model.lambda, model.cv_score
            );
            let artifact = ModelArtifact {
                names: train.diff.names.clone(),
                model,
            };
            write_json_artifact(&model_file(out, Task::Pair, config.variant), &artifact, &hash)?;
        }
        Task::Malleability => {
            let bundle: BTreeMap<String, MalleabilityMatrices> = read_json_artifact(
                &features_file(out, Task::Malleability, config.variant),
                config,
            )?;
            let train = &bundle["train"];
            let model = train_weighted_logreg(
                &train.x,
                &train.labels,
                &train.groups,
                &config.lambda_grid,
                &[Penalty::L1, Penalty::L2],
            )?;
            eprintln!(
                "malleability model: {:?} lambda {}, cv auc {:.3}",
                model.penalty, model.lambda, model.cv_score
            );
            let artifact = ModelArtifact {
                names: train.x.names.clone(),
                model,
            };
            write_json_artifact(
                &model_file(out, Task::Malleability, config.variant),
                &artifact,
                &hash,
            )?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

/// The #words baseline: the same classifier restricted to the word-count
/// column of the variant.
fn restrict_to_words(m: &FeatureMatrix<Scalar>) -> FeatureMatrix<Scalar> {
    let idx: Vec<usize> = m
        .names
        .iter()
        .enumerate()
        .filter(|(_, n)| n.as_str() == "n_words")
        .map(|(i, _)| i)
        .collect();
    FeatureMatrix {
        names: idx.iter().map(|&i| m.names[i].clone()).collect(),
        rows: m
            .rows
            .iter()
            .map(|r| idx.iter().map(|&i| r[i]).collect())
            .collect(),
    }
}

fn log_loss(score: Scalar, label: bool) -> Scalar {
    let y = if label { 1.0 } else { -1.0 };
    let m = y * score;
    if m > 0.0 {
        (-m).exp().ln_1p()
    } else {
        -m + m.exp().ln_1p()
    }
}

pub fn cmd_eval(config: &RunConfig, out: &Path) -> anyhow::Result<()> {
    let hash = config.hash();
    match config.task {
        Task::Pair => {
            let bundle: serde_json::Value =
                read_json_artifact(&features_file(out, Task::Pair, config.variant), config)?;
            let train: PairMatrices = serde_json::from_value(bundle["train"].clone())?;
            let heldout: PairMatrices = serde_json::from_value(bundle["heldout"].clone())?;
            let artifact: ModelArtifact =
                read_json_artifact(&model_file(out, Task::Pair, config.variant), config)?;
            let baseline_train = restrict_to_words(&train.diff);
            let baseline = train_l1_logreg(&baseline_train, &train.groups, &config.lambda_grid)?;
            let heldout_words = restrict_to_words(&heldout.diff);

            let scores: Vec<Scalar> = heldout
                .diff
                .rows
                .iter()
                .map(|r| artifact.model.score_row(r, &heldout.diff.names))
                .collect();
            let base_scores: Vec<Scalar> = heldout_words
                .rows
                .iter()
                .map(|r| baseline.score_row(r, &heldout_words.names))
                .collect();
            let accuracy = pairwise_accuracy_from_scores(&scores);
            let base_accuracy = pairwise_accuracy_from_scores(&base_scores);
            // per-pair correctness in the canonical presentation order
            let correct: Vec<bool> = heldout
                .diff
                .rows
                .iter()
                .map(|r| {
                    pair_predict(&artifact.model, r, &heldout.diff.names)
                        == PairOutcome::PositiveWins
                })
                .collect();
            let base_correct: Vec<bool> = heldout_words
                .rows
                .iter()
                .map(|r| {
                    pair_predict(&baseline, r, &heldout_words.names) == PairOutcome::PositiveWins
                })
                .collect();
            let p = mcnemar(&correct, &base_correct);
            let reports = vec![
                EvalReport {
                    metric: "pairwise_accuracy".to_string(),
                    value: accuracy,
                    baseline: Some(base_accuracy),
                    test: "mcnemar_vs_words_baseline".to_string(),
                    p,
                    n: heldout.diff.rows.len(),
                },
            ];
            write_json_artifact(&out.join("fig8.json"), &reports, &hash)?;
            eprintln!(
                "pair eval ({}): accuracy {:.3} vs baseline {:.3}, McNemar p = {:.4}",
                config.variant, accuracy, base_accuracy, p
            );
        }
        Task::Malleability => {
            let bundle: BTreeMap<String, MalleabilityMatrices> = read_json_artifact(
                &features_file(out, Task::Malleability, config.variant),
                config,
            )?;
            let train = &bundle["train"];
            let heldout = &bundle["heldout"];
            let artifact: ModelArtifact =
                read_json_artifact(&model_file(out, Task::Malleability, config.variant), config)?;
            let baseline_train = restrict_to_words(&train.x);
            let baseline = train_weighted_logreg(
                &baseline_train,
                &train.labels,
                &train.groups,
                &config.lambda_grid,
                &[Penalty::L1, Penalty::L2],
            )?;
            let heldout_words = restrict_to_words(&heldout.x);
            let scores: Vec<Scalar> = heldout
                .x
                .rows
                .iter()
                .map(|r| artifact.model.score_row(r, &heldout.x.names))
                .collect();
            let base_scores: Vec<Scalar> = heldout_words
                .rows
                .iter()
                .map(|r| baseline.score_row(r, &heldout_words.names))
                .collect();
            let model_auc = auc(&scores, &heldout.labels)?;
            let base_auc = auc(&base_scores, &heldout.labels)?;
            let boot_p = bootstrap_test(&scores, &heldout.labels, config.n_resamples, config.seed)?;
            // one-sided paired permutation on per-item log-loss improvement
            let diffs: Vec<Scalar> = scores
                .iter()
                .zip(&base_scores)
                .zip(&heldout.labels)
                .map(|((s, b), &l)| log_loss(*b, l) - log_loss(*s, l))
                .collect();
            let perm_p = permutation_test(&diffs, config.n_resamples, config.seed);
            let reports = vec![
                EvalReport {
                    metric: "auc".to_string(),
                    value: model_auc,
                    baseline: Some(0.5),
                    test: "bootstrap_vs_chance".to_string(),
                    p: boot_p,
                    n: heldout.labels.len(),
                },
                EvalReport {
                    metric: "auc".to_string(),
                    value: model_auc,
                    baseline: Some(base_auc),
                    test: "permutation_vs_words_baseline".to_string(),
                    p: perm_p,
                    n: heldout.labels.len(),
                },
            ];
            write_json_artifact(&out.join("fig9.json"), &reports, &hash)?;
            eprintln!(
                "malleability eval: auc {:.3} (baseline {:.3}), bootstrap p {:.4}, permutation p {:.4}",
                model_auc, base_auc, boot_p, perm_p
            );
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// significance
// ---------------------------------------------------------------------------

pub fn cmd_significance(config: &RunConfig, out: &Path) -> anyhow::Result<()> {
    let trees = load_corpus(out, config)?;
    let resources = Resources::load(&config.resources)?;
    let records = load_pairs(out, config)?;
    let train: Vec<PairRecord> = records.into_iter().filter(|r| r.split == "train").collect();
    let ops = op_tokens(&trees, &resources);
    let hash = config.hash();

    let build = |variant: Variant| {
        build_pair_matrices(&train, &ops, variant, config, &resources, None)
    };
    let truncated = build(Variant::RootTruncated);
    for (variant, file) in [
        (Variant::RootReply, "table2.csv"),
        (Variant::FullPath, "table3.csv"),
        (Variant::RootTruncated, "table4.csv"),
    ] {
        let m = build(variant);
        let trunc = if variant == Variant::RootTruncated {
            None
        } else {
            Some((&truncated.pos, &truncated.neg))
        };
        let rows = significance_table(&m.pos, &m.neg, trunc);
        write_significance_csv(&out.join(file), &rows, &hash)?;
    }
    Ok(())
}
