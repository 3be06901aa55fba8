//! Word-list and word-norm resources: stopwords, sentiment lists, hedge
//! cues, psycholinguistic norm tables, and embedding-based extrapolation of
//! norms to out-of-vocabulary words.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::num::Real;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("lexicon {name} is empty")]
    EmptyLexicon { name: String },
    #[error("cannot read {path}: {source}")]
    UnreadableFile {
        path: String,
        source: std::io::Error,
    },
    #[error("norm file {path} line {line}: score {score} outside declared range [{min}, {max}]")]
    ScoreOutOfDeclaredRange {
        path: String,
        line: usize,
        score: f64,
        min: f64,
        max: f64,
    },
    #[error("norm file {path} line {line}: {detail}")]
    MalformedNorm {
        path: String,
        line: usize,
        detail: String,
    },
    #[error("embedding file {path} line {line}: {detail}")]
    MalformedEmbedding {
        path: String,
        line: usize,
        detail: String,
    },
    #[error("extrapolation needs at least {required} native entries with embeddings, found {found}")]
    InsufficientOverlap { required: usize, found: usize },
}

/// A word list: single tokens plus multiword cue patterns, all lowercase.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    pub name: String,
    pub words: HashSet<String>,
    /// Multiword cues, stored as token sequences.
    pub phrases: Vec<Vec<String>>,
}

impl Lexicon {
    pub fn is_empty(&self) -> bool {
        self.words.is_empty() && self.phrases.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.len() + self.phrases.len()
    }

    pub fn contains_word(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn from_entries<I: IntoIterator<Item = S>, S: AsRef<str>>(name: &str, entries: I) -> Self {
        let mut lex = Lexicon {
            name: name.to_string(),
            ..Default::default()
        };
        let mut seen_phrases: HashSet<Vec<String>> = HashSet::new();
        for entry in entries {
            let entry = entry.as_ref().trim().to_lowercase();
            if entry.is_empty() {
                continue;
            }
            let tokens: Vec<String> = entry.split_whitespace().map(|t| t.to_string()).collect();
            if tokens.len() == 1 {
                lex.words.insert(tokens.into_iter().next().unwrap());
            } else if seen_phrases.insert(tokens.clone()) {
                lex.phrases.push(tokens);
            }
        }
        lex.phrases.sort();
        lex
    }

    /// Count matches of this lexicon in a token sequence. Single words match
    /// per token; multiword cues match as contiguous token subsequences.
    /// Overlapping phrase matches are counted once per start position.
    pub fn count_matches(&self, tokens: &[String]) -> usize {
        let mut count = tokens.iter().filter(|t| self.words.contains(t.as_str())).count();
        for phrase in &self.phrases {
            if phrase.len() > tokens.len() {
                continue;
            }
            for start in 0..=(tokens.len() - phrase.len()) {
                if tokens[start..start + phrase.len()]
                    .iter()
                    .zip(phrase)
                    .all(|(a, b)| a == b)
                {
                    count += 1;
                }
            }
        }
        count
    }
}

/// Parse a plain-text lexicon: one entry per line, `#` comments allowed.
pub fn load_lexicon(path: &Path, name: &str) -> Result<Lexicon, LexiconError> {
    let text = std::fs::read_to_string(path).map_err(|source| LexiconError::UnreadableFile {
        path: path.display().to_string(),
        source,
    })?;
    let lex = parse_lexicon(&text, name);
    if lex.is_empty() {
        return Err(LexiconError::EmptyLexicon {
            name: name.to_string(),
        });
    }
    Ok(lex)
}

pub fn parse_lexicon(text: &str, name: &str) -> Lexicon {
    Lexicon::from_entries(
        name,
        text.lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .filter(|l| !l.trim().is_empty()),
    )
}

/// The four scalar word-norm dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormDimension {
    Arousal,
    Concreteness,
    Dominance,
    Valence,
}

impl NormDimension {
    pub const ALL: [NormDimension; 4] = [
        NormDimension::Arousal,
        NormDimension::Concreteness,
        NormDimension::Dominance,
        NormDimension::Valence,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            NormDimension::Arousal => "arousal",
            NormDimension::Concreteness => "concreteness",
            NormDimension::Dominance => "dominance",
            NormDimension::Valence => "valence",
        }
    }
}

impl fmt::Display for NormDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Native,
    Extrapolated,
}

/// Per-word scores for one norm dimension, scaled into `[0, 1]`.
#[derive(Debug, Clone)]
pub struct NormTable<R: Real> {
    pub dimension: NormDimension,
    scores: HashMap<String, (R, Provenance)>,
    /// Extrapolated predictions clamped into `[0, 1]`.
    pub clamped_count: usize,
}

impl<R: Real> NormTable<R> {
    pub fn new(dimension: NormDimension) -> Self {
        Self {
            dimension,
            scores: HashMap::new(),
            clamped_count: 0,
        }
    }

    pub fn score(&self, word: &str) -> Option<R> {
        self.scores.get(word).map(|(s, _)| *s)
    }

    pub fn provenance(&self, word: &str) -> Option<Provenance> {
        self.scores.get(word).map(|(_, p)| *p)
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn native_words(&self) -> impl Iterator<Item = &str> {
        self.scores
            .iter()
            .filter(|(_, (_, p))| *p == Provenance::Native)
            .map(|(w, _)| w.as_str())
    }

    pub fn insert_native(&mut self, word: String, score: R) {
        self.scores.insert(word, (score, Provenance::Native));
    }
}

/// Load a `word,score` CSV and min-max scale scores from the declared native
/// rating range into `[0, 1]`.
pub fn load_norms<R: Real>(
    path: &Path,
    dimension: NormDimension,
    scale_bounds: (f64, f64),
) -> Result<NormTable<R>, LexiconError> {
    let text = std::fs::read_to_string(path).map_err(|source| LexiconError::UnreadableFile {
        path: path.display().to_string(),
        source,
    })?;
    parse_norms(&text, dimension, scale_bounds, &path.display().to_string())
}

pub fn parse_norms<R: Real>(
    text: &str,
    dimension: NormDimension,
    (min, max): (f64, f64),
    path: &str,
) -> Result<NormTable<R>, LexiconError> {
    assert!(max > min, "declared scale must be nondegenerate");
    let mut table = NormTable::new(dimension);
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.splitn(2, ',');
        let word = parts.next().unwrap_or("").trim().to_lowercase();
        let score_str = parts.next().unwrap_or("").trim();
        if i == 0 && score_str.parse::<f64>().is_err() {
            continue; // header row
        }
        let score: f64 = score_str
            .parse()
            .map_err(|_| LexiconError::MalformedNorm {
                path: path.to_string(),
                line: i + 1,
                detail: format!("unparseable score {score_str:?}"),
            })?;
        if score < min || score > max {
            return Err(LexiconError::ScoreOutOfDeclaredRange {
                path: path.to_string(),
                line: i + 1,
                score,
                min,
                max,
            });
        }
        let scaled = (score - min) / (max - min);
        table.insert_native(word, R::from_f64_c(scaled));
    }
    Ok(table)
}

/// Word vectors of uniform length.
#[derive(Debug, Clone)]
pub struct EmbeddingTable<R: Real> {
    pub dim: usize,
    vectors: HashMap<String, Vec<R>>,
}

impl<R: Real> EmbeddingTable<R> {
    pub fn get(&self, word: &str) -> Option<&[R]> {
        self.vectors.get(word).map(|v| v.as_slice())
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn from_vectors(vectors: HashMap<String, Vec<R>>) -> Self {
        let dim = vectors.values().next().map(|v| v.len()).unwrap_or(0);
        assert!(vectors.values().all(|v| v.len() == dim));
        Self { dim, vectors }
    }
}

/// Parse a plain-text embedding file: `word v1 ... vd` per line.
pub fn load_embeddings<R: Real>(path: &Path) -> Result<EmbeddingTable<R>, LexiconError> {
    let text = std::fs::read_to_string(path).map_err(|source| LexiconError::UnreadableFile {
        path: path.display().to_string(),
        source,
    })?;
    parse_embeddings(&text, &path.display().to_string())
}

pub fn parse_embeddings<R: Real>(text: &str, path: &str) -> Result<EmbeddingTable<R>, LexiconError> {
    let mut vectors: HashMap<String, Vec<R>> = HashMap::new();
    let mut dim = 0usize;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let word = parts.next().unwrap().to_lowercase();
        let vec: Result<Vec<R>, _> = parts.map(|p| p.parse::<f64>().map(R::from_f64_c)).collect();
        let vec = vec.map_err(|_| LexiconError::MalformedEmbedding {
            path: path.to_string(),
            line: i + 1,
            detail: "unparseable vector component".to_string(),
        })?;
        if dim == 0 {
            dim = vec.len();
        } else if vec.len() != dim {
            return Err(LexiconError::MalformedEmbedding {
                path: path.to_string(),
                line: i + 1,
                detail: format!("expected {dim} components, found {}", vec.len()),
            });
        }
        vectors.insert(word, vec);
    }
    Ok(EmbeddingTable { dim, vectors })
}

/// Minimum native entries overlapping the embedding vocabulary for
/// extrapolation to be attempted.
pub const MIN_EXTRAPOLATION_OVERLAP: usize = 1_000;

/// Ridge regularization grid.
pub const RIDGE_LAMBDA_GRID: [f64; 4] = [0.1, 1.0, 10.0, 100.0];

/// Predict norm scores for vocabulary words missing from the table but
/// present in the embedding file, via closed-form ridge regression on the
/// native entries. Lambda is chosen by deterministic 5-fold CV; predictions
/// are clamped into `[0, 1]`. Native scores are never altered.
pub fn extrapolate_norms<R: Real>(
    norms: &NormTable<R>,
    emb: &EmbeddingTable<R>,
    vocab: &HashSet<String>,
) -> Result<NormTable<R>, LexiconError> {
    let mut native: Vec<(&str, R)> = norms
        .scores
        .iter()
        .filter(|(w, (_, p))| *p == Provenance::Native && emb.get(w).is_some())
        .map(|(w, (s, _))| (w.as_str(), *s))
        .collect();
    if native.len() < MIN_EXTRAPOLATION_OVERLAP {
        return Err(LexiconError::InsufficientOverlap {
            required: MIN_EXTRAPOLATION_OVERLAP,
            found: native.len(),
        });
    }
    native.sort_by(|a, b| a.0.cmp(b.0));
    let rows: Vec<&[R]> = native.iter().map(|(w, _)| emb.get(w).unwrap()).collect();
    let targets: Vec<R> = native.iter().map(|(_, s)| *s).collect();

    // 5-fold CV over the lambda grid; folds assigned round-robin over the
    // sorted native words so the split is deterministic.
    let mut best = (f64::INFINITY, RIDGE_LAMBDA_GRID[0]);
    for &lambda in &RIDGE_LAMBDA_GRID {
        let mut sse = 0.0;
        let mut n_eval = 0usize;
        for fold in 0..5 {
            let train_idx: Vec<usize> = (0..rows.len()).filter(|i| i % 5 != fold).collect();
            let test_idx: Vec<usize> = (0..rows.len()).filter(|i| i % 5 == fold).collect();
            let model = fit_ridge(
                &train_idx.iter().map(|&i| rows[i]).collect::<Vec<_>>(),
                &train_idx.iter().map(|&i| targets[i]).collect::<Vec<_>>(),
                R::from_f64_c(lambda),
            );
            for &i in &test_idx {
                let pred = model.predict(rows[i]);
                let err = (pred - targets[i]).into_f64();
                sse += err * err;
                n_eval += 1;
            }
        }
        let mse = sse / n_eval as f64;
        if mse < best.0 {
            best = (mse, lambda);
        }
    }
    let model = fit_ridge(&rows, &targets, R::from_f64_c(best.1));

    let mut out = norms.clone();
    let mut clamped = 0usize;
    let mut missing: Vec<&String> = vocab
        .iter()
        .filter(|w| norms.score(w).is_none())
        .collect();
    missing.sort();
    for word in missing {
        let Some(vec) = emb.get(word) else { continue };
        let mut pred = model.predict(vec);
        let zero = R::zero();
        let one = R::one();
        if pred < zero {
            pred = zero;
            clamped += 1;
        } else if pred > one {
            pred = one;
            clamped += 1;
        }
        out.scores
            .insert(word.clone(), (pred, Provenance::Extrapolated));
    }
    out.clamped_count += clamped;
    Ok(out)
}

struct RidgeModel<R: Real> {
    weights: Vec<R>,
    x_mean: Vec<R>,
    y_mean: R,
}

impl<R: Real> RidgeModel<R> {
    fn predict(&self, x: &[R]) -> R {
        let mut dot = R::zero();
        for ((xi, mi), wi) in x.iter().zip(&self.x_mean).zip(&self.weights) {
            dot = dot + (*xi - *mi) * *wi;
        }
        self.y_mean + dot
    }
}

/// Closed-form ridge with intercept: center, then solve
/// `(X'X + lambda I) w = X'y` by Cholesky.
fn fit_ridge<R: Real>(rows: &[&[R]], y: &[R], lambda: R) -> RidgeModel<R> {
    let n = rows.len();
    let d = rows[0].len();
    let nr = R::from_count(n);
    let mut x_mean = vec![R::zero(); d];
    for row in rows {
        for (m, v) in x_mean.iter_mut().zip(*row) {
            *m = *m + *v;
        }
    }
    for m in &mut x_mean {
        *m = *m / nr;
    }
    let y_mean = y.iter().copied().sum::<R>() / nr;

    let mut gram = vec![vec![R::zero(); d]; d];
    let mut xty = vec![R::zero(); d];
    for (row, &yi) in rows.iter().zip(y) {
        let centered: Vec<R> = row.iter().zip(&x_mean).map(|(v, m)| *v - *m).collect();
        let yc = yi - y_mean;
        for i in 0..d {
            xty[i] = xty[i] + centered[i] * yc;
            for j in i..d {
                gram[i][j] = gram[i][j] + centered[i] * centered[j];
            }
        }
    }
    for i in 0..d {
        gram[i][i] = gram[i][i] + lambda;
        for j in 0..i {
            gram[i][j] = gram[j][i];
        }
    }
    let weights = cholesky_solve(&gram, &xty);
    RidgeModel {
        weights,
        x_mean,
        y_mean,
    }
}

/// Solve `A x = b` for symmetric positive-definite `A`.
fn cholesky_solve<R: Real>(a: &[Vec<R>], b: &[R]) -> Vec<R> {
    let n = a.len();
    let mut l = vec![vec![R::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i][j];
            for k in 0..j {
                sum = sum - l[i][k] * l[j][k];
            }
            if i == j {
                l[i][j] = sum.max(R::from_f64_c(1e-12)).sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    // forward then back substitution
    let mut y = vec![R::zero(); n];
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum = sum - l[i][k] * y[k];
        }
        y[i] = sum / l[i][i];
    }
    let mut x = vec![R::zero(); n];
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in (i + 1)..n {
            sum = sum - l[k][i] * x[k];
        }
        x[i] = sum / l[i][i];
    }
    x
}

/// All loaded resources, bundled for feature extraction.
#[derive(Debug, Clone)]
pub struct Resources<R: Real> {
    pub stopwords: Lexicon,
    pub positive: Lexicon,
    pub negative: Lexicon,
    pub hedges: Lexicon,
    pub norms: BTreeMap<NormDimension, NormTable<R>>,
    pub embeddings: Option<EmbeddingTable<R>>,
}

impl<R: Real> Resources<R> {
    /// Load from the standard layout:
    /// `lexicons/{stopwords,positive,negative,hedges}.txt`,
    /// `norms/{arousal,concreteness,dominance,valence}.csv`,
    /// optional `embeddings.txt`.
    ///
    /// VAD norms are declared on a 1-9 rating scale, concreteness on 1-5.
    pub fn load(dir: &Path) -> Result<Self, LexiconError> {
        let lex = |name: &str| load_lexicon(&dir.join("lexicons").join(format!("{name}.txt")), name);
        let mut norms = BTreeMap::new();
        for dim in NormDimension::ALL {
            let bounds = match dim {
                NormDimension::Concreteness => (1.0, 5.0),
                _ => (1.0, 9.0),
            };
            let path = dir.join("norms").join(format!("{}.csv", dim.as_str()));
            norms.insert(dim, load_norms(&path, dim, bounds)?);
        }
        let emb_path = dir.join("embeddings.txt");
        let embeddings = if emb_path.exists() {
            Some(load_embeddings(&emb_path)?)
        } else {
            None
        };
        Ok(Self {
            stopwords: lex("stopwords")?,
            positive: lex("positive")?,
            negative: lex("negative")?,
            hedges: lex("hedges")?,
            norms,
            embeddings,
        })
    }

    /// Run norm extrapolation for every dimension over the given vocabulary,
    /// if an embedding table is available. Dimensions with insufficient
    /// overlap are left untouched.
    pub fn extrapolate_all(&mut self, vocab: &HashSet<String>) -> Vec<(NormDimension, LexiconError)> {
        let Some(emb) = &self.embeddings else {
            return Vec::new();
        };
        let mut skipped = Vec::new();
        for dim in NormDimension::ALL {
            let table = self.norms.get(&dim).unwrap();
            match extrapolate_norms(table, emb, vocab) {
                Ok(extended) => {
                    self.norms.insert(dim, extended);
                }
                Err(e) => skipped.push((dim, e)),
            }
        }
        skipped
    }
}
