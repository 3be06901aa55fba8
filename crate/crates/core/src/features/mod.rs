//! Feature extraction: tokenization plus every dense and sparse feature
//! family, with a shared name registry and missing-value support.

pub mod extract;
pub mod pos;
pub mod sparse;
pub mod tokenize;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicons::Resources;
use crate::num::Real;

pub use extract::{
    argument_shape_features, category_features, interplay_features, markdown_features,
    quarter_profile, score_features, split_quarters, QuarterProfile, WordFamily,
};
pub use pos::{PosAnnotator, RuleTagger, SidecarTagger};
pub use sparse::{tf_vector, SparseVector, Vocabulary};
pub use tokenize::TokenizedText;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("unknown feature family {0:?}")]
    UnknownFamily(String),
    #[error("unknown task variant {0:?}")]
    UnknownVariant(String),
    #[error("family {0} requires a vocabulary built on the training split")]
    MissingVocabulary(&'static str),
}

/// Named dense features; a name that is present but `None` is a missing
/// value (distinct from zero).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureVector<R: Real> {
    values: BTreeMap<String, Option<R>>,
}

impl<R: Real> FeatureVector<R> {
    pub fn new() -> Self {
        Self {
            values: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, name: &str, value: R) {
        self.values.insert(name.to_string(), Some(value));
    }

    pub fn set_missing(&mut self, name: &str) {
        self.values.insert(name.to_string(), None);
    }

    pub fn get(&self, name: &str) -> Option<R> {
        self.values.get(name).copied().flatten()
    }

    /// Whether the name is registered but carries no value.
    pub fn is_missing(&self, name: &str) -> bool {
        matches!(self.values.get(name), Some(None))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(|k| k.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Option<R>)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn merge(&mut self, other: FeatureVector<R>) {
        self.values.extend(other.values);
    }
}

/// Feature families selectable in the extraction config.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Interplay,
    Style,
    Bow,
    Pos,
    Quarters,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Interplay => "interplay",
            Family::Style => "style",
            Family::Bow => "bow",
            Family::Pos => "pos",
            Family::Quarters => "quarters",
        }
    }
}

impl FromStr for Family {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_lowercase().as_str() {
            "interplay" => Ok(Family::Interplay),
            "style" => Ok(Family::Style),
            "bow" => Ok(Family::Bow),
            "pos" => Ok(Family::Pos),
            "quarters" => Ok(Family::Quarters),
            other => Err(FeatureError::UnknownFamily(other.to_string())),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Pair-task text variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    RootReply,
    FullPath,
    RootTruncated,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::RootReply, Variant::FullPath, Variant::RootTruncated];

    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::RootReply => "root_reply",
            Variant::FullPath => "full_path",
            Variant::RootTruncated => "root_truncated",
        }
    }
}

impl FromStr for Variant {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_lowercase().replace('-', "_").as_str() {
            "root_reply" => Ok(Variant::RootReply),
            "full_path" => Ok(Variant::FullPath),
            "root_truncated" => Ok(Variant::RootTruncated),
            other => Err(FeatureError::UnknownVariant(other.to_string())),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Extraction configuration: which families, which variant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub families: BTreeSet<Family>,
    pub variant: Variant,
}

impl FeatureConfig {
    pub fn new<I: IntoIterator<Item = Family>>(families: I, variant: Variant) -> Self {
        Self {
            families: families.into_iter().collect(),
            variant,
        }
    }
}

/// Resolved extraction environment: resources plus any training-side
/// vocabularies and the POS annotator.
pub struct ExtractionContext<'a, R: Real> {
    pub resources: &'a Resources<R>,
    pub bow_vocab: Option<&'a Vocabulary>,
    pub pos_vocab: Option<&'a Vocabulary>,
    pub tagger: Option<&'a dyn PosAnnotator>,
}

impl<'a, R: Real> ExtractionContext<'a, R> {
    pub fn dense_only(resources: &'a Resources<R>) -> Self {
        Self {
            resources,
            bow_vocab: None,
            pos_vocab: None,
            tagger: None,
        }
    }
}

/// Dense features of an argument against the original post, for the
/// selected families. Sparse families are handled separately.
pub fn dense_features<R: Real>(
    arg: &TokenizedText,
    op: &TokenizedText,
    families: &BTreeSet<Family>,
    res: &Resources<R>,
) -> FeatureVector<R> {
    let mut out = FeatureVector::new();
    let want_interplay = families.contains(&Family::Interplay);
    let want_style = families.contains(&Family::Style);
    let want_quarters = families.contains(&Family::Quarters);
    if want_interplay {
        out.merge(interplay_features(arg, op, &res.stopwords));
    }
    if want_style {
        out.merge(category_features(arg, res));
        out.merge(score_features(arg, res));
        out.merge(argument_shape_features(arg));
        out.merge(markdown_features(arg));
    }
    if want_interplay || want_style || want_quarters {
        let profile = quarter_profile(arg, op, res);
        if want_interplay || want_quarters {
            out.merge(profile.interplay.clone());
        }
        if want_style || want_quarters {
            let score_only = QuarterProfile {
                score_means: profile.score_means,
                interplay: FeatureVector::new(),
            }
            .into_features();
            out.merge(score_only);
        }
    }
    out
}

/// Dense features of a standalone text (the malleability task): the style
/// families plus quarter score means. Interplay has no counterpart here.
pub fn dense_features_single<R: Real>(
    text: &TokenizedText,
    families: &BTreeSet<Family>,
    res: &Resources<R>,
) -> FeatureVector<R> {
    let mut out = FeatureVector::new();
    if families.contains(&Family::Style) {
        out.merge(category_features(text, res));
        out.merge(score_features(text, res));
        out.merge(argument_shape_features(text));
        out.merge(markdown_features(text));
    }
    if families.contains(&Family::Style) || families.contains(&Family::Quarters) {
        let profile = quarter_profile(text, text, res);
        let score_only = QuarterProfile {
            score_means: profile.score_means,
            interplay: FeatureVector::new(),
        }
        .into_features();
        out.merge(score_only);
    }
    out
}

/// A dense matrix with a shared column registry; `None` cells are missing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureMatrix<R: Real> {
    pub names: Vec<String>,
    pub rows: Vec<Vec<Option<R>>>,
}

impl<R: Real> FeatureMatrix<R> {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.names.len()
    }
}

/// Sorted union of the names appearing in any vector.
pub fn build_registry<R: Real>(vecs: &[&FeatureVector<R>]) -> Vec<String> {
    let mut names: BTreeSet<String> = BTreeSet::new();
    for v in vecs {
        names.extend(v.names().map(|n| n.to_string()));
    }
    names.into_iter().collect()
}

/// Project a vector onto the registry; unregistered names become missing.
pub fn row_from<R: Real>(fv: &FeatureVector<R>, names: &[String]) -> Vec<Option<R>> {
    names.iter().map(|n| fv.get(n)).collect()
}

/// Positive-minus-negative difference; missing if either side is missing.
pub fn diff_row<R: Real>(pos: &[Option<R>], neg: &[Option<R>]) -> Vec<Option<R>> {
    pos.iter()
        .zip(neg)
        .map(|(p, n)| match (p, n) {
            (Some(a), Some(b)) => Some(*a - *b),
            _ => None,
        })
        .collect()
}

/// Append sparse bag-of-words / bag-of-tags columns to a dense row.
///
/// Column names are `bow:<term>` and `pos:<tag>`; sparse values are never
/// missing.
pub fn sparse_columns<R: Real>(
    tokens: &[String],
    ctx: &ExtractionContext<'_, R>,
    families: &BTreeSet<Family>,
) -> Result<(Vec<String>, Vec<R>), FeatureError> {
    let mut names = Vec::new();
    let mut values = Vec::new();
    if families.contains(&Family::Bow) {
        let vocab = ctx.bow_vocab.ok_or(FeatureError::MissingVocabulary("bow"))?;
        let v = tf_vector::<R>(tokens, vocab);
        for term in vocab.terms() {
            names.push(format!("bow:{term}"));
        }
        let mut dense = vec![R::zero(); vocab.len()];
        for (i, w) in v.iter() {
            dense[i] = w;
        }
        values.extend(dense);
    }
    if families.contains(&Family::Pos) {
        let vocab = ctx.pos_vocab.ok_or(FeatureError::MissingVocabulary("pos"))?;
        let tagger = ctx.tagger.ok_or(FeatureError::MissingVocabulary("pos"))?;
        let tags = tagger.tag(tokens);
        let v = tf_vector::<R>(&tags, vocab);
        for tag in vocab.terms() {
            names.push(format!("pos:{tag}"));
        }
        let mut dense = vec![R::zero(); vocab.len()];
        for (i, w) in v.iter() {
            dense[i] = w;
        }
        values.extend(dense);
    }
    Ok((names, values))
}
