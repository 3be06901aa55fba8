//! Dense feature families: interplay with the original post, word
//! categories, word scores, whole-argument shape, Markdown formatting, and
//! quarter-wise profiles.

use std::collections::{BTreeSet, HashSet};
use std::sync::OnceLock;

use regex::Regex;

use crate::corpus::{QUOTE_SENTINEL, URL_SENTINEL};
use crate::lexicons::{Lexicon, NormDimension, NormTable, Resources};
use crate::num::Real;

use super::tokenize::{count_syllables, is_sentinel, TokenizedText};
use super::FeatureVector;

/// Vocabulary families the interplay metrics run over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordFamily {
    All,
    Content,
    Stopwords,
}

impl WordFamily {
    pub const ALL: [WordFamily; 3] = [WordFamily::All, WordFamily::Content, WordFamily::Stopwords];

    pub fn suffix(&self) -> &'static str {
        match self {
            WordFamily::All => "all",
            WordFamily::Content => "content",
            WordFamily::Stopwords => "stopwords",
        }
    }
}

fn word_set<'a, I: IntoIterator<Item = &'a str>>(tokens: I) -> BTreeSet<&'a str> {
    tokens.into_iter().filter(|t| !is_sentinel(t)).collect()
}

fn family_set<'a>(tokens: &'a [String], family: WordFamily, stopwords: &Lexicon) -> BTreeSet<&'a str> {
    let all = word_set(tokens.iter().map(|t| t.as_str()));
    match family {
        WordFamily::All => all,
        WordFamily::Content => all
            .into_iter()
            .filter(|t| !stopwords.contains_word(t))
            .collect(),
        WordFamily::Stopwords => all
            .into_iter()
            .filter(|t| stopwords.contains_word(t))
            .collect(),
    }
}

fn interplay_into<R: Real>(
    out: &mut FeatureVector<R>,
    prefix: &str,
    arg_set: &BTreeSet<&str>,
    op_set: &BTreeSet<&str>,
    family: WordFamily,
) {
    let common = arg_set.intersection(op_set).count();
    let union = arg_set.union(op_set).count();
    let sfx = family.suffix();
    out.set(&format!("{prefix}common_{sfx}"), R::from_count(common));
    if arg_set.is_empty() {
        out.set_missing(&format!("{prefix}reply_frac_{sfx}"));
    } else {
        out.set(
            &format!("{prefix}reply_frac_{sfx}"),
            R::from_count(common) / R::from_count(arg_set.len()),
        );
    }
    if op_set.is_empty() {
        out.set_missing(&format!("{prefix}op_frac_{sfx}"));
    } else {
        out.set(
            &format!("{prefix}op_frac_{sfx}"),
            R::from_count(common) / R::from_count(op_set.len()),
        );
    }
    let jaccard = if union == 0 {
        R::zero()
    } else {
        R::from_count(common) / R::from_count(union)
    };
    out.set(&format!("{prefix}jaccard_{sfx}"), jaccard);
}

/// The 12 interplay features: {common, reply fraction, OP fraction, Jaccard}
/// over {all, content, stopword} unique-word sets.
pub fn interplay_features<R: Real>(
    arg: &TokenizedText,
    op: &TokenizedText,
    stopwords: &Lexicon,
) -> FeatureVector<R> {
    let mut out = FeatureVector::new();
    for family in WordFamily::ALL {
        let a = family_set(&arg.tokens, family, stopwords);
        let o = family_set(&op.tokens, family, stopwords);
        interplay_into(&mut out, "interplay_", &a, &o, family);
    }
    out
}

const FIRST_PERSON: [&str; 5] = ["i", "me", "my", "mine", "myself"];
const FIRST_PLURAL: [&str; 5] = ["we", "us", "our", "ours", "ourselves"];
const SECOND_PERSON: [&str; 5] = ["you", "your", "yours", "yourself", "yourselves"];
const NUMBERED_WORDS: [&str; 10] = [
    "first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth", "tenth",
];

fn url_capture_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r#"(?:https?://|www\.)[^\s<>()\[\]"']+"#).unwrap())
}

fn count_and_frac<R: Real>(out: &mut FeatureVector<R>, name: &str, count: usize, words: usize) {
    out.set(&format!("n_{name}"), R::from_count(count));
    if words == 0 {
        out.set_missing(&format!("frac_{name}"));
    } else {
        out.set(
            &format!("frac_{name}"),
            R::from_count(count) / R::from_count(words),
        );
    }
}

fn missing_pair<R: Real>(out: &mut FeatureVector<R>, name: &str) {
    out.set_missing(&format!("n_{name}"));
    out.set_missing(&format!("frac_{name}"));
}

/// Word-category features: articles, sentiment words, pronouns, links,
/// hedges, example markers, question marks and quotations. Each comes as an
/// absolute count and a per-word fraction.
///
/// Domain-specific link classes and question marks need the raw/punctuated
/// text and are missing in truncated mode.
pub fn category_features<R: Real>(arg: &TokenizedText, res: &Resources<R>) -> FeatureVector<R> {
    let mut out = FeatureVector::new();
    let words = arg.word_count();
    let count_set = |set: &[&str]| {
        arg.tokens
            .iter()
            .filter(|t| set.contains(&t.as_str()))
            .count()
    };
    count_and_frac(&mut out, "definite_articles", count_set(&["the"]), words);
    count_and_frac(&mut out, "indefinite_articles", count_set(&["a", "an"]), words);
    count_and_frac(&mut out, "positive_words", res.positive.count_matches(&arg.tokens), words);
    count_and_frac(&mut out, "negative_words", res.negative.count_matches(&arg.tokens), words);
    count_and_frac(&mut out, "first_person", count_set(&FIRST_PERSON), words);
    count_and_frac(&mut out, "first_person_plural", count_set(&FIRST_PLURAL), words);
    count_and_frac(&mut out, "second_person", count_set(&SECOND_PERSON), words);
    count_and_frac(&mut out, "hedges", res.hedges.count_matches(&arg.tokens), words);
    let example_cues = example_lexicon();
    count_and_frac(&mut out, "examples", example_cues.count_matches(&arg.tokens), words);
    // URL sentinels survive truncation, so the plain link count is always
    // available; domain classes come from the raw Markdown.
    let links = arg.tokens.iter().filter(|t| *t == URL_SENTINEL).count();
    count_and_frac(&mut out, "links", links, words);
    if arg.truncated_mode {
        missing_pair(&mut out, "com_links");
        missing_pair(&mut out, "edu_links");
        missing_pair(&mut out, "pdf_links");
        missing_pair(&mut out, "question_marks");
    } else {
        let mut com = 0;
        let mut edu = 0;
        let mut pdf = 0;
        for m in url_capture_regex().find_iter(&arg.raw) {
            let url = m.as_str().to_lowercase();
            let host = url
                .trim_start_matches("http://")
                .trim_start_matches("https://")
                .split('/')
                .next()
                .unwrap_or("")
                .to_string();
            if host.ends_with(".com") || host.contains(".com:") {
                com += 1;
            }
            if host.ends_with(".edu") || host.contains(".edu:") {
                edu += 1;
            }
            if url.trim_end_matches(|c: char| !c.is_alphanumeric()).ends_with(".pdf") {
                pdf += 1;
            }
        }
        count_and_frac(&mut out, "com_links", com, words);
        count_and_frac(&mut out, "edu_links", edu, words);
        count_and_frac(&mut out, "pdf_links", pdf, words);
        let qmarks = arg.clean.chars().filter(|c| *c == '?').count();
        count_and_frac(&mut out, "question_marks", qmarks, words);
    }
    let quotes = arg.tokens.iter().filter(|t| *t == QUOTE_SENTINEL).count();
    count_and_frac(&mut out, "quotations", quotes, words);
    out
}

fn example_lexicon() -> &'static Lexicon {
    static LEX: OnceLock<Lexicon> = OnceLock::new();
    LEX.get_or_init(|| Lexicon::from_entries("examples", ["for example", "for instance", "e g"]))
}

fn mean_score<'a, R: Real, I: IntoIterator<Item = &'a str>>(
    tokens: I,
    table: &NormTable<R>,
) -> Option<R> {
    let mut sum = R::zero();
    let mut n = 0usize;
    for t in tokens {
        if let Some(s) = table.score(t) {
            sum = sum + s;
            n += 1;
        }
    }
    if n == 0 {
        None
    } else {
        Some(sum / R::from_count(n))
    }
}

/// Mean arousal / concreteness / dominance / valence over covered content
/// tokens; missing when no content token has a score.
pub fn score_features<R: Real>(arg: &TokenizedText, res: &Resources<R>) -> FeatureVector<R> {
    let mut out = FeatureVector::new();
    for dim in NormDimension::ALL {
        let table = &res.norms[&dim];
        match mean_score(arg.content_tokens.iter().map(|t| t.as_str()), table) {
            Some(v) => out.set(dim.as_str(), v),
            None => out.set_missing(dim.as_str()),
        }
    }
    out
}

/// Word count, entropy, type-token ratio, and (outside truncated mode)
/// sentence/paragraph counts and Flesch-Kincaid grade level.
pub fn argument_shape_features<R: Real>(arg: &TokenizedText) -> FeatureVector<R> {
    let mut out = FeatureVector::new();
    let words: Vec<&str> = arg.words().collect();
    let n = words.len();
    out.set("n_words", R::from_count(n));
    if n == 0 {
        out.set_missing("word_entropy");
        out.set_missing("type_token_ratio");
    } else {
        let mut counts: std::collections::HashMap<&str, usize> = std::collections::HashMap::new();
        for w in &words {
            *counts.entry(w).or_default() += 1;
        }
        let nf = n as f64;
        let entropy: f64 = counts
            .values()
            .map(|&c| {
                let p = c as f64 / nf;
                -p * p.log2()
            })
            .sum();
        out.set("word_entropy", R::from_f64_c(entropy));
        out.set(
            "type_token_ratio",
            R::from_count(counts.len()) / R::from_count(n),
        );
    }
    if arg.truncated_mode {
        out.set_missing("n_sentences");
        out.set_missing("n_paragraphs");
        out.set_missing("flesch_kincaid");
    } else {
        out.set("n_sentences", R::from_count(arg.sentences));
        out.set("n_paragraphs", R::from_count(arg.paragraphs));
        if n == 0 || arg.sentences == 0 {
            out.set_missing("flesch_kincaid");
        } else {
            let syllables: usize = words.iter().map(|w| count_syllables(w)).sum();
            let fk = 0.39 * (n as f64 / arg.sentences as f64)
                + 11.8 * (syllables as f64 / n as f64)
                - 15.59;
            out.set("flesch_kincaid", R::from_f64_c(fk));
        }
    }
    out
}

fn bold_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\*\*[^*\n]+\*\*|__[^_\n]+__").unwrap())
}

fn italic_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\*[^*\n]+\*|\b_[^_\n]+_\b").unwrap())
}

fn bullet_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?m)^\s*[-*+]\s+\S").unwrap())
}

fn numbered_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?m)^\s*\d+[.)]\s+\S").unwrap())
}

/// Markdown formatting counts from the raw text (bold, italic, lists) plus
/// the token-based "numbered words" count which survives truncation.
pub fn markdown_features<R: Real>(arg: &TokenizedText) -> FeatureVector<R> {
    let mut out = FeatureVector::new();
    let words = arg.word_count();
    let numbered_words = arg
        .tokens
        .iter()
        .filter(|t| NUMBERED_WORDS.contains(&t.as_str()))
        .count();
    out.set("n_numbered_words", R::from_count(numbered_words));
    if arg.truncated_mode {
        out.set_missing("n_italics");
        out.set_missing("frac_italics");
        out.set_missing("n_bolds");
        out.set_missing("bullet_list");
        out.set_missing("numbered_list");
        return out;
    }
    let without_bold = bold_regex().replace_all(&arg.raw, " ");
    let bolds = bold_regex().find_iter(&arg.raw).count();
    let italics = italic_regex().find_iter(&without_bold).count();
    out.set("n_italics", R::from_count(italics));
    out.set("n_bolds", R::from_count(bolds));
    if words == 0 {
        out.set_missing("frac_italics");
    } else {
        out.set(
            "frac_italics",
            R::from_count(italics) / R::from_count(words),
        );
    }
    let has_bullets = bullet_regex().is_match(&arg.raw);
    let has_numbered = numbered_regex().is_match(&arg.raw);
    out.set("bullet_list", if has_bullets { R::one() } else { R::zero() });
    out.set("numbered_list", if has_numbered { R::one() } else { R::zero() });
    out
}

// ---------------------------------------------------------------------------
// Quarters
// ---------------------------------------------------------------------------

/// Split a token sequence into 4 contiguous quarters; the first `n mod 4`
/// quarters get the extra token.
pub fn split_quarters(tokens: &[String]) -> [&[String]; 4] {
    let n = tokens.len();
    let base = n / 4;
    let extra = n % 4;
    let mut out: [&[String]; 4] = [&[], &[], &[], &[]];
    let mut start = 0usize;
    for (q, slot) in out.iter_mut().enumerate() {
        let size = base + usize::from(q < extra);
        *slot = &tokens[start..start + size];
        start += size;
    }
    out
}

/// Per-quarter word-score averages plus interplay over every subdivision
/// pair (4 quarters + the full text on each side) with quarter-wise max/min
/// summaries.
#[derive(Debug, Clone)]
pub struct QuarterProfile<R: Real> {
    /// `score_means[q][d]`: mean score of norm dimension `d` over the
    /// content tokens of argument quarter `q`.
    pub score_means: [[Option<R>; 4]; 4],
    /// Subdivision interplay cells and max/min summaries, as named features.
    pub interplay: FeatureVector<R>,
}

const SUBDIVISIONS: [&str; 5] = ["1", "2", "3", "4", "full"];

fn subdivision_sets<'a>(
    text: &'a TokenizedText,
    family: WordFamily,
    stopwords: &Lexicon,
) -> Vec<BTreeSet<&'a str>> {
    let quarters = split_quarters(&text.tokens);
    let mut sets: Vec<BTreeSet<&str>> = quarters
        .iter()
        .map(|q| {
            let all = word_set(q.iter().map(|t| t.as_str()));
            match family {
                WordFamily::All => all,
                WordFamily::Content => all
                    .into_iter()
                    .filter(|t| !stopwords.contains_word(t))
                    .collect(),
                WordFamily::Stopwords => all
                    .into_iter()
                    .filter(|t| stopwords.contains_word(t))
                    .collect(),
            }
        })
        .collect();
    sets.push(family_set(&text.tokens, family, stopwords));
    sets
}

/// Names of the four interplay metrics, in cell naming order.
const METRICS: [&str; 4] = ["common", "reply_frac", "op_frac", "jaccard"];

pub fn quarter_profile<R: Real>(
    arg: &TokenizedText,
    op: &TokenizedText,
    res: &Resources<R>,
) -> QuarterProfile<R> {
    let mut score_means = [[None; 4]; 4];
    let quarters = split_quarters(&arg.tokens);
    for (q, tokens) in quarters.iter().enumerate() {
        let content: Vec<&str> = tokens
            .iter()
            .map(|t| t.as_str())
            .filter(|t| !is_sentinel(t) && !res.stopwords.contains_word(t))
            .collect();
        for (d, dim) in NormDimension::ALL.iter().enumerate() {
            score_means[q][d] = mean_score(content.iter().copied(), &res.norms[dim]);
        }
    }

    let mut interplay = FeatureVector::new();
    for family in WordFamily::ALL {
        let arg_sets = subdivision_sets(arg, family, &res.stopwords);
        let op_sets = subdivision_sets(op, family, &res.stopwords);
        let sfx = family.suffix();
        // metric -> quarter-cell values for max/min summaries
        let mut quarter_cells: Vec<Vec<R>> = vec![Vec::new(); METRICS.len()];
        for (ai, a_set) in arg_sets.iter().enumerate() {
            for (oi, o_set) in op_sets.iter().enumerate() {
                let prefix = format!("qip_a{}_o{}_", SUBDIVISIONS[ai], SUBDIVISIONS[oi]);
                let arg_empty_quarter = ai < 4 && split_quarters(&arg.tokens)[ai].is_empty();
                let op_empty_quarter = oi < 4 && split_quarters(&op.tokens)[oi].is_empty();
                if arg_empty_quarter || op_empty_quarter {
                    for m in METRICS {
                        interplay.set_missing(&format!("{prefix}{m}_{sfx}"));
                    }
                    continue;
                }
                let mut cell = FeatureVector::new();
                interplay_into(&mut cell, &prefix, a_set, o_set, family);
                if ai < 4 && oi < 4 {
                    for (mi, m) in METRICS.iter().enumerate() {
                        if let Some(v) = cell.get(&format!("{prefix}{m}_{sfx}")) {
                            quarter_cells[mi].push(v);
                        }
                    }
                }
                interplay.merge(cell);
            }
        }
        for (mi, m) in METRICS.iter().enumerate() {
            let vals = &quarter_cells[mi];
            if vals.is_empty() {
                interplay.set_missing(&format!("qip_{m}_{sfx}_qmax"));
                interplay.set_missing(&format!("qip_{m}_{sfx}_qmin"));
            } else {
                let max = vals.iter().copied().fold(R::neg_infinity(), R::max);
                let min = vals.iter().copied().fold(R::infinity(), R::min);
                interplay.set(&format!("qip_{m}_{sfx}_qmax"), max);
                interplay.set(&format!("qip_{m}_{sfx}_qmin"), min);
            }
        }
    }
    QuarterProfile {
        score_means,
        interplay,
    }
}

impl<R: Real> QuarterProfile<R> {
    /// Flatten into named features: `q{i}_{dim}` score means plus the
    /// interplay cells.
    pub fn into_features(self) -> FeatureVector<R> {
        let mut out = self.interplay;
        for (q, row) in self.score_means.iter().enumerate() {
            for (d, dim) in NormDimension::ALL.iter().enumerate() {
                let name = format!("q{}_{}", q + 1, dim.as_str());
                match row[d] {
                    Some(v) => out.set(&name, v),
                    None => out.set_missing(&name),
                }
            }
        }
        out
    }
}

/// Unique non-sentinel tokens of a text; used by external callers that need
/// the same word-set definition as the interplay features.
pub fn unique_words(text: &TokenizedText) -> HashSet<String> {
    text.words().map(|w| w.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicons::{parse_lexicon, parse_norms, Resources};
    use std::collections::BTreeMap;

    fn test_resources() -> Resources<f64> {
        let mut norms = BTreeMap::new();
        for dim in NormDimension::ALL {
            norms.insert(
                dim,
                parse_norms("calm,1\nwild,9\nmild,5\n", dim, (1.0, 9.0), "t").unwrap(),
            );
        }
        Resources {
            stopwords: parse_lexicon("the\na\nan\nis\nof\n", "stopwords"),
            positive: parse_lexicon("good\ngreat\n", "positive"),
            negative: parse_lexicon("bad\nawful\n", "negative"),
            hedges: parse_lexicon("could be\nmaybe\n", "hedges"),
            norms,
            embeddings: None,
        }
    }

    fn tok(text: &str) -> TokenizedText {
        TokenizedText::new(text, text, &test_resources().stopwords)
    }

    #[test]
    fn interplay_hand_computed() {
        let res = test_resources();
        let a = tok("the cat runs");
        let o = tok("the dog runs");
        let f: FeatureVector<f64> = interplay_features(&a, &o, &res.stopwords);
        assert_eq!(f.get("interplay_common_all"), Some(2.0));
        assert!((f.get("interplay_reply_frac_all").unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((f.get("interplay_op_frac_all").unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(f.get("interplay_jaccard_all"), Some(0.5));
        assert_eq!(f.get("interplay_common_content"), Some(1.0));
        assert!((f.get("interplay_jaccard_content").unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(f.get("interplay_jaccard_stopwords"), Some(1.0));
    }

    #[test]
    fn interplay_identity_and_disjoint() {
        let res = test_resources();
        let a = tok("the cat runs");
        let ident: FeatureVector<f64> = interplay_features(&a, &a, &res.stopwords);
        for name in ["reply_frac", "op_frac", "jaccard"] {
            assert_eq!(ident.get(&format!("interplay_{name}_all")), Some(1.0));
        }
        let b = tok("dogs walk slowly");
        let dis: FeatureVector<f64> = interplay_features(&a, &b, &res.stopwords);
        assert_eq!(dis.get("interplay_common_all"), Some(0.0));
        assert_eq!(dis.get("interplay_jaccard_all"), Some(0.0));
        assert_eq!(dis.get("interplay_reply_frac_all"), Some(0.0));
    }

    #[test]
    fn category_links_from_markdown() {
        let res = test_resources();
        let raw = "see [x](http://a.com/b.pdf)";
        let clean = crate::corpus::normalize_text(raw);
        let t = TokenizedText::new(&clean, raw, &res.stopwords);
        let f: FeatureVector<f64> = category_features(&t, &res);
        assert_eq!(f.get("n_links"), Some(1.0));
        assert_eq!(f.get("n_com_links"), Some(1.0));
        assert_eq!(f.get("n_pdf_links"), Some(1.0));
        assert_eq!(f.get("n_edu_links"), Some(0.0));
    }

    #[test]
    fn category_hedges_and_pronouns() {
        let res = test_resources();
        let t = tok("I think I know it could be the case");
        let f: FeatureVector<f64> = category_features(&t, &res);
        assert_eq!(f.get("n_hedges"), Some(1.0));
        assert_eq!(f.get("n_first_person"), Some(2.0));
        assert_eq!(f.get("n_definite_articles"), Some(1.0));
    }

    #[test]
    fn score_features_mean_and_missing() {
        let res = test_resources();
        let f: FeatureVector<f64> = score_features(&tok("calm wild"), &res);
        assert!((f.get("arousal").unwrap() - 0.5).abs() < 1e-12);
        let g: FeatureVector<f64> = score_features(&tok("zebra quagga"), &res);
        assert_eq!(g.get("arousal"), None);
        assert!(g.is_missing("arousal"));
    }

    #[test]
    fn shape_entropy_and_ttr() {
        let f: FeatureVector<f64> = argument_shape_features(&tok("a a a a"));
        assert_eq!(f.get("word_entropy"), Some(0.0));
        assert_eq!(f.get("type_token_ratio"), Some(0.25));
        let g: FeatureVector<f64> = argument_shape_features(&tok("w x y z"));
        assert_eq!(g.get("word_entropy"), Some(2.0));
        assert_eq!(g.get("type_token_ratio"), Some(1.0));
    }

    #[test]
    fn flesch_kincaid_single_syllable_sentence() {
        let f: FeatureVector<f64> = argument_shape_features(&tok("The cat sat."));
        let fk = f.get("flesch_kincaid").unwrap();
        assert!((fk - (0.39 * 3.0 + 11.8 - 15.59)).abs() < 1e-9);
    }

    #[test]
    fn markdown_counts() {
        let res = test_resources();
        let t = TokenizedText::new("*wow* **yes**", "*wow* **yes**", &res.stopwords);
        let f: FeatureVector<f64> = markdown_features(&t);
        assert_eq!(f.get("n_italics"), Some(1.0));
        assert_eq!(f.get("n_bolds"), Some(1.0));
        let b = TokenizedText::new("- a\n- b", "- a\n- b", &res.stopwords);
        let g: FeatureVector<f64> = markdown_features(&b);
        assert_eq!(g.get("bullet_list"), Some(1.0));
        let n = TokenizedText::new(
            "first we do, second we do",
            "first we do, second we do",
            &res.stopwords,
        );
        let h: FeatureVector<f64> = markdown_features(&n);
        assert_eq!(h.get("n_numbered_words"), Some(2.0));
    }

    #[test]
    fn quarter_sizes() {
        let toks = |n: usize| -> Vec<String> { (0..n).map(|i| format!("t{i}")).collect() };
        let t8 = toks(8);
        let q = split_quarters(&t8);
        assert_eq!(q.map(|s| s.len()), [2, 2, 2, 2]);
        let t10 = toks(10);
        let q = split_quarters(&t10);
        assert_eq!(q.map(|s| s.len()), [3, 3, 2, 2]);
        let flat: Vec<String> = q.iter().flat_map(|s| s.iter().cloned()).collect();
        assert_eq!(flat, t10);
        let t3 = toks(3);
        let q = split_quarters(&t3);
        assert_eq!(q.map(|s| s.len()), [1, 1, 1, 0]);
        let flat: Vec<String> = q.iter().flat_map(|s| s.iter().cloned()).collect();
        assert_eq!(flat, t3);
    }

    #[test]
    fn quarter_profile_identity_text() {
        let res = test_resources();
        let t = tok("one two three four five six seven eight");
        let p = quarter_profile(&t, &t, &res);
        for q in SUBDIVISIONS {
            let name = format!("qip_a{q}_ofull_reply_frac_all");
            assert_eq!(p.interplay.get(&name), Some(1.0), "{name}");
        }
    }

    #[test]
    fn quarter_profile_single_token_mostly_missing() {
        let res = test_resources();
        let t = tok("word");
        let o = tok("another words here");
        let p = quarter_profile(&t, &o, &res);
        assert!(p.interplay.is_missing("qip_a2_ofull_jaccard_all"));
        assert!(p.interplay.get("qip_a1_ofull_jaccard_all").is_some());
    }
}
