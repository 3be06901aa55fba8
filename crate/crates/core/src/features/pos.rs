//! Pluggable part-of-speech annotation with a coarse Penn-style tag set.
//!
//! Two implementations: a sidecar dictionary of pre-tagged tokens, and a
//! rule-based fallback tagger (closed-class word lists plus suffix rules).

use std::collections::HashMap;
use std::path::Path;

use crate::lexicons::LexiconError;

/// Maps a token sequence to one tag per token.
pub trait PosAnnotator {
    fn tag(&self, tokens: &[String]) -> Vec<String>;
}

/// Rule-based tagger: closed-class lookup, then suffix heuristics,
/// defaulting to `NN`.
#[derive(Debug, Clone, Default)]
pub struct RuleTagger;

const CLOSED_CLASS: &[(&str, &[&str])] = &[
    ("DT", &["the", "a", "an", "this", "that", "these", "those", "some", "any", "no", "every", "each"]),
    ("PRP", &["i", "me", "you", "he", "she", "it", "we", "us", "they", "them", "himself", "herself", "myself", "yourself", "themselves", "ourselves", "itself"]),
    ("PRP$", &["my", "your", "his", "her", "its", "our", "their", "mine", "yours", "ours", "theirs"]),
    ("IN", &["in", "on", "at", "by", "for", "with", "about", "against", "between", "into", "through", "during", "before", "after", "above", "below", "to", "from", "of", "if", "because", "while", "than", "as", "since", "until"]),
    ("CC", &["and", "but", "or", "nor", "so", "yet"]),
    ("MD", &["can", "could", "may", "might", "must", "shall", "should", "will", "would"]),
    ("VB", &["be", "is", "are", "was", "were", "been", "being", "am", "do", "does", "did", "have", "has", "had"]),
    ("RB", &["not", "n't", "very", "too", "also", "just", "here", "there", "now", "then", "never", "always", "often", "really"]),
    ("WDT", &["which", "what", "whatever", "who", "whom", "whose", "when", "where", "why", "how"]),
    ("EX", &["there's"]),
    ("UH", &["oh", "well", "yes", "yeah", "no"]),
];

impl RuleTagger {
    fn tag_one(token: &str) -> &'static str {
        for (tag, words) in CLOSED_CLASS {
            if words.contains(&token) {
                return tag;
            }
        }
        if token.chars().all(|c| c.is_ascii_digit()) {
            return "CD";
        }
        if token.ends_with("ly") {
            return "RB";
        }
        if token.ends_with("ing") && token.len() > 4 {
            return "VBG";
        }
        if token.ends_with("ed") && token.len() > 3 {
            return "VBD";
        }
        if token.ends_with("est") && token.len() > 4 {
            return "JJS";
        }
        if token.ends_with("er") && token.len() > 3 {
            return "JJR";
        }
        if (token.ends_with("ous") || token.ends_with("ful") || token.ends_with("ive") || token.ends_with("able") || token.ends_with("al"))
            && token.len() > 4
        {
            return "JJ";
        }
        if token.ends_with('s') && token.len() > 2 && !token.ends_with("ss") {
            return "NNS";
        }
        "NN"
    }
}

impl PosAnnotator for RuleTagger {
    fn tag(&self, tokens: &[String]) -> Vec<String> {
        tokens
            .iter()
            .map(|t| Self::tag_one(t.as_str()).to_string())
            .collect()
    }
}

/// Sidecar dictionary: `token tag` per line, falling back to `RuleTagger`
/// for unknown tokens.
#[derive(Debug, Clone, Default)]
pub struct SidecarTagger {
    tags: HashMap<String, String>,
}

impl SidecarTagger {
    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        let text = std::fs::read_to_string(path).map_err(|source| LexiconError::UnreadableFile {
            path: path.display().to_string(),
            source,
        })?;
        Ok(Self::parse(&text))
    }

    pub fn parse(text: &str) -> Self {
        let mut tags = HashMap::new();
        for line in text.lines() {
            let mut parts = line.split_whitespace();
            if let (Some(token), Some(tag)) = (parts.next(), parts.next()) {
                tags.insert(token.to_lowercase(), tag.to_string());
            }
        }
        Self { tags }
    }
}

impl PosAnnotator for SidecarTagger {
    fn tag(&self, tokens: &[String]) -> Vec<String> {
        tokens
            .iter()
            .map(|t| {
                self.tags
                    .get(t.as_str())
                    .cloned()
                    .unwrap_or_else(|| RuleTagger::tag_one(t).to_string())
            })
            .collect()
    }
}
