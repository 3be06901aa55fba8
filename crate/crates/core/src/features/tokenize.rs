//! Tokenization and basic text segmentation.
//!
//! The tokenizer is versioned with the crate: Unicode word tokens,
//! lowercased, contractions kept whole, sentinel tokens preserved intact.

use std::sync::OnceLock;

use regex::Regex;

use crate::corpus::{QUOTE_SENTINEL, URL_SENTINEL};
use crate::lexicons::Lexicon;

fn token_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"⟦QUOTE⟧|⟦URL⟧|[\p{L}\p{N}]+(?:['’][\p{L}\p{N}]+)*").unwrap()
    })
}

/// A tokenized text with segmentation counts and the raw Markdown source.
#[derive(Debug, Clone)]
pub struct TokenizedText {
    /// Lowercased word tokens in order, sentinels included.
    pub tokens: Vec<String>,
    pub sentences: usize,
    pub paragraphs: usize,
    /// Original Markdown; empty in truncated mode.
    pub raw: String,
    /// Normalized text the tokens came from.
    pub clean: String,
    /// Tokens minus stopwords and sentinels.
    pub content_tokens: Vec<String>,
    /// Sentence-, paragraph- and Markdown-dependent features are
    /// unavailable when set.
    pub truncated_mode: bool,
}

impl TokenizedText {
    pub fn new(clean: &str, raw: &str, stopwords: &Lexicon) -> Self {
        let tokens = tokenize_words(clean);
        let content_tokens = tokens
            .iter()
            .filter(|t| !is_sentinel(t) && !stopwords.contains_word(t))
            .cloned()
            .collect();
        TokenizedText {
            sentences: count_sentences(clean),
            paragraphs: count_paragraphs(raw),
            tokens,
            raw: raw.to_string(),
            clean: clean.to_string(),
            content_tokens,
            truncated_mode: false,
        }
    }

    /// Build from a truncated word sequence: no raw text, no sentence or
    /// paragraph structure.
    pub fn truncated(clean: &str, stopwords: &Lexicon) -> Self {
        let tokens = tokenize_words(clean);
        let content_tokens = tokens
            .iter()
            .filter(|t| !is_sentinel(t) && !stopwords.contains_word(t))
            .cloned()
            .collect();
        TokenizedText {
            sentences: 0,
            paragraphs: 0,
            tokens,
            raw: String::new(),
            clean: clean.to_string(),
            content_tokens,
            truncated_mode: true,
        }
    }

    /// Tokens excluding sentinels; the basis for word counts.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.as_str()).filter(|t| !is_sentinel(t))
    }

    pub fn word_count(&self) -> usize {
        self.words().count()
    }
}

pub fn is_sentinel(token: &str) -> bool {
    token == QUOTE_SENTINEL || token == URL_SENTINEL
}

/// Lowercased word tokens; sentinels come through as single tokens.
pub fn tokenize_words(text: &str) -> Vec<String> {
    token_regex()
        .find_iter(text)
        .map(|m| {
            let t = m.as_str();
            if is_sentinel(t) {
                t.to_string()
            } else {
                t.to_lowercase()
            }
        })
        .collect()
}

/// Sentences are segments between terminal-punctuation runs (`.?!`) or line
/// breaks that contain at least one alphanumeric character.
pub fn count_sentences(text: &str) -> usize {
    text.split(|c: char| matches!(c, '.' | '?' | '!' | '\n'))
        .filter(|seg| seg.chars().any(|c| c.is_alphanumeric()))
        .count()
}

/// Paragraphs are blank-line-separated blocks with visible content.
pub fn count_paragraphs(raw: &str) -> usize {
    raw.split("\n\n")
        .flat_map(|b| b.split("\r\n\r\n"))
        .filter(|b| !b.trim().is_empty())
        .count()
}

/// Heuristic syllable count: contiguous vowel groups, minus a silent
/// terminal `e`, minimum one per word.
pub fn count_syllables(word: &str) -> usize {
    let lower = word.to_lowercase();
    let chars: Vec<char> = lower.chars().collect();
    let is_vowel = |c: char| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
    let mut groups = 0usize;
    let mut in_group = false;
    for &c in &chars {
        if is_vowel(c) {
            if !in_group {
                groups += 1;
                in_group = true;
            }
        } else {
            in_group = false;
        }
    }
    // silent terminal e: "make" has one syllable, but consonant + "le"
    // ("syllable", "little") keeps its final syllable
    if groups > 1 && chars.len() >= 2 {
        let last = chars[chars.len() - 1];
        let prev = chars[chars.len() - 2];
        if last == 'e' && !is_vowel(prev) && prev != 'l' {
            groups -= 1;
        }
    }
    groups.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicons::parse_lexicon;

    fn stopwords() -> Lexicon {
        parse_lexicon("the\na\ni\ndon't\n", "stopwords")
    }

    #[test]
    fn contractions_stay_whole() {
        let t = TokenizedText::new("I don't know.", "I don't know.", &stopwords());
        assert_eq!(t.tokens, vec!["i", "don't", "know"]);
        assert_eq!(t.sentences, 1);
    }

    #[test]
    fn paragraphs_and_sentences() {
        let t = TokenizedText::new("A.\n\nB.", "A.\n\nB.", &stopwords());
        assert_eq!(t.paragraphs, 2);
        assert_eq!(t.sentences, 2);
    }

    #[test]
    fn sentinel_is_one_token_and_not_a_word() {
        let t = TokenizedText::new("⟦URL⟧", "", &stopwords());
        assert_eq!(t.tokens, vec!["⟦URL⟧"]);
        assert_eq!(t.word_count(), 0);
    }

    #[test]
    fn content_tokens_exclude_stopwords_and_sentinels() {
        let t = TokenizedText::new("the cat saw ⟦QUOTE⟧ a dog", "", &stopwords());
        assert_eq!(t.content_tokens, vec!["cat", "saw", "dog"]);
        assert_eq!(t.word_count(), 5);
    }

    #[test]
    fn syllable_heuristics() {
        assert_eq!(count_syllables("cat"), 1);
        assert_eq!(count_syllables("make"), 1);
        assert_eq!(count_syllables("happy"), 2);
        assert_eq!(count_syllables("syllable"), 3);
        assert_eq!(count_syllables("b"), 1);
    }
}
