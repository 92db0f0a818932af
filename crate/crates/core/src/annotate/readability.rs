//! Flesch Reading Ease.

use serde_json::Value;

use super::AnnotateError;
use crate::framework::{Annotator, Outcome, RoutineError};
use crate::store::{Item, PrivateStore, Tag};

/// Words are maximal runs of letters, with inner apostrophes allowed ("don't").
pub fn words(text: &str) -> Vec<&str> {
    text.split(|c: char| !(c.is_alphabetic() || c == '\'' || c == '\u{2019}'))
        .map(|w| w.trim_matches(|c| c == '\'' || c == '\u{2019}'))
        .filter(|w| w.chars().any(char::is_alphabetic))
        .collect()
}

/// Sentences end at `.`, `!` or `?` followed by whitespace or the end of the
/// text. Trailing words without a terminator form one more sentence.
pub fn count_sentences(text: &str) -> usize {
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = 0;
    let mut words_since_break = false;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_alphabetic() {
            words_since_break = true;
        }
        if matches!(c, '.' | '!' | '?') {
            // a run like "?!" or "..." ends one sentence
            let mut j = i;
            while j + 1 < chars.len() && matches!(chars[j + 1], '.' | '!' | '?') {
                j += 1;
            }
            let at_boundary = j + 1 == chars.len() || chars[j + 1].is_whitespace();
            if at_boundary && words_since_break {
                sentences += 1;
                words_since_break = false;
            }
            i = j;
        }
        i += 1;
    }
    if words_since_break {
        sentences += 1;
    }
    sentences
}

/// Vowel groups after dropping one trailing `e`; at least 1.
pub fn count_syllables(word: &str) -> usize {
    let lower = word.to_lowercase();
    let stripped = lower.strip_suffix('e').unwrap_or(&lower);
    let mut groups = 0;
    let mut in_vowel = false;
    for c in stripped.chars() {
        let vowel = matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
        if vowel && !in_vowel {
            groups += 1;
        }
        in_vowel = vowel;
    }
    groups.max(1)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TextStats {
    pub words: usize,
    pub sentences: usize,
    pub syllables: usize,
}

pub fn text_stats(text: &str) -> TextStats {
    let ws = words(text);
    TextStats {
        words: ws.len(),
        sentences: count_sentences(text),
        syllables: ws.iter().map(|w| count_syllables(w)).sum(),
    }
}

/// `206.835 − 1.015·(words/sentences) − 84.6·(syllables/words)`.
pub fn flesch(stats: TextStats) -> Result<f64, AnnotateError> {
    if stats.words == 0 || stats.sentences == 0 {
        return Err(AnnotateError::NoSentences);
    }
    let wps = stats.words as f64 / stats.sentences as f64;
    let spw = stats.syllables as f64 / stats.words as f64;
    Ok(206.835 - 1.015 * wps - 84.6 * spw)
}

pub fn readability(content: &str) -> Result<f64, AnnotateError> {
    flesch(text_stats(content))
}

/// Writes annotation `readability`, or tags `readability.undefined`.
pub struct ReadabilityAnnotator;

impl Annotator for ReadabilityAnnotator {
    fn annotate(&self, item: &Item, _: &PrivateStore) -> Result<Outcome, RoutineError> {
        let content = item
            .field_str("content")
            .ok_or_else(|| RoutineError::new("item has no `content` field"))?;
        Ok(match readability(content) {
            Ok(score) => Outcome::new().annotate("readability", Value::from(score)),
            Err(_) => Outcome::new().tag(Tag::new("readability.undefined").unwrap()),
        })
    }
}
