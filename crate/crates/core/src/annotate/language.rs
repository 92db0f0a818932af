use std::collections::{BTreeMap, BTreeSet};

use serde_json::Value;

use super::lexicon::Lexicon;
use super::text::tokenize;
use super::AnnotateError;
use crate::framework::{Annotator, Outcome, RoutineError};
use crate::store::{Item, PrivateStore, Tag};

/// Stopword lists keyed by language code.
pub type LanguageProfiles = BTreeMap<String, Lexicon>;

/// Share of tokens that are stopwords of each language.
pub fn language_scores(content: &str, profiles: &LanguageProfiles) -> BTreeMap<String, f64> {
    let tokens = tokenize(content);
    profiles
        .iter()
        .map(|(code, lex)| {
            let hits = tokens.iter().filter(|t| lex.contains(t)).count();
            let score = if tokens.is_empty() {
                0.0
            } else {
                hits as f64 / tokens.len() as f64
            };
            (code.clone(), score)
        })
        .collect()
}

/// The language whose stopwords make up the largest share of the text.
/// Ties go to the lexicographically smallest code.
pub fn detect_language(content: &str, profiles: &LanguageProfiles) -> Result<String, AnnotateError> {
    if profiles.len() < 2 {
        return Err(AnnotateError::InvalidResource(
            "language detection needs at least two profiles".into(),
        ));
    }
    let mut best: Option<(&String, f64)> = None;
    let scores = language_scores(content, profiles);
    // BTreeMap iteration is sorted by code, so strict `>` keeps the smallest on ties
    for (code, score) in &scores {
        if best.is_none_or(|(_, b)| *score > b) {
            best = Some((code, *score));
        }
    }
    match best {
        Some((code, score)) if score > 0.0 => Ok(code.clone()),
        _ => Err(AnnotateError::Undetermined),
    }
}

/// Writes annotation `lang` and the language code as a tag; `lang.unknown` when undetermined.
/// `forward` maps a detected code to extra tags, e.g. `en` → `FOR>FeatureExtractor`.
pub struct LanguageDetector {
    pub profiles: LanguageProfiles,
    pub forward: BTreeMap<String, BTreeSet<Tag>>,
}

impl Annotator for LanguageDetector {
    fn annotate(&self, item: &Item, _: &PrivateStore) -> Result<Outcome, RoutineError> {
        let content = item
            .field_str("content")
            .ok_or_else(|| RoutineError::new("item has no `content` field"))?;
        let mut out = Outcome::new();
        match detect_language(content, &self.profiles) {
            Ok(code) => {
                out.add_tags.insert(Tag::new(code.clone()).map_err(|e| RoutineError::new(e.to_string()))?);
                if let Some(extra) = self.forward.get(&code) {
                    out.add_tags.extend(extra.iter().cloned());
                }
                out.annotations.insert("lang".into(), Value::from(code));
            }
            Err(AnnotateError::Undetermined) => {
                out.add_tags.insert(Tag::new("lang.unknown").unwrap());
            }
            Err(e) => return Err(RoutineError::new(e.to_string())),
        }
        Ok(out)
    }
}
