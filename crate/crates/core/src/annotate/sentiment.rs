use serde_json::Value;

use super::lexicon::Lexicon;
use super::text::tokenize;
use crate::framework::{Annotator, Outcome, RoutineError};
use crate::store::{Item, PrivateStore};

/// Adjectives carrying sentiment divided by all adjectives (0 when there are none).
///
/// Adjectives are recognised by lexicon lookup. Sentiment adjectives count as
/// adjectives even when the general list misses them, so the ratio stays in [0, 1].
pub fn sentiment_subjectivity(
    content: &str,
    sentiment_adjectives: &Lexicon,
    all_adjectives: &Lexicon,
) -> (f64, usize) {
    let mut sentiment = 0usize;
    let mut adjectives = 0usize;
    for token in tokenize(content) {
        let is_sentiment = sentiment_adjectives.contains(&token);
        if is_sentiment {
            sentiment += 1;
        }
        if is_sentiment || all_adjectives.contains(&token) {
            adjectives += 1;
        }
    }
    let subjectivity = if adjectives == 0 {
        0.0
    } else {
        sentiment as f64 / adjectives as f64
    };
    (subjectivity, sentiment)
}

pub struct SentimentExtractor {
    pub sentiment_adjectives: Lexicon,
    pub all_adjectives: Lexicon,
}

impl Annotator for SentimentExtractor {
    fn annotate(&self, item: &Item, _: &PrivateStore) -> Result<Outcome, RoutineError> {
        let content = item
            .field_str("content")
            .ok_or_else(|| RoutineError::new("item has no `content` field"))?;
        let (subjectivity, count) =
            sentiment_subjectivity(content, &self.sentiment_adjectives, &self.all_adjectives);
        Ok(Outcome::new()
            .annotate("subjectivity", Value::from(subjectivity))
            .annotate("sentiment.count", Value::from(count as u64)))
    }
}
