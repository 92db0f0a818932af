use serde_json::Value;

use super::features::FeatureVector;
use super::lexicon::Lexicon;
use super::text::normalize_term;
use super::AnnotateError;
use crate::framework::{Annotator, Outcome, RoutineError};
use crate::store::{Item, PrivateStore, Tag};

pub const MOODS: [&str; 4] = ["joy", "anger", "fear", "sadness"];

/// The four mood word lists, already mapped into stemmed term space.
#[derive(Clone, Debug)]
pub struct MoodLexicons {
    stemmed: [Lexicon; 4],
}

impl MoodLexicons {
    pub fn new(joy: Lexicon, anger: Lexicon, fear: Lexicon, sadness: Lexicon) -> Self {
        MoodLexicons {
            stemmed: [joy, anger, fear, sadness].map(|l| l.map_words(normalize_term)),
        }
    }

    /// Same lexicons with every weight multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        MoodLexicons {
            stemmed: self.stemmed.clone().map(|mut l| {
                l.entries.values_mut().for_each(|w| *w *= k);
                l
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoodScore {
    pub mood: &'static str,
    /// Inner product divided by the document's token count.
    pub score: f64,
    /// Plain inner product of raw term counts with the lexicon.
    pub raw: f64,
}

/// Normalized inner product of the raw term counts with each mood lexicon.
/// Always returns all four moods, in the order of [`MOODS`].
pub fn mood_scores(fv: &FeatureVector, lexicons: &MoodLexicons) -> Result<[MoodScore; 4], AnnotateError> {
    let mut out = [0usize, 1, 2, 3].map(|i| MoodScore {
        mood: MOODS[i],
        score: 0.0,
        raw: 0.0,
    });
    if fv.token_count == 0 {
        return Err(AnnotateError::ZeroLengthDocument);
    }
    for (slot, lex) in out.iter_mut().zip(&lexicons.stemmed) {
        slot.raw = fv
            .tf
            .iter()
            .filter_map(|(term, &n)| lex.weight(term).map(|w| n as f64 * w))
            .fold(0.0, |a, b| a + b);
        slot.score = slot.raw / fv.token_count as f64;
    }
    Ok(out)
}

/// First mood with the highest positive score.
pub fn dominant_mood(scores: &[MoodScore; 4]) -> Option<&'static str> {
    let mut best: Option<&MoodScore> = None;
    for s in scores {
        if s.score > 0.0 && best.is_none_or(|b| s.score > b.score) {
            best = Some(s);
        }
    }
    best.map(|s| s.mood)
}

/// Writes `mood.<m>` and `mood.<m>.raw` for all four moods and tags `mood:<m>` for the dominant one.
pub struct MoodDetector {
    pub lexicons: MoodLexicons,
}

impl Annotator for MoodDetector {
    fn annotate(&self, item: &Item, _: &PrivateStore) -> Result<Outcome, RoutineError> {
        let fv = FeatureVector::of_item(item).map_err(|e| RoutineError::new(e.to_string()))?;
        let scores = match mood_scores(&fv, &self.lexicons) {
            Ok(s) => s,
            Err(AnnotateError::ZeroLengthDocument) => MOODS.map(|mood| MoodScore {
                mood,
                score: 0.0,
                raw: 0.0,
            }),
            Err(e) => return Err(RoutineError::new(e.to_string())),
        };
        let mut out = Outcome::new();
        for s in &scores {
            out.annotations
                .insert(format!("mood.{}", s.mood), Value::from(s.score));
            out.annotations
                .insert(format!("mood.{}.raw", s.mood), Value::from(s.raw));
        }
        if let Some(m) = dominant_mood(&scores) {
            out.add_tags.insert(Tag::new(format!("mood:{m}")).unwrap());
        }
        Ok(out)
    }
}
