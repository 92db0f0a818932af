//! Pairwise online ranking for article popularity.
//!
//! Each training pair holds an article that became popular and one that did
//! not, from the same outlet and day. The learner is a ranking perceptron: on a
//! misordered pair it moves the weights toward the popular article's features.

use serde_json::Value;

use super::features::FeatureVector;
use super::topic::LinearModel;
use super::AnnotateError;
use crate::framework::{Annotator, Outcome, RoutineError};
use crate::store::{Item, PrivateStore, StoreError};

/// Key of the trained model in the popularity module's private store.
pub const MODEL_KEY: &str = "model";

pub const DEFAULT_LEARNING_RATE: f64 = 0.1;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingPair {
    pub popular: FeatureVector,
    pub unpopular: FeatureVector,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainingConfig {
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            learning_rate: DEFAULT_LEARNING_RATE,
            epochs: 1,
        }
    }
}

/// Train from zero weights, visiting pairs in the given order each epoch.
pub fn popularity_train(pairs: &[TrainingPair], config: TrainingConfig) -> Result<LinearModel, AnnotateError> {
    let mut model = LinearModel::new("popularity");
    popularity_update(&mut model, pairs, config)?;
    Ok(model)
}

/// Continue training an existing model.
pub fn popularity_update(
    model: &mut LinearModel,
    pairs: &[TrainingPair],
    config: TrainingConfig,
) -> Result<usize, AnnotateError> {
    if pairs.is_empty() {
        return Err(AnnotateError::EmptyTrainingSet);
    }
    let mut updates = 0;
    for _ in 0..config.epochs {
        for pair in pairs {
            if model.score(&pair.popular) <= model.score(&pair.unpopular) {
                for (t, x) in &pair.popular.weights {
                    *model.weights.entry(t.clone()).or_insert(0.0) += config.learning_rate * x;
                }
                for (t, x) in &pair.unpopular.weights {
                    *model.weights.entry(t.clone()).or_insert(0.0) -= config.learning_rate * x;
                }
                updates += 1;
            }
        }
    }
    Ok(updates)
}

/// Persist a trained model where the popularity module will find it.
pub fn store_model(state: &PrivateStore, model: &LinearModel) -> Result<(), StoreError> {
    state.put(MODEL_KEY, model.to_text())
}

pub fn popularity_score(fv: &FeatureVector, model: &LinearModel) -> f64 {
    model.score(fv)
}

/// Writes annotation `popularity`. The model comes from the module's private
/// store, falling back to one supplied at construction.
pub struct PopularityRanker {
    pub fallback: Option<LinearModel>,
}

impl Annotator for PopularityRanker {
    fn annotate(&self, item: &Item, state: &PrivateStore) -> Result<Outcome, RoutineError> {
        let model = match state.get(MODEL_KEY) {
            Some(text) => LinearModel::parse("popularity", &text).map_err(|e| RoutineError::new(e.to_string()))?,
            None => self
                .fallback
                .clone()
                .ok_or_else(|| RoutineError::new(AnnotateError::MissingModel.to_string()))?,
        };
        let fv = FeatureVector::of_item(item).map_err(|e| RoutineError::new(e.to_string()))?;
        Ok(Outcome::new().annotate("popularity", Value::from(popularity_score(&fv, &model))))
    }
}
