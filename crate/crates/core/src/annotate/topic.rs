use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde_json::Value;

use super::features::FeatureVector;
use super::text::normalize_term;
use super::AnnotateError;
use crate::framework::{Annotator, Outcome, RoutineError};
use crate::store::{Item, PrivateStore, Tag};

/// Sparse linear scorer: `Σ w(term)·x(term) + bias`, positive when `≥ threshold`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearModel {
    pub name: String,
    pub weights: BTreeMap<String, f64>,
    pub bias: f64,
    pub threshold: f64,
}

impl LinearModel {
    pub fn new(name: &str) -> Self {
        LinearModel {
            name: name.to_string(),
            ..Self::default()
        }
    }

    pub fn score(&self, fv: &FeatureVector) -> f64 {
        self.dot(&fv.weights) + self.bias
    }

    pub fn dot(&self, x: &BTreeMap<String, f64>) -> f64 {
        // iterate the smaller side; fold from +0.0 so an empty overlap is not -0.0
        if x.len() < self.weights.len() {
            x.iter()
                .filter_map(|(t, v)| self.weights.get(t).map(|w| w * v))
                .fold(0.0, |a, b| a + b)
        } else {
            self.weights
                .iter()
                .filter_map(|(t, w)| x.get(t).map(|v| w * v))
                .fold(0.0, |a, b| a + b)
        }
    }

    pub fn decide(&self, fv: &FeatureVector) -> (f64, bool) {
        let s = self.score(fv);
        (s, s >= self.threshold)
    }

    /// Map plain dictionary words onto stemmed feature terms.
    pub fn stemmed(&self) -> LinearModel {
        let mut weights = BTreeMap::new();
        for (t, w) in &self.weights {
            *weights.entry(normalize_term(t)).or_insert(0.0) += w;
        }
        LinearModel {
            weights,
            ..self.clone()
        }
    }

    /// Parse `term<TAB>weight` lines with `#bias <real>` and `#threshold <real>` headers.
    pub fn parse(name: &str, text: &str) -> Result<Self, AnnotateError> {
        let mut model = LinearModel::new(name);
        let err = |line: usize, message: String| AnnotateError::Parse {
            source_name: name.to_string(),
            line,
            message,
        };
        let real = |line: usize, s: &str| -> Result<f64, AnnotateError> {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(line, format!("expected a finite number, got `{}`", s.trim())))
        };
        for (idx, line) in text.lines().enumerate() {
            let n = idx + 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("#bias") {
                model.bias = real(n, rest)?;
            } else if let Some(rest) = line.strip_prefix("#threshold") {
                model.threshold = real(n, rest)?;
            } else if line.starts_with('#') {
                continue;
            } else {
                let (term, weight) = line
                    .split_once('\t')
                    .ok_or_else(|| err(n, "expected `term<TAB>weight`".into()))?;
                model.weights.insert(term.trim().to_string(), real(n, weight)?);
            }
        }
        Ok(model)
    }

    pub fn load(name: &str, path: &Path) -> Result<Self, AnnotateError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AnnotateError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(name, &text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "#bias {}", self.bias).unwrap();
        writeln!(out, "#threshold {}", self.threshold).unwrap();
        for (t, w) in &self.weights {
            writeln!(out, "{t}\t{w}").unwrap();
        }
        out
    }
}

/// One binary topic detector. Writes `topic.<Topic>` with the score and, when
/// positive, the plain topic tag plus any configured downstream triggers.
pub struct TopicTagger {
    pub topic: String,
    pub model: LinearModel,
    pub triggers: BTreeSet<Tag>,
}

impl TopicTagger {
    pub fn topic_tag(&self) -> Result<Tag, RoutineError> {
        Tag::new(self.topic.clone()).map_err(|e| RoutineError::new(e.to_string()))
    }
}

impl Annotator for TopicTagger {
    fn annotate(&self, item: &Item, _: &PrivateStore) -> Result<Outcome, RoutineError> {
        let fv = FeatureVector::of_item(item).map_err(|e| RoutineError::new(e.to_string()))?;
        let (score, positive) = self.model.decide(&fv);
        let mut out = Outcome::new().annotate(format!("topic.{}", self.topic), Value::from(score));
        if positive {
            out.add_tags.insert(self.topic_tag()?);
            out.add_tags.extend(self.triggers.iter().cloned());
        }
        Ok(out)
    }
}
