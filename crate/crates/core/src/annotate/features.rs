//! TF/IDF term vectors.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::lexicon::Lexicon;
use super::text::{stem, tokenize};
use super::AnnotateError;
use crate::framework::{Annotator, Outcome, RoutineError};
use crate::store::{Blackboard, Item, PrivateStore, Query, StoreError, Tag};

/// Key of the IDF table in the feature extractor's private store.
pub const IDF_KEY: &str = "idf";

/// Sparse term vector stored as the `features` annotation.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    /// TF/IDF weight per stemmed term.
    pub weights: BTreeMap<String, f64>,
    /// Raw count per stemmed term.
    pub tf: BTreeMap<String, u32>,
    /// Tokens remaining after stopword removal.
    pub token_count: usize,
}

impl FeatureVector {
    pub fn is_empty(&self) -> bool {
        self.token_count == 0
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("feature vectors serialize")
    }

    pub fn from_value(v: &Value) -> Result<Self, AnnotateError> {
        serde_json::from_value(v.clone())
            .map_err(|e| AnnotateError::InvalidResource(format!("bad `features` annotation: {e}")))
    }

    /// Read the `features` annotation of an item.
    pub fn of_item(item: &Item) -> Result<Self, AnnotateError> {
        item.annotations
            .get("features")
            .ok_or(AnnotateError::MissingFeatures)
            .and_then(Self::from_value)
    }

    /// Weight vector from plain term weights (tf left empty); handy for models and tests.
    pub fn from_weights<I, S>(weights: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        FeatureVector {
            weights: weights.into_iter().map(|(k, v)| (k.into(), v)).collect(),
            ..Self::default()
        }
    }
}

/// Document frequencies over a corpus.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IdfTable {
    pub docs: usize,
    pub df: BTreeMap<String, usize>,
}

impl IdfTable {
    /// `ln(N / (1 + df)) + 1`. Without any documents every term weighs 1.
    pub fn idf(&self, term: &str) -> f64 {
        if self.docs == 0 {
            return 1.0;
        }
        let df = self.df.get(term).copied().unwrap_or(0);
        (self.docs as f64 / (1 + df) as f64).ln() + 1.0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("idf tables serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, AnnotateError> {
        serde_json::from_str(s).map_err(|e| AnnotateError::InvalidResource(format!("bad idf table: {e}")))
    }
}

/// Tokenize, drop stopwords, stem.
pub fn analyze(content: &str, stopwords: &Lexicon) -> Vec<String> {
    tokenize(content)
        .into_iter()
        .filter(|t| !stopwords.contains(t))
        .map(|t| stem(&t))
        .collect()
}

pub fn extract_features(
    content: &str,
    stopwords: &Lexicon,
    idf: &IdfTable,
) -> Result<FeatureVector, AnnotateError> {
    let terms = analyze(content, stopwords);
    if terms.is_empty() {
        return Err(AnnotateError::EmptyAfterFiltering);
    }
    let mut tf: BTreeMap<String, u32> = BTreeMap::new();
    for t in &terms {
        *tf.entry(t.clone()).or_insert(0) += 1;
    }
    let weights = tf
        .iter()
        .map(|(t, &n)| (t.clone(), n as f64 * idf.idf(t)))
        .collect();
    Ok(FeatureVector {
        weights,
        tf,
        token_count: terms.len(),
    })
}

pub fn build_idf<'a>(docs: impl IntoIterator<Item = &'a str>, stopwords: &Lexicon) -> IdfTable {
    let mut table = IdfTable::default();
    for doc in docs {
        table.docs += 1;
        let distinct: BTreeSet<String> = analyze(doc, stopwords).into_iter().collect();
        for t in distinct {
            *table.df.entry(t).or_insert(0) += 1;
        }
    }
    table
}

/// Maintenance pass: recompute the IDF table from every item with content
/// and store it in the given private store. Returns the number of documents.
pub fn rebuild_idf(
    board: &Blackboard,
    stopwords: &Lexicon,
    state: &PrivateStore,
) -> Result<usize, StoreError> {
    let items = board.query_items(&Query::all().require_field("content"))?;
    let table = build_idf(items.iter().filter_map(|i| i.field_str("content")), stopwords);
    state.put(IDF_KEY, table.to_json())?;
    Ok(table.docs)
}

/// The feature-extractor module. Besides its static emit tags it adds one
/// `FOR>TopicTagger:<topic>` per configured topic, unless the vector is empty.
pub struct FeatureExtractor {
    pub stopwords: Lexicon,
    pub topics: Vec<String>,
}

impl Annotator for FeatureExtractor {
    fn annotate(&self, item: &Item, state: &PrivateStore) -> Result<Outcome, RoutineError> {
        let content = item
            .field_str("content")
            .ok_or_else(|| RoutineError::new("item has no `content` field"))?;
        let idf = match state.get(IDF_KEY) {
            Some(s) => IdfTable::from_json(&s).map_err(|e| RoutineError::new(e.to_string()))?,
            None => IdfTable::default(),
        };
        let mut out = Outcome::new();
        match extract_features(content, &self.stopwords, &idf) {
            Ok(fv) => {
                out.annotations.insert("features".into(), fv.to_value());
                for topic in &self.topics {
                    let t = Tag::control(&format!("TopicTagger:{topic}"))
                        .map_err(|e| RoutineError::new(e.to_string()))?;
                    out.add_tags.insert(t);
                }
            }
            Err(AnnotateError::EmptyAfterFiltering) => {
                out.annotations
                    .insert("features".into(), FeatureVector::default().to_value());
                out.add_tags.insert(Tag::new("features.empty").unwrap());
            }
            Err(e) => return Err(RoutineError::new(e.to_string())),
        }
        Ok(out)
    }
}
