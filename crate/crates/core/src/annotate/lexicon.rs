use std::collections::BTreeMap;
use std::path::Path;

use super::AnnotateError;

/// A named weighted word list: moods, sentiment adjectives, stopwords, language profiles.
#[derive(Clone, Debug, PartialEq)]
pub struct Lexicon {
    pub name: String,
    pub entries: BTreeMap<String, f64>,
}

impl Lexicon {
    /// Build from `(word, weight)` pairs. Words are lowercased.
    pub fn new<I, S>(name: &str, entries: I) -> Result<Self, AnnotateError>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: AsRef<str>,
    {
        let entries: BTreeMap<String, f64> = entries
            .into_iter()
            .map(|(w, v)| (w.as_ref().to_lowercase(), v))
            .collect();
        if entries.is_empty() {
            return Err(AnnotateError::InvalidResource(format!("lexicon `{name}` is empty")));
        }
        Ok(Lexicon {
            name: name.to_string(),
            entries,
        })
    }

    /// A lexicon where every word weighs 1.0.
    pub fn from_words<I, S>(name: &str, words: I) -> Result<Self, AnnotateError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self::new(name, words.into_iter().map(|w| (w, 1.0)))
    }

    /// Parse `word<TAB>weight` lines; the weight column is optional.
    pub fn parse(name: &str, text: &str) -> Result<Self, AnnotateError> {
        let mut entries = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            let word = cols.next().unwrap_or_default().trim();
            let weight = match cols.next().map(str::trim) {
                None | Some("") => 1.0,
                Some(w) => w.parse::<f64>().ok().filter(|w| w.is_finite()).ok_or_else(|| {
                    AnnotateError::Parse {
                        source_name: name.to_string(),
                        line: idx + 1,
                        message: format!("bad weight `{w}`"),
                    }
                })?,
            };
            if word.is_empty() || word.chars().any(char::is_whitespace) {
                return Err(AnnotateError::Parse {
                    source_name: name.to_string(),
                    line: idx + 1,
                    message: "expected a single word".into(),
                });
            }
            entries.push((word.to_string(), weight));
        }
        Self::new(name, entries)
    }

    pub fn load(name: &str, path: &Path) -> Result<Self, AnnotateError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AnnotateError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(name, &text)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    pub fn weight(&self, word: &str) -> Option<f64> {
        self.entries.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The same lexicon with each word mapped through `f`; colliding words sum their weights.
    pub fn map_words(&self, f: impl Fn(&str) -> String) -> Lexicon {
        let mut entries = BTreeMap::new();
        for (w, v) in &self.entries {
            *entries.entry(f(w)).or_insert(0.0) += v;
        }
        Lexicon {
            name: self.name.clone(),
            entries,
        }
    }
}
