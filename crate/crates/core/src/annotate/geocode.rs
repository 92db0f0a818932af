//! Place-name spotting with disambiguation of shared names.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::AnnotateError;
use crate::framework::{Annotator, Outcome, RoutineError};
use crate::store::{Item, PrivateStore};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GazetteerEntry {
    pub name: String,
    pub lat: f64,
    pub lon: f64,
    pub population: u64,
    pub region: String,
}

/// A resolved mention.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub name: String,
    pub lat: f64,
    pub lon: f64,
    pub region: String,
}

impl From<&GazetteerEntry> for Location {
    fn from(e: &GazetteerEntry) -> Self {
        Location {
            name: e.name.clone(),
            lat: e.lat,
            lon: e.lon,
            region: e.region.clone(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Gazetteer {
    entries: Vec<GazetteerEntry>,
    /// Lowercased name word sequence → entry indices.
    by_name: BTreeMap<Vec<String>, Vec<usize>>,
    longest: usize,
}

fn name_words(s: &str) -> Vec<String> {
    s.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

impl Gazetteer {
    pub fn new(entries: Vec<GazetteerEntry>) -> Result<Self, AnnotateError> {
        let mut seen = BTreeSet::new();
        let mut g = Gazetteer::default();
        for (i, e) in entries.iter().enumerate() {
            if !seen.insert((e.name.clone(), e.region.clone())) {
                return Err(AnnotateError::InvalidResource(format!(
                    "gazetteer lists {} / {} twice",
                    e.name, e.region
                )));
            }
            let key = name_words(&e.name);
            if key.is_empty() {
                return Err(AnnotateError::InvalidResource(format!("unusable place name `{}`", e.name)));
            }
            g.longest = g.longest.max(key.len());
            g.by_name.entry(key).or_default().push(i);
        }
        g.entries = entries;
        Ok(g)
    }

    /// Parse `name<TAB>lat<TAB>lon<TAB>population<TAB>region` lines.
    pub fn parse(text: &str) -> Result<Self, AnnotateError> {
        let mut entries = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |m: &str| AnnotateError::Parse {
                source_name: "gazetteer".into(),
                line: idx + 1,
                message: m.to_string(),
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 5 {
                return Err(err("expected 5 tab-separated columns"));
            }
            entries.push(GazetteerEntry {
                name: cols[0].trim().to_string(),
                lat: cols[1].trim().parse().map_err(|_| err("bad latitude"))?,
                lon: cols[2].trim().parse().map_err(|_| err("bad longitude"))?,
                population: cols[3].trim().parse().map_err(|_| err("bad population"))?,
                region: cols[4].trim().to_string(),
            });
        }
        Self::new(entries)
    }

    pub fn load(path: &Path) -> Result<Self, AnnotateError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AnnotateError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn entries(&self) -> &[GazetteerEntry] {
        &self.entries
    }

    /// Case-insensitive longest-match scan. Returns, in text order, the
    /// candidate entry indices of every distinct name mentioned.
    fn mentions(&self, content: &str) -> Vec<&[usize]> {
        let words = name_words(content);
        let mut found: Vec<&[usize]> = Vec::new();
        let mut seen: BTreeSet<&Vec<String>> = BTreeSet::new();
        let mut i = 0;
        while i < words.len() {
            let mut matched = 0;
            for len in (1..=self.longest.min(words.len() - i)).rev() {
                if let Some((key, idx)) = self.by_name.get_key_value(&words[i..i + len]) {
                    if seen.insert(key) {
                        found.push(idx);
                    }
                    matched = len;
                    break;
                }
            }
            i += matched.max(1);
        }
        found
    }
}

/// Resolve place mentions. A shared name goes to the candidate in a region
/// that some unambiguous mention in the same text also belongs to; failing
/// that, to the most populous candidate.
pub fn geocode(content: &str, gazetteer: &Gazetteer) -> Vec<Location> {
    let mentions = gazetteer.mentions(content);
    let context: BTreeSet<&str> = mentions
        .iter()
        .filter(|c| c.len() == 1)
        .map(|c| gazetteer.entries[c[0]].region.as_str())
        .collect();
    let by_population = |a: &&GazetteerEntry, b: &&GazetteerEntry| {
        a.population
            .cmp(&b.population)
            // equal populations: prefer the alphabetically first region
            .then_with(|| b.region.cmp(&a.region))
    };
    mentions
        .iter()
        .map(|cands| {
            let entries: Vec<&GazetteerEntry> = cands.iter().map(|&i| &gazetteer.entries[i]).collect();
            let co_regional: Vec<&GazetteerEntry> = entries
                .iter()
                .copied()
                .filter(|e| context.contains(e.region.as_str()))
                .collect();
            let pool = if entries.len() > 1 && !co_regional.is_empty() {
                co_regional
            } else {
                entries
            };
            Location::from(pool.into_iter().max_by(by_population).expect("non-empty candidate list"))
        })
        .collect()
}

/// Writes the `locations` annotation.
pub struct Geocoder {
    pub gazetteer: Gazetteer,
}

impl Annotator for Geocoder {
    fn annotate(&self, item: &Item, _: &PrivateStore) -> Result<Outcome, RoutineError> {
        let content = item
            .field_str("content")
            .ok_or_else(|| RoutineError::new("item has no `content` field"))?;
        let locs = geocode(content, &self.gazetteer);
        let value = serde_json::to_value(&locs).expect("locations serialize");
        Ok(Outcome::new().annotate("locations", value))
    }
}

pub fn locations_of(v: &Value) -> Vec<Location> {
    serde_json::from_value(v.clone()).unwrap_or_default()
}
