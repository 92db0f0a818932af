//! Build a module's routine from its settings.
//!
//! `params.routine` names the routine; the other `params.*` keys configure
//! it. Resource paths are relative to the directory of the settings file.
//!
//! | routine          | params                                                     |
//! |------------------|------------------------------------------------------------|
//! | `scraper`        |                                                            |
//! | `translator`     |                                                            |
//! | `feedfinder`     |                                                            |
//! | `language`       | `profiles = en:stop_en.txt, fr:stop_fr.txt`, `forward`     |
//! | `features`       | `stopwords`, `topics`                                      |
//! | `mood`           | `joy`, `anger`, `fear`, `sadness`                          |
//! | `sentiment`      | `sentiment`, `adjectives`                                  |
//! | `readability`    |                                                            |
//! | `topic`          | `topic`, `model`, `model_terms = words \| stems`, `triggers` |
//! | `geocoder`       | `gazetteer`                                                |
//! | `popularity`     | `model` (optional), `model_terms`                          |
//! | `report.topics`  |                                                            |
//! | `report.moods`   |                                                            |
//! | `report.outlets` | `outlets` (optional list of known outlet ids)              |

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use crate::annotate::{
    FeatureExtractor, Gazetteer, Geocoder, LanguageDetector, Lexicon, LinearModel, MoodDetector, MoodLexicons,
    PopularityRanker, ReadabilityAnnotator, SentimentExtractor, TopicTagger,
};
use crate::framework::{load_spec, ModuleSpec, Routine};
use crate::ingest::{FeedFinder, Scraper, Translator};
use crate::reports::{MoodReporter, OutletReporter, TopicReporter};
use crate::store::Tag;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("module `{module}`: {message}")]
pub struct CatalogError {
    pub module: String,
    pub message: String,
}

pub const ROUTINES: [&str; 14] = [
    "scraper",
    "translator",
    "feedfinder",
    "language",
    "features",
    "mood",
    "sentiment",
    "readability",
    "topic",
    "geocoder",
    "popularity",
    "report.topics",
    "report.moods",
    "report.outlets",
];

struct Params<'a> {
    spec: &'a ModuleSpec,
    base: &'a Path,
}

impl Params<'_> {
    fn err(&self, message: impl Into<String>) -> CatalogError {
        CatalogError {
            module: self.spec.name.clone(),
            message: message.into(),
        }
    }

    fn get(&self, key: &str) -> Result<&str, CatalogError> {
        self.spec
            .params
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| self.err(format!("missing `params.{key}`")))
    }

    fn path(&self, key: &str) -> Result<PathBuf, CatalogError> {
        Ok(self.base.join(self.get(key)?))
    }

    fn lexicon(&self, key: &str) -> Result<Lexicon, CatalogError> {
        Lexicon::load(key, &self.path(key)?).map_err(|e| self.err(e.to_string()))
    }

    fn tags(&self, key: &str) -> Result<BTreeSet<Tag>, CatalogError> {
        crate::store::tags(self.spec.param_list(key)).map_err(|e| self.err(e.to_string()))
    }

    /// `a:x, b:y` style lists.
    fn pairs(&self, key: &str) -> Result<Vec<(String, String)>, CatalogError> {
        self.spec
            .param_list(key)
            .into_iter()
            .map(|p| {
                p.split_once(':')
                    .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
                    .ok_or_else(|| self.err(format!("`params.{key}` entry `{p}` is not `key:value`")))
            })
            .collect()
    }

    fn model(&self, name: &str) -> Result<LinearModel, CatalogError> {
        let m = LinearModel::load(name, &self.path("model")?).map_err(|e| self.err(e.to_string()))?;
        match self.spec.params.get("model_terms").map(String::as_str).unwrap_or("words") {
            "words" => Ok(m.stemmed()),
            "stems" => Ok(m),
            other => Err(self.err(format!("`params.model_terms` must be words or stems, got `{other}`"))),
        }
    }
}

/// Build the routine named by `spec.params.routine`. `base` is the directory
/// that resource paths are relative to.
pub fn build_routine(spec: &ModuleSpec, base: &Path) -> Result<Routine, CatalogError> {
    let p = Params { spec, base };
    let kind = p.get("routine")?;
    Ok(match kind {
        "scraper" => Routine::input(Scraper::default()),
        "translator" => Routine::input(Translator),
        "feedfinder" => Routine::input(FeedFinder),
        "language" => {
            let mut profiles = BTreeMap::new();
            for (code, file) in p.pairs("profiles")? {
                let lex = Lexicon::load(&code, &base.join(&file)).map_err(|e| p.err(e.to_string()))?;
                profiles.insert(code, lex);
            }
            if profiles.len() < 2 {
                return Err(p.err("language detection needs at least two `params.profiles`"));
            }
            let mut forward: BTreeMap<String, BTreeSet<Tag>> = BTreeMap::new();
            for (code, tag) in p.pairs("forward")? {
                forward
                    .entry(code)
                    .or_default()
                    .insert(Tag::new(tag).map_err(|e| p.err(e.to_string()))?);
            }
            Routine::analysis(LanguageDetector { profiles, forward })
        }
        "features" => Routine::analysis(FeatureExtractor {
            stopwords: p.lexicon("stopwords")?,
            topics: spec.param_list("topics").into_iter().collect(),
        }),
        "mood" => Routine::analysis(MoodDetector {
            lexicons: MoodLexicons::new(p.lexicon("joy")?, p.lexicon("anger")?, p.lexicon("fear")?, p.lexicon("sadness")?),
        }),
        "sentiment" => Routine::analysis(SentimentExtractor {
            sentiment_adjectives: p.lexicon("sentiment")?,
            all_adjectives: p.lexicon("adjectives")?,
        }),
        "readability" => Routine::analysis(ReadabilityAnnotator),
        "topic" => {
            let topic = p.get("topic")?.to_string();
            Tag::new(topic.clone()).map_err(|e| p.err(e.to_string()))?;
            Routine::analysis(TopicTagger {
                model: p.model(&topic)?,
                topic,
                triggers: p.tags("triggers")?,
            })
        }
        "geocoder" => Routine::analysis(Geocoder {
            gazetteer: Gazetteer::load(&p.path("gazetteer")?).map_err(|e| p.err(e.to_string()))?,
        }),
        "popularity" => Routine::analysis(PopularityRanker {
            fallback: if spec.params.contains_key("model") {
                Some(p.model("popularity")?)
            } else {
                None
            },
        }),
        "report.topics" => Routine::output(TopicReporter),
        "report.moods" => Routine::output(MoodReporter),
        "report.outlets" => Routine::output(OutletReporter {
            known: spec.params.contains_key("outlets").then(|| spec.param_list("outlets")),
        }),
        other => {
            return Err(p.err(format!(
                "unknown routine `{other}` (known: {})",
                ROUTINES.join(", ")
            )))
        }
    })
}

/// Load a settings file and build its routine, resolving resources next to the file.
pub fn load_module_file(path: &Path) -> Result<(ModuleSpec, Routine), CatalogError> {
    let err = |message: String| CatalogError {
        module: path.display().to_string(),
        message,
    };
    let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
    let spec = load_spec(&text).map_err(|e| err(e.to_string()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let routine = build_routine(&spec, base)?;
    Ok((spec, routine))
}

/// Every `*.conf` file in a directory, in file-name order.
pub fn load_module_dir(dir: &Path) -> Result<Vec<(ModuleSpec, Routine)>, CatalogError> {
    let err = |message: String| CatalogError {
        module: dir.display().to_string(),
        message,
    };
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| err(e.to_string()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "conf"))
        .collect();
    paths.sort();
    paths.iter().map(|p| load_module_file(p)).collect()
}
