//! Analysis modules. Each file pairs a pure scoring function with the
//! [`Annotator`](crate::framework::Annotator) that writes its result onto items.

pub mod features;
pub mod geocode;
pub mod language;
pub mod lexicon;
pub mod mood;
pub mod popularity;
pub mod readability;
pub mod sentiment;
pub mod text;
pub mod topic;

pub use features::{build_idf, extract_features, FeatureExtractor, FeatureVector, IdfTable};
pub use geocode::{geocode, Gazetteer, GazetteerEntry, Geocoder, Location};
pub use language::{detect_language, LanguageDetector, LanguageProfiles};
pub use lexicon::Lexicon;
pub use mood::{mood_scores, MoodDetector, MoodLexicons, MoodScore, MOODS};
pub use popularity::{popularity_score, popularity_train, PopularityRanker, TrainingConfig, TrainingPair};
pub use readability::{readability, ReadabilityAnnotator};
pub use sentiment::{sentiment_subjectivity, SentimentExtractor};
pub use topic::{LinearModel, TopicTagger};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnnotateError {
    #[error("language could not be determined")]
    Undetermined,
    #[error("no terms left after stopword removal")]
    EmptyAfterFiltering,
    #[error("document has no tokens")]
    ZeroLengthDocument,
    #[error("text has no sentences")]
    NoSentences,
    #[error("no model available")]
    MissingModel,
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("item has no `features` annotation")]
    MissingFeatures,
    #[error("{0}")]
    InvalidResource(String),
    #[error("{source_name} line {line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },
    #[error("{0}")]
    Io(String),
}
