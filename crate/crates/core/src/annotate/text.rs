use std::sync::OnceLock;

use rust_stemmers::{Algorithm, Stemmer};

/// Lowercase runs of letters; everything else separates tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphabetic())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn stemmer() -> &'static Stemmer {
    static STEMMER: OnceLock<Stemmer> = OnceLock::new();
    STEMMER.get_or_init(|| Stemmer::create(Algorithm::English))
}

/// English Porter-family stem of an already lowercased word.
pub fn stem(word: &str) -> String {
    stemmer().stem(word).into_owned()
}

/// Map a dictionary word into the feature-term space (lowercase, stemmed).
pub fn normalize_term(word: &str) -> String {
    stem(&word.to_lowercase())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_on_non_letters() {
        assert_eq!(tokenize("Don't stop-me now, 2024!"), ["don", "t", "stop", "me", "now"]);
        assert!(tokenize("123 ... !!").is_empty());
    }

    #[test]
    fn unicode_letters_kept() {
        assert_eq!(tokenize("Élan café"), ["élan", "café"]);
    }

    #[test]
    fn stems() {
        assert_eq!(stem("cats"), "cat");
        assert_eq!(stem("running"), "run");
        assert_eq!(normalize_term("Happy"), "happi");
    }
}
