//! Each analysis routine applied directly to one piece of text, using the
//! demo lexicons and models.

use std::collections::BTreeMap;
use std::path::Path;

use mediaboard::annotate::mood::dominant_mood;
use mediaboard::annotate::{
    build_idf, detect_language, extract_features, geocode, mood_scores, readability, sentiment_subjectivity, Gazetteer,
    Lexicon, LinearModel, MoodLexicons,
};

fn lexicon(dir: &Path, name: &str) -> Lexicon {
    Lexicon::load(name, &dir.join(format!("lexicons/{name}.txt"))).unwrap()
}

fn main() {
    let demo = Path::new(env!("CARGO_MANIFEST_DIR")).join("demo");
    let text = "The young team celebrated a brilliant late goal in London. \
                Fans were happy and proud as the match ended. \
                The coach said the win was wonderful for the club.";

    let profiles: BTreeMap<String, Lexicon> = [("en", "stop_en"), ("fr", "stop_fr")]
        .into_iter()
        .map(|(code, file)| (code.to_string(), lexicon(&demo, file)))
        .collect();
    println!("language: {}", detect_language(text, &profiles).unwrap());
    println!(
        "language of a French line: {}",
        detect_language("Le club a gagné la finale et les supporters sont heureux.", &profiles).unwrap()
    );

    let stop = lexicon(&demo, "stop_en");
    let corpus = [text, "Central bank holds rates as inflation cools.", "Parliament debates the budget."];
    let idf = build_idf(corpus, &stop);
    let fv = extract_features(text, &stop, &idf).unwrap();
    let mut top: Vec<_> = fv.weights.iter().collect();
    top.sort_by(|a, b| b.1.total_cmp(a.1));
    println!("features: {} tokens, top terms {:?}", fv.token_count, &top[..5]);

    let moods = MoodLexicons::new(
        lexicon(&demo, "joy"),
        lexicon(&demo, "anger"),
        lexicon(&demo, "fear"),
        lexicon(&demo, "sadness"),
    );
    let scores = mood_scores(&fv, &moods).unwrap();
    for s in &scores {
        println!("mood.{:<8} {:.3}", s.mood, s.score);
    }
    println!("dominant mood: {:?}", dominant_mood(&scores));

    let (subj, hits) = sentiment_subjectivity(text, &lexicon(&demo, "sentiment_adjectives"), &lexicon(&demo, "adjectives"));
    println!("subjectivity {subj:.2} from {hits} sentiment adjectives");
    println!("readability {:.1}", readability(text).unwrap());

    for topic in ["sports", "politics", "business"] {
        let model = LinearModel::load(topic, &demo.join(format!("models/{topic}.txt"))).unwrap().stemmed();
        let (score, member) = model.decide(&fv);
        println!("topic {topic:<9} score {score:+.2} member {member}");
    }

    let gazetteer = Gazetteer::load(&demo.join("gazetteer.tsv")).unwrap();
    for loc in geocode(text, &gazetteer) {
        println!("location {} ({}) at {:.2},{:.2}", loc.name, loc.region, loc.lat, loc.lon);
    }
}
