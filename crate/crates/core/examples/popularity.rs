//! Pairwise perceptron training for popularity ranking, and scoring with the
//! result through the module's private store.

use mediaboard::annotate::popularity::{popularity_update, store_model};
use mediaboard::annotate::{popularity_score, popularity_train, FeatureVector, TrainingConfig, TrainingPair};
use mediaboard::framework::{run_module, ModuleSpec, RunOptions, Routine};
use mediaboard::annotate::PopularityRanker;
use mediaboard::store::{NewItem, Store, Tag};

fn fv(terms: &[(&str, f64)]) -> FeatureVector {
    FeatureVector::from_weights(terms.iter().map(|(t, w)| (*t, *w)))
}

fn main() {
    // one pair: the single-update case
    let m = popularity_train(
        &[TrainingPair {
            popular: fv(&[("a", 1.0)]),
            unpopular: fv(&[("b", 1.0)]),
        }],
        TrainingConfig::default(),
    )
    .unwrap();
    println!("one update: {:?}", m.weights);

    // clicked stories mention goals and derbies; ignored ones mention committees
    let pairs = vec![
        TrainingPair { popular: fv(&[("goal", 2.0), ("derbi", 1.0)]), unpopular: fv(&[("committe", 1.0)]) },
        TrainingPair { popular: fv(&[("goal", 1.0), ("fan", 1.0)]), unpopular: fv(&[("budget", 2.0)]) },
        TrainingPair { popular: fv(&[("derbi", 1.0), ("fan", 2.0)]), unpopular: fv(&[("committe", 1.0), ("budget", 1.0)]) },
    ];
    let mut model = popularity_train(&pairs, TrainingConfig::default()).unwrap();
    let mut epochs = 1;
    while popularity_update(&mut model, &pairs, TrainingConfig::default()).unwrap() > 0 {
        epochs += 1;
    }
    println!("converged after {epochs} epochs: {:?}", model.weights);

    // hand the model to the module through its private store and let it score
    let store = Store::in_memory();
    store.init_standard().unwrap();
    store_model(&store.private_store("Popularity").unwrap(), &model).unwrap();
    let articles = store.blackboard("articles").unwrap();
    for (title, terms) in [("Derby fans", vec![("derbi", 1.0), ("fan", 1.0)]), ("Budget committee", vec![("budget", 1.0)])] {
        let v = fv(&terms);
        println!("{title}: direct score {:+.2}", popularity_score(&v, &model));
        articles
            .insert_item(
                NewItem::new()
                    .field("title", title)
                    .annotation("features", v.to_value())
                    .tag(Tag::control("Popularity").unwrap()),
            )
            .unwrap();
    }
    let spec = ModuleSpec::new("Popularity", "articles");
    run_module(&store, &spec, &Routine::analysis(PopularityRanker { fallback: None }), &RunOptions::default()).unwrap();
    for item in articles.scan() {
        println!("{:?} popularity={}", item.field_str("title"), item.annotations["popularity"]);
    }
}
