//! Two modules that never reference each other, chained by a trigger tag.
//!
//! `Shout` works on items tagged `FOR>Shout` and emits `FOR>Count`; `Count`
//! picks those up. A third module runs in scan mode over everything `Count`
//! has not yet marked.

use mediaboard::framework::{run_module, Annotator, ModuleSpec, Outcome, Routine, RoutineError, RunOptions};
use mediaboard::store::{Item, NewItem, PrivateStore, Store, Tag};

struct Shout;

impl Annotator for Shout {
    fn annotate(&self, item: &Item, _: &PrivateStore) -> Result<Outcome, RoutineError> {
        let text = item.field_str("text").ok_or_else(|| RoutineError::new("no text"))?;
        Ok(Outcome::new().annotate("shout", text.to_uppercase()))
    }
}

struct Count;

impl Annotator for Count {
    fn annotate(&self, item: &Item, state: &PrivateStore) -> Result<Outcome, RoutineError> {
        // private state survives between runs
        let seen = state.get("seen").and_then(|s| s.parse::<u64>().ok()).unwrap_or(0) + 1;
        state.put("seen", seen.to_string()).map_err(|e| RoutineError::new(e.to_string()))?;
        let words = item.field_str("text").unwrap_or("").split_whitespace().count();
        Ok(Outcome::new().annotate("words", words as u64).annotate("seen_so_far", seen))
    }
}

fn main() {
    let store = Store::in_memory();
    let notes = store.create_blackboard_with("notes", false).unwrap();
    for text in ["hello there", "stigmergy at work", ""] {
        notes
            .insert_item(NewItem::new().field("text", text).tag(Tag::control("Shout").unwrap()))
            .unwrap();
    }

    let shout = ModuleSpec::new("Shout", "notes")
        .emitting([Tag::control("Count").unwrap()])
        .requiring_field("text");
    let count = ModuleSpec::new("Count", "notes");
    let opts = RunOptions::default();

    // Count first: nothing carries its trigger yet.
    let r = run_module(&store, &count, &Routine::analysis(Count), &opts).unwrap();
    println!("Count before Shout: {} selected", r.items_selected);
    let r = run_module(&store, &shout, &Routine::analysis(Shout), &opts).unwrap();
    println!("Shout: {} ok", r.items_succeeded);
    let r = run_module(&store, &count, &Routine::analysis(Count), &opts).unwrap();
    println!("Count after Shout: {} ok", r.items_succeeded);

    for item in notes.scan() {
        println!(
            "{:?}: tags {:?} annotations {}",
            item.field_str("text"),
            item.tags.iter().map(Tag::as_str).collect::<Vec<_>>(),
            serde_json::to_string(&item.annotations).unwrap()
        );
    }
    println!("Count state: seen={:?}", store.private_store("Count").unwrap().get("seen"));
}
