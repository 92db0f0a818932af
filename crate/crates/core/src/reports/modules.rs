//! Reports as output modules. Each run summarises everything its selection
//! sees into fresh items on its output blackboard.

use std::collections::BTreeSet;

use chrono::Utc;

use super::{mood_timeline, outlet_profiles, style_distances, topic_report, DateRange, Report};
use crate::annotate::MOODS;
use crate::framework::{Reporter, RoutineError};
use crate::store::{Item, NewItem, PrivateStore, Store, StoreError};

fn report_item(report: &Report) -> NewItem {
    NewItem::new()
        .field("report", report.kind.as_str())
        .field("generated_at", report.generated_at.to_rfc3339())
        .field("rows", report.rows_value())
        .created_at(report.generated_at)
}

pub struct TopicReporter;

impl Reporter for TopicReporter {
    fn report(&self, items: &[Item], _: &PrivateStore) -> Result<Vec<NewItem>, RoutineError> {
        let rows = topic_report(items, DateRange::all());
        Ok(vec![report_item(&Report::topics(&rows, Utc::now()))])
    }
}

pub struct MoodReporter;

impl Reporter for MoodReporter {
    fn report(&self, items: &[Item], _: &PrivateStore) -> Result<Vec<NewItem>, RoutineError> {
        let timelines = MOODS
            .iter()
            .map(|m| mood_timeline(items, m, DateRange::all()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| RoutineError::new(e.to_string()))?;
        Ok(vec![report_item(&Report::moods(&timelines, Utc::now()))])
    }
}

/// Outlet profiles and the style distance matrix. When `known` is set,
/// an article from any other outlet fails the run.
pub struct OutletReporter {
    pub known: Option<BTreeSet<String>>,
}

/// Outlet ids on a store's `outlets` blackboard.
pub fn known_outlets(store: &Store) -> Result<BTreeSet<String>, StoreError> {
    let outlets = store.blackboard("outlets")?;
    Ok(outlets
        .scan()
        .iter()
        .filter_map(|i| i.field_str("outlet_id").map(str::to_string))
        .collect())
}

impl Reporter for OutletReporter {
    fn report(&self, items: &[Item], _: &PrivateStore) -> Result<Vec<NewItem>, RoutineError> {
        let profiles =
            outlet_profiles(items, self.known.as_ref(), DateRange::all()).map_err(|e| RoutineError::new(e.to_string()))?;
        let now = Utc::now();
        Ok(vec![
            report_item(&Report::outlets(&profiles, now)),
            report_item(&Report::style_distances(&style_distances(&profiles), now)),
        ])
    }
}
