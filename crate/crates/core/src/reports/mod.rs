//! Summaries over analysed items: topic aggregates, outlet profiles and
//! style distances, daily mood timelines.

pub mod export;
pub mod modules;

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::annotate::MOODS;
use crate::store::Item;

pub use export::{export, ExportFormat, Report};
pub use modules::{known_outlets, MoodReporter, OutletReporter, TopicReporter};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReportError {
    #[error("unknown mood `{0}`")]
    UnknownMood(String),
    #[error("outlet `{0}` is not on the outlets blackboard")]
    UnknownOutlet(String),
    #[error("unknown report `{0}`")]
    UnknownReport(String),
}

/// Half-open `[start, end)`; a missing bound is unbounded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DateRange {
    pub start: Option<DateTime<Utc>>,
    pub end: Option<DateTime<Utc>>,
}

impl DateRange {
    pub fn all() -> Self {
        Self::default()
    }

    pub fn contains(&self, t: DateTime<Utc>) -> bool {
        self.start.is_none_or(|s| t >= s) && self.end.is_none_or(|e| t < e)
    }
}

/// When an item happened: its `pub_date` or `timestamp` field, else its insertion time.
pub fn item_time(item: &Item) -> DateTime<Utc> {
    ["pub_date", "timestamp"]
        .iter()
        .filter_map(|f| item.field_str(f))
        .find_map(|s| DateTime::parse_from_rfc3339(s).ok())
        .map(|d| d.with_timezone(&Utc))
        .unwrap_or(item.created_at)
}

/// Mean and population standard deviation.
pub fn mean_std(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    Some((mean, var.sqrt()))
}

/// Topics some item has been evaluated for, from `topic.<T>` annotations.
pub fn evaluated_topics<'a>(items: impl IntoIterator<Item = &'a Item>) -> BTreeSet<String> {
    items
        .into_iter()
        .flat_map(|i| i.annotations.keys())
        .filter_map(|k| k.strip_prefix("topic."))
        .map(str::to_string)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopicAggregate {
    pub topic: String,
    pub count: usize,
    pub mean_readability: Option<f64>,
    pub stddev_readability: Option<f64>,
    pub mean_subjectivity: Option<f64>,
    pub stddev_subjectivity: Option<f64>,
}

/// One aggregate per evaluated topic, ordered by topic name. An article
/// belongs to every topic whose tag it carries.
pub fn topic_report(items: &[Item], range: DateRange) -> Vec<TopicAggregate> {
    let items: Vec<&Item> = items.iter().filter(|i| range.contains(item_time(i))).collect();
    evaluated_topics(items.iter().copied())
        .into_iter()
        .map(|topic| {
            let members: Vec<&&Item> = items.iter().filter(|i| i.has_tag_str(&topic)).collect();
            let read: Vec<f64> = members.iter().filter_map(|i| i.annotation_f64("readability")).collect();
            let subj: Vec<f64> = members.iter().filter_map(|i| i.annotation_f64("subjectivity")).collect();
            let r = mean_std(&read);
            let s = mean_std(&subj);
            TopicAggregate {
                topic,
                count: members.len(),
                mean_readability: r.map(|v| v.0),
                stddev_readability: r.map(|v| v.1),
                mean_subjectivity: s.map(|v| v.0),
                stddev_subjectivity: s.map(|v| v.1),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoodPoint {
    pub date: NaiveDate,
    /// Share of the day's tweets with a positive score.
    pub volume: f64,
    pub mean_score: f64,
    pub tweets: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoodTimeline {
    pub mood: String,
    pub points: Vec<MoodPoint>,
}

impl MoodTimeline {
    /// The day with the highest volume; the earliest such day on ties.
    pub fn peak(&self) -> Option<&MoodPoint> {
        self.points
            .iter()
            .fold(None, |best: Option<&MoodPoint>, p| match best {
                Some(b) if b.volume >= p.volume => Some(b),
                _ => Some(p),
            })
    }
}

/// Daily (UTC) series for one mood over the tweets scored for it.
pub fn mood_timeline(items: &[Item], mood: &str, range: DateRange) -> Result<MoodTimeline, ReportError> {
    if !MOODS.contains(&mood) {
        return Err(ReportError::UnknownMood(mood.to_string()));
    }
    let key = format!("mood.{mood}");
    let mut days: BTreeMap<NaiveDate, Vec<f64>> = BTreeMap::new();
    for item in items {
        let t = item_time(item);
        if !range.contains(t) {
            continue;
        }
        if let Some(score) = item.annotation_f64(&key) {
            days.entry(t.date_naive()).or_default().push(score);
        }
    }
    let points = days
        .into_iter()
        .map(|(date, scores)| {
            let n = scores.len() as f64;
            MoodPoint {
                date,
                volume: scores.iter().filter(|s| **s > 0.0).count() as f64 / n,
                mean_score: scores.iter().sum::<f64>() / n,
                tweets: scores.len(),
            }
        })
        .collect();
    Ok(MoodTimeline {
        mood: mood.to_string(),
        points,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutletProfile {
    pub outlet_id: String,
    pub articles: usize,
    /// Share of the outlet's articles carrying each evaluated topic's tag.
    pub topic_frequencies: BTreeMap<String, f64>,
    pub mean_readability: Option<f64>,
    pub mean_subjectivity: Option<f64>,
}

/// Per-outlet topic mix and style. `outlets` lists the known outlet ids;
/// pass `None` to accept whatever outlets the articles name.
pub fn outlet_profiles(
    articles: &[Item],
    outlets: Option<&BTreeSet<String>>,
    range: DateRange,
) -> Result<Vec<OutletProfile>, ReportError> {
    let items: Vec<&Item> = articles.iter().filter(|i| range.contains(item_time(i))).collect();
    let topics = evaluated_topics(items.iter().copied());
    let mut by_outlet: BTreeMap<&str, Vec<&Item>> = BTreeMap::new();
    for i in &items {
        if let Some(o) = i.field_str("outlet_id") {
            by_outlet.entry(o).or_default().push(i);
        }
    }
    let mut out = Vec::new();
    for (outlet, members) in by_outlet {
        if outlets.is_some_and(|known| !known.contains(outlet)) {
            return Err(ReportError::UnknownOutlet(outlet.to_string()));
        }
        let n = members.len() as f64;
        let topic_frequencies = topics
            .iter()
            .map(|t| (t.clone(), members.iter().filter(|i| i.has_tag_str(t)).count() as f64 / n))
            .collect();
        let read: Vec<f64> = members.iter().filter_map(|i| i.annotation_f64("readability")).collect();
        let subj: Vec<f64> = members.iter().filter_map(|i| i.annotation_f64("subjectivity")).collect();
        out.push(OutletProfile {
            outlet_id: outlet.to_string(),
            articles: members.len(),
            topic_frequencies,
            mean_readability: mean_std(&read).map(|v| v.0),
            mean_subjectivity: mean_std(&subj).map(|v| v.0),
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StyleDistance {
    pub outlet_a: String,
    pub outlet_b: String,
    pub distance: f64,
}

fn zscores(xs: &[f64]) -> Vec<f64> {
    let (mean, sd) = mean_std(xs).unwrap_or((0.0, 0.0));
    xs.iter().map(|x| if sd > 0.0 { (x - mean) / sd } else { 0.0 }).collect()
}

/// Pairwise Euclidean distances between outlets over z-scored
/// (mean readability, mean subjectivity). Outlets missing either mean are left out.
pub fn style_distances(profiles: &[OutletProfile]) -> Vec<StyleDistance> {
    let usable: Vec<(&str, f64, f64)> = profiles
        .iter()
        .filter_map(|p| Some((p.outlet_id.as_str(), p.mean_readability?, p.mean_subjectivity?)))
        .collect();
    let r = zscores(&usable.iter().map(|u| u.1).collect::<Vec<_>>());
    let s = zscores(&usable.iter().map(|u| u.2).collect::<Vec<_>>());
    let mut out = Vec::new();
    for a in 0..usable.len() {
        for b in a + 1..usable.len() {
            out.push(StyleDistance {
                outlet_a: usable[a].0.to_string(),
                outlet_b: usable[b].0.to_string(),
                distance: ((r[a] - r[b]).powi(2) + (s[a] - s[b]).powi(2)).sqrt(),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::{ItemId, Tag};
    use serde_json::json;

    fn article(id: u64, outlet: &str, topics: &[&str], read: f64, subj: f64) -> Item {
        let mut item = Item {
            item_id: ItemId(id),
            fields: [
                ("outlet_id".to_string(), json!(outlet)),
                ("pub_date".to_string(), json!("2024-03-01T10:00:00+00:00")),
            ]
            .into(),
            tags: Default::default(),
            annotations: [("readability".to_string(), json!(read)), ("subjectivity".to_string(), json!(subj))].into(),
            dedup_hash: None,
            created_at: Utc::now(),
        };
        for t in ["Sports", "Politics"] {
            item.annotations.insert(format!("topic.{t}"), json!(0.0));
        }
        for t in topics {
            item.tags.insert(Tag::new(*t).unwrap());
        }
        item
    }

    #[test]
    fn topic_means() {
        let items = [
            article(1, "a", &["Sports"], 100.0, 0.1),
            article(2, "a", &["Sports", "Politics"], 80.0, 0.3),
        ];
        let rep = topic_report(&items, DateRange::all());
        assert_eq!(rep.len(), 2);
        assert_eq!(rep[0].topic, "Politics");
        assert_eq!(rep[0].count, 1);
        assert_eq!(rep[1].mean_readability, Some(90.0));
        assert_eq!(rep[1].stddev_readability, Some(10.0));
        assert!(topic_report(&[], DateRange::all()).is_empty());
    }

    #[test]
    fn range_filters() {
        let items = [article(1, "a", &["Sports"], 100.0, 0.1)];
        let later = DateRange {
            start: Some("2024-04-01T00:00:00Z".parse().unwrap()),
            end: None,
        };
        assert!(topic_report(&items, later).is_empty());
    }

    #[test]
    fn outlet_frequencies() {
        let items = [
            article(1, "a", &["Sports"], 100.0, 0.1),
            article(2, "a", &["Sports"], 80.0, 0.3),
            article(3, "a", &[], 60.0, 0.2),
            article(4, "b", &["Politics"], 40.0, 0.5),
        ];
        let p = outlet_profiles(&items, None, DateRange::all()).unwrap();
        assert!((p[0].topic_frequencies["Sports"] - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(p[1].outlet_id, "b");
        let known: BTreeSet<String> = ["a".to_string()].into();
        assert_eq!(
            outlet_profiles(&items, Some(&known), DateRange::all()),
            Err(ReportError::UnknownOutlet("b".into()))
        );
        let d = style_distances(&p);
        assert_eq!(d.len(), 1);
        // two points z-score to ±1 on both axes
        assert!((d[0].distance - 8f64.sqrt()).abs() < 1e-12);
    }

    fn tweet(id: u64, day: u32, joy: f64) -> Item {
        Item {
            item_id: ItemId(id),
            fields: [("timestamp".to_string(), json!(format!("2024-12-{day:02}T12:00:00+00:00")))].into(),
            tags: Default::default(),
            annotations: [("mood.joy".to_string(), json!(joy))].into(),
            dedup_hash: None,
            created_at: Utc::now(),
        }
    }

    #[test]
    fn timeline_fraction() {
        let tweets = [tweet(1, 24, 0.5), tweet(2, 24, 0.0), tweet(3, 24, 0.0), tweet(4, 24, 0.0), tweet(5, 25, 0.2)];
        let tl = mood_timeline(&tweets, "joy", DateRange::all()).unwrap();
        assert_eq!(tl.points.len(), 2);
        assert_eq!(tl.points[0].volume, 0.25);
        assert_eq!(tl.points[0].mean_score, 0.125);
        assert_eq!(tl.peak().unwrap().date.to_string(), "2024-12-25");
        assert!(matches!(mood_timeline(&tweets, "envy", DateRange::all()), Err(ReportError::UnknownMood(_))));
        assert!(mood_timeline(&[], "joy", DateRange::all()).unwrap().points.is_empty());
    }
}
