use super::catalog::{Recommendation, RECOMMENDED_BEHAVIOURS};
use super::state::StoryError;
use crate::telemetry::{Event, EventBody};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportItem {
    pub behaviour: String,
    pub summary: String,
    pub taken: bool,
    pub rationale: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackReport {
    pub items: Vec<ReportItem>,
    pub taken: usize,
    pub missed: usize,
}

impl FeedbackReport {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "Recommended actions taken: {} of {}",
            self.taken,
            self.items.len()
        );
        for it in &self.items {
            let mark = if it.taken { "x" } else { " " };
            let _ = writeln!(s, "[{mark}] {}", it.summary);
            if !it.rationale.is_empty() {
                let _ = writeln!(s, "    {}", it.rationale);
            }
        }
        s
    }
}

/// Debrief for a finished training session. A behaviour counts as taken when
/// a recommended action carrying one of its tags was logged.
pub fn build_report(
    log: &[Event],
    rationale: &BTreeMap<String, String>,
) -> Result<FeedbackReport, StoryError> {
    if !log
        .iter()
        .any(|e| matches!(e.body, EventBody::TerminalReached { .. }))
    {
        return Err(StoryError::IncompleteSession(
            "no terminal choice in the log".into(),
        ));
    }
    let tags: Vec<&String> = log
        .iter()
        .filter_map(|e| match &e.body {
            EventBody::ActionTaken {
                recommended: Recommendation::Yes,
                tags,
                ..
            } => Some(tags),
            _ => None,
        })
        .flatten()
        .collect();
    let items: Vec<ReportItem> = RECOMMENDED_BEHAVIOURS
        .iter()
        .map(|b| ReportItem {
            behaviour: b.id.to_string(),
            summary: b.summary.to_string(),
            taken: b.tags.iter().any(|t| tags.iter().any(|x| x == t)),
            rationale: rationale.get(b.id).cloned().unwrap_or_default(),
        })
        .collect();
    let taken = items.iter().filter(|i| i.taken).count();
    Ok(FeedbackReport {
        missed: items.len() - taken,
        taken,
        items,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::story::Phase;

    fn taken(t: f64, action: &str, tag: &str, rec: Recommendation) -> Event {
        Event::new(
            t,
            EventBody::ActionTaken {
                action: action.into(),
                recommended: rec,
                phase: Phase::Earthquake,
                tags: vec![tag.into()],
                auto: false,
            },
        )
    }

    fn end(t: f64) -> Event {
        Event::new(
            t,
            EventBody::TerminalReached {
                action: "choose_assembly_area_safe".into(),
            },
        )
    }

    #[test]
    fn two_of_twelve() {
        let log = vec![
            taken(1.0, "dch_table", "dch", Recommendation::Yes),
            taken(2.0, "take_first_aid", "first_aid", Recommendation::Yes),
            end(3.0),
        ];
        let r = build_report(&log, &BTreeMap::new()).unwrap();
        assert_eq!((r.taken, r.missed), (2, 10));
        assert_eq!(r.items.len(), 12);
    }

    #[test]
    fn unrecommended_tag_does_not_count() {
        let log = vec![
            taken(1.0, "use_lift", "descend_stairs", Recommendation::No),
            end(2.0),
        ];
        assert_eq!(build_report(&log, &BTreeMap::new()).unwrap().taken, 0);
    }

    #[test]
    fn needs_terminal() {
        let log = vec![taken(1.0, "dch_table", "dch", Recommendation::Yes)];
        assert!(matches!(
            build_report(&log, &BTreeMap::new()),
            Err(StoryError::IncompleteSession(_))
        ));
    }
}
