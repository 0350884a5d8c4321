use super::{Event, EventBody, TelemetryError};
use crate::story::{Metric, Phase, BEHAVIOUR_QUESTIONS};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Answers to the behavioural questions, one field per question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviouralRecord {
    pub first_action: Option<String>,
    pub dch_first: bool,
    pub time_to_dch: Option<f64>,
    pub time_under_table: f64,
    pub checked_damage: bool,
    pub unplugged_device: bool,
    pub phone_call: bool,
    pub phone_text: bool,
    pub assisted_others: bool,
    pub used_radio: bool,
    pub first_aid: bool,
    pub used_laptop: bool,
    pub collected_belongings: bool,
    pub waited_for_instruction: bool,
    pub wait_before_exit: f64,
    pub checked_damage_evac: bool,
    pub used_stairs_or_escalator: bool,
    pub used_lift: bool,
    pub checked_injured: bool,
    pub checked_stair_damage: bool,
    pub stayed_close: bool,
    pub returned_inside: bool,
    pub identified_safe_area: bool,
}

impl BehaviouralRecord {
    /// `(field, value)` pairs in question order.
    pub fn fields(&self) -> Vec<(&'static str, serde_json::Value)> {
        let v = serde_json::to_value(self).expect("serializable");
        BEHAVIOUR_QUESTIONS
            .iter()
            .map(|q| (q.field, v[q.field].clone()))
            .collect()
    }

    pub fn render(&self) -> String {
        let rows = self.fields();
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut s = String::new();
        for (k, v) in rows {
            let shown = match v {
                serde_json::Value::Null => "-".to_string(),
                serde_json::Value::String(x) => x,
                serde_json::Value::Number(n) => match n.as_f64() {
                    Some(f) if n.is_f64() => format!("{f:.2}"),
                    _ => n.to_string(),
                },
                other => other.to_string(),
            };
            let _ = writeln!(s, "{k:<width$}  {shown}");
        }
        s
    }
}

struct Anchors {
    quake_start: f64,
    quake_end: f64,
    room_exit: f64,
}

fn phase_start(log: &[Event], phase: Phase) -> Option<f64> {
    log.iter().find_map(|e| match e.body {
        EventBody::PhaseChanged { to, .. } if to == phase => Some(e.t),
        _ => None,
    })
}

fn taken_in(log: &[Event], phase: Phase) -> impl Iterator<Item = (f64, &str, &[String])> {
    log.iter().filter_map(move |e| match &e.body {
        EventBody::ActionTaken {
            action,
            phase: p,
            tags,
            ..
        } if *p == phase => Some((e.t, action.as_str(), &tags[..])),
        _ => None,
    })
}

fn has_tag(log: &[Event], phase: Phase, tag: &str) -> bool {
    taken_in(log, phase).any(|(_, _, tags)| tags.iter().any(|t| t == tag))
}

/// Builds the record of a finished free-roam session from its log alone.
pub fn extract_bp_metrics(log: &[Event]) -> Result<BehaviouralRecord, TelemetryError> {
    if !log
        .iter()
        .any(|e| matches!(e.body, EventBody::TerminalReached { .. }))
    {
        return Err(TelemetryError::IncompleteSession(
            "no terminal choice in the log".into(),
        ));
    }
    let need = |p: Phase| {
        phase_start(log, p)
            .ok_or_else(|| TelemetryError::IncompleteSession(format!("phase {p} never started")))
    };
    let a = Anchors {
        quake_start: need(Phase::Earthquake)?,
        quake_end: need(Phase::PreEvacuation)?,
        room_exit: need(Phase::IndoorEvacuation)?,
    };
    need(Phase::OutdoorEvacuation)?;

    let first = taken_in(log, Phase::Earthquake).next();
    let dch_first = first.is_some_and(|(_, _, tags)| tags.iter().any(|t| t == "dch"));
    let time_to_dch = taken_in(log, Phase::Earthquake)
        .find(|(_, _, tags)| tags.iter().any(|t| t == "dch"))
        .map(|(t, _, _)| t - a.quake_start);
    let time_under_table = log
        .iter()
        .find_map(|e| match e.body {
            EventBody::CoverLeft { .. } if e.t >= a.quake_end && time_to_dch.is_some() => {
                Some(e.t - a.quake_end)
            }
            _ => None,
        })
        .unwrap_or(0.0);
    let waited_for_instruction = log.iter().any(|e| {
        matches!(
            e.body,
            EventBody::InstructionGiven {
                evacuation: true,
                ..
            }
        ) && e.t <= a.room_exit
    });

    let tag = |field: &str| {
        let q = BEHAVIOUR_QUESTIONS
            .iter()
            .find(|q| q.field == field)
            .expect("known field");
        match q.metric {
            Metric::Tag(t, p) => has_tag(log, p, t),
            Metric::Derived => unreachable!("{field} is derived"),
        }
    };
    Ok(BehaviouralRecord {
        first_action: first.map(|(_, id, _)| id.to_string()),
        dch_first,
        time_to_dch,
        time_under_table,
        checked_damage: tag("checked_damage"),
        unplugged_device: tag("unplugged_device"),
        phone_call: tag("phone_call"),
        phone_text: tag("phone_text"),
        assisted_others: tag("assisted_others"),
        used_radio: tag("used_radio"),
        first_aid: tag("first_aid"),
        used_laptop: tag("used_laptop"),
        collected_belongings: tag("collected_belongings"),
        waited_for_instruction,
        wait_before_exit: a.room_exit - a.quake_end,
        checked_damage_evac: tag("checked_damage_evac"),
        used_stairs_or_escalator: has_tag(log, Phase::IndoorEvacuation, "descend_stairs")
            || has_tag(log, Phase::IndoorEvacuation, "descend_escalator"),
        used_lift: tag("used_lift"),
        checked_injured: tag("checked_injured"),
        checked_stair_damage: tag("checked_stair_damage"),
        stayed_close: tag("stayed_close"),
        returned_inside: tag("returned_inside"),
        identified_safe_area: tag("identified_safe_area"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::story::Recommendation;
    use std::collections::BTreeSet;

    fn phase(t: f64, from: Phase, to: Phase) -> Event {
        Event::new(t, EventBody::PhaseChanged { from, to })
    }

    fn act(t: f64, id: &str, p: Phase, tag: &str) -> Event {
        Event::new(
            t,
            EventBody::ActionTaken {
                action: id.into(),
                recommended: Recommendation::Neutral,
                phase: p,
                tags: vec![tag.into()],
                auto: false,
            },
        )
    }

    fn skeleton(extra: Vec<Event>) -> Vec<Event> {
        let mut log = vec![
            phase(1.0, Phase::PreQuake, Phase::Earthquake),
            phase(11.0, Phase::Earthquake, Phase::PreEvacuation),
            phase(40.0, Phase::PreEvacuation, Phase::IndoorEvacuation),
            phase(70.0, Phase::IndoorEvacuation, Phase::OutdoorEvacuation),
            Event::new(
                90.0,
                EventBody::TerminalReached {
                    action: "go_to_open_space".into(),
                },
            ),
        ];
        log.extend(extra);
        log.sort_by(|a, b| a.t.total_cmp(&b.t));
        log
    }

    #[test]
    fn record_covers_every_question_once() {
        let r = extract_bp_metrics(&skeleton(vec![])).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        let keys: BTreeSet<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        let fields: BTreeSet<&str> = BEHAVIOUR_QUESTIONS.iter().map(|q| q.field).collect();
        assert_eq!(keys, fields);
        assert_eq!(r.fields().len(), BEHAVIOUR_QUESTIONS.len());
    }

    #[test]
    fn dch_timing() {
        let r = extract_bp_metrics(&skeleton(vec![act(
            2.3,
            "dch_table",
            Phase::Earthquake,
            "dch",
        )]))
        .unwrap();
        assert!(r.dch_first);
        assert!((r.time_to_dch.unwrap() - 1.3).abs() < 1e-12);
        assert_eq!(r.first_action.as_deref(), Some("dch_table"));
    }

    #[test]
    fn lift_and_absent_phone() {
        let r = extract_bp_metrics(&skeleton(vec![act(
            50.0,
            "use_lift",
            Phase::IndoorEvacuation,
            "descend_lift",
        )]))
        .unwrap();
        assert!(r.used_lift);
        assert!(!r.used_stairs_or_escalator);
        assert!(!r.phone_call && !r.phone_text);
        assert_eq!(r.wait_before_exit, 29.0);
    }

    #[test]
    fn cover_time_from_shaking_end() {
        let r = extract_bp_metrics(&skeleton(vec![
            act(2.0, "dch_table", Phase::Earthquake, "dch"),
            Event::new(15.5, EventBody::CoverLeft { under_since: 2.0 }),
        ]))
        .unwrap();
        assert_eq!(r.time_under_table, 4.5);
    }

    #[test]
    fn incomplete() {
        let mut log = skeleton(vec![]);
        log.pop();
        assert!(matches!(
            extract_bp_metrics(&log),
            Err(TelemetryError::IncompleteSession(_))
        ));
    }

    #[test]
    fn extraction_is_pure() {
        let log = skeleton(vec![act(2.3, "dch_table", Phase::Earthquake, "dch")]);
        assert_eq!(extract_bp_metrics(&log), extract_bp_metrics(&log));
    }
}
