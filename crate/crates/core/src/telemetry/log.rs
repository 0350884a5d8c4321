use super::{Event, TelemetryError};
use std::io::Write;
use std::path::Path;

/// Append-only, time-ordered event log.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventLog {
    events: Vec<Event>,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, event: Event) -> Result<(), TelemetryError> {
        if let Some(last) = self.events.last() {
            if event.t < last.t {
                return Err(TelemetryError::ClockRegression {
                    last: last.t,
                    t: event.t,
                });
            }
        }
        self.events.push(event);
        Ok(())
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn last_t(&self) -> Option<f64> {
        self.events.last().map(|e| e.t)
    }

    pub fn to_jsonl(&self) -> String {
        let mut s = String::new();
        for e in &self.events {
            s.push_str(&serde_json::to_string(e).expect("serializable"));
            s.push('\n');
        }
        s
    }

    pub fn from_jsonl(text: &str) -> Result<Self, TelemetryError> {
        let mut log = EventLog::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let e: Event = serde_json::from_str(line).map_err(|e| TelemetryError::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
            log.record(e)?;
        }
        Ok(log)
    }

    pub fn write_jsonl(&self, path: &Path) -> std::io::Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_jsonl().as_bytes())
    }

    pub fn read_jsonl(path: &Path) -> Result<Self, TelemetryError> {
        let text = std::fs::read_to_string(path).map_err(|e| TelemetryError::Io(e.to_string()))?;
        Self::from_jsonl(&text)
    }
}

impl From<EventLog> for Vec<Event> {
    fn from(log: EventLog) -> Self {
        log.events
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::telemetry::EventBody;

    fn mark(t: f64, tick: u64) -> Event {
        Event::new(t, EventBody::SnapshotMark { tick })
    }

    #[test]
    fn equal_times_keep_arrival_order() {
        let mut log = EventLog::new();
        log.record(mark(1.0, 1)).unwrap();
        log.record(mark(1.0, 2)).unwrap();
        assert_eq!(log.events()[1], mark(1.0, 2));
    }

    #[test]
    fn regression_rejected() {
        let mut log = EventLog::new();
        log.record(mark(1.0, 1)).unwrap();
        assert_eq!(
            log.record(mark(0.5, 2)),
            Err(TelemetryError::ClockRegression { last: 1.0, t: 0.5 })
        );
        assert_eq!(log.len(), 1);
    }

    #[test]
    fn empty_export() {
        assert_eq!(EventLog::new().to_jsonl(), "");
        assert!(EventLog::from_jsonl("").unwrap().is_empty());
    }

    #[test]
    fn jsonl_round_trip() {
        let mut log = EventLog::new();
        log.record(mark(0.0, 0)).unwrap();
        log.record(Event::new(
            0.02,
            EventBody::ObjectSlid {
                object: "chair".into(),
            },
        ))
        .unwrap();
        let back = EventLog::from_jsonl(&log.to_jsonl()).unwrap();
        assert_eq!(back, log);
    }

    #[test]
    fn import_checks_order() {
        let text = "{\"t\":2.0,\"kind\":\"SnapshotMark\",\"payload\":{\"tick\":1}}\n\
                    {\"t\":1.0,\"kind\":\"SnapshotMark\",\"payload\":{\"tick\":2}}\n";
        assert!(matches!(
            EventLog::from_jsonl(text),
            Err(TelemetryError::ClockRegression { .. })
        ));
    }
}
