use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    PreQuake,
    Earthquake,
    PreEvacuation,
    IndoorEvacuation,
    OutdoorEvacuation,
    Debrief,
}

impl Phase {
    pub const ORDER: [Phase; 6] = [
        Phase::PreQuake,
        Phase::Earthquake,
        Phase::PreEvacuation,
        Phase::IndoorEvacuation,
        Phase::OutdoorEvacuation,
        Phase::Debrief,
    ];

    pub fn rank(self) -> usize {
        Phase::ORDER
            .iter()
            .position(|p| *p == self)
            .expect("listed")
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Phase::PreQuake => "pre_quake",
            Phase::Earthquake => "earthquake",
            Phase::PreEvacuation => "pre_evacuation",
            Phase::IndoorEvacuation => "indoor_evacuation",
            Phase::OutdoorEvacuation => "outdoor_evacuation",
            Phase::Debrief => "debrief",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Bp,
    Tp,
}

/// Story events that can move the phase machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseEvent {
    BelongingsLeft,
    QuakeEnded,
    LeftRoom,
    ExitedBuilding,
    TerminalChoice,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{event:?} is not allowed during {phase}")]
pub struct IllegalTransition {
    pub phase: Phase,
    pub event: PhaseEvent,
}

/// The phase that follows `phase` on `event`. A terminal choice ends the
/// behavioural story in place and moves the training story to its debrief.
pub fn next_phase(mode: Mode, phase: Phase, event: PhaseEvent) -> Result<Phase, IllegalTransition> {
    use Phase::*;
    use PhaseEvent::*;
    let next = match (phase, event) {
        (PreQuake, BelongingsLeft) => Earthquake,
        (Earthquake, QuakeEnded) => PreEvacuation,
        (PreEvacuation, LeftRoom) => IndoorEvacuation,
        (IndoorEvacuation, ExitedBuilding) => OutdoorEvacuation,
        (OutdoorEvacuation, TerminalChoice) => match mode {
            Mode::Bp => OutdoorEvacuation,
            Mode::Tp => Debrief,
        },
        _ => return Err(IllegalTransition { phase, event }),
    };
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_transitions() {
        assert_eq!(
            next_phase(Mode::Bp, Phase::PreQuake, PhaseEvent::BelongingsLeft),
            Ok(Phase::Earthquake)
        );
        assert_eq!(
            next_phase(Mode::Bp, Phase::Earthquake, PhaseEvent::QuakeEnded),
            Ok(Phase::PreEvacuation)
        );
        assert_eq!(
            next_phase(Mode::Tp, Phase::PreEvacuation, PhaseEvent::LeftRoom),
            Ok(Phase::IndoorEvacuation)
        );
        assert_eq!(
            next_phase(
                Mode::Tp,
                Phase::IndoorEvacuation,
                PhaseEvent::ExitedBuilding
            ),
            Ok(Phase::OutdoorEvacuation)
        );
        assert_eq!(
            next_phase(
                Mode::Tp,
                Phase::OutdoorEvacuation,
                PhaseEvent::TerminalChoice
            ),
            Ok(Phase::Debrief)
        );
        assert_eq!(
            next_phase(
                Mode::Bp,
                Phase::OutdoorEvacuation,
                PhaseEvent::TerminalChoice
            ),
            Ok(Phase::OutdoorEvacuation)
        );
    }

    #[test]
    fn out_of_order_rejected() {
        let e = next_phase(Mode::Bp, Phase::PreQuake, PhaseEvent::QuakeEnded).unwrap_err();
        assert_eq!(
            e,
            IllegalTransition {
                phase: Phase::PreQuake,
                event: PhaseEvent::QuakeEnded
            }
        );
        assert!(next_phase(Mode::Tp, Phase::Debrief, PhaseEvent::TerminalChoice).is_err());
    }

    #[test]
    fn order_is_monotone() {
        for w in Phase::ORDER.windows(2) {
            assert!(w[0].rank() < w[1].rank());
            assert!(w[0] < w[1]);
        }
    }
}
