use super::phase::{Phase, PhaseEvent};
use crate::scene::InteractableState;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recommendation {
    Yes,
    No,
    Neutral,
    YesForVisitors,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OccupantRole {
    Staff,
    #[default]
    Visitor,
}

impl Recommendation {
    /// Whether the behaviour is best practice for someone in `role`.
    /// `None` when no recommendation exists.
    pub fn resolve(self, role: OccupantRole) -> Option<bool> {
        match self {
            Recommendation::Yes => Some(true),
            Recommendation::No => Some(false),
            Recommendation::Neutral => None,
            Recommendation::YesForVisitors => Some(role == OccupantRole::Visitor),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Requirement {
    Flag(String),
    NotFlag(String),
    Interactable {
        id: String,
        state: InteractableState,
    },
    NpcNeedsHelp(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Effect {
    SetFlag(String),
    ClearFlag(String),
    SetInteractable {
        id: String,
        state: InteractableState,
    },
    PhaseEvent(PhaseEvent),
    AssistNpc(String),
    /// Takes cover; the player stays there until an action without
    /// `keeps_cover` or a move.
    TakeCover,
    /// Fires `action` automatically after `seconds` unless another action
    /// is taken first.
    StartTimer {
        seconds: f64,
        action: String,
    },
    /// Places the player at a walk node (floor changes inside the building).
    MovePlayer(String),
    /// Reports reaching an assembly area at a walk node.
    ReachAssembly(String),
    /// Ends the story.
    Terminal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionDef {
    pub id: String,
    pub label: String,
    pub phases: Vec<Phase>,
    pub recommended: Recommendation,
    #[serde(default)]
    pub effects: Vec<Effect>,
    #[serde(default)]
    pub repeatable: bool,
    /// Regions where the action is offered in free roam; empty means anywhere.
    #[serde(default)]
    pub regions: Vec<String>,
    #[serde(default)]
    pub requires: Vec<Requirement>,
    /// Behaviour tags used by the analysis side.
    #[serde(default)]
    pub tags: Vec<String>,
    /// Only fired by a timer, never offered to the player.
    #[serde(default)]
    pub auto: bool,
    #[serde(default)]
    pub keeps_cover: bool,
}

impl ActionDef {
    pub fn is_terminal(&self) -> bool {
        self.effects.iter().any(|e| matches!(e, Effect::Terminal))
    }
}

/// How a behavioural question is answered from the log.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Any action carrying the tag during the phase.
    Tag(&'static str, Phase),
    /// Derived from timing or other events.
    Derived,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BehaviourQuestion {
    pub phase: Phase,
    pub field: &'static str,
    pub question: &'static str,
    pub recommended: Recommendation,
    pub metric: Metric,
}

macro_rules! q {
    ($phase:ident, $field:literal, $q:literal, $rec:ident, tag $tag:literal) => {
        BehaviourQuestion {
            phase: Phase::$phase,
            field: $field,
            question: $q,
            recommended: Recommendation::$rec,
            metric: Metric::Tag($tag, Phase::$phase),
        }
    };
    ($phase:ident, $field:literal, $q:literal, $rec:ident) => {
        BehaviourQuestion {
            phase: Phase::$phase,
            field: $field,
            question: $q,
            recommended: Recommendation::$rec,
            metric: Metric::Derived,
        }
    };
}

/// The behavioural questions the free-roam mode answers, one per record field.
pub const BEHAVIOUR_QUESTIONS: [BehaviourQuestion; 23] = [
    q!(
        Earthquake,
        "dch_first",
        "Drop, cover and hold chosen first",
        Yes
    ),
    q!(
        Earthquake,
        "first_action",
        "Which action came first if not DCH",
        Neutral
    ),
    q!(
        Earthquake,
        "time_to_dch",
        "Seconds from shaking onset to DCH",
        Neutral
    ),
    q!(
        PreEvacuation,
        "time_under_table",
        "Seconds spent under cover after shaking",
        Neutral
    ),
    q!(PreEvacuation, "checked_damage", "Looked for damage", Yes, tag "check_damage"),
    q!(PreEvacuation, "unplugged_device", "Unplugged a broken device", Yes, tag "unplug"),
    q!(PreEvacuation, "phone_call", "Made a phone call", No, tag "phone_call"),
    q!(PreEvacuation, "phone_text", "Texted or browsed on the phone", Yes, tag "phone_text"),
    q!(PreEvacuation, "assisted_others", "Helped someone nearby", Yes, tag "assist"),
    q!(PreEvacuation, "used_radio", "Listened to the radio", Yes, tag "radio"),
    q!(PreEvacuation, "first_aid", "Took or used the first aid kit", Yes, tag "first_aid"),
    q!(PreEvacuation, "used_laptop", "Browsed on a computer", Yes, tag "laptop"),
    q!(PreEvacuation, "collected_belongings", "Picked up belongings", Yes, tag "belongings"),
    q!(
        PreEvacuation,
        "waited_for_instruction",
        "Waited to be told to evacuate",
        YesForVisitors
    ),
    q!(
        PreEvacuation,
        "wait_before_exit",
        "Seconds from shaking end to leaving the room",
        Neutral
    ),
    q!(IndoorEvacuation, "checked_damage_evac", "Looked for damage on the way out", Yes, tag "check_damage_evac"),
    q!(
        IndoorEvacuation,
        "used_stairs_or_escalator",
        "Went down by stairs or escalator",
        Yes
    ),
    q!(IndoorEvacuation, "used_lift", "Went down by lift", No, tag "descend_lift"),
    q!(IndoorEvacuation, "checked_injured", "Looked for injured people before descending", Yes, tag "check_injured"),
    q!(IndoorEvacuation, "checked_stair_damage", "Inspected the stairs or escalator first", Yes, tag "check_stairs"),
    q!(OutdoorEvacuation, "stayed_close", "Stayed next to the building", No, tag "stay_close"),
    q!(OutdoorEvacuation, "returned_inside", "Went back inside", No, tag "return_inside"),
    q!(OutdoorEvacuation, "identified_safe_area", "Found a safe assembly area", Yes, tag "safe_area"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Behaviour {
    pub id: &'static str,
    pub phase: Phase,
    pub summary: &'static str,
    /// Any recommended action carrying one of these tags counts.
    pub tags: &'static [&'static str],
}

/// The recommended behaviours the training mode teaches and reports on.
pub const RECOMMENDED_BEHAVIOURS: [Behaviour; 12] = [
    Behaviour {
        id: "dch",
        phase: Phase::Earthquake,
        summary: "Take cover under a table",
        tags: &["dch"],
    },
    Behaviour {
        id: "watch_hazards",
        phase: Phase::Earthquake,
        summary: "Watch for falling objects and glass",
        tags: &["watch_hazards"],
    },
    Behaviour {
        id: "wait_30s",
        phase: Phase::PreEvacuation,
        summary: "Wait for aftershocks",
        tags: &["wait_30s"],
    },
    Behaviour {
        id: "belongings",
        phase: Phase::PreEvacuation,
        summary: "Take personal belongings",
        tags: &["belongings"],
    },
    Behaviour {
        id: "first_aid",
        phase: Phase::PreEvacuation,
        summary: "Take the first aid kit",
        tags: &["first_aid"],
    },
    Behaviour {
        id: "help_people",
        phase: Phase::IndoorEvacuation,
        summary: "Check on and help others",
        tags: &["assist"],
    },
    Behaviour {
        id: "find_exit",
        phase: Phase::IndoorEvacuation,
        summary: "Find another exit when one is blocked",
        tags: &["alternate_exit"],
    },
    Behaviour {
        id: "fire",
        phase: Phase::IndoorEvacuation,
        summary: "Put out or report a fire",
        tags: &["fire"],
    },
    Behaviour {
        id: "unplug",
        phase: Phase::IndoorEvacuation,
        summary: "Unplug damaged electrical equipment",
        tags: &["unplug"],
    },
    Behaviour {
        id: "radio",
        phase: Phase::IndoorEvacuation,
        summary: "Listen to the radio",
        tags: &["radio"],
    },
    Behaviour {
        id: "stairs",
        phase: Phase::IndoorEvacuation,
        summary: "Leave by the stairs",
        tags: &["descend_stairs"],
    },
    Behaviour {
        id: "open_space",
        phase: Phase::OutdoorEvacuation,
        summary: "Wait in open space away from buildings",
        tags: &["safe_area"],
    },
];

/// Behaviours whose tags intersect `tags`.
pub fn behaviours_for(tags: &[String]) -> impl Iterator<Item = &'static Behaviour> + '_ {
    RECOMMENDED_BEHAVIOURS
        .iter()
        .filter(move |b| b.tags.iter().any(|t| tags.iter().any(|x| x == t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn question_fields_unique() {
        let fields: BTreeSet<_> = BEHAVIOUR_QUESTIONS.iter().map(|q| q.field).collect();
        assert_eq!(fields.len(), 23);
        let per_phase = |p| BEHAVIOUR_QUESTIONS.iter().filter(|q| q.phase == p).count();
        assert_eq!(per_phase(Phase::Earthquake), 3);
        assert_eq!(per_phase(Phase::PreEvacuation), 12);
        assert_eq!(per_phase(Phase::IndoorEvacuation), 5);
        assert_eq!(per_phase(Phase::OutdoorEvacuation), 3);
    }

    #[test]
    fn recommended_flags() {
        let rec = |f| {
            BEHAVIOUR_QUESTIONS
                .iter()
                .find(|q| q.field == f)
                .unwrap()
                .recommended
        };
        assert_eq!(rec("used_lift"), Recommendation::No);
        assert_eq!(rec("phone_call"), Recommendation::No);
        assert_eq!(rec("phone_text"), Recommendation::Yes);
        assert_eq!(
            rec("waited_for_instruction"),
            Recommendation::YesForVisitors
        );
        assert_eq!(rec("stayed_close"), Recommendation::No);
        assert_eq!(rec("returned_inside"), Recommendation::No);
        assert_eq!(rec("time_to_dch"), Recommendation::Neutral);
    }

    #[test]
    fn visitors_resolution() {
        assert_eq!(
            Recommendation::YesForVisitors.resolve(OccupantRole::Visitor),
            Some(true)
        );
        assert_eq!(
            Recommendation::YesForVisitors.resolve(OccupantRole::Staff),
            Some(false)
        );
        assert_eq!(Recommendation::Neutral.resolve(OccupantRole::Staff), None);
    }

    #[test]
    fn behaviour_groups() {
        let ids: BTreeSet<_> = RECOMMENDED_BEHAVIOURS.iter().map(|b| b.id).collect();
        assert_eq!(ids.len(), 12);
        let eq = RECOMMENDED_BEHAVIOURS
            .iter()
            .filter(|b| b.phase == Phase::Earthquake)
            .count();
        let out = RECOMMENDED_BEHAVIOURS
            .iter()
            .filter(|b| b.phase == Phase::OutdoorEvacuation)
            .count();
        assert_eq!((eq, 12 - eq - out, out), (2, 9, 1));
    }

    #[test]
    fn effect_json_shape() {
        let e: Effect =
            serde_json::from_str(r#"{"start_timer":{"seconds":30,"action":"wait_30s"}}"#).unwrap();
        assert_eq!(
            e,
            Effect::StartTimer {
                seconds: 30.0,
                action: "wait_30s".into()
            }
        );
        let e: Effect = serde_json::from_str(r#""terminal""#).unwrap();
        assert_eq!(e, Effect::Terminal);
    }
}
