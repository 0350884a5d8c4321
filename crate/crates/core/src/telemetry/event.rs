use crate::geom::Vec2;
use crate::npc::{Activity, SpecialState};
use crate::scene::InteractableState;
use crate::story::{Mode, OccupantRole, Phase, Recommendation};
use serde::{Deserialize, Serialize};

/// One log line: `{"t": .., "kind": "..", "payload": {..}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    #[serde(flatten)]
    pub body: EventBody,
}

impl Event {
    pub fn new(t: f64, body: EventBody) -> Self {
        Event { t, body }
    }

    pub fn kind(&self) -> &'static str {
        self.body.kind()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload")]
pub enum EventBody {
    SessionStarted {
        session: String,
        mode: Mode,
        occupant_role: OccupantRole,
        seed: u64,
    },
    PhaseChanged {
        from: Phase,
        to: Phase,
    },
    ActionTaken {
        action: String,
        recommended: Recommendation,
        phase: Phase,
        #[serde(default)]
        tags: Vec<String>,
        #[serde(default)]
        auto: bool,
    },
    ActionRejected {
        action: String,
        reason: String,
    },
    CoverLeft {
        under_since: f64,
    },
    RegionEntered {
        region: String,
    },
    WaitPointReached {
        waitpoint: String,
    },
    NpcSpoke {
        npc: String,
        line: String,
        text: String,
    },
    NpcMoved {
        npc: String,
        node: String,
    },
    InstructionGiven {
        npc: String,
        instruction: String,
        text: String,
        /// Best-practice feedback (never emitted in the behavioural mode).
        #[serde(default)]
        feedback: bool,
        /// The instruction tells occupants to start evacuating.
        #[serde(default)]
        evacuation: bool,
    },
    NpcActivityChanged {
        npc: String,
        activity: Activity,
    },
    NpcSpecialChanged {
        npc: String,
        state: SpecialState,
        active: bool,
    },
    NpcAssisted {
        npc: String,
        by_player: bool,
    },
    ObjectToppled {
        object: String,
    },
    ObjectSlid {
        object: String,
    },
    ObjectFell {
        object: String,
        onto: String,
    },
    DamageApplied {
        object: String,
        variant: String,
    },
    DoorBlocked {
        interactable: String,
    },
    RelocationApplied {
        applied: usize,
        total: usize,
    },
    InteractableChanged {
        interactable: String,
        state: InteractableState,
    },
    PlayerRelocated {
        node: String,
        position: Vec2,
    },
    AssemblyReached {
        node: String,
        safe: bool,
    },
    TerminalReached {
        action: String,
    },
    ReportShown {
        taken: usize,
        missed: usize,
    },
    ScoreShown {
        score: f64,
    },
    SnapshotMark {
        tick: u64,
    },
    SessionEnded {
        aborted: bool,
    },
}

impl EventBody {
    pub fn kind(&self) -> &'static str {
        match self {
            EventBody::SessionStarted { .. } => "SessionStarted",
            EventBody::PhaseChanged { .. } => "PhaseChanged",
            EventBody::ActionTaken { .. } => "ActionTaken",
            EventBody::ActionRejected { .. } => "ActionRejected",
            EventBody::CoverLeft { .. } => "CoverLeft",
            EventBody::RegionEntered { .. } => "RegionEntered",
            EventBody::WaitPointReached { .. } => "WaitPointReached",
            EventBody::NpcSpoke { .. } => "NpcSpoke",
            EventBody::NpcMoved { .. } => "NpcMoved",
            EventBody::InstructionGiven { .. } => "InstructionGiven",
            EventBody::NpcActivityChanged { .. } => "NpcActivityChanged",
            EventBody::NpcSpecialChanged { .. } => "NpcSpecialChanged",
            EventBody::NpcAssisted { .. } => "NpcAssisted",
            EventBody::ObjectToppled { .. } => "ObjectToppled",
            EventBody::ObjectSlid { .. } => "ObjectSlid",
            EventBody::ObjectFell { .. } => "ObjectFell",
            EventBody::DamageApplied { .. } => "DamageApplied",
            EventBody::DoorBlocked { .. } => "DoorBlocked",
            EventBody::RelocationApplied { .. } => "RelocationApplied",
            EventBody::InteractableChanged { .. } => "InteractableChanged",
            EventBody::PlayerRelocated { .. } => "PlayerRelocated",
            EventBody::AssemblyReached { .. } => "AssemblyReached",
            EventBody::TerminalReached { .. } => "TerminalReached",
            EventBody::ReportShown { .. } => "ReportShown",
            EventBody::ScoreShown { .. } => "ScoreShown",
            EventBody::SnapshotMark { .. } => "SnapshotMark",
            EventBody::SessionEnded { .. } => "SessionEnded",
        }
    }

    /// Events that would reveal best practice to the player.
    pub fn is_feedback(&self) -> bool {
        matches!(
            self,
            EventBody::InstructionGiven { feedback: true, .. }
                | EventBody::ReportShown { .. }
                | EventBody::ScoreShown { .. }
        )
    }
}

impl From<crate::quake::PhysicsEvent> for EventBody {
    fn from(e: crate::quake::PhysicsEvent) -> Self {
        use crate::quake::PhysicsEvent as P;
        match e {
            P::ObjectToppled { object } => EventBody::ObjectToppled { object },
            P::ObjectSlid { object } => EventBody::ObjectSlid { object },
            P::ObjectFell { object, onto } => EventBody::ObjectFell { object, onto },
        }
    }
}

impl From<crate::damage::DamageEvent> for EventBody {
    fn from(e: crate::damage::DamageEvent) -> Self {
        use crate::damage::DamageEvent as D;
        match e {
            D::DamageApplied { object, variant } => EventBody::DamageApplied { object, variant },
            D::DoorBlocked { interactable } => EventBody::DoorBlocked { interactable },
        }
    }
}
