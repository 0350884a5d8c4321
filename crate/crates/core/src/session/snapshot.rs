use crate::geom::Vec2;
use crate::npc::{Activity, SpecialState};
use crate::scene::{InteractableState, Pose};
use crate::story::Phase;
use crate::telemetry::Event;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerView {
    pub position: Vec2,
    pub heading: f64,
    pub region: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectView {
    pub pose: Pose,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    #[serde(default)]
    pub toppled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NpcView {
    pub position: Vec2,
    pub activity: Activity,
    #[serde(default)]
    pub special: Vec<SpecialState>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionView {
    pub id: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelView {
    pub action: String,
    pub label: String,
    /// World heading the player looks along to pick this panel.
    pub heading: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DialogueView {
    pub npc: String,
    pub line: String,
    pub text: String,
}

/// What the client renders after one tick. Maps hold only entries that
/// changed since the previous snapshot unless `full` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub session: String,
    pub tick: u64,
    pub t: f64,
    pub full: bool,
    pub phase: Phase,
    pub player: PlayerView,
    pub objects: BTreeMap<String, ObjectView>,
    pub npcs: BTreeMap<String, NpcView>,
    pub interactables: BTreeMap<String, InteractableState>,
    pub available_actions: Vec<ActionView>,
    pub panels: Vec<PanelView>,
    pub waitpoint: Option<String>,
    pub in_transit: bool,
    pub terminal: bool,
    /// Lines spoken during this tick.
    pub dialogue: Vec<DialogueView>,
    /// Log events recorded during this tick.
    pub events: Vec<Event>,
}

/// Client-side world state rebuilt by folding snapshots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullState {
    pub session: String,
    pub tick: u64,
    pub t: f64,
    pub phase: Phase,
    pub player: PlayerView,
    pub objects: BTreeMap<String, ObjectView>,
    pub npcs: BTreeMap<String, NpcView>,
    pub interactables: BTreeMap<String, InteractableState>,
    pub available_actions: Vec<ActionView>,
    pub panels: Vec<PanelView>,
    pub waitpoint: Option<String>,
    pub in_transit: bool,
    pub terminal: bool,
}

impl FullState {
    pub fn from_full(s: &Snapshot) -> Self {
        FullState {
            session: s.session.clone(),
            tick: s.tick,
            t: s.t,
            phase: s.phase,
            player: s.player.clone(),
            objects: s.objects.clone(),
            npcs: s.npcs.clone(),
            interactables: s.interactables.clone(),
            available_actions: s.available_actions.clone(),
            panels: s.panels.clone(),
            waitpoint: s.waitpoint.clone(),
            in_transit: s.in_transit,
            terminal: s.terminal,
        }
    }

    /// Folds one snapshot in.
    pub fn apply(&mut self, s: &Snapshot) {
        if s.full {
            *self = FullState::from_full(s);
            return;
        }
        self.tick = s.tick;
        self.t = s.t;
        self.phase = s.phase;
        self.player = s.player.clone();
        for (k, v) in &s.objects {
            self.objects.insert(k.clone(), v.clone());
        }
        for (k, v) in &s.npcs {
            self.npcs.insert(k.clone(), v.clone());
        }
        for (k, v) in &s.interactables {
            self.interactables.insert(k.clone(), *v);
        }
        self.available_actions = s.available_actions.clone();
        self.panels = s.panels.clone();
        self.waitpoint = s.waitpoint.clone();
        self.in_transit = s.in_transit;
        self.terminal = s.terminal;
    }

    /// Rebuilds the state from a snapshot stream that starts with a full one.
    pub fn fold<'a>(stream: impl IntoIterator<Item = &'a Snapshot>) -> Option<Self> {
        let mut it = stream.into_iter();
        let first = it.next().filter(|s| s.full)?;
        let mut st = FullState::from_full(first);
        for s in it {
            st.apply(s);
        }
        Some(st)
    }
}
