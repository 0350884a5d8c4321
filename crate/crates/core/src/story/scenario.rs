use super::catalog::{ActionDef, Effect, Requirement, RECOMMENDED_BEHAVIOURS};
use super::phase::{Mode, Phase};
use crate::damage::DamageSpec;
use crate::navigation::WaitPointGraph;
use crate::npc::{DialogueLine, Instruction, NpcAgent, NpcContext};
use crate::quake::QuakeParams;
use crate::scene::{region_of, SceneGraph};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub const SCENARIO_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("scenario schema error: {0}")]
    Schema(String),
    #[error("scenario validation error: {0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ScenarioError> {
    Err(ScenarioError::Invalid(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuakeConfig {
    pub params: QuakeParams,
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoryStep {
    pub id: String,
    pub phase: Phase,
    #[serde(default)]
    pub prompt: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub schema_version: u32,
    pub mode: Mode,
    /// Walk node where the player starts (outdoors).
    pub start_node: String,
    /// Region where the shaking catches the player.
    pub meeting_room: String,
    pub quake: QuakeConfig,
    #[serde(default)]
    pub steps: Vec<StoryStep>,
    #[serde(default)]
    pub waitpoints: Option<WaitPointGraph>,
    pub actions: Vec<ActionDef>,
    #[serde(default)]
    pub npcs: Vec<NpcAgent>,
    #[serde(default)]
    pub damage_spec: DamageSpec,
    #[serde(default)]
    pub dialogue: BTreeMap<String, DialogueLine>,
    #[serde(default)]
    pub instructions: BTreeMap<String, Instruction>,
    /// Debrief text per recommended behaviour id.
    #[serde(default)]
    pub rationale: BTreeMap<String, String>,
    /// Replaces the scene's staging when present.
    #[serde(default)]
    pub on_stage_regions: Option<Vec<String>>,
    #[serde(default)]
    pub relocation_budget: Option<usize>,
}

impl Scenario {
    pub fn action(&self, id: &str) -> Option<&ActionDef> {
        self.actions.iter().find(|a| a.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn npc_context<'a>(&'a self, scene: &'a SceneGraph) -> NpcContext<'a> {
        NpcContext {
            dialogue: &self.dialogue,
            instructions: &self.instructions,
            graph: &scene.walk_graph,
        }
    }

    /// Regions simulated during the session.
    pub fn on_stage(&self, scene: &SceneGraph) -> Vec<String> {
        self.on_stage_regions
            .clone()
            .unwrap_or_else(|| scene.on_stage_region_ids())
    }
}

/// Parses and validates a scenario against the scene it will run in.
pub fn load_scenario(doc: &str, scene: &SceneGraph) -> Result<Scenario, ScenarioError> {
    let value: serde_json::Value =
        serde_json::from_str(doc).map_err(|e| ScenarioError::Schema(e.to_string()))?;
    match value.get("schema_version").and_then(|v| v.as_u64()) {
        Some(v) if v == u64::from(SCENARIO_SCHEMA_VERSION) => {}
        Some(v) => {
            return Err(ScenarioError::Schema(format!(
                "unsupported schema_version {v}"
            )))
        }
        None => {
            return Err(ScenarioError::Schema(
                "missing integer `schema_version`".into(),
            ))
        }
    }
    let sc: Scenario =
        serde_json::from_value(value).map_err(|e| ScenarioError::Schema(e.to_string()))?;
    prepare(sc, scene)
}

/// Validates an in-memory scenario and initializes its NPCs.
pub fn prepare(mut sc: Scenario, scene: &SceneGraph) -> Result<Scenario, ScenarioError> {
    let graph = &scene.walk_graph;
    if graph.node(&sc.start_node).is_none() {
        return invalid(format!("unknown start node `{}`", sc.start_node));
    }
    if scene.region(&sc.meeting_room).is_none() {
        return invalid(format!("unknown meeting room region `{}`", sc.meeting_room));
    }
    sc.quake
        .params
        .validate(sc.quake.duration)
        .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
    sc.damage_spec
        .validate(scene)
        .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
    if let Some(ids) = &sc.on_stage_regions {
        if let Some(r) = ids.iter().find(|r| scene.region(r).is_none()) {
            return invalid(format!("unknown on-stage region `{r}`"));
        }
    }

    let mut ids = BTreeSet::new();
    for a in &sc.actions {
        if !ids.insert(a.id.as_str()) {
            return invalid(format!("duplicate action `{}`", a.id));
        }
    }
    let npc_ids: BTreeSet<&str> = sc.npcs.iter().map(|n| n.id.as_str()).collect();
    if npc_ids.len() != sc.npcs.len() {
        return invalid("duplicate npc id");
    }
    let interactable_ok = |id: &str, st| scene.interactable(id).is_some_and(|i| i.kind.allows(st));
    for a in &sc.actions {
        if a.phases.is_empty() {
            return invalid(format!("action `{}` has no phases", a.id));
        }
        if let Some(r) = a.regions.iter().find(|r| scene.region(r).is_none()) {
            return invalid(format!("action `{}` names unknown region `{r}`", a.id));
        }
        for r in &a.requires {
            match r {
                Requirement::Interactable { id, state } if !interactable_ok(id, *state) => {
                    return invalid(format!(
                        "action `{}` requires bad interactable state `{id}`",
                        a.id
                    ))
                }
                Requirement::NpcNeedsHelp(n) if !npc_ids.contains(n.as_str()) => {
                    return invalid(format!("action `{}` names unknown npc `{n}`", a.id))
                }
                _ => {}
            }
        }
        for e in &a.effects {
            match e {
                Effect::SetInteractable { id, state } if !interactable_ok(id, *state) => {
                    return invalid(format!(
                        "action `{}` sets bad interactable state `{id}`",
                        a.id
                    ))
                }
                Effect::AssistNpc(n) if !npc_ids.contains(n.as_str()) => {
                    return invalid(format!("action `{}` assists unknown npc `{n}`", a.id))
                }
                Effect::StartTimer { seconds, action } => {
                    if !(*seconds > 0.0) || !sc.actions.iter().any(|b| &b.id == action && b.auto) {
                        return invalid(format!("action `{}` starts a bad timer", a.id));
                    }
                }
                Effect::MovePlayer(n) | Effect::ReachAssembly(n) if graph.node(n).is_none() => {
                    return invalid(format!("action `{}` names unknown node `{n}`", a.id))
                }
                Effect::ReachAssembly(n) if !scene.assembly_areas.iter().any(|x| &x.node == n) => {
                    return invalid(format!("action `{}`: `{n}` is not an assembly area", a.id))
                }
                _ => {}
            }
        }
    }

    let ctx = NpcContext {
        dialogue: &sc.dialogue,
        instructions: &sc.instructions,
        graph,
    };
    let mut npcs = std::mem::take(&mut sc.npcs);
    npcs.sort_by(|a, b| a.id.cmp(&b.id));
    for n in &mut npcs {
        n.init(&ctx)
            .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
    }
    sc.npcs = npcs;

    if sc.mode == Mode::Tp {
        let Some(wp) = sc.waitpoints.take() else {
            return invalid("training scenarios need waitpoints");
        };
        let terminal: BTreeSet<String> = sc
            .actions
            .iter()
            .filter(|a| a.is_terminal())
            .map(|a| a.id.clone())
            .collect();
        let wp = WaitPointGraph::new(wp.start, wp.debrief, wp.points, terminal, graph)
            .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
        let on_stage: BTreeSet<String> = sc.on_stage(scene).into_iter().collect();
        for w in &wp.points {
            for p in &w.panels {
                match sc.action(&p.action) {
                    Some(a) if !a.auto => {}
                    _ => {
                        return invalid(format!(
                            "panel `{}` at `{}` is not a selectable action",
                            p.action, w.id
                        ))
                    }
                }
            }
            let nodes = std::iter::once(&w.node)
                .chain(w.outgoing.values().flat_map(|t| t.trajectory.iter()));
            for n in nodes {
                let pos = graph.position(n).expect("checked by graph");
                let region =
                    region_of(scene, pos).map_err(|e| ScenarioError::Invalid(e.to_string()))?;
                if !on_stage.contains(&region.id) {
                    return invalid(format!(
                        "trajectory node `{n}` lies in off-stage region `{}`",
                        region.id
                    ));
                }
            }
        }
        if graph.node(&sc.start_node).map(|n| n.id.as_str())
            != wp.get(&wp.start).map(|w| w.node.as_str())
        {
            return invalid("the first wait point must sit on the start node");
        }
        sc.waitpoints = Some(wp);
        if let Some(b) = RECOMMENDED_BEHAVIOURS
            .iter()
            .find(|b| !sc.rationale.contains_key(b.id))
        {
            return invalid(format!("missing debrief rationale for `{}`", b.id));
        }
    }
    Ok(sc)
}
