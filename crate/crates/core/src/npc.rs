//! Routine-driven and trigger-driven non-player characters.

use crate::geom::Vec2;
use crate::navigation::{nearest_node, route};
use crate::scene::WalkGraph;
use crate::story::Phase;
use crate::telemetry::EventBody;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub const NPC_WALK_SPEED: f64 = 1.2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NpcError {
    #[error("npc `{0}` is not interactive")]
    NotInteractive(String),
    #[error("npc `{0}` does not need assistance")]
    NotAssistable(String),
    #[error("npc `{npc}`: {reason}")]
    Invalid { npc: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NpcRole {
    Doctor,
    Nurse,
    Visitor,
    Patient,
    AdminStaff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Activity {
    Walking,
    Talking,
    #[default]
    Standing,
    Sitting,
    Eating,
    Drinking,
    TakingCover,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecialState {
    Injured,
    UnderDebris,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutineStep {
    pub activity: Activity,
    pub duration: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub path: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriggerPattern {
    PlayerEntersRegion(String),
    PlayerAction(String),
    PhaseChange(Phase),
    /// Fires once `seconds` have passed in `phase`.
    PhaseElapsed {
        phase: Phase,
        seconds: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Response {
    Say(String),
    MoveTo(String),
    SetState(Activity),
    GrantInstruction(String),
    SetSpecial(SpecialState),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriggerRule {
    pub on: TriggerPattern,
    pub response: Vec<Response>,
    #[serde(default)]
    pub once: bool,
}

/// What happened in the world, as seen by trigger rules.
#[derive(Debug, Clone, PartialEq)]
pub enum NpcTrigger {
    PlayerEntersRegion(String),
    PlayerAction(String),
    PhaseChange(Phase),
    PhaseElapsed { phase: Phase, seconds: f64 },
}

impl TriggerPattern {
    pub fn matches(&self, ev: &NpcTrigger) -> bool {
        match (self, ev) {
            (TriggerPattern::PlayerEntersRegion(a), NpcTrigger::PlayerEntersRegion(b)) => a == b,
            (TriggerPattern::PlayerAction(a), NpcTrigger::PlayerAction(b)) => a == b,
            (TriggerPattern::PhaseChange(a), NpcTrigger::PhaseChange(b)) => a == b,
            (
                TriggerPattern::PhaseElapsed { phase, seconds },
                NpcTrigger::PhaseElapsed {
                    phase: p,
                    seconds: s,
                },
            ) => phase == p && *s + 1e-9 >= *seconds,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DialogueLine {
    pub speaker: NpcRole,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instruction {
    pub text: String,
    #[serde(default)]
    pub feedback: bool,
    #[serde(default)]
    pub evacuation: bool,
}

/// Lookup tables a trigger response may need.
#[derive(Debug, Clone, Copy)]
pub struct NpcContext<'a> {
    pub dialogue: &'a BTreeMap<String, DialogueLine>,
    pub instructions: &'a BTreeMap<String, Instruction>,
    pub graph: &'a WalkGraph,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct NpcState {
    pub activity: Activity,
    pub position: Vec2,
    pub routine_index: usize,
    pub elapsed: f64,
    /// Remaining waypoints of the current walk.
    pub path: Vec<Vec2>,
    /// Set once a trigger sent the agent somewhere; the routine stays paused.
    pub scripted: bool,
    /// Lines spoken so far, oldest first.
    pub dialogue: Vec<String>,
    pub fired: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NpcAgent {
    pub id: String,
    pub role: NpcRole,
    #[serde(default)]
    pub interactive: bool,
    pub start_node: String,
    #[serde(default)]
    pub routine: Vec<RoutineStep>,
    #[serde(default)]
    pub triggers: Vec<TriggerRule>,
    #[serde(default)]
    pub special_states: BTreeSet<SpecialState>,
    #[serde(default)]
    pub speed: Option<f64>,
    #[serde(skip)]
    pub state: NpcState,
}

impl NpcAgent {
    pub fn speed(&self) -> f64 {
        self.speed.unwrap_or(NPC_WALK_SPEED)
    }

    pub fn is_able(&self) -> bool {
        self.special_states.is_empty()
    }

    pub fn needs_help(&self) -> bool {
        !self.special_states.is_empty()
    }

    /// Checks the agent against the scenario tables and places it at its start node.
    pub fn init(&mut self, ctx: &NpcContext<'_>) -> Result<(), NpcError> {
        let bad = |reason: String| NpcError::Invalid {
            npc: self.id.clone(),
            reason,
        };
        let start = ctx
            .graph
            .position(&self.start_node)
            .ok_or_else(|| bad(format!("unknown start node `{}`", self.start_node)))?;
        if !self.interactive && !self.triggers.is_empty() {
            return Err(bad("non-interactive agents cannot have triggers".into()));
        }
        for step in &self.routine {
            if !(step.duration > 0.0) {
                return Err(bad("routine durations must be positive".into()));
            }
            if let Some(n) = step.path.iter().find(|n| ctx.graph.node(n).is_none()) {
                return Err(bad(format!("unknown path node `{n}`")));
            }
        }
        for rule in &self.triggers {
            if rule.response.is_empty() {
                return Err(bad("trigger response must not be empty".into()));
            }
            if matches!(rule.on, TriggerPattern::PhaseElapsed { .. }) && !rule.once {
                return Err(bad("phase_elapsed triggers must be once".into()));
            }
            for r in &rule.response {
                match r {
                    Response::Say(l) if !ctx.dialogue.contains_key(l) => {
                        return Err(bad(format!("unknown dialogue line `{l}`")))
                    }
                    Response::MoveTo(n) if ctx.graph.node(n).is_none() => {
                        return Err(bad(format!("unknown node `{n}`")))
                    }
                    Response::GrantInstruction(i) if !ctx.instructions.contains_key(i) => {
                        return Err(bad(format!("unknown instruction `{i}`")))
                    }
                    _ => {}
                }
            }
        }
        if self.speed.is_some_and(|s| !(s > 0.0)) {
            return Err(bad("speed must be positive".into()));
        }
        self.state = NpcState {
            position: start,
            ..Default::default()
        };
        if let Some(first) = self.routine.first() {
            self.state.activity = first.activity;
            self.state.path = path_positions(ctx.graph, &first.path);
        }
        Ok(())
    }

    fn set_activity(&mut self, a: Activity, out: &mut Vec<EventBody>) {
        if self.state.activity != a {
            self.state.activity = a;
            out.push(EventBody::NpcActivityChanged {
                npc: self.id.clone(),
                activity: a,
            });
        }
    }

    /// Moves along the current path; true when the path is used up.
    fn walk(&mut self, dt: f64) -> bool {
        let mut budget = self.speed() * dt;
        while budget > 0.0 {
            let Some(&target) = self.state.path.first() else {
                break;
            };
            let d = self.state.position.distance(target);
            if d <= budget {
                self.state.position = target;
                budget -= d;
                self.state.path.remove(0);
            } else {
                let dir = (target - self.state.position) * (1.0 / d);
                self.state.position += dir * budget;
                budget = 0.0;
            }
        }
        self.state.path.is_empty()
    }
}

fn path_positions(graph: &WalkGraph, nodes: &[String]) -> Vec<Vec2> {
    nodes.iter().filter_map(|n| graph.position(n)).collect()
}

/// Advances one agent by `dt`.
pub fn tick_npc(agent: &mut NpcAgent, phase: Phase, dt: f64, graph: &WalkGraph) -> Vec<EventBody> {
    let mut out = Vec::new();
    if !(dt > 0.0) {
        return out;
    }
    if phase == Phase::Earthquake {
        if agent.is_able() && agent.state.activity != Activity::TakingCover {
            agent.state.path.clear();
            agent.set_activity(Activity::TakingCover, &mut out);
        }
        return out;
    }
    if agent.state.activity == Activity::TakingCover {
        let resume = if agent.state.scripted {
            Activity::Standing
        } else {
            agent
                .routine
                .get(agent.state.routine_index)
                .map_or(Activity::Standing, |s| s.activity)
        };
        agent.set_activity(resume, &mut out);
    }
    if !agent.is_able() {
        return out;
    }
    if agent.state.scripted {
        if !agent.state.path.is_empty() && agent.walk(dt) {
            agent.set_activity(Activity::Standing, &mut out);
        }
        return out;
    }
    if agent.routine.is_empty() {
        return out;
    }
    if agent.state.activity == Activity::Walking {
        agent.walk(dt);
    }
    agent.state.elapsed += dt;
    loop {
        let dur = agent.routine[agent.state.routine_index].duration;
        if agent.state.elapsed + 1e-9 < dur {
            break;
        }
        agent.state.elapsed = (agent.state.elapsed - dur).max(0.0);
        agent.state.routine_index = (agent.state.routine_index + 1) % agent.routine.len();
        let step = agent.routine[agent.state.routine_index].clone();
        agent.state.path = path_positions(graph, &step.path);
        agent.set_activity(step.activity, &mut out);
    }
    out
}

/// Runs the first matching rule of an interactive agent.
pub fn fire_trigger(
    agent: &mut NpcAgent,
    ev: &NpcTrigger,
    ctx: &NpcContext<'_>,
) -> Result<Vec<EventBody>, NpcError> {
    if !agent.interactive {
        return Err(NpcError::NotInteractive(agent.id.clone()));
    }
    let mut out = Vec::new();
    let Some(idx) = agent
        .triggers
        .iter()
        .enumerate()
        .position(|(i, r)| !(r.once && agent.state.fired.contains(&i)) && r.on.matches(ev))
    else {
        return Ok(out);
    };
    let rule = agent.triggers[idx].clone();
    if rule.once {
        agent.state.fired.insert(idx);
    }
    for r in &rule.response {
        match r {
            Response::Say(line) => {
                let text = ctx
                    .dialogue
                    .get(line)
                    .map(|d| d.text.clone())
                    .unwrap_or_default();
                agent.state.dialogue.push(line.clone());
                out.push(EventBody::NpcSpoke {
                    npc: agent.id.clone(),
                    line: line.clone(),
                    text,
                });
            }
            Response::MoveTo(node) => {
                let from = nearest_node(ctx.graph, agent.state.position);
                let nodes = from
                    .and_then(|f| route(ctx.graph, &f, node))
                    .unwrap_or_else(|| vec![node.clone()]);
                agent.state.path = path_positions(ctx.graph, &nodes);
                agent.state.scripted = true;
                if agent.state.activity != Activity::TakingCover && agent.is_able() {
                    agent.set_activity(Activity::Walking, &mut out);
                }
                out.push(EventBody::NpcMoved {
                    npc: agent.id.clone(),
                    node: node.clone(),
                });
            }
            Response::SetState(a) => agent.set_activity(*a, &mut out),
            Response::GrantInstruction(id) => {
                let ins = &ctx.instructions[id];
                out.push(EventBody::InstructionGiven {
                    npc: agent.id.clone(),
                    instruction: id.clone(),
                    text: ins.text.clone(),
                    feedback: ins.feedback,
                    evacuation: ins.evacuation,
                });
            }
            Response::SetSpecial(s) => {
                if agent.special_states.insert(*s) {
                    agent.state.path.clear();
                    out.push(EventBody::NpcSpecialChanged {
                        npc: agent.id.clone(),
                        state: *s,
                        active: true,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Frees an injured or trapped agent.
pub fn assist(agent: &mut NpcAgent, by_player: bool) -> Result<Vec<EventBody>, NpcError> {
    if !agent.needs_help() {
        return Err(NpcError::NotAssistable(agent.id.clone()));
    }
    let mut out = Vec::new();
    for s in std::mem::take(&mut agent.special_states) {
        out.push(EventBody::NpcSpecialChanged {
            npc: agent.id.clone(),
            state: s,
            active: false,
        });
    }
    out.push(EventBody::NpcAssisted {
        npc: agent.id.clone(),
        by_player,
    });
    agent.state.scripted = true;
    agent.state.path.clear();
    agent.set_activity(Activity::Standing, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{WalkEdge, WalkNode};

    fn graph() -> WalkGraph {
        let node = |id: &str, x: f64| WalkNode {
            id: id.into(),
            position: Vec2::new(x, 0.0),
        };
        WalkGraph {
            nodes: vec![node("a", 0.0), node("b", 6.0), node("c", 12.0)],
            edges: vec![
                WalkEdge {
                    a: "a".into(),
                    b: "b".into(),
                    length: Some(6.0),
                },
                WalkEdge {
                    a: "b".into(),
                    b: "c".into(),
                    length: Some(6.0),
                },
            ],
        }
    }

    fn tables() -> (
        BTreeMap<String, DialogueLine>,
        BTreeMap<String, Instruction>,
    ) {
        let mut d = BTreeMap::new();
        d.insert(
            "leave".to_string(),
            DialogueLine {
                speaker: NpcRole::Doctor,
                text: "Put your things down.".into(),
            },
        );
        d.insert(
            "wait".to_string(),
            DialogueLine {
                speaker: NpcRole::Doctor,
                text: "Wait here.".into(),
            },
        );
        let mut i = BTreeMap::new();
        i.insert(
            "go".to_string(),
            Instruction {
                text: "Leave now.".into(),
                feedback: false,
                evacuation: true,
            },
        );
        (d, i)
    }

    fn agent(interactive: bool) -> NpcAgent {
        NpcAgent {
            id: "doc".into(),
            role: NpcRole::Doctor,
            interactive,
            start_node: "a".into(),
            routine: vec![
                RoutineStep {
                    activity: Activity::Walking,
                    duration: 5.0,
                    path: vec!["b".into()],
                },
                RoutineStep {
                    activity: Activity::Talking,
                    duration: 3.0,
                    path: vec![],
                },
            ],
            triggers: if interactive {
                vec![
                    TriggerRule {
                        on: TriggerPattern::PlayerEntersRegion("meeting_room".into()),
                        response: vec![Response::Say("leave".into())],
                        once: true,
                    },
                    TriggerRule {
                        on: TriggerPattern::PhaseChange(Phase::PreEvacuation),
                        response: vec![Response::MoveTo("c".into()), Response::Say("wait".into())],
                        once: false,
                    },
                ]
            } else {
                vec![]
            },
            special_states: BTreeSet::new(),
            speed: None,
            state: NpcState::default(),
        }
    }

    fn ready(interactive: bool) -> (NpcAgent, WalkGraph) {
        let g = graph();
        let (d, i) = tables();
        let mut a = agent(interactive);
        a.init(&NpcContext {
            dialogue: &d,
            instructions: &i,
            graph: &g,
        })
        .unwrap();
        (a, g)
    }

    #[test]
    fn routine_flips_after_duration() {
        let (mut a, g) = ready(false);
        let mut t = 0.0_f64;
        let mut flipped_at = None;
        for _ in 0..300 {
            let ev = tick_npc(&mut a, Phase::PreQuake, 0.02, &g);
            t += 0.02;
            if !ev.is_empty() && flipped_at.is_none() {
                flipped_at = Some(t);
            }
        }
        assert!((flipped_at.unwrap() - 5.0).abs() < 1e-6);
        assert_eq!(a.state.activity, Activity::Talking);
        // walked 1.2 m/s for 5 s toward b, which is 6 m away
        assert!((a.state.position.x - 6.0).abs() < 1e-9);
    }

    #[test]
    fn cover_within_one_tick_then_resume() {
        let (mut a, g) = ready(false);
        a.state.activity = Activity::Sitting;
        let ev = tick_npc(&mut a, Phase::Earthquake, 0.02, &g);
        assert_eq!(a.state.activity, Activity::TakingCover);
        assert_eq!(ev.len(), 1);
        tick_npc(&mut a, Phase::PreEvacuation, 0.02, &g);
        assert_ne!(a.state.activity, Activity::TakingCover);
    }

    #[test]
    fn injured_do_not_take_cover() {
        let (mut a, g) = ready(false);
        a.special_states.insert(SpecialState::Injured);
        a.state.activity = Activity::Sitting;
        assert!(tick_npc(&mut a, Phase::Earthquake, 0.02, &g).is_empty());
        assert_eq!(a.state.activity, Activity::Sitting);
    }

    #[test]
    fn zero_dt_is_noop() {
        let (mut a, g) = ready(false);
        let before = a.clone();
        assert!(tick_npc(&mut a, Phase::Earthquake, 0.0, &g).is_empty());
        assert_eq!(a, before);
    }

    #[test]
    fn triggers() {
        let (mut a, g) = ready(true);
        let (d, i) = tables();
        let ctx = NpcContext {
            dialogue: &d,
            instructions: &i,
            graph: &g,
        };
        let ev = fire_trigger(
            &mut a,
            &NpcTrigger::PlayerEntersRegion("meeting_room".into()),
            &ctx,
        )
        .unwrap();
        assert!(matches!(&ev[..], [EventBody::NpcSpoke { line, .. }] if line == "leave"));
        // once-rule consumed
        let ev = fire_trigger(
            &mut a,
            &NpcTrigger::PlayerEntersRegion("meeting_room".into()),
            &ctx,
        )
        .unwrap();
        assert!(ev.is_empty());
        let ev =
            fire_trigger(&mut a, &NpcTrigger::PhaseChange(Phase::PreEvacuation), &ctx).unwrap();
        assert!(ev
            .iter()
            .any(|e| matches!(e, EventBody::NpcMoved { node, .. } if node == "c")));
        assert!(ev
            .iter()
            .any(|e| matches!(e, EventBody::NpcSpoke { line, .. } if line == "wait")));
        assert!(
            fire_trigger(&mut a, &NpcTrigger::PlayerAction("nothing".into()), &ctx)
                .unwrap()
                .is_empty()
        );
        // walks to c along b
        for _ in 0..1000 {
            tick_npc(&mut a, Phase::PreEvacuation, 0.02, &g);
        }
        assert_eq!(a.state.position, Vec2::new(12.0, 0.0));
        assert_eq!(a.state.activity, Activity::Standing);
        let (mut plain, _) = ready(false);
        assert_eq!(
            fire_trigger(
                &mut plain,
                &NpcTrigger::PhaseChange(Phase::PreEvacuation),
                &ctx
            ),
            Err(NpcError::NotInteractive("doc".into()))
        );
    }

    #[test]
    fn assist_once() {
        let (mut a, _) = ready(false);
        assert_eq!(
            assist(&mut a, true),
            Err(NpcError::NotAssistable("doc".into()))
        );
        a.special_states.insert(SpecialState::UnderDebris);
        let ev = assist(&mut a, true).unwrap();
        assert!(ev.contains(&EventBody::NpcAssisted {
            npc: "doc".into(),
            by_player: true
        }));
        assert!(a.special_states.is_empty());
        assert!(assist(&mut a, true).is_err());
    }

    #[test]
    fn init_rejects_bad_agents() {
        let g = graph();
        let (d, i) = tables();
        let ctx = NpcContext {
            dialogue: &d,
            instructions: &i,
            graph: &g,
        };
        let mut a = agent(false);
        a.triggers = agent(true).triggers;
        assert!(a.init(&ctx).is_err());
        let mut a = agent(true);
        a.triggers[0].response = vec![Response::Say("ghost".into())];
        assert!(a.init(&ctx).is_err());
        let mut a = agent(false);
        a.routine[0].duration = 0.0;
        assert!(a.init(&ctx).is_err());
    }
}
