use super::catalog::{ActionDef, Effect, OccupantRole, Requirement};
use super::phase::{next_phase, IllegalTransition, Mode, Phase, PhaseEvent};
use super::scenario::Scenario;
use crate::npc::{assist, NpcAgent, NpcTrigger};
use crate::scene::SceneGraph;
use crate::telemetry::EventBody;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StoryError {
    #[error("action `{0}` is not available")]
    ActionUnavailable(String),
    #[error("session is incomplete: {0}")]
    IncompleteSession(String),
    #[error(transparent)]
    Illegal(#[from] IllegalTransition),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timer {
    pub due: f64,
    pub action: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoryState {
    pub mode: Mode,
    pub role: OccupantRole,
    pub phase: Phase,
    pub phase_since: f64,
    pub step: usize,
    pub flags: BTreeSet<String>,
    pub taken: BTreeSet<String>,
    /// Instructions received from NPCs, oldest first.
    pub pending_instructions: Vec<String>,
    pub clock: f64,
    pub under_cover_since: Option<f64>,
    pub timer: Option<Timer>,
    /// Current (or, while travelling, next) wait point in training mode.
    pub waitpoint: Option<String>,
    pub in_transit: bool,
    pub terminal: bool,
    queued: Vec<(PhaseEvent, Option<String>)>,
}

/// Mutable world pieces an action can touch.
pub struct World<'a> {
    pub scene: &'a mut SceneGraph,
    pub npcs: &'a mut [NpcAgent],
    pub region: &'a str,
}

/// What the session must do after an action besides logging `events`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ActionOutcome {
    pub events: Vec<EventBody>,
    pub move_player: Option<String>,
    /// Next wait point and the trajectory leading there.
    pub travel: Option<(String, Vec<String>)>,
    pub npc_triggers: Vec<NpcTrigger>,
}

impl StoryState {
    pub fn new(scenario: &Scenario, role: OccupantRole) -> Self {
        StoryState {
            mode: scenario.mode,
            role,
            phase: Phase::PreQuake,
            phase_since: 0.0,
            step: 0,
            flags: BTreeSet::new(),
            taken: BTreeSet::new(),
            pending_instructions: Vec::new(),
            clock: 0.0,
            under_cover_since: None,
            timer: None,
            waitpoint: scenario.waitpoints.as_ref().map(|w| w.start.clone()),
            in_transit: false,
            terminal: false,
            queued: Vec::new(),
        }
    }

    fn advance_clock(&mut self, t: f64) {
        self.clock = self.clock.max(t);
    }

    pub fn queue(&mut self, event: PhaseEvent) {
        self.queued.push((event, None));
    }

    pub fn has_queued(&self) -> bool {
        !self.queued.is_empty()
    }

    /// Ends cover, if taken. Returns the log event.
    pub fn leave_cover(&mut self, t: f64) -> Option<EventBody> {
        let since = self.under_cover_since.take()?;
        self.flags.remove("under_cover");
        self.advance_clock(t);
        Some(EventBody::CoverLeft { under_since: since })
    }

    pub fn note_instruction(&mut self, id: &str) {
        self.pending_instructions.push(id.to_string());
    }

    /// Moves the phase machine on `event`.
    pub fn phase_transition(
        &mut self,
        scenario: &Scenario,
        event: PhaseEvent,
        t: f64,
    ) -> Result<(Phase, Vec<EventBody>), IllegalTransition> {
        let next = next_phase(self.mode, self.phase, event)?;
        self.advance_clock(t);
        let mut out = Vec::new();
        if next != self.phase {
            out.push(EventBody::PhaseChanged {
                from: self.phase,
                to: next,
            });
            self.phase = next;
            self.phase_since = self.clock;
            if let Some(i) = scenario.steps.iter().position(|s| s.phase == next) {
                self.step = i;
            }
        }
        Ok((next, out))
    }

    /// Applies queued phase events in order.
    pub fn process_queued(
        &mut self,
        scenario: &Scenario,
        t: f64,
    ) -> Result<Vec<EventBody>, IllegalTransition> {
        let mut out = Vec::new();
        for (ev, action) in std::mem::take(&mut self.queued) {
            let (_, evs) = self.phase_transition(scenario, ev, t)?;
            out.extend(evs);
            if ev == PhaseEvent::TerminalChoice {
                self.terminal = true;
                self.timer = None;
                out.push(EventBody::TerminalReached {
                    action: action.unwrap_or_default(),
                });
            }
        }
        Ok(out)
    }

    fn requirement_holds(&self, r: &Requirement, scene: &SceneGraph, npcs: &[NpcAgent]) -> bool {
        match r {
            Requirement::Flag(f) => self.flags.contains(f),
            Requirement::NotFlag(f) => !self.flags.contains(f),
            Requirement::Interactable { id, state } => scene
                .interactable(id)
                .is_some_and(|i| i.current_state() == *state),
            Requirement::NpcNeedsHelp(n) => npcs.iter().any(|a| &a.id == n && a.needs_help()),
        }
    }

    /// Actions the player may choose right now, in catalog order.
    pub fn available_actions<'s>(
        &self,
        scenario: &'s Scenario,
        scene: &SceneGraph,
        npcs: &[NpcAgent],
        region: &str,
    ) -> Vec<&'s ActionDef> {
        if self.terminal || self.in_transit || self.has_queued() {
            return Vec::new();
        }
        let wp = match self.mode {
            Mode::Tp => {
                let graph = scenario.waitpoints.as_ref();
                match self.waitpoint.as_deref().and_then(|id| graph?.get(id)) {
                    Some(w) => Some(w),
                    None => return Vec::new(),
                }
            }
            Mode::Bp => None,
        };
        scenario
            .actions
            .iter()
            .filter(|a| !a.auto && a.phases.contains(&self.phase))
            .filter(|a| a.repeatable || !self.taken.contains(&a.id))
            .filter(|a| match wp {
                Some(w) => w.offers(&a.id),
                None => a.regions.is_empty() || a.regions.iter().any(|r| r == region),
            })
            .filter(|a| {
                a.requires
                    .iter()
                    .all(|r| self.requirement_holds(r, scene, npcs))
            })
            .collect()
    }

    /// Takes a player-chosen action.
    pub fn apply_action(
        &mut self,
        scenario: &Scenario,
        world: World<'_>,
        id: &str,
        t: f64,
    ) -> Result<ActionOutcome, StoryError> {
        let available = self.available_actions(scenario, world.scene, world.npcs, world.region);
        let Some(action) = available.into_iter().find(|a| a.id == id) else {
            return Err(StoryError::ActionUnavailable(id.to_string()));
        };
        self.advance_clock(t);
        self.timer = None;
        let mut out = ActionOutcome::default();
        if !action.keeps_cover {
            out.events.extend(self.leave_cover(t));
        }
        self.run_effects(world, action, false, &mut out)?;
        if self.mode == Mode::Tp && !self.terminal_pending() {
            let graph = scenario
                .waitpoints
                .as_ref()
                .expect("training scenarios carry waitpoints");
            let here = self.waitpoint.clone().unwrap_or_default();
            if let Ok((next, trajectory)) = graph.advance(&here, id) {
                if next.id != here || !trajectory.is_empty() {
                    self.waitpoint = Some(next.id.clone());
                    self.in_transit = true;
                    out.travel = Some((next.id.clone(), trajectory));
                }
            }
        }
        out.npc_triggers
            .push(NpcTrigger::PlayerAction(id.to_string()));
        Ok(out)
    }

    fn terminal_pending(&self) -> bool {
        self.queued
            .iter()
            .any(|(e, _)| *e == PhaseEvent::TerminalChoice)
    }

    /// Fires a due timer action, if any.
    pub fn fire_timer(
        &mut self,
        scenario: &Scenario,
        world: World<'_>,
        t: f64,
    ) -> Result<ActionOutcome, StoryError> {
        let mut out = ActionOutcome::default();
        let due = matches!(&self.timer, Some(tm) if t + 1e-9 >= tm.due);
        if !due || self.terminal {
            return Ok(out);
        }
        let tm = self.timer.take().expect("checked");
        let action = scenario
            .action(&tm.action)
            .ok_or_else(|| StoryError::ActionUnavailable(tm.action.clone()))?;
        self.advance_clock(t);
        self.run_effects(world, action, true, &mut out)?;
        Ok(out)
    }

    fn run_effects(
        &mut self,
        world: World<'_>,
        action: &ActionDef,
        auto: bool,
        out: &mut ActionOutcome,
    ) -> Result<(), StoryError> {
        let t = self.clock;
        self.taken.insert(action.id.clone());
        out.events.push(EventBody::ActionTaken {
            action: action.id.clone(),
            recommended: action.recommended,
            phase: self.phase,
            tags: action.tags.clone(),
            auto,
        });
        for e in &action.effects {
            match e {
                Effect::SetFlag(f) => {
                    self.flags.insert(f.clone());
                }
                Effect::ClearFlag(f) => {
                    self.flags.remove(f);
                }
                Effect::SetInteractable { id, state } => {
                    if let Some(it) = world.scene.interactable_mut(id) {
                        if it.current_state() != *state {
                            it.state = Some(*state);
                            out.events.push(EventBody::InteractableChanged {
                                interactable: id.clone(),
                                state: *state,
                            });
                        }
                    }
                }
                Effect::PhaseEvent(ev) => self.queued.push((*ev, Some(action.id.clone()))),
                Effect::AssistNpc(n) => {
                    if let Some(agent) = world.npcs.iter_mut().find(|a| &a.id == n) {
                        if let Ok(evs) = assist(agent, true) {
                            out.events.extend(evs);
                        }
                    }
                }
                Effect::TakeCover => {
                    if self.under_cover_since.is_none() {
                        self.under_cover_since = Some(t);
                    }
                    self.flags.insert("under_cover".into());
                }
                Effect::StartTimer { seconds, action } => {
                    self.timer = Some(Timer {
                        due: t + seconds,
                        action: action.clone(),
                    });
                }
                Effect::MovePlayer(n) => out.move_player = Some(n.clone()),
                Effect::ReachAssembly(n) => {
                    let safe = world
                        .scene
                        .assembly_areas
                        .iter()
                        .any(|a| &a.node == n && a.safe);
                    out.events.push(EventBody::AssemblyReached {
                        node: n.clone(),
                        safe,
                    });
                }
                Effect::Terminal => self
                    .queued
                    .push((PhaseEvent::TerminalChoice, Some(action.id.clone()))),
            }
        }
        Ok(())
    }

    /// Where a training wait point tied to a finished phase falls back to.
    pub fn phase_fallback(&self, scenario: &Scenario) -> Option<String> {
        if self.mode != Mode::Tp || self.in_transit || self.terminal {
            return None;
        }
        let graph = scenario.waitpoints.as_ref()?;
        let w = graph.get(self.waitpoint.as_deref()?)?;
        match w.phase {
            Some(p) if p != self.phase => w.on_phase_exit.clone(),
            _ => None,
        }
    }

    /// Records arrival at the current wait point after travelling.
    pub fn arrive(&mut self) -> Option<EventBody> {
        if !self.in_transit {
            return None;
        }
        self.in_transit = false;
        self.waitpoint
            .clone()
            .map(|w| EventBody::WaitPointReached { waitpoint: w })
    }

    /// Starts travel to another wait point outside of an action.
    pub fn depart(&mut self, next: &str) {
        self.waitpoint = Some(next.to_string());
        self.in_transit = true;
    }
}
