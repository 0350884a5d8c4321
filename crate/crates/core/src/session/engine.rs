use super::config::{InputSource, SessionConfig};
use super::script::{parse_script, Command, ScriptLine};
use super::snapshot::{
    ActionView, DialogueView, FullState, NpcView, ObjectView, PanelView, PlayerView, Snapshot,
};
use super::SessionError;
use crate::damage::{
    apply_damage, precompute_relocation, DamageTrigger, RelocationBatcher,
    DEFAULT_RELOCATION_BUDGET,
};
use crate::geom::{wrap_angle, Vec2};
use crate::navigation::{
    gaze_move, nearest_node, route, select_among, PlayerPose, TrajectoryPlayer,
    DEFAULT_CONE_HALF_ANGLE, PLAYER_WALK_SPEED,
};
use crate::npc::{fire_trigger, tick_npc, NpcAgent, NpcTrigger};
use crate::quake::{generate_signal_at, step_in, ActiveRegions, PhysicsParams, QuakeSignal};
use crate::scene::{region_of, restage, InteractableState, SceneGraph};
use crate::story::{
    build_report, FeedbackReport, Mode, Phase, PhaseEvent, Scenario, StoryState, World,
};
use crate::telemetry::{extract_bp_metrics, BehaviouralRecord, Event, EventBody, EventLog};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// What a finished session produced besides its log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Outcome {
    Behavioural { record: BehaviouralRecord },
    Feedback { report: FeedbackReport },
    Aborted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionResult {
    pub session: String,
    pub config: SessionConfig,
    pub log: Vec<Event>,
    pub outcome: Outcome,
}

impl SessionResult {
    /// Writes `events.jsonl`, `config.json` and `record.json` or `report.json`.
    pub fn write_artifacts(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut lines = String::new();
        for e in &self.log {
            lines.push_str(&serde_json::to_string(e).map_err(std::io::Error::other)?);
            lines.push('\n');
        }
        std::fs::write(dir.join("events.jsonl"), lines)?;
        std::fs::write(dir.join("config.json"), pretty(&self.config))?;
        match &self.outcome {
            Outcome::Behavioural { record } => {
                std::fs::write(dir.join("record.json"), pretty(record))?
            }
            Outcome::Feedback { report } => {
                std::fs::write(dir.join("report.json"), pretty(report))?
            }
            Outcome::Aborted => {}
        }
        Ok(())
    }
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

/// One play-through: owns its scene copy, NPCs, story state and log, and
/// advances in fixed ticks.
pub struct Session {
    config: SessionConfig,
    id: String,
    scenario: Scenario,
    scene: SceneGraph,
    npcs: Vec<NpcAgent>,
    story: StoryState,
    player: PlayerPose,
    held: bool,
    physics: PhysicsParams,
    signal: QuakeSignal,
    active: ActiveRegions,
    quake_ticks: u64,
    quake_total: u64,
    quake_started: bool,
    damage_done: bool,
    batcher: RelocationBatcher,
    trajectory: Option<TrajectoryPlayer>,
    tick: u64,
    log: EventLog,
    pending: [Option<Command>; 3],
    script: Vec<ScriptLine>,
    script_pos: usize,
    npc_queue: Vec<NpcTrigger>,
    last_objects: Vec<ObjectView>,
    last_npcs: Vec<NpcView>,
    last_interactables: Vec<InteractableState>,
    report: Option<FeedbackReport>,
    ended: Option<bool>,
    first_snapshot: Option<Snapshot>,
}

impl std::fmt::Debug for Session {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Session")
            .field("id", &self.id)
            .field("tick", &self.tick)
            .finish_non_exhaustive()
    }
}

fn object_views(scene: &SceneGraph) -> Vec<ObjectView> {
    scene
        .objects
        .iter()
        .map(|o| ObjectView {
            pose: o.pose,
            variant: o.active_variant.clone(),
            toppled: o.toppled,
        })
        .collect()
}

fn npc_views(npcs: &[NpcAgent]) -> Vec<NpcView> {
    npcs.iter()
        .map(|a| NpcView {
            position: a.state.position,
            activity: a.state.activity,
            special: a.special_states.iter().copied().collect(),
        })
        .collect()
}

impl Session {
    /// Loads the assets named by `config` and creates a session at tick 0.
    pub fn new(config: SessionConfig) -> Result<Self, SessionError> {
        let (scene, scenario) = config.load_assets()?;
        Session::from_parts(config, scene, scenario)
    }

    /// Creates a session from already loaded assets.
    pub fn from_parts(
        config: SessionConfig,
        mut scene: SceneGraph,
        scenario: Scenario,
    ) -> Result<Self, SessionError> {
        config.validate()?;
        if scenario.mode != config.mode {
            return Err(SessionError::Config(
                "config mode does not match the scenario".into(),
            ));
        }
        if let Some(on) = &scenario.on_stage_regions {
            restage(&mut scene, on).map_err(|e| SessionError::Config(e.to_string()))?;
        }
        let script = match &config.input {
            InputSource::Interactive => Vec::new(),
            InputSource::Script(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| SessionError::Config(format!("{p}: {e}")))?;
                parse_script(&text).map_err(|e| SessionError::Config(format!("{p}: {e}")))?
            }
        };
        let dt = config.tick;
        let physics = PhysicsParams {
            dt,
            ..PhysicsParams::default()
        };
        let duration = scenario.quake.duration;
        let signal = generate_signal_at(&scenario.quake.params, duration, config.seed, dt)
            .map_err(|e| SessionError::Config(e.to_string()))?;
        let off = scene.off_stage_region_ids();
        let list = precompute_relocation(&scene, &off, &signal, &physics)
            .map_err(|e| SessionError::Internal(e.to_string()))?;
        let budget = scenario
            .relocation_budget
            .unwrap_or(DEFAULT_RELOCATION_BUDGET);
        let batcher = RelocationBatcher::new(&scene, &list, budget)
            .map_err(|e| SessionError::Config(e.to_string()))?;
        let active = ActiveRegions::on_stage(&scene);

        let start = scene
            .walk_graph
            .position(&scenario.start_node)
            .ok_or_else(|| SessionError::Config("unknown start node".into()))?;
        let region = region_of(&scene, start)
            .map_err(|e| SessionError::Config(e.to_string()))?
            .id
            .clone();
        let mut story = StoryState::new(&scenario, config.occupant_role);
        let heading = match (&scenario.waitpoints, &story.waitpoint) {
            (Some(g), Some(w)) => g.get(w).map_or(0.0, |w| w.facing),
            _ => 0.0,
        };
        story.clock = 0.0;
        let npcs = scenario.npcs.clone();
        let id = config.session_id();
        let mut log = EventLog::new();
        log.record(Event::new(
            0.0,
            EventBody::SessionStarted {
                session: id.clone(),
                mode: config.mode,
                occupant_role: config.occupant_role,
                seed: config.seed,
            },
        ))
        .expect("first event");
        let quake_total = (duration / dt).round() as u64;
        let mut s = Session {
            id,
            scenario,
            last_objects: object_views(&scene),
            last_npcs: npc_views(&npcs),
            last_interactables: scene
                .interactables
                .iter()
                .map(|i| i.current_state())
                .collect(),
            scene,
            npcs,
            story,
            player: PlayerPose {
                position: start,
                heading,
                current_region: region,
            },
            held: false,
            physics,
            signal,
            active,
            quake_ticks: 0,
            quake_total,
            quake_started: false,
            damage_done: false,
            batcher,
            trajectory: None,
            tick: 0,
            log,
            pending: [None, None, None],
            script,
            script_pos: 0,
            npc_queue: Vec::new(),
            report: None,
            ended: None,
            first_snapshot: None,
            config,
        };
        s.first_snapshot = Some(s.full_snapshot(Vec::new()));
        Ok(s)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn time(&self) -> f64 {
        self.tick as f64 * self.config.tick
    }

    pub fn dt(&self) -> f64 {
        self.config.tick
    }

    pub fn phase(&self) -> Phase {
        self.story.phase
    }

    pub fn story(&self) -> &StoryState {
        &self.story
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn scene(&self) -> &SceneGraph {
        &self.scene
    }

    pub fn npcs(&self) -> &[NpcAgent] {
        &self.npcs
    }

    pub fn player(&self) -> &PlayerPose {
        &self.player
    }

    pub fn log(&self) -> &[Event] {
        self.log.events()
    }

    pub fn signal(&self) -> &QuakeSignal {
        &self.signal
    }

    pub fn is_terminal(&self) -> bool {
        self.story.terminal
    }

    pub fn is_ended(&self) -> bool {
        self.ended.is_some()
    }

    pub fn relocation_done(&self) -> bool {
        self.batcher.is_done()
    }

    pub fn report(&self) -> Option<&FeedbackReport> {
        self.report.as_ref()
    }

    /// The tick-0 snapshot carrying the complete world.
    pub fn initial_snapshot(&self) -> &Snapshot {
        self.first_snapshot.as_ref().expect("built in constructor")
    }

    /// Queues a command for the next tick. A later command of the same kind
    /// replaces an earlier one.
    pub fn submit_input(&mut self, cmd: Command) -> Result<(), SessionError> {
        if self.ended.is_some() {
            return Err(SessionError::SessionEnded);
        }
        if let Command::Select {
            action_id: Some(id),
        } = &cmd
        {
            if self.scenario.action(id).is_none() {
                return Err(SessionError::UnknownCommand(format!(
                    "no action `{id}` in this scenario"
                )));
            }
        }
        if let Command::Look { heading } = &cmd {
            if !heading.is_finite() {
                return Err(SessionError::UnknownCommand(
                    "heading must be finite".into(),
                ));
            }
        }
        let slot = cmd.slot();
        self.pending[slot] = Some(cmd);
        Ok(())
    }

    /// Parses a JSON command, as received over the wire.
    pub fn submit_json(&mut self, text: &str) -> Result<(), SessionError> {
        let cmd: Command =
            serde_json::from_str(text).map_err(|e| SessionError::UnknownCommand(e.to_string()))?;
        self.submit_input(cmd)
    }

    /// Ids of the actions the player may pick now.
    pub fn available_actions(&self) -> Vec<String> {
        self.story
            .available_actions(
                &self.scenario,
                &self.scene,
                &self.npcs,
                &self.player.current_region,
            )
            .into_iter()
            .map(|a| a.id.clone())
            .collect()
    }

    /// Choice panels visible at the current stop, with world headings.
    pub fn panels(&self) -> Vec<PanelView> {
        if self.story.in_transit || self.story.terminal {
            return Vec::new();
        }
        let Some(graph) = &self.scenario.waitpoints else {
            return Vec::new();
        };
        let Some(w) = self.story.waitpoint.as_deref().and_then(|id| graph.get(id)) else {
            return Vec::new();
        };
        let available = self.available_actions();
        w.panels
            .iter()
            .filter(|p| available.contains(&p.action))
            .map(|p| PanelView {
                action: p.action.clone(),
                label: p.label.clone(),
                heading: wrap_angle(w.facing + p.bearing),
            })
            .collect()
    }

    fn action_views(&self) -> Vec<ActionView> {
        self.story
            .available_actions(
                &self.scenario,
                &self.scene,
                &self.npcs,
                &self.player.current_region,
            )
            .into_iter()
            .map(|a| ActionView {
                id: a.id.clone(),
                label: a.label.clone(),
            })
            .collect()
    }

    fn player_view(&self) -> PlayerView {
        PlayerView {
            position: self.player.position,
            heading: self.player.heading,
            region: self.player.current_region.clone(),
        }
    }

    fn base_snapshot(&self, full: bool, events: Vec<Event>) -> Snapshot {
        let dialogue = events
            .iter()
            .filter_map(|e| match &e.body {
                EventBody::NpcSpoke { npc, line, text } => Some(DialogueView {
                    npc: npc.clone(),
                    line: line.clone(),
                    text: text.clone(),
                }),
                _ => None,
            })
            .collect();
        Snapshot {
            session: self.id.clone(),
            tick: self.tick,
            t: self.time(),
            full,
            phase: self.story.phase,
            player: self.player_view(),
            objects: BTreeMap::new(),
            npcs: BTreeMap::new(),
            interactables: BTreeMap::new(),
            available_actions: self.action_views(),
            panels: self.panels(),
            waitpoint: self.story.waitpoint.clone(),
            in_transit: self.story.in_transit,
            terminal: self.story.terminal,
            dialogue,
            events,
        }
    }

    /// Snapshot with every object, NPC and interactable.
    pub fn full_snapshot(&self, events: Vec<Event>) -> Snapshot {
        let mut s = self.base_snapshot(true, events);
        for (o, v) in self.scene.objects.iter().zip(object_views(&self.scene)) {
            s.objects.insert(o.id.clone(), v);
        }
        for (a, v) in self.npcs.iter().zip(npc_views(&self.npcs)) {
            s.npcs.insert(a.id.clone(), v);
        }
        for i in &self.scene.interactables {
            s.interactables.insert(i.id.clone(), i.current_state());
        }
        s
    }

    /// The world as a client should see it after folding every snapshot.
    pub fn full_state(&self) -> FullState {
        FullState::from_full(&self.full_snapshot(Vec::new()))
    }

    fn delta_snapshot(&mut self, events: Vec<Event>) -> Snapshot {
        let mut s = self.base_snapshot(false, events);
        for (i, o) in self.scene.objects.iter().enumerate() {
            let last = &mut self.last_objects[i];
            if last.pose != o.pose || last.variant != o.active_variant || last.toppled != o.toppled
            {
                *last = ObjectView {
                    pose: o.pose,
                    variant: o.active_variant.clone(),
                    toppled: o.toppled,
                };
                s.objects.insert(o.id.clone(), last.clone());
            }
        }
        for (i, a) in self.npcs.iter().enumerate() {
            let last = &mut self.last_npcs[i];
            let changed = last.position != a.state.position
                || last.activity != a.state.activity
                || !last
                    .special
                    .iter()
                    .copied()
                    .eq(a.special_states.iter().copied());
            if changed {
                *last = NpcView {
                    position: a.state.position,
                    activity: a.state.activity,
                    special: a.special_states.iter().copied().collect(),
                };
                s.npcs.insert(a.id.clone(), last.clone());
            }
        }
        for (i, it) in self.scene.interactables.iter().enumerate() {
            let st = it.current_state();
            if self.last_interactables[i] != st {
                self.last_interactables[i] = st;
                s.interactables.insert(it.id.clone(), st);
            }
        }
        s
    }

    fn set_region(&mut self, out: &mut Vec<EventBody>) {
        if let Ok(r) = region_of(&self.scene, self.player.position) {
            if r.id != self.player.current_region {
                self.player.current_region = r.id.clone();
                out.push(EventBody::RegionEntered {
                    region: r.id.clone(),
                });
                self.npc_queue
                    .push(NpcTrigger::PlayerEntersRegion(r.id.clone()));
            }
        }
    }

    fn start_travel(&mut self, nodes: Vec<String>, out: &mut Vec<EventBody>) {
        let player = TrajectoryPlayer::new(&self.scene.walk_graph, &nodes, PLAYER_WALK_SPEED);
        if player.is_done()
            || nodes
                .iter()
                .all(|n| self.scene.walk_graph.position(n) == Some(self.player.position))
        {
            self.trajectory = None;
            out.extend(self.story.arrive());
            self.face_waitpoint();
        } else {
            self.trajectory = Some(player);
        }
    }

    fn face_waitpoint(&mut self) {
        if let (Some(g), Some(w)) = (&self.scenario.waitpoints, &self.story.waitpoint) {
            if let Some(w) = g.get(w) {
                self.player.heading = w.facing;
            }
        }
    }

    fn waitpoint_node(&self, id: &str) -> Option<String> {
        self.scenario
            .waitpoints
            .as_ref()?
            .get(id)
            .map(|w| w.node.clone())
    }

    fn select(&mut self, action_id: Option<String>, t: f64, out: &mut Vec<EventBody>) {
        let id = match (action_id, self.config.mode) {
            (Some(id), _) => id,
            (None, Mode::Tp) => {
                let graph = self.scenario.waitpoints.as_ref();
                let wp = self.story.waitpoint.as_deref().and_then(|w| graph?.get(w));
                let available = self.available_actions();
                let picked = wp.and_then(|w| {
                    let visible: Vec<_> = w
                        .panels
                        .iter()
                        .filter(|p| available.contains(&p.action))
                        .collect();
                    select_among(
                        self.player.heading,
                        w.facing,
                        visible.into_iter(),
                        DEFAULT_CONE_HALF_ANGLE,
                    )
                    .map(|p| p.action.clone())
                });
                match picked {
                    Some(a) => a,
                    None => {
                        out.push(EventBody::ActionRejected {
                            action: String::new(),
                            reason: "no panel under the current heading".into(),
                        });
                        return;
                    }
                }
            }
            (None, Mode::Bp) => {
                out.push(EventBody::ActionRejected {
                    action: String::new(),
                    reason: "no action id given".into(),
                });
                return;
            }
        };
        let region = self.player.current_region.clone();
        let world = World {
            scene: &mut self.scene,
            npcs: &mut self.npcs,
            region: &region,
        };
        match self.story.apply_action(&self.scenario, world, &id, t) {
            Ok(o) => {
                out.extend(o.events);
                self.npc_queue.extend(o.npc_triggers);
                if let Some(n) = o.move_player {
                    if let Some(p) = self.scene.walk_graph.position(&n) {
                        self.player.position = p;
                        out.push(EventBody::PlayerRelocated {
                            node: n,
                            position: p,
                        });
                        self.set_region(out);
                    }
                }
                if let Some((next, mut trajectory)) = o.travel {
                    if let Some(node) = self.waitpoint_node(&next) {
                        trajectory.push(node);
                    }
                    self.start_travel(trajectory, out);
                }
            }
            Err(e) => out.push(EventBody::ActionRejected {
                action: id,
                reason: e.to_string(),
            }),
        }
    }

    fn move_player(&mut self, out: &mut Vec<EventBody>) {
        let dt = self.config.tick;
        match self.config.mode {
            Mode::Bp => {
                if !self.held || self.story.terminal {
                    return;
                }
                let next = gaze_move(&self.player, true, dt, PLAYER_WALK_SPEED, &self.scene);
                if next.position != self.player.position {
                    out.extend(self.story.leave_cover(self.time()));
                    self.player.position = next.position;
                    self.set_region(out);
                }
            }
            Mode::Tp => {
                let Some(tp) = self.trajectory.as_mut() else {
                    return;
                };
                let from = self.player.position;
                let p = tp.step(from, dt);
                let done = tp.is_done();
                if let Some(d) = (p - from).normalized() {
                    self.player.heading = d.angle();
                }
                self.player.position = p;
                self.set_region(out);
                if done {
                    self.trajectory = None;
                    out.extend(self.story.arrive());
                    self.face_waitpoint();
                }
            }
        }
    }

    fn damage_due(&self) -> bool {
        if self.damage_done || !self.quake_started {
            return false;
        }
        match self.scenario.damage_spec.trigger {
            DamageTrigger::AtQuakeStart => true,
            DamageTrigger::AtQuakeEnd => self.story.phase > Phase::Earthquake,
            DamageTrigger::AtTime(s) => {
                self.story.phase > Phase::Earthquake
                    || self.quake_ticks as f64 * self.config.tick + 1e-9 >= s
            }
        }
    }

    /// Advances one tick and returns its snapshot.
    pub fn step(&mut self) -> Result<Snapshot, SessionError> {
        if self.ended.is_some() {
            return Err(SessionError::SessionEnded);
        }
        self.tick += 1;
        let t = self.time();
        let dt = self.config.tick;
        let mut out: Vec<EventBody> = Vec::new();

        while self.script_pos < self.script.len() && self.script[self.script_pos].tick <= self.tick
        {
            let cmd = self.script[self.script_pos].command.clone();
            let slot = cmd.slot();
            self.pending[slot] = Some(cmd);
            self.script_pos += 1;
        }

        // inputs and locomotion
        if let Some(Command::Look { heading }) = self.pending[0].take() {
            if self.config.mode == Mode::Bp || self.trajectory.is_none() {
                self.player.heading = wrap_angle(heading);
            }
        }
        if let Some(Command::Move { held }) = self.pending[1].take() {
            self.held = held;
        }
        if let Some(Command::Select { action_id }) = self.pending[2].take() {
            self.select(action_id, t, &mut out);
        }
        self.move_player(&mut out);

        // shaking
        if self.story.phase == Phase::Earthquake {
            self.quake_started = true;
            if self.quake_ticks < self.quake_total {
                let tq = self.quake_ticks as f64 * dt;
                let rep = step_in(
                    &mut self.scene,
                    &self.signal,
                    tq,
                    &self.physics,
                    &self.active,
                )
                .map_err(|e| SessionError::Internal(e.to_string()))?;
                out.extend(rep.events.into_iter().map(EventBody::from));
                self.quake_ticks += 1;
            }
            if self.quake_ticks >= self.quake_total && !self.story.has_queued() {
                self.story.queue(PhaseEvent::QuakeEnded);
            }
        }

        // damage and off-stage relocation
        if self.damage_due() {
            let evs = apply_damage(&mut self.scene, &self.scenario.damage_spec)
                .map_err(|e| SessionError::Internal(e.to_string()))?;
            out.extend(evs.into_iter().map(EventBody::from));
            self.damage_done = true;
        }
        if self.quake_started && !self.batcher.is_done() {
            let p = self
                .batcher
                .step(&mut self.scene)
                .map_err(|e| SessionError::Internal(e.to_string()))?;
            out.push(EventBody::RelocationApplied {
                applied: p.applied,
                total: p.total,
            });
        }

        // characters
        let ctx = self.scenario.npc_context(&self.scene);
        let mut triggers = std::mem::take(&mut self.npc_queue);
        triggers.push(NpcTrigger::PhaseElapsed {
            phase: self.story.phase,
            seconds: t - self.story.phase_since,
        });
        let mut npc_events = Vec::new();
        for trig in &triggers {
            for agent in self.npcs.iter_mut().filter(|a| a.interactive) {
                npc_events.extend(fire_trigger(agent, trig, &ctx).unwrap_or_default());
            }
        }
        for agent in &mut self.npcs {
            npc_events.extend(tick_npc(
                agent,
                self.story.phase,
                dt,
                &self.scene.walk_graph,
            ));
        }
        for e in &npc_events {
            if let EventBody::InstructionGiven { instruction, .. } = e {
                self.story.note_instruction(instruction);
            }
        }
        out.extend(npc_events);

        // story
        let region = self.player.current_region.clone();
        let world = World {
            scene: &mut self.scene,
            npcs: &mut self.npcs,
            region: &region,
        };
        let fired = self
            .story
            .fire_timer(&self.scenario, world, t)
            .map_err(|e| SessionError::Internal(e.to_string()))?;
        out.extend(fired.events);
        self.npc_queue.extend(fired.npc_triggers);
        if !self.story.has_queued() {
            let outdoor = self.scene.region(&region).is_some_and(|r| r.outdoor);
            match self.story.phase {
                Phase::PreEvacuation if region != self.scenario.meeting_room => {
                    self.story.queue(PhaseEvent::LeftRoom)
                }
                Phase::IndoorEvacuation if outdoor => self.story.queue(PhaseEvent::ExitedBuilding),
                _ => {}
            }
        }
        let was_terminal = self.story.terminal;
        let story_events = self
            .story
            .process_queued(&self.scenario, t)
            .map_err(|e| SessionError::Internal(e.to_string()))?;
        let mut shaking_began = false;
        for e in &story_events {
            if let EventBody::PhaseChanged { to, .. } = e {
                self.npc_queue.push(NpcTrigger::PhaseChange(*to));
                shaking_began |= *to == Phase::Earthquake;
            }
        }
        out.extend(story_events);
        if shaking_began {
            // cover is taken on the tick the shaking starts
            for agent in &mut self.npcs {
                out.extend(tick_npc(
                    agent,
                    Phase::Earthquake,
                    dt,
                    &self.scene.walk_graph,
                ));
            }
        }
        if self.story.terminal && !was_terminal {
            self.held = false;
            self.trajectory = None;
        }
        if let Some(next) = self.story.phase_fallback(&self.scenario) {
            let from = nearest_node(&self.scene.walk_graph, self.player.position);
            let to = self.waitpoint_node(&next);
            let nodes = match (from, to) {
                (Some(f), Some(t)) if f != t => {
                    route(&self.scene.walk_graph, &f, &t).unwrap_or_else(|| vec![t])
                }
                (_, Some(t)) => vec![t],
                _ => Vec::new(),
            };
            self.story.depart(&next);
            self.start_travel(nodes, &mut out);
        }

        // telemetry
        for body in out {
            self.log
                .record(Event::new(t, body))
                .map_err(|e| SessionError::Internal(e.to_string()))?;
        }
        if self.story.terminal && !was_terminal && self.config.mode == Mode::Tp {
            let report = build_report(self.log.events(), &self.scenario.rationale)
                .map_err(|e| SessionError::Internal(e.to_string()))?;
            let shown = EventBody::ReportShown {
                taken: report.taken,
                missed: report.missed,
            };
            self.log
                .record(Event::new(t, shown))
                .map_err(|e| SessionError::Internal(e.to_string()))?;
            if let Some(g) = &self.scenario.waitpoints {
                self.story.waitpoint = Some(g.debrief.clone());
            }
            self.report = Some(report);
        }
        let per_second = (1.0 / dt).round().max(1.0) as u64;
        if self.tick.is_multiple_of(per_second) {
            self.log
                .record(Event::new(t, EventBody::SnapshotMark { tick: self.tick }))
                .map_err(|e| SessionError::Internal(e.to_string()))?;
        }
        let this_tick: Vec<Event> = self
            .log
            .events()
            .iter()
            .rev()
            .take_while(|e| e.t == t)
            .cloned()
            .collect();
        let mut this_tick = this_tick;
        this_tick.reverse();
        Ok(self.delta_snapshot(this_tick))
    }

    /// Steps `n` ticks, stopping early at a terminal choice.
    pub fn run_ticks(&mut self, n: u64) -> Result<Vec<Snapshot>, SessionError> {
        let mut out = Vec::new();
        for _ in 0..n {
            out.push(self.step()?);
            if self.story.terminal {
                break;
            }
        }
        Ok(out)
    }

    /// Steps until the terminal choice or until `max_ticks` have passed.
    pub fn run_until_terminal(&mut self, max_ticks: u64) -> Result<(), SessionError> {
        while !self.story.terminal {
            if self.tick >= max_ticks {
                return Err(SessionError::NotTerminal);
            }
            self.step()?;
        }
        Ok(())
    }

    /// Ends the session in place. Without `abort` a terminal choice is
    /// required and the record (free roam) or debrief report (training) is
    /// derived. Later input and ticks fail with [`SessionError::SessionEnded`].
    pub fn close(&mut self, abort: bool) -> Result<SessionResult, SessionError> {
        if self.ended.is_some() {
            return Err(SessionError::SessionEnded);
        }
        if !abort && !self.story.terminal {
            return Err(SessionError::NotTerminal);
        }
        self.log
            .record(Event::new(
                self.time(),
                EventBody::SessionEnded { aborted: abort },
            ))
            .map_err(|e| SessionError::Internal(e.to_string()))?;
        self.ended = Some(abort);
        let outcome = match (abort, self.config.mode) {
            (true, _) => Outcome::Aborted,
            (false, Mode::Bp) => Outcome::Behavioural {
                record: extract_bp_metrics(self.log.events())
                    .map_err(|e| SessionError::Internal(e.to_string()))?,
            },
            (false, Mode::Tp) => Outcome::Feedback {
                report: match self.report.clone() {
                    Some(r) => r,
                    None => build_report(self.log.events(), &self.scenario.rationale)
                        .map_err(|e| SessionError::Internal(e.to_string()))?,
                },
            },
        };
        Ok(SessionResult {
            session: self.id.clone(),
            config: self.config.clone(),
            log: self.log.events().to_vec(),
            outcome,
        })
    }

    /// Ends the session without a terminal choice.
    pub fn abort(mut self) -> SessionResult {
        match self.close(true) {
            Ok(r) => r,
            Err(_) => SessionResult {
                session: self.id,
                config: self.config,
                log: self.log.events().to_vec(),
                outcome: Outcome::Aborted,
            },
        }
    }

    /// Consuming form of [`Session::close`] without abort.
    pub fn finish(mut self) -> Result<SessionResult, SessionError> {
        self.close(false)
    }
}

/// Euclidean heading from `from` toward `to`.
pub fn heading_to(from: Vec2, to: Vec2) -> f64 {
    (to - from).angle()
}
