use super::engine::Session;
use super::script::{Command, ScriptLine};
use super::SessionError;
use crate::navigation::{nearest_node, route, PLAYER_WALK_SPEED};
use crate::story::Phase;

/// Drives a live session the way a player would and records every command
/// as a replayable script line.
#[derive(Debug)]
pub struct Pilot {
    pub session: Session,
    pub script: Vec<ScriptLine>,
}

/// Per-segment tick cap when walking; stops runaway loops against walls.
const SEGMENT_TICK_CAP: u64 = 10_000;

impl Pilot {
    pub fn new(session: Session) -> Self {
        Pilot {
            session,
            script: Vec::new(),
        }
    }

    /// Queues `cmd` for the next tick.
    pub fn send(&mut self, cmd: Command) -> Result<(), SessionError> {
        self.session.submit_input(cmd.clone())?;
        self.script.push(ScriptLine {
            tick: self.session.tick() + 1,
            command: cmd,
        });
        Ok(())
    }

    pub fn step(&mut self) -> Result<(), SessionError> {
        self.session.step().map(|_| ())
    }

    pub fn wait_ticks(&mut self, n: u64) -> Result<(), SessionError> {
        for _ in 0..n {
            if self.session.is_terminal() {
                break;
            }
            self.step()?;
        }
        Ok(())
    }

    pub fn wait(&mut self, seconds: f64) -> Result<(), SessionError> {
        let n = (seconds / self.session.dt()).round() as u64;
        self.wait_ticks(n)
    }

    /// Steps until `pred` holds, at most `max_ticks`. Returns whether it held.
    pub fn wait_until(
        &mut self,
        max_ticks: u64,
        pred: impl Fn(&Session) -> bool,
    ) -> Result<bool, SessionError> {
        for _ in 0..max_ticks {
            if pred(&self.session) {
                return Ok(true);
            }
            self.step()?;
        }
        Ok(pred(&self.session))
    }

    pub fn wait_for_phase(&mut self, phase: Phase, max_ticks: u64) -> Result<bool, SessionError> {
        self.wait_until(max_ticks, |s| s.phase() == phase)
    }

    pub fn select(&mut self, action: &str) -> Result<(), SessionError> {
        self.send(Command::Select {
            action_id: Some(action.to_string()),
        })?;
        self.step()
    }

    /// Looks along `heading` and selects whatever panel sits there.
    pub fn gaze_select(&mut self, heading: f64) -> Result<(), SessionError> {
        self.send(Command::Look { heading })?;
        self.send(Command::Select { action_id: None })?;
        self.step()
    }

    /// Walks along the walk graph to `node` by aiming and holding the button.
    pub fn walk_to(&mut self, node: &str) -> Result<(), SessionError> {
        let graph = &self.session.scene().walk_graph;
        let from = nearest_node(graph, self.session.player().position).ok_or_else(|| {
            SessionError::NoRoute {
                from: "?".into(),
                to: node.into(),
            }
        })?;
        let mut nodes = vec![from.clone()];
        nodes.extend(
            route(graph, &from, node).ok_or_else(|| SessionError::NoRoute {
                from: from.clone(),
                to: node.into(),
            })?,
        );
        let targets: Vec<_> = nodes.iter().filter_map(|n| graph.position(n)).collect();
        let step_len = PLAYER_WALK_SPEED * self.session.dt();
        let mut held = false;
        for target in targets {
            for _ in 0..SEGMENT_TICK_CAP {
                let p = self.session.player().position;
                if p.distance(target) <= step_len {
                    break;
                }
                let heading = (target - p).angle();
                if (self.session.player().heading - heading).abs() > 1e-9 {
                    self.send(Command::Look { heading })?;
                }
                if !held {
                    self.send(Command::Move { held: true })?;
                    held = true;
                }
                self.step()?;
                if self.session.player().position == p {
                    break;
                }
            }
        }
        self.send(Command::Move { held: false })?;
        self.step()
    }
}
