//! Player movement for both modes: free gaze-directed walking and scripted
//! wait-point trajectories with action panels.

use crate::geom::{wrap_angle, OrientedRect, Vec2};
use crate::scene::{region_of, SceneGraph, WalkGraph};
use crate::story::Phase;
use petgraph::algo::astar;
use petgraph::graph::{NodeIndex, UnGraph};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use thiserror::Error;

pub const PLAYER_WALK_SPEED: f64 = 1.4;
pub const PLAYER_RADIUS: f64 = 0.3;
pub const DEFAULT_CONE_HALF_ANGLE: f64 = 20.0 * std::f64::consts::PI / 180.0;
const BACKOFF: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NavError {
    #[error("action `{0}` is not offered here")]
    UnknownAction(String),
    #[error("wait-point graph: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerPose {
    pub position: Vec2,
    pub heading: f64,
    pub current_region: String,
}

fn obstacles(scene: &SceneGraph) -> Vec<OrientedRect> {
    scene
        .objects
        .iter()
        .filter(|o| o.kind.blocks_movement())
        .map(|o| o.footprint().inflated(PLAYER_RADIUS))
        .collect()
}

fn first_hit(obs: &[OrientedRect], from: Vec2, d: Vec2) -> Option<(f64, Vec2)> {
    obs.iter()
        .filter_map(|r| r.ray_entry(from, d))
        .min_by(|a, b| a.0.total_cmp(&b.0))
}

/// Advances the player along a displacement, stopping at the first inflated
/// obstacle face.
fn sweep(obs: &[OrientedRect], from: Vec2, d: Vec2) -> (Vec2, Option<(f64, Vec2)>) {
    match first_hit(obs, from, d) {
        None => (from + d, None),
        Some((s, n)) => {
            let len = d.norm();
            let s_stop = if len > 0.0 {
                (s - BACKOFF / len).max(0.0)
            } else {
                0.0
            };
            (from + d * s_stop, Some((s, n)))
        }
    }
}

/// One tick of single-button movement. The heading is never changed here.
pub fn gaze_move(
    pose: &PlayerPose,
    button_held: bool,
    dt: f64,
    speed: f64,
    scene: &SceneGraph,
) -> PlayerPose {
    if !button_held || !(dt > 0.0) || !(speed > 0.0) {
        return pose.clone();
    }
    let obs = obstacles(scene);
    let d = Vec2::from_angle(pose.heading) * (speed * dt);
    let (mut p, hit) = sweep(&obs, pose.position, d);
    if let Some((s, n)) = hit {
        let rest = d * (1.0 - s);
        let slide = rest - n * rest.dot(n);
        if slide.norm() > 1e-12 {
            p = sweep(&obs, p, slide).0;
        }
    }
    match region_of(scene, p) {
        Ok(r) => PlayerPose {
            position: p,
            heading: pose.heading,
            current_region: r.id.clone(),
        },
        Err(_) => pose.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionPanel {
    pub action: String,
    pub label: String,
    /// Relative to the wait point's facing.
    pub bearing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub next: String,
    #[serde(default)]
    pub trajectory: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaitPoint {
    pub id: String,
    pub node: String,
    #[serde(default)]
    pub facing: f64,
    /// Phase this stop belongs to; leaving that phase jumps to `on_phase_exit`.
    #[serde(default)]
    pub phase: Option<Phase>,
    #[serde(default)]
    pub panels: Vec<ActionPanel>,
    #[serde(default)]
    pub outgoing: BTreeMap<String, Transition>,
    #[serde(default)]
    pub on_phase_exit: Option<String>,
}

impl WaitPoint {
    pub fn offers(&self, action: &str) -> bool {
        self.panels.iter().any(|p| p.action == action)
    }
}

/// The panel nearest to `heading` within the cone, if any. Equal distances go
/// to the smaller action id.
pub fn select_panel(heading: f64, wp: &WaitPoint, cone_half_angle: f64) -> Option<&ActionPanel> {
    select_among(heading, wp.facing, wp.panels.iter(), cone_half_angle)
}

pub(crate) fn select_among<'a>(
    heading: f64,
    facing: f64,
    panels: impl Iterator<Item = &'a ActionPanel>,
    cone_half_angle: f64,
) -> Option<&'a ActionPanel> {
    panels
        .map(|p| (wrap_angle(heading - (facing + p.bearing)).abs(), p))
        .filter(|(d, _)| *d <= cone_half_angle + 1e-12)
        .min_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then_with(|| a.1.action.cmp(&b.1.action))
        })
        .map(|(_, p)| p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaitPointGraph {
    pub start: String,
    pub debrief: String,
    pub points: Vec<WaitPoint>,
    #[serde(skip)]
    terminal: BTreeSet<String>,
}

impl WaitPointGraph {
    /// Builds and checks the graph. `terminal` lists the actions that end the
    /// story and lead to the debrief.
    pub fn new(
        start: String,
        debrief: String,
        points: Vec<WaitPoint>,
        terminal: BTreeSet<String>,
        walk: &WalkGraph,
    ) -> Result<Self, NavError> {
        let g = WaitPointGraph {
            start,
            debrief,
            points,
            terminal,
        };
        g.check(walk)?;
        Ok(g)
    }

    pub fn get(&self, id: &str) -> Option<&WaitPoint> {
        self.points.iter().find(|w| w.id == id)
    }

    pub fn is_terminal(&self, action: &str) -> bool {
        self.terminal.contains(action)
    }

    fn check(&self, walk: &WalkGraph) -> Result<(), NavError> {
        let bad = |m: String| Err(NavError::Invalid(m));
        let ids: BTreeSet<&str> = self.points.iter().map(|w| w.id.as_str()).collect();
        if ids.len() != self.points.len() {
            return bad("duplicate wait point id".into());
        }
        for id in [&self.start, &self.debrief] {
            if !ids.contains(id.as_str()) {
                return bad(format!("unknown wait point `{id}`"));
            }
        }
        for w in &self.points {
            if walk.node(&w.node).is_none() {
                return bad(format!(
                    "wait point `{}` sits on unknown node `{}`",
                    w.id, w.node
                ));
            }
            let mut labels = BTreeSet::new();
            for p in &w.panels {
                if !labels.insert(p.label.as_str()) {
                    return bad(format!(
                        "wait point `{}` repeats panel label `{}`",
                        w.id, p.label
                    ));
                }
                if !w.outgoing.contains_key(&p.action) && !self.terminal.contains(&p.action) {
                    return bad(format!("panel `{}` at `{}` leads nowhere", p.action, w.id));
                }
            }
            for (a, tr) in &w.outgoing {
                if !ids.contains(tr.next.as_str()) {
                    return bad(format!(
                        "action `{a}` at `{}` targets unknown `{}`",
                        w.id, tr.next
                    ));
                }
                if let Some(n) = tr.trajectory.iter().find(|n| walk.node(n).is_none()) {
                    return bad(format!("trajectory of `{a}` uses unknown node `{n}`"));
                }
            }
            if let Some(n) = &w.on_phase_exit {
                if !ids.contains(n.as_str()) {
                    return bad(format!("wait point `{}` falls back to unknown `{n}`", w.id));
                }
            }
        }
        let reach = self.reachable();
        if let Some(w) = self.points.iter().find(|w| !reach.contains(w.id.as_str())) {
            return bad(format!("wait point `{}` is unreachable", w.id));
        }
        Ok(())
    }

    /// Ids reachable from the start through any action or phase fallback.
    pub fn reachable(&self) -> BTreeSet<&str> {
        let mut seen = BTreeSet::from([self.start.as_str()]);
        let mut queue = VecDeque::from([self.start.as_str()]);
        while let Some(id) = queue.pop_front() {
            let Some(w) = self.get(id) else { continue };
            let mut next: Vec<&str> = w.outgoing.values().map(|t| t.next.as_str()).collect();
            next.extend(w.on_phase_exit.as_deref());
            if w.panels.iter().any(|p| self.terminal.contains(&p.action)) {
                next.push(self.debrief.as_str());
            }
            for n in next {
                if seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        seen
    }

    /// Next stop and the trajectory leading there after choosing `chosen`.
    pub fn advance(
        &self,
        current: &str,
        chosen: &str,
    ) -> Result<(&WaitPoint, Vec<String>), NavError> {
        let w = self
            .get(current)
            .ok_or_else(|| NavError::Invalid(format!("unknown wait point `{current}`")))?;
        if !w.offers(chosen) && !w.outgoing.contains_key(chosen) {
            return Err(NavError::UnknownAction(chosen.to_string()));
        }
        if let Some(tr) = w.outgoing.get(chosen) {
            let next = self.get(&tr.next).expect("checked");
            return Ok((next, tr.trajectory.clone()));
        }
        if self.terminal.contains(chosen) {
            return Ok((self.get(&self.debrief).expect("checked"), Vec::new()));
        }
        Err(NavError::UnknownAction(chosen.to_string()))
    }
}

/// Plays back a list of points at fixed speed with no player control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPlayer {
    pub remaining: Vec<Vec2>,
    pub speed: f64,
}

impl TrajectoryPlayer {
    pub fn new(graph: &WalkGraph, nodes: &[String], speed: f64) -> Self {
        TrajectoryPlayer {
            remaining: nodes.iter().filter_map(|n| graph.position(n)).collect(),
            speed,
        }
    }

    pub fn is_done(&self) -> bool {
        self.remaining.is_empty()
    }

    /// New position after `dt`.
    pub fn step(&mut self, mut p: Vec2, dt: f64) -> Vec2 {
        let mut budget = self.speed * dt;
        while budget > 0.0 && !self.remaining.is_empty() {
            let target = self.remaining[0];
            let d = p.distance(target);
            if d <= budget {
                p = target;
                budget -= d;
                self.remaining.remove(0);
            } else {
                p += (target - p) * (budget / d);
                budget = 0.0;
            }
        }
        p
    }
}

fn build(graph: &WalkGraph) -> (UnGraph<(), f64>, BTreeMap<&str, NodeIndex>) {
    let mut g = UnGraph::new_undirected();
    let mut idx = BTreeMap::new();
    for n in &graph.nodes {
        idx.insert(n.id.as_str(), g.add_node(()));
    }
    for e in &graph.edges {
        if let (Some(&a), Some(&b)) = (idx.get(e.a.as_str()), idx.get(e.b.as_str())) {
            let len = e.length.unwrap_or_else(|| {
                graph
                    .position(&e.a)
                    .zip(graph.position(&e.b))
                    .map_or(0.0, |(p, q)| p.distance(q))
            });
            g.add_edge(a, b, len);
        }
    }
    (g, idx)
}

/// Shortest walk from `from` to `to`, excluding `from`.
pub fn route(graph: &WalkGraph, from: &str, to: &str) -> Option<Vec<String>> {
    let (g, idx) = build(graph);
    let (&s, &t) = (idx.get(from)?, idx.get(to)?);
    let (_, path) = astar(&g, s, |n| n == t, |e| *e.weight(), |_| 0.0)?;
    let names: BTreeMap<NodeIndex, &str> = idx.iter().map(|(k, v)| (*v, *k)).collect();
    Some(
        path.into_iter()
            .skip(1)
            .map(|n| names[&n].to_string())
            .collect(),
    )
}

/// Closest walk node to `p`; ties go to the smaller id.
pub fn nearest_node(graph: &WalkGraph, p: Vec2) -> Option<String> {
    graph
        .nodes
        .iter()
        .min_by(|a, b| {
            a.position
                .distance(p)
                .total_cmp(&b.position.distance(p))
                .then_with(|| a.id.cmp(&b.id))
        })
        .map(|n| n.id.clone())
}
