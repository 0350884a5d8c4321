use super::friction::{resolve_contact, topple_check, ContactForce, ContactInput, Regime};
use super::signal::{QuakeSignal, DEFAULT_DT};
use super::QuakeError;
use crate::geom::Vec2;
use crate::scene::SceneGraph;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicsParams {
    pub g: f64,
    pub dt: f64,
    /// Relative-velocity damping rate between riders and carriers, 1/s.
    pub linear_damping: f64,
}

impl Default for PhysicsParams {
    fn default() -> Self {
        PhysicsParams {
            g: 9.81,
            dt: DEFAULT_DT,
            linear_damping: 0.05,
        }
    }
}

impl PhysicsParams {
    pub fn validate(&self) -> Result<(), QuakeError> {
        if !(self.dt > 0.0) || !(self.g > 0.0) || !(self.linear_damping >= 0.0) {
            return Err(QuakeError::InvalidParams(
                "physics params need dt > 0, g > 0, damping >= 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhysicsEvent {
    ObjectToppled { object: String },
    ObjectSlid { object: String },
    ObjectFell { object: String, onto: String },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TickReport {
    pub events: Vec<PhysicsEvent>,
    pub contacts: Vec<ContactForce>,
}

/// Regions whose objects are simulated.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ActiveRegions(pub BTreeSet<String>);

impl ActiveRegions {
    pub fn on_stage(scene: &SceneGraph) -> Self {
        ActiveRegions(scene.on_stage_region_ids().into_iter().collect())
    }

    pub fn of<I: IntoIterator<Item = S>, S: Into<String>>(ids: I) -> Self {
        ActiveRegions(ids.into_iter().map(Into::into).collect())
    }

    pub fn contains(&self, id: &str) -> bool {
        self.0.contains(id)
    }
}

fn check_grid(t: f64, dt: f64) -> Result<u64, QuakeError> {
    let k = (t / dt).round();
    if k < 0.0 || (t - k * dt).abs() > 1e-9 * t.abs().max(1.0) {
        return Err(QuakeError::NotOnTickGrid { t, dt });
    }
    Ok(k as u64)
}

/// Advances the on-stage part of the scene by one tick at time `t`.
pub fn step(
    scene: &mut SceneGraph,
    signal: &QuakeSignal,
    t: f64,
    params: &PhysicsParams,
) -> Result<TickReport, QuakeError> {
    let active = ActiveRegions::on_stage(scene);
    step_in(scene, signal, t, params, &active)
}

struct Layout {
    parent: Vec<Option<usize>>,
    root: Vec<usize>,
    depth: Vec<usize>,
    mass_above: Vec<f64>,
    children: Vec<Vec<usize>>,
}

fn layout(scene: &SceneGraph) -> Layout {
    let n = scene.objects.len();
    let parent: Vec<Option<usize>> = scene
        .objects
        .iter()
        .map(|o| {
            o.support_parent
                .as_deref()
                .and_then(|p| scene.object_index(p))
        })
        .collect();
    let mut root = vec![0; n];
    let mut depth = vec![0; n];
    for i in 0..n {
        let (mut cur, mut d) = (i, 0);
        while let Some(p) = parent[cur] {
            cur = p;
            d += 1;
        }
        root[i] = cur;
        depth[i] = d;
    }
    let mut children = vec![Vec::new(); n];
    for (i, p) in parent.iter().enumerate() {
        if let Some(p) = *p {
            children[p].push(i);
        }
    }
    // deepest first so each subtree total is ready before its parent
    let mut by_depth: Vec<usize> = (0..n).collect();
    by_depth.sort_by(|a, b| depth[*b].cmp(&depth[*a]));
    let mut mass_above = vec![0.0; n];
    for &i in &by_depth {
        let sum: f64 = children[i]
            .iter()
            .map(|&c| scene.objects[c].mass + mass_above[c])
            .sum();
        mass_above[i] = sum;
    }
    Layout {
        parent,
        root,
        depth,
        mass_above,
        children,
    }
}

fn descendants(children: &[Vec<usize>], i: usize, out: &mut Vec<usize>) {
    for &c in &children[i] {
        out.push(c);
        descendants(children, c, out);
    }
}

/// Moves object `i` (and everything it carries) down onto its root floor.
fn drop_to_floor(scene: &mut SceneGraph, lay: &Layout, i: usize) {
    let root = lay.root[i];
    let floor_top = scene.objects[root].top_z();
    let dz = floor_top - scene.objects[i].pose.z();
    let mut subtree = vec![i];
    descendants(&lay.children, i, &mut subtree);
    for j in subtree {
        scene.objects[j].pose.position[2] += dz;
    }
    scene.objects[i].support_parent = Some(scene.objects[root].id.clone());
}

/// [`step`] restricted to an explicit set of simulated regions.
pub fn step_in(
    scene: &mut SceneGraph,
    signal: &QuakeSignal,
    t: f64,
    params: &PhysicsParams,
    active: &ActiveRegions,
) -> Result<TickReport, QuakeError> {
    params.validate()?;
    check_grid(t, params.dt)?;
    let dt = params.dt;
    let g = params.g;
    let ground_accel = signal.accel_at(t);
    let lay = layout(scene);
    let n = scene.objects.len();

    let simulated: Vec<bool> = scene
        .objects
        .iter()
        .map(|o| o.dynamic && active.contains(&o.home_region))
        .collect();
    let prev_v: Vec<Vec2> = scene.objects.iter().map(|o| o.velocity).collect();
    let mut v = prev_v.clone();

    for i in 0..n {
        if simulated[i] && scene.objects[i].is_floor() {
            v[i] += ground_accel * dt;
        }
    }

    let mut riders: Vec<usize> = (0..n)
        .filter(|&i| simulated[i] && !scene.objects[i].is_floor() && lay.parent[i].is_some())
        .collect();
    riders.sort_by(|&a, &b| {
        let (oa, ob) = (&scene.objects[a], &scene.objects[b]);
        scene.objects[lay.root[a]]
            .id
            .cmp(&scene.objects[lay.root[b]].id)
            .then(lay.depth[a].cmp(&lay.depth[b]))
            .then(oa.id.cmp(&ob.id))
    });

    let mut report = TickReport::default();
    for &r in &riders {
        let c = lay.parent[r].expect("riders have carriers");
        let rider = &scene.objects[r];
        let carrier = &scene.objects[c];
        let kinematic = carrier.is_floor() || !simulated[c];
        let (mr, mc) = (rider.mass, carrier.mass);
        let m_eff = if kinematic { mr } else { mr * mc / (mr + mc) };
        let normal_load = g * (mr + lay.mass_above[r]);
        let res = resolve_contact(&ContactInput {
            carrier_velocity: v[c],
            rider_velocity: v[r],
            effective_mass: m_eff,
            normal_load,
            mu_static: rider.mu_static,
            mu_kinetic: rider.mu_kinetic,
            dt,
        });
        v[r] += res.impulse * (1.0 / mr);
        if !kinematic {
            v[c] -= res.impulse * (1.0 / mc);
        }
        if params.linear_damping > 0.0 {
            let rel = v[r] - v[c];
            let damp = rel * (m_eff * (params.linear_damping * dt).min(1.0));
            v[r] -= damp * (1.0 / mr);
            if !kinematic {
                v[c] += damp * (1.0 / mc);
            }
        }
        let was_sliding = rider.sliding;
        report.contacts.push(ContactForce {
            carrier: carrier.id.clone(),
            rider: rider.id.clone(),
            force: res.impulse * (1.0 / dt),
            regime: res.regime,
        });
        let sliding = res.regime == Regime::Slip;
        if sliding && !was_sliding {
            report.events.push(PhysicsEvent::ObjectSlid {
                object: rider.id.clone(),
            });
        }
        scene.objects[r].sliding = sliding;
    }

    for i in 0..n {
        if simulated[i] {
            let o = &mut scene.objects[i];
            o.velocity = v[i];
            let p = o.pose.xy() + v[i] * dt;
            o.pose.set_xy(p);
        }
    }

    let mut fallen = BTreeSet::new();
    for &r in &riders {
        let obj = &scene.objects[r];
        if obj.toppled || fallen.contains(&r) {
            continue;
        }
        let accel = (v[r] - prev_v[r]) * (1.0 / dt);
        if !topple_check(obj, accel, g) {
            continue;
        }
        let u = accel.normalized().expect("nonzero accel");
        let b = obj.footprint().support_distance(u);
        let shift = u * -(b + obj.com_height);
        let id = obj.id.clone();
        let root = lay.root[r];
        {
            let o = &mut scene.objects[r];
            let p = o.pose.xy() + shift;
            o.pose.set_xy(p);
            o.toppled = true;
            o.sliding = false;
            o.velocity = v[root];
        }
        drop_to_floor(scene, &lay, r);
        report
            .events
            .push(PhysicsEvent::ObjectToppled { object: id });
        for &c in &lay.children[r] {
            if fallen.insert(c) {
                drop_to_floor(scene, &lay, c);
                report.events.push(PhysicsEvent::ObjectFell {
                    object: scene.objects[c].id.clone(),
                    onto: scene.objects[root].id.clone(),
                });
            }
        }
    }

    for &r in &riders {
        if fallen.contains(&r) || scene.objects[r].toppled && lay.parent[r] != Some(lay.root[r]) {
            continue;
        }
        let Some(pid) = scene.objects[r].support_parent.as_deref() else {
            continue;
        };
        let Some(c) = scene.object_index(pid) else {
            continue;
        };
        if scene.objects[c].is_floor() {
            continue;
        }
        if !scene.objects[c]
            .footprint()
            .contains(scene.objects[r].pose.xy())
        {
            fallen.insert(r);
            drop_to_floor(scene, &lay, r);
            report.events.push(PhysicsEvent::ObjectFell {
                object: scene.objects[r].id.clone(),
                onto: scene.objects[lay.root[r]].id.clone(),
            });
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisplacementSample {
    pub t: f64,
    /// Ground (floor) displacement from rest.
    pub displacement: Vec2,
}

#[derive(Debug, Clone)]
pub struct QuakeRun {
    pub scene: SceneGraph,
    pub trace: Vec<DisplacementSample>,
    pub events: Vec<(f64, PhysicsEvent)>,
}

/// Tick times covering `[0, duration]`.
pub fn tick_times(signal: &QuakeSignal, params: &PhysicsParams) -> impl Iterator<Item = f64> {
    let n = (signal.duration / params.dt + 1e-9).floor() as u64;
    let dt = params.dt;
    (0..=n).map(move |k| k as f64 * dt)
}

/// Folds [`step`] over every tick of the signal.
pub fn run_quake(
    scene: &SceneGraph,
    signal: &QuakeSignal,
    params: &PhysicsParams,
) -> Result<QuakeRun, QuakeError> {
    let active = ActiveRegions::on_stage(scene);
    run_quake_in(scene, signal, params, &active)
}

pub fn run_quake_in(
    scene: &SceneGraph,
    signal: &QuakeSignal,
    params: &PhysicsParams,
    active: &ActiveRegions,
) -> Result<QuakeRun, QuakeError> {
    let mut scene = scene.clone();
    let mut trace = Vec::new();
    let mut events = Vec::new();
    let (mut gv, mut gx) = (Vec2::ZERO, Vec2::ZERO);
    for t in tick_times(signal, params) {
        let report = step_in(&mut scene, signal, t, params, active)?;
        gv += signal.accel_at(t) * params.dt;
        gx += gv * params.dt;
        trace.push(DisplacementSample {
            t,
            displacement: gx,
        });
        events.extend(report.events.into_iter().map(|e| (t, e)));
    }
    Ok(QuakeRun {
        scene,
        trace,
        events,
    })
}
