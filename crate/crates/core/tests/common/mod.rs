#![allow(dead_code)]

use evacsim::geom::Vec2;
use evacsim::quake::{QuakeSignal, SignalSample};
use evacsim::scene::{
    load_scene, AssemblyArea, ObjectKind, Pose, Region, SceneGraph, SceneObject, Staging, WalkEdge,
    WalkGraph, WalkNode, SCENE_SCHEMA_VERSION,
};
use evacsim::session::{InputSource, Pilot, Session, SessionConfig};
use evacsim::telemetry::Event;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::path::Path;

pub const G: f64 = 9.81;

pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Vec2> {
    vec![
        Vec2::new(x0, y0),
        Vec2::new(x1, y0),
        Vec2::new(x1, y1),
        Vec2::new(x0, y1),
    ]
}

#[allow(clippy::too_many_arguments)]
pub fn obj(
    id: &str,
    kind: ObjectKind,
    mass: f64,
    mu: (f64, f64),
    half: [f64; 3],
    at: [f64; 3],
    parent: Option<&str>,
) -> SceneObject {
    SceneObject {
        id: id.into(),
        kind,
        mass,
        mu_static: mu.0,
        mu_kinetic: mu.1,
        half_extents: half,
        com_height: half[2],
        pose: Pose::new(at[0], at[1], at[2], 0.0),
        velocity: Vec2::ZERO,
        support_parent: parent.map(str::to_string),
        dynamic: true,
        damaged_variant: None,
        active_variant: None,
        toppled: false,
        sliding: false,
        home_region: String::new(),
    }
}

pub fn floor(id: &str, x0: f64, y0: f64, x1: f64, y1: f64) -> SceneObject {
    obj(
        id,
        ObjectKind::Floor,
        10_000.0,
        (0.6, 0.5),
        [(x1 - x0) / 2.0, (y1 - y0) / 2.0, 0.05],
        [(x0 + x1) / 2.0, (y0 + y1) / 2.0, -0.1],
        None,
    )
}

/// Two side-by-side rooms: `stage` (on stage, x 0..10) and `store`
/// (x 10..20) whose staging is given. Each has its own floor.
pub fn two_room_scene(store: Staging, mut objects: Vec<SceneObject>) -> SceneGraph {
    let mut all = vec![
        floor("stage_floor", 0.0, 0.0, 10.0, 10.0),
        floor("store_floor", 10.0, 0.0, 20.0, 10.0),
    ];
    all.append(&mut objects);
    let regions = vec![
        Region {
            id: "stage".into(),
            polygon: rect(0.0, 0.0, 10.0, 10.0),
            staging: Staging::OnStage,
            outdoor: true,
        },
        Region {
            id: "store".into(),
            polygon: rect(10.0, 0.0, 20.0, 10.0),
            staging: store,
            outdoor: false,
        },
    ];
    let walk_graph = WalkGraph {
        nodes: vec![
            WalkNode {
                id: "a".into(),
                position: Vec2::new(2.0, 5.0),
            },
            WalkNode {
                id: "b".into(),
                position: Vec2::new(8.0, 5.0),
            },
        ],
        edges: vec![WalkEdge {
            a: "a".into(),
            b: "b".into(),
            length: None,
        }],
    };
    let assembly = vec![AssemblyArea {
        node: "a".into(),
        safe: true,
    }];
    let doc = serde_json::json!({
        "schema_version": SCENE_SCHEMA_VERSION,
        "objects": all,
        "regions": regions,
        "walk_graph": walk_graph,
        "exits": ["b"],
        "assembly_areas": assembly,
        "interactables": [],
    });
    load_scene(&doc.to_string()).expect("test scene is valid")
}

/// Random furniture with loose items stacked on top, all inside the
/// `store` room.
pub fn random_store_objects(rng: &mut ChaCha8Rng) -> Vec<SceneObject> {
    let mut out = Vec::new();
    let pieces = rng.random_range(1..=6);
    for i in 0..pieces {
        let x = 11.0 + 1.5 * i as f64;
        let y = rng.random_range(2.0..8.0);
        let hz = rng.random_range(0.2..0.6);
        let mu_s = rng.random_range(0.3..0.8);
        let id = format!("piece_{i}");
        out.push(obj(
            &id,
            ObjectKind::Furniture,
            rng.random_range(10.0..60.0),
            (mu_s, mu_s * rng.random_range(0.6..1.0)),
            [rng.random_range(0.3..0.6), rng.random_range(0.3..0.6), hz],
            [x, y, 0.0],
            Some("store_floor"),
        ));
        let items = rng.random_range(0..=3);
        let mut parent = id.clone();
        let (mut px, mut py) = (x, y);
        let mut z = 2.0 * hz;
        for j in 0..items {
            let item = format!("item_{i}_{j}");
            let ihz = rng.random_range(0.03..0.2);
            let mu_s = rng.random_range(0.1..0.6);
            out.push(obj(
                &item,
                ObjectKind::LooseItem,
                rng.random_range(0.2..5.0),
                (mu_s, mu_s * rng.random_range(0.6..1.0)),
                [
                    rng.random_range(0.05..0.25),
                    rng.random_range(0.05..0.25),
                    ihz,
                ],
                [
                    px + rng.random_range(-0.04..0.04),
                    py + rng.random_range(-0.04..0.04),
                    z,
                ],
                Some(&parent),
            ));
            let placed = out.last().unwrap().pose.xy();
            (px, py) = (placed.x, placed.y);
            z += 2.0 * ihz;
            parent = item;
        }
    }
    out
}

/// Acceleration growing linearly at `slope` m/s³ along `dir`.
pub fn ramp_signal(dir: Vec2, slope: f64, duration: f64, dt: f64) -> QuakeSignal {
    let n = (duration / dt).round() as usize;
    let samples = (0..=n)
        .map(|k| {
            let t = k as f64 * dt;
            SignalSample {
                t,
                direction: dir,
                accel: if k == n { 0.0 } else { slope * t },
            }
        })
        .collect();
    QuakeSignal::from_samples(samples, duration).expect("valid ramp")
}

pub fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

/// Replays a recorded script through a fresh session on the bundled story.
pub fn replay(pilot: &Pilot, dir: &Path, max_ticks: u64) -> Session {
    let cfg = pilot.session.config().clone();
    let script = write(
        dir,
        "script.jsonl",
        &evacsim::session::script_to_jsonl(&pilot.script),
    );
    let cfg = SessionConfig {
        input: InputSource::Script(script),
        ..cfg
    };
    let mut s = Session::new(cfg).unwrap();
    s.run_until_terminal(max_ticks).unwrap();
    s
}

pub fn jsonl(log: &[Event]) -> String {
    log.iter()
        .map(|e| serde_json::to_string(e).unwrap() + "\n")
        .collect()
}
