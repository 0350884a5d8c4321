//! Single-contact friction and overturning checks, then a short quake
//! on a box standing on a table.

use evacsim::geom::Vec2;
use evacsim::quake::{
    friction_update, run_quake, topple_threshold, PhysicsEvent, PhysicsParams, QuakeSignal,
    SignalSample,
};
use evacsim::scene::load_scene;

const G: f64 = 9.81;

const SCENE: &str = r#"{
  "schema_version": 1,
  "objects": [
    {"id": "floor", "kind": "floor", "mass": 1000.0, "half_extents": [5.0, 5.0, 0.05], "com_height": 0.05,
     "pose": {"position": [5.0, 5.0, -0.1]}, "dynamic": true},
    {"id": "table", "kind": "furniture", "mass": 30.0, "half_extents": [0.8, 0.4, 0.375], "com_height": 0.5,
     "pose": {"position": [5.0, 5.0, 0.0]}, "support_parent": "floor", "dynamic": true},
    {"id": "box", "kind": "loose_item", "mass": 2.0, "half_extents": [0.1, 0.1, 0.4], "com_height": 0.4,
     "pose": {"position": [5.0, 5.0, 0.75]}, "support_parent": "table", "dynamic": true}
  ],
  "regions": [
    {"id": "room", "polygon": [[0,0],[10,0],[10,10],[0,10]], "staging": "on_stage"},
    {"id": "yard", "polygon": [[-10,-10],[20,-10],[20,0],[-10,0]], "staging": "on_stage", "outdoor": true}
  ],
  "walk_graph": {"nodes": [{"id": "out", "position": [5.0, -5.0]}, {"id": "in", "position": [5.0, 2.0]}],
                 "edges": [{"a": "out", "b": "in"}]},
  "exits": ["out"],
  "assembly_areas": [{"node": "out", "safe": true}],
  "interactables": []
}"#;

fn main() {
    let scene = load_scene(SCENE).expect("valid scene");
    let table = scene.object("table").unwrap();
    let bx = scene.object("box").unwrap();

    for accel in [1.0, 3.0, 6.0] {
        let (c, _) = friction_update(
            "table",
            Vec2::ZERO,
            Vec2::new(accel, 0.0),
            bx,
            bx.mass * G,
            0.02,
        );
        println!(
            "table accel {accel:.1}: {:?}, force {:.2} N",
            c.regime,
            c.force.norm()
        );
    }
    let x = Vec2::new(1.0, 0.0);
    println!(
        "overturn threshold: box {:.3}, table {:.3} m/s^2",
        topple_threshold(bx, x, G),
        topple_threshold(table, x, G)
    );

    let dt = 1.0 / 50.0;
    let samples = (0..=25)
        .map(|k| SignalSample {
            t: k as f64 * dt,
            direction: x,
            accel: if k == 25 { 0.0 } else { 3.0 },
        })
        .collect();
    let signal = QuakeSignal::from_samples(samples, 0.5).unwrap();
    let run = run_quake(&scene, &signal, &PhysicsParams::default()).unwrap();
    for (t, e) in &run.events {
        match e {
            PhysicsEvent::ObjectToppled { object } => println!("{t:.2} s: {object} toppled"),
            PhysicsEvent::ObjectSlid { object } => println!("{t:.2} s: {object} slid"),
            other => println!("{t:.2} s: {other:?}"),
        }
    }
}
