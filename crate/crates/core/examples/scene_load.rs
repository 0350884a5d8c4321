//! Loads a scene document, walks support chains and locates points.

use evacsim::demo;
use evacsim::geom::Vec2;
use evacsim::scene::{load_scene, region_of, support_chain};

fn main() {
    let path = std::env::args().nth(1);
    let scene = match &path {
        Some(p) => {
            load_scene(&std::fs::read_to_string(p).expect("readable file")).expect("valid scene")
        }
        None => load_scene(&demo::demo_scene().to_json()).expect("bundled scene loads"),
    };
    println!(
        "{} objects, {} regions, {} walk nodes",
        scene.objects.len(),
        scene.regions.len(),
        scene.walk_graph.nodes.len()
    );
    println!("on stage: {:?}", scene.on_stage_region_ids());
    println!("off stage: {:?}", scene.off_stage_region_ids());

    let deepest = scene
        .objects
        .iter()
        .map(|o| support_chain(&scene, &o.id).expect("acyclic"))
        .max_by_key(|c| c.len())
        .unwrap_or_default();
    println!("tallest stack: {}", deepest.join(" -> "));

    for p in [
        Vec2::new(5.0, 4.0),
        Vec2::new(25.0, 8.0),
        Vec2::new(25.0, -5.0),
        Vec2::new(99.0, 99.0),
    ] {
        match region_of(&scene, p) {
            Ok(r) => println!("({}, {}) is in {}", p.x, p.y, r.id),
            Err(e) => println!("({}, {}): {e}", p.x, p.y),
        }
    }
}
