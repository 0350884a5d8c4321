//! Simulates the off-stage rooms of the bundled building ahead of time and
//! applies the result a few objects per tick.

use evacsim::damage::{precompute_relocation, RelocationBatcher};
use evacsim::demo;
use evacsim::quake::{generate_signal, PhysicsParams, QuakeParams};

fn main() {
    let mut scene = demo::demo_scene();
    let regions = scene.off_stage_region_ids();
    let signal = generate_signal(&QuakeParams::demo(), 12.0, 5).unwrap();
    let list = precompute_relocation(&scene, &regions, &signal, &PhysicsParams::default()).unwrap();
    println!(
        "regions {:?}: {} entries",
        list.provenance.regions,
        list.entries.len()
    );

    let mut batcher = RelocationBatcher::new(&scene, &list, 8).unwrap();
    let mut tick = 0;
    while !batcher.is_done() {
        tick += 1;
        let p = batcher.step(&mut scene).unwrap();
        println!("tick {tick}: {}/{}", p.applied, p.total);
    }
    let moved = list
        .entries
        .iter()
        .filter(|e| {
            demo::demo_scene()
                .object(&e.id)
                .is_some_and(|o| o.pose != e.pose)
        })
        .count();
    println!("{moved} objects ended away from their starting pose");
}
