//! Free walking along a planned route, then the fixed stops of the
//! training story.

use evacsim::demo;
use evacsim::navigation::{
    gaze_move, nearest_node, route, select_panel, PlayerPose, DEFAULT_CONE_HALF_ANGLE,
    PLAYER_WALK_SPEED,
};
use evacsim::scene::region_of;

fn main() {
    let scene = demo::demo_scene();
    let graph = &scene.walk_graph;
    let start = graph.nodes[0].position;
    let from = nearest_node(graph, start).unwrap();
    let path = route(graph, &from, "mr_c").expect("connected");
    println!("route: {}", path.join(" > "));

    let mut pose = PlayerPose {
        position: start,
        heading: 0.0,
        current_region: region_of(&scene, start).unwrap().id.clone(),
    };
    let dt = 1.0 / 50.0;
    let mut ticks = 0;
    for node in &path {
        let goal = graph.position(node).unwrap();
        while (goal - pose.position).norm() > 0.05 && ticks < 50 * 120 {
            let d = goal - pose.position;
            pose.heading = d.y.atan2(d.x);
            let before = pose.current_region.clone();
            pose = gaze_move(&pose, true, dt, PLAYER_WALK_SPEED, &scene);
            if pose.current_region != before {
                println!(
                    "{:6.2} s: {before} -> {}",
                    ticks as f64 * dt,
                    pose.current_region
                );
            }
            ticks += 1;
        }
    }
    println!(
        "arrived after {:.2} s at ({:.2}, {:.2})",
        ticks as f64 * dt,
        pose.position.x,
        pose.position.y
    );

    let sc = demo::tp_scenario();
    let stops = sc.waitpoints.as_ref().expect("training stops");
    println!("reachable stops: {:?}", stops.reachable());
    let first = stops.get(&stops.start).unwrap();
    for p in &first.panels {
        let heading = first.facing + p.bearing;
        let hit = select_panel(heading, first, DEFAULT_CONE_HALF_ANGLE).map(|p| p.action.as_str());
        println!(
            "looking at {:+.0} deg selects {:?}",
            heading.to_degrees(),
            hit
        );
    }
}
