//! Drives the bundled free-roam crowd by hand: routines before the quake,
//! cover during it, and the host's reaction to the player.

use evacsim::demo;
use evacsim::npc::{fire_trigger, tick_npc, NpcTrigger};
use evacsim::story::Phase;
use evacsim::telemetry::EventBody;

fn main() {
    let scene = demo::demo_scene();
    let sc = demo::bp_scenario();
    let ctx = sc.npc_context(&scene);
    let mut crowd = sc.npcs.clone();
    for a in &mut crowd {
        a.init(&ctx).expect("valid start");
    }
    let dt = 1.0 / 50.0;
    let show = |crowd: &[evacsim::npc::NpcAgent], label: &str| {
        println!("{label}");
        for a in crowd {
            println!(
                "  {:<16} {:?} at ({:.1}, {:.1})",
                a.id, a.state.activity, a.state.position.x, a.state.position.y
            );
        }
    };

    for _ in 0..50 * 10 {
        for a in &mut crowd {
            tick_npc(a, Phase::PreQuake, dt, &scene.walk_graph);
        }
    }
    show(&crowd, "after 10 s of routine");

    for a in &mut crowd {
        if !a.interactive {
            tick_npc(a, Phase::Earthquake, dt, &scene.walk_graph);
            continue;
        }
        for e in fire_trigger(
            a,
            &NpcTrigger::PlayerEntersRegion(sc.meeting_room.clone()),
            &ctx,
        )
        .unwrap()
        {
            if let EventBody::NpcSpoke { npc, text, .. } = e {
                println!("{npc}: {text}");
            }
        }
        tick_npc(a, Phase::Earthquake, dt, &scene.walk_graph);
    }
    show(&crowd, "first tick of shaking");
}
