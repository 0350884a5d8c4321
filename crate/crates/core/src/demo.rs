//! Bundled demo assets: a one-storey clinic wing with a meeting room, the
//! free-roam and training stories set in it, and a larger reference scene
//! for load testing.

use crate::damage::{DamageSpec, DamageSwap, DamageTrigger};
use crate::geom::Vec2;
use crate::navigation::{ActionPanel, Transition, WaitPoint, WaitPointGraph};
use crate::npc::{
    Activity, DialogueLine, Instruction, NpcAgent, NpcRole, Response, RoutineStep, SpecialState,
    TriggerPattern, TriggerRule,
};
use crate::quake::QuakeParams;
use crate::scene::{
    finalize, AssemblyArea, Interactable, InteractableKind, InteractableState, ObjectKind, Pose,
    Region, SceneGraph, SceneObject, Staging, WalkEdge, WalkGraph, WalkNode, SCENE_SCHEMA_VERSION,
};
use crate::story::{
    prepare, ActionDef, Effect, Mode, Phase, PhaseEvent, QuakeConfig, Recommendation, Requirement,
    Scenario, StoryStep, SCENARIO_SCHEMA_VERSION,
};
use std::collections::{BTreeMap, BTreeSet};

mod playthrough;
pub use playthrough::*;

pub const DEMO_QUAKE_DURATION: f64 = 12.0;
/// Dynamic objects in the reference scene.
pub const REFERENCE_DYNAMIC_OBJECTS: usize = 500;
/// NPCs in the reference scenario.
pub const REFERENCE_NPCS: usize = 20;

const WALL_HEIGHT: f64 = 3.0;
const WALL_HALF_THICKNESS: f64 = 0.1;
const MAX_PANEL: f64 = 2.0;

/// Looks up a bundled scene by name: `demo` or `reference`.
pub fn builtin_scene(name: &str) -> Option<SceneGraph> {
    match name {
        "demo" => Some(demo_scene()),
        "reference" => Some(reference_scene()),
        _ => None,
    }
}

/// Looks up a bundled scenario by name: `bp`, `tp` or `reference`.
pub fn builtin_scenario(name: &str, scene: &SceneGraph) -> Option<Scenario> {
    let sc = match name {
        "bp" => bp_scenario(),
        "tp" => tp_scenario(),
        "reference" => reference_scenario(),
        _ => return None,
    };
    prepare(sc, scene).ok()
}

struct Builder {
    objects: Vec<SceneObject>,
    interactables: Vec<Interactable>,
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Vec2> {
    vec![
        Vec2::new(x0, y0),
        Vec2::new(x1, y0),
        Vec2::new(x1, y1),
        Vec2::new(x0, y1),
    ]
}

#[allow(clippy::too_many_arguments)]
fn object(
    id: &str,
    kind: ObjectKind,
    mass: f64,
    half: [f64; 3],
    at: [f64; 3],
    parent: Option<&str>,
    dynamic: bool,
    mu: (f64, f64),
) -> SceneObject {
    SceneObject {
        id: id.to_string(),
        kind,
        mass,
        mu_static: mu.0,
        mu_kinetic: mu.1,
        half_extents: half,
        com_height: half[2],
        pose: Pose::new(at[0], at[1], at[2], 0.0),
        velocity: Vec2::ZERO,
        support_parent: parent.map(str::to_string),
        dynamic,
        damaged_variant: None,
        active_variant: None,
        toppled: false,
        sliding: false,
        home_region: String::new(),
    }
}

impl Builder {
    fn top(&self, id: &str) -> f64 {
        self.objects
            .iter()
            .find(|o| o.id == id)
            .map_or(0.0, |o| o.top_z())
    }

    fn floor(&mut self, id: &str, x0: f64, y0: f64, x1: f64, y1: f64) {
        let half = [(x1 - x0) / 2.0, (y1 - y0) / 2.0, 0.05];
        let at = [(x0 + x1) / 2.0, (y0 + y1) / 2.0, -0.1];
        self.objects.push(object(
            id,
            ObjectKind::Floor,
            20_000.0,
            half,
            at,
            None,
            true,
            (0.6, 0.5),
        ));
    }

    /// Furniture or a loose item resting on `parent`.
    #[allow(clippy::too_many_arguments)]
    fn put(
        &mut self,
        id: &str,
        kind: ObjectKind,
        parent: &str,
        x: f64,
        y: f64,
        half: [f64; 3],
        mass: f64,
        mu: (f64, f64),
    ) {
        let z = self.top(parent);
        self.objects.push(object(
            id,
            kind,
            mass,
            half,
            [x, y, z],
            Some(parent),
            true,
            mu,
        ));
    }

    fn fixture(&mut self, id: &str, floor: &str, x: f64, y: f64, half: [f64; 3]) {
        self.objects.push(object(
            id,
            ObjectKind::Fixture,
            200.0,
            half,
            [x, y, 0.0],
            Some(floor),
            false,
            (0.8, 0.7),
        ));
    }

    fn tile(&mut self, id: &str, floor: &str, x: f64, y: f64) {
        let mut o = object(
            id,
            ObjectKind::CeilingTile,
            4.0,
            [0.3, 0.3, 0.01],
            [x, y, 2.9],
            Some(floor),
            false,
            (0.5, 0.4),
        );
        o.damaged_variant = Some(format!("{id}_cracked"));
        self.objects.push(o);
    }

    /// Straight wall from `a` to `b` split into panels, leaving `gaps` (given
    /// as distances along the wall) open. Returns panel ids in order.
    fn wall(
        &mut self,
        prefix: &str,
        floor: &str,
        a: (f64, f64),
        b: (f64, f64),
        gaps: &[(f64, f64)],
    ) -> Vec<String> {
        let (a, b) = (Vec2::new(a.0, a.1), Vec2::new(b.0, b.1));
        let len = a.distance(b);
        let dir = (b - a) * (1.0 / len);
        let mut spans = Vec::new();
        let mut s = 0.0;
        for &(g0, g1) in gaps {
            if g0 > s {
                spans.push((s, g0));
            }
            s = g1;
        }
        if s < len {
            spans.push((s, len));
        }
        let mut ids = Vec::new();
        for (s0, s1) in spans {
            let n = ((s1 - s0) / MAX_PANEL).ceil().max(1.0) as usize;
            let w = (s1 - s0) / n as f64;
            for k in 0..n {
                let id = format!("{prefix}_{:02}", ids.len());
                let mid = a + dir * (s0 + w * (k as f64 + 0.5));
                let mut o = object(
                    &id,
                    ObjectKind::WallPanel,
                    300.0,
                    [w / 2.0, WALL_HALF_THICKNESS, WALL_HEIGHT / 2.0],
                    [mid.x, mid.y, 0.0],
                    Some(floor),
                    false,
                    (0.8, 0.7),
                );
                o.pose.yaw = dir.angle();
                o.damaged_variant = Some(format!("{id}_cracked"));
                self.objects.push(o);
                ids.push(id);
            }
        }
        ids
    }

    fn interactable(&mut self, id: &str, kind: InteractableKind, object: &str, region: &str) {
        self.interactables.push(Interactable {
            id: id.into(),
            kind,
            object: object.into(),
            region: region.into(),
            state: None,
        });
    }
}

const WOOD: (f64, f64) = (0.6, 0.5);
const SMOOTH: (f64, f64) = (0.2, 0.15);
const RUBBER: (f64, f64) = (0.9, 0.8);

fn build_demo(b: &mut Builder) -> (Vec<Region>, WalkGraph) {
    use ObjectKind::*;
    let regions = vec![
        Region {
            id: "outdoor".into(),
            polygon: rect(0.0, -20.0, 50.0, 0.0),
            staging: Staging::OnStage,
            outdoor: true,
        },
        Region {
            id: "exit_hall".into(),
            polygon: rect(0.0, 0.0, 10.0, 8.0),
            staging: Staging::OnStage,
            outdoor: false,
        },
        Region {
            id: "lobby".into(),
            polygon: rect(10.0, 0.0, 20.0, 8.0),
            staging: Staging::OnStage,
            outdoor: false,
        },
        Region {
            id: "corridor".into(),
            polygon: rect(20.0, 0.0, 50.0, 4.0),
            staging: Staging::OnStage,
            outdoor: false,
        },
        Region {
            id: "meeting_room".into(),
            polygon: rect(20.0, 4.0, 30.0, 12.0),
            staging: Staging::OnStage,
            outdoor: false,
        },
        Region {
            id: "office".into(),
            polygon: rect(30.0, 4.0, 40.0, 12.0),
            staging: Staging::OffStage,
            outdoor: false,
        },
        Region {
            id: "kitchen".into(),
            polygon: rect(40.0, 4.0, 50.0, 12.0),
            staging: Staging::OnStage,
            outdoor: false,
        },
        Region {
            id: "archive".into(),
            polygon: rect(30.0, 12.0, 50.0, 20.0),
            staging: Staging::OffStage,
            outdoor: false,
        },
    ];
    b.floor("outdoor_floor", 0.0, -20.0, 50.0, 0.0);
    b.floor("hall_floor", 0.0, 0.0, 10.0, 8.0);
    b.floor("lobby_floor", 10.0, 0.0, 20.0, 8.0);
    b.floor("corridor_floor", 20.0, 0.0, 50.0, 4.0);
    b.floor("meeting_floor", 20.0, 4.0, 30.0, 12.0);
    b.floor("office_floor", 30.0, 4.0, 40.0, 12.0);
    b.floor("kitchen_floor", 40.0, 4.0, 50.0, 12.0);
    b.floor("archive_floor", 30.0, 12.0, 50.0, 20.0);

    // envelope and partitions
    let hall_south = b.wall(
        "hall_s",
        "hall_floor",
        (0.0, 0.0),
        (10.0, 0.0),
        &[(3.0, 5.0), (7.0, 9.0)],
    );
    b.wall("hall_w", "hall_floor", (0.0, 0.0), (0.0, 8.0), &[]);
    b.wall("hall_n", "hall_floor", (0.0, 8.0), (10.0, 8.0), &[]);
    b.wall(
        "hall_e",
        "hall_floor",
        (10.0, 0.0),
        (10.0, 8.0),
        &[(3.0, 5.0)],
    );
    b.wall("lobby_s", "lobby_floor", (10.0, 0.0), (20.0, 0.0), &[]);
    b.wall("lobby_n", "lobby_floor", (10.0, 8.0), (20.0, 8.0), &[]);
    b.wall("cor_s", "corridor_floor", (20.0, 0.0), (50.0, 0.0), &[]);
    b.wall("cor_e", "corridor_floor", (50.0, 0.0), (50.0, 4.0), &[]);
    b.wall("mr_w", "meeting_floor", (20.0, 4.0), (20.0, 12.0), &[]);
    b.wall("mr_n", "meeting_floor", (20.0, 12.0), (30.0, 12.0), &[]);
    b.wall("mr_e", "meeting_floor", (30.0, 4.0), (30.0, 12.0), &[]);
    b.wall(
        "mr_s",
        "meeting_floor",
        (20.0, 4.0),
        (30.0, 4.0),
        &[(4.0, 6.0)],
    );
    b.wall(
        "off_s",
        "office_floor",
        (30.0, 4.0),
        (40.0, 4.0),
        &[(4.0, 6.0)],
    );
    b.wall("off_e", "office_floor", (40.0, 4.0), (40.0, 12.0), &[]);
    b.wall(
        "k_s",
        "kitchen_floor",
        (40.0, 4.0),
        (50.0, 4.0),
        &[(4.0, 6.0)],
    );
    b.wall("k_e", "kitchen_floor", (50.0, 4.0), (50.0, 12.0), &[]);
    b.wall("k_n", "kitchen_floor", (40.0, 12.0), (50.0, 12.0), &[]);
    b.wall("off_n", "office_floor", (30.0, 12.0), (40.0, 12.0), &[]);
    b.wall("arc_w", "archive_floor", (30.0, 12.0), (30.0, 20.0), &[]);
    b.wall("arc_n", "archive_floor", (30.0, 20.0), (50.0, 20.0), &[]);
    b.wall("arc_e", "archive_floor", (50.0, 12.0), (50.0, 20.0), &[]);

    // meeting room
    b.put(
        "mr_table",
        Furniture,
        "meeting_floor",
        23.5,
        9.5,
        [1.2, 0.5, 0.375],
        35.0,
        WOOD,
    );
    for (i, (x, y)) in [(22.8, 10.7), (24.2, 10.7), (22.8, 8.35), (24.2, 8.35)]
        .iter()
        .enumerate()
    {
        b.put(
            &format!("mr_chair_{}", i + 1),
            Furniture,
            "meeting_floor",
            *x,
            *y,
            [0.25, 0.25, 0.45],
            6.0,
            WOOD,
        );
    }
    b.put(
        "mr_laptop",
        LooseItem,
        "mr_table",
        23.0,
        9.5,
        [0.17, 0.12, 0.01],
        1.5,
        (0.35, 0.3),
    );
    b.put(
        "mr_phone",
        LooseItem,
        "mr_table",
        24.0,
        9.3,
        [0.04, 0.08, 0.005],
        0.2,
        SMOOTH,
    );
    b.put(
        "mr_bag",
        LooseItem,
        "mr_table",
        22.6,
        9.7,
        [0.2, 0.1, 0.15],
        2.0,
        (0.5, 0.4),
    );
    b.put(
        "mr_cup",
        LooseItem,
        "mr_table",
        24.4,
        9.7,
        [0.04, 0.04, 0.05],
        0.3,
        SMOOTH,
    );
    b.put(
        "mr_glass_jug",
        LooseItem,
        "mr_table",
        23.6,
        9.8,
        [0.06, 0.06, 0.12],
        1.2,
        SMOOTH,
    );
    b.put(
        "mr_shelf",
        Furniture,
        "meeting_floor",
        29.6,
        7.0,
        [0.2, 0.6, 1.0],
        40.0,
        WOOD,
    );
    for i in 0..4 {
        let y = 6.6 + 0.25 * i as f64;
        b.put(
            &format!("mr_book_{}", i + 1),
            LooseItem,
            "mr_shelf",
            29.6,
            y,
            [0.1, 0.03, 0.12],
            0.6,
            (0.4, 0.3),
        );
    }
    b.put(
        "mr_cabinet",
        Furniture,
        "meeting_floor",
        29.5,
        10.5,
        [0.3, 0.5, 0.45],
        25.0,
        WOOD,
    );
    b.put(
        "mr_printer",
        LooseItem,
        "mr_cabinet",
        29.5,
        10.75,
        [0.22, 0.2, 0.12],
        9.0,
        (0.3, 0.25),
    );
    b.put(
        "mr_radio",
        LooseItem,
        "mr_cabinet",
        29.5,
        10.2,
        [0.12, 0.06, 0.08],
        1.0,
        (0.3, 0.25),
    );
    b.fixture(
        "mr_first_aid",
        "meeting_floor",
        20.25,
        11.0,
        [0.15, 0.15, 0.2],
    );
    for (i, (x, y)) in [(23.0, 7.0), (26.0, 9.0), (27.5, 6.0)].iter().enumerate() {
        b.tile(&format!("mr_tile_{}", i + 1), "meeting_floor", *x, *y);
    }
    b.interactable(
        "mr_bag",
        InteractableKind::Belongings,
        "mr_bag",
        "meeting_room",
    );
    b.interactable(
        "mr_phone",
        InteractableKind::Phone,
        "mr_phone",
        "meeting_room",
    );
    b.interactable(
        "mr_laptop",
        InteractableKind::Laptop,
        "mr_laptop",
        "meeting_room",
    );
    b.interactable(
        "mr_printer",
        InteractableKind::Printer,
        "mr_printer",
        "meeting_room",
    );
    b.interactable(
        "mr_radio",
        InteractableKind::Radio,
        "mr_radio",
        "meeting_room",
    );
    b.interactable(
        "mr_first_aid",
        InteractableKind::FirstAidKit,
        "mr_first_aid",
        "meeting_room",
    );

    // lobby
    b.put(
        "lobby_desk",
        Furniture,
        "lobby_floor",
        15.0,
        7.0,
        [1.2, 0.35, 0.55],
        80.0,
        WOOD,
    );
    b.put(
        "lobby_radio",
        LooseItem,
        "lobby_desk",
        14.5,
        7.0,
        [0.12, 0.06, 0.08],
        1.0,
        (0.3, 0.25),
    );
    b.put(
        "lobby_monitor",
        LooseItem,
        "lobby_desk",
        15.5,
        7.0,
        [0.25, 0.08, 0.2],
        4.0,
        (0.4, 0.3),
    );
    b.put(
        "lobby_bench",
        Furniture,
        "lobby_floor",
        13.0,
        1.0,
        [0.9, 0.25, 0.22],
        20.0,
        RUBBER,
    );
    b.put(
        "lobby_plant",
        Furniture,
        "lobby_floor",
        19.4,
        0.6,
        [0.2, 0.2, 0.5],
        8.0,
        (0.5, 0.4),
    );
    b.fixture("lobby_stairs", "lobby_floor", 18.8, 6.8, [0.9, 1.0, 0.1]);
    b.fixture("lobby_escalator", "lobby_floor", 11.5, 6.8, [1.0, 0.8, 0.1]);
    b.fixture("lobby_lift", "lobby_floor", 17.5, 0.9, [0.8, 0.6, 1.2]);
    b.interactable(
        "lobby_radio",
        InteractableKind::Radio,
        "lobby_radio",
        "lobby",
    );
    b.interactable("stairs", InteractableKind::Stairs, "lobby_stairs", "lobby");
    b.interactable(
        "escalator",
        InteractableKind::Escalator,
        "lobby_escalator",
        "lobby",
    );
    b.interactable("lift", InteractableKind::Lift, "lobby_lift", "lobby");

    // exit hall
    b.put(
        "hall_bench",
        Furniture,
        "hall_floor",
        2.0,
        6.8,
        [0.9, 0.25, 0.22],
        20.0,
        RUBBER,
    );
    b.put(
        "hall_vending",
        Furniture,
        "hall_floor",
        9.3,
        7.2,
        [0.4, 0.35, 0.9],
        120.0,
        (0.5, 0.4),
    );
    b.interactable(
        "main_exit",
        InteractableKind::Door,
        &hall_south[1],
        "exit_hall",
    );
    b.interactable(
        "side_exit",
        InteractableKind::Door,
        &hall_south[3],
        "exit_hall",
    );

    // corridor
    b.put(
        "cor_stand",
        Furniture,
        "corridor_floor",
        32.0,
        0.45,
        [0.4, 0.25, 0.4],
        12.0,
        WOOD,
    );
    b.put(
        "cor_printer",
        LooseItem,
        "cor_stand",
        32.0,
        0.45,
        [0.22, 0.2, 0.12],
        9.0,
        (0.3, 0.25),
    );
    b.put(
        "cor_trolley",
        Furniture,
        "corridor_floor",
        38.0,
        0.55,
        [0.4, 0.3, 0.45],
        15.0,
        (0.15, 0.1),
    );
    b.put(
        "cor_tray",
        LooseItem,
        "cor_trolley",
        38.0,
        0.55,
        [0.2, 0.15, 0.02],
        0.5,
        SMOOTH,
    );
    for (i, x) in [24.0, 33.0, 43.0].iter().enumerate() {
        b.tile(&format!("cor_tile_{}", i + 1), "corridor_floor", *x, 2.5);
    }
    b.interactable(
        "cor_printer",
        InteractableKind::Printer,
        "cor_printer",
        "corridor",
    );

    // kitchen
    b.put(
        "k_counter",
        Furniture,
        "kitchen_floor",
        46.0,
        11.4,
        [2.0, 0.4, 0.45],
        90.0,
        WOOD,
    );
    b.put(
        "k_kettle",
        LooseItem,
        "k_counter",
        45.0,
        11.4,
        [0.1, 0.1, 0.12],
        1.2,
        SMOOTH,
    );
    b.put(
        "k_microwave",
        LooseItem,
        "k_counter",
        47.0,
        11.4,
        [0.25, 0.2, 0.15],
        12.0,
        (0.4, 0.3),
    );
    b.put(
        "k_mug_1",
        LooseItem,
        "k_counter",
        45.6,
        11.3,
        [0.04, 0.04, 0.05],
        0.3,
        SMOOTH,
    );
    b.put(
        "k_mug_2",
        LooseItem,
        "k_counter",
        45.8,
        11.5,
        [0.04, 0.04, 0.05],
        0.3,
        SMOOTH,
    );
    b.put(
        "k_table",
        Furniture,
        "kitchen_floor",
        43.0,
        9.8,
        [0.6, 0.6, 0.375],
        20.0,
        WOOD,
    );
    b.put(
        "k_fruit_bowl",
        LooseItem,
        "k_table",
        43.0,
        9.8,
        [0.12, 0.12, 0.05],
        1.0,
        (0.4, 0.3),
    );
    b.fixture(
        "k_extinguisher",
        "kitchen_floor",
        49.7,
        6.0,
        [0.1, 0.1, 0.3],
    );
    b.interactable(
        "k_extinguisher",
        InteractableKind::FireExtinguisher,
        "k_extinguisher",
        "kitchen",
    );

    // office (off stage)
    for (i, (x, y)) in [
        (32.0, 6.5),
        (35.0, 6.5),
        (38.0, 6.5),
        (32.0, 10.0),
        (35.0, 10.0),
    ]
    .iter()
    .enumerate()
    {
        let desk = format!("off_desk_{}", i + 1);
        b.put(
            &desk,
            Furniture,
            "office_floor",
            *x,
            *y,
            [0.7, 0.4, 0.375],
            30.0,
            WOOD,
        );
        b.put(
            &format!("off_screen_{}", i + 1),
            LooseItem,
            &desk,
            *x,
            *y + 0.15,
            [0.25, 0.08, 0.2],
            4.0,
            (0.4, 0.3),
        );
        b.put(
            &format!("off_mug_{}", i + 1),
            LooseItem,
            &desk,
            *x + 0.4,
            *y - 0.2,
            [0.04, 0.04, 0.05],
            0.3,
            SMOOTH,
        );
        b.put(
            &format!("off_chair_{}", i + 1),
            Furniture,
            "office_floor",
            *x,
            *y - 0.8,
            [0.25, 0.25, 0.45],
            8.0,
            (0.2, 0.15),
        );
    }
    b.put(
        "off_shelf",
        Furniture,
        "office_floor",
        39.6,
        10.0,
        [0.2, 0.8, 1.0],
        45.0,
        WOOD,
    );
    for i in 0..3 {
        b.put(
            &format!("off_binder_{}", i + 1),
            LooseItem,
            "off_shelf",
            39.6,
            9.6 + 0.4 * i as f64,
            [0.1, 0.04, 0.15],
            0.8,
            (0.4, 0.3),
        );
    }

    // archive (off stage)
    for i in 0..6 {
        let x = 32.0 + 3.0 * i as f64;
        let rack = format!("arc_rack_{}", i + 1);
        b.put(
            &rack,
            Furniture,
            "archive_floor",
            x,
            16.0,
            [0.25, 1.2, 1.1],
            50.0,
            WOOD,
        );
        for j in 0..3 {
            b.put(
                &format!("arc_box_{}_{}", i + 1, j + 1),
                LooseItem,
                &rack,
                x,
                15.2 + 0.8 * j as f64,
                [0.2, 0.2, 0.15],
                3.0,
                (0.35, 0.3),
            );
        }
    }

    let node = |id: &str, x: f64, y: f64| WalkNode {
        id: id.into(),
        position: Vec2::new(x, y),
    };
    let nodes = vec![
        node("out_start", 25.0, -10.0),
        node("assembly_open", 25.0, -17.0),
        node("assembly_near", 6.0, -2.0),
        node("out_main", 4.0, -1.5),
        node("out_side", 8.0, -1.5),
        node("hall_main", 4.0, 1.5),
        node("hall_side", 8.0, 1.5),
        node("hall_c", 5.0, 4.0),
        node("lobby_c", 15.0, 4.0),
        node("lobby_n", 13.0, 5.4),
        node("lobby_s", 15.0, 2.2),
        node("cor_w", 22.0, 2.0),
        node("cor_mr", 25.0, 2.0),
        node("cor_mid", 30.0, 2.0),
        node("cor_off", 35.0, 2.0),
        node("cor_k", 45.0, 2.0),
        node("cor_e", 48.0, 2.0),
        node("mr_door", 25.0, 5.0),
        node("mr_c", 25.0, 8.0),
        node("mr_w", 21.2, 7.0),
        node("mr_e", 27.0, 7.0),
        node("off_c", 35.0, 8.0),
        node("k_c", 45.0, 8.0),
    ];
    let pairs = [
        ("out_start", "assembly_open"),
        ("out_start", "out_main"),
        ("out_start", "out_side"),
        ("assembly_near", "out_main"),
        ("assembly_near", "out_side"),
        ("out_main", "hall_main"),
        ("out_side", "hall_side"),
        ("hall_main", "hall_side"),
        ("hall_main", "hall_c"),
        ("hall_side", "hall_c"),
        ("hall_c", "lobby_c"),
        ("lobby_c", "lobby_n"),
        ("lobby_c", "lobby_s"),
        ("lobby_c", "cor_w"),
        ("cor_w", "cor_mr"),
        ("cor_mr", "cor_mid"),
        ("cor_mid", "cor_off"),
        ("cor_off", "cor_k"),
        ("cor_k", "cor_e"),
        ("cor_mr", "mr_door"),
        ("mr_door", "mr_c"),
        ("mr_c", "mr_w"),
        ("mr_c", "mr_e"),
        ("cor_off", "off_c"),
        ("cor_k", "k_c"),
    ];
    let edges = pairs
        .iter()
        .map(|(a, c)| WalkEdge {
            a: a.to_string(),
            b: c.to_string(),
            length: None,
        })
        .collect();
    (regions, WalkGraph { nodes, edges })
}

fn assemble(b: Builder, regions: Vec<Region>, walk_graph: WalkGraph) -> SceneGraph {
    let scene = SceneGraph {
        schema_version: SCENE_SCHEMA_VERSION,
        objects: b.objects,
        regions,
        walk_graph,
        exits: vec!["hall_main".into(), "hall_side".into()],
        assembly_areas: vec![
            AssemblyArea {
                node: "assembly_open".into(),
                safe: true,
            },
            AssemblyArea {
                node: "assembly_near".into(),
                safe: false,
            },
        ],
        interactables: b.interactables,
        index: BTreeMap::new(),
    };
    finalize(scene).expect("bundled scene is valid")
}

/// The demo building.
pub fn demo_scene() -> SceneGraph {
    let mut b = Builder {
        objects: Vec::new(),
        interactables: Vec::new(),
    };
    let (regions, graph) = build_demo(&mut b);
    assemble(b, regions, graph)
}

/// The demo building with crates stacked in the yard until it holds
/// [`REFERENCE_DYNAMIC_OBJECTS`] dynamic objects.
pub fn reference_scene() -> SceneGraph {
    let mut b = Builder {
        objects: Vec::new(),
        interactables: Vec::new(),
    };
    let (regions, graph) = build_demo(&mut b);
    let mut k = 0;
    let mut col = 0;
    'fill: loop {
        let x = 31.0 + 1.2 * (col % 15) as f64;
        let y = -3.0 - 1.2 * (col / 15) as f64;
        col += 1;
        let mut parent = "outdoor_floor".to_string();
        for level in 0..3 {
            if b.objects.iter().filter(|o| o.dynamic).count() >= REFERENCE_DYNAMIC_OBJECTS {
                break 'fill;
            }
            let id = format!("yard_crate_{k:03}");
            let mu = if level == 0 { (0.5, 0.4) } else { (0.3, 0.25) };
            b.put(
                &id,
                ObjectKind::LooseItem,
                &parent,
                x,
                y,
                [0.4, 0.4, 0.3],
                20.0 - 5.0 * level as f64,
                mu,
            );
            parent = id;
            k += 1;
        }
    }
    assemble(b, regions, graph)
}

fn action(
    id: &str,
    label: &str,
    phases: &[Phase],
    rec: Recommendation,
    tags: &[&str],
    effects: Vec<Effect>,
) -> ActionDef {
    ActionDef {
        id: id.into(),
        label: label.into(),
        phases: phases.to_vec(),
        recommended: rec,
        effects,
        repeatable: false,
        regions: Vec::new(),
        requires: Vec::new(),
        tags: tags.iter().map(|t| t.to_string()).collect(),
        auto: false,
        keeps_cover: false,
    }
}

trait ActionExt {
    fn in_regions(self, r: &[&str]) -> Self;
    fn requires(self, r: Requirement) -> Self;
    fn keeps_cover(self) -> Self;
    fn auto(self) -> Self;
}

impl ActionExt for ActionDef {
    fn in_regions(mut self, r: &[&str]) -> Self {
        self.regions = r.iter().map(|s| s.to_string()).collect();
        self
    }
    fn requires(mut self, r: Requirement) -> Self {
        self.requires.push(r);
        self
    }
    fn keeps_cover(mut self) -> Self {
        self.keeps_cover = true;
        self
    }
    fn auto(mut self) -> Self {
        self.auto = true;
        self
    }
}

fn set(id: &str, state: InteractableState) -> Effect {
    Effect::SetInteractable {
        id: id.into(),
        state,
    }
}

fn line(speaker: NpcRole, text: &str) -> DialogueLine {
    DialogueLine {
        speaker,
        text: text.into(),
    }
}

fn rule(on: TriggerPattern, response: Vec<Response>) -> TriggerRule {
    TriggerRule {
        on,
        response,
        once: true,
    }
}

fn npc(id: &str, role: NpcRole, start: &str, routine: Vec<RoutineStep>) -> NpcAgent {
    NpcAgent {
        id: id.into(),
        role,
        interactive: false,
        start_node: start.into(),
        routine,
        triggers: Vec::new(),
        special_states: BTreeSet::new(),
        speed: None,
        state: Default::default(),
    }
}

fn stay(activity: Activity, duration: f64) -> RoutineStep {
    RoutineStep {
        activity,
        duration,
        path: Vec::new(),
    }
}

fn walk(duration: f64, path: &[&str]) -> RoutineStep {
    RoutineStep {
        activity: Activity::Walking,
        duration,
        path: path.iter().map(|s| s.to_string()).collect(),
    }
}

/// Ambient characters shared by both stories.
fn ambient_npcs() -> Vec<NpcAgent> {
    use Activity::*;
    let mut patient = npc("patient_bed", NpcRole::Patient, "cor_mid", vec![]);
    patient.special_states.insert(SpecialState::Injured);
    vec![
        patient,
        npc(
            "receptionist",
            NpcRole::AdminStaff,
            "lobby_n",
            vec![stay(Sitting, 40.0), stay(Talking, 15.0)],
        ),
        npc(
            "porter",
            NpcRole::AdminStaff,
            "cor_w",
            vec![
                walk(24.0, &["cor_mr", "cor_mid", "cor_off", "cor_k", "cor_e"]),
                stay(Standing, 6.0),
                walk(24.0, &["cor_k", "cor_off", "cor_mid", "cor_mr", "cor_w"]),
                stay(Standing, 6.0),
            ],
        ),
        npc(
            "visitor_a",
            NpcRole::Visitor,
            "lobby_s",
            vec![stay(Talking, 30.0), stay(Standing, 10.0)],
        ),
        npc(
            "visitor_b",
            NpcRole::Visitor,
            "lobby_s",
            vec![stay(Talking, 30.0), stay(Drinking, 10.0)],
        ),
        npc(
            "patient_walker",
            NpcRole::Patient,
            "hall_c",
            vec![
                walk(10.0, &["lobby_c"]),
                stay(Standing, 8.0),
                walk(10.0, &["hall_c"]),
                stay(Sitting, 12.0),
            ],
        ),
        npc(
            "kitchen_1",
            NpcRole::AdminStaff,
            "k_c",
            vec![stay(Eating, 50.0), stay(Drinking, 10.0)],
        ),
        npc(
            "kitchen_2",
            NpcRole::Nurse,
            "k_c",
            vec![stay(Drinking, 25.0), stay(Talking, 25.0)],
        ),
        npc(
            "nurse_rounds",
            NpcRole::Nurse,
            "cor_e",
            vec![
                walk(22.0, &["cor_k", "cor_off", "cor_mid", "cor_mr", "cor_w"]),
                stay(Talking, 8.0),
                walk(22.0, &["cor_mr", "cor_mid", "cor_off", "cor_k", "cor_e"]),
                stay(Standing, 8.0),
            ],
        ),
        npc(
            "doctor_rounds",
            NpcRole::Doctor,
            "cor_k",
            vec![
                walk(10.0, &["k_c"]),
                stay(Drinking, 15.0),
                walk(10.0, &["cor_k"]),
                stay(Standing, 10.0),
            ],
        ),
        npc(
            "visitor_c",
            NpcRole::Visitor,
            "hall_c",
            vec![stay(Sitting, 60.0)],
        ),
        npc(
            "guard",
            NpcRole::AdminStaff,
            "hall_main",
            vec![stay(Standing, 30.0), stay(Talking, 10.0)],
        ),
    ]
}

fn story_steps() -> Vec<StoryStep> {
    let step = |id: &str, phase, prompt: &str| StoryStep {
        id: id.into(),
        phase,
        prompt: prompt.into(),
    };
    vec![
        step(
            "arrive",
            Phase::PreQuake,
            "Follow your host to the meeting room on the ground floor.",
        ),
        step("shaking", Phase::Earthquake, "The building is shaking."),
        step("after", Phase::PreEvacuation, "The shaking has stopped."),
        step(
            "leave",
            Phase::IndoorEvacuation,
            "Make your way out of the building.",
        ),
        step("outside", Phase::OutdoorEvacuation, "You are outside."),
        step("debrief", Phase::Debrief, "Review what you did."),
    ]
}

fn damage_spec(extra: &[(&str, &str)]) -> DamageSpec {
    let mut swaps: Vec<DamageSwap> = [
        "mr_n_01",
        "mr_e_02",
        "mr_tile_1",
        "mr_tile_2",
        "mr_tile_3",
        "cor_tile_2",
    ]
    .iter()
    .map(|o| DamageSwap {
        object: o.to_string(),
        variant: format!("{o}_cracked"),
    })
    .collect();
    swaps.extend(extra.iter().map(|(o, v)| DamageSwap {
        object: o.to_string(),
        variant: v.to_string(),
    }));
    DamageSpec {
        swaps,
        trigger: DamageTrigger::AtQuakeEnd,
        placement_tags: vec!["debris".into()],
    }
}

fn shared_dialogue() -> BTreeMap<String, DialogueLine> {
    use NpcRole::*;
    [
        (
            "doctor_welcome",
            line(
                Doctor,
                "Welcome. Leave your belongings on the table and take a seat.",
            ),
        ),
        (
            "visitor_welcome",
            line(Visitor, "Hi, I think we're both here for the same tour."),
        ),
        (
            "doctor_hold",
            line(Doctor, "Wait here while I check the corridor."),
        ),
        (
            "doctor_go",
            line(Doctor, "Right, it's time to leave. Head for the exit."),
        ),
        (
            "visitor_hurt",
            line(Visitor, "Ouch, my arm. Something fell on me."),
        ),
        (
            "visitor_thanks",
            line(Visitor, "Thank you, that helps a lot."),
        ),
        (
            "nurse_ask",
            line(Nurse, "Can you give me a hand with this patient?"),
        ),
        ("nurse_thanks", line(Nurse, "Thanks, we can move him now.")),
        (
            "victim_call",
            line(AdminStaff, "I'm stuck under here, help!"),
        ),
        (
            "victim_thanks",
            line(AdminStaff, "Thank you, I can stand now."),
        ),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

fn host_npcs(training: bool) -> Vec<NpcAgent> {
    let mut doctor = npc("host_doctor", NpcRole::Doctor, "mr_w", vec![]);
    doctor.interactive = true;
    doctor.triggers = vec![
        rule(
            TriggerPattern::PlayerEntersRegion("meeting_room".into()),
            vec![Response::Say("doctor_welcome".into())],
        ),
        rule(
            TriggerPattern::PhaseChange(Phase::PreEvacuation),
            vec![
                Response::Say("doctor_hold".into()),
                Response::MoveTo("cor_mr".into()),
            ],
        ),
        rule(
            TriggerPattern::PhaseElapsed {
                phase: Phase::PreEvacuation,
                seconds: 20.0,
            },
            vec![
                Response::Say("doctor_go".into()),
                Response::GrantInstruction("evacuate_now".into()),
            ],
        ),
    ];
    if training {
        doctor.triggers.push(rule(
            TriggerPattern::PhaseChange(Phase::Earthquake),
            vec![Response::GrantInstruction("take_cover_hint".into())],
        ));
    }
    let mut visitor = npc("second_visitor", NpcRole::Visitor, "mr_e", vec![]);
    visitor.interactive = true;
    visitor.triggers = vec![
        rule(
            TriggerPattern::PlayerEntersRegion("meeting_room".into()),
            vec![Response::Say("visitor_welcome".into())],
        ),
        rule(
            TriggerPattern::PhaseChange(Phase::PreEvacuation),
            vec![
                Response::SetSpecial(SpecialState::Injured),
                Response::Say("visitor_hurt".into()),
            ],
        ),
        rule(
            TriggerPattern::PlayerAction("assist_visitor".into()),
            vec![Response::Say("visitor_thanks".into())],
        ),
    ];
    let mut nurse = npc("nurse", NpcRole::Nurse, "cor_mid", vec![]);
    nurse.interactive = true;
    nurse.triggers = vec![
        rule(
            TriggerPattern::PlayerEntersRegion("corridor".into()),
            vec![Response::Say("nurse_ask".into())],
        ),
        rule(
            TriggerPattern::PlayerAction("assist_nurse".into()),
            vec![Response::Say("nurse_thanks".into())],
        ),
    ];
    let mut victim = npc("trapped_clerk", NpcRole::AdminStaff, "cor_off", vec![]);
    victim.interactive = true;
    victim.triggers = vec![
        rule(
            TriggerPattern::PhaseChange(Phase::PreEvacuation),
            vec![
                Response::SetSpecial(SpecialState::UnderDebris),
                Response::Say("victim_call".into()),
            ],
        ),
        rule(
            TriggerPattern::PlayerAction("free_trapped_clerk".into()),
            vec![Response::Say("victim_thanks".into())],
        ),
    ];
    vec![doctor, visitor, nurse, victim]
}

fn instructions(training: bool) -> BTreeMap<String, Instruction> {
    let mut m = BTreeMap::new();
    m.insert(
        "evacuate_now".to_string(),
        Instruction {
            text: "Please evacuate the building now.".into(),
            feedback: false,
            evacuation: true,
        },
    );
    if training {
        m.insert(
            "take_cover_hint".to_string(),
            Instruction {
                text: "Get under the table and hold on to it.".into(),
                feedback: true,
                evacuation: false,
            },
        );
    }
    m
}

/// Free-roam story: explore and act; nothing is graded during play.
pub fn bp_scenario() -> Scenario {
    use Phase::*;
    use Recommendation::*;
    let mr = &["meeting_room"];
    let actions = vec![
        action(
            "leave_belongings",
            "Put your bag on the table",
            &[PreQuake],
            Neutral,
            &[],
            vec![
                set("mr_bag", InteractableState::OnTable),
                Effect::PhaseEvent(PhaseEvent::BelongingsLeft),
            ],
        )
        .in_regions(mr)
        .requires(Requirement::Interactable {
            id: "mr_bag".into(),
            state: InteractableState::Carried,
        }),
        action(
            "drop_cover_hold_table",
            "Get under the table",
            &[Earthquake],
            Yes,
            &["dch"],
            vec![Effect::TakeCover],
        )
        .in_regions(mr)
        .keeps_cover(),
        action(
            "cover_beside_unsafe_object",
            "Crouch next to the shelf",
            &[Earthquake],
            No,
            &["cover_unsafe"],
            vec![Effect::TakeCover],
        )
        .in_regions(mr)
        .keeps_cover(),
        action(
            "hold_doorframe",
            "Stand in the doorway",
            &[Earthquake],
            No,
            &["doorframe"],
            vec![],
        )
        .in_regions(mr),
        action(
            "run_out_of_room",
            "Run for the exit",
            &[Earthquake],
            No,
            &["run_out"],
            vec![],
        )
        .in_regions(mr),
        action(
            "check_damage",
            "Look around for damage",
            &[PreEvacuation],
            Yes,
            &["check_damage"],
            vec![],
        )
        .in_regions(mr),
        action(
            "unplug_printer",
            "Unplug the printer",
            &[PreEvacuation],
            Yes,
            &["unplug"],
            vec![set("mr_printer", InteractableState::Unplugged)],
        )
        .in_regions(mr),
        action(
            "phone_call",
            "Call someone",
            &[PreEvacuation],
            No,
            &["phone_call"],
            vec![set("mr_phone", InteractableState::Used)],
        )
        .in_regions(mr),
        action(
            "phone_text",
            "Send a text or check the news",
            &[PreEvacuation],
            Yes,
            &["phone_text"],
            vec![],
        )
        .in_regions(mr),
        action(
            "assist_visitor",
            "Help the injured visitor",
            &[PreEvacuation],
            Yes,
            &["assist"],
            vec![Effect::AssistNpc("second_visitor".into())],
        )
        .in_regions(mr)
        .requires(Requirement::NpcNeedsHelp("second_visitor".into())),
        action(
            "use_radio",
            "Switch on the radio",
            &[PreEvacuation],
            Yes,
            &["radio"],
            vec![set("mr_radio", InteractableState::On)],
        )
        .in_regions(mr),
        action(
            "take_first_aid",
            "Take the first aid kit",
            &[PreEvacuation],
            Yes,
            &["first_aid"],
            vec![set("mr_first_aid", InteractableState::Taken)],
        )
        .in_regions(mr),
        action(
            "use_laptop",
            "Open the laptop",
            &[PreEvacuation],
            Yes,
            &["laptop"],
            vec![set("mr_laptop", InteractableState::On)],
        )
        .in_regions(mr),
        action(
            "collect_belongings",
            "Pick up your bag",
            &[PreEvacuation],
            Yes,
            &["belongings"],
            vec![set("mr_bag", InteractableState::Carried)],
        )
        .in_regions(mr)
        .requires(Requirement::Interactable {
            id: "mr_bag".into(),
            state: InteractableState::OnTable,
        }),
        action(
            "start_evacuating",
            "Head out",
            &[PreEvacuation],
            Neutral,
            &["start_evacuating"],
            vec![],
        )
        .in_regions(mr),
        action(
            "check_damage_evac",
            "Look for damage along the way",
            &[IndoorEvacuation],
            Yes,
            &["check_damage_evac"],
            vec![],
        )
        .in_regions(&["corridor"]),
        action(
            "use_stairs",
            "Take the stairs down",
            &[IndoorEvacuation],
            Yes,
            &["descend_stairs"],
            vec![
                Effect::SetFlag("descended".into()),
                Effect::MovePlayer("hall_c".into()),
            ],
        )
        .in_regions(&["lobby"])
        .requires(Requirement::NotFlag("descended".into())),
        action(
            "use_escalator",
            "Walk down the escalator",
            &[IndoorEvacuation],
            Yes,
            &["descend_escalator"],
            vec![
                Effect::SetFlag("descended".into()),
                Effect::MovePlayer("hall_c".into()),
            ],
        )
        .in_regions(&["lobby"])
        .requires(Requirement::NotFlag("descended".into())),
        action(
            "use_lift",
            "Take the lift",
            &[IndoorEvacuation],
            No,
            &["descend_lift"],
            vec![
                Effect::SetFlag("descended".into()),
                Effect::MovePlayer("hall_c".into()),
            ],
        )
        .in_regions(&["lobby"])
        .requires(Requirement::NotFlag("descended".into())),
        action(
            "check_stair_damage",
            "Inspect the stairs",
            &[IndoorEvacuation],
            Yes,
            &["check_stairs"],
            vec![],
        )
        .in_regions(&["lobby"]),
        action(
            "check_injured",
            "Look for anyone hurt",
            &[IndoorEvacuation],
            Yes,
            &["check_injured"],
            vec![],
        )
        .in_regions(&["lobby"]),
        action(
            "wait_near_building",
            "Wait by the wall",
            &[OutdoorEvacuation],
            No,
            &["stay_close"],
            vec![],
        )
        .in_regions(&["outdoor"]),
        action(
            "return_inside",
            "Go back in for something",
            &[OutdoorEvacuation],
            No,
            &["return_inside"],
            vec![Effect::Terminal],
        )
        .in_regions(&["outdoor"]),
        action(
            "go_to_open_space",
            "Walk to the open car park",
            &[OutdoorEvacuation],
            Yes,
            &["safe_area"],
            vec![
                Effect::ReachAssembly("assembly_open".into()),
                Effect::Terminal,
            ],
        )
        .in_regions(&["outdoor"]),
    ];
    let mut npcs = ambient_npcs();
    npcs.extend(host_npcs(false));
    Scenario {
        schema_version: SCENARIO_SCHEMA_VERSION,
        mode: Mode::Bp,
        start_node: "out_start".into(),
        meeting_room: "meeting_room".into(),
        quake: QuakeConfig {
            params: QuakeParams::demo(),
            duration: DEMO_QUAKE_DURATION,
        },
        steps: story_steps(),
        waitpoints: None,
        actions,
        npcs,
        damage_spec: damage_spec(&[]),
        dialogue: shared_dialogue(),
        instructions: instructions(false),
        rationale: BTreeMap::new(),
        on_stage_regions: None,
        relocation_budget: None,
    }
}

fn deg(d: f64) -> f64 {
    d.to_radians()
}

fn panel(action: &str, label: &str, bearing: f64) -> ActionPanel {
    ActionPanel {
        action: action.into(),
        label: label.into(),
        bearing: deg(bearing),
    }
}

fn go(next: &str, trajectory: &[&str]) -> Transition {
    Transition {
        next: next.into(),
        trajectory: trajectory.iter().map(|s| s.to_string()).collect(),
    }
}

#[allow(clippy::too_many_arguments)]
fn stop(
    id: &str,
    node: &str,
    facing: f64,
    phase: Option<Phase>,
    panels: Vec<ActionPanel>,
    outgoing: Vec<(&str, Transition)>,
    on_phase_exit: Option<&str>,
) -> WaitPoint {
    WaitPoint {
        id: id.into(),
        node: node.into(),
        facing: deg(facing),
        phase,
        panels,
        outgoing: outgoing
            .into_iter()
            .map(|(a, t)| (a.to_string(), t))
            .collect(),
        on_phase_exit: on_phase_exit.map(str::to_string),
    }
}

/// Guided training story: fixed stops with choice panels and a debrief.
pub fn tp_scenario() -> Scenario {
    use Phase::*;
    use Recommendation::*;
    let actions = vec![
        action(
            "follow_host",
            "Follow the host inside",
            &[PreQuake],
            Neutral,
            &[],
            vec![],
        ),
        action(
            "leave_belongings",
            "Put your bag on the table",
            &[PreQuake],
            Neutral,
            &[],
            vec![
                set("mr_bag", InteractableState::OnTable),
                Effect::PhaseEvent(PhaseEvent::BelongingsLeft),
            ],
        ),
        action(
            "drop_cover_hold_table",
            "Get under the table",
            &[Earthquake],
            Yes,
            &["dch"],
            vec![Effect::TakeCover],
        )
        .keeps_cover(),
        action(
            "cover_beside_unsafe_object",
            "Crouch next to the shelf",
            &[Earthquake],
            No,
            &["cover_unsafe"],
            vec![Effect::TakeCover],
        )
        .keeps_cover(),
        action(
            "run_out_of_room",
            "Run for the exit",
            &[Earthquake],
            No,
            &["run_out"],
            vec![],
        ),
        action(
            "watch_for_falling_objects",
            "Keep an eye on the shelf and the jug",
            &[Earthquake],
            Yes,
            &["watch_hazards"],
            vec![],
        )
        .keeps_cover(),
        action(
            "grab_falling_jug",
            "Catch the sliding jug",
            &[Earthquake],
            No,
            &["unsafe_reach"],
            vec![],
        ),
        action(
            "stay_under_cover",
            "Stay put for a while",
            &[PreEvacuation],
            Neutral,
            &[],
            vec![Effect::StartTimer {
                seconds: 30.0,
                action: "waited_for_aftershocks".into(),
            }],
        )
        .keeps_cover(),
        action(
            "waited_for_aftershocks",
            "Waited out the aftershocks",
            &[PreEvacuation],
            Yes,
            &["wait_30s"],
            vec![],
        )
        .auto()
        .keeps_cover(),
        action(
            "collect_belongings",
            "Pick up your bag",
            &[PreEvacuation],
            Yes,
            &["belongings"],
            vec![set("mr_bag", InteractableState::Carried)],
        ),
        action(
            "take_first_aid",
            "Take the first aid kit",
            &[PreEvacuation],
            Yes,
            &["first_aid"],
            vec![set("mr_first_aid", InteractableState::Taken)],
        ),
        action(
            "phone_call",
            "Call someone",
            &[PreEvacuation],
            No,
            &["phone_call"],
            vec![set("mr_phone", InteractableState::Used)],
        ),
        action(
            "start_evacuating",
            "Head out",
            &[PreEvacuation],
            Neutral,
            &[],
            vec![],
        ),
        action(
            "assist_nurse",
            "Help the nurse with the patient",
            &[IndoorEvacuation],
            Yes,
            &["assist"],
            vec![Effect::AssistNpc("patient_bed".into())],
        ),
        action(
            "walk_past_nurse",
            "Keep going",
            &[IndoorEvacuation],
            No,
            &[],
            vec![],
        ),
        action(
            "free_trapped_clerk",
            "Lift the debris off the clerk",
            &[IndoorEvacuation],
            Yes,
            &["assist"],
            vec![Effect::AssistNpc("trapped_clerk".into())],
        )
        .requires(Requirement::NpcNeedsHelp("trapped_clerk".into())),
        action(
            "unplug_printer",
            "Unplug the sparking printer",
            &[IndoorEvacuation],
            Yes,
            &["unplug"],
            vec![set("cor_printer", InteractableState::Unplugged)],
        ),
        action(
            "head_to_kitchen",
            "Check the smoke from the kitchen",
            &[IndoorEvacuation],
            Neutral,
            &[],
            vec![],
        ),
        action(
            "use_extinguisher",
            "Use the extinguisher",
            &[IndoorEvacuation],
            Yes,
            &["fire"],
            vec![set("k_extinguisher", InteractableState::Used)],
        ),
        action(
            "raise_fire_alarm",
            "Shout for help about the fire",
            &[IndoorEvacuation],
            Yes,
            &["fire"],
            vec![],
        ),
        action(
            "ignore_fire",
            "Leave it",
            &[IndoorEvacuation],
            No,
            &[],
            vec![],
        ),
        action(
            "listen_radio",
            "Listen to the reception radio",
            &[IndoorEvacuation],
            Yes,
            &["radio"],
            vec![set("lobby_radio", InteractableState::On)],
        ),
        action(
            "use_stairs",
            "Take the stairs down",
            &[IndoorEvacuation],
            Yes,
            &["descend_stairs"],
            vec![],
        ),
        action(
            "use_escalator",
            "Walk down the escalator",
            &[IndoorEvacuation],
            Neutral,
            &["descend_escalator"],
            vec![],
        ),
        action(
            "use_lift",
            "Take the lift",
            &[IndoorEvacuation],
            No,
            &["descend_lift"],
            vec![],
        ),
        action(
            "find_other_exit",
            "Use the side exit",
            &[IndoorEvacuation],
            Yes,
            &["alternate_exit"],
            vec![],
        ),
        action(
            "squeeze_through_door",
            "Squeeze past the jammed door",
            &[IndoorEvacuation],
            No,
            &[],
            vec![],
        ),
        action(
            "go_to_open_space",
            "Walk to the open car park",
            &[OutdoorEvacuation],
            Yes,
            &["safe_area"],
            vec![
                Effect::ReachAssembly("assembly_open".into()),
                Effect::Terminal,
            ],
        ),
        action(
            "wait_near_building",
            "Wait by the wall",
            &[OutdoorEvacuation],
            No,
            &["stay_close"],
            vec![
                Effect::ReachAssembly("assembly_near".into()),
                Effect::Terminal,
            ],
        ),
    ];
    let room_exit: &[&str] = &["mr_door", "cor_mr"];
    let points = vec![
        stop(
            "wp_start",
            "out_start",
            90.0,
            None,
            vec![panel("follow_host", "Follow the host inside", 0.0)],
            vec![(
                "follow_host",
                go(
                    "wp_meeting",
                    &[
                        "out_side",
                        "hall_side",
                        "hall_c",
                        "lobby_c",
                        "cor_w",
                        "cor_mr",
                        "mr_door",
                    ],
                ),
            )],
            None,
        ),
        stop(
            "wp_meeting",
            "mr_c",
            90.0,
            Some(PreQuake),
            vec![panel("leave_belongings", "Put your bag on the table", 0.0)],
            vec![("leave_belongings", go("wp_shaking", &[]))],
            None,
        ),
        stop(
            "wp_shaking",
            "mr_c",
            90.0,
            Some(Earthquake),
            vec![
                panel("drop_cover_hold_table", "Get under the table", 60.0),
                panel(
                    "cover_beside_unsafe_object",
                    "Crouch next to the shelf",
                    0.0,
                ),
                panel("run_out_of_room", "Run for the exit", -60.0),
            ],
            vec![
                ("drop_cover_hold_table", go("wp_hazards", &[])),
                ("cover_beside_unsafe_object", go("wp_hazards", &[])),
                ("run_out_of_room", go("wp_hazards", &[])),
            ],
            Some("wp_after"),
        ),
        stop(
            "wp_hazards",
            "mr_c",
            90.0,
            Some(Earthquake),
            vec![
                panel(
                    "watch_for_falling_objects",
                    "Keep an eye on the shelf and the jug",
                    40.0,
                ),
                panel("grab_falling_jug", "Catch the sliding jug", -40.0),
            ],
            vec![
                ("watch_for_falling_objects", go("wp_hazards", &[])),
                ("grab_falling_jug", go("wp_hazards", &[])),
            ],
            Some("wp_after"),
        ),
        stop(
            "wp_after",
            "mr_c",
            90.0,
            Some(PreEvacuation),
            vec![
                panel("stay_under_cover", "Stay put for a while", 60.0),
                panel("collect_belongings", "Pick up your bag", 30.0),
                panel("take_first_aid", "Take the first aid kit", 0.0),
                panel("phone_call", "Call someone", -30.0),
                panel("start_evacuating", "Head out", -90.0),
            ],
            vec![
                ("stay_under_cover", go("wp_after", &[])),
                ("collect_belongings", go("wp_after", &[])),
                ("take_first_aid", go("wp_after", &[])),
                ("phone_call", go("wp_after", &[])),
                ("start_evacuating", go("wp_corridor", room_exit)),
            ],
            None,
        ),
        stop(
            "wp_corridor",
            "cor_mid",
            0.0,
            None,
            vec![
                panel("assist_nurse", "Help the nurse with the patient", 40.0),
                panel("walk_past_nurse", "Keep going", -40.0),
            ],
            vec![
                ("assist_nurse", go("wp_debris", &[])),
                ("walk_past_nurse", go("wp_debris", &[])),
            ],
            None,
        ),
        stop(
            "wp_debris",
            "cor_off",
            0.0,
            None,
            vec![
                panel("free_trapped_clerk", "Lift the debris off the clerk", 40.0),
                panel("unplug_printer", "Unplug the sparking printer", -60.0),
                panel("head_to_kitchen", "Check the smoke from the kitchen", 0.0),
            ],
            vec![
                ("free_trapped_clerk", go("wp_debris", &[])),
                ("unplug_printer", go("wp_debris", &[])),
                ("head_to_kitchen", go("wp_kitchen", &["cor_k"])),
            ],
            None,
        ),
        stop(
            "wp_kitchen",
            "k_c",
            90.0,
            None,
            vec![
                panel("use_extinguisher", "Use the extinguisher", -40.0),
                panel("raise_fire_alarm", "Shout for help about the fire", 40.0),
                panel("ignore_fire", "Leave it", 180.0),
            ],
            vec![
                (
                    "use_extinguisher",
                    go(
                        "wp_reception",
                        &["cor_k", "cor_off", "cor_mid", "cor_mr", "cor_w"],
                    ),
                ),
                (
                    "raise_fire_alarm",
                    go(
                        "wp_reception",
                        &["cor_k", "cor_off", "cor_mid", "cor_mr", "cor_w"],
                    ),
                ),
                (
                    "ignore_fire",
                    go(
                        "wp_reception",
                        &["cor_k", "cor_off", "cor_mid", "cor_mr", "cor_w"],
                    ),
                ),
            ],
            None,
        ),
        stop(
            "wp_reception",
            "lobby_c",
            180.0,
            None,
            vec![
                panel("listen_radio", "Listen to the reception radio", 90.0),
                panel("use_stairs", "Take the stairs down", 150.0),
                panel("use_escalator", "Walk down the escalator", -150.0),
                panel("use_lift", "Take the lift", -90.0),
            ],
            vec![
                ("listen_radio", go("wp_reception", &[])),
                ("use_stairs", go("wp_ground", &["hall_c"])),
                ("use_escalator", go("wp_ground", &["hall_c"])),
                ("use_lift", go("wp_ground", &["hall_c"])),
            ],
            None,
        ),
        stop(
            "wp_ground",
            "hall_main",
            -90.0,
            None,
            vec![
                panel("find_other_exit", "Use the side exit", 60.0),
                panel("squeeze_through_door", "Squeeze past the jammed door", 0.0),
            ],
            vec![
                (
                    "find_other_exit",
                    go("wp_outside", &["hall_side", "out_side"]),
                ),
                ("squeeze_through_door", go("wp_outside", &["out_main"])),
            ],
            None,
        ),
        stop(
            "wp_outside",
            "out_start",
            -90.0,
            None,
            vec![
                panel("go_to_open_space", "Walk to the open car park", 0.0),
                panel("wait_near_building", "Wait by the wall", 150.0),
            ],
            vec![],
            None,
        ),
        stop(
            "wp_debrief",
            "out_start",
            -90.0,
            Some(Debrief),
            vec![],
            vec![],
            None,
        ),
    ];
    let waitpoints = WaitPointGraph::new(
        "wp_start".into(),
        "wp_debrief".into(),
        points,
        ["go_to_open_space", "wait_near_building"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        &demo_scene().walk_graph,
    )
    .expect("bundled wait points are valid");
    let mut npcs = ambient_npcs();
    npcs.extend(host_npcs(true));
    let rationale = [
        (
            "dch",
            "A sturdy table shields you from falling objects while the floor moves.",
        ),
        (
            "watch_hazards",
            "Shelves, jugs and glass can move or break while the shaking lasts.",
        ),
        (
            "wait_30s",
            "Aftershocks often follow within moments, so stay covered before moving.",
        ),
        (
            "belongings",
            "Keys, phone and medicine are hard to get back once the building is closed.",
        ),
        (
            "first_aid",
            "Injuries are likely and help may take a while to arrive.",
        ),
        (
            "help_people",
            "People nearby may be hurt or trapped and you can reach them first.",
        ),
        (
            "find_exit",
            "A jammed door can fail completely; another exit is quicker and safer.",
        ),
        (
            "fire",
            "Small fires after shaking spread fast if nobody deals with them.",
        ),
        (
            "unplug",
            "Damaged equipment can start a fire or give a shock.",
        ),
        (
            "radio",
            "Broadcasts tell you about aftershocks and where to go.",
        ),
        ("stairs", "Lifts can stop between floors when power fails."),
        (
            "open_space",
            "Walls and glass can still fall near the building.",
        ),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect();
    Scenario {
        schema_version: SCENARIO_SCHEMA_VERSION,
        mode: Mode::Tp,
        start_node: "out_start".into(),
        meeting_room: "meeting_room".into(),
        quake: QuakeConfig {
            params: QuakeParams::demo(),
            duration: DEMO_QUAKE_DURATION,
        },
        steps: story_steps(),
        waitpoints: Some(waitpoints),
        actions,
        npcs,
        damage_spec: damage_spec(&[("hall_s_01", "hall_s_01_cracked")]),
        dialogue: shared_dialogue(),
        instructions: instructions(true),
        rationale,
        on_stage_regions: None,
        relocation_budget: None,
    }
}

/// Free-roam story set up for load testing: the player starts in the
/// meeting room, the shaking lasts long and twenty NPCs are about.
pub fn reference_scenario() -> Scenario {
    let mut sc = bp_scenario();
    sc.start_node = "mr_c".into();
    sc.quake.duration = 30.0;
    sc.quake.params.envelope = crate::quake::Envelope::Trapezoid {
        rise: 2.0,
        hold: 26.0,
        decay: 2.0,
    };
    let extra = REFERENCE_NPCS - sc.npcs.len();
    let loop_path = [
        "cor_mr", "cor_mid", "cor_off", "cor_k", "cor_e", "cor_k", "cor_off", "cor_mid", "cor_mr",
        "cor_w",
    ];
    for i in 0..extra {
        sc.npcs.push(npc(
            &format!("extra_walker_{}", i + 1),
            NpcRole::Visitor,
            "cor_w",
            vec![
                walk(45.0 + i as f64, &loop_path),
                stay(Activity::Standing, 5.0),
            ],
        ));
    }
    sc
}
