use crate::geom::{OrientedRect, Vec2};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const SCENE_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_MU_STATIC: f64 = 0.5;
pub const DEFAULT_MU_KINETIC: f64 = 0.4;

fn default_mu_static() -> f64 {
    DEFAULT_MU_STATIC
}

fn default_mu_kinetic() -> f64 {
    DEFAULT_MU_KINETIC
}

pub(crate) fn is_false(b: &bool) -> bool {
    !*b
}

fn is_zero_vec(v: &Vec2) -> bool {
    v.x == 0.0 && v.y == 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    Floor,
    Furniture,
    WallPanel,
    CeilingTile,
    LooseItem,
    Fixture,
}

impl ObjectKind {
    /// Kinds that stop the player.
    pub fn blocks_movement(self) -> bool {
        matches!(
            self,
            ObjectKind::Furniture | ObjectKind::WallPanel | ObjectKind::Fixture
        )
    }
}

/// Position of the object's base center plus heading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: [f64; 3],
    #[serde(default)]
    pub yaw: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, z: f64, yaw: f64) -> Self {
        Self {
            position: [x, y, z],
            yaw,
        }
    }

    pub fn xy(&self) -> Vec2 {
        Vec2::new(self.position[0], self.position[1])
    }

    pub fn z(&self) -> f64 {
        self.position[2]
    }

    pub fn set_xy(&mut self, p: Vec2) {
        self.position[0] = p.x;
        self.position[1] = p.y;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub id: String,
    pub kind: ObjectKind,
    pub mass: f64,
    #[serde(default = "default_mu_static")]
    pub mu_static: f64,
    #[serde(default = "default_mu_kinetic")]
    pub mu_kinetic: f64,
    pub half_extents: [f64; 3],
    /// Height of the center of mass above the supporting surface.
    pub com_height: f64,
    pub pose: Pose,
    #[serde(default, skip_serializing_if = "is_zero_vec")]
    pub velocity: Vec2,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_parent: Option<String>,
    #[serde(default)]
    pub dynamic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damaged_variant: Option<String>,
    /// Visual variant currently shown; `None` is the undamaged asset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active_variant: Option<String>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub toppled: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub sliding: bool,
    /// Region holding the object's rest position; filled in by `load_scene`.
    #[serde(skip)]
    pub home_region: String,
}

impl SceneObject {
    pub fn footprint(&self) -> OrientedRect {
        OrientedRect {
            center: self.pose.xy(),
            half: Vec2::new(self.half_extents[0], self.half_extents[1]),
            yaw: self.pose.yaw,
        }
    }

    /// Elevation of the object's top face.
    pub fn top_z(&self) -> f64 {
        self.pose.z() + 2.0 * self.half_extents[2]
    }

    pub fn is_floor(&self) -> bool {
        self.kind == ObjectKind::Floor
    }

    pub fn is_damaged(&self) -> bool {
        self.active_variant.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Staging {
    OnStage,
    OffStage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub id: String,
    pub polygon: Vec<Vec2>,
    pub staging: Staging,
    /// Open-air region (outside the building envelope).
    #[serde(default, skip_serializing_if = "is_false")]
    pub outdoor: bool,
}

impl Region {
    pub fn on_stage(&self) -> bool {
        self.staging == Staging::OnStage
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkNode {
    pub id: String,
    pub position: Vec2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkEdge {
    pub a: String,
    pub b: String,
    /// Edge length in meters; computed from node positions when omitted.
    #[serde(default)]
    pub length: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WalkGraph {
    pub nodes: Vec<WalkNode>,
    pub edges: Vec<WalkEdge>,
}

impl WalkGraph {
    pub fn node(&self, id: &str) -> Option<&WalkNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn position(&self, id: &str) -> Option<Vec2> {
        self.node(id).map(|n| n.position)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssemblyArea {
    pub node: String,
    /// Safe means open space away from buildings.
    pub safe: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractableKind {
    Phone,
    Radio,
    FirstAidKit,
    Laptop,
    Printer,
    Lift,
    Stairs,
    Escalator,
    FireExtinguisher,
    Belongings,
    Door,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractableState {
    Idle,
    Used,
    Off,
    On,
    Present,
    Taken,
    Working,
    Broken,
    Unplugged,
    InService,
    OutOfService,
    Intact,
    Damaged,
    Running,
    Stopped,
    Carried,
    OnTable,
    Open,
    Closed,
    Blocked,
}

impl InteractableKind {
    pub fn states(self) -> &'static [InteractableState] {
        use InteractableState::*;
        match self {
            InteractableKind::Phone => &[Idle, Used],
            InteractableKind::Radio | InteractableKind::Laptop => &[Off, On],
            InteractableKind::FirstAidKit => &[Present, Taken],
            InteractableKind::FireExtinguisher => &[Present, Used],
            InteractableKind::Printer => &[Working, Broken, Unplugged],
            InteractableKind::Lift => &[InService, OutOfService],
            InteractableKind::Stairs => &[Intact, Damaged],
            InteractableKind::Escalator => &[Running, Stopped],
            InteractableKind::Belongings => &[Carried, OnTable],
            InteractableKind::Door => &[Open, Closed, Blocked],
        }
    }

    pub fn default_state(self) -> InteractableState {
        self.states()[0]
    }

    pub fn allows(self, s: InteractableState) -> bool {
        self.states().contains(&s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interactable {
    pub id: String,
    pub kind: InteractableKind,
    /// Backing scene object.
    pub object: String,
    pub region: String,
    pub state: Option<InteractableState>,
}

impl Interactable {
    pub fn current_state(&self) -> InteractableState {
        self.state.unwrap_or_else(|| self.kind.default_state())
    }
}

/// Validated scene. Build it with [`crate::scene::load_scene`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneGraph {
    pub schema_version: u32,
    pub objects: Vec<SceneObject>,
    pub regions: Vec<Region>,
    pub walk_graph: WalkGraph,
    pub exits: Vec<String>,
    pub assembly_areas: Vec<AssemblyArea>,
    pub interactables: Vec<Interactable>,
    #[serde(skip)]
    pub(crate) index: BTreeMap<String, usize>,
}

impl SceneGraph {
    pub fn object(&self, id: &str) -> Option<&SceneObject> {
        self.index.get(id).map(|&i| &self.objects[i])
    }

    pub fn object_mut(&mut self, id: &str) -> Option<&mut SceneObject> {
        match self.index.get(id) {
            Some(&i) => Some(&mut self.objects[i]),
            None => None,
        }
    }

    pub(crate) fn object_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn region(&self, id: &str) -> Option<&Region> {
        self.regions.iter().find(|r| r.id == id)
    }

    pub fn interactable(&self, id: &str) -> Option<&Interactable> {
        self.interactables.iter().find(|i| i.id == id)
    }

    pub fn interactable_mut(&mut self, id: &str) -> Option<&mut Interactable> {
        self.interactables.iter_mut().find(|i| i.id == id)
    }

    pub fn on_stage_region_ids(&self) -> Vec<String> {
        self.regions
            .iter()
            .filter(|r| r.on_stage())
            .map(|r| r.id.clone())
            .collect()
    }

    pub fn off_stage_region_ids(&self) -> Vec<String> {
        self.regions
            .iter()
            .filter(|r| !r.on_stage())
            .map(|r| r.id.clone())
            .collect()
    }

    pub fn is_on_stage(&self, region_id: &str) -> bool {
        self.region(region_id).is_some_and(|r| r.on_stage())
    }

    pub(crate) fn rebuild_index(&mut self) {
        self.index = self
            .objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.id.clone(), i))
            .collect();
    }

    /// Serializes to the on-disk scene document.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serialization is infallible")
    }
}
