//! Qualitative building damage (variant swaps) and relocation of off-stage
//! objects from a pre-simulated quake.

use crate::quake::{run_quake_in, ActiveRegions, PhysicsParams, QuakeError, QuakeSignal};
use crate::scene::{InteractableKind, InteractableState, ObjectKind, Pose, SceneGraph};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

pub const DEFAULT_RELOCATION_BUDGET: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DamageError {
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("object `{object}` of kind {kind:?} cannot take damage")]
    WrongKind { object: String, kind: ObjectKind },
    #[error("object `{object}` has no damaged variant `{variant}`")]
    UnknownVariant { object: String, variant: String },
    #[error("region `{0}` is not off stage")]
    RegionNotOffStage(String),
    #[error("object `{0}` is listed twice")]
    DuplicateEntry(String),
    #[error("relocation budget must be at least 1")]
    InvalidBudget,
    #[error(transparent)]
    Quake(#[from] QuakeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DamageTrigger {
    AtQuakeStart,
    #[default]
    AtQuakeEnd,
    AtTime(f64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DamageSwap {
    pub object: String,
    pub variant: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct DamageSpec {
    #[serde(default)]
    pub swaps: Vec<DamageSwap>,
    #[serde(default)]
    pub trigger: DamageTrigger,
    #[serde(default)]
    pub placement_tags: Vec<String>,
}

impl DamageSpec {
    pub fn validate(&self, scene: &SceneGraph) -> Result<(), DamageError> {
        for s in &self.swaps {
            let o = scene
                .object(&s.object)
                .ok_or_else(|| DamageError::UnknownObject(s.object.clone()))?;
            if !matches!(o.kind, ObjectKind::WallPanel | ObjectKind::CeilingTile) {
                return Err(DamageError::WrongKind {
                    object: o.id.clone(),
                    kind: o.kind,
                });
            }
            if o.damaged_variant.as_deref() != Some(s.variant.as_str()) {
                return Err(DamageError::UnknownVariant {
                    object: o.id.clone(),
                    variant: s.variant.clone(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DamageEvent {
    DamageApplied {
        object: String,
        variant: String,
    },
    /// A door whose backing panel was swapped can no longer be used.
    DoorBlocked {
        interactable: String,
    },
}

/// Switches each listed object to its damaged variant. Geometry is untouched.
/// Applying the same spec again yields no events.
pub fn apply_damage(
    scene: &mut SceneGraph,
    spec: &DamageSpec,
) -> Result<Vec<DamageEvent>, DamageError> {
    spec.validate(scene)?;
    let mut events = Vec::new();
    for s in &spec.swaps {
        let o = scene.object_mut(&s.object).expect("validated");
        if o.active_variant.as_deref() == Some(s.variant.as_str()) {
            continue;
        }
        o.active_variant = Some(s.variant.clone());
        events.push(DamageEvent::DamageApplied {
            object: s.object.clone(),
            variant: s.variant.clone(),
        });
        for it in scene.interactables.iter_mut() {
            if it.kind == InteractableKind::Door
                && it.object == s.object
                && it.current_state() != InteractableState::Blocked
            {
                it.state = Some(InteractableState::Blocked);
                events.push(DamageEvent::DoorBlocked {
                    interactable: it.id.clone(),
                });
            }
        }
    }
    Ok(events)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelocationEntry {
    pub id: String,
    pub pose: Pose,
    #[serde(default)]
    pub toppled: bool,
    /// Carrier at the end of the simulation (changes when the object fell).
    #[serde(default)]
    pub support_parent: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Provenance {
    pub seed: Option<u64>,
    pub params_hash: Option<String>,
    #[serde(default)]
    pub regions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct RelocationList {
    pub entries: Vec<RelocationEntry>,
    pub provenance: Provenance,
}

impl RelocationList {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Simulates the quake over `regions` only and records where every dynamic
/// non-floor object there comes to rest.
pub fn precompute_relocation(
    scene: &SceneGraph,
    regions: &[String],
    signal: &QuakeSignal,
    params: &PhysicsParams,
) -> Result<RelocationList, DamageError> {
    for r in regions {
        match scene.region(r) {
            Some(reg) if !reg.on_stage() => {}
            _ => return Err(DamageError::RegionNotOffStage(r.clone())),
        }
    }
    let active = ActiveRegions::of(regions.iter().cloned());
    let run = run_quake_in(scene, signal, params, &active)?;
    let entries = run
        .scene
        .objects
        .iter()
        .filter(|o| o.dynamic && !o.is_floor() && active.contains(&o.home_region))
        .map(|o| RelocationEntry {
            id: o.id.clone(),
            pose: o.pose,
            toppled: o.toppled,
            support_parent: o.support_parent.clone(),
        })
        .collect();
    let mut sorted: Vec<String> = regions.to_vec();
    sorted.sort();
    sorted.dedup();
    Ok(RelocationList {
        entries,
        provenance: Provenance {
            seed: signal.seed,
            params_hash: signal.params.as_ref().map(|p| p.hash()),
            regions: sorted,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelocationProgress {
    /// Entries applied so far, cumulative.
    pub applied: usize,
    pub total: usize,
    pub done: bool,
}

/// Applies a relocation list a bounded number of entries at a time.
#[derive(Debug, Clone)]
pub struct RelocationBatcher {
    entries: Vec<RelocationEntry>,
    cursor: usize,
    budget: usize,
}

impl RelocationBatcher {
    pub fn new(
        scene: &SceneGraph,
        list: &RelocationList,
        budget: usize,
    ) -> Result<Self, DamageError> {
        if budget == 0 {
            return Err(DamageError::InvalidBudget);
        }
        let mut seen = BTreeSet::new();
        for e in &list.entries {
            if !seen.insert(e.id.as_str()) {
                return Err(DamageError::DuplicateEntry(e.id.clone()));
            }
            let o = scene
                .object(&e.id)
                .ok_or_else(|| DamageError::UnknownObject(e.id.clone()))?;
            if scene.is_on_stage(&o.home_region) {
                return Err(DamageError::RegionNotOffStage(o.home_region.clone()));
            }
        }
        Ok(RelocationBatcher {
            entries: list.entries.clone(),
            cursor: 0,
            budget,
        })
    }

    pub fn is_done(&self) -> bool {
        self.cursor >= self.entries.len()
    }

    pub fn progress(&self) -> RelocationProgress {
        RelocationProgress {
            applied: self.cursor,
            total: self.entries.len(),
            done: self.is_done(),
        }
    }

    /// Applies up to `budget` entries in list order.
    pub fn step(&mut self, scene: &mut SceneGraph) -> Result<RelocationProgress, DamageError> {
        let end = (self.cursor + self.budget).min(self.entries.len());
        for e in &self.entries[self.cursor..end] {
            let o = scene
                .object_mut(&e.id)
                .ok_or_else(|| DamageError::UnknownObject(e.id.clone()))?;
            o.pose = e.pose;
            o.toppled = e.toppled;
            o.support_parent = e.support_parent.clone();
            o.velocity = crate::geom::Vec2::ZERO;
            o.sliding = false;
        }
        self.cursor = end;
        Ok(self.progress())
    }
}

/// Runs a [`RelocationBatcher`] to completion; one progress record per call.
pub fn apply_relocation_batched(
    scene: &mut SceneGraph,
    list: &RelocationList,
    budget: usize,
) -> Result<Vec<RelocationProgress>, DamageError> {
    let mut b = RelocationBatcher::new(scene, list, budget)?;
    let mut out = Vec::new();
    while !b.is_done() {
        out.push(b.step(scene)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec2;
    use crate::scene::{
        finalize, AssemblyArea, Interactable, Region, SceneObject, Staging, WalkGraph, WalkNode,
    };

    fn obj(id: &str, kind: ObjectKind, x: f64, parent: Option<&str>) -> SceneObject {
        SceneObject {
            id: id.into(),
            kind,
            mass: 5.0,
            mu_static: 0.5,
            mu_kinetic: 0.4,
            half_extents: [0.2, 0.2, 0.2],
            com_height: 0.2,
            pose: Pose::new(x, 1.0, 0.0, 0.0),
            velocity: Vec2::ZERO,
            support_parent: parent.map(Into::into),
            dynamic: kind != ObjectKind::WallPanel,
            damaged_variant: matches!(kind, ObjectKind::WallPanel | ObjectKind::CeilingTile)
                .then(|| format!("{id}_cracked")),
            active_variant: None,
            toppled: false,
            sliding: false,
            home_region: String::new(),
        }
    }

    fn scene() -> SceneGraph {
        let sq = |x0: f64, x1: f64| {
            vec![
                Vec2::new(x0, 0.0),
                Vec2::new(x1, 0.0),
                Vec2::new(x1, 2.0),
                Vec2::new(x0, 2.0),
            ]
        };
        let mut floor = obj("F", ObjectKind::Floor, 1.0, None);
        floor.half_extents = [1.0, 1.0, 0.05];
        let mut objects = vec![floor];
        for i in 0..5 {
            objects.push(obj(
                &format!("w{i}"),
                ObjectKind::WallPanel,
                0.2 + 0.3 * i as f64,
                Some("F"),
            ));
        }
        objects.push(obj("desk", ObjectKind::Furniture, 1.0, Some("F")));
        finalize(SceneGraph {
            schema_version: 1,
            objects,
            regions: vec![
                Region {
                    id: "a".into(),
                    polygon: sq(0.0, 2.0),
                    staging: Staging::OnStage,
                    outdoor: false,
                },
                Region {
                    id: "b".into(),
                    polygon: sq(2.0, 4.0),
                    staging: Staging::OffStage,
                    outdoor: false,
                },
            ],
            walk_graph: WalkGraph {
                nodes: vec![WalkNode {
                    id: "n".into(),
                    position: Vec2::new(1.0, 1.5),
                }],
                edges: vec![],
            },
            exits: vec!["n".into()],
            assembly_areas: vec![AssemblyArea {
                node: "n".into(),
                safe: true,
            }],
            interactables: vec![Interactable {
                id: "door1".into(),
                kind: InteractableKind::Door,
                object: "w0".into(),
                region: "a".into(),
                state: None,
            }],
            index: Default::default(),
        })
        .unwrap()
    }

    fn spec(ids: &[&str]) -> DamageSpec {
        DamageSpec {
            swaps: ids
                .iter()
                .map(|i| DamageSwap {
                    object: i.to_string(),
                    variant: format!("{i}_cracked"),
                })
                .collect(),
            ..Default::default()
        }
    }

    #[test]
    fn swaps_and_blocks_door_once() {
        let mut s = scene();
        let before: Vec<_> = s.objects.iter().map(|o| o.pose).collect();
        let ev = apply_damage(&mut s, &spec(&["w0", "w1", "w2", "w3", "w4"])).unwrap();
        let applied = ev
            .iter()
            .filter(|e| matches!(e, DamageEvent::DamageApplied { .. }))
            .count();
        assert_eq!(applied, 5);
        assert!(ev.contains(&DamageEvent::DoorBlocked {
            interactable: "door1".into()
        }));
        assert_eq!(
            s.interactable("door1").unwrap().current_state(),
            InteractableState::Blocked
        );
        assert!(s.object("w3").unwrap().is_damaged());
        let after: Vec<_> = s.objects.iter().map(|o| o.pose).collect();
        assert_eq!(before, after);
        assert!(apply_damage(&mut s, &spec(&["w0", "w1", "w2", "w3", "w4"]))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn empty_and_wrong_kind() {
        let mut s = scene();
        let copy = s.clone();
        assert!(apply_damage(&mut s, &DamageSpec::default())
            .unwrap()
            .is_empty());
        assert_eq!(s, copy);
        let bad = DamageSpec {
            swaps: vec![DamageSwap {
                object: "desk".into(),
                variant: "x".into(),
            }],
            ..Default::default()
        };
        assert!(matches!(
            apply_damage(&mut s, &bad),
            Err(DamageError::WrongKind { .. })
        ));
        let ghost = DamageSpec {
            swaps: vec![DamageSwap {
                object: "ghost".into(),
                variant: "x".into(),
            }],
            ..Default::default()
        };
        assert!(matches!(
            apply_damage(&mut s, &ghost),
            Err(DamageError::UnknownObject(_))
        ));
    }

    #[test]
    fn trigger_serializes_snake_case() {
        assert_eq!(
            serde_json::to_string(&DamageTrigger::AtQuakeStart).unwrap(),
            "\"at_quake_start\""
        );
        assert_eq!(
            serde_json::to_string(&DamageTrigger::AtTime(3.5)).unwrap(),
            "{\"at_time\":3.5}"
        );
    }

    #[test]
    fn batch_call_counts() {
        let mut s = SceneGraph { ..scene() };
        let entries: Vec<_> = (0..25)
            .map(|i| RelocationEntry {
                id: format!("x{i}"),
                pose: Pose::new(0.0, 0.0, 0.0, 0.0),
                toppled: false,
                support_parent: None,
            })
            .collect();
        let list = RelocationList {
            entries,
            provenance: Provenance::default(),
        };
        // unknown ids are rejected up front
        assert!(matches!(
            apply_relocation_batched(&mut s, &list, 10),
            Err(DamageError::UnknownObject(_))
        ));
        let empty = RelocationList::default();
        assert!(apply_relocation_batched(&mut s, &empty, 3)
            .unwrap()
            .is_empty());
        assert!(matches!(
            apply_relocation_batched(&mut s, &empty, 0),
            Err(DamageError::InvalidBudget)
        ));
    }

    #[test]
    fn on_stage_region_rejected() {
        let s = scene();
        let sig = QuakeSignal::silent(1.0, 0.02);
        let err = precompute_relocation(&s, &["a".to_string()], &sig, &PhysicsParams::default())
            .unwrap_err();
        assert_eq!(err, DamageError::RegionNotOffStage("a".into()));
    }
}
