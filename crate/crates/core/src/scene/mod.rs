//! Declarative scene description: objects with support chains, regions,
//! the walkable graph and the interactable inventory.
//!
//! Scenes are loaded from a UTF-8 JSON document (see [`load_scene`]) and are
//! immutable templates; each session works on its own clone.

mod model;
mod validate;

pub use model::*;
pub use validate::validate;

use crate::geom::{point_in_polygon, Containment, Vec2};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("position ({x}, {y}) lies in no region")]
    OutOfBounds { x: f64, y: f64 },
}

impl SceneError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        SceneError::Validation(msg.into())
    }
}

/// Parses and validates a scene document.
pub fn load_scene(doc: &str) -> Result<SceneGraph, SceneError> {
    let value: serde_json::Value =
        serde_json::from_str(doc).map_err(|e| SceneError::Schema(e.to_string()))?;
    match value.get("schema_version").and_then(|v| v.as_u64()) {
        Some(v) if v == u64::from(SCENE_SCHEMA_VERSION) => {}
        Some(v) => {
            return Err(SceneError::Schema(format!(
                "unsupported schema_version {v}"
            )))
        }
        None => {
            return Err(SceneError::Schema(
                "missing integer `schema_version`".into(),
            ))
        }
    }
    let scene: SceneGraph =
        serde_json::from_value(value).map_err(|e| SceneError::Schema(e.to_string()))?;
    finalize(scene)
}

/// Validates an in-memory scene and fills in derived fields.
pub fn finalize(mut scene: SceneGraph) -> Result<SceneGraph, SceneError> {
    scene.rebuild_index();
    for edge in &mut scene.walk_graph.edges {
        if edge.length.is_none() {
            let a = scene.walk_graph.nodes.iter().find(|n| n.id == edge.a);
            let b = scene.walk_graph.nodes.iter().find(|n| n.id == edge.b);
            if let (Some(a), Some(b)) = (a, b) {
                edge.length = Some(a.position.distance(b.position));
            }
        }
    }
    validate(&scene)?;
    for i in 0..scene.objects.len() {
        let p = scene.objects[i].pose.xy();
        let home = region_of(&scene, p)?.id.clone();
        scene.objects[i].home_region = home;
    }
    Ok(scene)
}

/// Ids from the floor up to and including `id`.
pub fn support_chain(scene: &SceneGraph, id: &str) -> Result<Vec<String>, SceneError> {
    let mut chain = Vec::new();
    let mut cur = scene
        .object(id)
        .ok_or_else(|| SceneError::UnknownId(id.to_string()))?;
    loop {
        chain.push(cur.id.clone());
        if chain.len() > scene.objects.len() {
            return Err(SceneError::invalid("support cycle"));
        }
        match &cur.support_parent {
            Some(p) => {
                cur = scene
                    .object(p)
                    .ok_or_else(|| SceneError::UnknownId(p.clone()))?;
            }
            None => break,
        }
    }
    chain.reverse();
    Ok(chain)
}

/// The unique region containing `p`. Points on a shared boundary resolve to
/// the region with the lexicographically smallest id.
pub fn region_of(scene: &SceneGraph, p: Vec2) -> Result<&Region, SceneError> {
    scene
        .regions
        .iter()
        .filter(|r| point_in_polygon(p, &r.polygon) != Containment::Outside)
        .min_by(|a, b| a.id.cmp(&b.id))
        .ok_or(SceneError::OutOfBounds { x: p.x, y: p.y })
}

/// Replaces the staging of every region: listed ids go on stage, the rest off.
pub fn restage(scene: &mut SceneGraph, on_stage: &[String]) -> Result<(), SceneError> {
    for id in on_stage {
        if scene.region(id).is_none() {
            return Err(SceneError::UnknownId(id.clone()));
        }
    }
    for r in &mut scene.regions {
        r.staging = if on_stage.contains(&r.id) {
            Staging::OnStage
        } else {
            Staging::OffStage
        };
    }
    validate(scene)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn region(id: &str, x0: f64, y0: f64, x1: f64, y1: f64) -> serde_json::Value {
        json!({"id": id, "polygon": [[x0,y0],[x1,y0],[x1,y1],[x0,y1]], "staging": "on_stage"})
    }

    pub(crate) fn fig5_doc() -> serde_json::Value {
        json!({
            "schema_version": 1,
            "objects": [
                {"id": "F", "kind": "floor", "mass": 1000.0, "half_extents": [5.0, 5.0, 0.05],
                 "com_height": 0.05, "pose": {"position": [5.0, 5.0, -0.1]}, "dynamic": true},
                {"id": "T", "kind": "furniture", "mass": 30.0, "half_extents": [0.8, 0.4, 0.375],
                 "com_height": 0.5, "pose": {"position": [5.0, 5.0, 0.0]}, "support_parent": "F", "dynamic": true},
                {"id": "B", "kind": "loose_item", "mass": 2.0, "half_extents": [0.1, 0.1, 0.4],
                 "com_height": 0.4, "pose": {"position": [5.0, 5.0, 0.75]}, "support_parent": "T", "dynamic": true},
                {"id": "C", "kind": "furniture", "mass": 6.0, "half_extents": [0.25, 0.25, 0.45],
                 "com_height": 0.45, "pose": {"position": [3.0, 5.0, 0.0]}, "support_parent": "F", "dynamic": true}
            ],
            "regions": [region("meeting_room", 0.0, 0.0, 10.0, 10.0), region("outdoor", 0.0, -10.0, 10.0, 0.0)],
            "walk_graph": {"nodes": [{"id": "n0", "position": [5.0, -5.0]}, {"id": "n1", "position": [5.0, 2.0]}],
                           "edges": [{"a": "n0", "b": "n1"}]},
            "exits": ["n0"],
            "assembly_areas": [{"node": "n0", "safe": true}],
            "interactables": []
        })
    }

    fn load(v: &serde_json::Value) -> Result<SceneGraph, SceneError> {
        load_scene(&v.to_string())
    }

    #[test]
    fn loads_fig5_stack() {
        let s = load(&fig5_doc()).unwrap();
        assert_eq!(s.objects.len(), 4);
        assert_eq!(support_chain(&s, "B").unwrap(), ["F", "T", "B"]);
        assert_eq!(support_chain(&s, "F").unwrap(), ["F"]);
        assert_eq!(support_chain(&s, "C").unwrap(), ["F", "C"]);
        assert_eq!(s.object("T").unwrap().mu_static, DEFAULT_MU_STATIC);
        assert_eq!(s.object("T").unwrap().home_region, "meeting_room");
        assert_eq!(s.walk_graph.edges[0].length, Some(7.0));
    }

    #[test]
    fn unknown_chain_id() {
        let s = load(&fig5_doc()).unwrap();
        assert_eq!(
            support_chain(&s, "nope"),
            Err(SceneError::UnknownId("nope".into()))
        );
    }

    #[test]
    fn missing_floor_rejected() {
        let mut d = fig5_doc();
        let objs = d["objects"].as_array_mut().unwrap();
        objs.retain(|o| o["id"] != "F");
        objs[0]["support_parent"] = json!(null);
        objs[2]["support_parent"] = json!(null);
        let err = load(&d).unwrap_err();
        assert_eq!(
            err,
            SceneError::invalid("support chain must terminate at floor")
        );
    }

    #[test]
    fn support_cycle_rejected() {
        let mut d = fig5_doc();
        d["objects"][1]["support_parent"] = json!("B");
        let err = load(&d).unwrap_err();
        assert_eq!(err, SceneError::invalid("support cycle"));
    }

    #[test]
    fn malformed_field_is_schema_error() {
        let mut d = fig5_doc();
        d["objects"][1]["mass"] = json!("heavy");
        assert!(matches!(load(&d), Err(SceneError::Schema(_))));
        let mut d = fig5_doc();
        d["schema_version"] = json!(7);
        assert!(matches!(load(&d), Err(SceneError::Schema(_))));
    }

    #[test]
    fn coulomb_consistency_enforced() {
        let mut d = fig5_doc();
        d["objects"][1]["mu_static"] = json!(0.3);
        d["objects"][1]["mu_kinetic"] = json!(0.6);
        assert!(matches!(load(&d), Err(SceneError::Validation(m)) if m.contains("mu_kinetic")));
    }

    #[test]
    fn static_objects_cannot_move() {
        let mut d = fig5_doc();
        d["objects"][3]["dynamic"] = json!(false);
        d["objects"][3]["velocity"] = json!([0.1, 0.0]);
        assert!(load(&d).is_err());
    }

    #[test]
    fn region_queries() {
        let s = load(&fig5_doc()).unwrap();
        assert_eq!(
            region_of(&s, Vec2::new(5.0, 5.0)).unwrap().id,
            "meeting_room"
        );
        // shared boundary at y = 0 resolves to smallest id
        assert_eq!(
            region_of(&s, Vec2::new(5.0, 0.0)).unwrap().id,
            "meeting_room"
        );
        assert_eq!(region_of(&s, Vec2::new(5.0, -3.0)).unwrap().id, "outdoor");
        assert!(matches!(
            region_of(&s, Vec2::new(50.0, 5.0)),
            Err(SceneError::OutOfBounds { .. })
        ));
    }

    #[test]
    fn needs_exit_and_safe_area() {
        let mut d = fig5_doc();
        d["exits"] = json!([]);
        assert!(load(&d).is_err());
        let mut d = fig5_doc();
        d["assembly_areas"] = json!([{"node": "n0", "safe": false}]);
        assert!(load(&d).is_err());
    }

    #[test]
    fn interactable_refs_checked() {
        let mut d = fig5_doc();
        d["interactables"] = json!([{"id": "r", "kind": "radio", "object": "ghost", "region": "meeting_room", "state": null}]);
        assert!(load(&d).is_err());
        d["interactables"] = json!([{"id": "r", "kind": "radio", "object": "T", "region": "meeting_room", "state": "blocked"}]);
        assert!(load(&d).is_err());
        d["interactables"] = json!([{"id": "r", "kind": "radio", "object": "T", "region": "meeting_room", "state": "on"}]);
        assert!(load(&d).is_ok());
    }

    #[test]
    fn walk_edges_must_join_adjacent_regions() {
        let mut d = fig5_doc();
        d["regions"] = json!([
            region("a", 0.0, 0.0, 10.0, 10.0),
            region("b", 0.0, -10.0, 10.0, -1.0)
        ]);
        // now "meeting_room"-less; node n0 in b, n1 in a, regions not adjacent
        d["regions"]
            .as_array_mut()
            .unwrap()
            .push(region("c", -20.0, -20.0, -15.0, -15.0));
        d["regions"][1]["staging"] = json!("off_stage");
        d["regions"][2]["staging"] = json!("off_stage");
        let err = load(&d).unwrap_err();
        assert!(matches!(err, SceneError::Validation(m) if m.contains("non-adjacent")));
    }

    #[test]
    fn round_trip_is_identity() {
        let s = load(&fig5_doc()).unwrap();
        let again = load_scene(&s.to_json()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn restage_checks_connectivity() {
        let mut s = load(&fig5_doc()).unwrap();
        restage(&mut s, &["outdoor".to_string()]).unwrap();
        assert!(!s.is_on_stage("meeting_room"));
        assert!(restage(&mut s, &["ghost".to_string()]).is_err());
    }
}
