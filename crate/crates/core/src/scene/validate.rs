use super::{region_of, ObjectKind, SceneError, SceneGraph};
use crate::geom::{polygon_is_simple, polygons_share_edge};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

fn unique<'a>(what: &str, ids: impl Iterator<Item = &'a str>) -> Result<(), SceneError> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(SceneError::invalid(format!("duplicate {what} id `{id}`")));
        }
    }
    Ok(())
}

/// Checks every scene invariant; the first breach is reported by name.
pub fn validate(scene: &SceneGraph) -> Result<(), SceneError> {
    unique("object", scene.objects.iter().map(|o| o.id.as_str()))?;
    unique("region", scene.regions.iter().map(|r| r.id.as_str()))?;
    unique(
        "walk node",
        scene.walk_graph.nodes.iter().map(|n| n.id.as_str()),
    )?;
    unique(
        "interactable",
        scene.interactables.iter().map(|i| i.id.as_str()),
    )?;

    for o in &scene.objects {
        let bad = |what: &str| SceneError::invalid(format!("object `{}`: {what}", o.id));
        if !(o.mass > 0.0) {
            return Err(bad("mass must be positive"));
        }
        if !(o.mu_static >= 0.0 && o.mu_kinetic >= 0.0) {
            return Err(bad("friction coefficients must be non-negative"));
        }
        if o.mu_kinetic > o.mu_static {
            return Err(bad("mu_kinetic must not exceed mu_static"));
        }
        if o.half_extents.iter().any(|h| !(*h > 0.0)) {
            return Err(bad("half extents must be positive"));
        }
        if !(o.com_height >= 0.0) {
            return Err(bad("com_height must be non-negative"));
        }
        if !o.dynamic && (o.velocity.x != 0.0 || o.velocity.y != 0.0) {
            return Err(bad("static objects must have zero velocity"));
        }
        if o.is_floor() && o.support_parent.is_some() {
            return Err(bad("floors cannot have a support parent"));
        }
        if let Some(p) = &o.support_parent {
            if scene.object(p).is_none() {
                return Err(bad(&format!("unknown support parent `{p}`")));
            }
        }
    }

    // support chains: walk each to its root
    for o in &scene.objects {
        let mut cur = o;
        let mut steps = 0;
        while let Some(p) = &cur.support_parent {
            cur = scene.object(p).expect("checked above");
            steps += 1;
            if steps > scene.objects.len() {
                return Err(SceneError::invalid("support cycle"));
            }
        }
        if cur.kind != ObjectKind::Floor {
            return Err(SceneError::invalid("support chain must terminate at floor"));
        }
    }

    if scene.regions.is_empty() {
        return Err(SceneError::invalid("scene needs at least one region"));
    }
    for r in &scene.regions {
        if !polygon_is_simple(&r.polygon) {
            return Err(SceneError::invalid(format!(
                "region `{}` polygon is not simple",
                r.id
            )));
        }
    }
    check_on_stage_connected(scene)?;

    for o in &scene.objects {
        region_of(scene, o.pose.xy()).map_err(|_| {
            SceneError::invalid(format!("object `{}` lies outside every region", o.id))
        })?;
    }

    let mut node_region = BTreeMap::new();
    for n in &scene.walk_graph.nodes {
        let r = region_of(scene, n.position).map_err(|_| {
            SceneError::invalid(format!("walk node `{}` lies outside every region", n.id))
        })?;
        node_region.insert(n.id.as_str(), r);
    }
    for e in &scene.walk_graph.edges {
        let (Some(ra), Some(rb)) = (node_region.get(e.a.as_str()), node_region.get(e.b.as_str()))
        else {
            return Err(SceneError::invalid(format!(
                "walk edge `{}`-`{}` references an unknown node",
                e.a, e.b
            )));
        };
        if ra.id != rb.id && !polygons_share_edge(&ra.polygon, &rb.polygon) {
            return Err(SceneError::invalid(format!(
                "walk edge `{}`-`{}` joins non-adjacent regions `{}` and `{}`",
                e.a, e.b, ra.id, rb.id
            )));
        }
        if e.length.is_some_and(|l| !(l >= 0.0)) {
            return Err(SceneError::invalid(
                "walk edge lengths must be non-negative",
            ));
        }
    }

    if scene.exits.is_empty() {
        return Err(SceneError::invalid("scene needs at least one exit"));
    }
    for x in &scene.exits {
        if !node_region.contains_key(x.as_str()) {
            return Err(SceneError::invalid(format!(
                "exit `{x}` is not a walk node"
            )));
        }
    }
    for a in &scene.assembly_areas {
        if !node_region.contains_key(a.node.as_str()) {
            return Err(SceneError::invalid(format!(
                "assembly area `{}` is not a walk node",
                a.node
            )));
        }
    }
    if !scene.assembly_areas.iter().any(|a| a.safe) {
        return Err(SceneError::invalid(
            "scene needs at least one safe assembly area",
        ));
    }

    for i in &scene.interactables {
        if scene.object(&i.object).is_none() {
            return Err(SceneError::invalid(format!(
                "interactable `{}` references unknown object `{}`",
                i.id, i.object
            )));
        }
        if scene.region(&i.region).is_none() {
            return Err(SceneError::invalid(format!(
                "interactable `{}` references unknown region `{}`",
                i.id, i.region
            )));
        }
        if !i.kind.allows(i.current_state()) {
            return Err(SceneError::invalid(format!(
                "interactable `{}` state {:?} is not valid for {:?}",
                i.id,
                i.current_state(),
                i.kind
            )));
        }
    }
    Ok(())
}

fn check_on_stage_connected(scene: &SceneGraph) -> Result<(), SceneError> {
    let on: Vec<_> = scene.regions.iter().filter(|r| r.on_stage()).collect();
    if on.len() <= 1 {
        return Ok(());
    }
    let mut seen = vec![false; on.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(i) = queue.pop_front() {
        for j in 0..on.len() {
            if !seen[j] && polygons_share_edge(&on[i].polygon, &on[j].polygon) {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    if seen.iter().all(|s| *s) {
        Ok(())
    } else {
        Err(SceneError::invalid(
            "on_stage regions must form a connected area",
        ))
    }
}
