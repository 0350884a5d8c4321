//! Coulomb stick/slip resolution and the rigid-block overturning criterion.
//!
//! A contact pairs a carrier (the supporting body) with a rider. Each tick the
//! rider needs some impulse to end the tick co-moving with its carrier:
//!
//! ```text
//! J_req = m_eff · (v_carrier' − v_rider)
//! stick  iff |J_req| ≤ μ_s · N · dt      → J = J_req
//! slip   otherwise                          → J = μ_k · N · dt · Ĵ_req
//! ```
//!
//! `N` is the normal load (rider plus everything stacked on it, times g) and
//! `m_eff` the reduced mass of the pair (the rider mass when the carrier is
//! kinematic). The decision is algebraic, so the regime flips exactly at
//! `|a_req| = μ_s · g` for a single rider on a kinematic carrier.

use crate::geom::Vec2;
use crate::scene::SceneObject;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Stick,
    Slip,
}

/// Friction force the carrier exerts on the rider; the carrier receives the
/// equal and opposite force.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactForce {
    pub carrier: String,
    pub rider: String,
    pub force: Vec2,
    pub regime: Regime,
}

impl ContactForce {
    pub fn reaction(&self) -> Vec2 {
        -self.force
    }
}

/// Inputs of one pairwise contact resolution.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ContactInput {
    pub carrier_velocity: Vec2,
    pub rider_velocity: Vec2,
    pub effective_mass: f64,
    pub normal_load: f64,
    pub mu_static: f64,
    pub mu_kinetic: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ContactImpulse {
    pub impulse: Vec2,
    pub regime: Regime,
}

pub(crate) fn resolve_contact(c: &ContactInput) -> ContactImpulse {
    let required = (c.carrier_velocity - c.rider_velocity) * c.effective_mass;
    let limit = c.mu_static * c.normal_load * c.dt;
    if required.norm() <= limit {
        ContactImpulse {
            impulse: required,
            regime: Regime::Stick,
        }
    } else {
        let dir = required.normalized().unwrap_or(Vec2::ZERO);
        ContactImpulse {
            impulse: dir * (c.mu_kinetic * c.normal_load * c.dt),
            regime: Regime::Slip,
        }
    }
}

/// Single contact against a kinematic carrier moving at `carrier_velocity`
/// before the tick and accelerating at `carrier_accel` during it.
///
/// Returns the contact force on the rider and the rider's new velocity.
pub fn friction_update(
    carrier_id: &str,
    carrier_velocity: Vec2,
    carrier_accel: Vec2,
    rider: &SceneObject,
    normal_load: f64,
    dt: f64,
) -> (ContactForce, Vec2) {
    let carrier_next = carrier_velocity + carrier_accel * dt;
    let r = resolve_contact(&ContactInput {
        carrier_velocity: carrier_next,
        rider_velocity: rider.velocity,
        effective_mass: rider.mass,
        normal_load,
        mu_static: rider.mu_static,
        mu_kinetic: rider.mu_kinetic,
        dt,
    });
    let velocity = rider.velocity + r.impulse * (1.0 / rider.mass);
    let contact = ContactForce {
        carrier: carrier_id.to_string(),
        rider: rider.id.clone(),
        force: r.impulse * (1.0 / dt),
        regime: r.regime,
    };
    (contact, velocity)
}

/// Acceleration above which the block tips over when accelerated along
/// `direction`: g · b / h, with b the footprint's support distance along the
/// direction and h the center-of-mass height.
pub fn topple_threshold(obj: &SceneObject, direction: Vec2, g: f64) -> f64 {
    let u = direction.normalized().unwrap_or(Vec2::new(1.0, 0.0));
    let b = obj.footprint().support_distance(u);
    g * b / obj.com_height
}

/// Rigid-block overturning check under a sustained horizontal acceleration.
pub fn topple_check(obj: &SceneObject, sustained_accel: Vec2, g: f64) -> bool {
    let a = sustained_accel.norm();
    if a == 0.0 || !(obj.com_height > 0.0) {
        return false;
    }
    a > topple_threshold(obj, sustained_accel, g)
}
