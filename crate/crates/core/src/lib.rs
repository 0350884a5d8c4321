#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod damage;
pub mod demo;
pub mod geom;
pub mod navigation;
pub mod npc;
pub mod quake;
pub mod scene;
pub mod session;
pub mod story;
pub mod telemetry;
