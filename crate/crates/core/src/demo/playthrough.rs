//! Scripted runs through the bundled stories. Each drives a live session
//! with a [`Pilot`] and hands back the recorded command script.

use crate::session::{Pilot, Session, SessionConfig, SessionError};
use crate::story::{Mode, Phase};
use crate::telemetry::EventBody;

/// Upper bound on any single wait, in ticks.
const WAIT_CAP: u64 = 50 * 300;

/// Bundled playthrough names.
pub const PLAYTHROUGHS: [&str; 6] = [
    "bp_careful",
    "bp_hasty",
    "bp_escalator",
    "tp_best",
    "tp_worst",
    "tp_mixed",
];

/// Mode of a bundled playthrough.
pub fn playthrough_mode(name: &str) -> Option<Mode> {
    match name {
        "bp_careful" | "bp_hasty" | "bp_escalator" => Some(Mode::Bp),
        "tp_best" | "tp_worst" | "tp_mixed" => Some(Mode::Tp),
        _ => None,
    }
}

fn stuck(what: &str) -> SessionError {
    SessionError::Internal(format!("playthrough stalled waiting for {what}"))
}

fn wait_phase(p: &mut Pilot, phase: Phase) -> Result<(), SessionError> {
    if p.wait_for_phase(phase, WAIT_CAP)? {
        Ok(())
    } else {
        Err(stuck(&format!("{phase}")))
    }
}

fn wait_for_evacuation_call(p: &mut Pilot) -> Result<(), SessionError> {
    let heard = |s: &Session| {
        s.log().iter().any(|e| {
            matches!(
                &e.body,
                EventBody::InstructionGiven {
                    evacuation: true,
                    ..
                }
            )
        })
    };
    if p.wait_until(WAIT_CAP, heard)? {
        Ok(())
    } else {
        Err(stuck("the evacuation call"))
    }
}

/// Waits for the panel for `action` and picks it by looking at it.
fn choose(p: &mut Pilot, action: &str) -> Result<(), SessionError> {
    let shown = |s: &Session| s.is_terminal() || s.panels().iter().any(|v| v.action == action);
    if !p.wait_until(WAIT_CAP, shown)? || p.session.is_terminal() {
        return Err(stuck(action));
    }
    let heading = p
        .session
        .panels()
        .into_iter()
        .find(|v| v.action == action)
        .map(|v| v.heading)
        .expect("shown");
    p.gaze_select(heading)
}

fn walk_in(p: &mut Pilot) -> Result<(), SessionError> {
    p.walk_to("mr_c")?;
    p.wait(1.0)?;
    p.select("leave_belongings")?;
    wait_phase(p, Phase::Earthquake)
}

fn bp_careful(p: &mut Pilot) -> Result<(), SessionError> {
    walk_in(p)?;
    p.wait(0.8)?;
    p.select("drop_cover_hold_table")?;
    wait_phase(p, Phase::PreEvacuation)?;
    p.wait(8.0)?;
    for a in [
        "check_damage",
        "unplug_printer",
        "assist_visitor",
        "use_radio",
        "phone_text",
        "take_first_aid",
    ] {
        p.select(a)?;
        p.wait(1.0)?;
    }
    p.select("collect_belongings")?;
    wait_for_evacuation_call(p)?;
    p.select("start_evacuating")?;
    p.walk_to("cor_mr")?;
    wait_phase(p, Phase::IndoorEvacuation)?;
    p.select("check_damage_evac")?;
    p.walk_to("lobby_c")?;
    p.select("check_injured")?;
    p.select("check_stair_damage")?;
    p.select("use_stairs")?;
    p.walk_to("out_main")?;
    wait_phase(p, Phase::OutdoorEvacuation)?;
    p.walk_to("out_start")?;
    p.select("go_to_open_space")
}

fn bp_hasty(p: &mut Pilot) -> Result<(), SessionError> {
    walk_in(p)?;
    p.wait(1.5)?;
    p.select("hold_doorframe")?;
    wait_phase(p, Phase::PreEvacuation)?;
    p.wait(2.0)?;
    p.select("phone_call")?;
    p.select("collect_belongings")?;
    p.select("start_evacuating")?;
    p.walk_to("lobby_c")?;
    p.select("use_lift")?;
    p.walk_to("out_side")?;
    wait_phase(p, Phase::OutdoorEvacuation)?;
    p.walk_to("assembly_near")?;
    p.select("wait_near_building")?;
    p.wait(5.0)?;
    p.select("return_inside")
}

fn bp_escalator(p: &mut Pilot) -> Result<(), SessionError> {
    walk_in(p)?;
    p.wait(2.5)?;
    p.select("drop_cover_hold_table")?;
    wait_phase(p, Phase::PreEvacuation)?;
    p.wait(15.0)?;
    p.select("check_damage")?;
    p.select("assist_visitor")?;
    p.select("use_laptop")?;
    wait_for_evacuation_call(p)?;
    p.walk_to("lobby_c")?;
    p.select("check_injured")?;
    p.select("use_escalator")?;
    p.walk_to("out_side")?;
    wait_phase(p, Phase::OutdoorEvacuation)?;
    p.walk_to("out_start")?;
    p.select("go_to_open_space")
}

fn tp_sequence(p: &mut Pilot, picks: &[&str]) -> Result<(), SessionError> {
    for a in picks {
        if *a == "stay_under_cover" {
            choose(p, a)?;
            let waited = |s: &Session| s.story().taken.contains("waited_for_aftershocks");
            if !p.wait_until(WAIT_CAP, waited)? {
                return Err(stuck("the aftershock timer"));
            }
        } else {
            choose(p, a)?;
        }
    }
    Ok(())
}

fn tp_best(p: &mut Pilot) -> Result<(), SessionError> {
    tp_sequence(
        p,
        &[
            "follow_host",
            "leave_belongings",
            "drop_cover_hold_table",
            "watch_for_falling_objects",
            "stay_under_cover",
            "collect_belongings",
            "take_first_aid",
            "start_evacuating",
            "assist_nurse",
            "free_trapped_clerk",
            "unplug_printer",
            "head_to_kitchen",
            "use_extinguisher",
            "listen_radio",
            "use_stairs",
            "find_other_exit",
            "go_to_open_space",
        ],
    )
}

fn tp_worst(p: &mut Pilot) -> Result<(), SessionError> {
    tp_sequence(
        p,
        &[
            "follow_host",
            "leave_belongings",
            "cover_beside_unsafe_object",
            "grab_falling_jug",
            "phone_call",
            "start_evacuating",
            "walk_past_nurse",
            "head_to_kitchen",
            "ignore_fire",
            "use_lift",
            "squeeze_through_door",
            "wait_near_building",
        ],
    )
}

fn tp_mixed(p: &mut Pilot) -> Result<(), SessionError> {
    tp_sequence(
        p,
        &[
            "follow_host",
            "leave_belongings",
            "drop_cover_hold_table",
            "grab_falling_jug",
            "collect_belongings",
            "start_evacuating",
            "assist_nurse",
            "head_to_kitchen",
            "raise_fire_alarm",
            "use_escalator",
            "find_other_exit",
            "go_to_open_space",
        ],
    )
}

/// Runs the named playthrough on the bundled story with `seed` and returns
/// the pilot once a terminal choice is made.
pub fn play(name: &str, seed: u64) -> Result<Pilot, SessionError> {
    let mode = playthrough_mode(name)
        .ok_or_else(|| SessionError::Config(format!("unknown playthrough `{name}`")))?;
    let mut p = Pilot::new(Session::new(SessionConfig::builtin(mode, seed))?);
    match name {
        "bp_careful" => bp_careful(&mut p)?,
        "bp_hasty" => bp_hasty(&mut p)?,
        "bp_escalator" => bp_escalator(&mut p)?,
        "tp_best" => tp_best(&mut p)?,
        "tp_worst" => tp_worst(&mut p)?,
        _ => tp_mixed(&mut p)?,
    }
    if !p.session.is_terminal() {
        return Err(stuck("a terminal choice"));
    }
    Ok(p)
}
