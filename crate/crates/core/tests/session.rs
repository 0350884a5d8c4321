mod common;

use evacsim::demo;
use evacsim::session::{
    parse_script, Command, FullState, InputSource, Outcome, Pilot, Session, SessionConfig,
    SessionError, Snapshot,
};
use evacsim::story::{Mode, Phase};
use evacsim::telemetry::{extract_bp_metrics, EventBody, EventLog};

fn bp(seed: u64) -> Session {
    Session::new(SessionConfig::builtin(Mode::Bp, seed)).unwrap()
}

#[test]
fn starts_outside_before_shaking() {
    let s = bp(42);
    let snap = s.initial_snapshot();
    assert_eq!(snap.phase, Phase::PreQuake);
    assert_eq!(snap.tick, 0);
    assert!(snap.full);
    assert_eq!(snap.player.region, "outdoor");
    let start = s
        .scene()
        .walk_graph
        .position(&s.scenario().start_node)
        .unwrap();
    assert_eq!(snap.player.position, start);
}

#[test]
fn same_config_same_initial_snapshot() {
    assert_eq!(bp(42).initial_snapshot(), bp(42).initial_snapshot());
    let a = serde_json::to_string(bp(42).initial_snapshot()).unwrap();
    let b = serde_json::to_string(bp(42).initial_snapshot()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn missing_scene_is_config_error() {
    let mut cfg = SessionConfig::builtin(Mode::Bp, 1);
    cfg.scene = "/definitely/not/here.json".into();
    assert!(matches!(Session::new(cfg), Err(SessionError::Config(_))));
    let mut cfg = SessionConfig::builtin(Mode::Bp, 1);
    cfg.tick = 0.0;
    assert!(matches!(Session::new(cfg), Err(SessionError::Config(_))));
    let mut cfg = SessionConfig::builtin(Mode::Tp, 1);
    cfg.scenario = "builtin:bp".into();
    assert!(matches!(Session::new(cfg), Err(SessionError::Config(_))));
}

#[test]
fn select_during_shaking_logs_next_tick() {
    let mut p = Pilot::new(bp(3));
    p.walk_to("mr_c").unwrap();
    p.select("leave_belongings").unwrap();
    assert_eq!(p.session.phase(), Phase::Earthquake);
    p.session
        .submit_input(Command::Select {
            action_id: Some("drop_cover_hold_table".into()),
        })
        .unwrap();
    let snap = p.session.step().unwrap();
    assert!(snap
        .events
        .iter()
        .any(|e| matches!(&e.body, EventBody::ActionTaken { action, .. } if action == "drop_cover_hold_table")));
}

#[test]
fn unknown_action_and_ended_session_rejected() {
    let mut s = bp(1);
    assert!(matches!(
        s.submit_input(Command::Select {
            action_id: Some("fly_away".into())
        }),
        Err(SessionError::UnknownCommand(_))
    ));
    assert!(matches!(
        s.submit_json(r#"{"type":"jump"}"#),
        Err(SessionError::UnknownCommand(_))
    ));
    s.submit_json(r#"{"type":"move","held":true}"#).unwrap();
    let p = demo::play("bp_hasty", 1).unwrap();
    let mut s = p.session;
    s.close(false).unwrap();
    assert!(s.is_ended());
    assert_eq!(
        s.submit_input(Command::Move { held: true }),
        Err(SessionError::SessionEnded)
    );
    assert_eq!(s.step().unwrap_err(), SessionError::SessionEnded);
    assert_eq!(s.close(true).unwrap_err(), SessionError::SessionEnded);
}

#[test]
fn last_command_of_a_kind_wins() {
    let mut s = bp(1);
    s.submit_input(Command::Look { heading: 1.0 }).unwrap();
    s.submit_input(Command::Look { heading: -0.5 }).unwrap();
    s.step().unwrap();
    assert_eq!(s.player().heading, -0.5);
}

#[test]
fn one_second_quake_spans_fifty_snapshots() {
    let scene = demo::demo_scene();
    let mut sc = demo::bp_scenario();
    sc.quake.duration = 1.0;
    sc.quake.params.envelope = evacsim::quake::Envelope::rectangular(1.0);
    let sc = evacsim::story::prepare(sc, &scene).unwrap();
    let mut p =
        Pilot::new(Session::from_parts(SessionConfig::builtin(Mode::Bp, 5), scene, sc).unwrap());
    p.walk_to("mr_c").unwrap();
    p.send(Command::Select {
        action_id: Some("leave_belongings".into()),
    })
    .unwrap();
    let mut in_quake = 0;
    for _ in 0..200 {
        if p.session.step().unwrap().phase == Phase::Earthquake {
            in_quake += 1;
        }
    }
    assert_eq!(in_quake, 50);
}

#[test]
fn quiet_pre_quake_tick_changes_only_npcs() {
    let mut s = bp(8);
    for _ in 0..300 {
        let snap = s.step().unwrap();
        assert!(snap.objects.is_empty(), "tick {}", snap.tick);
        assert!(snap.interactables.is_empty());
        assert!(snap.events.iter().all(|e| matches!(
            e.body,
            EventBody::NpcMoved { .. }
                | EventBody::NpcActivityChanged { .. }
                | EventBody::SnapshotMark { .. }
        )));
    }
}

#[test]
fn full_run_ends_outside_with_terminal_flag() {
    let p = demo::play("bp_careful", 2).unwrap();
    assert_eq!(p.session.phase(), Phase::OutdoorEvacuation);
    assert!(p.session.full_snapshot(vec![]).terminal);
    let r = p.session.finish().unwrap();
    let Outcome::Behavioural { record } = &r.outcome else {
        panic!("expected a record")
    };
    assert!(record.identified_safe_area);
    assert!(record.fields().iter().all(|(_, v)| !v.is_null()));
    assert!(matches!(
        r.log.last().unwrap().body,
        EventBody::SessionEnded { aborted: false }
    ));
}

#[test]
fn abort_marks_the_log_and_skips_the_record() {
    let mut p = Pilot::new(bp(4));
    p.walk_to("mr_c").unwrap();
    p.select("leave_belongings").unwrap();
    p.wait_for_phase(Phase::PreEvacuation, 5000).unwrap();
    let r = p.session.abort();
    assert_eq!(r.outcome, Outcome::Aborted);
    assert!(matches!(
        r.log.last().unwrap().body,
        EventBody::SessionEnded { aborted: true }
    ));
    let dir = tempfile::tempdir().unwrap();
    r.write_artifacts(dir.path()).unwrap();
    assert!(dir.path().join("events.jsonl").exists());
    assert!(!dir.path().join("record.json").exists());
}

#[test]
fn finish_before_terminal_is_an_error() {
    assert_eq!(bp(1).finish().unwrap_err(), SessionError::NotTerminal);
}

#[test]
fn training_run_yields_full_report() {
    let p = demo::play("tp_best", 6).unwrap();
    assert_eq!(p.session.phase(), Phase::Debrief);
    let r = p.session.finish().unwrap();
    let Outcome::Feedback { report } = &r.outcome else {
        panic!("expected a report")
    };
    assert_eq!((report.taken, report.missed), (12, 0));
    assert!(report.items.iter().all(|i| !i.rationale.is_empty()));
}

#[test]
fn artifacts_rederive_the_record() {
    let p = demo::play("bp_escalator", 3).unwrap();
    let r = p.session.finish().unwrap();
    let dir = tempfile::tempdir().unwrap();
    r.write_artifacts(dir.path()).unwrap();
    let log = EventLog::read_jsonl(&dir.path().join("events.jsonl")).unwrap();
    let again = extract_bp_metrics(log.events()).unwrap();
    let stored: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("record.json")).unwrap())
            .unwrap();
    assert_eq!(serde_json::to_value(&again).unwrap(), stored);
    let cfg: SessionConfig =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("config.json")).unwrap())
            .unwrap();
    assert_eq!(cfg.seed, 3);
}

fn fold_check(name: &str) {
    let p = demo::play(name, 5).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let cfg = p.session.config().clone();
    let script = common::write(
        dir.path(),
        "s.jsonl",
        &evacsim::session::script_to_jsonl(&p.script),
    );
    let mut s = Session::new(SessionConfig {
        input: InputSource::Script(script),
        ..cfg
    })
    .unwrap();
    let mut folded = FullState::from_full(s.initial_snapshot());
    let mut tick = 0;
    while !s.is_terminal() {
        let snap: Snapshot = s.step().unwrap();
        folded.apply(&snap);
        tick += 1;
        if tick % 97 == 0 || s.is_terminal() {
            assert_eq!(folded, s.full_state(), "{name} tick {tick}");
        }
    }
}

#[test]
fn folded_deltas_match_full_state_free_roam() {
    fold_check("bp_careful");
}

#[test]
fn folded_deltas_match_full_state_training() {
    fold_check("tp_mixed");
}

#[test]
fn interleaved_sessions_match_solo_runs() {
    let solo = |seed| {
        let mut s = bp(seed);
        s.submit_input(Command::Move { held: true }).unwrap();
        s.run_ticks(400).unwrap();
        common::jsonl(s.log())
    };
    let (a_solo, b_solo) = (solo(1), solo(2));
    let mut a = bp(1);
    let mut b = bp(2);
    a.submit_input(Command::Move { held: true }).unwrap();
    b.submit_input(Command::Move { held: true }).unwrap();
    for _ in 0..400 {
        a.step().unwrap();
        b.step().unwrap();
    }
    assert_eq!(common::jsonl(a.log()), a_solo);
    assert_eq!(common::jsonl(b.log()), b_solo);
    let threads: Vec<_> = [1u64, 2]
        .into_iter()
        .map(|seed| std::thread::spawn(move || solo(seed)))
        .collect();
    let out: Vec<String> = threads.into_iter().map(|t| t.join().unwrap()).collect();
    assert_eq!(out, vec![a_solo, b_solo]);
}

#[test]
fn recorded_script_round_trips_and_replays() {
    let p = demo::play("tp_worst", 9).unwrap();
    let text = evacsim::session::script_to_jsonl(&p.script);
    assert_eq!(parse_script(&text).unwrap(), p.script);
    let dir = tempfile::tempdir().unwrap();
    let s = common::replay(&p, dir.path(), 100_000);
    assert_eq!(common::jsonl(s.log()), common::jsonl(p.session.log()));
}

#[test]
fn seed_override_from_environment() {
    // only this test touches the variable
    std::env::set_var(evacsim::session::SEED_ENV, "777");
    let cfg = SessionConfig::builtin(Mode::Bp, 1)
        .with_env_overrides()
        .unwrap();
    std::env::remove_var(evacsim::session::SEED_ENV);
    assert_eq!(cfg.seed, 777);
    assert!(Session::new(cfg)
        .unwrap()
        .id()
        .ends_with("0000000000000309"));
}

#[test]
fn seeds_change_the_shaking() {
    assert_ne!(bp(1).signal().samples, bp(2).signal().samples);
    assert_eq!(bp(1).signal().samples, bp(1).signal().samples);
}

#[test]
fn relocation_finishes_while_shaking() {
    let mut p = Pilot::new(bp(12));
    p.walk_to("mr_c").unwrap();
    p.select("leave_belongings").unwrap();
    assert!(!p.session.relocation_done());
    p.wait(2.0).unwrap();
    assert!(p.session.relocation_done());
    assert!(p
        .session
        .log()
        .iter()
        .any(|e| matches!(e.body, EventBody::RelocationApplied { .. })));
}

fn all_snapshots(name: &str, seed: u64) -> (Session, Vec<Snapshot>) {
    let p = demo::play(name, seed).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let cfg = p.session.config().clone();
    let script = common::write(
        dir.path(),
        "s.jsonl",
        &evacsim::session::script_to_jsonl(&p.script),
    );
    let mut s = Session::new(SessionConfig {
        input: InputSource::Script(script),
        ..cfg
    })
    .unwrap();
    let mut snaps = vec![s.initial_snapshot().clone()];
    while !s.is_terminal() {
        snaps.push(s.step().unwrap());
    }
    (s, snaps)
}

#[test]
fn npc_rules_hold_through_every_playthrough() {
    for name in demo::PLAYTHROUGHS {
        let (s, snaps) = all_snapshots(name, 13);
        let interactive: Vec<&str> = s
            .npcs()
            .iter()
            .filter(|a| a.interactive)
            .map(|a| a.id.as_str())
            .collect();
        let population: Vec<&String> = snaps[0].npcs.keys().collect();
        let mut folded = FullState::from_full(&snaps[0]);
        for snap in &snaps[1..] {
            folded.apply(snap);
            assert_eq!(folded.npcs.keys().collect::<Vec<_>>(), population, "{name}");
            if snap.phase == Phase::Earthquake {
                for (id, v) in &folded.npcs {
                    if v.special.is_empty() {
                        assert_ne!(
                            v.activity,
                            evacsim::npc::Activity::Walking,
                            "{name} {id} tick {}",
                            snap.tick
                        );
                    }
                }
            }
        }
        for e in s.log() {
            if let EventBody::InstructionGiven { npc, feedback, .. } = &e.body {
                assert!(interactive.contains(&npc.as_str()), "{name}: {npc}");
                if !*feedback {
                    continue;
                }
                assert_eq!(s.config().mode, Mode::Tp, "{name}: feedback in free roam");
            }
        }
    }
}

#[test]
fn logged_phases_never_go_back() {
    for name in demo::PLAYTHROUGHS {
        let p = demo::play(name, 4).unwrap();
        let mut last = Phase::PreQuake;
        let mut t = 0.0;
        for e in p.session.log() {
            assert!(e.t >= t);
            t = e.t;
            if let EventBody::PhaseChanged { from, to } = e.body {
                assert_eq!(from, last);
                assert!(to.rank() > from.rank(), "{name}: {from} -> {to}");
                last = to;
            }
        }
    }
}

#[test]
fn every_stop_is_reachable() {
    let sc = demo::tp_scenario();
    let g = sc.waitpoints.as_ref().unwrap();
    let reach = g.reachable();
    for w in &g.points {
        assert!(reach.contains(w.id.as_str()), "{} unreachable", w.id);
    }
}

#[test]
fn training_flow_is_deterministic() {
    let a = demo::play("tp_mixed", 8).unwrap();
    let b = demo::play("tp_mixed", 8).unwrap();
    assert_eq!(
        common::jsonl(a.session.log()),
        common::jsonl(b.session.log())
    );
    assert_eq!(a.script, b.script);
}

#[test]
fn snapshot_region_matches_position() {
    let (s, snaps) = all_snapshots("bp_escalator", 2);
    for snap in &snaps {
        let r = evacsim::scene::region_of(s.scene(), snap.player.position).unwrap();
        assert_eq!(r.id, snap.player.region, "tick {}", snap.tick);
    }
}
