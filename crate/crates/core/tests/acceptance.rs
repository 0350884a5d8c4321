//! Acceptance suite. Runs every headline criterion and prints one
//! PASS/FAIL line each; exits non-zero if any fails.

mod common;

use common::*;
use evacsim::damage::{apply_relocation_batched, precompute_relocation};
use evacsim::demo;
use evacsim::geom::Vec2;
use evacsim::quake::{
    friction_update, run_quake, topple_threshold, PhysicsParams, Regime, DEFAULT_DT,
};
use evacsim::quake::{step, PhysicsEvent};
use evacsim::scene::{ObjectKind, SceneGraph, Staging};
use evacsim::session::{Pilot, Session, SessionConfig};
use evacsim::story::Mode;
use evacsim::telemetry::{
    assign, extract_bp_metrics, summarize_assessment, wilcoxon_signed_rank, Comparison, Component,
    Event, EventBody, LikertResponse, WilcoxonMode,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::time::Instant;

type Outcome = Result<String, String>;

fn check(cond: bool, ok: String, bad: String) -> Outcome {
    if cond {
        Ok(ok)
    } else {
        Err(bad)
    }
}

struct Runs {
    bp: Vec<(String, Pilot)>,
    tp: Vec<(String, Pilot)>,
}

fn playthroughs() -> Runs {
    let mut runs = Runs {
        bp: Vec::new(),
        tp: Vec::new(),
    };
    for name in demo::PLAYTHROUGHS {
        let p = demo::play(name, 11).unwrap_or_else(|e| panic!("{name}: {e}"));
        match demo::playthrough_mode(name) {
            Some(Mode::Bp) => runs.bp.push((name.to_string(), p)),
            _ => runs.tp.push((name.to_string(), p)),
        }
    }
    runs
}

fn determinism(runs: &Runs, extra_bp_logs: &mut Vec<Vec<Event>>) -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (_, pilot) = &runs.bp[0];
    let reference = jsonl(pilot.session.log());
    let mut identical = 0;
    for _ in 0..20 {
        let s = replay(pilot, dir.path(), 100_000);
        if jsonl(s.log()) == reference {
            identical += 1;
        }
        extra_bp_logs.push(s.log().to_vec());
    }
    check(
        identical == 20,
        format!(
            "20 of 20 script replays byte-identical ({} bytes)",
            reference.len()
        ),
        format!("only {identical} of 20 replays matched the recorded log"),
    )
}

fn friction_sweep() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let dt = DEFAULT_DT;
    let mut mismatches = 0;
    let mut worst = 0.0f64;
    let (mut sticks, mut slips) = (0, 0);
    for _ in 0..1000 {
        let m = rng.random_range(0.1..200.0);
        let mu_s = rng.random_range(0.05..1.0);
        let mu_k = mu_s * rng.random_range(0.2..1.0);
        let a = rng.random_range(0.0..2.0) * mu_s * G;
        let dir = Vec2::from_angle(rng.random_range(-PI..PI));
        let rider = obj(
            "r",
            ObjectKind::LooseItem,
            m,
            (mu_s, mu_k),
            [0.2, 0.2, 0.2],
            [0.0, 0.0, 0.0],
            Some("f"),
        );
        let (force, _) = friction_update("f", Vec2::ZERO, dir * a, &rider, m * G, dt);
        let expect_stick = m * a <= mu_s * m * G;
        if (force.regime == Regime::Stick) != expect_stick {
            mismatches += 1;
        }
        if force.regime == Regime::Slip {
            slips += 1;
            worst = worst.max((force.force.norm() - mu_k * m * G).abs());
        } else {
            sticks += 1;
        }
    }
    check(
        mismatches == 0 && worst <= 1e-9,
        format!("1000 cases ({sticks} stick, {slips} slip), 0 regime mismatches, max slip force error {worst:.1e} N"),
        format!("{mismatches} regime mismatches, max slip force error {worst:.1e} N"),
    )
}

fn overturning() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let params = PhysicsParams::default();
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for k in 0..50 {
        let b = rng.random_range(0.05..0.5);
        let hz = rng.random_range(0.2..1.2);
        let width = rng.random_range(0.05..0.5);
        let yaw_axis = rng.random_range(-PI..PI);
        let block = obj(
            "block",
            ObjectKind::Furniture,
            20.0,
            (50.0, 40.0),
            [b, width, hz],
            [5.0, 5.0, 0.0],
            Some("stage_floor"),
        );
        let scene = two_room_scene(Staging::OffStage, vec![block]);
        let dir = Vec2::from_angle(yaw_axis);
        let threshold = topple_threshold(scene.object("block").unwrap(), dir, G);
        // reach 1.5 thresholds over 15 s: 0.2% of the threshold per tick
        let slope = 1.5 * threshold / 15.0;
        let signal = ramp_signal(dir, slope, 16.0, params.dt);
        let mut s = scene.clone();
        let mut onset = None;
        let mut t = 0.0;
        for i in 0..800 {
            t = i as f64 * params.dt;
            let r = step(&mut s, &signal, t, &params).map_err(|e| e.to_string())?;
            if r.events
                .iter()
                .any(|e| matches!(e, PhysicsEvent::ObjectToppled { .. }))
            {
                onset = Some(signal.accel_at(t).norm());
                break;
            }
        }
        match onset {
            Some(a) => {
                let rel = (a - threshold).abs() / threshold;
                worst = worst.max(rel);
                if rel > 0.02 {
                    failures.push(format!("block {k}: {a:.4} vs {threshold:.4}"));
                }
            }
            None => failures.push(format!("block {k}: no topple by t = {t:.2}")),
        }
    }
    check(
        failures.is_empty(),
        format!(
            "50 blocks, worst onset deviation {:.3}% (limit 2%)",
            worst * 100.0
        ),
        failures.join("; "),
    )
}

fn relocation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let params = PhysicsParams::default();
    let mut problems = Vec::new();
    let mut total = 0;
    for case in 0..20 {
        let objects = random_store_objects(&mut rng);
        let scene = two_room_scene(Staging::OffStage, objects);
        let mut qp = evacsim::quake::QuakeParams::demo();
        qp.peak_accel = rng.random_range(1.0..6.0);
        let signal = evacsim::quake::generate_signal(&qp, 12.0, case).map_err(|e| e.to_string())?;
        let list = precompute_relocation(&scene, &["store".into()], &signal, &params)
            .map_err(|e| e.to_string())?;
        let n = list.entries.len();
        total += n;
        let mut oracle_scene = scene.clone();
        oracle_scene.regions[1].staging = Staging::OnStage;
        let oracle = run_quake(&oracle_scene, &signal, &params).map_err(|e| e.to_string())?;
        for budget in [1usize, 7, 16] {
            let mut s = scene.clone();
            let calls = apply_relocation_batched(&mut s, &list, budget)
                .map_err(|e| e.to_string())?
                .len();
            if calls != n.div_ceil(budget) {
                problems.push(format!(
                    "case {case} budget {budget}: {calls} calls for {n} entries"
                ));
            }
            if !poses_bit_equal(&s, &oracle.scene) {
                problems.push(format!(
                    "case {case} budget {budget}: poses differ from the direct simulation"
                ));
            }
        }
    }
    check(
        problems.is_empty(),
        format!("20 scenes, {total} entries, budgets 1/7/16: call counts and poses exact"),
        problems.join("; "),
    )
}

fn poses_bit_equal(a: &SceneGraph, b: &SceneGraph) -> bool {
    a.objects
        .iter()
        .filter(|o| o.dynamic && !o.is_floor())
        .all(|o| {
            let p = b.object(&o.id).expect("same ids");
            o.pose
                .position
                .iter()
                .zip(p.pose.position.iter())
                .all(|(x, y)| x.to_bits() == y.to_bits())
                && o.pose.yaw.to_bits() == p.pose.yaw.to_bits()
                && o.toppled == p.toppled
        })
}

fn record_coverage(runs: &Runs) -> Outcome {
    let mut defined: BTreeMap<&'static str, bool> = BTreeMap::new();
    let mut bools: BTreeMap<&'static str, BTreeSet<bool>> = BTreeMap::new();
    for (name, p) in &runs.bp {
        let r = extract_bp_metrics(p.session.log()).map_err(|e| format!("{name}: {e}"))?;
        for (field, v) in r.fields() {
            *defined.entry(field).or_default() |= !v.is_null();
            if let Some(b) = v.as_bool() {
                bools.entry(field).or_default().insert(b);
            } else if v.is_boolean() || field.ends_with("_first") {
                bools.entry(field).or_default();
            }
        }
    }
    let undefined: Vec<_> = defined
        .iter()
        .filter(|(_, d)| !**d)
        .map(|(f, _)| *f)
        .collect();
    let one_sided: Vec<_> = bools
        .iter()
        .filter(|(_, s)| s.len() < 2)
        .map(|(f, _)| *f)
        .collect();
    check(
        undefined.is_empty() && one_sided.is_empty() && defined.len() == 23,
        format!(
            "{} runs, {} fields all defined, {} yes/no fields seen both ways",
            runs.bp.len(),
            defined.len(),
            bools.len()
        ),
        format!(
            "undefined: {undefined:?}; one-sided: {one_sided:?}; fields: {}",
            defined.len()
        ),
    )
}

fn debrief_coverage(runs: &Runs) -> Outcome {
    let want: BTreeMap<&str, BTreeSet<&str>> = [
        (
            "tp_best",
            [
                "dch",
                "watch_hazards",
                "wait_30s",
                "belongings",
                "first_aid",
                "help_people",
                "find_exit",
                "fire",
                "unplug",
                "radio",
                "stairs",
                "open_space",
            ]
            .into_iter()
            .collect(),
        ),
        ("tp_worst", BTreeSet::new()),
        (
            "tp_mixed",
            [
                "dch",
                "belongings",
                "help_people",
                "fire",
                "find_exit",
                "open_space",
            ]
            .into_iter()
            .collect(),
        ),
    ]
    .into_iter()
    .collect();
    let mut summary = Vec::new();
    let mut problems = Vec::new();
    for (name, p) in &runs.tp {
        let report = p.session.report().ok_or(format!("{name}: no report"))?;
        let taken: BTreeSet<&str> = report
            .items
            .iter()
            .filter(|i| i.taken)
            .map(|i| i.behaviour.as_str())
            .collect();
        if taken != want[name.as_str()] || report.items.len() != 12 {
            problems.push(format!("{name}: took {taken:?}"));
        }
        summary.push(format!("{name} {}/12", report.taken));
    }
    check(problems.is_empty(), summary.join(", "), problems.join("; "))
}

/// Two-sided p by listing all sign assignments of the mid-ranked |d|.
fn enumerate_p(d: &[i32]) -> f64 {
    let nz: Vec<i32> = d.iter().copied().filter(|v| *v != 0).collect();
    if nz.is_empty() {
        return 1.0;
    }
    let abs: Vec<i32> = nz.iter().map(|v| v.abs()).collect();
    // doubled mid-ranks keep the arithmetic in integers
    let rank2: Vec<i64> = abs
        .iter()
        .map(|a| {
            let below = abs.iter().filter(|b| *b < a).count() as i64;
            let tied = abs.iter().filter(|b| *b == a).count() as i64;
            2 * below + tied + 1
        })
        .collect();
    let total2: i64 = rank2.iter().sum();
    let obs2: i64 = nz
        .iter()
        .zip(&rank2)
        .filter(|(v, _)| **v > 0)
        .map(|(_, r)| r)
        .sum();
    let dev = (2 * obs2 - total2).abs();
    let m = nz.len();
    let hits = (0u32..1 << m)
        .filter(|mask| {
            let w2: i64 = (0..m)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| rank2[i])
                .sum();
            (2 * w2 - total2).abs() >= dev
        })
        .count();
    hits as f64 / (1u64 << m) as f64
}

fn wilcoxon() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=10);
        let x: Vec<i32> = (0..n).map(|_| rng.random_range(-3..=3)).collect();
        let y: Vec<i32> = (0..n).map(|_| rng.random_range(-3..=3)).collect();
        let d: Vec<i32> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        let xf: Vec<f64> = x.iter().map(|v| f64::from(*v)).collect();
        let yf: Vec<f64> = y.iter().map(|v| f64::from(*v)).collect();
        let r = wilcoxon_signed_rank(&xf, &yf, WilcoxonMode::Exact).map_err(|e| e.to_string())?;
        if r.p_value != enumerate_p(&d) {
            mismatches += 1;
        }
    }
    let fixture = wilcoxon_signed_rank(&[1.0, -2.0, 3.0, 4.0, 5.0], &[0.0; 5], WilcoxonMode::Exact)
        .map_err(|e| e.to_string())?;
    check(
        mismatches == 0 && fixture.p_value == 0.1875 && fixture.w_minus == 2.0,
        format!(
            "1000 cases exact, fixture p = {} with W- = {}",
            fixture.p_value, fixture.w_minus
        ),
        format!("{mismatches} mismatches, fixture p = {}", fixture.p_value),
    )
}

fn fixture_fidelity() -> Outcome {
    let a = assign(170, Some(83), 2017).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut responses = Vec::new();
    for (ids, proto) in [(&a.bp, Mode::Bp), (&a.tp, Mode::Tp)] {
        for id in ids {
            for c in Component::ALL {
                responses.push(LikertResponse {
                    participant: id.clone(),
                    prototype: proto,
                    component: c,
                    score: rng.random_range(-1..=3),
                });
            }
        }
    }
    let table = summarize_assessment(&responses, Comparison::RankSum).map_err(|e| e.to_string())?;
    let text = table.render();
    let lines: Vec<&str> = text.lines().collect();
    let cell = |s: &str| s.split("   ").filter(|c| c.contains(" | ")).count();
    let rows_ok = table.rows.len() == 4
        && lines.len() >= 5
        && lines[1..5]
            .iter()
            .zip(Component::ALL)
            .all(|(l, c)| l.starts_with(c.label()) && cell(l) == 2);
    let sizes = (table.participants["bp"], table.participants["tp"]);
    check(
        rows_ok && sizes == (83, 87) && a.bp.len() + a.tp.len() == 170,
        format!("4 component rows, groups {} + {} = 170", sizes.0, sizes.1),
        format!("table:\n{text}"),
    )
}

fn performance() -> Outcome {
    let mut cfg = SessionConfig::builtin(Mode::Bp, 9);
    cfg.scene = "builtin:reference".into();
    cfg.scenario = "builtin:reference".into();
    let mut p = Pilot::new(Session::new(cfg).map_err(|e| e.to_string())?);
    let dynamic = p
        .session
        .scene()
        .objects
        .iter()
        .filter(|o| o.dynamic)
        .count();
    let npcs = p.session.npcs().len();
    p.select("leave_belongings").map_err(|e| e.to_string())?;
    let mut ms = Vec::with_capacity(1000);
    for _ in 0..1000 {
        let t = Instant::now();
        p.step().map_err(|e| e.to_string())?;
        ms.push(t.elapsed().as_secs_f64() * 1000.0);
    }
    let quake = p.session.phase() == evacsim::story::Phase::Earthquake;
    ms.sort_by(f64::total_cmp);
    let median = ms[500];
    check(
        median <= 20.0 && dynamic == 500 && npcs == 20 && quake,
        format!("median {median:.3} ms, p99 {:.3} ms over 1000 shaking ticks ({dynamic} objects, {npcs} NPCs)", ms[990]),
        format!("median {median:.3} ms ({dynamic} objects, {npcs} NPCs, still shaking: {quake})"),
    )
}

fn neutrality(runs: &Runs, extra: &[Vec<Event>]) -> Outcome {
    let mut logs: Vec<&[Event]> = runs.bp.iter().map(|(_, p)| p.session.log()).collect();
    logs.extend(extra.iter().map(Vec::as_slice));
    let mut offending = 0;
    let mut scanned = 0;
    for log in &logs {
        for e in log
            .iter()
            .take_while(|e| !matches!(e.body, EventBody::SessionEnded { .. }))
        {
            scanned += 1;
            if e.body.is_feedback() {
                offending += 1;
            }
        }
    }
    check(
        offending == 0,
        format!(
            "{} free-roam logs, {scanned} events, 0 feedback events",
            logs.len()
        ),
        format!("{offending} feedback events found"),
    )
}

fn main() {
    let started = Instant::now();
    let runs = playthroughs();
    let mut extra = Vec::new();
    let results: Vec<(&str, Outcome)> = vec![
        ("replay determinism", determinism(&runs, &mut extra)),
        ("coulomb friction sweep", friction_sweep()),
        ("block overturning onset", overturning()),
        ("batched relocation equivalence", relocation()),
        ("free-roam record coverage", record_coverage(&runs)),
        ("training debrief coverage", debrief_coverage(&runs)),
        ("signed-rank exact p", wilcoxon()),
        ("questionnaire table and assignment", fixture_fidelity()),
        ("tick time budget", performance()),
        ("free-roam feedback neutrality", neutrality(&runs, &extra)),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(msg) => println!("PASS  {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {name}: {msg}");
            }
        }
    }
    println!(
        "{} passed, {failed} failed in {:.1} s",
        results.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
