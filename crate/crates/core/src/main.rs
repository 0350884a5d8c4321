use clap::{Parser, Subcommand};
use evacsim::damage::precompute_relocation;
use evacsim::demo;
use evacsim::quake::{generate_signal, Envelope, PhysicsParams, QuakeParams};
use evacsim::scene::load_scene;
use evacsim::session::{
    log_dir, serve, InputSource, Outcome, ServeOptions, Session, SessionConfig,
};
use evacsim::story::Mode;
use evacsim::telemetry::{
    assign, extract_bp_metrics, parse_responses, summarize_assessment, Comparison, EventLog,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "evacsim",
    version,
    about = "Headless earthquake evacuation game engine"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a session headlessly from a config and an input script.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Input script (JSONL); overrides the config's input source.
        #[arg(long)]
        script: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Tick cap before giving up.
        #[arg(long, default_value_t = 50 * 60 * 30)]
        max_ticks: u64,
    },
    /// Serve sessions over websocket.
    Serve {
        #[arg(long, default_value_t = 8765)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ground-motion signals and off-stage precomputation.
    #[command(subcommand)]
    Quake(QuakeCmd),
    /// Behavioural records and questionnaire tables.
    #[command(subcommand)]
    Analyze(AnalyzeCmd),
    /// Split participants randomly between the two prototypes.
    Assign {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        bp: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Bundled demo content.
    #[command(subcommand)]
    Demo(DemoCmd),
}

#[derive(Subcommand)]
enum QuakeCmd {
    /// Generate a ground-acceleration signal as JSONL.
    Gen {
        #[arg(long)]
        peak: f64,
        #[arg(long)]
        freq: f64,
        #[arg(long)]
        duration: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        drift: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate off-stage regions and write their relocation list.
    Precompute {
        #[arg(long)]
        scene: PathBuf,
        /// Comma-separated off-stage region ids.
        #[arg(long, value_delimiter = ',')]
        regions: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 12.0)]
        duration: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum AnalyzeCmd {
    /// Behavioural record from a free-roam event log.
    Bp {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Per-component comparison of questionnaire responses.
    Assessment {
        #[arg(long)]
        responses: PathBuf,
        /// Use the rank-sum test for independent groups.
        #[arg(long)]
        rank_sum: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum DemoCmd {
    /// Write the bundled scenes, scenarios, configs and scripts to a folder.
    Export {
        #[arg(long)]
        out: PathBuf,
    },
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(p: &Path) -> Result<String, String> {
    std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))
}

fn run(
    config: &Path,
    script: Option<&Path>,
    out: Option<&Path>,
    max_ticks: u64,
) -> Result<(), String> {
    let mut cfg = SessionConfig::from_file(config).map_err(|e| e.to_string())?;
    if let Some(s) = script {
        cfg.input = InputSource::Script(s.display().to_string());
    }
    let cfg = cfg.with_env_overrides().map_err(|e| e.to_string())?;
    let mut session = Session::new(cfg).map_err(|e| e.to_string())?;
    session
        .run_until_terminal(max_ticks)
        .map_err(|e| e.to_string())?;
    let result = session.finish().map_err(|e| e.to_string())?;
    let dir = out.map_or_else(
        || log_dir(Path::new("runs")).join(&result.session),
        Path::to_path_buf,
    );
    result
        .write_artifacts(&dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?;
    match &result.outcome {
        Outcome::Behavioural { record } => print!("{}", record.render()),
        Outcome::Feedback { report } => print!("{}", report.render()),
        Outcome::Aborted => println!("aborted"),
    }
    println!("artifacts: {}", dir.display());
    Ok(())
}

fn export(out: &Path) -> Result<(), String> {
    let io = |e: std::io::Error| format!("{}: {e}", out.display());
    std::fs::create_dir_all(out).map_err(io)?;
    let scene = demo::demo_scene();
    let write = |name: &str, text: String| std::fs::write(out.join(name), text).map_err(io);
    write("scene.json", scene.to_json())?;
    write("reference_scene.json", demo::reference_scene().to_json())?;
    write("bp_scenario.json", demo::bp_scenario().to_json())?;
    write("tp_scenario.json", demo::tp_scenario().to_json())?;
    write(
        "reference_scenario.json",
        demo::reference_scenario().to_json(),
    )?;
    for name in demo::PLAYTHROUGHS {
        let p = demo::play(name, 0).map_err(|e| e.to_string())?;
        let mode = demo::playthrough_mode(name).expect("bundled");
        let scenario = if mode == Mode::Bp {
            "bp_scenario.json"
        } else {
            "tp_scenario.json"
        };
        let mut cfg = SessionConfig::builtin(mode, 0);
        cfg.scene = "scene.json".into();
        cfg.scenario = scenario.into();
        cfg.input = InputSource::Script(format!("{name}.jsonl"));
        write(
            &format!("{name}.jsonl"),
            evacsim::session::script_to_jsonl(&p.script),
        )?;
        write(
            &format!("{name}.config.json"),
            serde_json::to_string_pretty(&cfg).expect("serializable") + "\n",
        )?;
    }
    println!("wrote demo assets to {}", out.display());
    Ok(())
}

fn main_inner(cli: Cli) -> Result<(), String> {
    match cli.cmd {
        Cmd::Run {
            config,
            script,
            out,
            max_ticks,
        } => run(&config, script.as_deref(), out.as_deref(), max_ticks),
        Cmd::Serve { port, host, out } => {
            let addr = format!("{host}:{port}");
            eprintln!("listening on ws://{addr}");
            serve(&addr, ServeOptions { out_dir: out }).map_err(|e| e.to_string())
        }
        Cmd::Quake(QuakeCmd::Gen {
            peak,
            freq,
            duration,
            seed,
            drift,
            out,
        }) => {
            let params = QuakeParams {
                peak_accel: peak,
                base_frequency: freq,
                envelope: Envelope::rectangular(duration),
                direction_drift: drift,
                intensity_label: String::new(),
            };
            let signal = generate_signal(&params, duration, seed).map_err(|e| e.to_string())?;
            emit(&signal.to_jsonl(), out.as_deref())
        }
        Cmd::Quake(QuakeCmd::Precompute {
            scene,
            regions,
            seed,
            duration,
            out,
        }) => {
            let scene = load_scene(&read(&scene)?).map_err(|e| e.to_string())?;
            let regions = if regions.is_empty() {
                scene.off_stage_region_ids()
            } else {
                regions
            };
            let mut params = QuakeParams::demo();
            if (params.envelope.duration() - duration).abs() > 1e-9 {
                params.envelope = Envelope::rectangular(duration);
            }
            let signal = generate_signal(&params, duration, seed).map_err(|e| e.to_string())?;
            let list = precompute_relocation(&scene, &regions, &signal, &PhysicsParams::default())
                .map_err(|e| e.to_string())?;
            emit(&(list.to_json() + "\n"), out.as_deref())
        }
        Cmd::Analyze(AnalyzeCmd::Bp { log, json }) => {
            let log = EventLog::read_jsonl(&log).map_err(|e| e.to_string())?;
            let record = extract_bp_metrics(log.events()).map_err(|e| e.to_string())?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&record).expect("serializable")
                );
            } else {
                print!("{}", record.render());
            }
            Ok(())
        }
        Cmd::Analyze(AnalyzeCmd::Assessment {
            responses,
            rank_sum,
            json,
        }) => {
            let rs = parse_responses(&read(&responses)?).map_err(|e| e.to_string())?;
            let cmp = if rank_sum {
                Comparison::RankSum
            } else {
                Comparison::SignedRankPaired
            };
            let table = summarize_assessment(&rs, cmp).map_err(|e| e.to_string())?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&table).expect("serializable")
                );
            } else {
                print!("{}", table.render());
            }
            Ok(())
        }
        Cmd::Assign { n, bp, seed } => {
            let a = assign(n, bp, seed).map_err(|e| e.to_string())?;
            println!(
                "{}",
                serde_json::to_string_pretty(&a).expect("serializable")
            );
            Ok(())
        }
        Cmd::Demo(DemoCmd::Export { out }) => export(&out),
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
