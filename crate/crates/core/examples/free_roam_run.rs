//! Plays a bundled free-roam run and prints the behavioural record.
//!
//! `cargo run --example free_roam_run -- bp_hasty 3`

use evacsim::demo;
use evacsim::session::Outcome;

fn main() {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "bp_careful".into());
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let pilot = demo::play(&name, seed).expect("playthrough completes");
    println!(
        "{} commands over {:.1} s",
        pilot.script.len(),
        pilot.session.time()
    );
    let result = pilot.session.finish().expect("terminal session");
    println!("{} log events", result.log.len());
    match result.outcome {
        Outcome::Behavioural { record } => print!("{}", record.render()),
        other => println!("{other:?}"),
    }
}
