//! Plays a bundled training run and prints its debrief.

use evacsim::demo;
use evacsim::session::Outcome;

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "tp_mixed".into());
    let pilot = demo::play(&name, 2).expect("playthrough completes");
    let stops: Vec<_> = pilot
        .session
        .log()
        .iter()
        .filter_map(|e| match &e.body {
            evacsim::telemetry::EventBody::WaitPointReached { waitpoint } => {
                Some(waitpoint.clone())
            }
            _ => None,
        })
        .collect();
    println!("stops: {}", stops.join(" > "));
    if let Outcome::Feedback { report } = pilot.session.finish().unwrap().outcome {
        print!("{}", report.render());
    }
}
