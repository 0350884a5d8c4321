//! Rebuilds the world state from a stream of delta snapshots and checks
//! it against the engine's own view.

use evacsim::session::{Command, FullState, Session, SessionConfig};
use evacsim::story::Mode;

fn main() {
    let mut s = Session::new(SessionConfig::builtin(Mode::Bp, 4)).unwrap();
    let mut stream = vec![s.initial_snapshot().clone()];
    s.submit_input(Command::Move { held: true }).unwrap();
    for _ in 0..400 {
        stream.push(s.step().unwrap());
    }
    let sizes: Vec<usize> = stream
        .iter()
        .map(|x| serde_json::to_string(x).unwrap().len())
        .collect();
    println!(
        "first snapshot {} bytes, later ones {}..{} bytes",
        sizes[0],
        sizes[1..].iter().min().unwrap(),
        sizes[1..].iter().max().unwrap()
    );
    let folded = FullState::fold(&stream).expect("stream starts with a full snapshot");
    assert_eq!(folded, s.full_state());
    println!(
        "folded {} snapshots up to tick {}: state matches",
        stream.len(),
        folded.tick
    );
}
