//! Generates a ground-acceleration trace and prints a few samples.

use evacsim::quake::{generate_signal, QuakeParams, QuakeSignal};

fn main() {
    let params = QuakeParams::demo();
    let signal = generate_signal(&params, 12.0, 7).expect("valid parameters");
    println!(
        "{} samples over {} s, peak {:.3} m/s^2",
        signal.samples.len(),
        signal.duration,
        signal.peak()
    );
    println!("parameter hash {}", params.hash());
    for t in [0.5, 1.38, 3.3, 6.22, 10.9] {
        let a = signal.accel_at(t);
        println!("t={t:>5.2}  ax={:+.3}  ay={:+.3}", a.x, a.y);
    }

    let text = signal.to_jsonl();
    let back = QuakeSignal::from_jsonl(&text).expect("round trip");
    assert_eq!(back.samples, signal.samples);
    println!("first line: {}", text.lines().next().unwrap_or_default());
}
