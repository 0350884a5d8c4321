//! Starts a server on a free port and drives one lockstep session over
//! the websocket.

use evacsim::session::{serve_on, ClientMessage, ServeOptions, ServerMessage, SessionConfig};
use evacsim::story::Mode;
use std::net::TcpListener;
use tungstenite::Message;

fn main() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("ws://{}", listener.local_addr().unwrap());
    std::thread::spawn(move || serve_on(listener, ServeOptions::default()));

    let (mut ws, _) = tungstenite::connect(&url).expect("server is listening");
    let send = |ws: &mut tungstenite::WebSocket<_>, m: ClientMessage| {
        ws.send(Message::text(serde_json::to_string(&m).unwrap()))
            .unwrap();
    };
    let recv = |ws: &mut tungstenite::WebSocket<_>| loop {
        if let Message::Text(t) = ws.read().unwrap() {
            break serde_json::from_str::<ServerMessage>(t.as_str()).unwrap();
        }
    };

    send(
        &mut ws,
        ClientMessage::Start {
            config: SessionConfig::builtin(Mode::Bp, 9),
            lockstep: true,
        },
    );
    let ServerMessage::Snapshot(first) = recv(&mut ws) else {
        panic!("no initial snapshot")
    };
    println!(
        "session {} in {} with {} objects",
        first.session,
        first.player.region,
        first.objects.len()
    );

    send(
        &mut ws,
        ClientMessage::Look {
            heading: std::f64::consts::FRAC_PI_2,
        },
    );
    send(&mut ws, ClientMessage::Move { held: true });
    send(&mut ws, ClientMessage::Step { ticks: 100 });
    for _ in 0..100 {
        if let ServerMessage::Snapshot(s) = recv(&mut ws) {
            if s.tick % 25 == 0 {
                println!(
                    "tick {:>3}: player at ({:.2}, {:.2})",
                    s.tick, s.player.position.x, s.player.position.y
                );
            }
        }
    }
    send(&mut ws, ClientMessage::Abort);
    if let ServerMessage::Report {
        outcome, events, ..
    } = recv(&mut ws)
    {
        println!("ended: {outcome:?} after {events} events");
    }
    ws.close(None).ok();
}
