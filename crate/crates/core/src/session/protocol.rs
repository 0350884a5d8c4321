// tungstenite's error type is large; it is only ever returned once per connection.
#![allow(clippy::result_large_err)]

use super::config::{log_dir, SessionConfig};
use super::engine::{Outcome, Session};
use super::script::Command;
use super::snapshot::Snapshot;
use super::SessionError;
use serde::{Deserialize, Serialize};
use std::io::ErrorKind;
use std::net::{TcpListener, TcpStream};
use std::path::PathBuf;
use std::time::{Duration, Instant};
use tungstenite::{Message, WebSocket};

/// Messages a client sends. The first one must be `start`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientMessage {
    Start {
        config: SessionConfig,
        /// Ticks advance only on `step` instead of in real time.
        #[serde(default)]
        lockstep: bool,
    },
    Look {
        heading: f64,
    },
    Move {
        held: bool,
    },
    Select {
        #[serde(default)]
        action_id: Option<String>,
    },
    Step {
        #[serde(default = "one")]
        ticks: u64,
    },
    Abort,
}

fn one() -> u64 {
    1
}

impl ClientMessage {
    fn command(&self) -> Option<Command> {
        match self {
            ClientMessage::Look { heading } => Some(Command::Look { heading: *heading }),
            ClientMessage::Move { held } => Some(Command::Move { held: *held }),
            ClientMessage::Select { action_id } => Some(Command::Select {
                action_id: action_id.clone(),
            }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Snapshot(Box<Snapshot>),
    /// Sent once when the session ends, with the debrief or behavioural record.
    Report {
        session: String,
        outcome: Outcome,
        events: usize,
    },
    Error {
        message: String,
    },
}

#[derive(Debug, Clone, Default)]
pub struct ServeOptions {
    /// Where finished sessions write their artifacts, one folder per session.
    pub out_dir: Option<PathBuf>,
}

type Socket = WebSocket<TcpStream>;

fn send(ws: &mut Socket, msg: &ServerMessage) -> Result<(), tungstenite::Error> {
    ws.send(Message::text(
        serde_json::to_string(msg).expect("serializable"),
    ))
}

fn send_error(ws: &mut Socket, e: impl ToString) -> Result<(), tungstenite::Error> {
    send(
        ws,
        &ServerMessage::Error {
            message: e.to_string(),
        },
    )
}

enum Incoming {
    Msg(ClientMessage),
    Bad(String),
    Idle,
    Closed,
}

fn read(ws: &mut Socket) -> Incoming {
    match ws.read() {
        Ok(Message::Text(t)) => match serde_json::from_str::<ClientMessage>(t.as_str()) {
            Ok(m) => Incoming::Msg(m),
            Err(e) => Incoming::Bad(SessionError::UnknownCommand(e.to_string()).to_string()),
        },
        Ok(Message::Close(_)) => Incoming::Closed,
        Ok(_) => Incoming::Idle,
        Err(tungstenite::Error::Io(e))
            if matches!(e.kind(), ErrorKind::WouldBlock | ErrorKind::TimedOut) =>
        {
            Incoming::Idle
        }
        Err(_) => Incoming::Closed,
    }
}

fn finish(
    ws: &mut Socket,
    session: &mut Session,
    aborted: bool,
    opts: &ServeOptions,
) -> Result<(), tungstenite::Error> {
    let result = match session.close(aborted) {
        Ok(r) => r,
        Err(e) => return send_error(ws, e),
    };
    if let Some(dir) = &opts.out_dir {
        let dir = log_dir(dir).join(&result.session);
        if let Err(e) = result.write_artifacts(&dir) {
            send_error(ws, format!("could not write artifacts: {e}"))?;
        }
    }
    send(
        ws,
        &ServerMessage::Report {
            session: result.session,
            outcome: result.outcome,
            events: result.log.len(),
        },
    )
}

/// After the report, every further message is answered with an error until
/// the client closes.
fn drain(ws: &mut Socket) -> Result<(), tungstenite::Error> {
    ws.get_mut()
        .set_read_timeout(None)
        .map_err(tungstenite::Error::Io)?;
    loop {
        match read(ws) {
            Incoming::Msg(_) => send_error(ws, SessionError::SessionEnded)?,
            Incoming::Bad(e) => send_error(ws, e)?,
            Incoming::Idle => {}
            Incoming::Closed => return Ok(()),
        }
    }
}

/// Runs one client connection to completion.
pub fn handle_connection(stream: TcpStream, opts: &ServeOptions) -> Result<(), tungstenite::Error> {
    let mut ws = tungstenite::accept(stream).map_err(|e| match e {
        tungstenite::HandshakeError::Failure(e) => e,
        tungstenite::HandshakeError::Interrupted(_) => tungstenite::Error::ConnectionClosed,
    })?;
    let (config, lockstep) = loop {
        match read(&mut ws) {
            Incoming::Msg(ClientMessage::Start { config, lockstep }) => break (config, lockstep),
            Incoming::Msg(_) => send_error(&mut ws, "the first message must be `start`")?,
            Incoming::Bad(e) => send_error(&mut ws, e)?,
            Incoming::Idle => {}
            Incoming::Closed => return Ok(()),
        }
    };
    let mut session = match config.with_env_overrides().and_then(Session::new) {
        Ok(s) => s,
        Err(e) => {
            send_error(&mut ws, e)?;
            return ws.close(None);
        }
    };
    send(
        &mut ws,
        &ServerMessage::Snapshot(Box::new(session.initial_snapshot().clone())),
    )?;
    let dt = Duration::from_secs_f64(session.dt());
    if !lockstep {
        ws.get_mut()
            .set_read_timeout(Some(Duration::from_millis(2)))
            .map_err(tungstenite::Error::Io)?;
    }
    let mut next_tick = Instant::now() + dt;
    loop {
        let mut ticks = 0;
        match read(&mut ws) {
            Incoming::Msg(ClientMessage::Abort) => {
                finish(&mut ws, &mut session, true, opts)?;
                return drain(&mut ws);
            }
            Incoming::Msg(ClientMessage::Step { ticks: n }) if lockstep => ticks = n,
            Incoming::Msg(ClientMessage::Start { .. }) => {
                send_error(&mut ws, "session already started")?
            }
            Incoming::Msg(m) => {
                if let Some(cmd) = m.command() {
                    if let Err(e) = session.submit_input(cmd) {
                        send_error(&mut ws, e)?;
                    }
                }
            }
            Incoming::Bad(e) => send_error(&mut ws, e)?,
            Incoming::Idle => {}
            Incoming::Closed => return Ok(()),
        }
        if !lockstep && Instant::now() >= next_tick {
            ticks = 1;
            next_tick += dt;
        }
        for _ in 0..ticks {
            match session.step() {
                Ok(s) => send(&mut ws, &ServerMessage::Snapshot(Box::new(s)))?,
                Err(e) => send_error(&mut ws, e)?,
            }
            if session.is_terminal() {
                finish(&mut ws, &mut session, false, opts)?;
                return drain(&mut ws);
            }
        }
    }
}

/// Accepts connections forever, one thread per client.
pub fn serve_on(listener: TcpListener, opts: ServeOptions) -> std::io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        let opts = opts.clone();
        std::thread::spawn(move || {
            let _ = handle_connection(stream, &opts);
        });
    }
    Ok(())
}

pub fn serve(addr: &str, opts: ServeOptions) -> std::io::Result<()> {
    serve_on(TcpListener::bind(addr)?, opts)
}
