//! Line-delimited JSON protocol exposing reset/step to external processes.
//! Each connection owns one isolated session.

use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::EpisodeConfig;
use crate::env::{EnvError, Environment, Episode, Observation, OBS_DIM};
use crate::world::{Action, Backend, GridMove};

#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
enum Request {
    Configure { config: Value },
    Reset { seed: u64 },
    Step { action: Value },
    Close,
}

#[derive(Debug, Serialize)]
struct ConfigureReply<'a> {
    ok: bool,
    vocab: &'a [String],
    obs_dim: usize,
}

#[derive(Debug, Serialize)]
struct ResetReply {
    ok: bool,
    obs: Vec<f64>,
    goal_tokens: Vec<u32>,
    goal_text: String,
}

#[derive(Debug, Serialize)]
struct StepInfoReply {
    success: bool,
    correction_issued: bool,
    wrong_interaction: bool,
    goal_text: String,
}

#[derive(Debug, Serialize)]
struct StepReply {
    ok: bool,
    obs: Vec<f64>,
    reward: i32,
    done: bool,
    info: StepInfoReply,
}

#[derive(Debug, Serialize)]
struct OkReply {
    ok: bool,
}

#[derive(Debug, Serialize)]
struct ErrorReply<'a> {
    ok: bool,
    error: String,
    code: &'a str,
}

pub const BAD_REQUEST: &str = "bad_request";
pub const EPISODE_DONE: &str = "episode_done";

fn error(code: &str, message: impl Into<String>) -> String {
    serde_json::to_string(&ErrorReply {
        ok: false,
        error: message.into(),
        code,
    })
    .expect("serializable")
}

fn to_line<T: Serialize>(reply: &T) -> String {
    serde_json::to_string(reply).expect("serializable")
}

/// Decodes `[dx, dy, dz, df]`, a grid move name, or a grid move index
/// (up, down, left, right, interact).
pub fn parse_action(v: &Value, backend: Backend) -> Result<Action, String> {
    let action = match v {
        Value::Array(items) => {
            let nums: Option<Vec<f64>> = items.iter().map(Value::as_f64).collect();
            match nums.map(<[f64; 4]>::try_from) {
                Some(Ok(a)) => Action::Continuous(a),
                _ => return Err(format!("continuous action needs 4 numbers, got {}", items.len())),
            }
        }
        Value::String(s) => Action::Grid(
            serde_json::from_value::<GridMove>(Value::String(s.clone())).map_err(|_| format!("unknown grid move `{s}`"))?,
        ),
        Value::Number(n) => {
            let i = n.as_u64().filter(|&i| (i as usize) < GridMove::ALL.len());
            Action::Grid(GridMove::ALL[i.ok_or_else(|| format!("grid move index {n} out of range"))? as usize])
        }
        _ => return Err("action must be an array, a string or an integer".into()),
    };
    if action.backend() != backend {
        return Err(format!("action does not match the {backend:?} backend"));
    }
    Ok(action)
}

/// State of one connection.
#[derive(Default)]
pub struct Session {
    env: Option<Arc<Environment>>,
    episode: Option<Episode>,
    closed: bool,
}

impl Session {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts with an environment already configured.
    pub fn with_environment(env: Arc<Environment>) -> Self {
        Session {
            env: Some(env),
            ..Default::default()
        }
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn episode(&self) -> Option<&Episode> {
        self.episode.as_ref()
    }

    /// Handles one request line and returns the reply line (without the
    /// trailing newline). Errors never end the session.
    pub fn handle_message(&mut self, line: &str) -> String {
        let req: Request = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(e) => return error(BAD_REQUEST, e.to_string()),
        };
        match req {
            Request::Configure { config } => {
                let cfg: EpisodeConfig = match serde_json::from_value(config) {
                    Ok(c) => c,
                    Err(e) => return error(BAD_REQUEST, format!("config: {e}")),
                };
                match Environment::new(cfg) {
                    Ok(env) => {
                        self.episode = None;
                        let reply = to_line(&ConfigureReply {
                            ok: true,
                            vocab: env.vocab().words(),
                            obs_dim: OBS_DIM,
                        });
                        self.env = Some(env);
                        reply
                    }
                    Err(e) => error(BAD_REQUEST, e.to_string()),
                }
            }
            Request::Reset { seed } => {
                let Some(env) = &self.env else {
                    return error(BAD_REQUEST, "reset before configure");
                };
                match env.reset(seed) {
                    Ok(ep) => {
                        let obs: &Observation = ep.observation();
                        let reply = to_line(&ResetReply {
                            ok: true,
                            obs: obs.to_vec(),
                            goal_tokens: obs.goal_ids.clone(),
                            goal_text: ep.goal().text(),
                        });
                        self.episode = Some(ep);
                        reply
                    }
                    Err(e) => error(BAD_REQUEST, e.to_string()),
                }
            }
            Request::Step { action } => {
                let Some(ep) = self.episode.as_mut() else {
                    return error(BAD_REQUEST, "step before reset");
                };
                let action = match parse_action(&action, ep.config().backend) {
                    Ok(a) => a,
                    Err(e) => return error(BAD_REQUEST, e),
                };
                match ep.step(action) {
                    Ok(r) => to_line(&StepReply {
                        ok: true,
                        obs: r.observation.to_vec(),
                        reward: r.reward,
                        done: r.done,
                        info: StepInfoReply {
                            success: r.info.success,
                            correction_issued: r.info.correction_issued_this_step,
                            wrong_interaction: r.info.wrong_interaction,
                            goal_text: r.info.goal_text,
                        },
                    }),
                    Err(EnvError::EpisodeDone) => error(EPISODE_DONE, "episode is done; send reset"),
                    Err(e) => error(BAD_REQUEST, e.to_string()),
                }
            }
            Request::Close => {
                self.closed = true;
                self.episode = None;
                to_line(&OkReply { ok: true })
            }
        }
    }
}

/// Serves one session over a line stream until `close` or end of input.
pub fn serve_connection<R: BufRead, W: Write>(input: R, mut output: W) -> io::Result<()> {
    let mut session = Session::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let reply = session.handle_message(&line);
        output.write_all(reply.as_bytes())?;
        output.write_all(b"\n")?;
        output.flush()?;
        if session.is_closed() {
            break;
        }
    }
    Ok(())
}

pub fn serve_stdio() -> io::Result<()> {
    let stdin = io::stdin();
    let stdout = io::stdout();
    serve_connection(stdin.lock(), BufWriter::new(stdout.lock()))
}

/// A bound TCP server; each accepted connection gets its own thread and
/// session.
pub struct Server {
    listener: TcpListener,
}

impl Server {
    pub fn bind<A: ToSocketAddrs>(addr: A) -> io::Result<Self> {
        Ok(Server {
            listener: TcpListener::bind(addr)?,
        })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Accepts connections forever.
    pub fn run(self) -> io::Result<()> {
        for stream in self.listener.incoming() {
            let stream = stream?;
            std::thread::spawn(move || {
                let _ = handle_stream(stream);
            });
        }
        Ok(())
    }

    /// Runs the accept loop on a background thread.
    pub fn spawn(self) -> std::thread::JoinHandle<io::Result<()>> {
        std::thread::spawn(move || self.run())
    }
}

fn handle_stream(stream: TcpStream) -> io::Result<()> {
    stream.set_nodelay(true)?;
    let reader = BufReader::new(stream.try_clone()?);
    serve_connection(reader, BufWriter::new(stream))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn configured() -> Session {
        let mut s = Session::new();
        let r = s.handle_message(r#"{"op":"configure","config":{"task":"reach","num_objects":2}}"#);
        assert!(r.starts_with(r#"{"ok":true,"vocab":["<pad>""#), "{r}");
        assert!(r.ends_with(r#""obs_dim":64}"#));
        s
    }

    #[test]
    fn reset_is_byte_identical() {
        let mut s = configured();
        let a = s.handle_message(r#"{"op":"reset","seed":7}"#);
        let b = s.handle_message(r#"{"op":"reset","seed":7}"#);
        assert_eq!(a, b);
    }

    #[test]
    fn schema_errors() {
        let mut s = configured();
        s.handle_message(r#"{"op":"reset","seed":1}"#);
        let r = s.handle_message(r#"{"op":"step","action":[0.1,0.2,0.3]}"#);
        assert!(r.contains(r#""code":"bad_request""#), "{r}");
        assert!(s.handle_message("not json").contains("bad_request"));
        assert!(s.handle_message(r#"{"op":"dance"}"#).contains("bad_request"));
        assert!(s.handle_message(r#"{"op":"step","action":"up"}"#).contains("bad_request"));
        let r = s.handle_message(r#"{"op":"step","action":[0,0,0,0]}"#);
        assert!(r.starts_with(r#"{"ok":true"#), "{r}");
    }

    #[test]
    fn configure_errors_name_the_key() {
        let mut s = Session::new();
        let r = s.handle_message(r#"{"op":"configure","config":{"num_objects":9}}"#);
        assert!(r.contains("num_objects") && r.contains("bad_request"), "{r}");
        assert!(s.handle_message(r#"{"op":"reset","seed":1}"#).contains("reset before configure"));
    }

    #[test]
    fn step_after_done() {
        let mut s = Session::new();
        s.handle_message(r#"{"op":"configure","config":{"max_steps":2}}"#);
        s.handle_message(r#"{"op":"reset","seed":1}"#);
        s.handle_message(r#"{"op":"step","action":[0,0,0,0]}"#);
        let r = s.handle_message(r#"{"op":"step","action":[0,0,0,0]}"#);
        assert!(r.contains(r#""done":true"#));
        let r = s.handle_message(r#"{"op":"step","action":[0,0,0,0]}"#);
        assert!(r.contains(r#""code":"episode_done""#), "{r}");
        assert_eq!(s.handle_message(r#"{"op":"close"}"#), r#"{"ok":true}"#);
        assert!(s.is_closed());
    }

    #[test]
    fn grid_actions_by_name_or_index() {
        assert_eq!(parse_action(&serde_json::json!("interact"), Backend::Grid), Ok(Action::Grid(GridMove::Interact)));
        assert_eq!(parse_action(&serde_json::json!(2), Backend::Grid), Ok(Action::Grid(GridMove::Left)));
        assert!(parse_action(&serde_json::json!(5), Backend::Grid).is_err());
    }
}
