//! Starts a protocol server on a free port and drives one grid episode
//! from a plain TCP client, walking toward the objects named in the goal.
//!
//! ```text
//! cargo run --example protocol_client
//! ```

use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;

use repairbench::protocol::Server;
use serde_json::{json, Value};

fn send(w: &mut TcpStream, r: &mut BufReader<TcpStream>, msg: Value) -> std::io::Result<Value> {
    w.write_all(format!("{msg}\n").as_bytes())?;
    let mut line = String::new();
    r.read_line(&mut line)?;
    Ok(serde_json::from_str(&line)?)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let server = Server::bind("127.0.0.1:0")?;
    let addr = server.local_addr()?;
    server.spawn();
    println!("server on {addr}");

    let mut w = TcpStream::connect(addr)?;
    w.set_nodelay(true)?;
    let mut r = BufReader::new(w.try_clone()?);

    let reply = send(&mut w, &mut r, json!({"op": "configure", "config": {"backend": "grid", "num_objects": 2}}))?;
    println!("configure: obs_dim {} vocab {}", reply["obs_dim"], reply["vocab"].as_array().map_or(0, Vec::len));
    let reply = send(&mut w, &mut r, json!({"op": "reset", "seed": 1}))?;
    println!("goal: {}", reply["goal_text"]);

    // Visit every object: the agent cell is in obs[0..2], object slots
    // start at obs[4] with 16 features each.
    let mut obs: Vec<f64> = serde_json::from_value(reply["obs"].clone())?;
    'objects: for slot in 0..2 {
        let base = 4 + 16 * slot;
        let target = [obs[base], obs[base + 1]];
        for _ in 0..30 {
            let (x, y) = (obs[0], obs[1]);
            let mv = if x < target[0] {
                "right"
            } else if x > target[0] {
                "left"
            } else if y < target[1] {
                "up"
            } else if y > target[1] {
                "down"
            } else {
                "interact"
            };
            let reply = send(&mut w, &mut r, json!({"op": "step", "action": mv}))?;
            if reply["ok"] != true {
                println!("error: {reply}");
                break 'objects;
            }
            obs = serde_json::from_value(reply["obs"].clone())?;
            let info = &reply["info"];
            if info["correction_issued"] == true || info["success"] == true || info["wrong_interaction"] == true {
                println!("{mv:>8}: reward {} info {info}", reply["reward"]);
            }
            if reply["done"] == true {
                break 'objects;
            }
            if mv == "interact" {
                continue 'objects;
            }
        }
    }
    let reply = send(&mut w, &mut r, json!({"op": "step", "action": [0, 0, 0, 0]}))?;
    println!("continuous action on grid: {reply}");
    send(&mut w, &mut r, json!({"op": "close"}))?;
    Ok(())
}
