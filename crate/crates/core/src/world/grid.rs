use super::{GridMove, SceneState, WorldConfig};

fn cell(p: &[f64; 3]) -> (i64, i64) {
    (p[0] as i64, p[1] as i64)
}

pub(super) fn step(s: &mut SceneState, m: GridMove, cfg: &WorldConfig) {
    let max = cfg.grid_size as i64 - 1;
    let (x, y) = cell(&s.gripper.position);
    s.touched = None;
    let (nx, ny) = match m {
        GridMove::Up => (x, (y + 1).min(max)),
        GridMove::Down => (x, (y - 1).max(0)),
        GridMove::Left => ((x - 1).max(0), y),
        GridMove::Right => ((x + 1).min(max), y),
        GridMove::Interact => {
            s.touched = touched_object(s, x, y);
            (x, y)
        }
    };
    s.gripper.position = [nx as f64, ny as f64, 0.0];
}

/// The object on the agent's cell, else the lowest-id orthogonal neighbour.
fn touched_object(s: &SceneState, x: i64, y: i64) -> Option<usize> {
    let here = s.objects.iter().find(|o| cell(&o.position) == (x, y));
    here.or_else(|| {
        s.objects.iter().find(|o| {
            let (ox, oy) = cell(&o.position);
            (ox - x).abs() + (oy - y).abs() == 1
        })
    })
    .map(|o| o.id)
}

pub(super) fn render(s: &SceneState, cfg: &WorldConfig) -> String {
    let n = cfg.grid_size as i64;
    let agent = cell(&s.gripper.position);
    let mut out = String::new();
    for y in (0..n).rev() {
        for x in 0..n {
            let obj = s.objects.iter().find(|o| cell(&o.position) == (x, y));
            let c = match (obj, agent == (x, y)) {
                (Some(o), true) => char::from(b'A' + o.id as u8),
                (Some(o), false) => char::from(b'0' + o.id as u8),
                (None, true) => '@',
                (None, false) => '.',
            };
            out.push(c);
            if x + 1 < n {
                out.push(' ');
            }
        }
        out.push('\n');
    }
    out
}
