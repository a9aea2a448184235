use super::{horizontal_distance, Hold, SceneState, Vec3, WorldConfig, EPS};

/// One continuous step: sub-stepped vertical then horizontal motion with
/// kinematic pushing, then the finger update.
pub(super) fn step(s: &mut SceneState, a: [f64; 4], cfg: &WorldConfig) {
    let n = cfg.substeps.max(1);
    let start = s.gripper.position;
    let mut blocked = a[0] == 0.0 && a[1] == 0.0;
    // positions are start + delta * k/n so the last sub-step lands exactly
    for k in 1..=n {
        let frac = k as f64 / n as f64;
        descend_or_rise(s, start[2] + a[2] * frac, cfg);
        if !blocked {
            let target = [start[0] + a[0] * frac, start[1] + a[1] * frac];
            blocked = !try_move_horizontal(s, target, cfg);
        }
    }
    update_fingers(s, a[3], cfg);
}

fn held_offset(s: &SceneState) -> Option<(usize, Vec3)> {
    s.hold.as_ref().map(|h| (h.object, h.offset))
}

fn sync_held(s: &mut SceneState) {
    if let Some((id, off)) = held_offset(s) {
        let g = s.gripper.position;
        s.objects[id].position = [g[0] + off[0], g[1] + off[1], g[2] + off[2]];
    }
}

/// Sets the gripper height to `z`, raised as needed so neither the gripper
/// nor a held object sinks into the table or an object below.
fn descend_or_rise(s: &mut SceneState, z: f64, cfg: &WorldConfig) {
    let g = s.gripper.position;
    let mut floor = 0.0_f64;
    let held = held_offset(s);
    for o in &s.objects {
        if held.is_some_and(|(id, _)| id == o.id) {
            continue;
        }
        if horizontal_distance(&g, &o.position) < cfg.contact_distance() - EPS {
            floor = floor.max(o.position[2] + o.half_extent);
        }
        if let Some((id, off)) = held {
            let hp = [g[0] + off[0], g[1] + off[1]];
            let held_he = s.objects[id].half_extent;
            if (hp[0] - o.position[0]).hypot(hp[1] - o.position[1]) < held_he + o.half_extent - EPS {
                floor = floor.max(o.position[2] + o.half_extent + held_he - off[2]);
            }
        }
    }
    if let Some((id, off)) = held {
        floor = floor.max(s.objects[id].half_extent - off[2]);
    }
    s.gripper.position[2] = z.min(cfg.workspace_height).max(floor);
    sync_held(s);
}

/// Attempts one horizontal sub-step. Objects overlapping the gripper at
/// contact height are pushed out along the center line; the sub-step is
/// rejected when that would leave the table or make objects overlap.
fn try_move_horizontal(s: &mut SceneState, target: [f64; 2], cfg: &WorldConfig) -> bool {
    let t = cfg.table_half_size;
    let bound = cfg.object_bound();
    let contact = cfg.contact_distance();
    let saved = (s.gripper.position, s.objects.clone());
    let prev = s.gripper.position;

    s.gripper.position[0] = target[0].clamp(-t, t);
    s.gripper.position[1] = target[1].clamp(-t, t);
    sync_held(s);
    let g = s.gripper.position;
    let held = held_offset(s).map(|(id, _)| id);

    let mut pushed = Vec::new();
    for o in s.objects.iter_mut() {
        if Some(o.id) == held {
            continue;
        }
        let at_contact_height = g[2] < o.position[2] + o.half_extent - EPS;
        let d = horizontal_distance(&g, &o.position);
        if at_contact_height && d < contact - EPS {
            let dir = if d > EPS {
                [(o.position[0] - g[0]) / d, (o.position[1] - g[1]) / d]
            } else {
                let m = [g[0] - prev[0], g[1] - prev[1]];
                let len = m[0].hypot(m[1]).max(EPS);
                [m[0] / len, m[1] / len]
            };
            o.position[0] = g[0] + dir[0] * contact;
            o.position[1] = g[1] + dir[1] * contact;
            pushed.push(o.id);
        }
    }

    let valid = pushed.iter().all(|&id| {
        let p = s.objects[id].position;
        p[0].abs() <= bound + EPS && p[1].abs() <= bound + EPS
    }) && no_object_overlap(s)
        && held.is_none_or(|id| {
            let p = s.objects[id].position;
            p[0].abs() <= bound + EPS && p[1].abs() <= bound + EPS
        });

    if !valid {
        s.gripper.position = saved.0;
        s.objects = saved.1;
    }
    valid
}

/// Pairwise check over all objects: footprints overlap and vertical
/// extents intersect.
pub fn no_object_overlap(s: &SceneState) -> bool {
    for (i, a) in s.objects.iter().enumerate() {
        for b in &s.objects[i + 1..] {
            if objects_overlap(&a.position, a.half_extent, &b.position, b.half_extent) {
                return false;
            }
        }
    }
    true
}

fn objects_overlap(a: &Vec3, ha: f64, b: &Vec3, hb: f64) -> bool {
    horizontal_distance(a, b) < ha + hb - EPS && (a[2] - b[2]).abs() < ha + hb - EPS
}

fn update_fingers(s: &mut SceneState, delta: f64, cfg: &WorldConfig) {
    let g = &mut s.gripper;
    g.finger_opening = (g.finger_opening + delta).clamp(0.0, 1.0);
    let closed = g.finger_opening < cfg.closed_finger_threshold;
    match (&s.hold, closed) {
        (Some(h), false) => {
            let id = h.object;
            s.hold = None;
            s.objects[id].attached = false;
            drop_to_table(s, id, cfg);
        }
        (None, true) => {
            let g = s.gripper.position;
            let candidate = s.objects.iter().find(|o| {
                horizontal_distance(&g, &o.position) < cfg.grasp_radius
                    && (g[2] - o.position[2]).abs() < cfg.grasp_height_tolerance
            });
            if let Some(o) = candidate {
                let id = o.id;
                let offset = [o.position[0] - g[0], o.position[1] - g[1], o.position[2] - g[2]];
                s.hold = Some(Hold { object: id, offset });
                s.objects[id].attached = true;
            }
        }
        _ => {}
    }
}

/// Puts a released object back on the table, sliding it to the nearest
/// free spot if it would land on another object.
fn drop_to_table(s: &mut SceneState, id: usize, cfg: &WorldConfig) {
    let bound = cfg.object_bound();
    let he = s.objects[id].half_extent;
    let clampb = |p: &mut Vec3| {
        p[0] = p[0].clamp(-bound, bound);
        p[1] = p[1].clamp(-bound, bound);
    };
    let mut p = s.objects[id].position;
    p[2] = he;
    clampb(&mut p);

    let overlapping = |s: &SceneState, p: &Vec3| {
        s.objects
            .iter()
            .find(|o| o.id != id && objects_overlap(p, he, &o.position, o.half_extent))
            .map(|o| o.position)
    };
    for _ in 0..16 {
        let Some(q) = overlapping(s, &p) else { break };
        let d = horizontal_distance(&p, &q);
        let dir = if d > EPS { [(p[0] - q[0]) / d, (p[1] - q[1]) / d] } else { [1.0, 0.0] };
        let sep = 2.0 * he + 1e-6;
        p = [q[0] + dir[0] * sep, q[1] + dir[1] * sep, he];
        clampb(&mut p);
    }
    if overlapping(s, &p).is_some() {
        let origin = p;
        'search: for ring in 1..=100 {
            let r = ring as f64 * 0.005;
            for k in 0..16 {
                let ang = k as f64 * std::f64::consts::TAU / 16.0;
                let mut c = [origin[0] + r * ang.cos(), origin[1] + r * ang.sin(), he];
                clampb(&mut c);
                if overlapping(s, &c).is_none() {
                    p = c;
                    break 'search;
                }
            }
        }
    }
    s.objects[id].position = p;
}
