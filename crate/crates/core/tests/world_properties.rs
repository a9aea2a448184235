mod common;

use proptest::prelude::*;
use repairbench::agents::Controller;
use repairbench::world::{
    apply_action, detect_interaction, distance, evaluate_condition, horizontal_distance, no_object_overlap, Action,
    SceneState, WorldConfig,
};
use repairbench::{Color, Shape, Task};

fn three_objects() -> SceneState {
    common::row_scene(&[(Color::Green, Shape::Cube), (Color::Green, Shape::Cuboid), (Color::Red, Shape::Cube)])
}

fn action() -> impl Strategy<Value = [f64; 4]> {
    [-0.08f64..0.08, -0.08f64..0.08, -0.08f64..0.08, -1.5f64..1.5]
}

/// Gripper disc against object footprints, for objects the gripper is
/// level with.
fn gripper_penetrates(s: &SceneState, cfg: &WorldConfig) -> bool {
    let g = s.gripper.position;
    s.objects.iter().any(|o| {
        let held = s.hold.as_ref().is_some_and(|h| h.object == o.id);
        !held
            && g[2] < o.position[2] + o.half_extent - 1e-6
            && horizontal_distance(&g, &o.position) < cfg.contact_distance() - 1e-6
    })
}

fn in_bounds(s: &SceneState, cfg: &WorldConfig) -> bool {
    let t = cfg.table_half_size + 1e-9;
    let g = s.gripper.position;
    g[0].abs() <= t
        && g[1].abs() <= t
        && g[2] >= -1e-9
        && g[2] <= cfg.workspace_height + 1e-9
        && s.objects.iter().all(|o| {
            o.position[0].abs() <= cfg.object_bound() + 1e-6
                && o.position[1].abs() <= cfg.object_bound() + 1e-6
                && o.position[2] >= o.half_extent - 1e-9
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn random_trajectories_stay_valid(actions in proptest::collection::vec(action(), 1..60)) {
        let cfg = WorldConfig::default();
        let mut s = three_objects();
        for a in &actions {
            s = apply_action(&s, Action::Continuous(*a), &cfg);
            prop_assert!(no_object_overlap(&s));
            prop_assert!(!gripper_penetrates(&s, &cfg));
            prop_assert!(in_bounds(&s, &cfg));
            prop_assert!(s.objects.iter().filter(|o| o.attached).count() <= 1);
            prop_assert!((0.0..=1.0).contains(&s.gripper.finger_opening));
        }
    }

    #[test]
    fn trajectories_are_deterministic(actions in proptest::collection::vec(action(), 1..40)) {
        let cfg = WorldConfig::default();
        let run = || actions.iter().fold(three_objects(), |s, a| apply_action(&s, Action::Continuous(*a), &cfg));
        let (a, b) = (run(), run());
        prop_assert_eq!(format!("{a:?}"), format!("{b:?}"));
        for (x, y) in a.objects.iter().zip(&b.objects) {
            for k in 0..3 {
                prop_assert_eq!(x.position[k].to_bits(), y.position[k].to_bits());
            }
        }
    }

    #[test]
    fn low_sweeps_push_without_penetration(dir in 0.0f64..std::f64::consts::TAU, steps in 1usize..12) {
        let cfg = WorldConfig::default();
        let mut s = three_objects();
        let o = s.objects[1].position;
        s.gripper.position = [o[0] - 0.06 * dir.cos(), o[1] - 0.06 * dir.sin(), cfg.object_half_extent];
        for _ in 0..steps {
            s = apply_action(&s, Action::Continuous([0.05 * dir.cos(), 0.05 * dir.sin(), 0.0, 0.0]), &cfg);
            prop_assert!(no_object_overlap(&s));
            prop_assert!(!gripper_penetrates(&s, &cfg));
            prop_assert!(in_bounds(&s, &cfg));
        }
    }

    #[test]
    fn reach_flips_once_along_a_straight_line(x in -0.2f64..0.2, y in -0.2f64..0.2, z in 0.06f64..0.3) {
        let cfg = WorldConfig::default();
        let mut s = common::row_scene(&[(Color::Blue, Shape::Cylinder)]);
        s.gripper.position = [x, y, z];
        let target = s.objects[0].position;
        let top = [target[0], target[1], cfg.object_top()];
        prop_assume!(distance(&s.gripper.position, &target) > cfg.reach_threshold);
        let mut flips = 0;
        let mut prev = evaluate_condition(&s, 0, Task::Reach, &cfg).unwrap();
        for _ in 0..40 {
            let g = s.gripper.position;
            let d = [top[0] - g[0], top[1] - g[1], top[2] - g[2]];
            let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            let k = if n > 0.02 { 0.02 / n } else { 1.0 };
            s = apply_action(&s, Action::Continuous([d[0] * k, d[1] * k, d[2] * k, 0.0]), &cfg);
            let now = evaluate_condition(&s, 0, Task::Reach, &cfg).unwrap();
            flips += usize::from(now != prev);
            prev = now;
        }
        prop_assert!(prev);
        prop_assert_eq!(flips, 1);
    }
}

#[test]
fn free_motion_is_exact() {
    let cfg = WorldConfig::default();
    let s = three_objects();
    let n = apply_action(&s, Action::Continuous([0.05, 0.0, 0.0, 0.0]), &cfg);
    assert_eq!(n.gripper.position[0], s.gripper.position[0] + 0.05);
    assert_eq!(n.objects, s.objects);
}

#[test]
fn lift_flips_exactly_at_threshold() {
    let cfg = WorldConfig::default();
    let mut s = three_objects();
    let mut ctl = Controller::new();
    let mut prev_z = f64::NEG_INFINITY;
    for _ in 0..60 {
        let before = evaluate_condition(&s, 2, Task::Lift, &cfg).unwrap();
        let z = s.objects[2].position[2];
        assert_eq!(before, s.objects[2].attached && z >= cfg.lift_height);
        if before {
            assert!(prev_z < cfg.lift_height);
            return;
        }
        prev_z = z;
        s = apply_action(&s, ctl.act(&s, Task::Lift, &cfg, Some(2)), &cfg);
    }
    panic!("lift never reached");
}

#[test]
fn detection_ties_go_to_lowest_id() {
    let cfg = WorldConfig::default();
    let objects = vec![
        common::object_state(0, Color::Red, Shape::Cube, 0.0, 0.03, &cfg),
        common::object_state(1, Color::Blue, Shape::Cube, 0.0, -0.03, &cfg),
    ];
    let mut s = SceneState::new(repairbench::world::Backend::Continuous, &cfg, objects);
    assert_eq!(detect_interaction(&s, Task::Reach, &cfg), None);
    s.gripper.position = [0.0, 0.0, 0.06];
    assert!(distance(&s.gripper.position, &s.objects[1].position) < cfg.reach_threshold);
    assert_eq!(detect_interaction(&s, Task::Reach, &cfg), Some(0));
    s.gripper.position = [0.0, -0.03, 0.07];
    assert_eq!(detect_interaction(&s, Task::Reach, &cfg), Some(1));
}

#[test]
fn push_needs_ten_centimetres() {
    let cfg = WorldConfig::default();
    let mut s = three_objects();
    assert!(!evaluate_condition(&s, 1, Task::Push, &cfg).unwrap());
    s.objects[1].position[0] += 0.0999;
    assert!(!evaluate_condition(&s, 1, Task::Push, &cfg).unwrap());
    s.objects[1].position[0] += 0.0002;
    assert!(evaluate_condition(&s, 1, Task::Push, &cfg).unwrap());
}
