use rand::seq::SliceRandom;
use rand::Rng;

use crate::attributes::{Color, Shape};
use crate::config::EpisodeConfig;
use crate::instructor::{scenario_feasible, ScenarioKind};
use crate::world::{horizontal_distance, Backend, ObjectState, SceneState, Vec3};

use super::EnvError;

/// Scene attempts before giving up.
pub const MAX_SAMPLING_ATTEMPTS: usize = 1000;

/// Number of attributes two objects have in common.
pub fn shared_properties(a: (Color, Shape), b: (Color, Shape)) -> usize {
    usize::from(a.0 == b.0) + usize::from(a.1 == b.1)
}

/// A sampled scene and the object the instructor means.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledScene {
    pub scene: SceneState,
    pub intended: usize,
}

fn random_attributes<R: Rng + ?Sized>(rng: &mut R) -> (Color, Shape) {
    (*Color::ALL.choose(rng).unwrap(), *Shape::ALL.choose(rng).unwrap())
}

fn sample_attributes<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Option<Vec<(Color, Shape)>> {
    let goal = random_attributes(rng);
    let mut attrs = vec![goal];
    for _ in 0..MAX_SAMPLING_ATTEMPTS {
        if attrs.len() == n {
            return Some(attrs);
        }
        let cand = random_attributes(rng);
        if shared_properties(cand, goal) <= 1 && !attrs.contains(&cand) {
            attrs.push(cand);
        }
    }
    (attrs.len() == n).then_some(attrs)
}

fn sample_positions<R: Rng + ?Sized>(n: usize, cfg: &EpisodeConfig, rng: &mut R) -> Option<Vec<Vec3>> {
    let w = &cfg.world;
    for _ in 0..MAX_SAMPLING_ATTEMPTS {
        let mut out: Vec<Vec3> = Vec::with_capacity(n);
        for _ in 0..n {
            let p = match cfg.backend {
                Backend::Continuous => {
                    let r = w.table_half_size - w.spawn_margin;
                    [rng.gen_range(-r..=r), rng.gen_range(-r..=r), w.object_half_extent]
                }
                Backend::Grid => {
                    let g = w.grid_size;
                    [rng.gen_range(0..g) as f64, rng.gen_range(0..g) as f64, 0.0]
                }
            };
            out.push(p);
        }
        if positions_valid(&out, cfg) {
            return Some(out);
        }
    }
    None
}

/// Continuous: pairwise separation. Grid: Chebyshev distance of at least
/// 2 between objects and no object on the agent's start cell.
pub fn positions_valid(ps: &[Vec3], cfg: &EpisodeConfig) -> bool {
    let w = &cfg.world;
    let pairs = ps.iter().enumerate().flat_map(|(i, a)| ps[i + 1..].iter().map(move |b| (a, b)));
    match cfg.backend {
        Backend::Continuous => pairs.into_iter().all(|(a, b)| horizontal_distance(a, b) >= w.min_object_separation),
        Backend::Grid => {
            let start = [w.grid_start[0] as f64, w.grid_start[1] as f64];
            ps.iter().all(|p| p[0] != start[0] || p[1] != start[1])
                && pairs.into_iter().all(|(a, b)| (a[0] - b[0]).abs().max((a[1] - b[1]).abs()) >= 2.0)
        }
    }
}

/// Rejection-samples a scene supporting `kind`. The goal object's
/// attributes are uniform; distractors share at most one property with it.
pub fn sample_scene<R: Rng + ?Sized>(
    cfg: &EpisodeConfig,
    kind: ScenarioKind,
    rng: &mut R,
) -> Result<SampledScene, EnvError> {
    let n = cfg.num_objects;
    for _ in 0..MAX_SAMPLING_ATTEMPTS {
        let Some(attrs) = sample_attributes(n, rng) else { continue };
        let Some(positions) = sample_positions(n, cfg, rng) else { continue };
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let half_extent = match cfg.backend {
            Backend::Continuous => cfg.world.object_half_extent,
            Backend::Grid => 0.5,
        };
        let objects = order
            .iter()
            .enumerate()
            .map(|(id, &k)| ObjectState {
                id,
                color: attrs[k].0,
                shape: attrs[k].1,
                position: positions[id],
                start_position: positions[id],
                half_extent,
                attached: false,
            })
            .collect();
        let intended = order.iter().position(|&k| k == 0).expect("goal object present");
        let scene = SceneState::new(cfg.backend, &cfg.world, objects);
        if scenario_feasible(&scene, intended, kind, cfg.mode) {
            return Ok(SampledScene { scene, intended });
        }
    }
    Err(EnvError::Sampling {
        kind,
        attempts: MAX_SAMPLING_ATTEMPTS,
    })
}
