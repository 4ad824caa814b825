//! Independent reference implementations shared by the integration suites.
#![allow(dead_code)]

use rand::Rng;
use v2x_beam::geometry::Position;
use v2x_beam::linkbudget::free_space_path_loss;
use v2x_beam::propagation::{los_crossings, DominantPathParams, Environment, Obstacle};

/// Exhaustive dominant-path search: the direct path plus every ordered
/// sequence of distinct corner candidates up to `max_corners` long whose legs
/// all have clear line of sight.
pub fn brute_force_loss(env: &Environment, a: &Position, b: &Position, f: f64) -> f64 {
    let direct = {
        let d = v2x_beam::geometry::distance(a, b);
        let walls: f64 = los_crossings(env, a, b)
            .unwrap()
            .iter()
            .map(|&(i, n)| n as f64 * env.obstacles()[i].transmission_loss)
            .sum();
        free_space_path_loss(d, f).unwrap() + walls
    };
    let corners = env.corner_candidates();
    let params = env.params();
    let mut best = direct;
    let mut seq = Vec::new();
    extend(env, a, b, f, &corners, params, &mut seq, &mut best);
    best
}

fn clear(env: &Environment, p: &Position, q: &Position) -> bool {
    !p.same_horizontal(q) && los_crossings(env, p, q).map(|c| c.is_empty()).unwrap_or(false)
}

#[allow(clippy::too_many_arguments)]
fn extend(
    env: &Environment,
    a: &Position,
    b: &Position,
    f: f64,
    corners: &[Position],
    params: DominantPathParams,
    seq: &mut Vec<usize>,
    best: &mut f64,
) {
    if !seq.is_empty() {
        let mut pts = vec![*a];
        pts.extend(seq.iter().map(|&i| corners[i]));
        pts.push(*b);
        if pts.windows(2).all(|w| clear(env, &w[0], &w[1])) {
            let horizontal: f64 = pts.windows(2).map(|w| w[0].horizontal_distance(&w[1])).sum();
            let length = horizontal.hypot(b.height - a.height);
            let loss = free_space_path_loss(length, f).unwrap() + params.diffraction_penalty * seq.len() as f64;
            if loss < *best {
                *best = loss;
            }
        }
    }
    if seq.len() == params.max_diffractions {
        return;
    }
    for i in 0..corners.len() {
        if seq.contains(&i) {
            continue;
        }
        seq.push(i);
        extend(env, a, b, f, corners, params, seq, best);
        seq.pop();
    }
}

/// Random convex obstacle: a rotated rectangle or a triangle.
pub fn random_convex_obstacle<R: Rng>(rng: &mut R, name: &str) -> Obstacle {
    let cx = rng.gen_range(-40.0..40.0);
    let cy = rng.gen_range(-40.0..40.0);
    let rot: f64 = rng.gen_range(0.0..std::f64::consts::PI);
    let loss = if rng.gen_bool(0.5) {
        rng.gen_range(0.0..30.0)
    } else {
        rng.gen_range(100.0..300.0)
    };
    let local: Vec<(f64, f64)> = if rng.gen_bool(0.5) {
        let w = rng.gen_range(1.0..25.0);
        let h = rng.gen_range(0.5..25.0);
        vec![(-w, -h), (w, -h), (w, h), (-w, h)]
    } else {
        let r = rng.gen_range(3.0..20.0);
        let a0: f64 = rng.gen_range(0.0..2.0);
        let a1 = a0 + rng.gen_range(1.0..2.5);
        let a2 = a1 + rng.gen_range(1.0..2.5);
        vec![
            (r * a0.cos(), r * a0.sin()),
            (r * a1.cos(), r * a1.sin()),
            (r * a2.cos(), r * a2.sin()),
        ]
    };
    let (s, c) = rot.sin_cos();
    let footprint = local
        .iter()
        .map(|&(x, y)| [cx + c * x - s * y, cy + s * x + c * y])
        .collect();
    Obstacle::new(name, footprint, loss)
}

pub fn random_environment<R: Rng>(rng: &mut R, max_diffractions: usize) -> Environment {
    let count = rng.gen_range(0..=2);
    let obstacles = (0..count)
        .map(|i| random_convex_obstacle(rng, &format!("o{i}")))
        .collect();
    let params = DominantPathParams {
        diffraction_penalty: rng.gen_range(0.0..20.0),
        max_diffractions,
    };
    Environment::new(obstacles, params).expect("convex obstacles are valid")
}

pub fn random_endpoint<R: Rng>(rng: &mut R) -> Position {
    Position::with_height(
        rng.gen_range(-80.0..80.0),
        rng.gen_range(-80.0..80.0),
        rng.gen_range(0.5..3.0),
    )
}

/// Proper-intersection count of segment a→b with a polygon ring, using only
/// orientation signs. Valid when the segment avoids vertices.
pub fn proper_crossings(ring: &[[f64; 2]], a: [f64; 2], b: [f64; 2]) -> usize {
    let orient = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
    let n = ring.len();
    (0..n)
        .filter(|&i| {
            let (p, q) = (ring[i], ring[(i + 1) % n]);
            let d1 = orient(a, b, p);
            let d2 = orient(a, b, q);
            let d3 = orient(p, q, a);
            let d4 = orient(p, q, b);
            d1 * d2 < 0.0 && d3 * d4 < 0.0
        })
        .count()
}
