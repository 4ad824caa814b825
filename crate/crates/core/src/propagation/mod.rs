//! Simplified dominant-path propagation over a 2D obstacle map.
//!
//! Only one path per link is kept: either the straight line, charged with
//! the transmission loss of every wall it passes, or the shortest polyline
//! that bends around obstacle corners without passing any wall, charged with
//! a fixed penalty per corner. Obstacles are infinite-height prisms; heights
//! only enter through the 3D path length.

mod grid;
pub mod polygon;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::Position;
use crate::linkbudget::free_space_path_loss;
use polygon::{boundary_crossings, is_simple, offset_hull_corners, Vec2};

pub use grid::{coverage_grid, CoverageGrid, CoverageSetup, Execution, GridRegion};

pub const DEFAULT_WALL_LOSS_DB: f64 = 12.0;
pub const DEFAULT_DIFFRACTION_PENALTY_DB: f64 = 10.0;
pub const DEFAULT_MAX_DIFFRACTIONS: usize = 1;
/// Outward offset of corner candidates from the obstacle hull vertices.
pub const CORNER_OFFSET_M: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Obstacle {
    #[serde(default)]
    pub name: String,
    /// Horizontal outline as `[east, north]` pairs.
    pub footprint: Vec<[f64; 2]>,
    /// Loss per wall crossing, dB.
    #[serde(default = "default_wall_loss")]
    pub transmission_loss: f64,
}

fn default_wall_loss() -> f64 {
    DEFAULT_WALL_LOSS_DB
}

impl Obstacle {
    pub fn new(name: impl Into<String>, footprint: Vec<[f64; 2]>, transmission_loss: f64) -> Self {
        Self {
            name: name.into(),
            footprint,
            transmission_loss,
        }
    }

    /// Axis-aligned rectangle between two corners.
    pub fn rectangle(name: impl Into<String>, min: [f64; 2], max: [f64; 2], transmission_loss: f64) -> Self {
        Self::new(
            name,
            vec![min, [max[0], min[1]], max, [min[0], max[1]]],
            transmission_loss,
        )
    }

    fn ring(&self) -> Vec<Vec2> {
        self.footprint.iter().map(|p| Vec2::new(p[0], p[1])).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.footprint.len() < 3 {
            return Err(invalid(format!("obstacle {:?} needs at least 3 vertices", self.name)));
        }
        if self.footprint.iter().flatten().any(|c| !c.is_finite()) {
            return Err(invalid(format!("obstacle {:?} has non-finite vertices", self.name)));
        }
        if !(self.transmission_loss >= 0.0 && self.transmission_loss.is_finite()) {
            return Err(invalid(format!(
                "obstacle {:?} transmission_loss {} must be finite and non-negative",
                self.name, self.transmission_loss
            )));
        }
        if !is_simple(&self.ring()) {
            return Err(invalid(format!(
                "obstacle {:?} outline is not a simple polygon",
                self.name
            )));
        }
        Ok(())
    }
}

/// Tunables of the simplified dominant-path search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DominantPathParams {
    /// Loss added per corner on a bent path, dB.
    pub diffraction_penalty: f64,
    pub max_diffractions: usize,
}

impl Default for DominantPathParams {
    fn default() -> Self {
        Self {
            diffraction_penalty: DEFAULT_DIFFRACTION_PENALTY_DB,
            max_diffractions: DEFAULT_MAX_DIFFRACTIONS,
        }
    }
}

/// Immutable obstacle map with precomputed corner candidates.
#[derive(Debug, Clone)]
pub struct Environment {
    obstacles: Vec<Obstacle>,
    params: DominantPathParams,
    rings: Vec<Vec<Vec2>>,
    corners: Vec<Vec2>,
    /// Row-major corner-to-corner line of sight.
    corner_los: Vec<bool>,
}

impl PartialEq for Environment {
    fn eq(&self, other: &Self) -> bool {
        self.obstacles == other.obstacles && self.params == other.params
    }
}

impl Default for Environment {
    fn default() -> Self {
        Self::free_space()
    }
}

impl Environment {
    pub fn free_space() -> Self {
        Self::new(Vec::new(), DominantPathParams::default()).expect("empty environment is valid")
    }

    pub fn new(obstacles: Vec<Obstacle>, params: DominantPathParams) -> Result<Self> {
        if !(params.diffraction_penalty >= 0.0 && params.diffraction_penalty.is_finite()) {
            return Err(invalid(format!(
                "diffraction_penalty {} must be finite and non-negative",
                params.diffraction_penalty
            )));
        }
        for o in &obstacles {
            o.validate()?;
        }
        let rings: Vec<Vec<Vec2>> = obstacles.iter().map(Obstacle::ring).collect();
        let corners: Vec<Vec2> = rings
            .iter()
            .flat_map(|r| offset_hull_corners(r, CORNER_OFFSET_M))
            .collect();
        let mut env = Self {
            obstacles,
            params,
            rings,
            corners,
            corner_los: Vec::new(),
        };
        let n = env.corners.len();
        let mut los = vec![false; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let clear = env.clear_between(env.corners[i], env.corners[j]);
                los[i * n + j] = clear;
                los[j * n + i] = clear;
            }
        }
        env.corner_los = los;
        Ok(env)
    }

    pub fn obstacles(&self) -> &[Obstacle] {
        &self.obstacles
    }

    pub fn params(&self) -> DominantPathParams {
        self.params
    }

    /// Copy of this environment with obstacle `index` removed.
    pub fn without_obstacle(&self, index: usize) -> Result<Self> {
        let mut obstacles = self.obstacles.clone();
        if index >= obstacles.len() {
            return Err(invalid(format!("no obstacle at index {index}")));
        }
        obstacles.remove(index);
        Self::new(obstacles, self.params)
    }

    /// Corner candidates for bent paths, as ground positions.
    pub fn corner_candidates(&self) -> Vec<Position> {
        self.corners
            .iter()
            .map(|c| Position::with_height(c.x, c.y, 0.0))
            .collect()
    }

    fn crossings_2d(&self, a: Vec2, b: Vec2) -> Vec<(usize, usize)> {
        self.rings
            .iter()
            .enumerate()
            .filter_map(|(i, ring)| {
                let n = boundary_crossings(ring, a, b);
                (n > 0).then_some((i, n))
            })
            .collect()
    }

    fn clear_between(&self, a: Vec2, b: Vec2) -> bool {
        a != b && self.rings.iter().all(|ring| boundary_crossings(ring, a, b) == 0)
    }
}

/// For every obstacle the segment passes, its index and wall-crossing count.
pub fn los_crossings(env: &Environment, a: &Position, b: &Position) -> Result<Vec<(usize, usize)>> {
    if a.same_horizontal(b) {
        return Err(invalid(format!("segment {a} → {b} has no horizontal extent")));
    }
    Ok(env.crossings_2d(a.into(), b.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    Direct,
    Diffracted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathResult {
    pub kind: PathKind,
    /// Tx, corners, Rx.
    pub vertices: Vec<Position>,
    /// 3D length of the polyline, meters.
    pub length: f64,
    /// Wall or diffraction loss on top of free-space loss (PL_Div).
    pub excess_loss: f64,
    pub total_loss: f64,
}

impl PathResult {
    /// Free-space part of the loss (PL_FS).
    pub fn free_space_loss(&self) -> f64 {
        self.total_loss - self.excess_loss
    }

    pub fn corner_count(&self) -> usize {
        self.vertices.len() - 2
    }
}

fn length_3d(horizontal: f64, a: &Position, b: &Position) -> f64 {
    horizontal.hypot(b.height - a.height)
}

/// Lowest-loss path from `a` to `b` at frequency `f`.
pub fn dominant_path_loss(env: &Environment, a: &Position, b: &Position, f: f64) -> Result<PathResult> {
    if a.same_horizontal(b) {
        return Err(Error::DegenerateGeometry(format!(
            "path endpoints {a} and {b} coincide horizontally"
        )));
    }
    let direct_len = crate::geometry::distance(a, b);
    let direct_fs = free_space_path_loss(direct_len, f)?;
    let wall_loss: f64 = env
        .crossings_2d(a.into(), b.into())
        .iter()
        .map(|&(i, n)| n as f64 * env.obstacles[i].transmission_loss)
        .sum();
    let mut best = PathResult {
        kind: PathKind::Direct,
        vertices: vec![*a, *b],
        length: direct_len,
        excess_loss: wall_loss,
        total_loss: direct_fs + wall_loss,
    };
    if wall_loss == 0.0 || env.params.max_diffractions == 0 || env.corners.is_empty() {
        return Ok(best);
    }

    let (pa, pb) = (Vec2::from(a), Vec2::from(b));
    let n = env.corners.len();
    let from_a: Vec<Option<f64>> = env
        .corners
        .iter()
        .map(|&c| env.clear_between(pa, c).then(|| (c - pa).norm()))
        .collect();
    let to_b: Vec<Option<f64>> = env
        .corners
        .iter()
        .map(|&c| env.clear_between(c, pb).then(|| (pb - c).norm()))
        .collect();

    // reach[i] = shortest horizontal length a → … → corner i using exactly
    // `hops` corners, with predecessor links for path reconstruction.
    let mut reach = from_a.clone();
    let mut preds: Vec<Vec<Option<usize>>> = vec![vec![None; n]];
    for hops in 1..=env.params.max_diffractions {
        if hops > 1 {
            let mut next = vec![None; n];
            let mut pred = vec![None; n];
            for i in 0..n {
                for (j, lj) in reach.iter().enumerate() {
                    if i == j || !env.corner_los[j * n + i] {
                        continue;
                    }
                    if let Some(lj) = lj {
                        let cand = lj + (env.corners[i] - env.corners[j]).norm();
                        if next[i].is_none_or(|cur| cand < cur) {
                            next[i] = Some(cand);
                            pred[i] = Some(j);
                        }
                    }
                }
            }
            reach = next;
            preds.push(pred);
        }
        let mut finish: Option<(f64, usize)> = None;
        for i in 0..n {
            if let (Some(l), Some(tail)) = (reach[i], to_b[i]) {
                let total = l + tail;
                if finish.is_none_or(|(cur, _)| total < cur) {
                    finish = Some((total, i));
                }
            }
        }
        let Some((horizontal, last)) = finish else {
            continue;
        };
        let length = length_3d(horizontal, a, b);
        let excess = env.params.diffraction_penalty * hops as f64;
        let total = free_space_path_loss(length, f)? + excess;
        if total < best.total_loss {
            let mut chain = vec![last];
            for level in (1..hops).rev() {
                let prev = preds[level][*chain.last().unwrap()].expect("predecessor recorded");
                chain.push(prev);
            }
            chain.reverse();
            best = PathResult {
                kind: PathKind::Diffracted,
                vertices: polyline(a, b, chain.iter().map(|&i| env.corners[i])),
                length,
                excess_loss: excess,
                total_loss: total,
            };
        }
    }
    Ok(best)
}

/// Tx → corners → Rx with corner heights interpolated along the path.
fn polyline(a: &Position, b: &Position, corners: impl Iterator<Item = Vec2>) -> Vec<Position> {
    let mut pts: Vec<Vec2> = vec![a.into()];
    pts.extend(corners);
    pts.push(b.into());
    let total: f64 = pts.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
    let mut walked = 0.0;
    let mut out = vec![*a];
    for w in pts.windows(2).take(pts.len() - 2) {
        walked += (w[1] - w[0]).norm();
        let h = a.height + (b.height - a.height) * walked / total;
        out.push(Position::with_height(w[1].x, w[1].y, h));
    }
    out.push(*b);
    out
}
