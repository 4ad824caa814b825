//! 2D polygon primitives used by the line-of-sight tests.
//!
//! Polygon interiors are open sets: a segment that only touches a vertex or
//! slides along an edge never enters the obstacle.

use std::ops::{Add, Sub};

use crate::geometry::Position;

/// Distance under which a point counts as lying on a polygon boundary.
const BOUNDARY_TOL: f64 = 1e-9;
/// Parameter spacing below which two boundary hits are merged.
const PARAM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Sub for Vec2 {
    type Output = Vec2;

    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;

    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn scale(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn unit(self) -> Vec2 {
        self.scale(1.0 / self.norm())
    }
}

impl From<&Position> for Vec2 {
    fn from(p: &Position) -> Self {
        Vec2::new(p.east, p.north)
    }
}

/// Twice the signed area; positive for counter-clockwise rings.
pub fn signed_area2(poly: &[Vec2]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| poly[i].cross(poly[(i + 1) % n])).sum()
}

fn edges(poly: &[Vec2]) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
    let n = poly.len();
    (0..n).map(move |i| (poly[i], poly[(i + 1) % n]))
}

fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab.scale(t))).norm()
}

fn on_boundary(poly: &[Vec2], p: Vec2) -> bool {
    edges(poly).any(|(a, b)| point_segment_distance(p, a, b) <= BOUNDARY_TOL)
}

/// Even-odd containment with boundary points excluded.
pub fn strictly_inside(poly: &[Vec2], p: Vec2) -> bool {
    if on_boundary(poly, p) {
        return false;
    }
    let mut inside = false;
    for (a, b) in edges(poly) {
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Segment parameters in [0, 1] where `a→b` meets the polygon boundary.
fn boundary_hits(poly: &[Vec2], a: Vec2, b: Vec2) -> Vec<f64> {
    let d = b - a;
    let dlen2 = d.dot(d);
    let mut ts = vec![0.0, 1.0];
    for (p, q) in edges(poly) {
        let e = q - p;
        let denom = d.cross(e);
        let ap = p - a;
        if denom.abs() > 1e-12 * d.norm() * e.norm() {
            let t = ap.cross(e) / denom;
            let u = ap.cross(d) / denom;
            let slack = BOUNDARY_TOL / e.norm();
            if (-PARAM_TOL..=1.0 + PARAM_TOL).contains(&t) && u >= -slack && u <= 1.0 + slack {
                ts.push(t.clamp(0.0, 1.0));
            }
        } else if ap.cross(d).abs() <= BOUNDARY_TOL * d.norm() {
            // collinear overlap: both edge ends bound the shared stretch
            for v in [p, q] {
                let t = (v - a).dot(d) / dlen2;
                if (0.0..=1.0).contains(&t) {
                    ts.push(t);
                }
            }
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|x, y| (*x - *y).abs() <= PARAM_TOL);
    ts
}

/// Number of times segment `a→b` passes between the polygon's open interior
/// and its exterior.
pub fn boundary_crossings(poly: &[Vec2], a: Vec2, b: Vec2) -> usize {
    let ts = boundary_hits(poly, a, b);
    let d = b - a;
    let mut crossings = 0;
    let mut prev: Option<bool> = None;
    for w in ts.windows(2) {
        let mid = a + d.scale(0.5 * (w[0] + w[1]));
        let inside = strictly_inside(poly, mid);
        if let Some(p) = prev {
            if p != inside {
                crossings += 1;
            }
        }
        prev = Some(inside);
    }
    crossings
}

fn segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let o1 = (b - a).cross(c - a);
    let o2 = (b - a).cross(d - a);
    let o3 = (d - c).cross(a - c);
    let o4 = (d - c).cross(b - c);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    let on = |p: Vec2, q: Vec2, r: Vec2, o: f64| {
        o == 0.0 && r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    on(a, b, c, o1) || on(a, b, d, o2) || on(c, d, a, o3) || on(c, d, b, o4)
}

/// True when no two non-adjacent edges touch and no vertex repeats.
pub fn is_simple(poly: &[Vec2]) -> bool {
    let n = poly.len();
    if n < 3 || signed_area2(poly) == 0.0 {
        return false;
    }
    for i in 0..n {
        for j in i + 1..n {
            if poly[i] == poly[j] {
                return false;
            }
        }
    }
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            let (c, d) = (poly[j], poly[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

/// Convex hull in counter-clockwise order without collinear points
/// (monotone chain).
pub fn convex_hull(points: &[Vec2]) -> Vec<Vec2> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Vec2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Vec2>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                if (b - a).cross(p - a) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Hull vertices pushed `offset` meters outward along their angle bisector.
pub fn offset_hull_corners(points: &[Vec2], offset: f64) -> Vec<Vec2> {
    let hull = convex_hull(points);
    let n = hull.len();
    if n < 3 {
        return hull;
    }
    (0..n)
        .map(|i| {
            let v = hull[i];
            let to_prev = (hull[(i + n - 1) % n] - v).unit();
            let to_next = (hull[(i + 1) % n] - v).unit();
            let outward = (to_prev + to_next).scale(-1.0).unit();
            v + outward.scale(offset)
        })
        .collect()
}
