//! Small 2D geometry kit: vectors, polygons and oriented rectangles.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

/// Tolerance used for boundary and collinearity tests.
pub const GEOM_EPS: f64 = 1e-9;

/// Serialized as a `[x, y]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Unit vector, or `None` for a (near) zero vector.
    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        (n > 1e-15).then(|| self * (1.0 / n))
    }

    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn rotated(self, theta: f64) -> Vec2 {
        let (s, c) = theta.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn distance(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl SubAssign for Vec2 {
    fn sub_assign(&mut self, o: Vec2) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Wraps an angle to (-π, π].
pub fn wrap_angle(theta: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut a = theta % two_pi;
    if a <= -std::f64::consts::PI {
        a += two_pi;
    } else if a > std::f64::consts::PI {
        a -= two_pi;
    }
    a
}

/// Where a point sits relative to a polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Inside,
    Boundary,
    Outside,
}

fn on_segment(p: Vec2, a: Vec2, b: Vec2) -> bool {
    let ab = b - a;
    let len = ab.norm();
    if len < GEOM_EPS {
        return p.distance(a) <= GEOM_EPS;
    }
    let dist = (p - a).cross(ab).abs() / len;
    if dist > GEOM_EPS {
        return false;
    }
    let t = (p - a).dot(ab) / (len * len);
    (-GEOM_EPS..=1.0 + GEOM_EPS).contains(&t)
}

/// Even-odd point-in-polygon test with explicit boundary detection.
pub fn point_in_polygon(p: Vec2, poly: &[Vec2]) -> Containment {
    let n = poly.len();
    if n < 3 {
        return Containment::Outside;
    }
    for i in 0..n {
        if on_segment(p, poly[i], poly[(i + 1) % n]) {
            return Containment::Boundary;
        }
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    if inside {
        Containment::Inside
    } else {
        Containment::Outside
    }
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - a)
}

/// True when closed segments `ab` and `cd` share at least one point.
pub fn segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > GEOM_EPS && d2 < -GEOM_EPS) || (d1 < -GEOM_EPS && d2 > GEOM_EPS))
        && ((d3 > GEOM_EPS && d4 < -GEOM_EPS) || (d3 < -GEOM_EPS && d4 > GEOM_EPS))
    {
        return true;
    }
    on_segment(a, c, d) || on_segment(b, c, d) || on_segment(c, a, b) || on_segment(d, a, b)
}

/// Simple polygon check: no two non-adjacent edges touch, no zero-length edges.
pub fn polygon_is_simple(poly: &[Vec2]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        if poly[i].distance(poly[(i + 1) % n]) < GEOM_EPS {
            return false;
        }
    }
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        for j in (i + 1)..n {
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

pub fn polygon_area(poly: &[Vec2]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        s += poly[i].cross(poly[(i + 1) % n]);
    }
    0.5 * s
}

pub fn polygon_centroid(poly: &[Vec2]) -> Vec2 {
    let n = poly.len();
    let a = polygon_area(poly);
    if a.abs() < GEOM_EPS {
        let sum = poly.iter().fold(Vec2::ZERO, |acc, p| acc + *p);
        return sum * (1.0 / n as f64);
    }
    let mut c = Vec2::ZERO;
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        let w = p.cross(q);
        c += (p + q) * w;
    }
    c * (1.0 / (6.0 * a))
}

/// Whether two polygons share a boundary segment of positive length.
pub fn polygons_share_edge(a: &[Vec2], b: &[Vec2]) -> bool {
    for i in 0..a.len() {
        let (p0, p1) = (a[i], a[(i + 1) % a.len()]);
        let dir = p1 - p0;
        let len = dir.norm();
        if len < GEOM_EPS {
            continue;
        }
        let u = dir * (1.0 / len);
        for j in 0..b.len() {
            let (q0, q1) = (b[j], b[(j + 1) % b.len()]);
            // collinear?
            if ((q0 - p0).cross(u)).abs() > GEOM_EPS || ((q1 - p0).cross(u)).abs() > GEOM_EPS {
                continue;
            }
            let (s0, s1) = ((q0 - p0).dot(u), (q1 - p0).dot(u));
            let (lo, hi) = (s0.min(s1), s0.max(s1));
            let overlap = hi.min(len) - lo.max(0.0);
            if overlap > GEOM_EPS {
                return true;
            }
        }
    }
    false
}

/// Rectangle with a center, half extents and a yaw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedRect {
    pub center: Vec2,
    pub half: Vec2,
    pub yaw: f64,
}

impl OrientedRect {
    pub fn to_local(&self, p: Vec2) -> Vec2 {
        (p - self.center).rotated(-self.yaw)
    }

    pub fn contains(&self, p: Vec2) -> bool {
        let l = self.to_local(p);
        l.x.abs() <= self.half.x && l.y.abs() <= self.half.y
    }

    /// Strict interior test (boundary excluded).
    pub fn contains_strict(&self, p: Vec2) -> bool {
        let l = self.to_local(p);
        l.x.abs() < self.half.x && l.y.abs() < self.half.y
    }

    pub fn inflated(&self, r: f64) -> OrientedRect {
        OrientedRect {
            half: Vec2::new(self.half.x + r, self.half.y + r),
            ..*self
        }
    }

    /// Distance from the center to the supporting line in direction `u`
    /// (support function of the rectangle).
    pub fn support_distance(&self, u: Vec2) -> f64 {
        let l = u.rotated(-self.yaw);
        self.half.x * l.x.abs() + self.half.y * l.y.abs()
    }

    /// Ray cast from `origin` along `dir` (not necessarily unit), returning the
    /// smallest parameter `s ∈ [0, 1]` at which the ray enters the rectangle,
    /// together with the world-space outward normal of the face that was hit.
    pub fn ray_entry(&self, origin: Vec2, dir: Vec2) -> Option<(f64, Vec2)> {
        let o = self.to_local(origin);
        let d = dir.rotated(-self.yaw);
        let mut t_enter = f64::NEG_INFINITY;
        let mut t_exit = f64::INFINITY;
        let mut normal = Vec2::ZERO;
        for (oc, dc, h, axis) in [
            (o.x, d.x, self.half.x, Vec2::new(1.0, 0.0)),
            (o.y, d.y, self.half.y, Vec2::new(0.0, 1.0)),
        ] {
            if dc.abs() < 1e-15 {
                if oc.abs() > h {
                    return None;
                }
                continue;
            }
            let t1 = (-h - oc) / dc;
            let t2 = (h - oc) / dc;
            let (tn, tf, n) = if t1 < t2 {
                (t1, t2, -axis)
            } else {
                (t2, t1, axis)
            };
            if tn > t_enter {
                t_enter = tn;
                normal = n;
            }
            t_exit = t_exit.min(tf);
        }
        if t_enter > t_exit || t_exit < 0.0 || !(0.0..=1.0).contains(&t_enter) {
            return None;
        }
        Some((t_enter, normal.rotated(self.yaw)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Vec2> {
        vec![
            Vec2::new(x0, y0),
            Vec2::new(x1, y0),
            Vec2::new(x1, y1),
            Vec2::new(x0, y1),
        ]
    }

    #[test]
    fn containment_cases() {
        let sq = square(0.0, 0.0, 2.0, 2.0);
        assert_eq!(
            point_in_polygon(Vec2::new(1.0, 1.0), &sq),
            Containment::Inside
        );
        assert_eq!(
            point_in_polygon(Vec2::new(2.0, 1.0), &sq),
            Containment::Boundary
        );
        assert_eq!(
            point_in_polygon(Vec2::new(0.0, 0.0), &sq),
            Containment::Boundary
        );
        assert_eq!(
            point_in_polygon(Vec2::new(3.0, 1.0), &sq),
            Containment::Outside
        );
    }

    #[test]
    fn bowtie_is_not_simple() {
        let bow = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 2.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(0.0, 2.0),
        ];
        assert!(!polygon_is_simple(&bow));
        assert!(polygon_is_simple(&square(0.0, 0.0, 1.0, 1.0)));
    }

    #[test]
    fn shared_edges() {
        let a = square(0.0, 0.0, 2.0, 2.0);
        let b = square(2.0, 1.0, 4.0, 3.0);
        let c = square(2.0, 2.0, 4.0, 4.0);
        assert!(polygons_share_edge(&a, &b));
        // corner contact only
        assert!(!polygons_share_edge(&a, &c));
    }

    #[test]
    fn ray_hits_rect_face() {
        let r = OrientedRect {
            center: Vec2::new(2.0, 0.0),
            half: Vec2::new(0.5, 1.0),
            yaw: 0.0,
        };
        let (s, n) = r.ray_entry(Vec2::ZERO, Vec2::new(3.0, 0.0)).unwrap();
        assert!((s - 0.5).abs() < 1e-12);
        assert!((n.x + 1.0).abs() < 1e-12);
        assert!(r.ray_entry(Vec2::ZERO, Vec2::new(1.0, 0.0)).is_none());
    }

    #[test]
    fn wrap_angle_range() {
        assert!((wrap_angle(3.0 * std::f64::consts::PI) - std::f64::consts::PI).abs() < 1e-12);
        assert!((wrap_angle(-0.5) + 0.5).abs() < 1e-15);
    }
}
