//! Small planar geometry helpers.

use nalgebra::Vector2;

pub type Point = Vector2<f64>;

#[inline]
pub fn cross(a: &Point, b: &Point) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Signed area of the triangle (a, b, c), positive when counter-clockwise.
#[inline]
pub fn triangle_area(a: &Point, b: &Point, c: &Point) -> f64 {
    0.5 * cross(&(b - a), &(c - a))
}

/// Signed area (shoelace formula).
pub fn polygon_area(pts: &[Point]) -> f64 {
    let n = pts.len();
    let mut s = 0.0;
    for i in 0..n {
        s += cross(&pts[i], &pts[(i + 1) % n]);
    }
    0.5 * s
}

/// Area centroid of a simple polygon with nonzero area.
pub fn polygon_centroid(pts: &[Point]) -> Point {
    let n = pts.len();
    let a = polygon_area(pts);
    let mut c = Point::zeros();
    for i in 0..n {
        let p = &pts[i];
        let q = &pts[(i + 1) % n];
        c += (p + q) * cross(p, q);
    }
    c / (6.0 * a)
}

/// Rotation by +90 degrees.
#[inline]
pub fn perp_left(v: &Point) -> Point {
    Point::new(-v.y, v.x)
}

/// Rotation by −90 degrees.
#[inline]
pub fn perp_right(v: &Point) -> Point {
    Point::new(v.y, -v.x)
}

/// Intersection parameters `(s, t)` with `p + s (q − p) = a + t (b − a)`.
pub fn segment_params(p: &Point, q: &Point, a: &Point, b: &Point) -> Option<(f64, f64)> {
    let d1 = q - p;
    let d2 = b - a;
    let den = cross(&d1, &d2);
    if den.abs() < 1e-300 {
        return None;
    }
    let w = a - p;
    let s = cross(&w, &d2) / den;
    let t = cross(&w, &d1) / den;
    Some((s, t))
}

/// Proper intersection test for two closed segments, ignoring shared endpoints.
pub fn segments_cross(p: &Point, q: &Point, a: &Point, b: &Point) -> bool {
    match segment_params(p, q, a, b) {
        Some((s, t)) => {
            let eps = 1e-12;
            s > eps && s < 1.0 - eps && t > eps && t < 1.0 - eps
        }
        None => false,
    }
}
