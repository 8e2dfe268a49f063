//! Convex domains and the geometric functionals the eigenvalue bounds consume.
//!
//! Everything here is an immutable value; constructors validate and every
//! accessor is a pure function.

mod cuboid;
mod polygon;
mod profile;
mod quermass;
mod rectilinear;
mod shape;

pub use cuboid::{AxisBc, Cuboid, Signature};
pub use polygon::{hausdorff_distance, ConvexPolygon};
pub use profile::{steiner_symmetrize, ProfileDomain};
pub use quermass::{quermass, steiner_inflate_volume, QuermassData};
pub use rectilinear::RectilinearPolygon;
pub use shape::{Ball, Shape};

pub type Point = [f64; 2];

/// Volume of the unit ball in R^d.
pub fn unit_ball_volume(d: usize) -> f64 {
    let mut w = if d % 2 == 0 { 1.0 } else { 2.0 };
    let mut j = if d % 2 == 0 { 2 } else { 3 };
    while j <= d {
        w *= 2.0 * std::f64::consts::PI / j as f64;
        j += 2;
    }
    w
}

/// Weyl constant W_d = 4π² ω_d^{-2/d}.
pub fn weyl_constant(d: usize) -> f64 {
    let pi = std::f64::consts::PI;
    4.0 * pi * pi * unit_ball_volume(d).powf(-2.0 / d as f64)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub(crate) fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

pub(crate) fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let dx = b[0] - a[0];
    let dy = b[1] - a[1];
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0);
    dist(p, [a[0] + t * dx, a[1] + t * dy])
}

pub(crate) fn shoelace(v: &[Point]) -> f64 {
    let n = v.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        s += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * s
}

pub(crate) fn closed_perimeter(v: &[Point]) -> f64 {
    let n = v.len();
    (0..n).map(|i| dist(v[i], v[(i + 1) % n])).sum()
}

pub(crate) fn all_pairs_diameter(v: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            d = d.max(dist(v[i], v[j]));
        }
    }
    d
}
