use serde::{Deserialize, Serialize};

use super::{all_pairs_diameter, closed_perimeter, cross, dist, point_segment_distance, shoelace, Point};
use crate::error::{invalid, Result};

/// Strictly convex polygon, vertices counter-clockwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

impl ConvexPolygon {
    /// Validates and normalizes a vertex loop. Clockwise input is reversed;
    /// duplicate and collinear vertices within 1e-12·diameter are dropped.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return invalid("polygon vertex is not finite");
        }
        if vertices.len() < 3 {
            return invalid("polygon needs at least 3 vertices");
        }
        let diam = all_pairs_diameter(&vertices);
        if diam == 0.0 {
            return invalid("polygon has zero extent");
        }
        let mut v = prune(vertices, 1e-12 * diam);
        if v.len() < 3 {
            return invalid("polygon is degenerate after collinear pruning");
        }
        if shoelace(&v) < 0.0 {
            v.reverse();
        }
        let n = v.len();
        let mut turning = 0.0;
        for i in 0..n {
            let a = v[(i + n - 1) % n];
            let b = v[i];
            let c = v[(i + 1) % n];
            if cross(a, b, c) <= 0.0 {
                return invalid(format!("polygon is not strictly convex at vertex {i}"));
            }
            let t1 = (b[1] - a[1]).atan2(b[0] - a[0]);
            let t2 = (c[1] - b[1]).atan2(c[0] - b[0]);
            let mut turn = t2 - t1;
            while turn <= -std::f64::consts::PI {
                turn += 2.0 * std::f64::consts::PI;
            }
            while turn > std::f64::consts::PI {
                turn -= 2.0 * std::f64::consts::PI;
            }
            turning += turn;
        }
        if (turning - 2.0 * std::f64::consts::PI).abs() > 1e-6 {
            return invalid("polygon winds more than once");
        }
        Ok(ConvexPolygon { vertices: v })
    }

    pub fn regular(n: usize, circumradius: f64) -> Result<Self> {
        if n < 3 {
            return invalid("regular polygon needs n >= 3");
        }
        let v = (0..n)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                [circumradius * t.cos(), circumradius * t.sin()]
            })
            .collect();
        ConvexPolygon::new(v)
    }

    pub fn rectangle(w: f64, h: f64) -> Result<Self> {
        ConvexPolygon::new(vec![[0.0, 0.0], [w, 0.0], [w, h], [0.0, h]])
    }

    /// Convex hull (Andrew's monotone chain) of a point cloud.
    pub fn hull(points: &[Point]) -> Result<Self> {
        let mut p: Vec<Point> = points.to_vec();
        p.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        p.dedup();
        if p.len() < 3 {
            return invalid("hull needs 3 distinct points");
        }
        let mut lower: Vec<Point> = Vec::new();
        for &q in &p {
            while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], q) <= 0.0 {
                lower.pop();
            }
            lower.push(q);
        }
        let mut upper: Vec<Point> = Vec::new();
        for &q in p.iter().rev() {
            while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], q) <= 0.0 {
                upper.pop();
            }
            upper.push(q);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        ConvexPolygon::new(lower)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        closed_perimeter(&self.vertices)
    }

    /// Rotating calipers over antipodal vertex pairs.
    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        let mut j = 1;
        let mut best: f64 = 0.0;
        for i in 0..n {
            let a = v[i];
            let b = v[(i + 1) % n];
            while cross(a, b, v[(j + 1) % n]) > cross(a, b, v[j]) {
                j = (j + 1) % n;
            }
            best = best.max(dist(a, v[j])).max(dist(b, v[j]));
        }
        best
    }

    pub fn centroid(&self) -> Point {
        let v = &self.vertices;
        let n = v.len();
        let (mut cx, mut cy, mut a2) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let p = v[i];
            let q = v[(i + 1) % n];
            let c = p[0] * q[1] - q[0] * p[1];
            cx += (p[0] + q[0]) * c;
            cy += (p[1] + q[1]) * c;
            a2 += c;
        }
        [cx / (3.0 * a2), cy / (3.0 * a2)]
    }

    pub fn translated(&self, t: Point) -> ConvexPolygon {
        ConvexPolygon { vertices: self.vertices.iter().map(|p| [p[0] + t[0], p[1] + t[1]]).collect() }
    }

    pub fn rotated(&self, angle: f64) -> ConvexPolygon {
        let (s, c) = angle.sin_cos();
        ConvexPolygon {
            vertices: self.vertices.iter().map(|p| [c * p[0] - s * p[1], s * p[0] + c * p[1]]).collect(),
        }
    }

    pub fn scaled(&self, t: f64) -> ConvexPolygon {
        assert!(t > 0.0 && t.is_finite());
        ConvexPolygon { vertices: self.vertices.iter().map(|p| [t * p[0], t * p[1]]).collect() }
    }

    pub fn contains_point(&self, p: Point, tol: f64) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            cross(a, b, p) >= -tol * dist(a, b)
        })
    }

    pub fn contains_polygon(&self, other: &ConvexPolygon, tol: f64) -> bool {
        other.vertices.iter().all(|&p| self.contains_point(p, tol))
    }

    /// Distance from `p` to the closed polygon (zero inside).
    pub fn distance_to(&self, p: Point) -> f64 {
        if self.contains_point(p, 0.0) {
            return 0.0;
        }
        self.boundary_distance(p)
    }

    pub fn boundary_distance(&self, p: Point) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| point_segment_distance(p, self.vertices[i], self.vertices[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }
}

fn prune(mut v: Vec<Point>, tol: f64) -> Vec<Point> {
    loop {
        let n = v.len();
        if n < 3 {
            return v;
        }
        let mut removed = None;
        for i in 0..n {
            let a = v[(i + n - 1) % n];
            let b = v[i];
            let c = v[(i + 1) % n];
            if dist(a, b) <= tol || point_segment_distance(b, a, c) <= tol {
                removed = Some(i);
                break;
            }
            let ac = dist(a, c);
            if ac > 0.0 && (cross(a, b, c) / ac).abs() <= tol {
                removed = Some(i);
                break;
            }
        }
        match removed {
            Some(i) => {
                v.remove(i);
            }
            None => return v,
        }
    }
}

impl<'de> Deserialize<'de> for ConvexPolygon {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            vertices: Vec<Point>,
        }
        let r = Raw::deserialize(de)?;
        ConvexPolygon::new(r.vertices).map_err(serde::de::Error::custom)
    }
}

/// Hausdorff distance between two convex polygons.
///
/// For convex B the map x -> dist(x, B) is convex, so each directed distance
/// is attained at a vertex of the other polygon.
pub fn hausdorff_distance(a: &ConvexPolygon, b: &ConvexPolygon) -> f64 {
    let ab = a.vertices.iter().map(|&p| b.distance_to(p)).fold(0.0, f64::max);
    let ba = b.vertices.iter().map(|&p| a.distance_to(p)).fold(0.0, f64::max);
    ab.max(ba)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> ConvexPolygon {
        ConvexPolygon::rectangle(1.0, 1.0).unwrap()
    }

    /// Directed sup-inf distance by sampling the boundary of `a` densely.
    fn sampled_directed(a: &ConvexPolygon, b: &ConvexPolygon, samples: usize) -> f64 {
        let v = a.vertices();
        let per = a.perimeter();
        let n = v.len();
        let mut best: f64 = 0.0;
        for s in 0..samples {
            let mut t = per * s as f64 / samples as f64;
            for i in 0..n {
                let p = v[i];
                let q = v[(i + 1) % n];
                let l = dist(p, q);
                if t <= l {
                    let x = [p[0] + (q[0] - p[0]) * t / l, p[1] + (q[1] - p[1]) * t / l];
                    best = best.max(b.distance_to(x));
                    break;
                }
                t -= l;
            }
        }
        best
    }

    #[test]
    fn rejects_nonconvex_and_degenerate() {
        assert!(ConvexPolygon::new(vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
        assert!(ConvexPolygon::new(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).is_err());
        let dart = vec![[0.0, 0.0], [2.0, 0.0], [1.0, 0.3], [1.0, 2.0]];
        assert!(ConvexPolygon::new(dart).is_err());
        let star: Vec<Point> = (0..5)
            .map(|i| {
                let t = 4.0 * std::f64::consts::PI * i as f64 / 5.0;
                [t.cos(), t.sin()]
            })
            .collect();
        assert!(ConvexPolygon::new(star).is_err());
    }

    #[test]
    fn prunes_collinear_and_reorients() {
        let p = ConvexPolygon::new(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.5], [1.0, 0.0]]).unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.area() > 0.0);
        assert!((p.area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hausdorff_basic_cases() {
        let s = unit_square();
        assert_eq!(hausdorff_distance(&s, &s), 0.0);
        let t = 0.37;
        assert!((hausdorff_distance(&s, &s.translated([t, 0.0])) - t).abs() < 1e-15);
    }

    #[test]
    fn hausdorff_concentric_square_matches_sampling() {
        let eps = 0.05;
        let s = unit_square();
        let big = ConvexPolygon::rectangle(1.0 + 2.0 * eps, 1.0 + 2.0 * eps).unwrap().translated([-eps, -eps]);
        let exact = hausdorff_distance(&s, &big);
        let sampled = sampled_directed(&s, &big, 10_000).max(sampled_directed(&big, &s, 10_000));
        assert!((exact - eps * 2f64.sqrt()).abs() < 1e-14);
        assert!((exact - sampled).abs() < 1e-9);
    }

    #[test]
    fn hexagon_area_and_perimeter() {
        // Side 1/6 gives perimeter 1 and area (3√3/2)(1/6)^2 = √3/24.
        let h = ConvexPolygon::regular(6, 1.0 / 6.0).unwrap();
        assert!((h.perimeter() - 1.0).abs() < 1e-14);
        assert!((h.area() - 3f64.sqrt() / 24.0).abs() < 1e-15);
    }

    #[test]
    fn calipers_match_all_pairs() {
        for n in 3..40 {
            let p = ConvexPolygon::regular(n, 1.3).unwrap().rotated(0.1 * n as f64);
            assert!((p.diameter() - all_pairs_diameter(p.vertices())).abs() < 1e-14);
        }
        assert!((unit_square().diameter() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn hull_of_square_with_interior_points() {
        let pts = vec![[0.0, 0.0], [1.0, 0.0], [0.5, 0.5], [1.0, 1.0], [0.2, 0.7], [0.0, 1.0]];
        let h = ConvexPolygon::hull(&pts).unwrap();
        assert_eq!(h.len(), 4);
        assert!((h.area() - 1.0).abs() < 1e-15);
    }
}
