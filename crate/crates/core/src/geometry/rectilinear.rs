use serde::{Deserialize, Serialize};

use super::{closed_perimeter, shoelace, Point};
use crate::error::{invalid, Result};

/// Simple polygon with axis-parallel edges (radiator domains and the like).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RectilinearPolygon {
    vertices: Vec<Point>,
}

impl RectilinearPolygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let mut v = vertices;
        if v.len() < 4 {
            return invalid("rectilinear polygon needs at least 4 vertices");
        }
        if v.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return invalid("vertex is not finite");
        }
        let n = v.len();
        for i in 0..n {
            let a = v[i];
            let b = v[(i + 1) % n];
            let horizontal = a[1] == b[1] && a[0] != b[0];
            let vertical = a[0] == b[0] && a[1] != b[1];
            if !(horizontal || vertical) {
                return invalid(format!("edge {i} is not axis-parallel"));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                if segments_touch(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                    return invalid(format!("edges {i} and {j} intersect"));
                }
            }
        }
        if shoelace(&v) < 0.0 {
            v.reverse();
        }
        Ok(RectilinearPolygon { vertices: v })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        closed_perimeter(&self.vertices)
    }

    pub fn contains_point(&self, p: Point) -> bool {
        let v = &self.vertices;
        let n = v.len();
        let mut inside = false;
        for i in 0..n {
            let a = v[i];
            let b = v[(i + 1) % n];
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

fn segments_touch(a: Point, b: Point, c: Point, d: Point) -> bool {
    let (ax0, ax1) = (a[0].min(b[0]), a[0].max(b[0]));
    let (ay0, ay1) = (a[1].min(b[1]), a[1].max(b[1]));
    let (cx0, cx1) = (c[0].min(d[0]), c[0].max(d[0]));
    let (cy0, cy1) = (c[1].min(d[1]), c[1].max(d[1]));
    ax0 <= cx1 && cx0 <= ax1 && ay0 <= cy1 && cy0 <= ay1
}

impl<'de> Deserialize<'de> for RectilinearPolygon {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            vertices: Vec<Point>,
        }
        let r = Raw::deserialize(de)?;
        RectilinearPolygon::new(r.vertices).map_err(serde::de::Error::custom)
    }
}
