use serde::{Deserialize, Serialize};

use super::{ConvexPolygon, Cuboid, ProfileDomain, RectilinearPolygon};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ball {
    pub radius: f64,
    pub dim: usize,
}

impl Ball {
    pub fn new(radius: f64, dim: usize) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) || dim == 0 {
            return invalid("ball needs a positive radius and dimension");
        }
        Ok(Ball { radius, dim })
    }
}

impl<'de> Deserialize<'de> for Ball {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            radius: f64,
            #[serde(alias = "d")]
            dim: usize,
        }
        let r = Raw::deserialize(de)?;
        Ball::new(r.radius, r.dim).map_err(serde::de::Error::custom)
    }
}

/// JSON interchange form: `{"kind": "cuboid" | "polygon" | "profile" | "ball" | "rectilinear", ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Cuboid(Cuboid),
    Polygon(ConvexPolygon),
    Profile(ProfileDomain),
    Ball(Ball),
    Rectilinear(RectilinearPolygon),
}

impl Shape {
    pub fn from_json(s: &str) -> Result<Shape> {
        serde_json::from_str(s).map_err(|e| crate::error::SpectraError::InvalidInput(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("shape serializes")
    }

    pub fn dim(&self) -> usize {
        match self {
            Shape::Cuboid(c) => c.dim(),
            Shape::Ball(b) => b.dim,
            _ => 2,
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Shape::Cuboid(c) => c.volume(),
            Shape::Polygon(p) => p.area(),
            Shape::Profile(p) => p.area(),
            Shape::Ball(b) => super::unit_ball_volume(b.dim) * b.radius.powi(b.dim as i32),
            Shape::Rectilinear(r) => r.area(),
        }
    }

    pub fn perimeter(&self) -> f64 {
        match self {
            Shape::Cuboid(c) => c.surface(),
            Shape::Polygon(p) => p.perimeter(),
            Shape::Profile(p) => p.perimeter(),
            Shape::Ball(b) => b.dim as f64 * super::unit_ball_volume(b.dim) * b.radius.powi(b.dim as i32 - 1),
            Shape::Rectilinear(r) => r.perimeter(),
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Shape::Cuboid(c) => c.diameter(),
            Shape::Polygon(p) => p.diameter(),
            Shape::Profile(p) => p.diameter(),
            Shape::Ball(b) => 2.0 * b.radius,
            Shape::Rectilinear(r) => super::all_pairs_diameter(r.vertices()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let shapes = [
            r#"{"kind":"cuboid","sides":[1.0,2.0],"axis_bc":["D","neumann_both"]}"#,
            r#"{"kind":"polygon","vertices":[[0,0],[1,0],[0,1]]}"#,
            r#"{"kind":"ball","radius":0.5,"dim":3}"#,
            r#"{"kind":"profile","xs":[0,1,2],"h_plus":[0,1,0],"h_minus":[0,-1,0],"lipschitz":1.5}"#,
        ];
        for s in shapes {
            let shape = Shape::from_json(s).unwrap();
            let back = Shape::from_json(&shape.to_json()).unwrap();
            assert_eq!(shape, back);
        }
    }

    #[test]
    fn json_rejects_invalid_shapes() {
        assert!(Shape::from_json(r#"{"kind":"cuboid","sides":[1.0,-2.0],"axis_bc":["D","D"]}"#).is_err());
        assert!(Shape::from_json(r#"{"kind":"polygon","vertices":[[0,0],[1,0],[2,0]]}"#).is_err());
        assert!(Shape::from_json(r#"{"kind":"torus"}"#).is_err());
    }

    #[test]
    fn box_diameter() {
        let s = Shape::from_json(r#"{"kind":"cuboid","sides":[1,2,2],"axis_bc":["D","D","D"]}"#).unwrap();
        assert!((s.diameter() - 3.0).abs() < 1e-15);
    }
}
