//! Eigenvalue minimization over cuboids, convex polygons and profile domains,
//! and the isoperimetric problem over profile domains with bounded slopes.

mod cuboid;
mod nelder_mead;
mod polygon;
mod profile;

use serde::{Deserialize, Serialize};

pub use cuboid::{
    minimizer_trajectory, optimize_cuboid, optimize_cuboid_with, prop23_bound, witness_bound, witness_bound_as_printed,
    witness_cuboid, CuboidOptOptions, TrajectoryRow,
};
pub use nelder_mead::{golden_section, nelder_mead, NmOptions, NmOutcome};
pub use polygon::{fan_mesh, optimize_polygon, optimize_polygon_with, polygon_aspect, polygon_eigenvalue, PolygonOptOptions};
pub use profile::{
    arc_lens_area, isoperimetric_profile, lens_profile, optimize_profile_zaremba, optimize_profile_zaremba_with,
    profile_mesh, profile_zaremba_eigenvalue, project_slopes, ZarembaOptOptions,
};

use crate::geometry::{ConvexPolygon, Cuboid, ProfileDomain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    Volume,
    Perimeter,
    Diameter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub kind: ConstraintKind,
    pub value: f64,
}

impl Constraint {
    pub fn unit(kind: ConstraintKind) -> Self {
        Constraint { kind, value: 1.0 }
    }

    /// Homothety factor taking a cuboid onto the constraint.
    pub fn cuboid_scale(&self, r: &Cuboid) -> f64 {
        let d = r.dim() as f64;
        match self.kind {
            ConstraintKind::Volume => (self.value / r.volume()).powf(1.0 / d),
            ConstraintKind::Perimeter => (self.value / r.surface()).powf(1.0 / (d - 1.0)),
            ConstraintKind::Diameter => self.value / r.diameter(),
        }
    }

    pub fn cuboid_residual(&self, r: &Cuboid) -> f64 {
        let v = match self.kind {
            ConstraintKind::Volume => r.volume(),
            ConstraintKind::Perimeter => r.surface(),
            ConstraintKind::Diameter => r.diameter(),
        };
        (v / self.value - 1.0).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptStatus {
    Converged,
    IterLimit,
    Degenerating,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub objective: f64,
    pub step: f64,
    pub feasibility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OptimizedShape {
    Cuboid(Cuboid),
    Polygon(ConvexPolygon),
    Profile(ProfileDomain),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub shape: OptimizedShape,
    /// Eigenvalue, or area for the isoperimetric problem.
    pub objective: f64,
    pub k: usize,
    pub constraint: Constraint,
    pub trace: Vec<TraceEntry>,
    pub status: OptStatus,
    pub notes: Vec<String>,
}

impl OptimizationResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }
}
