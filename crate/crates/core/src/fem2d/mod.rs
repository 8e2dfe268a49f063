//! P1 finite elements for Laplace eigenvalues on planar polygons under
//! Dirichlet, Neumann and Zaremba conditions.

mod assembly;
mod eigen;
mod linalg;
mod mesh;

use serde::{Deserialize, Serialize};

pub use assembly::{assemble, element_matrices, AssembledSystem};
pub use eigen::{dense_eigen, smallest_eigenpairs, sturm_count, EigenOptions, EigenSolution};
pub use linalg::{rcm_ordering, CsrMatrix, SkylineLdl};
pub use mesh::{triangulate, BoundaryEdge, EdgeTag, Mesh, TaggedPolygon, MIN_ANGLE_DEG};

use crate::error::{invalid, Result, SpectraError};
use crate::geometry::{ConvexPolygon, ProfileDomain, RectilinearPolygon};
use crate::spectrum::{BcDescriptor, BcFamily, Spectrum, SpectrumSource};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FemDomain {
    Polygon(ConvexPolygon),
    Rectilinear(RectilinearPolygon),
    Profile(ProfileDomain),
    Tagged(TaggedPolygon),
}

impl FemDomain {
    pub fn from_json(s: &str) -> Result<FemDomain> {
        serde_json::from_str(s).map_err(|e| SpectraError::InvalidInput(format!("domain json: {e}")))
    }

    /// Boundary with tags for the requested condition. Zaremba needs a
    /// ProfileDomain (Γ⁻ Dirichlet) or explicit tags.
    pub fn tagged(&self, bc: BcFamily) -> Result<TaggedPolygon> {
        let uniform = match bc {
            BcFamily::Dirichlet => EdgeTag::DirichletPart,
            BcFamily::Neumann => EdgeTag::NeumannPart,
            BcFamily::Zaremba => {
                return match self {
                    FemDomain::Profile(p) => Ok(TaggedPolygon::from_profile_zaremba(p)),
                    FemDomain::Tagged(t) => Ok(t.clone()),
                    _ => invalid("Zaremba conditions need a profile domain or explicit edge tags"),
                };
            }
        };
        Ok(match self {
            FemDomain::Polygon(p) => TaggedPolygon::from_convex(p, uniform),
            FemDomain::Rectilinear(p) => TaggedPolygon::from_rectilinear(p, uniform),
            FemDomain::Profile(p) => TaggedPolygon::from_profile(p, uniform),
            FemDomain::Tagged(t) => TaggedPolygon { vertices: t.vertices.clone(), tags: vec![uniform; t.tags.len()] },
        })
    }
}

fn descriptor(bc: BcFamily) -> BcDescriptor {
    match bc {
        BcFamily::Dirichlet => BcDescriptor::Dirichlet,
        BcFamily::Neumann => BcDescriptor::Neumann,
        BcFamily::Zaremba => BcDescriptor::Zaremba,
    }
}

/// First k eigenvalues of the P1 discretization on a given mesh.
pub fn solve_mesh(mesh: &Mesh, bc: BcFamily, k: usize) -> Result<Spectrum> {
    let sys = assemble(mesh);
    let nf = sys.free_dofs.len();
    if k == 0 || 5 * k > nf {
        return invalid(format!("k = {k} exceeds one fifth of the {nf} free dofs; refine the mesh"));
    }
    // Without constrained nodes the stiffness matrix is singular.
    let shift = if nf == mesh.nodes.len() { -1.0 } else { 0.0 };
    let opts = EigenOptions { shift, ..Default::default() };
    let sol = smallest_eigenpairs(&sys.stiffness, &sys.mass, k, &opts)?;
    Ok(Spectrum { values: sol.values, bc: descriptor(bc), source: SpectrumSource::Fem { mesh_h: mesh.h }, labels: Vec::new() })
}

pub fn solve_eigs(domain: &FemDomain, bc: BcFamily, k: usize, h: f64) -> Result<Spectrum> {
    let mesh = triangulate(&domain.tagged(bc)?, h)?;
    solve_mesh(&mesh, bc, k)
}

/// Number of discrete eigenvalues strictly below α, from the inertia of K − αM.
pub fn fem_count(mesh: &Mesh, alpha: f64) -> Result<usize> {
    let sys = assemble(mesh);
    sturm_count(&sys.stiffness, &sys.mass, alpha)
}

/// Constant of the error model λ_h − λ ≈ C·λ²·h² for quality-gated meshes,
/// fitted on the unit square (h the longest edge).
pub const FEM_ERROR_CONSTANT: f64 = 0.05;

/// Estimated absolute discretization error of a P1 eigenvalue.
pub fn estimated_error(lambda: f64, h: f64) -> f64 {
    FEM_ERROR_CONSTANT * lambda * lambda * h * h
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RichardsonReport {
    pub h: Vec<f64>,
    /// Eigenvalues per ladder level.
    pub levels: Vec<Vec<f64>>,
    pub extrapolated: Vec<f64>,
    /// Observed convergence order per eigenvalue from the last three levels.
    pub order: Vec<f64>,
    /// True where the observed order is below 1.5.
    pub suspect: Vec<bool>,
    pub nested: bool,
}

/// Solves on a geometric ladder of mesh sizes and extrapolates assuming
/// error ∝ h^p. Ratio-2 ladders reuse one mesh with red refinement.
pub fn refine_extrapolate(domain: &FemDomain, bc: BcFamily, k: usize, h_list: &[f64]) -> Result<RichardsonReport> {
    if h_list.len() < 3 {
        return invalid("need at least three mesh sizes");
    }
    let r = h_list[0] / h_list[1];
    if !(r > 1.0) || h_list.windows(2).any(|w| ((w[0] / w[1]) / r - 1.0).abs() > 1e-6) {
        return invalid("mesh sizes must form a decreasing geometric ladder");
    }
    let tagged = domain.tagged(bc)?;
    let nested = (r - 2.0).abs() < 1e-6;
    let mut meshes = vec![triangulate(&tagged, h_list[0])?];
    for &h in &h_list[1..] {
        let next = if nested { meshes.last().unwrap().red_refine() } else { triangulate(&tagged, h)? };
        meshes.push(next);
    }
    let levels: Vec<Vec<f64>> = meshes.iter().map(|m| solve_mesh(m, bc, k).map(|s| s.values)).collect::<Result<_>>()?;
    let n = levels.len();
    let (a, b, c) = (&levels[n - 3], &levels[n - 2], &levels[n - 1]);
    let mut order = Vec::with_capacity(k);
    let mut extrapolated = Vec::with_capacity(k);
    for i in 0..k {
        let d1 = a[i] - b[i];
        let d2 = b[i] - c[i];
        let p = (d1 / d2).abs().ln() / r.ln();
        order.push(p);
        if p.is_finite() && p > 0.5 {
            extrapolated.push(c[i] - d2 / (r.powf(p) - 1.0));
        } else {
            extrapolated.push(c[i]);
        }
    }
    let suspect = order.iter().map(|p| !(p.is_finite() && *p >= 1.5)).collect();
    Ok(RichardsonReport { h: h_list.to_vec(), levels, extrapolated, order, suspect, nested })
}
