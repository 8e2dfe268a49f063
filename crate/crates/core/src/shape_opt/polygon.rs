use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::nelder_mead::{nelder_mead, NmOptions};
use super::{Constraint, ConstraintKind, OptStatus, OptimizationResult, OptimizedShape, TraceEntry};
use crate::error::{invalid, Result};
use crate::fem2d::{estimated_error, solve_mesh, BoundaryEdge, EdgeTag, Mesh};
use crate::geometry::{dist, shoelace, ConvexPolygon, Point};
use crate::spectrum::BcFamily;

#[derive(Debug, Clone, PartialEq)]
pub struct PolygonOptOptions {
    pub starts: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Target relative eigenvalue error of the FEM objective.
    pub target_error: f64,
    /// Overrides the automatic refinement level of the fan mesh.
    pub levels: Option<usize>,
}

impl Default for PolygonOptOptions {
    fn default() -> Self {
        PolygonOptOptions { starts: 5, seed: 0, max_iter: 400, target_error: 0.002, levels: None }
    }
}

/// Centroid fan of n triangles, red-refined `levels` times. Every vertex
/// moves smoothly with the polygon, so the FEM objective does too.
pub fn fan_mesh(poly: &ConvexPolygon, levels: usize, tag: EdgeTag) -> Mesh {
    let c = poly.centroid();
    let v = poly.vertices();
    let n = v.len();
    let mut nodes = vec![c];
    nodes.extend_from_slice(v);
    let triangles = (0..n).map(|i| [0, 1 + i, 1 + (i + 1) % n]).collect();
    let boundary_edges = (0..n).map(|i| BoundaryEdge { nodes: [1 + i, 1 + (i + 1) % n], tag }).collect();
    let h = (0..n).map(|i| dist(v[i], v[(i + 1) % n]).max(dist(c, v[i]))).fold(0.0, f64::max);
    let mut mesh = Mesh { nodes, triangles, boundary_edges, h };
    for _ in 0..levels {
        mesh = mesh.red_refine();
    }
    mesh
}

fn bc_tag(bc: BcFamily) -> Result<EdgeTag> {
    match bc {
        BcFamily::Dirichlet => Ok(EdgeTag::DirichletPart),
        BcFamily::Neumann => Ok(EdgeTag::NeumannPart),
        BcFamily::Zaremba => invalid("polygon optimization supports Dirichlet and Neumann conditions"),
    }
}

/// k-th FEM eigenvalue of the polygon on its fan mesh.
pub fn polygon_eigenvalue(poly: &ConvexPolygon, bc: BcFamily, k: usize, levels: usize) -> Result<f64> {
    let mesh = fan_mesh(poly, levels, bc_tag(bc)?);
    Ok(solve_mesh(&mesh, bc, k)?.values[k - 1])
}

/// Minimal width over edge directions.
fn width(poly: &ConvexPolygon) -> f64 {
    let v = poly.vertices();
    let n = v.len();
    (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            let l = dist(a, b);
            v.iter().map(|p| ((b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])).abs() / l).fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

/// diameter/width relative to the regular polygon with as many vertices; 1 for regular polygons.
pub fn polygon_aspect(poly: &ConvexPolygon) -> f64 {
    let reg = ConvexPolygon::regular(poly.len(), 1.0).expect("n ≥ 3");
    (poly.diameter() / width(poly)) / (reg.diameter() / width(&reg))
}

/// Vertices (0,0), (1,0) followed by the free parameters.
fn decode(x: &[f64]) -> Option<ConvexPolygon> {
    let mut v: Vec<Point> = vec![[0.0, 0.0], [1.0, 0.0]];
    v.extend(x.chunks(2).map(|c| [c[0], c[1]]));
    let n = v.len();
    if shoelace(&v) <= 0.0 {
        return None;
    }
    let p = ConvexPolygon::new(v).ok()?;
    (p.len() == n).then(|| p.scaled(1.0 / p.perimeter()))
}

fn encode(p: &ConvexPolygon) -> Vec<f64> {
    let v = p.vertices();
    let (a, b) = (v[0], v[1]);
    let l = dist(a, b);
    let (c, s) = ((b[0] - a[0]) / l, (b[1] - a[1]) / l);
    v[2..]
        .iter()
        .flat_map(|q| {
            let (dx, dy) = (q[0] - a[0], q[1] - a[1]);
            [(c * dx + s * dy) / l, (-s * dx + c * dy) / l]
        })
        .collect()
}

fn choose_levels(poly: &ConvexPolygon, bc: BcFamily, k: usize, target: f64) -> Result<usize> {
    let tag = bc_tag(bc)?;
    let mut levels = 1;
    loop {
        let mesh = fan_mesh(poly, levels, tag);
        if 5 * k <= mesh.nodes.len() / 2 {
            let lam = solve_mesh(&mesh, bc, k)?.values[k - 1];
            if lam <= 0.0 || estimated_error(lam, mesh.h) <= target * lam || levels >= 7 {
                return Ok(levels);
            }
        }
        levels += 1;
    }
}

pub fn optimize_polygon(n: usize, bc: BcFamily, k: usize) -> Result<OptimizationResult> {
    optimize_polygon_with(n, bc, k, Constraint::unit(ConstraintKind::Perimeter), &PolygonOptOptions::default())
}

/// Minimizes the k-th FEM eigenvalue over convex n-gons of the given
/// perimeter. The mesh level is fixed once from the regular start.
pub fn optimize_polygon_with(
    n: usize,
    bc: BcFamily,
    k: usize,
    constraint: Constraint,
    opts: &PolygonOptOptions,
) -> Result<OptimizationResult> {
    if !(3..=8).contains(&n) {
        return invalid("polygon optimization needs 3 ≤ n ≤ 8");
    }
    if k == 0 || k > 12 {
        return invalid("polygon optimization is gated to 1 ≤ k ≤ 12");
    }
    if constraint.kind != ConstraintKind::Perimeter || !(constraint.value > 0.0 && constraint.value.is_finite()) {
        return invalid("polygon optimization supports a positive perimeter constraint only");
    }
    let tag = bc_tag(bc)?;
    let regular = ConvexPolygon::regular(n, 1.0)?;
    let x_reg = encode(&regular);
    let levels = match opts.levels {
        Some(l) => l,
        None => choose_levels(&decode(&x_reg).expect("regular polygon"), bc, k, opts.target_error)?,
    };
    let mut failures = Vec::new();
    let mut f = |x: &[f64]| -> f64 {
        let Some(p) = decode(x) else { return f64::INFINITY };
        match solve_mesh(&fan_mesh(&p, levels, tag), bc, k) {
            Ok(s) => s.values[k - 1],
            Err(e) => {
                failures.push(format!("{e} at {x:?}"));
                f64::INFINITY
            }
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let nm = NmOptions { initial_step: 0.1, max_iter: opts.max_iter, xtol: 1e-6, ftol: 1e-10 };
    let mut best: Option<(Vec<f64>, f64, bool, Vec<TraceEntry>)> = None;
    let mut notes = vec![format!("fan mesh refinement level {levels}")];
    for s in 0..opts.starts.max(1) {
        let x0 = if s == 0 {
            x_reg.clone()
        } else {
            loop {
                let x: Vec<f64> = x_reg.iter().map(|v| v + rng.gen_range(-0.25..0.25)).collect();
                if decode(&x).is_some() {
                    break x;
                }
            }
        };
        let out = nelder_mead(&mut f, &x0, &nm, |_, _| false);
        notes.push(format!("start {s}: objective {:.10e}, iterations {}", out.f, out.iterations));
        if best.as_ref().is_none_or(|b| out.f < b.1) {
            let trace = out.trace.iter().map(|&(o, st)| TraceEntry { objective: o, step: st, feasibility: 0.0 }).collect();
            best = Some((out.x, out.f, out.converged, trace));
        }
    }
    drop(f);
    if let Some(first) = failures.first() {
        notes.push(format!("{} candidate evaluations failed, first: {first}", failures.len()));
    }
    let (x, fx, converged, trace) = best.expect("at least one start");
    if !fx.is_finite() {
        return Err(crate::SpectraError::NumericalFailure(format!("no start produced a finite objective: {failures:?}")));
    }
    let unit = decode(&x).expect("best point is admissible");
    let poly = unit.translated({
        let c = unit.centroid();
        [-c[0], -c[1]]
    });
    let poly = poly.scaled(constraint.value);
    let objective = polygon_eigenvalue(&poly, bc, k, levels)?;
    notes.push(format!("aspect relative to the regular {n}-gon {:.6}", polygon_aspect(&poly)));
    Ok(OptimizationResult {
        shape: OptimizedShape::Polygon(poly),
        objective,
        k,
        constraint,
        trace,
        status: if converged { OptStatus::Converged } else { OptStatus::IterLimit },
        notes,
    })
}
