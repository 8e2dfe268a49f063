use std::f64::consts::FRAC_PI_2;

use super::nelder_mead::{nelder_mead, NmOptions};
use super::{Constraint, ConstraintKind, OptStatus, OptimizationResult, OptimizedShape, TraceEntry};
use crate::error::{invalid, Result};
use crate::fem2d::{solve_mesh, BoundaryEdge, EdgeTag, Mesh};
use crate::geometry::{dist, hausdorff_distance, steiner_symmetrize, ConvexPolygon, ProfileDomain};
use crate::spectrum::BcFamily;

/// Area of the unit-perimeter lens bounded by two circular arcs whose tip
/// slope is at most L: (2θ − sin 2θ)/(16θ²) with θ = min(atan L, π/2).
pub fn arc_lens_area(lipschitz: f64) -> f64 {
    let t = lipschitz.atan().min(FRAC_PI_2);
    (2.0 * t - (2.0 * t).sin()) / (16.0 * t * t)
}

/// Nonincreasing fit by pool-adjacent-violators.
fn pav_nonincreasing(y: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(y.len());
    for &v in y {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (b, nb) = blocks[blocks.len() - 1];
            let (a, na) = blocks[blocks.len() - 2];
            if a >= b {
                break;
            }
            blocks.pop();
            let n = na + nb;
            *blocks.last_mut().unwrap() = ((a * na as f64 + b * nb as f64) / n as f64, n);
        }
    }
    blocks.into_iter().flat_map(|(v, n)| std::iter::repeat_n(v, n)).collect()
}

/// Euclidean projection onto {L ≥ s_1 ≥ … ≥ s_m ≥ −L, Σ s_i = 0}.
pub fn project_slopes(y: &[f64], lipschitz: f64) -> Vec<f64> {
    let base = pav_nonincreasing(y);
    let at = |tau: f64| -> Vec<f64> { base.iter().map(|v| (v - tau).clamp(-lipschitz, lipschitz)).collect() };
    let sum = |tau: f64| -> f64 { at(tau).iter().sum() };
    let (mut lo, mut hi) = (base[base.len() - 1] - lipschitz, base[0] + lipschitz);
    if sum(lo) < 0.0 || sum(hi) > 0.0 {
        return at(0.5 * (lo + hi));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sum(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * (1.0 + lo.abs()) {
            break;
        }
    }
    let mut s = at(0.5 * (lo + hi));
    // Spread the rounding residue over the unclipped entries.
    let free: Vec<usize> = (0..s.len()).filter(|&i| s[i].abs() < lipschitz).collect();
    if !free.is_empty() {
        let r: f64 = s.iter().sum::<f64>() / free.len() as f64;
        for i in free {
            s[i] -= r;
        }
    }
    s
}

fn heights(slopes: &[f64]) -> Vec<f64> {
    let m = slopes.len();
    let dx = 1.0 / m as f64;
    let mut h = vec![0.0; m + 1];
    for i in 0..m {
        h[i + 1] = h[i] + dx * slopes[i];
    }
    h[m] = 0.0;
    h
}

fn uniform_xs(m: usize) -> Vec<f64> {
    (0..=m).map(|i| i as f64 / m as f64).collect()
}

/// Profile domain on [0,1] from upper and lower slopes, scaled to unit perimeter.
fn domain_from_slopes(up: &[f64], low: &[f64], lipschitz: f64) -> Result<ProfileDomain> {
    let m = up.len();
    ProfileDomain::new(uniform_xs(m), heights(up), heights(low), lipschitz)?.with_unit_perimeter()
}

/// Symmetric circular lens with tip slope min(L, 1e3), m cells, unit perimeter.
pub fn lens_profile(lipschitz: f64, m: usize) -> Result<ProfileDomain> {
    let s = lens_slopes(lipschitz, m);
    let low: Vec<f64> = s.iter().map(|v| -v).collect();
    domain_from_slopes(&s, &low, lipschitz)
}

fn lens_slopes(lipschitz: f64, m: usize) -> Vec<f64> {
    let t = lipschitz.min(1e3).atan();
    let r = 0.5 / t.sin();
    let c = r * t.cos();
    let g = |x: f64| (r * r - (x - 0.5).powi(2)).max(0.0).sqrt() - c;
    let xs = uniform_xs(m);
    let h: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    project_slopes(&(0..m).map(|i| (h[i + 1] - h[i]) * m as f64).collect::<Vec<_>>(), lipschitz)
}

/// A = 2Δ²Σ(m−i)s_i and P = 2ΔΣ√(1+s_i²) for the symmetric domain of width 1.
fn area_perimeter(s: &[f64]) -> (f64, f64) {
    let m = s.len();
    let dx = 1.0 / m as f64;
    let a = 2.0 * dx * dx * s.iter().enumerate().map(|(i, v)| (m - 1 - i) as f64 * v).sum::<f64>();
    let p = 2.0 * dx * s.iter().map(|v| (1.0 + v * v).sqrt()).sum::<f64>();
    (a, p)
}

fn ratio_and_gradient(s: &[f64]) -> (f64, Vec<f64>) {
    let m = s.len();
    let dx = 1.0 / m as f64;
    let (a, p) = area_perimeter(s);
    let g = s
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let da = 2.0 * dx * dx * (m - 1 - i) as f64;
            let dp = 2.0 * dx * v / (1.0 + v * v).sqrt();
            da / (p * p) - 2.0 * a * dp / (p * p * p)
        })
        .collect();
    (a / (p * p), g)
}

/// Maximizes area at unit perimeter over profile domains with slopes bounded
/// by L. Symmetric domains suffice after Steiner symmetrization, and the
/// width is fixed by homothety, so the unknowns are the m upper slopes.
/// Projected gradient ascent with Armijo steps on F = A/P².
pub fn isoperimetric_profile(lipschitz: f64, m: usize) -> Result<OptimizationResult> {
    if !(lipschitz > 0.0 && lipschitz.is_finite()) {
        return invalid("Lipschitz bound must be positive and finite");
    }
    if m < 16 {
        return invalid("isoperimetric solver needs m ≥ 16");
    }
    let max_iter = 50_000;
    let mut s = lens_slopes(lipschitz, m);
    let (mut f, mut g) = ratio_and_gradient(&s);
    let mut step = 1e-2 / g.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
    let mut trace = vec![TraceEntry { objective: f, step, feasibility: 0.0 }];
    let mut status = OptStatus::IterLimit;
    let mut stall = 0;
    for _ in 0..max_iter {
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = s.iter().zip(&g).map(|(a, b)| a + step * b).collect();
            let t = project_slopes(&trial, lipschitz);
            let ascent: f64 = t.iter().zip(&s).zip(&g).map(|((a, b), c)| (a - b) * c).sum();
            let (ft, _) = ratio_and_gradient(&t);
            if ft >= f + 1e-4 * ascent && ft >= f {
                accepted = Some((t, ft));
                break;
            }
            step *= 0.5;
        }
        let Some((t, ft)) = accepted else {
            status = OptStatus::Converged;
            break;
        };
        let moved = t.iter().zip(&s).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let gain = ft - f;
        s = t;
        let (f2, g2) = ratio_and_gradient(&s);
        f = f2;
        g = g2;
        trace.push(TraceEntry { objective: f, step, feasibility: s.iter().sum::<f64>().abs() });
        step *= 2.0;
        if moved < 1e-13 || gain <= 1e-16 * f {
            stall += 1;
            if stall >= 5 {
                status = OptStatus::Converged;
                break;
            }
        } else {
            stall = 0;
        }
    }
    let low: Vec<f64> = s.iter().map(|v| -v).collect();
    let dom = steiner_symmetrize(&domain_from_slopes(&s, &low, lipschitz)?);
    let area = dom.area();
    let notes = vec![
        format!("arc-lens area at this L {:.10}", arc_lens_area(lipschitz)),
        format!("iterations {}", trace.len() - 1),
    ];
    Ok(OptimizationResult {
        shape: OptimizedShape::Profile(dom),
        objective: area,
        k: 0,
        constraint: Constraint::unit(ConstraintKind::Perimeter),
        trace,
        status,
        notes,
    })
}

/// Structured mesh: `sub` columns per profile cell, `ny` rows between the
/// graphs, fans at the two tips. Bottom edges carry the Dirichlet tag.
pub fn profile_mesh(p: &ProfileDomain, sub: usize, ny: usize) -> Result<Mesh> {
    if sub == 0 || ny == 0 {
        return invalid("profile mesh needs sub ≥ 1 and ny ≥ 1");
    }
    let (xs, hp, hm) = (p.xs(), p.h_plus(), p.h_minus());
    let mut cx = Vec::new();
    let mut top = Vec::new();
    let mut bot = Vec::new();
    for i in 0..xs.len() - 1 {
        for j in 0..sub {
            let t = j as f64 / sub as f64;
            cx.push(xs[i] + t * (xs[i + 1] - xs[i]));
            top.push(hp[i] + t * (hp[i + 1] - hp[i]));
            bot.push(hm[i] + t * (hm[i + 1] - hm[i]));
        }
    }
    let n = xs.len() - 1;
    cx.push(xs[n]);
    top.push(hp[n]);
    bot.push(hm[n]);
    let nc = cx.len();
    let mut nodes = vec![[cx[0], 0.5 * (top[0] + bot[0])]];
    let mut col: Vec<Vec<usize>> = vec![vec![0]];
    for c in 1..nc - 1 {
        let ids = (0..=ny)
            .map(|r| {
                let t = r as f64 / ny as f64;
                nodes.push([cx[c], bot[c] + t * (top[c] - bot[c])]);
                nodes.len() - 1
            })
            .collect();
        col.push(ids);
    }
    nodes.push([cx[nc - 1], 0.5 * (top[nc - 1] + bot[nc - 1])]);
    col.push(vec![nodes.len() - 1]);
    let mut triangles = Vec::new();
    for c in 0..nc - 1 {
        let (a, b) = (&col[c], &col[c + 1]);
        match (a.len(), b.len()) {
            (1, 1) => return invalid("profile mesh needs an interior column"),
            (1, _) => triangles.extend((0..ny).map(|r| [a[0], b[r], b[r + 1]])),
            (_, 1) => triangles.extend((0..ny).map(|r| [a[r], b[0], a[r + 1]])),
            _ => {
                for r in 0..ny {
                    triangles.push([a[r], b[r], b[r + 1]]);
                    triangles.push([a[r], b[r + 1], a[r + 1]]);
                }
            }
        }
    }
    let mut boundary_edges = Vec::new();
    for c in 0..nc - 1 {
        let (a, b) = (&col[c], &col[c + 1]);
        boundary_edges.push(BoundaryEdge { nodes: [a[0], b[0]], tag: EdgeTag::DirichletPart });
        boundary_edges.push(BoundaryEdge { nodes: [b[b.len() - 1], a[a.len() - 1]], tag: EdgeTag::NeumannPart });
    }
    let h = triangles
        .iter()
        .flat_map(|t| (0..3).map(move |i| (t[i], t[(i + 1) % 3])))
        .map(|(u, v)| dist(nodes[u], nodes[v]))
        .fold(0.0, f64::max);
    Ok(Mesh { nodes, triangles, boundary_edges, h })
}

/// k-th Zaremba eigenvalue (Dirichlet on the lower graph) on the structured mesh.
pub fn profile_zaremba_eigenvalue(p: &ProfileDomain, k: usize, sub: usize, ny: usize) -> Result<f64> {
    let mesh = profile_mesh(p, sub, ny)?;
    Ok(solve_mesh(&mesh, BcFamily::Zaremba, k)?.values[k - 1])
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZarembaOptOptions {
    /// Profile cells; the unknowns are 2m slopes.
    pub m: usize,
    pub sub: usize,
    pub ny: usize,
    pub max_iter: usize,
}

impl Default for ZarembaOptOptions {
    fn default() -> Self {
        ZarembaOptOptions { m: 6, sub: 4, ny: 12, max_iter: 600 }
    }
}

pub fn optimize_profile_zaremba(lipschitz: f64, k: usize) -> Result<OptimizationResult> {
    optimize_profile_zaremba_with(lipschitz, k, &ZarembaOptOptions::default())
}

fn centered(p: &ProfileDomain) -> Result<ConvexPolygon> {
    let q = p.to_polygon()?;
    let c = q.centroid();
    Ok(q.translated([-c[0], -c[1]]))
}

/// Minimizes the FEM Zaremba eigenvalue ζ_k over unit-perimeter profile
/// domains with slopes bounded by L, starting from the symmetric lens.
/// Unconstrained Nelder–Mead parameters are mapped onto feasible slopes by
/// projection.
pub fn optimize_profile_zaremba_with(lipschitz: f64, k: usize, opts: &ZarembaOptOptions) -> Result<OptimizationResult> {
    if !(lipschitz > 0.0 && lipschitz.is_finite()) {
        return invalid("Lipschitz bound must be positive and finite");
    }
    if k == 0 || k > 6 {
        return invalid("profile Zaremba optimization is gated to 1 ≤ k ≤ 6");
    }
    let m = opts.m.max(3);
    let split = |x: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let up = project_slopes(&x[..m], lipschitz);
        let neg: Vec<f64> = x[m..].iter().map(|v| -v).collect();
        let low = project_slopes(&neg, lipschitz).into_iter().map(|v| -v).collect();
        (up, low)
    };
    let eval = |x: &[f64]| -> Result<(ProfileDomain, f64)> {
        let (up, low) = split(x);
        let dom = domain_from_slopes(&up, &low, lipschitz)?;
        let z = profile_zaremba_eigenvalue(&dom, k, opts.sub, opts.ny)?;
        Ok((dom, z))
    };
    let lens = lens_slopes(lipschitz, m);
    let mut x0 = lens.clone();
    x0.extend(lens.iter().map(|v| -v));
    let (_, z0) = eval(&x0)?;
    let mut min_seen = f64::INFINITY;
    let f = |x: &[f64]| -> f64 {
        match eval(x) {
            Ok((_, z)) => {
                min_seen = min_seen.min(z);
                z
            }
            Err(_) => f64::INFINITY,
        }
    };
    let nm = NmOptions { initial_step: 0.3 * lipschitz.min(2.0), max_iter: opts.max_iter, xtol: 1e-7, ftol: 1e-10 };
    let out = nelder_mead(f, &x0, &nm, |_, _| false);
    let (dom, z) = if out.f < z0 { eval(&out.x)? } else { eval(&x0)? };
    let iso = isoperimetric_profile(lipschitz, 64)?;
    let OptimizedShape::Profile(iso_dom) = &iso.shape else { unreachable!() };
    let haus = hausdorff_distance(&centered(&dom)?, &centered(iso_dom)?);
    let notes = vec![
        format!("symmetric lens start objective {z0:.10e}"),
        format!("smallest objective over all evaluations {min_seen:.10e}"),
        format!("hausdorff distance to the isoperimetric profile (centroids aligned) {haus:.6e}"),
    ];
    let trace = out.trace.iter().map(|&(o, st)| TraceEntry { objective: o, step: st, feasibility: 0.0 }).collect();
    Ok(OptimizationResult {
        shape: OptimizedShape::Profile(dom),
        objective: z,
        k,
        constraint: Constraint::unit(ConstraintKind::Perimeter),
        trace,
        status: if out.converged { OptStatus::Converged } else { OptStatus::IterLimit },
        notes,
    })
}
