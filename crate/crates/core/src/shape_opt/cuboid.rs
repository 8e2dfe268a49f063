use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::nelder_mead::{golden_section, nelder_mead, NmOptions};
use super::{Constraint, OptStatus, OptimizationResult, OptimizedShape, TraceEntry};
use crate::cuboid_spectra::kth_eigenvalue;
use crate::error::{invalid, Result};
use crate::geometry::{AxisBc, Cuboid, Signature};

#[derive(Debug, Clone, PartialEq)]
pub struct CuboidOptOptions {
    /// Nelder–Mead starts (d ≥ 3) or polished grid candidates (d = 2).
    pub starts: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// min side / max side below which a still-decreasing run is Degenerating.
    pub degenerate_ratio: f64,
    /// Runs stop once min side / max side drops below this.
    pub floor_ratio: f64,
}

impl Default for CuboidOptOptions {
    fn default() -> Self {
        CuboidOptOptions { starts: 6, seed: 20_240_601, max_iter: 3000, degenerate_ratio: 1e-4, floor_ratio: 1e-8 }
    }
}

/// Sides (1, e^{x_1}, …) with the constraint imposed by homothety.
fn build(sig: Signature, x: &[f64], c: &Constraint) -> Result<Cuboid> {
    let mut sides = vec![1.0];
    sides.extend(x.iter().map(|v| v.exp()));
    let r = Cuboid::with_signature(sides, sig)?;
    let t = c.cuboid_scale(&r);
    r.scaled(t)
}

fn side_ratio(x: &[f64]) -> f64 {
    let hi = x.iter().fold(0.0f64, |m, v| m.max(*v));
    let lo = x.iter().fold(0.0f64, |m, v| m.min(*v));
    (lo - hi).exp()
}

struct Problem {
    sig: Signature,
    k: usize,
    c: Constraint,
}

impl Problem {
    fn eval(&self, x: &[f64]) -> f64 {
        match build(self.sig, x, &self.c) {
            Ok(r) => kth_eigenvalue(&r, self.k).unwrap_or(f64::INFINITY),
            Err(_) => f64::INFINITY,
        }
    }

    fn finish(&self, x: &[f64], status: OptStatus, trace: Vec<TraceEntry>, notes: Vec<String>) -> Result<OptimizationResult> {
        let r = build(self.sig, x, &self.c)?;
        let objective = kth_eigenvalue(&r, self.k)?;
        Ok(OptimizationResult {
            shape: OptimizedShape::Cuboid(r),
            objective,
            k: self.k,
            constraint: self.c,
            trace,
            status,
            notes,
        })
    }
}

pub fn optimize_cuboid(sig: Signature, k: usize, constraint: Constraint, d: usize) -> Result<OptimizationResult> {
    optimize_cuboid_with(sig, k, constraint, d, &CuboidOptOptions::default())
}

/// Minimizes ζ_k^{(a,b,c)} over boxes under the constraint. In d = 2 the
/// aspect ratio is scanned on a grid, the best basins are polished both by
/// golden-section search and by Nelder–Mead, and the better result is kept.
/// In d ≥ 3 Nelder–Mead runs from the cube and from the best points of a
/// seeded random scan.
pub fn optimize_cuboid_with(
    sig: Signature,
    k: usize,
    constraint: Constraint,
    d: usize,
    opts: &CuboidOptOptions,
) -> Result<OptimizationResult> {
    if sig.dim() != d || d < 2 {
        return invalid(format!("signature {sig} does not describe a box in dimension {d} ≥ 2"));
    }
    if k == 0 {
        return invalid("k must be at least 1");
    }
    if !(constraint.value > 0.0 && constraint.value.is_finite()) {
        return invalid("constraint value must be positive");
    }
    let p = Problem { sig, k, c: constraint };
    if d == 2 {
        optimize_planar(&p, opts)
    } else {
        optimize_nd(&p, d, opts)
    }
}

fn local_minima(vals: &[f64]) -> Vec<usize> {
    let n = vals.len();
    (0..n)
        .filter(|&i| (i == 0 || vals[i] <= vals[i - 1]) && (i + 1 == n || vals[i] <= vals[i + 1]))
        .collect()
}

fn optimize_planar(p: &Problem, opts: &CuboidOptOptions) -> Result<OptimizationResult> {
    let axes = p.sig.axis_bcs();
    let symmetric = axes[0] == axes[1];
    let r_max = -opts.floor_ratio.ln();
    let coarse_step = 0.02;
    let lo = if symmetric { 0.0 } else { -r_max };
    let n_coarse = ((r_max - lo) / coarse_step).round() as usize + 1;
    let coarse: Vec<f64> = (0..n_coarse).map(|i| lo + i as f64 * coarse_step).collect();
    let cv: Vec<f64> = coarse.iter().map(|&r| p.eval(&[r])).collect();
    let (imin, fmin) = cv.iter().enumerate().fold((0, f64::INFINITY), |a, (i, &v)| if v < a.1 { (i, v) } else { a });
    let mut trace = vec![TraceEntry { objective: fmin, step: coarse_step, feasibility: 0.0 }];
    let at_edge = |i: usize| (i == n_coarse - 1) || (!symmetric && i == 0);
    if at_edge(imin) {
        let x = [coarse[imin]];
        let notes = vec![format!("objective still decreasing at side ratio {:.1e}", side_ratio(&x))];
        return p.finish(&x, OptStatus::Degenerating, trace, notes);
    }

    // Fine scan wherever the coarse values come close to the minimum.
    let kf = p.k as f64;
    let slack = 1.0 + 5.0 * kf.powf(-2.0 / 3.0) + 1e-3;
    let near: Vec<usize> = (0..n_coarse).filter(|&i| cv[i] <= fmin * slack).collect();
    let fine_step = (0.05 / kf).clamp(1e-5, coarse_step);
    let mut fine: Vec<f64> = Vec::new();
    let mut last_end = f64::NEG_INFINITY;
    for &i in &near {
        let a = (coarse[i] - coarse_step).max(lo).max(last_end);
        let b = (coarse[i] + coarse_step).min(r_max);
        let mut r = a;
        while r <= b {
            fine.push(r);
            r += fine_step;
        }
        last_end = r;
    }
    let fv: Vec<f64> = fine.iter().map(|&r| p.eval(&[r])).collect();
    let mut cands = local_minima(&fv);
    cands.sort_by(|&a, &b| fv[a].total_cmp(&fv[b]));
    cands.truncate(opts.starts.max(1));
    trace.push(TraceEntry { objective: fv[cands[0]], step: fine_step, feasibility: 0.0 });

    let f1 = |r: f64| p.eval(&[r]);
    let mut golden_best = (f64::NAN, f64::INFINITY);
    let mut nm_best = (f64::NAN, f64::INFINITY);
    let nm_opts = NmOptions { initial_step: fine_step, max_iter: opts.max_iter, xtol: 1e-12, ftol: 0.0 };
    for &i in &cands {
        let a = if i > 0 { fine[i - 1] } else { fine[i] - fine_step };
        let b = if i + 1 < fine.len() { fine[i + 1] } else { fine[i] + fine_step };
        let (rg, fg) = golden_section(f1, a, b, 1e-11);
        if fg < golden_best.1 {
            golden_best = (rg, fg);
        }
        let out = nelder_mead(|x: &[f64]| p.eval(x), &[fine[i]], &nm_opts, |_, _| false);
        if out.f < nm_best.1 {
            nm_best = (out.x[0], out.f);
        }
    }
    trace.push(TraceEntry { objective: golden_best.1, step: 1e-11, feasibility: 0.0 });
    trace.push(TraceEntry { objective: nm_best.1, step: 1e-12, feasibility: 0.0 });
    let aspect = |r: f64| r.abs().exp();
    let notes = vec![
        format!("golden-section aspect ratio {:.12}, objective {:.15e}", aspect(golden_best.0), golden_best.1),
        format!("nelder-mead aspect ratio {:.12}, objective {:.15e}", aspect(nm_best.0), nm_best.1),
    ];
    let best = if nm_best.1 < golden_best.1 { nm_best.0 } else { golden_best.0 };
    let x = [best];
    let status = if side_ratio(&x) < opts.degenerate_ratio { OptStatus::Degenerating } else { OptStatus::Converged };
    p.finish(&x, status, trace, notes)
}

const SCAN_POINTS: usize = 400;
const SCAN_RANGE: f64 = 8.0;

fn optimize_nd(p: &Problem, d: usize, opts: &CuboidOptOptions) -> Result<OptimizationResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    // The cube plus the best points of a random scan over log-aspects.
    let mut scan: Vec<(Vec<f64>, f64)> = (0..SCAN_POINTS)
        .map(|_| {
            let x: Vec<f64> = (0..d - 1).map(|_| rng.gen_range(-SCAN_RANGE..SCAN_RANGE)).collect();
            let f = p.eval(&x);
            (x, f)
        })
        .collect();
    scan.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut starts = vec![vec![0.0; d - 1]];
    starts.extend(scan.into_iter().take(opts.starts.max(1) - 1).map(|(x, _)| x));
    let nm_opts = NmOptions { initial_step: 0.5, max_iter: opts.max_iter, xtol: 1e-10, ftol: 1e-15 };
    let mut best: Option<(Vec<f64>, f64, OptStatus, Vec<TraceEntry>)> = None;
    let mut notes = Vec::new();
    for (si, x0) in starts.iter().enumerate() {
        let mut x = x0.clone();
        let mut trace = Vec::new();
        let mut status = OptStatus::IterLimit;
        // One restart from the best point guards against simplex collapse.
        for _ in 0..2 {
            let out = nelder_mead(|y: &[f64]| p.eval(y), &x, &nm_opts, |y, _| side_ratio(y) < opts.floor_ratio);
            trace.extend(out.trace.iter().map(|&(f, s)| TraceEntry { objective: f, step: s, feasibility: 0.0 }));
            x = out.x;
            if out.stopped_by_observer {
                status = OptStatus::Degenerating;
                break;
            }
            status = if out.converged { OptStatus::Converged } else { OptStatus::IterLimit };
        }
        if status != OptStatus::Degenerating && side_ratio(&x) < opts.degenerate_ratio {
            // Still decreasing if the last stretch of the trace kept improving.
            let n = trace.len();
            if n > 10 && trace[n - 1].objective < trace[n - 10].objective {
                status = OptStatus::Degenerating;
            }
        }
        let f = p.eval(&x);
        notes.push(format!("start {si}: objective {f:.12e}, status {status:?}"));
        if best.as_ref().is_none_or(|b| f < b.1) {
            best = Some((x, f, status, trace));
        }
    }
    let (x, _, status, trace) = best.expect("at least one start");
    p.finish(&x, status, trace, notes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub k: usize,
    /// Side lengths in decreasing order.
    pub sides: Vec<f64>,
    pub objective: f64,
    /// Largest side over smallest side.
    pub spread: f64,
    pub status: OptStatus,
}

pub fn minimizer_trajectory(sig: Signature, constraint: Constraint, k_list: &[usize], d: usize) -> Result<Vec<TrajectoryRow>> {
    if k_list.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("k values must be increasing");
    }
    k_list
        .iter()
        .map(|&k| {
            let res = optimize_cuboid(sig, k, constraint, d)?;
            let OptimizedShape::Cuboid(r) = &res.shape else { unreachable!("cuboid optimizer returns cuboids") };
            let mut sides = r.sides().to_vec();
            sides.sort_by(|a, b| b.total_cmp(a));
            Ok(TrajectoryRow {
                k,
                spread: sides[0] / sides[sides.len() - 1],
                sides,
                objective: res.objective,
                status: res.status,
            })
        })
        .collect()
}

/// Upper bound on the shorter side a*_k of a unit-area (0,0,2) minimizer, k ≥ 22.
pub fn prop23_bound(k: usize) -> Option<f64> {
    if k < 22 {
        return None;
    }
    let q = k as f64 - 0.25;
    let c = 4.0 - PI;
    Some(4.0 / (c * q.sqrt() + (c * c * q - 16.0).sqrt()))
}

/// R_k = (0,(2k−1)^{1−1/d}) × (0,(2k−1)^{−1/d})^{d−1} with mixed conditions on every axis.
pub fn witness_cuboid(d: usize, k: usize) -> Result<Cuboid> {
    let t = (2 * k) as f64 - 1.0;
    let df = d as f64;
    let mut sides = vec![t.powf(1.0 - 1.0 / df)];
    sides.extend(std::iter::repeat_n(t.powf(-1.0 / df), d - 1));
    Cuboid::uniform(sides, AxisBc::Mixed)
}

/// 2^{2/d−2}·d·π²·k^{2/d}, which bounds ζ_k^{(0,0,d)}(R_k).
pub fn witness_bound(d: usize, k: usize) -> f64 {
    PI * PI * witness_bound_as_printed(d, k)
}

/// The same expression without the factor π².
pub fn witness_bound_as_printed(d: usize, k: usize) -> f64 {
    let df = d as f64;
    2f64.powf(2.0 / df - 2.0) * df * (k as f64).powf(2.0 / df)
}
