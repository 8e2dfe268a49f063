//! Weyl-law ratios along sequences of domains, and the counterexample
//! families (disjoint balls, degenerate cuboids, radiators).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cuboid_spectra::{kth_eigenvalue, spectrum_prefix};
use crate::error::{invalid, Result, SpectraError};
use crate::fem2d::{estimated_error, refine_extrapolate, solve_eigs, FemDomain, RichardsonReport};
use crate::geometry::{unit_ball_volume, weyl_constant, AxisBc, Cuboid, RectilinearPolygon, Shape};
use crate::reference_spectra::{disk_spectrum, merge_spectra, DiskBc};
use crate::spectrum::BcFamily;

/// Largest k for FEM-evaluated families.
pub const FEM_K_GATE: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Generator {
    /// k+1 disjoint disks of area 1/k each (total area → 1).
    DisjointBalls,
    /// (0, a^{1/(d−1)})^{d−1} × (0, 1/a) with a = 3 k^{1/d} ω_d^{−1/d}.
    DegenerateCuboids { d: usize },
    /// k rectangles (0,1/k)×(0,1) joined by tubes of length 1/k² and width eps.
    Radiator { eps: f64 },
    /// (1 + 1/k)·Ω for a fixed domain Ω.
    ShrinkingTo { shape: Shape },
    /// One domain per scheduled k.
    Custom { shapes: Vec<Shape> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub generator: Generator,
    pub k_schedule: Vec<usize>,
    pub bc: BcFamily,
}

impl SequenceSpec {
    /// Default schedules: {10², …, 10⁵} for exact families, {2, …, 8} for FEM ones.
    pub fn with_default_schedule(generator: Generator, bc: BcFamily) -> Self {
        let k_schedule = match generator {
            Generator::Radiator { .. } => (2..=8).collect(),
            _ => vec![100, 1_000, 10_000, 100_000],
        };
        SequenceSpec { generator, k_schedule, bc }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylRow {
    pub k: usize,
    pub eigenvalue: f64,
    pub volume: f64,
    /// W_d k^{2/d} |Ω_k|^{−2/d}
    pub weyl: f64,
    pub ratio: f64,
    /// exact_cuboid, exact_disk, exact_union or fem
    pub source: String,
}

/// Ball with volume 1/k and the number of copies in the k-th disjoint-ball domain.
fn ball_family(k: usize) -> (f64, usize) {
    ((PI * k as f64).powf(-0.5), k + 1)
}

pub fn degenerate_cuboid(d: usize, k: usize) -> Result<Cuboid> {
    if d < 2 {
        return invalid("degenerate cuboids need d ≥ 2");
    }
    let a = 3.0 * (k as f64).powf(1.0 / d as f64) * unit_ball_volume(d).powf(-1.0 / d as f64);
    let mut sides = vec![a.powf(1.0 / (d - 1) as f64); d - 1];
    sides.push(1.0 / a);
    Cuboid::uniform(sides, AxisBc::DirichletBoth)
}

/// Rectilinear radiator with n rectangles; tubes are centred at height 1/2.
pub fn radiator_polygon(n: usize, eps: f64) -> Result<RectilinearPolygon> {
    if n < 1 || !(eps > 0.0 && eps < 1.0) {
        return invalid("radiator needs n ≥ 1 rectangles and 0 < eps < 1");
    }
    let w = 1.0 / n as f64;
    let g = w * w;
    let (y0, y1) = (0.5 - 0.5 * eps, 0.5 + 0.5 * eps);
    let left = |j: usize| j as f64 * (w + g);
    let mut v = vec![[0.0, 0.0]];
    for j in 0..n {
        let r = left(j) + w;
        v.push([r, 0.0]);
        if j + 1 < n {
            v.push([r, y0]);
            v.push([r + g, y0]);
            v.push([r + g, 0.0]);
        }
    }
    for j in (0..n).rev() {
        let l = left(j);
        v.push([l + w, 1.0]);
        v.push([l, 1.0]);
        if j > 0 {
            v.push([l, y1]);
            v.push([l - g, y1]);
        }
    }
    RectilinearPolygon::new(v)
}

fn cuboid_bc(r: &Cuboid, bc: BcFamily) -> Cuboid {
    match bc {
        BcFamily::Dirichlet => r.with_bc(AxisBc::DirichletBoth),
        BcFamily::Neumann => r.with_bc(AxisBc::NeumannBoth),
        BcFamily::Zaremba => r.clone(),
    }
}

fn disk_bc(bc: BcFamily) -> Result<DiskBc> {
    match bc {
        BcFamily::Dirichlet => Ok(DiskBc::Dirichlet),
        BcFamily::Neumann => Ok(DiskBc::Neumann),
        BcFamily::Zaremba => Err(SpectraError::NotApplicable("disks carry no Zaremba partition".into())),
    }
}

/// k-th eigenvalue of `copies` disjoint congruent disks: the j-th disk value
/// repeated `copies` times, so index ⌈k/copies⌉ of one disk.
fn identical_disks_kth(bc: BcFamily, radius: f64, copies: usize, k: usize) -> Result<f64> {
    let j = k.div_ceil(copies);
    Ok(disk_spectrum(disk_bc(bc)?, radius, j)?.kth(j))
}

/// FEM mesh size for the k-th eigenvalue: modelled error about 1% of Weyl's value.
fn fem_h(area: f64, diam: f64, k: usize) -> f64 {
    let lam = 4.0 * PI * (k as f64 + 1.0) / area;
    (0.01 / (0.05 * lam)).sqrt().min(diam / 4.0)
}

fn shape_kth(shape: &Shape, bc: BcFamily, k: usize) -> Result<(f64, &'static str)> {
    match shape {
        Shape::Cuboid(r) => Ok((kth_eigenvalue(&cuboid_bc(r, bc), k)?, "exact_cuboid")),
        Shape::Ball(b) if b.dim == 2 => Ok((identical_disks_kth(bc, b.radius, 1, k)?, "exact_disk")),
        Shape::Ball(_) => Err(SpectraError::UnsupportedShape("exact ball spectra are available for d = 2 only".into())),
        other => {
            if k > FEM_K_GATE {
                return Err(SpectraError::CostGate(format!("FEM families are gated to k ≤ {FEM_K_GATE}, got {k}")));
            }
            let dom = match other {
                Shape::Polygon(p) => FemDomain::Polygon(p.clone()),
                Shape::Profile(p) => FemDomain::Profile(p.clone()),
                Shape::Rectilinear(p) => FemDomain::Rectilinear(p.clone()),
                _ => unreachable!(),
            };
            let h = fem_h(other.volume(), other.diameter(), k);
            Ok((solve_eigs(&dom, bc, k, h)?.kth(k), "fem"))
        }
    }
}

fn scaled_shape(shape: &Shape, t: f64) -> Result<Shape> {
    Ok(match shape {
        Shape::Cuboid(r) => Shape::Cuboid(r.scaled(t)?),
        Shape::Ball(b) => Shape::Ball(crate::geometry::Ball::new(b.radius * t, b.dim)?),
        Shape::Polygon(p) => Shape::Polygon(p.scaled(t)),
        Shape::Profile(p) => Shape::Profile(p.scaled(t)?),
        Shape::Rectilinear(p) => {
            Shape::Rectilinear(RectilinearPolygon::new(p.vertices().iter().map(|v| [t * v[0], t * v[1]]).collect())?)
        }
    })
}

/// Eigenvalue, volume, dimension and source of the k-th member of the family.
fn member(seq: &SequenceSpec, idx: usize, k: usize) -> Result<(f64, f64, usize, &'static str)> {
    match &seq.generator {
        Generator::DisjointBalls => {
            let (r, n) = ball_family(k);
            Ok((identical_disks_kth(seq.bc, r, n, k)?, n as f64 * PI * r * r, 2, "exact_union"))
        }
        Generator::DegenerateCuboids { d } => {
            let r = degenerate_cuboid(*d, k)?;
            Ok((kth_eigenvalue(&cuboid_bc(&r, seq.bc), k)?, r.volume(), *d, "exact_cuboid"))
        }
        Generator::Radiator { eps } => {
            if k > FEM_K_GATE {
                return Err(SpectraError::CostGate(format!("radiator family is gated to k ≤ {FEM_K_GATE}, got {k}")));
            }
            let shape = Shape::Rectilinear(radiator_polygon(k, *eps)?);
            let (v, src) = shape_kth(&shape, seq.bc, k)?;
            Ok((v, shape.volume(), 2, src))
        }
        Generator::ShrinkingTo { shape } => {
            let s = scaled_shape(shape, 1.0 + 1.0 / k as f64)?;
            let (v, src) = shape_kth(&s, seq.bc, k)?;
            Ok((v, s.volume(), s.dim(), src))
        }
        Generator::Custom { shapes } => {
            let s = shapes.get(idx).ok_or_else(|| SpectraError::InvalidInput("custom family is shorter than the k schedule".into()))?;
            let (v, src) = shape_kth(s, seq.bc, k)?;
            Ok((v, s.volume(), s.dim(), src))
        }
    }
}

/// Ratio of the k-th eigenvalue of Ω_k to W_d k^{2/d} |Ω_k|^{−2/d} along the schedule.
pub fn weyl_ratio(seq: &SequenceSpec) -> Result<Vec<WeylRow>> {
    if seq.k_schedule.is_empty() || seq.k_schedule.contains(&0) {
        return invalid("k schedule must be non-empty with k ≥ 1");
    }
    seq.k_schedule
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let (eigenvalue, volume, d, source) = member(seq, i, k)?;
            let weyl = weyl_constant(d) * (k as f64).powf(2.0 / d as f64) * volume.powf(-2.0 / d as f64);
            Ok(WeylRow { k, eigenvalue, volume, weyl, ratio: eigenvalue / weyl, source: source.into() })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallUnionReport {
    pub k: usize,
    pub components: usize,
    pub volume: f64,
    /// Number of zero Neumann eigenvalues (one per component).
    pub neumann_zero_block: usize,
    pub mu_k: f64,
    pub lambda_k: f64,
    /// λ_1 of the unit-area disk times k.
    pub lambda1_unit_ball_k: f64,
    /// W_2 k
    pub weyl: f64,
}

/// The k+1 disjoint disks of area 1/k.
pub fn disjoint_balls_report(k: usize) -> Result<BallUnionReport> {
    if k == 0 {
        return invalid("k must be at least 1");
    }
    let (r, n) = ball_family(k);
    let j = crate::reference_spectra::bessel_zero(0, 1)?;
    let mu = disk_spectrum(DiskBc::Neumann, r, 2)?;
    let zero_block = if mu.kth(2) > 0.0 { n } else { 2 * n };
    Ok(BallUnionReport {
        k,
        components: n,
        volume: n as f64 * PI * r * r,
        neumann_zero_block: zero_block,
        mu_k: identical_disks_kth(BcFamily::Neumann, r, n, k)?,
        lambda_k: identical_disks_kth(BcFamily::Dirichlet, r, n, k)?,
        lambda1_unit_ball_k: j * j * PI * k as f64,
        weyl: weyl_constant(2) * k as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerateCuboidReport {
    pub d: usize,
    pub k: usize,
    pub lambda_1: f64,
    pub lambda_k: f64,
    /// 9π² ω_d^{−2/d} k^{2/d}
    pub dirichlet_floor: f64,
    /// W_d k^{2/d}
    pub weyl: f64,
    /// μ_k(R_k)^{(d−1)/2}
    pub mu_power: f64,
    /// a_k^{−1} μ̃_k^{(d−1)/2} with μ̃_k from the unit (d−1)-cube
    pub face_bound: f64,
    /// 3^{−1} 2^{d−1} π^{d−1} ω_d^{1/d} ω_{d−1}^{−1} k^{(d−1)/d}
    pub closed_form: f64,
    /// (W_d k^{2/d})^{(d−1)/2}
    pub weyl_power: f64,
    /// λ_k ≥ λ_1 > floor > W_d k^{2/d}
    pub dirichlet_chain: bool,
    /// μ_k^{(d−1)/2} ≤ face bound ≤ closed form < Weyl power
    pub neumann_chain: bool,
}

/// Checks both displayed chains for the degenerate cuboid R_k.
pub fn degenerate_cuboid_report(d: usize, k: usize) -> Result<DegenerateCuboidReport> {
    if k == 0 {
        return invalid("k must be at least 1");
    }
    let r = degenerate_cuboid(d, k)?;
    let df = d as f64;
    let kf = k as f64;
    let wd = unit_ball_volume(d);
    let a = 1.0 / r.sides()[d - 1];
    let lambda_1 = kth_eigenvalue(&r, 1)?;
    let lambda_k = kth_eigenvalue(&r, k)?;
    let dirichlet_floor = 9.0 * PI * PI * wd.powf(-2.0 / df) * kf.powf(2.0 / df);
    let weyl = weyl_constant(d) * kf.powf(2.0 / df);
    let p = (df - 1.0) / 2.0;
    let mu_k = kth_eigenvalue(&r.with_bc(AxisBc::NeumannBoth), k)?;
    let face_mu = kth_eigenvalue(&Cuboid::unit_cube(d - 1, AxisBc::NeumannBoth), k)?;
    let mu_power = mu_k.powf(p);
    let face_bound = face_mu.powf(p) / a;
    let closed_form =
        2f64.powi(d as i32 - 1) * PI.powi(d as i32 - 1) * wd.powf(1.0 / df) / unit_ball_volume(d - 1) * kf.powf((df - 1.0) / df) / 3.0;
    let weyl_power = weyl.powf(p);
    Ok(DegenerateCuboidReport {
        d,
        k,
        lambda_1,
        lambda_k,
        dirichlet_floor,
        weyl,
        mu_power,
        face_bound,
        closed_form,
        weyl_power,
        dirichlet_chain: lambda_k >= lambda_1 && lambda_1 > dirichlet_floor && dirichlet_floor > weyl,
        neumann_chain: mu_power <= face_bound * (1.0 + 1e-12) && face_bound <= closed_form && closed_form < weyl_power,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum UnionFamily {
    /// ⌊k/ln(k+1)⌋ disks of radius N^{−1/2}, compared with the square of area 4.
    LogBalls,
    /// `count` unit squares.
    EqualSquares { count: usize },
    /// Fixed components (cuboids or disks in the plane).
    Components { shapes: Vec<Shape> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnionRow {
    pub k: usize,
    pub components: usize,
    pub volume: f64,
    pub lambda_k: f64,
    pub mu_k: f64,
    /// λ_k / (4πk/V)
    pub lambda_ratio: f64,
    /// μ_k / (4πk/V)
    pub mu_ratio: f64,
    /// μ_k of the square of side 2 and μ_k(Ω_k)/μ_k(S), for the log-balls family.
    pub square_mu: Option<f64>,
    pub mu_over_square: Option<f64>,
}

fn union_kth(shapes: &[Shape], bc: BcFamily, k: usize) -> Result<f64> {
    let parts = shapes
        .iter()
        .map(|s| match s {
            Shape::Cuboid(r) if r.dim() == 2 => spectrum_prefix(&cuboid_bc(r, bc), k),
            Shape::Ball(b) if b.dim == 2 => disk_spectrum(disk_bc(bc)?, b.radius, k),
            _ => Err(SpectraError::UnsupportedShape("union components must be planar rectangles or disks".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(merge_spectra(&parts)?.kth(k))
}

/// λ_k and μ_k of planar disjoint unions against 4πk/V.
pub fn disjoint_union_weyl(family: &UnionFamily, k_schedule: &[usize]) -> Result<Vec<UnionRow>> {
    k_schedule
        .iter()
        .map(|&k| {
            if k == 0 {
                return invalid("k must be at least 1");
            }
            let (n, volume, lambda_k, mu_k) = match family {
                UnionFamily::LogBalls => {
                    let n = ((k as f64 / (k as f64 + 1.0).ln()).floor() as usize).max(1);
                    let r = (n as f64).powf(-0.5);
                    let l = identical_disks_kth(BcFamily::Dirichlet, r, n, k)?;
                    let m = identical_disks_kth(BcFamily::Neumann, r, n, k)?;
                    (n, PI, l, m)
                }
                UnionFamily::EqualSquares { count } => {
                    let shapes = vec![Shape::Cuboid(Cuboid::unit_cube(2, AxisBc::DirichletBoth)); *count];
                    (*count, *count as f64, union_kth(&shapes, BcFamily::Dirichlet, k)?, union_kth(&shapes, BcFamily::Neumann, k)?)
                }
                UnionFamily::Components { shapes } => {
                    if shapes.is_empty() {
                        return invalid("union needs at least one component");
                    }
                    let v = shapes.iter().map(|s| s.volume()).sum();
                    (shapes.len(), v, union_kth(shapes, BcFamily::Dirichlet, k)?, union_kth(shapes, BcFamily::Neumann, k)?)
                }
            };
            let w = 4.0 * PI * k as f64 / volume;
            let square_mu = match family {
                UnionFamily::LogBalls => Some(kth_eigenvalue(&Cuboid::uniform(vec![2.0, 2.0], AxisBc::NeumannBoth)?, k)?),
                _ => None,
            };
            Ok(UnionRow {
                k,
                components: n,
                volume,
                lambda_k,
                mu_k,
                lambda_ratio: lambda_k / w,
                mu_ratio: mu_k / w,
                square_mu,
                mu_over_square: square_mu.map(|s| mu_k / s),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiatorRow {
    pub eps: f64,
    pub h: f64,
    pub lambda_k: f64,
    pub mu_2: f64,
    pub mu_k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiatorReport {
    pub k: usize,
    pub rows: Vec<RadiatorRow>,
    /// λ_k of k decoupled rectangles (0,1/k)×(0,1): π²(k² + 1).
    pub decoupled_lambda_k: f64,
    pub pi2_k2: f64,
    /// Mesh ladder at the first ε, if requested.
    pub richardson: Option<RichardsonReport>,
    pub qualitative: bool,
}

/// FEM sweep over tube widths for the k-rectangle radiator. All widths share
/// h = min(eps)·h_factor, so the tubes are resolved and the discretization
/// error is comparable across the sweep.
pub fn radiator_experiment(k: usize, eps_list: &[f64], h_factor: f64, ladder: bool) -> Result<RadiatorReport> {
    if !(2..=FEM_K_GATE).contains(&k) {
        return Err(SpectraError::CostGate(format!("radiator experiment needs 2 ≤ k ≤ {FEM_K_GATE}")));
    }
    if !(h_factor > 0.0 && h_factor <= 1.0) {
        return invalid("h_factor must lie in (0, 1]");
    }
    let eps_min = eps_list.iter().cloned().fold(f64::INFINITY, f64::min);
    let h = eps_min * h_factor;
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let dom = FemDomain::Rectilinear(radiator_polygon(k, eps)?);
        let lam = solve_eigs(&dom, BcFamily::Dirichlet, k, h)?;
        let mu = solve_eigs(&dom, BcFamily::Neumann, k.max(2), h)?;
        rows.push(RadiatorRow { eps, h, lambda_k: lam.kth(k), mu_2: mu.kth(2), mu_k: mu.kth(k) });
    }
    let richardson = match (ladder, eps_list.first()) {
        (true, Some(&eps)) => {
            let dom = FemDomain::Rectilinear(radiator_polygon(k, eps)?);
            let h0 = h * 2.0;
            Some(refine_extrapolate(&dom, BcFamily::Dirichlet, k, &[h0, h0 / 2.0, h0 / 4.0])?)
        }
        _ => None,
    };
    let kf = k as f64;
    Ok(RadiatorReport {
        k,
        rows,
        decoupled_lambda_k: PI * PI * (kf * kf + 1.0),
        pi2_k2: PI * PI * kf * kf,
        richardson,
        qualitative: true,
    })
}

/// λ_k(αΩ) and α^{−2}λ_k(Ω) for a cuboid Ω; the two agree up to rounding.
pub fn shrinking_copies(r: &Cuboid, alphas: &[f64], k: usize) -> Result<Vec<(f64, f64, f64)>> {
    let base = kth_eigenvalue(r, k)?;
    alphas.iter().map(|&a| Ok((a, kth_eigenvalue(&r.scaled(a)?, k)?, base / (a * a)))).collect()
}

/// Modelled FEM error of a row, for reporting.
pub fn radiator_error_estimate(row: &RadiatorRow) -> f64 {
    estimated_error(row.lambda_k, row.h)
}
