//! One function per subcommand. Each returns a [`Bundle`]; nothing touches
//! the filesystem here apart from reading inputs.

use std::fmt::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde_json::json;
use spectra_lab::counting_bounds::{
    default_n, dirichlet_count_lower, dirichlet_eig_upper, n2_certificate, n2_scan_table, neumann_count_upper,
    neumann_eig_lower, PRINTED_N2_THRESHOLD,
};
use spectra_lab::cuboid_spectra::{counting, kth_eigenvalue, spectrum_prefix};
use spectra_lab::fem2d::{refine_extrapolate, solve_mesh, triangulate, FemDomain};
use spectra_lab::geometry::{quermass, AxisBc, Cuboid, Point, Shape, Signature};
use spectra_lab::shape_opt::{
    isoperimetric_profile, optimize_cuboid_with, optimize_polygon_with, optimize_profile_zaremba_with, Constraint,
    ConstraintKind, CuboidOptOptions, OptimizationResult, OptimizedShape, PolygonOptOptions, ZarembaOptOptions,
};
use spectra_lab::weyl_lab::{disjoint_union_weyl, weyl_ratio, Generator, SequenceSpec, UnionFamily};
use spectra_lab::BcFamily;

use crate::output::Bundle;
use crate::svg::{self, Series};
use crate::{
    BoundsCheckArgs, ClassArg, Command, CuboidOptimizeArgs, CuboidSpectrumArgs, CliError, Ctx, FamilyArg, FemSolveArgs,
    IsoperimetricArgs, N2Args, OptimizeArgs, WeylArgs,
};

pub fn run(cmd: &Command, ctx: &mut Ctx) -> Result<Bundle, CliError> {
    match cmd {
        Command::CuboidSpectrum(a) => cuboid_spectrum(a),
        Command::CuboidOptimize(a) => cuboid_optimize(a, ctx),
        Command::BoundsCheck(a) => bounds_check(a, ctx),
        Command::N2Certificate(a) => n2(a),
        Command::FemSolve(a) => fem_solve(a, ctx),
        Command::Optimize(a) => optimize(a, ctx),
        Command::Isoperimetric(a) => isoperimetric(a, ctx).map(|(b, _)| b),
        Command::Weyl(a) => weyl(a, ctx),
        Command::Reproduce(a) => crate::reproduce::run(a.section, ctx),
    }
}

/// Order-preserving map over independent items on up to `jobs` threads.
pub fn par_map<T: Sync, R: Send>(jobs: usize, items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = items.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..jobs.min(items.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                *slots[i].lock().unwrap() = Some(r);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().unwrap().expect("every slot filled")).collect()
}

fn json_pretty<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("value serializes") + "\n"
}

fn signature(v: &[usize]) -> Result<Signature, CliError> {
    match v {
        [a, b, c] if a + b + c >= 1 => Ok(Signature::new(*a, *b, *c)),
        _ => Err(CliError::validation("--signature takes three counts a,b,c with a+b+c ≥ 1")),
    }
}

fn rectangle(sides: &[f64]) -> Vec<Point> {
    vec![[0.0, 0.0], [sides[0], 0.0], [sides[0], sides[1]], [0.0, sides[1]]]
}

/// Outline of an optimizer result when it is planar.
fn outline(shape: &OptimizedShape) -> Option<Vec<Point>> {
    match shape {
        OptimizedShape::Cuboid(r) if r.dim() == 2 => Some(rectangle(r.sides())),
        OptimizedShape::Cuboid(_) => None,
        OptimizedShape::Polygon(p) => Some(p.vertices().to_vec()),
        OptimizedShape::Profile(p) => Some(p.boundary_loop()),
    }
}

fn cuboid_spectrum(a: &CuboidSpectrumArgs) -> Result<Bundle, CliError> {
    let d = a.sides.len();
    let codes: Vec<&str> = match a.bc.len() {
        1 => vec![a.bc[0].as_str(); d],
        n if n == d => a.bc.iter().map(String::as_str).collect(),
        n => return Err(CliError::validation(format!("--bc has {n} codes for {d} sides"))),
    };
    let bcs = codes
        .iter()
        .map(|c| AxisBc::from_code(c).ok_or_else(|| CliError::validation(format!("unknown boundary code {c:?}; use D, N or Z"))))
        .collect::<Result<Vec<_>, _>>()?;
    let r = Cuboid::new(a.sides.clone(), bcs)?;
    let s = spectrum_prefix(&r, a.k)?;
    let mut b = Bundle::default();
    b.summary = s.to_csv();
    b.add("spectrum.csv", s.to_csv());
    b.add("spectrum.json", s.to_json() + "\n");
    Ok(b)
}

fn cuboid_opts(ctx: &Ctx) -> CuboidOptOptions {
    CuboidOptOptions { seed: ctx.seed, ..Default::default() }
}

fn cuboid_optimize(a: &CuboidOptimizeArgs, ctx: &Ctx) -> Result<Bundle, CliError> {
    let sig = signature(&a.signature)?;
    let c = Constraint { kind: a.constraint.into(), value: a.value };
    let mut b = Bundle::default();
    if a.ks.is_empty() {
        let k = a.k.expect("clap requires --k without --ks");
        let res = optimize_cuboid_with(sig, k, c, sig.dim(), &cuboid_opts(ctx))?;
        push_result(&mut b, &res, "result");
        return Ok(b);
    }
    if a.ks.windows(2).any(|w| w[0] >= w[1]) || a.ks[0] == 0 {
        return Err(CliError::validation("--ks must be positive and increasing"));
    }
    let results = par_map(ctx.jobs, &a.ks, |&k| optimize_cuboid_with(sig, k, c, sig.dim(), &cuboid_opts(ctx)));
    let results = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut csv = String::from("k,objective,spread,status,sides\n");
    for res in &results {
        let OptimizedShape::Cuboid(r) = &res.shape else { unreachable!("cuboid optimizer returns cuboids") };
        let mut sides = r.sides().to_vec();
        sides.sort_by(|x, y| y.total_cmp(x));
        let spread = sides[0] / sides[sides.len() - 1];
        let joined: Vec<String> = sides.iter().map(|s| s.to_string()).collect();
        let _ = writeln!(csv, "{},{},{},{},{}", res.k, res.objective, spread, status_name(res), joined.join(";"));
    }
    b.summary = csv.clone();
    b.add("trajectory.csv", csv);
    b.add("trajectory.json", json_pretty(&results));
    Ok(b)
}

fn status_name(res: &OptimizationResult) -> String {
    serde_json::to_value(res.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

fn push_result(b: &mut Bundle, res: &OptimizationResult, stem: &str) {
    b.line(format!("objective {} status {} k {}", res.objective, status_name(res), res.k));
    for n in &res.notes {
        b.line(format!("  {n}"));
    }
    b.add(format!("{stem}.json"), res.to_json() + "\n");
    if let Some(pts) = outline(&res.shape) {
        b.add(format!("{stem}.svg"), svg::polygon(&pts, &format!("k = {}, objective {:.6}", res.k, res.objective)));
    }
}

fn bounds_check(a: &BoundsCheckArgs, ctx: &mut Ctx) -> Result<Bundle, CliError> {
    let shape = Shape::from_json(&ctx.read_input(&a.shape)?)?;
    let q = quermass(&shape)?;
    let n = a.n.unwrap_or_else(|| a.k.map(default_n).unwrap_or(1));
    let cuboid = match &shape {
        Shape::Cuboid(r) => Some(r),
        _ => None,
    };
    let mut certs = Vec::new();
    let mut checks = Vec::new();
    let mut b = Bundle::default();
    let mut check = |b: &mut Bundle, name: &str, bound: f64, exact: f64, holds: bool| {
        b.line(format!("{name}: bound {bound} exact {exact} {}", if holds { "ok" } else { "VIOLATED" }));
        if !holds {
            b.failures.push(format!("{name}: bound {bound} vs exact {exact}"));
        }
        checks.push(json!({ "name": name, "bound": bound, "exact": exact, "holds": holds }));
    };
    if let Some(alpha) = a.alpha {
        let up = neumann_count_upper(&q, alpha, n)?;
        let lo = dirichlet_count_lower(&q, alpha, n)?;
        b.line(format!("N_neumann({alpha}) <= {}", up.value));
        b.line(format!("N_dirichlet({alpha}) >= {}", lo.value));
        if let Some(r) = cuboid {
            let nn = counting(&r.with_bc(AxisBc::NeumannBoth), alpha) as f64;
            let nd = counting(&r.with_bc(AxisBc::DirichletBoth), alpha) as f64;
            check(&mut b, "neumann_count_upper", up.value, nn, up.value >= nn);
            check(&mut b, "dirichlet_count_lower", lo.value, nd, lo.value <= nd);
        }
        certs.push(up);
        certs.push(lo);
    }
    if let Some(k) = a.k {
        let lo = neumann_eig_lower(&q, k, n)?;
        let up = dirichlet_eig_upper(&q, k, n)?;
        b.line(format!("mu_{k} >= {}", lo.value));
        b.line(format!("lambda_{k} <= {}", up.value));
        if let Some(r) = cuboid {
            let mu = kth_eigenvalue(&r.with_bc(AxisBc::NeumannBoth), k)?;
            let la = kth_eigenvalue(&r.with_bc(AxisBc::DirichletBoth), k)?;
            check(&mut b, "neumann_eig_lower", lo.value, mu, lo.value <= mu);
            check(&mut b, "dirichlet_eig_upper", up.value, la, up.value >= la);
        }
        certs.push(lo);
        certs.push(up);
    }
    let body = json!({ "n": n, "quermass": q, "certificates": certs, "checks": checks });
    b.add("certificate.json", json_pretty(&body));
    Ok(b)
}

fn n2(a: &N2Args) -> Result<Bundle, CliError> {
    if a.from == 0 || a.from > a.to || a.to - a.from > 1_000_000 {
        return Err(CliError::validation("scan range needs 1 ≤ from ≤ to and at most 10^6 rows"));
    }
    let cert = n2_certificate();
    let k = cert.value as u64;
    let mut csv = String::from("k,lhs,holds\n");
    for (k, lhs, holds) in n2_scan_table(a.from..=a.to) {
        let _ = writeln!(csv, "{k},{lhs},{holds}");
    }
    let discrepancy = cert.notes.iter().find(|n| n.contains("printed threshold")).cloned();
    let body = json!({
        "threshold": k,
        "printed_threshold": PRINTED_N2_THRESHOLD,
        "differs_from_printed": k != PRINTED_N2_THRESHOLD,
        "discrepancy_note": discrepancy,
        "certificate": cert,
    });
    let mut b = Bundle::default();
    b.line(format!("smallest k with 56 sqrt(2k) + 8 pi < k: {k}"));
    if let Some(d) = &discrepancy {
        b.line(d);
    }
    b.add("n2.json", json_pretty(&body));
    b.add("n2_scan.csv", csv);
    Ok(b)
}

fn fem_solve(a: &FemSolveArgs, ctx: &mut Ctx) -> Result<Bundle, CliError> {
    let domain = FemDomain::from_json(&ctx.read_input(&a.domain)?)?;
    let bc: BcFamily = a.bc.into();
    let tagged = domain.tagged(bc)?;
    let mesh = triangulate(&tagged, a.h)?;
    let s = solve_mesh(&mesh, bc, a.k)?;
    let mut b = Bundle::default();
    b.summary = s.to_csv();
    b.add("spectrum.csv", s.to_csv());
    b.add("spectrum.json", s.to_json() + "\n");
    b.add("domain.svg", svg::polygon(&tagged.vertices, "domain"));
    if a.export_mesh {
        b.add("mesh.json", mesh.to_json() + "\n");
    }
    if a.ladder {
        let rep = refine_extrapolate(&domain, bc, a.k, &[a.h, a.h / 2.0, a.h / 4.0])?;
        b.line(format!("extrapolated {:?}", rep.extrapolated));
        b.line(format!("observed order {:?}", rep.order));
        b.add("richardson.json", json_pretty(&rep));
    }
    Ok(b)
}

fn optimize(a: &OptimizeArgs, ctx: &Ctx) -> Result<Bundle, CliError> {
    let default_kind = match a.class {
        ClassArg::Cuboid => ConstraintKind::Volume,
        _ => ConstraintKind::Perimeter,
    };
    let c = Constraint { kind: a.constraint.map(Into::into).unwrap_or(default_kind), value: a.value };
    let res = match a.class {
        ClassArg::Cuboid => {
            let sig = signature(&a.signature)?;
            let mut o = cuboid_opts(ctx);
            o.starts = a.starts.unwrap_or(o.starts);
            o.max_iter = a.max_iter.unwrap_or(o.max_iter);
            optimize_cuboid_with(sig, a.k, c, sig.dim(), &o)?
        }
        ClassArg::Polygon => {
            let d = PolygonOptOptions::default();
            let o = PolygonOptOptions {
                seed: ctx.seed,
                starts: a.starts.unwrap_or(d.starts),
                max_iter: a.max_iter.unwrap_or(d.max_iter),
                ..d
            };
            optimize_polygon_with(a.n, a.bc.into(), a.k, c, &o)?
        }
        ClassArg::Profile => {
            if c.kind != ConstraintKind::Perimeter || c.value != 1.0 {
                return Err(CliError::validation("profile optimization runs at unit perimeter only"));
            }
            let d = ZarembaOptOptions::default();
            let o = ZarembaOptOptions { max_iter: a.max_iter.unwrap_or(d.max_iter), ..d };
            optimize_profile_zaremba_with(a.lipschitz, a.k, &o)?
        }
    };
    let mut b = Bundle::default();
    push_result(&mut b, &res, "result");
    Ok(b)
}

/// Also returns the per-L results for the reproduction checks.
pub fn isoperimetric(a: &IsoperimetricArgs, ctx: &Ctx) -> Result<(Bundle, Vec<OptimizationResult>), CliError> {
    if a.lipschitz.is_empty() {
        return Err(CliError::validation("--lipschitz needs at least one value"));
    }
    let results = par_map(ctx.jobs, &a.lipschitz, |&l| isoperimetric_profile(l, a.m));
    let results = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut b = Bundle::default();
    let mut csv = String::from("lipschitz,area,perimeter,lens_area,area_over_lens,symmetric\n");
    for (&l, res) in a.lipschitz.iter().zip(&results) {
        let OptimizedShape::Profile(p) = &res.shape else { unreachable!("profile solver returns profiles") };
        let lens = spectra_lab::shape_opt::arc_lens_area(l);
        let _ = writeln!(csv, "{l},{},{},{lens},{},{}", p.area(), p.perimeter(), p.area() / lens, p.is_symmetric(0.0));
        b.add(format!("profile_L{l}.json"), res.to_json() + "\n");
        b.add(format!("profile_L{l}.svg"), svg::polygon(&p.boundary_loop(), &format!("L = {l}, area {:.6}", p.area())));
    }
    b.summary = csv.clone();
    b.add("areas.csv", csv);
    Ok((b, results))
}

fn weyl(a: &WeylArgs, ctx: &mut Ctx) -> Result<Bundle, CliError> {
    let mut b = Bundle::default();
    let union = match a.family {
        FamilyArg::LogBalls => Some(UnionFamily::LogBalls),
        FamilyArg::EqualSquares => Some(UnionFamily::EqualSquares { count: a.count }),
        _ => None,
    };
    if let Some(family) = union {
        let ks = if a.ks.is_empty() { vec![100, 1_000, 10_000, 100_000] } else { a.ks.clone() };
        let rows = disjoint_union_weyl(&family, &ks)?;
        let mut csv = String::from("k,components,volume,lambda_k,mu_k,lambda_ratio,mu_ratio\n");
        for r in &rows {
            let _ = writeln!(csv, "{},{},{},{},{},{},{}", r.k, r.components, r.volume, r.lambda_k, r.mu_k, r.lambda_ratio, r.mu_ratio);
        }
        let series = [
            Series { label: "dirichlet", points: rows.iter().map(|r| (r.k as f64, r.lambda_ratio)).collect() },
            Series { label: "neumann", points: rows.iter().map(|r| (r.k as f64, r.mu_ratio)).collect() },
        ];
        b.summary = csv.clone();
        b.add("weyl.csv", csv);
        b.add("weyl.json", json_pretty(&rows));
        b.add("ratio.svg", svg::log_x_plot(&series, Some(1.0), "eigenvalue / Weyl term", "ratio"));
        return Ok(b);
    }
    let generator = match a.family {
        FamilyArg::DegenerateCuboids => Generator::DegenerateCuboids { d: a.d },
        FamilyArg::DisjointBalls => Generator::DisjointBalls,
        FamilyArg::Radiator => Generator::Radiator { eps: a.eps },
        FamilyArg::ShrinkingSquares => {
            let shape = match &a.shape {
                Some(p) => Shape::from_json(&ctx.read_input(p)?)?,
                None => Shape::Cuboid(Cuboid::uniform(vec![1.0, 1.0], AxisBc::DirichletBoth)?),
            };
            Generator::ShrinkingTo { shape }
        }
        FamilyArg::LogBalls | FamilyArg::EqualSquares => unreachable!("handled above"),
    };
    let mut specs = Vec::new();
    for &bc in &a.bc {
        let mut spec = SequenceSpec::with_default_schedule(generator.clone(), bc.into());
        if !a.ks.is_empty() {
            spec.k_schedule = a.ks.clone();
        }
        specs.push(spec);
    }
    let rows = par_map(ctx.jobs, &specs, weyl_ratio).into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut csv = String::from("bc,k,eigenvalue,volume,weyl,ratio,source\n");
    let mut series = Vec::new();
    let names: Vec<String> = specs.iter().map(|s| format!("{:?}", s.bc).to_lowercase()).collect();
    for (name, rs) in names.iter().zip(&rows) {
        for r in rs {
            let _ = writeln!(csv, "{name},{},{},{},{},{},{}", r.k, r.eigenvalue, r.volume, r.weyl, r.ratio, r.source);
        }
        series.push(Series { label: name, points: rs.iter().map(|r| (r.k as f64, r.ratio)).collect() });
    }
    b.summary = csv.clone();
    b.add("weyl.csv", csv);
    b.add("weyl.json", json_pretty(&specs.iter().zip(&rows).map(|(s, r)| json!({ "spec": s, "rows": r })).collect::<Vec<_>>()));
    b.add("ratio.svg", svg::log_x_plot(&series, Some(1.0), "eigenvalue / Weyl term", "ratio"));
    Ok(b)
}
