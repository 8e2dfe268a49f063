//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (harness = false). Failures are reported, not
//! panicked on, so the rest of the suite still runs; set ACCEPTANCE_STRICT=1
//! to turn any failure into a nonzero exit status.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spectra_lab::counting_bounds::{
    dirichlet_count_lower, n2_certificate, n2_lhs, neumann_count_upper, zaremba_cuboid_lower, PRINTED_N2_THRESHOLD,
};
use spectra_lab::cuboid_spectra::{counting, interval_eigenvalue, kth_eigenvalue, polya_check, spectrum_prefix};
use spectra_lab::fem2d::{
    assemble, refine_extrapolate, solve_eigs, solve_mesh, sturm_count, triangulate, EdgeTag, FemDomain, TaggedPolygon,
};
use spectra_lab::geometry::{
    quermass, weyl_constant, AxisBc, ConvexPolygon, Cuboid, ProfileDomain, Shape, Signature,
};
use spectra_lab::reference_spectra::bessel_zero;
use spectra_lab::shape_opt::{
    arc_lens_area, isoperimetric_profile, minimizer_trajectory, optimize_cuboid, profile_zaremba_eigenvalue,
    project_slopes, prop23_bound, Constraint, ConstraintKind, OptStatus, OptimizedShape,
};
use spectra_lab::weyl_lab::{degenerate_cuboid_report, disjoint_balls_report, weyl_ratio, Generator, SequenceSpec};
use spectra_lab::BcFamily;

type Outcome = (bool, String);

fn signatures(d: usize) -> Vec<Signature> {
    let mut v = Vec::new();
    for a in 0..=d {
        for b in 0..=d - a {
            v.push(Signature::new(a, b, d - a - b));
        }
    }
    v
}

/// Sorted tensor sums over a per-axis truncation that provably contains
/// the first `k` eigenvalues. Axis contributions are added in axis order.
fn brute_force(r: &Cuboid, k: usize) -> Vec<f64> {
    let d = r.dim();
    let e = |a: usize, j: u32| interval_eigenvalue(r.axis_bc()[a], j, r.sides()[a]);
    let grid = |counts: &[u32]| -> Vec<f64> {
        let mut out = Vec::new();
        let mut idx = vec![1u32; d];
        loop {
            let mut s = 0.0;
            for a in 0..d {
                s += e(a, idx[a]);
            }
            out.push(s);
            let mut a = 0;
            loop {
                if a == d {
                    out.sort_by(f64::total_cmp);
                    return out;
                }
                idx[a] += 1;
                if idx[a] <= counts[a] {
                    break;
                }
                idx[a] = 1;
                a += 1;
            }
        }
    };
    // Any k tensor sums bound λ_k from above; keep every index that can
    // still produce a value at or below that bound.
    let start = (k as f64).powf(1.0 / d as f64).ceil() as u32;
    let upper = grid(&vec![start; d])[k - 1];
    let floor: Vec<f64> = (0..d).map(|a| e(a, 1)).collect();
    let total: f64 = floor.iter().sum();
    let counts: Vec<u32> = (0..d)
        .map(|a| {
            let mut j = 1;
            while e(a, j + 1) + (total - floor[a]) <= upper {
                j += 1;
            }
            j
        })
        .collect();
    let mut out = grid(&counts);
    out.truncate(k);
    out
}

fn random_box(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| (rng.gen_range(-1.5f64..1.5)).exp()).collect()
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let k = 2000;
    let mut cases = 0;
    for d in [2usize, 3, 4] {
        for _ in 0..20 {
            let sides = random_box(&mut rng, d);
            for sig in signatures(d) {
                let r = Cuboid::with_signature(sides.clone(), sig).unwrap();
                let oracle = brute_force(&r, k);
                let got = spectrum_prefix(&r, k).unwrap();
                for i in 0..k {
                    if got.values[i].to_bits() != oracle[i].to_bits() {
                        return (false, format!("d={d} {sig} sides {sides:?}: k={} got {} want {}", i + 1, got.values[i], oracle[i]));
                    }
                }
                for kk in [1, 17, 500, k] {
                    let v = kth_eigenvalue(&r, kk).unwrap();
                    if v.to_bits() != oracle[kk - 1].to_bits() {
                        return (false, format!("kth_eigenvalue d={d} {sig} k={kk}: {v} vs {}", oracle[kk - 1]));
                    }
                }
                cases += 1;
            }
        }
    }
    (true, format!("{cases} box/signature cases bit-identical for k <= {k}"))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let k = 500;
    for i in 0..100 {
        let d = 2 + i % 2;
        let sides = random_box(&mut rng, d);
        let sigs = signatures(d);
        let sig = sigs[rng.gen_range(0..sigs.len())];
        let z = Cuboid::with_signature(sides.clone(), sig).unwrap();
        let mu = spectrum_prefix(&z.with_bc(AxisBc::NeumannBoth), k).unwrap();
        let la = spectrum_prefix(&z.with_bc(AxisBc::DirichletBoth), k).unwrap();
        let ze = spectrum_prefix(&z, k).unwrap();
        for j in 0..k {
            if !(mu.values[j] <= ze.values[j] && ze.values[j] <= la.values[j]) {
                return (false, format!("box {i} {sig} k={}: {} {} {}", j + 1, mu.values[j], ze.values[j], la.values[j]));
            }
        }
    }
    for d in [2, 3] {
        let rep = polya_check(&Cuboid::unit_cube(d, AxisBc::DirichletBoth), 10_000).unwrap();
        if let Some(v) = rep.first_violation {
            return (false, format!("Pólya violated on the unit {d}-cube at k={}", v.k));
        }
    }
    (true, "100 boxes bracketed for k <= 500; Pólya holds on unit square and cube for k <= 10^4".into())
}

fn short_side(shape: &OptimizedShape) -> f64 {
    let OptimizedShape::Cuboid(r) = shape else { panic!("cuboid expected") };
    r.sides()[0].min(r.sides()[1])
}

fn criterion_3() -> Outcome {
    let unit = Constraint::unit(ConstraintKind::Volume);
    let sig = Signature::new(0, 0, 2);
    let ks = [25usize, 50, 100, 200, 400];
    let mut a = Vec::new();
    let mut detail = Vec::new();
    for &k in &ks {
        let res = optimize_cuboid(sig, k, unit, 2).unwrap();
        a.push(short_side(&res.shape));
        // Independent check: no point of a dense aspect scan beats the optimizer.
        let scan = (0..=20_000)
            .map(|i| {
                let t = (i as f64 / 20_000.0) * (1e4f64).ln();
                let s = (-t / 2.0).exp();
                kth_eigenvalue(&Cuboid::with_signature(vec![s, 1.0 / s], sig).unwrap(), k).unwrap()
            })
            .fold(f64::INFINITY, f64::min);
        if res.objective > scan * (1.0 + 1e-9) {
            return (false, format!("k={k}: optimizer {} worse than scan {scan}", res.objective));
        }
        detail.push(format!("{:.5}", a.last().unwrap()));
    }
    let bound = prop23_bound(100).unwrap();
    let below = a[2] < bound && bound < 0.2476 + 5e-5;
    let decreasing = a.windows(2).all(|w| w[1] < w[0]);
    (below && decreasing, format!("a*_k = [{}], bound(100) = {bound:.5}, decreasing {decreasing}", detail.join(", ")))
}

fn criterion_4() -> Outcome {
    let per = Constraint::unit(ConstraintKind::Perimeter);
    let rows = minimizer_trajectory(Signature::new(2, 0, 0), per, &[10, 100, 1000, 2000], 2).unwrap();
    let spreads: Vec<f64> = rows.iter().map(|r| r.spread).collect();
    let small = spreads[3] <= 1.05;
    let monotone = spreads.windows(2).all(|w| w[1] < w[0]);
    let res = optimize_cuboid(Signature::new(1, 2, 0), 3, per, 3).unwrap();
    let degenerate = res.status == OptStatus::Degenerating && res.objective < 1e-3;
    let s: Vec<String> = spreads.iter().map(|v| format!("{v:.4}")).collect();
    (
        small && monotone && degenerate,
        format!(
            "spreads [{}]: <= 1.05 at 2000 {small}, monotone {monotone} (true minimizers oscillate); \
             (1,2,0) d=3: {:?} objective {:.2e}",
            s.join(", "),
            res.status,
            res.objective
        ),
    )
}

fn min_corner_deg(p: &ConvexPolygon) -> f64 {
    let v = p.vertices();
    let n = v.len();
    (0..n)
        .map(|i| {
            let (a, b, c) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
            let (u, w) = ([a[0] - b[0], a[1] - b[1]], [c[0] - b[0], c[1] - b[1]]);
            let cos = (u[0] * w[0] + u[1] * w[1]) / (u[0].hypot(u[1]) * w[0].hypot(w[1]));
            cos.clamp(-1.0, 1.0).acos().to_degrees()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Random hull, rejected when a corner is sharper than 30° (the mesher's
/// quality gate cannot be met there), scaled to unit area.
fn random_polygon(rng: &mut ChaCha8Rng) -> ConvexPolygon {
    loop {
        let n = rng.gen_range(5..14);
        let pts: Vec<[f64; 2]> = (0..n)
            .map(|_| {
                let r = rng.gen_range(0.0f64..1.0).sqrt();
                let t = rng.gen_range(0.0..2.0 * PI);
                [r * t.cos() * rng.gen_range(0.4..1.0), r * t.sin()]
            })
            .collect();
        if let Ok(p) = ConvexPolygon::hull(&pts) {
            if p.area() > 0.05 && min_corner_deg(&p) >= 30.0 {
                return p.scaled(p.area().powf(-0.5));
            }
        }
    }
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let alphas: Vec<f64> = (0..=40).map(|i| 10f64.powf(i as f64 / 10.0)).collect();
    let mut checked = 0;
    for d in [2usize, 3] {
        let mut boxes = vec![vec![1.0; d]];
        boxes.extend((0..5).map(|_| random_box(&mut rng, d)));
        for sides in boxes {
            let r = Cuboid::uniform(sides.clone(), AxisBc::NeumannBoth).unwrap();
            let q = quermass(&Shape::Cuboid(r.clone())).unwrap();
            for &alpha in &alphas {
                let nn = counting(&r, alpha) as f64;
                let nd = counting(&r.with_bc(AxisBc::DirichletBoth), alpha) as f64;
                for n in [1, 2, 4] {
                    let up = neumann_count_upper(&q, alpha, n).unwrap().value;
                    let lo = dirichlet_count_lower(&q, alpha, n).unwrap().value;
                    if up < nn || lo > nd {
                        return (false, format!("box {sides:?} alpha {alpha} n {n}: U {up} vs {nn}, L {lo} vs {nd}"));
                    }
                    checked += 1;
                }
            }
        }
    }
    // Random polygons against Sturm counts of the P1 discretization. The
    // discrete eigenvalues lie above the true ones and within 1% of them at
    // this mesh size up to α = 10³, so N(α) ≤ N_h(1.01α) and N(α) ≥ N_h(α).
    let h = (0.01f64 / (0.05 * 1e3)).sqrt();
    let grid: Vec<f64> = (1..=20).map(|i| 1e3 * i as f64 / 20.0).collect();
    for i in 0..50 {
        let p = random_polygon(&mut rng);
        let q = quermass(&Shape::Polygon(p.clone())).unwrap();
        let neu = assemble(&triangulate(&TaggedPolygon::from_convex(&p, EdgeTag::NeumannPart), h).unwrap());
        let dir = assemble(&triangulate(&TaggedPolygon::from_convex(&p, EdgeTag::DirichletPart), h).unwrap());
        for &alpha in &grid {
            let up = neumann_count_upper(&q, alpha, 1).unwrap().value;
            let lo = dirichlet_count_lower(&q, alpha, 1).unwrap().value;
            let nn = sturm_count(&neu.stiffness, &neu.mass, 1.01 * alpha).unwrap() as f64;
            let nd = sturm_count(&dir.stiffness, &dir.mass, alpha).unwrap() as f64;
            if up < nn || lo > nd {
                return (false, format!("polygon {i} alpha {alpha}: U {up} vs {nn}, L {lo} vs {nd}"));
            }
        }
    }
    (true, format!("{checked} cuboid checks with zero margin; 50 polygons x 20 thresholds vs FEM counts (h = {h:.4})"))
}

fn criterion_6() -> Outcome {
    let cert = n2_certificate();
    let k = cert.value as u64;
    let ok = (6000..=6500).contains(&k)
        && n2_lhs(k) < k as f64
        && n2_lhs(k - 1) >= (k - 1) as f64
        && cert.notes.iter().any(|n| n.contains(&PRINTED_N2_THRESHOLD.to_string()));
    (ok, format!("threshold {k}, printed {PRINTED_N2_THRESHOLD} flagged"))
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn criterion_7() -> Outcome {
    let square = FemDomain::Polygon(ConvexPolygon::rectangle(1.0, 1.0).unwrap());
    let h = 1.0 / 64.0;
    let l1 = solve_eigs(&square, BcFamily::Dirichlet, 1, h).unwrap().kth(1);
    let mu2 = solve_eigs(&square, BcFamily::Neumann, 2, h).unwrap().kth(2);
    let tags = [EdgeTag::DirichletPart, EdgeTag::NeumannPart, EdgeTag::NeumannPart, EdgeTag::NeumannPart];
    let mixed = TaggedPolygon::rectangle(1.0, 1.0, tags).unwrap();
    let z1 = solve_mesh(&triangulate(&mixed, 1.0 / 32.0).unwrap(), BcFamily::Zaremba, 1).unwrap().kth(1);
    let rich = refine_extrapolate(&square, BcFamily::Dirichlet, 1, &[1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0]).unwrap();
    let p = rich.order[0];
    let j = bessel_zero(0, 1).unwrap();
    let disk = FemDomain::Polygon(ConvexPolygon::regular(256, 1.0).unwrap());
    let d1 = solve_eigs(&disk, BcFamily::Dirichlet, 1, 0.04).unwrap().kth(1);
    let errs = [rel(l1, 2.0 * PI * PI), rel(mu2, PI * PI), rel(z1, PI * PI / 4.0), rel(d1, j * j)];
    let ok = errs[0] < 5e-3 && errs[1] < 5e-3 && errs[2] < 1e-2 && (1.8..=2.2).contains(&p) && errs[3] < 1e-2;
    (
        ok,
        format!(
            "rel err lambda1 {:.2e}, mu2 {:.2e}, zeta1 {:.2e}, disk {:.2e}; Richardson order {p:.3}",
            errs[0], errs[1], errs[2], errs[3]
        ),
    )
}

fn criterion_8() -> Outcome {
    for d in [2, 3] {
        for k in [100, 1_000, 10_000, 100_000] {
            let r = degenerate_cuboid_report(d, k).unwrap();
            if !(r.dirichlet_chain && r.neumann_chain) {
                return (false, format!("degenerate cuboid d={d} k={k}: {r:?}"));
            }
        }
    }
    let j = bessel_zero(0, 1).unwrap();
    for k in [100, 1_000, 10_000, 100_000] {
        let b = disjoint_balls_report(k).unwrap();
        let lambda1_unit_area = j * j * PI;
        let ok = b.neumann_zero_block >= k
            && b.mu_k == 0.0
            && rel(b.lambda_k, lambda1_unit_area * k as f64) < 1e-12
            && b.lambda_k > weyl_constant(2) * k as f64;
        if !ok {
            return (false, format!("disjoint balls k={k}: {b:?}"));
        }
    }
    (true, "both degenerate-cuboid chains for d = 2, 3 at k = 10^2..10^5; disjoint-ball block and lambda_k above W_2 k".into())
}

fn criterion_9() -> Outcome {
    let square = Shape::Cuboid(Cuboid::uniform(vec![1.0, 1.0], AxisBc::DirichletBoth).unwrap());
    let mut detail = Vec::new();
    let mut ok = true;
    for bc in [BcFamily::Dirichlet, BcFamily::Neumann] {
        let spec = SequenceSpec { generator: Generator::ShrinkingTo { shape: square.clone() }, k_schedule: vec![100_000], bc };
        let row = &weyl_ratio(&spec).unwrap()[0];
        ok &= (row.ratio - 1.0).abs() <= 0.02;
        detail.push(format!("{bc:?} {:.5}", row.ratio));
    }
    (ok, format!("ratios at k = 10^5: {}", detail.join(", ")))
}

/// Area of the unit-perimeter symmetric circular lens with tip half-angle
/// atan(L), from a fine polygonal boundary.
fn polygonal_lens_area(l: f64) -> f64 {
    let t = l.atan();
    let n = 200_000;
    let radius = 1.0 / (4.0 * t);
    let half_chord = radius * t.sin();
    let centre = radius * t.cos();
    let arc: Vec<[f64; 2]> = (0..=n)
        .map(|i| {
            let a = -t + 2.0 * t * i as f64 / n as f64;
            [radius * a.sin(), radius * a.cos() - centre]
        })
        .collect();
    let cap: f64 = arc.windows(2).map(|w| 0.5 * (w[0][0] * w[1][1] - w[1][0] * w[0][1])).sum::<f64>().abs();
    assert!((arc[n][0] - half_chord).abs() < 1e-12);
    2.0 * cap
}

fn criterion_10() -> Outcome {
    let mut prev = 0.0;
    let mut areas = Vec::new();
    for l in [0.5, 1.0, 2.0, 4.0] {
        let res = isoperimetric_profile(l, 128).unwrap();
        let OptimizedShape::Profile(p) = &res.shape else { return (false, "solver returned a non-profile".into()) };
        let valid = ProfileDomain::new(p.xs().to_vec(), p.h_plus().to_vec(), p.h_minus().to_vec(), l).is_ok();
        if !(valid && p.is_symmetric(0.0) && (p.perimeter() - 1.0).abs() <= 1e-9 && p.area() >= prev) {
            return (false, format!("L={l}: valid {valid}, perimeter {}, area {} after {prev}", p.perimeter(), p.area()));
        }
        prev = p.area();
        areas.push(format!("{:.5}", p.area()));
    }
    let lens = arc_lens_area(8.0);
    let oracle = polygonal_lens_area(8.0);
    if rel(lens, oracle) > 1e-6 {
        return (false, format!("lens formula {lens} disagrees with polygonal lens {oracle}"));
    }
    let res = isoperimetric_profile(8.0, 128).unwrap();
    let ratio = res.objective / lens;
    (ratio >= 0.95, format!("areas L=0.5..4: [{}]; L=8 area / lens = {ratio:.4}", areas.join(", ")))
}

fn random_profile(rng: &mut ChaCha8Rng) -> ProfileDomain {
    let m = rng.gen_range(6..20);
    let l = rng.gen_range(0.5..4.0);
    let dx = 1.0 / m as f64;
    let heights = |s: &[f64]| -> Vec<f64> {
        let mut h = vec![0.0];
        for v in s {
            h.push(h.last().unwrap() + v * dx);
        }
        h[m] = 0.0;
        h
    };
    loop {
        let up: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0 * l..2.0 * l)).collect();
        let lo: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0 * l..2.0 * l)).collect();
        let su = project_slopes(&up, l);
        let sl: Vec<f64> = project_slopes(&lo, l).iter().map(|v| -v).collect();
        let xs: Vec<f64> = (0..=m).map(|i| i as f64 * dx).collect();
        if let Ok(p) = ProfileDomain::new(xs, heights(&su), heights(&sl), l) {
            if p.area() > 1e-3 {
                return p;
            }
        }
    }
}

fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut smallest = f64::INFINITY;
    for i in 0..20 {
        let p = random_profile(&mut rng);
        let z = profile_zaremba_eigenvalue(&p, 1, 4, 12).unwrap();
        if !(z > 0.0) {
            return (false, format!("profile {i}: zeta_1 = {z}"));
        }
        smallest = smallest.min(z);
    }
    let mut checked = 0;
    for sig in [Signature::new(2, 0, 0), Signature::new(1, 0, 1), Signature::new(0, 0, 2)] {
        let r = Cuboid::with_signature(vec![1.0, 1.0], sig).unwrap();
        let exact = spectrum_prefix(&r, 1000).unwrap();
        for k in 1..=1000 {
            let b = zaremba_cuboid_lower(&r, k).unwrap().value;
            if b > exact.kth(k) {
                return (false, format!("{sig} k={k}: bound {b} > exact {}", exact.kth(k)));
            }
            checked += 1;
        }
    }
    (true, format!("min zeta_1 over 20 profiles {smallest:.4}; {checked} cuboid bounds below exact values"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("cuboid spectra exact", criterion_1),
        ("bracketing and Pólya", criterion_2),
        ("mixed square minimizers", criterion_3),
        ("Dirichlet perimeter trend and degeneration", criterion_4),
        ("counting bound dominance", criterion_5),
        ("threshold certificate", criterion_6),
        ("FEM accuracy", criterion_7),
        ("counterexample families", criterion_8),
        ("shrinking squares Weyl ratios", criterion_9),
        ("isoperimetric profiles", criterion_10),
        ("Zaremba positivity and bounds", criterion_11),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let t = Instant::now();
        let (ok, detail) = f();
        let status = if ok { "PASS" } else { "FAIL" };
        println!("criterion {n:>2} {status} [{:.1}s] {name}: {detail}", t.elapsed().as_secs_f64());
        failed += usize::from(!ok);
    }
    println!("acceptance: {failed} criterion(s) failed");
    if failed > 0 && std::env::var_os("ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
