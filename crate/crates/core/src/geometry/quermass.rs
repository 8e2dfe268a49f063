use serde::{Deserialize, Serialize};

use super::{binomial, unit_ball_volume, Shape};
use crate::error::{Result, SpectraError};

/// Coefficients of the Steiner polynomial
/// |Ω + δB| = volume + surface·δ + Σ_{j=2}^{d-1} C(d,j) s_j δ^j + ω_d δ^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuermassData {
    pub dim: usize,
    pub volume: f64,
    pub surface: f64,
    /// s_2, …, s_{d-1}; empty for d ≤ 2.
    pub s: Vec<f64>,
    pub omega_d: f64,
}

impl QuermassData {
    pub fn planar(area: f64, perimeter: f64) -> Self {
        QuermassData { dim: 2, volume: area, surface: perimeter, s: Vec::new(), omega_d: std::f64::consts::PI }
    }

    /// s_j for 2 ≤ j ≤ d-1.
    pub fn s_j(&self, j: usize) -> f64 {
        self.s[j - 2]
    }

    /// Same quantities for the body scaled by t.
    pub fn scaled(&self, t: f64) -> QuermassData {
        let d = self.dim as i32;
        QuermassData {
            dim: self.dim,
            volume: self.volume * t.powi(d),
            surface: self.surface * t.powi(d - 1),
            s: self.s.iter().enumerate().map(|(i, s)| s * t.powi(d - (i as i32 + 2))).collect(),
            omega_d: self.omega_d,
        }
    }
}

pub fn quermass(shape: &Shape) -> Result<QuermassData> {
    match shape {
        Shape::Polygon(p) => Ok(QuermassData::planar(p.area(), p.perimeter())),
        Shape::Profile(p) => Ok(QuermassData::planar(p.area(), p.perimeter())),
        Shape::Ball(b) => {
            let d = b.dim;
            let w = unit_ball_volume(d);
            let r = b.radius;
            Ok(QuermassData {
                dim: d,
                volume: w * r.powi(d as i32),
                surface: d as f64 * w * r.powi(d as i32 - 1),
                s: (2..d).map(|j| w * r.powi((d - j) as i32)).collect(),
                omega_d: w,
            })
        }
        Shape::Cuboid(c) => {
            // Coefficient of δ^j is e_{d-j}(sides)·ω_j.
            let d = c.dim();
            Ok(QuermassData {
                dim: d,
                volume: c.volume(),
                surface: c.surface(),
                s: (2..d)
                    .map(|j| c.elementary_symmetric(d - j) * unit_ball_volume(j) / binomial(d, j))
                    .collect(),
                omega_d: unit_ball_volume(d),
            })
        }
        Shape::Rectilinear(_) => Err(SpectraError::UnsupportedShape(
            "quermassintegrals need a convex body".into(),
        )),
    }
}

pub fn steiner_inflate_volume(q: &QuermassData, delta: f64) -> f64 {
    let d = q.dim;
    let mut v = q.volume + q.surface * delta;
    for j in 2..d {
        v += binomial(d, j) * q.s_j(j) * delta.powi(j as i32);
    }
    if d >= 2 {
        v += q.omega_d * delta.powi(d as i32);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{AxisBc, Ball, ConvexPolygon, Cuboid};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    /// Monte-Carlo volume of the δ-neighbourhood of an axis-aligned box.
    fn mc_box_inflation(sides: &[f64], delta: f64, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hits = 0usize;
        let vol_bb: f64 = sides.iter().map(|s| s + 2.0 * delta).product();
        for _ in 0..samples {
            let mut d2 = 0.0;
            for &s in sides {
                let x = rng.gen_range(-delta..s + delta);
                let e = if x < 0.0 { -x } else if x > s { x - s } else { 0.0 };
                d2 += e * e;
            }
            if d2 <= delta * delta {
                hits += 1;
            }
        }
        vol_bb * hits as f64 / samples as f64
    }

    #[test]
    fn unit_disk_and_square() {
        let q = quermass(&Shape::Ball(Ball { radius: 1.0, dim: 2 })).unwrap();
        assert!((q.volume - PI).abs() < 1e-15 && (q.surface - 2.0 * PI).abs() < 1e-15);
        assert!((steiner_inflate_volume(&q, 1.0) - 4.0 * PI).abs() < 1e-14);
        let sq = quermass(&Shape::Polygon(ConvexPolygon::rectangle(1.0, 1.0).unwrap())).unwrap();
        assert!((steiner_inflate_volume(&sq, 1.0) - (5.0 + PI)).abs() < 1e-14);
    }

    #[test]
    fn ball_s2_matches_expansion() {
        let r = 0.7;
        let q = quermass(&Shape::Ball(Ball { radius: r, dim: 3 })).unwrap();
        assert!((q.s_j(2) - 4.0 * PI / 3.0 * r).abs() < 1e-15);
        for delta in [0.1, 0.2] {
            let exact = 4.0 * PI / 3.0 * (r + delta).powi(3);
            assert!((steiner_inflate_volume(&q, delta) - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn box_polynomial_matches_monte_carlo() {
        let sides = [0.8, 1.3, 0.5];
        let c = Cuboid::uniform(sides.to_vec(), AxisBc::DirichletBoth).unwrap();
        let q = quermass(&Shape::Cuboid(c)).unwrap();
        assert!((q.surface - 2.0 * (0.8 * 1.3 + 1.3 * 0.5 + 0.5 * 0.8)).abs() < 1e-15);
        let delta = 0.3;
        let mc = mc_box_inflation(&sides, delta, 2_000_000, 7);
        let exact = steiner_inflate_volume(&q, delta);
        assert!((mc - exact).abs() / exact < 0.01, "mc {mc} vs {exact}");
    }

    #[test]
    fn scaling_is_homogeneous() {
        let q = quermass(&Shape::Ball(Ball { radius: 1.0, dim: 4 })).unwrap();
        let t = 1.7;
        let qs = q.scaled(t);
        let qd = quermass(&Shape::Ball(Ball { radius: t, dim: 4 })).unwrap();
        for (a, b) in qs.s.iter().zip(&qd.s) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((qs.surface - qd.surface).abs() < 1e-12);
    }
}
