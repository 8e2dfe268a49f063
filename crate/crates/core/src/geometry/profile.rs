use serde::{Deserialize, Serialize};

use super::{all_pairs_diameter, dist, ConvexPolygon, Point};
use crate::error::{invalid, Result};

/// Convex domain {(x, y): h⁻(x) < y < h⁺(x)} over a projection interval,
/// piecewise linear on the grid `xs`. The lower graph Γ⁻ carries the
/// Dirichlet condition in Zaremba problems, the upper graph Γ⁺ the Neumann one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileDomain {
    xs: Vec<f64>,
    h_plus: Vec<f64>,
    h_minus: Vec<f64>,
    lipschitz: f64,
}

const REL_TOL: f64 = 1e-9;

impl ProfileDomain {
    pub fn new(xs: Vec<f64>, h_plus: Vec<f64>, h_minus: Vec<f64>, lipschitz: f64) -> Result<Self> {
        let n = xs.len();
        if n < 2 {
            return invalid("profile grid needs at least 2 nodes");
        }
        if h_plus.len() != n || h_minus.len() != n {
            return invalid("profile arrays must match the grid length");
        }
        if !(lipschitz.is_finite() && lipschitz > 0.0) {
            return invalid("Lipschitz bound must be positive and finite");
        }
        if xs.iter().chain(&h_plus).chain(&h_minus).any(|v| !v.is_finite()) {
            return invalid("profile contains non-finite values");
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("profile grid must be strictly increasing");
        }
        let scale = (xs[n - 1] - xs[0])
            .max(h_plus.iter().cloned().fold(f64::MIN, f64::max) - h_minus.iter().cloned().fold(f64::MAX, f64::min));
        let tol = REL_TOL * scale;
        if (h_plus[0] - h_minus[0]).abs() > tol || (h_plus[n - 1] - h_minus[n - 1]).abs() > tol {
            return invalid("profiles must agree at both ends of the projection interval");
        }
        if n == 2 {
            return invalid("profile needs at least one interior node");
        }
        for i in 1..n - 1 {
            if h_plus[i] <= h_minus[i] {
                return invalid(format!("upper profile not above lower profile at node {i}"));
            }
        }
        let slope_tol = REL_TOL * (1.0 + lipschitz);
        let sp = slopes(&xs, &h_plus);
        let sm = slopes(&xs, &h_minus);
        if sp.iter().chain(&sm).any(|s| s.abs() > lipschitz + slope_tol) {
            return invalid("profile slope exceeds the Lipschitz bound");
        }
        if sp.windows(2).any(|w| w[1] > w[0] + slope_tol) {
            return invalid("upper profile is not concave");
        }
        if sm.windows(2).any(|w| w[1] < w[0] - slope_tol) {
            return invalid("lower profile is not convex");
        }
        Ok(ProfileDomain { xs, h_plus, h_minus, lipschitz })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn h_plus(&self) -> &[f64] {
        &self.h_plus
    }

    pub fn h_minus(&self) -> &[f64] {
        &self.h_minus
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn nodes(&self) -> usize {
        self.xs.len()
    }

    /// Length of the projection interval ℘(Ω).
    pub fn width(&self) -> f64 {
        self.xs[self.xs.len() - 1] - self.xs[0]
    }

    pub fn area(&self) -> f64 {
        let mut a = 0.0;
        for i in 0..self.xs.len() - 1 {
            let t0 = self.h_plus[i] - self.h_minus[i];
            let t1 = self.h_plus[i + 1] - self.h_minus[i + 1];
            a += 0.5 * (t0 + t1) * (self.xs[i + 1] - self.xs[i]);
        }
        a
    }

    pub fn upper_length(&self) -> f64 {
        graph_length(&self.xs, &self.h_plus)
    }

    pub fn lower_length(&self) -> f64 {
        graph_length(&self.xs, &self.h_minus)
    }

    pub fn perimeter(&self) -> f64 {
        self.upper_length() + self.lower_length()
    }

    pub fn diameter(&self) -> f64 {
        all_pairs_diameter(&self.boundary_loop())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.h_plus.iter().zip(&self.h_minus).all(|(p, m)| (p + m).abs() <= tol)
    }

    /// Boundary as a CCW vertex loop: lower graph left to right, then the
    /// upper graph right to left. Endpoints appear once. Collinear vertices
    /// are kept, so edge i for i < m lies on Γ⁻ and the rest on Γ⁺.
    pub fn boundary_loop(&self) -> Vec<Point> {
        let n = self.xs.len();
        let mut v = Vec::with_capacity(2 * n - 2);
        for i in 0..n {
            v.push([self.xs[i], self.h_minus[i]]);
        }
        for i in (1..n - 1).rev() {
            v.push([self.xs[i], self.h_plus[i]]);
        }
        v
    }

    pub fn to_polygon(&self) -> Result<ConvexPolygon> {
        ConvexPolygon::new(self.boundary_loop())
    }

    /// Homothety about the left end of the projection interval.
    pub fn scaled(&self, t: f64) -> Result<ProfileDomain> {
        let x0 = self.xs[0];
        let y0 = self.h_plus[0];
        ProfileDomain::new(
            self.xs.iter().map(|x| x0 + t * (x - x0)).collect(),
            self.h_plus.iter().map(|y| y0 + t * (y - y0)).collect(),
            self.h_minus.iter().map(|y| y0 + t * (y - y0)).collect(),
            self.lipschitz,
        )
    }

    pub fn with_unit_perimeter(&self) -> Result<ProfileDomain> {
        self.scaled(1.0 / self.perimeter())
    }
}

pub(crate) fn slopes(xs: &[f64], h: &[f64]) -> Vec<f64> {
    xs.windows(2).zip(h.windows(2)).map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0])).collect()
}

fn graph_length(xs: &[f64], h: &[f64]) -> f64 {
    (0..xs.len() - 1).map(|i| dist([xs[i], h[i]], [xs[i + 1], h[i + 1]])).sum()
}

/// Steiner symmetrization about the x-axis: h = (h⁺ − h⁻)/2.
pub fn steiner_symmetrize(p: &ProfileDomain) -> ProfileDomain {
    let half: Vec<f64> = p.h_plus.iter().zip(&p.h_minus).map(|(a, b)| 0.5 * (a - b)).collect();
    let neg: Vec<f64> = half.iter().map(|v| -v).collect();
    ProfileDomain::new(p.xs.clone(), half, neg, p.lipschitz)
        .expect("symmetrization of a valid profile domain stays valid")
}

impl<'de> Deserialize<'de> for ProfileDomain {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            xs: Vec<f64>,
            h_plus: Vec<f64>,
            h_minus: Vec<f64>,
            lipschitz: f64,
        }
        let r = Raw::deserialize(de)?;
        ProfileDomain::new(r.xs, r.h_plus, r.h_minus, r.lipschitz).map_err(serde::de::Error::custom)
    }
}
