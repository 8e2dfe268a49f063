use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Boundary condition on the two opposite faces normal to one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisBc {
    #[serde(alias = "D", alias = "dirichlet")]
    DirichletBoth,
    #[serde(alias = "N", alias = "neumann")]
    NeumannBoth,
    /// Dirichlet on one face, Neumann on the other.
    #[serde(alias = "Z", alias = "M", alias = "zaremba")]
    Mixed,
}

impl AxisBc {
    pub fn from_code(s: &str) -> Option<AxisBc> {
        match s.trim() {
            "D" | "d" => Some(AxisBc::DirichletBoth),
            "N" | "n" => Some(AxisBc::NeumannBoth),
            "Z" | "z" | "M" | "m" => Some(AxisBc::Mixed),
            _ => None,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            AxisBc::DirichletBoth => "D",
            AxisBc::NeumannBoth => "N",
            AxisBc::Mixed => "Z",
        }
    }
}

/// Counts (a, b, c) of Dirichlet, Neumann and mixed axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl Signature {
    pub fn new(a: usize, b: usize, c: usize) -> Self {
        Signature { a, b, c }
    }

    pub fn dim(&self) -> usize {
        self.a + self.b + self.c
    }

    /// Axis conditions in canonical order: Dirichlet axes, then Neumann, then mixed.
    pub fn axis_bcs(&self) -> Vec<AxisBc> {
        let mut v = vec![AxisBc::DirichletBoth; self.a];
        v.extend(std::iter::repeat(AxisBc::NeumannBoth).take(self.b));
        v.extend(std::iter::repeat(AxisBc::Mixed).take(self.c));
        v
    }
}

impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cuboid {
    sides: Vec<f64>,
    axis_bc: Vec<AxisBc>,
}

impl Cuboid {
    pub fn new(sides: Vec<f64>, axis_bc: Vec<AxisBc>) -> Result<Self> {
        if sides.is_empty() {
            return invalid("cuboid needs at least one side");
        }
        if sides.len() != axis_bc.len() {
            return invalid(format!(
                "cuboid has {} sides but {} axis conditions",
                sides.len(),
                axis_bc.len()
            ));
        }
        if let Some(s) = sides.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return invalid(format!("cuboid side {s} is not a positive finite length"));
        }
        Ok(Cuboid { sides, axis_bc })
    }

    pub fn uniform(sides: Vec<f64>, bc: AxisBc) -> Result<Self> {
        let n = sides.len();
        Cuboid::new(sides, vec![bc; n])
    }

    pub fn with_signature(sides: Vec<f64>, sig: Signature) -> Result<Self> {
        if sig.dim() != sides.len() {
            return invalid(format!("signature {sig} does not match dimension {}", sides.len()));
        }
        Cuboid::new(sides, sig.axis_bcs())
    }

    pub fn unit_cube(d: usize, bc: AxisBc) -> Self {
        Cuboid { sides: vec![1.0; d], axis_bc: vec![bc; d] }
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[f64] {
        &self.sides
    }

    pub fn axis_bc(&self) -> &[AxisBc] {
        &self.axis_bc
    }

    pub fn signature(&self) -> Signature {
        let mut s = Signature::new(0, 0, 0);
        for bc in &self.axis_bc {
            match bc {
                AxisBc::DirichletBoth => s.a += 1,
                AxisBc::NeumannBoth => s.b += 1,
                AxisBc::Mixed => s.c += 1,
            }
        }
        s
    }

    /// Same box with every axis set to `bc`.
    pub fn with_bc(&self, bc: AxisBc) -> Cuboid {
        Cuboid { sides: self.sides.clone(), axis_bc: vec![bc; self.dim()] }
    }

    pub fn scaled(&self, t: f64) -> Result<Cuboid> {
        Cuboid::new(self.sides.iter().map(|s| s * t).collect(), self.axis_bc.clone())
    }

    pub fn volume(&self) -> f64 {
        self.sides.iter().product()
    }

    /// Elementary symmetric polynomial e_m of the side lengths.
    pub fn elementary_symmetric(&self, m: usize) -> f64 {
        let mut e = vec![0.0; self.dim() + 1];
        e[0] = 1.0;
        for (i, &s) in self.sides.iter().enumerate() {
            for j in (1..=i + 1).rev() {
                e[j] += e[j - 1] * s;
            }
        }
        e.get(m).copied().unwrap_or(0.0)
    }

    /// (d-1)-measure of the boundary; for d = 1 this is the two endpoints.
    pub fn surface(&self) -> f64 {
        2.0 * self.elementary_symmetric(self.dim() - 1)
    }

    pub fn diameter(&self) -> f64 {
        self.sides.iter().map(|s| s * s).sum::<f64>().sqrt()
    }
}

impl<'de> Deserialize<'de> for Cuboid {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            sides: Vec<f64>,
            axis_bc: Vec<AxisBc>,
        }
        let r = Raw::deserialize(de)?;
        Cuboid::new(r.sides, r.axis_bc).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sides() {
        assert!(Cuboid::uniform(vec![1.0, 0.0], AxisBc::DirichletBoth).is_err());
        assert!(Cuboid::uniform(vec![1.0, f64::NAN], AxisBc::DirichletBoth).is_err());
        assert!(Cuboid::new(vec![1.0], vec![]).is_err());
    }

    #[test]
    fn signature_counts() {
        let r = Cuboid::new(
            vec![1.0, 2.0, 3.0],
            vec![AxisBc::Mixed, AxisBc::DirichletBoth, AxisBc::Mixed],
        )
        .unwrap();
        assert_eq!(r.signature(), Signature::new(1, 0, 2));
    }

    #[test]
    fn box_functionals() {
        let r = Cuboid::uniform(vec![1.0, 2.0, 3.0], AxisBc::NeumannBoth).unwrap();
        assert_eq!(r.volume(), 6.0);
        assert_eq!(r.surface(), 2.0 * (2.0 + 6.0 + 3.0));
        assert!((r.diameter() - 14f64.sqrt()).abs() < 1e-15);
        let sq = Cuboid::unit_cube(2, AxisBc::DirichletBoth);
        assert!((sq.diameter() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(sq.surface(), 4.0);
    }
}
