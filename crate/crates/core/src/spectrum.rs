use serde::{Deserialize, Serialize};

use crate::geometry::{AxisBc, Signature};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BcDescriptor {
    Dirichlet,
    Neumann,
    Zaremba,
    Cuboid { axis_bc: Vec<AxisBc>, signature: Signature },
}

/// Coarse boundary-condition class used when combining spectra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcFamily {
    Dirichlet,
    Neumann,
    Zaremba,
}

impl BcDescriptor {
    pub fn family(&self) -> BcFamily {
        match self {
            BcDescriptor::Dirichlet => BcFamily::Dirichlet,
            BcDescriptor::Neumann => BcFamily::Neumann,
            BcDescriptor::Zaremba => BcFamily::Zaremba,
            BcDescriptor::Cuboid { signature, .. } => {
                if signature.b == 0 && signature.c == 0 {
                    BcFamily::Dirichlet
                } else if signature.a == 0 && signature.c == 0 {
                    BcFamily::Neumann
                } else {
                    BcFamily::Zaremba
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SpectrumSource {
    ExactCuboid,
    ExactInterval,
    ExactDisk,
    Fem { mesh_h: f64 },
    Union,
}

/// Identifies the eigenfunction behind an eigenvalue where that is known.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeLabel {
    /// Per-axis 1-based indices of a cuboid tensor mode.
    Lattice(Vec<u32>),
    /// Disk mode J_nu(j r / R) times cos or sin(nu θ); `m` counts radial zeros.
    Disk { nu: u32, m: u32, sine: bool },
    /// Component index and local label for a disjoint union.
    Part(usize, Box<ModeLabel>),
    Unlabeled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub bc: BcDescriptor,
    pub source: SpectrumSource,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<ModeLabel>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// 1-based access, matching the λ_k convention.
    pub fn kth(&self, k: usize) -> f64 {
        self.values[k - 1]
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }

    /// Number of stored eigenvalues strictly below `alpha`.
    pub fn count_below(&self, alpha: f64) -> usize {
        self.values.partition_point(|&v| v < alpha)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,eigenvalue\n");
        for (i, v) in self.values.iter().enumerate() {
            s.push_str(&format!("{},{}\n", i + 1, v));
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spectrum serializes")
    }
}
