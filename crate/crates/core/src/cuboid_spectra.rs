//! Exact spectra of the Laplacian on boxes with per-axis Dirichlet, Neumann
//! or mixed conditions. Every eigenvalue is a sum σ¹_{i₁} + … + σᵈ_{i_d} of
//! interval eigenvalues; the k smallest sums are produced by best-first
//! expansion of the index lattice.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, SpectraError};
use crate::geometry::{weyl_constant, AxisBc, Cuboid};
use crate::spectrum::{BcDescriptor, ModeLabel, Spectrum, SpectrumSource};

/// k-th eigenvalue (k ≥ 1) of the interval (0, ℓ).
pub fn interval_eigenvalue(bc: AxisBc, k: u32, length: f64) -> f64 {
    debug_assert!(k >= 1);
    let q = match bc {
        AxisBc::DirichletBoth => k as f64,
        AxisBc::NeumannBoth => (k - 1) as f64,
        AxisBc::Mixed => k as f64 - 0.5,
    };
    let t = PI * q / length;
    t * t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationLimits {
    pub memory_budget_bytes: usize,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits { memory_budget_bytes: 2 << 30 }
    }
}

struct AxisTables<'a> {
    cuboid: &'a Cuboid,
    tables: Vec<Vec<f64>>,
}

impl<'a> AxisTables<'a> {
    fn new(cuboid: &'a Cuboid) -> Self {
        AxisTables { cuboid, tables: vec![Vec::new(); cuboid.dim()] }
    }

    fn get(&mut self, axis: usize, i: u32) -> f64 {
        let t = &mut self.tables[axis];
        while t.len() < i as usize {
            let k = t.len() as u32 + 1;
            t.push(interval_eigenvalue(self.cuboid.axis_bc()[axis], k, self.cuboid.sides()[axis]));
        }
        t[i as usize - 1]
    }

    /// Left-to-right sum over axes; every caller uses this order.
    fn sum(&mut self, idx: &[u32]) -> f64 {
        let mut s = 0.0;
        for (axis, &i) in idx.iter().enumerate() {
            s += self.get(axis, i);
        }
        s
    }
}

#[derive(PartialEq)]
struct Node {
    value: f64,
    idx: Vec<u32>,
}

impl Eq for Node {}

impl Ord for Node {
    // Reversed so that BinaryHeap pops the smallest value, then the
    // lexicographically smallest index.
    fn cmp(&self, other: &Self) -> Ordering {
        other.value.total_cmp(&self.value).then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn enumerate(r: &Cuboid, k: usize, limits: EnumerationLimits) -> Result<(Vec<f64>, Vec<Vec<u32>>)> {
    if k == 0 {
        return invalid("k must be at least 1");
    }
    let d = r.dim();
    let visited_cost = 48 + 4 * d;
    let heap_cost = 40 + 4 * d;
    let mut axes = AxisTables::new(r);
    let mut heap = BinaryHeap::new();
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let start = vec![1u32; d];
    heap.push(Node { value: axes.sum(&start), idx: start.clone() });
    seen.insert(start);
    let mut values = Vec::with_capacity(k);
    let mut labels = Vec::with_capacity(k);
    while values.len() < k {
        let node = heap.pop().expect("lattice is infinite");
        for axis in 0..d {
            let mut next = node.idx.clone();
            next[axis] += 1;
            if seen.insert(next.clone()) {
                heap.push(Node { value: axes.sum(&next), idx: next });
            }
        }
        values.push(node.value);
        labels.push(node.idx);
        let bytes = seen.len() * visited_cost + heap.len() * heap_cost + labels.len() * (24 + 4 * d);
        if bytes > limits.memory_budget_bytes {
            return Err(SpectraError::ResourceLimit(format!(
                "cuboid enumeration needs more than {} bytes at k = {}",
                limits.memory_budget_bytes,
                values.len()
            )));
        }
    }
    Ok((values, labels))
}

pub fn kth_eigenvalue(r: &Cuboid, k: usize) -> Result<f64> {
    kth_eigenvalue_with(r, k, EnumerationLimits::default())
}

pub fn kth_eigenvalue_with(r: &Cuboid, k: usize, limits: EnumerationLimits) -> Result<f64> {
    Ok(*enumerate(r, k, limits)?.0.last().expect("k >= 1"))
}

pub fn spectrum_prefix(r: &Cuboid, k: usize) -> Result<Spectrum> {
    spectrum_prefix_with(r, k, EnumerationLimits::default())
}

pub fn spectrum_prefix_with(r: &Cuboid, k: usize, limits: EnumerationLimits) -> Result<Spectrum> {
    let (values, labels) = enumerate(r, k, limits)?;
    Ok(Spectrum {
        values,
        bc: descriptor(r),
        source: if r.dim() == 1 { SpectrumSource::ExactInterval } else { SpectrumSource::ExactCuboid },
        labels: labels.into_iter().map(ModeLabel::Lattice).collect(),
    })
}

pub fn descriptor(r: &Cuboid) -> BcDescriptor {
    BcDescriptor::Cuboid { axis_bc: r.axis_bc().to_vec(), signature: r.signature() }
}

/// Number of eigenvalues strictly below `alpha`.
pub fn counting(r: &Cuboid, alpha: f64) -> u64 {
    let mut axes = AxisTables::new(r);
    count_rec(&mut axes, 0, 0.0, alpha)
}

// Partial sums are accumulated in the same axis order as `AxisTables::sum`,
// and rounding is monotone, so the count agrees exactly with the enumeration.
fn count_rec(axes: &mut AxisTables, axis: usize, partial: f64, alpha: f64) -> u64 {
    let d = axes.cuboid.dim();
    let mut total = 0;
    let mut i = 1;
    loop {
        let s = partial + axes.get(axis, i);
        if s >= alpha {
            break;
        }
        total += if axis + 1 == d { 1 } else { count_rec(axes, axis + 1, s, alpha) };
        i += 1;
    }
    total
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyaViolation {
    pub k: usize,
    pub mu_next: f64,
    pub weyl: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyaReport {
    pub k_max: usize,
    pub checked: usize,
    pub first_violation: Option<PolyaViolation>,
}

/// Checks μ_{k+1} ≤ W_d k^{2/d} |R|^{-2/d} ≤ λ_k for 1 ≤ k ≤ k_max, using the
/// all-Neumann and all-Dirichlet versions of the box.
pub fn polya_check(r: &Cuboid, k_max: usize) -> Result<PolyaReport> {
    if k_max == 0 {
        return invalid("k_max must be at least 1");
    }
    let d = r.dim() as f64;
    let mu = spectrum_prefix(&r.with_bc(AxisBc::NeumannBoth), k_max + 1)?;
    let lam = spectrum_prefix(&r.with_bc(AxisBc::DirichletBoth), k_max)?;
    let scale = weyl_constant(r.dim()) * r.volume().powf(-2.0 / d);
    for k in 1..=k_max {
        let w = scale * (k as f64).powf(2.0 / d);
        let (m, l) = (mu.kth(k + 1), lam.kth(k));
        if !(m <= w && w <= l) {
            return Ok(PolyaReport {
                k_max,
                checked: k,
                first_violation: Some(PolyaViolation { k, mu_next: m, weyl: w, lambda: l }),
            });
        }
    }
    Ok(PolyaReport { k_max, checked: k_max, first_violation: None })
}
