//! Reference spectra that are not tensor products: disks (through Bessel
//! zeros) and disjoint unions (multiset merge of component spectra).

mod bessel;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

pub use bessel::{bessel_j, bessel_j_prime, bessel_prime_zero, bessel_zero, zero_table, BesselZeroTable, ZeroKind};

use crate::error::{invalid, Result, SpectraError};
use crate::spectrum::{BcDescriptor, BcFamily, ModeLabel, Spectrum, SpectrumSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiskBc {
    Dirichlet,
    Neumann,
}

/// Radial root for mode (ν, m). For Neumann, (0, 1) is the constant mode and
/// (0, m) for m ≥ 2 uses the zeros of J_0' = −J_1.
fn disk_root(bc: DiskBc, nu: u32, m: u32) -> Result<f64> {
    match bc {
        DiskBc::Dirichlet => bessel_zero(nu, m as usize),
        DiskBc::Neumann if nu == 0 => {
            if m == 1 {
                Ok(0.0)
            } else {
                bessel_prime_zero(0, m as usize - 1)
            }
        }
        DiskBc::Neumann => bessel_prime_zero(nu, m as usize),
    }
}

struct Entry {
    root: f64,
    nu: u32,
    m: u32,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.root.total_cmp(&self.root).then_with(|| (other.nu, other.m).cmp(&(self.nu, self.m)))
    }
}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// First k eigenvalues of the disk of radius r. Modes with ν ≥ 1 appear
/// twice (cosine and sine).
pub fn disk_spectrum(bc: DiskBc, radius: f64, k: usize) -> Result<Spectrum> {
    if !(radius.is_finite() && radius > 0.0) {
        return invalid("disk radius must be positive");
    }
    // Roots increase in m for fixed ν, and the first root increases in ν,
    // so (ν+1, 1) only needs to enter once (ν, 1) has been taken.
    let mut heap = BinaryHeap::new();
    heap.push(Entry { root: disk_root(bc, 0, 1)?, nu: 0, m: 1 });
    let mut values = Vec::with_capacity(k);
    let mut labels = Vec::with_capacity(k);
    let r2 = radius * radius;
    while values.len() < k {
        let e = heap.pop().ok_or_else(|| SpectraError::NumericalFailure("disk mode queue exhausted".into()))?;
        heap.push(Entry { root: disk_root(bc, e.nu, e.m + 1)?, nu: e.nu, m: e.m + 1 });
        if e.m == 1 {
            heap.push(Entry { root: disk_root(bc, e.nu + 1, 1)?, nu: e.nu + 1, m: 1 });
        }
        let v = e.root * e.root / r2;
        values.push(v);
        labels.push(ModeLabel::Disk { nu: e.nu, m: e.m, sine: false });
        if e.nu > 0 && values.len() < k {
            values.push(v);
            labels.push(ModeLabel::Disk { nu: e.nu, m: e.m, sine: true });
        }
    }
    Ok(Spectrum {
        values,
        bc: match bc {
            DiskBc::Dirichlet => BcDescriptor::Dirichlet,
            DiskBc::Neumann => BcDescriptor::Neumann,
        },
        source: SpectrumSource::ExactDisk,
        labels,
    })
}

/// Spectrum of a disjoint union: sorted multiset union of the parts.
pub fn merge_spectra(parts: &[Spectrum]) -> Result<Spectrum> {
    let first = parts.first().ok_or_else(|| SpectraError::InvalidInput("nothing to merge".into()))?;
    let family = first.bc.family();
    if let Some(bad) = parts.iter().find(|p| p.bc.family() != family) {
        return Err(SpectraError::IncompatibleBc(format!(
            "cannot merge {:?} with {:?} spectra",
            family,
            bad.bc.family()
        )));
    }
    if parts.len() == 1 {
        return Ok(first.clone());
    }
    let mut all: Vec<(f64, ModeLabel)> = Vec::with_capacity(parts.iter().map(|p| p.len()).sum());
    for (i, p) in parts.iter().enumerate() {
        for (j, &v) in p.values.iter().enumerate() {
            let inner = p.labels.get(j).cloned().unwrap_or(ModeLabel::Unlabeled);
            all.push((v, ModeLabel::Part(i, Box::new(inner))));
        }
    }
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let bc = match family {
        BcFamily::Dirichlet => BcDescriptor::Dirichlet,
        BcFamily::Neumann => BcDescriptor::Neumann,
        BcFamily::Zaremba => BcDescriptor::Zaremba,
    };
    let (values, labels) = all.into_iter().unzip();
    Ok(Spectrum { values, bc, source: SpectrumSource::Union, labels })
}
