//! Integer-order Bessel functions of the first kind and their zeros.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectraError};

const SERIES_LIMIT: f64 = 12.0;

/// Ascending power series; used for x ≤ 12 where cancellation stays mild.
fn series(nu: u32, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut t = 1.0;
    for i in 1..=nu {
        t *= h / i as f64;
    }
    let h2 = h * h;
    let mut sum = t;
    let mut m = 0u32;
    loop {
        m += 1;
        t *= -h2 / (m as f64 * (m + nu) as f64);
        sum += t;
        if t.abs() <= 1e-17 * sum.abs().max(1e-300) && m as f64 > h {
            break;
        }
        if m > 500 {
            break;
        }
    }
    sum
}

/// J_0(x), …, J_{nmax}(x) by Miller's backward recurrence, normalized with
/// J_0 + 2 Σ J_{2k} = 1.
fn miller(nmax: u32, x: f64) -> Vec<f64> {
    let top = (nmax as f64).max(x);
    let mut n_start = (top + 30.0 + 10.0 * x.cbrt()).ceil() as usize;
    if n_start % 2 == 1 {
        n_start += 1;
    }
    let mut out = vec![0.0; nmax as usize + 1];
    let mut j_next = 0.0;
    let mut j_cur = 1e-300;
    let mut norm = 0.0;
    for n in (1..=n_start).rev() {
        // j_cur holds J_n, j_next holds J_{n+1}
        let j_prev = 2.0 * n as f64 / x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        let idx = n - 1;
        if idx <= nmax as usize {
            out[idx] = j_cur;
        }
        if idx % 2 == 0 && idx > 0 {
            norm += 2.0 * j_cur;
        }
        if j_cur.abs() > 1e250 {
            let s = 1e-250;
            j_cur *= s;
            j_next *= s;
            norm *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    if nmax as usize >= n_start {
        unreachable!("start index exceeds requested order range");
    }
    norm += j_cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

/// J_ν(x) for integer ν ≥ 0 and x ≥ 0.
pub fn bessel_j(nu: u32, x: f64) -> f64 {
    j_pair(nu, x).0
}

/// (J_ν(x), J_{ν+1}(x)).
pub fn j_pair(nu: u32, x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (if nu == 0 { 1.0 } else { 0.0 }, 0.0);
    }
    if x <= SERIES_LIMIT {
        (series(nu, x), series(nu + 1, x))
    } else {
        let v = miller(nu + 1, x);
        (v[nu as usize], v[nu as usize + 1])
    }
}

/// J_ν'(x) = (ν/x) J_ν − J_{ν+1}.
pub fn bessel_j_prime(nu: u32, x: f64) -> f64 {
    let (j, j1) = j_pair(nu, x);
    if x == 0.0 {
        return if nu == 1 { 0.5 } else { 0.0 };
    }
    nu as f64 / x * j - j1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroKind {
    /// Zeros of J_ν (Dirichlet disk modes).
    Function,
    /// Positive zeros of J_ν' (Neumann disk modes).
    Derivative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesselZeroTable {
    pub nu: u32,
    pub kind: ZeroKind,
    pub zeros: Vec<f64>,
}

fn target(kind: ZeroKind, nu: u32, x: f64) -> (f64, f64) {
    let (j, j1) = j_pair(nu, x);
    let jp = nu as f64 / x * j - j1;
    match kind {
        ZeroKind::Function => (j, jp),
        ZeroKind::Derivative => {
            let nf = nu as f64;
            let jpp = -jp / x - (1.0 - nf * nf / (x * x)) * j;
            (jp, jpp)
        }
    }
}

fn next_zero(kind: ZeroKind, nu: u32, after: Option<f64>) -> Result<f64> {
    const STEP: f64 = 0.2;
    let mut a = match after {
        Some(z) => z + STEP,
        None => (nu as f64).max(0.5),
    };
    let mut fa = target(kind, nu, a).0;
    let limit = a + 50.0;
    while a < limit {
        let b = a + STEP;
        let fb = target(kind, nu, b).0;
        if fa == 0.0 {
            return Ok(a);
        }
        if fa.signum() != fb.signum() {
            return refine(kind, nu, a, b, fa);
        }
        a = b;
        fa = fb;
    }
    Err(SpectraError::NumericalFailure(format!(
        "no sign change found for {kind:?} zero of order {nu} after {after:?}"
    )))
}

fn refine(kind: ZeroKind, nu: u32, mut a: f64, mut b: f64, mut fa: f64) -> Result<f64> {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = target(kind, nu, m).0;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
        if b - a < 1e-13 * b {
            break;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..3 {
        let (f, fp) = target(kind, nu, x);
        if fp == 0.0 || !fp.is_finite() {
            break;
        }
        let nx = x - f / fp;
        if !(nx.is_finite() && (nx - x).abs() < 1e-8) {
            break;
        }
        x = nx;
    }
    if !x.is_finite() {
        return Err(SpectraError::NumericalFailure(format!("zero refinement diverged for order {nu}")));
    }
    Ok(x)
}

type Cache = RwLock<HashMap<(ZeroKind, u32), Vec<f64>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// First `count` positive zeros of J_ν or J_ν', computed on demand and cached.
pub fn zero_table(kind: ZeroKind, nu: u32, count: usize) -> Result<BesselZeroTable> {
    {
        let guard = cache().read().expect("zero cache poisoned");
        if let Some(z) = guard.get(&(kind, nu)) {
            if z.len() >= count {
                return Ok(BesselZeroTable { nu, kind, zeros: z[..count].to_vec() });
            }
        }
    }
    let mut zeros = cache().read().expect("zero cache poisoned").get(&(kind, nu)).cloned().unwrap_or_default();
    while zeros.len() < count {
        let z = next_zero(kind, nu, zeros.last().copied())?;
        zeros.push(z);
    }
    let mut guard = cache().write().expect("zero cache poisoned");
    let entry = guard.entry((kind, nu)).or_default();
    if entry.len() < zeros.len() {
        *entry = zeros.clone();
    }
    Ok(BesselZeroTable { nu, kind, zeros: zeros[..count].to_vec() })
}

/// m-th positive zero of J_ν (m ≥ 1).
pub fn bessel_zero(nu: u32, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(SpectraError::InvalidInput("zero index starts at 1".into()));
    }
    Ok(zero_table(ZeroKind::Function, nu, m)?.zeros[m - 1])
}

/// m-th positive zero of J_ν' (m ≥ 1).
pub fn bessel_prime_zero(nu: u32, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(SpectraError::InvalidInput("zero index starts at 1".into()));
    }
    Ok(zero_table(ZeroKind::Derivative, nu, m)?.zeros[m - 1])
}
