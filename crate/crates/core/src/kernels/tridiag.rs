//! Symmetric tridiagonal eigensolver: Sturm-sequence bisection for the values,
//! inverse iteration for the vectors.
//!
//! The matrix is first split into unreduced blocks wherever an off-diagonal
//! entry is negligible, so exactly degenerate eigenvalues (which can only occur
//! across blocks) never meet inside one inverse iteration. Eigenvalues inside a
//! block whose gap is below `CLUSTER_GAP * ‖T‖` form a cluster; their vectors
//! are reorthogonalized against each other by modified Gram-Schmidt. Clusters
//! are independent and may be processed concurrently; each vector's start
//! vector is seeded by its global index so results do not depend on schedule.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::householder::{SkewTridiagonal, SymTridiagonal};
use crate::error::{BseError, Result};
use crate::matrix::{dot, norm2, RealMatrix};
use crate::par;

/// Relative gap below which neighbouring eigenvalues share a cluster.
pub const CLUSTER_GAP: f64 = 1e-2;

const MAX_ITERATIONS: usize = 5;
const MAX_RETRIES: usize = 3;
const MAX_BISECTION_STEPS: usize = 2200;

/// Which part of the spectrum [`tridiag_eig`] returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    All,
    /// The upper half of a zero-diagonal, even-order matrix (its positive eigenvalues).
    Positive,
}

/// Eigenvalues in descending order with matching orthonormal columns of `vectors`,
/// expressed in the basis of the tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct TridiagEig {
    pub values: Vec<f64>,
    pub vectors: RealMatrix,
}

/// `i^k` for the phase diagonal `D = diag(i⁰, i¹, …)`.
#[inline]
pub fn phase(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Relabels the skew tridiagonal `T` as the real symmetric `-i Dᴴ T D`.
///
/// The result has zero diagonal and off-diagonal equal to `alphas`; no
/// arithmetic is performed. An eigenvector `v` of the result maps to the
/// eigenvector `D v` of `-i T` (see [`phase`]).
pub fn phase_fold(t: &SkewTridiagonal) -> SymTridiagonal {
    SymTridiagonal {
        diag: vec![0.0; t.dim()],
        offdiag: t.alphas.clone(),
        q: None,
    }
}

fn pivmin(t: &SymTridiagonal) -> f64 {
    let emax = t.offdiag.iter().map(|e| e * e).fold(1.0, f64::max);
    f64::MIN_POSITIVE * emax
}

/// Number of eigenvalues of `t` strictly less than `x`.
pub fn sturm_count(t: &SymTridiagonal, x: f64) -> usize {
    count_block(&t.diag, &t.offdiag, x, pivmin(t))
}

fn count_block(d: &[f64], e: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        q = d[i] - x - e[i - 1] * e[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Computes the eigenvalue with ascending index `k` of one unreduced block.
fn bisect(d: &[f64], e: &[f64], k: usize, lo: f64, hi: f64, pivmin: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..MAX_BISECTION_STEPS {
        let width = hi - lo;
        let tol = 2.0 * f64::EPSILON * (lo.abs() + hi.abs()) + 4.0 * pivmin;
        if width <= tol {
            break;
        }
        let mid = lo + 0.5 * width;
        if mid <= lo || mid >= hi {
            break;
        }
        if count_block(d, e, mid, pivmin) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo + 0.5 * (hi - lo)
}

fn gershgorin(d: &[f64], e: &[f64]) -> (f64, f64) {
    let b = d.len();
    let mut gl = f64::INFINITY;
    let mut gu = f64::NEG_INFINITY;
    for i in 0..b {
        let mut r = 0.0;
        if i > 0 {
            r += e[i - 1].abs();
        }
        if i + 1 < b {
            r += e[i].abs();
        }
        gl = gl.min(d[i] - r);
        gu = gu.max(d[i] + r);
    }
    let pad = 2.0 * f64::EPSILON * gl.abs().max(gu.abs()) + f64::MIN_POSITIVE;
    (gl - pad, gu + pad)
}

/// Tridiagonal LU with partial pivoting of `T - shift I` (LAPACK `dlagtf` layout).
struct ShiftedLu {
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn new(d: &[f64], e: &[f64], shift: f64, tiny: f64) -> Self {
        let b = d.len();
        let mut u0 = vec![0.0; b];
        let mut u1 = vec![0.0; b];
        let mut u2 = vec![0.0; b];
        let mut mult = vec![0.0; b.saturating_sub(1)];
        let mut swapped = vec![false; b.saturating_sub(1)];
        u0[0] = d[0] - shift;
        if b > 1 {
            u1[0] = e[0];
        }
        for k in 0..b.saturating_sub(1) {
            let sub = e[k];
            let next_diag = d[k + 1] - shift;
            let next_sup = if k + 2 < b { e[k + 1] } else { 0.0 };
            if u0[k].abs() >= sub.abs() {
                let l = if u0[k] == 0.0 { 0.0 } else { sub / u0[k] };
                mult[k] = l;
                u0[k + 1] = next_diag - l * u1[k];
                u1[k + 1] = next_sup;
            } else {
                let l = u0[k] / sub;
                mult[k] = l;
                swapped[k] = true;
                let old_u1 = u1[k];
                u0[k] = sub;
                u1[k] = next_diag;
                u2[k] = next_sup;
                u0[k + 1] = old_u1 - l * next_diag;
                u1[k + 1] = -l * next_sup;
            }
        }
        for p in u0.iter_mut() {
            if p.abs() < tiny {
                *p = if *p < 0.0 { -tiny } else { tiny };
            }
        }
        Self {
            u0,
            u1,
            u2,
            mult,
            swapped,
        }
    }

    fn solve(&self, y: &mut [f64]) {
        let b = y.len();
        for k in 0..b.saturating_sub(1) {
            if self.swapped[k] {
                y.swap(k, k + 1);
            }
            y[k + 1] -= self.mult[k] * y[k];
        }
        for k in (0..b).rev() {
            let mut s = y[k];
            if k + 1 < b {
                s -= self.u1[k] * y[k + 1];
            }
            if k + 2 < b {
                s -= self.u2[k] * y[k + 2];
            }
            y[k] = s / self.u0[k];
        }
    }
}

fn residual(d: &[f64], e: &[f64], lambda: f64, x: &[f64]) -> f64 {
    let b = d.len();
    let mut s = 0.0;
    for i in 0..b {
        let mut r = (d[i] - lambda) * x[i];
        if i > 0 {
            r += e[i - 1] * x[i - 1];
        }
        if i + 1 < b {
            r += e[i] * x[i + 1];
        }
        s += r * r;
    }
    s.sqrt()
}

/// One unreduced block `lo..lo+len` with the ascending eigenvalue indices to compute.
struct Block {
    lo: usize,
    len: usize,
    first_index: usize,
}

struct Cluster {
    block: usize,
    /// (ascending eigenvalue, global tag) pairs.
    members: Vec<(f64, usize)>,
}

/// Eigenvalues (descending) and eigenvectors of a symmetric tridiagonal matrix.
pub fn tridiag_eig(t: &SymTridiagonal, which: Which) -> Result<TridiagEig> {
    let m = t.dim();
    if which == Which::Positive {
        if !m.is_multiple_of(2) {
            return Err(BseError::InvalidArgument(format!(
                "positive half requested for odd order {m}"
            )));
        }
        if t.diag.iter().any(|&x| x != 0.0) {
            return Err(BseError::InvalidArgument(
                "positive half requires an exactly zero diagonal".into(),
            ));
        }
    }
    if m == 0 {
        return Ok(TridiagEig {
            values: vec![],
            vectors: RealMatrix::zeros(0, 0),
        });
    }
    let tnorm = t.norm_bound();
    let pmin = pivmin(t);
    let split_tol = f64::EPSILON * tnorm;

    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 0..m {
        if i + 1 == m || t.offdiag[i].abs() <= split_tol {
            let len = i + 1 - start;
            let first_index = match which {
                Which::All => 0,
                Which::Positive => len / 2,
            };
            blocks.push(Block {
                lo: start,
                len,
                first_index,
            });
            start = i + 1;
        }
    }

    // Eigenvalues per block by bisection, one task per (block, index).
    let jobs: Vec<(usize, usize)> = blocks
        .iter()
        .enumerate()
        .flat_map(|(bi, b)| (b.first_index..b.len).map(move |k| (bi, k)))
        .collect();
    let bounds: Vec<(f64, f64)> = blocks
        .iter()
        .map(|b| {
            let d = &t.diag[b.lo..b.lo + b.len];
            let e = &t.offdiag[b.lo..b.lo + b.len - 1];
            gershgorin(d, e)
        })
        .collect();
    let values: Vec<f64> = par::map_slice(&jobs, |&(bi, k)| {
        let b = &blocks[bi];
        let d = &t.diag[b.lo..b.lo + b.len];
        if b.len == 1 {
            return d[0];
        }
        let e = &t.offdiag[b.lo..b.lo + b.len - 1];
        let (gl, gu) = bounds[bi];
        bisect(d, e, k, gl, gu, pmin)
    });

    // Select what to return (global tags index into `jobs`/`values`).
    let mut order: Vec<usize> = (0..jobs.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    if which == Which::Positive {
        order.truncate(m / 2);
    }
    let mut selected = vec![false; jobs.len()];
    for &g in &order {
        selected[g] = true;
    }

    // Clusters of selected eigenvalues within each block.
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut g = 0;
    for (bi, b) in blocks.iter().enumerate() {
        let count = b.len - b.first_index;
        let ortol = CLUSTER_GAP * tnorm;
        let mut current: Option<Cluster> = None;
        for tag in g..g + count {
            if !selected[tag] {
                continue;
            }
            let v = values[tag];
            match current.as_mut() {
                Some(c) if v - c.members.last().unwrap().0 <= ortol => c.members.push((v, tag)),
                _ => {
                    if let Some(c) = current.take() {
                        clusters.push(c);
                    }
                    current = Some(Cluster {
                        block: bi,
                        members: vec![(v, tag)],
                    });
                }
            }
        }
        if let Some(c) = current.take() {
            clusters.push(c);
        }
        g += count;
    }

    // (global index, vector) pairs per cluster
    type Solved = Vec<(usize, Vec<f64>)>;
    let solved: Vec<Result<Solved>> = par::map_slice(&clusters, |c| {
        let b = &blocks[c.block];
        let d = &t.diag[b.lo..b.lo + b.len];
        let e = if b.len > 1 {
            &t.offdiag[b.lo..b.lo + b.len - 1]
        } else {
            &[][..]
        };
        cluster_vectors(d, e, &c.members, tnorm)
    });

    let mut by_tag: Vec<Option<Vec<f64>>> = vec![None; jobs.len()];
    for (c, res) in clusters.iter().zip(solved) {
        for (tag, v) in res? {
            let _ = c;
            by_tag[tag] = Some(v);
        }
    }

    let mut vectors = RealMatrix::zeros(m, order.len());
    let mut out_values = Vec::with_capacity(order.len());
    for (col, &tag) in order.iter().enumerate() {
        let b = &blocks[jobs[tag].0];
        let v = by_tag[tag].as_ref().expect("every selected eigenvalue has a vector");
        vectors.col_mut(col)[b.lo..b.lo + b.len].copy_from_slice(v);
        out_values.push(values[tag]);
    }
    Ok(TridiagEig {
        values: out_values,
        vectors,
    })
}

fn cluster_vectors(
    d: &[f64],
    e: &[f64],
    members: &[(f64, usize)],
    tnorm: f64,
) -> Result<Vec<(usize, Vec<f64>)>> {
    let b = d.len();
    if b == 1 {
        return Ok(members.iter().map(|&(_, tag)| (tag, vec![1.0])).collect());
    }
    let eps = f64::EPSILON;
    let tiny = eps * tnorm.max(f64::MIN_POSITIVE);
    let tol = 10.0 * (b as f64).sqrt() * eps * tnorm.max(f64::MIN_POSITIVE);
    let mut done: Vec<(usize, Vec<f64>)> = Vec::with_capacity(members.len());
    let mut prev_shift = f64::NEG_INFINITY;

    for &(lambda, tag) in members {
        let mut rng = ChaCha8Rng::seed_from_u64(tag as u64);
        let mut shift = lambda;
        let pertol = 10.0 * (eps * lambda).abs().max(tiny);
        if shift - prev_shift < pertol {
            shift = prev_shift + pertol;
        }
        let mut accepted = None;
        'retry: for attempt in 0..=MAX_RETRIES {
            let lu = ShiftedLu::new(d, e, shift, tiny);
            let mut x: Vec<f64> = (0..b).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let n0 = norm2(&x);
            x.iter_mut().for_each(|v| *v /= n0);
            for _ in 0..MAX_ITERATIONS {
                lu.solve(&mut x);
                for (_, q) in &done {
                    let c = dot(q, &x);
                    x.iter_mut().zip(q).for_each(|(xi, qi)| *xi -= c * qi);
                }
                let nrm = norm2(&x);
                if !(nrm.is_finite() && nrm > 0.0) {
                    break;
                }
                x.iter_mut().for_each(|v| *v /= nrm);
                if residual(d, e, lambda, &x) <= tol {
                    // one more pass for good measure
                    lu.solve(&mut x);
                    for (_, q) in &done {
                        let c = dot(q, &x);
                        x.iter_mut().zip(q).for_each(|(xi, qi)| *xi -= c * qi);
                    }
                    let nrm = norm2(&x);
                    x.iter_mut().for_each(|v| *v /= nrm);
                    accepted = Some(x);
                    break 'retry;
                }
            }
            shift = lambda + (attempt as f64 + 1.0) * pertol;
        }
        match accepted {
            Some(x) => {
                prev_shift = shift;
                done.push((tag, x));
            }
            None => {
                return Err(BseError::InverseIterationFailed {
                    index: tag,
                    value: lambda,
                })
            }
        }
    }
    Ok(done)
}
